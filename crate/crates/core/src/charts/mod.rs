//! Coordinate charts on Euclidean 3-space and hyperbolic 3-space.
//!
//! Every chart belongs to an [`Ambient`] space. Tangent vectors are always
//! expressed against the ambient space's global orthonormal frame
//! `(ξ₁, ξ₂, ξ₃)`: the fixed Cartesian basis in the Euclidean case, and
//! `ξᵢ = z ∂ᵢ` of the upper half-space model in the hyperbolic case.
//!
//! The hyperbolic ball-polar chart uses geodesic polar coordinates
//! `(ρ, θ, φ)` about the half-space point `(0, 0, 1)`, which the Cayley map
//! sends to the centre of the Poincaré ball. Ball radius and geodesic radius
//! are related by `r = tanh(ρ/2)`.

mod calculus;
mod frame;

pub use calculus::{scalar_gradient, scalar_jet, scalar_laplacian, ScalarJet, DEFAULT_STEP};
pub use frame::{
    bending_fd, covariant_derivative_along, divergence, frame_covariant_derivative, frame_jet,
    frame_scalar_jet, rough_laplacian, ConnectionTable, FnField, FrameField, FrameJet,
};

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ambient {
    Euclidean,
    Hyperbolic,
}

impl Ambient {
    /// The chart in which frame components and finite-difference stencils live.
    pub fn frame_chart(self) -> ChartId {
        match self {
            Ambient::Euclidean => ChartId::EuclideanCartesian,
            Ambient::Hyperbolic => ChartId::HyperbolicHalfSpace,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChartId {
    /// `(x, y, z)`
    EuclideanCartesian,
    /// `(r, θ, z)`
    EuclideanCylindrical,
    /// `(R, θ, φ)` with `φ` measured from `ξ₃`
    EuclideanSpherical,
    /// `(x, y, z)` with `z > 0`, metric `(dx² + dy² + dz²)/z²`
    HyperbolicHalfSpace,
    /// geodesic polar `(ρ, θ, φ)` about the ball centre
    HyperbolicBallPolar,
}

impl ChartId {
    pub fn ambient(self) -> Ambient {
        match self {
            ChartId::EuclideanCartesian
            | ChartId::EuclideanCylindrical
            | ChartId::EuclideanSpherical => Ambient::Euclidean,
            ChartId::HyperbolicHalfSpace | ChartId::HyperbolicBallPolar => Ambient::Hyperbolic,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ChartId::EuclideanCartesian => "cartesian",
            ChartId::EuclideanCylindrical => "cylindrical",
            ChartId::EuclideanSpherical => "spherical",
            ChartId::HyperbolicHalfSpace => "halfspace",
            ChartId::HyperbolicBallPolar => "ball-polar",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "cartesian" => ChartId::EuclideanCartesian,
            "cylindrical" => ChartId::EuclideanCylindrical,
            "spherical" => ChartId::EuclideanSpherical,
            "halfspace" => ChartId::HyperbolicHalfSpace,
            "ball-polar" => ChartId::HyperbolicBallPolar,
            _ => return None,
        })
    }

    pub const ALL: [ChartId; 5] = [
        ChartId::EuclideanCartesian,
        ChartId::EuclideanCylindrical,
        ChartId::EuclideanSpherical,
        ChartId::HyperbolicHalfSpace,
        ChartId::HyperbolicBallPolar,
    ];
}

impl fmt::Display for ChartId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A point of ℝ³ or H³ in one of the five charts.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChartPoint {
    chart: ChartId,
    coords: [f64; 3],
}

impl ChartPoint {
    pub fn new(chart: ChartId, c1: f64, c2: f64, c3: f64) -> Result<Self> {
        let p = ChartPoint {
            chart,
            coords: [c1, c2, c3],
        };
        p.validate()?;
        Ok(p)
    }

    pub fn cartesian(x: f64, y: f64, z: f64) -> Self {
        ChartPoint {
            chart: ChartId::EuclideanCartesian,
            coords: [x, y, z],
        }
    }

    pub fn cylindrical(r: f64, theta: f64, z: f64) -> Result<Self> {
        Self::new(ChartId::EuclideanCylindrical, r, theta, z)
    }

    pub fn spherical(radius: f64, theta: f64, phi: f64) -> Result<Self> {
        Self::new(ChartId::EuclideanSpherical, radius, theta, phi)
    }

    pub fn half_space(x: f64, y: f64, z: f64) -> Result<Self> {
        Self::new(ChartId::HyperbolicHalfSpace, x, y, z)
    }

    pub fn ball_polar(rho: f64, theta: f64, phi: f64) -> Result<Self> {
        Self::new(ChartId::HyperbolicBallPolar, rho, theta, phi)
    }

    pub fn chart(&self) -> ChartId {
        self.chart
    }

    pub fn ambient(&self) -> Ambient {
        self.chart.ambient()
    }

    pub fn coords(&self) -> [f64; 3] {
        self.coords
    }

    fn validate(&self) -> Result<()> {
        let [a, _, c] = self.coords;
        let bad = |reason: &str| {
            Err(Error::InvalidPoint {
                chart: self.chart,
                reason: reason.to_string(),
            })
        };
        if self.coords.iter().any(|v| !v.is_finite()) {
            return bad("non-finite coordinate");
        }
        match self.chart {
            ChartId::EuclideanCartesian => Ok(()),
            ChartId::EuclideanCylindrical if a < 0.0 => bad("radial coordinate must be >= 0"),
            ChartId::EuclideanCylindrical => Ok(()),
            ChartId::EuclideanSpherical | ChartId::HyperbolicBallPolar => {
                if a < 0.0 {
                    bad("radial coordinate must be >= 0")
                } else if !(0.0..=PI).contains(&c) {
                    bad("polar angle must lie in [0, pi]")
                } else {
                    Ok(())
                }
            }
            ChartId::HyperbolicHalfSpace if c <= 0.0 => bad("half-space requires z > 0"),
            ChartId::HyperbolicHalfSpace => Ok(()),
        }
    }

    /// The same geometric point in `target`.
    pub fn to_chart(&self, target: ChartId) -> Result<ChartPoint> {
        to_chart(self, target)
    }
}

/// Re-express `p` in the chart `target`.
///
/// Points on the axis are given `θ = 0`; the origin (or ball centre) is
/// given `θ = φ = 0`.
pub fn to_chart(p: &ChartPoint, target: ChartId) -> Result<ChartPoint> {
    if p.ambient() != target.ambient() {
        return Err(Error::ChartMismatch {
            from: p.chart,
            to: target,
        });
    }
    if p.chart == target {
        return Ok(*p);
    }
    let coords = match p.ambient() {
        Ambient::Euclidean => from_cartesian(to_cartesian(p), target),
        Ambient::Hyperbolic => {
            let [x, y, z] = to_half_space(p);
            match target {
                ChartId::HyperbolicHalfSpace => [x, y, z],
                _ => half_space_to_ball_polar([x, y, z]),
            }
        }
    };
    ChartPoint::new(target, coords[0], coords[1], coords[2])
}

fn to_cartesian(p: &ChartPoint) -> [f64; 3] {
    let [a, b, c] = p.coords;
    match p.chart {
        ChartId::EuclideanCylindrical => [a * b.cos(), a * b.sin(), c],
        ChartId::EuclideanSpherical => {
            let (st, ct) = b.sin_cos();
            let (sp, cp) = c.sin_cos();
            [a * sp * ct, a * sp * st, a * cp]
        }
        _ => p.coords,
    }
}

fn from_cartesian([x, y, z]: [f64; 3], target: ChartId) -> [f64; 3] {
    let r = x.hypot(y);
    let theta = y.atan2(x);
    match target {
        ChartId::EuclideanCylindrical => [r, theta, z],
        ChartId::EuclideanSpherical => [r.hypot(z), theta, r.atan2(z)],
        _ => [x, y, z],
    }
}

fn to_half_space(p: &ChartPoint) -> [f64; 3] {
    match p.chart {
        ChartId::HyperbolicBallPolar => ball_polar_to_half_space(p.coords),
        _ => p.coords,
    }
}

/// Geodesic distance in the half-space model.
pub fn half_space_distance(a: [f64; 3], b: [f64; 3]) -> f64 {
    let d2 = (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2);
    2.0 * (d2.sqrt() / (2.0 * (a[2] * b[2]).sqrt())).asinh()
}

/// Half-space point of the ball centre.
pub const BALL_CENTRE: [f64; 3] = [0.0, 0.0, 1.0];

fn half_space_to_ball_polar([x, y, z]: [f64; 3]) -> [f64; 3] {
    let rho = half_space_distance([x, y, z], BALL_CENTRE);
    // Cayley map into the Poincaré ball; only the direction is used.
    let den = x * x + y * y + (z + 1.0) * (z + 1.0);
    let b = [
        2.0 * x / den,
        2.0 * y / den,
        (x * x + y * y + z * z - 1.0) / den,
    ];
    let horiz = b[0].hypot(b[1]);
    if rho == 0.0 {
        return [0.0, 0.0, 0.0];
    }
    [rho, b[1].atan2(b[0]), horiz.atan2(b[2])]
}

fn ball_polar_to_half_space([rho, theta, phi]: [f64; 3]) -> [f64; 3] {
    let r = (0.5 * rho).tanh();
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    let b = [r * sp * ct, r * sp * st, r * cp];
    let den = b[0] * b[0] + b[1] * b[1] + (1.0 - b[2]) * (1.0 - b[2]);
    [2.0 * b[0] / den, 2.0 * b[1] / den, (1.0 - r * r) / den]
}

/// Ball-model Euclidean radius of a point at geodesic distance `rho` from the centre.
pub fn ball_radius_from_geodesic(rho: f64) -> f64 {
    (0.5 * rho).tanh()
}

/// Components of a tangent vector against the ambient orthonormal frame.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FrameVector(pub [f64; 3]);

impl FrameVector {
    pub const ZERO: FrameVector = FrameVector([0.0; 3]);
    pub const E1: FrameVector = FrameVector([1.0, 0.0, 0.0]);
    pub const E2: FrameVector = FrameVector([0.0, 1.0, 0.0]);
    pub const E3: FrameVector = FrameVector([0.0, 0.0, 1.0]);

    pub fn new(a1: f64, a2: f64, a3: f64) -> Self {
        FrameVector([a1, a2, a3])
    }

    pub fn basis(i: usize) -> Self {
        let mut v = [0.0; 3];
        v[i] = 1.0;
        FrameVector(v)
    }

    pub fn dot(&self, other: &FrameVector) -> f64 {
        self.0[0] * other.0[0] + self.0[1] * other.0[1] + self.0[2] * other.0[2]
    }

    pub fn norm_squared(&self) -> f64 {
        self.dot(self)
    }

    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }
}

impl Add for FrameVector {
    type Output = FrameVector;
    fn add(self, o: FrameVector) -> FrameVector {
        FrameVector([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2]])
    }
}

impl Sub for FrameVector {
    type Output = FrameVector;
    fn sub(self, o: FrameVector) -> FrameVector {
        FrameVector([self.0[0] - o.0[0], self.0[1] - o.0[1], self.0[2] - o.0[2]])
    }
}

impl Neg for FrameVector {
    type Output = FrameVector;
    fn neg(self) -> FrameVector {
        FrameVector([-self.0[0], -self.0[1], -self.0[2]])
    }
}

impl Mul<FrameVector> for f64 {
    type Output = FrameVector;
    fn mul(self, v: FrameVector) -> FrameVector {
        FrameVector([self * v.0[0], self * v.0[1], self * v.0[2]])
    }
}

impl std::iter::Sum for FrameVector {
    fn sum<I: Iterator<Item = FrameVector>>(iter: I) -> FrameVector {
        iter.fold(FrameVector::ZERO, Add::add)
    }
}

/// Wrap an angle difference into `(-π, π]`.
pub fn wrap_angle(d: f64) -> f64 {
    let w = d.rem_euclid(2.0 * PI);
    if w > PI {
        w - 2.0 * PI
    } else {
        w
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn cartesian_axis_point_to_cylindrical() {
        let p = ChartPoint::cartesian(1.0, 0.0, 0.0)
            .to_chart(ChartId::EuclideanCylindrical)
            .unwrap();
        assert_eq!(p.coords(), [1.0, 0.0, 0.0]);
    }

    #[test]
    fn pole_to_spherical_uses_theta_zero() {
        let p = ChartPoint::cartesian(0.0, 0.0, 1.0)
            .to_chart(ChartId::EuclideanSpherical)
            .unwrap();
        assert_eq!(p.coords(), [1.0, 0.0, 0.0]);
    }

    #[test]
    fn cross_ambient_conversion_is_rejected() {
        let p = ChartPoint::cartesian(1.0, 2.0, 3.0);
        assert!(matches!(
            p.to_chart(ChartId::HyperbolicHalfSpace),
            Err(Error::ChartMismatch { .. })
        ));
    }

    #[test]
    fn invalid_points_are_rejected() {
        assert!(ChartPoint::half_space(0.0, 0.0, 0.0).is_err());
        assert!(ChartPoint::cylindrical(-1.0, 0.0, 0.0).is_err());
        assert!(ChartPoint::spherical(1.0, 0.0, 4.0).is_err());
        assert!(ChartPoint::ball_polar(-0.1, 0.0, 1.0).is_err());
        assert!(ChartPoint::new(ChartId::EuclideanCartesian, f64::NAN, 0.0, 0.0).is_err());
    }

    #[test]
    fn ball_centre_is_half_space_reference_point() {
        let p = ChartPoint::half_space(0.0, 0.0, 1.0)
            .unwrap()
            .to_chart(ChartId::HyperbolicBallPolar)
            .unwrap();
        assert_eq!(p.coords()[0], 0.0);
        let q = ChartPoint::ball_polar(0.0, 0.3, 0.2)
            .unwrap()
            .to_chart(ChartId::HyperbolicHalfSpace)
            .unwrap();
        assert_abs_diff_eq!(q.coords()[2], 1.0, epsilon = 1e-15);
    }

    /// Integrates the half-space line element along the vertical geodesic
    /// through the reference point, independently of the distance formula.
    #[test]
    fn geodesic_radius_matches_metric_integral() {
        for &zt in &[1.5_f64, 3.0, 0.2, 17.0] {
            // ∫ dz / z by composite Simpson in log-free form
            let n = 20_000;
            let (a, b) = (1.0_f64.min(zt), 1.0_f64.max(zt));
            let h = (b - a) / n as f64;
            let mut s = 1.0 / a + 1.0 / b;
            for k in 1..n {
                let z = a + k as f64 * h;
                s += if k % 2 == 1 { 4.0 } else { 2.0 } / z;
            }
            let length = s * h / 3.0;
            let p = ChartPoint::half_space(0.0, 0.0, zt)
                .unwrap()
                .to_chart(ChartId::HyperbolicBallPolar)
                .unwrap();
            assert_abs_diff_eq!(p.coords()[0], length, epsilon = 1e-10);
            // upward points map to the north pole of the ball
            let expected_phi = if zt > 1.0 { 0.0 } else { PI };
            assert_abs_diff_eq!(p.coords()[2], expected_phi, epsilon = 1e-12);
            // ball radius is tanh(ρ/2) of the Cayley image
            let r_ball = ((zt - 1.0) / (zt + 1.0)).abs();
            assert_abs_diff_eq!(ball_radius_from_geodesic(length), r_ball, epsilon = 1e-10);
        }
    }

    #[test]
    fn off_axis_geodesic_radius_matches_metric_integral() {
        // The geodesic from (0,0,1) to (a,0,b) is a Euclidean semicircle
        // centred on the boundary; integrate ds = |dx|/z along it.
        let target = [0.8_f64, 0.0, 0.6];
        let cx = (target[0] * target[0] + target[2] * target[2] - 1.0) / (2.0 * target[0]);
        let radius = (cx * cx + 1.0).sqrt();
        let t0 = (1.0_f64).atan2(-cx);
        let t1 = target[2].atan2(target[0] - cx);
        let n = 20_000;
        let h = (t1 - t0) / n as f64;
        let f = |t: f64| radius / (radius * t.sin());
        let mut s = f(t0) + f(t1);
        for k in 1..n {
            s += if k % 2 == 1 { 4.0 } else { 2.0 } * f(t0 + k as f64 * h);
        }
        let length = (s * h / 3.0).abs();
        let p = ChartPoint::half_space(target[0], target[1], target[2])
            .unwrap()
            .to_chart(ChartId::HyperbolicBallPolar)
            .unwrap();
        assert_abs_diff_eq!(p.coords()[0], length, epsilon = 1e-10);
    }

    #[test]
    fn wrap_angle_range() {
        assert_abs_diff_eq!(wrap_angle(2.0 * PI + 0.1), 0.1, epsilon = 1e-15);
        assert_abs_diff_eq!(wrap_angle(-0.1), -0.1, epsilon = 1e-15);
        assert_abs_diff_eq!(wrap_angle(PI), PI, epsilon = 1e-15);
    }
}
