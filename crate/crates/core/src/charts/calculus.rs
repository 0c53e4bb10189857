//! Finite-difference gradient and Laplacian of scalar functions, per chart.
//!
//! Scalar functions receive coordinates in the chart of the evaluation point.
//! Stencils are second-order central differences. In the half-space chart the
//! coordinate step is `h·z`, so every step has hyperbolic length ≈ `h`.

use super::{wrap_angle, ChartId, ChartPoint, FrameVector};
use crate::error::{Error, Result};

/// Default finite-difference step, in metric units.
pub const DEFAULT_STEP: f64 = 1e-4;

/// Value, gradient and Laplacian (`Δ = −div ∇`) of a scalar at a point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScalarJet {
    pub value: f64,
    /// Components against the ambient frame; for the ball-polar chart,
    /// against the local geodesic-polar frame `(∂ρ, θ̂, φ̂)`.
    pub gradient: FrameVector,
    pub laplacian: f64,
}

pub(crate) struct Partials {
    pub value: f64,
    pub first: [f64; 3],
    pub second: [f64; 3],
}

/// Pure partial derivatives along the coordinate axes. With `angle` set,
/// differences are wrapped into `(-π, π]` so angle-valued functions can be
/// differentiated across their branch cut.
pub(crate) fn partials<F>(f: &F, x: [f64; 3], steps: [f64; 3], angle: bool) -> Result<Partials>
where
    F: Fn([f64; 3]) -> f64 + ?Sized,
{
    let diff = |a: f64, b: f64| if angle { wrap_angle(a - b) } else { a - b };
    let f0 = f(x);
    let mut first = [0.0; 3];
    let mut second = [0.0; 3];
    for i in 0..3 {
        let h = steps[i];
        let mut xp = x;
        let mut xm = x;
        xp[i] += h;
        xm[i] -= h;
        let fwd = diff(f(xp), f0);
        let bwd = diff(f0, f(xm));
        first[i] = (fwd + bwd) / (2.0 * h);
        second[i] = (fwd - bwd) / (h * h);
    }
    if !f0.is_finite() || first.iter().chain(&second).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite(format!("scalar derivatives at {x:?}")));
    }
    Ok(Partials {
        value: f0,
        first,
        second,
    })
}

fn singular(p: &ChartPoint, what: &str) -> Error {
    Error::Domain(format!(
        "{what} at {:?} in {} chart (stencil reaches the coordinate singularity)",
        p.coords(),
        p.chart()
    ))
}

fn check_polar_stencil(p: &ChartPoint, h: f64) -> Result<()> {
    let [radial, _, phi] = p.coords();
    match p.chart() {
        ChartId::EuclideanCylindrical if radial - h <= 0.0 => Err(singular(p, "axis r = 0")),
        ChartId::EuclideanSpherical | ChartId::HyperbolicBallPolar => {
            if radial - h <= 0.0 {
                Err(singular(p, "centre"))
            } else if phi - h <= 0.0 || phi + h >= std::f64::consts::PI {
                Err(singular(p, "pole sin(phi) = 0"))
            } else {
                Ok(())
            }
        }
        _ => Ok(()),
    }
}

fn steps_for(p: &ChartPoint, h: f64) -> [f64; 3] {
    match p.chart() {
        ChartId::HyperbolicHalfSpace => [h * p.coords()[2]; 3],
        _ => [h; 3],
    }
}

/// Gradient, Laplacian and value in one pass.
pub fn scalar_jet<F>(f: &F, p: &ChartPoint, h: f64, angle: bool) -> Result<ScalarJet>
where
    F: Fn([f64; 3]) -> f64 + ?Sized,
{
    if !(h > 0.0) {
        return Err(Error::InvalidArgument(format!("step must be positive, got {h}")));
    }
    check_polar_stencil(p, h)?;
    let x = p.coords();
    let d = partials(f, x, steps_for(p, h), angle)?;
    let [f1, f2, f3] = d.first;
    let [s1, s2, s3] = d.second;
    let (gradient, minus_lap) = match p.chart() {
        ChartId::EuclideanCartesian => (FrameVector([f1, f2, f3]), s1 + s2 + s3),
        ChartId::EuclideanCylindrical => {
            let [r, theta, _] = x;
            let (st, ct) = theta.sin_cos();
            let g_theta = f2 / r;
            (
                FrameVector([f1 * ct - g_theta * st, f1 * st + g_theta * ct, f3]),
                s1 + f1 / r + s2 / (r * r) + s3,
            )
        }
        ChartId::EuclideanSpherical => {
            let [radius, theta, phi] = x;
            let (st, ct) = theta.sin_cos();
            let (sp, cp) = phi.sin_cos();
            let g_r = f1;
            let g_theta = f2 / (radius * sp);
            let g_phi = f3 / radius;
            let grad = FrameVector([
                g_r * sp * ct - g_theta * st + g_phi * cp * ct,
                g_r * sp * st + g_theta * ct + g_phi * cp * st,
                g_r * cp - g_phi * sp,
            ]);
            let angular = s3 + cp / sp * f3 + s2 / (sp * sp);
            (grad, s1 + 2.0 * f1 / radius + angular / (radius * radius))
        }
        ChartId::HyperbolicHalfSpace => {
            let z = x[2];
            (
                FrameVector([z * f1, z * f2, z * f3]),
                z * z * (s1 + s2 + s3) - z * f3,
            )
        }
        ChartId::HyperbolicBallPolar => {
            let [rho, _, phi] = x;
            let sh = rho.sinh();
            let (sp, cp) = phi.sin_cos();
            let angular = s3 + cp / sp * f3 + s2 / (sp * sp);
            (
                FrameVector([f1, f2 / (sh * sp), f3 / sh]),
                s1 + 2.0 * f1 / rho.tanh() + angular / (sh * sh),
            )
        }
    };
    Ok(ScalarJet {
        value: d.value,
        gradient,
        laplacian: -minus_lap,
    })
}

/// `∇f` at `p`; `f` takes coordinates in `p`'s chart.
pub fn scalar_gradient<F>(f: F, p: &ChartPoint, h: f64) -> Result<FrameVector>
where
    F: Fn([f64; 3]) -> f64,
{
    scalar_jet(&f, p, h, false).map(|j| j.gradient)
}

/// `Δf = −div ∇f` at `p`; `f` takes coordinates in `p`'s chart.
pub fn scalar_laplacian<F>(f: F, p: &ChartPoint, h: f64) -> Result<f64>
where
    F: Fn([f64; 3]) -> f64,
{
    scalar_jet(&f, p, h, false).map(|j| j.laplacian)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn gradient_of_theta_in_cylindrical() {
        let p = ChartPoint::cylindrical(2.0, 0.7, -0.3).unwrap();
        let g = scalar_gradient(|c| c[1], &p, DEFAULT_STEP).unwrap();
        assert_abs_diff_eq!(g.norm_squared(), 0.25, epsilon = 1e-9);
        // along hat-theta
        assert_abs_diff_eq!(g.0[0], -0.7_f64.sin() / 2.0, epsilon = 1e-9);
        assert_abs_diff_eq!(g.0[1], 0.7_f64.cos() / 2.0, epsilon = 1e-9);
    }

    #[test]
    fn gradient_of_horo_pq_angle() {
        let (p_, q_) = (1.3, 0.4);
        for &z in &[0.5_f64, 1.0, 2.0] {
            let pt = ChartPoint::half_space(0.3, -0.2, z).unwrap();
            let g = scalar_gradient(|c| p_ * c[2] * c[2] + q_, &pt, DEFAULT_STEP).unwrap();
            assert_abs_diff_eq!(g.0[2], 2.0 * p_ * z * z, epsilon = 1e-7);
            assert_abs_diff_eq!(g.norm_squared(), 4.0 * p_ * p_ * z.powi(4), epsilon = 1e-6);
        }
    }

    #[test]
    fn constant_has_zero_gradient() {
        let p = ChartPoint::spherical(1.0, 0.2, 1.0).unwrap();
        assert_eq!(scalar_gradient(|_| 3.0, &p, DEFAULT_STEP).unwrap(), FrameVector::ZERO);
    }

    #[test]
    fn laplacian_of_polar_angle() {
        for &(radius, phi) in &[(1.0_f64, 0.7_f64), (2.0, 1.2), (0.5, 2.5)] {
            let p = ChartPoint::spherical(radius, 0.3, phi).unwrap();
            let lap = scalar_laplacian(|c| c[2], &p, DEFAULT_STEP).unwrap();
            assert_abs_diff_eq!(lap, -phi.cos() / phi.sin() / (radius * radius), epsilon = 1e-6);
        }
    }

    #[test]
    fn theta_and_horo_pq_are_harmonic() {
        let p = ChartPoint::cylindrical(0.8, 2.0, 1.0).unwrap();
        assert_abs_diff_eq!(scalar_laplacian(|c| c[1], &p, DEFAULT_STEP).unwrap(), 0.0, epsilon = 1e-7);
        let q = ChartPoint::half_space(0.1, 0.2, 1.7).unwrap();
        let lap = scalar_laplacian(|c| 0.9 * c[2] * c[2] - 0.2, &q, DEFAULT_STEP).unwrap();
        assert_abs_diff_eq!(lap, 0.0, epsilon = 1e-6);
    }

    #[test]
    fn singular_loci_are_reported() {
        let p = ChartPoint::cylindrical(0.0, 0.0, 1.0).unwrap();
        assert!(matches!(scalar_gradient(|c| c[1], &p, DEFAULT_STEP), Err(Error::Domain(_))));
        let s = ChartPoint::spherical(1.0, 0.0, 0.0).unwrap();
        assert!(matches!(scalar_laplacian(|c| c[2], &s, DEFAULT_STEP), Err(Error::Domain(_))));
    }

    #[test]
    fn angle_differences_cross_branch_cut() {
        // θ computed with atan2 jumps at θ = π; wrapped stencils do not see it.
        let p = ChartPoint::cartesian(-1.0, 0.0, 0.0);
        let jet = scalar_jet(&|c: [f64; 3]| c[1].atan2(c[0]), &p, 1e-4, true).unwrap();
        assert_abs_diff_eq!(jet.gradient.0[1], -1.0, epsilon = 1e-7);
        assert_abs_diff_eq!(jet.laplacian, 0.0, epsilon = 1e-6);
    }

    #[test]
    fn radial_laplacian_in_ball_polar() {
        // −Δ e^{-ρ²} = f'' + 2 coth ρ f'
        let rho = 0.9_f64;
        let p = ChartPoint::ball_polar(rho, 0.1, 1.0).unwrap();
        let lap = scalar_laplacian(|c| (-c[0] * c[0]).exp(), &p, 1e-4).unwrap();
        let f1 = -2.0 * rho * (-rho * rho).exp();
        let f2 = (4.0 * rho * rho - 2.0) * (-rho * rho).exp();
        assert_abs_diff_eq!(lap, -(f2 + 2.0 * f1 / rho.tanh()), epsilon = 1e-6);
    }

    /// Half-space and ball-polar Laplacians describe the same operator.
    #[test]
    fn hyperbolic_laplacian_is_chart_independent() {
        let f_half = |c: [f64; 3]| {
            let rho = super::super::half_space_distance(c, super::super::BALL_CENTRE);
            (-rho * rho).exp()
        };
        let p = ChartPoint::half_space(0.4, -0.3, 1.6).unwrap();
        let lap_h = scalar_laplacian(f_half, &p, 1e-4).unwrap();
        let pb = p.to_chart(ChartId::HyperbolicBallPolar).unwrap();
        let lap_b = scalar_laplacian(|c| (-c[0] * c[0]).exp(), &pb, 1e-4).unwrap();
        assert_abs_diff_eq!(lap_h, lap_b, epsilon = 1e-6);
    }

    // Δ(g∘f) = g'(f)Δf − g''(f)|∇f|² on random polynomial f, g.
    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn composition_rule_for_laplacian(
            a in prop::array::uniform4(-1.0f64..1.0),
            b in prop::array::uniform3(-1.0f64..1.0),
            x in prop::array::uniform3(-1.0f64..1.0),
            hyperbolic in any::<bool>(),
        ) {
            let f = move |c: [f64; 3]| a[0] * c[0] * c[1] + a[1] * c[2] * c[2] + a[2] * c[0] + a[3] * c[1] * c[2] * c[0];
            let g = move |t: f64| b[0] * t + b[1] * t * t + b[2] * t * t * t;
            let dg = move |t: f64| b[0] + 2.0 * b[1] * t + 3.0 * b[2] * t * t;
            let d2g = move |t: f64| 2.0 * b[1] + 6.0 * b[2] * t;
            let p = if hyperbolic {
                ChartPoint::half_space(x[0], x[1], 1.5 + x[2]).unwrap()
            } else {
                ChartPoint::cartesian(x[0], x[1], x[2])
            };
            let h = 1e-3;
            let jf = scalar_jet(&f, &p, h, false).unwrap();
            let jg = scalar_jet(&|c: [f64; 3]| g(f(c)), &p, h, false).unwrap();
            let expected = dg(jf.value) * jf.laplacian - d2g(jf.value) * jf.gradient.norm_squared();
            prop_assert!((jg.laplacian - expected).abs() < 1e-5 * (1.0 + expected.abs()), "{} vs {}", jg.laplacian, expected);
            // gradient chain rule, at a finer step
            let jf = scalar_jet(&f, &p, 1e-5, false).unwrap();
            let jg = scalar_jet(&|c: [f64; 3]| g(f(c)), &p, 1e-5, false).unwrap();
            let gg = dg(jf.value) * jf.gradient;
            prop_assert!((jg.gradient - gg).norm() < 1e-6 * (1.0 + gg.norm()), "{:?} vs {:?}", jg.gradient, gg);
        }
    }
}
