//! The catalogue of unit-field families, polar decomposition and bending.
//!
//! Euclidean fields are written in polar form
//! `σ = cos u sin v ξ₁ + sin u sin v ξ₂ + cos v ξ₃`; horospherical fields on
//! `H³` in the standard form `σ = cos u ξ₁ + sin u ξ₂`. Angle functions are
//! never stored: every family produces `(cos u, sin u)` directly.
//!
//! All closures and coordinates below are in the ambient frame chart
//! (Cartesian, or half-space `(x, y, z)`).

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::charts::{bending_fd, frame_scalar_jet, Ambient, ChartPoint, FrameField, FrameVector, DEFAULT_STEP};
use crate::error::{Error, Result};
use crate::pendulum::{self, RadialProfile};

/// A scalar function of frame-chart coordinates.
pub type ScalarFn = Arc<dyn Fn([f64; 3]) -> f64 + Send + Sync>;

/// Polar angles `(u, v)` of a unit vector.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolarAngles {
    pub u: f64,
    pub v: f64,
}

impl PolarAngles {
    pub fn reconstruct(&self) -> FrameVector {
        let (su, cu) = self.u.sin_cos();
        let (sv, cv) = self.v.sin_cos();
        FrameVector([cu * sv, su * sv, cv])
    }
}

/// `(u, v)` with `v ∈ (0, π)` and `u ∈ (−π, π]`.
pub fn polar_decompose(w: FrameVector) -> Result<PolarAngles> {
    let n = w.norm();
    if !((n - 1.0).abs() <= 1e-9) {
        return Err(Error::InvalidArgument(format!("expected a unit vector, |w| = {n}")));
    }
    let [a1, a2, a3] = w.0;
    let horiz = a1.hypot(a2);
    if horiz < 1e-12 {
        return Err(Error::Domain("w = ±ξ₃: polar angle is 0 or π and u is undefined".into()));
    }
    Ok(PolarAngles {
        u: a2.atan2(a1),
        v: horiz.atan2(a3),
    })
}

/// `|∇σ|²`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BendingValue {
    pub value: f64,
}

/// User-supplied angle functions.
#[derive(Clone)]
pub struct CustomPolar {
    pub name: String,
    pub ambient: Ambient,
    pub u: ScalarFn,
    /// `None` means `v ≡ π/2` (planar, or horospherical standard form).
    pub v: Option<ScalarFn>,
}

impl fmt::Debug for CustomPolar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomPolar")
            .field("name", &self.name)
            .field("ambient", &self.ambient)
            .field("has_v", &self.v.is_some())
            .finish()
    }
}

#[derive(Clone, Debug)]
pub enum FieldSpec {
    /// `u = θ + t`, `v = π/2`: unit radial field about the `z`-axis, rotated.
    EuclidRadialLine { t: f64 },
    /// `u = θ + t`, `v = φ`: unit radial field about the origin, rotated.
    EuclidRadialPoint { t: f64 },
    /// `u = θ + p`, `v = v_q(r)`.
    EuclidPendulum { p: f64, q: f64 },
    /// `ξᵢ`, `i ∈ {1, 2, 3}`.
    Frame { index: u8, ambient: Ambient },
    /// `u ≡ u0` in standard form.
    HoroInvariant { u0: f64 },
    /// `±θ̂ = ±(−y, x)/r`.
    HoroTheta { sign: i8 },
    /// `u = arg(ikζ + α)`, `ζ = x + iy`.
    HoroHolomorphic { k: f64, a_re: f64, a_im: f64 },
    /// `u = p z² + q`.
    HoroPq { p: f64, q: f64 },
    /// `ξ₃` on `H³`.
    HParallel,
    CustomPolar(CustomPolar),
    /// `base` with `u` replaced by `u + phase`.
    Rotated { base: Box<FieldSpec>, phase: f64 },
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        use FieldSpec::*;
        match (self, other) {
            (EuclidRadialLine { t: a }, EuclidRadialLine { t: b }) => a == b,
            (EuclidRadialPoint { t: a }, EuclidRadialPoint { t: b }) => a == b,
            (EuclidPendulum { p: a, q: b }, EuclidPendulum { p: c, q: d }) => a == c && b == d,
            (Frame { index: a, ambient: b }, Frame { index: c, ambient: d }) => a == c && b == d,
            (HoroInvariant { u0: a }, HoroInvariant { u0: b }) => a == b,
            (HoroTheta { sign: a }, HoroTheta { sign: b }) => a == b,
            (
                HoroHolomorphic { k: a, a_re: b, a_im: c },
                HoroHolomorphic { k: d, a_re: e, a_im: f },
            ) => a == d && b == e && c == f,
            (HoroPq { p: a, q: b }, HoroPq { p: c, q: d }) => a == c && b == d,
            (HParallel, HParallel) => true,
            (CustomPolar(a), CustomPolar(b)) => {
                a.ambient == b.ambient
                    && Arc::ptr_eq(&a.u, &b.u)
                    && match (&a.v, &b.v) {
                        (None, None) => true,
                        (Some(x), Some(y)) => Arc::ptr_eq(x, y),
                        _ => false,
                    }
            }
            (Rotated { base: a, phase: b }, Rotated { base: c, phase: d }) => a == c && b == d,
            _ => false,
        }
    }
}

/// `(cos u, sin u, cos v, sin v)` at a point.
#[derive(Clone, Copy, Debug)]
struct Trig {
    cu: f64,
    su: f64,
    cv: f64,
    sv: f64,
}

impl Trig {
    fn planar(cu: f64, su: f64) -> Self {
        Trig { cu, su, cv: 0.0, sv: 1.0 }
    }

    fn vector(&self) -> FrameVector {
        FrameVector([self.cu * self.sv, self.su * self.sv, self.cv])
    }

    fn rotated(self, phase: f64) -> Self {
        let (s, c) = phase.sin_cos();
        Trig {
            cu: self.cu * c - self.su * s,
            su: self.su * c + self.cu * s,
            ..self
        }
    }
}

/// Catalogue name and numeric parameters, as used on the command line.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldDescription {
    pub family: String,
    pub params: Vec<(String, f64)>,
}

fn axis_distance(x: [f64; 3], what: &str) -> Result<f64> {
    let r = x[0].hypot(x[1]);
    if r == 0.0 {
        return Err(Error::Domain(format!("{what} is undefined on the z-axis")));
    }
    Ok(r)
}

impl FieldSpec {
    /// `HORO_HOLOMORPHIC`, collapsing to `HORO_INVARIANT(arg α)` when `k = 0`.
    pub fn horo_holomorphic(k: f64, a_re: f64, a_im: f64) -> Result<Self> {
        if k == 0.0 {
            if a_re == 0.0 && a_im == 0.0 {
                return Err(Error::InvalidArgument("k = 0 and α = 0: u is undefined".into()));
            }
            return Ok(FieldSpec::HoroInvariant { u0: a_im.atan2(a_re) });
        }
        Ok(FieldSpec::HoroHolomorphic { k, a_re, a_im })
    }

    pub fn ambient(&self) -> Ambient {
        match self {
            FieldSpec::EuclidRadialLine { .. }
            | FieldSpec::EuclidRadialPoint { .. }
            | FieldSpec::EuclidPendulum { .. } => Ambient::Euclidean,
            FieldSpec::Frame { ambient, .. } => *ambient,
            FieldSpec::HoroInvariant { .. }
            | FieldSpec::HoroTheta { .. }
            | FieldSpec::HoroHolomorphic { .. }
            | FieldSpec::HoroPq { .. }
            | FieldSpec::HParallel => Ambient::Hyperbolic,
            FieldSpec::CustomPolar(c) => c.ambient,
            FieldSpec::Rotated { base, .. } => base.ambient(),
        }
    }

    /// True for families tangent to the horospheres `z = const` of `H³`.
    pub fn is_horospherical(&self) -> bool {
        match self {
            FieldSpec::Frame { index, ambient } => *ambient == Ambient::Hyperbolic && *index != 3,
            FieldSpec::HoroInvariant { .. }
            | FieldSpec::HoroTheta { .. }
            | FieldSpec::HoroHolomorphic { .. }
            | FieldSpec::HoroPq { .. } => true,
            FieldSpec::CustomPolar(c) => c.ambient == Ambient::Hyperbolic && c.v.is_none(),
            FieldSpec::Rotated { base, .. } => base.is_horospherical(),
            _ => false,
        }
    }

    /// Whether this field is known to be harmonic; `None` when undecided.
    pub fn declared_harmonic(&self) -> Option<bool> {
        match self {
            FieldSpec::CustomPolar(_) => None,
            FieldSpec::Rotated { base, phase } => match (base.ambient(), base.as_ref()) {
                // Euclidean circle action preserves harmonicity
                (Ambient::Euclidean, _) => base.declared_harmonic(),
                (_, FieldSpec::HoroPq { .. } | FieldSpec::HoroInvariant { .. }) => Some(true),
                (_, FieldSpec::Frame { index: 1 | 2, .. }) => Some(true),
                (_, FieldSpec::HoroTheta { .. }) => {
                    let w = phase.rem_euclid(PI);
                    Some(w.min(PI - w) < 1e-12)
                }
                _ => None,
            },
            _ => Some(true),
        }
    }

    pub fn describe(&self) -> FieldDescription {
        let d = |family: &str, params: &[(&str, f64)]| FieldDescription {
            family: family.to_string(),
            params: params.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        };
        match self {
            FieldSpec::EuclidRadialLine { t } => d("euclid-radial-line", &[("t", *t)]),
            FieldSpec::EuclidRadialPoint { t } => d("euclid-radial-point", &[("t", *t)]),
            FieldSpec::EuclidPendulum { p, q } => d("euclid-pendulum", &[("p", *p), ("q", *q)]),
            FieldSpec::Frame { index, ambient } => d(
                match ambient {
                    Ambient::Euclidean => "euclid-frame",
                    Ambient::Hyperbolic => "horo-frame",
                },
                &[("i", *index as f64)],
            ),
            FieldSpec::HoroInvariant { u0 } => d("horo-invariant", &[("u0", *u0)]),
            FieldSpec::HoroTheta { sign } => d("horo-theta", &[("sign", *sign as f64)]),
            FieldSpec::HoroHolomorphic { k, a_re, a_im } => {
                d("horo-holomorphic", &[("k", *k), ("a_re", *a_re), ("a_im", *a_im)])
            }
            FieldSpec::HoroPq { p, q } => d("horo-pq", &[("p", *p), ("q", *q)]),
            FieldSpec::HParallel => d("h-parallel", &[]),
            FieldSpec::CustomPolar(c) => d(&format!("custom:{}", c.name), &[]),
            FieldSpec::Rotated { base, phase } => {
                let mut inner = base.describe();
                inner.params.push(("rotate".into(), *phase));
                inner
            }
        }
    }

    fn frame_coords(&self, p: &ChartPoint) -> Result<[f64; 3]> {
        let ambient = self.ambient();
        if p.ambient() != ambient {
            return Err(Error::AmbientMismatch {
                field: ambient,
                point: p.ambient(),
            });
        }
        Ok(p.to_chart(ambient.frame_chart())?.coords())
    }

    /// Trigonometric data of the angles; `None` for `ξ₃`-type fields.
    fn trig(&self, x: [f64; 3]) -> Result<Option<Trig>> {
        let [px, py, pz] = x;
        let t = match self {
            FieldSpec::EuclidRadialLine { t } => {
                let r = axis_distance(x, "the radial field about the axis")?;
                Trig::planar(px / r, py / r).rotated(*t)
            }
            FieldSpec::EuclidRadialPoint { t } => {
                let big_r = (px * px + py * py + pz * pz).sqrt();
                if big_r == 0.0 {
                    return Err(Error::Domain("the radial field is undefined at the origin".into()));
                }
                let r = px.hypot(py);
                let (cu, su) = if r == 0.0 { (1.0, 0.0) } else { (px / r, py / r) };
                Trig {
                    cu,
                    su,
                    cv: pz / big_r,
                    sv: r / big_r,
                }
                .rotated(*t)
            }
            FieldSpec::EuclidPendulum { p, q } => {
                let r = px.hypot(py);
                let s = 0.5 * q * r;
                let den = 1.0 + s * s;
                // v = 2 arctan s
                pendulum_trig(px, py, r, (1.0 - s * s) / den, q * r / den, *p)
            }
            FieldSpec::Frame { index, .. } => match index {
                1 => Trig::planar(1.0, 0.0),
                2 => Trig::planar(0.0, 1.0),
                3 => return Ok(None),
                _ => return Err(Error::InvalidArgument(format!("frame index must be 1, 2 or 3, got {index}"))),
            },
            FieldSpec::HoroInvariant { u0 } => {
                let (s, c) = u0.sin_cos();
                Trig::planar(c, s)
            }
            FieldSpec::HoroTheta { sign } => {
                let r = axis_distance(x, "θ̂")?;
                let sg = f64::from(*sign).signum();
                Trig::planar(-sg * py / r, sg * px / r)
            }
            FieldSpec::HoroHolomorphic { k, a_re, a_im } => {
                let (wr, wi) = (a_re - k * py, a_im + k * px);
                let m = wr.hypot(wi);
                if m == 0.0 {
                    return Err(Error::Domain("ikζ + α vanishes: u is undefined".into()));
                }
                Trig::planar(wr / m, wi / m)
            }
            FieldSpec::HoroPq { p, q } => {
                let u = p * pz * pz + q;
                let (s, c) = u.sin_cos();
                Trig::planar(c, s)
            }
            FieldSpec::HParallel => return Ok(None),
            FieldSpec::CustomPolar(c) => {
                let u = (c.u)(x);
                let v = c.v.as_ref().map_or(0.5 * PI, |f| f(x));
                if !u.is_finite() || !v.is_finite() {
                    return Err(Error::NonFinite(format!("angle functions of {} at {x:?}", c.name)));
                }
                let (su, cu) = u.sin_cos();
                let (sv, cv) = v.sin_cos();
                Trig { cu, su, cv, sv }
            }
            FieldSpec::Rotated { base, phase } => match base.trig(x)? {
                Some(t) => t.rotated(*phase),
                None => return Err(Error::Domain("field has no equatorial part to rotate".into())),
            },
        };
        Ok(Some(t))
    }

    /// Frame components at a frame-chart point.
    pub fn components_at(&self, x: [f64; 3]) -> Result<FrameVector> {
        Ok(match self.trig(x)? {
            Some(t) => t.vector(),
            None => FrameVector::E3,
        })
    }

    /// `σ(p)` in frame components.
    pub fn evaluate(&self, p: &ChartPoint) -> Result<FrameVector> {
        self.components_at(self.frame_coords(p)?)
    }

    /// `u` at a frame-chart point, in `(−π, π]`.
    pub fn u_angle(&self, x: [f64; 3]) -> Result<f64> {
        match self.trig(x)? {
            Some(t) => Ok(t.su.atan2(t.cu)),
            None => Err(Error::Domain("field is ±ξ₃: u is undefined".into())),
        }
    }

    /// `v` at a frame-chart point, in `(−π, π]`.
    pub fn v_angle(&self, x: [f64; 3]) -> Result<f64> {
        match self.trig(x)? {
            Some(t) => Ok(t.sv.atan2(t.cv)),
            None => Ok(0.0),
        }
    }

    /// `|∇σ|²` from the closed forms of each family; custom fields use
    /// `|∇v|² + sin²v |∇u|²` (Euclidean), `1 + |∇u|²` (horospherical) or the
    /// frame-derivative sum, with finite differences of step [`DEFAULT_STEP`].
    pub fn bending(&self, p: &ChartPoint) -> Result<BendingValue> {
        let x = self.frame_coords(p)?;
        // evaluating first enforces the family's domain
        self.components_at(x)?;
        let [px, py, pz] = x;
        let value = match self {
            FieldSpec::EuclidRadialLine { .. } => 1.0 / (px * px + py * py),
            FieldSpec::EuclidRadialPoint { .. } => 2.0 / (px * px + py * py + pz * pz),
            FieldSpec::EuclidPendulum { q, .. } => {
                let s = 0.5 * q * px.hypot(py);
                2.0 * q * q / ((1.0 + s * s) * (1.0 + s * s))
            }
            FieldSpec::Frame { index, ambient } => match (ambient, index) {
                (Ambient::Euclidean, _) => 0.0,
                (Ambient::Hyperbolic, 3) => 2.0,
                (Ambient::Hyperbolic, _) => 1.0,
            },
            FieldSpec::HoroInvariant { .. } => 1.0,
            FieldSpec::HoroTheta { .. } => 1.0 + pz * pz / (px * px + py * py),
            FieldSpec::HoroHolomorphic { k, a_re, a_im } => {
                let w2 = (a_re - k * py).powi(2) + (a_im + k * px).powi(2);
                1.0 + pz * pz * k * k / w2
            }
            FieldSpec::HoroPq { p, .. } => 1.0 + 4.0 * p * p * pz.powi(4),
            FieldSpec::HParallel => 2.0,
            FieldSpec::CustomPolar(c) => self.custom_bending(c, p)?,
            // u ↦ u + t leaves ∇u and v unchanged
            FieldSpec::Rotated { base, .. } => base.bending(p)?.value,
        };
        Ok(BendingValue { value })
    }

    fn custom_bending(&self, c: &CustomPolar, p: &ChartPoint) -> Result<f64> {
        let h = DEFAULT_STEP;
        let u = frame_scalar_jet(c.u.as_ref(), c.ambient, p, h, true)?;
        match (c.ambient, &c.v) {
            (Ambient::Euclidean, Some(vf)) => {
                let v = frame_scalar_jet(vf.as_ref(), c.ambient, p, h, false)?;
                let sv = v.value.sin();
                Ok(v.gradient.norm_squared() + sv * sv * u.gradient.norm_squared())
            }
            (Ambient::Euclidean, None) => Ok(u.gradient.norm_squared()),
            (Ambient::Hyperbolic, None) => Ok(1.0 + u.gradient.norm_squared()),
            (Ambient::Hyperbolic, Some(_)) => bending_fd(self, p, h),
        }
    }

    /// Replace `u` by `u + t`. Euclidean families and `HORO_PQ`/`HORO_INVARIANT`
    /// stay in the catalogue; other rotated fields are wrapped in
    /// [`FieldSpec::Rotated`].
    pub fn circle_action(&self, t: f64) -> Result<FieldSpec> {
        if !t.is_finite() {
            return Err(Error::InvalidArgument(format!("phase must be finite, got {t}")));
        }
        if t == 0.0 {
            return Ok(self.clone());
        }
        let rotated = |s: &FieldSpec| FieldSpec::Rotated {
            base: Box::new(s.clone()),
            phase: t,
        };
        Ok(match self {
            FieldSpec::EuclidRadialLine { t: t0 } => FieldSpec::EuclidRadialLine { t: t0 + t },
            FieldSpec::EuclidRadialPoint { t: t0 } => FieldSpec::EuclidRadialPoint { t: t0 + t },
            FieldSpec::EuclidPendulum { p, q } => FieldSpec::EuclidPendulum { p: p + t, q: *q },
            FieldSpec::HoroInvariant { u0 } => FieldSpec::HoroInvariant { u0: u0 + t },
            FieldSpec::HoroPq { p, q } => FieldSpec::HoroPq { p: *p, q: q + t },
            FieldSpec::Frame { index: 3, .. } | FieldSpec::HParallel => {
                return Err(Error::InvalidArgument(
                    "field is ξ₃: it has no equatorial part to rotate".into(),
                ))
            }
            FieldSpec::Frame {
                index,
                ambient: Ambient::Hyperbolic,
            } => FieldSpec::HoroInvariant {
                u0: if *index == 1 { t } else { 0.5 * PI + t },
            },
            FieldSpec::Rotated { base, phase } => FieldSpec::Rotated {
                base: base.clone(),
                phase: phase + t,
            },
            other => rotated(other),
        })
    }
}

impl FrameField for FieldSpec {
    fn ambient(&self) -> Ambient {
        FieldSpec::ambient(self)
    }

    fn frame_components(&self, p: &ChartPoint) -> Result<FrameVector> {
        self.evaluate(p)
    }
}

fn pendulum_trig(px: f64, py: f64, r: f64, cv: f64, sv: f64, phase: f64) -> Trig {
    // on the axis sin v = 0, so the θ = 0 convention is harmless
    let (ct, st) = if r == 0.0 { (1.0, 0.0) } else { (px / r, py / r) };
    Trig { cu: ct, su: st, cv, sv }.rotated(phase)
}

/// `σ_{p,q}` with `v_q` taken from an arbitrary radial profile, e.g. a
/// shooting solution; used to cross-check the closed-form family.
pub struct ProfileField<'a> {
    pub phase: f64,
    pub profile: &'a dyn RadialProfile,
}

impl ProfileField<'_> {
    pub fn components_at(&self, x: [f64; 3]) -> FrameVector {
        let r = x[0].hypot(x[1]);
        let (v, _) = if r == 0.0 { (0.0, 0.0) } else { self.profile.eval(r) };
        let (sv, cv) = v.sin_cos();
        pendulum_trig(x[0], x[1], r, cv, sv, self.phase).vector()
    }

    /// `v'² + sin²v / r²`, with the limit `2q²` on the axis.
    pub fn bending_at(&self, x: [f64; 3]) -> f64 {
        let r = x[0].hypot(x[1]);
        if r == 0.0 {
            let q = self.profile.slope_at_origin();
            return 2.0 * q * q;
        }
        let (v, dv) = self.profile.eval(r);
        pendulum::bending_from_profile(r, v, dv)
    }
}

impl FrameField for ProfileField<'_> {
    fn ambient(&self) -> Ambient {
        Ambient::Euclidean
    }

    fn frame_components(&self, p: &ChartPoint) -> Result<FrameVector> {
        if p.ambient() != Ambient::Euclidean {
            return Err(Error::AmbientMismatch {
                field: Ambient::Euclidean,
                point: p.ambient(),
            });
        }
        Ok(self.components_at(p.to_chart(Ambient::Euclidean.frame_chart())?.coords()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use proptest::prelude::*;

    fn catalog() -> Vec<FieldSpec> {
        vec![
            FieldSpec::EuclidRadialLine { t: 0.3 },
            FieldSpec::EuclidRadialPoint { t: -1.1 },
            FieldSpec::EuclidPendulum { p: 0.4, q: 1.5 },
            FieldSpec::EuclidPendulum { p: 0.0, q: -2.0 },
            FieldSpec::Frame { index: 1, ambient: Ambient::Euclidean },
            FieldSpec::Frame { index: 2, ambient: Ambient::Hyperbolic },
            FieldSpec::Frame { index: 3, ambient: Ambient::Hyperbolic },
            FieldSpec::HoroInvariant { u0: 0.7 },
            FieldSpec::HoroTheta { sign: -1 },
            FieldSpec::HoroHolomorphic { k: 1.3, a_re: 0.2, a_im: -0.5 },
            FieldSpec::HoroPq { p: 0.8, q: 0.1 },
            FieldSpec::HParallel,
        ]
    }

    fn point_for(spec: &FieldSpec, a: f64, b: f64, c: f64) -> ChartPoint {
        match spec.ambient() {
            Ambient::Euclidean => ChartPoint::cartesian(a, b, c),
            Ambient::Hyperbolic => ChartPoint::half_space(a, b, 0.3 + c.abs()).unwrap(),
        }
    }

    #[test]
    fn radial_line_at_quarter_turn() {
        let p = ChartPoint::cylindrical(1.0, 0.5 * PI, 0.0).unwrap();
        let w = FieldSpec::EuclidRadialLine { t: 0.0 }.evaluate(&p).unwrap();
        assert_abs_diff_eq!(w.0[0], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(w.0[1], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(w.0[2], 0.0, epsilon = 1e-15);
    }

    #[test]
    fn h_parallel_is_xi3() {
        let p = ChartPoint::half_space(0.4, -3.0, 2.5).unwrap();
        assert_eq!(FieldSpec::HParallel.evaluate(&p).unwrap(), FrameVector::E3);
    }

    #[test]
    fn pendulum_on_axis_is_xi3() {
        for q in [1.0, -3.0, 0.0] {
            let spec = FieldSpec::EuclidPendulum { p: 0.0, q };
            for z in [-2.0, 0.0, 5.0] {
                let w = spec.evaluate(&ChartPoint::cartesian(0.0, 0.0, z)).unwrap();
                assert_eq!(w, FrameVector::E3);
            }
            let near = spec.evaluate(&ChartPoint::cartesian(1e-9, -1e-9, 0.0)).unwrap();
            assert_abs_diff_eq!(near.0[2], 1.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn domain_errors() {
        let axis = ChartPoint::half_space(0.0, 0.0, 1.0).unwrap();
        assert!(matches!(
            FieldSpec::HoroTheta { sign: 1 }.evaluate(&axis),
            Err(Error::Domain(_))
        ));
        assert!(FieldSpec::EuclidRadialLine { t: 0.0 }
            .evaluate(&ChartPoint::cartesian(0.0, 0.0, 1.0))
            .is_err());
        assert!(FieldSpec::EuclidRadialPoint { t: 0.0 }
            .evaluate(&ChartPoint::cartesian(0.0, 0.0, 0.0))
            .is_err());
        assert!(matches!(
            FieldSpec::HParallel.evaluate(&ChartPoint::cartesian(0.0, 0.0, 1.0)),
            Err(Error::AmbientMismatch { .. })
        ));
    }

    #[test]
    fn polar_decompose_examples() {
        let a = polar_decompose(FrameVector::E1).unwrap();
        assert_abs_diff_eq!(a.u, 0.0);
        assert_abs_diff_eq!(a.v, 0.5 * PI);
        assert!(matches!(polar_decompose(FrameVector::E3), Err(Error::Domain(_))));
        assert!(matches!(
            polar_decompose(FrameVector([1.0, 1.0, 0.0])),
            Err(Error::InvalidArgument(_))
        ));
        let w = FrameVector([0.5, 0.5, 0.5_f64.sqrt()]);
        let b = polar_decompose(w).unwrap();
        assert_abs_diff_eq!(b.u, 0.25 * PI, epsilon = 1e-15);
        assert_abs_diff_eq!(b.v, 0.25 * PI, epsilon = 1e-15);
        let back = b.reconstruct();
        for i in 0..3 {
            assert_abs_diff_eq!(back.0[i], w.0[i], epsilon = 1e-15);
        }
    }

    #[test]
    fn bending_examples() {
        let at = |spec: FieldSpec, p: ChartPoint| spec.bending(&p).unwrap().value;
        assert_relative_eq!(
            at(FieldSpec::EuclidRadialLine { t: 1.0 }, ChartPoint::cylindrical(2.0, 0.3, 1.0).unwrap()),
            0.25
        );
        assert_relative_eq!(
            at(FieldSpec::EuclidRadialPoint { t: 1.0 }, ChartPoint::spherical(1.0, 0.3, 1.0).unwrap()),
            2.0,
            max_relative = 1e-15
        );
        assert_relative_eq!(
            at(FieldSpec::HoroPq { p: 1.0, q: 0.0 }, ChartPoint::half_space(0.0, 0.0, 1.0).unwrap()),
            5.0
        );
        assert_relative_eq!(
            at(
                FieldSpec::Frame { index: 3, ambient: Ambient::Hyperbolic },
                ChartPoint::ball_polar(0.7, 1.0, 2.0).unwrap()
            ),
            2.0
        );
    }

    #[test]
    fn closed_form_bending_matches_frame_derivatives() {
        let h = DEFAULT_STEP;
        for spec in catalog() {
            for (a, b, c) in [(0.7, -0.4, 0.9), (-1.3, 0.5, 1.6), (0.2, 1.1, -0.8)] {
                let p = point_for(&spec, a, b, c);
                let closed = spec.bending(&p).unwrap().value;
                let fd = bending_fd(&spec, &p, h).unwrap();
                assert_abs_diff_eq!(closed, fd, epsilon = 1e-6 * (1.0 + closed));
            }
        }
    }

    #[test]
    fn circle_action_examples() {
        let line = FieldSpec::EuclidRadialLine { t: 0.0 };
        assert_eq!(
            line.circle_action(0.5 * PI).unwrap(),
            FieldSpec::EuclidRadialLine { t: 0.5 * PI }
        );
        // σ_{π/2} = θ̂
        let w = line
            .circle_action(0.5 * PI)
            .unwrap()
            .evaluate(&ChartPoint::cartesian(2.0, 0.0, 0.0))
            .unwrap();
        assert_abs_diff_eq!(w.0[1], 1.0, epsilon = 1e-15);
        assert_eq!(
            FieldSpec::HoroPq { p: 2.0, q: 0.5 }.circle_action(1.0).unwrap(),
            FieldSpec::HoroPq { p: 2.0, q: 1.5 }
        );
        for spec in catalog() {
            assert_eq!(spec.circle_action(0.0).unwrap(), spec);
        }
        assert!(FieldSpec::HParallel.circle_action(1.0).is_err());
        let rot = FieldSpec::HoroTheta { sign: 1 }.circle_action(0.7).unwrap();
        assert_eq!(rot.declared_harmonic(), Some(false));
        assert_eq!(
            FieldSpec::HoroTheta { sign: 1 }.circle_action(PI).unwrap().declared_harmonic(),
            Some(true)
        );
    }

    #[test]
    fn circle_action_preserves_euclidean_bending() {
        for spec in catalog().into_iter().filter(|s| s.ambient() == Ambient::Euclidean) {
            let p = ChartPoint::cartesian(0.6, -0.2, 0.4);
            let b0 = spec.bending(&p).unwrap().value;
            for t in [0.3, 2.0, -1.0] {
                let rotated = spec.circle_action(t).unwrap();
                assert_relative_eq!(rotated.bending(&p).unwrap().value, b0, max_relative = 1e-14);
                assert_relative_eq!(
                    bending_fd(&rotated, &p, DEFAULT_STEP).unwrap(),
                    b0,
                    max_relative = 1e-6,
                    epsilon = 1e-9
                );
            }
        }
    }

    #[test]
    fn holomorphic_with_zero_k_is_invariant() {
        let s = FieldSpec::horo_holomorphic(0.0, 0.0, 2.0).unwrap();
        assert_eq!(s, FieldSpec::HoroInvariant { u0: 0.5 * PI });
        assert!(FieldSpec::horo_holomorphic(0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn pendulum_glide_symmetry() {
        for (x, y, z) in [(0.3, 0.1, 0.0), (-2.0, 1.0, 3.0), (0.01, -0.02, -1.0)] {
            let p = ChartPoint::cartesian(x, y, z);
            let a = FieldSpec::EuclidPendulum { p: 0.4 + PI, q: 1.2 }.evaluate(&p).unwrap();
            let b = FieldSpec::EuclidPendulum { p: 0.4, q: -1.2 }.evaluate(&p).unwrap();
            for i in 0..3 {
                assert_abs_diff_eq!(a.0[i], b.0[i], epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn pendulum_bending_is_bounded_with_axis_limit() {
        let spec = FieldSpec::EuclidPendulum { p: 0.0, q: 1.7 };
        let limit = 2.0 * 1.7 * 1.7;
        for r in [1e-8, 1e-3, 0.5, 3.0, 40.0] {
            let b = spec.bending(&ChartPoint::cartesian(r, 0.0, 0.0)).unwrap().value;
            assert!(b <= limit * (1.0 + 1e-12));
        }
        let b = spec.bending(&ChartPoint::cartesian(1e-8, 0.0, 0.0)).unwrap().value;
        assert_relative_eq!(b, limit, max_relative = 1e-12);
    }

    #[test]
    fn profile_field_matches_catalog() {
        let q = 1.5;
        let sol = pendulum::solve_shooting(q, 20.0, 400, 1e-11).unwrap();
        let field = ProfileField { phase: 0.4, profile: &sol };
        let spec = FieldSpec::EuclidPendulum { p: 0.4, q };
        for x in [[0.5, 0.2, 0.0], [3.0, -1.0, 2.0], [0.0, 0.0, 1.0]] {
            let a = field.components_at(x);
            let b = spec.components_at(x).unwrap();
            for i in 0..3 {
                assert_abs_diff_eq!(a.0[i], b.0[i], epsilon = 1e-7);
            }
        }
    }

    #[test]
    fn custom_polar_matches_catalog() {
        let u: ScalarFn = Arc::new(|x: [f64; 3]| x[1].atan2(x[0]));
        let v: ScalarFn = Arc::new(|x: [f64; 3]| x[0].hypot(x[1]).atan2(x[2]));
        let custom = FieldSpec::CustomPolar(CustomPolar {
            name: "radial".into(),
            ambient: Ambient::Euclidean,
            u,
            v: Some(v),
        });
        let p = ChartPoint::cartesian(0.4, 0.9, -0.3);
        let a = custom.evaluate(&p).unwrap();
        let b = FieldSpec::EuclidRadialPoint { t: 0.0 }.evaluate(&p).unwrap();
        for i in 0..3 {
            assert_abs_diff_eq!(a.0[i], b.0[i], epsilon = 1e-15);
        }
        let expected = 2.0 / (0.16 + 0.81 + 0.09);
        assert_relative_eq!(custom.bending(&p).unwrap().value, expected, max_relative = 1e-7);
    }

    proptest! {
        #[test]
        fn catalog_fields_are_unit(a in -3.0..3.0f64, b in -3.0..3.0f64, c in -3.0..3.0f64) {
            prop_assume!(a.hypot(b) > 1e-3);
            for spec in catalog() {
                let p = point_for(&spec, a, b, c);
                let w = spec.evaluate(&p).unwrap();
                prop_assert!((w.norm() - 1.0).abs() < 1e-12);
            }
        }
    }
}
