//! Streamlines of unit fields and diagnostics of the `σ_{p,q}` flow.
//!
//! Euclidean fields are traced in Cartesian coordinates, `dx/ds = σ(x)`.
//! On `H³` only the frame fields and `ξ₃` are traced, in half-space
//! coordinates, where a frame vector `a` has coordinate velocity `z·a`.
//! Since `|σ| = 1` the parameter `s` is arc length.
//!
//! "Pitch" of a helix is reported as the slope `|cot v|`, the ratio of
//! vertical to horizontal speed.

use std::f64::consts::{FRAC_PI_2, PI};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::charts::{wrap_angle, Ambient, ChartId, ChartPoint};
use crate::error::{Error, Result};
use crate::fieldlab::FieldSpec;
use crate::ode::rk4_step;
use crate::pendulum::{self, ClosedForm};

/// Distance kept from the singular sets of the radial families.
const SINGULAR_MARGIN: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Streamline {
    pub family: String,
    pub params: Vec<(String, f64)>,
    /// Chart of `points`: Cartesian or half-space.
    pub chart: ChartId,
    pub step: f64,
    pub points: Vec<[f64; 3]>,
}

impl Streamline {
    /// Arc-length parameter of point `k`.
    pub fn arc_length(&self, k: usize) -> f64 {
        k as f64 * self.step
    }
}

fn velocity(spec: &FieldSpec, x: [f64; 3]) -> Result<[f64; 3]> {
    match spec {
        FieldSpec::EuclidRadialLine { .. } if x[0].hypot(x[1]) < SINGULAR_MARGIN => {
            return Err(Error::Domain("trajectory reached the axis".into()))
        }
        FieldSpec::EuclidRadialPoint { .. } if (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt() < SINGULAR_MARGIN => {
            return Err(Error::Domain("trajectory reached the origin".into()))
        }
        _ => {}
    }
    let a = spec.components_at(x)?.0;
    Ok(match spec.ambient() {
        Ambient::Euclidean => a,
        Ambient::Hyperbolic => {
            if !(x[2] > 0.0) {
                return Err(Error::Domain("trajectory left the half-space".into()));
            }
            [x[2] * a[0], x[2] * a[1], x[2] * a[2]]
        }
    })
}

fn check_traceable(spec: &FieldSpec) -> Result<()> {
    if spec.ambient() == Ambient::Hyperbolic && !matches!(spec, FieldSpec::Frame { .. } | FieldSpec::HParallel) {
        return Err(Error::InvalidArgument(
            "hyperbolic tracing is available for the frame fields and h-parallel only".into(),
        ));
    }
    Ok(())
}

/// `n` classical RK4 steps of length `step` from `start`.
pub fn trace(spec: &FieldSpec, start: &ChartPoint, step: f64, n: usize) -> Result<Streamline> {
    check_traceable(spec)?;
    if !(step > 0.0) || !step.is_finite() {
        return Err(Error::InvalidArgument(format!("step must be positive, got {step}")));
    }
    if start.ambient() != spec.ambient() {
        return Err(Error::AmbientMismatch {
            field: spec.ambient(),
            point: start.ambient(),
        });
    }
    let chart = spec.ambient().frame_chart();
    let x0 = start.to_chart(chart)?.coords();
    let f = |_s: f64, x: &[f64; 3]| velocity(spec, *x);
    f(0.0, &x0)?;
    let mut points = Vec::with_capacity(n + 1);
    points.push(x0);
    let mut x = x0;
    for k in 0..n {
        x = rk4_step(&f, k as f64 * step, &x, step)?;
        if !x.iter().all(|c| c.is_finite()) {
            return Err(Error::NonFinite(format!("streamline at step {}", k + 1)));
        }
        points.push(x);
    }
    let d = spec.describe();
    Ok(Streamline {
        family: d.family,
        params: d.params,
        chart,
        step,
        points,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Chirality {
    Left,
    Right,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Vertical {
    Up,
    Down,
    Level,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HelixSample {
    pub r: f64,
    /// `|cot v|`; infinite on the axis limit, zero on the crossing cylinder.
    pub slope: f64,
    pub chirality: Option<Chirality>,
    pub vertical: Vertical,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowDiagnostics {
    pub family: String,
    pub params: Vec<(String, f64)>,
    /// Radius where the vertical component of `σ` changes sign.
    pub crossing_radius: Option<f64>,
    pub slope_profile: Vec<HelixSample>,
    /// Handedness inside the crossing cylinder.
    pub chirality: Option<Chirality>,
    /// Largest deviation from the invariant surfaces (radial drift for
    /// cylinders, `θ` drift for half-planes).
    pub invariant_surface_error: f64,
    /// For fountains: detected crossings of the critical cylinder.
    pub crossings: Vec<Crossing>,
    /// For fountains: distance between the `q` and `−q` streamlines after
    /// reflection in `z = 0` and reversal.
    pub mirror_error: Option<f64>,
}

fn pendulum_params(spec: &FieldSpec) -> Result<(f64, f64)> {
    match spec {
        FieldSpec::EuclidPendulum { p, q } => Ok((*p, *q)),
        _ => Err(Error::InvalidArgument("flow diagnostics need a euclid-pendulum field".into())),
    }
}

/// Radius where `cos v_q = 0`, read off the field along the `x`-axis.
fn field_crossing_radius(spec: &FieldSpec, q: f64) -> Result<Option<f64>> {
    if q == 0.0 {
        return Ok(None);
    }
    let vertical = |r: f64| spec.components_at([r, 0.0, 0.0]).map(|w| w.0[2]);
    let (mut lo, mut hi) = (0.0, 1.0 / q.abs());
    while vertical(hi)? > 0.0 {
        lo = hi;
        hi *= 2.0;
        if hi > 1e12 {
            return Ok(None);
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if vertical(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Some(0.5 * (lo + hi)))
}

fn helix_sample(q: f64, p: f64, r: f64) -> HelixSample {
    let (v, _) = pendulum::closed_form(q, r);
    let (sv, cv) = v.sin_cos();
    let angular = sv * p.sin();
    let slope = if sv == 0.0 { f64::INFINITY } else { (cv / sv).abs() };
    let chirality = if angular * cv > 0.0 {
        Some(Chirality::Right)
    } else if angular * cv < 0.0 {
        Some(Chirality::Left)
    } else {
        None
    };
    let vertical = if cv > 0.0 {
        Vertical::Up
    } else if cv < 0.0 {
        Vertical::Down
    } else {
        Vertical::Level
    };
    HelixSample {
        r,
        slope,
        chirality,
        vertical,
    }
}

/// Helix slopes and handedness on the invariant cylinders `r = const` of
/// `σ_{±π/2, q}`, plus the radial drift of a traced helix over one turn on
/// each cylinder (with step `step`).
pub fn helix_diagnostics(spec: &FieldSpec, radii: &[f64], step: f64) -> Result<FlowDiagnostics> {
    let (p, q) = pendulum_params(spec)?;
    let w = wrap_angle(p.abs() - FRAC_PI_2);
    if w.abs() > 1e-12 {
        return Err(Error::InvalidArgument(format!("helix diagnostics need p = ±π/2, got p = {p}")));
    }
    if radii.iter().any(|&r| !(r > 0.0)) {
        return Err(Error::InvalidArgument("radii must be positive".into()));
    }
    let crossing_radius = field_crossing_radius(spec, q)?;
    let slope_profile: Vec<HelixSample> = radii.iter().map(|&r| helix_sample(q, p, r)).collect();
    let inside = crossing_radius.map_or(1.0, |c| 0.5 * c);
    let chirality = helix_sample(q, p, inside).chirality;
    let drifts: Vec<f64> = radii
        .par_iter()
        .map(|&r| cylinder_drift(spec, r, step))
        .collect::<Result<_>>()?;
    let d = spec.describe();
    Ok(FlowDiagnostics {
        family: d.family,
        params: d.params,
        crossing_radius,
        slope_profile,
        chirality,
        invariant_surface_error: drifts.into_iter().fold(0.0, f64::max),
        crossings: vec![],
        mirror_error: None,
    })
}

/// Maximum `|r − r₀|` along one revolution of the streamline started on the
/// cylinder of radius `r0`; streamlines that barely turn are followed for
/// one unit of height instead.
pub fn cylinder_drift(spec: &FieldSpec, r0: f64, step: f64) -> Result<f64> {
    let w = spec.components_at([r0, 0.0, 0.0])?.0;
    let horizontal = w[0].hypot(w[1]);
    let length = if horizontal > 1e-3 {
        2.0 * PI * r0 / horizontal
    } else {
        1.0
    };
    let n = (length / step).ceil() as usize;
    let s = trace(spec, &ChartPoint::cartesian(r0, 0.0, 0.0), length / n as f64, n)?;
    Ok(s.points.iter().map(|x| (x[0].hypot(x[1]) - r0).abs()).fold(0.0, f64::max))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    pub arc_length: f64,
    pub point: [f64; 3],
    pub radius: f64,
    /// `|⟨σ, ξ₃⟩|` at the crossing.
    pub vertical_component: f64,
    /// `⟨σ, r̂⟩` at the crossing; `±1` for an orthogonal crossing.
    pub radial_component: f64,
}

/// Sub-step `τ ∈ (0, step)` from `x` where the vertical component of `σ`
/// vanishes, by bisection on RK4 sub-steps.
fn refine_crossing(spec: &FieldSpec, x: [f64; 3], step: f64) -> Result<(f64, [f64; 3])> {
    let f = |_s: f64, y: &[f64; 3]| velocity(spec, *y);
    let vz = |tau: f64| -> Result<(f64, [f64; 3])> {
        let y = if tau == 0.0 { x } else { rk4_step(&f, 0.0, &x, tau)? };
        Ok((spec.components_at(y)?.0[2], y))
    };
    let s0 = vz(0.0)?.0.signum();
    let (mut lo, mut hi) = (0.0, step);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if vz(mid)?.0.signum() == s0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let tau = 0.5 * (lo + hi);
    Ok((tau, vz(tau)?.1))
}

/// Half-plane invariance, critical-cylinder crossings and the mirror
/// relation between `σ_{0,q}` and `σ_{0,−q}` for fountain streamlines.
pub fn fountain_diagnostics(spec: &FieldSpec, starts: &[[f64; 3]], step: f64, n: usize) -> Result<FlowDiagnostics> {
    let (p, q) = pendulum_params(spec)?;
    if wrap_angle(p).abs() > 1e-12 {
        return Err(Error::InvalidArgument(format!("fountain diagnostics need p = 0, got p = {p}")));
    }
    let mirrored = FieldSpec::EuclidPendulum { p, q: -q };
    struct PerStart {
        theta_drift: f64,
        crossings: Vec<Crossing>,
        mirror: f64,
    }
    let results: Vec<PerStart> = starts
        .par_iter()
        .map(|&x0| -> Result<PerStart> {
            let line = trace(spec, &ChartPoint::cartesian(x0[0], x0[1], x0[2]), step, n)?;
            let theta0 = x0[1].atan2(x0[0]);
            let on_axis = x0[0].hypot(x0[1]) == 0.0;
            let theta_drift = if on_axis {
                line.points.iter().map(|x| x[0].hypot(x[1])).fold(0.0, f64::max)
            } else {
                line.points
                    .iter()
                    .map(|x| wrap_angle(x[1].atan2(x[0]) - theta0).abs())
                    .fold(0.0, f64::max)
            };
            let mut crossings = vec![];
            for k in 0..n {
                let (a, b) = (line.points[k], line.points[k + 1]);
                let (va, vb) = (spec.components_at(a)?.0[2], spec.components_at(b)?.0[2]);
                if va != 0.0 && va.signum() != vb.signum() {
                    let (tau, y) = refine_crossing(spec, a, step)?;
                    let w = spec.components_at(y)?.0;
                    let r = y[0].hypot(y[1]);
                    crossings.push(Crossing {
                        arc_length: k as f64 * step + tau,
                        point: y,
                        radius: r,
                        vertical_component: w[2].abs(),
                        radial_component: if r > 0.0 { (w[0] * y[0] + w[1] * y[1]) / r } else { 0.0 },
                    });
                }
            }
            // σ_{0,−q}(Mx) = −M σ_{0,q}(x) with M the reflection z ↦ −z
            let end = line.points[n];
            let back = trace(&mirrored, &ChartPoint::cartesian(end[0], end[1], -end[2]), step, n)?;
            let mirror = (0..=n)
                .map(|k| {
                    let a = line.points[n - k];
                    let b = back.points[k];
                    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] + b[2]).powi(2)).sqrt()
                })
                .fold(0.0, f64::max);
            Ok(PerStart {
                theta_drift,
                crossings,
                mirror,
            })
        })
        .collect::<Result<_>>()?;
    let d = spec.describe();
    Ok(FlowDiagnostics {
        family: d.family,
        params: d.params,
        crossing_radius: field_crossing_radius(spec, q)?,
        slope_profile: vec![],
        chirality: None,
        invariant_surface_error: results.iter().map(|r| r.theta_drift).fold(0.0, f64::max),
        crossings: results.iter().flat_map(|r| r.crossings.iter().copied()).collect(),
        mirror_error: Some(results.iter().map(|r| r.mirror).fold(0.0, f64::max)),
    })
}

/// `max |σ_{p+π,q} − σ_{p,−q}|` over the given Cartesian points.
pub fn glide_symmetry_defect(p: f64, q: f64, points: &[[f64; 3]]) -> Result<f64> {
    let a = FieldSpec::EuclidPendulum { p: p + PI, q };
    let b = FieldSpec::EuclidPendulum { p, q: -q };
    let mut worst = 0.0_f64;
    for &x in points {
        worst = worst.max((a.components_at(x)? - b.components_at(x)?).norm());
    }
    Ok(worst)
}

/// Crossing radius of the pendulum profile, for comparison with the flow.
pub fn profile_crossing_radius(q: f64, tol: f64) -> Result<f64> {
    pendulum::crossing_radius(&ClosedForm { q }, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn h_parallel_flows_up_the_geodesic() {
        let s = trace(&FieldSpec::HParallel, &ChartPoint::half_space(0.0, 0.0, 1.0).unwrap(), 0.01, 300).unwrap();
        for (k, x) in s.points.iter().enumerate() {
            assert_relative_eq!(x[2], s.arc_length(k).exp(), max_relative = 1e-9);
            assert_eq!((x[0], x[1]), (0.0, 0.0));
        }
    }

    #[test]
    fn hyperbolic_tracing_is_restricted() {
        let p = ChartPoint::half_space(1.0, 0.0, 1.0).unwrap();
        assert!(trace(&FieldSpec::HoroTheta { sign: 1 }, &p, 0.01, 3).is_err());
    }

    #[test]
    fn crossing_cylinder_is_a_circle() {
        let q = 1.5;
        let spec = FieldSpec::EuclidPendulum { p: FRAC_PI_2, q };
        let r_star = profile_crossing_radius(q, 1e-14).unwrap();
        assert_relative_eq!(r_star, 2.0 / q, max_relative = 1e-12);
        let drift = cylinder_drift(&spec, r_star, 1e-3).unwrap();
        assert!(drift < 1e-6 * r_star, "{drift}");
        let s = trace(&spec, &ChartPoint::cartesian(r_star, 0.0, 0.0), 1e-3, 500).unwrap();
        assert!(s.points.iter().all(|x| x[2].abs() < 1e-9));
        // anticlockwise: y increases first
        assert!(s.points[1][1] > 0.0);
    }

    #[test]
    fn fountain_rises_then_falls() {
        let spec = FieldSpec::EuclidPendulum { p: 0.0, q: 1.0 };
        let s = trace(&spec, &ChartPoint::cartesian(0.5, 0.0, 0.0), 1e-3, 6000).unwrap();
        let top = s
            .points
            .iter()
            .enumerate()
            .max_by(|a, b| a.1[2].total_cmp(&b.1[2]))
            .unwrap()
            .0;
        assert!(top > 0 && top < s.points.len() - 1);
        assert!(s.points[..=top].windows(2).all(|w| w[1][2] > w[0][2]));
        assert!(s.points[top + 1..].windows(2).all(|w| w[1][2] < w[0][2]));
        let r_top = s.points[top][0].hypot(s.points[top][1]);
        assert!((r_top - 2.0).abs() < 1e-2);
    }

    #[test]
    fn helix_slopes_and_handedness() {
        let spec = FieldSpec::EuclidPendulum { p: FRAC_PI_2, q: 1.0 };
        let d = helix_diagnostics(&spec, &[1e-4, 0.5, 1.999, 3.0], 1e-2).unwrap();
        assert!(d.slope_profile[0].slope > 1e3);
        assert!(d.slope_profile[2].slope < 1e-3);
        assert_eq!(d.chirality, Some(Chirality::Right));
        assert_eq!(d.slope_profile[3].chirality, Some(Chirality::Left));
        assert_eq!(d.slope_profile[3].vertical, Vertical::Down);
        let neg = helix_diagnostics(&FieldSpec::EuclidPendulum { p: FRAC_PI_2, q: -1.0 }, &[0.5], 1e-2).unwrap();
        assert_eq!(neg.chirality, Some(Chirality::Left));
        assert_eq!(neg.slope_profile[0].vertical, Vertical::Up);
        assert!(helix_diagnostics(&FieldSpec::EuclidPendulum { p: 0.0, q: 1.0 }, &[1.0], 1e-2).is_err());
    }

    #[test]
    fn fountain_diagnostics_small() {
        let spec = FieldSpec::EuclidPendulum { p: 0.0, q: 1.0 };
        let d = fountain_diagnostics(&spec, &[[0.1, 0.0, 0.0], [0.3 * 0.8, 0.3 * 0.6, -1.0]], 1e-3, 8000).unwrap();
        assert!(d.invariant_surface_error < 1e-9);
        assert!(!d.crossings.is_empty());
        for c in &d.crossings {
            assert!(c.vertical_component < 1e-6);
            assert!((c.radius - 2.0).abs() < 1e-6);
            assert!((c.radial_component - 1.0).abs() < 1e-9);
        }
        assert!(d.mirror_error.unwrap() < 1e-6);
    }

    #[test]
    fn axis_streamline_stays_on_axis() {
        let spec = FieldSpec::EuclidPendulum { p: 0.3, q: 2.0 };
        let s = trace(&spec, &ChartPoint::cartesian(0.0, 0.0, -1.0), 0.1, 50).unwrap();
        for (k, x) in s.points.iter().enumerate() {
            assert_eq!((x[0], x[1]), (0.0, 0.0));
            assert_abs_diff_eq!(x[2], -1.0 + s.arc_length(k), epsilon = 1e-12);
        }
    }

    #[test]
    fn glide_symmetry() {
        let pts = [[0.3, -0.2, 1.0], [2.0, 5.0, 0.0], [-1e-3, 4e-4, 3.0]];
        assert!(glide_symmetry_defect(0.7, 1.3, &pts).unwrap() < 1e-12);
    }
}
