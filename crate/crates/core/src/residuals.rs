//! Grid-based harmonicity checks.
//!
//! Every check evaluates one or more pointwise residual channels over a
//! [`GridSpec`] at the requested step `h`, and again at a coarse pair
//! `(h_c, h_c/2)` to estimate the convergence order. A channel passes when
//! its maximum at `h` is below `max(tol, C h²)`, where `C` is calibrated from
//! the coarse run and only used when that run shows second-order decay.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::charts::{frame_jet, frame_scalar_jet, Ambient, ChartId, ChartPoint, FrameField};
use crate::error::{Error, Result};
use crate::fieldlab::{FieldDescription, FieldSpec};

/// Step of the coarse convergence pair.
pub const CONVERGENCE_STEP: f64 = 1e-2;
/// Default tolerance of the verdict.
pub const DEFAULT_TOL: f64 = 1e-6;
/// Default distance kept from singular sets.
pub const DEFAULT_MARGIN: f64 = 0.05;
/// Factor on the `C·h²` truncation estimate taken from the convergence run.
pub const CALIBRATION_SAFETY: f64 = 2.0;
/// Below this at both coarse steps a channel has no truncation error worth
/// measuring (`C < 1e-5` at the coarse step) and what remains is rounding.
pub const EXACT_FLOOR: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxisRange {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl AxisRange {
    pub fn new(min: f64, max: f64, count: usize) -> Self {
        AxisRange { min, max, count }
    }

    fn values(&self) -> impl Iterator<Item = f64> + '_ {
        let n = self.count;
        (0..n).map(move |k| self.min + (self.max - self.min) * k as f64 / (n - 1) as f64)
    }
}

/// Points removed from a grid. Distances are measured in frame-chart
/// coordinates (Cartesian, or half-space `(x, y, z)`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "epsilon", rename_all = "snake_case")]
pub enum Exclusion {
    None,
    /// Keep points with `√(x² + y²) ≥ ε`.
    AxisDistance(f64),
    /// Keep points with `|x| ≥ ε`.
    OriginDistance(f64),
}

impl Exclusion {
    fn keeps(&self, x: [f64; 3]) -> bool {
        match *self {
            Exclusion::None => true,
            Exclusion::AxisDistance(eps) => x[0].hypot(x[1]) >= eps,
            Exclusion::OriginDistance(eps) => (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt() >= eps,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub chart: ChartId,
    pub axes: [AxisRange; 3],
    pub exclusion: Exclusion,
}

impl GridSpec {
    pub fn new(chart: ChartId, axes: [AxisRange; 3], exclusion: Exclusion) -> Result<Self> {
        let g = GridSpec { chart, axes, exclusion };
        g.points()?;
        Ok(g)
    }

    /// Tensor grid in `chart`, minus excluded points.
    pub fn points(&self) -> Result<Vec<ChartPoint>> {
        for (k, a) in self.axes.iter().enumerate() {
            if a.count < 2 || !(a.min < a.max) {
                return Err(Error::InvalidArgument(format!(
                    "grid axis {k} needs min < max and count >= 2, got {a:?}"
                )));
            }
        }
        let frame = self.chart.ambient().frame_chart();
        let mut out = Vec::new();
        for a in self.axes[0].values() {
            for b in self.axes[1].values() {
                for c in self.axes[2].values() {
                    let p = ChartPoint::new(self.chart, a, b, c)?;
                    if self.exclusion.keeps(p.to_chart(frame)?.coords()) {
                        out.push(p);
                    }
                }
            }
        }
        if out.is_empty() {
            return Err(Error::InvalidArgument("grid is empty after exclusion".into()));
        }
        Ok(out)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn passed(self) -> bool {
        self == Verdict::Pass
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelReport {
    pub name: String,
    pub max: f64,
    pub mean: f64,
    /// Maxima at `h_c` and `h_c/2`.
    pub coarse_max: [f64; 2],
    /// `log₂` of the ratio of the coarse maxima; `None` when both are at
    /// rounding level (the stencil is exact for this field).
    pub order: Option<f64>,
    pub exact: bool,
    pub threshold: f64,
    pub pass: bool,
}

impl ChannelReport {
    /// Second-order convergence, or exact to rounding.
    pub fn converges(&self) -> bool {
        self.exact || self.order.is_some_and(|o| o >= 1.9)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub check: String,
    pub family: String,
    pub params: Vec<(String, f64)>,
    pub grid: GridSpec,
    pub points: usize,
    pub h: f64,
    pub convergence_steps: [f64; 2],
    pub tol: f64,
    pub channels: Vec<ChannelReport>,
    pub verdict: Verdict,
}

impl ResidualReport {
    pub fn channel(&self, name: &str) -> Option<&ChannelReport> {
        self.channels.iter().find(|c| c.name == name)
    }
}

/// Per-channel `(max, mean)` of a pointwise residual over the grid.
fn sweep<F>(points: &[ChartPoint], h: f64, nch: usize, f: &F) -> Result<Vec<(f64, f64)>>
where
    F: Fn(&ChartPoint, f64) -> Result<Vec<f64>> + Sync,
{
    let values: Vec<Vec<f64>> = points.par_iter().map(|p| f(p, h)).collect::<Result<_>>()?;
    let mut out = vec![(0.0_f64, 0.0_f64); nch];
    for row in &values {
        for (k, v) in row.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite(format!("residual channel {k}")));
            }
            out[k].0 = out[k].0.max(*v);
            out[k].1 += v;
        }
    }
    for o in &mut out {
        o.1 /= values.len() as f64;
    }
    Ok(out)
}

fn run<F>(
    check: &str,
    desc: FieldDescription,
    names: &[&str],
    grid: &GridSpec,
    h: f64,
    tol: f64,
    f: F,
) -> Result<ResidualReport>
where
    F: Fn(&ChartPoint, f64) -> Result<Vec<f64>> + Sync,
{
    if !(h > 0.0) || !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("h and tol must be positive, got {h}, {tol}")));
    }
    let points = grid.points()?;
    let hc = CONVERGENCE_STEP.max(h);
    let fine = sweep(&points, h, names.len(), &f)?;
    let c1 = sweep(&points, hc, names.len(), &f)?;
    let c2 = sweep(&points, 0.5 * hc, names.len(), &f)?;
    let channels: Vec<ChannelReport> = names
        .iter()
        .enumerate()
        .map(|(k, name)| {
            let (m1, m2) = (c1[k].0, c2[k].0);
            let exact = m1 < EXACT_FLOOR && m2 < EXACT_FLOOR;
            let order = (!exact && m2 > 0.0).then(|| (m1 / m2).log2());
            let calibrated = match order {
                Some(o) if o >= 1.9 => CALIBRATION_SAFETY * m2 / (0.25 * hc * hc) * h * h,
                _ => 0.0,
            };
            let threshold = tol.max(calibrated);
            ChannelReport {
                name: name.to_string(),
                max: fine[k].0,
                mean: fine[k].1,
                coarse_max: [m1, m2],
                order,
                exact,
                threshold,
                pass: fine[k].0 < threshold,
            }
        })
        .collect();
    let verdict = if channels.iter().all(|c| c.pass) {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok(ResidualReport {
        check: check.to_string(),
        family: desc.family,
        params: desc.params,
        grid: *grid,
        points: points.len(),
        h,
        convergence_steps: [hc, 0.5 * hc],
        tol,
        channels,
        verdict,
    })
}

fn require_ambient(grid: &GridSpec, ambient: Ambient) -> Result<()> {
    if grid.chart.ambient() != ambient {
        return Err(Error::AmbientMismatch {
            field: ambient,
            point: grid.chart.ambient(),
        });
    }
    Ok(())
}

/// `|∇*∇σ − |∇σ|²σ|`, both terms from finite differences of the field.
pub fn harmonic_section_residual(spec: &FieldSpec, grid: &GridSpec, h: f64, tol: f64) -> Result<ResidualReport> {
    harmonic_section_residual_for(spec, spec.describe(), grid, h, tol)
}

/// As [`harmonic_section_residual`] for any frame field.
pub fn harmonic_section_residual_for<F: FrameField + ?Sized>(
    field: &F,
    desc: FieldDescription,
    grid: &GridSpec,
    h: f64,
    tol: f64,
) -> Result<ResidualReport> {
    require_ambient(grid, field.ambient())?;
    run("harmonic_section", desc, &["harmonic_section"], grid, h, tol, |p, h| {
        let jet = frame_jet(field, p, h)?;
        let r = jet.rough_laplacian() - jet.bending() * jet.value;
        Ok(vec![r.norm()])
    })
}

/// Residuals of `Δu = 2(∇u·∇v) cot v` and `Δv = −|∇u|² cos v sin v`.
/// `u` is differentiated as an angle (differences wrapped into `(−π, π]`).
pub fn euclidean_reduced_residual<U, V>(
    u: &U,
    v: &V,
    desc: FieldDescription,
    grid: &GridSpec,
    h: f64,
    tol: f64,
) -> Result<ResidualReport>
where
    U: Fn([f64; 3]) -> f64 + Sync,
    V: Fn([f64; 3]) -> f64 + Sync,
{
    require_ambient(grid, Ambient::Euclidean)?;
    run("euclidean_reduced", desc, &["u_equation", "v_equation"], grid, h, tol, |p, h| {
        let ju = frame_scalar_jet(u, Ambient::Euclidean, p, h, true)?;
        let jv = frame_scalar_jet(v, Ambient::Euclidean, p, h, false)?;
        let (sv, cv) = jv.value.sin_cos();
        if sv.abs() < 1e-12 {
            return Err(Error::Domain(format!("v ∈ {{0, π}} at {:?}: cot v is infinite", p.coords())));
        }
        let gu_gv = ju.gradient.dot(&jv.gradient);
        Ok(vec![
            (ju.laplacian - 2.0 * gu_gv * cv / sv).abs(),
            (jv.laplacian + ju.gradient.norm_squared() * cv * sv).abs(),
        ])
    })
}

/// Residuals of `Δu = 0` (hyperbolic Laplacian) and `u_x sin u = u_y cos u`,
/// the latter scaled by `z` to the frame derivatives `ξ₁u sin u − ξ₂u cos u`.
pub fn horospherical_residual<U>(u: &U, desc: FieldDescription, grid: &GridSpec, h: f64, tol: f64) -> Result<ResidualReport>
where
    U: Fn([f64; 3]) -> f64 + Sync,
{
    require_ambient(grid, Ambient::Hyperbolic)?;
    run("horospherical", desc, &["laplacian", "constraint"], grid, h, tol, |p, h| {
        let j = frame_scalar_jet(u, Ambient::Hyperbolic, p, h, true)?;
        let (su, cu) = j.value.sin_cos();
        let g = j.gradient.0;
        Ok(vec![j.laplacian.abs(), (g[0] * su - g[1] * cu).abs()])
    })
}

/// The reduced system that applies to `spec`: the polar-angle form for
/// Euclidean polar fields, horospherical form for fields tangent to
/// horospheres. `ξ₃`-type fields have no reduced system.
pub fn reduced_residual(spec: &FieldSpec, grid: &GridSpec, h: f64, tol: f64) -> Result<ResidualReport> {
    let u = |x: [f64; 3]| spec.u_angle(x).unwrap_or(f64::NAN);
    match spec.ambient() {
        Ambient::Euclidean => {
            if matches!(spec, FieldSpec::Frame { index: 3, .. }) {
                return Err(Error::InvalidArgument("ξ₃ has no polar form".into()));
            }
            let v = |x: [f64; 3]| spec.v_angle(x).unwrap_or(f64::NAN);
            // surface domain errors instead of NaN residuals
            for p in grid.points()? {
                spec.evaluate(&p)?;
            }
            euclidean_reduced_residual(&u, &v, spec.describe(), grid, h, tol)
        }
        Ambient::Hyperbolic if spec.is_horospherical() => {
            for p in grid.points()? {
                spec.evaluate(&p)?;
            }
            horospherical_residual(&u, spec.describe(), grid, h, tol)
        }
        Ambient::Hyperbolic => Err(Error::InvalidArgument(format!(
            "{} is not horospherical: no reduced system applies",
            spec.describe().family
        ))),
    }
}

/// Geodesic defect `|∇_σσ|` and solenoidal defect `|div σ|`. A harmonic unit
/// field on `H³` is a harmonic map exactly when both vanish.
pub fn harmonic_map_test(spec: &FieldSpec, grid: &GridSpec, h: f64, tol: f64) -> Result<ResidualReport> {
    if spec.ambient() == Ambient::Euclidean {
        return Err(Error::InvalidArgument(
            "the geodesic and solenoidal characterisation applies to non-Euclidean space forms only".into(),
        ));
    }
    require_ambient(grid, Ambient::Hyperbolic)?;
    run("harmonic_map", spec.describe(), &["geodesic", "solenoidal"], grid, h, tol, |p, h| {
        let jet = frame_jet(spec, p, h)?;
        Ok(vec![jet.along(jet.value).norm(), jet.divergence().abs()])
    })
}

/// A grid suited to `spec`: cylindrical shells for axis-singular Euclidean
/// fields, spherical shells for the radial point field, half-space boxes on
/// `H³` kept `margin` away from the `z`-axis.
pub fn default_grid(spec: &FieldSpec, margin: f64, n: usize) -> Result<GridSpec> {
    use std::f64::consts::PI;
    let base = match spec {
        FieldSpec::Rotated { base, .. } => base.as_ref(),
        s => s,
    };
    let (chart, axes, exclusion) = match (spec.ambient(), base) {
        (Ambient::Euclidean, FieldSpec::EuclidRadialPoint { .. }) => (
            ChartId::EuclideanSpherical,
            [
                AxisRange::new(0.5, 2.0, n),
                AxisRange::new(-PI, PI, n),
                AxisRange::new(0.3, PI - 0.3, n),
            ],
            Exclusion::OriginDistance(margin),
        ),
        (Ambient::Euclidean, _) => (
            ChartId::EuclideanCylindrical,
            [
                AxisRange::new(0.2_f64.max(margin), 2.0, n),
                AxisRange::new(-PI, PI, n),
                AxisRange::new(-1.0, 1.0, n),
            ],
            Exclusion::AxisDistance(margin),
        ),
        (Ambient::Hyperbolic, _) => (
            ChartId::HyperbolicHalfSpace,
            [
                AxisRange::new(-1.0, 1.0, n),
                AxisRange::new(-1.0, 1.0, n),
                AxisRange::new(0.2, 2.0, n),
            ],
            Exclusion::AxisDistance(margin),
        ),
    };
    GridSpec::new(chart, axes, exclusion)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charts::DEFAULT_STEP;
    use std::f64::consts::PI;

    fn grid(spec: &FieldSpec) -> GridSpec {
        default_grid(spec, DEFAULT_MARGIN, 6).unwrap()
    }

    #[test]
    fn radial_point_passes_both_checks() {
        let spec = FieldSpec::EuclidRadialPoint { t: 0.4 };
        let g = grid(&spec);
        let a = harmonic_section_residual(&spec, &g, DEFAULT_STEP, DEFAULT_TOL).unwrap();
        assert!(a.verdict.passed(), "{a:?}");
        assert!(a.channels[0].converges(), "{a:?}");
        let b = reduced_residual(&spec, &g, DEFAULT_STEP, DEFAULT_TOL).unwrap();
        assert!(b.verdict.passed(), "{b:?}");
    }

    #[test]
    fn planar_radial_line_reduced_system() {
        let spec = FieldSpec::EuclidRadialLine { t: 0.0 };
        let r = reduced_residual(&spec, &grid(&spec), DEFAULT_STEP, DEFAULT_TOL).unwrap();
        assert!(r.verdict.passed());
        // cos v = 0, so only round-off remains
        assert!(r.channel("v_equation").unwrap().max < 1e-13);
    }

    #[test]
    fn horo_pq_passes() {
        let spec = FieldSpec::HoroPq { p: 1.0, q: 0.0 };
        let g = grid(&spec);
        assert!(harmonic_section_residual(&spec, &g, DEFAULT_STEP, DEFAULT_TOL)
            .unwrap()
            .verdict
            .passed());
        assert!(reduced_residual(&spec, &g, DEFAULT_STEP, DEFAULT_TOL).unwrap().verdict.passed());
    }

    #[test]
    fn hyperbolic_radial_analogue_fails() {
        let spec = FieldSpec::HoroTheta { sign: 1 }.circle_action(-0.5 * PI).unwrap();
        let g = grid(&spec);
        let a = harmonic_section_residual(&spec, &g, DEFAULT_STEP, DEFAULT_TOL).unwrap();
        assert_eq!(a.verdict, Verdict::Fail);
        let [m1, m2] = a.channels[0].coarse_max;
        assert!(m1 > 0.1 && m2 > 0.1 && a.channels[0].max > 0.1);
        let b = reduced_residual(&spec, &g, DEFAULT_STEP, DEFAULT_TOL).unwrap();
        assert!(!b.channel("constraint").unwrap().pass);
        assert!(b.channel("laplacian").unwrap().pass);
    }

    #[test]
    fn harmonic_map_defects_of_frames() {
        let g = grid(&FieldSpec::HParallel);
        let xi3 = FieldSpec::Frame { index: 3, ambient: Ambient::Hyperbolic };
        let r = harmonic_map_test(&xi3, &g, DEFAULT_STEP, DEFAULT_TOL).unwrap();
        assert!(r.channel("geodesic").unwrap().max < 1e-12);
        assert!((r.channel("solenoidal").unwrap().max - 2.0).abs() < 1e-9);
        let xi1 = FieldSpec::Frame { index: 1, ambient: Ambient::Hyperbolic };
        let r = harmonic_map_test(&xi1, &g, DEFAULT_STEP, DEFAULT_TOL).unwrap();
        assert!(r.channel("solenoidal").unwrap().max < 1e-12);
        assert!((r.channel("geodesic").unwrap().max - 1.0).abs() < 1e-9);
        assert!(harmonic_map_test(&FieldSpec::EuclidRadialLine { t: 0.0 }, &g, 1e-4, 1e-6).is_err());
    }

    #[test]
    fn grid_validation() {
        let bad = GridSpec::new(
            ChartId::HyperbolicHalfSpace,
            [AxisRange::new(0.0, 1.0, 3), AxisRange::new(0.0, 1.0, 3), AxisRange::new(-1.0, 1.0, 3)],
            Exclusion::None,
        );
        assert!(bad.is_err());
        let single = GridSpec::new(
            ChartId::EuclideanCartesian,
            [AxisRange::new(0.0, 1.0, 1), AxisRange::new(0.0, 1.0, 3), AxisRange::new(0.0, 1.0, 3)],
            Exclusion::None,
        );
        assert!(single.is_err());
    }

    #[test]
    fn singular_grid_is_an_error() {
        let spec = FieldSpec::EuclidRadialLine { t: 0.0 };
        let g = GridSpec::new(
            ChartId::EuclideanCartesian,
            [AxisRange::new(-1.0, 1.0, 3), AxisRange::new(-1.0, 1.0, 3), AxisRange::new(0.0, 1.0, 2)],
            Exclusion::None,
        )
        .unwrap();
        assert!(harmonic_section_residual(&spec, &g, DEFAULT_STEP, DEFAULT_TOL).is_err());
    }
}
