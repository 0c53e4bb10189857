//! Second variation of the H-parallel field `σ = ξ₃` on `H³` in the
//! direction `α = φ ξ₁`, with `φ` a radial bump about the ball centre:
//! `φ = 1` on `[0, R]`, linear down to `0` on `[R, R + δ]`.
//!
//! The Hessian reduces to `H = 4π ∫ (φ'² − φ²) sinh²ρ dρ`. Two closed forms
//! are provided: [`hessian_closed_form`], the reference form, and
//! [`hessian_closed_form_exact`], which is what the same computation gives
//! when the shell-volume coefficient `1/(2δ²)` is carried through. They agree
//! only at `δ = 1`. The thresholds `δ_s`, `δ_u`, `R₀` are properties of the
//! reference form; the exact form is positive for every `(R, δ)`.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::charts::{frame_jet, scalar_laplacian, Ambient, ChartPoint, FnField, FrameVector, BALL_CENTRE};
use crate::charts::half_space_distance;
use crate::error::{Error, Result};
use crate::pendulum::log_grid;
use crate::quad;

/// `V_ρ = π sinh 2ρ − 2πρ`, the volume of a geodesic ball.
pub fn ball_volume(rho: f64) -> Result<f64> {
    if !(rho >= 0.0) {
        return Err(Error::InvalidArgument(format!("radius must be >= 0, got {rho}")));
    }
    if rho < 0.1 {
        // π Σ_{k≥1} (2ρ)^{2k+1}/(2k+1)!, avoiding the cancellation
        let x = 2.0 * rho;
        let x2 = x * x;
        let mut term = x * x2 / 6.0;
        let mut sum = 0.0_f64;
        let mut k = 3.0;
        while term > 1e-18 * sum.max(f64::MIN_POSITIVE) && k < 40.0 {
            sum += term;
            term *= x2 / ((k + 1.0) * (k + 2.0));
            k += 2.0;
        }
        return Ok(PI * sum);
    }
    Ok(PI * (2.0 * rho).sinh() - 2.0 * PI * rho)
}

/// `V_{R,R+δ} = 2π cosh(2R + δ) sinh δ − 2πδ`.
pub fn shell_volume(r: f64, delta: f64) -> f64 {
    2.0 * PI * (2.0 * r + delta).cosh() * delta.sinh() - 2.0 * PI * delta
}

fn check_rd(r: f64, delta: f64) -> Result<()> {
    if !(r >= 0.0 && r.is_finite()) || !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "need R >= 0 and delta > 0, got R = {r}, delta = {delta}"
        )));
    }
    Ok(())
}

/// The piecewise-linear bump.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BumpProfile {
    pub r: f64,
    pub delta: f64,
}

impl BumpProfile {
    pub fn new(r: f64, delta: f64) -> Result<Self> {
        check_rd(r, delta)?;
        Ok(BumpProfile { r, delta })
    }

    pub fn value(&self, rho: f64) -> f64 {
        if rho <= self.r {
            1.0
        } else if rho <= self.r + self.delta {
            1.0 + (self.r - rho) / self.delta
        } else {
            0.0
        }
    }

    pub fn slope(&self, rho: f64) -> f64 {
        if rho > self.r && rho < self.r + self.delta {
            -1.0 / self.delta
        } else {
            0.0
        }
    }

    pub fn support(&self) -> f64 {
        self.r + self.delta
    }
}

/// `H(R, δ)`, reference form:
/// `(π/δ²)(2−δ²) sinh δ cosh(2R+δ) + (π/δ) cosh 2R + (π/δ)(2Rδ + 5δ²/3 − 3)`.
pub fn hessian_closed_form(r: f64, delta: f64) -> f64 {
    let d = delta;
    PI / (d * d) * (2.0 - d * d) * d.sinh() * (2.0 * r + d).cosh()
        + PI / d * (2.0 * r).cosh()
        + PI / d * (2.0 * r * d + 5.0 * d * d / 3.0 - 3.0)
}

/// `H(R, δ) = V_{R,R+δ}/(2δ²) + (π/δ) cosh 2R + (π/δ)(2Rδ + ⅔δ² − 1)`
/// `= (π/δ²) sinh δ cosh(2R+δ) + (π/δ) cosh 2R + (π/δ)(2Rδ + ⅔δ² − 2)`.
pub fn hessian_closed_form_exact(r: f64, delta: f64) -> f64 {
    let d = delta;
    PI / (d * d) * d.sinh() * (2.0 * r + d).cosh()
        + PI / d * (2.0 * r).cosh()
        + PI / d * (2.0 * r * d + 2.0 * d * d / 3.0 - 2.0)
}

/// `4π ∫ (f'² − f²) sinh²ρ dρ` over `[0, support]` for a radial profile.
pub fn hessian_quadrature_profile<F, D>(f: F, df: D, breaks: &[f64], tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tol must be positive, got {tol}")));
    }
    let integrand = |rho: f64| {
        let (a, b) = (df(rho), f(rho));
        let s = rho.sinh();
        (a * a - b * b) * s * s
    };
    Ok(4.0 * PI * quad::integrate_with_breaks(integrand, breaks, 0.0, tol)?.value)
}

/// Direct quadrature of the Hessian with the exact piecewise-linear bump.
pub fn hessian_quadrature(r: f64, delta: f64, tol: f64) -> Result<f64> {
    let b = BumpProfile::new(r, delta)?;
    hessian_quadrature_profile(|x| b.value(x), |x| b.slope(x), &[0.0, r, r + delta], tol)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HessianEvaluation {
    pub r: f64,
    pub delta: f64,
    pub closed_form: f64,
    pub closed_form_exact: f64,
    pub quadrature: f64,
    pub abs_diff: f64,
    pub rel_diff: f64,
    pub exact_rel_diff: f64,
}

pub fn evaluate_hessian(r: f64, delta: f64, tol: f64) -> Result<HessianEvaluation> {
    check_rd(r, delta)?;
    let closed_form = hessian_closed_form(r, delta);
    let closed_form_exact = hessian_closed_form_exact(r, delta);
    let quadrature = hessian_quadrature(r, delta, tol)?;
    let abs_diff = (closed_form - quadrature).abs();
    Ok(HessianEvaluation {
        r,
        delta,
        closed_form,
        closed_form_exact,
        quadrature,
        abs_diff,
        rel_diff: abs_diff / quadrature.abs(),
        exact_rel_diff: (closed_form_exact - quadrature).abs() / quadrature.abs(),
    })
}

/// `n × n` lattice of evaluations, uniform over the given ranges.
pub fn hessian_lattice(r_range: (f64, f64), delta_range: (f64, f64), n: usize, tol: f64) -> Result<Vec<HessianEvaluation>> {
    if n < 2 {
        return Err(Error::InvalidArgument("lattice needs n >= 2".into()));
    }
    let at = |(lo, hi): (f64, f64), k: usize| lo + (hi - lo) * k as f64 / (n - 1) as f64;
    (0..n * n)
        .into_par_iter()
        .map(|idx| evaluate_hessian(at(r_range, idx / n), at(delta_range, idx % n), tol))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShellIntegrals {
    pub r: f64,
    pub delta: f64,
    /// `I₁ = ∫_S ρ dV` via ball volumes.
    pub i1: f64,
    /// `I₂ = ∫_S ρ² dV` via ball volumes.
    pub i2: f64,
    /// `π[ρ sinh 2ρ − ½ cosh 2ρ − ρ²]_R^{R+δ}`.
    pub i1_bracket: f64,
    /// `π[(ρ² + ½) sinh 2ρ − ρ cosh 2ρ − 2ρ³/3]_R^{R+δ}`.
    pub i2_bracket: f64,
    pub i1_quadrature: f64,
    pub i2_quadrature: f64,
}

pub fn i1_antiderivative(rho: f64) -> f64 {
    PI * (rho * (2.0 * rho).sinh() - 0.5 * (2.0 * rho).cosh() - rho * rho)
}

pub fn i2_antiderivative(rho: f64) -> f64 {
    PI * ((rho * rho + 0.5) * (2.0 * rho).sinh() - rho * (2.0 * rho).cosh() - 2.0 * rho.powi(3) / 3.0)
}

pub fn shell_integrals(r: f64, delta: f64) -> Result<ShellIntegrals> {
    check_rd(r, delta)?;
    let (d, s) = (delta, r + delta);
    let (v_in, v_out) = (ball_volume(r)?, ball_volume(s)?);
    let v_shell = shell_volume(r, d);
    let i1 = s * v_out - r * v_in + 0.5 * PI * (2.0 * r).cosh() - 0.5 * PI * (2.0 * s).cosh()
        + PI * d * (2.0 * r + d);
    let i2 = s * s * v_out - r * r * v_in + 0.5 * v_shell + PI * r * (2.0 * r).cosh()
        - PI * s * (2.0 * s).cosh()
        + PI * d * (4.0 * r * r + 4.0 * r * d + 4.0 * d * d / 3.0 + 1.0);
    let q = |p: i32| -> Result<f64> {
        let f = |x: f64| x.powi(p) * ((2.0 * x).cosh() - 1.0);
        Ok(2.0 * PI * quad::integrate(f, r, s, 0.0, 1e-14)?.value)
    };
    Ok(ShellIntegrals {
        r,
        delta,
        i1,
        i2,
        i1_bracket: i1_antiderivative(s) - i1_antiderivative(r),
        i2_bracket: i2_antiderivative(s) - i2_antiderivative(r),
        i1_quadrature: q(1)?,
        i2_quadrature: q(2)?,
    })
}

/// The crude bound `V_{R,R+δ}/δ² − V_R`.
pub fn crude_upper_bound(r: f64, delta: f64) -> Result<f64> {
    check_rd(r, delta)?;
    Ok(shell_volume(r, delta) / (delta * delta) - ball_volume(r)?)
}

/// `(2 − δ²) sinh δ e^δ + δ`: the sign of `H` of the reference form as
/// `R → ∞` (`H ≈ π e^{2R} A(δ) / 2δ²`).
pub fn large_r_coefficient(delta: f64) -> f64 {
    (2.0 - delta * delta) * delta.sinh() * delta.exp() + delta
}

/// Largest `R` of the scan used for "all `R > 0`" statements.
pub const R_SCAN_MAX: f64 = 50.0;
const R_SCAN_POINTS: usize = 600;

/// `{0} ∪` a log grid on `[1e-4, R_SCAN_MAX]`.
pub fn r_scan() -> Vec<f64> {
    let mut v = vec![0.0];
    v.extend(log_grid(1e-4, R_SCAN_MAX, R_SCAN_POINTS));
    v
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Regime {
    Stable,
    Mixed,
    Unstable,
}

fn regime(delta: f64, scan: &[f64]) -> Regime {
    let a = large_r_coefficient(delta);
    let pos = scan.iter().all(|&r| hessian_closed_form(r, delta) > 0.0);
    let neg = scan.iter().all(|&r| hessian_closed_form(r, delta) < 0.0);
    if pos && a > 0.0 {
        Regime::Stable
    } else if neg && a < 0.0 {
        Regime::Unstable
    } else {
        Regime::Mixed
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityThresholds {
    /// Supremum of `δ` with `H > 0` for all `R`.
    pub delta_s: f64,
    /// Infimum of `δ` with `H < 0` for all `R`.
    pub delta_u: f64,
    pub tol: f64,
    pub r_scan_max: f64,
}

fn bisect<P: Fn(f64) -> bool>(mut lo: f64, mut hi: f64, tol: f64, below: P) -> f64 {
    // invariant: below(lo) && !below(hi)
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if below(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Secant refinement of a root of `g`, kept only if it stays in `[lo, hi]`.
fn secant_refine<G: Fn(f64) -> f64>(g: G, lo: f64, hi: f64) -> Option<f64> {
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (g(a), g(b));
    for _ in 0..50 {
        if fb == fa {
            break;
        }
        let c = b - fb * (b - a) / (fb - fa);
        if !c.is_finite() {
            return None;
        }
        a = b;
        fa = fb;
        b = c;
        fb = g(b);
        if (b - a).abs() < 1e-15 * b.abs() || fb == 0.0 {
            break;
        }
    }
    (b >= lo && b <= hi).then_some(b)
}

/// `δ_s` and `δ_u` of the reference closed form by bisection on the sign
/// structure of `H(·, δ)` over [`r_scan`] plus the large-`R` coefficient,
/// then secant refinement on the binding regime.
pub fn find_thresholds(tol: f64) -> Result<StabilityThresholds> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tol must be positive, got {tol}")));
    }
    let scan = r_scan();
    // coarse δ sweep: Stable* Mixed* Unstable* in that order
    let deltas: Vec<f64> = (0..=290).map(|k| 0.1 + 0.01 * k as f64).collect();
    let regimes: Vec<Regime> = deltas.par_iter().map(|&d| regime(d, &scan)).collect();
    let rank = |g: Regime| match g {
        Regime::Stable => 0,
        Regime::Mixed => 1,
        Regime::Unstable => 2,
    };
    if regimes.windows(2).any(|w| rank(w[0]) > rank(w[1])) {
        return Err(Error::ScanInconsistent(
            "stable, mixed and unstable δ ranges are not ordered".into(),
        ));
    }
    let last = |g: Regime| regimes.iter().rposition(|&x| x == g);
    let first = |g: Regime| regimes.iter().position(|&x| x == g);
    let (Some(s_idx), Some(u_idx)) = (last(Regime::Stable), first(Regime::Unstable)) else {
        return Err(Error::ScanInconsistent("δ sweep did not reach both regimes".into()));
    };
    if first(Regime::Mixed).is_none() {
        return Err(Error::ScanInconsistent("no δ with mixed sign structure".into()));
    }
    let bis_tol = tol.min(1e-7);
    let ds = bisect(deltas[s_idx], deltas[s_idx + 1], bis_tol, |d| regime(d, &scan) == Regime::Stable);
    let du = bisect(deltas[u_idx - 1], deltas[u_idx], bis_tol, |d| regime(d, &scan) != Regime::Unstable);
    // binding regimes: the large-R coefficient for δ_s, the sup over R for δ_u
    let delta_s = secant_refine(large_r_coefficient, ds - bis_tol, ds + bis_tol).unwrap_or(ds);
    let r_star = scan
        .iter()
        .copied()
        .max_by(|a, b| hessian_closed_form(*a, du).total_cmp(&hessian_closed_form(*b, du)))
        .unwrap_or(0.0);
    let delta_u = secant_refine(|d| hessian_closed_form(r_star, d), du - bis_tol, du + bis_tol).unwrap_or(du);
    let mid = 0.5 * (delta_s + delta_u);
    if !(delta_s < delta_u) || regime(mid, &scan) != Regime::Mixed {
        return Err(Error::ScanInconsistent(format!(
            "thresholds δ_s = {delta_s}, δ_u = {delta_u} do not bracket a mixed regime"
        )));
    }
    Ok(StabilityThresholds {
        delta_s,
        delta_u,
        tol,
        r_scan_max: R_SCAN_MAX,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct R0Report {
    pub delta0: f64,
    /// Inner radius beyond which `H < 0`.
    pub r0: f64,
    /// Support radius `R₀ + δ₀` of the corresponding bump.
    pub support_radius: f64,
    /// Sign sampling confirmed `H < 0` on `(R₀, confirmed_to]`.
    pub confirmed_to: f64,
}

/// Largest zero of `R ↦ H(R, δ₀)` of the reference form.
pub fn find_r0(delta0: f64, tol: f64, thresholds: &StabilityThresholds) -> Result<R0Report> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tol must be positive, got {tol}")));
    }
    if !(delta0 > thresholds.delta_s && delta0 < thresholds.delta_u) {
        return Err(Error::InvalidArgument(format!(
            "delta0 = {delta0} is outside (δ_s, δ_u) = ({}, {})",
            thresholds.delta_s, thresholds.delta_u
        )));
    }
    let h = |r: f64| hessian_closed_form(r, delta0);
    const STEP: f64 = 1e-2;
    const R_MAX: f64 = 200.0;
    let n = (R_MAX / STEP) as usize;
    let last_nonneg = (0..=n).rev().find(|&k| h(k as f64 * STEP) >= 0.0).ok_or_else(|| {
        Error::ScanInconsistent(format!("H(·, {delta0}) is negative everywhere"))
    })?;
    if last_nonneg == n {
        return Err(Error::ScanInconsistent(format!(
            "H(·, {delta0}) is still non-negative at R = {R_MAX}"
        )));
    }
    let (mut lo, mut hi) = (last_nonneg as f64 * STEP, (last_nonneg + 1) as f64 * STEP);
    while hi - lo > tol.min(1e-10) {
        let mid = 0.5 * (lo + hi);
        if h(mid) >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let r0 = 0.5 * (lo + hi);
    Ok(R0Report {
        delta0,
        r0,
        support_radius: r0 + delta0,
        confirmed_to: R_MAX,
    })
}

/// The biweight-smoothed bump of width `w`: each kink of the linear ramp is
/// replaced by `w G(x/w)` with `G'' = (15/16)(1 − s²)²` on `[−1, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmoothedBump {
    pub r: f64,
    pub delta: f64,
    pub width: f64,
}

fn smooth_ramp(x: f64, w: f64) -> f64 {
    if x <= -w {
        0.0
    } else if x >= w {
        x
    } else {
        let s = x / w;
        let s2 = s * s;
        w * (15.0 / 16.0 * (s2 / 2.0 - s2 * s2 / 6.0 + s2 * s2 * s2 / 30.0) + s / 2.0 + 5.0 / 32.0)
    }
}

impl SmoothedBump {
    pub fn new(r: f64, delta: f64, width: f64) -> Result<Self> {
        check_rd(r, delta)?;
        if !(width > 0.0 && width < 0.5 * delta && width < r) {
            return Err(Error::InvalidArgument(format!(
                "smoothing width must lie in (0, min(R, δ/2)), got {width}"
            )));
        }
        Ok(SmoothedBump { r, delta, width })
    }

    pub fn value(&self, rho: f64) -> f64 {
        let w = self.width;
        1.0 - (smooth_ramp(rho - self.r, w) - smooth_ramp(rho - self.r - self.delta, w)) / self.delta
    }

    pub fn support(&self) -> f64 {
        self.r + self.delta + self.width
    }

    pub fn breaks(&self) -> Vec<f64> {
        let (r, d, w) = (self.r, self.delta, self.width);
        vec![0.0, r - w, r + w, r + d - w, r + d + w]
    }
}

/// A generic ray direction for radial integrands (any direction gives the
/// same value for radial `f`).
const RAY: (f64, f64) = (0.3, 1.1);

fn radial_scalar<'a, F: Fn(f64) -> f64 + Sync + 'a>(f: &'a F) -> impl Fn([f64; 3]) -> f64 + Sync + 'a {
    move |x: [f64; 3]| f(half_space_distance(x, BALL_CENTRE))
}

/// `⟨J_σ(α), α⟩` at `p` for `σ = ξ₃`, `α = f ξ₁`, from
/// `J_σ(α) = ∇*∇α − |∇σ|²α − 2⟨∇σ, ∇α⟩σ` with every derivative taken by
/// finite differences of the fields themselves.
pub fn jacobi_integrand<F: Fn(f64) -> f64 + Sync>(f: &F, p: &ChartPoint, h: f64) -> Result<f64> {
    let fx = radial_scalar(f);
    let alpha = FnField::new(Ambient::Hyperbolic, |x: [f64; 3]| fx(x) * FrameVector::E1);
    let sigma = FnField::new(Ambient::Hyperbolic, |_x: [f64; 3]| FrameVector::E3);
    let ja = frame_jet(&alpha, p, h)?;
    let js = frame_jet(&sigma, p, h)?;
    let cross: f64 = (0..3).map(|i| js.covariant(i).dot(&ja.covariant(i))).sum();
    let j_alpha = ja.rough_laplacian() - js.bending() * ja.value - 2.0 * cross * js.value;
    Ok(j_alpha.dot(&ja.value))
}

/// `f Δf − f²` at `p` from the scalar Laplacian.
pub fn jacobi_identity_rhs<F: Fn(f64) -> f64 + Sync>(f: &F, p: &ChartPoint, h: f64) -> Result<f64> {
    let fx = radial_scalar(f);
    let q = p.to_chart(Ambient::Hyperbolic.frame_chart())?;
    let lap = scalar_laplacian(&fx, &q, h)?;
    let v = fx(q.coords());
    Ok(v * lap - v * v)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct JacobiForm {
    pub r: f64,
    pub delta: f64,
    /// Smoothing widths `w, w/2, w/4`.
    pub widths: [f64; 3],
    /// `∫⟨J_σ(α), α⟩ dV` for the bump smoothed at each width.
    pub values: [f64; 3],
    /// Two Richardson steps in the width, removing the `O(w)` and `O(w²)`
    /// smoothing errors.
    pub extrapolated: f64,
}

/// Finite-difference step as a fraction of the smoothing width: the fourth
/// derivative of a ramp grows like `1/w³`, so a fixed step would dominate
/// the error as `w → 0`.
pub const JACOBI_STEP_PER_WIDTH: f64 = 0.02;

/// `∫⟨J_σ(α), α⟩ dV` for a radial `f` supported in `[0, support]`, with the
/// integrand evaluated along a fixed ray by [`jacobi_integrand`].
pub fn jacobi_quadratic_form<F: Fn(f64) -> f64 + Sync>(
    f: &F,
    support: f64,
    breaks: &[f64],
    h: f64,
    tol: f64,
) -> Result<f64> {
    let beyond = support + 10.0 * h;
    if f(beyond).abs() > 1e-12 || f(2.0 * beyond).abs() > 1e-12 {
        return Err(Error::InvalidArgument(format!(
            "profile is not supported in [0, {support}]"
        )));
    }
    let (theta, phi) = RAY;
    let integrand = |rho: f64| -> Result<f64> {
        let p = ChartPoint::ball_polar(rho, theta, phi)?;
        let s = rho.sinh();
        Ok(jacobi_integrand(f, &p, h)? * s * s)
    };
    let failure = std::cell::Cell::new(None);
    let g = |rho: f64| match integrand(rho) {
        Ok(v) => v,
        Err(e) => {
            failure.set(Some(e));
            0.0
        }
    };
    let mut pts: Vec<f64> = breaks.iter().copied().filter(|&b| b > 0.0 && b < support).collect();
    pts.insert(0, 0.0);
    pts.push(support);
    let value = quad::integrate_with_breaks(g, &pts, 1e-9, tol)?.value;
    if let Some(e) = failure.take() {
        return Err(e);
    }
    Ok(4.0 * PI * value)
}

/// [`jacobi_quadratic_form`] for the bump smoothed at `width`, `width/2`
/// and `width/4`, extrapolated to zero width.
pub fn jacobi_smoothed_bump(r: f64, delta: f64, width: f64, tol: f64) -> Result<JacobiForm> {
    let widths = [width, 0.5 * width, 0.25 * width];
    let mut values = [0.0; 3];
    for (v, &w) in values.iter_mut().zip(&widths) {
        let b = SmoothedBump::new(r, delta, w)?;
        *v = jacobi_quadratic_form(&|x| b.value(x), b.support(), &b.breaks(), JACOBI_STEP_PER_WIDTH * w, tol)?;
    }
    let e1 = 2.0 * values[1] - values[0];
    let e2 = 2.0 * values[2] - values[1];
    Ok(JacobiForm {
        r,
        delta,
        widths,
        values,
        extrapolated: (4.0 * e2 - e1) / 3.0,
    })
}
