//! The radial profile `v_q(r)` of the Euclidean `σ_{p,q}` family.
//!
//! With `V = 2v` the harmonicity system reduces to the singular ODE
//! `r²V'' + rV' = sin V`, which in `t = log r` becomes `V_tt = sin V`
//! (the pendulum equation for `x = π − V`). The solutions with
//! `v(0+) = 0`, `v'(0+) = q` run along the separatrix `y = −2cos(x/2)`,
//! whose first integral inverts to
//!
//! ```text
//! tan(v/2) = q r / 2,   i.e.   v_q(r) = 2 arctan(q r / 2).
//! ```
//!
//! [`closed_form`] evaluates this profile; [`solve_shooting`] integrates the
//! ODE independently and is used to validate it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ode::Dopri5;
use crate::quad;

/// `(v, v')` of the separatrix profile with initial slope `q`.
pub fn closed_form(q: f64, r: f64) -> (f64, f64) {
    let s = 0.5 * q * r;
    (2.0 * s.atan(), q / (1.0 + s * s))
}

/// `v''` of the closed-form profile.
pub fn closed_form_second_derivative(q: f64, r: f64) -> f64 {
    let s = 0.5 * q * r;
    -q * q * s / ((1.0 + s * s) * (1.0 + s * s))
}

/// `|r²V'' + rV' − sin V|` of the closed form, from its analytic derivatives.
pub fn closed_form_ode_residual(q: f64, r: f64) -> f64 {
    let (v, dv) = closed_form(q, r);
    let d2v = closed_form_second_derivative(q, r);
    (r * r * 2.0 * d2v + r * 2.0 * dv - (2.0 * v).sin()).abs()
}

/// A radial profile `r ↦ (v(r), v'(r))`.
pub trait RadialProfile: Sync {
    fn slope_at_origin(&self) -> f64;
    fn eval(&self, r: f64) -> (f64, f64);
}

/// The closed-form profile for a given `q`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClosedForm {
    pub q: f64,
}

impl RadialProfile for ClosedForm {
    fn slope_at_origin(&self) -> f64 {
        self.q
    }

    fn eval(&self, r: f64) -> (f64, f64) {
        closed_form(self.q, r)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    Shooting,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub r: f64,
    pub v: f64,
    pub v_prime: f64,
}

/// A tabulated profile.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PendulumSolution {
    pub q: f64,
    /// Separatrix integration constant `|q|/2`.
    pub c: f64,
    pub samples: Vec<Sample>,
    pub method: Method,
    /// Maximum ODE residual over the samples. For the closed form this is
    /// `|r²V'' + rV' − sin V|`; for shooting it is the drift of the first
    /// integral `½(rV')² + cos V − 1` of the autonomous equation.
    pub max_residual: f64,
}

/// `n` log-spaced radii in `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![hi],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            (0..n)
                .map(|k| (a + (b - a) * k as f64 / (n - 1) as f64).exp())
                .collect()
        }
    }
}

fn default_grid(r_max: f64, n: usize) -> Vec<f64> {
    log_grid(1e-3_f64.min(r_max / 10.0), r_max, n)
}

impl PendulumSolution {
    /// Closed-form samples on the same log grid [`solve_shooting`] uses.
    pub fn closed_form(q: f64, r_max: f64, n: usize) -> Result<Self> {
        check_grid_args(r_max, n)?;
        Ok(Self::closed_form_on(q, &default_grid(r_max, n)))
    }

    pub fn closed_form_on(q: f64, radii: &[f64]) -> Self {
        let samples: Vec<Sample> = radii
            .iter()
            .map(|&r| {
                let (v, v_prime) = closed_form(q, r);
                Sample { r, v, v_prime }
            })
            .collect();
        let max_residual = radii
            .iter()
            .map(|&r| closed_form_ode_residual(q, r))
            .fold(0.0, f64::max);
        PendulumSolution {
            q,
            c: 0.5 * q.abs(),
            samples,
            method: Method::ClosedForm,
            max_residual,
        }
    }

    /// Cubic Hermite interpolation in `log r`; series `v ≈ q r` below the
    /// first sample.
    pub fn interpolate(&self, r: f64) -> (f64, f64) {
        let s = &self.samples;
        if s.is_empty() || r <= s[0].r {
            return (self.q * r, self.q);
        }
        let last = s[s.len() - 1];
        if r >= last.r {
            return (last.v, last.v_prime);
        }
        let k = s.partition_point(|x| x.r <= r) - 1;
        let (a, b) = (s[k], s[k + 1]);
        let (ta, tb) = (a.r.ln(), b.r.ln());
        let dt = tb - ta;
        let u = (r.ln() - ta) / dt;
        // dv/dt = r v'
        let (ma, mb) = (a.r * a.v_prime * dt, b.r * b.v_prime * dt);
        let (u2, u3) = (u * u, u * u * u);
        let v = (2.0 * u3 - 3.0 * u2 + 1.0) * a.v
            + (u3 - 2.0 * u2 + u) * ma
            + (-2.0 * u3 + 3.0 * u2) * b.v
            + (u3 - u2) * mb;
        let dv_du = (6.0 * u2 - 6.0 * u) * a.v
            + (3.0 * u2 - 4.0 * u + 1.0) * ma
            + (-6.0 * u2 + 6.0 * u) * b.v
            + (3.0 * u2 - 2.0 * u) * mb;
        (v, dv_du / dt / r)
    }
}

impl RadialProfile for PendulumSolution {
    fn slope_at_origin(&self) -> f64 {
        self.q
    }

    fn eval(&self, r: f64) -> (f64, f64) {
        self.interpolate(r)
    }
}

fn check_grid_args(r_max: f64, n: usize) -> Result<()> {
    if !(r_max > 0.0) || !r_max.is_finite() {
        return Err(Error::InvalidArgument(format!("r_max must be positive, got {r_max}")));
    }
    if n < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 samples, got {n}")));
    }
    Ok(())
}

/// Integrate the singular ODE outward from the series start and sample it on
/// a log-spaced grid ending at `r_max`.
pub fn solve_shooting(q: f64, r_max: f64, n: usize, tol: f64) -> Result<PendulumSolution> {
    check_grid_args(r_max, n)?;
    solve_shooting_on(q, &default_grid(r_max, n), tol)
}

/// Starting radius of the shooting integration.
pub fn shooting_start_radius(q: f64) -> f64 {
    1e-6 * 1.0_f64.max(1.0 / q.abs())
}

/// As [`solve_shooting`] on caller-supplied ascending radii.
pub fn solve_shooting_on(q: f64, radii: &[f64], tol: f64) -> Result<PendulumSolution> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tol must be positive, got {tol}")));
    }
    if radii.windows(2).any(|w| w[1] <= w[0]) || radii.iter().any(|&r| !(r > 0.0)) {
        return Err(Error::InvalidArgument("radii must be positive and ascending".into()));
    }
    let c = 0.5 * q.abs();
    if q == 0.0 {
        return Ok(PendulumSolution {
            q,
            c,
            samples: radii.iter().map(|&r| Sample { r, v: 0.0, v_prime: 0.0 }).collect(),
            method: Method::Shooting,
            max_residual: 0.0,
        });
    }
    let r0 = shooting_start_radius(q);
    // state (V, W = dV/dt) in t = log r, where the equation is autonomous
    let rhs = |_t: f64, y: &[f64; 2]| [y[1], y[0].sin()];
    let y0 = [2.0 * q * r0, 2.0 * q * r0];
    let (inside, outside): (Vec<f64>, Vec<f64>) = radii.iter().partition(|&&r| r <= r0);
    let times: Vec<f64> = outside.iter().map(|r| r.ln()).collect();
    let integrator = Dopri5 {
        rtol: tol * 1e-2,
        atol: tol * 1e-4,
        max_steps: 1_000_000,
    };
    let (states, _) = integrator.integrate(&rhs, r0.ln(), y0, &times)?;
    let mut samples: Vec<Sample> = inside
        .iter()
        .map(|&r| Sample { r, v: q * r, v_prime: q })
        .collect();
    let mut max_residual = 0.0_f64;
    for (&r, y) in outside.iter().zip(&states) {
        let first_integral = 0.5 * y[1] * y[1] + y[0].cos() - 1.0;
        max_residual = max_residual.max(first_integral.abs());
        samples.push(Sample {
            r,
            v: 0.5 * y[0],
            v_prime: 0.5 * y[1] / r,
        });
    }
    if max_residual > tol {
        return Err(Error::NoConvergence {
            reason: format!("first-integral drift exceeds tol {tol:e}"),
            max_residual,
        });
    }
    Ok(PendulumSolution {
        q,
        c,
        samples,
        method: Method::Shooting,
        max_residual,
    })
}

/// Maximum of `|y + 2cos(x/2)|` over the samples, in the phase variables
/// `t = log r`, `x = π − 2v`, `y = dx/dt`.
pub fn separatrix_residual(sol: &PendulumSolution) -> Result<f64> {
    if sol.q == 0.0 {
        return Err(Error::InvalidArgument(
            "q = 0 sits at the equilibrium x = pi, not on the separatrix".into(),
        ));
    }
    if sol.samples.is_empty() {
        return Err(Error::InvalidArgument("solution has no samples".into()));
    }
    Ok(sol
        .samples
        .iter()
        .map(|s| {
            let x = std::f64::consts::PI - 2.0 * s.v;
            let y = -2.0 * s.r * s.v_prime;
            (y + 2.0 * (0.5 * x).cos()).abs()
        })
        .fold(0.0, f64::max))
}

/// `|∇σ_{p,q}|² = v'² + sin²v / r²` for a profile value.
pub fn bending_from_profile(r: f64, v: f64, v_prime: f64) -> f64 {
    let s = v.sin() / r;
    v_prime * v_prime + s * s
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyProfile {
    pub q: f64,
    /// `(r, bending)` pairs.
    pub entries: Vec<(f64, f64)>,
    /// `lim_{r→0+}` by Richardson extrapolation.
    pub limit_at_zero: f64,
}

/// Richardson extrapolation of an even function `f(r) = f(0) + a r² + b r⁴ + …`
/// to `r = 0` from `r = h, h/2, h/4`.
fn richardson_even(f: impl Fn(f64) -> f64, h: f64) -> f64 {
    let f1 = f(h);
    let f2 = f(0.5 * h);
    let f4 = f(0.25 * h);
    let a = (4.0 * f2 - f1) / 3.0;
    let b = (4.0 * f4 - f2) / 3.0;
    (16.0 * b - a) / 15.0
}

pub fn energy_density_profile(q: f64, radii: &[f64]) -> Result<EnergyProfile> {
    energy_density_profile_for(&ClosedForm { q }, radii)
}

pub fn energy_density_profile_for<P: RadialProfile + ?Sized>(profile: &P, radii: &[f64]) -> Result<EnergyProfile> {
    if radii.iter().any(|&r| !(r > 0.0)) {
        return Err(Error::InvalidArgument("radii must be positive".into()));
    }
    let q = profile.slope_at_origin();
    let bending = |r: f64| {
        let (v, dv) = profile.eval(r);
        bending_from_profile(r, v, dv)
    };
    let h = 1e-2 / q.abs().max(1.0);
    Ok(EnergyProfile {
        q,
        entries: radii.iter().map(|&r| (r, bending(r))).collect(),
        limit_at_zero: richardson_even(bending, h),
    })
}

/// Radius where the profile crosses `v = ±π/2`, by bisection on `|v| − π/2`.
pub fn crossing_radius<P: RadialProfile + ?Sized>(profile: &P, tol: f64) -> Result<f64> {
    let q = profile.slope_at_origin();
    if q == 0.0 {
        return Err(Error::InvalidArgument("q = 0 profile never turns".into()));
    }
    let g = |r: f64| profile.eval(r).0.abs() - std::f64::consts::FRAC_PI_2;
    let mut lo = 0.0;
    let mut hi = 1.0 / q.abs();
    while g(hi) < 0.0 {
        lo = hi;
        hi *= 2.0;
        if hi > 1e12 {
            return Err(Error::NoConvergence {
                reason: "profile never reaches pi/2".into(),
                max_residual: g(hi),
            });
        }
    }
    while hi - lo > tol * hi.max(1.0) {
        let mid = 0.5 * (lo + hi);
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Total bending of `σ_{p,q}` over the spherical shell `r_in ≤ |x| ≤ r_out`.
pub fn shell_bending_integral(q: f64, r_in: f64, r_out: f64) -> Result<f64> {
    if !(0.0 <= r_in && r_in < r_out) {
        return Err(Error::InvalidArgument(format!("need 0 <= r_in < r_out, got {r_in}, {r_out}")));
    }
    let density = |cyl_r: f64| {
        if cyl_r == 0.0 {
            return 2.0 * q * q;
        }
        let (v, dv) = closed_form(q, cyl_r);
        bending_from_profile(cyl_r, v, dv)
    };
    let failure = std::cell::RefCell::new(None);
    let outer = quad::integrate(
        |big_r: f64| {
            let inner = quad::integrate(
                |phi: f64| density(big_r * phi.sin()) * phi.sin(),
                0.0,
                std::f64::consts::PI,
                1e-13,
                1e-11,
            );
            match inner {
                Ok(i) => 2.0 * std::f64::consts::PI * big_r * big_r * i.value,
                Err(e) => {
                    *failure.borrow_mut() = Some(e);
                    f64::NAN
                }
            }
        },
        r_in,
        r_out,
        1e-12,
        1e-10,
    );
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(outer?.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn zero_slope_is_trivial() {
        assert_eq!(closed_form(0.0, 3.0), (0.0, 0.0));
        let sol = solve_shooting(0.0, 10.0, 50, 1e-10).unwrap();
        assert!(sol.samples.iter().all(|s| s.v == 0.0 && s.v_prime == 0.0));
        assert!(separatrix_residual(&sol).is_err());
        let e = energy_density_profile(0.0, &[0.1, 1.0, 10.0]).unwrap();
        assert!(e.entries.iter().all(|&(_, b)| b == 0.0));
        assert_eq!(e.limit_at_zero, 0.0);
    }

    #[test]
    fn initial_slope_and_curvature() {
        let (v, dv) = closed_form(2.0, 1e-9);
        assert_abs_diff_eq!(dv, 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(v, 2e-9, epsilon = 1e-20);
        assert_abs_diff_eq!(closed_form_second_derivative(2.0, 1e-9), 0.0, epsilon = 1e-8);
    }

    #[test]
    fn asymptote_is_pi() {
        let (v, _) = closed_form(1.0, 1e3);
        assert!((v - PI).abs() < 1e-2);
        let (vn, _) = closed_form(-1.0, 1e3);
        assert!((vn + PI).abs() < 1e-2);
    }

    #[test]
    fn closed_form_solves_the_ode() {
        for &q in &[0.5, 1.0, 2.0, 5.0] {
            for r in log_grid(1e-6, 1e3, 400) {
                let res = closed_form_ode_residual(q, r);
                assert!(res < 1e-10, "q={q} r={r} residual {res}");
            }
        }
    }

    #[test]
    fn shooting_matches_closed_form() {
        for &q in &[0.5, 1.0, 2.0] {
            let sol = solve_shooting(q, 10.0, 400, 1e-12).unwrap();
            let err = sol
                .samples
                .iter()
                .map(|s| (s.v - closed_form(q, s.r).0).abs())
                .fold(0.0, f64::max);
            assert!(err < 1e-8, "q={q} sup error {err}");
            assert_abs_diff_eq!(sol.samples[0].r, 1e-3, epsilon = 1e-15);
        }
    }

    #[test]
    fn shooting_crossing_radius() {
        let q = 2.0;
        let shoot = solve_shooting(q, 10.0, 2000, 1e-12).unwrap();
        let rc_shoot = crossing_radius(&shoot, 1e-13).unwrap();
        let rc_closed = crossing_radius(&ClosedForm { q }, 1e-13).unwrap();
        assert!((rc_shoot - rc_closed).abs() < 1e-8, "{rc_shoot} vs {rc_closed}");
        // not |q|/2 in general
        let rc_half = crossing_radius(&ClosedForm { q: 0.5 }, 1e-13).unwrap();
        assert_relative_eq!(rc_half, 4.0, max_relative = 1e-10);
    }

    #[test]
    fn odd_symmetry_in_q() {
        let plus = solve_shooting(1.0, 10.0, 100, 1e-11).unwrap();
        let minus = solve_shooting(-1.0, 10.0, 100, 1e-11).unwrap();
        for (a, b) in plus.samples.iter().zip(&minus.samples) {
            assert_eq!(a.v, -b.v);
        }
    }

    #[test]
    fn separatrix_residuals() {
        let closed = PendulumSolution::closed_form(1.0, 1e3, 500).unwrap();
        assert!(separatrix_residual(&closed).unwrap() < 1e-10);
        let shoot = solve_shooting(2.0, 10.0, 500, 1e-10).unwrap();
        assert!(separatrix_residual(&shoot).unwrap() < 1e-8);
        let mut perturbed = closed.clone();
        for s in &mut perturbed.samples {
            s.v += 0.1;
        }
        assert!(separatrix_residual(&perturbed).unwrap() > 0.05);
        let neg = PendulumSolution::closed_form(-3.0, 100.0, 200).unwrap();
        assert!(separatrix_residual(&neg).unwrap() < 1e-10);
    }

    #[test]
    fn shooting_rejects_bad_arguments() {
        assert!(solve_shooting(1.0, -1.0, 10, 1e-8).is_err());
        assert!(solve_shooting(1.0, 1.0, 10, 0.0).is_err());
        assert!(solve_shooting(1.0, 1.0, 1, 1e-8).is_err());
    }

    #[test]
    fn bending_limits() {
        let e = energy_density_profile(1.0, &[1e3, 1e4]).unwrap();
        assert_abs_diff_eq!(e.limit_at_zero, 2.0, epsilon = 1e-6);
        assert!(e.entries.iter().all(|&(_, b)| b < 1e-5));
        for &q in &[0.5, 2.0, -3.0] {
            let p = energy_density_profile(q, &log_grid(1e-4, 1e3, 300)).unwrap();
            assert_abs_diff_eq!(p.limit_at_zero, 2.0 * q * q, epsilon = 1e-6 * q * q);
            let max = p.entries.iter().map(|e| e.1).fold(0.0, f64::max);
            assert!(max <= 2.0 * q * q * 1.01);
        }
    }

    #[test]
    fn total_bending_diverges() {
        let mut prev = 0.0;
        let mut increments = vec![];
        for &r_out in &[2.0, 4.0, 8.0, 16.0, 32.0] {
            let total = shell_bending_integral(1.0, 1.0, r_out).unwrap();
            assert!(total > prev);
            increments.push(total - prev);
            prev = total;
        }
        // increments do not shrink: linear growth from the axis region
        assert!(increments.windows(2).skip(1).all(|w| w[1] > 0.9 * w[0]));
    }

    #[test]
    fn interpolated_profile_tracks_closed_form() {
        let shoot = solve_shooting(1.5, 20.0, 3000, 1e-12).unwrap();
        for &r in &[0.002, 0.37, 1.0, 4.2, 19.0] {
            let (v, dv) = shoot.interpolate(r);
            let (vc, dvc) = closed_form(1.5, r);
            assert_abs_diff_eq!(v, vc, epsilon = 1e-9);
            assert_abs_diff_eq!(dv, dvc, epsilon = 1e-6);
        }
    }

    proptest! {
        #[test]
        fn monotone_and_bounded(q in 0.05f64..20.0, r in 1e-6f64..1e4) {
            let (v, dv) = closed_form(q, r);
            prop_assert!(dv > 0.0);
            prop_assert!(v > 0.0 && v < PI);
        }

        #[test]
        fn depends_on_product_qr(q in -10.0f64..10.0, r in 1e-4f64..1e3, lambda in 0.01f64..100.0) {
            let (a, _) = closed_form(q, r);
            let (b, _) = closed_form(lambda * q, r / lambda);
            prop_assert!((a - b).abs() < 1e-12);
        }
    }
}
