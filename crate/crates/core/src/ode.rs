//! Explicit Runge–Kutta integrators for small fixed-size systems.

use crate::error::{Error, Result};

pub type State<const N: usize> = [f64; N];

fn axpy<const N: usize>(y: &State<N>, h: f64, terms: &[(f64, &State<N>)]) -> State<N> {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..N {
            out[i] += h * c * k[i];
        }
    }
    out
}

/// One classical fourth-order Runge–Kutta step.
pub fn rk4_step<const N: usize, F>(f: &F, t: f64, y: &State<N>, h: f64) -> Result<State<N>>
where
    F: Fn(f64, &State<N>) -> Result<State<N>>,
{
    let k1 = f(t, y)?;
    let k2 = f(t + 0.5 * h, &axpy(y, h, &[(0.5, &k1)]))?;
    let k3 = f(t + 0.5 * h, &axpy(y, h, &[(0.5, &k2)]))?;
    let k4 = f(t + h, &axpy(y, h, &[(1.0, &k3)]))?;
    Ok(axpy(
        y,
        h,
        &[(1.0 / 6.0, &k1), (1.0 / 3.0, &k2), (1.0 / 3.0, &k3), (1.0 / 6.0, &k4)],
    ))
}

/// Tolerances and budget for [`Dopri5`].
#[derive(Clone, Copy, Debug)]
pub struct Dopri5 {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for Dopri5 {
    fn default() -> Self {
        Dopri5 {
            rtol: 1e-12,
            atol: 1e-14,
            max_steps: 200_000,
        }
    }
}

/// Statistics of an adaptive integration.
#[derive(Clone, Copy, Debug, Default)]
pub struct Stats {
    pub accepted: usize,
    pub rejected: usize,
}

impl Dopri5 {
    /// Integrate from `t0` through each output time in `outputs` (ascending),
    /// landing exactly on each. Returns the state at every output time.
    pub fn integrate<const N: usize, F>(
        &self,
        f: &F,
        t0: f64,
        y0: State<N>,
        outputs: &[f64],
    ) -> Result<(Vec<State<N>>, Stats)>
    where
        F: Fn(f64, &State<N>) -> State<N>,
    {
        let mut t = t0;
        let mut y = y0;
        let mut h = outputs
            .first()
            .map(|&t1| ((t1 - t0).abs() * 1e-3).max(1e-6))
            .unwrap_or(1e-3);
        let mut stats = Stats::default();
        let mut out = Vec::with_capacity(outputs.len());
        let mut k1 = f(t, &y);
        for &target in outputs {
            if target < t {
                return Err(Error::InvalidArgument("output times must be ascending".into()));
            }
            while t < target {
                if stats.accepted + stats.rejected >= self.max_steps {
                    return Err(Error::NoConvergence {
                        reason: format!("step budget of {} exhausted at t = {t}", self.max_steps),
                        max_residual: f64::NAN,
                    });
                }
                let last = t + h >= target;
                let step = if last { target - t } else { h };
                let (y_new, k_last, err) = self.trial(f, t, &y, &k1, step);
                if err <= 1.0 {
                    stats.accepted += 1;
                    t = if last { target } else { t + step };
                    y = y_new;
                    k1 = k_last;
                    let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                    // a step shortened to hit an output time does not grow h
                    if !last || step * factor < h {
                        h = step * factor;
                    }
                } else {
                    stats.rejected += 1;
                    h = step * (0.9 * err.powf(-0.2)).clamp(0.1, 0.9);
                }
                if !y.iter().all(|v| v.is_finite()) {
                    return Err(Error::NonFinite(format!("ODE state at t = {t}")));
                }
            }
            out.push(y);
        }
        Ok((out, stats))
    }

    /// Dormand–Prince 5(4) trial step; returns the fifth-order solution,
    /// its derivative (FSAL) and the scaled error norm.
    fn trial<const N: usize, F>(&self, f: &F, t: f64, y: &State<N>, k1: &State<N>, h: f64) -> (State<N>, State<N>, f64)
    where
        F: Fn(f64, &State<N>) -> State<N>,
    {
        let k2 = f(t + h / 5.0, &axpy(y, h, &[(1.0 / 5.0, k1)]));
        let k3 = f(t + 3.0 * h / 10.0, &axpy(y, h, &[(3.0 / 40.0, k1), (9.0 / 40.0, &k2)]));
        let k4 = f(
            t + 4.0 * h / 5.0,
            &axpy(y, h, &[(44.0 / 45.0, k1), (-56.0 / 15.0, &k2), (32.0 / 9.0, &k3)]),
        );
        let k5 = f(
            t + 8.0 * h / 9.0,
            &axpy(
                y,
                h,
                &[
                    (19372.0 / 6561.0, k1),
                    (-25360.0 / 2187.0, &k2),
                    (64448.0 / 6561.0, &k3),
                    (-212.0 / 729.0, &k4),
                ],
            ),
        );
        let k6 = f(
            t + h,
            &axpy(
                y,
                h,
                &[
                    (9017.0 / 3168.0, k1),
                    (-355.0 / 33.0, &k2),
                    (46732.0 / 5247.0, &k3),
                    (49.0 / 176.0, &k4),
                    (-5103.0 / 18656.0, &k5),
                ],
            ),
        );
        let y5 = axpy(
            y,
            h,
            &[
                (35.0 / 384.0, k1),
                (500.0 / 1113.0, &k3),
                (125.0 / 192.0, &k4),
                (-2187.0 / 6784.0, &k5),
                (11.0 / 84.0, &k6),
            ],
        );
        let k7 = f(t + h, &y5);
        // difference between fifth- and fourth-order weights
        let e = [
            71.0 / 57600.0,
            0.0,
            -71.0 / 16695.0,
            71.0 / 1920.0,
            -17253.0 / 339200.0,
            22.0 / 525.0,
            -1.0 / 40.0,
        ];
        let ks = [k1, &k2, &k3, &k4, &k5, &k6, &k7];
        let mut norm = 0.0_f64;
        for i in 0..N {
            let err_i: f64 = h * (0..7).map(|j| e[j] * ks[j][i]).sum::<f64>();
            let scale = self.atol + self.rtol * y[i].abs().max(y5[i].abs());
            norm = norm.max((err_i / scale).abs());
        }
        (y5, k7, norm)
    }
}
