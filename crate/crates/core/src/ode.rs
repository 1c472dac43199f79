//! Dormand-Prince 5(4) embedded Runge-Kutta for scalar autonomous-or-not
//! initial value problems, stepping exactly onto requested output times.

use crate::error::{Error, Result};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// Fifth minus fourth order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

#[derive(Debug, Clone, Copy)]
pub struct StepControl {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_steps: usize,
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub values: Vec<f64>,
    pub accepted: usize,
    pub rejected: usize,
}

/// Integrate `y' = f(t, y)` from `(t0, y0)` and return `y` at each time in
/// `outputs` (nondecreasing, all `>= t0`).
pub fn solve<F>(mut f: F, t0: f64, y0: f64, outputs: &[f64], ctl: StepControl) -> Result<Solution>
where
    F: FnMut(f64, f64) -> Result<f64>,
{
    if outputs.windows(2).any(|w| w[1] < w[0]) || outputs.first().is_some_and(|&t| t < t0) {
        return Err(Error::Domain("output times must be nondecreasing and start at or after t0".into()));
    }
    let mut values = Vec::with_capacity(outputs.len());
    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, y)?;
    let t_end = outputs.last().copied().unwrap_or(t0);

    // Initial step from the local scale |y / y'|.
    let mut h = if k1 != 0.0 {
        1e-3 * y.abs().max(ctl.abs_tol) / k1.abs()
    } else {
        0.01 * (t_end - t0).abs()
    };
    h = h.min((t_end - t0).abs()).max(1e-12 * (1.0 + t.abs()));

    let mut accepted = 0;
    let mut rejected = 0;
    for &target in outputs {
        while t < target {
            if accepted + rejected >= ctl.max_steps {
                return Err(Error::NoConvergence(format!(
                    "step budget of {} exhausted at t = {t}",
                    ctl.max_steps
                )));
            }
            let mut step = h.min(target - t);
            let last = step >= target - t;
            if last {
                step = target - t;
            }
            if step < 16.0 * f64::EPSILON * t.abs().max(1e-300) {
                return Err(Error::StepUnderflow { t });
            }
            let k2 = f(t + C2 * step, y + step * A21 * k1)?;
            let k3 = f(t + C3 * step, y + step * (A31 * k1 + A32 * k2))?;
            let k4 = f(t + C4 * step, y + step * (A41 * k1 + A42 * k2 + A43 * k3))?;
            let k5 = f(t + C5 * step, y + step * (A51 * k1 + A52 * k2 + A53 * k3 + A54 * k4))?;
            let k6 = f(
                t + step,
                y + step * (A61 * k1 + A62 * k2 + A63 * k3 + A64 * k4 + A65 * k5),
            )?;
            let y_new = y + step * (B1 * k1 + B3 * k3 + B4 * k4 + B5 * k5 + B6 * k6);
            let t_new = if last { target } else { t + step };
            let k7 = f(t_new, y_new)?;
            let err_abs = (step * (E1 * k1 + E3 * k3 + E4 * k4 + E5 * k5 + E6 * k6 + E7 * k7)).abs();
            let sc = ctl.abs_tol + ctl.rel_tol * y.abs().max(y_new.abs());
            let err = err_abs / sc;
            let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            if err <= 1.0 {
                t = t_new;
                y = y_new;
                k1 = k7;
                accepted += 1;
                // A step clipped to hit an output must not shrink the
                // controller's running step size.
                if !last || factor < 1.0 {
                    h = step * factor;
                }
            } else {
                rejected += 1;
                h = step * factor.min(1.0);
            }
        }
        values.push(y);
    }
    Ok(Solution { values, accepted, rejected })
}
