//! Data behind the two published plots, and row-wise shape checks that run
//! on the parsed CSV text so the files themselves are what gets verified.

use std::fmt::Write as _;

use crate::constitutive::Model;
use crate::curve::{fmt17, CurveKind, SampledCurve};
use crate::error::{Error, Result};
use crate::report::VerificationReport;

/// 200 points of `sigma / k0` on `[0.005, 1]`.
pub fn figure1_grid() -> Vec<f64> {
    let n = 200;
    (0..n).map(|i| 0.005 + (1.0 - 0.005) * i as f64 / (n - 1) as f64).collect()
}

/// 400 points of `t / tau0` on `[0, 10]`.
pub fn figure2_grid() -> Vec<f64> {
    let n = 400;
    (0..n).map(|i| 10.0 * i as f64 / (n - 1) as f64).collect()
}

/// `(tau / tau0, normalized energy)` against `sigma / k0`.
pub fn figure1(model: &Model, sigma_over_k0: &[f64]) -> Result<(SampledCurve, SampledCurve)> {
    model.params.require_square_integrable()?;
    model.sample_energy_and_tau(sigma_over_k0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Figure2 {
    pub model: Model,
    pub sigma0: f64,
    pub t_over_tau0: Vec<f64>,
    pub ret: Vec<f64>,
    pub fractional: Vec<f64>,
    pub upper: Vec<f64>,
}

pub const FIGURE2_COLUMNS: [&str; 4] = ["t_over_tau0", "sigma_R", "sigma_F", "sigma_ub"];

pub fn figure2(model: &Model, sigma0: f64, t_over_tau0: &[f64]) -> Result<Figure2> {
    let k0 = model.params.k0;
    if !(sigma0 > 0.0 && sigma0 < k0) {
        return Err(Error::Domain(format!(
            "the comparison needs 0 < sigma0 < k0, got sigma0 = {sigma0}, k0 = {k0}"
        )));
    }
    let ret = model.relaxation_curve(CurveKind::RetClosed, t_over_tau0, sigma0)?;
    let frac = model.relaxation_curve(CurveKind::Fractional, t_over_tau0, sigma0)?;
    let upper = model.relaxation_curve(CurveKind::UpperBound, t_over_tau0, sigma0)?;
    Ok(Figure2 {
        model: *model,
        sigma0,
        t_over_tau0: t_over_tau0.to_vec(),
        ret: ret.y,
        fractional: frac.y,
        upper: upper.y,
    })
}

impl Figure2 {
    pub fn to_csv(&self, provenance: &[(String, String)]) -> String {
        let p = &self.model.params;
        let mut out = String::new();
        out.push_str("# kind, alpha, tau0, k0, sigma0\n");
        let _ = writeln!(
            out,
            "# ret_vs_fractional, {}, {}, {}, {}",
            fmt17(p.alpha),
            fmt17(p.tau0),
            fmt17(p.k0),
            fmt17(self.sigma0)
        );
        for (k, v) in provenance {
            let _ = writeln!(out, "# {k} = {v}");
        }
        out.push_str(&FIGURE2_COLUMNS.join(","));
        out.push('\n');
        for i in 0..self.t_over_tau0.len() {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                fmt17(self.t_over_tau0[i]),
                fmt17(self.ret[i]),
                fmt17(self.fractional[i]),
                fmt17(self.upper[i])
            );
        }
        out
    }
}

fn column(rows: &[Vec<f64>], j: usize) -> Vec<f64> {
    rows.iter().map(|r| r.get(j).copied().unwrap_or(f64::NAN)).collect()
}

/// [`check_figure1_shape`] plus the onset condition: the first energy value
/// at most `1e-3` of the last.
pub fn check_figure1(tau_rows: &[Vec<f64>], energy_rows: &[Vec<f64>], alpha: f64, e0_normalized: f64) -> VerificationReport {
    let mut rep = check_figure1_shape(tau_rows, energy_rows, alpha, e0_normalized);
    let onset = energy_onset(energy_rows, alpha);
    if !onset.passed {
        rep.fail(format!(
            "first energy value is {:.3e} of the last, above 1e-3 (small-stress scaling exponent {:.3})",
            onset.worst_violation,
            (2.0 * alpha - 1.0) / alpha
        ));
    }
    rep
}

/// First energy value against the last. Near `sigma = 0` the energy
/// vanishes like `(sigma/k0)^((2a-1)/a)`, so for `alpha < 1` this ratio is
/// far above `1e-3` at `sigma/k0 = 0.005`.
pub fn energy_onset(energy_rows: &[Vec<f64>], alpha: f64) -> VerificationReport {
    let mut rep = VerificationReport::new(format!("figure1_energy_onset(alpha={alpha})"), 1e-3);
    let e = column(energy_rows, 1);
    let (Some(first), Some(last)) = (e.first(), e.last()) else {
        rep.fail("empty energy file");
        return rep.finish();
    };
    let ratio = first / last;
    rep.observe(ratio, column(energy_rows, 0)[0]);
    rep.metric("energy_first_over_last", ratio);
    rep.metric("energy_small_stress_exponent", (2.0 * alpha - 1.0) / alpha);
    rep.finish()
}

/// Shape of the two figure-1 files: `tau` positive and decreasing (equal to
/// 1 at `alpha = 1`), energy increasing up to the normalized `e0`. At
/// `alpha = 1` the energy must equal `(sigma/k0)^2 / 2`.
pub fn check_figure1_shape(tau_rows: &[Vec<f64>], energy_rows: &[Vec<f64>], alpha: f64, e0_normalized: f64) -> VerificationReport {
    let mut rep = VerificationReport::new(format!("figure1_shape(alpha={alpha})"), 1e-10).at("sigma/k0");
    let (s, tau) = (column(tau_rows, 0), column(tau_rows, 1));
    let (se, e) = (column(energy_rows, 0), column(energy_rows, 1));
    if s.len() < 2 || s != se {
        rep.fail("figure-1 files are empty or sampled on different grids");
        return rep.finish();
    }
    let n = s.len();
    if s.windows(2).any(|w| w[1] <= w[0]) {
        rep.fail("sigma/k0 column is not increasing");
    }
    for i in 0..n {
        if alpha == 1.0 {
            rep.observe((tau[i] - 1.0).abs(), s[i]);
            rep.observe((e[i] - 0.5 * s[i] * s[i]).abs() / (0.5 * s[i] * s[i]), s[i]);
        } else {
            let last = i == n - 1 && s[i] == 1.0;
            if last && tau[i] != 0.0 {
                rep.fail(format!("tau/tau0 = {} at sigma = k0, expected 0", tau[i]));
            }
            if !last && !(tau[i] > 0.0) {
                rep.fail(format!("tau/tau0 = {} not positive at sigma/k0 = {}", tau[i], s[i]));
            }
            if i > 0 && tau[i] >= tau[i - 1] {
                rep.fail(format!("tau/tau0 not decreasing at sigma/k0 = {}", s[i]));
            }
        }
        if i > 0 && e[i] <= e[i - 1] {
            rep.fail(format!("energy not increasing at sigma/k0 = {}", s[i]));
        }
    }
    if s[n - 1] == 1.0 {
        rep.observe(((e[n - 1] - e0_normalized) / e0_normalized).abs(), 1.0);
    }
    rep.metric("energy_first_over_last", e[0] / e[n - 1]);
    rep.finish()
}

/// Figure-2 rows: values at `t = 0`, strict ordering
/// `sigma_F < sigma_R < sigma_ub` and strict decrease of all three columns
/// for `t > 0`.
pub fn check_figure2(rows: &[Vec<f64>], sigma0_over_k0: f64) -> VerificationReport {
    let mut rep = VerificationReport::new(format!("figure2_shape(sigma0/k0={sigma0_over_k0})"), 1e-15).at("t/tau0");
    if rows.len() < 2 || rows.iter().any(|r| r.len() != 4) {
        rep.fail("expected at least two rows of four columns");
        return rep.finish();
    }
    let first = &rows[0];
    if first[0] != 0.0 {
        rep.fail("first row is not at t = 0");
    } else {
        rep.observe((first[1] - sigma0_over_k0).abs(), 0.0);
        rep.observe((first[2] - sigma0_over_k0).abs(), 0.0);
        rep.observe((first[3] - 1.0).abs(), 0.0);
    }
    let mut min_lower = f64::INFINITY;
    let mut min_upper = f64::INFINITY;
    for i in 1..rows.len() {
        let (t, r, f, ub) = (rows[i][0], rows[i][1], rows[i][2], rows[i][3]);
        if !(f < r && r < ub) {
            rep.fail(format!("ordering sigma_F < sigma_R < sigma_ub violated at t/tau0 = {t}"));
        }
        min_lower = min_lower.min(r - f);
        min_upper = min_upper.min(ub - r);
        for j in 1..4 {
            if !(rows[i][j] < rows[i - 1][j]) {
                rep.fail(format!("column {} not decreasing at t/tau0 = {t}", FIGURE2_COLUMNS[j]));
            }
        }
    }
    rep.metric("min_ret_minus_fractional", min_lower);
    rep.metric("min_upper_minus_ret", min_upper);
    rep.finish()
}
