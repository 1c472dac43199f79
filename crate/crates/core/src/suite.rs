//! The verification matrix run by `retvisco verify`: every check over a
//! grid of orders `alpha` and initial stresses `sigma0 / k0`.

use rayon::prelude::*;

use crate::constitutive::{MaterialParams, Model};
use crate::curve::CurveKind;
use crate::error::Error;
use crate::fractional::{residual_fractional, CaputoMesh};
use crate::mittag_leffler::{ml_relax, ml_relax_deriv};
use crate::relaxation::OdeConfig;
use crate::report::VerificationReport;

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    /// Material constants and numerical controls; `alpha` is overridden by
    /// each matrix row.
    pub model: Model,
    pub ode: OdeConfig,
    pub alphas: Vec<f64>,
    pub sigma0_ratios: Vec<f64>,
    /// Points of the bound-check grid on `(0, bounds_t_max]`.
    pub bounds_points: usize,
    pub bounds_t_max: f64,
    pub residual_nodes: usize,
    pub residual_grading: f64,
    pub residual_t_end: f64,
    pub residual_tol: f64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            model: Model::default(),
            ode: OdeConfig::default(),
            alphas: vec![0.5, 0.6, 0.75, 0.9, 1.0],
            sigma0_ratios: vec![0.25, 0.5, 0.9, 1.0],
            bounds_points: 400,
            bounds_t_max: 10.0,
            residual_nodes: 2000,
            residual_grading: 2.0,
            residual_t_end: 10.0,
            residual_tol: 1e-2,
        }
    }
}

/// Relative change allowed in `e0` when the tail start doubles.
pub const TAIL_STABILITY_TOL: f64 = 1e-6;

/// `n` points geometrically spaced on `[lo, hi]`.
pub fn geometric_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let r = (hi / lo).ln() / (n - 1) as f64;
    (0..n).map(|i| if i == n - 1 { hi } else { lo * (r * i as f64).exp() }).collect()
}

/// `n` points uniformly spaced on `[lo, hi]`.
pub fn uniform_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

pub fn run_suite(cfg: &SuiteConfig) -> Vec<VerificationReport> {
    cfg.alphas.par_iter().map(|&a| run_row(cfg, a)).flatten().collect()
}

fn run_row(cfg: &SuiteConfig, alpha: f64) -> Vec<VerificationReport> {
    let mut model = cfg.model;
    model.params = MaterialParams { alpha, ..cfg.model.params };
    let mut out = vec![check_ml_shape(&model), boundedness(&model)];
    if alpha <= 0.5 {
        return out;
    }
    out.push(relaxation_time_sign(&model));
    out.push(energy_shape(&model));
    if alpha == 1.0 {
        out.push(maxwell_reduction(&model));
    }
    for &ratio in &cfg.sigma0_ratios {
        let sigma0 = ratio * model.params.k0;
        out.push(ode_agreement(&model, &cfg.ode, sigma0));
        if ratio >= 1.0 {
            out.push(coincidence(&model, sigma0));
        } else {
            let grid = uniform_grid(cfg.bounds_t_max / cfg.bounds_points as f64, cfg.bounds_t_max, cfg.bounds_points);
            out.push(model.verify_theorem2_bounds(sigma0, &grid));
        }
        let t = dissipation_grid();
        match model.relaxation_curve(CurveKind::RetClosed, &t, sigma0) {
            Ok(curve) => out.push(model.dissipation_check(&curve)),
            Err(e) => out.push(failed(format!("dissipation(alpha={alpha}, sigma0/k0={ratio})"), e)),
        }
    }
    if alpha < 1.0 {
        out.extend(fractional_residuals(&model, cfg));
    }
    out
}

/// Dissipation is checked on a geometric time grid below `t = tau0`, so
/// that the 5-point stencils resolve the `t^(alpha-1)` slope near the
/// origin, and a uniform one above it.
pub fn dissipation_grid() -> Vec<f64> {
    let mut t = geometric_grid(1e-3, 1.0, 100);
    t.pop();
    t.extend(uniform_grid(1.0, 10.0, 200));
    t
}

fn failed(name: String, e: Error) -> VerificationReport {
    let mut r = VerificationReport::new(name, 0.0);
    r.fail(e.to_string());
    r.finish()
}

/// Positivity, monotonicity and alternating differences of
/// `E_alpha(-x^alpha)` on a log grid, and the derivative against
/// central differences.
fn check_ml_shape(model: &Model) -> VerificationReport {
    let alpha = model.params.alpha;
    let mut rep = VerificationReport::new(format!("mittag_leffler_shape(alpha={alpha})"), 1e-6).at("x");
    // exp(-x) underflows past x ~ 745.
    let hi = if alpha == 1.0 { 500.0 } else { 1e4 };
    let xs = geometric_grid(1e-4, hi, 161);
    let vals: Result<Vec<f64>, _> = xs.iter().map(|&x| ml_relax(alpha, x, &model.ml)).collect();
    let vals = match vals {
        Ok(v) => v,
        Err(e) => return failed(rep.name, e),
    };
    for i in 0..vals.len() {
        if !(vals[i] > 0.0 && vals[i] <= 1.0) {
            rep.fail(format!("value {} outside (0, 1] at x = {}", vals[i], xs[i]));
        }
        if i > 0 && vals[i] >= vals[i - 1] {
            rep.fail(format!("not strictly decreasing at x = {}", xs[i]));
        }
    }
    // Derivative consistency on [0.1, 10].
    for &x in &geometric_grid(0.1, 10.0, 25) {
        let h = 1e-5 * x;
        let fd = match (ml_relax(alpha, x + h, &model.ml), ml_relax(alpha, x - h, &model.ml)) {
            (Ok(a), Ok(b)) => (a - b) / (2.0 * h),
            _ => f64::NAN,
        };
        let d = ml_relax_deriv(alpha, x, &model.ml).unwrap_or(f64::NAN);
        rep.observe(((fd - d) / d).abs(), x);
    }
    rep.finish()
}

fn boundedness(model: &Model) -> VerificationReport {
    let alpha = model.params.alpha;
    let mut rep = VerificationReport::new(format!("boundedness(alpha={alpha})"), TAIL_STABILITY_TOL);
    let res = model.viscous_energy_law();
    if alpha <= 0.5 {
        match res {
            Err(Error::NonIntegrable { .. }) => rep.note("expected non-integrability error raised (negative case)"),
            Err(e) => rep.fail(format!("expected non-integrability error, got {e}")),
            Ok(_) => rep.fail("e0 computed for a non-square-integrable order"),
        }
        return rep.finish();
    }
    let law = match res {
        Ok(l) => l,
        Err(e) => return failed(rep.name, e),
    };
    let mut doubled = *model;
    doubled.quad.tail_start *= 2.0;
    match doubled.viscous_energy_law() {
        Ok(l2) => {
            let change = ((l2.e0() - law.e0()) / law.e0()).abs();
            rep.observe(change, doubled.quad.tail_start);
            rep.metric("e0", law.e0());
            rep.metric("e0_normalized", law.normalized_e0());
            rep.metric("tail_doubling_change", change);
        }
        Err(e) => rep.fail(e.to_string()),
    }
    rep.finish()
}

/// `tau > 0` on the open stress range (the convexity condition), zero at
/// `k0` for `alpha < 1`, decreasing in `sigma`.
fn relaxation_time_sign(model: &Model) -> VerificationReport {
    let alpha = model.params.alpha;
    let k0 = model.params.k0;
    let mut rep = VerificationReport::new(format!("relaxation_time_positive(alpha={alpha})"), 0.0).at("sigma/k0");
    let floor = model.inversion.sigma_floor;
    let mut grid = geometric_grid(2.0 * floor, 0.999, 60);
    grid.push(1.0);
    let mut prev = f64::INFINITY;
    for &r in &grid {
        match model.relaxation_time_of_sigma(r * k0) {
            Ok(t) => {
                let tau = t.tau;
                if r < 1.0 && !(tau > 0.0) {
                    rep.fail(format!("tau = {tau} not positive at sigma/k0 = {r}"));
                }
                if alpha < 1.0 && tau >= prev {
                    rep.fail(format!("tau not decreasing at sigma/k0 = {r}"));
                }
                if alpha == 1.0 && ((tau - model.params.tau0) / model.params.tau0).abs() > 1e-10 {
                    rep.fail(format!("tau = {tau} differs from tau0 at alpha = 1"));
                }
                prev = tau;
                if r == 1.0 {
                    rep.metric("tau_at_k0", tau);
                    if alpha < 1.0 && tau != 0.0 {
                        rep.fail("tau does not vanish at sigma = k0");
                    }
                }
            }
            Err(e) => rep.fail(format!("sigma/k0 = {r}: {e}")),
        }
    }
    rep.finish()
}

fn energy_shape(model: &Model) -> VerificationReport {
    let alpha = model.params.alpha;
    let mut rep = VerificationReport::new(format!("energy_curve_shape(alpha={alpha})"), 1e-10).at("sigma/k0");
    let grid = uniform_grid(0.005, 1.0, 200);
    let (_, e) = match model.sample_energy_and_tau(&grid) {
        Ok(c) => c,
        Err(err) => return failed(rep.name, err),
    };
    for i in 1..e.y.len() {
        if e.y[i] <= e.y[i - 1] {
            rep.fail(format!("energy not increasing at sigma/k0 = {}", grid[i]));
        }
    }
    if e.y.iter().any(|v| !(*v >= 0.0)) {
        rep.fail("negative energy");
    }
    match model.viscous_energy_law() {
        Ok(law) => {
            let end = e.y[e.y.len() - 1];
            let dev = ((end - law.normalized_e0()) / law.normalized_e0()).abs();
            rep.observe(dev, 1.0);
            rep.metric("ebar_at_k0", end);
            rep.metric("ebar_first_over_last", e.y[0] / end);
        }
        Err(err) => rep.fail(err.to_string()),
    }
    rep.finish()
}

fn maxwell_reduction(model: &Model) -> VerificationReport {
    let mut rep = VerificationReport::new("maxwell_reduction(alpha=1)", 1e-8).at("sigma/k0");
    let p = model.params;
    let law = match model.viscous_energy_law() {
        Ok(l) => l,
        Err(e) => return failed(rep.name, e),
    };
    let e0_exact = p.tau0 * p.k0 * p.k0 / (2.0 * p.rho_mu());
    rep.observe(((law.e0() - e0_exact) / e0_exact).abs(), 1.0);
    for r in uniform_grid(0.01, 1.0, 100) {
        let sigma = r * p.k0;
        let exact = p.tau0 * sigma * sigma / (2.0 * p.rho_mu());
        match law.at_sigma(sigma) {
            Ok(v) => rep.observe(((v - exact) / exact).abs(), r),
            Err(e) => rep.fail(e.to_string()),
        }
    }
    rep.finish()
}

fn ode_agreement(model: &Model, ode: &OdeConfig, sigma0: f64) -> VerificationReport {
    let alpha = model.params.alpha;
    let tol = (10.0 * ode.rel_tol).max(1e-6);
    let ratio = sigma0 / model.params.k0;
    let mut rep = VerificationReport::new(format!("ode_vs_closed(alpha={alpha}, sigma0/k0={ratio})"), tol).at("t/tau0");
    let mut grid = vec![0.0];
    grid.extend(geometric_grid(ode.t_start_offset, 10.0, 200));
    let (ode_curve, closed) = match (
        model.sigma_ret_ode(&grid, sigma0, ode),
        model.relaxation_curve(CurveKind::RetClosed, &grid, sigma0),
    ) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => return failed(rep.name, e),
    };
    for i in 0..grid.len() {
        let dev = ((ode_curve.y[i] - closed.y[i]) / closed.y[i]).abs();
        rep.observe(dev, grid[i]);
        if i > 0 && ode_curve.y[i] >= ode_curve.y[i - 1] {
            rep.fail(format!("ODE solution not decreasing at t/tau0 = {}", grid[i]));
        }
    }
    rep.finish()
}

/// `sigma_R = sigma_F` exactly when `sigma0 = k0`.
fn coincidence(model: &Model, sigma0: f64) -> VerificationReport {
    let alpha = model.params.alpha;
    let mut rep = VerificationReport::new(format!("coincidence(alpha={alpha}, sigma0=k0)"), 1e-12).at("t/tau0");
    let grid = uniform_grid(0.0, 100.0, 401);
    let (f, r) = match (
        model.relaxation_curve(CurveKind::Fractional, &grid, sigma0),
        model.relaxation_curve(CurveKind::RetClosed, &grid, sigma0),
    ) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => return failed(rep.name, e),
    };
    for i in 0..grid.len() {
        rep.observe(((f.y[i] - r.y[i]) / f.y[i]).abs(), grid[i]);
    }
    rep.finish()
}

fn fractional_residuals(model: &Model, cfg: &SuiteConfig) -> Vec<VerificationReport> {
    let alpha = model.params.alpha;
    let mesh = match CaputoMesh::graded(cfg.residual_t_end, cfg.residual_nodes, cfg.residual_grading) {
        Ok(m) => m,
        Err(e) => return vec![failed(format!("fractional_residual(alpha={alpha})"), e)],
    };
    let k0 = model.params.k0;
    let f = model
        .relaxation_curve(CurveKind::Fractional, &mesh.nodes, k0)
        .and_then(|c| residual_fractional(&c, &model.params, &mesh, cfg.residual_tol));
    let f = match f {
        Ok(r) => r,
        Err(e) => return vec![failed(format!("fractional_residual(alpha={alpha})"), e)],
    };
    // sigma_R with sigma0 = k0/2 must not satisfy the fractional equation.
    let mut sep = VerificationReport::new(format!("ret_not_fractional(alpha={alpha}, sigma0/k0=0.5)"), 0.0);
    let r = model
        .relaxation_curve(CurveKind::RetClosed, &mesh.nodes, 0.5 * k0)
        .and_then(|c| residual_fractional(&c, &model.params, &mesh, cfg.residual_tol));
    match r {
        Ok(rr) => {
            let res_f = f.worst_violation;
            let lower = rr.worst_violation - res_f;
            sep.metric("ret_residual", rr.worst_violation);
            sep.metric("fractional_residual", res_f);
            sep.metric("lower_bound", lower);
            if !(lower > 10.0 * res_f) {
                sep.fail(format!("residual lower bound {lower:.3e} not above 10x {res_f:.3e}"));
            }
        }
        Err(e) => sep.fail(e.to_string()),
    }
    vec![f, sep.finish()]
}
