//! Relaxation experiment at constant strain: the fractional Maxwell modulus
//! `sigma_F`, the nonlinear modulus `sigma_R` (closed form and ODE), and the
//! checks relating them.

use std::cell::Cell;

use crate::constitutive::Model;
use crate::curve::{CurveKind, SampledCurve};
use crate::error::{Error, Result};
use crate::ode::{self, StepControl};
use crate::report::VerificationReport;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Start time (fraction of tau0) used when `sigma0 = k0`, where the
    /// initial slope is infinite for `alpha < 1`.
    pub t_start_offset: f64,
    pub max_steps: usize,
}

impl Default for OdeConfig {
    fn default() -> Self {
        Self { rel_tol: 1e-10, abs_tol: 1e-14, t_start_offset: 1e-4, max_steps: 200_000 }
    }
}

impl OdeConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0 && self.t_start_offset > 0.0 && self.max_steps > 0) {
            return Err(Error::InvalidConfig("ODE controls must all be positive".into()));
        }
        if self.t_start_offset > 1e-3 {
            return Err(Error::InvalidConfig(format!(
                "t_start_offset must be <= 1e-3, got {}",
                self.t_start_offset
            )));
        }
        Ok(())
    }
}

/// Strictness margin for the two-sided bound, in units of k0.
pub const BOUND_MARGIN: f64 = 1e-12;

/// Relative tolerance of the dissipation identity.
pub const DISSIPATION_TOL: f64 = 1e-4;

impl Model {
    fn check_time(t: f64) -> Result<()> {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(Error::Domain(format!("time must be finite and >= 0, got {t}")));
        }
        Ok(())
    }

    /// `sigma_F(t) = sigma0 E_a(-(t/tau0)^a)`.
    pub fn sigma_fractional(&self, t: f64, sigma0: f64) -> Result<f64> {
        self.params.validate()?;
        Self::check_time(t)?;
        if !(sigma0 > 0.0) {
            return Err(Error::Domain(format!("sigma0 must be positive, got {sigma0}")));
        }
        Ok(sigma0 * self.relax(t / self.params.tau0)?)
    }

    /// Offset `c >= 0` with `E_a(-(c/tau0)^a) = sigma0 / k0`.
    pub fn offset_c(&self, sigma0: f64) -> Result<f64> {
        self.s_of_sigma(sigma0)
    }

    /// `sigma_R(t) = k0 E_a(-((t + c)/tau0)^a)`.
    pub fn sigma_ret_closed(&self, t: f64, sigma0: f64) -> Result<f64> {
        Self::check_time(t)?;
        let c = self.offset_c(sigma0)?;
        self.sigma_ret_shifted(t, c)
    }

    pub(crate) fn sigma_ret_shifted(&self, t: f64, c: f64) -> Result<f64> {
        if t == 0.0 && c == 0.0 {
            return Ok(self.params.k0);
        }
        Ok(self.params.k0 * self.relax((t + c) / self.params.tau0)?)
    }

    /// Closed-form curve of the given kind on `t / tau0` grid points.
    pub fn relaxation_curve(&self, kind: CurveKind, t_over_tau0: &[f64], sigma0: f64) -> Result<SampledCurve> {
        let tau0 = self.params.tau0;
        let k0 = self.params.k0;
        let y: Vec<f64> = match kind {
            CurveKind::Fractional => t_over_tau0
                .iter()
                .map(|&t| Ok(self.sigma_fractional(t * tau0, sigma0)? / k0))
                .collect::<Result<_>>()?,
            CurveKind::UpperBound => t_over_tau0
                .iter()
                .map(|&t| Ok(self.sigma_fractional(t * tau0, sigma0)? / sigma0))
                .collect::<Result<_>>()?,
            CurveKind::RetClosed => {
                let c = self.offset_c(sigma0)?;
                t_over_tau0
                    .iter()
                    .map(|&t| {
                        Self::check_time(t)?;
                        Ok(self.sigma_ret_shifted(t * tau0, c)? / k0)
                    })
                    .collect::<Result<_>>()?
            }
            CurveKind::RetOde => return self.sigma_ret_ode(t_over_tau0, sigma0, &OdeConfig::default()),
        };
        Ok(SampledCurve::relaxation(kind, self.params, sigma0, t_over_tau0.to_vec(), y))
    }

    /// Integrate `dsigma/dt = -sigma / tau(eps0, sigma)` with `tau` from the
    /// constitutive law, inverting `sigma -> s` inside every right-hand-side
    /// evaluation so the result does not lean on the shifted closed form.
    pub fn sigma_ret_ode(&self, t_over_tau0: &[f64], sigma0: f64, cfg: &OdeConfig) -> Result<SampledCurve> {
        cfg.validate()?;
        self.params.validate()?;
        if t_over_tau0.first() != Some(&0.0) || t_over_tau0.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Domain("time grid must start at 0 and increase strictly".into()));
        }
        let k0 = self.params.k0;
        let tau0 = self.params.tau0;
        // Validates the range of sigma0 as a side effect.
        let c = self.offset_c(sigma0)?;

        let singular_start = c == 0.0 && self.params.alpha < 1.0;
        let (t_start, y_start) = if singular_start {
            (cfg.t_start_offset, self.relax(cfg.t_start_offset)?)
        } else {
            (0.0, sigma0 / k0)
        };

        let mut out = Vec::with_capacity(t_over_tau0.len());
        let mut outputs = Vec::new();
        for &t in t_over_tau0 {
            if t < t_start {
                // Closed form covers [0, t_start_offset).
                out.push(self.sigma_ret_shifted(t * tau0, c)? / k0);
            } else {
                outputs.push(t);
            }
        }

        let floor = self.inversion.sigma_floor;
        let hint = Cell::new(None::<f64>);
        // Normalized variables: y = sigma / k0, time in units of tau0.
        let rhs = |_t: f64, y: f64| -> Result<f64> {
            if !(y > floor && y < 1.0 + cfg.abs_tol) {
                return Err(Error::Domain(format!("stress left (0, k0]: sigma/k0 = {y}")));
            }
            if y >= 1.0 && self.params.alpha < 1.0 {
                return Err(Error::Singular("infinite slope at sigma = k0".into()));
            }
            let s = self.s_of_sigma_near(y * k0, hint.get())?;
            hint.set(Some(s));
            let tau = self.relaxation_time(s)?;
            Ok(-y * tau0 / tau)
        };
        let ctl = StepControl { rel_tol: cfg.rel_tol, abs_tol: cfg.abs_tol, max_steps: cfg.max_steps };
        let sol = ode::solve(rhs, t_start, y_start, &outputs, ctl)?;
        out.extend(sol.values);
        Ok(SampledCurve::relaxation(CurveKind::RetOde, self.params, sigma0, t_over_tau0.to_vec(), out))
    }

    /// Two-sided bound `sigma_F < sigma_R < (k0/sigma0) sigma_F` on `t > 0`
    /// with margin [`BOUND_MARGIN`] `k0`, plus monotone growth of
    /// `sigma_R / sigma_F` toward `k0 / sigma0`.
    ///
    /// At `alpha = 1` the curves coincide exactly; the lower bound is then
    /// checked as an equality and the ratio as constant.
    pub fn verify_theorem2_bounds(&self, sigma0: f64, t_over_tau0: &[f64]) -> VerificationReport {
        let k0 = self.params.k0;
        let alpha = self.params.alpha;
        let margin = BOUND_MARGIN * k0;
        let name = format!("relaxation_bounds(alpha={alpha}, sigma0/k0={})", sigma0 / k0);
        let mut rep = VerificationReport::new(name, 0.0).at("t/tau0");
        rep.metric("strictness_margin", margin);
        if !(sigma0 > 0.0 && sigma0 < k0) {
            rep.fail(format!("requires 0 < sigma0 < k0, got sigma0 = {sigma0}"));
            return rep.finish();
        }
        if let Some(&t) = t_over_tau0.iter().find(|&&t| !(t > 0.0)) {
            rep.fail(format!("grid must be strictly positive, found t/tau0 = {t}"));
            return rep.finish();
        }
        let c = match self.offset_c(sigma0) {
            Ok(c) => c,
            Err(e) => {
                rep.fail(format!("offset c: {e}"));
                return rep.finish();
            }
        };
        rep.metric("c_over_tau0", c / self.params.tau0);
        let boundary = alpha == 1.0;
        if boundary {
            rep.note("alpha = 1 is the boundary case: sigma_R = sigma_F exactly, so the strict lower bound degenerates to equality");
        }
        let mut min_lower = f64::INFINITY;
        let mut min_upper = f64::INFINITY;
        let mut prev_ratio: Option<f64> = None;
        let mut last_ratio = f64::NAN;
        for &tb in t_over_tau0 {
            let t = tb * self.params.tau0;
            let vals = self.sigma_fractional(t, sigma0).and_then(|f| Ok((f, self.sigma_ret_shifted(t, c)?)));
            let (f, r) = match vals {
                Ok(v) => v,
                Err(e) => {
                    rep.fail(format!("evaluation failed at t/tau0 = {tb}: {e}"));
                    return rep.finish();
                }
            };
            let upper = k0 / sigma0 * f;
            let lower_gap = r - f;
            let upper_gap = upper - r;
            min_upper = min_upper.min(upper_gap);
            rep.observe((margin - upper_gap).max(0.0), tb);
            if boundary {
                min_lower = min_lower.min(-(lower_gap.abs()));
                rep.observe((lower_gap.abs() - margin).max(0.0), tb);
            } else {
                min_lower = min_lower.min(lower_gap);
                rep.observe((margin - lower_gap).max(0.0), tb);
            }
            let ratio = r / f;
            if let Some(p) = prev_ratio {
                let drop = if boundary { (ratio - p).abs() - 1e-12 } else { p - ratio };
                rep.observe(drop.max(0.0), tb);
            }
            prev_ratio = Some(ratio);
            last_ratio = ratio;
        }
        rep.metric("min_lower_gap", min_lower);
        rep.metric("min_upper_gap", min_upper);
        rep.metric("ratio_at_last", last_ratio);
        rep.metric("ratio_limit", k0 / sigma0);
        rep.finish()
    }

    /// Along a relaxation curve, the finite-difference rate of the viscous
    /// energy must equal `-sigma^2 / (rho* mu0)` (relative tolerance
    /// [`DISSIPATION_TOL`]) on interior nodes, and the energy must never
    /// increase.
    ///
    /// Uses 5-point nonuniform stencils, so the two nodes at each end are
    /// not checked.
    pub fn dissipation_check(&self, curve: &SampledCurve) -> VerificationReport {
        let name = format!(
            "dissipation(alpha={}, sigma0/k0={}, {})",
            self.params.alpha,
            curve.sigma0.unwrap_or(f64::NAN) / self.params.k0,
            curve.kind().map(|k| k.name()).unwrap_or("?")
        );
        let mut rep = VerificationReport::new(name, DISSIPATION_TOL).at("t/tau0");
        match self.dissipation_inner(curve, &mut rep) {
            Ok(()) => rep.finish(),
            Err(e) => {
                rep.fail(e.to_string());
                rep.finish()
            }
        }
    }

    fn dissipation_inner(&self, curve: &SampledCurve, rep: &mut VerificationReport) -> Result<()> {
        if curve.kind().is_none() {
            return Err(Error::Mismatch("dissipation check needs a relaxation curve".into()));
        }
        if curve.len() < 5 {
            return Err(Error::Mismatch("dissipation check needs at least 5 samples".into()));
        }
        let law = self.viscous_energy_law()?;
        let k0 = self.params.k0;
        let tau0 = self.params.tau0;
        let sigmas: Vec<f64> = curve.y.iter().map(|y| y * k0).collect();
        let ebar = law.normalized_at_sigmas(&sigmas)?;
        let scale = self.params.energy_scale();
        let e: Vec<f64> = ebar.iter().map(|v| v * scale).collect();
        let t: Vec<f64> = curve.x.iter().map(|x| x * tau0).collect();
        let rho_mu = self.params.rho_mu();

        let mut worst_sign = 0.0f64;
        for i in 1..e.len() {
            // Energy must not increase along the trajectory.
            let rise = e[i] - e[i - 1];
            if rise > 0.0 {
                worst_sign = worst_sign.max(rise);
            }
        }
        let mut max_rel = 0.0f64;
        let mut max_production = f64::NEG_INFINITY;
        for i in 2..e.len() - 2 {
            let w = fd_weights(t[i], &t[i - 2..=i + 2]);
            let rate: f64 = w.iter().zip(&e[i - 2..=i + 2]).map(|(w, e)| w * e).sum();
            let production = -sigmas[i] * sigmas[i] / rho_mu;
            max_production = max_production.max(production);
            let rel = ((rate - production) / production).abs();
            max_rel = max_rel.max(rel);
            rep.observe(rel, curve.x[i]);
            if rate > 0.0 {
                worst_sign = worst_sign.max(rate);
            }
        }
        rep.metric("max_relative_deviation", max_rel);
        rep.metric("max_production", max_production);
        rep.metric("energy_increase", worst_sign);
        if worst_sign > 0.0 || max_production > 0.0 {
            rep.fail("viscous energy increased along the trajectory");
        }
        Ok(())
    }
}

/// First-derivative finite-difference weights at `x0` for arbitrary nodes
/// (Fornberg's recursion).
pub fn fd_weights(x0: f64, nodes: &[f64]) -> Vec<f64> {
    let n = nodes.len();
    // c[j][k]: weight of node j for derivative order k (k = 0, 1)
    let mut c = vec![[0.0f64; 2]; n];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = nodes[0] - x0;
    for i in 1..n {
        let mn = i.min(1);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i] - x0;
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.iter().map(|w| w[1]).collect()
}
