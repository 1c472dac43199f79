//! Viscous-energy constitutive law in parametric form
//!
//! ```text
//! e(s)     = e0 - k0^2/(rho* mu0) int_0^s E_a(-(r/tau0)^a)^2 dr
//! sigma(s) = k0 E_a(-(s/tau0)^a),    s >= 0
//! ```
//!
//! together with the nonlinear relaxation time
//! `tau = rho* mu0 e_sigma / sigma = tau0 E_a(-x^a) / (x^(a-1) E_{a,a}(-x^a))`,
//! `x = s / tau0`, and the inversion `sigma -> s`.
//!
//! Energies are evaluated in the equivalent tail form
//! `e(s) = k0^2 tau0/(rho* mu0) int_{s/tau0}^inf E_a(-u^a)^2 du`, which keeps
//! full relative accuracy as `sigma -> 0` where `e0 - head` would cancel.
//! Past `tail_start` the integrand is replaced by the square of the
//! algebraic large-argument expansion, integrated term by term.

use rayon::prelude::*;

use crate::curve::{Quantity, SampledCurve};
use crate::error::{Error, Result};
use crate::mittag_leffler::{ml_relax, ml_relax_deriv, MLConfig};
use crate::quadrature;
use crate::roots;
use crate::special::rgamma;

/// Physical and model constants of one relaxation experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaterialParams {
    pub alpha: f64,
    pub tau0: f64,
    pub k0: f64,
    pub rho_star: f64,
    /// Viscous coefficient at the held strain, `mu(eps0)`.
    pub mu0: f64,
    /// Held strain; only carried for labeling.
    pub eps0: f64,
}

impl Default for MaterialParams {
    fn default() -> Self {
        Self { alpha: 0.6, tau0: 1.0, k0: 1.0, rho_star: 1.0, mu0: 1.0, eps0: 0.0 }
    }
}

impl MaterialParams {
    pub fn with_alpha(alpha: f64) -> Self {
        Self { alpha, ..Self::default() }
    }

    pub fn rho_mu(&self) -> f64 {
        self.rho_star * self.mu0
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("tau0", self.tau0), ("k0", self.k0), ("rho_star", self.rho_star), ("mu0", self.mu0)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidConfig(format!("{name} must be positive and finite, got {v}")));
            }
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::InvalidConfig(format!("alpha must lie in (0, 1], got {}", self.alpha)));
        }
        Ok(())
    }

    /// Energy operations need `E_alpha(-x^alpha)` in `L^2(0, inf)`.
    pub fn require_square_integrable(&self) -> Result<()> {
        self.validate()?;
        if self.alpha <= 0.5 {
            return Err(Error::NonIntegrable { alpha: self.alpha });
        }
        Ok(())
    }

    /// `k0^2 tau0 / (rho* mu0)`: converts normalized energies to physical ones.
    pub fn energy_scale(&self) -> f64 {
        self.k0 * self.k0 * self.tau0 / self.rho_mu()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Multiple of tau0 past which the analytic tail is used.
    pub tail_start: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self { rel_tol: 1e-12, abs_tol: 1e-15, tail_start: 1000.0, max_subdivisions: 2000 }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(Error::InvalidConfig("quadrature tolerances must be positive".into()));
        }
        if !(self.tail_start >= 10.0 && self.tail_start.is_finite()) {
            return Err(Error::InvalidConfig(format!("tail_start must be >= 10, got {}", self.tail_start)));
        }
        if self.max_subdivisions < 100 {
            return Err(Error::InvalidConfig(format!(
                "max_subdivisions must be >= 100, got {}",
                self.max_subdivisions
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InversionConfig {
    /// Smallest admissible `sigma / k0`.
    pub sigma_floor: f64,
    /// Residual tolerance `|sigma(s) - sigma| <= tol k0`.
    pub tol: f64,
}

impl Default for InversionConfig {
    fn default() -> Self {
        Self { sigma_floor: 1e-6, tol: 1e-12 }
    }
}

/// Relaxation time at a stress, flagged when the stress is close enough to
/// the inversion floor that the value reflects the divergence at zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelaxationTime {
    pub tau: f64,
    pub near_divergence: bool,
}

/// Stresses below this multiple of the floor get `near_divergence`.
const DIVERGENCE_FLAG_FACTOR: f64 = 10.0;

/// The constitutive model: material constants plus numerical controls.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Model {
    pub params: MaterialParams,
    pub ml: MLConfig,
    pub quad: QuadratureConfig,
    pub inversion: InversionConfig,
}

impl Model {
    pub fn new(params: MaterialParams) -> Self {
        Self { params, ..Self::default() }
    }

    pub fn alpha(&self) -> f64 {
        self.params.alpha
    }

    /// `E_alpha(-x^alpha)` at normalized parameter `x = s / tau0`.
    pub(crate) fn relax(&self, x: f64) -> Result<f64> {
        ml_relax(self.params.alpha, x, &self.ml)
    }

    pub fn sigma_of_s(&self, s: f64) -> Result<f64> {
        self.params.validate()?;
        if !(s >= 0.0) {
            return Err(Error::Domain(format!("parameter s must be >= 0, got {s}")));
        }
        Ok(self.params.k0 * self.relax(s / self.params.tau0)?)
    }

    fn check_inversion_range(&self, sigma: f64) -> Result<()> {
        let k0 = self.params.k0;
        let lower = self.inversion.sigma_floor * k0;
        let upper = k0 * (1.0 + self.inversion.tol);
        if !(sigma > lower && sigma <= upper) {
            return Err(Error::OutOfRange { sigma, lower, upper: k0 });
        }
        Ok(())
    }

    /// Inverse of [`Model::sigma_of_s`] on `(sigma_floor k0, k0]`.
    pub fn s_of_sigma(&self, sigma: f64) -> Result<f64> {
        self.s_of_sigma_near(sigma, None)
    }

    /// As [`Model::s_of_sigma`], bracketing around `hint` when given.
    pub fn s_of_sigma_near(&self, sigma: f64, hint: Option<f64>) -> Result<f64> {
        self.params.validate()?;
        self.check_inversion_range(sigma)?;
        let MaterialParams { alpha, tau0, k0, .. } = self.params;
        let r = sigma / k0;
        if r >= 1.0 {
            return Ok(0.0);
        }
        if alpha == 1.0 {
            return Ok(-tau0 * r.ln());
        }
        let start = match hint {
            Some(h) if h > 0.0 && h.is_finite() => h / tau0,
            _ => initial_guess(alpha, r),
        };
        let g = |x: f64| Ok(self.relax(x)? - r);
        let (a, b, fa, fb) = roots::bracket_positive(g, start, 1.5, 200)?;
        let x = roots::brent(g, a, b, fa, fb, 0.0, 200)?;
        let resid = (k0 * self.relax(x)? - sigma).abs();
        if resid > self.inversion.tol * k0 {
            return Err(Error::NoConvergence(format!(
                "inversion residual {resid:.3e} exceeds {:.3e} at sigma = {sigma}",
                self.inversion.tol * k0
            )));
        }
        Ok(x * tau0)
    }

    /// Nonlinear relaxation time `tau(eps0, sigma(s))`.
    pub fn relaxation_time(&self, s: f64) -> Result<f64> {
        self.params.validate()?;
        if !(s >= 0.0) || !s.is_finite() {
            return Err(Error::Domain(format!("parameter s must be finite and >= 0, got {s}")));
        }
        let MaterialParams { alpha, tau0, .. } = self.params;
        if alpha == 1.0 {
            return Ok(tau0);
        }
        if s == 0.0 {
            return Ok(0.0);
        }
        let x = s / tau0;
        let slope = -ml_relax_deriv(alpha, x, &self.ml)?;
        Ok(tau0 * self.relax(x)? / slope)
    }

    pub fn relaxation_time_of_sigma(&self, sigma: f64) -> Result<RelaxationTime> {
        let s = self.s_of_sigma(sigma)?;
        let tau = self.relaxation_time(s)?;
        let near = sigma < DIVERGENCE_FLAG_FACTOR * self.inversion.sigma_floor * self.params.k0;
        Ok(RelaxationTime { tau, near_divergence: near })
    }

    /// Build the viscous-energy law (computes `e0`).
    pub fn viscous_energy_law(&self) -> Result<ViscousEnergy> {
        ViscousEnergy::new(self)
    }

    pub fn e0_constant(&self) -> Result<f64> {
        Ok(self.viscous_energy_law()?.e0())
    }

    pub fn viscous_energy_param(&self, s: f64) -> Result<f64> {
        self.viscous_energy_law()?.at_s(s)
    }

    pub fn viscous_energy(&self, sigma: f64) -> Result<f64> {
        self.viscous_energy_law()?.at_sigma(sigma)
    }

    /// Relaxation time and viscous energy on a grid of `sigma / k0` in
    /// `(0, 1]`, normalized as `tau / tau0` and `rho* mu0 e / (tau0 k0^2)`.
    pub fn sample_energy_and_tau(&self, sigma_over_k0: &[f64]) -> Result<(SampledCurve, SampledCurve)> {
        let law = self.viscous_energy_law()?;
        if let Some(&bad) = sigma_over_k0.iter().find(|&&v| !(v > 0.0 && v <= 1.0)) {
            return Err(Error::Domain(format!("sigma/k0 grid values must lie in (0, 1], got {bad}")));
        }
        let k0 = self.params.k0;
        let tau0 = self.params.tau0;
        let s: Vec<f64> = sigma_over_k0
            .par_iter()
            .map(|&r| self.s_of_sigma(r * k0))
            .collect::<Result<_>>()?;
        let tau: Vec<f64> = s
            .par_iter()
            .map(|&si| Ok(self.relaxation_time(si)? / tau0))
            .collect::<Result<_>>()?;
        let x: Vec<f64> = s.iter().map(|si| si / tau0).collect();
        let ebar = law.normalized_many(&x)?;
        let tau_curve = SampledCurve::new(Quantity::RelaxationTime, self.params, sigma_over_k0.to_vec(), tau);
        let e_curve = SampledCurve::new(Quantity::ViscousEnergy, self.params, sigma_over_k0.to_vec(), ebar);
        Ok((tau_curve, e_curve))
    }
}

fn initial_guess(alpha: f64, r: f64) -> f64 {
    if r > 0.5 {
        // 1 - x^a / Gamma(1 + a)
        ((1.0 - r) * crate::special::gamma(1.0 + alpha)).powf(1.0 / alpha).max(1e-12)
    } else {
        // x^-a / Gamma(1 - a)
        (r / rgamma(1.0 - alpha)).powf(-1.0 / alpha)
    }
}

/// Viscous energy with `e0` chosen so that `e -> 0` as `sigma -> 0`.
///
/// All internal quantities are normalized: `x = s / tau0` and
/// `ebar(x) = int_x^inf E_a(-u^a)^2 du`, so that
/// `e = k0^2 tau0 / (rho* mu0) * ebar`.
#[derive(Debug, Clone)]
pub struct ViscousEnergy {
    model: Model,
    /// Start of the analytic tail, normalized.
    tail_start: f64,
    /// Coefficients `b_n` of `E^2 ~ sum_n b_n u^(-a n)`, `n >= 2`.
    tail_coef: Vec<f64>,
    ebar0: f64,
}

const TAIL_TERMS: usize = 40;

impl ViscousEnergy {
    pub fn new(model: &Model) -> Result<Self> {
        model.params.require_square_integrable()?;
        model.quad.validate()?;
        model.ml.validate()?;
        let alpha = model.params.alpha;
        // E_a(-u^a) ~ sum_{k>=1} (-1)^(k+1) u^(-a k) / Gamma(1 - a k)
        let a: Vec<f64> = (1..=TAIL_TERMS)
            .map(|k| {
                let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
                sign * rgamma(1.0 - alpha * k as f64)
            })
            .collect();
        let mut tail_coef = vec![0.0; 2 * TAIL_TERMS + 1];
        for (j, aj) in a.iter().enumerate() {
            for (k, ak) in a.iter().enumerate() {
                tail_coef[j + k + 2] += aj * ak;
            }
        }
        let mut law = Self { model: *model, tail_start: model.quad.tail_start, tail_coef, ebar0: 0.0 };

        let head = law.head(0.0, law.tail_start)?;
        let ebar0 = head + law.tail(law.tail_start);
        // The same integral split at twice the tail start must agree.
        let t2 = 2.0 * law.tail_start;
        let ebar0_check = head + law.head(law.tail_start, t2)? + law.tail(t2);
        let drift = ((ebar0 - ebar0_check) / ebar0).abs();
        if !ebar0.is_finite() || drift > model.quad.rel_tol.max(1e-10) {
            return Err(Error::NoConvergence(format!(
                "energy tail model unstable: relative change {drift:.3e} when doubling tail_start"
            )));
        }
        law.ebar0 = ebar0;
        Ok(law)
    }

    pub fn model(&self) -> &Model {
        &self.model
    }

    /// `int_0^inf E_a(-u^a)^2 du`.
    pub fn normalized_e0(&self) -> f64 {
        self.ebar0
    }

    pub fn e0(&self) -> f64 {
        self.model.params.energy_scale() * self.ebar0
    }

    /// `ebar` at a normalized parameter `x >= 0`.
    pub fn normalized(&self, x: f64) -> Result<f64> {
        if !(x >= 0.0) || !x.is_finite() {
            return Err(Error::Domain(format!("parameter s must be finite and >= 0, got {x}")));
        }
        if x == 0.0 {
            return Ok(self.ebar0);
        }
        if x >= self.tail_start {
            return Ok(self.tail(x));
        }
        Ok(self.head(x, self.tail_start)? + self.tail(self.tail_start))
    }

    /// `ebar` at many normalized parameters. Consecutive points (in sorted
    /// order) share a cumulative sum of panel integrals, so the cost is one
    /// pass over `[min x, tail_start]` regardless of the number of points.
    pub fn normalized_many(&self, xs: &[f64]) -> Result<Vec<f64>> {
        if let Some(&bad) = xs.iter().find(|&&x| !(x >= 0.0) || !x.is_finite()) {
            return Err(Error::Domain(format!("parameter s must be finite and >= 0, got {bad}")));
        }
        let mut order: Vec<usize> = (0..xs.len()).collect();
        order.sort_by(|&i, &j| xs[j].total_cmp(&xs[i]));
        let head_nodes: Vec<f64> = order.iter().map(|&i| xs[i]).filter(|&x| x < self.tail_start).collect();
        // Panels [x_{k+1}, x_k] from the tail start downward.
        let mut uppers = Vec::with_capacity(head_nodes.len());
        let mut prev = self.tail_start;
        for &x in &head_nodes {
            uppers.push(prev);
            prev = x;
        }
        let panels: Vec<f64> = head_nodes
            .par_iter()
            .zip(uppers.par_iter())
            .map(|(&lo, &hi)| self.head(lo, hi))
            .collect::<Result<_>>()?;
        let mut out = vec![0.0; xs.len()];
        let mut acc = self.tail(self.tail_start);
        let mut p = 0;
        for &i in &order {
            let x = xs[i];
            if x >= self.tail_start {
                out[i] = self.tail(x);
            } else {
                acc += panels[p];
                p += 1;
                out[i] = acc;
            }
        }
        Ok(out)
    }

    pub fn at_s(&self, s: f64) -> Result<f64> {
        if !(s >= 0.0) {
            return Err(Error::Domain(format!("parameter s must be >= 0, got {s}")));
        }
        if s == 0.0 {
            return Ok(self.e0());
        }
        Ok(self.model.params.energy_scale() * self.normalized(s / self.model.params.tau0)?)
    }

    /// Viscous energy as a function of stress on `[0, k0]`; exactly 0 at
    /// `sigma = 0`.
    pub fn at_sigma(&self, sigma: f64) -> Result<f64> {
        let k0 = self.model.params.k0;
        if sigma == 0.0 {
            return Ok(0.0);
        }
        if !(sigma > 0.0 && sigma <= k0 * (1.0 + self.model.inversion.tol)) {
            return Err(Error::OutOfRange { sigma, lower: 0.0, upper: k0 });
        }
        self.at_s(self.model.s_of_sigma(sigma)?)
    }

    /// Viscous energy at many stresses (normalized `ebar`), sharing one
    /// cumulative quadrature pass.
    pub fn normalized_at_sigmas(&self, sigmas: &[f64]) -> Result<Vec<f64>> {
        let tau0 = self.model.params.tau0;
        let xs: Vec<f64> = sigmas
            .par_iter()
            .map(|&sg| Ok(self.model.s_of_sigma(sg)? / tau0))
            .collect::<Result<_>>()?;
        self.normalized_many(&xs)
    }

    fn integrand(&self, u: f64) -> f64 {
        // Errors cannot occur for u >= 0 with a validated config.
        let v = self.model.relax(u).unwrap_or(f64::NAN);
        v * v
    }

    /// `int_lo^hi E_a(-u^a)^2 du` by adaptive quadrature with breakpoints
    /// on a 1-3-10 geometric ladder.
    fn head(&self, lo: f64, hi: f64) -> Result<f64> {
        if hi <= lo {
            return Ok(0.0);
        }
        let mut pts = vec![lo];
        let mut p = 1e-8;
        while p < hi {
            for m in [1.0, 3.0] {
                let q = p * m;
                if q > lo && q < hi {
                    pts.push(q);
                }
            }
            p *= 10.0;
        }
        pts.push(hi);
        let q = &self.model.quad;
        let abs_tol = q.abs_tol * (hi - lo).min(1.0);
        let res = quadrature::integrate(|u| self.integrand(u), &pts, q.rel_tol, abs_tol, q.max_subdivisions)?;
        Ok(res.value)
    }

    /// `int_x^inf` of the squared large-argument expansion, truncated at its
    /// smallest term. A single small coefficient is not a sign of divergence,
    /// so the cut is taken over the whole table.
    fn tail(&self, x: f64) -> f64 {
        let alpha = self.model.params.alpha;
        let terms: Vec<f64> = self
            .tail_coef
            .iter()
            .enumerate()
            .skip(2)
            .map(|(n, &b)| {
                let p = alpha * n as f64 - 1.0;
                b * x.powf(-p) / p
            })
            .collect();
        let mut cut = 0;
        let mut smallest = f64::INFINITY;
        for (i, t) in terms.iter().enumerate() {
            if *t != 0.0 && t.abs() < smallest {
                smallest = t.abs();
                cut = i;
            }
        }
        terms[..=cut].iter().sum()
    }
}
