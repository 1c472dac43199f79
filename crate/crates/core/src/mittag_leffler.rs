//! One- and two-parameter Mittag-Leffler functions on the nonpositive real
//! axis, `0 < alpha <= 1`.
//!
//! Two regimes:
//!
//! * `|z| <= crossover`: the defining power series
//!   `sum_k z^k / Gamma(alpha k + beta)`.
//! * `|z| > crossover`: the real integral representation valid for
//!   `|arg z| > alpha pi`, `beta < 1 + alpha`,
//!
//!   ```text
//!   E_{a,b}(-x) = 1/(a pi) int_0^inf r^((1-b)/a) exp(-r^(1/a))
//!                 * (r sin(pi(1-b)) + x sin(pi(1-b+a)))
//!                 / (r^2 + 2 r x cos(a pi) + x^2) dr
//!   ```
//!
//!   For `beta = 1` and `beta = alpha` the integrand is positive, so the
//!   quadrature carries no cancellation no matter how large `x` is. Larger
//!   `beta` is reduced with `E_{a,b}(z) = (E_{a,b-a}(z) - 1/Gamma(b-a)) / z`.
//!
//! `alpha = 1` is handled through the exponential and, for `beta != 1`,
//! through `E_{1,b}(z) = 1/Gamma(b) int_0^1 exp(z (1 - w^(1/(b-1)))) dw`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quadrature;
use crate::special::{rgamma, sin_pi};

/// Evaluation controls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MLConfig {
    /// Relative truncation tolerance for the series and the quadrature.
    pub series_tol: f64,
    /// `|z|` above which the integral representation replaces the series.
    pub crossover: f64,
    /// Series term cap.
    pub max_terms: usize,
}

impl Default for MLConfig {
    fn default() -> Self {
        Self { series_tol: 1e-14, crossover: 2.0, max_terms: 200 }
    }
}

impl MLConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.series_tol > 0.0 && self.series_tol < 1e-6) {
            return Err(Error::InvalidConfig(format!(
                "series_tol must lie in (0, 1e-6), got {}",
                self.series_tol
            )));
        }
        if !(self.crossover > 0.0 && self.crossover.is_finite()) {
            return Err(Error::InvalidConfig(format!("crossover must be positive, got {}", self.crossover)));
        }
        if self.max_terms < 50 {
            return Err(Error::InvalidConfig(format!("max_terms must be >= 50, got {}", self.max_terms)));
        }
        Ok(())
    }
}

/// A validated evaluation point `(alpha, beta, z)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MLPoint {
    pub alpha: f64,
    pub beta: f64,
    pub z: f64,
}

impl MLPoint {
    pub fn new(alpha: f64, beta: f64, z: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::Domain(format!("alpha must lie in (0, 1], got {alpha}")));
        }
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::Domain(format!("beta must be positive and finite, got {beta}")));
        }
        if !z.is_finite() {
            return Err(Error::Domain(format!("argument must be finite, got {z}")));
        }
        if z > 0.0 {
            return Err(Error::Domain(format!("argument must be <= 0, got {z}")));
        }
        Ok(Self { alpha, beta, z })
    }

    pub fn eval(&self, cfg: &MLConfig) -> Result<f64> {
        eval_point(self.alpha, self.beta, self.z, cfg)
    }
}

/// `E_alpha(z)`, `z <= 0`.
pub fn ml_one(alpha: f64, z: f64, cfg: &MLConfig) -> Result<f64> {
    MLPoint::new(alpha, 1.0, z)?.eval(cfg)
}

/// `E_{alpha,beta}(z)`, `z <= 0`.
pub fn ml_two(alpha: f64, beta: f64, z: f64, cfg: &MLConfig) -> Result<f64> {
    MLPoint::new(alpha, beta, z)?.eval(cfg)
}

/// Fractional relaxation function `E_alpha(-x^alpha)`, `x >= 0`.
pub fn ml_relax(alpha: f64, x: f64, cfg: &MLConfig) -> Result<f64> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("scaled time must be finite and >= 0, got {x}")));
    }
    if x == 0.0 {
        MLPoint::new(alpha, 1.0, 0.0)?;
        return Ok(1.0);
    }
    if alpha == 1.0 {
        return Ok((-x).exp());
    }
    ml_one(alpha, -x.powf(alpha), cfg)
}

/// `d/dx E_alpha(-x^alpha) = -x^(alpha-1) E_{alpha,alpha}(-x^alpha)`.
pub fn ml_relax_deriv(alpha: f64, x: f64, cfg: &MLConfig) -> Result<f64> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("scaled time must be finite and >= 0, got {x}")));
    }
    MLPoint::new(alpha, alpha, 0.0)?;
    if alpha == 1.0 {
        return Ok(-(-x).exp());
    }
    if x == 0.0 {
        return Err(Error::Singular(format!(
            "d/dx E_alpha(-x^alpha) diverges like x^(alpha-1) at x = 0 for alpha = {alpha}"
        )));
    }
    let xa = x.powf(alpha);
    Ok(-(xa / x) * ml_two(alpha, alpha, -xa, cfg)?)
}

fn eval_point(alpha: f64, beta: f64, z: f64, cfg: &MLConfig) -> Result<f64> {
    cfg.validate()?;
    if alpha == 1.0 && beta == 1.0 {
        return Ok(z.exp());
    }
    if z == 0.0 {
        return Ok(rgamma(beta));
    }
    if -z <= cfg.crossover {
        return series(alpha, beta, z, cfg);
    }
    large_argument(alpha, beta, -z, cfg)
}

/// Power series; exposed for the seam-overlap checks.
pub fn series(alpha: f64, beta: f64, z: f64, cfg: &MLConfig) -> Result<f64> {
    let mut sum = 0.0;
    let mut prev = f64::INFINITY;
    let mut zk = 1.0;
    for k in 0..cfg.max_terms {
        let term = zk * rgamma(alpha * k as f64 + beta);
        sum += term;
        // Past the largest term and below tolerance twice in a row.
        if k > 0 && term.abs() <= cfg.series_tol * sum.abs() && prev <= cfg.series_tol * sum.abs() {
            return Ok(sum);
        }
        if term != 0.0 {
            prev = term.abs();
        }
        zk *= z;
        if !zk.is_finite() {
            break;
        }
    }
    Err(Error::NoConvergence(format!(
        "Mittag-Leffler series for alpha = {alpha}, beta = {beta}, z = {z} did not converge in {} terms; crossover {} is too large",
        cfg.max_terms, cfg.crossover
    )))
}

/// Large-argument evaluation of `E_{alpha,beta}(-x)`, `x > 0`; exposed for
/// the seam-overlap checks.
pub fn large_argument(alpha: f64, beta: f64, x: f64, cfg: &MLConfig) -> Result<f64> {
    if alpha == 1.0 {
        return exp_family(beta, -x, cfg);
    }
    if let Some(v) = asymptotic_sum(alpha, beta, x) {
        return Ok(v);
    }
    if beta >= 1.0 + alpha {
        let lower = large_argument(alpha, beta - alpha, x, cfg)?;
        return Ok((lower - rgamma(beta - alpha)) / -x);
    }
    integral_representation(alpha, beta, x, cfg)
}

/// `E_{a,b}(-x) ~ -sum_{k>=1} (-x)^-k / Gamma(b - a k)`, used only when the
/// terms fall below roundoff before the expansion starts to diverge.
fn asymptotic_sum(alpha: f64, beta: f64, x: f64) -> Option<f64> {
    const MAX_TERMS: usize = 200;
    let inv = -1.0 / x;
    let mut pk = 1.0;
    let mut sum = 0.0;
    let mut prev = f64::INFINITY;
    for k in 1..=MAX_TERMS {
        pk *= inv;
        let term = -pk * rgamma(beta - alpha * k as f64);
        sum += term;
        let mag = term.abs();
        if mag <= 0.1 * f64::EPSILON * sum.abs() && prev <= 0.1 * f64::EPSILON * sum.abs() && k > 2 {
            return Some(sum);
        }
        if mag != 0.0 {
            if mag > prev && prev > 0.0 && k > 4 {
                return None;
            }
            prev = mag;
        }
    }
    None
}

fn integral_representation(alpha: f64, beta: f64, x: f64, cfg: &MLConfig) -> Result<f64> {
    let cos_a = (alpha * PI).cos();
    let half_gap = sin_pi(0.5 * (1.0 - alpha));
    let sin_a = sin_pi(alpha);
    let sin_1b = sin_pi(1.0 - beta);
    let sin_1ba = sin_pi(1.0 - beta + alpha);
    let pow_r = (1.0 - beta) / alpha;
    let inv_a = 1.0 / alpha;
    let kernel = |r: f64| {
        if r == 0.0 {
            return if pow_r == 0.0 { sin_1ba / x } else if pow_r > 0.0 { 0.0 } else { f64::INFINITY };
        }
        let num = r * sin_1b + x * sin_1ba;
        // r^2 + 2 r x cos(a pi) + x^2 without cancellation for a near 1
        let den = (r - x) * (r - x) + 4.0 * r * x * half_gap * half_gap;
        r.powf(pow_r) * (-r.powf(inv_a)).exp() * num / den
    };

    // exp(-r^(1/a)) is negligible past r^(1/a) = 50 + ln(1 + x).
    let upper = (50.0 + x.ln_1p()).powf(alpha);
    let center = x * (-cos_a).max(0.0);
    let width = x * sin_a;
    let mut pts = vec![0.0, upper];
    for m in [-10.0, -1.0, 0.0, 1.0, 10.0] {
        let p = center + m * width;
        if p > 0.0 && p < upper {
            pts.push(p);
        }
    }
    // Resolve the r^((1-b)/a) behavior near the origin.
    for p in [1e-8, 1e-4, 1e-2, 1.0] {
        if p < upper {
            pts.push(p);
        }
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    // For alpha <= beta <= 1 the kernel is nonnegative. Otherwise it can
    // change sign, and the error is measured against the integral of
    // |kernel| so cancellation cannot stall the refinement.
    let abs_tol = if alpha <= beta && beta <= 1.0 {
        0.0
    } else {
        let abs_kernel = |r: f64| kernel(r).abs();
        let scale: f64 = pts.windows(2).map(|w| quadrature::gauss_kronrod_21(&abs_kernel, w[0], w[1]).value).sum();
        cfg.series_tol * scale
    };
    let res = quadrature::integrate(kernel, &pts, cfg.series_tol, abs_tol, 4000)?;
    Ok(res.value / (alpha * PI))
}

fn exp_family(beta: f64, z: f64, cfg: &MLConfig) -> Result<f64> {
    if beta == 1.0 {
        return Ok(z.exp());
    }
    if beta < 1.0 {
        return Ok(rgamma(beta) + z * exp_family(beta + 1.0, z, cfg)?);
    }
    let p = 1.0 / (beta - 1.0);
    let f = |w: f64| (z * (1.0 - w.powf(p))).exp();
    let res = quadrature::integrate(f, &[0.0, 0.5, 0.9, 0.99, 1.0], cfg.series_tol, 0.0, 4000)?;
    Ok(res.value * rgamma(beta))
}
