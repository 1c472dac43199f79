//! Extended-precision reference values, independent of the crate's own
//! special functions and quadrature.
#![allow(dead_code)]

use rug::ops::Pow;
use rug::Float;

/// Power series of `E_{alpha,beta}(z)` in MPFR, with the reciprocal gamma
/// coefficients tabulated once for all `|z| <= z_max`.
pub struct MlOracle {
    alpha: f64,
    prec: u32,
    coef: Vec<Float>,
}

impl MlOracle {
    pub fn new(alpha: f64, beta: f64, z_max: f64) -> Self {
        // The largest term is about exp(z_max^(1/alpha)); carry that many
        // extra bits so the alternating sum keeps ~30 significant digits.
        let peak = z_max.max(1.0).powf(1.0 / alpha);
        let prec = 128 + (peak * std::f64::consts::LOG2_E * 1.05) as u32;
        let a = Float::with_val(prec, alpha);
        let b = Float::with_val(prec, beta);
        let ln_z = z_max.max(1.0).ln();
        let mut coef = Vec::new();
        for k in 0u32.. {
            let arg = Float::with_val(prec, &a * k) + &b;
            let ln_g = arg.clone().ln_gamma().to_f64();
            coef.push(arg.gamma().recip());
            if k > 10 && k as f64 * ln_z - ln_g < -110.0 {
                break;
            }
        }
        Self { alpha, prec, coef }
    }

    pub fn eval(&self, z: f64) -> f64 {
        let z = Float::with_val(self.prec, z);
        let mut zk = Float::with_val(self.prec, 1);
        let mut sum = Float::with_val(self.prec, 0);
        for c in &self.coef {
            sum += Float::with_val(self.prec, c * &zk);
            zk *= &z;
        }
        sum.to_f64()
    }

    /// `E_alpha(-x^alpha)` with `x^alpha` formed in extended precision.
    pub fn relax(&self, x: f64) -> f64 {
        let z = -Float::with_val(self.prec, x).pow(self.alpha);
        let mut zk = Float::with_val(self.prec, 1);
        let mut sum = Float::with_val(self.prec, 0);
        for c in &self.coef {
            sum += Float::with_val(self.prec, c * &zk);
            zk *= &z;
        }
        sum.to_f64()
    }
}

pub fn gamma_mp(x: f64) -> f64 {
    Float::with_val(256, x).gamma().to_f64()
}

pub fn ln_gamma_mp(x: f64) -> f64 {
    Float::with_val(256, x).ln_abs_gamma().0.to_f64()
}

/// `1 / Gamma(x)`, zero at the poles.
pub fn rgamma_mp(x: f64) -> f64 {
    if x <= 0.0 && x == x.floor() {
        return 0.0;
    }
    Float::with_val(256, x).gamma().recip().to_f64()
}

/// Large-argument expansion `E_alpha(-y) ~ sum_{k>=1} (-1)^(k+1) y^-k / Gamma(1 - alpha k)`
/// truncated after `terms` terms.
pub fn ml_asymptotic(alpha: f64, y: f64, terms: usize) -> f64 {
    (1..=terms)
        .map(|k| {
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            sign * y.powi(-(k as i32)) * rgamma_mp(1.0 - alpha * k as f64)
        })
        .sum()
}

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration on P_n.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n {
        let mut t = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, t);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * t * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (t * p1 - p0) / (t * t - 1.0);
            let dt = p1 / dp;
            t -= dt;
            if dt.abs() < 1e-16 {
                break;
            }
        }
        x[i] = t;
        w[i] = 2.0 / ((1.0 - t * t) * dp * dp);
    }
    (x, w)
}

/// Composite Gauss-Legendre over consecutive breakpoints.
pub fn integrate_panels(f: impl Fn(f64) -> f64, breaks: &[f64], n: usize) -> f64 {
    let (x, w) = gauss_legendre(n);
    breaks
        .windows(2)
        .map(|p| {
            let (a, b) = (p[0], p[1]);
            let h = 0.5 * (b - a);
            let m = 0.5 * (a + b);
            x.iter().zip(&w).map(|(xi, wi)| wi * f(m + h * xi)).sum::<f64>() * h
        })
        .sum()
}

/// `int_0^inf E_alpha(-x^alpha)^2 dx`: extended-precision series up to
/// `x = 100`, the large-argument expansion beyond, and its two leading
/// terms integrated in closed form past `x = 1e8`.
pub fn e0_normalized_oracle(alpha: f64) -> f64 {
    let head_end: f64 = 100.0;
    let ml = MlOracle::new(alpha, 1.0, head_end.powf(alpha));
    let mut breaks = vec![0.0];
    let mut b = 1e-14;
    while b < head_end {
        breaks.push(b);
        b *= 2.0;
    }
    breaks.push(head_end);
    let head = integrate_panels(|x| ml.relax(x).powi(2), &breaks, 30);

    // Middle piece in u = ln x.
    let far: f64 = 1e8;
    let nb = 60;
    let (lo, hi) = (head_end.ln(), far.ln());
    let ub: Vec<f64> = (0..=nb).map(|i| lo + (hi - lo) * i as f64 / nb as f64).collect();
    let mid = integrate_panels(
        |u| {
            let x = u.exp();
            x * ml_asymptotic(alpha, x.powf(alpha), 30).powi(2)
        },
        &ub,
        30,
    );

    let a1 = rgamma_mp(1.0 - alpha);
    let a2 = -rgamma_mp(1.0 - 2.0 * alpha);
    let tail = a1 * a1 * far.powf(1.0 - 2.0 * alpha) / (2.0 * alpha - 1.0)
        + 2.0 * a1 * a2 * far.powf(1.0 - 3.0 * alpha) / (3.0 * alpha - 1.0);
    head + mid + tail
}

/// Bisection for the `x` with `E_alpha(-x^alpha) = r`, on the oracle.
pub fn invert_oracle(alpha: f64, r: f64) -> f64 {
    let mut hi = 1.0;
    let ml = MlOracle::new(alpha, 1.0, 60f64.powf(alpha));
    while ml.relax(hi) > r {
        hi *= 2.0;
        assert!(hi < 60.0, "oracle inversion range too small");
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if ml.relax(mid) > r {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
