//! Bracketing root finders for monotone scalar functions.

use crate::error::{Error, Result};

/// Expand `[start / factor^k, start * factor^k]` geometrically on the
/// positive axis until `f` changes sign. `f` must be monotone.
pub fn bracket_positive<F: FnMut(f64) -> Result<f64>>(
    mut f: F,
    start: f64,
    factor: f64,
    max_expansions: usize,
) -> Result<(f64, f64, f64, f64)> {
    let mut lo = start;
    let mut hi = start;
    let mut flo = f(lo)?;
    let mut fhi = flo;
    if flo == 0.0 {
        return Ok((lo, hi, flo, fhi));
    }
    for _ in 0..max_expansions {
        let nlo = lo / factor;
        let nhi = hi * factor;
        let fnlo = f(nlo)?;
        if fnlo.signum() != flo.signum() || fnlo == 0.0 {
            return Ok((nlo, lo, fnlo, flo));
        }
        let fnhi = f(nhi)?;
        if fnhi.signum() != fhi.signum() || fnhi == 0.0 {
            return Ok((hi, nhi, fhi, fnhi));
        }
        lo = nlo;
        hi = nhi;
        flo = fnlo;
        fhi = fnhi;
    }
    Err(Error::NoConvergence(format!(
        "no sign change found in [{lo:.3e}, {hi:.3e}]"
    )))
}

/// Brent's method (bisection / secant / inverse quadratic interpolation)
/// on a sign-changing bracket. Stops when the bracket is narrower than
/// `x_tol` (absolute) plus `4 eps |x|`, or an exact zero is hit.
pub fn brent<F: FnMut(f64) -> Result<f64>>(
    mut f: F,
    mut a: f64,
    mut b: f64,
    mut fa: f64,
    mut fb: f64,
    x_tol: f64,
    max_iter: usize,
) -> Result<f64> {
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::Domain(format!("[{a}, {b}] does not bracket a root")));
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..max_iter {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * x_tol;
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b)?;
    }
    Err(Error::NoConvergence(format!("Brent iteration did not converge near {b}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt_two() {
        let f = |x: f64| Ok(x * x - 2.0);
        let (a, b, fa, fb) = bracket_positive(f, 1e-3, 2.0, 60).unwrap();
        let r = brent(f, a, b, fa, fb, 0.0, 200).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn decreasing_function_far_from_start() {
        let f = |x: f64| Ok((-x).exp() - 1e-9);
        let (a, b, fa, fb) = bracket_positive(f, 1.0, 2.0, 60).unwrap();
        let r = brent(f, a, b, fa, fb, 0.0, 200).unwrap();
        assert!((r - 1e9f64.ln()).abs() < 1e-13);
    }

    #[test]
    fn no_bracket() {
        let f = |x: f64| Ok(x * x + 1.0);
        assert!(bracket_positive(f, 1.0, 2.0, 10).is_err());
        assert!(brent(f, 0.0, 1.0, 1.0, 2.0, 0.0, 10).is_err());
    }
}
