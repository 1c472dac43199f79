//! Sampled curves and their CSV form.

use std::fmt::Write as _;

use crate::constitutive::MaterialParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveKind {
    /// `sigma_F(t) = sigma0 E_a(-(t/tau0)^a)`.
    Fractional,
    /// `sigma_R(t) = k0 E_a(-((t+c)/tau0)^a)`.
    RetClosed,
    /// `sigma_R` integrated from the nonlinear relaxation equation.
    RetOde,
    /// `(k0/sigma0) sigma_F(t)`.
    UpperBound,
}

impl CurveKind {
    pub fn name(self) -> &'static str {
        match self {
            CurveKind::Fractional => "fractional",
            CurveKind::RetClosed => "ret_closed",
            CurveKind::RetOde => "ret_ode",
            CurveKind::UpperBound => "upper_bound",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    /// `tau / tau0` against `sigma / k0`.
    RelaxationTime,
    /// `rho* mu0 e / (tau0 k0^2)` against `sigma / k0`.
    ViscousEnergy,
    /// `sigma / k0` against `t / tau0`.
    Stress(CurveKind),
}

impl Quantity {
    pub fn name(self) -> &'static str {
        match self {
            Quantity::RelaxationTime => "relaxation_time",
            Quantity::ViscousEnergy => "viscous_energy",
            Quantity::Stress(k) => k.name(),
        }
    }

    pub fn normalization(self) -> &'static str {
        match self {
            Quantity::RelaxationTime => "tau/tau0",
            Quantity::ViscousEnergy => "rho_star*mu0*e/(tau0*k0^2)",
            Quantity::Stress(_) => "sigma/k0",
        }
    }

    pub fn columns(self) -> (&'static str, &'static str) {
        match self {
            Quantity::Stress(_) => ("t_over_tau0", "sigma_over_k0"),
            _ => ("sigma_over_k0", "value"),
        }
    }
}

/// Ordered abscissa/ordinate pairs in normalized units.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledCurve {
    pub quantity: Quantity,
    pub params: MaterialParams,
    /// Initial stress for relaxation curves.
    pub sigma0: Option<f64>,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl SampledCurve {
    pub fn new(quantity: Quantity, params: MaterialParams, x: Vec<f64>, y: Vec<f64>) -> Self {
        debug_assert_eq!(x.len(), y.len());
        Self { quantity, params, sigma0: None, x, y }
    }

    pub fn relaxation(kind: CurveKind, params: MaterialParams, sigma0: f64, t_over_tau0: Vec<f64>, y: Vec<f64>) -> Self {
        Self { quantity: Quantity::Stress(kind), params, sigma0: Some(sigma0), x: t_over_tau0, y }
    }

    pub fn kind(&self) -> Option<CurveKind> {
        match self.quantity {
            Quantity::Stress(k) => Some(k),
            _ => None,
        }
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// CSV text: a field-name comment line, a value comment line, extra
    /// provenance comments, the column header, then one row per sample.
    pub fn to_csv(&self, provenance: &[(String, String)]) -> String {
        let p = &self.params;
        let mut out = String::new();
        match self.quantity {
            Quantity::Stress(kind) => {
                out.push_str("# kind, alpha, tau0, k0, sigma0\n");
                let _ = writeln!(
                    out,
                    "# {}, {}, {}, {}, {}",
                    kind.name(),
                    fmt17(p.alpha),
                    fmt17(p.tau0),
                    fmt17(p.k0),
                    fmt17(self.sigma0.unwrap_or(f64::NAN))
                );
            }
            q => {
                out.push_str("# quantity, alpha, tau0, k0, normalization\n");
                let _ = writeln!(
                    out,
                    "# {}, {}, {}, {}, {}",
                    q.name(),
                    fmt17(p.alpha),
                    fmt17(p.tau0),
                    fmt17(p.k0),
                    q.normalization()
                );
            }
        }
        for (k, v) in provenance {
            let _ = writeln!(out, "# {k} = {v}");
        }
        let (cx, cy) = self.quantity.columns();
        let _ = writeln!(out, "{cx},{cy}");
        for (x, y) in self.x.iter().zip(&self.y) {
            let _ = writeln!(out, "{},{}", fmt17(*x), fmt17(*y));
        }
        out
    }
}

/// 17 significant digits, round-trip exact.
pub fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

/// Parse a CSV produced by this crate: skips `#` comments and the header.
pub fn parse_csv(text: &str) -> Vec<Vec<f64>> {
    text.lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .skip(1)
        .map(|l| l.split(',').map(|c| c.trim().parse::<f64>().unwrap_or(f64::NAN)).collect())
        .collect()
}
