//! Run configuration: one TOML file, every field optional, defaults equal to
//! the library defaults. Command-line flags are applied on top.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use ret_visco::suite::{geometric_grid, uniform_grid, SuiteConfig};
use ret_visco::{InversionConfig, MLConfig, MaterialParams, Model, OdeConfig, QuadratureConfig};
use serde::Deserialize;

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub output_dir: PathBuf,
    /// Initial stress for `figure2` and `relax`, in stress units.
    pub sigma0: f64,
    pub material: Material,
    pub ml: Ml,
    pub quadrature: Quadrature,
    pub inversion: Inversion,
    pub ode: Ode,
    pub grids: Grids,
    pub verify: Verify,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            output_dir: PathBuf::from("."),
            sigma0: 0.5,
            material: Material::default(),
            ml: Ml::default(),
            quadrature: Quadrature::default(),
            inversion: Inversion::default(),
            ode: Ode::default(),
            grids: Grids::default(),
            verify: Verify::default(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Material {
    pub alpha: f64,
    pub tau0: f64,
    pub k0: f64,
    pub rho_star: f64,
    pub mu0: f64,
    pub eps0: f64,
}

impl Default for Material {
    fn default() -> Self {
        let p = MaterialParams::default();
        Self { alpha: p.alpha, tau0: p.tau0, k0: p.k0, rho_star: p.rho_star, mu0: p.mu0, eps0: p.eps0 }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Ml {
    pub series_tol: f64,
    pub crossover: f64,
    pub max_terms: usize,
}

impl Default for Ml {
    fn default() -> Self {
        let m = MLConfig::default();
        Self { series_tol: m.series_tol, crossover: m.crossover, max_terms: m.max_terms }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Quadrature {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub tail_start: f64,
    pub max_subdivisions: usize,
}

impl Default for Quadrature {
    fn default() -> Self {
        let q = QuadratureConfig::default();
        Self { rel_tol: q.rel_tol, abs_tol: q.abs_tol, tail_start: q.tail_start, max_subdivisions: q.max_subdivisions }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Inversion {
    pub sigma_floor: f64,
    pub tol: f64,
}

impl Default for Inversion {
    fn default() -> Self {
        let i = InversionConfig::default();
        Self { sigma_floor: i.sigma_floor, tol: i.tol }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Ode {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub t_start_offset: f64,
    pub max_steps: usize,
}

impl Default for Ode {
    fn default() -> Self {
        let o = OdeConfig::default();
        Self { rel_tol: o.rel_tol, abs_tol: o.abs_tol, t_start_offset: o.t_start_offset, max_steps: o.max_steps }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Uniform,
    Geometric,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub start: f64,
    pub end: f64,
    pub points: usize,
    #[serde(default = "uniform")]
    pub spacing: Spacing,
}

fn uniform() -> Spacing {
    Spacing::Uniform
}

impl GridSpec {
    fn new(start: f64, end: f64, points: usize) -> Self {
        Self { start, end, points, spacing: Spacing::Uniform }
    }

    pub fn values(&self, what: &str) -> Result<Vec<f64>> {
        if self.points < 2 || !(self.start < self.end) || !self.start.is_finite() || !self.end.is_finite() {
            bail!(
                "grid `{what}` must have at least 2 points and start < end (got {} points on [{}, {}])",
                self.points,
                self.start,
                self.end
            );
        }
        Ok(match self.spacing {
            Spacing::Uniform => uniform_grid(self.start, self.end, self.points),
            Spacing::Geometric => {
                if !(self.start > 0.0) {
                    bail!("geometric grid `{what}` needs start > 0");
                }
                geometric_grid(self.start, self.end, self.points)
            }
        })
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Grids {
    /// `sigma / k0` for `figure1`, `energy` and `tau`.
    pub stress: GridSpec,
    /// `t / tau0` for `figure2` and `relax`.
    pub time: GridSpec,
}

impl Default for Grids {
    fn default() -> Self {
        Self { stress: GridSpec::new(0.005, 1.0, 200), time: GridSpec::new(0.0, 10.0, 400) }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Verify {
    pub alphas: Vec<f64>,
    pub sigma0_ratios: Vec<f64>,
    pub bounds_points: usize,
    pub bounds_t_max: f64,
    pub residual_nodes: usize,
    pub residual_grading: f64,
    pub residual_t_end: f64,
    pub residual_tol: f64,
}

impl Default for Verify {
    fn default() -> Self {
        let s = SuiteConfig::default();
        Self {
            alphas: s.alphas,
            sigma0_ratios: s.sigma0_ratios,
            bounds_points: s.bounds_points,
            bounds_t_max: s.bounds_t_max,
            residual_nodes: s.residual_nodes,
            residual_grading: s.residual_grading,
            residual_t_end: s.residual_t_end,
            residual_tol: s.residual_tol,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("parsing {}", path.display()))
    }

    pub fn parse(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn params(&self) -> MaterialParams {
        let m = &self.material;
        MaterialParams { alpha: m.alpha, tau0: m.tau0, k0: m.k0, rho_star: m.rho_star, mu0: m.mu0, eps0: m.eps0 }
    }

    pub fn ml_config(&self) -> MLConfig {
        MLConfig { series_tol: self.ml.series_tol, crossover: self.ml.crossover, max_terms: self.ml.max_terms }
    }

    pub fn ode_config(&self) -> OdeConfig {
        let o = &self.ode;
        OdeConfig { rel_tol: o.rel_tol, abs_tol: o.abs_tol, t_start_offset: o.t_start_offset, max_steps: o.max_steps }
    }

    /// The model with every numerical control validated.
    pub fn model(&self) -> Result<Model> {
        let q = &self.quadrature;
        let model = Model {
            params: self.params(),
            ml: self.ml_config(),
            quad: QuadratureConfig {
                rel_tol: q.rel_tol,
                abs_tol: q.abs_tol,
                tail_start: q.tail_start,
                max_subdivisions: q.max_subdivisions,
            },
            inversion: InversionConfig { sigma_floor: self.inversion.sigma_floor, tol: self.inversion.tol },
        };
        model.params.validate()?;
        model.ml.validate()?;
        model.quad.validate()?;
        let inv = &model.inversion;
        if !(inv.sigma_floor > 0.0 && inv.sigma_floor < 1.0 && inv.tol > 0.0) {
            bail!("inversion.sigma_floor must lie in (0, 1) and inversion.tol must be positive");
        }
        self.ode_config().validate()?;
        Ok(model)
    }

    pub fn suite(&self) -> Result<SuiteConfig> {
        let v = &self.verify;
        if v.alphas.is_empty() || v.sigma0_ratios.is_empty() {
            bail!("verify.alphas and verify.sigma0_ratios must be nonempty");
        }
        if let Some(a) = v.alphas.iter().find(|a| !(**a > 0.0 && **a <= 1.0)) {
            bail!("verify.alphas entries must lie in (0, 1], got {a}");
        }
        if let Some(r) = v.sigma0_ratios.iter().find(|r| !(**r > 0.0 && **r <= 1.0)) {
            bail!("verify.sigma0_ratios entries must lie in (0, 1], got {r}");
        }
        if v.bounds_points < 2 || !(v.bounds_t_max > 0.0) || v.residual_nodes < 10 || !(v.residual_grading >= 1.0) {
            bail!("verify grid settings out of range");
        }
        Ok(SuiteConfig {
            model: self.model()?,
            ode: self.ode_config(),
            alphas: v.alphas.clone(),
            sigma0_ratios: v.sigma0_ratios.clone(),
            bounds_points: v.bounds_points,
            bounds_t_max: v.bounds_t_max,
            residual_nodes: v.residual_nodes,
            residual_grading: v.residual_grading,
            residual_t_end: v.residual_t_end,
            residual_tol: v.residual_tol,
        })
    }

    /// `key = value` pairs written into every CSV header.
    pub fn provenance(&self) -> Vec<(String, String)> {
        let m = &self.material;
        let mut out = vec![
            ("generator".to_string(), format!("retvisco {}", env!("CARGO_PKG_VERSION"))),
            ("material.alpha".into(), format!("{:?}", m.alpha)),
            ("material.tau0".into(), format!("{:?}", m.tau0)),
            ("material.k0".into(), format!("{:?}", m.k0)),
            ("material.rho_star".into(), format!("{:?}", m.rho_star)),
            ("material.mu0".into(), format!("{:?}", m.mu0)),
            ("material.eps0".into(), format!("{:?}", m.eps0)),
            ("ml.series_tol".into(), format!("{:?}", self.ml.series_tol)),
            ("ml.crossover".into(), format!("{:?}", self.ml.crossover)),
            ("ml.max_terms".into(), self.ml.max_terms.to_string()),
            ("quadrature.rel_tol".into(), format!("{:?}", self.quadrature.rel_tol)),
            ("quadrature.abs_tol".into(), format!("{:?}", self.quadrature.abs_tol)),
            ("quadrature.tail_start".into(), format!("{:?}", self.quadrature.tail_start)),
            ("quadrature.max_subdivisions".into(), self.quadrature.max_subdivisions.to_string()),
            ("inversion.sigma_floor".into(), format!("{:?}", self.inversion.sigma_floor)),
            ("inversion.tol".into(), format!("{:?}", self.inversion.tol)),
        ];
        out.push(("ode.rel_tol".into(), format!("{:?}", self.ode.rel_tol)));
        out.push(("ode.abs_tol".into(), format!("{:?}", self.ode.abs_tol)));
        out.push(("ode.t_start_offset".into(), format!("{:?}", self.ode.t_start_offset)));
        out
    }
}
