//! `retvisco`: sample the nonlinear relaxation model, write the figure data
//! as CSV and run the verification matrix.
//!
//! Exit status: 0 on success, 1 when a verification check fails, 2 for
//! usage, configuration or domain errors.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use ret_visco::curve::{fmt17, parse_csv, Quantity};
use ret_visco::figures;
use ret_visco::suite::run_suite;
use ret_visco::{ml_two, CurveKind, SampledCurve};

use config::RunConfig;
use output::{slug, Written};

#[derive(Parser)]
#[command(name = "retvisco", version, about = "Nonlinear viscoelastic relaxation: figures and verification")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// TOML run configuration; flags given here take precedence over it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Fractional order, 0 < alpha <= 1.
    #[arg(long, global = true)]
    alpha: Option<f64>,
    /// Characteristic time.
    #[arg(long, global = true)]
    tau0: Option<f64>,
    /// Stress scale; the largest admissible stress.
    #[arg(long, global = true)]
    k0: Option<f64>,
    /// Product rho* mu0 (sets rho_star to this value and mu0 to 1).
    #[arg(long = "rho-mu", global = true)]
    rho_mu: Option<f64>,
    /// Initial stress for the relaxation experiment, in stress units.
    #[arg(long, global = true, allow_negative_numbers = true)]
    sigma0: Option<f64>,
    /// Directory for output files.
    #[arg(long = "out-dir", global = true)]
    out_dir: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate E_{alpha,beta}(z) and print `z,value` lines.
    MlEval {
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
        /// Arguments, comma separated or repeated.
        #[arg(long, required = true, value_delimiter = ',', allow_negative_numbers = true)]
        z: Vec<f64>,
    },
    /// Relaxation time and viscous energy against stress (fig1_tau.csv, fig1_energy.csv).
    Figure1,
    /// Nonlinear relaxation against the fractional modulus and its upper bound (fig2.csv).
    Figure2,
    /// One relaxation curve on the time grid (relax_<kind>.csv).
    Relax {
        #[arg(long, value_enum, default_value_t = Kind::RetClosed)]
        kind: Kind,
    },
    /// Normalized viscous energy against stress (energy.csv).
    Energy,
    /// Normalized relaxation time against stress (tau.csv).
    Tau,
    /// Run the verification matrix and write one report per check.
    Verify,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Fractional,
    RetClosed,
    RetOde,
    UpperBound,
}

impl From<Kind> for CurveKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Fractional => CurveKind::Fractional,
            Kind::RetClosed => CurveKind::RetClosed,
            Kind::RetOde => CurveKind::RetOde,
            Kind::UpperBound => CurveKind::UpperBound,
        }
    }
}

/// Raised when every step ran but at least one check failed.
#[derive(Debug)]
struct VerificationFailed(usize);

impl std::fmt::Display for VerificationFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} verification check(s) failed", self.0)
    }
}

impl std::error::Error for VerificationFailed {}

fn resolve(common: &Common) -> Result<RunConfig> {
    let mut cfg = match &common.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let m = &mut cfg.material;
    if let Some(v) = common.alpha {
        m.alpha = v;
    }
    if let Some(v) = common.tau0 {
        m.tau0 = v;
    }
    if let Some(v) = common.k0 {
        m.k0 = v;
    }
    if let Some(v) = common.rho_mu {
        m.rho_star = v;
        m.mu0 = 1.0;
    }
    if let Some(v) = common.sigma0 {
        cfg.sigma0 = v;
    }
    if let Some(d) = &common.out_dir {
        cfg.output_dir = d.clone();
    }
    Ok(cfg)
}

fn with_sigma0(cfg: &RunConfig) -> Vec<(String, String)> {
    let mut p = cfg.provenance();
    p.push(("sigma0".into(), format!("{:?}", cfg.sigma0)));
    p
}

fn run(cli: Cli) -> Result<()> {
    let cfg = resolve(&cli.common)?;
    let dir = cfg.output_dir.clone();
    let mut written = Written::default();
    match cli.command {
        Command::MlEval { beta, z } => {
            let ml = cfg.ml_config();
            ml.validate()?;
            println!("z,value");
            for zi in z {
                let v = ml_two(cfg.material.alpha, beta, zi, &ml)?;
                println!("{zi},{v}");
            }
        }
        Command::Figure1 => {
            let model = cfg.model()?;
            let grid = cfg.grids.stress.values("grids.stress")?;
            let (tau, energy) = figures::figure1(&model, &grid)?;
            let prov = cfg.provenance();
            let (tau_csv, e_csv) = (tau.to_csv(&prov), energy.to_csv(&prov));
            written.write(dir.join("fig1_tau.csv"), &tau_csv)?;
            written.write(dir.join("fig1_energy.csv"), &e_csv)?;
            let e0 = model.viscous_energy_law()?.normalized_e0();
            let shape = figures::check_figure1_shape(&parse_csv(&tau_csv), &parse_csv(&e_csv), model.params.alpha, e0);
            if !shape.passed {
                eprint!("{}", shape.to_text());
            }
        }
        Command::Figure2 => {
            let model = cfg.model()?;
            let grid = cfg.grids.time.values("grids.time")?;
            let fig = figures::figure2(&model, cfg.sigma0, &grid)?;
            written.write(dir.join("fig2.csv"), &fig.to_csv(&cfg.provenance()))?;
        }
        Command::Relax { kind } => {
            let model = cfg.model()?;
            let grid = cfg.grids.time.values("grids.time")?;
            let kind = CurveKind::from(kind);
            let curve = match kind {
                CurveKind::RetOde => model.sigma_ret_ode(&grid, cfg.sigma0, &cfg.ode_config())?,
                k => model.relaxation_curve(k, &grid, cfg.sigma0)?,
            };
            let name = format!("relax_{}.csv", kind.name());
            written.write(dir.join(name), &curve.to_csv(&with_sigma0(&cfg)))?;
        }
        Command::Energy => {
            let model = cfg.model()?;
            let grid = cfg.grids.stress.values("grids.stress")?;
            let (_, energy) = figures::figure1(&model, &grid)?;
            written.write(dir.join("energy.csv"), &energy.to_csv(&cfg.provenance()))?;
        }
        Command::Tau => {
            let model = cfg.model()?;
            let grid = cfg.grids.stress.values("grids.stress")?;
            if let Some(bad) = grid.iter().find(|v| !(**v > 0.0 && **v <= 1.0)) {
                bail!("sigma/k0 grid values must lie in (0, 1], got {bad}");
            }
            let (k0, tau0) = (model.params.k0, model.params.tau0);
            let tau = grid
                .iter()
                .map(|r| Ok(model.relaxation_time_of_sigma(r * k0)?.tau / tau0))
                .collect::<Result<Vec<f64>>>()?;
            let curve = SampledCurve::new(Quantity::RelaxationTime, model.params, grid, tau);
            written.write(dir.join("tau.csv"), &curve.to_csv(&cfg.provenance()))?;
        }
        Command::Verify => {
            let suite = cfg.suite()?;
            let reports = run_suite(&suite);
            let vdir = dir.join("verify");
            let mut summary = String::new();
            for (i, r) in reports.iter().enumerate() {
                let stem = format!("{:03}_{}", i + 1, slug(&r.name));
                written.write(vdir.join(format!("{stem}.txt")), &r.to_text())?;
                written.write(vdir.join(format!("{stem}.kv")), &r.to_key_value())?;
                let line = format!(
                    "{} {} worst={} tol={}\n",
                    if r.passed { "PASS" } else { "FAIL" },
                    r.name,
                    fmt17(r.worst_violation),
                    fmt17(r.tolerance)
                );
                print!("{line}");
                summary.push_str(&line);
            }
            let failed = reports.iter().filter(|r| !r.passed).count();
            summary.push_str(&format!("checks = {}\nfailed = {failed}\n", reports.len()));
            written.write(vdir.join("summary.txt"), &summary)?;
            written.print();
            if failed > 0 {
                return Err(VerificationFailed(failed).into());
            }
            return Ok(());
        }
    }
    written.print();
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if let Some(v) = e.downcast_ref::<VerificationFailed>() {
                eprintln!("error: {v}");
                return ExitCode::from(1);
            }
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
