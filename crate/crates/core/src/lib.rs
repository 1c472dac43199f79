//! Nonlinear (RET) viscoelastic stress relaxation with a viscous-energy
//! law whose relaxation modulus contains the fractional Maxwell one.
//!
//! Layout:
//!
//! * [`mittag_leffler`]: `E_alpha`, `E_{alpha,beta}` for `z <= 0`.
//! * [`constitutive`]: parametric viscous energy, `e0`, nonlinear
//!   relaxation time and the stress/parameter inversion.
//! * [`relaxation`]: fractional and nonlinear relaxation moduli (closed form
//!   and ODE), the offset `c`, bound and dissipation checks.
//! * [`fractional`]: L1 Caputo discretization and the fractional residual.
//! * [`figures`]: data and row-wise checks for the two standard plots.
//! * [`suite`]: the aggregated verification matrix.

// `!(x > 0.0)` is used on purpose: it also rejects NaN. Tabulated
// coefficients keep the digits they were published with.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision, clippy::needless_range_loop)]

pub mod constitutive;
pub mod curve;
pub mod error;
pub mod figures;
pub mod fractional;
pub mod mittag_leffler;
pub mod ode;
pub mod quadrature;
pub mod relaxation;
pub mod report;
pub mod roots;
pub mod special;
pub mod suite;

pub use constitutive::{InversionConfig, MaterialParams, Model, QuadratureConfig, ViscousEnergy};
pub use curve::{CurveKind, SampledCurve};
pub use error::{Error, Result};
pub use mittag_leffler::{ml_one, ml_relax, ml_relax_deriv, ml_two, MLConfig, MLPoint};
pub use relaxation::OdeConfig;
pub use report::VerificationReport;
