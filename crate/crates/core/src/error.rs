use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// `int_0^inf E_alpha(-x^alpha)^2 dx` diverges for alpha <= 1/2.
    #[error("viscous energy is unbounded: E_alpha(-x^alpha) is not square integrable for alpha = {alpha} (requires 1/2 < alpha <= 1)")]
    NonIntegrable { alpha: f64 },

    /// A stress outside the constitutive range `(sigma_floor * k0, k0]`.
    #[error("stress {sigma} outside the constitutive range ({lower}, {upper}]")]
    OutOfRange { sigma: f64, lower: f64, upper: f64 },

    #[error("singular point: {0}")]
    Singular(String),

    #[error("failed to converge: {0}")]
    NoConvergence(String),

    #[error("step size underflow at t = {t}")]
    StepUnderflow { t: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("mesh/curve mismatch: {0}")]
    Mismatch(String),
}

pub type Result<T> = std::result::Result<T, Error>;
