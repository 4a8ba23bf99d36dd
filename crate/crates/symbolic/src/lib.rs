//! Exact algebra for generating-function work.
//!
//! Everything here is exact: coefficients are arbitrary-precision rationals,
//! and the higher structures are built on top of them:
//!
//! * [`Poly`] and [`RationalFunction`]: the field `Q(x)`,
//! * [`PowerSeries`]: truncated Maclaurin expansions,
//! * [`QuadExt`]: `Q(x)` adjoined one root of a quadratic (the kernel root of
//!   a functional equation),
//! * [`BivariateRF`]: rational functions in a catalytic variable `t` with
//!   coefficients in `Q(x)`,
//! * [`LinearForm`] and [`solve_linear_system`]: linear systems in named
//!   scalar unknowns, solved by fraction-free elimination,
//! * [`pade_reconstruct`] and [`algebraic_fit_deg2`]: recovering closed forms
//!   from series prefixes.

mod bivariate;
mod field;
mod linear;
mod poly;
mod quadext;
mod ratfunc;
mod reconstruct;
mod series;

pub use bivariate::BivariateRF;
pub use field::{Field, Rat};
pub use linear::{solve_linear_system, LinearForm, Unknown};
pub use poly::{DensePoly, Poly};
pub use quadext::{kernel_t0, QuadContext, QuadExt};
pub use ratfunc::RationalFunction;
pub use reconstruct::{algebraic_fit_deg2, pade_reconstruct, AlgebraicRelation, RESERVE_COEFFICIENTS};
pub use series::PowerSeries;

/// Default truncation order for power series.
pub const DEFAULT_SERIES_ORDER: usize = 32;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SymbolicError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("denominator vanishes at x = 0; no power series expansion")]
    NonUnitDenominator,
    #[error("expression has a pole at the evaluation point {0}")]
    PoleAtEvaluationPoint(String),
    #[error("linear system is singular")]
    SingularSystem,
    #[error("linear system is not square: {equations} equations in {unknowns} unknowns")]
    NotSquare { equations: usize, unknowns: usize },
    #[error("unknown {0:?} is not declared")]
    UndeclaredUnknown(Unknown),
    #[error("elements belong to different quadratic extensions")]
    ExtensionMismatch,
    #[error("{0}")]
    Unsupported(String),
}

pub type Result<T, E = SymbolicError> = std::result::Result<T, E>;
