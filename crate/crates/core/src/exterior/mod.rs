//! Exact polynomials over the rationals and the exterior algebra on a
//! named coframe.

pub mod coframe;
pub mod form;
pub mod poly;
pub mod rational;
pub mod text;

pub use coframe::{BasisChange, Coframe, CoframeBuilder, JetSpace};
pub use form::{ExteriorForm, FrameTag};
pub use poly::{Monomial, Poly, RewriteRules, Var};
pub use rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("forms live on different coframes")]
    CoframeMismatch,
    #[error("non-differentiable variable `{0}`")]
    NonDifferentiable(String),
    #[error("cyclic rewrite rules through `{0}`")]
    CyclicRules(String),
    #[error("unknown basis form `{0}`")]
    UnknownBasis(String),
    #[error("basis change failed: {0}")]
    BasisChange(String),
    #[error("not linear: {0}")]
    NotLinear(String),
    #[error("no value for variable `{0}`")]
    UnassignedVariable(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("degree error: {0}")]
    Degree(String),
    #[error("d^2 of {form} is {residue}, not zero")]
    Integrability { form: String, residue: String },
}
