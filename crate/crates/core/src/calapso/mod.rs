//! Isothermic surfaces from solutions of the vector Calapso system: the
//! PDE solver, the flat connection, frames, surfaces and their spectral
//! deformations.

pub mod connection;
pub mod field;
pub mod frame;
pub mod surface;

pub use connection::{
    calapso_rules, connection_form, connection_form_with, symbolic_flatness, ConnectionForm, Entry, FlatnessReport, Jet, Pattern,
};
pub use field::{seed_constant_psi, seed_exact, solve_goursat, CalapsoField, GoursatData, GoursatOptions, Mode, Profile, Residuals};
pub use frame::{integrate_frame, FrameField, FrameOptions};
pub use surface::{
    check_contact, check_deformation_order2, extract_second_fundamental, surface, t_transform, t_transform_from, DeformationReport,
    SecondFundamental, SurfacePatch, TTransform,
};

use crate::liegroup::FrameError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CalapsoError {
    #[error("grid shape: {0}")]
    Shape(String),
    #[error("corner values of {what} disagree: {a} on the x-axis, {b} on the y-axis")]
    InconsistentCorner { what: String, a: f64, b: f64 },
    #[error("no convergence after {iterations} iterations (last change {:?})", history.last())]
    NonConvergence { iterations: usize, history: Vec<f64> },
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error("chart singular at node ({i}, {j})")]
    ChartSingular { i: usize, j: usize },
}
