//! Exterior differential systems for second-order conformal deformation of
//! spacelike surfaces in the Lie quadric, plus a numerical lab for
//! isothermic surfaces and their T-transforms.

pub mod exterior;
pub mod linalg;
pub mod grid;
pub mod liegroup;
pub mod pfaffian;
pub mod systems;
pub mod calapso;
pub mod cli;
