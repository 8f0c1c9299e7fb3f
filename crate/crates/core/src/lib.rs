//! Low-rank augmented Lagrangian solver for trace-bounded semidefinite programs.

pub mod cli;
pub mod generators;
pub mod io;
pub mod model;
pub mod scaling;
pub mod solver;
pub mod spectral;
