//! Finite-volume solver for the nonlinear wave system on mapped grids.

pub mod bc;
pub mod grid;
pub mod roe;
pub mod solver;

pub use bc::{BoundarySpec, EdgeBc, GhostCells};
pub use grid::{Bounds, Mapping, MappedGrid, PolarGrid};
pub use roe::{normal_flux, roe_interface, RoeFan};
pub use solver::{apply_bc, solve, FvField, Limiter, Order, SolveLog, Solver, SolverConfig, StepStats};
