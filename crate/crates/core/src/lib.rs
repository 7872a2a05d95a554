//! Numerical tools for the four-quadrant rarefaction Riemann problem of the
//! two-dimensional nonlinear wave system.
//!
//! The crate covers the whole chain from the time-dependent solution to the
//! supersonic wave structure in self-similar coordinates:
//!
//! - [`gas`]: pressure law, states, quadrant data and exact planar rarefactions.
//! - [`fv`]: capacity-weighted wave-propagation solver on polar grids.
//! - [`selfsim`]: self-similar sampling, cross-sections, shock/sonic classification.
//! - [`chars`]: characteristic curves, the exact rarefaction region, simple waves and envelopes.
//! - [`goursat`]: characteristic mesh for the transient region and sonic-front extraction.
//! - [`pipeline`]: configuration and the staged artifact pipeline behind the `nlwave` binary.

pub mod error;
pub mod chars;
pub mod fv;
pub mod gas;
pub mod goursat;
pub mod pipeline;
pub mod selfsim;

pub use error::{Error, Result};
pub use gas::{four_quadrant_states, GasLaw, PolarPoint, QuadrantData, State};
