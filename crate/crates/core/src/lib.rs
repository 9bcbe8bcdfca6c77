//! Finite-volume solvers for one-dimensional weakly hyperbolic conservation
//! laws whose Jacobian has a single eigenvalue with an incomplete set of
//! eigenvectors.
//!
//! The upwind scheme (FDS-J) splits flux differences over a Jordan chain of
//! generalized eigenvectors; a Local Lax-Friedrichs flux is provided as the
//! baseline. All numerical code is generic over [`Scalar`] (`f32` or `f64`);
//! the aliases below fix the common double-precision instantiations.

pub mod cases;
pub mod cli;
pub mod error;
pub mod io;
pub mod jordan;
pub mod model;
pub mod scalar;
pub mod scheme;
pub mod verify;

pub use cases::{catalog, find_case, CaseSpec};
pub use error::{Error, Result};
pub use jordan::{block_size, build_chain, chain_determinant, numeric_rank, JordanChain, SmallMatrix};
pub use model::{AveragedState, ModelKind, StateVector, SystemModel};
pub use scalar::Scalar;
pub use scheme::{
    fdsj_flux, harten_fix, llf_flux, max_stable_dt, run, step, BoundaryKind, GridSolution, SchemeConfig, SchemeKind,
};

pub type Matrix = SmallMatrix<f64>;
pub type Chain = JordanChain<f64>;
pub type State = StateVector<f64>;
pub type Grid = GridSolution<f64>;
pub type Config = SchemeConfig<f64>;

pub type Matrix32 = SmallMatrix<f32>;
pub type State32 = StateVector<f32>;
pub type Grid32 = GridSolution<f32>;
