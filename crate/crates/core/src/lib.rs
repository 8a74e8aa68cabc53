//! Numerical laboratory for non-interacting Bose gases in soft harmonic traps.
//!
//! The crate discretizes single-particle Hamiltonians on uniform grids, evolves
//! wave packets with two independent propagators, evaluates expectation values
//! in gauge-invariant quasifree (thermal and condensate-perturbed) states, and
//! carries a small exact Fock-space oracle that every closed-form expectation
//! is checked against.
//!
//! Everything here is pure computation on owned buffers; the crate is `no_std`
//! and only needs an allocator. File formats, configuration and the experiment
//! runner live in the `thermolim` crate.
//!
//! Units: ħ = 1 and 2m = 1, so the free dispersion is `p²`.

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod condensate;
pub mod error;
pub mod fft;
pub mod fit;
pub mod fock;
pub mod grid;
pub mod hamiltonian;
pub mod propagate;
pub mod quadrature;
pub mod quasifree;
pub mod special;
pub mod tridiag;

pub use num_complex::Complex64;

pub use crate::error::{Error, Result};
pub use crate::grid::{Grid1D, MomentumFunction, RadialGrid, WaveFunction};
pub use crate::hamiltonian::{Parity, PotentialSpec, SpectralDecomposition};
pub use crate::quasifree::{Condensate, CondensateMode, QuasifreeState, ThermalCloud};
pub use crate::tridiag::TridiagonalOperator;
