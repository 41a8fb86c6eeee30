//! Simulation toolkit for fast geometric single-qubit gates on a resonantly
//! driven qubit.
//!
//! The crate synthesizes piecewise-constant pulse sequences for three gate
//! constructions (noncyclic geometric, cyclic geometric, and plain dynamical
//! composition), evolves them under systematic Rabi/detuning errors and
//! dephasing, simulates shot-limited state and process tomography with
//! imperfect state preparation, and provides the quantitative robustness
//! studies built on top of those pieces (systematic-error sweeps, dephasing
//! curve fits, Gaussian-averaged infidelities). A small two-ion three-level
//! model validates the effective two-qubit flip-flop Hamiltonian the
//! noncyclic scheme relies on.

pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod fit;
pub mod quadrature;
pub mod qubit;
pub mod report;
pub mod schemes;
pub mod tomography;
pub mod twoion;

pub use error::{Error, Result};
