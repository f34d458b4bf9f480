//! Numerical laboratory for the order-to-chaos transition in deep random
//! networks and its imprint on the entanglement of neural quantum states.
//!
//! The crate has two legs that meet in the middle:
//!
//! * [`meanfield`] solves the Gaussian signal-propagation recurrences of
//!   infinitely wide random networks — the magnitude map `q`, the correlation
//!   map `c`, the slope `χ` of the correlation map at its fixed point, and the
//!   correlation decay length `ξ_c = −1/ln χ` that diverges at the
//!   order-to-chaos transition.
//! * [`network`] / [`hilbert`] / [`observables`] build finite neural quantum
//!   states: complex-weight SELU networks evaluated on every spin
//!   configuration of a small chain, normalized into exact wavefunctions, cut
//!   into Schmidt spectra and entanglement entropies, and probed with a
//!   J1–J2 Heisenberg Hamiltonian.
//!
//! [`harness`] drives seeded ensembles of the finite-size leg over parameter
//! grids and writes the CSV tables that reproduce the qualitative story: the
//! entanglement entropy of random neural quantum states peaks where the
//! mean-field theory puts the transition, grows toward the Page value with
//! depth in the chaotic phase, and stays area-law-like in the ordered phase.
//!
//! Everything is deterministic: ensembles derive per-realization seeds from a
//! master seed via [`seed::derive_seed`], and all stochastic sampling goes
//! through explicitly seeded ChaCha8 streams.

pub mod error;
pub mod harness;
pub mod hilbert;
pub mod meanfield;
pub mod network;
pub mod observables;
pub mod seed;

pub use error::{Error, Result};
