//! Continuous-variable photonic circuit simulation on truncated Fock spaces,
//! with a counterdiabatic-pool variational optimizer and a CV-QAOA baseline.
//!
//! The crate is organized around the pipeline used by the benchmark harness:
//!
//! * [`fock`] — operators and multimode state vectors at a finite cutoff;
//! * [`gates`] — the qumode gate set and parameterized circuits;
//! * [`algebra`] — symbolic normal-ordered polynomials in ladder operators;
//! * [`pool`] — the nested-commutator operator pool and ansatz selection;
//! * [`problems`] — benchmark cost functions and their Hamiltonians;
//! * [`ansatz`] — fixed circuit layouts for the benchmark scenarios;
//! * [`variational`] — cost evaluation, Adam and simplex optimizers,
//!   multi-restart aggregation;
//! * [`qaoa`] — the CV-QAOA comparison circuits.

pub mod algebra;
pub mod ansatz;
pub mod error;
pub mod fock;
pub mod gates;
pub mod pool;
pub mod problems;
pub mod qaoa;
pub mod variational;

pub use error::{Error, Result};
pub use fock::{ModeState, TruncatedOperator};
