//! Ground-state preparation for quantum spin models via probabilistic
//! imaginary-time evolution (PITE), with a state-vector backend, a shot-based
//! backend, a matrix-free Lanczos reference, and a dynamic-structure-factor
//! pipeline on top of the prepared states.
//!
//! The building blocks mirror the workflow:
//!
//! - [`pauli`] / [`hamiltonian`]: operators as weighted Pauli strings and the
//!   Hermitian Hamiltonian layer on top of them.
//! - [`models`]: predefined chains and the 2D square lattice.
//! - [`state`]: amplitudes, initial states, and the rotation kernel.
//! - [`trotter`]: compilation of H·dt into ordered rotation programs.
//! - [`pite`]: the PITE step, the state-vector and shot runners, and the
//!   explicit-circuit equivalence check.
//! - [`ed`]: Lanczos ground states, optionally in a fixed magnetization
//!   sector.
//! - [`dsf`]: real-time correlations and S(q,ω).

pub mod dsf;
pub mod ed;
pub mod hamiltonian;
pub mod linalg;
pub mod models;
pub mod pauli;
pub mod pite;
pub mod state;
pub mod trotter;

pub use hamiltonian::{BoundaryCondition, Hamiltonian};
pub use pauli::{Pauli, PauliString, PauliSumOperator, PauliTerm};
pub use pite::{run_shot, run_sv, EvolveMode, PITEConfig, PITEParams};
pub use state::{init_state, InitialState, StateVector};
