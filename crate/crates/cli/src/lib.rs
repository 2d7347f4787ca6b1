//! Batch driver for the PITE spin-model workbench: specification parsing,
//! algorithm dispatch, the γ-sweep and benchmark harnesses, and result
//! serialization.

pub mod bench;
pub mod output;
pub mod runner;
pub mod spec;
pub mod sweep;

use thiserror::Error;

pub use runner::{run, RunOptions};
pub use spec::{parse_runspec, parse_runspec_str, RunSpec};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("schema error: {0}")]
    Schema(String),
    #[error("io error: {0}")]
    Io(String),
    #[error(transparent)]
    Model(#[from] svpite_core::models::ModelError),
    #[error(transparent)]
    Hamiltonian(#[from] svpite_core::hamiltonian::HamiltonianError),
    #[error(transparent)]
    Pite(#[from] svpite_core::pite::PiteError),
    #[error(transparent)]
    Ed(#[from] svpite_core::ed::EdError),
    #[error(transparent)]
    Dsf(#[from] svpite_core::dsf::DsfError),
    #[error(transparent)]
    State(#[from] svpite_core::state::StateError),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Schema(_) => "schema",
            CliError::Io(_) => "io",
            CliError::Model(_) => "model",
            CliError::Hamiltonian(_) => "hamiltonian",
            CliError::Pite(_) => "pite",
            CliError::Ed(_) => "ed",
            CliError::Dsf(_) => "dsf",
            CliError::State(_) => "state",
            CliError::Internal(_) => "internal",
        }
    }
}
