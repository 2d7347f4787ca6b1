//! State-vector PITE runner: exact per-step energies and success
//! probabilities, corresponding to the infinite-shot limit.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::hamiltonian::Hamiltonian;
use crate::state::{expectation, init_state, StateVector};

use super::{compile_step_program, derive_params, pite_step, EvolveMode, PITEConfig, PiteError};

/// Per-step observables of a state-vector run. Entry 0 of both series is the
/// initial state: energy of the input state and success probability 1 by
/// convention.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SVResult {
    /// Energy per site after each step (length `n_steps + 1`).
    pub energies: Vec<f64>,
    /// Conditional success probability of each step (length `n_steps + 1`).
    pub probabilities: Vec<f64>,
    /// Product of the per-step success probabilities.
    pub cumulative_success: f64,
    /// Final normalized state, when requested.
    #[serde(skip)]
    pub final_state: Option<StateVector>,
    /// Configuration echo.
    pub config: PITEConfig,
    pub wall_time_s: f64,
}

/// Run the state-vector PITE loop. The forward/backward programs are
/// compiled once and reused for every step.
pub fn run_sv(
    config: &PITEConfig,
    h: &Hamiltonian,
    mode: EvolveMode,
    keep_final_state: bool,
) -> Result<SVResult, PiteError> {
    config.validate()?;
    let start = Instant::now();
    let l = h.n_sites();
    let params = derive_params(config.gamma)?;
    let fw = compile_step_program(h, config, &params)?;
    let bw = fw.adjoint();

    let mut state = init_state(&config.initial_state, l, config.seed)?;
    let mut energies = Vec::with_capacity(config.n_steps + 1);
    let mut probabilities = Vec::with_capacity(config.n_steps + 1);
    energies.push(expectation(&state, h) / l as f64);
    probabilities.push(1.0);

    for _ in 0..config.n_steps {
        let (next, p0) = pite_step(&state, &params, &fw, &bw, mode)?;
        state = next;
        energies.push(expectation(&state, h) / l as f64);
        probabilities.push(p0);
    }

    let cumulative_success = probabilities[1..].iter().product();
    Ok(SVResult {
        energies,
        probabilities,
        cumulative_success,
        final_state: keep_final_state.then_some(state),
        config: config.clone(),
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}
