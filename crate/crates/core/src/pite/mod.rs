//! Probabilistic imaginary-time evolution.
//!
//! One PITE step embeds the non-unitary map `γ·exp(-HΔτ)` into a unitary on
//! the system plus one ancilla; post-selecting the ancilla leaves the system
//! in
//!
//! ```text
//!   |ψ_new⟩ = (1/(2√2))·[(1-i)·e^{iθ₀}·U(s₁Δτ) + (1+i)·e^{-iθ₀}·U†(s₁Δτ)]|ψ⟩
//! ```
//!
//! with `U(t) = exp(-iHt)` approximated by a compiled Trotter program and
//! the derived parameters
//!
//! ```text
//!   κ  = sgn(γ - 1/√2)
//!   θ₀ = κ·arccos[(γ + √(1-γ²))/√2]
//!   s₁ = γ/√(1-γ²) .
//! ```
//!
//! The success probability of the step is `P₀ = ⟨ψ_new|ψ_new⟩`. The
//! state-vector runner tracks it exactly; the shot runner samples it.

pub mod circuit;
pub mod shot;
pub mod statevector;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::state::{InitialState, StateError, StateVector};
use crate::trotter::{TrotterError, TrotterProgram};

pub use circuit::{circuit_step, verify_circuit_equivalence};
pub use shot::{measure_energy, run_shot, MeasurementPlan, ShotResult};
pub use statevector::{run_sv, SVResult};

/// A step's success branch must keep at least this much weight.
pub const VANISHING_NORM_TOL: f64 = 1e-14;

#[derive(Debug, Error)]
pub enum PiteError {
    #[error("gamma must lie strictly between 0 and 1, got {0}")]
    GammaOutOfRange(f64),
    #[error("success branch norm {0:.3e} below {VANISHING_NORM_TOL:.0e}; the post-selected state vanished")]
    VanishingNorm(f64),
    #[error("invalid configuration: {0}")]
    BadConfig(String),
    #[error("measurement group(s) {0} hold terms but received no shots")]
    EmptyGroupAllocation(String),
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Trotter(#[from] TrotterError),
}

/// User-facing algorithm parameters, shared by the state-vector and
/// shot-based runners (`n_shots` is ignored by state-vector runs).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PITEConfig {
    /// Scale of the embedded map `γ·exp(-HΔτ)`.
    pub gamma: f64,
    /// Number of imaginary-time steps.
    pub n_steps: usize,
    /// Imaginary-time step Δτ.
    pub dt: f64,
    /// Trotter order of the real-time evolution, 1 or 2.
    #[serde(default = "default_order")]
    pub order: u32,
    /// Initial state of the evolution.
    pub initial_state: InitialState,
    /// Shot count for the shot-based runner.
    #[serde(default = "default_shots")]
    pub n_shots: usize,
    /// Base seed for random initial states and shot sampling.
    #[serde(default)]
    pub seed: u64,
    /// Trotter repetitions within one PITE step; the step time s₁Δτ is
    /// divided evenly across them.
    #[serde(default = "default_reps")]
    pub reps_per_step: usize,
}

fn default_order() -> u32 {
    1
}
fn default_shots() -> usize {
    10_000
}
fn default_reps() -> usize {
    1
}

impl PITEConfig {
    pub fn validate(&self) -> Result<(), PiteError> {
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(PiteError::GammaOutOfRange(self.gamma));
        }
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(PiteError::BadConfig(format!("dt must be positive, got {}", self.dt)));
        }
        if self.order != 1 && self.order != 2 {
            return Err(PiteError::BadConfig(format!("order must be 1 or 2, got {}", self.order)));
        }
        if self.n_shots < 1 {
            return Err(PiteError::BadConfig("n_shots must be at least 1".into()));
        }
        if self.reps_per_step < 1 {
            return Err(PiteError::BadConfig("reps_per_step must be at least 1".into()));
        }
        Ok(())
    }
}

/// Derived step parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PITEParams {
    pub kappa: i8,
    pub theta0: f64,
    pub s1: f64,
}

/// κ, θ₀ and s₁ from γ; γ = 1/√2 gives the degenerate point κ = 0, θ₀ = 0.
pub fn derive_params(gamma: f64) -> Result<PITEParams, PiteError> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(PiteError::GammaOutOfRange(gamma));
    }
    let root = (1.0 - gamma * gamma).sqrt();
    let kappa = match gamma.partial_cmp(&std::f64::consts::FRAC_1_SQRT_2).unwrap() {
        std::cmp::Ordering::Less => -1i8,
        std::cmp::Ordering::Equal => 0,
        std::cmp::Ordering::Greater => 1,
    };
    // θ₀ = κ·arccos[(γ + √(1-γ²))/√2], computed through the identity
    // (γ + √(1-γ²))/√2 = cos(π/4 - arccos γ): the direct form loses ~8
    // digits next to γ = 1/√2 where its arccos argument grazes 1.
    let theta0 = std::f64::consts::FRAC_PI_4 - gamma.acos();
    Ok(PITEParams {
        kappa,
        theta0,
        s1: gamma / root,
    })
}

/// How the two branch evolutions of a step are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvolveMode {
    Sequential,
    /// Evaluate forward and backward branches concurrently on independent
    /// copies; the combination arithmetic is identical to sequential mode.
    ParallelPair,
}

impl Default for EvolveMode {
    fn default() -> Self {
        EvolveMode::ParallelPair
    }
}

/// Branch combination coefficients of the post-selected (success) state:
/// `c_fw·U|ψ⟩ + c_bw·U†|ψ⟩`.
pub(crate) fn success_coefficients(theta0: f64) -> (Complex64, Complex64) {
    let quarter = 1.0 / (2.0 * std::f64::consts::SQRT_2);
    let e_plus = Complex64::new(0.0, theta0).exp();
    let c_fw = Complex64::new(1.0, -1.0) * e_plus * quarter;
    let c_bw = Complex64::new(1.0, 1.0) * e_plus.conj() * quarter;
    (c_fw, c_bw)
}

/// Evaluate both branch evolutions of one step.
fn branch_states(
    state: &StateVector,
    fw: &TrotterProgram,
    bw: &TrotterProgram,
    mode: EvolveMode,
) -> Result<(StateVector, StateVector), PiteError> {
    let mut a = state.clone();
    let mut b = state.clone();
    match mode {
        EvolveMode::Sequential => {
            crate::state::evolve(&mut a, fw)?;
            crate::state::evolve(&mut b, bw)?;
            Ok((a, b))
        }
        EvolveMode::ParallelPair => {
            let (ra, rb) = rayon::join(
                || crate::state::evolve(&mut a, fw),
                || crate::state::evolve(&mut b, bw),
            );
            ra?;
            rb?;
            Ok((a, b))
        }
    }
}

/// One PITE step: returns the renormalized post-selected state and the
/// step's success probability P₀.
///
/// `fw` must be compiled at total time s₁Δτ and `bw` must be its program
/// adjoint; the step itself only needs θ₀ from `params`.
pub fn pite_step(
    state: &StateVector,
    params: &PITEParams,
    fw: &TrotterProgram,
    bw: &TrotterProgram,
    mode: EvolveMode,
) -> Result<(StateVector, f64), PiteError> {
    let (fw_state, bw_state) = branch_states(state, fw, bw, mode)?;
    let (c_fw, c_bw) = success_coefficients(params.theta0);
    let mut new = StateVector::zeros(state.n_sites())?;
    for ((dst, &a), &b) in new
        .amplitudes_mut()
        .iter_mut()
        .zip(fw_state.amplitudes())
        .zip(bw_state.amplitudes())
    {
        *dst = c_fw * a + c_bw * b;
    }
    let p0 = new.norm_sqr();
    if p0 < VANISHING_NORM_TOL {
        return Err(PiteError::VanishingNorm(p0));
    }
    new.scale(Complex64::new(1.0 / p0.sqrt(), 0.0));
    Ok((new, p0))
}

/// Unnormalized success and failure branches of one step, as produced by the
/// two ancilla outcomes. `‖succ‖² + ‖fail‖² = 1` for a normalized input.
pub fn step_branches(
    state: &StateVector,
    params: &PITEParams,
    fw: &TrotterProgram,
    bw: &TrotterProgram,
) -> Result<(StateVector, StateVector), PiteError> {
    let (fw_state, bw_state) = branch_states(state, fw, bw, EvolveMode::Sequential)?;
    let (c_fw, c_bw) = success_coefficients(params.theta0);
    let mut succ = StateVector::zeros(state.n_sites())?;
    let mut fail = StateVector::zeros(state.n_sites())?;
    for (i, (&a, &b)) in fw_state
        .amplitudes()
        .iter()
        .zip(bw_state.amplitudes())
        .enumerate()
    {
        succ.amplitudes_mut()[i] = c_fw * a + c_bw * b;
        fail.amplitudes_mut()[i] = c_bw * b - c_fw * a;
    }
    Ok((succ, fail))
}

/// Compile the forward step program at total time s₁Δτ, split over
/// `reps_per_step` repetitions.
pub fn compile_step_program(
    h: &crate::hamiltonian::Hamiltonian,
    config: &PITEConfig,
    params: &PITEParams,
) -> Result<TrotterProgram, PiteError> {
    let dt = params.s1 * config.dt / config.reps_per_step as f64;
    Ok(crate::trotter::build_trotter(h, dt, config.order, config.reps_per_step)?)
}
