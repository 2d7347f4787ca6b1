//! Explicit (L+1)-qubit realization of one PITE step.
//!
//! The production runners never build this circuit; it exists to check that
//! the two-branch state-vector update and the ancilla-based circuit are the
//! same quantum channel. The gate sequence on the ancilla (qubit index L,
//! prepared in |0⟩) is
//!
//! ```text
//!   W  →  U† on ancilla 0 / U on ancilla 1  →  Rz-type phase
//!   diag(e^{-iθ₀}, e^{+iθ₀})  →  W  →  measure
//! ```
//!
//! with `W = [[1, -i], [1, i]]/√2`. Projecting the ancilla on |0⟩ reproduces
//! the two-branch update exactly, up to the global phase e^{-iπ/4}.

use num_complex::Complex64;

use crate::hamiltonian::Hamiltonian;
use crate::pauli::PauliString;
use crate::state::{apply_pauli_rotation_filtered, apply_single_qubit_gate, inner, StateVector};
use crate::trotter::TrotterProgram;

use super::{compile_step_program, derive_params, step_branches, PITEConfig, PITEParams, PiteError};

/// Both post-measurement branches of the explicit circuit, unnormalized, as
/// L-qubit states.
#[derive(Debug, Clone)]
pub struct CircuitOutcome {
    pub success: StateVector,
    pub failure: StateVector,
    /// ‖success‖²: probability of the kept ancilla outcome.
    pub p0: f64,
    /// ‖failure‖²: probability of the discarded outcome.
    pub p1: f64,
}

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

fn w_gate() -> [[Complex64; 2]; 2] {
    [
        [Complex64::new(FRAC_1_SQRT_2, 0.0), Complex64::new(0.0, -FRAC_1_SQRT_2)],
        [Complex64::new(FRAC_1_SQRT_2, 0.0), Complex64::new(0.0, FRAC_1_SQRT_2)],
    ]
}

fn phase_gate(theta0: f64) -> [[Complex64; 2]; 2] {
    [
        [Complex64::new(0.0, -theta0).exp(), Complex64::new(0.0, 0.0)],
        [Complex64::new(0.0, 0.0), Complex64::new(0.0, theta0).exp()],
    ]
}

/// Apply a program to the system register, conditioned on the ancilla bit.
fn apply_controlled_program(
    full: &mut StateVector,
    program: &TrotterProgram,
    ancilla_mask: u64,
    ancilla_value: u64,
) -> Result<(), PiteError> {
    let n = full.n_sites();
    for _ in 0..program.reps() {
        for (string, angle) in program.rotations() {
            let labels: Vec<_> = string.labels().collect();
            let sites: Vec<_> = string.sites().collect();
            let embedded = PauliString::new(&labels, &sites, n).expect("embedding widens the register");
            apply_pauli_rotation_filtered(full, &embedded, *angle, ancilla_mask, ancilla_value)?;
        }
    }
    Ok(())
}

/// Run the explicit one-step circuit on `state` and split the register by
/// ancilla outcome.
pub fn circuit_step(
    state: &StateVector,
    params: &PITEParams,
    fw: &TrotterProgram,
) -> Result<CircuitOutcome, PiteError> {
    let l = state.n_sites();
    let dim = state.dim();
    let mut full = StateVector::zeros(l + 1)?;
    full.amplitudes_mut()[..dim].copy_from_slice(state.amplitudes());

    let ancilla = l;
    let ancilla_mask = 1u64 << ancilla;

    apply_single_qubit_gate(&mut full, ancilla, w_gate());
    apply_controlled_program(&mut full, fw, ancilla_mask, ancilla_mask)?;
    apply_controlled_program(&mut full, &fw.adjoint(), ancilla_mask, 0)?;
    apply_single_qubit_gate(&mut full, ancilla, phase_gate(params.theta0));
    apply_single_qubit_gate(&mut full, ancilla, w_gate());

    let amps = full.amplitudes();
    let success = StateVector::from_amplitudes(l, amps[..dim].to_vec())?;
    let failure = StateVector::from_amplitudes(l, amps[dim..].to_vec())?;
    let p0 = success.norm_sqr();
    let p1 = failure.norm_sqr();
    Ok(CircuitOutcome { success, failure, p0, p1 })
}

/// Infidelity `1 - |⟨a|b⟩|²/(‖a‖²‖b‖²)` between the circuit's post-selected
/// state and the two-branch update, for one (H, ψ, config) draw.
pub fn verify_circuit_equivalence(
    h: &Hamiltonian,
    state: &StateVector,
    config: &PITEConfig,
) -> Result<f64, PiteError> {
    let params = derive_params(config.gamma)?;
    let fw = compile_step_program(h, config, &params)?;
    let bw = fw.adjoint();

    let circuit = circuit_step(state, &params, &fw)?;
    let (reference, _) = step_branches(state, &params, &fw, &bw)?;

    let overlap = inner(&circuit.success, &reference).norm_sqr();
    let norms = circuit.success.norm_sqr() * reference.norm_sqr();
    Ok(1.0 - overlap / norms)
}
