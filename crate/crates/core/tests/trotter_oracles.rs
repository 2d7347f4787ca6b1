//! Trotter error scaling and exactness against dense exponentials.

mod common;

use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use svpite_core::hamiltonian::{BoundaryCondition, Hamiltonian};
use svpite_core::state::{evolve, init_state, InitialState};
use svpite_core::trotter::build_trotter;

fn program_deviation(h: &Hamiltonian, dt: f64, order: u32, reps: usize, seed: u64) -> f64 {
    let n = h.n_sites();
    let state = init_state(&InitialState::Random, n, seed).unwrap();
    let mut evolved = state.clone();
    let program = build_trotter(h, dt, order, reps).unwrap();
    evolve(&mut evolved, &program).unwrap();
    let u = dense_expm(&dense_operator(h.as_pauli_sum()), dt * reps as f64);
    max_abs_diff(&evolved, &apply_dense(&u, &state))
}

#[test]
fn single_term_program_is_exact_for_any_dt() {
    let mut h = Hamiltonian::new(2);
    h.add_term("ZZ", 0.7, &[0, 1]).unwrap();
    for &dt in &[0.01, 0.5, 3.0] {
        assert!(program_deviation(&h, dt, 1, 1, 5) <= 1e-12, "dt = {dt}");
    }
}

#[test]
fn commuting_all_z_hamiltonians_are_exact() {
    let mut rng = ChaCha12Rng::seed_from_u64(11);
    for n in 2..=4usize {
        let mut h = Hamiltonian::new(n);
        for site in 0..n {
            h.add_term("Z", rng.gen_range(-1.0..1.0), &[site]).unwrap();
        }
        for i in 0..n {
            for j in (i + 1)..n {
                h.add_term("ZZ", rng.gen_range(-1.0..1.0), &[i, j]).unwrap();
            }
        }
        for order in [1, 2] {
            let dev = program_deviation(&h, 0.7, order, 2, n as u64);
            assert!(dev <= 1e-12, "L = {n}, order {order}: {dev}");
        }
    }
}

#[test]
fn order_one_error_halves_with_dt() {
    // H = Z₀ + X₀: non-commuting pair, error per unit time is O(dt).
    let mut h = Hamiltonian::new(1);
    h.add_term("Z", 1.0, &[0]).unwrap();
    h.add_term("X", 1.0, &[0]).unwrap();
    // Same total time t = 0.4, halved step doubled reps.
    let coarse = program_deviation(&h, 0.04, 1, 10, 1);
    let fine = program_deviation(&h, 0.02, 1, 20, 1);
    let ratio = coarse / fine;
    assert!((1.7..=2.3).contains(&ratio), "ratio {ratio}");
}

#[test]
fn order_two_per_step_error_scales_cubically() {
    let h = svpite_core::models::xxz(2, 0.5, 0.8, BoundaryCondition::Obc).unwrap();
    let mut h = h;
    h.add_uniform_terms("X", 0.3, None).unwrap();
    // Single step: error ~ dt³, so dt → dt/4 shrinks it ~64×.
    let coarse = program_deviation(&h, 0.4, 2, 1, 2);
    let fine = program_deviation(&h, 0.1, 2, 1, 2);
    let ratio = coarse / fine;
    assert!((40.0..=90.0).contains(&ratio), "ratio {ratio}");
}

#[test]
fn adjoint_inverts_the_program_on_states() {
    let h = svpite_core::models::heisenberg(4, 0.25, BoundaryCondition::Pbc).unwrap();
    let program = build_trotter(&h, 0.3, 1, 2).unwrap();
    let state = init_state(&InitialState::Random, 4, 21).unwrap();
    let mut round = state.clone();
    evolve(&mut round, &program).unwrap();
    assert!((round.norm() - 1.0).abs() <= 1e-12);
    evolve(&mut round, &program.adjoint()).unwrap();
    assert!(max_abs_diff(&round, &state) <= 1e-12);
}
