//! Rotation-kernel and operator-export checks against dense Kronecker
//! oracles.

mod common;

use common::*;
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use svpite_core::hamiltonian::{BoundaryCondition, Hamiltonian, TermsValue};
use svpite_core::pauli::{Pauli, PauliString, PauliSumOperator, PauliTerm};
use svpite_core::state::{
    apply_pauli_rotation, apply_pauli_sum, init_state, InitialState, StateVector,
};

#[test]
fn to_matrix_matches_kron_oracle_on_random_dicts() {
    let mut rng = ChaCha12Rng::seed_from_u64(2024);
    for _ in 0..40 {
        let n = 3;
        let mut op = PauliSumOperator::new(n);
        for _ in 0..rng.gen_range(1..6) {
            let string = random_string(&mut rng, n);
            let coeff = c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
            op.add_term(PauliTerm::new(string, coeff)).unwrap();
        }
        let dense = op.to_matrix_dense().unwrap();
        let oracle = dense_operator(&op);
        let max = (dense - oracle).iter().map(|d| d.norm()).fold(0.0, f64::max);
        assert!(max <= 1e-12, "max deviation {max}");
    }
}

#[test]
fn terms_dict_matrix_matches_kron_oracle() {
    // Random 3-site dictionaries through the Hamiltonian constructor.
    let mut rng = ChaCha12Rng::seed_from_u64(55);
    for _ in 0..20 {
        let n = 3usize;
        let mut dict: Vec<(String, TermsValue)> = Vec::new();
        let singles = ["X", "Y", "Z"];
        let doubles = ["XX", "YY", "ZZ"];
        let key = singles[rng.gen_range(0..3)];
        dict.push((
            key.to_string(),
            TermsValue::PerSite((0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()),
        ));
        let key = doubles[rng.gen_range(0..3)];
        let mut couplings = vec![vec![0.0; n]; n];
        for _ in 0..rng.gen_range(1..4) {
            let i = rng.gen_range(0..n);
            let j = (i + rng.gen_range(1..n)) % n;
            couplings[i][j] = rng.gen_range(-1.0..1.0);
        }
        dict.push((key.to_string(), TermsValue::Couplings(couplings)));

        let h = Hamiltonian::from_terms_dict(n, dict).unwrap();
        let dense = h.to_matrix_dense().unwrap();
        let oracle = dense_operator(h.as_pauli_sum());
        let max = (dense - oracle).iter().map(|d| d.norm()).fold(0.0, f64::max);
        assert!(max <= 1e-12, "max deviation {max}");
    }
}

#[test]
fn two_site_heisenberg_matrix_has_singlet_triplet_spectrum() {
    // J = 1/4 on one open bond: eigenvalues {-3/4, 1/4, 1/4, 1/4}.
    let h = svpite_core::models::heisenberg(2, 0.25, BoundaryCondition::Obc).unwrap();
    let m = h.to_matrix_dense().unwrap();
    let (vals, _) = svpite_core::linalg::hermitian_eigen(&m);
    let expect = [-0.75, 0.25, 0.25, 0.25];
    for (got, want) in vals.iter().zip(expect) {
        assert!((got - want).abs() <= 1e-12, "{vals:?}");
    }
}

#[test]
fn hamiltonian_matrices_are_hermitian() {
    let mut j_c = vec![vec![0.0; 3]; 3];
    j_c[0][2] = 0.4;
    j_c[1][2] = -0.3;
    let cases = vec![
        Hamiltonian::from_terms_dict(
            3,
            [
                ("ZZ".to_string(), TermsValue::UniformWithBc(-1.0, BoundaryCondition::Pbc)),
                ("X".to_string(), TermsValue::Scalar(0.7)),
                ("Y".to_string(), TermsValue::PerSite(vec![0.1, -0.2, 0.3])),
            ],
        )
        .unwrap(),
        Hamiltonian::from_terms_dict(3, [("XX".to_string(), TermsValue::Couplings(j_c))]).unwrap(),
    ];
    for h in cases {
        let m = h.to_matrix_dense().unwrap();
        let dev = (&m - m.adjoint()).iter().map(|d| d.norm()).fold(0.0, f64::max);
        assert!(dev <= 1e-12);
    }
}

#[test]
fn kernel_matches_dense_exponential_for_every_string_on_four_sites() {
    // Exhaustive over supports and labels at L = 4, one (θ, ψ) draw each.
    let n = 4usize;
    let mut rng = ChaCha12Rng::seed_from_u64(7);
    let mut checked = 0usize;
    for support in 1u8..16 {
        let sites: Vec<usize> = (0..n).filter(|&s| support & (1 << s) != 0).collect();
        let combos = 3usize.pow(sites.len() as u32);
        for combo in 0..combos {
            let mut labels = Vec::new();
            let mut rem = combo;
            for _ in 0..sites.len() {
                labels.push([Pauli::X, Pauli::Y, Pauli::Z][rem % 3]);
                rem /= 3;
            }
            let string = PauliString::new(&labels, &sites, n).unwrap();
            let theta: f64 = rng.gen_range(-3.0..3.0);
            let state = random_state(&mut rng, n);

            let mut kernel_out = state.clone();
            apply_pauli_rotation(&mut kernel_out, &string, theta).unwrap();

            let u = dense_expm(&dense_string(&string), theta);
            let oracle_out = apply_dense(&u, &state);

            let dev = max_abs_diff(&kernel_out, &oracle_out);
            assert!(dev <= 1e-12, "string {string}, θ = {theta}: deviation {dev}");
            checked += 1;
        }
    }
    assert_eq!(checked, 255);
}

#[test]
fn kernel_matches_dense_exponential_on_random_draws() {
    let mut rng = ChaCha12Rng::seed_from_u64(99);
    for _ in 0..100 {
        let n = rng.gen_range(1..=4);
        let string = random_string(&mut rng, n);
        let theta: f64 = rng.gen_range(-3.0..3.0);
        let state = random_state(&mut rng, n);
        let mut kernel_out = state.clone();
        apply_pauli_rotation(&mut kernel_out, &string, theta).unwrap();
        let oracle_out = apply_dense(&dense_expm(&dense_string(&string), theta), &state);
        assert!(max_abs_diff(&kernel_out, &oracle_out) <= 1e-12);
    }
}

#[test]
fn apply_pauli_sum_is_linear() {
    let mut rng = ChaCha12Rng::seed_from_u64(3);
    let n = 3;
    let mut op = PauliSumOperator::new(n);
    for _ in 0..4 {
        op.add_term(PauliTerm::new(random_string(&mut rng, n), c(0.3, -0.1)))
            .unwrap();
    }
    let a = random_state(&mut rng, n);
    let b = random_state(&mut rng, n);
    let (alpha, beta) = (c(0.6, 0.2), c(-0.4, 0.9));

    let mut combo = StateVector::zeros(n).unwrap();
    for i in 0..combo.dim() {
        combo.amplitudes_mut()[i] = alpha * a.amplitudes()[i] + beta * b.amplitudes()[i];
    }
    let lhs = apply_pauli_sum(&combo, &op).unwrap();
    let ra = apply_pauli_sum(&a, &op).unwrap();
    let rb = apply_pauli_sum(&b, &op).unwrap();
    for i in 0..lhs.dim() {
        let rhs = alpha * ra.amplitudes()[i] + beta * rb.amplitudes()[i];
        assert!((lhs.amplitudes()[i] - rhs).norm() <= 1e-12);
    }
}

#[test]
fn evolve_tracks_dense_propagator_on_heisenberg_chain() {
    // 100 first-order reps of dt = 0.01 against exp(-iHt) at t = 1.
    let h = svpite_core::models::heisenberg(4, 0.25, BoundaryCondition::Pbc).unwrap();
    let program = svpite_core::trotter::build_trotter(&h, 0.01, 1, 100).unwrap();
    let mut state = init_state(&InitialState::Neel, 4, 0).unwrap();
    let initial_energy = svpite_core::state::expectation(&state, &h);
    svpite_core::state::evolve(&mut state, &program).unwrap();

    assert!((state.norm() - 1.0).abs() <= 1e-12);
    let final_energy = svpite_core::state::expectation(&state, &h);
    assert!((final_energy - initial_energy).abs() <= 1e-3);

    let u = dense_expm(&dense_operator(h.as_pauli_sum()), 1.0);
    let oracle = apply_dense(&u, &init_state(&InitialState::Neel, 4, 0).unwrap());
    // First-order Trotter at dt = 0.01 stays within the coarse envelope.
    assert!(max_abs_diff(&state, &oracle) <= 5e-2);
}

fn arb_string(max_sites: usize) -> impl Strategy<Value = (PauliString, usize)> {
    (1..=max_sites)
        .prop_flat_map(|n| {
            (
                proptest::collection::vec((0..3u8, any::<bool>()), n),
                Just(n),
            )
        })
        .prop_filter_map("at least one site", |(picks, n)| {
            let mut labels = Vec::new();
            let mut sites = Vec::new();
            for (i, (label, keep)) in picks.iter().enumerate() {
                if *keep {
                    labels.push([Pauli::X, Pauli::Y, Pauli::Z][*label as usize]);
                    sites.push(i);
                }
            }
            if sites.is_empty() {
                None
            } else {
                Some((PauliString::new(&labels, &sites, n).unwrap(), n))
            }
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Pauli strings square to the identity.
    #[test]
    fn pauli_string_is_self_inverse((string, _n) in arb_string(4)) {
        let m = dense_string(&string);
        let sq = &m * &m;
        let dim = sq.nrows();
        let dev = (&sq - DMatrix::<Complex64>::identity(dim, dim))
            .iter()
            .map(|d| d.norm())
            .fold(0.0, f64::max);
        prop_assert!(dev <= 1e-12);
    }

    /// Rotations preserve the norm, whatever the string and angle.
    #[test]
    fn rotations_preserve_norm((string, n) in arb_string(4), theta in -6.0f64..6.0, seed in any::<u64>()) {
        let mut state = init_state(&InitialState::Random, n, seed).unwrap();
        apply_pauli_rotation(&mut state, &string, theta).unwrap();
        prop_assert!((state.norm() - 1.0).abs() <= 1e-12);
    }
}
