//! Sweep and bench harness behavior beyond the CLI surface.

use svpite_cli::spec::parse_runspec_str;
use svpite_cli::sweep::sweep_gamma;
use svpite_core::hamiltonian::BoundaryCondition;
use svpite_core::models;
use svpite_core::pite::{run_sv, EvolveMode, PITEConfig};
use svpite_core::state::InitialState;

const SWEEP_SPEC: &str = r#"{
  "model": {"type": "heisenberg", "L": 6, "J": 0.25, "bc": "PBC"},
  "algorithm": "sweep",
  "pite": {"gamma": 0.6, "n_steps": 12, "dt": 0.2, "initial_state": "singlet"},
  "sweep": {"ed_reference": true},
  "seed": 3
}"#;

#[test]
fn single_gamma_sweep_matches_direct_run() {
    let spec = parse_runspec_str(SWEEP_SPEC).unwrap();
    let records = sweep_gamma(&spec, Some(vec![0.6]), 3).unwrap();
    assert_eq!(records.len(), 1);

    let h = models::heisenberg(6, 0.25, BoundaryCondition::Pbc).unwrap();
    let config = PITEConfig {
        gamma: 0.6,
        n_steps: 12,
        dt: 0.2,
        order: 1,
        initial_state: InitialState::Singlet,
        n_shots: 10_000,
        seed: 3,
        reps_per_step: 1,
    };
    let direct = run_sv(&config, &h, EvolveMode::ParallelPair, false).unwrap();
    assert_eq!(records[0].p0_series, direct.probabilities);
    assert_eq!(
        records[0].final_energy_per_site,
        *direct.energies.last().unwrap()
    );
    assert_eq!(records[0].cumulative_success, direct.cumulative_success);
    let infid = records[0].infidelity.unwrap();
    assert!((0.0..=1.0).contains(&infid));
}

#[test]
fn sweep_records_come_back_sorted() {
    let spec = parse_runspec_str(SWEEP_SPEC).unwrap();
    let records = sweep_gamma(&spec, Some(vec![0.62, 0.55, 0.6]), 3).unwrap();
    let gammas: Vec<f64> = records.iter().map(|r| r.gamma).collect();
    assert_eq!(gammas, vec![0.55, 0.6, 0.62]);
}

#[test]
fn bench_rejects_too_few_repetitions() {
    let text = SWEEP_SPEC
        .replace("\"algorithm\": \"sweep\"", "\"algorithm\": \"bench\"")
        .replace(
            "\"sweep\": {\"ed_reference\": true}",
            "\"bench\": {\"repetitions\": 2}",
        );
    let err = parse_runspec_str(&text).unwrap_err();
    assert!(err.to_string().contains("repetitions"), "{err}");
}

#[test]
fn bench_emits_both_modes_per_scenario() {
    let text = SWEEP_SPEC
        .replace("\"algorithm\": \"sweep\"", "\"algorithm\": \"bench\"")
        .replace(
            "\"sweep\": {\"ed_reference\": true}",
            "\"bench\": {\"l_grid\": [4, 6], \"fixed_n_steps\": 4, \"steps_grid\": [4], \"fixed_l\": 6, \"repetitions\": 3}",
        );
    let spec = parse_runspec_str(&text).unwrap();
    let records = svpite_cli::bench::bench(&spec, 1).unwrap();
    // (2 sizes + 1 step point) × 2 modes.
    assert_eq!(records.len(), 6);
    assert!(records.iter().all(|r| r.repetitions == 3));
    assert!(records.iter().all(|r| r.mean_s >= 0.0 && r.std_s >= 0.0));
    let seq = records.iter().filter(|r| r.mode == "sequential").count();
    assert_eq!(seq, 3);
}
