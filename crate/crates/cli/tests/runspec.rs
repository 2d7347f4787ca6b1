//! Specification schema: accepted documents, rejected documents, and the
//! config-echo round trip.

use svpite_cli::spec::{Algorithm, ModelKind};
use svpite_cli::{parse_runspec_str, CliError};

const XXZ_FIELD_SPEC: &str = r#"{
  "model": {
    "type": "xxz", "L": 8, "J": 0.25, "Delta": 0.7071067811865476, "bc": "PBC",
    "extra_uniform_terms": [{"key": "Z", "coeff": 0.2}]
  },
  "algorithm": "shot",
  "pite": {
    "gamma": 0.72, "n_steps": 80, "dt": 0.2, "order": 1,
    "initial_state": "singlet", "n_shots": 10000
  },
  "seed": 11
}"#;

#[test]
fn xxz_field_spec_is_valid() {
    let spec = parse_runspec_str(XXZ_FIELD_SPEC).unwrap();
    assert_eq!(spec.algorithm, Algorithm::Shot);
    assert_eq!(spec.model.kind, ModelKind::Xxz);
    let h = spec.model.build().unwrap();
    // 3 bond families × 8 bonds + 8 field terms.
    assert_eq!(h.n_terms(), 32);
    let pite = spec.pite.unwrap();
    assert_eq!(pite.n_shots, 10_000);
    assert_eq!(pite.order, 1);
    assert_eq!(pite.reps_per_step, 1);
}

#[test]
fn gamma_out_of_range_is_a_schema_error_with_path() {
    let text = XXZ_FIELD_SPEC.replace("\"gamma\": 0.72", "\"gamma\": 1.5");
    let err = parse_runspec_str(&text).unwrap_err();
    match err {
        CliError::Schema(msg) => assert!(msg.contains("pite.gamma"), "{msg}"),
        other => panic!("wrong error {other:?}"),
    }
}

#[test]
fn missing_chain_length_is_rejected() {
    let text = XXZ_FIELD_SPEC.replace("\"L\": 8, ", "");
    let err = parse_runspec_str(&text).unwrap_err();
    match err {
        CliError::Schema(msg) => assert!(msg.contains("model.L"), "{msg}"),
        other => panic!("wrong error {other:?}"),
    }
}

#[test]
fn unknown_keys_are_rejected() {
    let text = XXZ_FIELD_SPEC.replace("\"seed\": 11", "\"seed\": 11, \"extra\": 1");
    assert!(matches!(parse_runspec_str(&text), Err(CliError::Schema(_))));

    let text = XXZ_FIELD_SPEC.replace("\"order\": 1,", "\"order\": 1, \"typo_field\": 2,");
    assert!(matches!(parse_runspec_str(&text), Err(CliError::Schema(_))));
}

#[test]
fn unknown_model_and_algorithm_are_rejected() {
    let text = XXZ_FIELD_SPEC.replace("\"type\": \"xxz\"", "\"type\": \"kagome\"");
    assert!(matches!(parse_runspec_str(&text), Err(CliError::Schema(_))));
    let text = XXZ_FIELD_SPEC.replace("\"algorithm\": \"shot\"", "\"algorithm\": \"vqe\"");
    assert!(matches!(parse_runspec_str(&text), Err(CliError::Schema(_))));
}

#[test]
fn defaults_are_applied() {
    let text = r#"{
      "model": {"type": "heisenberg", "L": 4, "J": 0.25, "bc": "OBC"},
      "algorithm": "sv",
      "pite": {"gamma": 0.6, "n_steps": 5, "dt": 0.1, "initial_state": "singlet"}
    }"#;
    let spec = parse_runspec_str(text).unwrap();
    let pite = spec.pite.unwrap();
    assert_eq!(pite.order, 1);
    assert_eq!(pite.reps_per_step, 1);
    assert_eq!(pite.n_shots, 10_000);
    assert_eq!(spec.seed, 0);
}

#[test]
fn config_echo_round_trips() {
    let spec = parse_runspec_str(XXZ_FIELD_SPEC).unwrap();
    let echoed = serde_json::to_string(&spec).unwrap();
    let back = parse_runspec_str(&echoed).unwrap();
    assert_eq!(spec, back);
}

#[test]
fn dsf_needs_its_block_and_sv_source_needs_pite() {
    let text = r#"{
      "model": {"type": "heisenberg", "L": 4, "J": 0.25, "bc": "PBC"},
      "algorithm": "dsf"
    }"#;
    assert!(matches!(parse_runspec_str(text), Err(CliError::Schema(_))));

    let text = r#"{
      "model": {"type": "heisenberg", "L": 4, "J": 0.25, "bc": "PBC"},
      "algorithm": "dsf",
      "dsf": {"source": "sv", "dt_rt": 0.05, "n_t": 16}
    }"#;
    let err = parse_runspec_str(text).unwrap_err();
    match err {
        CliError::Schema(msg) => assert!(msg.contains("pite"), "{msg}"),
        other => panic!("wrong error {other:?}"),
    }
}

#[test]
fn custom_model_terms_dictionary() {
    let text = r#"{
      "model": {
        "type": "custom", "L": 4,
        "terms": {
          "ZZ": {"uniform": -1.0, "bc": "PBC"},
          "X": -1.0
        }
      },
      "algorithm": "ed"
    }"#;
    let spec = parse_runspec_str(text).unwrap();
    let h = spec.model.build().unwrap();
    assert_eq!(h.n_terms(), 8);

    // Mixed keys stay rejected at the Hamiltonian level.
    let text = text.replace("\"X\": -1.0", "\"XY\": -1.0");
    let spec = parse_runspec_str(&text).unwrap();
    assert!(spec.model.build().is_err());
}

#[test]
fn initial_state_amplitude_array_form() {
    let text = r#"{
      "model": {"type": "heisenberg", "L": 2, "J": 0.25, "bc": "OBC"},
      "algorithm": "sv",
      "pite": {
        "gamma": 0.6, "n_steps": 1, "dt": 0.1,
        "initial_state": [[0.0, 0.0], [0.7071067811865476, 0.0], [-0.7071067811865476, 0.0], [0.0, 0.0]]
      }
    }"#;
    let spec = parse_runspec_str(text).unwrap();
    match &spec.pite.unwrap().initial_state {
        svpite_core::state::InitialState::Custom(amps) => assert_eq!(amps.len(), 4),
        other => panic!("wrong variant {other:?}"),
    }
}

#[test]
fn neel_on_2d_models_resolves_to_the_checkerboard() {
    let text = r#"{
      "model": {"type": "heisenberg_2d", "Lx": 4, "Ly": 4, "J": 0.25, "bc": "PBC"},
      "algorithm": "sv",
      "pite": {"gamma": 0.6, "n_steps": 1, "dt": 0.1, "initial_state": "neel"}
    }"#;
    let spec = parse_runspec_str(text).unwrap();
    let resolved = spec
        .model
        .resolve_initial_state(&svpite_core::state::InitialState::Neel);
    match resolved {
        svpite_core::state::InitialState::Custom(amps) => {
            // Sites with odd x+y are flipped: bits 1,3,4,6,9,11,12,14.
            let expect: u64 = [1, 3, 4, 6, 9, 11, 12, 14].iter().map(|b| 1u64 << b).sum();
            let hot: Vec<usize> = amps
                .iter()
                .enumerate()
                .filter(|(_, &(re, im))| re != 0.0 || im != 0.0)
                .map(|(i, _)| i)
                .collect();
            assert_eq!(hot, vec![expect as usize]);
        }
        other => panic!("expected checkerboard amplitudes, got {other:?}"),
    }
    // Chains keep the literal alternation.
    let chain = parse_runspec_str(
        r#"{
          "model": {"type": "heisenberg", "L": 4, "J": 0.25, "bc": "PBC"},
          "algorithm": "sv",
          "pite": {"gamma": 0.6, "n_steps": 1, "dt": 0.1, "initial_state": "neel"}
        }"#,
    )
    .unwrap();
    let resolved = chain
        .model
        .resolve_initial_state(&svpite_core::state::InitialState::Neel);
    assert_eq!(resolved, svpite_core::state::InitialState::Neel);
}
