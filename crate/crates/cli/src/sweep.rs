//! γ-sweep harness: one state-vector run per γ against a shared model, with
//! infidelities against the Lanczos reference when available.

use serde::Serialize;
use svpite_core::ed::lanczos_ground;
use svpite_core::pite::{run_sv, EvolveMode};
use svpite_core::state::{inner, StateVector};

use crate::runner::{ed_config, pite_config};
use crate::spec::RunSpec;
use crate::CliError;

#[derive(Debug, Clone, Serialize)]
pub struct SweepRecord {
    pub gamma: f64,
    pub final_energy_per_site: f64,
    pub p0_series: Vec<f64>,
    pub cumulative_success: f64,
    /// 1 - |⟨ψ_ED|ψ_sv⟩|², present when the reference was computed. For a
    /// degenerate ground level this measures overlap with the one member
    /// Lanczos returned.
    pub infidelity: Option<f64>,
}

/// Run the sweep. `gammas` overrides the specification's list.
pub fn sweep_gamma(
    spec: &RunSpec,
    gammas: Option<Vec<f64>>,
    seed: u64,
) -> Result<Vec<SweepRecord>, CliError> {
    let sweep_spec = spec.sweep.clone().unwrap_or(crate::spec::SweepSpec {
        gammas: None,
        ed_reference: true,
    });
    let mut gammas = gammas
        .or(sweep_spec.gammas)
        .ok_or_else(|| CliError::Schema("sweep.gammas: no γ list provided".into()))?;
    gammas.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let h = spec.model.build()?;
    let pite_spec = spec
        .pite
        .as_ref()
        .ok_or_else(|| CliError::Schema("pite: block required for sweeps".into()))?;

    let reference: Option<StateVector> = if sweep_spec.ed_reference {
        let config = ed_config(&spec.ed.clone().unwrap_or_default(), seed);
        Some(lanczos_ground(&h, &config)?.ground_vector)
    } else {
        None
    };

    let mut records = Vec::with_capacity(gammas.len());
    for gamma in gammas {
        let mut config = pite_config(pite_spec, seed);
        config.gamma = gamma;
        config.initial_state = spec.model.resolve_initial_state(&config.initial_state);
        let r = run_sv(&config, &h, EvolveMode::ParallelPair, reference.is_some())?;
        let infidelity = reference.as_ref().map(|ed_state| {
            let fin = r.final_state.as_ref().expect("kept for infidelity");
            1.0 - inner(ed_state, fin).norm_sqr()
        });
        records.push(SweepRecord {
            gamma,
            final_energy_per_site: *r.energies.last().unwrap(),
            p0_series: r.probabilities,
            cumulative_success: r.cumulative_success,
            infidelity,
        });
    }
    Ok(records)
}

/// Parse a γ-list argument: either `start:stop:step` (inclusive) or a
/// comma-separated list.
pub fn parse_gammas(text: &str) -> Result<Vec<f64>, CliError> {
    let bad = |msg: &str| CliError::Schema(format!("--gammas: {msg}"));
    if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 3 {
            return Err(bad("expected start:stop:step"));
        }
        let nums: Vec<f64> = parts
            .iter()
            .map(|p| p.parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| bad(&format!("{e}")))?;
        let (start, stop, step) = (nums[0], nums[1], nums[2]);
        if step <= 0.0 || stop < start {
            return Err(bad("need step > 0 and stop >= start"));
        }
        let count = ((stop - start) / step + 0.5).floor() as usize;
        let mut out = Vec::with_capacity(count + 1);
        for k in 0..=count {
            let g = start + k as f64 * step;
            if g <= stop + step * 1e-9 {
                out.push(g);
            }
        }
        Ok(out)
    } else {
        text.split(',')
            .map(|p| p.trim().parse::<f64>().map_err(|e| bad(&format!("{e}"))))
            .collect()
    }
}
