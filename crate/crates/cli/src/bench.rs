//! Wall-clock benchmark harness: sequential vs concurrent branch evolution
//! over system-size and step-count grids.
//!
//! The harness asserts that the two modes produce identical observables and
//! reports mean ± std over the repetitions. It never asserts a speedup —
//! that depends on the machine.

use std::time::Instant;

use serde::Serialize;
use svpite_core::hamiltonian::Hamiltonian;
use svpite_core::pite::{run_sv, EvolveMode, PITEConfig};

use crate::runner::pite_config;
use crate::spec::{ModelKind, RunSpec};
use crate::CliError;

#[derive(Debug, Clone, Serialize)]
pub struct BenchRecord {
    pub scenario: String,
    pub l: usize,
    pub n_steps: usize,
    pub mode: &'static str,
    pub repetitions: usize,
    pub mean_s: f64,
    pub std_s: f64,
}

fn time_runs(
    h: &Hamiltonian,
    config: &PITEConfig,
    mode: EvolveMode,
    repetitions: usize,
) -> Result<(f64, f64), CliError> {
    let mut times = Vec::with_capacity(repetitions);
    for _ in 0..repetitions {
        let start = Instant::now();
        let r = run_sv(config, h, mode, false)?;
        times.push(start.elapsed().as_secs_f64());
        std::hint::black_box(r.cumulative_success);
    }
    let n = times.len() as f64;
    let mean = times.iter().sum::<f64>() / n;
    let var = times.iter().map(|t| (t - mean) * (t - mean)).sum::<f64>() / n;
    Ok((mean, var.sqrt()))
}

fn chain_for_l(spec: &RunSpec, l: usize) -> Result<Hamiltonian, CliError> {
    let mut model = spec.model.clone();
    if model.kind == ModelKind::Heisenberg2d || model.kind == ModelKind::Custom {
        return Err(CliError::Schema(
            "bench: size grids need a chain model (ising, heisenberg, xy, xxz)".into(),
        ));
    }
    model.l = Some(l);
    model.build()
}

pub fn bench(spec: &RunSpec, seed: u64) -> Result<Vec<BenchRecord>, CliError> {
    let bench_spec = spec.bench.clone().unwrap_or_default();
    if bench_spec.repetitions < 3 {
        return Err(CliError::Schema("bench.repetitions: must be at least 3".into()));
    }
    let pite_spec = spec
        .pite
        .as_ref()
        .ok_or_else(|| CliError::Schema("pite: block required for bench".into()))?;
    let mut records = Vec::new();

    let mut scenarios: Vec<(String, usize, usize)> = Vec::new();
    for &l in &bench_spec.l_grid {
        scenarios.push(("size_sweep".into(), l, bench_spec.fixed_n_steps));
    }
    for &steps in &bench_spec.steps_grid {
        scenarios.push(("step_sweep".into(), bench_spec.fixed_l, steps));
    }

    for (scenario, l, n_steps) in scenarios {
        let h = chain_for_l(spec, l)?;
        let mut config = pite_config(pite_spec, seed);
        config.n_steps = n_steps;
        config.initial_state = spec.model.resolve_initial_state(&config.initial_state);

        // Observable equality across modes, checked once per scenario.
        let seq = run_sv(&config, &h, EvolveMode::Sequential, false)?;
        let par = run_sv(&config, &h, EvolveMode::ParallelPair, false)?;
        for (a, b) in seq.energies.iter().zip(&par.energies) {
            if (a - b).abs() > 1e-12 {
                return Err(CliError::Internal(format!(
                    "bench: modes disagree at L={l}, n_steps={n_steps}: {a} vs {b}"
                )));
            }
        }

        for (mode, label) in [
            (EvolveMode::Sequential, "sequential"),
            (EvolveMode::ParallelPair, "parallel_pair"),
        ] {
            let (mean_s, std_s) = time_runs(&h, &config, mode, bench_spec.repetitions)?;
            records.push(BenchRecord {
                scenario: scenario.clone(),
                l,
                n_steps,
                mode: label,
                repetitions: bench_spec.repetitions,
                mean_s,
                std_s,
            });
        }
    }
    Ok(records)
}
