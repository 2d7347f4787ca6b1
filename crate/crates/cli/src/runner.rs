//! Dispatch a parsed run specification to the algorithm backends and write
//! the result artifacts.

use std::path::Path;
use std::time::Instant;

use svpite_core::dsf::{asymmetry_norm, compute_czz, dsf_transform, static_sum_rule, DSFConfig};
use svpite_core::ed::{lanczos_ground, EDConfig};
use svpite_core::pite::{run_shot, run_sv, EvolveMode, PITEConfig};
use svpite_core::state::save_svpt;

use crate::output::{write_result_json, write_series_csv, write_table_csv, ResultFile};
use crate::spec::{Algorithm, DsfSource, EdSpec, PiteSpec, RunSpec};
use crate::{bench, sweep, CliError};

/// Command-line adjustments applied on top of the specification file.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub seed: Option<u64>,
    pub gammas: Option<Vec<f64>>,
    pub dump_state: bool,
}

pub(crate) fn pite_config(spec: &PiteSpec, seed: u64) -> PITEConfig {
    PITEConfig {
        gamma: spec.gamma,
        n_steps: spec.n_steps,
        dt: spec.dt,
        order: spec.order,
        initial_state: spec.initial_state.clone(),
        n_shots: spec.n_shots,
        seed,
        reps_per_step: spec.reps_per_step,
    }
}

pub(crate) fn ed_config(spec: &EdSpec, seed: u64) -> EDConfig {
    EDConfig {
        tol: spec.tol,
        maxiter: spec.maxiter,
        sector_n_up: spec.sector_n_up,
        seed,
        v0: None,
    }
}

/// Execute `spec`, writing `result.json` and the per-algorithm CSV series
/// into `out_dir`.
pub fn run(spec: &RunSpec, out_dir: &Path, opts: &RunOptions) -> Result<(), CliError> {
    std::fs::create_dir_all(out_dir)
        .map_err(|e| CliError::Io(format!("cannot create {}: {e}", out_dir.display())))?;
    let seed = opts.seed.unwrap_or(spec.seed);
    let start = Instant::now();
    let mut result = ResultFile::new(spec.algorithm.name(), spec, seed);

    match spec.algorithm {
        Algorithm::Sv => {
            let h = spec.model.build()?;
            let pite_spec = spec.pite.as_ref().expect("validated");
            let mut config = pite_config(pite_spec, seed);
            config.initial_state = spec.model.resolve_initial_state(&config.initial_state);
            let keep = opts.dump_state;
            let r = run_sv(&config, &h, EvolveMode::ParallelPair, keep)?;
            write_series_csv(out_dir, "energies", &r.energies)?;
            write_series_csv(out_dir, "probabilities", &r.probabilities)?;
            if let Some(state) = &r.final_state {
                save_svpt(state, &out_dir.join("final_state.svpt"))?;
            }
            result.scalars.insert("cumulative_success".into(), r.cumulative_success);
            result
                .scalars
                .insert("final_energy_per_site".into(), *r.energies.last().unwrap());
            result.series.insert("energies".into(), r.energies);
            result.series.insert("probabilities".into(), r.probabilities);
        }
        Algorithm::Shot => {
            let h = spec.model.build()?;
            let pite_spec = spec.pite.as_ref().expect("validated");
            let mut config = pite_config(pite_spec, seed);
            config.initial_state = spec.model.resolve_initial_state(&config.initial_state);
            let r = run_shot(&config, &h, seed)?;
            write_series_csv(out_dir, "probabilities", &r.probabilities)?;
            let survivors: Vec<f64> = r.survivors.iter().map(|&s| s as f64).collect();
            write_series_csv(out_dir, "survivors", &survivors)?;
            if let Some(e) = r.energy {
                result.scalars.insert("energy_per_site".into(), e);
            }
            if let Some(s) = r.energy_std {
                result.scalars.insert("energy_std_per_site".into(), s);
            }
            result
                .scalars
                .insert("final_survivors".into(), *r.survivors.last().unwrap() as f64);
            result.series.insert("probabilities".into(), r.probabilities);
            result.series.insert("survivors".into(), survivors);
        }
        Algorithm::Ed => {
            let h = spec.model.build()?;
            let config = ed_config(&spec.ed.clone().unwrap_or_default(), seed);
            let r = lanczos_ground(&h, &config)?;
            if opts.dump_state {
                save_svpt(&r.ground_vector, &out_dir.join("ground_state.svpt"))?;
            }
            result.scalars.insert("energy".into(), r.energy);
            result.scalars.insert("energy_per_site".into(), r.energy_per_site);
            result.scalars.insert("residual".into(), r.residual);
            result.scalars.insert("iterations".into(), r.iterations as f64);
        }
        Algorithm::Dsf => {
            let h = spec.model.build()?;
            let dsf_spec = spec.dsf.as_ref().expect("validated");
            let source_state = match dsf_spec.source {
                DsfSource::Ed => {
                    let config = ed_config(&spec.ed.clone().unwrap_or_default(), seed);
                    lanczos_ground(&h, &config)?.ground_vector
                }
                DsfSource::Sv => {
                    let pite_spec = spec.pite.as_ref().expect("validated");
                    let mut config = pite_config(pite_spec, seed);
                    config.initial_state = spec.model.resolve_initial_state(&config.initial_state);
                    run_sv(&config, &h, EvolveMode::ParallelPair, true)?
                        .final_state
                        .expect("requested")
                }
            };
            let config = DSFConfig {
                source_site: dsf_spec.source_site,
                dt_rt: dsf_spec.dt_rt,
                n_t: dsf_spec.n_t,
                evolution: dsf_spec.evolution,
                window: dsf_spec.window,
            };
            let table = compute_czz(&source_state, &h, &config)?;
            let grid = dsf_transform(&table, &config);
            let rows = grid.q.iter().enumerate().flat_map(|(k, &q)| {
                let omega = &grid.omega;
                let s_row = &grid.s[k];
                omega
                    .iter()
                    .zip(s_row.iter())
                    .map(move |(&w, &s)| format!("{q},{w},{s}"))
                    .collect::<Vec<_>>()
            });
            write_table_csv(out_dir, "dsf_grid", "q,omega,S", rows)?;
            result.scalars.insert("e0_total".into(), table.e0);
            result.scalars.insert("imag_residue".into(), grid.imag_residue);
            result
                .scalars
                .insert("sum_rule_discrepancy".into(), static_sum_rule(&grid, &table));
            result
                .scalars
                .insert("one_sided_asymmetry".into(), asymmetry_norm(&table, &config));
            result.series.insert("q".into(), grid.q.clone());
            result.series.insert("omega".into(), grid.omega.clone());
            result
                .series
                .insert("s_flat".into(), grid.s.iter().flatten().copied().collect());
        }
        Algorithm::Sweep => {
            let records = sweep::sweep_gamma(spec, opts.gammas.clone(), seed)?;
            let rows = records.iter().map(|r| {
                let infid = r
                    .infidelity
                    .map(|x| x.to_string())
                    .unwrap_or_default();
                format!(
                    "{},{},{},{}",
                    r.gamma, r.final_energy_per_site, r.cumulative_success, infid
                )
            });
            write_table_csv(
                out_dir,
                "sweep",
                "gamma,final_energy_per_site,cumulative_success,infidelity",
                rows,
            )?;
            for (i, r) in records.iter().enumerate() {
                write_series_csv(out_dir, &format!("p0_gamma_{i}"), &r.p0_series)?;
            }
            result
                .series
                .insert("gamma".into(), records.iter().map(|r| r.gamma).collect());
            result.series.insert(
                "final_energy_per_site".into(),
                records.iter().map(|r| r.final_energy_per_site).collect(),
            );
            result.series.insert(
                "cumulative_success".into(),
                records.iter().map(|r| r.cumulative_success).collect(),
            );
            if records.iter().all(|r| r.infidelity.is_some()) {
                result.series.insert(
                    "infidelity".into(),
                    records.iter().map(|r| r.infidelity.unwrap()).collect(),
                );
            }
        }
        Algorithm::Bench => {
            let records = bench::bench(spec, seed)?;
            let rows = records.iter().map(|r| {
                format!(
                    "{},{},{},{},{},{},{}",
                    r.scenario, r.l, r.n_steps, r.mode, r.repetitions, r.mean_s, r.std_s
                )
            });
            write_table_csv(
                out_dir,
                "bench",
                "scenario,L,n_steps,mode,repetitions,mean_s,std_s",
                rows,
            )?;
            result
                .series
                .insert("mean_s".into(), records.iter().map(|r| r.mean_s).collect());
            result
                .series
                .insert("std_s".into(), records.iter().map(|r| r.std_s).collect());
        }
    }

    result.wall_time_s = start.elapsed().as_secs_f64();
    write_result_json(out_dir, &result)?;
    Ok(())
}
