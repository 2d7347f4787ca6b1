//! Run-specification schema: one JSON document selects the model, the
//! algorithm, and its parameters. Unknown keys are rejected everywhere.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use svpite_core::dsf::{Evolution, Window};
use svpite_core::hamiltonian::{BoundaryCondition, Hamiltonian, TermsValue};
use svpite_core::models;
use svpite_core::state::InitialState;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Sv,
    Shot,
    Ed,
    Dsf,
    Sweep,
    Bench,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Sv => "sv",
            Algorithm::Shot => "shot",
            Algorithm::Ed => "ed",
            Algorithm::Dsf => "dsf",
            Algorithm::Sweep => "sweep",
            Algorithm::Bench => "bench",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Ising,
    Heisenberg,
    Xy,
    Xxz,
    #[serde(rename = "heisenberg_2d")]
    Heisenberg2d,
    Custom,
}

/// One value of a custom terms dictionary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TermsValueSpec {
    Uniform {
        uniform: f64,
        #[serde(skip_serializing_if = "Option::is_none")]
        bc: Option<BoundaryCondition>,
    },
    Couplings(Vec<Vec<f64>>),
    PerSite(Vec<f64>),
    Scalar(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtraTerm {
    pub key: String,
    pub coeff: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bc: Option<BoundaryCondition>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    #[serde(rename = "type")]
    pub kind: ModelKind,
    #[serde(rename = "L", skip_serializing_if = "Option::is_none")]
    pub l: Option<usize>,
    #[serde(rename = "Lx", skip_serializing_if = "Option::is_none")]
    pub lx: Option<usize>,
    #[serde(rename = "Ly", skip_serializing_if = "Option::is_none")]
    pub ly: Option<usize>,
    #[serde(rename = "J", skip_serializing_if = "Option::is_none")]
    pub j: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    #[serde(rename = "Delta", skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bc: Option<BoundaryCondition>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub extra_uniform_terms: Vec<ExtraTerm>,
    /// Terms dictionary for `type = "custom"`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub terms: Option<BTreeMap<String, TermsValueSpec>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PiteSpec {
    pub gamma: f64,
    pub n_steps: usize,
    pub dt: f64,
    #[serde(default = "default_order")]
    pub order: u32,
    pub initial_state: InitialState,
    #[serde(default = "default_shots")]
    pub n_shots: usize,
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

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdSpec {
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_maxiter")]
    pub maxiter: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sector_n_up: Option<usize>,
}

fn default_tol() -> f64 {
    1e-10
}
fn default_maxiter() -> usize {
    10_000
}

impl Default for EdSpec {
    fn default() -> Self {
        Self {
            tol: default_tol(),
            maxiter: default_maxiter(),
            sector_n_up: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DsfSource {
    Ed,
    Sv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DsfSpec {
    /// Where the source state comes from: the ED reference or a PITE run
    /// (which then needs the `pite` block).
    #[serde(default = "default_dsf_source")]
    pub source: DsfSource,
    #[serde(default)]
    pub source_site: usize,
    pub dt_rt: f64,
    pub n_t: usize,
    #[serde(default = "default_evolution")]
    pub evolution: Evolution,
    #[serde(default = "default_window")]
    pub window: Window,
}

fn default_dsf_source() -> DsfSource {
    DsfSource::Ed
}
fn default_evolution() -> Evolution {
    Evolution::Trotter { order: 1, reps: 1 }
}
fn default_window() -> Window {
    Window::Hann
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gammas: Option<Vec<f64>>,
    /// Compute the Lanczos reference and report infidelities.
    #[serde(default = "default_true")]
    pub ed_reference: bool,
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchSpec {
    #[serde(default = "default_l_grid")]
    pub l_grid: Vec<usize>,
    #[serde(default = "default_fixed_steps")]
    pub fixed_n_steps: usize,
    #[serde(default = "default_steps_grid")]
    pub steps_grid: Vec<usize>,
    #[serde(default = "default_fixed_l")]
    pub fixed_l: usize,
    #[serde(default = "default_repetitions")]
    pub repetitions: usize,
}

fn default_l_grid() -> Vec<usize> {
    vec![8, 12, 16]
}
fn default_fixed_steps() -> usize {
    10
}
fn default_steps_grid() -> Vec<usize> {
    vec![10, 20, 40, 80]
}
fn default_fixed_l() -> usize {
    16
}
fn default_repetitions() -> usize {
    3
}

impl Default for BenchSpec {
    fn default() -> Self {
        Self {
            l_grid: default_l_grid(),
            fixed_n_steps: default_fixed_steps(),
            steps_grid: default_steps_grid(),
            fixed_l: default_fixed_l(),
            repetitions: default_repetitions(),
        }
    }
}

/// A complete run specification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    pub model: ModelSpec,
    pub algorithm: Algorithm,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pite: Option<PiteSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ed: Option<EdSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dsf: Option<DsfSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bench: Option<BenchSpec>,
    #[serde(default)]
    pub seed: u64,
}

/// Parse and validate a specification file.
pub fn parse_runspec(path: &Path) -> Result<RunSpec, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
    parse_runspec_str(&text)
}

pub fn parse_runspec_str(text: &str) -> Result<RunSpec, CliError> {
    let spec: RunSpec =
        serde_json::from_str(text).map_err(|e| CliError::Schema(e.to_string()))?;
    validate(&spec)?;
    Ok(spec)
}

fn schema(path: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Schema(format!("{path}: {msg}"))
}

fn validate(spec: &RunSpec) -> Result<(), CliError> {
    validate_model(&spec.model)?;
    if let Some(p) = &spec.pite {
        if !(p.gamma > 0.0 && p.gamma < 1.0) {
            return Err(schema("pite.gamma", "must lie strictly between 0 and 1"));
        }
        if !(p.dt > 0.0) {
            return Err(schema("pite.dt", "must be positive"));
        }
        if p.order != 1 && p.order != 2 {
            return Err(schema("pite.order", "must be 1 or 2"));
        }
        if p.n_shots < 1 {
            return Err(schema("pite.n_shots", "must be at least 1"));
        }
        if p.reps_per_step < 1 {
            return Err(schema("pite.reps_per_step", "must be at least 1"));
        }
    }
    if let Some(ed) = &spec.ed {
        if !(ed.tol > 0.0) {
            return Err(schema("ed.tol", "must be positive"));
        }
    }
    if let Some(d) = &spec.dsf {
        if d.n_t < 2 {
            return Err(schema("dsf.n_t", "needs at least 2 time samples"));
        }
        if !(d.dt_rt > 0.0) {
            return Err(schema("dsf.dt_rt", "must be positive"));
        }
        if let Evolution::Trotter { order, reps } = d.evolution {
            if order != 1 && order != 2 {
                return Err(schema("dsf.evolution.order", "must be 1 or 2"));
            }
            if reps < 1 {
                return Err(schema("dsf.evolution.reps", "must be at least 1"));
            }
        }
    }
    if let Some(b) = &spec.bench {
        if b.repetitions < 3 {
            return Err(schema("bench.repetitions", "must be at least 3"));
        }
    }
    let needs_pite = matches!(
        spec.algorithm,
        Algorithm::Sv | Algorithm::Shot | Algorithm::Sweep | Algorithm::Bench
    ) || (spec.algorithm == Algorithm::Dsf
        && spec.dsf.as_ref().is_some_and(|d| d.source == DsfSource::Sv));
    if needs_pite && spec.pite.is_none() {
        return Err(schema("pite", "block required for this algorithm"));
    }
    if spec.algorithm == Algorithm::Dsf && spec.dsf.is_none() {
        return Err(schema("dsf", "block required for the dsf algorithm"));
    }
    Ok(())
}

fn validate_model(m: &ModelSpec) -> Result<(), CliError> {
    let chain = |name: &str| -> Result<usize, CliError> {
        m.l.ok_or_else(|| schema("model.L", format!("required for the {name} model")))
    };
    match m.kind {
        ModelKind::Ising => {
            chain("ising")?;
            if m.j.is_none() {
                return Err(schema("model.J", "required for the ising model"));
            }
            if m.h.is_none() {
                return Err(schema("model.h", "required for the ising model"));
            }
            require_bc(m)?;
        }
        ModelKind::Heisenberg | ModelKind::Xy => {
            chain("chain")?;
            if m.j.is_none() {
                return Err(schema("model.J", "required"));
            }
            require_bc(m)?;
        }
        ModelKind::Xxz => {
            chain("xxz")?;
            if m.j.is_none() {
                return Err(schema("model.J", "required"));
            }
            if m.delta.is_none() {
                return Err(schema("model.Delta", "required for the xxz model"));
            }
            require_bc(m)?;
        }
        ModelKind::Heisenberg2d => {
            if m.lx.is_none() || m.ly.is_none() {
                return Err(schema("model.Lx/Ly", "required for the 2D model"));
            }
            if m.j.is_none() {
                return Err(schema("model.J", "required"));
            }
            require_bc(m)?;
        }
        ModelKind::Custom => {
            chain("custom")?;
            if m.terms.is_none() {
                return Err(schema("model.terms", "required for the custom model"));
            }
        }
    }
    Ok(())
}

fn require_bc(m: &ModelSpec) -> Result<(), CliError> {
    if m.bc.is_none() {
        return Err(schema("model.bc", "required"));
    }
    Ok(())
}

impl ModelSpec {
    pub fn n_sites(&self) -> usize {
        match self.kind {
            ModelKind::Heisenberg2d => self.lx.unwrap_or(0) * self.ly.unwrap_or(0),
            _ => self.l.unwrap_or(0),
        }
    }

    /// Construct the Hamiltonian, including any extra uniform terms.
    pub fn build(&self) -> Result<Hamiltonian, CliError> {
        let mut h = match self.kind {
            ModelKind::Ising => models::ising(
                self.l.unwrap(),
                self.j.unwrap(),
                self.h.unwrap(),
                self.bc.unwrap(),
            )?,
            ModelKind::Heisenberg => {
                models::heisenberg(self.l.unwrap(), self.j.unwrap(), self.bc.unwrap())?
            }
            ModelKind::Xy => models::xy(self.l.unwrap(), self.j.unwrap(), self.bc.unwrap())?,
            ModelKind::Xxz => models::xxz(
                self.l.unwrap(),
                self.j.unwrap(),
                self.delta.unwrap(),
                self.bc.unwrap(),
            )?,
            ModelKind::Heisenberg2d => models::heisenberg_2d(
                self.lx.unwrap(),
                self.ly.unwrap(),
                self.j.unwrap(),
                self.bc.unwrap(),
            )?,
            ModelKind::Custom => {
                let dict = self.terms.as_ref().unwrap().iter().map(|(k, v)| {
                    let value = match v {
                        TermsValueSpec::Uniform { uniform, bc } => match bc {
                            Some(bc) => TermsValue::UniformWithBc(*uniform, *bc),
                            None => TermsValue::Scalar(*uniform),
                        },
                        TermsValueSpec::Couplings(c) => TermsValue::Couplings(c.clone()),
                        TermsValueSpec::PerSite(c) => TermsValue::PerSite(c.clone()),
                        TermsValueSpec::Scalar(c) => TermsValue::Scalar(*c),
                    };
                    (k.clone(), value)
                });
                Hamiltonian::from_terms_dict(self.l.unwrap(), dict)?
            }
        };
        for extra in &self.extra_uniform_terms {
            h.add_uniform_terms(&extra.key, extra.coeff, extra.bc)?;
        }
        Ok(h)
    }

    /// Resolve the initial state for this model. On the 2D lattice the named
    /// Néel pattern alternates in (x + y) parity — the checkerboard — rather
    /// than in the raw 1D site index, which under the row-major map would
    /// produce column stripes.
    pub fn resolve_initial_state(&self, state: &InitialState) -> InitialState {
        if self.kind == ModelKind::Heisenberg2d && *state == InitialState::Neel {
            let (lx, ly) = (self.lx.unwrap(), self.ly.unwrap());
            let mut idx = 0u64;
            for y in 0..ly {
                for x in 0..lx {
                    if (x + y) % 2 == 1 {
                        idx |= 1 << (x + y * lx);
                    }
                }
            }
            let mut amps = vec![(0.0, 0.0); 1usize << (lx * ly)];
            amps[idx as usize] = (1.0, 0.0);
            return InitialState::Custom(amps);
        }
        state.clone()
    }
}
