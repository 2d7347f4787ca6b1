//! Matrix-free Lanczos ground-state solver with an optional fixed
//! magnetization sector.
//!
//! The solver never materializes the Hamiltonian. In the full space the
//! matrix-vector product reuses the state-engine Pauli-sum application; in a
//! sector it walks the popcount-restricted basis directly, where matched
//! `XX`+`YY` bond pairs act as hops between configurations and `Z`/`ZZ`
//! terms stay diagonal.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hamiltonian::Hamiltonian;
use crate::pauli::Pauli;
use crate::state::{apply_pauli_sum, StateVector};

#[derive(Debug, Error)]
pub enum EdError {
    #[error("Lanczos did not converge: residual {residual:.3e} after {iterations} iterations")]
    NotConverged { residual: f64, iterations: usize },
    #[error("Hamiltonian does not conserve total Z; the n_up sector restriction is invalid")]
    IncompatibleSector,
    #[error("n_up = {n_up} outside 0..={l}")]
    BadSector { n_up: usize, l: usize },
    #[error("start vector has length {got}, solve space has dimension {expected}")]
    BadStartVector { expected: usize, got: usize },
    #[error(transparent)]
    State(#[from] crate::state::StateError),
}

/// Eigensolver parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EDConfig {
    /// Residual tolerance: converged when ‖Hv - Ev‖ ≤ tol·max(1, |E|).
    pub tol: f64,
    /// Iteration budget across restarts.
    pub maxiter: usize,
    /// Restrict to the fixed number of set bits (up spins in the bit
    /// convention) when the Hamiltonian conserves total Z.
    pub sector_n_up: Option<usize>,
    /// Seed for random start vectors.
    #[serde(default)]
    pub seed: u64,
    /// Explicit start vector in the solve space (full space, or the sector
    /// basis when `sector_n_up` is set).
    #[serde(skip)]
    pub v0: Option<Vec<Complex64>>,
}

impl Default for EDConfig {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            maxiter: 10_000,
            sector_n_up: None,
            seed: 0,
            v0: None,
        }
    }
}

/// Ground-state output with its residual certificate.
#[derive(Debug, Clone)]
pub struct EDResult {
    /// Total ground energy.
    pub energy: f64,
    /// Ground energy divided by the site count.
    pub energy_per_site: f64,
    /// Ground vector embedded in the full 2^L space.
    pub ground_vector: StateVector,
    /// ‖Hv - Ev‖ of the returned pair, re-verifiable via [`residual_norm`].
    pub residual: f64,
    pub iterations: usize,
}

/// Enumeration of the bitstrings with a fixed popcount, strictly increasing.
#[derive(Debug, Clone)]
pub struct SectorBasis {
    l: usize,
    n_up: usize,
    states: Vec<u64>,
}

impl SectorBasis {
    pub fn new(l: usize, n_up: usize) -> Result<Self, EdError> {
        if n_up > l {
            return Err(EdError::BadSector { n_up, l });
        }
        let mut states = Vec::new();
        if n_up == 0 {
            states.push(0);
        } else {
            // Gosper's hack walks same-popcount bitstrings in increasing order.
            let limit = 1u64 << l;
            let mut v = (1u64 << n_up) - 1;
            while v < limit {
                states.push(v);
                let c = v & v.wrapping_neg();
                let r = v + c;
                v = r | (((v ^ r) >> 2) / c);
            }
        }
        Ok(Self { l, n_up, states })
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn n_up(&self) -> usize {
        self.n_up
    }

    pub fn states(&self) -> &[u64] {
        &self.states
    }

    #[inline]
    pub fn index_of(&self, state: u64) -> Option<usize> {
        self.states.binary_search(&state).ok()
    }

    /// Embed sector coefficients into the full 2^L space.
    pub fn embed(&self, v: &[Complex64]) -> Result<StateVector, EdError> {
        let mut full = StateVector::zeros(self.l)?;
        for (i, &s) in self.states.iter().enumerate() {
            full.amplitudes_mut()[s as usize] = v[i];
        }
        Ok(full)
    }
}

/// True iff every term of `h` preserves the total Z magnetization: `Z` and
/// `ZZ` always do; `XX` and `YY` only as matched-coefficient pairs on the
/// same bond; lone `X` or `Y` never.
pub fn check_sector_compatibility(h: &Hamiltonian) -> bool {
    sector_terms(h).is_some()
}

struct SectorTerms {
    /// (support mask, coefficient): diagonal value Σ c·(-1)^{popcount(s & mask)}.
    diagonal: Vec<(u64, f64)>,
    /// (bond mask, hop amplitude = c_XX + c_YY) acting when the two bits differ.
    hops: Vec<(u64, f64)>,
}

fn sector_terms(h: &Hamiltonian) -> Option<SectorTerms> {
    let mut diagonal = Vec::new();
    let mut bonds: std::collections::BTreeMap<u64, (f64, f64)> = std::collections::BTreeMap::new();
    for (string, coeff) in h.real_terms() {
        let labels: Vec<Pauli> = string.labels().collect();
        let mask = string.sites().fold(0u64, |m, s| m | 1 << s);
        match labels.as_slice() {
            [Pauli::Z] | [Pauli::Z, Pauli::Z] => diagonal.push((mask, coeff)),
            [Pauli::X, Pauli::X] => bonds.entry(mask).or_insert((0.0, 0.0)).0 += coeff,
            [Pauli::Y, Pauli::Y] => bonds.entry(mask).or_insert((0.0, 0.0)).1 += coeff,
            _ => return None,
        }
    }
    let mut hops = Vec::new();
    for (mask, (cxx, cyy)) in bonds {
        if (cxx - cyy).abs() > 1e-12 {
            return None;
        }
        hops.push((mask, cxx + cyy));
    }
    Some(SectorTerms { diagonal, hops })
}

enum Matvec<'a> {
    Full(&'a Hamiltonian),
    Sector { basis: &'a SectorBasis, terms: &'a SectorTerms },
}

impl Matvec<'_> {
    fn dim(&self) -> usize {
        match self {
            Matvec::Full(h) => 1 << h.n_sites(),
            Matvec::Sector { basis, .. } => basis.len(),
        }
    }

    fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        match self {
            Matvec::Full(h) => {
                let sv = StateVector::from_amplitudes(h.n_sites(), v.to_vec())
                    .expect("full-space vector");
                apply_pauli_sum(&sv, h.as_pauli_sum())
                    .expect("site counts match")
                    .amplitudes()
                    .to_vec()
            }
            Matvec::Sector { basis, terms } => {
                let states = basis.states();
                let fill = |i: usize| {
                    let s = states[i];
                    let mut acc = Complex64::new(0.0, 0.0);
                    let mut diag = 0.0;
                    for &(mask, c) in &terms.diagonal {
                        diag += if (s & mask).count_ones() & 1 == 1 { -c } else { c };
                    }
                    acc += diag * v[i];
                    for &(mask, amp) in &terms.hops {
                        if (s & mask).count_ones() == 1 {
                            let flipped = s ^ mask;
                            let j = basis.index_of(flipped).expect("hop stays in sector");
                            acc += amp * v[j];
                        }
                    }
                    acc
                };
                if states.len() >= 1 << 12 {
                    (0..states.len()).into_par_iter().map(fill).collect()
                } else {
                    (0..states.len()).map(fill).collect()
                }
            }
        }
    }
}

/// Matrix-free H·v inside a magnetization sector. The full-space product is
/// [`apply_pauli_sum`] on the embedded vector; within a sector this walks
/// the restricted basis directly.
pub fn sector_matvec(
    h: &Hamiltonian,
    basis: &SectorBasis,
    v: &[Complex64],
) -> Result<Vec<Complex64>, EdError> {
    let terms = sector_terms(h).ok_or(EdError::IncompatibleSector)?;
    if v.len() != basis.len() {
        return Err(EdError::BadStartVector {
            expected: basis.len(),
            got: v.len(),
        });
    }
    Ok(Matvec::Sector { basis, terms: &terms }.apply(v))
}

/// ‖Hv - Ev‖ in the full space; the re-verification hook for the residual
/// certificate.
pub fn residual_norm(h: &Hamiltonian, v: &StateVector, energy: f64) -> f64 {
    let hv = apply_pauli_sum(v, h.as_pauli_sum()).expect("site counts match");
    let mut acc = 0.0;
    for (a, b) in hv.amplitudes().iter().zip(v.amplitudes()) {
        acc += (a - energy * b).norm_sqr();
    }
    acc.sqrt()
}

fn vec_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn random_unit(dim: usize, rng: &mut ChaCha12Rng) -> Vec<Complex64> {
    let mut v: Vec<Complex64> = (0..dim)
        .map(|_| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            Complex64::new(re, im)
        })
        .collect();
    let n = vec_norm(&v);
    for x in &mut v {
        *x /= n;
    }
    v
}

/// Ground eigenpair of a real symmetric tridiagonal matrix.
fn tridiag_ground(alpha: &[f64], beta: &[f64]) -> (f64, Vec<f64>) {
    let k = alpha.len();
    let mut t = nalgebra::DMatrix::<f64>::zeros(k, k);
    for i in 0..k {
        t[(i, i)] = alpha[i];
        if i + 1 < k {
            t[(i, i + 1)] = beta[i];
            t[(i + 1, i)] = beta[i];
        }
    }
    let eig = nalgebra::SymmetricEigen::new(t);
    let mut best = 0;
    for i in 1..k {
        if eig.eigenvalues[i] < eig.eigenvalues[best] {
            best = i;
        }
    }
    (eig.eigenvalues[best], eig.eigenvectors.column(best).iter().copied().collect())
}

struct LanczosOutcome {
    energy: f64,
    vector: Vec<Complex64>,
    iterations: usize,
    converged: bool,
}

fn lanczos_attempt(
    op: &Matvec<'_>,
    v0: Vec<Complex64>,
    tol: f64,
    max_steps: usize,
) -> LanczosOutcome {
    let mut q: Vec<Vec<Complex64>> = vec![v0];
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut iterations = 0;

    loop {
        iterations += 1;
        let k = alpha.len();
        let mut w = op.apply(&q[k]);
        let a = dot(&q[k], &w).re;
        alpha.push(a);
        for (x, y) in w.iter_mut().zip(&q[k]) {
            *x -= a * y;
        }
        if k > 0 {
            let b = beta[k - 1];
            for (x, y) in w.iter_mut().zip(&q[k - 1]) {
                *x -= b * y;
            }
        }
        // Full reorthogonalization, two passes; Krylov dimensions stay small.
        for _ in 0..2 {
            for qi in &q {
                let c = dot(qi, &w);
                for (x, y) in w.iter_mut().zip(qi) {
                    *x -= c * y;
                }
            }
        }
        let b_next = vec_norm(&w);

        let must_stop = b_next < 1e-14 || alpha.len() >= max_steps || q.len() >= op.dim();
        // The k×k eigensolve is cheap early on; throttle it once the basis
        // has grown.
        let check = must_stop || alpha.len() <= 60 || alpha.len() % 5 == 0;

        if check {
            let (theta, y) = tridiag_ground(&alpha, &beta);
            let est_residual = b_next * y.last().copied().unwrap_or(1.0).abs();
            if est_residual <= 0.5 * tol * theta.abs().max(1.0) || must_stop {
                let dim = q[0].len();
                let mut v = vec![Complex64::new(0.0, 0.0); dim];
                for (coeff, qi) in y.iter().zip(&q) {
                    for (x, b) in v.iter_mut().zip(qi) {
                        *x += *coeff * b;
                    }
                }
                let n = vec_norm(&v);
                for x in &mut v {
                    *x /= n;
                }
                // The true residual decides convergence, not the estimate.
                let hv = op.apply(&v);
                let energy = dot(&v, &hv).re;
                let res: f64 = hv
                    .iter()
                    .zip(&v)
                    .map(|(a, b)| (a - energy * b).norm_sqr())
                    .sum::<f64>()
                    .sqrt();
                let converged = res <= tol * energy.abs().max(1.0);
                if converged || must_stop {
                    return LanczosOutcome {
                        energy,
                        vector: v,
                        iterations,
                        converged,
                    };
                }
            }
        }

        beta.push(b_next);
        let mut next = w;
        for x in &mut next {
            *x /= b_next;
        }
        q.push(next);
    }
}

/// Lanczos ground state with full reorthogonalization; restarts with a fresh
/// random start vector (up to 3 times) if an attempt stalls.
pub fn lanczos_ground(h: &Hamiltonian, config: &EDConfig) -> Result<EDResult, EdError> {
    let l = h.n_sites();
    let sector: Option<(SectorBasis, SectorTerms)> = match config.sector_n_up {
        Some(n_up) => {
            let terms = sector_terms(h).ok_or(EdError::IncompatibleSector)?;
            Some((SectorBasis::new(l, n_up)?, terms))
        }
        None => None,
    };
    let op = match &sector {
        Some((basis, terms)) => Matvec::Sector { basis, terms },
        None => Matvec::Full(h),
    };
    let dim = op.dim();

    let mut rng = ChaCha12Rng::seed_from_u64(config.seed);
    let mut total_iterations = 0;
    let mut best: Option<LanczosOutcome> = None;

    for attempt in 0..4 {
        let v0 = match (&config.v0, attempt) {
            (Some(v), 0) => {
                if v.len() != dim {
                    return Err(EdError::BadStartVector { expected: dim, got: v.len() });
                }
                let n = vec_norm(v);
                v.iter().map(|x| x / n).collect()
            }
            _ => random_unit(dim, &mut rng),
        };
        let budget = config.maxiter.saturating_sub(total_iterations).min(dim).min(400);
        if budget == 0 {
            break;
        }
        let outcome = lanczos_attempt(&op, v0, config.tol, budget);
        total_iterations += outcome.iterations;
        let better = match &best {
            None => true,
            Some(b) => (outcome.converged && !b.converged) || outcome.energy < b.energy,
        };
        if better {
            best = Some(outcome);
        }
        if best.as_ref().is_some_and(|b| b.converged) {
            break;
        }
    }

    let outcome = best.expect("at least one attempt ran");
    let ground_vector = match &sector {
        Some((b, _)) => b.embed(&outcome.vector)?,
        None => StateVector::from_amplitudes(l, outcome.vector.clone())?,
    };
    let residual = residual_norm(h, &ground_vector, outcome.energy);
    if !outcome.converged || residual > config.tol * outcome.energy.abs().max(1.0) {
        return Err(EdError::NotConverged {
            residual,
            iterations: total_iterations,
        });
    }
    Ok(EDResult {
        energy: outcome.energy,
        energy_per_site: outcome.energy / l as f64,
        ground_vector,
        residual,
        iterations: total_iterations,
    })
}
