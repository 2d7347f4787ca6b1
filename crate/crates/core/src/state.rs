//! State-vector storage and the in-place Pauli-rotation kernel.
//!
//! A [`StateVector`] holds 2^L complex amplitudes with the little-endian
//! site-to-bit convention: bit `j` of a basis index is the state of site `j`,
//! and bit value 0 corresponds to Z-eigenvalue +1.
//!
//! The rotation kernel applies `exp(-iθP)` in place by pairing the two
//! amplitudes coupled by the string's flip mask, with O(2^L) arithmetic and
//! no full-state temporaries. Every pair is touched by exactly one loop
//! iteration, so the kernel may fan out over the rayon pool without changing
//! results.

use std::io::{self, Read, Write};
use std::path::Path;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pauli::{PauliString, PauliSumOperator, StringMasks};
use crate::trotter::TrotterProgram;

/// Problem sizes below this run the kernels sequentially; the rayon overhead
/// only pays off for larger state vectors.
const PAR_MIN_DIM: usize = 1 << 14;

/// Hard cap: 2^30 amplitudes is 16 GiB.
const MAX_SITES: usize = 30;

#[derive(Debug, Error)]
pub enum StateError {
    #[error("singlet initial state needs an even site count, got {0}")]
    OddSitesForSinglet(usize),
    #[error("amplitude array has length {got}, expected {expected}")]
    BadLength { expected: usize, got: usize },
    #[error("state has vanishing norm and cannot be normalized")]
    NotNormalizable,
    #[error("state on {state} sites, operator on {operator}")]
    SiteCountMismatch { state: usize, operator: usize },
    #[error("{0} sites exceeds the supported maximum of {MAX_SITES}")]
    TooManySites(usize),
    #[error("state file has wrong magic bytes")]
    BadMagic,
    #[error("state file has unsupported format version {0}")]
    BadVersion(u32),
    #[error("io error: {0}")]
    Io(#[from] io::Error),
}

/// 2^L complex amplitudes on L sites.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_sites: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// All-zero amplitudes (not a physical state until filled).
    pub fn zeros(n_sites: usize) -> Result<Self, StateError> {
        if n_sites == 0 || n_sites > MAX_SITES {
            return Err(StateError::TooManySites(n_sites));
        }
        Ok(Self {
            n_sites,
            amps: vec![Complex64::new(0.0, 0.0); 1 << n_sites],
        })
    }

    /// Computational basis state |index⟩.
    pub fn basis_state(n_sites: usize, index: u64) -> Result<Self, StateError> {
        let mut sv = Self::zeros(n_sites)?;
        sv.amps[index as usize] = Complex64::new(1.0, 0.0);
        Ok(sv)
    }

    pub fn from_amplitudes(n_sites: usize, amps: Vec<Complex64>) -> Result<Self, StateError> {
        if n_sites == 0 || n_sites > MAX_SITES {
            return Err(StateError::TooManySites(n_sites));
        }
        if amps.len() != 1 << n_sites {
            return Err(StateError::BadLength {
                expected: 1 << n_sites,
                got: amps.len(),
            });
        }
        Ok(Self { n_sites, amps })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        pairwise_norm_sqr(&self.amps)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn normalize(&mut self) -> Result<(), StateError> {
        let n = self.norm();
        if n < 1e-150 {
            return Err(StateError::NotNormalizable);
        }
        let inv = 1.0 / n;
        for a in &mut self.amps {
            *a *= inv;
        }
        Ok(())
    }

    pub fn scale(&mut self, factor: Complex64) {
        for a in &mut self.amps {
            *a *= factor;
        }
    }
}

/// Named initial states, or explicit amplitudes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InitialState {
    Zero,
    One,
    Plus,
    Minus,
    Neel,
    Singlet,
    Random,
    #[serde(untagged)]
    Custom(Vec<(f64, f64)>),
}

/// Build a normalized initial state. `seed` feeds the ChaCha12 generator
/// behind [`InitialState::Random`]; other kinds ignore it.
pub fn init_state(kind: &InitialState, n_sites: usize, seed: u64) -> Result<StateVector, StateError> {
    let mut sv = StateVector::zeros(n_sites)?;
    let dim = sv.dim();
    match kind {
        InitialState::Zero => sv.amps[0] = Complex64::new(1.0, 0.0),
        InitialState::One => sv.amps[dim - 1] = Complex64::new(1.0, 0.0),
        InitialState::Plus => {
            let a = Complex64::new(1.0 / (dim as f64).sqrt(), 0.0);
            sv.amps.fill(a);
        }
        InitialState::Minus => {
            let a = 1.0 / (dim as f64).sqrt();
            for (b, amp) in sv.amps.iter_mut().enumerate() {
                let sign = if (b as u64).count_ones() & 1 == 1 { -a } else { a };
                *amp = Complex64::new(sign, 0.0);
            }
        }
        InitialState::Neel => {
            // |0101…⟩ with 0 at site 0: bits set on odd sites.
            let mut idx = 0u64;
            for j in (1..n_sites).step_by(2) {
                idx |= 1 << j;
            }
            sv.amps[idx as usize] = Complex64::new(1.0, 0.0);
        }
        InitialState::Singlet => {
            if n_sites % 2 != 0 {
                return Err(StateError::OddSitesForSinglet(n_sites));
            }
            // Product of (|01⟩ - |10⟩)/√2 on pairs (0,1),(2,3),…, written in
            // basis-index notation: each pair contributes +1/√2 on the
            // configuration with the pair's lower bit set.
            let norm = 2f64.powf(-(n_sites as f64) / 4.0);
            for b in 0..dim as u64 {
                let mut sign = 1.0f64;
                let mut ok = true;
                for k in 0..n_sites / 2 {
                    let lo = (b >> (2 * k)) & 1;
                    let hi = (b >> (2 * k + 1)) & 1;
                    match (lo, hi) {
                        (1, 0) => {}
                        (0, 1) => sign = -sign,
                        _ => {
                            ok = false;
                            break;
                        }
                    }
                }
                if ok {
                    sv.amps[b as usize] = Complex64::new(sign * norm, 0.0);
                }
            }
        }
        InitialState::Random => {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            for amp in &mut sv.amps {
                let re: f64 = StandardNormal.sample(&mut rng);
                let im: f64 = StandardNormal.sample(&mut rng);
                *amp = Complex64::new(re, im);
            }
            sv.normalize()?;
        }
        InitialState::Custom(pairs) => {
            if pairs.len() != dim {
                return Err(StateError::BadLength {
                    expected: dim,
                    got: pairs.len(),
                });
            }
            for (amp, &(re, im)) in sv.amps.iter_mut().zip(pairs) {
                *amp = Complex64::new(re, im);
            }
            sv.normalize()?;
        }
    }
    debug_assert!((sv.norm() - 1.0).abs() < 1e-12);
    Ok(sv)
}

#[inline]
fn check_sites(state: &StateVector, string: &PauliString) -> Result<(), StateError> {
    if state.n_sites != string.n_sites() {
        return Err(StateError::SiteCountMismatch {
            state: state.n_sites,
            operator: string.n_sites(),
        });
    }
    Ok(())
}

/// In-place `state ← exp(-iθP)·state = cosθ·state - i·sinθ·(P·state)`.
pub fn apply_pauli_rotation(
    state: &mut StateVector,
    string: &PauliString,
    theta: f64,
) -> Result<(), StateError> {
    check_sites(state, string)?;
    rotation_kernel(state, &string.masks(), theta, 0, 0);
    Ok(())
}

/// Rotation restricted to basis states with `(index & filter_mask) ==
/// filter_value`; used for ancilla-controlled evolution. The flip mask never
/// overlaps the filter, so pairs stay within the filtered set.
pub fn apply_pauli_rotation_filtered(
    state: &mut StateVector,
    string: &PauliString,
    theta: f64,
    filter_mask: u64,
    filter_value: u64,
) -> Result<(), StateError> {
    check_sites(state, string)?;
    rotation_kernel(state, &string.masks(), theta, filter_mask, filter_value);
    Ok(())
}

/// Shared-pointer view used by the parallel pair loop. Soundness rests on
/// the enumeration below touching each amplitude exactly once.
struct AmpsPtr(*mut Complex64);
unsafe impl Send for AmpsPtr {}
unsafe impl Sync for AmpsPtr {}

fn rotation_kernel(
    state: &mut StateVector,
    masks: &StringMasks,
    theta: f64,
    filter_mask: u64,
    filter_value: u64,
) {
    let (cos_t, sin_t) = (theta.cos(), theta.sin());
    let dim = state.dim();
    // -i·sinθ·i^{n_y}, folded so the per-pair work is one sign flip.
    let m_isin = Complex64::new(0.0, -sin_t) * masks.i_pow_ny;

    if masks.flip == 0 {
        // Pure-Z string: diagonal phases exp(-iθ·(±1)).
        let pos = Complex64::new(cos_t, -sin_t);
        let neg = Complex64::new(cos_t, sin_t);
        let diag = |b: usize, a: &mut Complex64| {
            let b = b as u64;
            if filter_mask != 0 && b & filter_mask != filter_value {
                return;
            }
            *a *= if (b & masks.sign).count_ones() & 1 == 1 { neg } else { pos };
        };
        if dim >= PAR_MIN_DIM {
            state.amps.par_iter_mut().enumerate().for_each(|(b, a)| diag(b, a));
        } else {
            state.amps.iter_mut().enumerate().for_each(|(b, a)| diag(b, a));
        }
        return;
    }

    // Enumerate one index per coupled pair: k runs over all indices with the
    // highest flip bit removed; re-inserting a 0 at that position yields `a`
    // with partner `b = a ^ flip > a`.
    let hb_pos = 63 - masks.flip.leading_zeros() as usize;
    let low_mask = (1usize << hb_pos) - 1;
    let flip = masks.flip;
    let sign = masks.sign;
    let pair = move |k: usize, amps: *mut Complex64| {
        let a_idx = ((k & !low_mask) << 1) | (k & low_mask);
        let a_u = a_idx as u64;
        if filter_mask != 0 && a_u & filter_mask != filter_value {
            return;
        }
        let b_idx = a_idx ^ flip as usize;
        let pa = if ((a_u ^ flip) & sign).count_ones() & 1 == 1 { -m_isin } else { m_isin };
        let pb = if (a_u & sign).count_ones() & 1 == 1 { -m_isin } else { m_isin };
        unsafe {
            let va = *amps.add(a_idx);
            let vb = *amps.add(b_idx);
            *amps.add(a_idx) = cos_t * va + pa * vb;
            *amps.add(b_idx) = cos_t * vb + pb * va;
        }
    };

    let ptr = AmpsPtr(state.amps.as_mut_ptr());
    let half = dim / 2;
    if dim >= PAR_MIN_DIM {
        let shared = &ptr;
        (0..half).into_par_iter().for_each(move |k| pair(k, shared.0));
    } else {
        for k in 0..half {
            pair(k, ptr.0);
        }
    }
}

/// New vector `Σ_k c_k P_k · state`; no normalization. An empty sum yields
/// the zero vector.
pub fn apply_pauli_sum(state: &StateVector, op: &PauliSumOperator) -> Result<StateVector, StateError> {
    if state.n_sites != op.n_sites() {
        return Err(StateError::SiteCountMismatch {
            state: state.n_sites,
            operator: op.n_sites(),
        });
    }
    let mut out = StateVector::zeros(state.n_sites)?;
    let terms: Vec<(StringMasks, Complex64)> = op
        .terms()
        .map(|t| (t.string.masks(), t.coeff))
        .collect();
    let src = &state.amps;
    let fill = |c: usize, dst: &mut Complex64| {
        let mut acc = Complex64::new(0.0, 0.0);
        for (masks, coeff) in &terms {
            let from = c ^ masks.flip as usize;
            acc += coeff * masks.phase(from as u64) * src[from];
        }
        *dst = acc;
    };
    if out.dim() >= PAR_MIN_DIM {
        out.amps.par_iter_mut().enumerate().for_each(|(c, dst)| fill(c, dst));
    } else {
        out.amps.iter_mut().enumerate().for_each(|(c, dst)| fill(c, dst));
    }
    Ok(out)
}

/// ⟨a|b⟩ with pairwise (deterministic, scheduling-independent) summation.
pub fn inner(a: &StateVector, b: &StateVector) -> Complex64 {
    assert_eq!(a.dim(), b.dim(), "inner product of mismatched states");
    pairwise_inner(&a.amps, &b.amps)
}

fn pairwise_inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    if a.len() <= 64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (x, y) in a.iter().zip(b) {
            acc += x.conj() * y;
        }
        acc
    } else {
        let mid = a.len() / 2;
        pairwise_inner(&a[..mid], &b[..mid]) + pairwise_inner(&a[mid..], &b[mid..])
    }
}

fn pairwise_norm_sqr(a: &[Complex64]) -> f64 {
    if a.len() <= 64 {
        a.iter().map(|x| x.norm_sqr()).sum()
    } else {
        let mid = a.len() / 2;
        pairwise_norm_sqr(&a[..mid]) + pairwise_norm_sqr(&a[mid..])
    }
}

/// Re⟨ψ|H|ψ⟩. Panics if the imaginary residue exceeds 1e-10, which for a
/// Hermitian operator indicates a corrupted state.
pub fn expectation(state: &StateVector, h: &crate::hamiltonian::Hamiltonian) -> f64 {
    let applied = apply_pauli_sum(state, h.as_pauli_sum()).expect("site counts match");
    let val = inner(state, &applied);
    assert!(
        val.im.abs() <= 1e-10 * val.re.abs().max(1.0),
        "imaginary residue {} in Hermitian expectation",
        val.im
    );
    val.re
}

/// Raw ⟨ψ|O|ψ⟩ for a general Pauli sum.
pub fn expectation_sum(state: &StateVector, op: &PauliSumOperator) -> Result<Complex64, StateError> {
    let applied = apply_pauli_sum(state, op)?;
    Ok(inner(state, &applied))
}

/// Apply a 2×2 gate `g` to one site; rows/columns ordered (|0⟩, |1⟩).
pub fn apply_single_qubit_gate(state: &mut StateVector, site: usize, g: [[Complex64; 2]; 2]) {
    assert!(site < state.n_sites);
    let hb = 1usize << site;
    let block = 2 * hb;
    let dim = state.dim();
    let body = |chunk: &mut [Complex64]| {
        let (lo, hi) = chunk.split_at_mut(hb);
        for i in 0..hb {
            let v0 = lo[i];
            let v1 = hi[i];
            lo[i] = g[0][0] * v0 + g[0][1] * v1;
            hi[i] = g[1][0] * v0 + g[1][1] * v1;
        }
    };
    if dim >= PAR_MIN_DIM && dim / block >= 8 {
        state.amps.par_chunks_exact_mut(block).for_each(body);
    } else {
        state.amps.chunks_exact_mut(block).for_each(body);
    }
}

/// Apply a compiled rotation program: the rotation sequence in order,
/// `reps` times.
pub fn evolve(state: &mut StateVector, program: &TrotterProgram) -> Result<(), StateError> {
    for _ in 0..program.reps() {
        for (string, angle) in program.rotations() {
            apply_pauli_rotation(state, string, *angle)?;
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// State file format: 16-byte header (magic "SVPT", version u32 LE = 1,
// n_sites u32 LE, reserved u32 = 0), then 2^L little-endian f64 (re, im)
// pairs in basis-index order.
// ---------------------------------------------------------------------------

const SVPT_MAGIC: &[u8; 4] = b"SVPT";
const SVPT_VERSION: u32 = 1;

pub fn write_svpt<W: Write>(state: &StateVector, mut w: W) -> Result<(), StateError> {
    w.write_all(SVPT_MAGIC)?;
    w.write_all(&SVPT_VERSION.to_le_bytes())?;
    w.write_all(&(state.n_sites as u32).to_le_bytes())?;
    w.write_all(&0u32.to_le_bytes())?;
    let mut buf = Vec::with_capacity(state.dim() * 16);
    for a in &state.amps {
        buf.extend_from_slice(&a.re.to_le_bytes());
        buf.extend_from_slice(&a.im.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

pub fn read_svpt<R: Read>(mut r: R) -> Result<StateVector, StateError> {
    let mut header = [0u8; 16];
    r.read_exact(&mut header)?;
    if &header[0..4] != SVPT_MAGIC {
        return Err(StateError::BadMagic);
    }
    let version = u32::from_le_bytes(header[4..8].try_into().unwrap());
    if version != SVPT_VERSION {
        return Err(StateError::BadVersion(version));
    }
    let n_sites = u32::from_le_bytes(header[8..12].try_into().unwrap()) as usize;
    if n_sites == 0 || n_sites > MAX_SITES {
        return Err(StateError::TooManySites(n_sites));
    }
    let dim = 1usize << n_sites;
    let mut buf = vec![0u8; dim * 16];
    r.read_exact(&mut buf)?;
    let amps = buf
        .chunks_exact(16)
        .map(|c| {
            Complex64::new(
                f64::from_le_bytes(c[0..8].try_into().unwrap()),
                f64::from_le_bytes(c[8..16].try_into().unwrap()),
            )
        })
        .collect();
    StateVector::from_amplitudes(n_sites, amps)
}

pub fn save_svpt(state: &StateVector, path: &Path) -> Result<(), StateError> {
    let f = std::fs::File::create(path)?;
    write_svpt(state, io::BufWriter::new(f))
}

pub fn load_svpt(path: &Path) -> Result<StateVector, StateError> {
    let f = std::fs::File::open(path)?;
    read_svpt(io::BufReader::new(f))
}
