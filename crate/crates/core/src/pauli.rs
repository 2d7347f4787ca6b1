//! Pauli strings and weighted sums of Pauli strings.
//!
//! Every operator in this crate is a weighted sum of Pauli strings on a fixed
//! number of lattice sites,
//!
//! ```text
//!   O = Σ_k c_k · P_k,    P_k = σ_{i1} ⊗ σ_{i2} ⊗ …
//! ```
//!
//! Strings are stored in a canonical form (sites strictly ascending, labels
//! permuted in lockstep), which makes operator equality a per-key coefficient
//! comparison and gives every sum a deterministic term order.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Coefficients with magnitude below this are dropped during simplification.
pub const COEFF_PRUNE_TOL: f64 = 1e-15;

/// Two operators are equal when all per-key coefficients agree within this.
pub const OPERATOR_EQ_TOL: f64 = 1e-12;

/// Dense matrix export is refused above this site count.
pub const DENSE_SITE_LIMIT: usize = 12;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PauliError {
    #[error("site {site} out of range for {n_sites} sites")]
    OutOfRangeSite { site: usize, n_sites: usize },
    #[error("site {site} appears more than once in a Pauli string")]
    DuplicateSite { site: usize },
    #[error("invalid Pauli label {label:?}; expected X, Y or Z")]
    BadLabel { label: String },
    #[error("a Pauli string needs at least one operator")]
    EmptyString,
    #[error("labels and sites have different lengths ({labels} vs {sites})")]
    LengthMismatch { labels: usize, sites: usize },
    #[error("operator acts on {expected} sites but operand has {got}")]
    SiteCountMismatch { expected: usize, got: usize },
    #[error("dense matrix export limited to {limit} sites, operator has {n_sites}")]
    TooLargeForDense { n_sites: usize, limit: usize },
}

/// Single-site Pauli operator label. The identity is implied on all sites a
/// string does not touch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn from_char(c: char) -> Result<Self, PauliError> {
        match c {
            'X' | 'x' => Ok(Pauli::X),
            'Y' | 'y' => Ok(Pauli::Y),
            'Z' | 'z' => Ok(Pauli::Z),
            other => Err(PauliError::BadLabel {
                label: other.to_string(),
            }),
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// Canonical key of a string: (site, label) pairs sorted by site.
pub type StringKey = Vec<(usize, Pauli)>;

/// A tensor product of Pauli operators on distinct sites of an `n_sites`
/// lattice. Hermitian and self-inverse as an operator.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PauliString {
    n_sites: usize,
    ops: StringKey,
}

impl PauliString {
    /// Canonical constructor: sorts `sites` ascending and permutes `labels`
    /// in lockstep.
    pub fn new(labels: &[Pauli], sites: &[usize], n_sites: usize) -> Result<Self, PauliError> {
        if labels.len() != sites.len() {
            return Err(PauliError::LengthMismatch {
                labels: labels.len(),
                sites: sites.len(),
            });
        }
        if labels.is_empty() {
            return Err(PauliError::EmptyString);
        }
        let mut ops: StringKey = sites.iter().copied().zip(labels.iter().copied()).collect();
        ops.sort_by_key(|&(s, _)| s);
        for (i, &(site, _)) in ops.iter().enumerate() {
            if site >= n_sites {
                return Err(PauliError::OutOfRangeSite { site, n_sites });
            }
            if i > 0 && ops[i - 1].0 == site {
                return Err(PauliError::DuplicateSite { site });
            }
        }
        Ok(Self { n_sites, ops })
    }

    /// Parse labels given as a string, e.g. `"ZZ"` with sites `[0, 1]`.
    pub fn parse(labels: &str, sites: &[usize], n_sites: usize) -> Result<Self, PauliError> {
        let labels: Vec<Pauli> = labels
            .chars()
            .map(Pauli::from_char)
            .collect::<Result<_, _>>()?;
        Self::new(&labels, sites, n_sites)
    }

    pub fn single(label: Pauli, site: usize, n_sites: usize) -> Result<Self, PauliError> {
        Self::new(&[label], &[site], n_sites)
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    /// (site, label) pairs, sites strictly ascending.
    pub fn ops(&self) -> &[(usize, Pauli)] {
        &self.ops
    }

    pub fn sites(&self) -> impl Iterator<Item = usize> + '_ {
        self.ops.iter().map(|&(s, _)| s)
    }

    pub fn labels(&self) -> impl Iterator<Item = Pauli> + '_ {
        self.ops.iter().map(|&(_, l)| l)
    }

    pub fn key(&self) -> &StringKey {
        &self.ops
    }

    /// Bit masks of the sites carrying X/Y (`flip`), Y and Z factors. These
    /// drive the state-vector kernels: acting on a basis state `b`,
    /// `P|b⟩ = phase(b)·|b ^ flip_mask⟩`.
    pub fn masks(&self) -> StringMasks {
        let mut flip = 0u64;
        let mut y = 0u64;
        let mut z = 0u64;
        for &(site, label) in &self.ops {
            let bit = 1u64 << site;
            match label {
                Pauli::X => flip |= bit,
                Pauli::Y => {
                    flip |= bit;
                    y |= bit;
                }
                Pauli::Z => z |= bit,
            }
        }
        StringMasks {
            flip,
            sign: y | z,
            i_pow_ny: I_POWERS[(y.count_ones() % 4) as usize],
        }
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, &(site, label)) in self.ops.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}_{}", label, site)?;
        }
        Ok(())
    }
}

const I_POWERS: [Complex64; 4] = [
    Complex64::new(1.0, 0.0),
    Complex64::new(0.0, 1.0),
    Complex64::new(-1.0, 0.0),
    Complex64::new(0.0, -1.0),
];

/// Precomputed action of a string on computational basis states.
#[derive(Debug, Clone, Copy)]
pub struct StringMasks {
    /// Bits flipped by the string (X and Y sites).
    pub flip: u64,
    /// Bits contributing a (-1)^bit sign (Y and Z sites).
    pub sign: u64,
    /// Constant factor i^{#Y}.
    pub i_pow_ny: Complex64,
}

impl StringMasks {
    /// `phase(b)` with `P|b⟩ = phase(b)·|b ^ flip⟩`.
    #[inline]
    pub fn phase(&self, basis: u64) -> Complex64 {
        if (basis & self.sign).count_ones() & 1 == 1 {
            -self.i_pow_ny
        } else {
            self.i_pow_ny
        }
    }
}

/// One weighted string.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PauliTerm {
    pub string: PauliString,
    pub coeff: Complex64,
}

impl PauliTerm {
    pub fn new(string: PauliString, coeff: Complex64) -> Self {
        Self { string, coeff }
    }
}

/// A simplified weighted sum of Pauli strings on `n_sites` sites.
///
/// Terms live in a map keyed by the canonical string key, so duplicate keys
/// merge by coefficient addition and iteration order is deterministic.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PauliSumOperator {
    n_sites: usize,
    terms: BTreeMap<StringKey, Complex64>,
}

impl PauliSumOperator {
    pub fn new(n_sites: usize) -> Self {
        assert!(n_sites >= 1, "operator needs at least one site");
        Self {
            n_sites,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_terms(
        n_sites: usize,
        terms: impl IntoIterator<Item = PauliTerm>,
    ) -> Result<Self, PauliError> {
        let mut op = Self::new(n_sites);
        for t in terms {
            op.add_term(t)?;
        }
        Ok(op)
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn n_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Add one term, merging with any existing term on the same canonical
    /// key. Merged coefficients below [`COEFF_PRUNE_TOL`] drop out.
    pub fn add_term(&mut self, term: PauliTerm) -> Result<(), PauliError> {
        if term.string.n_sites() != self.n_sites {
            return Err(PauliError::SiteCountMismatch {
                expected: self.n_sites,
                got: term.string.n_sites(),
            });
        }
        if !term.coeff.re.is_finite() || !term.coeff.im.is_finite() {
            panic!("non-finite coefficient in Pauli term");
        }
        let entry = self.terms.entry(term.string.ops.clone()).or_insert(Complex64::new(0.0, 0.0));
        *entry += term.coeff;
        if entry.norm() < COEFF_PRUNE_TOL {
            self.terms.remove(&term.string.ops);
        }
        Ok(())
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c *= factor;
        }
        out
    }

    /// Terms in canonical key order.
    pub fn terms(&self) -> impl Iterator<Item = PauliTerm> + '_ {
        self.terms.iter().map(move |(key, &coeff)| PauliTerm {
            string: PauliString {
                n_sites: self.n_sites,
                ops: key.clone(),
            },
            coeff,
        })
    }

    /// (key, coefficient) view without rebuilding strings.
    pub fn entries(&self) -> impl Iterator<Item = (&StringKey, Complex64)> + '_ {
        self.terms.iter().map(|(k, &c)| (k, c))
    }

    pub fn coeff_of(&self, key: &StringKey) -> Option<Complex64> {
        self.terms.get(key).copied()
    }

    /// Dense 2^n × 2^n matrix under the little-endian site-to-bit convention
    /// (bit j of the basis index is the state of site j, bit 0 ↔ Z = +1).
    pub fn to_matrix_dense(&self) -> Result<nalgebra::DMatrix<Complex64>, PauliError> {
        if self.n_sites > DENSE_SITE_LIMIT {
            return Err(PauliError::TooLargeForDense {
                n_sites: self.n_sites,
                limit: DENSE_SITE_LIMIT,
            });
        }
        let dim = 1usize << self.n_sites;
        let mut m = nalgebra::DMatrix::<Complex64>::zeros(dim, dim);
        for term in self.terms() {
            let masks = term.string.masks();
            for col in 0..dim {
                let row = col ^ masks.flip as usize;
                // ⟨row|P|col⟩ = phase(col)
                m[(row, col)] += term.coeff * masks.phase(col as u64);
            }
        }
        Ok(m)
    }

    /// Sparse export as coordinate triplets (row, col, value), sorted by
    /// (col, row); duplicate coordinates are pre-merged.
    pub fn to_matrix_sparse(&self) -> Vec<(usize, usize, Complex64)> {
        let dim = 1usize << self.n_sites;
        let mut map: BTreeMap<(usize, usize), Complex64> = BTreeMap::new();
        for term in self.terms() {
            let masks = term.string.masks();
            for col in 0..dim {
                let row = col ^ masks.flip as usize;
                *map.entry((col, row)).or_insert(Complex64::new(0.0, 0.0)) +=
                    term.coeff * masks.phase(col as u64);
            }
        }
        map.into_iter()
            .filter(|(_, v)| v.norm() >= COEFF_PRUNE_TOL)
            .map(|((col, row), v)| (row, col, v))
            .collect()
    }
}

impl PartialEq for PauliSumOperator {
    /// Canonical equality: same site count and all per-key coefficients equal
    /// within [`OPERATOR_EQ_TOL`].
    fn eq(&self, other: &Self) -> bool {
        if self.n_sites != other.n_sites {
            return false;
        }
        let zero = Complex64::new(0.0, 0.0);
        for key in self.terms.keys().chain(other.terms.keys()) {
            let a = self.terms.get(key).copied().unwrap_or(zero);
            let b = other.terms.get(key).copied().unwrap_or(zero);
            if (a - b).norm() > OPERATOR_EQ_TOL {
                return false;
            }
        }
        true
    }
}
