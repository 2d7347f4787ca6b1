//! Hermitian Hamiltonians built from restricted Pauli term families.
//!
//! A [`Hamiltonian`] is a [`PauliSumOperator`] limited to single-site `X`,
//! `Y`, `Z` terms and homogeneous two-site `XX`, `YY`, `ZZ` couplings, with
//! real coefficients. Mixed two-site strings such as `XY` stay available at
//! the [`PauliSumOperator`] level but are rejected here.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pauli::{Pauli, PauliError, PauliString, PauliSumOperator, PauliTerm};

#[derive(Debug, Error, PartialEq)]
pub enum HamiltonianError {
    #[error("unsupported term key {key:?}; expected one of X, Y, Z, XX, YY, ZZ")]
    BadKey { key: String },
    #[error("value for key {key:?} has wrong shape: {detail}")]
    ShapeMismatch { key: String, detail: String },
    #[error("coefficient for key {key:?} has imaginary part {imag}")]
    ComplexCoefficient { key: String, imag: f64 },
    #[error("two-site key {key:?} needs a boundary condition")]
    MissingBoundaryCondition { key: String },
    #[error(transparent)]
    Pauli(#[from] PauliError),
}

/// Chain boundary condition. `PBC` identifies site `L` with site `0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BoundaryCondition {
    #[serde(rename = "OBC")]
    Obc,
    #[serde(rename = "PBC")]
    Pbc,
}

impl fmt::Display for BoundaryCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundaryCondition::Obc => write!(f, "OBC"),
            BoundaryCondition::Pbc => write!(f, "PBC"),
        }
    }
}

impl std::str::FromStr for BoundaryCondition {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "OBC" => Ok(BoundaryCondition::Obc),
            "PBC" => Ok(BoundaryCondition::Pbc),
            other => Err(format!("unknown boundary condition {other:?}")),
        }
    }
}

/// Term family accepted by the Hamiltonian interface.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum TermKey {
    Single(Pauli),
    Double(Pauli),
}

impl TermKey {
    pub fn parse(key: &str) -> Result<Self, HamiltonianError> {
        let bad = || HamiltonianError::BadKey { key: key.to_string() };
        let chars: Vec<char> = key.chars().collect();
        match chars.as_slice() {
            [c] => Ok(TermKey::Single(Pauli::from_char(*c).map_err(|_| bad())?)),
            [a, b] if a == b => Ok(TermKey::Double(Pauli::from_char(*a).map_err(|_| bad())?)),
            _ => Err(bad()),
        }
    }

    pub fn is_two_site(self) -> bool {
        matches!(self, TermKey::Double(_))
    }

    fn label(self) -> Pauli {
        match self {
            TermKey::Single(p) | TermKey::Double(p) => p,
        }
    }

    fn as_string(self) -> String {
        match self {
            TermKey::Single(p) => p.to_string(),
            TermKey::Double(p) => format!("{p}{p}"),
        }
    }
}

/// One value of a terms dictionary. Scalars for two-site keys must carry a
/// boundary condition; coefficient arrays spell the couplings out per site or
/// per site pair.
#[derive(Debug, Clone, PartialEq)]
pub enum TermsValue {
    Scalar(f64),
    UniformWithBc(f64, BoundaryCondition),
    PerSite(Vec<f64>),
    Couplings(Vec<Vec<f64>>),
    /// Explicit (coefficient, sites) pairs.
    Pairs(Vec<(f64, Vec<usize>)>),
}

/// A Hermitian spin Hamiltonian on `n_sites` sites.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Hamiltonian {
    inner: PauliSumOperator,
    /// Boundary conditions seen while adding uniform two-site families,
    /// kept for the display form.
    uniform_bcs: Vec<BoundaryCondition>,
}

impl PartialEq for Hamiltonian {
    /// Canonical operator equality; display metadata does not participate.
    fn eq(&self, other: &Self) -> bool {
        self.inner == other.inner
    }
}

impl Hamiltonian {
    pub fn new(n_sites: usize) -> Self {
        Self {
            inner: PauliSumOperator::new(n_sites),
            uniform_bcs: Vec::new(),
        }
    }

    /// Build from a dictionary of term families, as in
    /// `{"ZZ": (J, "PBC"), "X": h}` or with explicit coefficient arrays.
    pub fn from_terms_dict(
        n_sites: usize,
        dict: impl IntoIterator<Item = (String, TermsValue)>,
    ) -> Result<Self, HamiltonianError> {
        let mut h = Self::new(n_sites);
        // Deterministic construction order regardless of the input map.
        let entries: BTreeMap<String, TermsValue> = dict.into_iter().collect();
        for (key, value) in entries {
            let tk = TermKey::parse(&key)?;
            match value {
                TermsValue::Scalar(c) => {
                    if tk.is_two_site() {
                        return Err(HamiltonianError::MissingBoundaryCondition { key });
                    }
                    h.add_uniform_terms(&key, c, None)?;
                }
                TermsValue::UniformWithBc(c, bc) => {
                    h.add_uniform_terms(&key, c, Some(bc))?;
                }
                TermsValue::PerSite(coeffs) => {
                    if tk.is_two_site() {
                        return Err(HamiltonianError::ShapeMismatch {
                            key,
                            detail: "two-site key needs an n×n coupling array".into(),
                        });
                    }
                    if coeffs.len() != n_sites {
                        return Err(HamiltonianError::ShapeMismatch {
                            key,
                            detail: format!("expected {} entries, got {}", n_sites, coeffs.len()),
                        });
                    }
                    for (site, &c) in coeffs.iter().enumerate() {
                        if c != 0.0 {
                            h.add_term(&key, c, &[site])?;
                        }
                    }
                }
                TermsValue::Couplings(rows) => {
                    if !tk.is_two_site() {
                        return Err(HamiltonianError::ShapeMismatch {
                            key,
                            detail: "single-site key needs a length-n array".into(),
                        });
                    }
                    if rows.len() != n_sites || rows.iter().any(|r| r.len() != n_sites) {
                        return Err(HamiltonianError::ShapeMismatch {
                            key,
                            detail: format!("expected an {n_sites}×{n_sites} array"),
                        });
                    }
                    // Each non-zero J[i][j] is one independent bond term;
                    // duplicate (i,j)/(j,i) entries merge by summation.
                    for (i, row) in rows.iter().enumerate() {
                        for (j, &c) in row.iter().enumerate() {
                            if c != 0.0 {
                                h.add_term(&key, c, &[i, j])?;
                            }
                        }
                    }
                }
                TermsValue::Pairs(pairs) => {
                    for (c, sites) in pairs {
                        h.add_term(&key, c, &sites)?;
                    }
                }
            }
        }
        Ok(h)
    }

    /// Add a translationally invariant family: one term per site, or one per
    /// bond for two-site keys (`L` bonds under PBC, `L-1` under OBC).
    pub fn add_uniform_terms(
        &mut self,
        key: &str,
        coeff: f64,
        bc: Option<BoundaryCondition>,
    ) -> Result<&mut Self, HamiltonianError> {
        let tk = TermKey::parse(key)?;
        let n = self.inner.n_sites();
        match tk {
            TermKey::Single(_) => {
                for site in 0..n {
                    self.add_term(key, coeff, &[site])?;
                }
            }
            TermKey::Double(_) => {
                let bc = bc.ok_or_else(|| HamiltonianError::MissingBoundaryCondition {
                    key: key.to_string(),
                })?;
                let bonds = match bc {
                    BoundaryCondition::Obc => n - 1,
                    BoundaryCondition::Pbc => n,
                };
                for i in 0..bonds {
                    self.add_term(key, coeff, &[i, (i + 1) % n])?;
                }
                self.uniform_bcs.push(bc);
            }
        }
        Ok(self)
    }

    /// Add one term of an accepted family on explicit sites.
    pub fn add_term(
        &mut self,
        key: &str,
        coeff: f64,
        sites: &[usize],
    ) -> Result<&mut Self, HamiltonianError> {
        let tk = TermKey::parse(key)?;
        if !coeff.is_finite() {
            return Err(HamiltonianError::ShapeMismatch {
                key: key.to_string(),
                detail: "non-finite coefficient".into(),
            });
        }
        let expected = if tk.is_two_site() { 2 } else { 1 };
        if sites.len() != expected {
            return Err(HamiltonianError::ShapeMismatch {
                key: key.to_string(),
                detail: format!("expected {} site(s), got {}", expected, sites.len()),
            });
        }
        let labels = vec![tk.label(); expected];
        let string = PauliString::new(&labels, sites, self.inner.n_sites())?;
        self.inner
            .add_term(PauliTerm::new(string, Complex64::new(coeff, 0.0)))?;
        Ok(self)
    }

    /// Add many explicit terms at once, keyed by family:
    /// `{"ZZ": [(J, (0,1)), …], "X": [(h, (0,)), …]}`.
    pub fn add_terms_dict(
        &mut self,
        dict: impl IntoIterator<Item = (String, Vec<(f64, Vec<usize>)>)>,
    ) -> Result<&mut Self, HamiltonianError> {
        let entries: BTreeMap<String, Vec<(f64, Vec<usize>)>> = dict.into_iter().collect();
        for (key, pairs) in entries {
            for (coeff, sites) in pairs {
                self.add_term(&key, coeff, &sites)?;
            }
        }
        Ok(self)
    }

    /// Wrap an existing Pauli sum, checking the family restriction and
    /// Hermiticity (real coefficients).
    pub fn from_pauli_sum(op: PauliSumOperator) -> Result<Self, HamiltonianError> {
        for term in op.terms() {
            let labels: Vec<Pauli> = term.string.labels().collect();
            let key: String = labels.iter().map(|p| p.as_char()).collect();
            let family_ok = match labels.as_slice() {
                [_] => true,
                [a, b] => a == b,
                _ => false,
            };
            if !family_ok {
                return Err(HamiltonianError::BadKey { key });
            }
            if term.coeff.im.abs() > 1e-12 {
                return Err(HamiltonianError::ComplexCoefficient {
                    key,
                    imag: term.coeff.im,
                });
            }
        }
        Ok(Self {
            inner: op,
            uniform_bcs: Vec::new(),
        })
    }

    pub fn n_sites(&self) -> usize {
        self.inner.n_sites()
    }

    pub fn n_terms(&self) -> usize {
        self.inner.n_terms()
    }

    pub fn as_pauli_sum(&self) -> &PauliSumOperator {
        &self.inner
    }

    pub fn to_matrix_dense(&self) -> Result<nalgebra::DMatrix<Complex64>, PauliError> {
        self.inner.to_matrix_dense()
    }

    pub fn to_matrix_sparse(&self) -> Vec<(usize, usize, Complex64)> {
        self.inner.to_matrix_sparse()
    }

    /// Real coefficients per term in canonical order.
    pub fn real_terms(&self) -> impl Iterator<Item = (PauliString, f64)> + '_ {
        self.inner.terms().map(|t| (t.string, t.coeff.re))
    }

    pub(crate) fn note_uniform_bc(&mut self, bc: BoundaryCondition) {
        self.uniform_bcs.push(bc);
    }

    /// Detect a 1D uniform family structure for the pretty printer. Returns
    /// `(families, bc)` where each family is `(key, coefficient)`, or `None`
    /// when the term content is not uniform.
    fn uniform_structure(&self) -> Option<(Vec<(TermKey, f64)>, Option<BoundaryCondition>)> {
        let n = self.n_sites();
        let mut families: BTreeMap<TermKey, Vec<(Vec<usize>, f64)>> = BTreeMap::new();
        for term in self.inner.terms() {
            let labels: Vec<Pauli> = term.string.labels().collect();
            let sites: Vec<usize> = term.string.sites().collect();
            let key = match labels.as_slice() {
                [p] => TermKey::Single(*p),
                [a, b] if a == b => TermKey::Double(*a),
                _ => return None,
            };
            families.entry(key).or_default().push((sites, term.coeff.re));
        }
        let mut out = Vec::new();
        let mut bc_seen: Option<BoundaryCondition> = None;
        for (key, mut terms) in families {
            terms.sort_by(|a, b| a.0.cmp(&b.0));
            let coeff = terms[0].1;
            if terms.iter().any(|(_, c)| (c - coeff).abs() > 1e-9) {
                return None;
            }
            match key {
                TermKey::Single(_) => {
                    if terms.len() != n {
                        return None;
                    }
                    for (i, (sites, _)) in terms.iter().enumerate() {
                        if sites[0] != i {
                            return None;
                        }
                    }
                }
                TermKey::Double(_) => {
                    let chain: Vec<Vec<usize>> = (0..n - 1).map(|i| vec![i, i + 1]).collect();
                    let got: Vec<Vec<usize>> = terms.iter().map(|(s, _)| s.clone()).collect();
                    let bc = if got == chain {
                        BoundaryCondition::Obc
                    } else {
                        // Canonicalized wrap bond [0, n-1] sorts right after [0, 1].
                        let mut ring = chain.clone();
                        ring.insert(1, vec![0, n - 1]);
                        if got == ring {
                            BoundaryCondition::Pbc
                        } else {
                            return None;
                        }
                    };
                    match bc_seen {
                        None => bc_seen = Some(bc),
                        Some(prev) if prev == bc => {}
                        _ => return None,
                    }
                }
            }
            out.push((key, coeff));
        }
        Some((out, bc_seen))
    }
}

/// Round to 3 significant digits and trim trailing zeros, so 0.176777
/// prints as `0.177` and 0.25 stays `0.25`.
fn format_coeff(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    let digits_before = x.abs().log10().floor() as i32 + 1;
    let decimals = (3 - digits_before).max(0) as usize;
    let s = format!("{:.*}", decimals, x);
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

impl fmt::Display for Hamiltonian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.inner.is_empty() {
            return write!(f, "0");
        }
        if let Some((families, bc)) = self.uniform_structure() {
            // Families sorted by key string, matching the X < XX < Y < … order.
            let mut parts: Vec<(String, String)> = families
                .iter()
                .map(|(key, coeff)| {
                    let body = match key {
                        TermKey::Single(p) => format!("Σ_i {p}_i"),
                        TermKey::Double(p) => format!("Σ_i {p}_i {p}_i+1"),
                    };
                    (key.as_string(), format!("{} * {}", format_coeff(*coeff), body))
                })
                .collect();
            parts.sort_by(|a, b| a.0.cmp(&b.0));
            let line = parts
                .into_iter()
                .map(|(_, s)| s)
                .collect::<Vec<_>>()
                .join(" + ");
            write!(f, "{line}")?;
            if let Some(bc) = bc {
                write!(f, " (Sums using {bc})")?;
            }
            return Ok(());
        }
        // Fallback: raw term list.
        let rendered: Vec<String> = self
            .inner
            .terms()
            .map(|t| format!("{} * {}", format_coeff(t.coeff.re), t.string))
            .collect();
        write!(f, "{}", rendered.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn terms_dict_builds_tfim() {
        let h = Hamiltonian::from_terms_dict(
            4,
            [
                (
                    "ZZ".to_string(),
                    TermsValue::UniformWithBc(-1.0, BoundaryCondition::Pbc),
                ),
                ("X".to_string(), TermsValue::Scalar(-1.0)),
            ],
        )
        .unwrap();
        assert_eq!(h.n_terms(), 8);
    }

    #[test]
    fn terms_dict_rejects_mixed_key() {
        let err = Hamiltonian::from_terms_dict(4, [("XY".to_string(), TermsValue::Scalar(1.0))])
            .unwrap_err();
        assert_eq!(err, HamiltonianError::BadKey { key: "XY".into() });
    }

    #[test]
    fn scalar_two_site_needs_bc() {
        let err = Hamiltonian::from_terms_dict(4, [("ZZ".to_string(), TermsValue::Scalar(1.0))])
            .unwrap_err();
        assert!(matches!(err, HamiltonianError::MissingBoundaryCondition { .. }));
    }

    #[test]
    fn per_site_shape_checked() {
        let err = Hamiltonian::from_terms_dict(
            4,
            [("X".to_string(), TermsValue::PerSite(vec![1.0, 2.0]))],
        )
        .unwrap_err();
        assert!(matches!(err, HamiltonianError::ShapeMismatch { .. }));
    }

    #[test]
    fn uniform_bond_counts() {
        let mut h = Hamiltonian::new(4);
        h.add_uniform_terms("ZZ", 0.25, Some(BoundaryCondition::Obc))
            .unwrap();
        assert_eq!(h.n_terms(), 3);

        let mut h = Hamiltonian::new(8);
        h.add_uniform_terms("Z", 0.2, None).unwrap();
        assert_eq!(h.n_terms(), 8);

        let err = Hamiltonian::new(4)
            .add_uniform_terms("ZZ", 0.25, None)
            .unwrap_err();
        assert!(matches!(err, HamiltonianError::MissingBoundaryCondition { .. }));
    }

    #[test]
    fn pbc_two_site_chain_merges_duplicate_bond() {
        // L=2 PBC: bonds (0,1) and (1,0) share the canonical key.
        let mut h = Hamiltonian::new(2);
        h.add_uniform_terms("ZZ", 0.25, Some(BoundaryCondition::Pbc))
            .unwrap();
        assert_eq!(h.n_terms(), 1);
        let t = h.real_terms().next().unwrap();
        assert!((t.1 - 0.5).abs() < 1e-15);
    }

    #[test]
    fn add_term_and_shape_errors() {
        let mut h = Hamiltonian::new(4);
        h.add_term("ZZ", -1.0, &[0, 1]).unwrap();
        h.add_term("X", -1.0, &[2]).unwrap();
        assert_eq!(h.n_terms(), 2);
        assert!(matches!(
            h.add_term("ZZ", 1.0, &[0]).unwrap_err(),
            HamiltonianError::ShapeMismatch { .. }
        ));
        assert!(matches!(
            h.add_term("ZZ", 1.0, &[1, 1]).unwrap_err(),
            HamiltonianError::Pauli(PauliError::DuplicateSite { .. })
        ));
    }

    #[test]
    fn from_pauli_sum_enforces_hermiticity() {
        let mut op = PauliSumOperator::new(2);
        op.add_term(PauliTerm::new(
            PauliString::single(Pauli::Z, 0, 2).unwrap(),
            Complex64::new(0.0, 1.0),
        ))
        .unwrap();
        assert!(matches!(
            Hamiltonian::from_pauli_sum(op).unwrap_err(),
            HamiltonianError::ComplexCoefficient { .. }
        ));
    }

    #[test]
    fn display_uniform_line() {
        let mut h = Hamiltonian::new(8);
        h.add_uniform_terms("XX", 0.25, Some(BoundaryCondition::Pbc))
            .unwrap();
        h.add_uniform_terms("YY", 0.25, Some(BoundaryCondition::Pbc))
            .unwrap();
        h.add_uniform_terms("ZZ", 0.25 / std::f64::consts::SQRT_2, Some(BoundaryCondition::Pbc))
            .unwrap();
        h.add_uniform_terms("Z", 0.2, None).unwrap();
        let line = h.to_string();
        assert_eq!(
            line,
            "0.25 * Σ_i X_i X_i+1 + 0.25 * Σ_i Y_i Y_i+1 + 0.2 * Σ_i Z_i \
             + 0.177 * Σ_i Z_i Z_i+1 (Sums using PBC)"
        );
    }

    #[test]
    fn display_empty_and_fallback() {
        assert_eq!(Hamiltonian::new(3).to_string(), "0");
        let mut h = Hamiltonian::new(4);
        h.add_term("ZZ", -1.0, &[0, 2]).unwrap();
        let s = h.to_string();
        assert!(s.contains("Z_0 Z_2"), "{s}");
    }

    #[test]
    fn coeff_formatting() {
        assert_eq!(format_coeff(0.176777), "0.177");
        assert_eq!(format_coeff(0.25), "0.25");
        assert_eq!(format_coeff(0.2), "0.2");
        assert_eq!(format_coeff(-1.0), "-1");
        assert_eq!(format_coeff(12.345), "12.3");
    }
}
