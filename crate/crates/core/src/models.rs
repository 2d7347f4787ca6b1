//! Predefined spin models: 1D chains and the square lattice mapped onto a
//! 1D site index.
//!
//! Constructors take Pauli-operator couplings. Spin-operator conventions
//! follow from S = P/2; absorb the factors of 1/2 into the couplings.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hamiltonian::{BoundaryCondition, Hamiltonian, HamiltonianError};

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("model needs at least {min} sites per direction, got {got}")]
    TooFewSites { min: usize, got: usize },
    #[error(transparent)]
    Hamiltonian(#[from] HamiltonianError),
}

/// Row-major map of an Lx×Ly square lattice onto 1D site indices:
/// `index(x, y) = x + y·Lx`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeMap2D {
    pub lx: usize,
    pub ly: usize,
}

impl LatticeMap2D {
    pub fn new(lx: usize, ly: usize) -> Self {
        Self { lx, ly }
    }

    pub fn n_sites(&self) -> usize {
        self.lx * self.ly
    }

    #[inline]
    pub fn index(&self, x: usize, y: usize) -> usize {
        debug_assert!(x < self.lx && y < self.ly);
        x + y * self.lx
    }

    /// Nearest-neighbor bonds (right and up from every site); PBC wraps both
    /// axes, OBC drops the wrapping bonds.
    pub fn bonds(&self, bc: BoundaryCondition) -> Vec<(usize, usize)> {
        let mut bonds = Vec::new();
        for y in 0..self.ly {
            for x in 0..self.lx {
                let here = self.index(x, y);
                if x + 1 < self.lx {
                    bonds.push((here, self.index(x + 1, y)));
                } else if bc == BoundaryCondition::Pbc {
                    bonds.push((here, self.index(0, y)));
                }
                if y + 1 < self.ly {
                    bonds.push((here, self.index(x, y + 1)));
                } else if bc == BoundaryCondition::Pbc {
                    bonds.push((here, self.index(x, 0)));
                }
            }
        }
        bonds
    }
}

fn check_chain(l: usize) -> Result<(), ModelError> {
    if l < 2 {
        return Err(ModelError::TooFewSites { min: 2, got: l });
    }
    Ok(())
}

/// Transverse-field Ising chain: H = J Σ Z_i Z_{i+1} + h Σ X_i.
pub fn ising(l: usize, j: f64, h: f64, bc: BoundaryCondition) -> Result<Hamiltonian, ModelError> {
    check_chain(l)?;
    let mut ham = Hamiltonian::new(l);
    ham.add_uniform_terms("ZZ", j, Some(bc))?;
    ham.add_uniform_terms("X", h, None)?;
    Ok(ham)
}

/// Isotropic Heisenberg chain: H = J Σ (X_i X_{i+1} + Y_i Y_{i+1} + Z_i Z_{i+1}).
pub fn heisenberg(l: usize, j: f64, bc: BoundaryCondition) -> Result<Hamiltonian, ModelError> {
    xxz(l, j, 1.0, bc)
}

/// XY chain: H = J Σ (X_i X_{i+1} + Y_i Y_{i+1}).
pub fn xy(l: usize, j: f64, bc: BoundaryCondition) -> Result<Hamiltonian, ModelError> {
    check_chain(l)?;
    let mut ham = Hamiltonian::new(l);
    ham.add_uniform_terms("XX", j, Some(bc))?;
    ham.add_uniform_terms("YY", j, Some(bc))?;
    Ok(ham)
}

/// Anisotropic XXZ chain:
/// H = J Σ (X_i X_{i+1} + Y_i Y_{i+1} + Δ Z_i Z_{i+1}).
pub fn xxz(l: usize, j: f64, delta: f64, bc: BoundaryCondition) -> Result<Hamiltonian, ModelError> {
    check_chain(l)?;
    let mut ham = Hamiltonian::new(l);
    ham.add_uniform_terms("XX", j, Some(bc))?;
    ham.add_uniform_terms("YY", j, Some(bc))?;
    ham.add_uniform_terms("ZZ", j * delta, Some(bc))?;
    Ok(ham)
}

/// Heisenberg model on the Lx×Ly square lattice,
/// H = J Σ_{⟨ij⟩} (X_i X_j + Y_i Y_j + Z_i Z_j), with the row-major 1D map.
pub fn heisenberg_2d(
    lx: usize,
    ly: usize,
    j: f64,
    bc: BoundaryCondition,
) -> Result<Hamiltonian, ModelError> {
    if lx < 2 || ly < 2 {
        return Err(ModelError::TooFewSites { min: 2, got: lx.min(ly) });
    }
    let map = LatticeMap2D::new(lx, ly);
    let mut ham = Hamiltonian::new(map.n_sites());
    for (a, b) in map.bonds(bc) {
        for key in ["XX", "YY", "ZZ"] {
            ham.add_term(key, j, &[a, b])?;
        }
    }
    ham.note_uniform_bc(bc);
    Ok(ham)
}
