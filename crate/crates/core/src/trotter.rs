//! Compilation of a Hamiltonian and time step into an ordered sequence of
//! Pauli rotations.
//!
//! Order 1 sweeps the terms once per repetition with angles `c_k·dt`; order 2
//! is the symmetric half-step sweep (forward then backward at `c_k·dt/2`).
//! The term order is the canonical key order of the operator map, fixed so
//! that repeated runs are bit-reproducible.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hamiltonian::Hamiltonian;
use crate::pauli::PauliString;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TrotterError {
    #[error("unsupported Trotter order {0}; expected 1 or 2")]
    BadOrder(u32),
    #[error("time step must be finite")]
    BadTimeStep,
    #[error("reps must be at least 1")]
    BadReps,
}

/// Direction tag carried for bookkeeping; the adjoint flips it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    Forward,
    Backward,
}

/// An ordered rotation program. Applying it means running the rotation list
/// in order, `reps` times; the represented evolution time is `dt·reps`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrotterProgram {
    rotations: Vec<(PauliString, f64)>,
    reps: usize,
    dt: f64,
    order: u32,
    direction: Direction,
}

impl TrotterProgram {
    pub fn rotations(&self) -> &[(PauliString, f64)] {
        &self.rotations
    }

    pub fn reps(&self) -> usize {
        self.reps
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    /// Exact operator adjoint of the compiled program: reversed rotation
    /// order with negated angles. This inverts the program itself, not just
    /// the exponential it approximates, so `U·U† = 1` holds at the program
    /// level even at finite Trotter error.
    pub fn adjoint(&self) -> TrotterProgram {
        let rotations = self
            .rotations
            .iter()
            .rev()
            .map(|(s, a)| (s.clone(), -a))
            .collect();
        TrotterProgram {
            rotations,
            reps: self.reps,
            dt: -self.dt,
            order: self.order,
            direction: match self.direction {
                Direction::Forward => Direction::Backward,
                Direction::Backward => Direction::Forward,
            },
        }
    }
}

/// Compile `exp(-iH·dt)` per repetition at the given order.
pub fn build_trotter(
    h: &Hamiltonian,
    dt: f64,
    order: u32,
    reps: usize,
) -> Result<TrotterProgram, TrotterError> {
    if !dt.is_finite() {
        return Err(TrotterError::BadTimeStep);
    }
    if reps < 1 {
        return Err(TrotterError::BadReps);
    }
    let terms: Vec<(PauliString, f64)> = h.real_terms().collect();
    let rotations = match order {
        1 => terms
            .iter()
            .map(|(s, c)| (s.clone(), c * dt))
            .collect::<Vec<_>>(),
        2 => {
            let mut rot: Vec<(PauliString, f64)> = terms
                .iter()
                .map(|(s, c)| (s.clone(), c * dt / 2.0))
                .collect();
            rot.extend(terms.iter().rev().map(|(s, c)| (s.clone(), c * dt / 2.0)));
            rot
        }
        other => return Err(TrotterError::BadOrder(other)),
    };
    Ok(TrotterProgram {
        rotations,
        reps,
        dt,
        order,
        direction: Direction::Forward,
    })
}
