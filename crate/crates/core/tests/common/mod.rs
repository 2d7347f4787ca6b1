//! Dense-matrix oracles, built independently of the production kernels:
//! operators assemble by explicit Kronecker products and evolution comes
//! from full eigendecompositions.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use svpite_core::pauli::{Pauli, PauliString, PauliSumOperator};
use svpite_core::state::StateVector;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn single_site(p: Option<Pauli>) -> DMatrix<Complex64> {
    let (a, b, d, e) = match p {
        None => (c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)),
        Some(Pauli::X) => (c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)),
        Some(Pauli::Y) => (c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)),
        Some(Pauli::Z) => (c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)),
    };
    DMatrix::from_row_slice(2, 2, &[a, b, d, e])
}

/// Kronecker assembly under the site-to-bit convention: site 0 is the least
/// significant bit, so the site-(L-1) factor sits leftmost.
pub fn dense_string(string: &PauliString) -> DMatrix<Complex64> {
    let n = string.n_sites();
    let by_site: std::collections::HashMap<usize, Pauli> =
        string.ops().iter().map(|&(s, p)| (s, p)).collect();
    let mut m = single_site(by_site.get(&(n - 1)).copied());
    for site in (0..n - 1).rev() {
        m = m.kronecker(&single_site(by_site.get(&site).copied()));
    }
    m
}

pub fn dense_operator(op: &PauliSumOperator) -> DMatrix<Complex64> {
    let dim = 1 << op.n_sites();
    let mut m = DMatrix::<Complex64>::zeros(dim, dim);
    for term in op.terms() {
        m += dense_string(&term.string) * term.coeff;
    }
    m
}

/// exp(-i·θ·M) by scaling and squaring with a Taylor kernel; no
/// eigendecomposition involved, so degenerate spectra cost nothing.
pub fn dense_expm(m: &DMatrix<Complex64>, theta: f64) -> DMatrix<Complex64> {
    let dim = m.nrows();
    let a = m * c(0.0, -theta);
    let norm = a
        .row_iter()
        .map(|r| r.iter().map(|x| x.norm()).sum::<f64>())
        .fold(0.0f64, f64::max);
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as u32 } else { 0 };
    let b = &a / c(2f64.powi(squarings as i32), 0.0);

    let mut result = DMatrix::<Complex64>::identity(dim, dim);
    let mut term = DMatrix::<Complex64>::identity(dim, dim);
    for k in 1..=24 {
        term = &term * &b / c(k as f64, 0.0);
        result += &term;
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

/// Ground eigenpair of a Hermitian matrix.
pub fn dense_ground(m: &DMatrix<Complex64>) -> (f64, Vec<Complex64>) {
    let (vals, vecs) = svpite_core::linalg::hermitian_eigen(m);
    (vals[0], vecs.column(0).iter().copied().collect())
}

pub fn apply_dense(m: &DMatrix<Complex64>, state: &StateVector) -> StateVector {
    let v = DVector::from_column_slice(state.amplitudes());
    let out = m * v;
    StateVector::from_amplitudes(state.n_sites(), out.iter().copied().collect()).unwrap()
}

pub fn max_abs_diff(a: &StateVector, b: &StateVector) -> f64 {
    a.amplitudes()
        .iter()
        .zip(b.amplitudes())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Deterministic pseudo-random Pauli string on `n_sites`.
pub fn random_string(rng: &mut impl rand::Rng, n_sites: usize) -> PauliString {
    use rand::seq::SliceRandom;
    let weight = rng.gen_range(1..=n_sites);
    let mut sites: Vec<usize> = (0..n_sites).collect();
    sites.shuffle(rng);
    sites.truncate(weight);
    let labels: Vec<Pauli> = (0..weight)
        .map(|_| *[Pauli::X, Pauli::Y, Pauli::Z].choose(rng).unwrap())
        .collect();
    PauliString::new(&labels, &sites, n_sites).unwrap()
}

pub fn random_state(rng: &mut impl rand::Rng, n_sites: usize) -> StateVector {
    let dim = 1usize << n_sites;
    let amps: Vec<Complex64> = (0..dim)
        .map(|_| c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
        .collect();
    let mut sv = StateVector::from_amplitudes(n_sites, amps).unwrap();
    sv.normalize().unwrap();
    sv
}
