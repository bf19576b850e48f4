//! Ground spaces of sparse Hermitian operators.
//!
//! The lowest eigenpair is found with Lanczos iterations (full
//! reorthogonalization, explicit restarts from the current Ritz vector).
//! Further ground-space vectors are obtained by rerunning the iteration in
//! the orthogonal complement of everything found so far, until the next
//! eigenvalue leaves the degeneracy window.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::spin_ops::{dot, expectation, norm_sqr, pauli_expectation, PauliString, SparseOperator, StateVector, C64};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EigensolverConfig {
    /// Eigenvalues within `degeneracy_tol * max(1, |E0|)` of the lowest one
    /// belong to the ground space.
    pub degeneracy_tol: f64,
    /// Total matrix-vector products allowed; `None` means `10 * dim`.
    pub max_steps: Option<usize>,
    /// Krylov subspace size per restart cycle.
    pub krylov_dim: usize,
    /// Ritz residual at which a pair counts as converged, relative to
    /// `max(1, |theta|)`.
    pub residual_tol: f64,
    pub seed: u64,
}

impl Default for EigensolverConfig {
    fn default() -> Self {
        EigensolverConfig {
            degeneracy_tol: 1e-9,
            max_steps: None,
            krylov_dim: 120,
            residual_tol: 1e-10,
            seed: 0x5eed_1a2c_705a_11ce,
        }
    }
}

/// Lowest eigenvalue with an orthonormal basis of its eigenspace.
#[derive(Clone, Debug, PartialEq)]
pub struct GroundSpace {
    pub energy: f64,
    pub basis: Vec<StateVector>,
}

impl GroundSpace {
    pub fn degeneracy(&self) -> usize {
        self.basis.len()
    }

    pub fn n(&self) -> usize {
        self.basis[0].n()
    }
}

struct Budget {
    left: usize,
    used: usize,
}

impl Budget {
    fn take(&mut self, residual: f64) -> Result<()> {
        if self.left == 0 {
            return Err(Error::NoConvergence { steps: self.used, residual });
        }
        self.left -= 1;
        self.used += 1;
        Ok(())
    }
}

pub fn ground_space(h: &SparseOperator, cfg: &EigensolverConfig) -> Result<GroundSpace> {
    let dim = h.dim();
    let mut budget = Budget { left: cfg.max_steps.unwrap_or(10 * dim), used: 0 };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    // Everything found so far; deflated from later runs.
    let mut locked: Vec<Vec<C64>> = Vec::new();
    let mut ground: Vec<usize> = Vec::new();
    let mut energy = f64::INFINITY;

    while locked.len() < dim {
        let (theta, v) = lowest_in_complement(h, &locked, &mut rng, &mut budget, cfg)?;
        let window = cfg.degeneracy_tol * theta.abs().max(1.0);
        if ground.is_empty() || theta < energy - window {
            // Earlier pairs were excited states; keep them deflated only.
            energy = theta;
            ground.clear();
        } else if theta > energy + window {
            break;
        }
        ground.push(locked.len());
        locked.push(v);
    }

    let basis = ground
        .into_iter()
        .map(|i| StateVector::normalized(core::mem::take(&mut locked[i])))
        .collect::<Result<Vec<_>>>()?;
    Ok(GroundSpace { energy, basis })
}

fn random_vector(dim: usize, rng: &mut ChaCha8Rng) -> Vec<C64> {
    (0..dim)
        .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect()
}

/// Removes the components of `w` along every vector in `sets`, repeating the
/// sweep once if it cancelled most of the norm.
fn orthogonalize(w: &mut [C64], sets: &[&[Vec<C64>]]) {
    for _ in 0..2 {
        let before = norm_sqr(w);
        for q in sets.iter().flat_map(|s| s.iter()) {
            let c = dot(q, w);
            for (wi, qi) in w.iter_mut().zip(q) {
                *wi -= c * qi;
            }
        }
        if norm_sqr(w) > 0.5 * before {
            break;
        }
    }
}

fn scale(v: &mut [C64], s: f64) {
    v.iter_mut().for_each(|x| *x *= s);
}

/// Lowest eigenvalue of the tridiagonal matrix and its eigenvector.
fn tridiagonal_lowest(alpha: &[f64], beta: &[f64]) -> (f64, Vec<f64>) {
    let m = alpha.len();
    let t = DMatrix::from_fn(m, m, |i, j| {
        if i == j {
            alpha[i]
        } else if i + 1 == j {
            beta[i]
        } else if j + 1 == i {
            beta[j]
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(t);
    let (imin, &theta) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("nonempty tridiagonal");
    (theta, eig.eigenvectors.column(imin).iter().copied().collect())
}

fn ritz_vector(basis: &[Vec<C64>], coeffs: &[f64], dim: usize) -> Vec<C64> {
    let mut v = vec![C64::new(0.0, 0.0); dim];
    for (q, &s) in basis.iter().zip(coeffs) {
        for (vi, qi) in v.iter_mut().zip(q) {
            *vi += qi * s;
        }
    }
    v
}

fn residual_norm(h: &SparseOperator, v: &[C64], theta: f64) -> f64 {
    let hv = h.mul_vec(v);
    libm::sqrt(hv.iter().zip(v).map(|(a, b)| (a - b * theta).norm_sqr()).sum())
}

fn lowest_in_complement(
    h: &SparseOperator,
    locked: &[Vec<C64>],
    rng: &mut ChaCha8Rng,
    budget: &mut Budget,
    cfg: &EigensolverConfig,
) -> Result<(f64, Vec<C64>)> {
    let dim = h.dim();
    let room = dim - locked.len();
    let m_max = cfg.krylov_dim.clamp(2, room.max(2)).min(room);
    let mut start = random_vector(dim, rng);
    let mut last_residual = f64::INFINITY;

    loop {
        orthogonalize(&mut start, &[locked]);
        let nrm = libm::sqrt(norm_sqr(&start));
        if !(nrm > 1e-300) {
            start = random_vector(dim, rng);
            continue;
        }
        scale(&mut start, 1.0 / nrm);

        let mut basis: Vec<Vec<C64>> = vec![core::mem::take(&mut start)];
        let mut alpha: Vec<f64> = Vec::new();
        let mut beta: Vec<f64> = Vec::new();
        let mut w = vec![C64::new(0.0, 0.0); dim];

        loop {
            let j = basis.len() - 1;
            budget.take(last_residual)?;
            h.apply(&basis[j], &mut w);
            let a = dot(&basis[j], &w).re;
            alpha.push(a);
            for (wi, qi) in w.iter_mut().zip(&basis[j]) {
                *wi -= qi * a;
            }
            if j > 0 {
                let b = beta[j - 1];
                for (wi, qi) in w.iter_mut().zip(&basis[j - 1]) {
                    *wi -= qi * b;
                }
            }
            orthogonalize(&mut w, &[locked, &basis]);
            let b = libm::sqrt(norm_sqr(&w));

            let exhausted = b < 1e-12 * (a.abs().max(1.0)) || basis.len() >= m_max;
            if exhausted || alpha.len() % 8 == 0 {
                let (theta, s) = tridiagonal_lowest(&alpha, &beta);
                let estimate = b * s[s.len() - 1].abs();
                last_residual = estimate;
                let tol = cfg.residual_tol * theta.abs().max(1.0);
                if estimate < tol || exhausted {
                    let mut v = ritz_vector(&basis, &s, dim);
                    orthogonalize(&mut v, &[locked]);
                    let vn = libm::sqrt(norm_sqr(&v));
                    scale(&mut v, 1.0 / vn);
                    let rayleigh = expectation_raw(h, &v);
                    let res = residual_norm(h, &v, rayleigh);
                    last_residual = res;
                    if res < 10.0 * tol {
                        return Ok((rayleigh, v));
                    }
                    // Not good enough: restart from the Ritz vector.
                    start = v;
                    break;
                }
            }
            let mut q = core::mem::replace(&mut w, vec![C64::new(0.0, 0.0); dim]);
            scale(&mut q, 1.0 / b);
            beta.push(b);
            basis.push(q);
        }
    }
}

fn expectation_raw(h: &SparseOperator, v: &[C64]) -> f64 {
    dot(v, &h.mul_vec(v)).re
}

/// Expectation in the maximally mixed ground-space state, `tr(P op) / d`.
///
/// Reduces to `<v|op|v>` for a unique ground state, and is independent of
/// the basis chosen for a degenerate ground space.
pub fn ground_expectation(gs: &GroundSpace, op: &SparseOperator) -> Result<f64> {
    let mut acc = 0.0;
    for v in &gs.basis {
        acc += expectation(v, op)?;
    }
    Ok(acc / gs.degeneracy() as f64)
}

/// Same as [`ground_expectation`] for a Pauli string, without building the
/// operator.
pub fn ground_pauli_expectation(gs: &GroundSpace, ps: &PauliString) -> Result<f64> {
    let mut acc = 0.0;
    for v in &gs.basis {
        acc += pauli_expectation(v, ps)?;
    }
    Ok(acc / gs.degeneracy() as f64)
}
