//! Pauli algebra, state vectors and sparse operators on `n` spin-1/2 sites.
//!
//! Ordering convention, used by every module in the crate: site 0 is the
//! most significant bit of a computational-basis index. For `n = 3` the index
//! of `|b0 b1 b2>` is `4*b0 + 2*b1 + b2`.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use num_complex::Complex;

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;

/// Largest site count an operator may be embedded on unless a caller
/// overrides it.
pub const DEFAULT_MAX_SITES: usize = 14;

const NORM_TOL: f64 = 1e-10;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

/// Single-site Pauli label.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(u8)]
pub enum Pauli {
    I = 0,
    X = 1,
    Y = 2,
    Z = 3,
}

impl Pauli {
    pub const MEASUREMENT_BASES: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

    pub fn from_char(c: char) -> Result<Self> {
        match c {
            'I' | 'i' => Ok(Pauli::I),
            'X' | 'x' => Ok(Pauli::X),
            'Y' | 'y' => Ok(Pauli::Y),
            'Z' | 'z' => Ok(Pauli::Z),
            other => Err(Error::InvalidPauli(other)),
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub(crate) fn from_bits(bits: u8) -> Pauli {
        match bits & 3 {
            0 => Pauli::I,
            1 => Pauli::X,
            2 => Pauli::Y,
            _ => Pauli::Z,
        }
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// The standard 2x2 Pauli matrix, row-major.
pub fn pauli_matrix(label: Pauli) -> [[C64; 2]; 2] {
    match label {
        Pauli::I => [[ONE, ZERO], [ZERO, ONE]],
        Pauli::X => [[ZERO, ONE], [ONE, ZERO]],
        Pauli::Y => [[ZERO, -I], [I, ZERO]],
        Pauli::Z => [[ONE, ZERO], [ZERO, -ONE]],
    }
}

/// Tensor product of single-site Pauli labels.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    labels: Vec<Pauli>,
}

impl PauliString {
    pub fn new(labels: Vec<Pauli>) -> Self {
        PauliString { labels }
    }

    pub fn identity(n: usize) -> Self {
        PauliString { labels: vec![Pauli::I; n] }
    }

    /// Identity everywhere except the listed `(site, label)` pairs.
    pub fn from_sites(n: usize, sites: &[(usize, Pauli)]) -> Result<Self> {
        let mut labels = vec![Pauli::I; n];
        for &(site, p) in sites {
            if site >= n {
                return Err(Error::InvalidParams("site index out of range"));
            }
            labels[site] = p;
        }
        Ok(PauliString { labels })
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[Pauli] {
        &self.labels
    }

    pub fn label(&self, site: usize) -> Pauli {
        self.labels[site]
    }

    pub fn weight(&self) -> usize {
        self.labels.iter().filter(|&&p| p != Pauli::I).count()
    }

    /// Sites carrying a non-identity label, ascending.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.labels
            .iter()
            .enumerate()
            .filter(|(_, &p)| p != Pauli::I)
            .map(|(i, _)| i)
    }

    pub(crate) fn masks(&self) -> PauliMasks {
        let n = self.n();
        let mut m = PauliMasks { flip: 0, sign: 0, n_y: 0 };
        for (site, &p) in self.labels.iter().enumerate() {
            let bit = site_bit(n, site);
            match p {
                Pauli::I => {}
                Pauli::X => m.flip |= bit,
                Pauli::Y => {
                    m.flip |= bit;
                    m.sign |= bit;
                    m.n_y += 1;
                }
                Pauli::Z => m.sign |= bit,
            }
        }
        m
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.labels {
            write!(f, "{}", p.as_char())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(Pauli::from_char)
            .collect::<Result<Vec<_>>>()
            .map(PauliString::new)
    }
}

/// Bit of a computational-basis index that holds `site` (site 0 is the MSB).
#[inline]
pub fn site_bit(n: usize, site: usize) -> usize {
    1 << (n - 1 - site)
}

/// Row `r` of a Pauli string has a single nonzero at column `r ^ flip`, with
/// value `(-i)^n_y * (-1)^popcount(r & sign)`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct PauliMasks {
    pub flip: usize,
    pub sign: usize,
    pub n_y: u32,
}

impl PauliMasks {
    #[inline]
    pub fn element(&self, row: usize) -> (usize, C64) {
        let base = match self.n_y % 4 {
            0 => ONE,
            1 => -I,
            2 => -ONE,
            _ => I,
        };
        let v = if (row & self.sign).count_ones() % 2 == 1 { -base } else { base };
        (row ^ self.flip, v)
    }
}

/// Normalized pure state on `n` sites.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<C64>,
}

impl StateVector {
    /// Computational basis state `|index>`.
    pub fn basis(n: usize, index: usize) -> Self {
        let mut amps = vec![ZERO; 1 << n];
        amps[index] = ONE;
        StateVector { n, amps }
    }

    /// Wraps amplitudes that must already be normalized within 1e-10.
    pub fn from_amplitudes(amps: Vec<C64>) -> Result<Self> {
        let n = log2_exact(amps.len())?;
        let norm_sqr = norm_sqr(&amps);
        if (norm_sqr - 1.0).abs() > NORM_TOL {
            return Err(Error::Unnormalized { norm_sqr });
        }
        Ok(StateVector { n, amps })
    }

    /// Rescales arbitrary nonzero amplitudes to unit norm.
    pub fn normalized(mut amps: Vec<C64>) -> Result<Self> {
        let n = log2_exact(amps.len())?;
        let norm_sqr = norm_sqr(&amps);
        if !(norm_sqr > 0.0) || !norm_sqr.is_finite() {
            return Err(Error::Unnormalized { norm_sqr });
        }
        let s = 1.0 / libm::sqrt(norm_sqr);
        amps.iter_mut().for_each(|a| *a *= s);
        Ok(StateVector { n, amps })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(&self.amps)
    }

    pub fn inner(&self, other: &StateVector) -> C64 {
        dot(&self.amps, &other.amps)
    }
}

fn log2_exact(len: usize) -> Result<usize> {
    if len == 0 || !len.is_power_of_two() {
        return Err(Error::InvalidParams("amplitude count must be a power of two"));
    }
    Ok(len.trailing_zeros() as usize)
}

pub(crate) fn norm_sqr(v: &[C64]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum()
}

/// `<a|b>`, conjugating the left argument.
pub(crate) fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Hermitian operator on the `2^n`-dimensional space, stored as CSR.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseOperator {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<u32>,
    vals: Vec<C64>,
}

impl SparseOperator {
    pub fn identity(n: usize) -> Self {
        let dim = 1usize << n;
        SparseOperator {
            n,
            row_ptr: (0..=dim).collect(),
            cols: (0..dim as u32).collect(),
            vals: vec![ONE; dim],
        }
    }

    /// `sum_t coeff_t * P_t`, entries that cancel exactly are dropped.
    pub fn from_pauli_terms(n: usize, terms: &[(f64, PauliString)]) -> Result<Self> {
        Self::from_pauli_terms_capped(n, terms, DEFAULT_MAX_SITES)
    }

    pub fn from_pauli_terms_capped(
        n: usize,
        terms: &[(f64, PauliString)],
        max_sites: usize,
    ) -> Result<Self> {
        if n > max_sites {
            return Err(Error::TooManySites { n, cap: max_sites });
        }
        for (_, p) in terms {
            if p.n() != n {
                return Err(Error::DimensionMismatch { expected: n, found: p.n() });
            }
        }
        let masks: Vec<(f64, PauliMasks)> = terms.iter().map(|(c, p)| (*c, p.masks())).collect();
        let dim = 1usize << n;
        let mut row_ptr = Vec::with_capacity(dim + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        let mut row: Vec<(usize, C64)> = Vec::with_capacity(masks.len());
        row_ptr.push(0);
        for r in 0..dim {
            row.clear();
            row.extend(masks.iter().map(|(c, m)| {
                let (col, v) = m.element(r);
                (col, v * *c)
            }));
            row.sort_unstable_by_key(|e| e.0);
            let mut i = 0;
            while i < row.len() {
                let col = row[i].0;
                let mut acc = ZERO;
                while i < row.len() && row[i].0 == col {
                    acc += row[i].1;
                    i += 1;
                }
                if acc != ZERO {
                    cols.push(col as u32);
                    vals.push(acc);
                }
            }
            row_ptr.push(cols.len());
        }
        Ok(SparseOperator { n, row_ptr, cols, vals })
    }

    pub fn n_sites(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// Nonzeros of row `r` as `(column, value)`.
    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, C64)> + '_ {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        self.cols[span.clone()]
            .iter()
            .zip(&self.vals[span])
            .map(|(&c, &v)| (c as usize, v))
    }

    /// `out = self * x`.
    pub fn apply(&self, x: &[C64], out: &mut [C64]) {
        debug_assert_eq!(x.len(), self.dim());
        debug_assert_eq!(out.len(), self.dim());
        for (r, o) in out.iter_mut().enumerate() {
            let span = self.row_ptr[r]..self.row_ptr[r + 1];
            *o = self.cols[span.clone()]
                .iter()
                .zip(&self.vals[span])
                .map(|(&c, &v)| v * x[c as usize])
                .sum();
        }
    }

    pub fn mul_vec(&self, x: &[C64]) -> Vec<C64> {
        let mut out = vec![ZERO; self.dim()];
        self.apply(x, &mut out);
        out
    }

    fn get(&self, r: usize, c: usize) -> C64 {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        match self.cols[span.clone()].binary_search(&(c as u32)) {
            Ok(i) => self.vals[span.start + i],
            Err(_) => ZERO,
        }
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        (0..self.dim()).all(|r| self.row(r).all(|(c, v)| (self.get(c, r).conj() - v).norm() <= tol))
    }

    /// `alpha * self + beta * other`.
    pub fn linear_combination(&self, alpha: f64, other: &SparseOperator, beta: f64) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        let mut row_ptr = Vec::with_capacity(self.dim() + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for r in 0..self.dim() {
            let mut a = self.row(r).peekable();
            let mut b = other.row(r).peekable();
            loop {
                let (c, v) = match (a.peek(), b.peek()) {
                    (None, None) => break,
                    (Some(&(ca, va)), Some(&(cb, vb))) if ca == cb => {
                        a.next();
                        b.next();
                        (ca, va * alpha + vb * beta)
                    }
                    (Some(&(ca, va)), Some(&(cb, _))) if ca < cb => {
                        a.next();
                        (ca, va * alpha)
                    }
                    (Some(&(ca, va)), None) => {
                        a.next();
                        (ca, va * alpha)
                    }
                    (_, Some(&(cb, vb))) => {
                        b.next();
                        (cb, vb * beta)
                    }
                };
                if v != ZERO {
                    cols.push(c as u32);
                    vals.push(v);
                }
            }
            row_ptr.push(cols.len());
        }
        Ok(SparseOperator { n: self.n, row_ptr, cols, vals })
    }

    /// Row-major dense copy; restricted to `n <= 8`.
    pub fn to_dense(&self) -> Result<Vec<C64>> {
        if self.n > 8 {
            return Err(Error::TooManySites { n: self.n, cap: 8 });
        }
        let dim = self.dim();
        let mut out = vec![ZERO; dim * dim];
        for r in 0..dim {
            for (c, v) in self.row(r) {
                out[r * dim + c] = v;
            }
        }
        Ok(out)
    }
}

pub fn embed_pauli_string(ps: &PauliString) -> Result<SparseOperator> {
    embed_pauli_string_capped(ps, DEFAULT_MAX_SITES)
}

pub fn embed_pauli_string_capped(ps: &PauliString, max_sites: usize) -> Result<SparseOperator> {
    let n = ps.n();
    if n > max_sites {
        return Err(Error::TooManySites { n, cap: max_sites });
    }
    let m = ps.masks();
    let dim = 1usize << n;
    let mut cols = Vec::with_capacity(dim);
    let mut vals = Vec::with_capacity(dim);
    for r in 0..dim {
        let (c, v) = m.element(r);
        cols.push(c as u32);
        vals.push(v);
    }
    Ok(SparseOperator { n, row_ptr: (0..=dim).collect(), cols, vals })
}

fn real_part(z: C64) -> Result<f64> {
    if z.im.abs() > NORM_TOL * z.re.abs().max(1.0) {
        return Err(Error::NonRealExpectation { imag: z.im });
    }
    Ok(z.re)
}

/// `<psi|op|psi>`; fails if the result is not real within 1e-10.
pub fn expectation(state: &StateVector, op: &SparseOperator) -> Result<f64> {
    if state.dim() != op.dim() {
        return Err(Error::DimensionMismatch { expected: op.dim(), found: state.dim() });
    }
    let amps = state.amplitudes();
    let z: C64 = (0..op.dim())
        .map(|r| {
            let row: C64 = op.row(r).map(|(c, v)| v * amps[c]).sum();
            amps[r].conj() * row
        })
        .sum();
    real_part(z)
}

/// Matrix-free `<psi|P|psi>` for a Pauli string.
pub fn pauli_expectation(state: &StateVector, ps: &PauliString) -> Result<f64> {
    if state.n() != ps.n() {
        return Err(Error::DimensionMismatch { expected: 1 << ps.n(), found: state.dim() });
    }
    let m = ps.masks();
    let amps = state.amplitudes();
    let z: C64 = amps
        .iter()
        .enumerate()
        .map(|(r, a)| {
            let (c, v) = m.element(r);
            a.conj() * v * amps[c]
        })
        .sum();
    real_part(z)
}

/// Pauli-string labels joined for column names, e.g. `"zz"`.
pub fn lowercase_labels(ps: &PauliString) -> String {
    ps.support().map(|s| ps.label(s).as_char().to_ascii_lowercase()).collect()
}
