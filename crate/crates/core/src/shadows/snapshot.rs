use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::eigensolver::GroundSpace;
use crate::error::{Error, Result};
use crate::spin_ops::{Pauli, StateVector, C64};

/// Snapshots pack two bits of basis and one bit of outcome per qubit.
pub const MAX_SNAPSHOT_SITES: usize = 16;

const FRAC_1_SQRT_2: f64 = core::f64::consts::FRAC_1_SQRT_2;

/// One randomized measurement: the product basis that was measured and the
/// bit observed on every qubit.
///
/// Site `j` occupies bits `2j..2j+2` of `bases` (X = 1, Y = 2, Z = 3) and bit
/// `j` of `outcomes` (0 means the +1 eigenvalue).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Snapshot {
    bases: u32,
    outcomes: u16,
}

impl Snapshot {
    pub fn new(bases: &[Pauli], outcomes: &[u8]) -> Result<Self> {
        if bases.len() != outcomes.len() {
            return Err(Error::DimensionMismatch { expected: bases.len(), found: outcomes.len() });
        }
        if bases.len() > MAX_SNAPSHOT_SITES {
            return Err(Error::TooManySites { n: bases.len(), cap: MAX_SNAPSHOT_SITES });
        }
        let mut packed = 0u32;
        let mut bits = 0u16;
        for (j, (&b, &o)) in bases.iter().zip(outcomes).enumerate() {
            if b == Pauli::I {
                return Err(Error::InvalidParams("measurement basis must be X, Y or Z"));
            }
            if o > 1 {
                return Err(Error::InvalidParams("measurement outcome must be 0 or 1"));
            }
            packed |= (b as u32) << (2 * j);
            bits |= (o as u16) << j;
        }
        Ok(Snapshot { bases: packed, outcomes: bits })
    }

    /// Rebuilds a snapshot from its packed words, validating every basis code
    /// below `n`.
    pub fn from_packed(n: usize, bases: u32, outcomes: u16) -> Result<Self> {
        if n > MAX_SNAPSHOT_SITES {
            return Err(Error::TooManySites { n, cap: MAX_SNAPSHOT_SITES });
        }
        let used_b = if n == 16 { u32::MAX } else { (1u32 << (2 * n)) - 1 };
        let used_o = if n == 16 { u16::MAX } else { (1u16 << n) - 1 };
        if bases & !used_b != 0 || outcomes & !used_o != 0 {
            return Err(Error::InvalidParams("packed snapshot has bits beyond n"));
        }
        if (0..n).any(|j| (bases >> (2 * j)) & 3 == 0) {
            return Err(Error::InvalidParams("measurement basis must be X, Y or Z"));
        }
        Ok(Snapshot { bases, outcomes })
    }

    pub fn basis(&self, site: usize) -> Pauli {
        Pauli::from_bits((self.bases >> (2 * site)) as u8)
    }

    pub fn outcome(&self, site: usize) -> u8 {
        ((self.outcomes >> site) & 1) as u8
    }

    pub fn packed_bases(&self) -> u32 {
        self.bases
    }

    pub fn packed_outcomes(&self) -> u16 {
        self.outcomes
    }
}

/// The classical shadow: `T` snapshots of an `n`-qubit state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShadowEnsemble {
    pub n: usize,
    pub seed: u64,
    pub snapshots: Vec<Snapshot>,
}

impl ShadowEnsemble {
    pub fn new(n: usize, seed: u64, snapshots: Vec<Snapshot>) -> Result<Self> {
        if snapshots.is_empty() {
            return Err(Error::Empty);
        }
        if n > MAX_SNAPSHOT_SITES {
            return Err(Error::TooManySites { n, cap: MAX_SNAPSHOT_SITES });
        }
        Ok(ShadowEnsemble { n, seed, snapshots })
    }

    pub fn len(&self) -> usize {
        self.snapshots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snapshots.is_empty()
    }
}

/// Something that hands out a pure state to measure.
pub trait StateSource {
    fn n_sites(&self) -> usize;

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> &StateVector;
}

impl StateSource for StateVector {
    fn n_sites(&self) -> usize {
        self.n()
    }

    fn draw<R: Rng + ?Sized>(&self, _rng: &mut R) -> &StateVector {
        self
    }
}

/// Degenerate ground spaces hand out a uniformly chosen basis vector, which
/// reproduces the maximally mixed ground-space state on average.
impl StateSource for GroundSpace {
    fn n_sites(&self) -> usize {
        self.n()
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> &StateVector {
        if self.basis.len() == 1 {
            &self.basis[0]
        } else {
            &self.basis[rng.gen_range(0..self.basis.len())]
        }
    }
}

/// Independent stream for snapshot `index` under `seed`.
pub fn snapshot_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Child seed number `index` of `master`, for handing independent seeds to
/// grid points or trials.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    // stream 2^63 + index keeps child seeds apart from snapshot streams
    snapshot_rng(master, (1 << 63) | index).next_u64()
}

/// Reusable workspace for [`measure_in_bases`].
#[derive(Default, Clone, Debug)]
pub struct Scratch {
    buf: Vec<C64>,
}

/// Samples one outcome per qubit from the Born distribution of `state`
/// measured in the product basis `bases`.
///
/// Qubits are measured one at a time starting from site 0: rotate the
/// current leading qubit, draw it from its marginal, keep the collapsed half
/// of the vector. The joint distribution is the exact Born rule.
pub fn measure_in_bases<R: Rng + ?Sized>(
    state: &StateVector,
    bases: &[Pauli],
    rng: &mut R,
    scratch: &mut Scratch,
) -> Result<Vec<u8>> {
    let n = state.n();
    if bases.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: bases.len() });
    }
    let norm = state.norm_sqr();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::Unnormalized { norm_sqr: norm });
    }
    let buf = &mut scratch.buf;
    buf.clear();
    buf.extend_from_slice(state.amplitudes());

    let mut outcomes = vec![0u8; n];
    let mut len = buf.len();
    for (site, &basis) in bases.iter().enumerate() {
        let half = len / 2;
        let (p0, p1) = {
            let (lo, hi) = buf[..len].split_at(half);
            lo.iter().zip(hi).fold((0.0, 0.0), |(p0, p1), (&a0, &a1)| {
                let (c0, c1) = rotate(basis, a0, a1);
                (p0 + c0.norm_sqr(), p1 + c1.norm_sqr())
            })
        };
        let bit = (rng.gen::<f64>() * (p0 + p1) >= p0) as u8;
        for i in 0..half {
            let (c0, c1) = rotate(basis, buf[i], buf[i + half]);
            buf[i] = if bit == 0 { c0 } else { c1 };
        }
        outcomes[site] = bit;
        len = half;
    }
    Ok(outcomes)
}

/// Amplitudes of the `+1` and `-1` eigenvectors of `basis`.
#[inline]
fn rotate(basis: Pauli, a0: C64, a1: C64) -> (C64, C64) {
    match basis {
        Pauli::X => ((a0 + a1) * FRAC_1_SQRT_2, (a0 - a1) * FRAC_1_SQRT_2),
        Pauli::Y => {
            let ia1 = C64::new(-a1.im, a1.re);
            ((a0 - ia1) * FRAC_1_SQRT_2, (a0 + ia1) * FRAC_1_SQRT_2)
        }
        Pauli::Z | Pauli::I => (a0, a1),
    }
}

/// Snapshot `index` of the ensemble seeded with `seed`.
///
/// Draw order on the snapshot's stream: one basis per qubit, then the state
/// (for degenerate sources), then the outcomes.
pub fn sample_snapshot<S: StateSource + ?Sized>(
    source: &S,
    seed: u64,
    index: u64,
    scratch: &mut Scratch,
) -> Result<Snapshot> {
    let n = source.n_sites();
    if n > MAX_SNAPSHOT_SITES {
        return Err(Error::TooManySites { n, cap: MAX_SNAPSHOT_SITES });
    }
    let mut rng = snapshot_rng(seed, index);
    let bases: Vec<Pauli> = (0..n).map(|_| Pauli::MEASUREMENT_BASES[rng.gen_range(0..3)]).collect();
    let state = source.draw(&mut rng);
    let outcomes = measure_in_bases(state, &bases, &mut rng, scratch)?;
    Snapshot::new(&bases, &outcomes)
}

/// `T` randomized Pauli snapshots; bit-identical for identical seeds.
pub fn sample_snapshots<S: StateSource + ?Sized>(source: &S, t: usize, seed: u64) -> Result<ShadowEnsemble> {
    if t == 0 {
        return Err(Error::Empty);
    }
    let mut scratch = Scratch::default();
    let snapshots = (0..t as u64)
        .map(|m| sample_snapshot(source, seed, m, &mut scratch))
        .collect::<Result<Vec<_>>>()?;
    ShadowEnsemble::new(source.n_sites(), seed, snapshots)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one() -> C64 {
        C64::new(1.0, 0.0)
    }

    #[test]
    fn packing_roundtrip() {
        let s = Snapshot::new(&[Pauli::X, Pauli::Z, Pauli::Y], &[1, 0, 1]).unwrap();
        assert_eq!(s.basis(0), Pauli::X);
        assert_eq!(s.basis(1), Pauli::Z);
        assert_eq!(s.basis(2), Pauli::Y);
        assert_eq!((s.outcome(0), s.outcome(1), s.outcome(2)), (1, 0, 1));
        assert_eq!(Snapshot::from_packed(3, s.packed_bases(), s.packed_outcomes()).unwrap(), s);
        assert!(Snapshot::from_packed(2, s.packed_bases(), s.packed_outcomes()).is_err());
        assert!(Snapshot::new(&[Pauli::I], &[0]).is_err());
    }

    #[test]
    fn z_basis_on_zero_state_is_deterministic() {
        let zero = StateVector::basis(1, 0);
        let mut scratch = Scratch::default();
        for m in 0..200 {
            let mut rng = snapshot_rng(7, m);
            assert_eq!(measure_in_bases(&zero, &[Pauli::Z], &mut rng, &mut scratch).unwrap(), [0]);
        }
    }

    #[test]
    fn x_basis_on_zero_state_is_fair() {
        let zero = StateVector::basis(1, 0);
        let mut scratch = Scratch::default();
        let t = 10_000;
        let ones: usize = (0..t)
            .map(|m| {
                let mut rng = snapshot_rng(11, m);
                measure_in_bases(&zero, &[Pauli::X], &mut rng, &mut scratch).unwrap()[0] as usize
            })
            .sum();
        let sigma = (t as f64 * 0.25).sqrt();
        assert!((ones as f64 - t as f64 / 2.0).abs() < 3.0 * sigma, "ones = {ones}");
    }

    #[test]
    fn bell_state_zz_outcomes_correlated() {
        let bell = StateVector::normalized(vec![one(), C64::new(0.0, 0.0), C64::new(0.0, 0.0), one()]).unwrap();
        let mut scratch = Scratch::default();
        let mut seen = [0usize; 2];
        for m in 0..500 {
            let mut rng = snapshot_rng(3, m);
            let o = measure_in_bases(&bell, &[Pauli::Z, Pauli::Z], &mut rng, &mut scratch).unwrap();
            assert_eq!(o[0], o[1]);
            seen[o[0] as usize] += 1;
        }
        assert!(seen[0] > 0 && seen[1] > 0);
    }

    #[test]
    fn y_eigenstate_measures_plus() {
        // (|0> + i|1>)/sqrt(2) is the +1 eigenvector of Y
        let s = StateVector::normalized(vec![one(), C64::new(0.0, 1.0)]).unwrap();
        let mut scratch = Scratch::default();
        for m in 0..100 {
            let mut rng = snapshot_rng(5, m);
            assert_eq!(measure_in_bases(&s, &[Pauli::Y], &mut rng, &mut scratch).unwrap(), [0]);
        }
    }

    #[test]
    fn identical_seeds_give_identical_ensembles() {
        let s = StateVector::normalized((0..8).map(|i| C64::new(i as f64, 1.0)).collect()).unwrap();
        let a = sample_snapshots(&s, 300, 42).unwrap();
        let b = sample_snapshots(&s, 300, 42).unwrap();
        let c = sample_snapshots(&s, 300, 43).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn zero_snapshots_rejected() {
        assert_eq!(sample_snapshots(&StateVector::basis(1, 0), 0, 1), Err(Error::Empty));
    }
}
