use crate::error::{Error, Result};
use crate::spin_ops::{Pauli, PauliString};

use super::snapshot::{ShadowEnsemble, Snapshot, MAX_SNAPSHOT_SITES};

/// Precomputed masks for matching a Pauli string against packed snapshots.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Matcher {
    basis_mask: u32,
    basis_want: u32,
    outcome_mask: u16,
}

impl Matcher {
    pub fn new(p: &PauliString) -> Result<Self> {
        if p.n() > MAX_SNAPSHOT_SITES {
            return Err(Error::TooManySites { n: p.n(), cap: MAX_SNAPSHOT_SITES });
        }
        let mut m = Matcher { basis_mask: 0, basis_want: 0, outcome_mask: 0 };
        for j in p.support() {
            m.basis_mask |= 3 << (2 * j);
            m.basis_want |= (p.label(j) as u32) << (2 * j);
            m.outcome_mask |= 1 << j;
        }
        Ok(m)
    }

    /// `Some(+1 | -1)`: product of eigenvalues on the support when the
    /// snapshot measured every support site in the string's basis.
    #[inline]
    pub fn parity(&self, s: &Snapshot) -> Option<i8> {
        if s.packed_bases() & self.basis_mask != self.basis_want {
            return None;
        }
        Some(if (s.packed_outcomes() & self.outcome_mask).count_ones() % 2 == 0 { 1 } else { -1 })
    }
}

/// Shadow estimate of `tr(P rho)`: the mean over snapshots of
/// `prod_j 3 * (+-1)_j` on the support of `P`, where a snapshot contributes
/// zero unless it measured every support site in `P`'s basis.
pub fn estimate_pauli(ens: &ShadowEnsemble, p: &PauliString) -> Result<f64> {
    if p.n() != ens.n {
        return Err(Error::DimensionMismatch { expected: ens.n, found: p.n() });
    }
    if ens.snapshots.is_empty() {
        return Err(Error::Empty);
    }
    let m = Matcher::new(p)?;
    let net: i64 = ens.snapshots.iter().filter_map(|s| m.parity(s)).map(i64::from).sum();
    let gain = libm::pow(3.0, p.weight() as f64);
    Ok(gain * net as f64 / ens.len() as f64)
}

/// Value the single-snapshot estimator takes on one snapshot.
pub fn single_snapshot_term(s: &Snapshot, p: &PauliString) -> Result<f64> {
    let m = Matcher::new(p)?;
    Ok(match m.parity(s) {
        Some(sign) => f64::from(sign) * libm::pow(3.0, p.weight() as f64),
        None => 0.0,
    })
}

/// An estimate, optionally scored against the exact value.
#[derive(Clone, Debug, PartialEq)]
pub struct EstimateReport {
    pub observable: PauliString,
    pub estimate: f64,
    pub exact: Option<f64>,
    /// `|estimate - exact| <= epsilon`, present iff `exact` is.
    pub within_bound: Option<bool>,
}

impl EstimateReport {
    pub fn new(observable: PauliString, estimate: f64, exact: Option<f64>, epsilon: f64) -> Self {
        let within_bound = exact.map(|e| (estimate - e).abs() <= epsilon);
        EstimateReport { observable, estimate, exact, within_bound }
    }
}

/// Fraction of reports whose estimate misses the exact value by more than
/// `epsilon`.
pub fn failure_proportion(reports: &[EstimateReport], epsilon: f64) -> Result<f64> {
    if reports.is_empty() {
        return Err(Error::Empty);
    }
    let mut failed = 0usize;
    for (i, r) in reports.iter().enumerate() {
        let exact = r.exact.ok_or(Error::MissingExact(i))?;
        if (r.estimate - exact).abs() > epsilon {
            failed += 1;
        }
    }
    Ok(failed as f64 / reports.len() as f64)
}

pub(crate) fn labels_match(bases: &[Pauli], p: &PauliString) -> bool {
    p.support().all(|j| bases[j] == p.label(j))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use alloc::vec::Vec;

    fn ens(n: usize, snaps: Vec<Snapshot>) -> ShadowEnsemble {
        ShadowEnsemble::new(n, 0, snaps).unwrap()
    }

    #[test]
    fn matched_single_site_term() {
        let s = Snapshot::new(&[Pauli::Z], &[0]).unwrap();
        assert_eq!(single_snapshot_term(&s, &"Z".parse().unwrap()).unwrap(), 3.0);
        assert_eq!(single_snapshot_term(&s, &"X".parse().unwrap()).unwrap(), 0.0);
    }

    #[test]
    fn matched_two_site_term() {
        let s = Snapshot::new(&[Pauli::X, Pauli::Z], &[0, 1]).unwrap();
        assert_eq!(single_snapshot_term(&s, &"XZ".parse().unwrap()).unwrap(), -9.0);
        assert_eq!(single_snapshot_term(&s, &"XI".parse().unwrap()).unwrap(), 3.0);
        assert_eq!(single_snapshot_term(&s, &"IZ".parse().unwrap()).unwrap(), -3.0);
        assert_eq!(single_snapshot_term(&s, &"ZZ".parse().unwrap()).unwrap(), 0.0);
    }

    #[test]
    fn identity_estimate_is_exactly_one() {
        let snaps = vec![
            Snapshot::new(&[Pauli::X, Pauli::Y], &[1, 0]).unwrap(),
            Snapshot::new(&[Pauli::Z, Pauli::Z], &[1, 1]).unwrap(),
        ];
        assert_eq!(estimate_pauli(&ens(2, snaps), &PauliString::identity(2)).unwrap(), 1.0);
    }

    #[test]
    fn estimate_dimension_mismatch() {
        let e = ens(1, vec![Snapshot::new(&[Pauli::Z], &[0]).unwrap()]);
        assert!(matches!(
            estimate_pauli(&e, &"ZZ".parse().unwrap()),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    fn report(est: f64, exact: f64) -> EstimateReport {
        EstimateReport::new("Z".parse().unwrap(), est, Some(exact), 0.1)
    }

    #[test]
    fn failure_proportion_examples() {
        let exact: Vec<_> = (0..5).map(|i| report(0.1 * i as f64, 0.1 * i as f64)).collect();
        assert_eq!(failure_proportion(&exact, 0.1).unwrap(), 0.0);

        let mut one_bad: Vec<_> = (0..63).map(|_| report(0.5, 0.5)).collect();
        one_bad[17] = report(0.5, 0.2);
        assert!((failure_proportion(&one_bad, 0.1).unwrap() - 1.0 / 63.0).abs() < 1e-15);

        let all_bad: Vec<_> = (0..4).map(|_| report(1.0, -1.0)).collect();
        assert_eq!(failure_proportion(&all_bad, 0.1).unwrap(), 1.0);
    }

    #[test]
    fn failure_proportion_errors() {
        assert_eq!(failure_proportion(&[], 0.1), Err(Error::Empty));
        let missing = EstimateReport::new("Z".parse().unwrap(), 0.0, None, 0.1);
        assert_eq!(missing.within_bound, None);
        assert_eq!(failure_proportion(&[report(0.0, 0.0), missing], 0.1), Err(Error::MissingExact(1)));
    }

    #[test]
    fn within_bound_is_consistent() {
        assert_eq!(report(0.15, 0.1).within_bound, Some(true));
        assert_eq!(report(0.25, 0.1).within_bound, Some(false));
    }
}
