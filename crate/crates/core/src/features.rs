//! Observable sets for each model and the feature matrices built from them.
//!
//! Correlator features use Pauli normalization: the column `zz_1_2` holds
//! `<sigma^z_1 sigma^z_2>` in `[-1, 1]`. Site labels in column names are
//! 1-based; ladder sites are written as rung number plus leg letter (`3b`
//! is rung 3 on the second leg).

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::{Error, Result};
use crate::hamiltonians::{kh_bonds, ladder_site, BondKind};
use crate::spin_ops::{Pauli, PauliString};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ModelTag {
    Annni,
    KhCorrelators,
    KhPlaquette,
}

/// Ordered observables with their column names.
#[derive(Clone, Debug, PartialEq)]
pub struct ObservableSet {
    pub model: ModelTag,
    pub observables: Vec<PauliString>,
    pub names: Vec<String>,
    pub locality: usize,
    /// Observable count that enters the snapshot budget. Equals
    /// `observables.len()` except for the ladder quadrant set.
    pub budget_count: usize,
}

impl ObservableSet {
    pub fn len(&self) -> usize {
        self.observables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observables.is_empty()
    }
}

fn lower(p: Pauli) -> char {
    p.as_char().to_ascii_lowercase()
}

/// NN and NNN `sigma^a sigma^a` correlators of an open chain, `3(2N - 3)` of
/// them: all NN pairs by left site, then all NNN pairs, each with `x, y, z`.
pub fn annni_observables(n: usize) -> Result<ObservableSet> {
    if n < 3 {
        return Err(Error::InvalidParams("ANNNI observables need N >= 3"));
    }
    let pairs = (0..n - 1).map(|i| (i, i + 1)).chain((0..n - 2).map(|i| (i, i + 2)));
    let mut observables = Vec::with_capacity(3 * (2 * n - 3));
    let mut names = Vec::with_capacity(3 * (2 * n - 3));
    for (a, b) in pairs {
        for p in Pauli::MEASUREMENT_BASES {
            observables.push(PauliString::from_sites(n, &[(a, p), (b, p)])?);
            names.push(format!("{0}{0}_{1}_{2}", lower(p), a + 1, b + 1));
        }
    }
    let len = observables.len();
    Ok(ObservableSet { model: ModelTag::Annni, observables, names, locality: 2, budget_count: len })
}

fn ladder_name(site: usize) -> String {
    let leg = if site % 2 == 0 { 'a' } else { 'b' };
    format!("{}{}", site / 2 + 1, leg)
}

/// Two-point correlators over every four-spin window (quadrant) of the
/// ladder: legs, rungs and both diagonals, with rungs shared by neighbouring
/// quadrants listed once.
///
/// `budget_count` is the nominal `3N - 6`.
pub fn kh_quadrant_observables(l: usize) -> Result<ObservableSet> {
    if l < 4 || l % 2 != 0 {
        return Err(Error::InvalidParams("ladder length L must be even and at least 4"));
    }
    let n = 2 * l;
    let mut seen = BTreeSet::new();
    let mut pairs = Vec::new();
    for i in 0..l - 1 {
        let quadrant = [
            (ladder_site(i, 0), ladder_site(i, 1)),
            (ladder_site(i, 0), ladder_site(i + 1, 0)),
            (ladder_site(i, 1), ladder_site(i + 1, 1)),
            (ladder_site(i, 0), ladder_site(i + 1, 1)),
            (ladder_site(i, 1), ladder_site(i + 1, 0)),
            (ladder_site(i + 1, 0), ladder_site(i + 1, 1)),
        ];
        for pair in quadrant {
            if seen.insert(pair) {
                pairs.push(pair);
            }
        }
    }
    let mut observables = Vec::with_capacity(3 * pairs.len());
    let mut names = Vec::with_capacity(3 * pairs.len());
    for (a, b) in pairs {
        for p in Pauli::MEASUREMENT_BASES {
            observables.push(PauliString::from_sites(n, &[(a, p), (b, p)])?);
            names.push(format!("{0}{0}_{1}_{2}", lower(p), ladder_name(a), ladder_name(b)));
        }
    }
    Ok(ObservableSet {
        model: ModelTag::KhCorrelators,
        observables,
        names,
        locality: 2,
        budget_count: 3 * n - 6,
    })
}

fn leg_bond_label(l: usize, rung: usize, leg: usize) -> Result<Pauli> {
    let a = ladder_site(rung, leg);
    let b = ladder_site((rung + 1) % l, leg);
    kh_bonds(l)?
        .into_iter()
        .find_map(|bond| match bond.kind {
            BondKind::Kitaev(p) if bond.a == a && bond.b == b => Some(p),
            _ => None,
        })
        .ok_or(Error::InvalidParams("missing leg bond"))
}

/// Six-site plaquette on the window of rungs `offset, offset+1, offset+2`
/// (1-based, no wrap-around).
///
/// Each site of the hexagonal loop carries the Kitaev label of its bond that
/// leaves the loop, so the middle rung sites carry `Z`. Traversed around the
/// loop the labels read `X Y Z X Y Z` for odd offsets.
pub fn plaquette_observable(l: usize, offset: usize) -> Result<PauliString> {
    if l < 4 || l % 2 != 0 {
        return Err(Error::InvalidParams("ladder length L must be even and at least 4"));
    }
    if offset < 1 || offset + 2 > l {
        return Err(Error::InvalidParams("plaquette window out of range"));
    }
    let first = offset - 1;
    let last = first + 2;
    let before = (first + l - 1) % l;
    let mut sites = Vec::with_capacity(6);
    for leg in 0..2 {
        sites.push((ladder_site(first, leg), leg_bond_label(l, before, leg)?));
        sites.push((ladder_site(first + 1, leg), Pauli::Z));
        sites.push((ladder_site(last, leg), leg_bond_label(l, last, leg)?));
    }
    PauliString::from_sites(2 * l, &sites)
}

/// Plaquette wrapped as a single-observable set.
pub fn plaquette_set(l: usize, offset: usize) -> Result<ObservableSet> {
    let p = plaquette_observable(l, offset)?;
    Ok(ObservableSet {
        model: ModelTag::KhPlaquette,
        names: alloc::vec![format!("plaquette_{offset}")],
        observables: alloc::vec![p],
        locality: 6,
        budget_count: 1,
    })
}

/// One parameter point of a sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub params: Vec<f64>,
    pub columns: Vec<String>,
    pub values: Vec<f64>,
    pub seed: u64,
    pub budget: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RowMeta {
    pub seed: u64,
    pub budget: usize,
}

/// Dense row-major matrix: one row per parameter point, one column per
/// observable.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureMatrix {
    pub param_names: Vec<String>,
    pub params: Vec<Vec<f64>>,
    pub columns: Vec<String>,
    pub values: Vec<f64>,
    pub meta: Vec<RowMeta>,
}

impl FeatureMatrix {
    pub fn rows(&self) -> usize {
        self.params.len()
    }

    pub fn cols(&self) -> usize {
        self.columns.len()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let c = self.cols();
        &self.values[i * c..(i + 1) * c]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.cols() + j]
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Keeps only the listed rows, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> FeatureMatrix {
        FeatureMatrix {
            param_names: self.param_names.clone(),
            params: rows.iter().map(|&i| self.params[i].clone()).collect(),
            columns: self.columns.clone(),
            values: rows.iter().flat_map(|&i| self.row(i).iter().copied()).collect(),
            meta: rows.iter().map(|&i| self.meta[i]).collect(),
        }
    }
}

fn cmp_params(a: &[f64], b: &[f64]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or_else(|| a.len().cmp(&b.len()))
}

/// Stacks sweep rows into a matrix sorted by parameter values.
pub fn assemble_feature_matrix(param_names: Vec<String>, mut rows: Vec<SweepRow>) -> Result<FeatureMatrix> {
    let columns = rows.first().ok_or(Error::Empty)?.columns.clone();
    for r in &rows {
        if r.columns != columns {
            return Err(Error::InconsistentObservables);
        }
        if r.values.len() != columns.len() {
            return Err(Error::DimensionMismatch { expected: columns.len(), found: r.values.len() });
        }
        if r.params.len() != param_names.len() {
            return Err(Error::DimensionMismatch { expected: param_names.len(), found: r.params.len() });
        }
    }
    rows.sort_by(|a, b| cmp_params(&a.params, &b.params));
    let mut m = FeatureMatrix {
        param_names,
        params: Vec::with_capacity(rows.len()),
        columns,
        values: Vec::with_capacity(rows.len() * rows[0].values.len()),
        meta: Vec::with_capacity(rows.len()),
    };
    for r in rows {
        m.params.push(r.params);
        m.values.extend(r.values);
        m.meta.push(RowMeta { seed: r.seed, budget: r.budget });
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    #[test]
    fn annni_counts() {
        assert_eq!(annni_observables(3).unwrap().len(), 9);
        assert_eq!(annni_observables(12).unwrap().len(), 63);
        assert!(annni_observables(2).is_err());
    }

    #[test]
    fn annni_n4_order() {
        let set = annni_observables(4).unwrap();
        assert_eq!(set.len(), 15);
        let pairs: Vec<&str> = set.names.iter().step_by(3).map(|s| &s[3..]).collect();
        assert_eq!(pairs, ["1_2", "2_3", "3_4", "1_3", "2_4"]);
        assert_eq!(&set.names[..3], ["xx_1_2", "yy_1_2", "zz_1_2"]);
        assert_eq!(set.observables[2].to_string(), "ZZII");
        assert!(set.observables.iter().all(|o| o.weight() == 2));
    }

    #[test]
    fn quadrant_counts() {
        let set = kh_quadrant_observables(4).unwrap();
        assert_eq!(set.len(), 48);
        assert_eq!(set.budget_count, 18);
        assert!(set.observables.iter().all(|o| o.weight() == 2));
        let six = kh_quadrant_observables(6).unwrap();
        assert_eq!(six.budget_count, 30);
        assert_eq!(six.len(), 3 * (6 + 10 + 10));
    }

    #[test]
    fn quadrant_set_has_no_duplicates() {
        let set = kh_quadrant_observables(6).unwrap();
        let unique: BTreeSet<_> = set.observables.iter().collect();
        assert_eq!(unique.len(), set.len());
        assert_eq!(set.names[0], "xx_1a_1b");
    }

    #[test]
    fn plaquette_shape() {
        for offset in 1..=4 {
            let p = plaquette_observable(6, offset).unwrap();
            assert_eq!(p.weight(), 6);
            for label in [Pauli::X, Pauli::Y, Pauli::Z] {
                assert_eq!(p.labels().iter().filter(|&&q| q == label).count(), 2);
            }
        }
        assert!(plaquette_observable(6, 0).is_err());
        assert!(plaquette_observable(6, 5).is_err());
    }

    #[test]
    fn plaquette_reads_xyzxyz_around_the_loop() {
        let p = plaquette_observable(6, 1).unwrap();
        // start at (rung 3, leg a), cross the rung, walk back along leg b,
        // cross rung 1, walk forward along leg a
        let loop_order = [
            ladder_site(2, 0),
            ladder_site(2, 1),
            ladder_site(1, 1),
            ladder_site(0, 1),
            ladder_site(0, 0),
            ladder_site(1, 0),
        ];
        let read: String = loop_order.iter().map(|&s| p.label(s).as_char()).collect();
        assert_eq!(read, "XYZXYZ");
    }

    #[test]
    fn plaquette_commutes_with_every_kitaev_bond() {
        for offset in 1..=4 {
            let p = plaquette_observable(6, offset).unwrap();
            for bond in kh_bonds(6).unwrap() {
                if let BondKind::Kitaev(g) = bond.kind {
                    let anti = [bond.a, bond.b]
                        .iter()
                        .filter(|&&s| p.label(s) != Pauli::I && p.label(s) != g)
                        .count();
                    assert_eq!(anti % 2, 0, "offset {offset} bond {bond:?}");
                }
            }
        }
    }

    fn row(params: Vec<f64>, cols: &[&str], values: Vec<f64>) -> SweepRow {
        SweepRow {
            params,
            columns: cols.iter().map(|s| s.to_string()).collect(),
            values,
            seed: 1,
            budget: 10,
        }
    }

    #[test]
    fn assemble_sorts_and_checks() {
        let names = vec!["k".to_string(), "g".to_string()];
        let cols = ["a", "b"];
        let m = assemble_feature_matrix(
            names.clone(),
            vec![row(vec![0.5, 0.1], &cols, vec![3.0, 4.0]), row(vec![0.1, 0.9], &cols, vec![1.0, 2.0])],
        )
        .unwrap();
        assert_eq!((m.rows(), m.cols()), (2, 2));
        assert_eq!(m.row(0), [1.0, 2.0]);
        assert_eq!(m.params[1], [0.5, 0.1]);

        let single = assemble_feature_matrix(names.clone(), vec![row(vec![0.0, 0.0], &["a"; 9], vec![0.0; 9])]);
        assert_eq!(single.unwrap().cols(), 9);

        assert_eq!(assemble_feature_matrix(names.clone(), vec![]), Err(Error::Empty));
        let bad = vec![row(vec![0.0, 0.0], &cols, vec![0.0; 2]), row(vec![1.0, 0.0], &["a", "c"], vec![0.0; 2])];
        assert_eq!(assemble_feature_matrix(names, bad), Err(Error::InconsistentObservables));
    }
}
