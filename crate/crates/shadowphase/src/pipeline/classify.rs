use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use shadowphase_core::features::FeatureMatrix;
use shadowphase_core::ml::kmeans;

use crate::error::{Error, Result};

pub const PHASE_MAP_SCHEMA: u32 = 1;

/// `(label, description, (k, g))` for the three ANNNI clusters.
pub const ANNNI_ANCHORS: [(&str, &str, [f64; 2]); 3] = [
    ("ferromagnetic", "ferromagnetic order", [0.1, 0.1]),
    ("paramagnetic", "disordered, field polarized", [0.2, 0.9]),
    ("antiphase", "period-four up-up-down-down order", [0.9, 0.1]),
];

/// `(label, description, phi / pi)` for the four ordered ladder phases.
pub const KH_ANCHORS: [(&str, &str, f64); 4] = [
    ("RS", "rung singlet", 0.0),
    ("ZZ", "zigzag", 0.65),
    ("FM", "ferromagnetic", 1.0),
    ("ST", "stripy", 1.62),
];

pub const KSL_THRESHOLD: f64 = 0.5;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub params: Vec<f64>,
    pub label: String,
    /// K-means cluster id; absent for points labelled by the plaquette.
    pub cluster: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LegendEntry {
    pub label: String,
    pub description: String,
    pub anchor: Option<Vec<f64>>,
    pub cluster: Option<usize>,
}

/// Label change between neighbouring angles, placed halfway between them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Boundary {
    pub from: String,
    pub to: String,
    pub at_phi_pi: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub config_hash: String,
    pub sweep_seed: u64,
    pub cluster_seed: u64,
    pub row_seeds: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseMap {
    pub schema_version: u32,
    pub model: String,
    pub param_names: Vec<String>,
    pub points: Vec<PhasePoint>,
    pub legend: Vec<LegendEntry>,
    pub boundaries: Vec<Boundary>,
    pub provenance: Provenance,
}

impl PhaseMap {
    pub fn label_at(&self, params: &[f64]) -> Option<&str> {
        self.points
            .iter()
            .find(|p| p.params.iter().zip(params).all(|(a, b)| (a - b).abs() < 1e-9))
            .map(|p| p.label.as_str())
    }

    pub fn boundary(&self, from: &str, to: &str) -> Option<f64> {
        self.boundaries.iter().find(|b| b.from == from && b.to == to).map(|b| b.at_phi_pi)
    }
}

fn nearest_row(rows: impl Iterator<Item = (usize, f64)>) -> usize {
    rows.min_by(|a, b| a.1.total_cmp(&b.1)).map(|(i, _)| i).expect("non-empty matrix")
}

/// Cluster ids of the anchor rows, failing if two anchors share a cluster.
fn name_clusters(labels: &[usize], anchors: &[(usize, &str)]) -> Result<BTreeMap<usize, String>> {
    let mut names = BTreeMap::new();
    for &(row, name) in anchors {
        if let Some(first) = names.insert(labels[row], name.to_string()) {
            return Err(Error::AnchorCollision { first, second: name.to_string() });
        }
    }
    Ok(names)
}

/// Three-cluster K-means on ANNNI features; clusters are named after the
/// anchor points they contain.
pub fn classify_annni(features: &FeatureMatrix, provenance: Provenance) -> Result<PhaseMap> {
    if features.param_names != ["k", "g"] {
        return Err(Error::Config("ANNNI features must be indexed by (k, g)".into()));
    }
    let clustering = kmeans(features.points()?, 3, provenance.cluster_seed)?;
    let anchor_rows: Vec<(usize, &str)> = ANNNI_ANCHORS
        .iter()
        .map(|(name, _, at)| {
            let row = nearest_row(features.params.iter().enumerate().map(|(i, p)| {
                (i, (p[0] - at[0]).powi(2) + (p[1] - at[1]).powi(2))
            }));
            (row, *name)
        })
        .collect();
    let names = name_clusters(&clustering.labels, &anchor_rows)?;
    let points = features
        .params
        .iter()
        .zip(&clustering.labels)
        .map(|(p, &c)| PhasePoint { params: p.clone(), label: names[&c].clone(), cluster: Some(c) })
        .collect();
    let legend = ANNNI_ANCHORS
        .iter()
        .zip(&anchor_rows)
        .map(|((label, description, _), &(row, _))| LegendEntry {
            label: label.to_string(),
            description: description.to_string(),
            anchor: Some(features.params[row].clone()),
            cluster: Some(clustering.labels[row]),
        })
        .collect();
    Ok(PhaseMap {
        schema_version: PHASE_MAP_SCHEMA,
        model: "annni".into(),
        param_names: features.param_names.clone(),
        points,
        legend,
        boundaries: Vec::new(),
        provenance,
    })
}

fn cyclic_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(2.0);
    d.min(2.0 - d)
}

/// Ladder classification: angles whose plaquette magnitude reaches
/// `threshold` are spin liquids (AFK below pi, FK above); the rest are split
/// by four-cluster K-means and named after the anchor angles.
pub fn classify_kh(
    features: &FeatureMatrix,
    plaquette: &[f64],
    threshold: f64,
    provenance: Provenance,
) -> Result<PhaseMap> {
    if features.param_names != ["phi_pi"] {
        return Err(Error::Config("ladder features must be indexed by phi_pi".into()));
    }
    if plaquette.len() != features.rows() {
        return Err(Error::Config(format!(
            "plaquette series has {} values for {} feature rows",
            plaquette.len(),
            features.rows()
        )));
    }
    let phi: Vec<f64> = features.params.iter().map(|p| p[0]).collect();
    let ordered: Vec<usize> = (0..phi.len()).filter(|&i| plaquette[i].abs() < threshold).collect();
    if ordered.len() < KH_ANCHORS.len() {
        return Err(Error::Config("fewer ordered points than ordered phases".into()));
    }
    let subset = features.select_rows(&ordered);
    let clustering = kmeans(subset.points()?, KH_ANCHORS.len(), provenance.cluster_seed)?;
    let anchor_rows: Vec<(usize, &str)> = KH_ANCHORS
        .iter()
        .map(|(name, _, at)| {
            (nearest_row(ordered.iter().enumerate().map(|(j, &i)| (j, cyclic_gap(phi[i], *at)))), *name)
        })
        .collect();
    let names = name_clusters(&clustering.labels, &anchor_rows)?;

    let mut points: Vec<PhasePoint> = phi
        .iter()
        .zip(plaquette)
        .map(|(&f, &w)| PhasePoint {
            params: vec![f],
            label: if w.abs() < threshold {
                String::new()
            } else if f < 1.0 {
                "AFK".into()
            } else {
                "FK".into()
            },
            cluster: None,
        })
        .collect();
    for (j, &i) in ordered.iter().enumerate() {
        let c = clustering.labels[j];
        points[i].label = names[&c].clone();
        points[i].cluster = Some(c);
    }

    let mut legend: Vec<LegendEntry> = KH_ANCHORS
        .iter()
        .zip(&anchor_rows)
        .map(|((label, description, _), &(j, _))| LegendEntry {
            label: label.to_string(),
            description: description.to_string(),
            anchor: Some(vec![phi[ordered[j]]]),
            cluster: Some(clustering.labels[j]),
        })
        .collect();
    for (label, description) in [("AFK", "antiferromagnetic Kitaev spin liquid"), ("FK", "ferromagnetic Kitaev spin liquid")] {
        legend.push(LegendEntry {
            label: label.into(),
            description: format!("{description}, |plaquette| >= {threshold}"),
            anchor: None,
            cluster: None,
        });
    }

    let boundaries = cyclic_boundaries(&points);
    Ok(PhaseMap {
        schema_version: PHASE_MAP_SCHEMA,
        model: "kh".into(),
        param_names: features.param_names.clone(),
        points,
        legend,
        boundaries,
        provenance,
    })
}

/// Label changes along the angle, treated as periodic with period 2 (in
/// units of pi). Points are assumed sorted by angle.
fn cyclic_boundaries(points: &[PhasePoint]) -> Vec<Boundary> {
    let n = points.len();
    let mut out = Vec::new();
    for i in 0..n {
        let (a, b) = (&points[i], &points[(i + 1) % n]);
        if a.label == b.label || n < 2 {
            continue;
        }
        let (fa, mut fb) = (a.params[0], b.params[0]);
        if fb <= fa {
            fb += 2.0;
        }
        out.push(Boundary {
            from: a.label.clone(),
            to: b.label.clone(),
            at_phi_pi: ((fa + fb) / 2.0).rem_euclid(2.0),
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use shadowphase_core::features::{assemble_feature_matrix, SweepRow};

    fn provenance() -> Provenance {
        Provenance { config_hash: "h".into(), sweep_seed: 1, cluster_seed: 2, row_seeds: vec![] }
    }

    fn matrix(names: &[&str], rows: Vec<(Vec<f64>, Vec<f64>)>) -> FeatureMatrix {
        let rows = rows
            .into_iter()
            .map(|(params, values)| SweepRow {
                params,
                columns: (0..values.len()).map(|c| format!("c{c}")).collect(),
                values,
                seed: 0,
                budget: 1,
            })
            .collect();
        assemble_feature_matrix(names.iter().map(|s| s.to_string()).collect(), rows).unwrap()
    }

    #[test]
    fn annni_anchors_name_clusters() {
        let mut rows = Vec::new();
        for i in 0..=4 {
            for j in 0..=4 {
                let (k, g) = (i as f64 / 4.0, j as f64 / 4.0);
                let f = if g >= 0.5 { vec![0.0, 1.0] } else if k >= 0.5 { vec![-1.0, 0.0] } else { vec![1.0, 0.0] };
                rows.push((vec![k, g], f));
            }
        }
        let map = classify_annni(&matrix(&["k", "g"], rows), provenance()).unwrap();
        assert_eq!(map.label_at(&[0.0, 0.0]), Some("ferromagnetic"));
        assert_eq!(map.label_at(&[0.25, 1.0]), Some("paramagnetic"));
        assert_eq!(map.label_at(&[1.0, 0.0]), Some("antiphase"));
        assert_eq!(map.legend.len(), 3);
    }

    #[test]
    fn anchor_collision_is_reported() {
        let rows = (0..9).map(|i| (vec![(i / 3) as f64 / 2.0, (i % 3) as f64 / 2.0], vec![(i % 3) as f64])).collect();
        let err = classify_annni(&matrix(&["k", "g"], rows), provenance()).unwrap_err();
        assert!(matches!(err, Error::AnchorCollision { .. }), "{err}");
    }

    #[test]
    fn kh_labels_and_boundaries() {
        // ten angles: RS, RS, AFK, ZZ, ZZ, FM, FM, FK, ST, RS
        let phases = [0, 0, 9, 1, 1, 2, 2, 9, 3, 0];
        let mut rows = Vec::new();
        let mut plaq = Vec::new();
        for (i, &p) in phases.iter().enumerate() {
            let mut f = vec![0.0; 4];
            if p < 4 {
                f[p] = 1.0;
            }
            rows.push((vec![i as f64 * 0.2], f));
            plaq.push(if p == 9 { 0.9 } else { 0.1 });
        }
        let fm = matrix(&["phi_pi"], rows);
        let map = classify_kh(&fm, &plaq, 0.5, provenance()).unwrap();
        let labels: Vec<&str> = map.points.iter().map(|p| p.label.as_str()).collect();
        assert_eq!(labels, ["RS", "RS", "AFK", "ZZ", "ZZ", "FM", "FM", "FK", "ST", "RS"]);
        assert!((map.boundary("ST", "RS").unwrap() - 1.7).abs() < 1e-12);
        assert!((map.boundary("ZZ", "FM").unwrap() - 0.9).abs() < 1e-12);
        assert!(map.boundary("RS", "ST").is_none());
        // the wrap from RS at 1.8 pi back to RS at 0 is not a transition
        let pairs: Vec<(&str, &str)> = map.boundaries.iter().map(|b| (b.from.as_str(), b.to.as_str())).collect();
        assert_eq!(
            pairs,
            [("RS", "AFK"), ("AFK", "ZZ"), ("ZZ", "FM"), ("FM", "FK"), ("FK", "ST"), ("ST", "RS")]
        );
    }

    #[test]
    fn wrap_around_boundary() {
        let pts: Vec<PhasePoint> = [(0.0, "A"), (1.0, "A"), (1.8, "B")]
            .iter()
            .map(|&(f, l)| PhasePoint { params: vec![f], label: l.into(), cluster: None })
            .collect();
        let b = cyclic_boundaries(&pts);
        assert_eq!(b.len(), 2);
        assert!((b[1].at_phi_pi - 1.9).abs() < 1e-12);
    }
}
