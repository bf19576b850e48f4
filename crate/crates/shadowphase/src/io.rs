//! CSV and JSON outputs.
//!
//! Numbers are written in Rust's shortest round-trip form, so identical
//! runs produce identical bytes. Each feature CSV has a JSON sidecar with the
//! same stem carrying metadata and `schema_version`.

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use shadowphase_core::features::{FeatureMatrix, RowMeta};
use shadowphase_core::ml::{Pca, PersistenceDiagram};

use crate::config::{Model, SweepConfig};
use crate::error::{io_err, Error, Result};
use crate::pipeline::{FailureSeries, PhaseMap, PlaquetteSeries, SweepOutput};

pub const SCHEMA_VERSION: u32 = 1;

fn num(v: f64) -> String {
    v.to_string()
}

fn writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    let file = fs::File::create(path).map_err(io_err(path))?;
    Ok(csv::Writer::from_writer(file))
}

fn reader(path: &Path) -> Result<csv::Reader<fs::File>> {
    let file = fs::File::open(path).map_err(io_err(path))?;
    Ok(csv::Reader::from_reader(file))
}

fn malformed(path: &Path, reason: impl Into<String>) -> Error {
    Error::Format { path: path.to_path_buf(), reason: reason.into() }
}

fn parse(path: &Path, field: &str) -> Result<f64> {
    field.parse().map_err(|_| malformed(path, format!("not a number: {field:?}")))
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).map_err(io_err(path))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    Ok(serde_json::from_str(&text)?)
}

/// Whether a feature file holds shadow estimates or exact values.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureKind {
    Estimate,
    Exact,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureSidecar {
    pub schema_version: u32,
    pub kind: FeatureKind,
    pub model: Model,
    pub size: usize,
    pub epsilon: f64,
    pub param_names: Vec<String>,
    pub columns: Vec<String>,
    pub observables: Vec<String>,
    pub locality: usize,
    pub budget: usize,
    pub seeds: Vec<u64>,
    pub budgets: Vec<usize>,
    pub config: SweepConfig,
    pub config_hash: String,
}

pub fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}

/// Header: parameter names then observable names.
pub fn write_feature_csv(path: &Path, m: &FeatureMatrix) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(m.param_names.iter().chain(&m.columns))?;
    for r in 0..m.rows() {
        w.write_record(m.params[r].iter().chain(m.row(r)).map(|&v| num(v)))?;
    }
    w.flush().map_err(io_err(path))
}

pub fn write_features(path: &Path, out: &SweepOutput, kind: FeatureKind) -> Result<()> {
    let m = match kind {
        FeatureKind::Estimate => &out.estimates,
        FeatureKind::Exact => &out.exact,
    };
    write_feature_csv(path, m)?;
    let sidecar = FeatureSidecar {
        schema_version: SCHEMA_VERSION,
        kind,
        model: out.config.model,
        size: out.config.size,
        epsilon: out.config.epsilon,
        param_names: m.param_names.clone(),
        columns: m.columns.clone(),
        observables: out.observables.observables.iter().map(|p| p.to_string()).collect(),
        locality: out.observables.locality,
        budget: out.budget,
        seeds: m.meta.iter().map(|r| r.seed).collect(),
        budgets: m.meta.iter().map(|r| r.budget).collect(),
        config: out.config.clone(),
        config_hash: out.config.hash(),
    };
    write_json(&sidecar_path(path), &sidecar)
}

/// Reads a feature CSV together with its sidecar.
pub fn load_features(path: &Path) -> Result<(FeatureMatrix, FeatureSidecar)> {
    let sidecar: FeatureSidecar = read_json(&sidecar_path(path))?;
    if sidecar.schema_version != SCHEMA_VERSION {
        return Err(malformed(path, format!("unsupported schema version {}", sidecar.schema_version)));
    }
    let mut r = reader(path)?;
    let header: Vec<String> = r.headers()?.iter().map(String::from).collect();
    let p = sidecar.param_names.len();
    if header.len() != p + sidecar.columns.len() || header[..p] != sidecar.param_names[..] || header[p..] != sidecar.columns[..] {
        return Err(malformed(path, "header does not match the sidecar"));
    }
    let mut params = Vec::new();
    let mut values = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let nums = rec.iter().map(|f| parse(path, f)).collect::<Result<Vec<f64>>>()?;
        params.push(nums[..p].to_vec());
        values.extend_from_slice(&nums[p..]);
    }
    if params.len() != sidecar.seeds.len() || params.len() != sidecar.budgets.len() {
        return Err(malformed(path, "row count does not match the sidecar"));
    }
    let meta = sidecar.seeds.iter().zip(&sidecar.budgets).map(|(&seed, &budget)| RowMeta { seed, budget }).collect();
    let m = FeatureMatrix { param_names: sidecar.param_names.clone(), params, columns: sidecar.columns.clone(), values, meta };
    Ok((m, sidecar))
}

pub fn write_reports(path: &Path, out: &SweepOutput) -> Result<()> {
    let mut w = writer(path)?;
    let names = &out.estimates.param_names;
    w.write_record(names.iter().map(String::as_str).chain(["observable", "pauli", "estimate", "exact", "abs_error", "within_bound"]))?;
    for (row, report) in out.reports() {
        let col = out.observables.observables.iter().position(|p| *p == report.observable).expect("observable in set");
        let exact = report.exact.expect("sweeps record exact values");
        let mut rec: Vec<String> = out.estimates.params[row].iter().map(|&v| num(v)).collect();
        rec.push(out.observables.names[col].clone());
        rec.push(report.observable.to_string());
        rec.push(num(report.estimate));
        rec.push(num(exact));
        rec.push(num((report.estimate - exact).abs()));
        rec.push(report.within_bound.expect("exact present").to_string());
        w.write_record(&rec)?;
    }
    w.flush().map_err(io_err(path))
}

pub fn write_plaquette_csv(path: &Path, s: &PlaquetteSeries) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["phi_pi", "estimate", "exact"])?;
    for i in 0..s.phi_pi.len() {
        w.write_record([num(s.phi_pi[i]), num(s.estimate[i]), num(s.exact[i])])?;
    }
    w.flush().map_err(io_err(path))
}

/// Reads `(phi_pi, estimate, exact)` rows.
pub fn read_plaquette_csv(path: &Path) -> Result<Vec<[f64; 3]>> {
    let mut r = reader(path)?;
    if r.headers()?.iter().collect::<Vec<_>>() != ["phi_pi", "estimate", "exact"] {
        return Err(malformed(path, "expected columns phi_pi, estimate, exact"));
    }
    r.records()
        .map(|rec| {
            let rec = rec?;
            Ok([parse(path, &rec[0])?, parse(path, &rec[1])?, parse(path, &rec[2])?])
        })
        .collect()
}

pub fn write_failure_csv(path: &Path, s: &FailureSeries) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["trial", "rho_fail"])?;
    for (i, &r) in s.rho_fail.iter().enumerate() {
        w.write_record([i.to_string(), num(r)])?;
    }
    w.flush().map_err(io_err(path))
}

/// One row per grid point: parameters, phase label, cluster id (empty for
/// plaquette-labelled points).
pub fn write_phase_csv(path: &Path, map: &PhaseMap) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(map.param_names.iter().map(String::as_str).chain(["label", "cluster"]))?;
    for p in &map.points {
        let cluster = p.cluster.map(|c| c.to_string()).unwrap_or_default();
        w.write_record(p.params.iter().map(|&v| num(v)).chain([p.label.clone(), cluster]))?;
    }
    w.flush().map_err(io_err(path))
}

/// `k, inertia, second_difference`; the last column is empty at the ends.
pub fn write_elbow_csv(path: &Path, curve: &[(usize, f64)]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["k", "inertia", "second_difference"])?;
    for (i, &(k, inertia)) in curve.iter().enumerate() {
        let d = if i > 0 && i + 1 < curve.len() {
            num(curve[i - 1].1 - 2.0 * inertia + curve[i + 1].1)
        } else {
            String::new()
        };
        w.write_record([k.to_string(), num(inertia), d])?;
    }
    w.flush().map_err(io_err(path))
}

#[derive(Serialize)]
struct PcaSummary<'a> {
    schema_version: u32,
    n_components: usize,
    explained_variance_ratio: &'a [f64],
    zero_variance: bool,
    mean: &'a [f64],
}

/// Writes `<stem>_projections.csv`, `<stem>_components.csv` and
/// `<stem>.json` into `dir`.
pub fn write_pca(dir: &Path, stem: &str, m: &FeatureMatrix, pca: &Pca) -> Result<()> {
    let pcs: Vec<String> = (1..=pca.n_components).map(|c| format!("pc{c}")).collect();
    let path = dir.join(format!("{stem}_projections.csv"));
    let mut w = writer(&path)?;
    w.write_record(m.param_names.iter().chain(&pcs))?;
    for r in 0..m.rows() {
        w.write_record(m.params[r].iter().chain(pca.projection(r)).map(|&v| num(v)))?;
    }
    w.flush().map_err(io_err(&path))?;

    let path = dir.join(format!("{stem}_components.csv"));
    let mut w = writer(&path)?;
    w.write_record(std::iter::once("component").chain(m.columns.iter().map(String::as_str)))?;
    for (c, name) in pcs.iter().enumerate() {
        w.write_record(std::iter::once(name.clone()).chain(pca.component(c).iter().map(|&v| num(v))))?;
    }
    w.flush().map_err(io_err(&path))?;

    let summary = PcaSummary {
        schema_version: SCHEMA_VERSION,
        n_components: pca.n_components,
        explained_variance_ratio: &pca.explained_variance_ratio,
        zero_variance: pca.zero_variance,
        mean: &pca.mean,
    };
    write_json(&dir.join(format!("{stem}.json")), &summary)
}

/// `birth, death` with `inf` for the essential class.
pub fn write_persistence_csv(path: &Path, d: &PersistenceDiagram) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["birth", "death"])?;
    for p in &d.pairs {
        w.write_record([num(p.birth), num(p.death)])?;
    }
    w.flush().map_err(io_err(path))
}
