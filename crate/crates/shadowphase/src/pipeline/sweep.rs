use rayon::prelude::*;
use serde::Serialize;
use shadowphase_core::eigensolver::{ground_pauli_expectation, ground_space, EigensolverConfig, GroundSpace};
use shadowphase_core::features::{
    annni_observables, assemble_feature_matrix, kh_quadrant_observables, plaquette_observable, FeatureMatrix,
    ObservableSet, SweepRow,
};
use shadowphase_core::hamiltonians::{build_annni, build_kitaev_heisenberg, AnnniParams, KhParams};
use shadowphase_core::shadows::{
    derandomized_schedule, derive_seed, estimate_derandomized, estimate_pauli, sample_snapshots, snapshot_budget,
    BasisAssignment, EstimateReport, ShadowEnsemble,
};
use shadowphase_core::spin_ops::PauliString;

use crate::config::{Model, SweepConfig};
use crate::error::{Error, Result};

use super::{in_pool, RunOptions};

/// Estimated and exact feature matrices of one sweep, rows in the same
/// order.
#[derive(Clone, Debug)]
pub struct SweepOutput {
    pub config: SweepConfig,
    pub observables: ObservableSet,
    pub budget: usize,
    pub estimates: FeatureMatrix,
    pub exact: FeatureMatrix,
    pub plaquette: Option<PlaquetteSeries>,
}

impl SweepOutput {
    /// Every estimate with its exact value, row by row.
    pub fn reports(&self) -> Vec<(usize, EstimateReport)> {
        let mut out = Vec::with_capacity(self.estimates.values.len());
        for r in 0..self.estimates.rows() {
            for (c, obs) in self.observables.observables.iter().enumerate() {
                let report = EstimateReport::new(
                    obs.clone(),
                    self.estimates.get(r, c),
                    Some(self.exact.get(r, c)),
                    self.config.epsilon,
                );
                out.push((r, report));
            }
        }
        out
    }
}

/// Derandomized plaquette estimates along a ladder sweep.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PlaquetteSeries {
    pub observable: String,
    pub rounds: usize,
    pub phi_pi: Vec<f64>,
    pub estimate: Vec<f64>,
    pub exact: Vec<f64>,
}

struct PointResult {
    row: SweepRow,
    exact: Vec<f64>,
    plaquette: Option<(f64, f64)>,
}

fn point_label(names: &[String], params: &[f64]) -> String {
    names.iter().zip(params).map(|(n, v)| format!("{n}={v}")).collect::<Vec<_>>().join(", ")
}

/// Samples `t` snapshots from the ground space and estimates every
/// observable, returning `(estimates, exact values)`.
fn estimate_point(
    gs: &GroundSpace,
    set: &ObservableSet,
    t: usize,
    seed: u64,
) -> shadowphase_core::Result<(ShadowEnsemble, Vec<f64>, Vec<f64>)> {
    let ens = sample_snapshots(gs, t, seed)?;
    let mut est = Vec::with_capacity(set.len());
    let mut exact = Vec::with_capacity(set.len());
    for p in &set.observables {
        est.push(estimate_pauli(&ens, p)?);
        exact.push(ground_pauli_expectation(gs, p)?);
    }
    Ok((ens, est, exact))
}

pub fn sweep_budget(cfg: &SweepConfig, set: &ObservableSet) -> Result<usize> {
    match cfg.budget_override {
        Some(t) => Ok(t),
        None => Ok(snapshot_budget(set.budget_count, set.locality as u32, cfg.epsilon)?),
    }
}

/// Ground state, shadow estimates and exact values of the ANNNI correlators
/// at every `(k, g)` grid point.
pub fn run_annni_sweep(cfg: &SweepConfig, opts: &RunOptions) -> Result<SweepOutput> {
    cfg.validate()?;
    if cfg.model != Model::Annni {
        return Err(Error::Config("expected an ANNNI configuration".into()));
    }
    let set = annni_observables(cfg.size)?;
    let budget = sweep_budget(cfg, &set)?;
    let names = cfg.grid.param_names();
    let points = cfg.grid.points();
    let results = in_pool(opts.threads, || {
        points
            .par_iter()
            .enumerate()
            .map(|(i, params)| {
                let seed = derive_seed(cfg.seed, i as u64);
                let run = || {
                    let h = build_annni(&AnnniParams::new(cfg.size, params[0], params[1])?)?;
                    let gs = ground_space(&h, &EigensolverConfig::default())?;
                    estimate_point(&gs, &set, budget, seed)
                };
                let (ens, values, exact) =
                    run().map_err(|source| Error::Point { point: point_label(&names, params), source })?;
                opts.save_snapshots(i, &ens)?;
                let row = SweepRow { params: params.clone(), columns: set.names.clone(), values, seed, budget };
                Ok(PointResult { row, exact, plaquette: None })
            })
            .collect::<Result<Vec<_>>>()
    })??;
    finish(cfg, set, budget, names, results, None)
}

/// Quadrant correlators on the shadow budget plus a derandomized plaquette
/// estimate at every angle of a ladder sweep.
pub fn run_kh_sweep(cfg: &SweepConfig, opts: &RunOptions) -> Result<SweepOutput> {
    cfg.validate()?;
    if cfg.model != Model::Kh {
        return Err(Error::Config("expected a ladder configuration".into()));
    }
    let set = kh_quadrant_observables(cfg.size)?;
    let budget = sweep_budget(cfg, &set)?;
    let plaquette = plaquette_observable(cfg.size, cfg.plaquette_offset)?;
    let schedule = derandomized_schedule(std::slice::from_ref(&plaquette), cfg.plaquette_rounds)?;
    let names = cfg.grid.param_names();
    let points = cfg.grid.points();
    let results = in_pool(opts.threads, || {
        points
            .par_iter()
            .enumerate()
            .map(|(i, params)| {
                let seed = derive_seed(cfg.seed, i as u64);
                let run = || kh_point(cfg.size, params[0], &set, budget, &plaquette, &schedule, seed);
                let (ens, values, exact, plaq) =
                    run().map_err(|source| Error::Point { point: point_label(&names, params), source })?;
                opts.save_snapshots(i, &ens)?;
                let row = SweepRow { params: params.clone(), columns: set.names.clone(), values, seed, budget };
                Ok(PointResult { row, exact, plaquette: Some(plaq) })
            })
            .collect::<Result<Vec<_>>>()
    })??;
    let series = PlaquetteSeries {
        observable: plaquette.to_string(),
        rounds: cfg.plaquette_rounds,
        phi_pi: Vec::new(),
        estimate: Vec::new(),
        exact: Vec::new(),
    };
    finish(cfg, set, budget, names, results, Some(series))
}

type KhPoint = (ShadowEnsemble, Vec<f64>, Vec<f64>, (f64, f64));

fn kh_point(
    l: usize,
    phi_pi: f64,
    set: &ObservableSet,
    budget: usize,
    plaquette: &PauliString,
    schedule: &[BasisAssignment],
    seed: u64,
) -> shadowphase_core::Result<KhPoint> {
    let h = build_kitaev_heisenberg(&KhParams::new(l, phi_pi * core::f64::consts::PI)?)?;
    let gs = ground_space(&h, &EigensolverConfig::default())?;
    let (ens, values, exact) = estimate_point(&gs, set, budget, seed)?;
    let est = estimate_derandomized(&gs, schedule, plaquette, derive_seed(seed, 1))?;
    let ex = ground_pauli_expectation(&gs, plaquette)?;
    Ok((ens, values, exact, (est, ex)))
}

fn finish(
    cfg: &SweepConfig,
    set: ObservableSet,
    budget: usize,
    names: Vec<String>,
    results: Vec<PointResult>,
    mut series: Option<PlaquetteSeries>,
) -> Result<SweepOutput> {
    let mut est_rows = Vec::with_capacity(results.len());
    let mut exact_rows = Vec::with_capacity(results.len());
    let mut plaq = Vec::new();
    for r in results {
        exact_rows.push(SweepRow { values: r.exact, ..r.row.clone() });
        if let Some(p) = r.plaquette {
            plaq.push((r.row.params[0], p));
        }
        est_rows.push(r.row);
    }
    if let Some(s) = series.as_mut() {
        plaq.sort_by(|a, b| a.0.total_cmp(&b.0));
        for (phi, (e, x)) in plaq {
            s.phi_pi.push(phi);
            s.estimate.push(e);
            s.exact.push(x);
        }
    }
    Ok(SweepOutput {
        config: cfg.clone(),
        observables: set,
        budget,
        estimates: assemble_feature_matrix(names.clone(), est_rows)?,
        exact: assemble_feature_matrix(names, exact_rows)?,
        plaquette: series,
    })
}
