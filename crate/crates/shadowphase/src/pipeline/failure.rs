use rayon::prelude::*;
use serde::Serialize;
use shadowphase_core::eigensolver::{ground_pauli_expectation, ground_space, EigensolverConfig};
use shadowphase_core::features::annni_observables;
use shadowphase_core::hamiltonians::{build_annni, AnnniParams};
use shadowphase_core::shadows::{
    derive_seed, estimate_pauli, failure_proportion, sample_snapshots, snapshot_budget, EstimateReport,
};

use crate::config::FailureConfig;
use crate::error::Result;

use super::in_pool;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FailureSeries {
    pub config: FailureConfig,
    pub observables: usize,
    pub budget: usize,
    pub rho_fail: Vec<f64>,
}

impl FailureSeries {
    pub fn mean(&self) -> f64 {
        self.rho_fail.iter().sum::<f64>() / self.rho_fail.len() as f64
    }

    pub fn trials_at_most(&self, bound: f64) -> usize {
        self.rho_fail.iter().filter(|&&r| r <= bound).count()
    }
}

/// Repeats the shadow estimation of all ANNNI correlators at one parameter
/// point with fresh seeds and records the failure proportion of each trial.
pub fn run_failure_experiment(cfg: &FailureConfig, threads: usize) -> Result<FailureSeries> {
    cfg.validate()?;
    let set = annni_observables(cfg.n)?;
    let budget = match cfg.budget_override {
        Some(t) => t,
        None => snapshot_budget(set.len(), set.locality as u32, cfg.epsilon)?,
    };
    let h = build_annni(&AnnniParams::new(cfg.n, cfg.k, cfg.g)?)?;
    let gs = ground_space(&h, &EigensolverConfig::default())?;
    let exact = set
        .observables
        .iter()
        .map(|p| ground_pauli_expectation(&gs, p))
        .collect::<shadowphase_core::Result<Vec<f64>>>()?;
    let rho_fail = in_pool(threads, || {
        (0..cfg.trials)
            .into_par_iter()
            .map(|trial| {
                let ens = sample_snapshots(&gs, budget, derive_seed(cfg.seed, trial as u64))?;
                let reports = set
                    .observables
                    .iter()
                    .zip(&exact)
                    .map(|(p, &x)| Ok(EstimateReport::new(p.clone(), estimate_pauli(&ens, p)?, Some(x), cfg.epsilon)))
                    .collect::<shadowphase_core::Result<Vec<_>>>()?;
                failure_proportion(&reports, cfg.epsilon)
            })
            .collect::<shadowphase_core::Result<Vec<f64>>>()
    })??;
    Ok(FailureSeries { config: cfg.clone(), observables: set.len(), budget, rho_fail })
}
