//! Parameter sweeps, failure-proportion experiments and phase
//! classification.
//!
//! Grid points and trials run on a rayon pool; results are gathered in grid
//! order, so outputs do not depend on the thread count.

mod classify;
mod failure;
mod sweep;

use std::path::PathBuf;

use shadowphase_core::shadows::ShadowEnsemble;

pub use classify::{
    classify_annni, classify_kh, Boundary, LegendEntry, PhaseMap, PhasePoint, Provenance, ANNNI_ANCHORS,
    KH_ANCHORS, KSL_THRESHOLD,
};
pub use failure::{run_failure_experiment, FailureSeries};
pub use sweep::{run_annni_sweep, run_kh_sweep, sweep_budget, PlaquetteSeries, SweepOutput};

use crate::archive::save_archive;
use crate::error::Result;

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    /// Worker threads; 0 lets rayon decide.
    pub threads: usize,
    /// When set, every grid point's snapshots are archived here as
    /// `point_NNNN.shadow`.
    pub archive_dir: Option<PathBuf>,
}

impl RunOptions {
    pub fn with_threads(threads: usize) -> Self {
        RunOptions { threads, archive_dir: None }
    }

    fn save_snapshots(&self, index: usize, ens: &ShadowEnsemble) -> Result<()> {
        match &self.archive_dir {
            Some(dir) => save_archive(&dir.join(format!("point_{index:04}.shadow")), ens),
            None => Ok(()),
        }
    }
}

pub(crate) fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build()?;
    Ok(pool.install(f))
}
