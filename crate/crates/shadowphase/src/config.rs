//! JSON run configurations.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{io_err, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Annni,
    Kh,
}

/// Parameter grid. `kg` covers a closed rectangle; `phi` covers the
/// half-open interval `[start_pi, end_pi) * pi`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum Grid {
    Kg { k: [f64; 2], g: [f64; 2], resolution: usize },
    Phi { start_pi: f64, end_pi: f64, resolution: usize },
}

impl Grid {
    pub fn param_names(&self) -> Vec<String> {
        match self {
            Grid::Kg { .. } => vec!["k".into(), "g".into()],
            Grid::Phi { .. } => vec!["phi_pi".into()],
        }
    }

    /// Grid points in sweep order (`k` outer, `g` inner). Angles are given
    /// in units of pi.
    pub fn points(&self) -> Vec<Vec<f64>> {
        let step = |lo: f64, hi: f64, i: usize, steps: usize| lo + (hi - lo) * (i as f64 / steps as f64);
        match *self {
            Grid::Kg { k, g, resolution } => {
                let s = resolution - 1;
                (0..resolution)
                    .flat_map(|i| (0..resolution).map(move |j| vec![step(k[0], k[1], i, s), step(g[0], g[1], j, s)]))
                    .collect()
            }
            Grid::Phi { start_pi, end_pi, resolution } => {
                (0..resolution).map(|i| vec![step(start_pi, end_pi, i, resolution)]).collect()
            }
        }
    }

    pub fn len(&self) -> usize {
        match *self {
            Grid::Kg { resolution, .. } => resolution * resolution,
            Grid::Phi { resolution, .. } => resolution,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn default_rounds() -> usize {
    1000
}

fn default_offset() -> usize {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub model: Model,
    /// Chain length `N` (ANNNI) or rung count `L` (ladder).
    pub size: usize,
    pub grid: Grid,
    pub epsilon: f64,
    pub seed: u64,
    #[serde(default)]
    pub budget_override: Option<usize>,
    #[serde(default = "default_rounds")]
    pub plaquette_rounds: usize,
    #[serde(default = "default_offset")]
    pub plaquette_offset: usize,
}

impl SweepConfig {
    /// `N = 12` on a 21 x 21 grid over `[0, 1]^2`.
    pub fn annni_default() -> Self {
        SweepConfig {
            model: Model::Annni,
            size: 12,
            grid: Grid::Kg { k: [0.0, 1.0], g: [0.0, 1.0], resolution: 21 },
            epsilon: 0.1,
            seed: 2024,
            budget_override: None,
            plaquette_rounds: default_rounds(),
            plaquette_offset: default_offset(),
        }
    }

    /// `L = 6` with 100 angles over `[0, 2 pi)`.
    pub fn kh_default() -> Self {
        SweepConfig {
            model: Model::Kh,
            size: 6,
            grid: Grid::Phi { start_pi: 0.0, end_pi: 2.0, resolution: 100 },
            ..Self::annni_default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.into()));
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return bad("epsilon must be positive");
        }
        if self.budget_override == Some(0) {
            return bad("budget override must be positive");
        }
        match (&self.model, &self.grid) {
            (Model::Annni, Grid::Kg { k, g, resolution }) => {
                if *resolution < 2 {
                    return bad("resolution must be at least 2");
                }
                if self.size < 3 {
                    return bad("ANNNI sweeps need N >= 3");
                }
                let ok = |r: &[f64; 2]| r[0].is_finite() && r[1].is_finite() && 0.0 <= r[0] && r[0] <= r[1];
                if !ok(k) || !ok(g) {
                    return bad("k and g ranges must be finite, non-negative and ordered");
                }
            }
            (Model::Kh, Grid::Phi { start_pi, end_pi, resolution }) => {
                if *resolution < 2 {
                    return bad("resolution must be at least 2");
                }
                if self.size < 4 || self.size % 2 != 0 {
                    return bad("ladder sweeps need an even L >= 4");
                }
                if !(0.0 <= *start_pi && start_pi < end_pi && *end_pi <= 2.0) {
                    return bad("phi range must satisfy 0 <= start < end <= 2 (units of pi)");
                }
                if self.plaquette_rounds == 0 {
                    return bad("plaquette rounds must be positive");
                }
                if self.plaquette_offset < 1 || self.plaquette_offset + 2 > self.size {
                    return bad("plaquette offset out of range");
                }
            }
            _ => return bad("grid kind does not match the model"),
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(io_err(path))?;
        let cfg: SweepConfig = serde_json::from_str(&text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// SHA-256 of the compact JSON encoding.
    pub fn hash(&self) -> String {
        config_hash(self)
    }
}

/// SHA-256 of the compact JSON encoding of any configuration.
pub fn config_hash<T: Serialize>(cfg: &T) -> String {
    let bytes = serde_json::to_vec(cfg).expect("configurations serialize");
    hex::encode(Sha256::digest(&bytes))
}

/// Parameters of a failure-proportion experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FailureConfig {
    pub n: usize,
    pub k: f64,
    pub g: f64,
    pub epsilon: f64,
    pub trials: usize,
    pub seed: u64,
    #[serde(default)]
    pub budget_override: Option<usize>,
}

impl FailureConfig {
    pub fn new(n: usize) -> Self {
        FailureConfig { n, k: 0.5, g: 0.5, epsilon: 0.1, trials: 100, seed: 2024, budget_override: None }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::Config("epsilon must be positive".into()));
        }
        if self.budget_override == Some(0) {
            return Err(Error::Config("budget override must be positive".into()));
        }
        Ok(())
    }
}
