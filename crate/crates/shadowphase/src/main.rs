use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use shadowphase::config::{config_hash, FailureConfig, Grid, SweepConfig};
use shadowphase::error::{io_err, Error, Result};
use shadowphase::io::{
    load_features, read_plaquette_csv, write_elbow_csv, write_failure_csv, write_features,
    write_json, write_pca, write_persistence_csv, write_phase_csv, write_plaquette_csv, write_reports, FeatureKind, FeatureSidecar,
};
use shadowphase::pipeline::{
    classify_annni, classify_kh, run_annni_sweep, run_failure_experiment, run_kh_sweep, PhaseMap, Provenance,
    RunOptions, SweepOutput, KSL_THRESHOLD,
};
use shadowphase_core::ml::{elbow_curve, elbow_point, h0_persistence, pca};

#[derive(Parser)]
#[command(name = "shadowphase", version, about = "Classical-shadow phase classification for spin chains and ladders")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Output directory (created if missing).
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Worker threads; 0 uses every core.
    #[arg(long, env = "SHADOWPHASE_THREADS", default_value_t = 0)]
    threads: usize,
}

#[derive(Args)]
struct SweepArgs {
    /// JSON sweep configuration; flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    epsilon: Option<f64>,
    /// Fixed snapshot count per point instead of the error-bound budget.
    #[arg(long)]
    budget_override: Option<usize>,
    /// System size: N for the chain, L for the ladder.
    #[arg(long)]
    size: Option<usize>,
    /// Grid points per axis.
    #[arg(long)]
    resolution: Option<usize>,
    /// Archive every point's snapshots under <out>/snapshots.
    #[arg(long)]
    save_snapshots: bool,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct FeatureInput {
    /// Feature CSV written by a sweep; its JSON sidecar must sit next to it.
    #[arg(long)]
    features: PathBuf,
    /// Clustering seed; defaults to the sweep seed.
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    common: Common,
}

#[derive(Subcommand)]
enum Command {
    /// Shadow estimates of NN/NNN correlators over a (k, g) grid.
    AnnniSweep(SweepArgs),
    /// Quadrant correlators and derandomized plaquette over a phi grid.
    KhSweep {
        #[command(flatten)]
        sweep: SweepArgs,
        /// Derandomized measurement rounds for the plaquette.
        #[arg(long)]
        rounds: Option<usize>,
        /// First rung (1-based) of the plaquette window.
        #[arg(long)]
        offset: Option<usize>,
    },
    /// Three-cluster K-means on ANNNI features.
    ClassifyAnnni(FeatureInput),
    /// Plaquette threshold plus four-cluster K-means on ladder features.
    ClassifyKh {
        #[command(flatten)]
        input: FeatureInput,
        /// Plaquette CSV written by kh-sweep.
        #[arg(long)]
        plaquette: PathBuf,
        #[arg(long, default_value_t = KSL_THRESHOLD)]
        threshold: f64,
    },
    /// Failure proportion over repeated trials at one ANNNI point.
    FailureExp {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        size: Option<usize>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        k: Option<f64>,
        #[arg(long)]
        g: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long)]
        budget_override: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// K-means inertia for k = 1..=k-max.
    Elbow {
        #[command(flatten)]
        input: FeatureInput,
        #[arg(long, default_value_t = 10)]
        k_max: usize,
    },
    /// Principal components of a feature matrix.
    Pca {
        #[command(flatten)]
        input: FeatureInput,
        #[arg(long, default_value_t = 2)]
        components: usize,
    },
    /// Degree-0 persistence diagram of a feature matrix.
    Persistence {
        #[command(flatten)]
        input: FeatureInput,
    },
}

fn prepare(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(io_err(dir))
}

fn sweep_config(args: &SweepArgs, default: SweepConfig) -> Result<SweepConfig> {
    let mut cfg = match &args.config {
        Some(path) => SweepConfig::load(path)?,
        None => default,
    };
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(e) = args.epsilon {
        cfg.epsilon = e;
    }
    if args.budget_override.is_some() {
        cfg.budget_override = args.budget_override;
    }
    if let Some(n) = args.size {
        cfg.size = n;
    }
    if let Some(r) = args.resolution {
        match &mut cfg.grid {
            Grid::Kg { resolution, .. } | Grid::Phi { resolution, .. } => *resolution = r,
        }
    }
    Ok(cfg)
}

fn run_options(args: &SweepArgs) -> Result<RunOptions> {
    let archive_dir = if args.save_snapshots {
        let dir = args.common.out.join("snapshots");
        prepare(&dir)?;
        Some(dir)
    } else {
        None
    };
    Ok(RunOptions { threads: args.common.threads, archive_dir })
}

fn write_sweep(out: &Path, result: &SweepOutput) -> Result<()> {
    write_features(&out.join("features.csv"), result, FeatureKind::Estimate)?;
    write_features(&out.join("exact.csv"), result, FeatureKind::Exact)?;
    write_reports(&out.join("reports.csv"), result)?;
    if let Some(series) = &result.plaquette {
        write_plaquette_csv(&out.join("plaquette.csv"), series)?;
    }
    write_json(&out.join("config.json"), &result.config)
}

fn provenance(sidecar: &FeatureSidecar, cluster_seed: Option<u64>) -> Provenance {
    Provenance {
        config_hash: sidecar.config_hash.clone(),
        sweep_seed: sidecar.config.seed,
        cluster_seed: cluster_seed.unwrap_or(sidecar.config.seed),
        row_seeds: sidecar.seeds.clone(),
    }
}

fn write_phase_map(out: &Path, map: &PhaseMap) -> Result<()> {
    write_json(&out.join("phase_map.json"), map)?;
    write_phase_csv(&out.join("phases.csv"), map)
}

fn summarize(map: &PhaseMap) {
    for entry in &map.legend {
        let n = map.points.iter().filter(|p| p.label == entry.label).count();
        println!("{:>14}: {n} points", entry.label);
    }
    for b in &map.boundaries {
        println!("boundary {} -> {} at phi = {:.3} pi", b.from, b.to, b.at_phi_pi);
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::AnnniSweep(args) => {
            let cfg = sweep_config(&args, SweepConfig::annni_default())?;
            prepare(&args.common.out)?;
            let result = run_annni_sweep(&cfg, &run_options(&args)?)?;
            write_sweep(&args.common.out, &result)?;
            println!("{} points, {} snapshots each", result.estimates.rows(), result.budget);
        }
        Command::KhSweep { sweep, rounds, offset } => {
            let mut cfg = sweep_config(&sweep, SweepConfig::kh_default())?;
            if let Some(r) = rounds {
                cfg.plaquette_rounds = r;
            }
            if let Some(o) = offset {
                cfg.plaquette_offset = o;
            }
            prepare(&sweep.common.out)?;
            let result = run_kh_sweep(&cfg, &run_options(&sweep)?)?;
            write_sweep(&sweep.common.out, &result)?;
            println!("{} points, {} snapshots each", result.estimates.rows(), result.budget);
        }
        Command::ClassifyAnnni(input) => {
            let (features, sidecar) = load_features(&input.features)?;
            prepare(&input.common.out)?;
            let map = classify_annni(&features, provenance(&sidecar, input.seed))?;
            write_phase_map(&input.common.out, &map)?;
            summarize(&map);
        }
        Command::ClassifyKh { input, plaquette, threshold } => {
            let (features, sidecar) = load_features(&input.features)?;
            let series = read_plaquette_csv(&plaquette)?;
            if series.len() != features.rows()
                || series.iter().zip(&features.params).any(|(s, p)| (s[0] - p[0]).abs() > 1e-12)
            {
                return Err(Error::Config("plaquette series does not match the feature rows".into()));
            }
            let values: Vec<f64> = series.iter().map(|s| s[1]).collect();
            prepare(&input.common.out)?;
            let map = classify_kh(&features, &values, threshold, provenance(&sidecar, input.seed))?;
            write_phase_map(&input.common.out, &map)?;
            summarize(&map);
        }
        Command::FailureExp { config, size, trials, k, g, seed, epsilon, budget_override, common } => {
            let mut cfg = match &config {
                Some(path) => shadowphase::io::read_json::<FailureConfig>(path)?,
                None => FailureConfig::new(8),
            };
            if let Some(n) = size {
                cfg.n = n;
            }
            if let Some(t) = trials {
                cfg.trials = t;
            }
            if let Some(k) = k {
                cfg.k = k;
            }
            if let Some(g) = g {
                cfg.g = g;
            }
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Some(e) = epsilon {
                cfg.epsilon = e;
            }
            if budget_override.is_some() {
                cfg.budget_override = budget_override;
            }
            prepare(&common.out)?;
            let series = run_failure_experiment(&cfg, common.threads)?;
            write_failure_csv(&common.out.join("failure.csv"), &series)?;
            let summary = serde_json::json!({
                "config": &cfg,
                "config_hash": config_hash(&cfg),
                "observables": series.observables,
                "budget": series.budget,
                "mean_rho_fail": series.mean(),
            });
            write_json(&common.out.join("failure.json"), &summary)?;
            println!("T = {}, mean rho_fail = {:.5}", series.budget, series.mean());
        }
        Command::Elbow { input, k_max } => {
            let (features, sidecar) = load_features(&input.features)?;
            prepare(&input.common.out)?;
            let curve = elbow_curve(features.points()?, k_max, input.seed.unwrap_or(sidecar.config.seed))?;
            write_elbow_csv(&input.common.out.join("elbow.csv"), &curve)?;
            match elbow_point(&curve) {
                Some(k) => println!("elbow at k = {k}"),
                None => println!("curve too short for an elbow"),
            }
        }
        Command::Pca { input, components } => {
            let (features, _) = load_features(&input.features)?;
            prepare(&input.common.out)?;
            let result = pca(features.points()?, components)?;
            write_pca(&input.common.out, "pca", &features, &result)?;
            println!("explained variance ratios: {:?}", result.explained_variance_ratio);
        }
        Command::Persistence { input } => {
            let (features, _) = load_features(&input.features)?;
            prepare(&input.common.out)?;
            let diagram = h0_persistence(features.points()?)?;
            write_persistence_csv(&input.common.out.join("persistence.csv"), &diagram)?;
            println!("{} pairs", diagram.pairs.len());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let mut source = std::error::Error::source(&e);
            while let Some(s) = source {
                eprintln!("  caused by: {s}");
                source = s.source();
            }
            ExitCode::FAILURE
        }
    }
}
