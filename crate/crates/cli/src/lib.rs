//! Command-line front end: load a scenario file, apply flag overrides, run
//! the Monte Carlo engine and write `<prefix>_results.csv` and
//! `<prefix>_summary.txt`.

pub mod scenario;
pub mod table;

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Parser, ValueEnum};
use linklab_core::{run_sweep, run_trials, AllocationMode};

use crate::scenario::ScenarioFile;
use crate::table::{points_from_sweep, summary, ResultTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AllocationArg {
    Closed,
    Oracle,
    Both,
}

impl From<AllocationArg> for AllocationMode {
    fn from(a: AllocationArg) -> Self {
        match a {
            AllocationArg::Closed => Self::Closed,
            AllocationArg::Oracle => Self::Oracle,
            AllocationArg::Both => Self::Both,
        }
    }
}

/// Monte Carlo link-level simulator for relay- and RIS-assisted links.
#[derive(Debug, Clone, Parser)]
#[command(name = "linklab", version)]
pub struct Args {
    /// Scenario file (TOML).
    pub scenario: PathBuf,

    /// Seed for every random draw. Overrides LINKLAB_SEED and sim.seed.
    #[arg(long, env = "LINKLAB_SEED")]
    pub seed: Option<u64>,

    /// Number of Monte Carlo trials per sweep point.
    #[arg(long)]
    pub trials: Option<u64>,

    #[arg(long, value_enum)]
    pub allocation: Option<AllocationArg>,

    /// Comma-separated scheme list, e.g. `hd_df,fd_af,ris_diffuse`.
    #[arg(long, value_delimiter = ',')]
    pub schemes: Option<Vec<String>>,

    /// Worker threads. Results do not depend on this.
    #[arg(long)]
    pub threads: Option<usize>,

    #[arg(long, value_enum, default_value = "csv")]
    pub format: OutputFormat,

    /// Output prefix. Overrides output.prefix.
    #[arg(long)]
    pub prefix: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunReport {
    pub csv_path: PathBuf,
    pub summary_path: PathBuf,
    pub af_violations: usize,
}

/// Failure of an internal invariant check after the outputs were written.
#[derive(Debug, thiserror::Error)]
#[error("{count} AF evaluations violated the bottleneck bound; see {summary}")]
pub struct InvariantViolation {
    pub count: usize,
    pub summary: String,
}

/// The scenario file after flag overrides, exactly as it will be run.
pub fn resolved_file(args: &Args) -> anyhow::Result<ScenarioFile> {
    let mut file = ScenarioFile::load(&args.scenario)?;
    if let Some(seed) = args.seed {
        file.sim.seed = seed;
    }
    if let Some(trials) = args.trials {
        file.sim.trials = trials;
    }
    if let Some(alloc) = args.allocation {
        file.sim.allocation = AllocationMode::from(alloc).as_str().to_owned();
    }
    if let Some(schemes) = &args.schemes {
        file.sim.schemes = schemes
            .iter()
            .map(|s| s.trim().to_owned())
            .filter(|s| !s.is_empty())
            .collect();
    }
    if let Some(prefix) = &args.prefix {
        file.output.prefix = prefix.to_string_lossy().into_owned();
    }
    // Record the expanded scheme list so the summary is unambiguous.
    file.sim.schemes = file.expanded_schemes()?.iter().map(|s| s.as_str().to_owned()).collect();
    Ok(file)
}

pub fn run(args: &Args) -> anyhow::Result<RunReport> {
    let file = resolved_file(args)?;
    let resolved = file.resolve()?;

    let pool = {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(n) = args.threads {
            if n == 0 {
                bail!("--threads must be >= 1");
            }
            b = b.num_threads(n);
        }
        b.build().context("cannot start worker pool")?
    };

    let points = pool.install(|| -> linklab_core::Result<_> {
        Ok(match &resolved.sweep {
            Some(sweep) => points_from_sweep(run_sweep(&resolved.scenario, sweep, resolved.trials, resolved.seed)?),
            None => vec![(
                None,
                run_trials(&resolved.scenario, resolved.trials, resolved.seed)?
                    .into_values()
                    .collect(),
            )],
        })
    })?;

    let table = ResultTable {
        points: &points,
        with_oracle: resolved.scenario.allocation_mode == AllocationMode::Both,
    };
    let af_violations: usize = points.iter().flat_map(|(_, s)| s).map(|s| s.af_violations).sum();

    let prefix = Path::new(&file.output.prefix);
    if let Some(dir) = prefix.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    }
    let csv_path = with_suffix(prefix, "_results.csv");
    let summary_path = with_suffix(prefix, "_summary.txt");

    let mut notes = vec![
        format!("scenario: {}", args.scenario.display()),
        format!("trials per point: {}, seed: {}", resolved.trials, resolved.seed),
        "worker threads do not affect results".to_owned(),
    ];
    if let Some(sweep) = &resolved.sweep {
        notes.push(format!("sweep: {} over {} values", sweep.variable, sweep.values.len()));
    }
    if af_violations > 0 {
        notes.push(format!("INVARIANT FAILURE: {af_violations} AF bottleneck violations"));
    }

    fs::write(&csv_path, table.to_csv()).with_context(|| format!("cannot write {}", csv_path.display()))?;
    fs::write(&summary_path, summary(&file.to_toml(), &notes, &table))
        .with_context(|| format!("cannot write {}", summary_path.display()))?;

    if af_violations > 0 {
        return Err(InvariantViolation {
            count: af_violations,
            summary: summary_path.display().to_string(),
        }
        .into());
    }
    Ok(RunReport {
        csv_path,
        summary_path,
        af_violations,
    })
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}
