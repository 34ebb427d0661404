//! Command-line front end for `bellpovm`.
//!
//! Every command resolves a [`RunConfig`] (TOML file, then flags), computes a
//! value through the `cmd_*` functions below, and writes it to `--out`, to
//! `$BELLPOVM_OUT_DIR/<default name>`, or to stdout.

pub mod config;
pub mod figures;
pub mod report;

use std::io::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use bellpovm::sweep::{default_thetas, minimal_fit_points, sweep, Sampling, SweepRow};
use bellpovm::validate::{run_all, SuiteReport};
use bellpovm::{fit_bell_magnitude, joint_distribution, sample_counts, CountTable, FitDocument, FitPoint};
use clap::{Args, Parser, Subcommand};

pub use config::{Format, RunConfig, StateSpec};
pub use figures::{build_figure, figure_csv, figure_svg, Figure, FigureId};
pub use report::{counts_report, report_csv, state_report, Report, DEFAULT_BELL};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "BELLPOVM_OUT_DIR";

#[derive(Debug, Parser)]
#[command(name = "bellpovm", version, about = "Joint-measurement Bell experiment simulator and analyzer")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Default, Clone, Args)]
pub struct CommonArgs {
    /// TOML run configuration; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// singlet, werner:<v>, or a JSON density-matrix file.
    #[arg(long, global = true)]
    pub state: Option<StateSpec>,
    /// Trade-off angle on photon A, degrees.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub theta_a: Option<f64>,
    /// Trade-off angle on photon B, degrees.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub theta_b: Option<f64>,
    /// Expected total coincidences per setting.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub mean_total: Option<f64>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

impl CommonArgs {
    /// File values (if any) with flags laid over them.
    pub fn resolve(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        if let Some(s) = &self.state {
            cfg.state = s.clone();
        }
        if let Some(t) = self.theta_a {
            cfg.theta_a = t;
        }
        if let Some(t) = self.theta_b {
            cfg.theta_b = t;
        }
        if let Some(n) = self.mean_total {
            cfg.mean_total = n;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(o) = &self.out {
            cfg.out = Some(o.clone());
        }
        if let Some(f) = self.format {
            cfg.format = Some(f);
        }
        Ok(cfg)
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact outcome distribution and aggregates for one pair of settings.
    Simulate {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Poisson-sampled count table for one pair of settings.
    Counts {
        #[command(flatten)]
        common: CommonArgs,
        /// Acquisition time written as table metadata.
        #[arg(long)]
        duration: Option<f64>,
    },
    /// Probabilities, errors and flip probabilities from a count table.
    Analyze {
        count_file: PathBuf,
        #[command(flatten)]
        common: CommonArgs,
        /// ⟨B̂⟩ assumed for the uniform flip probability.
        #[arg(long, allow_negative_numbers = true, default_value_t = DEFAULT_BELL)]
        bell: f64,
    },
    /// One row per (θ, outcome) with θ_A = θ_B = θ.
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
        /// Comma-separated angles in degrees (default 0,10,…,90).
        #[arg(long, value_delimiter = ',')]
        thetas: Vec<f64>,
        /// Add Poisson-sampled counts to each row.
        #[arg(long)]
        sample: bool,
    },
    /// Line fit of the four low outcomes of a sweep; recovers |⟨B̂⟩|.
    Fit {
        /// Sweep table (JSON or CSV) or fit document (JSON with "points").
        sweep_file: PathBuf,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Plot data: 6 (θ=45°), 7 (0/20/40°), 8 (50/70/90°) bars, 9 scatter with fit.
    Figures {
        which: u8,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Run every invariant suite; nonzero exit on any failure.
    Validate {
        #[arg(long, default_value_t = 2024)]
        seed: u64,
    },
}

pub fn cmd_simulate(cfg: &RunConfig) -> Result<Report> {
    cfg.check_angles()?;
    let state = cfg.state.load()?;
    state_report(format!("state:{}", cfg.state), &state, cfg.theta_a, cfg.theta_b)
}

pub fn cmd_counts(cfg: &RunConfig) -> Result<CountTable> {
    cfg.check_angles()?;
    if !(cfg.mean_total.is_finite() && cfg.mean_total > 0.0) {
        bail!("mean total must be positive, got {}", cfg.mean_total);
    }
    let state = cfg.state.load()?;
    let dist = joint_distribution(&state, cfg.theta_a, cfg.theta_b);
    Ok(sample_counts(&dist, cfg.mean_total, cfg.seed)?)
}

pub fn read_count_table(path: &Path) -> Result<CountTable> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    CountTable::from_csv(&text).with_context(|| format!("{} is not a valid count table", path.display()))
}

pub fn cmd_analyze(path: &Path, theta_a: f64, theta_b: f64, bell: f64) -> Result<Report> {
    let table = read_count_table(path)?;
    counts_report(format!("counts:{}", path.display()), &table, theta_a, theta_b, bell)
}

pub fn cmd_sweep(cfg: &RunConfig, thetas: &[f64], sample: bool) -> Result<Vec<SweepRow>> {
    let state = cfg.state.load()?;
    let sampling = sample.then_some(Sampling { mean_total: cfg.mean_total, seed: cfg.seed });
    if thetas.is_empty() {
        bail!("empty θ list");
    }
    Ok(sweep(&state, thetas, sampling)?)
}

pub fn cmd_fit(rows: &[SweepRow]) -> Result<FitDocument> {
    fit_points_document(minimal_fit_points(rows))
}

fn fit_points_document(points: Vec<FitPoint>) -> Result<FitDocument> {
    let result = fit_bell_magnitude(&points)?;
    Ok(FitDocument { points, result: Some(result) })
}

/// Sweep rows or a fit document, told apart by content.
pub fn cmd_fit_file(path: &Path) -> Result<FitDocument> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let trimmed = text.trim_start();
    if trimmed.starts_with('[') {
        let rows: Vec<SweepRow> = serde_json::from_str(&text).context("bad sweep JSON")?;
        cmd_fit(&rows)
    } else if trimmed.starts_with('{') {
        let doc: FitDocument = serde_json::from_str(&text).context("bad fit document")?;
        fit_points_document(doc.points)
    } else {
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let rows = r.deserialize().collect::<std::result::Result<Vec<SweepRow>, _>>().context("bad sweep CSV")?;
        cmd_fit(&rows)
    }
}

pub fn cmd_figure(id: FigureId, cfg: &RunConfig) -> Result<Figure> {
    let state = cfg.state.load()?;
    build_figure(id, &state, cfg.mean_total, cfg.seed)
}

pub fn cmd_validate(seed: u64) -> Vec<SuiteReport> {
    run_all(seed)
}

pub fn sweep_csv(rows: &[SweepRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

fn json<T: serde::Serialize>(v: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

/// Writes `content` to `out`, to the output directory from the environment,
/// or to stdout, in that order of preference.
pub fn emit(content: &str, out: Option<&Path>, default_name: &str) -> Result<()> {
    let target = match out {
        Some(p) => Some(p.to_path_buf()),
        None => std::env::var_os(OUT_DIR_ENV).map(|d| PathBuf::from(d).join(default_name)),
    };
    match target {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
            }
            std::fs::write(&path, content).with_context(|| format!("cannot write {}", path.display()))?;
            eprintln!("wrote {}", path.display());
        }
        None => std::io::stdout().write_all(content.as_bytes())?,
    }
    Ok(())
}

fn only(format: Format, allowed: &[Format], what: &str) -> Result<Format> {
    if allowed.contains(&format) {
        Ok(format)
    } else {
        Err(anyhow!("{what} cannot be written as {}", format.extension()))
    }
}

/// Runs one command. Returns `false` when validation found failures.
pub fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Simulate { common } => {
            let cfg = common.resolve()?;
            let report = cmd_simulate(&cfg)?;
            let fmt = only(cfg.format.unwrap_or(Format::Json), &[Format::Json, Format::Csv], "a report")?;
            let text = if fmt == Format::Csv { report_csv(&report)? } else { json(&report)? };
            emit(&text, cfg.out.as_deref(), &format!("report.{}", fmt.extension()))?;
        }
        Command::Counts { common, duration } => {
            let cfg = common.resolve()?;
            only(cfg.format.unwrap_or(Format::Csv), &[Format::Csv], "a count table")?;
            let mut table = cmd_counts(&cfg)?;
            if let Some(d) = duration {
                if !(d.is_finite() && d > 0.0) {
                    bail!("duration must be positive, got {d}");
                }
                table.duration_s = Some(d);
            }
            emit(&table.to_csv(), cfg.out.as_deref(), "counts.csv")?;
        }
        Command::Analyze { count_file, common, bell } => {
            let cfg = common.resolve()?;
            cfg.check_angles()?;
            let report = cmd_analyze(&count_file, cfg.theta_a, cfg.theta_b, bell)?;
            let fmt = only(cfg.format.unwrap_or(Format::Json), &[Format::Json, Format::Csv], "a report")?;
            let text = if fmt == Format::Csv { report_csv(&report)? } else { json(&report)? };
            emit(&text, cfg.out.as_deref(), &format!("analysis.{}", fmt.extension()))?;
        }
        Command::Sweep { common, thetas, sample } => {
            let cfg = common.resolve()?;
            let thetas = if thetas.is_empty() { default_thetas() } else { thetas };
            let rows = cmd_sweep(&cfg, &thetas, sample)?;
            let fmt = only(cfg.format.unwrap_or(Format::Json), &[Format::Json, Format::Csv], "a sweep")?;
            let text = if fmt == Format::Csv { sweep_csv(&rows)? } else { json(&rows)? };
            emit(&text, cfg.out.as_deref(), &format!("sweep.{}", fmt.extension()))?;
        }
        Command::Fit { sweep_file, common } => {
            let cfg = common.resolve()?;
            only(cfg.format.unwrap_or(Format::Json), &[Format::Json], "a fit")?;
            let doc = cmd_fit_file(&sweep_file)?;
            emit(&json(&doc)?, cfg.out.as_deref(), "fit.json")?;
        }
        Command::Figures { which, common } => {
            let id = FigureId::parse(which)?;
            let cfg = common.resolve()?;
            let fmt = only(cfg.format.unwrap_or(Format::Svg), &[Format::Csv, Format::Svg], "a figure")?;
            let fig = cmd_figure(id, &cfg)?;
            let text = if fmt == Format::Csv { figure_csv(&fig)? } else { figure_svg(&fig) };
            emit(&text, cfg.out.as_deref(), &format!("figure{}.{}", id.number(), fmt.extension()))?;
        }
        Command::Validate { seed } => {
            let reports = cmd_validate(seed);
            let mut ok = true;
            for r in &reports {
                let failed: Vec<_> = r.failures().collect();
                println!(
                    "{:<12} {}  ({}/{} checks)",
                    r.suite,
                    if failed.is_empty() { "ok" } else { "FAILED" },
                    r.checks.len() - failed.len(),
                    r.checks.len()
                );
                for c in failed {
                    ok = false;
                    println!("  failed: {} - {}", c.name, c.detail);
                }
            }
            return Ok(ok);
        }
    }
    Ok(true)
}
