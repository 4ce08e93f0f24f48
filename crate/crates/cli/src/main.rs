use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use bntga_core::harness::{
    read_points, report, run_experiment, validate_instance, write_atomic, ExperimentConfig, NormalizationMode,
    ProblemKind, ReportOptions, OUTPUT_DIR_ENV, WORKERS_ENV,
};
use bntga_core::metrics::{extent, igd_with, normalize, purity, IgdForm};
use clap::{Parser, Subcommand, ValueEnum};

/// Multi-objective experiments on MS-RCPSP and TTP instances.
#[derive(Parser)]
#[command(name = "bntga", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute every run of an experiment config; runs already on disk are skipped.
    Run {
        config: PathBuf,
        /// Overrides `output_dir` of the config.
        #[arg(long, env = OUTPUT_DIR_ENV)]
        output_dir: Option<PathBuf>,
        /// Overrides `workers` of the config.
        #[arg(long, env = WORKERS_ENV)]
        workers: Option<usize>,
    },
    /// Summarize a results directory into IGD/Purity tables.
    Report {
        dir: PathBuf,
        /// Normalize by the TPFa's own min/max instead of the perfect/nadir points.
        #[arg(long)]
        tpf_extent: bool,
        /// Mean of distances instead of the root-sum-square form.
        #[arg(long)]
        canonical: bool,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        /// Algorithm label compared against the others.
        #[arg(long)]
        focal: Option<String>,
        /// Where report.txt, report.csv and report_stats.csv go (the results directory by default).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Parse an instance, check its constraints and print summary statistics.
    Validate {
        instance: PathBuf,
        #[arg(long, value_enum)]
        kind: Kind,
    },
    /// IGD and Purity of point files against a reference front.
    Metrics {
        #[arg(required = true)]
        fronts: Vec<PathBuf>,
        #[arg(long)]
        tpfa: PathBuf,
        /// Skip the min/max normalization by the reference front.
        #[arg(long)]
        raw: bool,
        #[arg(long)]
        canonical: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Msrcpsp,
    Ttp,
}

impl From<Kind> for ProblemKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Msrcpsp => ProblemKind::Msrcpsp,
            Kind::Ttp => ProblemKind::Ttp,
        }
    }
}

fn igd_form(canonical: bool) -> IgdForm {
    if canonical {
        IgdForm::Canonical
    } else {
        IgdForm::Paper
    }
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match Cli::parse().command {
        Command::Run { config, output_dir, workers } => run(&config, output_dir, workers),
        Command::Report { dir, tpf_extent, canonical, alpha, focal, out } => {
            let options = ReportOptions {
                normalization: if tpf_extent { NormalizationMode::TpfExtent } else { NormalizationMode::Reference },
                igd_form: igd_form(canonical),
                alpha,
                focal,
            };
            let rep = report(&dir, &options).with_context(|| format!("reporting on {}", dir.display()))?;
            let out = out.unwrap_or(dir);
            let text = rep.to_text();
            write_atomic(&out.join("report.txt"), text.as_bytes())?;
            write_atomic(&out.join("report.csv"), rep.rows_csv().as_bytes())?;
            write_atomic(&out.join("report_stats.csv"), rep.stats_csv().as_bytes())?;
            print!("{text}");
            Ok(())
        }
        Command::Validate { instance, kind } => {
            let rep = validate_instance(&instance, kind.into())?;
            println!("{rep}");
            Ok(())
        }
        Command::Metrics { fronts, tpfa, raw, canonical } => metrics(&fronts, &tpfa, raw, igd_form(canonical)),
    }
}

fn run(path: &Path, output_dir: Option<PathBuf>, workers: Option<usize>) -> Result<()> {
    let mut config = ExperimentConfig::load(path).with_context(|| format!("loading {}", path.display()))?;
    if let Some(dir) = output_dir {
        config.output_dir = dir;
    }
    if workers.is_some() {
        config.workers = workers;
    }
    let summary = run_experiment(&config)?;
    log::info!(
        "{} runs written, {} skipped, results in {}",
        summary.written.len(),
        summary.skipped.len(),
        config.output_dir.display()
    );
    Ok(())
}

fn metrics(fronts: &[PathBuf], tpfa_path: &Path, raw: bool, form: IgdForm) -> Result<()> {
    let tpfa = read_points(tpfa_path)?;
    if tpfa.is_empty() {
        bail!("{} holds no points", tpfa_path.display());
    }
    let (lower, upper) = extent(&tpfa);
    let scale = |pts: &[Vec<f64>]| -> Result<Vec<Vec<f64>>> {
        if raw {
            Ok(pts.to_vec())
        } else {
            Ok(normalize(pts, &lower, &upper)?.points)
        }
    };
    let reference = scale(&tpfa)?;
    for path in fronts {
        let pts = read_points(path)?;
        if let Some(p) = pts.iter().find(|p| p.len() != reference[0].len()) {
            bail!("{}: {} objectives, reference front has {}", path.display(), p.len(), reference[0].len());
        }
        let pts = scale(&pts)?;
        println!(
            "{}\tIGD {:.6e}\tPurity {:.4}",
            path.display(),
            igd_with(&pts, &reference, form)?,
            purity(&pts, &reference)?
        );
    }
    Ok(())
}
