//! Experiment orchestration: seeded multi-run execution, result files,
//! comparison reports and instance validation.
//!
//! Every run writes one file, `<output_dir>/<instance>/<algorithm>/seed_<seed>.jsonl`,
//! holding a single JSON record (see [`RunRecord`]). Files are written to a
//! temporary name and renamed, so a crashed experiment leaves no partial
//! records and a rerun skips every run already on disk.

mod config;
mod report;
mod validate;

use std::collections::HashSet;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metrics::MetricsError;
use crate::msrcpsp::{parse_instance, MsrcpspError, MsrcpspProblem, ObjectiveMode};
use crate::pareto::{non_dominated_indices, Individual};
use crate::problem::{Problem, ReferencePoints};
use crate::run::{RunDiagnostics, RunError};
use crate::ttp::{parse_ttp, TtpError, TtpProblem};

pub use config::{
    default_budget, preset, AlgorithmConfig, AlgorithmKind, AlgorithmSpec, ExperimentConfig, ProblemKind, ProblemSpec,
    OUTPUT_DIR_ENV, WORKERS_ENV,
};
pub use report::{read_points, report, NormalizationMode, Report, ReportOptions, Row, StatRow};
pub use validate::{validate_instance, ValidationReport};

/// Version of the result record layout.
pub const RECORD_SCHEMA: u32 = 1;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("unknown algorithm `{0}`")]
    UnknownAlgorithm(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Msrcpsp {
        path: PathBuf,
        #[source]
        source: MsrcpspError,
    },
    #[error("{path}: {source}")]
    Ttp {
        path: PathBuf,
        #[source]
        source: TtpError,
    },
    #[error("{path}: malformed record: {message}")]
    Record { path: PathBuf, message: String },
    #[error("{algorithm} on {instance} with seed {seed}: {source}")]
    Run {
        algorithm: String,
        instance: String,
        seed: u64,
        #[source]
        source: RunError,
    },
    #[error("results mix problem types: {0}")]
    Heterogeneous(String),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

impl HarnessError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        HarnessError::Io { path: path.to_path_buf(), source }
    }
}

/// A parsed instance wired to its problem backend.
#[derive(Clone, Debug)]
pub enum LoadedProblem {
    Msrcpsp(MsrcpspProblem),
    Ttp(TtpProblem),
}

impl LoadedProblem {
    pub fn load(path: &Path, kind: ProblemKind, mode: ObjectiveMode) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        Ok(match kind {
            ProblemKind::Msrcpsp => {
                let inst = parse_instance(&instance_id(path), &text)
                    .map_err(|source| HarnessError::Msrcpsp { path: path.to_path_buf(), source })?;
                LoadedProblem::Msrcpsp(MsrcpspProblem::new(inst, mode))
            }
            ProblemKind::Ttp => {
                let inst = parse_ttp(&text).map_err(|source| HarnessError::Ttp { path: path.to_path_buf(), source })?;
                LoadedProblem::Ttp(TtpProblem::new(inst))
            }
        })
    }

    pub fn kind(&self) -> ProblemKind {
        match self {
            LoadedProblem::Msrcpsp(_) => ProblemKind::Msrcpsp,
            LoadedProblem::Ttp(_) => ProblemKind::Ttp,
        }
    }

    pub fn objective_count(&self) -> usize {
        match self {
            LoadedProblem::Msrcpsp(p) => p.objective_count(),
            LoadedProblem::Ttp(p) => p.objective_count(),
        }
    }

    pub fn reference_points(&self) -> ReferencePoints {
        match self {
            LoadedProblem::Msrcpsp(p) => p.reference_points(),
            LoadedProblem::Ttp(p) => p.reference_points(),
        }
    }
}

/// Instance identifier used in paths and reports: the file stem.
pub fn instance_id(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| path.display().to_string())
}

fn path_safe(s: &str) -> String {
    s.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' || c == '.' { c } else { '_' }).collect()
}

/// One persisted run. Genotypes are kept as raw JSON when reading records
/// back without knowing the problem type.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "G: Serialize", deserialize = "G: DeserializeOwned"))]
pub struct RunRecord<G> {
    pub schema: u32,
    /// Label used in reports.
    pub algorithm: String,
    pub algorithm_kind: AlgorithmKind,
    pub instance: String,
    pub problem: ProblemKind,
    pub objectives: usize,
    pub seed: u64,
    pub budget: u64,
    pub evaluations: u64,
    pub generations: u64,
    pub wall_time_secs: f64,
    pub reference: ReferencePoints,
    pub config: serde_json::Value,
    pub diagnostics: RunDiagnostics,
    pub front: Vec<Individual<G>>,
}

impl<G> RunRecord<G> {
    pub fn objective_rows(&self) -> Vec<Vec<f64>> {
        self.front.iter().map(|i| i.objectives.values().to_vec()).collect()
    }
}

/// Runs `config` on `problem` once and packs the outcome into a record.
pub fn execute<P: Problem>(
    problem: &P,
    algorithm: AlgorithmKind,
    label: &str,
    config: &AlgorithmConfig,
    instance: &str,
    kind: ProblemKind,
    seed: u64,
) -> Result<RunRecord<P::Genotype>, HarnessError> {
    let config = config.with_seed(seed);
    let start = Instant::now();
    let result = config.run(problem).map_err(|source| HarnessError::Run {
        algorithm: label.to_string(),
        instance: instance.to_string(),
        seed,
        source,
    })?;
    Ok(RunRecord {
        schema: RECORD_SCHEMA,
        algorithm: label.to_string(),
        algorithm_kind: algorithm,
        instance: instance.to_string(),
        problem: kind,
        objectives: problem.objective_count(),
        seed,
        budget: config.budget(),
        evaluations: result.evaluations,
        generations: result.generations,
        wall_time_secs: start.elapsed().as_secs_f64(),
        reference: problem.reference_points(),
        config: config.to_json(),
        diagnostics: result.diagnostics,
        front: result.front,
    })
}

/// Writes `bytes` next to `path` under a temporary name, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), HarnessError> {
    let dir = path.parent().unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    std::fs::write(&tmp, bytes).map_err(|e| HarnessError::io(&tmp, e))?;
    std::fs::rename(&tmp, path).map_err(|e| HarnessError::io(path, e))
}

pub fn record_path(output_dir: &Path, instance: &str, algorithm: &str, seed: u64) -> PathBuf {
    output_dir.join(path_safe(instance)).join(path_safe(algorithm)).join(format!("seed_{seed}.jsonl"))
}

struct Planned {
    kind: AlgorithmKind,
    label: String,
    dir: String,
    config: AlgorithmConfig,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ExperimentSummary {
    pub written: Vec<PathBuf>,
    /// Runs already on disk from an earlier invocation.
    pub skipped: Vec<PathBuf>,
}

/// Executes every (instance, algorithm, run) triple not yet on disk. Run `k`
/// uses seed `base_seed + k`. Instances and algorithm settings are checked
/// before the first run starts.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentSummary, HarnessError> {
    config.check()?;
    let kind = config.problem.kind;
    let mode = config.problem.mode();

    let mut planned = Vec::new();
    let mut dirs = HashSet::new();
    for spec in &config.algorithms {
        let (alg, resolved) = AlgorithmConfig::resolve(spec, kind, mode, config.budget)?;
        let label = spec.label.clone().unwrap_or_else(|| alg.label().to_string());
        let dir = spec.label.as_deref().map(path_safe).unwrap_or_else(|| alg.id().to_string());
        if !dirs.insert(dir.clone()) {
            return Err(HarnessError::Config(format!("algorithm `{label}` is listed twice; give one a distinct label")));
        }
        planned.push(Planned { kind: alg, label, dir, config: resolved });
    }

    let mut problems = Vec::new();
    let mut ids = HashSet::new();
    for path in &config.problem.instances {
        let id = instance_id(path);
        if !ids.insert(id.clone()) {
            return Err(HarnessError::Config(format!("two instances share the name `{id}`")));
        }
        problems.push((id, LoadedProblem::load(path, kind, mode)?));
    }

    let mut summary = ExperimentSummary::default();
    let mut jobs = Vec::new();
    for (pi, (id, _)) in problems.iter().enumerate() {
        for (ai, plan) in planned.iter().enumerate() {
            for k in 0..config.runs {
                let seed = config.base_seed + u64::from(k);
                let path = record_path(&config.output_dir, id, &plan.dir, seed);
                if path.exists() {
                    summary.skipped.push(path);
                } else {
                    jobs.push((pi, ai, seed, path));
                }
            }
        }
    }
    log::info!("{} runs to execute, {} already present", jobs.len(), summary.skipped.len());

    let work = || {
        jobs.par_iter()
            .map(|(pi, ai, seed, path)| {
                let (id, problem) = &problems[*pi];
                let plan = &planned[*ai];
                let line = match problem {
                    LoadedProblem::Msrcpsp(p) => to_line(&execute(p, plan.kind, &plan.label, &plan.config, id, kind, *seed)?),
                    LoadedProblem::Ttp(p) => to_line(&execute(p, plan.kind, &plan.label, &plan.config, id, kind, *seed)?),
                };
                write_atomic(path, line.as_bytes())?;
                log::debug!("wrote {}", path.display());
                Ok(path.clone())
            })
            .collect::<Vec<Result<PathBuf, HarnessError>>>()
    };
    let outcomes = match config.workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| HarnessError::Config(format!("cannot start {n} workers: {e}")))?
            .install(work),
        None => work(),
    };
    let mut first_error = None;
    for outcome in outcomes {
        match outcome {
            Ok(p) => summary.written.push(p),
            Err(e) => {
                log::error!("{e}");
                first_error.get_or_insert(e);
            }
        }
    }
    match first_error {
        Some(e) => Err(e),
        None => Ok(summary),
    }
}

fn to_line<G: Serialize>(record: &RunRecord<G>) -> String {
    let mut s = serde_json::to_string(record).expect("records serialize");
    s.push('\n');
    s
}

/// Reads one result file. The front is checked for mutual non-domination.
pub fn read_record(path: &Path) -> Result<RunRecord<serde_json::Value>, HarnessError> {
    let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    let bad = |message: String| HarnessError::Record { path: path.to_path_buf(), message };
    let line = text.lines().find(|l| !l.trim().is_empty()).ok_or_else(|| bad("empty file".into()))?;
    let record: RunRecord<serde_json::Value> = serde_json::from_str(line).map_err(|e| bad(e.to_string()))?;
    if record.front.iter().any(|i| i.objectives.len() != record.objectives) {
        return Err(bad("front vector length differs from the objective count".into()));
    }
    let rows = record.objective_rows();
    if non_dominated_indices(&rows).len() != rows.len() {
        return Err(bad("front contains dominated points".into()));
    }
    Ok(record)
}

/// Every `*.jsonl` record below `dir`, in path order.
pub fn read_results(dir: &Path) -> Result<Vec<RunRecord<serde_json::Value>>, HarnessError> {
    let mut files = Vec::new();
    collect_jsonl(dir, &mut files)?;
    files.sort();
    files.iter().map(|p| read_record(p)).collect()
}

fn collect_jsonl(dir: &Path, out: &mut Vec<PathBuf>) -> Result<(), HarnessError> {
    for entry in std::fs::read_dir(dir).map_err(|e| HarnessError::io(dir, e))? {
        let entry = entry.map_err(|e| HarnessError::io(dir, e))?;
        let path = entry.path();
        if path.is_dir() {
            collect_jsonl(&path, out)?;
        } else if path.extension().is_some_and(|e| e == "jsonl") {
            out.push(path);
        }
    }
    Ok(())
}
