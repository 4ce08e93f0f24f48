//! Experiment configuration and the tuned per-problem algorithm presets.
//!
//! ```toml
//! runs = 30
//! budget = 10000          # optional; per-problem default otherwise
//! base_seed = 1
//! output_dir = "results"
//! workers = 4             # optional; all cores otherwise
//!
//! [problem]
//! kind = "msrcpsp"        # or "ttp"
//! objectives = "2obj"     # msrcpsp only: "2obj" or "5obj"
//! instances = ["instances/100_5_20_9_D3.def"]
//!
//! [[algorithms]]
//! name = "B-NTGA"
//!
//! [[algorithms]]
//! name = "NSGA-II"
//! pop_size = 100          # any field of the algorithm's config overrides the preset
//! ```
//!
//! Relative paths are resolved against the directory of the config file.
//! `BNTGA_OUTPUT_DIR` and `BNTGA_WORKERS` override the matching keys.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::baselines::{
    moead_run, nsga2_run, ntga2_run, spea2_run, thetadea_run, unsga3_run, MoeadConfig, Nsga2Config, Ntga2Config,
    Spea2Config, ThetaDeaConfig, Unsga3Config,
};
use crate::bntga::{run_bntga, BntgaConfig};
use crate::msrcpsp::ObjectiveMode;
use crate::problem::{Problem, Rate};
use crate::run::{NoObserver, RunError, RunResult};

pub const OUTPUT_DIR_ENV: &str = "BNTGA_OUTPUT_DIR";
pub const WORKERS_ENV: &str = "BNTGA_WORKERS";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProblemKind {
    Msrcpsp,
    Ttp,
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProblemKind::Msrcpsp => "msrcpsp",
            ProblemKind::Ttp => "ttp",
        })
    }
}

impl FromStr for ProblemKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "msrcpsp" | "ms-rcpsp" => Ok(ProblemKind::Msrcpsp),
            "ttp" => Ok(ProblemKind::Ttp),
            other => Err(format!("unknown problem kind `{other}` (expected msrcpsp or ttp)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub kind: ProblemKind,
    /// MS-RCPSP objective set; ignored for TTP.
    #[serde(default)]
    pub objectives: Option<ObjectiveMode>,
    pub instances: Vec<PathBuf>,
}

impl ProblemSpec {
    /// Objective mode used for MS-RCPSP (2 objectives when unset).
    pub fn mode(&self) -> ObjectiveMode {
        self.objectives.unwrap_or(ObjectiveMode::Two)
    }
}

/// One `[[algorithms]]` block: a name plus overrides of preset fields.
/// `label` tells two settings of the same algorithm apart in the output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlgorithmSpec {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(flatten)]
    pub overrides: toml::Table,
}

impl AlgorithmSpec {
    pub fn named(name: impl Into<String>) -> Self {
        Self { name: name.into(), label: None, overrides: toml::Table::new() }
    }
}

fn default_runs() -> u32 {
    30
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("results")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub problem: ProblemSpec,
    pub algorithms: Vec<AlgorithmSpec>,
    #[serde(default = "default_runs")]
    pub runs: u32,
    /// Evaluation budget of every run; the problem's default when absent.
    #[serde(default)]
    pub budget: Option<u64>,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    /// Parallel runs; rayon's default when absent.
    #[serde(default)]
    pub workers: Option<usize>,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, HarnessError> {
        toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))
    }

    /// Reads a config file, resolves relative paths against its directory and
    /// applies environment overrides.
    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        let mut config = Self::from_toml(&text)?;
        if let Some(base) = path.parent() {
            config.resolve_paths(base);
        }
        config.apply_env(|key| std::env::var(key).ok())?;
        Ok(config)
    }

    pub fn resolve_paths(&mut self, base: &Path) {
        for p in &mut self.problem.instances {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        if self.output_dir.is_relative() {
            self.output_dir = base.join(&self.output_dir);
        }
    }

    pub fn apply_env(&mut self, lookup: impl Fn(&str) -> Option<String>) -> Result<(), HarnessError> {
        if let Some(dir) = lookup(OUTPUT_DIR_ENV).filter(|s| !s.is_empty()) {
            self.output_dir = PathBuf::from(dir);
        }
        if let Some(w) = lookup(WORKERS_ENV).filter(|s| !s.is_empty()) {
            let n: usize =
                w.parse().map_err(|_| HarnessError::Config(format!("{WORKERS_ENV} must be a positive integer, got `{w}`")))?;
            self.workers = Some(n);
        }
        Ok(())
    }

    /// Shape checks that need no file access.
    pub fn check(&self) -> Result<(), HarnessError> {
        if self.runs == 0 {
            return Err(HarnessError::Config("runs must be at least 1".into()));
        }
        if self.algorithms.is_empty() {
            return Err(HarnessError::Config("no algorithms configured".into()));
        }
        if self.problem.instances.is_empty() {
            return Err(HarnessError::Config("no instances configured".into()));
        }
        if self.workers == Some(0) {
            return Err(HarnessError::Config("workers must be at least 1".into()));
        }
        if self.budget == Some(0) {
            return Err(HarnessError::Config("budget must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum AlgorithmKind {
    Bntga,
    Ntga2,
    ThetaDea,
    Unsga3,
    Moead,
    Spea2,
    Nsga2,
}

impl AlgorithmKind {
    pub const ALL: [AlgorithmKind; 7] = [
        AlgorithmKind::Bntga,
        AlgorithmKind::Ntga2,
        AlgorithmKind::ThetaDea,
        AlgorithmKind::Unsga3,
        AlgorithmKind::Moead,
        AlgorithmKind::Spea2,
        AlgorithmKind::Nsga2,
    ];

    /// Directory-safe identifier.
    pub fn id(self) -> &'static str {
        match self {
            AlgorithmKind::Bntga => "bntga",
            AlgorithmKind::Ntga2 => "ntga2",
            AlgorithmKind::ThetaDea => "thetadea",
            AlgorithmKind::Unsga3 => "unsga3",
            AlgorithmKind::Moead => "moead",
            AlgorithmKind::Spea2 => "spea2",
            AlgorithmKind::Nsga2 => "nsga2",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            AlgorithmKind::Bntga => "B-NTGA",
            AlgorithmKind::Ntga2 => "NTGA2",
            AlgorithmKind::ThetaDea => "theta-DEA",
            AlgorithmKind::Unsga3 => "U-NSGA-III",
            AlgorithmKind::Moead => "MOEA/D",
            AlgorithmKind::Spea2 => "SPEA2",
            AlgorithmKind::Nsga2 => "NSGA-II",
        }
    }
}

impl FromStr for AlgorithmKind {
    type Err = HarnessError;

    /// Case-insensitive; punctuation is ignored, so `B-NTGA`, `bntga` and
    /// `theta_dea` all resolve.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key: String = s.chars().filter(|c| c.is_ascii_alphanumeric()).collect::<String>().to_ascii_lowercase();
        Ok(match key.as_str() {
            "bntga" => AlgorithmKind::Bntga,
            "ntga2" => AlgorithmKind::Ntga2,
            "thetadea" => AlgorithmKind::ThetaDea,
            "unsga3" | "unsgaiii" => AlgorithmKind::Unsga3,
            "moead" => AlgorithmKind::Moead,
            "spea2" => AlgorithmKind::Spea2,
            "nsga2" | "nsgaii" => AlgorithmKind::Nsga2,
            _ => return Err(HarnessError::UnknownAlgorithm(s.to_string())),
        })
    }
}

impl fmt::Display for AlgorithmKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// A fully resolved algorithm configuration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AlgorithmConfig {
    Bntga(BntgaConfig),
    Ntga2(Ntga2Config),
    ThetaDea(ThetaDeaConfig),
    Unsga3(Unsga3Config),
    Moead(MoeadConfig),
    Spea2(Spea2Config),
    Nsga2(Nsga2Config),
}

/// Evaluation budget the tuned settings were made for.
pub fn default_budget(kind: ProblemKind, mode: ObjectiveMode) -> u64 {
    match (kind, mode) {
        (ProblemKind::Msrcpsp, ObjectiveMode::Two) => 50_000,
        _ => 250_000,
    }
}

fn pair(a: f64, b: f64) -> Rate {
    Rate::Pair(a, b)
}

/// Tuned setting of `algorithm` for the given problem. U-NSGA-III has no
/// tuned TTP setting and gets its MS-RCPSP one.
pub fn preset(algorithm: AlgorithmKind, kind: ProblemKind, mode: ObjectiveMode) -> AlgorithmConfig {
    use AlgorithmKind as A;
    let budget = default_budget(kind, mode);
    let five = kind == ProblemKind::Msrcpsp && mode == ObjectiveMode::Five;
    let ttp = kind == ProblemKind::Ttp;
    match algorithm {
        A::Bntga => {
            let base = if ttp { BntgaConfig::ttp() } else { BntgaConfig::msrcpsp() };
            AlgorithmConfig::Bntga(BntgaConfig { budget, ..base })
        }
        A::Ntga2 => {
            let mut c = Ntga2Config { budget, ..Default::default() };
            if ttp {
                c.p_m = pair(0.9, 0.9);
                c.p_x = pair(0.3, 0.3);
            }
            AlgorithmConfig::Ntga2(c)
        }
        A::ThetaDea => {
            let mut c = ThetaDeaConfig { budget, ..Default::default() };
            if five {
                c.pop_size = 500;
            }
            if ttp {
                c.p_m = pair(0.9, 0.9);
                c.p_x = pair(0.3, 0.3);
                c.theta = 0.1;
                c.tour_size = 1;
            }
            AlgorithmConfig::ThetaDea(c)
        }
        A::Unsga3 => {
            let mut c = Unsga3Config { budget, ..Default::default() };
            if five {
                c.pop_size = 200;
            }
            AlgorithmConfig::Unsga3(c)
        }
        A::Moead => {
            let mut c = MoeadConfig { budget, ..Default::default() };
            if five {
                c.partitions = 7;
                c.neighbourhood = 2;
                c.p_m = Rate::Single(0.02);
                c.p_x = Rate::Single(0.4);
            }
            if ttp {
                c.partitions = 100;
                c.neighbourhood = 3;
                c.p_m = pair(0.4, 0.3);
                c.p_x = pair(0.5, 1.0);
            }
            AlgorithmConfig::Moead(c)
        }
        A::Spea2 => {
            let mut c = Spea2Config { budget, ..Default::default() };
            if five {
                c.pop_size = 400;
                c.p_x = Rate::Single(0.9);
            }
            if ttp {
                c.pop_size = 100;
                c.p_m = pair(0.4, 0.3);
                c.p_x = pair(0.1, 0.8);
            }
            AlgorithmConfig::Spea2(c)
        }
        A::Nsga2 => {
            let mut c = Nsga2Config { budget, ..Default::default() };
            if five {
                c.pop_size = 400;
                c.p_x = Rate::Single(0.9);
            }
            if ttp {
                c.p_m = pair(0.4, 0.7);
                c.p_x = pair(0.9, 0.3);
            }
            AlgorithmConfig::Nsga2(c)
        }
    }
}

/// Overlays `overrides` on `base`, descending into nested tables.
fn merge(base: &mut toml::Table, overrides: &toml::Table) {
    for (k, v) in overrides {
        match (base.get_mut(k), v) {
            (Some(toml::Value::Table(b)), toml::Value::Table(o)) => merge(b, o),
            _ => {
                base.insert(k.clone(), v.clone());
            }
        }
    }
}

fn overlay<T: Serialize + serde::de::DeserializeOwned>(
    base: &T,
    overrides: &toml::Table,
    name: &str,
) -> Result<T, HarnessError> {
    let mut table = toml::Table::try_from(base).map_err(|e| HarnessError::Config(e.to_string()))?;
    merge(&mut table, overrides);
    toml::Value::Table(table)
        .try_into()
        .map_err(|e: toml::de::Error| HarnessError::Config(format!("algorithm `{name}`: {}", e.message())))
}

impl AlgorithmConfig {
    /// Preset for the problem with the spec's overrides applied. A
    /// config-level budget replaces the preset budget unless the block sets
    /// its own.
    pub fn resolve(
        spec: &AlgorithmSpec,
        kind: ProblemKind,
        mode: ObjectiveMode,
        budget: Option<u64>,
    ) -> Result<(AlgorithmKind, Self), HarnessError> {
        let algorithm: AlgorithmKind = spec.name.parse()?;
        if spec.overrides.contains_key("seed") {
            return Err(HarnessError::Config(format!(
                "algorithm `{}`: seeds come from base_seed and cannot be set per algorithm",
                spec.name
            )));
        }
        let mut resolved = preset(algorithm, kind, mode);
        if let Some(b) = budget {
            resolved.set_budget(b);
        }
        let name = spec.name.as_str();
        let o = &spec.overrides;
        let resolved = match resolved {
            AlgorithmConfig::Bntga(c) => AlgorithmConfig::Bntga(overlay(&c, o, name)?),
            AlgorithmConfig::Ntga2(c) => AlgorithmConfig::Ntga2(overlay(&c, o, name)?),
            AlgorithmConfig::ThetaDea(c) => AlgorithmConfig::ThetaDea(overlay(&c, o, name)?),
            AlgorithmConfig::Unsga3(c) => AlgorithmConfig::Unsga3(overlay(&c, o, name)?),
            AlgorithmConfig::Moead(c) => AlgorithmConfig::Moead(overlay(&c, o, name)?),
            AlgorithmConfig::Spea2(c) => AlgorithmConfig::Spea2(overlay(&c, o, name)?),
            AlgorithmConfig::Nsga2(c) => AlgorithmConfig::Nsga2(overlay(&c, o, name)?),
        };
        Ok((algorithm, resolved))
    }

    pub fn budget(&self) -> u64 {
        match self {
            AlgorithmConfig::Bntga(c) => c.budget,
            AlgorithmConfig::Ntga2(c) => c.budget,
            AlgorithmConfig::ThetaDea(c) => c.budget,
            AlgorithmConfig::Unsga3(c) => c.budget,
            AlgorithmConfig::Moead(c) => c.budget,
            AlgorithmConfig::Spea2(c) => c.budget,
            AlgorithmConfig::Nsga2(c) => c.budget,
        }
    }

    pub fn set_budget(&mut self, budget: u64) {
        match self {
            AlgorithmConfig::Bntga(c) => c.budget = budget,
            AlgorithmConfig::Ntga2(c) => c.budget = budget,
            AlgorithmConfig::ThetaDea(c) => c.budget = budget,
            AlgorithmConfig::Unsga3(c) => c.budget = budget,
            AlgorithmConfig::Moead(c) => c.budget = budget,
            AlgorithmConfig::Spea2(c) => c.budget = budget,
            AlgorithmConfig::Nsga2(c) => c.budget = budget,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        match &mut self {
            AlgorithmConfig::Bntga(c) => c.seed = seed,
            AlgorithmConfig::Ntga2(c) => c.seed = seed,
            AlgorithmConfig::ThetaDea(c) => c.seed = seed,
            AlgorithmConfig::Unsga3(c) => c.seed = seed,
            AlgorithmConfig::Moead(c) => c.seed = seed,
            AlgorithmConfig::Spea2(c) => c.seed = seed,
            AlgorithmConfig::Nsga2(c) => c.seed = seed,
        }
        self
    }

    /// Settings as a JSON object, for result records.
    pub fn to_json(&self) -> serde_json::Value {
        let v = match self {
            AlgorithmConfig::Bntga(c) => serde_json::to_value(c),
            AlgorithmConfig::Ntga2(c) => serde_json::to_value(c),
            AlgorithmConfig::ThetaDea(c) => serde_json::to_value(c),
            AlgorithmConfig::Unsga3(c) => serde_json::to_value(c),
            AlgorithmConfig::Moead(c) => serde_json::to_value(c),
            AlgorithmConfig::Spea2(c) => serde_json::to_value(c),
            AlgorithmConfig::Nsga2(c) => serde_json::to_value(c),
        };
        v.expect("configs serialize to JSON")
    }

    pub fn run<P: Problem>(&self, problem: &P) -> Result<RunResult<P::Genotype>, RunError> {
        let obs = &mut NoObserver;
        match self {
            AlgorithmConfig::Bntga(c) => run_bntga(problem, c),
            AlgorithmConfig::Ntga2(c) => ntga2_run(problem, c, obs),
            AlgorithmConfig::ThetaDea(c) => thetadea_run(problem, c, obs),
            AlgorithmConfig::Unsga3(c) => unsga3_run(problem, c, obs),
            AlgorithmConfig::Moead(c) => moead_run(problem, c, obs),
            AlgorithmConfig::Spea2(c) => spea2_run(problem, c, obs),
            AlgorithmConfig::Nsga2(c) => nsga2_run(problem, c, obs),
        }
    }
}
