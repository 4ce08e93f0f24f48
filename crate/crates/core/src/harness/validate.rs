//! Instance validation with a few derived statistics.

use std::fmt;
use std::path::Path;

use serde::Serialize;

use super::{HarnessError, LoadedProblem, ProblemKind};
use crate::msrcpsp::{critical_path_fraction, ObjectiveMode};
use crate::problem::ReferencePoints;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationReport {
    pub name: String,
    pub kind: ProblemKind,
    /// `(label, value)` pairs in display order.
    pub stats: Vec<(String, String)>,
    pub reference: ReferencePoints,
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} ({}): OK", self.name, self.kind)?;
        let width = self.stats.iter().map(|s| s.0.len()).max().unwrap_or(0);
        for (k, v) in &self.stats {
            writeln!(f, "  {k:<width$}  {v}")?;
        }
        writeln!(f, "  {:<width$}  {:?}", "perfect point", self.reference.perfect)?;
        write!(f, "  {:<width$}  {:?}", "nadir point", self.reference.nadir)
    }
}

fn summary(xs: impl Iterator<Item = usize>) -> String {
    let xs: Vec<usize> = xs.collect();
    let min = xs.iter().min().copied().unwrap_or(0);
    let max = xs.iter().max().copied().unwrap_or(0);
    let mean = xs.iter().sum::<usize>() as f64 / xs.len().max(1) as f64;
    format!("min {min}, mean {mean:.2}, max {max}")
}

/// Parses and validates an instance file (parsing already enforces every
/// structural constraint) and collects summary statistics. MS-RCPSP
/// reference points are given for the five-objective mode.
pub fn validate_instance(path: &Path, kind: ProblemKind) -> Result<ValidationReport, HarnessError> {
    let problem = LoadedProblem::load(path, kind, ObjectiveMode::Five)?;
    let reference = problem.reference_points();
    let mut stats = Vec::new();
    let mut put = |k: &str, v: String| stats.push((k.to_string(), v));
    let name = match &problem {
        LoadedProblem::Msrcpsp(p) => {
            let inst = p.instance();
            put("tasks", inst.task_count().to_string());
            put("resources", inst.resource_count().to_string());
            put("skill types", inst.skill_types().to_string());
            put("precedence relations", inst.precedence_relations().to_string());
            put("capable resources per task", summary((0..inst.task_count()).map(|t| inst.capable(t).len())));
            put("critical path fraction", format!("{:.4}", critical_path_fraction(inst)));
            inst.name().to_string()
        }
        LoadedProblem::Ttp(p) => {
            let inst = p.instance();
            let total: f64 = inst.items().iter().map(|i| i.weight).sum();
            put("cities", inst.city_count().to_string());
            put("items", inst.item_count().to_string());
            put("edge weight type", inst.distance_kind().keyword().to_string());
            put("capacity", inst.capacity().to_string());
            put("total item weight", total.to_string());
            put("speed range", format!("{} .. {}", inst.v_min(), inst.v_max()));
            put("items per city", summary((0..inst.city_count()).map(|c| inst.items_at(c).len())));
            inst.name().to_string()
        }
    };
    Ok(ValidationReport { name, kind, stats, reference })
}
