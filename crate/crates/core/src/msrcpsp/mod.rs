//! Multi-Skill Resource-Constrained Project Scheduling.
//!
//! A genotype assigns one resource to every task. The schedule builder turns
//! the assignment into a timetable by starting each task as early as its
//! predecessors and its resource allow. Up to five objectives are minimized:
//! makespan, cost, average cash flow deviation, skill overuse and average
//! deviation of resource use.

mod instance;
mod objectives;
mod operators;
mod parse;
mod schedule;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pareto::ObjectiveVector;
use crate::problem::{OperatorStats, Problem, Rate, ReferencePoints};

pub use instance::{MsrcpspInstance, Resource, Skill, Task};
pub use objectives::{evaluate_schedule, reference_points};
pub use operators::{gene_mutation, random_assignment, repair_assignment, uniform_crossover};
pub use parse::{parse_instance, serialize_instance};
pub use schedule::{build_schedule, check_schedule, critical_path_fraction, Schedule, Violation};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MsrcpspError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("instance has no tasks")]
    NoTasks,
    #[error("instance has no resources")]
    NoResources,
    #[error("resource {resource}: {message}")]
    BadResource { resource: u32, message: String },
    #[error("task {task}: {message}")]
    BadTask { task: u32, message: String },
    #[error("task {task} has no capable resource")]
    NoCapableResource { task: u32 },
    #[error("precedence cycle through tasks {0:?}")]
    Cycle(Vec<u32>),
    #[error("genotype has {found} genes, instance has {expected} tasks")]
    GenotypeLength { expected: usize, found: usize },
    #[error("gene {task} points at resource index {resource}, which cannot perform the task")]
    InvalidGene { task: usize, resource: usize },
}

/// Which objectives are reported.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ObjectiveMode {
    /// Makespan and cost.
    #[serde(rename = "2obj")]
    Two,
    /// Makespan, cost, cash flow, skill overuse, resource use.
    #[serde(rename = "5obj")]
    Five,
}

impl ObjectiveMode {
    pub fn count(self) -> usize {
        match self {
            ObjectiveMode::Two => 2,
            ObjectiveMode::Five => 5,
        }
    }
}

impl std::str::FromStr for ObjectiveMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "2obj" | "2" => Ok(ObjectiveMode::Two),
            "5obj" | "5" => Ok(ObjectiveMode::Five),
            other => Err(format!("unknown objective mode `{other}` (expected 2obj or 5obj)")),
        }
    }
}

impl std::fmt::Display for ObjectiveMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ObjectiveMode::Two => "2obj",
            ObjectiveMode::Five => "5obj",
        })
    }
}

/// Task → resource-index assignment.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Assignment(pub Vec<usize>);

/// MS-RCPSP wired up as an optimization [`Problem`].
#[derive(Clone, Debug)]
pub struct MsrcpspProblem {
    instance: MsrcpspInstance,
    mode: ObjectiveMode,
    reference: ReferencePoints,
}

impl MsrcpspProblem {
    pub fn new(instance: MsrcpspInstance, mode: ObjectiveMode) -> Self {
        let reference = reference_points(&instance, mode);
        Self { instance, mode, reference }
    }

    pub fn instance(&self) -> &MsrcpspInstance {
        &self.instance
    }

    pub fn mode(&self) -> ObjectiveMode {
        self.mode
    }
}

impl Problem for MsrcpspProblem {
    type Genotype = Assignment;

    fn objective_count(&self) -> usize {
        self.mode.count()
    }

    fn random_genotype<R: Rng + ?Sized>(&self, rng: &mut R) -> Assignment {
        random_assignment(&self.instance, rng)
    }

    fn evaluate(&self, genotype: &Assignment) -> ObjectiveVector {
        let schedule = build_schedule(&self.instance, &genotype.0)
            .expect("operators only produce capable assignments");
        evaluate_schedule(&self.instance, &schedule, self.mode)
    }

    fn crossover<R: Rng + ?Sized>(
        &self,
        a: &Assignment,
        b: &Assignment,
        rate: Rate,
        rng: &mut R,
        _stats: &mut OperatorStats,
    ) -> (Assignment, Assignment) {
        let (x, y) = uniform_crossover(&a.0, &b.0, rate.first(), rng);
        (Assignment(x), Assignment(y))
    }

    fn mutate<R: Rng + ?Sized>(
        &self,
        genotype: &mut Assignment,
        rate: Rate,
        rng: &mut R,
        _stats: &mut OperatorStats,
    ) {
        gene_mutation(&self.instance, &mut genotype.0, rate.first(), rng);
    }

    fn reference_points(&self) -> ReferencePoints {
        self.reference.clone()
    }
}
