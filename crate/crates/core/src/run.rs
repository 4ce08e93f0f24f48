//! Types shared by every optimizer: run results, diagnostics and errors.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pareto::{Archive, Individual, ParetoError};
use crate::problem::BudgetExhausted;
use crate::selection::SelectionError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RunError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Selection(#[from] SelectionError),
    #[error(transparent)]
    Pareto(#[from] ParetoError),
    #[error(transparent)]
    Budget(#[from] BudgetExhausted),
}

pub(crate) fn config_error(message: impl Into<String>) -> RunError {
    RunError::Config(message.into())
}

/// Counters collected while a run executes. None of them influence the
/// search; they exist for reporting and instrumented checks.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunDiagnostics {
    /// Selection references that hit an entry already gone from the archive.
    pub stale_selections: u64,
    /// Gap tournaments run on a single-entry archive (both parents identical).
    pub degenerate_selections: u64,
    /// Budget left over because it did not fill a whole generation.
    pub discarded_budget: u64,
    /// Extra mutations applied by clone elimination.
    pub clone_mutations: u64,
    /// Clone-elimination loops that hit their retry cap.
    pub clone_retry_exhausted: u64,
    /// Genotypes repaired by the variation operators.
    pub repairs: u64,
}

/// What every optimizer returns.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "G: Serialize", deserialize = "G: serde::de::DeserializeOwned"))]
pub struct RunResult<G> {
    /// Non-dominated set accumulated over every evaluated individual.
    pub front: Vec<Individual<G>>,
    pub evaluations: u64,
    pub generations: u64,
    pub diagnostics: RunDiagnostics,
}

/// Read-only view handed to observers once per completed generation
/// (generation 0 is the initial population).
pub struct GenerationSnapshot<'a, G> {
    pub generation: u64,
    pub population: &'a [Individual<G>],
    pub archive: &'a Archive<G>,
    pub evaluations: u64,
}

/// Receives a snapshot after every generation.
pub trait Observer<G> {
    fn on_generation(&mut self, snapshot: &GenerationSnapshot<'_, G>);
}

/// Observer that ignores everything.
pub struct NoObserver;

impl<G> Observer<G> for NoObserver {
    fn on_generation(&mut self, _: &GenerationSnapshot<'_, G>) {}
}

impl<G, F: FnMut(&GenerationSnapshot<'_, G>)> Observer<G> for F {
    fn on_generation(&mut self, snapshot: &GenerationSnapshot<'_, G>) {
        self(snapshot)
    }
}

/// Generations that fit into `budget` after the initial population, and the
/// evaluations left over.
pub fn generations_for_budget(budget: u64, pop_size: u64) -> (u64, u64) {
    let blocks = budget / pop_size;
    (blocks.saturating_sub(1), budget - blocks * pop_size)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generation_count_is_floor_based() {
        assert_eq!(generations_for_budget(50_000, 50), (999, 0));
        assert_eq!(generations_for_budget(50, 50), (0, 0));
        assert_eq!(generations_for_budget(130, 50), (1, 30));
    }
}
