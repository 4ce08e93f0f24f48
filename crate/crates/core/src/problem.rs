//! The contract every problem backend offers to the algorithms.

use std::fmt::Debug;
use std::hash::Hash;

use rand::Rng;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pareto::{Individual, ObjectiveVector};

/// A probability that may be given once or as a `(first, second)` pair.
///
/// Problems with a two-part encoding (TTP: route and picking plan) read the
/// two halves separately; single-part problems use [`Rate::first`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Rate {
    Single(f64),
    Pair(f64, f64),
}

impl Rate {
    pub fn first(self) -> f64 {
        match self {
            Rate::Single(p) | Rate::Pair(p, _) => p,
        }
    }

    pub fn second(self) -> f64 {
        match self {
            Rate::Single(p) | Rate::Pair(_, p) => p,
        }
    }

    pub fn is_valid(self) -> bool {
        let ok = |p: f64| (0.0..=1.0).contains(&p);
        ok(self.first()) && ok(self.second())
    }
}

impl From<f64> for Rate {
    fn from(p: f64) -> Self {
        Rate::Single(p)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReferencePoints {
    pub perfect: Vec<f64>,
    pub nadir: Vec<f64>,
}

/// Counters the variation operators bump while they run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OperatorStats {
    /// Genotypes that had to be repaired back into feasibility.
    pub repairs: u64,
}

pub trait Problem: Sync {
    type Genotype: Clone + Debug + PartialEq + Eq + Hash + Send + Sync + Serialize + DeserializeOwned;

    fn objective_count(&self) -> usize;

    fn random_genotype<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Genotype;

    fn evaluate(&self, genotype: &Self::Genotype) -> ObjectiveVector;

    /// Produces two children. Implementations decide internally, with
    /// probability `rate`, whether recombination happens or parents are copied.
    fn crossover<R: Rng + ?Sized>(
        &self,
        a: &Self::Genotype,
        b: &Self::Genotype,
        rate: Rate,
        rng: &mut R,
        stats: &mut OperatorStats,
    ) -> (Self::Genotype, Self::Genotype);

    fn mutate<R: Rng + ?Sized>(
        &self,
        genotype: &mut Self::Genotype,
        rate: Rate,
        rng: &mut R,
        stats: &mut OperatorStats,
    );

    fn reference_points(&self) -> ReferencePoints;
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("evaluation budget of {limit} exhausted")]
pub struct BudgetExhausted {
    pub limit: u64,
}

/// Wraps a problem and keeps an exact ledger of fitness evaluations.
pub struct Evaluator<'p, P: Problem> {
    problem: &'p P,
    used: u64,
    limit: u64,
}

impl<'p, P: Problem> Evaluator<'p, P> {
    pub fn new(problem: &'p P, limit: u64) -> Self {
        Self { problem, used: 0, limit }
    }

    pub fn problem(&self) -> &'p P {
        self.problem
    }

    pub fn used(&self) -> u64 {
        self.used
    }

    pub fn remaining(&self) -> u64 {
        self.limit - self.used
    }

    pub fn evaluate(&mut self, genotype: P::Genotype) -> Result<Individual<P::Genotype>, BudgetExhausted> {
        if self.used >= self.limit {
            return Err(BudgetExhausted { limit: self.limit });
        }
        self.used += 1;
        let objectives = self.problem.evaluate(&genotype);
        Ok(Individual::new(genotype, objectives))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rate_parsing() {
        let single: Rate = serde_json::from_str("0.3").unwrap();
        assert_eq!(single, Rate::Single(0.3));
        assert_eq!(single.second(), 0.3);
        let pair: Rate = serde_json::from_str("[0.4, 0.7]").unwrap();
        assert_eq!((pair.first(), pair.second()), (0.4, 0.7));
        assert!(!Rate::Pair(0.5, 1.5).is_valid());
    }
}
