//! Bi-objective Travelling Thief Problem.
//!
//! A thief visits every city once, starting and ending at the first one, and
//! may pick items along the way. Carried weight slows the thief down
//! linearly from `v_max` (empty) to `v_min` (full knapsack). Objectives are
//! total travel time (minimized) and collected profit (maximized; stored
//! negated so that every objective is minimized).

mod eval;
mod instance;
mod operators;
mod parse;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pareto::ObjectiveVector;
use crate::problem::{OperatorStats, Problem, Rate, ReferencePoints};

pub use eval::{evaluate_ttp, greedy_profit, minimum_spanning_tree_length, ttp_reference_points};
pub use instance::{DistanceKind, Item, TtpInstance};
pub use operators::{
    order_crossover, random_ttp_genotype, repair_picking, reverse_segment, single_point_crossover, ttp_crossover,
    ttp_mutation,
};
pub use parse::{parse_ttp, serialize_ttp};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TtpError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("missing {0}")]
    Missing(&'static str),
    #[error("invalid instance: {0}")]
    Invalid(String),
    #[error("picking plan weighs {weight}, capacity is {capacity}")]
    Overweight { weight: f64, capacity: f64 },
    #[error("tour is not a permutation starting at the first city")]
    BadTour,
    #[error("picking plan has {found} entries, instance has {expected} items")]
    BadPicking { expected: usize, found: usize },
}

/// Route plus picking plan.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TtpGenotype {
    /// City indices (0-based); `tour[0] == 0`.
    pub tour: Vec<usize>,
    /// `picks[j]` is true when item `j` is collected.
    #[serde(with = "bitstring")]
    pub picks: Vec<bool>,
}

mod bitstring {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(bits: &[bool], s: S) -> Result<S::Ok, S::Error> {
        let text: String = bits.iter().map(|&b| if b { '1' } else { '0' }).collect();
        s.serialize_str(&text)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<bool>, D::Error> {
        let text = String::deserialize(d)?;
        text.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(serde::de::Error::custom(format!("unexpected `{other}` in bit string"))),
            })
            .collect()
    }
}

/// TTP wired up as an optimization [`Problem`]. Rates are read as
/// `(route, picking plan)` pairs.
#[derive(Clone, Debug)]
pub struct TtpProblem {
    instance: TtpInstance,
    reference: ReferencePoints,
}

impl TtpProblem {
    pub fn new(instance: TtpInstance) -> Self {
        let reference = ttp_reference_points(&instance);
        Self { instance, reference }
    }

    pub fn instance(&self) -> &TtpInstance {
        &self.instance
    }
}

impl Problem for TtpProblem {
    type Genotype = TtpGenotype;

    fn objective_count(&self) -> usize {
        2
    }

    fn random_genotype<R: Rng + ?Sized>(&self, rng: &mut R) -> TtpGenotype {
        random_ttp_genotype(&self.instance, rng)
    }

    fn evaluate(&self, genotype: &TtpGenotype) -> ObjectiveVector {
        evaluate_ttp(&self.instance, genotype).expect("operators keep genotypes feasible")
    }

    fn crossover<R: Rng + ?Sized>(
        &self,
        a: &TtpGenotype,
        b: &TtpGenotype,
        rate: Rate,
        rng: &mut R,
        stats: &mut OperatorStats,
    ) -> (TtpGenotype, TtpGenotype) {
        let (x, y, repaired) = ttp_crossover(&self.instance, a, b, rate.first(), rate.second(), rng);
        stats.repairs += repaired as u64;
        (x, y)
    }

    fn mutate<R: Rng + ?Sized>(
        &self,
        genotype: &mut TtpGenotype,
        rate: Rate,
        rng: &mut R,
        stats: &mut OperatorStats,
    ) {
        if ttp_mutation(&self.instance, genotype, rate.first(), rate.second(), rng) {
            stats.repairs += 1;
        }
    }

    fn reference_points(&self) -> ReferencePoints {
        self.reference.clone()
    }
}
