//! Multi- and many-objective evolutionary optimization for constrained
//! combinatorial problems.
//!
//! The centrepiece is a genetic algorithm that selects parents exclusively
//! from its non-dominated archive with a *balanced gap tournament*: archive
//! members sitting next to wide gaps of the front are preferred, but each
//! member's preference is damped by how often it has already been selected.
//! Six reference algorithms, two benchmark problem backends (multi-skill
//! project scheduling and the travelling thief problem), quality indicators
//! and an experiment harness complete the toolkit.

pub mod baselines;
pub mod bntga;
pub mod harness;
pub mod metrics;
pub mod msrcpsp;
pub mod pareto;
pub mod problem;
pub mod run;
pub mod selection;
pub mod ttp;

pub use pareto::{Archive, ArchiveEntry, EntryId, Individual, ObjectiveVector};
pub use problem::{Evaluator, OperatorStats, Problem, Rate, ReferencePoints};
pub use run::{RunDiagnostics, RunError, RunResult};

/// Seeded generator used by every run. ChaCha keeps streams identical across
/// platforms and `rand` releases.
pub type RunRng = rand_chacha::ChaCha8Rng;
