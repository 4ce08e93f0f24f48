//! The balanced non-dominated tournament GA.
//!
//! Parents come exclusively from the archive through the balanced gap
//! tournament; the population only carries the latest children. One gap view
//! is computed per generation, selection counters are bumped as parents are
//! drawn, and the archive is updated once the whole generation is evaluated.

use rand::SeedableRng;
use serde::{Deserialize, Serialize};

use crate::pareto::Archive;
use crate::problem::{Evaluator, OperatorStats, Problem, Rate};
use crate::run::{config_error, generations_for_budget, GenerationSnapshot, NoObserver, Observer, RunError, RunResult};
use crate::selection::{gap_tour_selection, gap_view_for_dimension, BalanceParams, DimensionMode};
use crate::RunRng;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BntgaConfig {
    pub pop_size: usize,
    /// Maximum number of fitness evaluations.
    pub budget: u64,
    pub p_x: Rate,
    pub p_m: Rate,
    pub tour_size: usize,
    pub balance: BalanceParams,
    pub dimension_mode: DimensionMode,
    pub seed: u64,
}

impl Default for BntgaConfig {
    fn default() -> Self {
        Self::msrcpsp()
    }
}

impl BntgaConfig {
    /// Tuned MS-RCPSP setting (both objective counts).
    pub fn msrcpsp() -> Self {
        Self {
            pop_size: 50,
            budget: 50_000,
            p_x: Rate::Single(0.9),
            p_m: Rate::Single(0.01),
            tour_size: 40,
            balance: BalanceParams::default(),
            dimension_mode: DimensionMode::Random,
            seed: 0,
        }
    }

    /// Tuned TTP setting; rates are (route, picking plan).
    pub fn ttp() -> Self {
        Self { p_x: Rate::Pair(0.5, 0.5), p_m: Rate::Pair(0.7, 0.7), budget: 250_000, ..Self::msrcpsp() }
    }

    pub fn validate(&self) -> Result<(), RunError> {
        if self.pop_size == 0 || self.pop_size % 2 != 0 {
            return Err(config_error(format!("pop_size must be positive and even, got {}", self.pop_size)));
        }
        if self.budget < self.pop_size as u64 {
            return Err(config_error(format!("budget {} is below pop_size {}", self.budget, self.pop_size)));
        }
        if !self.p_x.is_valid() || !self.p_m.is_valid() {
            return Err(config_error("probabilities must lie in [0, 1]"));
        }
        if self.tour_size == 0 {
            return Err(config_error("tour_size must be at least 1"));
        }
        self.balance.validate()?;
        Ok(())
    }
}

pub fn run_bntga<P: Problem>(problem: &P, config: &BntgaConfig) -> Result<RunResult<P::Genotype>, RunError> {
    run_bntga_observed(problem, config, &mut NoObserver)
}

/// Same as [`run_bntga`], reporting every generation to `observer`.
///
/// Random draws happen in this order: initial genotypes, then per generation
/// the sorting dimension followed by, per pair, the tournament, crossover and
/// the two mutations.
pub fn run_bntga_observed<P: Problem, O: Observer<P::Genotype>>(
    problem: &P,
    config: &BntgaConfig,
    observer: &mut O,
) -> Result<RunResult<P::Genotype>, RunError> {
    config.validate()?;
    let mut rng = RunRng::seed_from_u64(config.seed);
    let pop = config.pop_size;
    let (generations, discarded) = generations_for_budget(config.budget, pop as u64);
    if discarded > 0 {
        log::info!("B-NTGA: {discarded} evaluations do not fill a generation and are left unused");
    }

    let mut evaluator = Evaluator::new(problem, config.budget);
    let mut stats = OperatorStats::default();
    let mut archive = Archive::new(problem.objective_count());
    let mut degenerate = 0;

    let mut population = Vec::with_capacity(pop);
    for _ in 0..pop {
        let g = problem.random_genotype(&mut rng);
        population.push(evaluator.evaluate(g)?);
    }
    archive.update(population.iter().cloned())?;
    observer.on_generation(&GenerationSnapshot {
        generation: 0,
        population: &population,
        archive: &archive,
        evaluations: evaluator.used(),
    });

    for generation in 0..generations {
        let dimension = config.dimension_mode.pick(archive.objective_count(), generation, &mut rng);
        let view = gap_view_for_dimension(&archive, &config.balance, dimension)?;
        let mut children = Vec::with_capacity(pop);
        for _ in 0..pop / 2 {
            let pair = gap_tour_selection(&view, config.tour_size, &mut rng)?;
            if pair.degenerate {
                degenerate += 1;
            }
            archive.increment_selection(&[pair.first, pair.second]);
            let a = &archive.get(pair.first).expect("archive is frozen during selection").individual().genotype;
            let b = &archive.get(pair.second).expect("archive is frozen during selection").individual().genotype;
            let (mut x, mut y) = problem.crossover(a, b, config.p_x, &mut rng, &mut stats);
            problem.mutate(&mut x, config.p_m, &mut rng, &mut stats);
            problem.mutate(&mut y, config.p_m, &mut rng, &mut stats);
            children.push(evaluator.evaluate(x)?);
            children.push(evaluator.evaluate(y)?);
        }
        population = children;
        archive.update(population.iter().cloned())?;
        observer.on_generation(&GenerationSnapshot {
            generation: generation + 1,
            population: &population,
            archive: &archive,
            evaluations: evaluator.used(),
        });
    }

    let mut result = RunResult {
        front: archive.to_front(),
        evaluations: evaluator.used(),
        generations,
        diagnostics: Default::default(),
    };
    result.diagnostics.stale_selections = archive.stale_references();
    result.diagnostics.degenerate_selections = degenerate;
    result.diagnostics.discarded_budget = discarded;
    result.diagnostics.repairs = stats.repairs;
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::msrcpsp::{Assignment, MsrcpspInstance, MsrcpspProblem, ObjectiveMode, Resource, Skill, Task};
    use crate::pareto::non_dominated_indices;

    fn tiny() -> MsrcpspProblem {
        let tasks = vec![
            Task { id: 1, duration: 3, skill: Skill { kind: 0, level: 1 }, predecessors: vec![] },
            Task { id: 2, duration: 2, skill: Skill { kind: 0, level: 1 }, predecessors: vec![1] },
            Task { id: 3, duration: 4, skill: Skill { kind: 1, level: 1 }, predecessors: vec![] },
            Task { id: 4, duration: 1, skill: Skill { kind: 1, level: 2 }, predecessors: vec![3] },
            Task { id: 5, duration: 2, skill: Skill { kind: 0, level: 2 }, predecessors: vec![2, 4] },
        ];
        let resources = vec![
            Resource { id: 1, salary: 10.0, skills: vec![Skill { kind: 0, level: 2 }, Skill { kind: 1, level: 2 }] },
            Resource { id: 2, salary: 4.0, skills: vec![Skill { kind: 0, level: 1 }, Skill { kind: 1, level: 1 }] },
        ];
        let inst = MsrcpspInstance::new("tiny", tasks, resources, None).unwrap();
        MsrcpspProblem::new(inst, ObjectiveMode::Two)
    }

    fn cfg(budget: u64, seed: u64) -> BntgaConfig {
        BntgaConfig { pop_size: 10, budget, tour_size: 4, seed, ..BntgaConfig::msrcpsp() }
    }

    #[test]
    fn rejects_bad_configs() {
        let p = tiny();
        assert!(run_bntga(&p, &BntgaConfig { pop_size: 7, ..cfg(100, 0) }).is_err());
        assert!(run_bntga(&p, &cfg(5, 0)).is_err());
        assert!(run_bntga(&p, &BntgaConfig { tour_size: 0, ..cfg(100, 0) }).is_err());
        assert!(run_bntga(&p, &BntgaConfig { p_x: Rate::Single(1.5), ..cfg(100, 0) }).is_err());
    }

    #[test]
    fn zero_generations_returns_filtered_initial_population() {
        let p = tiny();
        let mut initial = Vec::new();
        let r = run_bntga_observed(&p, &cfg(10, 3), &mut |s: &GenerationSnapshot<'_, Assignment>| {
            initial = s.population.to_vec();
        })
        .unwrap();
        assert_eq!(r.generations, 0);
        assert_eq!(r.evaluations, 10);
        let pts: Vec<Vec<f64>> = initial.iter().map(|i| i.objectives.values().to_vec()).collect();
        let mut expected: Vec<Vec<f64>> = non_dominated_indices(&pts).into_iter().map(|i| pts[i].clone()).collect();
        let mut got: Vec<Vec<f64>> = r.front.iter().map(|i| i.objectives.values().to_vec()).collect();
        expected.sort_by(|a, b| a.partial_cmp(b).unwrap());
        got.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(got, expected);
    }

    #[test]
    fn deterministic_under_seed() {
        let p = tiny();
        let a = serde_json::to_string(&run_bntga(&p, &cfg(500, 11)).unwrap()).unwrap();
        let b = serde_json::to_string(&run_bntga(&p, &cfg(500, 11)).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn budget_and_selection_accounting() {
        let p = tiny();
        let mut ns = Vec::new();
        let r = run_bntga_observed(&p, &cfg(505, 1), &mut |s: &GenerationSnapshot<'_, Assignment>| {
            ns.push(s.archive.total_selections());
        })
        .unwrap();
        assert_eq!(r.generations, 49);
        assert_eq!(r.evaluations, 500);
        assert_eq!(r.diagnostics.discarded_budget, 5);
        // two references per pair, pop/2 pairs per generation
        for (g, &total) in ns.iter().enumerate() {
            assert_eq!(total, 10 * g as u64);
        }
        assert_eq!(r.diagnostics.stale_selections, 0);
    }
}
