use std::collections::HashSet;

use rand::SeedableRng;
use serde::{Deserialize, Serialize};

use super::{random_population, validate_common};
use crate::pareto::{Archive, Individual};
use crate::problem::{Evaluator, OperatorStats, Problem, Rate};
use crate::run::{config_error, generations_for_budget, GenerationSnapshot, Observer, RunError, RunResult};
use crate::selection::{legacy_gap_values, pareto_tournament, score_tournament};
use crate::RunRng;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Ntga2Config {
    pub pop_size: usize,
    pub budget: u64,
    pub p_x: Rate,
    pub p_m: Rate,
    /// Pareto tournament size.
    pub tour_size: usize,
    /// Gap tournament size.
    pub gs_tour_size: usize,
    /// Generations spent in each selection mode before switching.
    pub gs_generations: u64,
    /// Extra mutations tried before a clone is accepted anyway.
    pub clone_retry_limit: u32,
    pub seed: u64,
}

impl Default for Ntga2Config {
    fn default() -> Self {
        Self {
            pop_size: 50,
            budget: 50_000,
            p_x: Rate::Single(0.6),
            p_m: Rate::Single(0.01),
            tour_size: 6,
            gs_tour_size: 20,
            gs_generations: 50,
            clone_retry_limit: 100,
            seed: 0,
        }
    }
}

impl Ntga2Config {
    /// True when generation `i` selects with the gap tournament.
    pub fn uses_gap_selection(&self, generation: u64) -> bool {
        generation % (2 * self.gs_generations) >= self.gs_generations
    }
}

pub fn ntga2_run<P: Problem, O: Observer<P::Genotype>>(
    problem: &P,
    config: &Ntga2Config,
    observer: &mut O,
) -> Result<RunResult<P::Genotype>, RunError> {
    validate_common(config.pop_size, config.budget, config.p_x, config.p_m)?;
    if config.tour_size == 0 || config.gs_tour_size == 0 {
        return Err(config_error("tournament sizes must be at least 1"));
    }
    if config.gs_generations == 0 {
        return Err(config_error("gs_generations must be at least 1"));
    }
    let mut rng = RunRng::seed_from_u64(config.seed);
    let n = config.pop_size;
    let (generations, discarded) = generations_for_budget(config.budget, n as u64);
    let mut evaluator = Evaluator::new(problem, config.budget);
    let mut stats = OperatorStats::default();
    let mut archive = Archive::new(problem.objective_count());
    let mut clone_mutations = 0;
    let mut clone_retry_exhausted = 0;

    let mut population = random_population(&mut evaluator, n, &mut rng)?;
    archive.update(population.iter().cloned())?;
    observer.on_generation(&GenerationSnapshot {
        generation: 0,
        population: &population,
        archive: &archive,
        evaluations: evaluator.used(),
    });

    for generation in 0..generations {
        let gap_mode = config.uses_gap_selection(generation);
        // gap selection works on population ∪ archive, computed once per generation
        let pool: Vec<Individual<P::Genotype>> = if gap_mode {
            population.iter().cloned().chain(archive.individuals().cloned()).collect()
        } else {
            Vec::new()
        };
        let gaps = gap_mode.then(|| {
            let rows: Vec<&[f64]> = pool.iter().map(|i| i.objectives.values()).collect();
            legacy_gap_values(&rows)
        });

        let mut next: Vec<Individual<P::Genotype>> = Vec::with_capacity(n);
        let mut seen: HashSet<P::Genotype> = HashSet::with_capacity(n);
        while next.len() < n {
            let (a, b) = match &gaps {
                None => {
                    let a = pareto_tournament(&population, config.tour_size, &mut rng);
                    let b = pareto_tournament(&population, config.tour_size, &mut rng);
                    (&population[a].genotype, &population[b].genotype)
                }
                Some(g) => {
                    let a = score_tournament(&g.gap, config.gs_tour_size, &mut rng);
                    let b = g.interior_neighbour(a, &mut rng).unwrap_or_else(|| edge_neighbour(g, a));
                    (&pool[a].genotype, &pool[b].genotype)
                }
            };
            let (mut x, mut y) = problem.crossover(a, b, config.p_x, &mut rng, &mut stats);
            for child in [&mut x, &mut y] {
                problem.mutate(child, config.p_m, &mut rng, &mut stats);
                let mut tries = 0;
                while seen.contains(child) {
                    if tries == config.clone_retry_limit {
                        clone_retry_exhausted += 1;
                        break;
                    }
                    problem.mutate(child, config.p_m, &mut rng, &mut stats);
                    clone_mutations += 1;
                    tries += 1;
                }
                // the sibling is checked against this child too
                seen.insert(child.clone());
            }
            for child in [x, y] {
                let ind = evaluator.evaluate(child)?;
                archive.update(std::iter::once(ind.clone()))?;
                next.push(ind);
            }
        }
        population = next;
        observer.on_generation(&GenerationSnapshot {
            generation: generation + 1,
            population: &population,
            archive: &archive,
            evaluations: evaluator.used(),
        });
    }

    let mut result =
        RunResult { front: archive.to_front(), evaluations: evaluator.used(), generations, diagnostics: Default::default() };
    result.diagnostics.discarded_budget = discarded;
    result.diagnostics.repairs = stats.repairs;
    result.diagnostics.clone_mutations = clone_mutations;
    result.diagnostics.clone_retry_exhausted = clone_retry_exhausted;
    Ok(result)
}

/// The only neighbour of an edge point in its best-gap ordering (itself when
/// the pool has a single point).
fn edge_neighbour(g: &crate::selection::LegacyGaps, i: usize) -> usize {
    let d = g.best_dimension[i];
    let order = &g.orders[d];
    match (order.len(), g.ranks[d][i]) {
        (1, _) => i,
        (_, 0) => order[1],
        (len, _) => order[len - 2],
    }
}
