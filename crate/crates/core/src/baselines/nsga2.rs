use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use super::{breed, crowding_distance, fast_non_dominated_sort, objective_rows, random_population, validate_common};
use crate::pareto::{Archive, Individual};
use crate::problem::{Evaluator, OperatorStats, Problem, Rate};
use crate::run::{config_error, generations_for_budget, GenerationSnapshot, Observer, RunError, RunResult};
use crate::RunRng;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Nsga2Config {
    pub pop_size: usize,
    pub budget: u64,
    pub p_x: Rate,
    pub p_m: Rate,
    pub tour_size: usize,
    pub seed: u64,
}

impl Default for Nsga2Config {
    fn default() -> Self {
        Self { pop_size: 300, budget: 50_000, p_x: Rate::Single(0.99), p_m: Rate::Single(0.015), tour_size: 2, seed: 0 }
    }
}

/// Survivors of `merged`: whole fronts while they fit, the last one cut by
/// descending crowding distance. Returns indices plus (rank, crowding) of each.
pub(crate) fn rank_crowding_survival<T: AsRef<[f64]>>(points: &[T], keep: usize) -> Vec<(usize, usize, f64)> {
    let mut out = Vec::with_capacity(keep);
    for (rank, front) in fast_non_dominated_sort(points).into_iter().enumerate() {
        if out.len() >= keep {
            break;
        }
        let cd = crowding_distance(points, &front);
        let mut members: Vec<(usize, f64)> = front.into_iter().zip(cd).collect();
        if out.len() + members.len() > keep {
            // stable: equal crowding keeps index order
            members.sort_by(|a, b| b.1.total_cmp(&a.1));
            members.truncate(keep - out.len());
        }
        out.extend(members.into_iter().map(|(i, c)| (i, rank, c)));
    }
    out
}

fn crowded_tournament<R: Rng + ?Sized>(rank: &[usize], crowding: &[f64], tour: usize, rng: &mut R) -> usize {
    let mut best = rng.gen_range(0..rank.len());
    for _ in 1..tour {
        let c = rng.gen_range(0..rank.len());
        if rank[c] < rank[best] || (rank[c] == rank[best] && crowding[c] > crowding[best]) {
            best = c;
        }
    }
    best
}

pub fn nsga2_run<P: Problem, O: Observer<P::Genotype>>(
    problem: &P,
    config: &Nsga2Config,
    observer: &mut O,
) -> Result<RunResult<P::Genotype>, RunError> {
    validate_common(config.pop_size, config.budget, config.p_x, config.p_m)?;
    if config.tour_size == 0 {
        return Err(config_error("tour_size must be at least 1"));
    }
    let mut rng = RunRng::seed_from_u64(config.seed);
    let n = config.pop_size;
    let (generations, discarded) = generations_for_budget(config.budget, n as u64);
    let mut evaluator = Evaluator::new(problem, config.budget);
    let mut stats = OperatorStats::default();
    let mut archive = Archive::new(problem.objective_count());

    let mut population = random_population(&mut evaluator, n, &mut rng)?;
    archive.update(population.iter().cloned())?;
    let survivors = rank_crowding_survival(&objective_rows(&population), n);
    let mut rank = vec![0; n];
    let mut crowding = vec![0.0; n];
    for &(i, r, c) in &survivors {
        rank[i] = r;
        crowding[i] = c;
    }
    observer.on_generation(&GenerationSnapshot {
        generation: 0,
        population: &population,
        archive: &archive,
        evaluations: evaluator.used(),
    });

    for generation in 0..generations {
        let mut offspring: Vec<Individual<P::Genotype>> = Vec::with_capacity(n);
        while offspring.len() < n {
            let a = crowded_tournament(&rank, &crowding, config.tour_size, &mut rng);
            let b = crowded_tournament(&rank, &crowding, config.tour_size, &mut rng);
            let (x, y) =
                breed(problem, &population[a].genotype, &population[b].genotype, config.p_x, config.p_m, &mut rng, &mut stats);
            offspring.push(evaluator.evaluate(x)?);
            offspring.push(evaluator.evaluate(y)?);
        }
        archive.update(offspring.iter().cloned())?;

        let mut merged = population;
        merged.extend(offspring);
        let survivors = rank_crowding_survival(&objective_rows(&merged), n);
        let mut slots: Vec<Option<Individual<P::Genotype>>> = merged.into_iter().map(Some).collect();
        population = Vec::with_capacity(n);
        rank.clear();
        crowding.clear();
        for (i, r, c) in survivors {
            population.push(slots[i].take().expect("each survivor once"));
            rank.push(r);
            crowding.push(c);
        }
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
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn survival_cuts_last_front_by_crowding() {
        // front 0: three points on a line, front 1: one point behind
        let pts = [[0.0, 2.0], [1.0, 1.0], [2.0, 0.0], [3.0, 3.0]];
        let s = rank_crowding_survival(&pts, 2);
        let kept: Vec<usize> = s.iter().map(|t| t.0).collect();
        assert_eq!(kept, vec![0, 2]);
        let s = rank_crowding_survival(&pts, 4);
        assert_eq!(s.last().unwrap(), &(3, 1, f64::INFINITY));
    }

    #[test]
    fn tournament_prefers_rank_then_crowding() {
        let mut rng = RunRng::seed_from_u64(0);
        let rank = [1, 0, 0];
        let crowding = [9.0, 1.0, 2.0];
        let mut wins = [0; 3];
        for _ in 0..2000 {
            wins[crowded_tournament(&rank, &crowding, 30, &mut rng)] += 1;
        }
        assert!(wins[2] > 1900, "{wins:?}");
    }
}
