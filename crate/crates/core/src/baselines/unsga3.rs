use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use super::{
    breed, das_dennis, default_partitions, fast_non_dominated_sort, normalize_set, objective_rows, random_population,
    validate_common,
};
use crate::pareto::{Archive, Individual};
use crate::problem::{Evaluator, OperatorStats, Problem, Rate};
use crate::run::{config_error, generations_for_budget, GenerationSnapshot, Observer, RunError, RunResult};
use crate::RunRng;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Unsga3Config {
    pub pop_size: usize,
    pub budget: u64,
    pub p_x: Rate,
    pub p_m: Rate,
    pub tour_size: usize,
    /// Lattice partitions `H`; the largest one fitting `pop_size` when absent.
    pub partitions: Option<usize>,
    pub seed: u64,
}

impl Default for Unsga3Config {
    fn default() -> Self {
        Self {
            pop_size: 100,
            budget: 50_000,
            p_x: Rate::Single(0.9),
            p_m: Rate::Single(0.005),
            tour_size: 2,
            partitions: None,
            seed: 0,
        }
    }
}

/// Distance from `point` to the line through the origin along `direction`.
pub fn perpendicular_distance(point: &[f64], direction: &[f64]) -> f64 {
    let norm2: f64 = direction.iter().map(|w| w * w).sum();
    let scale = point.iter().zip(direction).map(|(p, w)| p * w).sum::<f64>() / norm2;
    point.iter().zip(direction).map(|(p, w)| (p - scale * w).powi(2)).sum::<f64>().sqrt()
}

/// Closest reference line (lowest index on ties) and the distance to it.
pub fn associate<T: AsRef<[f64]>>(points: &[T], directions: &[Vec<f64>]) -> Vec<(usize, f64)> {
    points
        .iter()
        .map(|p| {
            directions
                .iter()
                .enumerate()
                .map(|(j, w)| (j, perpendicular_distance(p.as_ref(), w)))
                .fold((usize::MAX, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best })
        })
        .collect()
}

/// Per-survivor bookkeeping used by the niche-aware tournament.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct NicheInfo {
    pub rank: usize,
    pub niche: usize,
    pub distance: f64,
}

/// Reference-direction survival: whole fronts while they fit, then the last
/// front is filled niche by niche, least crowded reference line first.
pub(crate) fn niching_survival<T: AsRef<[f64]>, R: Rng + ?Sized>(
    points: &[T],
    keep: usize,
    directions: &[Vec<f64>],
    rng: &mut R,
) -> Vec<(usize, NicheInfo)> {
    let fronts = fast_non_dominated_sort(points);
    let mut considered: Vec<usize> = Vec::new();
    let mut rank_of = vec![0; points.len()];
    let mut last_front = 0;
    for (r, front) in fronts.iter().enumerate() {
        for &i in front {
            rank_of[i] = r;
        }
        considered.extend_from_slice(front);
        last_front = r;
        if considered.len() >= keep {
            break;
        }
    }
    let subset: Vec<&[f64]> = considered.iter().map(|&i| points[i].as_ref()).collect();
    let normalized = normalize_set(&subset);
    let assoc = associate(&normalized, directions);
    let info = |k: usize| NicheInfo { rank: rank_of[considered[k]], niche: assoc[k].0, distance: assoc[k].1 };

    if considered.len() == keep {
        return (0..considered.len()).map(|k| (considered[k], info(k))).collect();
    }
    let mut chosen: Vec<usize> = (0..considered.len()).filter(|&k| rank_of[considered[k]] < last_front).collect();
    let mut niche_count = vec![0usize; directions.len()];
    for &k in &chosen {
        niche_count[assoc[k].0] += 1;
    }
    let mut pool: Vec<usize> = (0..considered.len()).filter(|&k| rank_of[considered[k]] == last_front).collect();
    let mut active: Vec<bool> = vec![true; directions.len()];
    while chosen.len() < keep {
        let min_count = (0..directions.len()).filter(|&j| active[j]).map(|j| niche_count[j]).min().expect("pool left");
        let candidates: Vec<usize> = (0..directions.len()).filter(|&j| active[j] && niche_count[j] == min_count).collect();
        let j = *candidates.choose(rng).expect("non-empty");
        let members: Vec<usize> = pool.iter().copied().filter(|&k| assoc[k].0 == j).collect();
        if members.is_empty() {
            active[j] = false;
            continue;
        }
        let pick = if niche_count[j] == 0 {
            *members.iter().min_by(|&&a, &&b| assoc[a].1.total_cmp(&assoc[b].1)).expect("non-empty")
        } else {
            *members.choose(rng).expect("non-empty")
        };
        chosen.push(pick);
        niche_count[j] += 1;
        pool.retain(|&k| k != pick);
    }
    chosen.into_iter().map(|k| (considered[k], info(k))).collect()
}

/// Two candidates sharing a niche compete on rank then distance to the
/// reference line; otherwise the winner is random.
fn niche_tournament<R: Rng + ?Sized>(info: &[NicheInfo], tour: usize, rng: &mut R) -> usize {
    let mut best = rng.gen_range(0..info.len());
    for _ in 1..tour {
        let c = rng.gen_range(0..info.len());
        let (a, b) = (&info[best], &info[c]);
        let better = if a.niche == b.niche {
            b.rank < a.rank || (b.rank == a.rank && b.distance < a.distance)
        } else {
            rng.gen_bool(0.5)
        };
        if better {
            best = c;
        }
    }
    best
}

pub fn unsga3_run<P: Problem, O: Observer<P::Genotype>>(
    problem: &P,
    config: &Unsga3Config,
    observer: &mut O,
) -> Result<RunResult<P::Genotype>, RunError> {
    validate_common(config.pop_size, config.budget, config.p_x, config.p_m)?;
    if config.tour_size == 0 {
        return Err(config_error("tour_size must be at least 1"));
    }
    let m = problem.objective_count();
    let h = match config.partitions {
        Some(h) => h,
        None => default_partitions(m, config.pop_size)?,
    };
    let directions = das_dennis(m, h)?;
    if directions.len() > config.pop_size {
        return Err(config_error(format!(
            "{} reference directions do not fit a population of {}",
            directions.len(),
            config.pop_size
        )));
    }

    let mut rng = RunRng::seed_from_u64(config.seed);
    let n = config.pop_size;
    let (generations, discarded) = generations_for_budget(config.budget, n as u64);
    let mut evaluator = Evaluator::new(problem, config.budget);
    let mut stats = OperatorStats::default();
    let mut archive = Archive::new(m);

    let mut population = random_population(&mut evaluator, n, &mut rng)?;
    archive.update(population.iter().cloned())?;
    let survivors = niching_survival(&objective_rows(&population), n, &directions, &mut rng);
    let order: Vec<usize> = survivors.iter().map(|s| s.0).collect();
    let mut info: Vec<NicheInfo> = survivors.into_iter().map(|s| s.1).collect();
    population = reorder(population, &order);
    observer.on_generation(&GenerationSnapshot {
        generation: 0,
        population: &population,
        archive: &archive,
        evaluations: evaluator.used(),
    });

    for generation in 0..generations {
        let mut offspring: Vec<Individual<P::Genotype>> = Vec::with_capacity(n);
        while offspring.len() < n {
            let a = niche_tournament(&info, config.tour_size, &mut rng);
            let b = niche_tournament(&info, config.tour_size, &mut rng);
            let (x, y) =
                breed(problem, &population[a].genotype, &population[b].genotype, config.p_x, config.p_m, &mut rng, &mut stats);
            offspring.push(evaluator.evaluate(x)?);
            offspring.push(evaluator.evaluate(y)?);
        }
        archive.update(offspring.iter().cloned())?;
        let mut merged = population;
        merged.extend(offspring);
        let survivors = niching_survival(&objective_rows(&merged), n, &directions, &mut rng);
        let order: Vec<usize> = survivors.iter().map(|s| s.0).collect();
        info = survivors.into_iter().map(|s| s.1).collect();
        population = reorder(merged, &order);
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

pub(crate) fn reorder<T>(items: Vec<T>, order: &[usize]) -> Vec<T> {
    let mut slots: Vec<Option<T>> = items.into_iter().map(Some).collect();
    order.iter().map(|&i| slots[i].take().expect("each index once")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perpendicular_distance_geometry() {
        assert!((perpendicular_distance(&[1.0, 1.0], &[1.0, 0.0]) - 1.0).abs() < 1e-12);
        assert!(perpendicular_distance(&[2.0, 2.0], &[0.5, 0.5]).abs() < 1e-12);
    }

    #[test]
    fn association_picks_closest_line() {
        let dirs = das_dennis(2, 2).unwrap();
        let a = associate(&[[0.9, 0.1], [0.5, 0.6], [0.0, 1.0]], &dirs);
        assert_eq!(a.iter().map(|x| x.0).collect::<Vec<_>>(), vec![2, 1, 0]);
    }

    #[test]
    fn niching_spreads_the_last_front() {
        // six mutually non-dominated points, three hugging the first axis
        let pts = [[0.0, 1.0], [0.02, 0.98], [0.04, 0.96], [0.5, 0.5], [0.98, 0.02], [1.0, 0.0]];
        let dirs = das_dennis(2, 2).unwrap();
        let mut rng = RunRng::seed_from_u64(3);
        let kept: Vec<usize> = niching_survival(&pts, 3, &dirs, &mut rng).into_iter().map(|s| s.0).collect();
        // one survivor per reference line
        let mut niches: Vec<usize> = associate(&normalize_set(&pts), &dirs)
            .iter()
            .enumerate()
            .filter(|(i, _)| kept.contains(i))
            .map(|(_, a)| a.0)
            .collect();
        niches.sort_unstable();
        assert_eq!(niches, vec![0, 1, 2]);
    }
}
