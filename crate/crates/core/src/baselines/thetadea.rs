use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use super::unsga3::{associate, reorder};
use super::{
    breed, das_dennis, default_partitions, fast_non_dominated_sort, normalize_set, objective_rows, random_population,
    validate_common,
};
use crate::pareto::{Archive, Individual};
use crate::problem::{Evaluator, OperatorStats, Problem, Rate};
use crate::run::{config_error, generations_for_budget, GenerationSnapshot, Observer, RunError, RunResult};
use crate::RunRng;

/// Penalty used on axis directions, as in the original method.
const AXIS_THETA: f64 = 1e6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ThetaDeaConfig {
    pub pop_size: usize,
    pub budget: u64,
    pub p_x: Rate,
    pub p_m: Rate,
    pub theta: f64,
    /// Tournament on theta rank; 1 means uniform random mating.
    pub tour_size: usize,
    pub partitions: Option<usize>,
    pub seed: u64,
}

impl Default for ThetaDeaConfig {
    fn default() -> Self {
        Self {
            pop_size: 100,
            budget: 50_000,
            p_x: Rate::Single(0.6),
            p_m: Rate::Single(0.005),
            theta: 0.5,
            tour_size: 2,
            partitions: None,
            seed: 0,
        }
    }
}

/// Splits normalized points into theta fronts. Each point joins the cluster
/// of its closest reference line; inside a cluster points are ranked by
/// `d1 + θ·d2` (ties keep index order) and rank `k` of every cluster forms
/// front `k`.
pub fn theta_fronts<T: AsRef<[f64]>>(normalized: &[T], directions: &[Vec<f64>], theta: f64) -> Vec<Vec<usize>> {
    let assoc = associate(normalized, directions);
    let mut clusters: Vec<Vec<(usize, f64)>> = vec![Vec::new(); directions.len()];
    for (i, p) in normalized.iter().enumerate() {
        let j = assoc[i].0;
        let w = &directions[j];
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        let d1 = p.as_ref().iter().zip(w).map(|(a, b)| a * b).sum::<f64>() / norm;
        let d2 = assoc[i].1;
        let is_axis = w.iter().filter(|&&x| x > 0.0).count() == 1;
        let t = if is_axis { AXIS_THETA } else { theta };
        clusters[j].push((i, d1 + t * d2));
    }
    let mut fronts: Vec<Vec<usize>> = Vec::new();
    for cluster in &mut clusters {
        cluster.sort_by(|a, b| a.1.total_cmp(&b.1));
        for (k, &(i, _)) in cluster.iter().enumerate() {
            if fronts.len() <= k {
                fronts.push(Vec::new());
            }
            fronts[k].push(i);
        }
    }
    for f in &mut fronts {
        f.sort_unstable();
    }
    fronts
}

/// Pareto fronts fill the candidate set `S`; survivors are then taken theta
/// front by theta front, the last one sampled at random. Returns survivor
/// indices with their theta rank.
fn theta_survival<T: AsRef<[f64]>, R: Rng + ?Sized>(
    points: &[T],
    keep: usize,
    directions: &[Vec<f64>],
    theta: f64,
    rng: &mut R,
) -> Vec<(usize, usize)> {
    let mut considered = Vec::new();
    for front in fast_non_dominated_sort(points) {
        considered.extend(front);
        if considered.len() >= keep {
            break;
        }
    }
    let subset: Vec<&[f64]> = considered.iter().map(|&i| points[i].as_ref()).collect();
    let normalized = normalize_set(&subset);
    let mut out = Vec::with_capacity(keep);
    for (rank, front) in theta_fronts(&normalized, directions, theta).into_iter().enumerate() {
        if out.len() + front.len() <= keep {
            out.extend(front.into_iter().map(|k| (considered[k], rank)));
        } else {
            let need = keep - out.len();
            let picked: Vec<usize> = front.choose_multiple(rng, need).copied().collect();
            out.extend(picked.into_iter().map(|k| (considered[k], rank)));
        }
        if out.len() == keep {
            break;
        }
    }
    out
}

fn rank_tournament<R: Rng + ?Sized>(rank: &[usize], tour: usize, rng: &mut R) -> usize {
    let mut best = rng.gen_range(0..rank.len());
    for _ in 1..tour {
        let c = rng.gen_range(0..rank.len());
        if rank[c] < rank[best] {
            best = c;
        }
    }
    best
}

pub fn thetadea_run<P: Problem, O: Observer<P::Genotype>>(
    problem: &P,
    config: &ThetaDeaConfig,
    observer: &mut O,
) -> Result<RunResult<P::Genotype>, RunError> {
    validate_common(config.pop_size, config.budget, config.p_x, config.p_m)?;
    if config.tour_size == 0 {
        return Err(config_error("tour_size must be at least 1"));
    }
    if !(config.theta >= 0.0 && config.theta.is_finite()) {
        return Err(config_error(format!("theta must be finite and non-negative, got {}", config.theta)));
    }
    let m = problem.objective_count();
    let h = match config.partitions {
        Some(h) => h,
        None => default_partitions(m, config.pop_size)?,
    };
    let directions = das_dennis(m, h)?;

    let mut rng = RunRng::seed_from_u64(config.seed);
    let n = config.pop_size;
    let (generations, discarded) = generations_for_budget(config.budget, n as u64);
    let mut evaluator = Evaluator::new(problem, config.budget);
    let mut stats = OperatorStats::default();
    let mut archive = Archive::new(m);

    let mut population = random_population(&mut evaluator, n, &mut rng)?;
    archive.update(population.iter().cloned())?;
    let survivors = theta_survival(&objective_rows(&population), n, &directions, config.theta, &mut rng);
    let order: Vec<usize> = survivors.iter().map(|s| s.0).collect();
    let mut rank: Vec<usize> = survivors.iter().map(|s| s.1).collect();
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
            let a = rank_tournament(&rank, config.tour_size, &mut rng);
            let b = rank_tournament(&rank, config.tour_size, &mut rng);
            let (x, y) =
                breed(problem, &population[a].genotype, &population[b].genotype, config.p_x, config.p_m, &mut rng, &mut stats);
            offspring.push(evaluator.evaluate(x)?);
            offspring.push(evaluator.evaluate(y)?);
        }
        archive.update(offspring.iter().cloned())?;
        let mut merged = population;
        merged.extend(offspring);
        let survivors = theta_survival(&objective_rows(&merged), n, &directions, config.theta, &mut rng);
        let order: Vec<usize> = survivors.iter().map(|s| s.0).collect();
        rank = survivors.iter().map(|s| s.1).collect();
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

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theta_zero_ranks_by_projection_only() {
        let dirs = vec![vec![0.5, 0.5]];
        // one cluster; order follows the projection onto the line
        let pts = [[0.6, 0.6], [0.2, 0.2], [0.5, 0.0]];
        let fronts = theta_fronts(&pts, &dirs, 0.0);
        assert_eq!(fronts, vec![vec![1], vec![2], vec![0]]);
    }

    #[test]
    fn off_line_points_are_penalized() {
        let dirs = vec![vec![0.5, 0.5]];
        let pts = [[0.3, 0.3], [0.4, 0.0]];
        // theta 0: d1(0.4,0) ≈ 0.283 < d1(0.3,0.3) ≈ 0.424
        assert_eq!(theta_fronts(&pts, &dirs, 0.0)[0], vec![1]);
        // large theta: the on-line point wins
        assert_eq!(theta_fronts(&pts, &dirs, 5.0)[0], vec![0]);
    }

    #[test]
    fn survival_keeps_requested_count() {
        let dirs = das_dennis(2, 3).unwrap();
        let pts: Vec<[f64; 2]> = (0..12).map(|i| [i as f64, 11.0 - i as f64 + (i % 3) as f64]).collect();
        let mut rng = RunRng::seed_from_u64(1);
        let s = theta_survival(&pts, 5, &dirs, 0.5, &mut rng);
        assert_eq!(s.len(), 5);
        let mut idx: Vec<usize> = s.iter().map(|x| x.0).collect();
        idx.sort_unstable();
        idx.dedup();
        assert_eq!(idx.len(), 5);
    }
}
