use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use super::unsga3::reorder;
use super::{breed, objective_rows, random_population, validate_common};
use crate::pareto::{dominates, Archive, Individual};
use crate::problem::{Evaluator, OperatorStats, Problem, Rate};
use crate::run::{config_error, generations_for_budget, GenerationSnapshot, Observer, RunError, RunResult};
use crate::RunRng;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Spea2Config {
    pub pop_size: usize,
    /// Bounded archive size; equals `pop_size` when absent.
    pub archive_size: Option<usize>,
    pub budget: u64,
    pub p_x: Rate,
    pub p_m: Rate,
    pub seed: u64,
}

impl Default for Spea2Config {
    fn default() -> Self {
        Self {
            pop_size: 200,
            archive_size: None,
            budget: 50_000,
            p_x: Rate::Single(0.99),
            p_m: Rate::Single(0.015),
            seed: 0,
        }
    }
}

/// Points rescaled to `[0, 1]` per objective over the given set (objectives
/// with zero range map to 0) so that density is not dominated by the
/// objective with the largest units.
fn unit_scaled<T: AsRef<[f64]>>(points: &[T]) -> Vec<Vec<f64>> {
    let m = points.first().map_or(0, |p| p.as_ref().len());
    let mut lo = vec![f64::INFINITY; m];
    let mut hi = vec![f64::NEG_INFINITY; m];
    for p in points {
        for (d, &v) in p.as_ref().iter().enumerate() {
            lo[d] = lo[d].min(v);
            hi[d] = hi[d].max(v);
        }
    }
    points
        .iter()
        .map(|p| {
            p.as_ref()
                .iter()
                .enumerate()
                .map(|(d, &v)| if hi[d] > lo[d] { (v - lo[d]) / (hi[d] - lo[d]) } else { 0.0 })
                .collect()
        })
        .collect()
}

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

/// Raw fitness (sum of strengths of dominators) plus density
/// `1/(σ_k + 2)`, `k = ⌊√n⌋`. Non-dominated points score below 1.
pub fn spea2_fitness<T: AsRef<[f64]>>(points: &[T]) -> Vec<f64> {
    let n = points.len();
    let mut strength = vec![0usize; n];
    let mut dominators: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in 0..n {
            if i != j && dominates(points[i].as_ref(), points[j].as_ref()) {
                strength[i] += 1;
                dominators[j].push(i);
            }
        }
    }
    let scaled = unit_scaled(points);
    let k = ((n as f64).sqrt() as usize).clamp(1, n.saturating_sub(1).max(1));
    (0..n)
        .map(|i| {
            let raw: usize = dominators[i].iter().map(|&j| strength[j]).sum();
            let mut dist: Vec<f64> = (0..n).filter(|&j| j != i).map(|j| euclid(&scaled[i], &scaled[j])).collect();
            dist.sort_by(f64::total_cmp);
            let sigma = dist.get(k - 1).copied().unwrap_or(0.0);
            raw as f64 + 1.0 / (sigma + 2.0)
        })
        .collect()
}

/// Iteratively drops the point whose sorted distance list to the others is
/// lexicographically smallest until `keep` remain. The minimum of each
/// objective is only removed once nothing else is left. Returns surviving
/// indices in ascending order.
pub fn spea2_truncate<T: AsRef<[f64]>>(points: &[T], keep: usize) -> Vec<usize> {
    let n = points.len();
    if n <= keep {
        return (0..n).collect();
    }
    let scaled = unit_scaled(points);
    let m = scaled.first().map_or(0, Vec::len);
    let mut exempt = vec![false; n];
    for d in 0..m {
        let best = (0..n).min_by(|&a, &b| points[a].as_ref()[d].total_cmp(&points[b].as_ref()[d])).expect("non-empty");
        exempt[best] = true;
    }
    let mut rows: Vec<Vec<(f64, usize)>> = (0..n)
        .map(|i| {
            let mut r: Vec<(f64, usize)> =
                (0..n).filter(|&j| j != i).map(|j| (euclid(&scaled[i], &scaled[j]), j)).collect();
            r.sort_by(|a, b| a.0.total_cmp(&b.0));
            r
        })
        .collect();
    let mut alive = vec![true; n];
    let mut remaining = n;
    while remaining > keep {
        let any_free = (0..n).any(|i| alive[i] && !exempt[i]);
        let victim = (0..n)
            .filter(|&i| alive[i] && (!any_free || !exempt[i]))
            .min_by(|&a, &b| {
                let la = rows[a].iter().map(|x| x.0);
                let lb = rows[b].iter().map(|x| x.0);
                la.partial_cmp(lb).unwrap_or(std::cmp::Ordering::Equal)
            })
            .expect("something to remove");
        alive[victim] = false;
        remaining -= 1;
        for row in rows.iter_mut() {
            row.retain(|&(_, j)| j != victim);
        }
    }
    (0..n).filter(|&i| alive[i]).collect()
}

/// Next archive out of `points`: all non-dominated points, topped up with the
/// best dominated ones or truncated. Returns indices and their fitness.
fn environmental_selection<T: AsRef<[f64]>>(points: &[T], keep: usize) -> Vec<(usize, f64)> {
    let fitness = spea2_fitness(points);
    let nd: Vec<usize> = (0..points.len()).filter(|&i| fitness[i] < 1.0).collect();
    let chosen: Vec<usize> = if nd.len() > keep {
        let subset: Vec<&[f64]> = nd.iter().map(|&i| points[i].as_ref()).collect();
        spea2_truncate(&subset, keep).into_iter().map(|k| nd[k]).collect()
    } else {
        let mut rest: Vec<usize> = (0..points.len()).filter(|&i| fitness[i] >= 1.0).collect();
        rest.sort_by(|&a, &b| fitness[a].total_cmp(&fitness[b]));
        nd.into_iter().chain(rest).take(keep).collect()
    };
    chosen.into_iter().map(|i| (i, fitness[i])).collect()
}

fn fitness_tournament<R: Rng + ?Sized>(fitness: &[f64], rng: &mut R) -> usize {
    let a = rng.gen_range(0..fitness.len());
    let b = rng.gen_range(0..fitness.len());
    if fitness[b] < fitness[a] {
        b
    } else {
        a
    }
}

pub fn spea2_run<P: Problem, O: Observer<P::Genotype>>(
    problem: &P,
    config: &Spea2Config,
    observer: &mut O,
) -> Result<RunResult<P::Genotype>, RunError> {
    validate_common(config.pop_size, config.budget, config.p_x, config.p_m)?;
    let keep = config.archive_size.unwrap_or(config.pop_size);
    if keep == 0 {
        return Err(config_error("archive_size must be at least 1"));
    }
    let mut rng = RunRng::seed_from_u64(config.seed);
    let n = config.pop_size;
    let (generations, discarded) = generations_for_budget(config.budget, n as u64);
    let mut evaluator = Evaluator::new(problem, config.budget);
    let mut stats = OperatorStats::default();
    let mut external = Archive::new(problem.objective_count());

    let mut population = random_population(&mut evaluator, n, &mut rng)?;
    external.update(population.iter().cloned())?;
    let mut bounded: Vec<Individual<P::Genotype>> = Vec::new();
    let mut generation = 0;
    loop {
        let mut union = std::mem::take(&mut bounded);
        union.extend(population);
        let selected = environmental_selection(&objective_rows(&union), keep);
        let order: Vec<usize> = selected.iter().map(|s| s.0).collect();
        let fitness: Vec<f64> = selected.iter().map(|s| s.1).collect();
        bounded = reorder(union, &order);
        observer.on_generation(&GenerationSnapshot {
            generation,
            population: &bounded,
            archive: &external,
            evaluations: evaluator.used(),
        });
        if generation == generations {
            break;
        }
        let mut offspring = Vec::with_capacity(n);
        while offspring.len() < n {
            let a = fitness_tournament(&fitness, &mut rng);
            let b = fitness_tournament(&fitness, &mut rng);
            let (x, y) =
                breed(problem, &bounded[a].genotype, &bounded[b].genotype, config.p_x, config.p_m, &mut rng, &mut stats);
            offspring.push(evaluator.evaluate(x)?);
            offspring.push(evaluator.evaluate(y)?);
        }
        external.update(offspring.iter().cloned())?;
        population = offspring;
        generation += 1;
    }

    let mut result =
        RunResult { front: external.to_front(), evaluations: evaluator.used(), generations, diagnostics: Default::default() };
    result.diagnostics.discarded_budget = discarded;
    result.diagnostics.repairs = stats.repairs;
    Ok(result)
}
