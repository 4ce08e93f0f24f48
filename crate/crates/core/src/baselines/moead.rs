use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use super::{das_dennis, random_population};
use crate::pareto::Archive;
use crate::problem::{Evaluator, OperatorStats, Problem, Rate, ReferencePoints};
use crate::run::{config_error, GenerationSnapshot, Observer, RunError, RunResult};
use crate::RunRng;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MoeadConfig {
    /// Lattice partitions; the population is one individual per weight vector.
    pub partitions: usize,
    /// Neighbourhood size `T`.
    pub neighbourhood: usize,
    pub budget: u64,
    pub p_x: Rate,
    pub p_m: Rate,
    pub seed: u64,
}

impl Default for MoeadConfig {
    fn default() -> Self {
        Self { partitions: 50, neighbourhood: 6, budget: 50_000, p_x: Rate::Single(0.2), p_m: Rate::Single(0.015), seed: 0 }
    }
}

/// `Σ λ_m · f̂_m` where `f̂` is `f` scaled by the reference points. An
/// objective whose perfect and nadir values coincide is left unscaled
/// (translated only).
pub fn weighted_sum(objectives: &[f64], weights: &[f64], reference: &ReferencePoints) -> f64 {
    objectives
        .iter()
        .zip(weights)
        .enumerate()
        .map(|(d, (&f, &w))| {
            let span = reference.nadir[d] - reference.perfect[d];
            let scaled = if span.abs() > 0.0 { (f - reference.perfect[d]) / span } else { f - reference.perfect[d] };
            w * scaled
        })
        .sum()
}

/// Indices of the `t` closest weight vectors (the vector itself included),
/// nearest first, ties by index.
pub fn neighbourhoods(weights: &[Vec<f64>], t: usize) -> Vec<Vec<usize>> {
    weights
        .iter()
        .map(|w| {
            let mut idx: Vec<(f64, usize)> = weights
                .iter()
                .enumerate()
                .map(|(j, v)| (w.iter().zip(v).map(|(a, b)| (a - b).powi(2)).sum::<f64>(), j))
                .collect();
            idx.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            idx.into_iter().take(t).map(|(_, j)| j).collect()
        })
        .collect()
}

/// Decomposition with weighted-sum scalarization. Every subproblem breeds one
/// child per sweep from two random neighbours; the run stops exactly at the
/// budget, possibly mid-sweep. `generations` counts complete sweeps.
pub fn moead_run<P: Problem, O: Observer<P::Genotype>>(
    problem: &P,
    config: &MoeadConfig,
    observer: &mut O,
) -> Result<RunResult<P::Genotype>, RunError> {
    if !config.p_x.is_valid() || !config.p_m.is_valid() {
        return Err(config_error("probabilities must lie in [0, 1]"));
    }
    let m = problem.objective_count();
    let weights = das_dennis(m, config.partitions)?;
    let n = weights.len();
    if config.neighbourhood == 0 || config.neighbourhood > n {
        return Err(config_error(format!(
            "neighbourhood size {} must lie in 1..={n} (number of weight vectors)",
            config.neighbourhood
        )));
    }
    if config.budget < n as u64 {
        return Err(config_error(format!("budget {} is below the population of {n}", config.budget)));
    }
    let reference = problem.reference_points();
    let hoods = neighbourhoods(&weights, config.neighbourhood);

    let mut rng = RunRng::seed_from_u64(config.seed);
    let mut evaluator = Evaluator::new(problem, config.budget);
    let mut stats = OperatorStats::default();
    let mut archive = Archive::new(m);
    let mut population = random_population(&mut evaluator, n, &mut rng)?;
    archive.update(population.iter().cloned())?;
    let mut scores: Vec<f64> =
        (0..n).map(|i| weighted_sum(population[i].objectives.values(), &weights[i], &reference)).collect();
    observer.on_generation(&GenerationSnapshot {
        generation: 0,
        population: &population,
        archive: &archive,
        evaluations: evaluator.used(),
    });

    let mut sweeps = 0;
    'outer: loop {
        for i in 0..n {
            if evaluator.remaining() == 0 {
                break 'outer;
            }
            let hood = &hoods[i];
            let k = hood[rng.gen_range(0..hood.len())];
            let l = if hood.len() > 1 {
                loop {
                    let c = hood[rng.gen_range(0..hood.len())];
                    if c != k {
                        break c;
                    }
                }
            } else {
                k
            };
            let (mut y, _) =
                problem.crossover(&population[k].genotype, &population[l].genotype, config.p_x, &mut rng, &mut stats);
            problem.mutate(&mut y, config.p_m, &mut rng, &mut stats);
            let child = evaluator.evaluate(y)?;
            for &j in hood {
                let f = weighted_sum(child.objectives.values(), &weights[j], &reference);
                if f < scores[j] {
                    population[j] = child.clone();
                    scores[j] = f;
                }
            }
            archive.update(std::iter::once(child))?;
        }
        sweeps += 1;
        observer.on_generation(&GenerationSnapshot {
            generation: sweeps,
            population: &population,
            archive: &archive,
            evaluations: evaluator.used(),
        });
    }

    let mut result = RunResult {
        front: archive.to_front(),
        evaluations: evaluator.used(),
        generations: sweeps,
        diagnostics: Default::default(),
    };
    result.diagnostics.repairs = stats.repairs;
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> ReferencePoints {
        ReferencePoints { perfect: vec![0.0, 0.0], nadir: vec![1.0, 1.0] }
    }

    #[test]
    fn axis_weight_reads_one_objective() {
        assert_eq!(weighted_sum(&[0.3, 0.9], &[1.0, 0.0], &unit()), 0.3);
    }

    #[test]
    fn balanced_weights_average() {
        assert!((weighted_sum(&[0.2, 0.4], &[0.5, 0.5], &unit()) - 0.3).abs() < 1e-15);
    }

    #[test]
    fn scaling_uses_reference_points() {
        let rp = ReferencePoints { perfect: vec![10.0, 0.0], nadir: vec![20.0, 4.0] };
        assert!((weighted_sum(&[15.0, 1.0], &[0.5, 0.5], &rp) - 0.375).abs() < 1e-15);
    }

    #[test]
    fn neighbourhood_contains_self_first() {
        let w = das_dennis(2, 4).unwrap();
        let h = neighbourhoods(&w, 3);
        assert_eq!(h[0], vec![0, 1, 2]);
        assert_eq!(h[2][0], 2);
        assert_eq!(h[2].len(), 3);
    }
}
