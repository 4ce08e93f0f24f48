//! Reference algorithms and the machinery they share: fast non-dominated
//! sorting, crowding distance, simplex-lattice weight vectors and the
//! ideal/intercept normalization used by the reference-direction methods.
//!
//! Every algorithm here reports the non-dominated set accumulated over all of
//! its evaluations rather than its final population, so fronts are
//! comparable with the archive-based methods.

mod moead;
mod nsga2;
mod ntga2;
mod spea2;
mod thetadea;
mod unsga3;

use rand::Rng;

use crate::pareto::{dominates, Individual};
use crate::problem::{Evaluator, OperatorStats, Problem, Rate};
use crate::run::{config_error, RunError};

pub use moead::{moead_run, neighbourhoods, weighted_sum, MoeadConfig};
pub use nsga2::{nsga2_run, Nsga2Config};
pub use ntga2::{ntga2_run, Ntga2Config};
pub use spea2::{spea2_fitness, spea2_run, spea2_truncate, Spea2Config};
pub use thetadea::{theta_fronts, thetadea_run, ThetaDeaConfig};
pub use unsga3::{associate, perpendicular_distance, unsga3_run, Unsga3Config};

/// Partitions points into non-domination fronts (first front first). Points
/// inside a front keep ascending index order.
pub fn fast_non_dominated_sort<T: AsRef<[f64]>>(points: &[T]) -> Vec<Vec<usize>> {
    let n = points.len();
    let mut dominated_by_me: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut domination_count = vec![0usize; n];
    for i in 0..n {
        for j in i + 1..n {
            let (a, b) = (points[i].as_ref(), points[j].as_ref());
            if dominates(a, b) {
                dominated_by_me[i].push(j);
                domination_count[j] += 1;
            } else if dominates(b, a) {
                dominated_by_me[j].push(i);
                domination_count[i] += 1;
            }
        }
    }
    let mut fronts = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&i| domination_count[i] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &i in &current {
            for &j in &dominated_by_me[i] {
                domination_count[j] -= 1;
                if domination_count[j] == 0 {
                    next.push(j);
                }
            }
        }
        next.sort_unstable();
        fronts.push(std::mem::replace(&mut current, next));
    }
    fronts
}

/// Rank (0 = first front) of every point.
pub fn ranks_from_fronts(fronts: &[Vec<usize>], n: usize) -> Vec<usize> {
    let mut rank = vec![0; n];
    for (r, front) in fronts.iter().enumerate() {
        for &i in front {
            rank[i] = r;
        }
    }
    rank
}

/// Crowding distance of each member of `front` (same order as `front`).
/// Boundary points of every objective get infinity; objectives with zero
/// range contribute nothing.
pub fn crowding_distance<T: AsRef<[f64]>>(points: &[T], front: &[usize]) -> Vec<f64> {
    let n = front.len();
    let mut distance = vec![0.0; n];
    if n == 0 {
        return distance;
    }
    let m = points[front[0]].as_ref().len();
    for d in 0..m {
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| points[front[a]].as_ref()[d].total_cmp(&points[front[b]].as_ref()[d]));
        let lo = points[front[order[0]]].as_ref()[d];
        let hi = points[front[order[n - 1]]].as_ref()[d];
        distance[order[0]] = f64::INFINITY;
        distance[order[n - 1]] = f64::INFINITY;
        let range = hi - lo;
        if range <= 0.0 {
            continue;
        }
        for k in 1..n.saturating_sub(1) {
            let below = points[front[order[k - 1]]].as_ref()[d];
            let above = points[front[order[k + 1]]].as_ref()[d];
            distance[order[k]] += (above - below) / range;
        }
    }
    distance
}

/// `C(n, k)`, saturating at `u64::MAX`.
pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

/// Simplex-lattice weight vectors: every vector with components in
/// `{0, 1/H, …, 1}` summing to one. There are `C(H+M-1, M-1)` of them.
pub fn das_dennis(objectives: usize, partitions: usize) -> Result<Vec<Vec<f64>>, RunError> {
    if objectives < 1 {
        return Err(config_error("weight vectors need at least one objective"));
    }
    if partitions == 0 {
        return Err(config_error("the number of partitions must be positive"));
    }
    let mut out = Vec::new();
    let mut current = vec![0usize; objectives];
    fill_lattice(0, partitions, &mut current, &mut out, partitions);
    Ok(out)
}

fn fill_lattice(pos: usize, left: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<f64>>, h: usize) {
    if pos + 1 == current.len() {
        current[pos] = left;
        out.push(current.iter().map(|&c| c as f64 / h as f64).collect());
        return;
    }
    for c in 0..=left {
        current[pos] = c;
        fill_lattice(pos + 1, left - c, current, out, h);
    }
}

/// Largest `H` whose lattice does not exceed `pop_size` vectors.
pub fn default_partitions(objectives: usize, pop_size: usize) -> Result<usize, RunError> {
    let m = objectives as u64;
    let mut h = 0u64;
    while binomial(h + 1 + m - 1, m - 1) <= pop_size as u64 {
        h += 1;
    }
    if h == 0 {
        return Err(config_error(format!(
            "population of {pop_size} is too small for a weight lattice over {objectives} objectives"
        )));
    }
    Ok(h as usize)
}

/// Ideal-point translation plus hyperplane intercepts through the extreme
/// points. When the hyperplane is degenerate the per-objective maximum of the
/// translated set is used instead.
pub fn normalize_set<T: AsRef<[f64]>>(points: &[T]) -> Vec<Vec<f64>> {
    if points.is_empty() {
        return Vec::new();
    }
    let m = points[0].as_ref().len();
    let mut ideal = vec![f64::INFINITY; m];
    for p in points {
        for (d, v) in p.as_ref().iter().enumerate() {
            ideal[d] = ideal[d].min(*v);
        }
    }
    let translated: Vec<Vec<f64>> =
        points.iter().map(|p| p.as_ref().iter().zip(&ideal).map(|(v, z)| v - z).collect()).collect();

    let mut extremes = Vec::with_capacity(m);
    for axis in 0..m {
        let asf = |p: &[f64]| {
            p.iter()
                .enumerate()
                .map(|(d, v)| v / if d == axis { 1.0 } else { 1e-6 })
                .fold(f64::NEG_INFINITY, f64::max)
        };
        let best = (0..translated.len())
            .min_by(|&a, &b| asf(&translated[a]).total_cmp(&asf(&translated[b])))
            .expect("non-empty");
        extremes.push(translated[best].clone());
    }
    let worst: Vec<f64> = (0..m).map(|d| translated.iter().map(|p| p[d]).fold(0.0, f64::max)).collect();
    let intercepts = match hyperplane_intercepts(&extremes) {
        Some(a) if a.iter().all(|x| x.is_finite() && *x > 1e-10) => a,
        _ => worst,
    };
    translated
        .iter()
        .map(|p| {
            p.iter()
                .zip(&intercepts)
                .map(|(v, a)| if *a > 1e-10 { v / a } else { *v })
                .collect()
        })
        .collect()
}

/// Solves `E·x = 1` and returns `1/x_i`, the axis intercepts of the plane
/// through the rows of `E`.
fn hyperplane_intercepts(extremes: &[Vec<f64>]) -> Option<Vec<f64>> {
    let m = extremes.len();
    let mut a: Vec<Vec<f64>> = extremes
        .iter()
        .map(|row| row.iter().copied().chain(std::iter::once(1.0)).collect())
        .collect();
    for col in 0..m {
        let pivot = (col..m).max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))?;
        if a[pivot][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, pivot);
        for row in 0..m {
            if row != col {
                let factor = a[row][col] / a[col][col];
                for k in col..=m {
                    a[row][k] -= factor * a[col][k];
                }
            }
        }
    }
    let x: Vec<f64> = (0..m).map(|i| a[i][m] / a[i][i]).collect();
    Some(x.iter().map(|v| 1.0 / v).collect())
}

pub(crate) fn validate_common(pop_size: usize, budget: u64, p_x: Rate, p_m: Rate) -> Result<(), RunError> {
    if pop_size < 2 || pop_size % 2 != 0 {
        return Err(config_error(format!("pop_size must be even and at least 2, got {pop_size}")));
    }
    if budget < pop_size as u64 {
        return Err(config_error(format!("budget {budget} is below pop_size {pop_size}")));
    }
    if !p_x.is_valid() || !p_m.is_valid() {
        return Err(config_error("probabilities must lie in [0, 1]"));
    }
    Ok(())
}

pub(crate) fn random_population<P: Problem, R: Rng + ?Sized>(
    evaluator: &mut Evaluator<'_, P>,
    size: usize,
    rng: &mut R,
) -> Result<Vec<Individual<P::Genotype>>, RunError> {
    let problem = evaluator.problem();
    (0..size).map(|_| Ok(evaluator.evaluate(problem.random_genotype(rng))?)).collect()
}

/// Crossover followed by mutation of both children.
pub(crate) fn breed<P: Problem, R: Rng + ?Sized>(
    problem: &P,
    a: &P::Genotype,
    b: &P::Genotype,
    p_x: Rate,
    p_m: Rate,
    rng: &mut R,
    stats: &mut OperatorStats,
) -> (P::Genotype, P::Genotype) {
    let (mut x, mut y) = problem.crossover(a, b, p_x, rng, stats);
    problem.mutate(&mut x, p_m, rng, stats);
    problem.mutate(&mut y, p_m, rng, stats);
    (x, y)
}

pub(crate) fn objective_rows<G>(population: &[Individual<G>]) -> Vec<&[f64]> {
    population.iter().map(|i| i.objectives.values()).collect()
}
