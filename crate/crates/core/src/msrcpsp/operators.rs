use rand::seq::SliceRandom;
use rand::Rng;

use super::instance::MsrcpspInstance;

/// Every task gets a uniformly drawn capable resource.
pub fn random_assignment<R: Rng + ?Sized>(instance: &MsrcpspInstance, rng: &mut R) -> super::Assignment {
    super::Assignment(
        (0..instance.task_count())
            .map(|t| *instance.capable(t).choose(rng).expect("validated instance"))
            .collect(),
    )
}

/// Replaces genes that point at a resource unable to do the task with a
/// uniformly drawn capable one. Returns how many genes changed.
pub fn repair_assignment<R: Rng + ?Sized>(instance: &MsrcpspInstance, genes: &mut [usize], rng: &mut R) -> usize {
    let mut repaired = 0;
    for (t, gene) in genes.iter_mut().enumerate() {
        if !instance.capable(t).contains(gene) {
            *gene = *instance.capable(t).choose(rng).expect("validated instance");
            repaired += 1;
        }
    }
    repaired
}

/// With probability `p_x` every position is swapped between the children with
/// probability 1/2; otherwise the children are copies of the parents.
pub fn uniform_crossover<R: Rng + ?Sized>(a: &[usize], b: &[usize], p_x: f64, rng: &mut R) -> (Vec<usize>, Vec<usize>) {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    if rng.gen_bool(p_x) {
        for (gx, gy) in x.iter_mut().zip(y.iter_mut()) {
            if rng.gen_bool(0.5) {
                std::mem::swap(gx, gy);
            }
        }
    }
    (x, y)
}

/// Each gene, with probability `p_m`, is redrawn among the capable resources
/// of its task (the redraw may land on the current value).
pub fn gene_mutation<R: Rng + ?Sized>(instance: &MsrcpspInstance, genes: &mut [usize], p_m: f64, rng: &mut R) {
    for (t, gene) in genes.iter_mut().enumerate() {
        if rng.gen_bool(p_m) {
            *gene = *instance.capable(t).choose(rng).expect("validated instance");
        }
    }
}
