use rand::seq::SliceRandom;
use rand::Rng;

use super::eval::{picked_weight, ratio};
use super::instance::TtpInstance;
use super::TtpGenotype;

/// Random tour starting at the first city plus a random picking plan. The
/// pick density is itself drawn uniformly so the initial population spreads
/// along the profit axis.
pub fn random_ttp_genotype<R: Rng + ?Sized>(instance: &TtpInstance, rng: &mut R) -> TtpGenotype {
    let mut tour: Vec<usize> = (0..instance.city_count()).collect();
    tour[1..].shuffle(rng);
    let density: f64 = rng.gen();
    let mut picks: Vec<bool> = (0..instance.item_count()).map(|_| rng.gen_bool(density)).collect();
    repair_picking(instance, &mut picks);
    TtpGenotype { tour, picks }
}

/// Drops picked items, lowest profit/weight first (ties: higher index first),
/// until the knapsack fits. Returns whether anything was dropped.
pub fn repair_picking(instance: &TtpInstance, picks: &mut [bool]) -> bool {
    let mut weight = picked_weight(instance, picks);
    if weight <= instance.capacity() {
        return false;
    }
    let items = instance.items();
    let mut picked: Vec<usize> = (0..picks.len()).filter(|&j| picks[j]).collect();
    picked.sort_by(|&a, &b| {
        ratio(items[a].profit, items[a].weight).total_cmp(&ratio(items[b].profit, items[b].weight)).then(b.cmp(&a))
    });
    for j in picked {
        if weight <= instance.capacity() {
            break;
        }
        picks[j] = false;
        weight -= items[j].weight;
    }
    true
}

/// Order crossover on the tour positions after the fixed start city.
pub fn order_crossover<R: Rng + ?Sized>(a: &[usize], b: &[usize], rng: &mut R) -> (Vec<usize>, Vec<usize>) {
    let len = a.len().saturating_sub(1);
    if len < 2 {
        return (a.to_vec(), b.to_vec());
    }
    let mut i = rng.gen_range(0..len);
    let mut j = rng.gen_range(0..len);
    if i > j {
        std::mem::swap(&mut i, &mut j);
    }
    let x = ox_child(&a[1..], &b[1..], i, j);
    let y = ox_child(&b[1..], &a[1..], i, j);
    let wrap = |head: usize, tail: Vec<usize>| std::iter::once(head).chain(tail).collect::<Vec<_>>();
    (wrap(a[0], x), wrap(b[0], y))
}

fn ox_child(keep: &[usize], fill: &[usize], i: usize, j: usize) -> Vec<usize> {
    let len = keep.len();
    let max_city = keep.iter().copied().max().unwrap_or(0);
    let mut used = vec![false; max_city + 1];
    let mut child = vec![usize::MAX; len];
    for k in i..=j {
        child[k] = keep[k];
        used[keep[k]] = true;
    }
    let mut pos = (j + 1) % len;
    for step in 0..len {
        let city = fill[(j + 1 + step) % len];
        if !used[city] {
            child[pos] = city;
            used[city] = true;
            pos = (pos + 1) % len;
        }
    }
    child
}

/// One cut point; tails are exchanged.
pub fn single_point_crossover<R: Rng + ?Sized>(a: &[bool], b: &[bool], rng: &mut R) -> (Vec<bool>, Vec<bool>) {
    if a.len() < 2 {
        return (a.to_vec(), b.to_vec());
    }
    let cut = rng.gen_range(1..a.len());
    let x = a[..cut].iter().chain(&b[cut..]).copied().collect();
    let y = b[..cut].iter().chain(&a[cut..]).copied().collect();
    (x, y)
}

/// Reverses `tour[i..=j]`.
pub fn reverse_segment(tour: &mut [usize], i: usize, j: usize) {
    tour[i..=j].reverse();
}

/// OX on the routes with probability `p_route`, SX on the picking plans with
/// probability `p_item`, then weight repair. The third value counts repaired
/// children.
pub fn ttp_crossover<R: Rng + ?Sized>(
    instance: &TtpInstance,
    a: &TtpGenotype,
    b: &TtpGenotype,
    p_route: f64,
    p_item: f64,
    rng: &mut R,
) -> (TtpGenotype, TtpGenotype, usize) {
    let (tx, ty) = if rng.gen_bool(p_route) {
        order_crossover(&a.tour, &b.tour, rng)
    } else {
        (a.tour.clone(), b.tour.clone())
    };
    let (mut px, mut py) = if rng.gen_bool(p_item) {
        single_point_crossover(&a.picks, &b.picks, rng)
    } else {
        (a.picks.clone(), b.picks.clone())
    };
    let repaired = repair_picking(instance, &mut px) as usize + repair_picking(instance, &mut py) as usize;
    (TtpGenotype { tour: tx, picks: px }, TtpGenotype { tour: ty, picks: py }, repaired)
}

/// With probability `p_route` a random segment of the tour (never touching
/// the start city) is reversed; with probability `p_item` one random item
/// decision is flipped. Returns whether repair had to drop items.
pub fn ttp_mutation<R: Rng + ?Sized>(
    instance: &TtpInstance,
    genotype: &mut TtpGenotype,
    p_route: f64,
    p_item: f64,
    rng: &mut R,
) -> bool {
    let n = genotype.tour.len();
    if rng.gen_bool(p_route) && n >= 3 {
        let mut i = rng.gen_range(1..n);
        let mut j = rng.gen_range(1..n);
        if i > j {
            std::mem::swap(&mut i, &mut j);
        }
        reverse_segment(&mut genotype.tour, i, j);
    }
    if rng.gen_bool(p_item) && !genotype.picks.is_empty() {
        let j = rng.gen_range(0..genotype.picks.len());
        genotype.picks[j] = !genotype.picks[j];
    }
    repair_picking(instance, &mut genotype.picks)
}
