use crate::pareto::ObjectiveVector;
use crate::problem::ReferencePoints;

use super::instance::TtpInstance;
use super::{TtpError, TtpGenotype};

fn check_genotype(instance: &TtpInstance, genotype: &TtpGenotype) -> Result<f64, TtpError> {
    let n = instance.city_count();
    if genotype.tour.len() != n || genotype.tour.first() != Some(&0) {
        return Err(TtpError::BadTour);
    }
    let mut seen = vec![false; n];
    for &c in &genotype.tour {
        if c >= n || std::mem::replace(&mut seen[c], true) {
            return Err(TtpError::BadTour);
        }
    }
    if genotype.picks.len() != instance.item_count() {
        return Err(TtpError::BadPicking { expected: instance.item_count(), found: genotype.picks.len() });
    }
    let weight = picked_weight(instance, &genotype.picks);
    if weight > instance.capacity() {
        return Err(TtpError::Overweight { weight, capacity: instance.capacity() });
    }
    Ok(weight)
}

pub(crate) fn picked_weight(instance: &TtpInstance, picks: &[bool]) -> f64 {
    instance.items().iter().zip(picks).filter(|(_, &p)| p).map(|(it, _)| it.weight).sum()
}

/// `[travel time, -profit]` for a feasible genotype.
///
/// Items of a city are loaded when the thief arrives there, so they slow down
/// every leg from that city onwards, including the return leg.
pub fn evaluate_ttp(instance: &TtpInstance, genotype: &TtpGenotype) -> Result<ObjectiveVector, TtpError> {
    check_genotype(instance, genotype)?;
    let items = instance.items();
    let tour = &genotype.tour;
    let n = tour.len();
    let mut carried = 0.0;
    let mut time = 0.0;
    for (i, &city) in tour.iter().enumerate() {
        for &j in instance.items_at(city) {
            if genotype.picks[j] {
                carried += items[j].weight;
            }
        }
        let next = tour[(i + 1) % n];
        time += instance.distance(city, next) / instance.velocity(carried);
    }
    let profit: f64 = items.iter().zip(&genotype.picks).filter(|(_, &p)| p).map(|(it, _)| it.profit).sum();
    Ok(ObjectiveVector::new(vec![time, -profit]))
}

/// Total edge length of a minimum spanning tree over all cities (Prim, dense).
pub fn minimum_spanning_tree_length(instance: &TtpInstance) -> f64 {
    let n = instance.city_count();
    let mut in_tree = vec![false; n];
    let mut best = vec![f64::INFINITY; n];
    best[0] = 0.0;
    let mut total = 0.0;
    for _ in 0..n {
        let (u, _) = best
            .iter()
            .enumerate()
            .filter(|(i, _)| !in_tree[*i])
            .min_by(|a, b| a.1.total_cmp(b.1))
            .expect("vertices left");
        in_tree[u] = true;
        total += best[u];
        for v in 0..n {
            if !in_tree[v] {
                let d = instance.distance(u, v);
                if d < best[v] {
                    best[v] = d;
                }
            }
        }
    }
    total
}

/// Profit of filling the knapsack greedily by descending profit/weight
/// (ties by item index). Items that do not fit are skipped, later ones may
/// still be taken.
pub fn greedy_profit(instance: &TtpInstance) -> f64 {
    let items = instance.items();
    let mut order: Vec<usize> = (0..items.len()).collect();
    order.sort_by(|&a, &b| ratio(items[b].profit, items[b].weight).total_cmp(&ratio(items[a].profit, items[a].weight)).then(a.cmp(&b)));
    let mut left = instance.capacity();
    let mut profit = 0.0;
    for j in order {
        if items[j].weight <= left {
            left -= items[j].weight;
            profit += items[j].profit;
        }
    }
    profit
}

pub(crate) fn ratio(profit: f64, weight: f64) -> f64 {
    if weight > 0.0 {
        profit / weight
    } else {
        f64::INFINITY
    }
}

pub fn ttp_reference_points(instance: &TtpInstance) -> ReferencePoints {
    let best_time = minimum_spanning_tree_length(instance) / instance.v_max();
    let best_profit = greedy_profit(instance);
    ReferencePoints { perfect: vec![best_time, -best_profit], nadir: vec![2.0 * best_time, 0.0] }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ttp::{DistanceKind, Item};

    fn line_instance(items: Vec<Item>, capacity: f64) -> TtpInstance {
        TtpInstance::new(
            "line",
            vec![(0.0, 0.0), (1.0, 0.0), (2.0, 0.0)],
            DistanceKind::Exact,
            items,
            capacity,
            0.1,
            1.0,
            0.0,
        )
        .unwrap()
    }

    #[test]
    fn empty_knapsack_runs_at_full_speed() {
        let inst = line_instance(vec![Item { profit: 5.0, weight: 2.0, city: 1 }], 10.0);
        let g = TtpGenotype { tour: vec![0, 1, 2], picks: vec![false] };
        let f = evaluate_ttp(&inst, &g).unwrap();
        assert_eq!(f.values(), &[4.0, 0.0]);
    }

    #[test]
    fn full_knapsack_on_last_city_gives_v_min_return() {
        let inst = line_instance(vec![Item { profit: 5.0, weight: 10.0, city: 2 }], 10.0);
        let g = TtpGenotype { tour: vec![0, 1, 2], picks: vec![true] };
        let f = evaluate_ttp(&inst, &g).unwrap();
        // two unit legs at v_max, return leg of length 2 at v_min
        assert!((f.values()[0] - (2.0 + 2.0 / 0.1)).abs() < 1e-12);
        assert_eq!(f.values()[1], -5.0);
    }

    #[test]
    fn overweight_is_rejected() {
        let inst = line_instance(vec![Item { profit: 5.0, weight: 11.0, city: 2 }], 10.0);
        let g = TtpGenotype { tour: vec![0, 1, 2], picks: vec![true] };
        assert!(matches!(evaluate_ttp(&inst, &g), Err(TtpError::Overweight { .. })));
    }

    #[test]
    fn bad_tours_are_rejected() {
        let inst = line_instance(vec![], 10.0);
        for tour in [vec![1, 0, 2], vec![0, 1, 1], vec![0, 1]] {
            let g = TtpGenotype { tour, picks: vec![] };
            assert_eq!(evaluate_ttp(&inst, &g), Err(TtpError::BadTour));
        }
    }

    #[test]
    fn collinear_mst() {
        let inst = line_instance(vec![], 1.0);
        assert_eq!(minimum_spanning_tree_length(&inst), 2.0);
        let rp = ttp_reference_points(&inst);
        assert_eq!(rp.perfect[0], 2.0);
        assert_eq!(rp.nadir, vec![4.0, 0.0]);
    }

    #[test]
    fn greedy_takes_everything_when_it_fits() {
        let items = vec![
            Item { profit: 1.0, weight: 1.0, city: 1 },
            Item { profit: 7.0, weight: 2.0, city: 2 },
            Item { profit: 3.0, weight: 3.0, city: 2 },
        ];
        assert_eq!(greedy_profit(&line_instance(items.clone(), 6.0)), 11.0);
        // capacity 4: ratios 3.5, 1, 1 → take item 2 (w2), then item 1 (w1), item 3 no longer fits
        assert_eq!(greedy_profit(&line_instance(items, 4.0)), 8.0);
    }

    #[test]
    fn ceil_distances() {
        let inst = TtpInstance::new(
            "c",
            vec![(0.0, 0.0), (1.0, 1.0)],
            DistanceKind::Ceil2d,
            vec![],
            1.0,
            0.1,
            1.0,
            0.0,
        )
        .unwrap();
        assert_eq!(inst.distance(0, 1), 2.0);
    }
}
