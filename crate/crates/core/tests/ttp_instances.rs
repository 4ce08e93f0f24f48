mod common;

use bntga_core::ttp::{
    evaluate_ttp, greedy_profit, minimum_spanning_tree_length, parse_ttp, repair_picking, serialize_ttp,
    ttp_reference_points, TtpGenotype, TtpProblem,
};
use bntga_core::{OperatorStats, Problem, Rate, RunRng};
use common::*;
use proptest::prelude::*;
use rand::SeedableRng;

#[test]
fn tiny_instance_evaluates_like_the_model() {
    let inst = ttp_fixture("tiny5");
    let all = enumerate_ttp(&inst);
    // 24 tours times every picking plan under the capacity of 12
    let plans = (0u32..32)
        .filter(|m| (0..5).filter(|j| m >> j & 1 == 1).map(|j| inst.items()[j].weight).sum::<f64>() <= 12.0)
        .count();
    assert_eq!(all.len(), 24 * plans);
    for (tour, picks, want) in &all {
        let got = evaluate_ttp(&inst, &TtpGenotype { tour: tour.clone(), picks: picks.clone() }).unwrap();
        assert!(close(got.values(), want, 1e-12), "{tour:?} {picks:?}");
    }
}

#[test]
fn more_load_is_never_faster() {
    let inst = ttp_fixture("tiny5");
    for (tour, picks, base) in enumerate_ttp(&inst) {
        for j in 0..picks.len() {
            if picks[j] {
                continue;
            }
            let mut more = picks.clone();
            more[j] = true;
            let Ok(heavier) = evaluate_ttp(&inst, &TtpGenotype { tour: tour.clone(), picks: more }) else { continue };
            assert!(heavier.get(0) >= base[0]);
            assert!(heavier.get(1) < base[1]);
        }
    }
}

#[test]
fn reference_points_bound_the_tiny_front() {
    let inst = ttp_fixture("tiny5");
    let shortest = enumerate_ttp(&inst).iter().filter(|s| s.1.iter().all(|p| !p)).map(|s| s.2[0]).fold(f64::INFINITY, f64::min);
    let mst = minimum_spanning_tree_length(&inst);
    assert!(mst < shortest);
    let rp = ttp_reference_points(&inst);
    assert_eq!(rp.perfect[0], mst / inst.v_max());
    assert_eq!(rp.nadir[1], 0.0);
}

#[test]
fn greedy_profit_by_hand() {
    // ratios 7 (14/2), 5.83 (35/6), 5.6 (28/5), 5 (20/4), 3 (9/3): load goes
    // 2, 8, skip 28 (13 > 12), 12, and 9 no longer fits
    let inst = ttp_fixture("tiny5");
    assert_eq!(greedy_profit(&inst), 14.0 + 35.0 + 20.0);
    let best = enumerate_ttp(&inst).iter().map(|s| -s.2[1]).fold(0.0, f64::max);
    assert!(best >= greedy_profit(&inst));
}

#[test]
fn greedy_profit_matches_a_second_implementation() {
    let inst = ttp_fixture("eil51_n50");
    let mut items: Vec<(f64, f64, usize)> = inst.items().iter().enumerate().map(|(j, i)| (i.profit, i.weight, j)).collect();
    items.sort_by(|a, b| (b.0 / b.1).partial_cmp(&(a.0 / a.1)).unwrap().then(a.2.cmp(&b.2)));
    let (mut room, mut profit) = (inst.capacity(), 0.0);
    for (p, w, _) in items {
        if w <= room {
            room -= w;
            profit += p;
        }
    }
    assert_eq!(greedy_profit(&inst), profit);
}

#[test]
fn eil51_layout() {
    let inst = ttp_fixture("eil51_n50");
    assert_eq!(inst.city_count(), 51);
    assert_eq!(inst.item_count(), 50);
    assert!(inst.items_at(0).is_empty());
    assert!((1..51).all(|c| inst.items_at(c).len() == 1));
    // CEIL_2D: city 1 (37,52) to city 2 (49,49) is ceil(sqrt(153)) = 13
    assert_eq!(inst.distance(0, 1), 13.0);
}

#[test]
fn instances_survive_a_round_trip() {
    for name in ["tiny5", "eil51_n50"] {
        let inst = ttp_fixture(name);
        assert_eq!(parse_ttp(&serialize_ttp(&inst)).unwrap(), inst, "{name}");
    }
}

#[test]
fn overweight_and_broken_tours_are_rejected() {
    let inst = ttp_fixture("tiny5");
    let all = vec![true; 5];
    assert!(evaluate_ttp(&inst, &TtpGenotype { tour: vec![0, 1, 2, 3, 4], picks: all.clone() }).is_err());
    assert!(evaluate_ttp(&inst, &TtpGenotype { tour: vec![1, 0, 2, 3, 4], picks: vec![false; 5] }).is_err());
    assert!(evaluate_ttp(&inst, &TtpGenotype { tour: vec![0, 1, 1, 3, 4], picks: vec![false; 5] }).is_err());
    let mut fixed = all;
    assert!(repair_picking(&inst, &mut fixed));
    assert!(evaluate_ttp(&inst, &TtpGenotype { tour: vec![0, 1, 2, 3, 4], picks: fixed }).is_ok());
}

fn feasible(inst: &bntga_core::ttp::TtpInstance, g: &TtpGenotype) -> bool {
    let mut sorted = g.tour.clone();
    sorted.sort_unstable();
    g.tour[0] == 0 && sorted == (0..inst.city_count()).collect::<Vec<_>>() && evaluate_ttp(inst, g).is_ok()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn operators_keep_genotypes_feasible(seed in any::<u64>(), pr in 0.0f64..=1.0, pi in 0.0f64..=1.0) {
        let problem = TtpProblem::new(ttp_fixture("eil51_n50"));
        let inst = problem.instance();
        let mut rng = RunRng::seed_from_u64(seed);
        let mut stats = OperatorStats::default();
        let a = problem.random_genotype(&mut rng);
        let b = problem.random_genotype(&mut rng);
        prop_assert!(feasible(inst, &a) && feasible(inst, &b));
        let (mut x, mut y) = problem.crossover(&a, &b, Rate::Pair(pr, pi), &mut rng, &mut stats);
        problem.mutate(&mut x, Rate::Pair(pr, pi), &mut rng, &mut stats);
        problem.mutate(&mut y, Rate::Pair(pr, pi), &mut rng, &mut stats);
        prop_assert!(feasible(inst, &x) && feasible(inst, &y));
        let want = ttp_oracle(inst, &x.tour, &x.picks);
        prop_assert!(close(problem.evaluate(&x).values(), &want, 1e-12));
    }
}
