mod common;

use bntga_core::msrcpsp::{
    build_schedule, check_schedule, parse_instance, serialize_instance, Assignment, MsrcpspInstance, MsrcpspProblem,
    ObjectiveMode, Schedule,
};
use bntga_core::{OperatorStats, Problem, Rate, RunRng};
use common::*;
use proptest::prelude::*;
use rand::SeedableRng;

/// Objectives recomputed slot by slot from the schedule.
fn oracle(inst: &MsrcpspInstance, s: &Schedule) -> Vec<f64> {
    let tasks = inst.tasks();
    let res = inst.resources();
    let makespan = s.finish.iter().copied().max().unwrap_or(0);
    let cost: f64 = (0..tasks.len()).map(|t| res[s.assignment[t]].salary * tasks[t].duration as f64).sum();
    let overuse: f64 = (0..tasks.len())
        .map(|t| {
            let held = res[s.assignment[t]].skills.iter().filter(|k| k.kind == tasks[t].skill.kind).map(|k| k.level).max().unwrap();
            f64::from(held - tasks[t].skill.level)
        })
        .sum();
    let r = res.len() as f64;
    let use_dev: f64 = (0..res.len())
        .map(|k| (s.assignment.iter().filter(|&&a| a == k).count() as f64 - tasks.len() as f64 / r).abs())
        .sum::<f64>()
        / r;
    let avg = cost / makespan as f64;
    let mut dev = 0.0;
    for slot in 0..makespan {
        let paid: f64 = (0..tasks.len()).filter(|&t| s.start[t] <= slot && slot < s.finish[t]).map(|t| res[s.assignment[t]].salary).sum();
        dev += (paid - avg).abs();
    }
    vec![makespan as f64, cost, dev / makespan as f64, overuse, use_dev]
}

fn all_assignments(inst: &MsrcpspInstance) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for t in 0..inst.task_count() {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                inst.capable(t).iter().map(move |&r| {
                    let mut g = prefix.clone();
                    g.push(r);
                    g
                })
            })
            .collect();
    }
    out
}

fn check_against_oracle(inst: &MsrcpspInstance, genes: &[usize], problem: &MsrcpspProblem) {
    let s = build_schedule(inst, genes).unwrap();
    assert_eq!(check_schedule(inst, &s), vec![], "genes {genes:?}");
    let got = problem.evaluate(&Assignment(genes.to_vec()));
    let want = oracle(inst, &s);
    assert!(close(got.values(), &want, 1e-12), "{:?} vs {want:?}", got.values());
    let rp = problem.reference_points();
    for d in 0..5 {
        assert!(rp.perfect[d] <= want[d] + 1e-9 && want[d] <= rp.nadir[d] + 1e-9, "objective {d}: {} outside", want[d]);
    }
}

#[test]
fn small_fixtures_exhaustively() {
    for name in ["5_2_tiny", "10_3_small"] {
        let inst = msrcpsp_fixture(name);
        let problem = MsrcpspProblem::new(inst.clone(), ObjectiveMode::Five);
        let all = all_assignments(&inst);
        assert!(all.len() > 1, "{name} must offer a choice");
        let mut worst_overuse = 0.0f64;
        for g in &all {
            check_against_oracle(&inst, g, &problem);
            worst_overuse = worst_overuse.max(problem.evaluate(&Assignment(g.clone())).get(3));
        }
        // per-task maxima are independent, so some assignment reaches the bound
        assert_eq!(problem.reference_points().nadir[3], worst_overuse, "{name}");
    }
}

#[test]
fn large_fixtures_fuzzed() {
    for name in SMALL_IMOPSE {
        let inst = msrcpsp_fixture(name);
        let problem = MsrcpspProblem::new(inst.clone(), ObjectiveMode::Five);
        let mut rng = RunRng::seed_from_u64(17);
        let mut stats = OperatorStats::default();
        let mut prev = problem.random_genotype(&mut rng);
        for _ in 0..300 {
            let fresh = problem.random_genotype(&mut rng);
            let (mut child, _) = problem.crossover(&prev, &fresh, Rate::Single(0.5), &mut rng, &mut stats);
            problem.mutate(&mut child, Rate::Single(0.1), &mut rng, &mut stats);
            check_against_oracle(&inst, &child.0, &problem);
            prev = child;
        }
    }
}

#[test]
fn two_objective_mode_is_a_prefix() {
    let inst = msrcpsp_fixture("10_3_small");
    let five = MsrcpspProblem::new(inst.clone(), ObjectiveMode::Five);
    let two = MsrcpspProblem::new(inst, ObjectiveMode::Two);
    let g = five.random_genotype(&mut RunRng::seed_from_u64(3));
    assert_eq!(two.evaluate(&g).values(), &five.evaluate(&g).values()[..2]);
    assert_eq!(two.reference_points().nadir, five.reference_points().nadir[..2]);
}

#[test]
fn fixtures_survive_a_round_trip() {
    for name in MSRCPSP_FIXTURES {
        let inst = msrcpsp_fixture(name);
        let again = parse_instance(name, &serialize_instance(&inst)).unwrap();
        assert_eq!(again, inst, "{name}");
    }
}

#[test]
fn foreign_genes_are_rejected() {
    let inst = msrcpsp_fixture("10_3_small");
    let bad = (0..inst.resource_count()).find(|r| !inst.capable(0).contains(r));
    let mut genes = all_assignments(&inst).remove(0);
    if let Some(r) = bad {
        genes[0] = r;
        assert!(build_schedule(&inst, &genes).is_err());
    }
    genes.pop();
    assert!(build_schedule(&inst, &genes).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn mutation_keeps_genes_capable(seed in any::<u64>(), p in 0.0f64..=1.0) {
        let inst = msrcpsp_fixture("100_5_48_9");
        let problem = MsrcpspProblem::new(inst.clone(), ObjectiveMode::Two);
        let mut rng = RunRng::seed_from_u64(seed);
        let mut g = problem.random_genotype(&mut rng);
        problem.mutate(&mut g, Rate::Single(p), &mut rng, &mut OperatorStats::default());
        for (t, &r) in g.0.iter().enumerate() {
            prop_assert!(inst.capable(t).contains(&r));
        }
    }
}
