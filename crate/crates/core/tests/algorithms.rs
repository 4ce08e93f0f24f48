mod common;

use std::collections::HashSet;

use bntga_core::baselines::{
    binomial, das_dennis, fast_non_dominated_sort, moead_run, ntga2_run, ranks_from_fronts, spea2_run,
    spea2_truncate, weighted_sum, MoeadConfig, Ntga2Config, Spea2Config,
};
use bntga_core::bntga::{run_bntga, run_bntga_observed, BntgaConfig};
use bntga_core::msrcpsp::{MsrcpspProblem, ObjectiveMode};
use bntga_core::pareto::{dominates, non_dominated_indices};
use bntga_core::run::GenerationSnapshot;
use bntga_core::ttp::TtpProblem;
use bntga_core::{Archive, Individual, ObjectiveVector, Problem};
use common::*;
use proptest::prelude::*;

fn points(m: usize, max: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    // small integer grid so ties and duplicates show up often
    prop::collection::vec(prop::collection::vec((0u8..6).prop_map(f64::from), m), 0..max)
}

fn archive_of(pts: &[Vec<f64>], m: usize) -> Vec<Vec<f64>> {
    let mut a: Archive<usize> = Archive::new(m);
    a.update(pts.iter().enumerate().map(|(i, p)| Individual::new(i, ObjectiveVector::new(p.clone())))).unwrap();
    let mut rows: Vec<Vec<f64>> = a.entries().iter().map(|e| e.objectives().values().to_vec()).collect();
    sort_rows(&mut rows);
    rows
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn archive_matches_brute_force(m in 2usize..=4, seed in any::<u64>(), pts in points(4, 60)) {
        let _ = seed;
        let pts: Vec<Vec<f64>> = pts.into_iter().map(|p| p[..m].to_vec()).collect();
        prop_assert_eq!(archive_of(&pts, m), brute_front(&pts));
    }

    #[test]
    fn archive_ignores_insertion_order(pts in points(3, 50)) {
        let mut reversed = pts.clone();
        reversed.reverse();
        prop_assert_eq!(archive_of(&pts, 3), archive_of(&reversed, 3));
    }

    #[test]
    fn filter_keeps_first_of_duplicates(pts in points(2, 50)) {
        let kept = non_dominated_indices(&pts);
        let mut rows: Vec<Vec<f64>> = kept.iter().map(|&i| pts[i].clone()).collect();
        sort_rows(&mut rows);
        prop_assert_eq!(rows, brute_front(&pts));
        for &i in &kept {
            prop_assert!(!pts[..i].contains(&pts[i]));
        }
    }

    #[test]
    fn sorting_matches_peeling(pts in points(3, 80)) {
        let fronts = fast_non_dominated_sort(&pts);
        prop_assert_eq!(ranks_from_fronts(&fronts, pts.len()), brute_ranks(&pts));
        prop_assert_eq!(fronts.iter().map(Vec::len).sum::<usize>(), pts.len());
    }

    #[test]
    fn lattice_is_the_full_simplex_grid(m in 1usize..=5, h in 1usize..=6) {
        let w = das_dennis(m, h).unwrap();
        prop_assert_eq!(w.len() as u64, binomial((h + m - 1) as u64, (m - 1) as u64));
        let mut seen = HashSet::new();
        for v in &w {
            prop_assert!((v.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
            let steps: Vec<u64> = v.iter().map(|x| (x * h as f64).round() as u64).collect();
            for (x, s) in v.iter().zip(&steps) {
                prop_assert!((x * h as f64 - *s as f64).abs() < 1e-9);
            }
            prop_assert!(seen.insert(steps));
        }
    }

    #[test]
    fn truncation_keeps_extremes(pts in prop::collection::vec(prop::collection::vec(0.0f64..1.0, 2), 3..40), keep in 2usize..10) {
        let kept = spea2_truncate(&pts, keep);
        prop_assert_eq!(kept.len(), keep.min(pts.len()));
        prop_assert!(kept.windows(2).all(|w| w[0] < w[1]));
        if pts.len() > keep {
            for d in 0..2 {
                let best = pts.iter().map(|p| p[d]).fold(f64::INFINITY, f64::min);
                prop_assert!(kept.iter().any(|&i| pts[i][d] == best));
            }
        }
    }
}

fn small_problem() -> MsrcpspProblem {
    MsrcpspProblem::new(msrcpsp_fixture("100_5_46_15"), ObjectiveMode::Two)
}

/// Every old archive point is matched or dominated by some point of the new one.
fn covers(new: &[Vec<f64>], old: &[Vec<f64>]) -> bool {
    old.iter().all(|o| new.iter().any(|n| n == o || dominates(n, o)))
}

fn rows<G: Clone>(archive: &Archive<G>) -> Vec<Vec<f64>> {
    archive.entries().iter().map(|e| e.objectives().values().to_vec()).collect()
}

#[test]
fn bntga_archive_only_improves() {
    let problem = small_problem();
    let config = BntgaConfig { budget: 3000, seed: 4, ..BntgaConfig::msrcpsp() };
    let mut previous: Vec<Vec<f64>> = Vec::new();
    let mut steps = 0;
    let mut observer = |s: &GenerationSnapshot<'_, _>| {
        let now = rows(s.archive);
        assert!(covers(&now, &previous), "generation {} lost ground", s.generation);
        assert_eq!(non_dominated_indices(&now).len(), now.len());
        previous = now;
        steps += 1;
    };
    let result = run_bntga_observed(&problem, &config, &mut observer).unwrap();
    assert_eq!(steps, result.generations + 1);
    assert_eq!(result.diagnostics.clone_mutations, 0);
    assert_eq!(result.diagnostics.stale_selections, 0);
}

#[test]
fn bntga_front_is_every_nondominated_evaluation() {
    // the archive sees each child, so no evaluated point dominates the front
    let problem = TtpProblem::new(ttp_fixture("eil51_n50"));
    let config = BntgaConfig { budget: 2000, seed: 8, ..BntgaConfig::ttp() };
    let mut all: Vec<Vec<f64>> = Vec::new();
    let mut observer = |s: &GenerationSnapshot<'_, _>| {
        all.extend(s.population.iter().map(|i: &Individual<_>| i.objectives.values().to_vec()));
    };
    let result = run_bntga_observed(&problem, &config, &mut observer).unwrap();
    let mut front: Vec<Vec<f64>> = result.front.iter().map(|i| i.objectives.values().to_vec()).collect();
    sort_rows(&mut front);
    assert_eq!(front, brute_front(&all));
}

#[test]
fn moead_subproblem_scores_never_rise() {
    let problem = small_problem();
    let config = MoeadConfig { budget: 2000, seed: 6, ..MoeadConfig::default() };
    let weights = das_dennis(2, config.partitions).unwrap();
    let reference = problem.reference_points();
    let mut last: Option<Vec<f64>> = None;
    let mut observer = |s: &GenerationSnapshot<'_, _>| {
        let scores: Vec<f64> = s
            .population
            .iter()
            .zip(&weights)
            .map(|(i, w): (&Individual<_>, _)| weighted_sum(i.objectives.values(), w, &reference))
            .collect();
        if let Some(prev) = &last {
            assert!(scores.iter().zip(prev).all(|(a, b)| a <= b));
        }
        last = Some(scores);
    };
    let result = moead_run(&problem, &config, &mut observer).unwrap();
    assert_eq!(result.evaluations, 2000);
}

#[test]
fn ntga2_generations_hold_no_clones() {
    let problem = small_problem();
    let config = Ntga2Config { budget: 3000, seed: 2, ..Ntga2Config::default() };
    let mut observer = |s: &GenerationSnapshot<'_, _>| {
        let distinct: HashSet<_> = s.population.iter().map(|i: &Individual<_>| &i.genotype).collect();
        assert_eq!(distinct.len(), s.population.len(), "generation {}", s.generation);
    };
    let result = ntga2_run(&problem, &config, &mut observer).unwrap();
    assert_eq!(result.diagnostics.clone_retry_exhausted, 0);
}

#[test]
fn spea2_population_stays_bounded() {
    let problem = small_problem();
    let config = Spea2Config { budget: 2000, pop_size: 40, archive_size: Some(30), seed: 1, ..Spea2Config::default() };
    let mut observer = |s: &GenerationSnapshot<'_, _>| assert!(s.population.len() <= 40);
    let result = spea2_run(&problem, &config, &mut observer).unwrap();
    assert!(result.evaluations <= 2000);
}

#[test]
fn seeds_change_runs() {
    let problem = small_problem();
    let a = run_bntga(&problem, &BntgaConfig { budget: 1000, seed: 1, ..BntgaConfig::msrcpsp() }).unwrap();
    let b = run_bntga(&problem, &BntgaConfig { budget: 1000, seed: 2, ..BntgaConfig::msrcpsp() }).unwrap();
    assert_ne!(a.front, b.front);
}
