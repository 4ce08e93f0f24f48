//! Fixture paths and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use std::path::PathBuf;

use bntga_core::msrcpsp::{parse_instance, MsrcpspInstance};
use bntga_core::ttp::{parse_ttp, TtpInstance};

pub const MSRCPSP_FIXTURES: [&str; 5] = ["100_5_22_15", "100_5_46_15", "100_5_48_9", "10_3_small", "5_2_tiny"];
pub const SMALL_IMOPSE: [&str; 3] = ["100_5_22_15", "100_5_46_15", "100_5_48_9"];

pub fn fixture(file: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(file)
}

pub fn msrcpsp_fixture(name: &str) -> MsrcpspInstance {
    let text = std::fs::read_to_string(fixture(&format!("{name}.def"))).expect("fixture readable");
    parse_instance(name, &text).expect("fixture parses")
}

pub fn ttp_fixture(name: &str) -> TtpInstance {
    let text = std::fs::read_to_string(fixture(&format!("{name}.ttp"))).expect("fixture readable");
    parse_ttp(&text).expect("fixture parses")
}

/// Written out independently of the library: no worse anywhere, better somewhere.
pub fn dominates(a: &[f64], b: &[f64]) -> bool {
    let mut strictly = false;
    for (x, y) in a.iter().zip(b) {
        if x > y {
            return false;
        }
        if x < y {
            strictly = true;
        }
    }
    strictly
}

/// Indices of points no other point dominates (duplicates all kept).
pub fn brute_nondominated<T: AsRef<[f64]>>(points: &[T]) -> Vec<usize> {
    (0..points.len())
        .filter(|&i| !points.iter().any(|q| dominates(q.as_ref(), points[i].as_ref())))
        .collect()
}

/// Distinct non-dominated vectors, sorted lexicographically.
pub fn brute_front<T: AsRef<[f64]>>(points: &[T]) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = brute_nondominated(points).into_iter().map(|i| points[i].as_ref().to_vec()).collect();
    sort_rows(&mut out);
    out.dedup();
    out
}

pub fn sort_rows(rows: &mut [Vec<f64>]) {
    rows.sort_by(|a, b| a.iter().zip(b).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal));
}

/// Rank by repeated peeling: rank 0 is the non-dominated set, rank 1 the
/// non-dominated set of the rest, and so on.
pub fn brute_ranks<T: AsRef<[f64]>>(points: &[T]) -> Vec<usize> {
    let n = points.len();
    let mut rank = vec![usize::MAX; n];
    let mut level = 0;
    while rank.iter().any(|&r| r == usize::MAX) {
        let open: Vec<usize> = (0..n).filter(|&i| rank[i] == usize::MAX).collect();
        let layer: Vec<usize> = open
            .iter()
            .copied()
            .filter(|&i| !open.iter().any(|&j| dominates(points[j].as_ref(), points[i].as_ref())))
            .collect();
        for i in layer {
            rank[i] = level;
        }
        level += 1;
    }
    rank
}

/// sqrt(sum of squared nearest distances) / |tpf|, by nested loops.
pub fn brute_igd<T: AsRef<[f64]>, U: AsRef<[f64]>>(pf: &[T], tpf: &[U]) -> f64 {
    let mut sum = 0.0;
    for t in tpf {
        let mut best = f64::INFINITY;
        for p in pf {
            let d: f64 = t.as_ref().iter().zip(p.as_ref()).map(|(a, b)| (a - b) * (a - b)).sum();
            best = best.min(d);
        }
        sum += best;
    }
    sum.sqrt() / tpf.len() as f64
}

/// Travel time and negated profit straight from the model: items are loaded
/// on arrival and slow every later leg, the return leg included.
pub fn ttp_oracle(inst: &TtpInstance, tour: &[usize], picks: &[bool]) -> [f64; 2] {
    let coords = inst.coords();
    let dist = |a: usize, b: usize| {
        let (dx, dy) = (coords[a].0 - coords[b].0, coords[a].1 - coords[b].1);
        let d = (dx * dx + dy * dy).sqrt();
        match inst.distance_kind() {
            bntga_core::ttp::DistanceKind::Ceil2d => d.ceil(),
            bntga_core::ttp::DistanceKind::Euc2d => d.round(),
            bntga_core::ttp::DistanceKind::Exact => d,
        }
    };
    let mut weight = 0.0;
    let mut time = 0.0;
    let mut profit = 0.0;
    for (k, &city) in tour.iter().enumerate() {
        for (j, item) in inst.items().iter().enumerate() {
            if picks[j] && item.city == city {
                weight += item.weight;
                profit += item.profit;
            }
        }
        let speed = inst.v_max() - weight * (inst.v_max() - inst.v_min()) / inst.capacity();
        time += dist(city, tour[(k + 1) % tour.len()]) / speed;
    }
    [time, -profit]
}

pub fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, head);
            out.push(tail);
        }
    }
    out
}

/// Every feasible (tour, picking plan) of a small instance with its objectives.
pub fn enumerate_ttp(inst: &TtpInstance) -> Vec<(Vec<usize>, Vec<bool>, [f64; 2])> {
    let others: Vec<usize> = (1..inst.city_count()).collect();
    let m = inst.item_count();
    let mut out = Vec::new();
    for rest in permutations(&others) {
        let mut tour = vec![0];
        tour.extend(rest);
        for mask in 0u32..(1 << m) {
            let picks: Vec<bool> = (0..m).map(|j| mask >> j & 1 == 1).collect();
            let w: f64 = inst.items().iter().zip(&picks).filter(|p| *p.1).map(|p| p.0.weight).sum();
            if w <= inst.capacity() {
                let obj = ttp_oracle(inst, &tour, &picks);
                out.push((tour.clone(), picks, obj));
            }
        }
    }
    out
}

pub fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol * x.abs().max(y.abs()).max(1.0))
}
