//! Quality indicators: normalization, reference-front construction, IGD,
//! Purity and the Wilcoxon signed-rank comparison.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};
use thiserror::Error;

use crate::pareto::non_dominated_indices;

/// Two normalized points are the same solution when every coordinate differs
/// by at most this much.
pub const MEMBERSHIP_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error("reference front is empty")]
    EmptyReference,
    #[error("point has {found} coordinates, expected {expected}")]
    DimensionMismatch { expected: usize, found: usize },
}

/// Points mapped into `[0, 1]^M`, plus how many coordinates had to be clamped.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormalizedFront {
    pub points: Vec<Vec<f64>>,
    pub clamped: usize,
}

/// `(v - lower) / (upper - lower)` per coordinate, clamped to `[0, 1]`. A
/// dimension with zero span maps to 0.
pub fn normalize<T: AsRef<[f64]>>(points: &[T], lower: &[f64], upper: &[f64]) -> Result<NormalizedFront, MetricsError> {
    let m = lower.len();
    if upper.len() != m {
        return Err(MetricsError::DimensionMismatch { expected: m, found: upper.len() });
    }
    let mut clamped = 0;
    let mut out = Vec::with_capacity(points.len());
    for p in points {
        let p = p.as_ref();
        if p.len() != m {
            return Err(MetricsError::DimensionMismatch { expected: m, found: p.len() });
        }
        out.push(
            p.iter()
                .enumerate()
                .map(|(d, &v)| {
                    let span = upper[d] - lower[d];
                    if span <= 0.0 {
                        return 0.0;
                    }
                    let x = (v - lower[d]) / span;
                    if !(0.0..=1.0).contains(&x) {
                        clamped += 1;
                    }
                    x.clamp(0.0, 1.0)
                })
                .collect(),
        );
    }
    if clamped > 0 {
        log::debug!("normalization clamped {clamped} coordinates");
    }
    Ok(NormalizedFront { points: out, clamped })
}

/// Per-objective minimum and maximum of a point set.
pub fn extent<T: AsRef<[f64]>>(points: &[T]) -> (Vec<f64>, Vec<f64>) {
    let m = points.first().map_or(0, |p| p.as_ref().len());
    let mut lo = vec![f64::INFINITY; m];
    let mut hi = vec![f64::NEG_INFINITY; m];
    for p in points {
        for (d, &v) in p.as_ref().iter().enumerate() {
            lo[d] = lo[d].min(v);
            hi[d] = hi[d].max(v);
        }
    }
    (lo, hi)
}

/// Non-dominated, duplicate-free subset of the union of `fronts`.
pub fn build_tpfa<T: AsRef<[f64]>>(fronts: &[Vec<T>]) -> Vec<Vec<f64>> {
    let union: Vec<&[f64]> = fronts.iter().flatten().map(|p| p.as_ref()).collect();
    non_dominated_indices(&union).into_iter().map(|i| union[i].to_vec()).collect()
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IgdForm {
    /// `sqrt(Σ d_i²) / |TPF|`.
    #[default]
    Paper,
    /// `Σ d_i / |TPF|`.
    Canonical,
}

fn nearest_distance(target: &[f64], pf: &[&[f64]]) -> f64 {
    pf.iter()
        .map(|p| p.iter().zip(target).map(|(a, b)| (a - b).powi(2)).sum::<f64>())
        .fold(f64::INFINITY, f64::min)
        .sqrt()
}

pub fn igd<T: AsRef<[f64]>, U: AsRef<[f64]>>(pf: &[T], tpf: &[U]) -> Result<f64, MetricsError> {
    igd_with(pf, tpf, IgdForm::Paper)
}

/// Distance from every reference point to its nearest front point, combined
/// according to `form`. An empty front scores `+inf`.
pub fn igd_with<T: AsRef<[f64]>, U: AsRef<[f64]>>(pf: &[T], tpf: &[U], form: IgdForm) -> Result<f64, MetricsError> {
    if tpf.is_empty() {
        return Err(MetricsError::EmptyReference);
    }
    if pf.is_empty() {
        log::warn!("IGD of an empty front is infinite");
        return Ok(f64::INFINITY);
    }
    let m = tpf[0].as_ref().len();
    let pf: Vec<&[f64]> = pf.iter().map(|p| p.as_ref()).collect();
    for p in pf.iter().map(|p| p.len()).chain(tpf.iter().map(|p| p.as_ref().len())) {
        if p != m {
            return Err(MetricsError::DimensionMismatch { expected: m, found: p });
        }
    }
    let distances = tpf.iter().map(|t| nearest_distance(t.as_ref(), &pf));
    let n = tpf.len() as f64;
    Ok(match form {
        IgdForm::Paper => distances.map(|d| d * d).sum::<f64>().sqrt() / n,
        IgdForm::Canonical => distances.sum::<f64>() / n,
    })
}

fn same_point(a: &[f64], b: &[f64]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= MEMBERSHIP_TOLERANCE)
}

/// Share of the reference front that the method found: reference points
/// matched (within [`MEMBERSHIP_TOLERANCE`]) by a point of `pf_union`.
pub fn purity<T: AsRef<[f64]>, U: AsRef<[f64]>>(pf_union: &[T], tpfa: &[U]) -> Result<f64, MetricsError> {
    if tpfa.is_empty() {
        return Err(MetricsError::EmptyReference);
    }
    let found = tpfa
        .iter()
        .filter(|t| pf_union.iter().any(|p| same_point(p.as_ref(), t.as_ref())))
        .count();
    Ok(found as f64 / tpfa.len() as f64)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    /// The first sample is significantly lower.
    FirstLower,
    /// The second sample is significantly lower.
    SecondLower,
    NoDifference,
    /// Fewer than five non-zero differences (and not every pair equal).
    InsufficientData,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::FirstLower => "+",
            Verdict::SecondLower => "-",
            Verdict::NoDifference => "=",
            Verdict::InsufficientData => "n/a",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WilcoxonResult {
    /// Pairs left after dropping zero differences.
    pub n: usize,
    /// Rank sum of pairs where the first value is larger.
    pub w_plus: f64,
    /// Rank sum of pairs where the first value is smaller.
    pub w_minus: f64,
    /// `min(w_plus, w_minus)`.
    pub statistic: f64,
    pub p_value: f64,
    pub exact: bool,
    pub verdict: Verdict,
}

/// Sample sizes up to this use the exact null distribution.
pub const EXACT_LIMIT: usize = 25;

/// Two-sided paired Wilcoxon signed-rank test at significance `alpha`.
pub fn wilcoxon_signed_rank(a: &[f64], b: &[f64], alpha: f64) -> Result<WilcoxonResult, MetricsError> {
    if a.len() != b.len() {
        return Err(MetricsError::DimensionMismatch { expected: a.len(), found: b.len() });
    }
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).filter(|d| *d != 0.0).collect();
    let n = diffs.len();

    // average ranks of |d|; kept doubled so they stay integral
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| diffs[i].abs().total_cmp(&diffs[j].abs()));
    let mut doubled = vec![0u64; n];
    let mut tie_term = 0.0;
    let mut start = 0;
    while start < n {
        let mut end = start;
        while end + 1 < n && diffs[order[end + 1]].abs() == diffs[order[start]].abs() {
            end += 1;
        }
        // ranks start+1 ..= end+1, doubled average = start + end + 2
        for &k in &order[start..=end] {
            doubled[k] = (start + end + 2) as u64;
        }
        let t = (end - start + 1) as f64;
        tie_term += t * t * t - t;
        start = end + 1;
    }
    let plus2: u64 = (0..n).filter(|&i| diffs[i] > 0.0).map(|i| doubled[i]).sum();
    let minus2: u64 = (0..n).filter(|&i| diffs[i] < 0.0).map(|i| doubled[i]).sum();
    let (w_plus, w_minus) = (plus2 as f64 / 2.0, minus2 as f64 / 2.0);
    let statistic = w_plus.min(w_minus);

    if n < 5 {
        // enough pairs that all agree exactly: no evidence of a difference
        let verdict = if n == 0 && a.len() >= 5 { Verdict::NoDifference } else { Verdict::InsufficientData };
        return Ok(WilcoxonResult { n, w_plus, w_minus, statistic, p_value: 1.0, exact: true, verdict });
    }

    let (p_value, exact) = if n <= EXACT_LIMIT {
        (exact_two_sided(&doubled, plus2.min(minus2)), true)
    } else {
        let nf = n as f64;
        let mean = nf * (nf + 1.0) / 4.0;
        let var = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - tie_term / 48.0;
        let p = if var <= 0.0 {
            1.0
        } else {
            let z = ((w_plus - mean).abs() - 0.5).max(0.0) / var.sqrt();
            let normal = Normal::new(0.0, 1.0).expect("standard normal");
            (2.0 * (1.0 - normal.cdf(z))).min(1.0)
        };
        (p, false)
    };
    let verdict = if p_value >= alpha {
        Verdict::NoDifference
    } else if w_minus > w_plus {
        Verdict::FirstLower
    } else {
        Verdict::SecondLower
    };
    Ok(WilcoxonResult { n, w_plus, w_minus, statistic, p_value, exact, verdict })
}

/// `2·P(T ≤ t)` under the null, `T` being the rank sum of a uniformly random
/// sign assignment, all in doubled-rank units.
fn exact_two_sided(doubled: &[u64], t: u64) -> f64 {
    let total: u64 = doubled.iter().sum();
    let mut count = vec![0f64; total as usize + 1];
    count[0] = 1.0;
    let mut reach = 0usize;
    for &r in doubled {
        let r = r as usize;
        for s in (0..=reach).rev() {
            if count[s] > 0.0 {
                count[s + r] += count[s];
            }
        }
        reach += r;
    }
    let below: f64 = count[..=t as usize].iter().sum();
    (2.0 * below / 2f64.powi(doubled.len() as i32)).min(1.0)
}
