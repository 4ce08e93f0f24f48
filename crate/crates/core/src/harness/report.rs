//! Comparison tables over a results directory.
//!
//! Per instance, the TPFa is built from every run of every algorithm. IGD is
//! computed per run and summarized by mean and sample standard deviation;
//! Purity pools all runs of an algorithm first. Stat rows pair the focal
//! algorithm with each other one over per-instance means.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{read_results, AlgorithmKind, HarnessError, RunRecord};
use crate::metrics::{build_tpfa, extent, igd_with, normalize, purity, wilcoxon_signed_rank, IgdForm, Verdict};

/// Bounds used to project objectives onto `[0, 1]`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormalizationMode {
    /// Perfect and nadir points of the instance.
    #[default]
    Reference,
    /// Minimum and maximum of the TPFa.
    TpfExtent,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReportOptions {
    pub normalization: NormalizationMode,
    pub igd_form: IgdForm,
    pub alpha: f64,
    /// Algorithm compared against the rest; B-NTGA when present, otherwise
    /// the first label in sort order.
    pub focal: Option<String>,
}

impl Default for ReportOptions {
    fn default() -> Self {
        Self { normalization: NormalizationMode::Reference, igd_form: IgdForm::Paper, alpha: 0.05, focal: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Row {
    pub instance: String,
    pub algorithm: String,
    pub runs: usize,
    pub igd_avg: f64,
    pub igd_std: f64,
    pub purity: f64,
    /// Best-of-others rows: algorithm that supplied the IGD columns.
    pub igd_from: Option<String>,
    /// Best-of-others rows: algorithm that supplied the Purity column.
    pub purity_from: Option<String>,
}

/// Wilcoxon comparison of the focal algorithm with one other. `+` means the
/// focal algorithm is significantly better (lower IGD, higher Purity).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StatRow {
    pub metric: String,
    pub versus: String,
    pub pairs: usize,
    pub statistic: f64,
    pub p_value: f64,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub problem: String,
    pub objectives: usize,
    pub focal: String,
    pub instances: Vec<String>,
    pub algorithms: Vec<String>,
    pub tpfa_sizes: BTreeMap<String, usize>,
    pub rows: Vec<Row>,
    pub stats: Vec<StatRow>,
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let std = if xs.len() > 1 { (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt() } else { 0.0 };
    (mean, std)
}

/// Report over every record below `dir`.
pub fn report(dir: &Path, options: &ReportOptions) -> Result<Report, HarnessError> {
    let records = read_results(dir)?;
    report_records(&records, options)
}

pub fn report_records<G>(records: &[RunRecord<G>], options: &ReportOptions) -> Result<Report, HarnessError> {
    let first = records.first().ok_or_else(|| HarnessError::Config("no result records found".into()))?;
    let (problem, objectives) = (first.problem, first.objectives);
    if let Some(r) = records.iter().find(|r| r.problem != problem || r.objectives != objectives) {
        return Err(HarnessError::Heterogeneous(format!(
            "{problem} with {objectives} objectives and {} with {} objectives ({} on {})",
            r.problem, r.objectives, r.algorithm, r.instance
        )));
    }

    // instance -> algorithm -> runs
    let mut grouped: BTreeMap<&str, BTreeMap<&str, Vec<&RunRecord<G>>>> = BTreeMap::new();
    let mut kinds: BTreeMap<&str, AlgorithmKind> = BTreeMap::new();
    for r in records {
        grouped.entry(&r.instance).or_default().entry(&r.algorithm).or_default().push(r);
        kinds.insert(&r.algorithm, r.algorithm_kind);
    }
    let focal = match &options.focal {
        Some(f) if kinds.contains_key(f.as_str()) => f.clone(),
        Some(f) => return Err(HarnessError::Config(format!("focal algorithm `{f}` has no results"))),
        None => kinds
            .iter()
            .find(|(_, &k)| k == AlgorithmKind::Bntga)
            .or_else(|| kinds.iter().next())
            .map(|(l, _)| l.to_string())
            .expect("at least one record"),
    };
    let mut algorithms: Vec<String> = vec![focal.clone()];
    algorithms.extend(kinds.keys().filter(|&&l| l != focal).map(|l| l.to_string()));

    let mut rows = Vec::new();
    let mut tpfa_sizes = BTreeMap::new();
    for (&instance, by_alg) in &grouped {
        let fronts: Vec<Vec<Vec<f64>>> =
            by_alg.values().flat_map(|runs| runs.iter().map(|r| r.objective_rows())).collect();
        let tpfa = build_tpfa(&fronts);
        tpfa_sizes.insert(instance.to_string(), tpfa.len());
        let (lower, upper) = match options.normalization {
            NormalizationMode::Reference => {
                let rp = &by_alg.values().next().expect("non-empty group")[0].reference;
                (rp.perfect.clone(), rp.nadir.clone())
            }
            NormalizationMode::TpfExtent => extent(&tpfa),
        };
        let tpf = normalize(&tpfa, &lower, &upper)?;
        for alg in &algorithms {
            let Some(runs) = by_alg.get(alg.as_str()) else { continue };
            let mut igds = Vec::with_capacity(runs.len());
            let mut pooled = Vec::new();
            for r in runs {
                let pf = normalize(&r.objective_rows(), &lower, &upper)?;
                igds.push(igd_with(&pf.points, &tpf.points, options.igd_form)?);
                pooled.extend(pf.points);
            }
            let (igd_avg, igd_std) = mean_std(&igds);
            rows.push(Row {
                instance: instance.to_string(),
                algorithm: alg.clone(),
                runs: runs.len(),
                igd_avg,
                igd_std,
                purity: purity(&pooled, &tpf.points)?,
                igd_from: None,
                purity_from: None,
            });
        }
    }

    let others: Vec<&String> = algorithms.iter().filter(|a| **a != focal).collect();
    let mut best_rows = Vec::new();
    if others.len() > 1 {
        for instance in grouped.keys() {
            let candidates: Vec<&Row> =
                rows.iter().filter(|r| r.instance == *instance && r.algorithm != focal).collect();
            let Some(best_igd) = candidates.iter().min_by(|a, b| a.igd_avg.total_cmp(&b.igd_avg)) else { continue };
            let best_purity = candidates.iter().max_by(|a, b| a.purity.total_cmp(&b.purity)).expect("non-empty");
            best_rows.push(Row {
                instance: instance.to_string(),
                algorithm: format!("[non {focal}]"),
                runs: best_igd.runs,
                igd_avg: best_igd.igd_avg,
                igd_std: best_igd.igd_std,
                purity: best_purity.purity,
                igd_from: Some(best_igd.algorithm.clone()),
                purity_from: Some(best_purity.algorithm.clone()),
            });
        }
    }

    let mut stats = Vec::new();
    if !others.is_empty() {
        let mut versus: Vec<(String, Vec<&Row>)> = others
            .iter()
            .map(|o| ((*o).clone(), rows.iter().filter(|r| &r.algorithm == *o).collect()))
            .collect();
        if !best_rows.is_empty() {
            versus.push((format!("[non {focal}]"), best_rows.iter().collect()));
        }
        for (name, other_rows) in versus {
            let mut igd = (Vec::new(), Vec::new());
            let mut pur = (Vec::new(), Vec::new());
            for o in other_rows {
                if let Some(f) = rows.iter().find(|r| r.algorithm == focal && r.instance == o.instance) {
                    igd.0.push(f.igd_avg);
                    igd.1.push(o.igd_avg);
                    // negated so that a lower value is better for both metrics
                    pur.0.push(-f.purity);
                    pur.1.push(-o.purity);
                }
            }
            for (metric, (a, b)) in [("IGD", igd), ("Purity", pur)] {
                let w = wilcoxon_signed_rank(&a, &b, options.alpha)?;
                stats.push(StatRow {
                    metric: metric.into(),
                    versus: name.clone(),
                    pairs: a.len(),
                    statistic: w.statistic,
                    p_value: w.p_value,
                    verdict: w.verdict,
                });
            }
        }
    }
    rows.extend(best_rows);
    let order = |r: &Row| (r.instance.clone(), algorithms.iter().position(|a| *a == r.algorithm).unwrap_or(usize::MAX));
    rows.sort_by_key(order);

    Ok(Report {
        problem: problem.to_string(),
        objectives,
        focal,
        instances: grouped.keys().map(|s| s.to_string()).collect(),
        algorithms,
        tpfa_sizes,
        rows,
        stats,
    })
}

impl Report {
    pub fn rows_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["instance", "algorithm", "runs", "igd_avg", "igd_std", "purity", "igd_from", "purity_from"])
            .expect("in-memory write");
        for r in &self.rows {
            w.write_record([
                r.instance.clone(),
                r.algorithm.clone(),
                r.runs.to_string(),
                r.igd_avg.to_string(),
                r.igd_std.to_string(),
                r.purity.to_string(),
                r.igd_from.clone().unwrap_or_default(),
                r.purity_from.clone().unwrap_or_default(),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
    }

    pub fn stats_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["metric", "focal", "versus", "pairs", "statistic", "p_value", "verdict"]).expect("in-memory write");
        for s in &self.stats {
            w.write_record([
                s.metric.clone(),
                self.focal.clone(),
                s.versus.clone(),
                s.pairs.to_string(),
                s.statistic.to_string(),
                s.p_value.to_string(),
                s.verdict.to_string(),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let width = self.rows.iter().map(|r| r.algorithm.len()).max().unwrap_or(9).max(9);
        writeln!(out, "{} with {} objectives, focal algorithm {}", self.problem, self.objectives, self.focal).unwrap();
        for inst in &self.instances {
            writeln!(out, "\n{inst} (TPFa {} points)", self.tpfa_sizes[inst]).unwrap();
            writeln!(out, "  {:<width$} {:>5} {:>12} {:>12} {:>8}", "algorithm", "runs", "IGD avg", "IGD std", "Purity")
                .unwrap();
            for r in self.rows.iter().filter(|r| &r.instance == inst) {
                write!(
                    out,
                    "  {:<width$} {:>5} {:>12.4e} {:>12.4e} {:>8.4}",
                    r.algorithm, r.runs, r.igd_avg, r.igd_std, r.purity
                )
                .unwrap();
                if let (Some(i), Some(p)) = (&r.igd_from, &r.purity_from) {
                    write!(out, "  (IGD: {i}, Purity: {p})").unwrap();
                }
                out.push('\n');
            }
        }
        if !self.stats.is_empty() {
            writeln!(out, "\nWilcoxon signed-rank over per-instance means (+: {} better)", self.focal).unwrap();
            for s in &self.stats {
                writeln!(
                    out,
                    "  {:<6} vs {:<width$} pairs {:>3}  W {:>8.1}  p {:>9.3e}  {}",
                    s.metric, s.versus, s.pairs, s.statistic, s.p_value, s.verdict
                )
                .unwrap();
            }
        }
        out
    }
}

/// Objective vectors from a file: result records (`.jsonl`, all fronts
/// pooled) or plain text with one vector per line, values separated by
/// whitespace or commas. Blank lines and `#` comments are skipped.
pub fn read_points(path: &Path) -> Result<Vec<Vec<f64>>, HarnessError> {
    let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    let bad = |message: String| HarnessError::Record { path: path.to_path_buf(), message };
    let mut points = Vec::new();
    if path.extension().is_some_and(|e| e == "jsonl") {
        for line in text.lines().filter(|l| !l.trim().is_empty()) {
            let r: RunRecord<serde_json::Value> = serde_json::from_str(line).map_err(|e| bad(e.to_string()))?;
            points.extend(r.objective_rows());
        }
        return Ok(points);
    }
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row: Result<Vec<f64>, _> =
            line.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty()).map(str::parse).collect();
        let row = row.map_err(|e| bad(format!("line {}: {e}", n + 1)))?;
        if let Some(prev) = points.first().map(Vec::len) {
            if prev != row.len() {
                return Err(bad(format!("line {}: {} values, expected {prev}", n + 1, row.len())));
            }
        }
        points.push(row);
    }
    Ok(points)
}
