//! Gap computation over the archive and the balanced gap tournament.
//!
//! Each generation the archive is sorted along one objective. An entry's gap
//! is the larger of the distances to its two sort neighbours along that
//! objective; the two extremes get an infinite gap. The tournament picks the
//! entry with the largest gap value and pairs it with one of its neighbours.
//!
//! Three gap value variants are offered:
//!
//! * `Plain`: `Gap_i` (unbalanced, what the predecessor algorithm used)
//! * `Simplified`: `Gap_i / ns_i`
//! * `Complex`: `Gap_i / ns_i + λ·sqrt(ln(NS·MaxSpan) / ns_i)`
//!
//! where `ns_i` is the entry's selection counter and `NS` the archive-wide
//! selection total.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pareto::{dominates, Archive, EntryId, Individual};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SelectionError {
    #[error("cannot select from an empty archive")]
    EmptyArchive,
    #[error("tournament size must be at least 1")]
    ZeroTournament,
    #[error("dimension {dimension} out of range for {objectives} objectives")]
    BadDimension { dimension: usize, objectives: usize },
    #[error("balance parameters invalid: {0}")]
    BadParams(&'static str),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum BalanceVariant {
    Plain,
    #[default]
    Simplified,
    Complex,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BalanceParams {
    pub variant: BalanceVariant,
    /// Exploration constant of the complex variant.
    pub lambda: f64,
    /// Complex variant only: divide `Gap_i` by `MaxSpan` instead of leaving it
    /// raw. Off by default; `MaxSpan` then only appears inside the logarithm.
    pub divide_gap_by_span: bool,
}

impl Default for BalanceParams {
    fn default() -> Self {
        Self {
            variant: BalanceVariant::Simplified,
            lambda: std::f64::consts::FRAC_1_SQRT_2,
            divide_gap_by_span: false,
        }
    }
}

impl BalanceParams {
    pub fn with_variant(variant: BalanceVariant) -> Self {
        Self { variant, ..Self::default() }
    }

    pub fn validate(&self) -> Result<(), SelectionError> {
        if !self.lambda.is_finite() || self.lambda < 0.0 {
            return Err(SelectionError::BadParams("lambda must be finite and non-negative"));
        }
        Ok(())
    }
}

/// How the sorting objective is picked each generation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum DimensionMode {
    #[default]
    Random,
    RoundRobin,
}

impl DimensionMode {
    pub fn pick<R: Rng + ?Sized>(self, objectives: usize, generation: u64, rng: &mut R) -> usize {
        match self {
            DimensionMode::Random => rng.gen_range(0..objectives),
            DimensionMode::RoundRobin => (generation % objectives as u64) as usize,
        }
    }
}

/// Immutable snapshot of the archive sorted along one objective, with gaps.
#[derive(Clone, Debug, PartialEq)]
pub struct GapView {
    dimension: usize,
    ids: Vec<EntryId>,
    keys: Vec<f64>,
    gap: Vec<f64>,
    gap_value: Vec<f64>,
    selections: Vec<u64>,
    max_span: f64,
}

impl GapView {
    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Entry ids ascending in the chosen objective.
    pub fn order(&self) -> &[EntryId] {
        &self.ids
    }

    /// Objective values along the chosen dimension, in view order.
    pub fn keys(&self) -> &[f64] {
        &self.keys
    }

    pub fn gaps(&self) -> &[f64] {
        &self.gap
    }

    pub fn gap_values(&self) -> &[f64] {
        &self.gap_value
    }

    pub fn selections(&self) -> &[u64] {
        &self.selections
    }

    pub fn max_span(&self) -> f64 {
        self.max_span
    }

    /// Builds a view from raw parts (positions already sorted). Used by tests
    /// that need a frozen view independent of any archive.
    pub fn from_parts(ids: Vec<EntryId>, gap_value: Vec<f64>, selections: Vec<u64>) -> Self {
        assert_eq!(ids.len(), gap_value.len());
        assert_eq!(ids.len(), selections.len());
        let n = ids.len();
        Self {
            dimension: 0,
            ids,
            keys: vec![0.0; n],
            gap: gap_value.clone(),
            gap_value,
            selections,
            max_span: 0.0,
        }
    }
}

/// Largest `max - min` over all objectives of the archive.
pub fn max_span<G: Clone>(archive: &Archive<G>) -> f64 {
    (0..archive.objective_count())
        .map(|d| {
            let (lo, hi) = archive.entries().iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), e| {
                let v = e.objectives().get(d);
                (lo.min(v), hi.max(v))
            });
            if lo.is_finite() { hi - lo } else { 0.0 }
        })
        .fold(0.0, f64::max)
}

/// One-dimensional gaps along a sorted key sequence: the larger distance to
/// the two neighbours, `+inf` at both ends (and for a lone point).
pub fn gaps_along(sorted_keys: &[f64]) -> Vec<f64> {
    let n = sorted_keys.len();
    (0..n)
        .map(|i| {
            if i == 0 || i + 1 == n {
                f64::INFINITY
            } else {
                let below = sorted_keys[i] - sorted_keys[i - 1];
                let above = sorted_keys[i + 1] - sorted_keys[i];
                below.max(above)
            }
        })
        .collect()
}

/// Draws the sorting dimension uniformly and builds the gap view.
pub fn calculate_gap_values<G: Clone, R: Rng + ?Sized>(
    archive: &Archive<G>,
    params: &BalanceParams,
    rng: &mut R,
) -> Result<GapView, SelectionError> {
    if archive.is_empty() {
        return Err(SelectionError::EmptyArchive);
    }
    let dimension = rng.gen_range(0..archive.objective_count());
    gap_view_for_dimension(archive, params, dimension)
}

pub fn gap_view_for_dimension<G: Clone>(
    archive: &Archive<G>,
    params: &BalanceParams,
    dimension: usize,
) -> Result<GapView, SelectionError> {
    params.validate()?;
    if archive.is_empty() {
        return Err(SelectionError::EmptyArchive);
    }
    if dimension >= archive.objective_count() {
        return Err(SelectionError::BadDimension { dimension, objectives: archive.objective_count() });
    }

    let mut order: Vec<usize> = (0..archive.len()).collect();
    let entries = archive.entries();
    // stable sort: equal keys keep archive (insertion) order
    order.sort_by(|&a, &b| entries[a].objectives().get(dimension).total_cmp(&entries[b].objectives().get(dimension)));

    let ids: Vec<EntryId> = order.iter().map(|&i| entries[i].id()).collect();
    let keys: Vec<f64> = order.iter().map(|&i| entries[i].objectives().get(dimension)).collect();
    let selections: Vec<u64> = order.iter().map(|&i| entries[i].selections()).collect();
    let gap = gaps_along(&keys);
    let span = max_span(archive);

    let gap_value = match params.variant {
        BalanceVariant::Plain => gap.clone(),
        BalanceVariant::Simplified => {
            gap.iter().zip(&selections).map(|(&g, &ns)| g / ns as f64).collect()
        }
        BalanceVariant::Complex => {
            let ns_total = archive.total_selections() as f64;
            // ln of anything ≤ 1 would make the bonus vanish or go imaginary;
            // clamp so early generations get no exploration bonus
            let log_term = (ns_total * span).ln().max(0.0);
            gap.iter()
                .zip(&selections)
                .map(|(&g, &ns)| {
                    let ns = ns as f64;
                    let g = if params.divide_gap_by_span && span > 0.0 { g / span } else { g };
                    g / ns + params.lambda * (log_term / ns).sqrt()
                })
                .collect()
        }
    };

    Ok(GapView { dimension, ids, keys, gap, gap_value, selections, max_span: span })
}

/// Result of one gap tournament.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ParentPair {
    pub first: EntryId,
    pub second: EntryId,
    /// Only one entry exists, so both parents are the same individual.
    pub degenerate: bool,
}

/// Tournament over gap values with the mate taken from the sort neighbours.
///
/// Members are drawn with replacement. Ties on gap value (including several
/// `+inf` edges) go to the entry selected fewer times, then uniformly.
pub fn gap_tour_selection<R: Rng + ?Sized>(
    view: &GapView,
    tour_size: usize,
    rng: &mut R,
) -> Result<ParentPair, SelectionError> {
    if view.is_empty() {
        return Err(SelectionError::EmptyArchive);
    }
    if tour_size == 0 {
        return Err(SelectionError::ZeroTournament);
    }
    let n = view.len();
    let winner = tournament_winner(view, tour_size, rng);
    if n == 1 {
        let id = view.ids[0];
        return Ok(ParentPair { first: id, second: id, degenerate: true });
    }
    let mate = if winner == 0 {
        1
    } else if winner + 1 == n {
        n - 2
    } else if rng.gen_bool(0.5) {
        winner - 1
    } else {
        winner + 1
    };
    Ok(ParentPair { first: view.ids[winner], second: view.ids[mate], degenerate: false })
}

fn tournament_winner<R: Rng + ?Sized>(view: &GapView, tour_size: usize, rng: &mut R) -> usize {
    let n = view.len();
    let mut best: Vec<usize> = Vec::with_capacity(tour_size);
    for _ in 0..tour_size {
        let pos = rng.gen_range(0..n);
        match best.first() {
            None => best.push(pos),
            Some(&b) => {
                let ord = compare_positions(view, pos, b);
                if ord == std::cmp::Ordering::Greater {
                    best.clear();
                    best.push(pos);
                } else if ord == std::cmp::Ordering::Equal && !best.contains(&pos) {
                    best.push(pos);
                }
            }
        }
    }
    if best.len() == 1 {
        best[0]
    } else {
        best.sort_unstable();
        *best.choose(rng).expect("non-empty tie set")
    }
}

/// Greater means "preferred": higher gap value, then fewer selections.
fn compare_positions(view: &GapView, a: usize, b: usize) -> std::cmp::Ordering {
    view.gap_value[a]
        .total_cmp(&view.gap_value[b])
        .then_with(|| view.selections[b].cmp(&view.selections[a]))
}

/// Per-individual gaps of the predecessor operator: the 1-D neighbour gap is
/// computed in every objective and the maximum kept. `best_dimension` records
/// where the maximum came from so a neighbour can be picked in that ordering.
#[derive(Clone, Debug, PartialEq)]
pub struct LegacyGaps {
    pub gap: Vec<f64>,
    pub best_dimension: Vec<usize>,
    /// `orders[d]` lists point indices ascending in objective `d`.
    pub orders: Vec<Vec<usize>>,
    /// `ranks[d][i]` is the position of point `i` inside `orders[d]`.
    pub ranks: Vec<Vec<usize>>,
}

impl LegacyGaps {
    /// A random neighbour of `i` in its best dimension, or `None` at an edge.
    pub fn interior_neighbour<R: Rng + ?Sized>(&self, i: usize, rng: &mut R) -> Option<usize> {
        let d = self.best_dimension[i];
        let order = &self.orders[d];
        let pos = self.ranks[d][i];
        if pos == 0 || pos + 1 == order.len() {
            None
        } else if rng.gen_bool(0.5) {
            Some(order[pos - 1])
        } else {
            Some(order[pos + 1])
        }
    }
}

pub fn legacy_gap_values<T: AsRef<[f64]>>(points: &[T]) -> LegacyGaps {
    let n = points.len();
    let m = points.first().map_or(0, |p| p.as_ref().len());
    let mut gap = vec![f64::NEG_INFINITY; n];
    let mut best_dimension = vec![0; n];
    let mut orders = Vec::with_capacity(m);
    let mut ranks = Vec::with_capacity(m);
    for d in 0..m {
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| points[a].as_ref()[d].total_cmp(&points[b].as_ref()[d]));
        let keys: Vec<f64> = order.iter().map(|&i| points[i].as_ref()[d]).collect();
        let gaps = gaps_along(&keys);
        let mut rank = vec![0; n];
        for (pos, &i) in order.iter().enumerate() {
            rank[i] = pos;
            if gaps[pos] > gap[i] {
                gap[i] = gaps[pos];
                best_dimension[i] = d;
            }
        }
        orders.push(order);
        ranks.push(rank);
    }
    LegacyGaps { gap, best_dimension, orders, ranks }
}

/// Plain tournament on precomputed scores (higher wins, ties uniform).
pub fn score_tournament<R: Rng + ?Sized>(scores: &[f64], tour_size: usize, rng: &mut R) -> usize {
    assert!(!scores.is_empty() && tour_size > 0);
    let mut best = rng.gen_range(0..scores.len());
    for _ in 1..tour_size {
        let c = rng.gen_range(0..scores.len());
        if scores[c] > scores[best] || (scores[c] == scores[best] && rng.gen_bool(0.5)) {
            best = c;
        }
    }
    best
}

/// Pareto tournament: samples `tour_size` members (with replacement) and
/// returns the index of a uniformly chosen non-dominated sample.
pub fn pareto_tournament<G, R: Rng + ?Sized>(
    population: &[Individual<G>],
    tour_size: usize,
    rng: &mut R,
) -> usize {
    assert!(!population.is_empty(), "tournament over an empty population");
    let mut sampled: Vec<usize> = (0..tour_size.max(1)).map(|_| rng.gen_range(0..population.len())).collect();
    sampled.sort_unstable();
    sampled.dedup();
    let front: Vec<usize> = sampled
        .iter()
        .copied()
        .filter(|&i| {
            !sampled.iter().any(|&j| {
                dominates(population[j].objectives.values(), population[i].objectives.values())
            })
        })
        .collect();
    *front.choose(rng).expect("a finite sample always has a non-dominated member")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pareto::ObjectiveVector;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn archive_of(points: &[[f64; 2]]) -> Archive<()> {
        let mut archive = Archive::new(2);
        archive
            .update(points.iter().map(|p| Individual::new((), ObjectiveVector::new(p.to_vec()))))
            .unwrap();
        archive
    }

    #[test]
    fn edge_points_get_infinite_gap() {
        let archive = archive_of(&[[2.0, 10.0], [9.0, 3.0]]);
        let view = gap_view_for_dimension(&archive, &BalanceParams::default(), 0).unwrap();
        assert_eq!(view.keys(), &[2.0, 9.0]);
        assert!(view.gaps().iter().all(|g| g.is_infinite()));
    }

    #[test]
    fn interior_gap_is_larger_neighbour_distance() {
        let archive = archive_of(&[[4.0, 9.0], [5.0, 6.0], [9.0, 1.0]]);
        let view = gap_view_for_dimension(&archive, &BalanceParams::default(), 0).unwrap();
        assert_eq!(view.gaps()[1], 4.0);
        assert_eq!(view.gap_values()[1], 4.0);
    }

    #[test]
    fn simplified_divides_by_selection_count() {
        let mut archive = archive_of(&[[4.0, 9.0], [5.0, 6.0], [9.0, 1.0]]);
        let mid = archive.entries()[1].id();
        archive.increment_selection(&[mid, mid, mid]);
        let view = gap_view_for_dimension(&archive, &BalanceParams::default(), 0).unwrap();
        assert_eq!(view.selections()[1], 4);
        assert_eq!(view.gap_values()[1], 1.0);

        let plain = BalanceParams::with_variant(BalanceVariant::Plain);
        let view = gap_view_for_dimension(&archive, &plain, 0).unwrap();
        assert_eq!(view.gap_values()[1], 4.0);
    }

    #[test]
    fn complex_variant_formula() {
        let mut archive = archive_of(&[[4.0, 9.0], [5.0, 6.0], [9.0, 1.0]]);
        let mid = archive.entries()[1].id();
        archive.increment_selection(&[mid; 9]);
        let params = BalanceParams::with_variant(BalanceVariant::Complex);
        let view = gap_view_for_dimension(&archive, &params, 0).unwrap();
        // NS = 9, MaxSpan = max(9-4, 9-1) = 8, ns = 10
        assert_eq!(view.max_span(), 8.0);
        let expected = 4.0 / 10.0 + std::f64::consts::FRAC_1_SQRT_2 * ((9.0f64 * 8.0).ln() / 10.0).sqrt();
        assert!((view.gap_values()[1] - expected).abs() < 1e-12);

        // with no selections yet the exploration bonus is clamped to zero
        let fresh = archive_of(&[[4.0, 9.0], [5.0, 6.0], [9.0, 1.0]]);
        let view = gap_view_for_dimension(&fresh, &params, 0).unwrap();
        assert_eq!(view.gap_values()[1], 4.0);
    }

    #[test]
    fn single_entry_archive() {
        let archive = archive_of(&[[1.0, 1.0]]);
        let view = gap_view_for_dimension(&archive, &BalanceParams::default(), 1).unwrap();
        assert!(view.gap_values()[0].is_infinite());
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let pair = gap_tour_selection(&view, 3, &mut rng).unwrap();
        assert!(pair.degenerate);
        assert_eq!(pair.first, pair.second);
    }

    #[test]
    fn empty_archive_is_an_error() {
        let archive: Archive<()> = Archive::new(2);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(
            calculate_gap_values(&archive, &BalanceParams::default(), &mut rng),
            Err(SelectionError::EmptyArchive)
        );
    }

    #[test]
    fn two_entries_are_always_the_parents() {
        let archive = archive_of(&[[1.0, 3.0], [3.0, 1.0]]);
        let view = gap_view_for_dimension(&archive, &BalanceParams::default(), 0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for tour in 1..6 {
            let pair = gap_tour_selection(&view, tour, &mut rng).unwrap();
            assert_ne!(pair.first, pair.second);
        }
    }

    #[test]
    fn edge_entry_wins_against_interior() {
        let archive = archive_of(&[[1.0, 9.0], [2.0, 5.0], [6.0, 4.0], [9.0, 1.0]]);
        let view = gap_view_for_dimension(&archive, &BalanceParams::default(), 0).unwrap();
        let edges = [view.order()[0], view.order()[3]];
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        // 64 draws from 4 entries: an edge is in the tournament with overwhelming probability
        for _ in 0..500 {
            let pair = gap_tour_selection(&view, 64, &mut rng).unwrap();
            assert!(edges.contains(&pair.first));
        }
        // an edge and an interior entry only: interior wins only if never beaten
        let frozen = GapView::from_parts(view.order()[..2].to_vec(), vec![f64::INFINITY, 100.0], vec![50, 1]);
        let mut interior = 0;
        for _ in 0..4000 {
            if gap_tour_selection(&frozen, 2, &mut rng).unwrap().first == frozen.order()[1] {
                interior += 1;
            }
        }
        // P(both draws hit the interior) = 1/4
        assert!((interior as f64 / 4000.0 - 0.25).abs() < 0.03, "{interior}");
    }

    #[test]
    fn infinite_ties_prefer_fewer_selections() {
        let ids = archive_of(&[[1.0, 9.0], [9.0, 1.0]]).entries().iter().map(|e| e.id()).collect::<Vec<_>>();
        let view = GapView::from_parts(ids.clone(), vec![f64::INFINITY, f64::INFINITY], vec![5, 2]);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut wins_second = 0;
        for _ in 0..1000 {
            let pair = gap_tour_selection(&view, 8, &mut rng).unwrap();
            if pair.first == ids[1] {
                wins_second += 1;
            }
        }
        // the less selected edge wins whenever it is sampled (1 - 2^-8 of the time)
        assert!(wins_second > 980, "{wins_second}");
    }

    #[test]
    fn legacy_gap_takes_max_over_dimensions() {
        let pts = vec![vec![0.0, 10.0], vec![1.0, 4.0], vec![5.0, 3.0], vec![6.0, 0.0]];
        let legacy = legacy_gap_values(&pts);
        assert!(legacy.gap[0].is_infinite() && legacy.gap[3].is_infinite());
        // point 1: dim0 gaps max(1,4)=4, dim1 max(1,6)=6
        assert_eq!(legacy.gap[1], 6.0);
        assert_eq!(legacy.best_dimension[1], 1);
        assert_eq!(legacy.gap[2], 4.0);
    }

    #[test]
    fn pareto_tournament_examples() {
        let pop = vec![
            Individual::new(0, ObjectiveVector::new(vec![1.0, 1.0])),
            Individual::new(1, ObjectiveVector::new(vec![2.0, 2.0])),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..100 {
            let i = pareto_tournament(&pop, 8, &mut rng);
            assert_eq!(i, 0);
        }
        let single = vec![Individual::new(7, ObjectiveVector::new(vec![3.0, 3.0]))];
        assert_eq!(pareto_tournament(&single, 2, &mut rng), 0);

        let tie = vec![
            Individual::new(0, ObjectiveVector::new(vec![1.0, 3.0])),
            Individual::new(1, ObjectiveVector::new(vec![3.0, 1.0])),
        ];
        let trials = 20_000;
        let mut first = 0;
        let mut both_sampled = 0;
        for _ in 0..trials {
            // tour size large enough that both are almost always present
            let i = pareto_tournament(&tie, 16, &mut rng);
            both_sampled += 1;
            if i == 0 {
                first += 1;
            }
        }
        let share = first as f64 / both_sampled as f64;
        assert!((share - 0.5).abs() < 0.02, "{share}");
    }
}
