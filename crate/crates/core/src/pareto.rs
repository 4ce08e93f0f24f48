//! Objective vectors, Pareto dominance and the counted non-dominated archive.
//!
//! Every objective is minimized. Problems that maximize something (TTP profit)
//! negate it at evaluation time so that the rest of the crate only ever deals
//! with "lower is better".

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParetoError {
    #[error("objective vectors have different lengths ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },
    #[error("objective vector has {found} objectives, archive expects {expected}")]
    WrongObjectiveCount { expected: usize, found: usize },
    #[error("objective vector contains a non-finite value at index {index}")]
    NonFinite { index: usize },
}

/// Fixed-length vector of minimized objective values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ObjectiveVector(Vec<f64>);

impl ObjectiveVector {
    pub fn new(values: Vec<f64>) -> Self {
        Self(values)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn get(&self, dim: usize) -> f64 {
        self.0[dim]
    }

    /// Pareto dominance. Panics on a length mismatch; use
    /// [`ObjectiveVector::checked_dominates`] when the inputs are untrusted.
    pub fn dominates(&self, other: &ObjectiveVector) -> bool {
        dominates(&self.0, &other.0)
    }

    pub fn checked_dominates(&self, other: &ObjectiveVector) -> Result<bool, ParetoError> {
        checked_dominates(&self.0, &other.0)
    }

    /// Checks that every component is finite.
    pub fn validate(&self) -> Result<(), ParetoError> {
        match self.0.iter().position(|v| !v.is_finite()) {
            Some(index) => Err(ParetoError::NonFinite { index }),
            None => Ok(()),
        }
    }
}

impl From<Vec<f64>> for ObjectiveVector {
    fn from(values: Vec<f64>) -> Self {
        Self(values)
    }
}

impl fmt::Display for ObjectiveVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

/// `a` dominates `b` iff it is no worse everywhere and strictly better somewhere.
pub fn dominates(a: &[f64], b: &[f64]) -> bool {
    assert_eq!(a.len(), b.len(), "dominance between vectors of different length");
    let mut strictly_better = false;
    for (x, y) in a.iter().zip(b) {
        if x > y {
            return false;
        }
        if x < y {
            strictly_better = true;
        }
    }
    strictly_better
}

pub fn checked_dominates(a: &[f64], b: &[f64]) -> Result<bool, ParetoError> {
    if a.len() != b.len() {
        return Err(ParetoError::LengthMismatch { left: a.len(), right: b.len() });
    }
    Ok(dominates(a, b))
}

/// Indices of the non-dominated members of `points`, keeping only the first of
/// any group of identical vectors. Quadratic; fine for archive-sized inputs.
pub fn non_dominated_indices<T: AsRef<[f64]>>(points: &[T]) -> Vec<usize> {
    let mut kept: Vec<usize> = Vec::new();
    'outer: for (i, p) in points.iter().enumerate() {
        let p = p.as_ref();
        for (j, q) in points.iter().enumerate() {
            let q = q.as_ref();
            if i != j && (dominates(q, p) || (j < i && q == p)) {
                continue 'outer;
            }
        }
        kept.push(i);
    }
    kept
}

/// An evaluated solution. Constructing one requires its objective vector, so
/// unevaluated genotypes cannot reach an archive.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Individual<G> {
    pub genotype: G,
    pub objectives: ObjectiveVector,
}

impl<G> Individual<G> {
    pub fn new(genotype: G, objectives: ObjectiveVector) -> Self {
        Self { genotype, objectives }
    }
}

/// Stable handle to an archive entry. Handles of removed entries become stale.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EntryId(u64);

impl EntryId {
    pub fn raw(self) -> u64 {
        self.0
    }
}

#[derive(Clone, Debug)]
pub struct ArchiveEntry<G> {
    id: EntryId,
    individual: Individual<G>,
    selections: u64,
}

impl<G> ArchiveEntry<G> {
    pub fn id(&self) -> EntryId {
        self.id
    }

    pub fn individual(&self) -> &Individual<G> {
        &self.individual
    }

    pub fn objectives(&self) -> &ObjectiveVector {
        &self.individual.objectives
    }

    /// Selection counter `ns_i`; starts at 1.
    pub fn selections(&self) -> u64 {
        self.selections
    }
}

/// What an [`Archive::update`] call changed.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ArchiveUpdate {
    pub inserted: Vec<EntryId>,
    pub removed: Vec<EntryId>,
}

/// Unbounded set of mutually non-dominated, objective-distinct individuals
/// with per-entry selection counters.
#[derive(Clone, Debug)]
pub struct Archive<G> {
    objective_count: usize,
    entries: Vec<ArchiveEntry<G>>,
    next_id: u64,
    total_selections: u64,
    stale_references: u64,
}

impl<G: Clone> Archive<G> {
    pub fn new(objective_count: usize) -> Self {
        Self {
            objective_count,
            entries: Vec::new(),
            next_id: 0,
            total_selections: 0,
            stale_references: 0,
        }
    }

    pub fn objective_count(&self) -> usize {
        self.objective_count
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[ArchiveEntry<G>] {
        &self.entries
    }

    pub fn get(&self, id: EntryId) -> Option<&ArchiveEntry<G>> {
        self.position(id).map(|pos| &self.entries[pos])
    }

    /// `NS`: every selection ever recorded, including those of removed entries.
    pub fn total_selections(&self) -> u64 {
        self.total_selections
    }

    /// Selection references that pointed at entries no longer in the archive.
    pub fn stale_references(&self) -> u64 {
        self.stale_references
    }

    pub fn individuals(&self) -> impl Iterator<Item = &Individual<G>> {
        self.entries.iter().map(|e| &e.individual)
    }

    pub fn to_front(&self) -> Vec<Individual<G>> {
        self.individuals().cloned().collect()
    }

    fn position(&self, id: EntryId) -> Option<usize> {
        // ids are handed out in increasing order and removal keeps relative order
        self.entries.binary_search_by_key(&id, |e| e.id).ok()
    }

    /// Offers a single candidate. Returns the new entry id when it was accepted.
    pub fn insert(
        &mut self,
        candidate: Individual<G>,
        removed: &mut Vec<EntryId>,
    ) -> Result<Option<EntryId>, ParetoError> {
        let obj = &candidate.objectives;
        if obj.len() != self.objective_count {
            return Err(ParetoError::WrongObjectiveCount {
                expected: self.objective_count,
                found: obj.len(),
            });
        }
        obj.validate()?;

        for entry in &self.entries {
            let existing = entry.objectives().values();
            if existing == obj.values() || dominates(existing, obj.values()) {
                return Ok(None);
            }
        }
        self.entries.retain(|entry| {
            let dominated = dominates(obj.values(), entry.objectives().values());
            if dominated {
                removed.push(entry.id);
            }
            !dominated
        });
        let id = EntryId(self.next_id);
        self.next_id += 1;
        self.entries.push(ArchiveEntry { id, individual: candidate, selections: 1 });
        Ok(Some(id))
    }

    /// Offers every candidate in turn. The resulting set of objective vectors
    /// is the non-dominated, de-duplicated subset of archive ∪ candidates.
    pub fn update<I>(&mut self, candidates: I) -> Result<ArchiveUpdate, ParetoError>
    where
        I: IntoIterator<Item = Individual<G>>,
    {
        let mut report = ArchiveUpdate::default();
        for candidate in candidates {
            if let Some(id) = self.insert(candidate, &mut report.removed)? {
                report.inserted.push(id);
            }
        }
        // an entry inserted and then displaced within the same batch is neither
        let transient: Vec<EntryId> =
            report.inserted.iter().copied().filter(|id| self.position(*id).is_none()).collect();
        report.inserted.retain(|id| !transient.contains(id));
        report.removed.retain(|id| !transient.contains(id));
        Ok(report)
    }

    /// Bumps `ns_i` of each referenced entry and `NS` by the number of live
    /// references. Stale references are counted, not fatal.
    pub fn increment_selection(&mut self, ids: &[EntryId]) {
        for &id in ids {
            match self.position(id) {
                Some(pos) => {
                    self.entries[pos].selections += 1;
                    self.total_selections += 1;
                }
                None => self.stale_references += 1,
            }
        }
    }
}
