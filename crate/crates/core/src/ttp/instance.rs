use serde::{Deserialize, Serialize};

use super::TtpError;

/// How inter-city distances are derived from coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DistanceKind {
    /// Euclidean distance rounded up (`CEIL_2D`).
    Ceil2d,
    /// Euclidean distance rounded to the nearest integer (`EUC_2D`).
    Euc2d,
    /// Plain Euclidean distance (`EUCLIDEAN`).
    Exact,
}

impl DistanceKind {
    pub fn keyword(self) -> &'static str {
        match self {
            DistanceKind::Ceil2d => "CEIL_2D",
            DistanceKind::Euc2d => "EUC_2D",
            DistanceKind::Exact => "EUCLIDEAN",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Self> {
        match s.trim() {
            "CEIL_2D" => Some(DistanceKind::Ceil2d),
            "EUC_2D" => Some(DistanceKind::Euc2d),
            "EUCLIDEAN" => Some(DistanceKind::Exact),
            _ => None,
        }
    }

    pub fn distance(self, a: (f64, f64), b: (f64, f64)) -> f64 {
        let d = (a.0 - b.0).hypot(a.1 - b.1);
        match self {
            DistanceKind::Ceil2d => d.ceil(),
            DistanceKind::Euc2d => (d + 0.5).floor(),
            DistanceKind::Exact => d,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Item {
    pub profit: f64,
    pub weight: f64,
    /// 0-based home city.
    pub city: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TtpInstance {
    pub(crate) name: String,
    pub(crate) data_type: String,
    pub(crate) coords: Vec<(f64, f64)>,
    pub(crate) distance_kind: DistanceKind,
    pub(crate) items: Vec<Item>,
    pub(crate) capacity: f64,
    pub(crate) v_min: f64,
    pub(crate) v_max: f64,
    pub(crate) renting_ratio: f64,
    distances: Vec<f64>,
    items_at: Vec<Vec<usize>>,
}

impl TtpInstance {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        name: impl Into<String>,
        coords: Vec<(f64, f64)>,
        distance_kind: DistanceKind,
        items: Vec<Item>,
        capacity: f64,
        v_min: f64,
        v_max: f64,
        renting_ratio: f64,
    ) -> Result<Self, TtpError> {
        if coords.len() < 2 {
            return Err(TtpError::Invalid("at least two cities are required".into()));
        }
        if !(capacity > 0.0) || !capacity.is_finite() {
            return Err(TtpError::Invalid(format!("capacity must be positive, got {capacity}")));
        }
        if !(v_min > 0.0 && v_min <= v_max && v_max.is_finite()) {
            return Err(TtpError::Invalid(format!("speeds must satisfy 0 < v_min <= v_max, got {v_min} / {v_max}")));
        }
        let n = coords.len();
        let mut items_at = vec![Vec::new(); n];
        for (j, item) in items.iter().enumerate() {
            if item.city >= n {
                return Err(TtpError::Invalid(format!("item {} lives in unknown city {}", j + 1, item.city + 1)));
            }
            if !(item.weight >= 0.0) || !(item.profit >= 0.0) {
                return Err(TtpError::Invalid(format!("item {} has negative weight or profit", j + 1)));
            }
            items_at[item.city].push(j);
        }
        let mut distances = vec![0.0; n * n];
        for a in 0..n {
            for b in 0..n {
                distances[a * n + b] = distance_kind.distance(coords[a], coords[b]);
            }
        }
        Ok(Self {
            name: name.into(),
            data_type: String::new(),
            coords,
            distance_kind,
            items,
            capacity,
            v_min,
            v_max,
            renting_ratio,
            distances,
            items_at,
        })
    }

    pub fn with_data_type(mut self, data_type: impl Into<String>) -> Self {
        self.data_type = data_type.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn city_count(&self) -> usize {
        self.coords.len()
    }

    pub fn item_count(&self) -> usize {
        self.items.len()
    }

    pub fn coords(&self) -> &[(f64, f64)] {
        &self.coords
    }

    pub fn items(&self) -> &[Item] {
        &self.items
    }

    pub fn items_at(&self, city: usize) -> &[usize] {
        &self.items_at[city]
    }

    pub fn capacity(&self) -> f64 {
        self.capacity
    }

    pub fn v_min(&self) -> f64 {
        self.v_min
    }

    pub fn v_max(&self) -> f64 {
        self.v_max
    }

    pub fn distance_kind(&self) -> DistanceKind {
        self.distance_kind
    }

    pub fn distance(&self, a: usize, b: usize) -> f64 {
        self.distances[a * self.coords.len() + b]
    }

    /// Speed while carrying `weight`.
    pub fn velocity(&self, weight: f64) -> f64 {
        self.v_max - weight / self.capacity * (self.v_max - self.v_min)
    }
}
