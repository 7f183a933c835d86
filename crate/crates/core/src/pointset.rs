//! Finite integer point sets and their weighted difference sets.
//!
//! Two finite sets are homometric when every difference vector occurs
//! with the same multiplicity in both. All arithmetic here is exact.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point of the integer lattice `Z^d`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IntPoint(pub Vec<i64>);

impl IntPoint {
    pub fn new(coords: impl Into<Vec<i64>>) -> Self {
        IntPoint(coords.into())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn zero(dim: usize) -> Self {
        IntPoint(vec![0; dim])
    }

    pub fn sub(&self, other: &IntPoint) -> IntPoint {
        IntPoint(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn add(&self, other: &IntPoint) -> IntPoint {
        IntPoint(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn neg(&self) -> IntPoint {
        IntPoint(self.0.iter().map(|a| -a).collect())
    }
}

impl From<(i64, i64)> for IntPoint {
    fn from((x, y): (i64, i64)) -> Self {
        IntPoint(vec![x, y])
    }
}

impl fmt::Display for IntPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

#[derive(Deserialize)]
struct RawPointSet {
    dim: usize,
    points: Vec<IntPoint>,
}

/// A finite set of lattice points of a fixed dimension.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawPointSet")]
pub struct FinitePointSet {
    dim: usize,
    points: BTreeSet<IntPoint>,
}

impl TryFrom<RawPointSet> for FinitePointSet {
    type Error = Error;

    fn try_from(raw: RawPointSet) -> Result<Self> {
        FinitePointSet::from_points(raw.dim, raw.points)
    }
}

impl FinitePointSet {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDimension(dim));
        }
        Ok(FinitePointSet {
            dim,
            points: BTreeSet::new(),
        })
    }

    pub fn from_points(dim: usize, points: impl IntoIterator<Item = IntPoint>) -> Result<Self> {
        let mut set = FinitePointSet::new(dim)?;
        for p in points {
            set.insert(p)?;
        }
        Ok(set)
    }

    /// Convenience constructor for planar sets.
    pub fn planar(points: &[(i64, i64)]) -> Self {
        FinitePointSet {
            dim: 2,
            points: points.iter().map(|&p| IntPoint::from(p)).collect(),
        }
    }

    /// Inserting a point that is already present is a no-op.
    pub fn insert(&mut self, p: IntPoint) -> Result<bool> {
        if p.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: p.dim(),
            });
        }
        Ok(self.points.insert(p))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, p: &IntPoint) -> bool {
        self.points.contains(p)
    }

    pub fn iter(&self) -> impl Iterator<Item = &IntPoint> + '_ {
        self.points.iter()
    }

    pub fn intersection(&self, other: &FinitePointSet) -> FinitePointSet {
        FinitePointSet {
            dim: self.dim,
            points: self.points.intersection(&other.points).cloned().collect(),
        }
    }

    pub fn difference(&self, other: &FinitePointSet) -> FinitePointSet {
        FinitePointSet {
            dim: self.dim,
            points: self.points.difference(&other.points).cloned().collect(),
        }
    }

    /// Returns `t + F`, or `t - F` when `invert` is set.
    pub fn transform(&self, t: &IntPoint, invert: bool) -> Result<FinitePointSet> {
        if t.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: t.dim(),
            });
        }
        let points = self
            .points
            .iter()
            .map(|p| if invert { t.sub(p) } else { t.add(p) })
            .collect();
        Ok(FinitePointSet {
            dim: self.dim,
            points,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("point sets always serialise")
    }

    pub fn from_json(s: &str) -> std::result::Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }
}

/// The weighted difference set `F - F`: every difference vector with the
/// number of ordered pairs producing it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DifferenceMultiset {
    entries: BTreeMap<IntPoint, u64>,
}

impl DifferenceMultiset {
    pub fn multiplicity(&self, z: &IntPoint) -> u64 {
        self.entries.get(z).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.entries.values().sum()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries in lexicographic order of the difference vector.
    pub fn iter(&self) -> impl Iterator<Item = (&IntPoint, u64)> + '_ {
        self.entries.iter().map(|(z, &m)| (z, m))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("multisets always serialise")
    }
}

#[derive(Serialize, Deserialize)]
struct MultisetEntry {
    z: IntPoint,
    m: u64,
}

#[derive(Serialize, Deserialize)]
struct MultisetRepr {
    entries: Vec<MultisetEntry>,
}

impl Serialize for DifferenceMultiset {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        MultisetRepr {
            entries: self
                .entries
                .iter()
                .map(|(z, &m)| MultisetEntry { z: z.clone(), m })
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for DifferenceMultiset {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = MultisetRepr::deserialize(deserializer)?;
        let mut entries = BTreeMap::new();
        for e in repr.entries {
            if e.m == 0 {
                return Err(serde::de::Error::custom("multiplicities must be positive"));
            }
            *entries.entry(e.z).or_insert(0) += e.m;
        }
        Ok(DifferenceMultiset { entries })
    }
}

pub fn difference_multiset(f: &FinitePointSet) -> Result<DifferenceMultiset> {
    if f.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    let pts: Vec<&IntPoint> = f.iter().collect();
    let mut counts: HashMap<IntPoint, u64> = HashMap::with_capacity(pts.len() * pts.len());
    for x in &pts {
        for y in &pts {
            *counts.entry(x.sub(y)).or_insert(0) += 1;
        }
    }
    Ok(DifferenceMultiset {
        entries: counts.into_iter().collect(),
    })
}

pub fn are_homometric(f: &FinitePointSet, g: &FinitePointSet) -> Result<bool> {
    if f.dim() != g.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            found: g.dim(),
        });
    }
    Ok(difference_multiset(f)? == difference_multiset(g)?)
}

pub fn transform(f: &FinitePointSet, t: &IntPoint, invert: bool) -> Result<FinitePointSet> {
    f.transform(t, invert)
}

const F1: [(i64, i64); 15] = [
    (0, 0), (1, 0), (1, 1), (1, 2), (1, 3),
    (2, 1), (2, 2), (2, 3), (2, 4), (2, 5),
    (3, 3), (3, 4), (3, 5), (4, 4), (4, 5),
];

const F2: [(i64, i64); 15] = [
    (0, 0), (0, 1), (1, 0), (1, 1), (1, 2),
    (1, 3), (1, 4), (2, 2), (2, 3), (2, 4),
    (2, 5), (3, 3), (3, 4), (3, 5), (4, 5),
];

/// The canonical homometric pair `(F1, F2)` of 15 points each in `Z^2`.
pub fn canonical_pair() -> (FinitePointSet, FinitePointSet) {
    (FinitePointSet::planar(&F1), FinitePointSet::planar(&F2))
}
