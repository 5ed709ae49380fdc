//! Finite unions of bounded open intervals on the line.
//!
//! Endpoint comparisons are exact; no epsilon is ever applied. Points that
//! coincide with an endpoint get the [`Membership::Boundary`] verdict.

use std::collections::{BTreeMap, BTreeSet};
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Open interval `(lo, hi)` with `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 2]", into = "[f64; 2]")]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_finite() && hi.is_finite() && lo < hi {
            Ok(Interval { lo, hi })
        } else {
            Err(Error::InvalidInterval { lo, hi })
        }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> Membership {
        if x > self.lo && x < self.hi {
            Membership::Inside
        } else if x == self.lo || x == self.hi {
            Membership::Boundary
        } else {
            Membership::Outside
        }
    }

    /// Length of the overlap with another interval.
    pub fn overlap(&self, other: &Interval) -> f64 {
        (self.hi.min(other.hi) - self.lo.max(other.lo)).max(0.0)
    }

    /// Open intervals share interior points.
    pub fn intersects(&self, other: &Interval) -> bool {
        self.lo < other.hi && other.lo < self.hi
    }
}

impl TryFrom<[f64; 2]> for Interval {
    type Error = Error;

    fn try_from(v: [f64; 2]) -> Result<Self> {
        Interval::new(v[0], v[1])
    }
}

impl From<Interval> for [f64; 2] {
    fn from(i: Interval) -> Self {
        [i.lo, i.hi]
    }
}

/// Point-location verdict. Endpoints are never silently classified.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Membership {
    Inside,
    Outside,
    Boundary,
}

/// Sorted intervals with `sup I_k <= inf I_{k+1}`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Interval>", into = "Vec<Interval>")]
pub struct DisjointIntervalSet {
    items: Vec<Interval>,
}

impl TryFrom<Vec<Interval>> for DisjointIntervalSet {
    type Error = Error;

    fn try_from(items: Vec<Interval>) -> Result<Self> {
        DisjointIntervalSet::from_sorted(items)
    }
}

impl From<DisjointIntervalSet> for Vec<Interval> {
    fn from(s: DisjointIntervalSet) -> Self {
        s.items
    }
}

impl DisjointIntervalSet {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Accepts an already sorted, pairwise disjoint list (touching allowed).
    pub fn from_sorted(items: Vec<Interval>) -> Result<Self> {
        for (k, w) in items.windows(2).enumerate() {
            if w[0].hi > w[1].lo {
                return Err(Error::OverlappingInputs(k, k + 1));
            }
        }
        Ok(DisjointIntervalSet { items })
    }

    /// Sorts a pairwise disjoint family; overlapping members are rejected.
    pub fn from_disjoint(mut items: Vec<Interval>) -> Result<Self> {
        items.sort_by(|a, b| a.lo.total_cmp(&b.lo).then(a.hi.total_cmp(&b.hi)));
        Self::from_sorted(items)
    }

    pub(crate) fn from_sorted_unchecked(items: Vec<Interval>) -> Self {
        DisjointIntervalSet { items }
    }

    pub fn items(&self) -> &[Interval] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn measure(&self) -> f64 {
        self.items.iter().map(Interval::len).sum()
    }

    pub fn contains(&self, x: f64) -> Membership {
        // First item whose hi is >= x.
        let k = self.items.partition_point(|i| i.hi < x);
        match self.items.get(k) {
            None => Membership::Outside,
            Some(i) => match i.contains(x) {
                // A touching neighbour may start at x; either way x is an endpoint.
                Membership::Boundary => Membership::Boundary,
                m => m,
            },
        }
    }

    /// Measure of the intersection with an interval.
    pub fn overlap(&self, iv: &Interval) -> f64 {
        let start = self.items.partition_point(|i| i.hi <= iv.lo);
        self.items[start..]
            .iter()
            .take_while(|i| i.lo < iv.hi)
            .map(|i| i.overlap(iv))
            .sum()
    }

    pub fn hull(&self) -> Option<Interval> {
        match (self.items.first(), self.items.last()) {
            (Some(a), Some(b)) => Some(Interval { lo: a.lo, hi: b.hi }),
            _ => None,
        }
    }
}

/// Merges overlapping or touching intervals into maximal disjoint ones.
pub fn normalize(intervals: &[Interval]) -> DisjointIntervalSet {
    let mut sorted = intervals.to_vec();
    sorted.sort_by(|a, b| a.lo.total_cmp(&b.lo));
    let mut out: Vec<Interval> = Vec::with_capacity(sorted.len());
    for iv in sorted {
        match out.last_mut() {
            Some(last) if iv.lo <= last.hi => last.hi = last.hi.max(iv.hi),
            _ => out.push(iv),
        }
    }
    DisjointIntervalSet { items: out }
}

pub fn measure(set: &DisjointIntervalSet) -> f64 {
    set.measure()
}

/// Elementary cells between consecutive distinct endpoints of a family.
#[derive(Debug, Clone, PartialEq)]
pub struct CellArrangement {
    endpoints: Vec<f64>,
}

/// Where a coordinate falls in a [`CellArrangement`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Located {
    Cell(usize),
    Endpoint(usize),
    Outside,
}

impl CellArrangement {
    pub fn new<'a>(intervals: impl IntoIterator<Item = &'a Interval>) -> Self {
        let mut endpoints: Vec<f64> = intervals.into_iter().flat_map(|i| [i.lo, i.hi]).collect();
        endpoints.sort_by(f64::total_cmp);
        endpoints.dedup();
        CellArrangement { endpoints }
    }

    pub fn cell_count(&self) -> usize {
        self.endpoints.len().saturating_sub(1)
    }

    pub fn cell(&self, k: usize) -> Interval {
        Interval {
            lo: self.endpoints[k],
            hi: self.endpoints[k + 1],
        }
    }

    pub fn endpoints(&self) -> &[f64] {
        &self.endpoints
    }

    fn index_of(&self, x: f64) -> usize {
        self.endpoints
            .binary_search_by(|e| e.total_cmp(&x))
            .expect("endpoint belongs to the arrangement")
    }

    /// Cell indices covered by an interval whose endpoints are in the arrangement.
    pub fn span(&self, iv: &Interval) -> Range<usize> {
        self.index_of(iv.lo)..self.index_of(iv.hi)
    }

    pub fn locate(&self, x: f64) -> Located {
        match self.endpoints.binary_search_by(|e| e.total_cmp(&x)) {
            Ok(k) => Located::Endpoint(k),
            Err(0) => Located::Outside,
            Err(k) if k == self.endpoints.len() => Located::Outside,
            Err(k) => Located::Cell(k - 1),
        }
    }

    /// Intervals for maximal runs `[start, end)` of consecutive cells.
    pub fn runs_to_set(&self, runs: &[(usize, usize)]) -> DisjointIntervalSet {
        DisjointIntervalSet {
            items: runs
                .iter()
                .map(|&(s, e)| Interval {
                    lo: self.endpoints[s],
                    hi: self.endpoints[e],
                })
                .collect(),
        }
    }
}

/// Multiplicity counts over the cells of an arrangement together with the
/// maximal runs of covered cells, maintained incrementally.
#[derive(Debug, Clone)]
pub struct CellCoverage {
    counts: Vec<u32>,
    runs: BTreeMap<usize, usize>,
}

impl CellCoverage {
    pub fn new(cells: usize) -> Self {
        CellCoverage {
            counts: vec![0; cells],
            runs: BTreeMap::new(),
        }
    }

    pub fn add(&mut self, cells: Range<usize>) {
        for c in cells {
            self.counts[c] += 1;
            if self.counts[c] == 1 {
                self.cover(c);
            }
        }
    }

    pub fn remove(&mut self, cells: Range<usize>) {
        for c in cells {
            debug_assert!(self.counts[c] > 0);
            self.counts[c] -= 1;
            if self.counts[c] == 0 {
                self.uncover(c);
            }
        }
    }

    fn cover(&mut self, c: usize) {
        let mut start = c;
        let mut end = c + 1;
        if let Some((&s, &e)) = self.runs.range(..c).next_back() {
            if e == c {
                start = s;
            }
        }
        if let Some(e) = self.runs.remove(&(c + 1)) {
            end = e;
        }
        self.runs.insert(start, end);
    }

    fn uncover(&mut self, c: usize) {
        let (&s, &e) = self
            .runs
            .range(..=c)
            .next_back()
            .expect("covered cell lies in a run");
        self.runs.remove(&s);
        if s < c {
            self.runs.insert(s, c);
        }
        if c + 1 < e {
            self.runs.insert(c + 1, e);
        }
    }

    pub fn runs(&self) -> Vec<(usize, usize)> {
        self.runs.iter().map(|(&s, &e)| (s, e)).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.runs.is_empty()
    }
}

/// One elementary cell with the set of inputs containing its interior.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomCell {
    pub interval: Interval,
    /// Sorted input indices (0-based).
    pub label: Vec<usize>,
}

/// Membership atoms of a finite (possibly overlapping) family: the class of
/// label `E` is the set of points lying in exactly the inputs indexed by `E`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomDecomposition {
    pub cells: Vec<AtomCell>,
}

/// Label lookup result for [`AtomDecomposition::label_at`].
#[derive(Debug, Clone, PartialEq)]
pub enum LabelAt<'a> {
    Label(&'a [usize]),
    /// Outside the union of the inputs.
    Uncovered,
    Boundary,
}

impl AtomDecomposition {
    pub fn label_at(&self, x: f64) -> LabelAt<'_> {
        let k = self.cells.partition_point(|c| c.interval.hi < x);
        match self.cells.get(k) {
            None => LabelAt::Uncovered,
            Some(c) => match c.interval.contains(x) {
                Membership::Inside => LabelAt::Label(&c.label),
                Membership::Boundary => LabelAt::Boundary,
                Membership::Outside => LabelAt::Uncovered,
            },
        }
    }

    /// The atom class for `label` (a union of cells, possibly disconnected).
    pub fn class(&self, label: &[usize]) -> DisjointIntervalSet {
        DisjointIntervalSet {
            items: self
                .cells
                .iter()
                .filter(|c| c.label == label)
                .map(|c| c.interval)
                .collect(),
        }
    }

    pub fn measure(&self) -> f64 {
        self.cells.iter().map(|c| c.interval.len()).sum()
    }
}

/// Sweeps the sorted endpoints; each elementary cell inside the union gets
/// the label of its interior. Boundary points are dropped.
pub fn atoms(intervals: &[Interval]) -> AtomDecomposition {
    let arr = CellArrangement::new(intervals);
    let n_cells = arr.cell_count();
    let mut starts: Vec<Vec<usize>> = vec![Vec::new(); n_cells + 1];
    let mut ends: Vec<Vec<usize>> = vec![Vec::new(); n_cells + 1];
    for (i, iv) in intervals.iter().enumerate() {
        let span = arr.span(iv);
        starts[span.start].push(i);
        ends[span.end].push(i);
    }
    let mut active = BTreeSet::new();
    let mut cells: Vec<AtomCell> = Vec::new();
    for k in 0..n_cells {
        for i in &ends[k] {
            active.remove(i);
        }
        active.extend(starts[k].iter().copied());
        if active.is_empty() {
            continue;
        }
        let label: Vec<usize> = active.iter().copied().collect();
        let interval = arr.cell(k);
        match cells.last_mut() {
            Some(prev) if prev.interval.hi == interval.lo && prev.label == label => {
                prev.interval.hi = interval.hi;
            }
            _ => cells.push(AtomCell { interval, label }),
        }
    }
    AtomDecomposition { cells }
}
