//! One- and two-dimensional simultaneous γ-dilation.
//!
//! The 1D dilation walks the input intervals left to right. Interval `I_k`
//! grows a left piece `I'_k` (sharing its right end) and a right piece
//! `I''_k` (sharing its left end), each picking up exactly `γ|I_k|` of
//! measure not occupied by the earlier dilated pieces or the later inputs.
//!
//! The 2D dilation goes through the projection atoms. Membership families are
//! never enumerated as power sets: every family is a label carried by a cell
//! of an endpoint arrangement, and unions of labelled atoms are maintained
//! incrementally as runs of covered cells.

use std::collections::hash_map::Entry;
use std::collections::{BTreeMap, HashMap};
use std::ops::Bound::{Excluded, Unbounded};
use std::ops::Range;
use std::sync::Arc;

use ordered_float::OrderedFloat;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval1d::{
    CellArrangement, CellCoverage, DisjointIntervalSet, Interval, Membership,
};

/// Result of dilating one input interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DilationPiece {
    /// Position of the input in the caller's list.
    pub index: usize,
    pub input: Interval,
    /// `I'_k`: same right end as the input, extended leftwards.
    pub left: Interval,
    /// `I''_k`: same left end as the input, extended rightwards.
    pub right: Interval,
    /// `Î_k = I'_k ∪ I''_k`.
    pub hull: Interval,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DilationResult1D {
    /// Pieces in left-to-right processing order.
    pub pieces: Vec<DilationPiece>,
    pub union: DisjointIntervalSet,
    pub gamma: f64,
    pub input_measure: f64,
}

impl DilationResult1D {
    pub fn measure(&self) -> f64 {
        self.union.measure()
    }

    /// `(2γ + 1) Σ |I_k|`.
    pub fn identity_rhs(&self) -> f64 {
        (2.0 * self.gamma + 1.0) * self.input_measure
    }

    pub fn contains(&self, x: f64) -> Membership {
        self.union.contains(x)
    }
}

fn check_gamma(gamma: f64) -> Result<()> {
    if gamma.is_finite() && gamma > 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidGamma(gamma))
    }
}

type Occupied = BTreeMap<OrderedFloat<f64>, f64>;

/// Inserts `(lo, hi)` and merges every component it overlaps or touches.
fn occupy(occ: &mut Occupied, lo: f64, hi: f64) {
    let mut new_lo = lo;
    let mut new_hi = hi;
    if let Some((&a, &b)) = occ.range(..=OrderedFloat(lo)).next_back() {
        if b >= lo {
            new_lo = a.0;
            new_hi = new_hi.max(b);
        }
    }
    let doomed: Vec<OrderedFloat<f64>> = occ
        .range(OrderedFloat(new_lo)..=OrderedFloat(hi))
        .map(|(&a, _)| a)
        .collect();
    for a in doomed {
        let b = occ.remove(&a).expect("key collected from the map");
        new_hi = new_hi.max(b);
    }
    occ.insert(OrderedFloat(new_lo), new_hi);
}

/// Left end of the interval ending at `from` (the start of an occupied
/// component) that collects `need` units of free measure.
fn extend_left(occ: &Occupied, mut from: f64, mut need: f64) -> f64 {
    loop {
        match occ.range(..OrderedFloat(from)).next_back() {
            None => return from - need,
            Some((&a, &b)) => {
                let gap = from - b;
                if need <= gap {
                    return from - need;
                }
                need -= gap;
                from = a.0;
            }
        }
    }
}

fn extend_right(occ: &Occupied, mut from: f64, mut need: f64) -> f64 {
    loop {
        match occ.range((Excluded(OrderedFloat(from)), Unbounded)).next() {
            None => return from + need,
            Some((&a, &b)) => {
                let gap = a.0 - from;
                if need <= gap {
                    return from + need;
                }
                need -= gap;
                from = b;
            }
        }
    }
}

/// Simultaneous γ-dilation of a pairwise disjoint family (touching allowed).
pub fn dilate_1d(inputs: &[Interval], gamma: f64) -> Result<DilationResult1D> {
    check_gamma(gamma)?;
    dilate_1d_unchecked(inputs, gamma)
}

/// As [`dilate_1d`] for any finite `γ > 0`. The construction is well
/// defined at `γ = 1`, which is the case worked by hand; the density
/// estimates built on it need `γ > 1`.
pub fn dilate_1d_unchecked(inputs: &[Interval], gamma: f64) -> Result<DilationResult1D> {
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(Error::InvalidGamma(gamma));
    }
    let mut order: Vec<usize> = (0..inputs.len()).collect();
    order.sort_by(|&a, &b| inputs[a].lo().total_cmp(&inputs[b].lo()));
    for w in order.windows(2) {
        if inputs[w[0]].hi() > inputs[w[1]].lo() {
            return Err(Error::OverlappingInputs(w[0].min(w[1]), w[0].max(w[1])));
        }
    }

    let mut occ = Occupied::new();
    for &i in &order {
        occupy(&mut occ, inputs[i].lo(), inputs[i].hi());
    }

    let mut pieces = Vec::with_capacity(inputs.len());
    let mut input_measure = 0.0;
    for &i in &order {
        let input = inputs[i];
        input_measure += input.len();
        let (&a, &b) = occ
            .range(..=OrderedFloat(input.lo()))
            .next_back()
            .expect("every input lies in an occupied component");
        debug_assert!(b >= input.hi());
        let need = gamma * input.len();
        let lo = extend_left(&occ, a.0, need);
        let hi = extend_right(&occ, b, need);
        occupy(&mut occ, lo, hi);
        pieces.push(DilationPiece {
            index: i,
            input,
            left: Interval::new(lo, input.hi())?,
            right: Interval::new(input.lo(), hi)?,
            hull: Interval::new(lo, hi)?,
        });
    }

    let union = occ
        .into_iter()
        .map(|(a, b)| Interval::new(a.0, b))
        .collect::<Result<Vec<_>>>()?;
    Ok(DilationResult1D {
        pieces,
        union: DisjointIntervalSet::from_sorted_unchecked(union),
        gamma,
        input_measure,
    })
}

/// Union of the 1D dilation as a disjoint set (convenience for callers that
/// do not need the per-input pieces).
pub fn dilate_1d_union(inputs: &DisjointIntervalSet, gamma: f64) -> Result<DisjointIntervalSet> {
    check_gamma(gamma)?;
    Ok(dilate_1d_unchecked(inputs.items(), gamma)?.union)
}

/// Open axis-aligned rectangle `x × y`; JSON form `[x0, x1, y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 4]", into = "[f64; 4]")]
pub struct Rectangle {
    pub x: Interval,
    pub y: Interval,
}

impl TryFrom<[f64; 4]> for Rectangle {
    type Error = Error;

    fn try_from(v: [f64; 4]) -> Result<Self> {
        Rectangle::new(v[0], v[1], v[2], v[3])
    }
}

impl From<Rectangle> for [f64; 4] {
    fn from(r: Rectangle) -> Self {
        [r.x.lo(), r.x.hi(), r.y.lo(), r.y.hi()]
    }
}

impl Rectangle {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Result<Self> {
        Ok(Rectangle {
            x: Interval::new(x0, x1)?,
            y: Interval::new(y0, y1)?,
        })
    }

    /// Open square with lower-left corner `(x, y)` and side `w`.
    pub fn square(x: f64, y: f64, w: f64) -> Result<Self> {
        Rectangle::new(x, x + w, y, y + w)
    }

    pub fn area(&self) -> f64 {
        self.x.len() * self.y.len()
    }

    /// Euclidean diagonal.
    pub fn diam(&self) -> f64 {
        self.x.len().hypot(self.y.len())
    }

    pub fn overlap_area(&self, other: &Rectangle) -> f64 {
        self.x.overlap(&other.x) * self.y.overlap(&other.y)
    }

    pub fn intersects(&self, other: &Rectangle) -> bool {
        self.x.intersects(&other.x) && self.y.intersects(&other.y)
    }

    pub fn contains(&self, p: (f64, f64)) -> Membership {
        match (self.x.contains(p.0), self.y.contains(p.1)) {
            (Membership::Inside, Membership::Inside) => Membership::Inside,
            (Membership::Outside, _) | (_, Membership::Outside) => Membership::Outside,
            _ => Membership::Boundary,
        }
    }

    /// Intersection, if it has interior.
    pub fn clip(&self, other: &Rectangle) -> Option<Rectangle> {
        let x0 = self.x.lo().max(other.x.lo());
        let x1 = self.x.hi().min(other.x.hi());
        let y0 = self.y.lo().max(other.y.lo());
        let y1 = self.y.hi().min(other.y.hi());
        Rectangle::new(x0, x1, y0, y1).ok()
    }
}

/// One vertical strip of a [`RectUnion`]: `x × ys`.
#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub x: Interval,
    pub ys: Arc<DisjointIntervalSet>,
}

/// Union of pairwise disjoint rectangles, stored as sorted disjoint columns
/// (the `V_G × H_G` products of the 2D dilation).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RectUnion {
    columns: Vec<Column>,
    pub gamma: Option<f64>,
    /// Schedule block this union dilates, if any.
    pub block: Option<u32>,
}

impl RectUnion {
    pub fn from_columns(columns: Vec<Column>) -> Self {
        RectUnion {
            columns,
            gamma: None,
            block: None,
        }
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn rects(&self) -> impl Iterator<Item = Rectangle> + '_ {
        self.columns
            .iter()
            .flat_map(|c| c.ys.items().iter().map(move |&y| Rectangle { x: c.x, y }))
    }

    pub fn rect_count(&self) -> usize {
        self.columns.iter().map(|c| c.ys.len()).sum()
    }

    pub fn measure(&self) -> f64 {
        self.columns.iter().map(|c| c.x.len() * c.ys.measure()).sum()
    }

    pub fn bounding_box(&self) -> Option<Rectangle> {
        let first = self.columns.first()?;
        let last = self.columns.last()?;
        let (mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY);
        for c in &self.columns {
            if let Some(h) = c.ys.hull() {
                y0 = y0.min(h.lo());
                y1 = y1.max(h.hi());
            }
        }
        Rectangle::new(first.x.lo(), last.x.hi(), y0, y1).ok()
    }

    /// Exact point location against the pieces; points on any piece's
    /// boundary that lie in no open piece are `Boundary`.
    pub fn contains(&self, p: (f64, f64)) -> Membership {
        let (x, y) = p;
        let k = self.columns.partition_point(|c| c.x.hi() < x);
        let Some(col) = self.columns.get(k) else {
            return Membership::Outside;
        };
        match col.x.contains(x) {
            Membership::Inside => col.ys.contains(y),
            Membership::Outside => Membership::Outside,
            Membership::Boundary => {
                let touches = |c: &Column| c.ys.contains(y) != Membership::Outside;
                let next_touches = self
                    .columns
                    .get(k + 1)
                    .is_some_and(|c| c.x.lo() == x && touches(c));
                if touches(col) || next_touches {
                    Membership::Boundary
                } else {
                    Membership::Outside
                }
            }
        }
    }
}

/// JSON artifact form: `{"rects": [[x0,x1,y0,y1], ...], "measure": M, "identity_rhs": R}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RectUnionArtifact {
    pub rects: Vec<Rectangle>,
    pub measure: f64,
    pub identity_rhs: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub block: Option<u32>,
}

impl RectUnionArtifact {
    pub fn new(u: &RectUnion, identity_rhs: f64) -> Self {
        RectUnionArtifact {
            rects: u.rects().collect(),
            measure: u.measure(),
            identity_rhs,
            gamma: u.gamma,
            block: u.block,
        }
    }
}

/// Checks pairwise disjointness of open rectangles with an x-sorted sweep.
pub fn check_disjoint(rects: &[Rectangle]) -> Result<()> {
    let mut order: Vec<usize> = (0..rects.len()).collect();
    order.sort_by(|&a, &b| rects[a].x.lo().total_cmp(&rects[b].x.lo()));
    // Active rectangles kept in a list pruned by x extent.
    let mut active: Vec<usize> = Vec::new();
    for &i in &order {
        let x0 = rects[i].x.lo();
        active.retain(|&j| rects[j].x.hi() > x0);
        for &j in &active {
            if rects[i].intersects(&rects[j]) {
                return Err(Error::OverlappingCubes(i.min(j), i.max(j)));
            }
        }
        active.push(i);
    }
    Ok(())
}

/// Consecutive cell indices folded into ranges.
fn push_cell(ranges: &mut Vec<Range<usize>>, k: usize) {
    match ranges.last_mut() {
        Some(r) if r.end == k => r.end = k + 1,
        _ => ranges.push(k..k + 1),
    }
}

/// Two-dimensional simultaneous γ-dilation of pairwise disjoint rectangles.
///
/// Pipeline: x- and y-atoms of the projections; for every realized y-label
/// `β` the x-set `⋃_{α ∈ F_β} R_α` (the union of the x-projections of the
/// cubes in `β`) and its dilation `D_β`, deduplicated; the atoms `V_G` of
/// the `D_β` arrangement; for every realized `G` the dilation `H_G` of
/// `⋃_{β ∈ G} Q_β`.
pub fn dilate_2d(cubes: &[Rectangle], gamma: f64) -> Result<RectUnion> {
    check_gamma(gamma)?;
    dilate_2d_unchecked(cubes, gamma)
}

/// As [`dilate_2d`] for any finite `γ > 0` (see [`dilate_1d_unchecked`]).
pub fn dilate_2d_unchecked(cubes: &[Rectangle], gamma: f64) -> Result<RectUnion> {
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(Error::InvalidGamma(gamma));
    }
    check_disjoint(cubes)?;
    if cubes.is_empty() {
        return Ok(RectUnion {
            gamma: Some(gamma),
            ..RectUnion::default()
        });
    }
    let x_arr = CellArrangement::new(cubes.iter().map(|c| &c.x));
    let y_arr = CellArrangement::new(cubes.iter().map(|c| &c.y));

    // Sweep the y-cells bottom-up; the covered x-runs of the active cubes
    // are exactly the x-set of that y-cell's label.
    let n_y = y_arr.cell_count();
    let mut enter: Vec<Vec<usize>> = vec![Vec::new(); n_y + 1];
    let mut leave: Vec<Vec<usize>> = vec![Vec::new(); n_y + 1];
    for (i, c) in cubes.iter().enumerate() {
        let s = y_arr.span(&c.y);
        enter[s.start].push(i);
        leave[s.end].push(i);
    }
    let mut x_cov = CellCoverage::new(x_arr.cell_count());
    let mut d_index: HashMap<Vec<(usize, usize)>, usize> = HashMap::new();
    let mut d_keys: Vec<Vec<(usize, usize)>> = Vec::new();
    let mut d_groups: Vec<Vec<Range<usize>>> = Vec::new();
    for k in 0..n_y {
        for &i in &leave[k] {
            x_cov.remove(x_arr.span(&cubes[i].x));
        }
        for &i in &enter[k] {
            x_cov.add(x_arr.span(&cubes[i].x));
        }
        if x_cov.is_empty() {
            continue;
        }
        let runs = x_cov.runs();
        let d = match d_index.entry(runs) {
            Entry::Occupied(e) => *e.get(),
            Entry::Vacant(e) => {
                d_keys.push(e.key().clone());
                d_groups.push(Vec::new());
                *e.insert(d_keys.len() - 1)
            }
        };
        push_cell(&mut d_groups[d], k);
    }

    let d_sets: Vec<DisjointIntervalSet> = d_keys
        .par_iter()
        .map(|runs| Ok(dilate_1d_unchecked(x_arr.runs_to_set(runs).items(), gamma)?.union))
        .collect::<Result<_>>()?;

    // Arrangement of all D_β endpoints; each cell has a constant G.
    let v_arr = CellArrangement::new(d_sets.iter().flat_map(|s| s.items().iter()));
    let n_v = v_arr.cell_count();
    let mut on: Vec<Vec<usize>> = vec![Vec::new(); n_v + 1];
    let mut off: Vec<Vec<usize>> = vec![Vec::new(); n_v + 1];
    for (d, set) in d_sets.iter().enumerate() {
        for iv in set.items() {
            let s = v_arr.span(iv);
            on[s.start].push(d);
            off[s.end].push(d);
        }
    }
    let mut y_cov = CellCoverage::new(n_y);
    let mut h_cache: HashMap<Vec<(usize, usize)>, Arc<DisjointIntervalSet>> = HashMap::new();
    let mut columns = Vec::new();
    for k in 0..n_v {
        for &d in &off[k] {
            for r in &d_groups[d] {
                y_cov.remove(r.clone());
            }
        }
        for &d in &on[k] {
            for r in &d_groups[d] {
                y_cov.add(r.clone());
            }
        }
        if y_cov.is_empty() {
            continue;
        }
        let runs = y_cov.runs();
        let ys = match h_cache.entry(runs) {
            Entry::Occupied(e) => Arc::clone(e.get()),
            Entry::Vacant(e) => {
                let h = dilate_1d_unchecked(y_arr.runs_to_set(e.key()).items(), gamma)?.union;
                Arc::clone(e.insert(Arc::new(h)))
            }
        };
        columns.push(Column {
            x: v_arr.cell(k),
            ys,
        });
    }
    Ok(RectUnion {
        columns,
        gamma: Some(gamma),
        block: None,
    })
}

/// `(2γ + 1)^2 Σ |cube|`.
pub fn identity_rhs_2d(cubes: &[Rectangle], gamma: f64) -> f64 {
    (2.0 * gamma + 1.0).powi(2) * cubes.iter().map(Rectangle::area).sum::<f64>()
}

/// Outcome of comparing a density ratio against `2/γ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub lhs: f64,
    pub bound: f64,
    pub pass: bool,
}

/// `|rect ∩ ⋃cubes| / |rect|` against `2/γ` for a point outside the
/// γ-dilation of the cubes.
pub fn ratio_bound_witness(
    cubes: &[Rectangle],
    gamma: f64,
    x: (f64, f64),
    rect: &Rectangle,
) -> Result<WitnessReport> {
    let dil = dilate_2d(cubes, gamma)?;
    ratio_bound_witness_with(&dil, cubes, gamma, x, rect)
}

/// As [`ratio_bound_witness`] with a precomputed dilation.
pub fn ratio_bound_witness_with(
    dilation: &RectUnion,
    cubes: &[Rectangle],
    gamma: f64,
    x: (f64, f64),
    rect: &Rectangle,
) -> Result<WitnessReport> {
    if dilation.contains(x) != Membership::Outside {
        return Err(Error::PointNotOutside(x.0, x.1));
    }
    if rect.contains(x) == Membership::Outside {
        return Err(Error::PointNotInRect);
    }
    let covered: f64 = cubes.iter().map(|c| c.overlap_area(rect)).sum();
    let lhs = covered / rect.area();
    let bound = 2.0 / gamma;
    Ok(WitnessReport {
        lhs,
        bound,
        pass: lhs < bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, hi).unwrap()
    }

    fn sq(x: f64, y: f64, w: f64) -> Rectangle {
        Rectangle::square(x, y, w).unwrap()
    }

    fn pairs(s: &DisjointIntervalSet) -> Vec<(f64, f64)> {
        s.items().iter().map(|i| (i.lo(), i.hi())).collect()
    }

    #[test]
    fn single_interval() {
        let r = dilate_1d(&[iv(0.0, 1.0)], 2.0).unwrap();
        assert_eq!(pairs(&r.union), vec![(-2.0, 3.0)]);
        assert_eq!(r.pieces[0].left, iv(-2.0, 1.0));
        assert_eq!(r.pieces[0].right, iv(0.0, 3.0));
        assert_eq!(r.measure(), 5.0);
        assert_eq!(r.identity_rhs(), 5.0);
    }

    #[test]
    fn two_intervals_hand_execution() {
        let r = dilate_1d_unchecked(&[iv(0.0, 1.0), iv(2.0, 3.0)], 1.0).unwrap();
        assert_eq!(r.pieces[0].hull, iv(-1.0, 2.0));
        assert_eq!(r.pieces[1].left, iv(-2.0, 3.0));
        assert_eq!(r.pieces[1].right, iv(2.0, 4.0));
        assert_eq!(pairs(&r.union), vec![(-2.0, 4.0)]);
        assert_eq!(r.measure(), 6.0);

        let r = dilate_1d(&[iv(2.0, 3.0), iv(0.0, 1.0)], 2.0).unwrap();
        assert_eq!(r.pieces[0].index, 1);
        assert!((r.measure() - 10.0).abs() < 1e-12);
    }

    #[test]
    fn hand_checks_at_gamma_one() {
        let u = dilate_2d_unchecked(&[sq(0.0, 0.0, 1.0)], 1.0).unwrap();
        assert_eq!(u.rects().collect::<Vec<_>>(), vec![Rectangle::new(-1.0, 2.0, -1.0, 2.0).unwrap()]);
        assert_eq!(u.measure(), 9.0);

        let u = dilate_2d_unchecked(&[sq(0.0, 0.0, 1.0), sq(3.0, 3.0, 1.0)], 1.0).unwrap();
        assert_eq!(u.measure(), 18.0);

        let cubes = [sq(0.0, 0.0, 1.0), Rectangle::new(1.5, 2.5, 3.0, 4.0).unwrap()];
        let u = dilate_2d_unchecked(&cubes, 1.0).unwrap();
        let xs: Vec<(f64, f64)> = u.columns().iter().map(|c| (c.x.lo(), c.x.hi())).collect();
        assert_eq!(xs, vec![(-1.0, 0.5), (0.5, 2.0), (2.0, 3.5)]);
        assert_eq!(pairs(&u.columns()[0].ys), vec![(-1.0, 2.0)]);
        assert_eq!(pairs(&u.columns()[1].ys), vec![(-1.0, 5.0)]);
        assert_eq!(pairs(&u.columns()[2].ys), vec![(2.0, 5.0)]);
        assert_eq!(u.measure(), 18.0);
    }

    #[test]
    fn empty_and_invalid_inputs() {
        let r = dilate_1d(&[], 2.0).unwrap();
        assert!(r.union.is_empty());
        assert_eq!(r.measure(), 0.0);
        assert_eq!(dilate_1d(&[iv(0.0, 1.0)], 1.0), Err(Error::InvalidGamma(1.0)));
        assert_eq!(
            dilate_1d(&[iv(0.0, 2.0), iv(1.0, 3.0)], 2.0),
            Err(Error::OverlappingInputs(0, 1))
        );
        assert!(dilate_1d(&[iv(0.0, 1.0), iv(1.0, 2.0)], 2.0).is_ok());
    }

    #[test]
    fn single_cube_2d() {
        let u = dilate_2d(&[sq(0.0, 0.0, 1.0)], 2.0).unwrap();
        let rects: Vec<Rectangle> = u.rects().collect();
        assert_eq!(rects, vec![Rectangle::new(-2.0, 3.0, -2.0, 3.0).unwrap()]);
        assert_eq!(u.measure(), 25.0);
        assert_eq!(u.contains((0.5, 0.5)), Membership::Inside);
        assert_eq!(u.contains((10.0, 10.0)), Membership::Outside);
        assert_eq!(u.contains((3.0, 0.0)), Membership::Boundary);
    }

    #[test]
    fn overlapping_projection_case() {
        // With γ = 2 the column layout of the hand-checked γ = 1 case is
        // reproduced with scaled extents.
        let cubes = [sq(0.0, 0.0, 1.0), Rectangle::new(1.5, 2.5, 3.0, 4.0).unwrap()];
        let u = dilate_2d(&cubes, 2.0).unwrap();
        let xs: Vec<(f64, f64)> = u.columns().iter().map(|c| (c.x.lo(), c.x.hi())).collect();
        assert_eq!(xs, vec![(-2.0, -0.5), (-0.5, 3.0), (3.0, 4.5)]);
        assert_eq!(pairs(&u.columns()[0].ys), vec![(-2.0, 3.0)]);
        assert_eq!(pairs(&u.columns()[1].ys), vec![(-4.0, 6.0)]);
        assert_eq!(pairs(&u.columns()[2].ys), vec![(1.0, 6.0)]);
        assert!((u.measure() - 50.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_overlapping_cubes() {
        let cubes = [sq(0.0, 0.0, 1.0), sq(0.5, 0.5, 1.0)];
        assert_eq!(dilate_2d(&cubes, 2.0), Err(Error::OverlappingCubes(0, 1)));
        let touching = [sq(0.0, 0.0, 1.0), sq(1.0, 0.0, 1.0)];
        assert!(dilate_2d(&touching, 2.0).is_ok());
    }

    #[test]
    fn witness_examples() {
        let cubes = [sq(0.0, 0.0, 1.0)];
        let r = ratio_bound_witness(
            &cubes,
            4.0,
            (-5.0, 0.5),
            &Rectangle::new(-6.0, -4.0, 0.0, 1.0).unwrap(),
        )
        .unwrap();
        assert_eq!((r.lhs, r.bound, r.pass), (0.0, 0.5, true));

        let rect = Rectangle::new(-4.2, 0.2, 0.3, 0.8).unwrap();
        let r = ratio_bound_witness(&cubes, 4.0, (-4.1, 0.5), &rect).unwrap();
        let expected = (0.2 * 0.5) / (4.4 * 0.5);
        assert!((r.lhs - expected).abs() < 1e-12);
        assert!(r.pass);

        assert_eq!(
            ratio_bound_witness(&cubes, 4.0, (0.5, 0.5), &rect),
            Err(Error::PointNotOutside(0.5, 0.5))
        );
    }

    #[test]
    fn rectangle_json_shape() {
        let r = Rectangle::new(0.0, 1.0, 2.0, 3.0).unwrap();
        assert_eq!(serde_json::to_string(&r).unwrap(), "[0.0,1.0,2.0,3.0]");
        assert!(serde_json::from_str::<Rectangle>("[1,0,0,1]").is_err());
    }
}
