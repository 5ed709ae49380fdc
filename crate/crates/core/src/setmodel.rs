//! Truncated compact sets `K_N = outer \ ⋃_{n<=N} cube_n`, exact density
//! ratios, and the exceptional cover `C_m`.

use std::f64::consts::LN_2;
use std::ops::RangeInclusive;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::auxfn::Schedule;
use crate::dilation::{check_disjoint, dilate_2d, identity_rhs_2d, RectUnion, Rectangle};
use crate::error::{Error, Result};
use crate::interval1d::Membership;
use crate::weights::{ln_add_exp, SeqKind, WeightSequence};

/// Open square with lower-left corner `(x, y)` and side `w`; JSON `[x, y, w]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 3]", into = "[f64; 3]")]
pub struct Cube {
    pub x: f64,
    pub y: f64,
    pub w: f64,
}

impl From<[f64; 3]> for Cube {
    fn from(v: [f64; 3]) -> Self {
        Cube { x: v[0], y: v[1], w: v[2] }
    }
}

impl From<Cube> for [f64; 3] {
    fn from(c: Cube) -> Self {
        [c.x, c.y, c.w]
    }
}

impl Cube {
    pub fn rect(&self) -> Result<Rectangle> {
        Rectangle::square(self.x, self.y, self.w)
    }

    fn x1(&self) -> f64 {
        self.x + self.w
    }

    fn y1(&self) -> f64 {
        self.y + self.w
    }

    pub fn overlap_area(&self, r: &Rectangle) -> f64 {
        let dx = self.x1().min(r.x.hi()) - self.x.max(r.x.lo());
        let dy = self.y1().min(r.y.hi()) - self.y.max(r.y.lo());
        if dx > 0.0 && dy > 0.0 {
            dx * dy
        } else {
            0.0
        }
    }

    pub fn contains(&self, p: (f64, f64)) -> Membership {
        let inside = |v: f64, lo: f64, hi: f64| {
            if v > lo && v < hi {
                Membership::Inside
            } else if v == lo || v == hi {
                Membership::Boundary
            } else {
                Membership::Outside
            }
        };
        match (inside(p.0, self.x, self.x1()), inside(p.1, self.y, self.y1())) {
            (Membership::Inside, Membership::Inside) => Membership::Inside,
            (Membership::Outside, _) | (_, Membership::Outside) => Membership::Outside,
            _ => Membership::Boundary,
        }
    }

    /// Euclidean distance from `p` to the closed square.
    pub fn distance(&self, p: (f64, f64)) -> f64 {
        let dx = (self.x - p.0).max(p.0 - self.x1()).max(0.0);
        let dy = (self.y - p.1).max(p.1 - self.y1()).max(0.0);
        dx.hypot(dy)
    }
}

/// Cubes bucketed by power-of-two size class, each bucket sorted by left
/// edge, so a query only walks cubes whose x-extent can reach it.
#[derive(Debug, Clone, Default)]
struct CubeIndex {
    buckets: Vec<Bucket>,
}

#[derive(Debug, Clone)]
struct Bucket {
    max_w: f64,
    x0: Vec<f64>,
    ids: Vec<usize>,
}

impl CubeIndex {
    fn new(cubes: &[Cube]) -> Self {
        let mut classes: Vec<(i32, usize)> = cubes
            .iter()
            .enumerate()
            .map(|(i, c)| (c.w.log2().floor() as i32, i))
            .collect();
        classes.sort_by_key(|&(k, i)| (std::cmp::Reverse(k), i));
        let mut buckets = Vec::new();
        for group in classes.chunk_by(|a, b| a.0 == b.0) {
            let mut ids: Vec<usize> = group.iter().map(|&(_, i)| i).collect();
            ids.sort_by(|&a, &b| cubes[a].x.total_cmp(&cubes[b].x).then(a.cmp(&b)));
            buckets.push(Bucket {
                max_w: ids.iter().map(|&i| cubes[i].w).fold(0.0, f64::max),
                x0: ids.iter().map(|&i| cubes[i].x).collect(),
                ids,
            });
        }
        CubeIndex { buckets }
    }

    /// Calls `f` for every cube whose closed x-extent meets `[x0, x1]`
    /// (and possibly a few more); callers do the exact test.
    fn for_each_near(&self, x0: f64, x1: f64, mut f: impl FnMut(usize)) {
        for b in &self.buckets {
            let start = b.x0.partition_point(|&v| v < x0 - b.max_w);
            let end = b.x0.partition_point(|&v| v <= x1);
            for &i in &b.ids[start..end] {
                f(i);
            }
        }
    }
}

#[derive(Serialize, Deserialize)]
struct ModelRepr {
    outer: Rectangle,
    cubes: Vec<Cube>,
    trunc: usize,
    seq: WeightSequence,
}

/// `K_N`: the open box `outer` minus the first `N` cubes of a weight
/// sequence, cube `n` having side `w_n`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "ModelRepr", into = "ModelRepr")]
pub struct CompactSetModel {
    outer: Rectangle,
    cubes: Vec<Cube>,
    seq: WeightSequence,
    index: CubeIndex,
}

impl PartialEq for CompactSetModel {
    fn eq(&self, other: &Self) -> bool {
        self.outer == other.outer && self.cubes == other.cubes && self.seq == other.seq
    }
}

impl From<CompactSetModel> for ModelRepr {
    fn from(m: CompactSetModel) -> Self {
        ModelRepr {
            outer: m.outer,
            trunc: m.cubes.len(),
            cubes: m.cubes,
            seq: m.seq,
        }
    }
}

impl TryFrom<ModelRepr> for CompactSetModel {
    type Error = Error;

    fn try_from(r: ModelRepr) -> Result<Self> {
        if r.trunc != r.cubes.len() {
            return Err(Error::Parse(format!(
                "trunc = {} but {} cubes listed",
                r.trunc,
                r.cubes.len()
            )));
        }
        CompactSetModel::new(r.outer, r.cubes, r.seq)
    }
}

const SIDE_REL_TOL: f64 = 1e-12;

impl CompactSetModel {
    /// Validates an explicit placement.
    pub fn new(outer: Rectangle, cubes: Vec<Cube>, seq: WeightSequence) -> Result<Self> {
        let mut rects = Vec::with_capacity(cubes.len());
        for (i, c) in cubes.iter().enumerate() {
            let n = i as u64 + 1;
            let w = seq.w(n)?;
            if ((c.w - w) / w).abs() > SIDE_REL_TOL {
                return Err(Error::InvalidConfig(format!("cube {n} has side {} but w_{n} = {w}", c.w)));
            }
            let r = c.rect()?;
            if r.x.lo() < outer.x.lo()
                || r.x.hi() > outer.x.hi()
                || r.y.lo() < outer.y.lo()
                || r.y.hi() > outer.y.hi()
            {
                return Err(Error::InvalidConfig(format!("cube {n} leaves the outer box")));
            }
            rects.push(r);
        }
        check_disjoint(&rects)?;
        let index = CubeIndex::new(&cubes);
        Ok(CompactSetModel {
            outer,
            cubes,
            seq,
            index,
        })
    }

    pub fn outer(&self) -> &Rectangle {
        &self.outer
    }

    pub fn cubes(&self) -> &[Cube] {
        &self.cubes
    }

    pub fn seq(&self) -> &WeightSequence {
        &self.seq
    }

    pub fn trunc(&self) -> usize {
        self.cubes.len()
    }

    /// Cube `n` (1-based).
    pub fn cube(&self, n: usize) -> &Cube {
        &self.cubes[n - 1]
    }

    /// `|K_N| = |outer| - Σ_{n<=N} w_n^2`.
    pub fn k_measure(&self) -> Result<f64> {
        Ok(self.outer.area() - self.seq.partial_area(self.trunc() as u64)?)
    }

    /// Measure removed by the unmaterialized cubes, `r_{N+1}`.
    pub fn residual(&self) -> Result<f64> {
        let n = self.trunc() as u64 + 1;
        if let SeqKind::Explicit { w2 } = self.seq.kind() {
            if n > w2.len() as u64 {
                return Ok(0.0);
            }
        }
        Ok(self.seq.tail_sum(n)?.value())
    }

    /// `Σ_{n<=N} |rect ∩ cube_n|`.
    pub fn covered_area(&self, rect: &Rectangle) -> f64 {
        let mut acc = 0.0;
        self.index.for_each_near(rect.x.lo(), rect.x.hi(), |i| {
            acc += self.cubes[i].overlap_area(rect);
        });
        acc
    }

    /// Whether `rect` meets a cube whose 1-based index lies in `ids`.
    pub fn hits_range(&self, rect: &Rectangle, ids: RangeInclusive<usize>) -> bool {
        let mut hit = false;
        self.index.for_each_near(rect.x.lo(), rect.x.hi(), |i| {
            hit = hit || (ids.contains(&(i + 1)) && self.cubes[i].overlap_area(rect) > 0.0);
        });
        hit
    }

    /// Open cube containing `p`, or the first cube whose boundary holds it.
    pub fn locate(&self, p: (f64, f64)) -> Option<(usize, Membership)> {
        let mut hit: Option<(usize, Membership)> = None;
        self.index.for_each_near(p.0, p.0, |i| {
            match self.cubes[i].contains(p) {
                Membership::Inside => hit = Some((i + 1, Membership::Inside)),
                Membership::Boundary if hit.is_none() => hit = Some((i + 1, Membership::Boundary)),
                _ => {}
            }
        });
        hit
    }
}

/// Shelf packing: rows left to right, each as tall as its first cube,
/// stacked bottom-up with no margin.
pub fn build_packing(seq: &WeightSequence, n: usize, outer: Rectangle) -> Result<CompactSetModel> {
    let total_area = seq.partial_area(n as u64)?;
    let w1 = if n == 0 { 0.0 } else { seq.w(1)? };
    let infeasible = || Error::PackingInfeasible {
        total_area,
        w1,
        outer_w: outer.x.len(),
        outer_h: outer.y.len(),
    };
    if total_area > 0.5 * outer.area() || w1 > outer.x.len().min(outer.y.len()) {
        return Err(infeasible());
    }
    let mut cubes = Vec::with_capacity(n);
    let (mut x, mut row_y, mut row_h) = (outer.x.lo(), outer.y.lo(), 0.0);
    for k in 1..=n as u64 {
        let w = seq.w(k)?;
        if cubes.is_empty() {
            row_h = w;
        } else if x + w > outer.x.hi() {
            row_y += row_h;
            row_h = w;
            x = outer.x.lo();
        }
        if row_y + w > outer.y.hi() {
            return Err(infeasible());
        }
        cubes.push(Cube { x, y: row_y, w });
        x += w;
    }
    CompactSetModel::new(outer, cubes, seq.clone())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityRatio {
    /// `|rect ∩ K_N| / |rect|`.
    pub ratio_n: f64,
    /// `ratio_n - r_{N+1}/|rect|`, clamped at 0; the true ratio lies in
    /// `[lower_bound_true, ratio_n]`.
    pub lower_bound_true: f64,
    /// The rectangle was clipped to the outer box.
    pub clipped: bool,
}

pub fn density_ratio(model: &CompactSetModel, rect: &Rectangle) -> Result<DensityRatio> {
    let residual = model.residual()?;
    density_ratio_with_residual(model, rect, residual)
}

/// As [`density_ratio`] with `r_{N+1}` precomputed.
pub fn density_ratio_with_residual(
    model: &CompactSetModel,
    rect: &Rectangle,
    residual: f64,
) -> Result<DensityRatio> {
    let clip = rect.clip(model.outer()).ok_or(Error::EmptyRect)?;
    let area = clip.area();
    if !(area > 0.0) {
        return Err(Error::EmptyRect);
    }
    let ratio_n = (1.0 - model.covered_area(&clip) / area).clamp(0.0, 1.0);
    Ok(DensityRatio {
        ratio_n,
        lower_bound_true: (ratio_n - residual / area).max(0.0),
        clipped: clip != *rect,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoverBlock {
    pub s: u32,
    pub gamma: f64,
    /// First and last cube index (1-based, inclusive).
    pub first: usize,
    pub last: usize,
    pub union: RectUnion,
    pub measure: f64,
    /// `(2γ + 1)^2 Σ_{block} w_i^2`.
    pub identity_rhs: f64,
}

/// `C_m` materialized through block `s_hi`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverCm {
    pub m: u32,
    pub s_hi: u32,
    pub blocks: Vec<CoverBlock>,
    /// `Σ_{s>=m} (2·2^s + 1)^2 r_{n_s}`.
    pub measure_bound: f64,
}

impl CoverCm {
    /// Sum of the exact block measures (an upper bound for `|C_m|` up to the
    /// horizon, since blocks may overlap).
    pub fn blocks_measure(&self) -> f64 {
        self.blocks.iter().map(|b| b.measure).sum()
    }
}

/// Terms smaller than this fraction of the running sum end the summation.
const BOUND_REL_CUTOFF: f64 = 1e-18;
const BOUND_S_CAP: u32 = 200;

/// `Σ_{s>=m} (2·2^s + 1)^2 r_{n_s}`, summed in the log domain until the
/// terms are negligible.
pub fn cover_measure_bound(seq: &WeightSequence, m: u32) -> Result<f64> {
    if m == 0 {
        return Err(Error::InvalidConfig("cover index m starts at 1".into()));
    }
    let sch = Schedule::new(BOUND_S_CAP)?;
    let mut ln_sum = f64::NEG_INFINITY;
    for s in m..=BOUND_S_CAP {
        let n = sch.n_f64(s);
        if let Some(max) = seq.n_max() {
            if n > max as f64 {
                break;
            }
        }
        let ln_r = seq.tail_sum_at(n)?.log;
        let ln_factor = 2.0 * (f64::from(s + 1) * LN_2).exp().ln_1p();
        let ln_term = ln_factor + ln_r;
        ln_sum = ln_add_exp(ln_sum, ln_term);
        if ln_term - ln_sum < BOUND_REL_CUTOFF.ln() {
            break;
        }
    }
    Ok(ln_sum.exp())
}

pub fn build_cover(model: &CompactSetModel, m: u32, s_hi: u32) -> Result<CoverCm> {
    if m == 0 || m > s_hi {
        return Err(Error::InvalidConfig(format!("need 1 <= m <= s_hi, got m = {m}, s_hi = {s_hi}")));
    }
    let sch = Schedule::new(s_hi)?;
    let needed = sch.block_end(s_hi).unwrap_or(u128::MAX);
    if needed > model.trunc() as u128 {
        return Err(Error::TruncationTooSmall {
            trunc: model.trunc(),
            needed,
        });
    }
    let blocks = (m..=s_hi)
        .into_par_iter()
        .map(|s| {
            let first = sch.n_f64(s) as usize;
            let last = sch.block_end(s).expect("checked against trunc") as usize;
            let rects = model.cubes()[first - 1..last]
                .iter()
                .map(Cube::rect)
                .collect::<Result<Vec<_>>>()?;
            let gamma = 2f64.powi(s as i32);
            let mut union = dilate_2d(&rects, gamma)?;
            union.block = Some(s);
            Ok(CoverBlock {
                s,
                gamma,
                first,
                last,
                measure: union.measure(),
                identity_rhs: identity_rhs_2d(&rects, gamma),
                union,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CoverCm {
        m,
        s_hi,
        blocks,
        measure_bound: cover_measure_bound(model.seq(), m)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoverVerdict {
    InCover,
    /// On the boundary of a cube or of a dilation piece.
    Boundary,
    /// Outside every materialized block; says nothing about `s > s_hi`.
    OutsideCoverUpToHorizon,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExceptionalReport {
    pub per_block: Vec<(u32, Membership)>,
    /// Cube (1-based) containing the point or holding it on its boundary.
    pub cube: Option<(usize, Membership)>,
    pub overall: CoverVerdict,
}

pub fn is_exceptional(model: &CompactSetModel, cover: &CoverCm, p: (f64, f64)) -> ExceptionalReport {
    let per_block: Vec<(u32, Membership)> =
        cover.blocks.iter().map(|b| (b.s, b.union.contains(p))).collect();
    let cube = model.locate(p);
    let overall = if per_block.iter().any(|&(_, v)| v == Membership::Inside) {
        CoverVerdict::InCover
    } else if per_block.iter().any(|&(_, v)| v == Membership::Boundary)
        || matches!(cube, Some((_, Membership::Boundary)))
    {
        CoverVerdict::Boundary
    } else {
        CoverVerdict::OutsideCoverUpToHorizon
    };
    ExceptionalReport {
        per_block,
        cube,
        overall,
    }
}
