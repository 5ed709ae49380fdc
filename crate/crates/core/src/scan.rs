//! Randomized check of the density lower bound `ratio_N >= h(t)` at points
//! outside the cover, and of the separation property behind it.
//!
//! A pair `(x, t)` is *eligible* when `t <= δ(x)`, the Euclidean distance
//! from `x` to the cubes `1..n_m - 1` that the cover does not dilate. Below
//! that scale every rectangle through `x` with diameter `< t` misses those
//! cubes, and the blocks `s >= m` are controlled by `x` lying outside their
//! dilations, so the bound is expected to hold exactly there. Ineligible
//! pairs are still scanned and reported.

use rand::distributions::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::auxfn::{RateFunction, RateKind, Schedule};
use crate::dilation::Rectangle;
use crate::error::{Error, Result};
use crate::setmodel::{
    density_ratio_with_residual, is_exceptional, CompactSetModel, CoverCm, CoverVerdict,
    ExceptionalReport,
};

pub const ASPECT_LIMITS: (f64, f64) = (0.05, 20.0);
/// Smallest sampled diameter as a fraction of `t`.
pub const MIN_DIAM_FRACTION: f64 = 1e-3;
pub const MAX_DRAWS: usize = 1_000_000;
pub const THREADS_ENV: &str = "DENSITOMETER_THREADS";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    pub t_grid: Vec<f64>,
    pub points: usize,
    pub rects_per_point: usize,
    pub seed: u64,
    pub aspect_range: (f64, f64),
    pub m: u32,
    pub s_hi: u32,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig {
            t_grid: vec![0.25, 0.05, 0.01],
            points: 100,
            rects_per_point: 500,
            seed: 42,
            aspect_range: ASPECT_LIMITS,
            m: 3,
            s_hi: 4,
        }
    }
}

impl ScanConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.t_grid.is_empty() || self.t_grid.iter().any(|&t| !(t > 0.0 && t.is_finite())) {
            return bad(format!("t grid must be nonempty and positive: {:?}", self.t_grid));
        }
        if self.points == 0 || self.rects_per_point == 0 {
            return bad("point and rectangle counts must be positive".into());
        }
        let (lo, hi) = self.aspect_range;
        if !(lo >= ASPECT_LIMITS.0 && hi <= ASPECT_LIMITS.1 && lo <= hi) {
            return bad(format!("aspect range ({lo}, {hi}) outside [0.05, 20]"));
        }
        if self.m == 0 || self.m > self.s_hi {
            return bad(format!("need 1 <= m <= s_hi, got {} and {}", self.m, self.s_hi));
        }
        Ok(())
    }

    /// Grid sorted ascending, duplicates removed.
    fn sorted_t(&self) -> Vec<f64> {
        let mut t = self.t_grid.clone();
        t.sort_by(f64::total_cmp);
        t.dedup();
        t
    }
}

/// Runs `f` on a pool capped by `DENSITOMETER_THREADS` when set.
pub fn with_thread_cap<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    match std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse::<usize>().ok()) {
        Some(n) if n > 0 => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(f),
            Err(_) => f(),
        },
        _ => f(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSample {
    pub points: Vec<(f64, f64)>,
    pub draws: usize,
}

impl PointSample {
    pub fn acceptance(&self) -> f64 {
        self.points.len() as f64 / self.draws as f64
    }
}

fn point_in(outer: &Rectangle, rng: &mut ChaCha8Rng) -> (f64, f64) {
    let u: f64 = rng.sample(Open01);
    let v: f64 = rng.sample(Open01);
    (outer.x.lo() + u * outer.x.len(), outer.y.lo() + v * outer.y.len())
}

fn accepts(model: &CompactSetModel, cover: &CoverCm, p: (f64, f64)) -> bool {
    model.locate(p).is_none()
        && is_exceptional(model, cover, p).overall == CoverVerdict::OutsideCoverUpToHorizon
}

/// Rejection-samples points of `K_N` outside the materialized cover.
pub fn sample_points(model: &CompactSetModel, cover: &CoverCm, config: &ScanConfig) -> Result<PointSample> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut points = Vec::with_capacity(config.points);
    let mut draws = 0;
    while points.len() < config.points {
        if draws == MAX_DRAWS && points.len() * 100 < draws {
            return Err(Error::AcceptanceTooLow {
                accepted: points.len(),
                draws,
            });
        }
        draws += 1;
        let p = point_in(model.outer(), &mut rng);
        if accepts(model, cover, p) {
            points.push(p);
        }
    }
    Ok(PointSample { points, draws })
}

/// Open rectangle containing `p` with diameter log-uniform in
/// `[MIN_DIAM_FRACTION·t, t)` and aspect log-uniform in `aspect`.
fn sample_rect(p: (f64, f64), t: f64, aspect: (f64, f64), rng: &mut ChaCha8Rng) -> Rectangle {
    loop {
        let u: f64 = rng.sample(Open01);
        let d = t * (u * MIN_DIAM_FRACTION.ln()).exp();
        let v: f64 = rng.gen();
        let a = (aspect.0.ln() + v * (aspect.1 / aspect.0).ln()).exp();
        let norm = a.hypot(1.0);
        let (w, h) = (d * a / norm, d / norm);
        let ox: f64 = rng.sample(Open01);
        let oy: f64 = rng.sample(Open01);
        let (x0, y0) = (p.0 - ox * w, p.1 - oy * h);
        if let Ok(r) = Rectangle::new(x0, x0 + w, y0, y0 + h) {
            if r.diam() < t && r.x.lo() < p.0 && p.0 < r.x.hi() && r.y.lo() < p.1 && p.1 < r.y.hi() {
                return r;
            }
        }
    }
}

fn point_rng(seed: u64, point_id: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(point_id as u64 + 1);
    rng
}

/// `δ(x)`: distance to the cubes `1..n_m - 1`.
pub fn uncovered_distance(model: &CompactSetModel, m: u32, p: (f64, f64)) -> f64 {
    let end = (Schedule::new(m).map_or(1.0, |s| s.n_f64(m)) as usize - 1).min(model.trunc());
    model.cubes()[..end]
        .iter()
        .map(|c| c.distance(p))
        .fold(f64::INFINITY, f64::min)
}

/// One CSV row of a scan report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointRow {
    pub t: f64,
    pub point_id: usize,
    pub x: f64,
    pub y: f64,
    /// Minimum of `ratio_N` over every rectangle drawn at this or a smaller
    /// `t` (all have diameter `< t`).
    pub min_ratio: f64,
    pub h: f64,
    pub margin: f64,
    pub violations: usize,
    pub delta: f64,
    pub eligible: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TSummary {
    pub t: f64,
    pub h: f64,
    pub pairs: usize,
    pub eligible_pairs: usize,
    /// Minimum margin over eligible pairs (`+inf` if none).
    pub min_margin: f64,
    pub violations: usize,
    /// Violations at ineligible pairs (outside the theorem's range of `t`).
    pub ineligible_violations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub rows: Vec<PointRow>,
    pub per_t: Vec<TSummary>,
    pub draws: usize,
    pub acceptance: f64,
}

impl ScanReport {
    pub fn violations(&self) -> usize {
        self.per_t.iter().map(|s| s.violations).sum()
    }
}

/// Scans one point: per `t` (ascending) the running minimum ratio and the
/// number of rectangles below `h(t)`.
fn scan_point(
    model: &CompactSetModel,
    residual: f64,
    h: &[(f64, f64)],
    config: &ScanConfig,
    point_id: usize,
    p: (f64, f64),
) -> Result<Vec<PointRow>> {
    let mut rng = point_rng(config.seed, point_id);
    let delta = uncovered_distance(model, config.m, p);
    let mut ratios: Vec<f64> = Vec::with_capacity(h.len() * config.rects_per_point);
    let mut min_ratio = f64::INFINITY;
    let mut rows = Vec::with_capacity(h.len());
    for &(t, ht) in h {
        for _ in 0..config.rects_per_point {
            let r = sample_rect(p, t, config.aspect_range, &mut rng);
            let ratio = density_ratio_with_residual(model, &r, residual)?.ratio_n;
            min_ratio = min_ratio.min(ratio);
            ratios.push(ratio);
        }
        rows.push(PointRow {
            t,
            point_id,
            x: p.0,
            y: p.1,
            min_ratio,
            h: ht,
            margin: min_ratio - ht,
            violations: ratios.iter().filter(|&&r| r < ht).count(),
            delta,
            eligible: t <= delta,
        });
    }
    Ok(rows)
}

fn h_table(h: &RateFunction, config: &ScanConfig) -> Result<Vec<(f64, f64)>> {
    if h.kind != RateKind::H {
        return Err(Error::InvalidConfig("scan needs the h rate function".into()));
    }
    config.sorted_t().into_iter().map(|t| Ok((t, h.eval(t)?))).collect()
}

fn summarize(rows: &[PointRow], table: &[(f64, f64)]) -> Vec<TSummary> {
    table
        .iter()
        .map(|&(t, h)| {
            let at: Vec<&PointRow> = rows.iter().filter(|r| r.t == t).collect();
            let eligible: Vec<&&PointRow> = at.iter().filter(|r| r.eligible).collect();
            TSummary {
                t,
                h,
                pairs: at.len(),
                eligible_pairs: eligible.len(),
                min_margin: eligible.iter().map(|r| r.margin).fold(f64::INFINITY, f64::min),
                violations: eligible.iter().map(|r| r.violations).sum(),
                ineligible_violations: at.iter().filter(|r| !r.eligible).map(|r| r.violations).sum(),
            }
        })
        .collect()
}

/// Draws `rects_per_point` rectangles per point and `t`; rows are ordered
/// by `t` ascending, then point id.
pub fn scan_theorem6(
    model: &CompactSetModel,
    cover: &CoverCm,
    h: &RateFunction,
    config: &ScanConfig,
) -> Result<ScanReport> {
    config.validate()?;
    let table = h_table(h, config)?;
    let sample = sample_points(model, cover, config)?;
    let residual = model.residual()?;
    let per_point: Vec<Vec<PointRow>> = with_thread_cap(|| {
        sample
            .points
            .par_iter()
            .enumerate()
            .map(|(i, &p)| scan_point(model, residual, &table, config, i, p))
            .collect::<Result<_>>()
    })?;
    let mut rows = Vec::with_capacity(per_point.len() * table.len());
    for k in 0..table.len() {
        rows.extend(per_point.iter().map(|r| r[k]));
    }
    Ok(ScanReport {
        per_t: summarize(&rows, &table),
        rows,
        draws: sample.draws,
        acceptance: sample.acceptance(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub point: (f64, f64),
    pub verdict: ExceptionalReport,
    pub rows: Vec<PointRow>,
}

impl ProbeReport {
    pub fn violations(&self) -> usize {
        self.rows.iter().map(|r| r.violations).sum()
    }
}

/// Scans a caller-chosen point (for example one inside a cube) with the
/// same sampler, reporting its cover verdict alongside.
pub fn probe_point(
    model: &CompactSetModel,
    cover: &CoverCm,
    h: &RateFunction,
    config: &ScanConfig,
    p: (f64, f64),
) -> Result<ProbeReport> {
    config.validate()?;
    let table = h_table(h, config)?;
    let rows = scan_point(model, model.residual()?, &table, config, usize::MAX - 1, p)?;
    Ok(ProbeReport {
        point: p,
        verdict: is_exceptional(model, cover, p),
        rows,
    })
}

pub const SEPARATION_HYPOTHESIS: &str = "inferred: a rectangle of diameter < t through a point outside the 2^s-dilations of blocks m..s_hi misses every cube of blocks m..s_{l+1}-1, where t lies in branch l";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeparationSummary {
    pub t: f64,
    /// `s_{ℓ+1}` of the branch holding `t`.
    pub s_next: u32,
    pub checked: usize,
    pub violations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparationReport {
    pub hypothesis: String,
    pub per_t: Vec<SeparationSummary>,
    /// Points not outside the cover; their draws are skipped.
    pub skipped_points: usize,
}

impl SeparationReport {
    pub fn violations(&self) -> usize {
        self.per_t.iter().map(|s| s.violations).sum()
    }

    pub fn checked(&self) -> usize {
        self.per_t.iter().map(|s| s.checked).sum()
    }
}

/// Separation check on sampled non-exceptional points.
pub fn separation_check(
    model: &CompactSetModel,
    cover: &CoverCm,
    h: &RateFunction,
    config: &ScanConfig,
) -> Result<SeparationReport> {
    let sample = sample_points(model, cover, config)?;
    separation_check_points(model, cover, h, config, &sample.points)
}

pub fn separation_check_points(
    model: &CompactSetModel,
    cover: &CoverCm,
    h: &RateFunction,
    config: &ScanConfig,
    points: &[(f64, f64)],
) -> Result<SeparationReport> {
    config.validate()?;
    let sch = Schedule::new(config.s_hi + 1)?;
    let first = sch.n_f64(config.m) as usize;
    let ts = config.sorted_t();
    let mut brackets = Vec::with_capacity(ts.len());
    for &t in &ts {
        let s_next = h.branch_log(t.ln())?.s_next;
        // Cubes n_m ..= n_{s_next} - 1, capped at the truncation.
        let last = if s_next <= config.m {
            first - 1
        } else {
            (sch.n_f64(s_next.min(config.s_hi + 1)) as usize - 1).min(model.trunc())
        };
        brackets.push((t, s_next, last));
    }
    let eligible: Vec<(usize, (f64, f64))> = points
        .iter()
        .copied()
        .enumerate()
        .filter(|&(_, p)| accepts(model, cover, p))
        .collect();
    let counts: Vec<Vec<(usize, usize)>> = with_thread_cap(|| {
        eligible
            .par_iter()
            .map(|&(i, p)| {
                let mut rng = point_rng(config.seed ^ 0x5eed_5e9a, i);
                brackets
                    .iter()
                    .map(|&(t, _, last)| {
                        let mut bad = 0;
                        for _ in 0..config.rects_per_point {
                            let r = sample_rect(p, t, config.aspect_range, &mut rng);
                            if last >= first && model.hits_range(&r, first..=last) {
                                bad += 1;
                            }
                        }
                        (config.rects_per_point, bad)
                    })
                    .collect()
            })
            .collect()
    });
    let per_t = brackets
        .iter()
        .enumerate()
        .map(|(k, &(t, s_next, _))| SeparationSummary {
            t,
            s_next,
            checked: counts.iter().map(|c| c[k].0).sum(),
            violations: counts.iter().map(|c| c[k].1).sum(),
        })
        .collect();
    Ok(SeparationReport {
        hypothesis: SEPARATION_HYPOTHESIS.to_string(),
        per_t,
        skipped_points: points.len() - eligible.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Theorem13Row {
    pub t: f64,
    /// `1 - min ratio` over eligible pairs (0 if none).
    pub worst_deficit: f64,
    pub envelope: f64,
    /// `worst_deficit · |ln t|`.
    pub deficit_log_product: f64,
    /// `f(t) · |ln t|`.
    pub envelope_log_product: f64,
    pub within_envelope: bool,
}

pub fn theorem13_rows(report: &ScanReport, f: &RateFunction) -> Result<Vec<Theorem13Row>> {
    report
        .per_t
        .iter()
        .map(|s| {
            let envelope = f.eval(s.t)?;
            let worst_deficit = report
                .rows
                .iter()
                .filter(|r| r.t == s.t && r.eligible)
                .map(|r| 1.0 - r.min_ratio)
                .fold(0.0, f64::max);
            let lt = s.t.ln().abs();
            Ok(Theorem13Row {
                t: s.t,
                worst_deficit,
                envelope,
                deficit_log_product: worst_deficit * lt,
                envelope_log_product: envelope * lt,
                within_envelope: worst_deficit <= envelope,
            })
        })
        .collect()
}

/// The Theorem 6 scan seen through `f = 1 - h`.
pub fn scan_theorem13(
    model: &CompactSetModel,
    cover: &CoverCm,
    f: &RateFunction,
    config: &ScanConfig,
) -> Result<Vec<Theorem13Row>> {
    if f.kind != RateKind::F {
        return Err(Error::InvalidConfig("expected the f rate function".into()));
    }
    let report = scan_theorem6(model, cover, &f.complement(), config)?;
    theorem13_rows(&report, f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::auxfn::{build_f, build_h, choose_subsequence, DEFAULT_S_MAX};
    use crate::setmodel::{build_cover, build_packing, Cube};
    use crate::weights::WeightSequence;

    fn canonical_setup(n: usize, s_hi: u32) -> (CompactSetModel, CoverCm, RateFunction, RateFunction) {
        let seq = WeightSequence::power(0.25, 2.0).unwrap();
        let model = build_packing(&seq, n, Rectangle::new(0.0, 1.0, 0.0, 1.0).unwrap()).unwrap();
        let cover = build_cover(&model, 3, s_hi).unwrap();
        let sel = choose_subsequence(&seq, &Schedule::new(DEFAULT_S_MAX).unwrap(), 10).unwrap();
        (model, cover, build_h(&sel).unwrap(), build_f(&sel).unwrap())
    }

    fn small_config() -> ScanConfig {
        ScanConfig {
            points: 12,
            rects_per_point: 60,
            s_hi: 4,
            ..ScanConfig::default()
        }
    }

    #[test]
    fn sampled_rects_contain_point_and_respect_diameter() {
        let mut rng = point_rng(7, 0);
        for k in 0..5000 {
            let t = [0.25, 0.05, 0.01][k % 3];
            let p = (0.3, 0.7);
            let r = sample_rect(p, t, ASPECT_LIMITS, &mut rng);
            assert!(r.diam() < t && r.diam() >= MIN_DIAM_FRACTION * t * 0.999);
            let a = r.x.len() / r.y.len();
            assert!((0.05 * 0.999..=20.0 * 1.001).contains(&a));
        }
    }

    #[test]
    fn config_validation() {
        let mut c = ScanConfig::default();
        assert!(c.validate().is_ok());
        c.aspect_range = (0.01, 2.0);
        assert!(c.validate().is_err());
        c = ScanConfig { t_grid: vec![0.1, -1.0], ..ScanConfig::default() };
        assert!(c.validate().is_err());
        c = ScanConfig { m: 5, s_hi: 4, ..ScanConfig::default() };
        assert!(c.validate().is_err());
    }

    #[test]
    fn single_cube_acceptance_rate() {
        let seq = WeightSequence::explicit(vec![0.25]).unwrap();
        let unit = Rectangle::new(0.0, 1.0, 0.0, 1.0).unwrap();
        let model = CompactSetModel::new(unit, vec![Cube { x: 0.25, y: 0.25, w: 0.5 }], seq).unwrap();
        let cover = CoverCm {
            m: 1,
            s_hi: 1,
            blocks: Vec::new(),
            measure_bound: 0.0,
        };
        let config = ScanConfig { points: 20_000, m: 1, s_hi: 1, ..ScanConfig::default() };
        let s = sample_points(&model, &cover, &config).unwrap();
        assert!((s.acceptance() - 0.75).abs() < 0.01);
        assert_eq!(s, sample_points(&model, &cover, &config).unwrap());
    }

    #[test]
    fn canonical_scan_has_no_eligible_violations() {
        let (model, cover, h, f) = canonical_setup(3124, 4);
        let config = small_config();
        let rep = scan_theorem6(&model, &cover, &h, &config).unwrap();
        assert_eq!(rep.rows.len(), 36);
        assert_eq!(rep.violations(), 0);
        for r in &rep.rows {
            assert!((0.0..=1.0).contains(&r.min_ratio));
            assert!(r.h < 1.0);
        }
        for id in 0..config.points {
            let mins: Vec<f64> = rep.rows.iter().filter(|r| r.point_id == id).map(|r| r.min_ratio).collect();
            assert!(mins.windows(2).all(|w| w[1] <= w[0]));
        }
        assert_eq!(rep, scan_theorem6(&model, &cover, &h, &config).unwrap());
        let t13 = scan_theorem13(&model, &cover, &f, &config).unwrap();
        assert!(t13.iter().all(|r| r.within_envelope));
    }

    #[test]
    fn in_cube_probe_is_flagged() {
        let (model, cover, h, _) = canonical_setup(3124, 4);
        let c = model.cube(300);
        let p = (c.x + c.w / 2.0, c.y + c.w / 2.0);
        let probe = probe_point(&model, &cover, &h, &small_config(), p).unwrap();
        assert_eq!(probe.verdict.overall, CoverVerdict::InCover);
        assert!(probe.violations() > 0);
    }

    #[test]
    fn separation_holds_and_skips_in_cover_points() {
        let (model, cover, h, _) = canonical_setup(3124, 4);
        let config = small_config();
        let rep = separation_check(&model, &cover, &h, &config).unwrap();
        assert_eq!(rep.violations(), 0);
        assert_eq!(rep.skipped_points, 0);
        let c = model.cube(300);
        let inside = (c.x + c.w / 2.0, c.y + c.w / 2.0);
        let rep = separation_check_points(&model, &cover, &h, &config, &[inside]).unwrap();
        assert_eq!(rep.skipped_points, 1);
        assert_eq!(rep.checked(), 0);
    }
}
