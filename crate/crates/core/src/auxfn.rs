//! Block schedule `n_s = s^s`, the subsequence `s_ℓ`, the step functions
//! `h` and `f = 1 - h`, and the convergence diagnostics built on them.
//!
//! All breakpoints live in the log domain: `b_s = 2^s · w_{n_{s+1}-1}` drops
//! below the smallest positive double after a handful of blocks for
//! geometric weights.

use std::f64::consts::LN_2;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::weights::{SeqKind, WeightSequence};

pub const DEFAULT_S_MAX: u32 = 60;

/// Schedule `n_s = s^s` for `s = 1..=s_max`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schedule {
    s_max: u32,
}

impl Schedule {
    pub fn new(s_max: u32) -> Result<Self> {
        if s_max == 0 {
            return Err(Error::InvalidConfig("schedule horizon must be at least 1".into()));
        }
        Ok(Schedule { s_max })
    }

    pub fn s_max(&self) -> u32 {
        self.s_max
    }

    /// `n_s` exactly.
    pub fn n(&self, s: u32) -> BigUint {
        BigUint::from(s).pow(s)
    }

    /// `ln n_s = s ln s`.
    pub fn ln_n(&self, s: u32) -> f64 {
        let s = f64::from(s);
        s * s.ln()
    }

    /// `n_s` as a double; exact while `n_s < 2^53`.
    pub fn n_f64(&self, s: u32) -> f64 {
        self.n(s).to_f64().unwrap_or(f64::INFINITY)
    }

    /// Last index of block `s`, `n_{s+1} - 1`, as a double.
    pub fn block_end_f64(&self, s: u32) -> f64 {
        (self.n(s + 1) - BigUint::one()).to_f64().unwrap_or(f64::INFINITY)
    }

    /// Last index of block `s` as an integer, if it fits.
    pub fn block_end(&self, s: u32) -> Option<u128> {
        (self.n(s + 1) - BigUint::one()).to_u128()
    }
}

/// Largest `s` whose breakpoint `b_s` the sequence can serve.
fn b_horizon(seq: &WeightSequence, schedule: &Schedule) -> u32 {
    match seq.n_max() {
        None => schedule.s_max(),
        Some(max) => (1..=schedule.s_max())
            .take_while(|&s| schedule.block_end_f64(s) <= max as f64)
            .last()
            .unwrap_or(0),
    }
}

/// `ln b_s = s ln 2 + ln w_{n_{s+1}-1}`.
pub fn log_b(seq: &WeightSequence, schedule: &Schedule, s: u32) -> Result<f64> {
    Ok(f64::from(s) * LN_2 + seq.ln_w_at(schedule.block_end_f64(s))?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubseqSelection {
    pub s_ell: Vec<u32>,
    /// `ln b_{s_ℓ}` for each selected entry.
    pub log_b: Vec<f64>,
    /// Every `(s, ln b_s)` evaluated while selecting.
    pub scanned: Vec<(u32, f64)>,
}

impl SubseqSelection {
    pub fn len(&self) -> usize {
        self.s_ell.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s_ell.is_empty()
    }
}

/// `s_1 = 1`, then greedily the first `s > s_ℓ` with `b_s <= b_{s_ℓ}`,
/// until `ell_max` entries are selected.
pub fn choose_subsequence(
    seq: &WeightSequence,
    schedule: &Schedule,
    ell_max: usize,
) -> Result<SubseqSelection> {
    if ell_max == 0 {
        return Err(Error::InvalidConfig("ell_max must be at least 1".into()));
    }
    let horizon = b_horizon(seq, schedule);
    let mut sel = SubseqSelection {
        s_ell: Vec::new(),
        log_b: Vec::new(),
        scanned: Vec::new(),
    };
    let exhausted = |sel: SubseqSelection, last_s: u32| Error::HorizonExhausted {
        last_s,
        s_max: horizon,
        selected: sel.s_ell,
        log_b: sel.scanned.iter().map(|&(_, b)| b).collect(),
    };
    if horizon == 0 {
        return Err(exhausted(sel, 0));
    }
    let first = log_b(seq, schedule, 1)?;
    sel.s_ell.push(1);
    sel.log_b.push(first);
    sel.scanned.push((1, first));
    let mut s = 1;
    while sel.len() < ell_max {
        if s == horizon {
            return Err(exhausted(sel, s));
        }
        s += 1;
        let b = log_b(seq, schedule, s)?;
        sel.scanned.push((s, b));
        if b <= *sel.log_b.last().expect("selection starts nonempty") {
            sel.s_ell.push(s);
            sel.log_b.push(b);
        }
    }
    Ok(sel)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RateKind {
    H,
    F,
}

/// `Σ_{k>=s} 2/2^k = 4·2^-s`.
pub fn geometric_tail(s: u32) -> f64 {
    4.0 * 0.5f64.powi(s as i32)
}

/// One constant piece on `[exp(t_lo_log), exp(t_hi_log))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateBranch {
    /// 0 for the top branch.
    pub ell: u32,
    /// Summation start: `s_{ℓ+1}`, or 1 on the top branch.
    pub s_next: u32,
    pub t_lo_log: f64,
    pub t_hi_log: f64,
    pub value: f64,
}

/// Step function `h` or `f` with branches ordered by decreasing `t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateFunction {
    pub kind: RateKind,
    branches: Vec<RateBranch>,
}

fn rate_value(kind: RateKind, s_next: u32) -> f64 {
    match kind {
        RateKind::H => 1.0 - geometric_tail(s_next),
        RateKind::F => geometric_tail(s_next),
    }
}

fn build_rate(sel: &SubseqSelection, kind: RateKind) -> Result<RateFunction> {
    let Some(&top_lo) = sel.log_b.first() else {
        return Err(Error::InvalidConfig("empty subsequence selection".into()));
    };
    let mut branches = vec![RateBranch {
        ell: 0,
        s_next: 1,
        t_lo_log: top_lo,
        t_hi_log: f64::INFINITY,
        value: rate_value(kind, 1),
    }];
    for ell in 1..sel.len() {
        let s_next = sel.s_ell[ell];
        branches.push(RateBranch {
            ell: ell as u32,
            s_next,
            t_lo_log: sel.log_b[ell],
            t_hi_log: sel.log_b[ell - 1],
            value: rate_value(kind, s_next),
        });
    }
    Ok(RateFunction { kind, branches })
}

pub fn build_h(sel: &SubseqSelection) -> Result<RateFunction> {
    build_rate(sel, RateKind::H)
}

pub fn build_f(sel: &SubseqSelection) -> Result<RateFunction> {
    build_rate(sel, RateKind::F)
}

impl RateFunction {
    pub fn branches(&self) -> &[RateBranch] {
        &self.branches
    }

    /// `ln` of the smallest constructed breakpoint.
    pub fn log_floor(&self) -> f64 {
        self.branches.last().map_or(f64::INFINITY, |b| b.t_lo_log)
    }

    pub fn branch_log(&self, log_t: f64) -> Result<&RateBranch> {
        if log_t.is_nan() {
            return Err(Error::InvalidConfig("t is NaN".into()));
        }
        let k = self.branches.partition_point(|b| b.t_lo_log > log_t);
        self.branches.get(k).ok_or(Error::BelowHorizon {
            log_t,
            log_floor: self.log_floor(),
        })
    }

    pub fn eval_log(&self, log_t: f64) -> Result<f64> {
        Ok(self.branch_log(log_t)?.value)
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(Error::InvalidConfig(format!("t must be positive, got {t}")));
        }
        self.eval_log(t.ln())
    }

    /// `h` from `f` and back.
    pub fn complement(&self) -> RateFunction {
        let kind = match self.kind {
            RateKind::H => RateKind::F,
            RateKind::F => RateKind::H,
        };
        let branches = self
            .branches
            .iter()
            .map(|b| RateBranch {
                value: rate_value(kind, b.s_next),
                ..*b
            })
            .collect();
        RateFunction { kind, branches }
    }

    /// Rebuilds the function from CSV rows.
    pub fn from_rows(rows: &[RateRow], kind: RateKind) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::Parse("empty rate table".into()));
        }
        let mut branches = Vec::with_capacity(rows.len());
        for (ell, row) in rows.iter().enumerate() {
            let s = (4.0 / row.f).log2().round();
            if !(s >= 1.0) || (geometric_tail(s as u32) - row.f).abs() > 0.0 {
                return Err(Error::Parse(format!("row {ell}: f = {} is not 4·2^-s", row.f)));
            }
            if ell > 0 && row.t_hi_log != rows[ell - 1].t_lo_log {
                return Err(Error::Parse(format!("row {ell}: branches are not consecutive")));
            }
            let s_next = s as u32;
            branches.push(RateBranch {
                ell: ell as u32,
                s_next,
                t_lo_log: row.t_lo_log,
                t_hi_log: row.t_hi_log,
                value: rate_value(kind, s_next),
            });
        }
        if branches[0].t_hi_log != f64::INFINITY {
            return Err(Error::Parse("first row must be the top branch".into()));
        }
        Ok(RateFunction { kind, branches })
    }
}

/// CSV row `(t_lo_log, t_hi_log, h, f)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateRow {
    pub t_lo_log: f64,
    pub t_hi_log: f64,
    pub h: f64,
    pub f: f64,
}

pub fn rate_rows(sel: &SubseqSelection) -> Result<Vec<RateRow>> {
    let h = build_h(sel)?;
    let f = build_f(sel)?;
    Ok(h
        .branches()
        .iter()
        .zip(f.branches())
        .map(|(bh, bf)| RateRow {
            t_lo_log: bh.t_lo_log,
            t_hi_log: bh.t_hi_log,
            h: bh.value,
            f: bf.value,
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SeriesName {
    #[serde(rename = "2^s*r")]
    TwoR,
    #[serde(rename = "2^s*sqrt(r)")]
    TwoSqrtR,
    #[serde(rename = "4^s*r")]
    FourR,
}

impl SeriesName {
    pub const ALL: [SeriesName; 3] = [SeriesName::TwoR, SeriesName::TwoSqrtR, SeriesName::FourR];

    pub fn as_str(self) -> &'static str {
        match self {
            SeriesName::TwoR => "2^s*r",
            SeriesName::TwoSqrtR => "2^s*sqrt(r)",
            SeriesName::FourR => "4^s*r",
        }
    }

    fn log_term(self, s: u32, ln_r: f64) -> f64 {
        let s = f64::from(s);
        match self {
            SeriesName::TwoR => s * LN_2 + ln_r,
            SeriesName::TwoSqrtR => s * LN_2 + 0.5 * ln_r,
            SeriesName::FourR => 2.0 * s * LN_2 + ln_r,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesTerm {
    pub s: u32,
    pub log_term: f64,
    pub term: f64,
    pub partial_sum: f64,
    /// `term_s / term_{s-1}`.
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesTrace {
    pub series: SeriesName,
    pub terms: Vec<SeriesTerm>,
    /// First `s` with term below the tolerance, if reached in the horizon.
    pub below_tol_at: Option<u32>,
    pub sum: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesDiagnostics {
    pub tol: f64,
    pub traces: Vec<SeriesTrace>,
}

/// Consecutive non-decreasing steps tolerated before a series is declared
/// divergent.
pub const DIVERGENCE_RUN: usize = 5;

/// `ln r_{n_s}`, with `-inf` past the end of an explicit list.
fn ln_tail_at_block(seq: &WeightSequence, schedule: &Schedule, s: u32) -> Result<f64> {
    let n = schedule.n_f64(s);
    if let SeqKind::Explicit { w2 } = seq.kind() {
        if n > w2.len() as f64 {
            return Ok(f64::NEG_INFINITY);
        }
    }
    Ok(seq.tail_sum_at(n)?.log)
}

pub fn series_diagnostics(
    seq: &WeightSequence,
    schedule: &Schedule,
    tol: f64,
) -> Result<SeriesDiagnostics> {
    if !(tol > 0.0) {
        return Err(Error::InvalidConfig(format!("tolerance must be positive, got {tol}")));
    }
    let ln_tol = tol.ln();
    let mut ln_r = Vec::new();
    let mut traces = Vec::new();
    for series in SeriesName::ALL {
        let mut terms: Vec<SeriesTerm> = Vec::new();
        let mut sum = 0.0;
        let mut rising = 0;
        let mut below_tol_at = None;
        for s in 1..=schedule.s_max() {
            let idx = s as usize - 1;
            if idx == ln_r.len() {
                ln_r.push(ln_tail_at_block(seq, schedule, s)?);
            }
            let log_term = series.log_term(s, ln_r[idx]);
            let term = log_term.exp();
            sum += term;
            let ratio = terms.last().map(|p| (log_term - p.log_term).exp());
            if let Some(prev) = terms.last() {
                if log_term >= prev.log_term {
                    rising += 1;
                    if rising >= DIVERGENCE_RUN {
                        return Err(Error::Divergent {
                            series: series.as_str(),
                            s,
                        });
                    }
                } else {
                    rising = 0;
                }
            }
            terms.push(SeriesTerm {
                s,
                log_term,
                term,
                partial_sum: sum,
                ratio,
            });
            if log_term < ln_tol {
                below_tol_at = Some(s);
                break;
            }
        }
        traces.push(SeriesTrace {
            series,
            terms,
            below_tol_at,
            sum,
        });
    }
    Ok(SeriesDiagnostics { tol, traces })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Decaying,
    Diverging,
    Withheld,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LittleOEntry {
    pub ell: u32,
    /// `s_{ℓ+1}`.
    pub s_next: u32,
    /// `ln b_{s_{ℓ+1}}`.
    pub log_b: f64,
    /// `f(b_{s_{ℓ+1}}) = 4·2^-s_{ℓ+1}`.
    pub f: f64,
    /// `f(b) · |ln b|`.
    pub product: f64,
    /// `|ln w_{n_{s+1}-1}| / (s ln s)` at `s = s_{ℓ+1}`; tends to a constant.
    pub log_w_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LittleOTrace {
    pub entries: Vec<LittleOEntry>,
    pub verdict: Verdict,
}

/// Trace of `f(b_{s_{ℓ+1}}) · |ln b_{s_{ℓ+1}}|`. The verdict is `Decaying`
/// when the upper half of the trace (at least two entries) is strictly
/// decreasing; it is withheld below three selected entries.
pub fn little_o_check(sel: &SubseqSelection) -> LittleOTrace {
    let entries: Vec<LittleOEntry> = (1..sel.len())
        .map(|ell| {
            let s_next = sel.s_ell[ell];
            let log_b = sel.log_b[ell];
            let f = geometric_tail(s_next);
            let s = f64::from(s_next);
            LittleOEntry {
                ell: ell as u32,
                s_next,
                log_b,
                f,
                product: f * log_b.abs(),
                log_w_ratio: (log_b - s * LN_2).abs() / (s * s.ln()),
            }
        })
        .collect();
    let verdict = if sel.len() < 3 {
        Verdict::Withheld
    } else {
        let keep = entries.len().div_ceil(2).max(2);
        let tail = &entries[entries.len() - keep..];
        if tail.windows(2).all(|w| w[1].product < w[0].product) {
            Verdict::Decaying
        } else {
            Verdict::Diverging
        }
    };
    LittleOTrace { entries, verdict }
}
