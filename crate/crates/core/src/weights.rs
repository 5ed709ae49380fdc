//! Weight sequences of removed cube sides.
//!
//! A sequence is described by its squares `w_n^2` (the cube areas). Every
//! magnitude is served as a natural logarithm first, so that indices like
//! `n = 7^7` or `n = 20^20` never underflow. Linear values are derived on
//! demand.
//!
//! The liminf/limsup indexes are estimated as tail minima/maxima over a probe
//! grid. They are finite-horizon proxies and are reported as such.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Probe count threshold below which power-law tails are summed directly
/// before switching to the Euler-Maclaurin expansion.
const DIRECT_SUM_UNTIL: f64 = 1000.0;

/// Descriptor form of a weight sequence, as it appears in JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SeqKind {
    /// `w_n^2 = c * n^(-p)`, `p > 1`.
    Power { c: f64, p: f64 },
    /// `w_n^2 = c * rho^n`, `0 < rho < 1`.
    Geometric { c: f64, rho: f64 },
    /// Finite list of `w_n^2`, `n = 1..=len`.
    Explicit { w2: Vec<f64> },
}

/// A validated, non-increasing weight sequence.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "SeqKind", into = "SeqKind")]
pub struct WeightSequence {
    kind: SeqKind,
    /// `suffix[i] = sum_{m >= i+1} w_m^2` for explicit lists (length len+1).
    suffix: Vec<f64>,
}

impl PartialEq for WeightSequence {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

impl From<WeightSequence> for SeqKind {
    fn from(s: WeightSequence) -> Self {
        s.kind
    }
}

impl TryFrom<SeqKind> for WeightSequence {
    type Error = Error;

    fn try_from(kind: SeqKind) -> Result<Self> {
        WeightSequence::new(kind)
    }
}

/// Tail sum `r_n` in log-domain together with a certified bracket.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailSum {
    pub n: f64,
    /// `ln r_n`; `-inf` when the tail is empty.
    pub log: f64,
    pub log_lo: f64,
    pub log_hi: f64,
}

impl TailSum {
    fn exact(n: f64, log: f64) -> Self {
        TailSum {
            n,
            log,
            log_lo: log,
            log_hi: log,
        }
    }

    pub fn value(&self) -> f64 {
        self.log.exp()
    }

    pub fn ln(&self) -> Result<f64> {
        if self.log == f64::NEG_INFINITY {
            Err(Error::ZeroTail { n: self.n as u64 })
        } else {
            Ok(self.log)
        }
    }
}

impl WeightSequence {
    pub fn new(kind: SeqKind) -> Result<Self> {
        let mut suffix = Vec::new();
        match &kind {
            SeqKind::Power { c, p } => {
                if !(c.is_finite() && *c > 0.0) {
                    return Err(Error::InvalidSequence(format!("power: c = {c} must be positive")));
                }
                if !(p.is_finite() && *p > 1.0) {
                    return Err(Error::InvalidSequence(format!(
                        "power: p = {p} must exceed 1 for a summable sequence"
                    )));
                }
            }
            SeqKind::Geometric { c, rho } => {
                if !(c.is_finite() && *c > 0.0) {
                    return Err(Error::InvalidSequence(format!("geometric: c = {c} must be positive")));
                }
                if !(*rho > 0.0 && *rho < 1.0) {
                    return Err(Error::InvalidSequence(format!(
                        "geometric: rho = {rho} must lie in (0, 1)"
                    )));
                }
            }
            SeqKind::Explicit { w2 } => {
                if w2.is_empty() {
                    return Err(Error::InvalidSequence("explicit: empty list".into()));
                }
                for (i, &v) in w2.iter().enumerate() {
                    if !(v.is_finite() && v > 0.0) {
                        return Err(Error::InvalidSequence(format!(
                            "explicit: w2[{}] = {v} must be positive",
                            i + 1
                        )));
                    }
                    if i > 0 && v > w2[i - 1] {
                        return Err(Error::InvalidSequence(format!(
                            "explicit: not non-increasing at n = {}",
                            i + 1
                        )));
                    }
                }
                suffix = vec![0.0; w2.len() + 1];
                for i in (0..w2.len()).rev() {
                    suffix[i] = suffix[i + 1] + w2[i];
                }
            }
        }
        Ok(WeightSequence { kind, suffix })
    }

    pub fn power(c: f64, p: f64) -> Result<Self> {
        Self::new(SeqKind::Power { c, p })
    }

    pub fn geometric(c: f64, rho: f64) -> Result<Self> {
        Self::new(SeqKind::Geometric { c, rho })
    }

    pub fn explicit(w2: Vec<f64>) -> Result<Self> {
        Self::new(SeqKind::Explicit { w2 })
    }

    pub fn kind(&self) -> &SeqKind {
        &self.kind
    }

    pub fn is_closed_form(&self) -> bool {
        !matches!(self.kind, SeqKind::Explicit { .. })
    }

    /// Largest index served (`None` for closed forms).
    pub fn n_max(&self) -> Option<u64> {
        match &self.kind {
            SeqKind::Explicit { w2 } => Some(w2.len() as u64),
            _ => None,
        }
    }

    fn check_index(&self, n: f64, allow_past_end: bool) -> Result<()> {
        if !(n >= 1.0) || !n.is_finite() {
            return Err(Error::OutOfRange {
                n,
                max: self.n_max().map_or(f64::INFINITY, |m| m as f64),
            });
        }
        if let SeqKind::Explicit { w2 } = &self.kind {
            let max = w2.len() as f64 + if allow_past_end { 1.0 } else { 0.0 };
            if n.fract() != 0.0 || n > max {
                return Err(Error::OutOfRange { n, max });
            }
        }
        Ok(())
    }

    /// `ln w_n^2` at a real index `n >= 1` (closed forms accept any real
    /// index, explicit lists only integers in range).
    pub fn ln_w2_at(&self, n: f64) -> Result<f64> {
        self.check_index(n, false)?;
        Ok(match &self.kind {
            SeqKind::Power { c, p } => c.ln() - p * n.ln(),
            SeqKind::Geometric { c, rho } => c.ln() + n * rho.ln(),
            SeqKind::Explicit { w2 } => w2[n as usize - 1].ln(),
        })
    }

    pub fn ln_w2(&self, n: u64) -> Result<f64> {
        self.ln_w2_at(n as f64)
    }

    /// `ln w_n`.
    pub fn ln_w_at(&self, n: f64) -> Result<f64> {
        Ok(0.5 * self.ln_w2_at(n)?)
    }

    pub fn ln_w(&self, n: u64) -> Result<f64> {
        self.ln_w_at(n as f64)
    }

    /// Side length `w_n` in linear scale (may underflow to 0 for steep
    /// sequences; use [`Self::ln_w`] there).
    pub fn w(&self, n: u64) -> Result<f64> {
        match &self.kind {
            SeqKind::Explicit { w2 } => {
                self.check_index(n as f64, false)?;
                Ok(w2[n as usize - 1].sqrt())
            }
            _ => Ok(self.ln_w(n)?.exp()),
        }
    }

    pub fn w2(&self, n: u64) -> Result<f64> {
        match &self.kind {
            SeqKind::Explicit { w2 } => {
                self.check_index(n as f64, false)?;
                Ok(w2[n as usize - 1])
            }
            _ => Ok(self.ln_w2(n)?.exp()),
        }
    }

    /// Tail sum `r_n = sum_{m >= n} w_m^2` at a real index.
    pub fn tail_sum_at(&self, n: f64) -> Result<TailSum> {
        self.check_index(n, true)?;
        Ok(match &self.kind {
            SeqKind::Geometric { c, rho } => {
                TailSum::exact(n, c.ln() + n * rho.ln() - (-rho).ln_1p())
            }
            SeqKind::Power { c, p } => {
                let (z, rel) = ln_hurwitz_zeta(*p, n);
                let log = c.ln() + z;
                // Integral test: n^(1-p)/(p-1) <= zeta(p, n) <= n^-p + n^(1-p)/(p-1).
                let int_lo = c.ln() + (1.0 - p) * n.ln() - (p - 1.0).ln();
                let int_hi = ln_add_exp(int_lo, c.ln() - p * n.ln());
                TailSum {
                    n,
                    log,
                    log_lo: (log + (-rel).ln_1p()).max(int_lo),
                    log_hi: (log + rel.ln_1p()).min(int_hi),
                }
            }
            SeqKind::Explicit { .. } => {
                let r = self.suffix[n as usize - 1];
                TailSum::exact(n, if r > 0.0 { r.ln() } else { f64::NEG_INFINITY })
            }
        })
    }

    pub fn tail_sum(&self, n: u64) -> Result<TailSum> {
        self.tail_sum_at(n as f64)
    }

    /// Total area `r_1`.
    pub fn total(&self) -> f64 {
        self.tail_sum(1).map(|t| t.value()).unwrap_or(0.0)
    }

    /// Sum of `w_n^2` for `n = 1..=upto` (exact for explicit lists,
    /// `r_1 - r_{upto+1}` otherwise).
    pub fn partial_area(&self, upto: u64) -> Result<f64> {
        if upto == 0 {
            return Ok(0.0);
        }
        match &self.kind {
            SeqKind::Explicit { w2 } => {
                if upto as usize > w2.len() {
                    return Err(Error::OutOfRange {
                        n: upto as f64,
                        max: w2.len() as f64,
                    });
                }
                Ok(w2[..upto as usize].iter().sum())
            }
            _ => {
                if upto <= 100_000 {
                    let mut s = 0.0;
                    for n in (1..=upto).rev() {
                        s += self.w2(n)?;
                    }
                    Ok(s)
                } else {
                    Ok(self.total() - self.tail_sum(upto + 1)?.value())
                }
            }
        }
    }
}

impl fmt::Display for WeightSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            SeqKind::Power { c, p } => write!(f, "power:c={c},p={p}"),
            SeqKind::Geometric { c, rho } => write!(f, "geometric:c={c},rho={rho}"),
            SeqKind::Explicit { w2 } => write!(f, "explicit[{}]", w2.len()),
        }
    }
}

/// Accepts a JSON descriptor (`{"kind":"power","c":0.25,"p":2}`) or the
/// shorthand `power:c=0.25,p=2`, `geometric:c=1,rho=0.5`,
/// `explicit:0.25,0.25,0.25`.
impl FromStr for WeightSequence {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.starts_with('{') {
            let kind: SeqKind = serde_json::from_str(s)?;
            return WeightSequence::new(kind);
        }
        let (head, rest) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("unrecognized sequence descriptor '{s}'")))?;
        let num = |v: &str| -> Result<f64> {
            v.trim()
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("bad number '{v}': {e}")))
        };
        if head == "explicit" {
            let w2 = rest.split(',').map(num).collect::<Result<Vec<_>>>()?;
            return WeightSequence::explicit(w2);
        }
        let mut c = 1.0;
        let mut second = None;
        for kv in rest.split(',') {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value, got '{kv}'")))?;
            match k.trim() {
                "c" => c = num(v)?,
                "p" if head == "power" => second = Some(num(v)?),
                "rho" if head == "geometric" => second = Some(num(v)?),
                other => return Err(Error::Parse(format!("unknown key '{other}' for {head}"))),
            }
        }
        let second =
            second.ok_or_else(|| Error::Parse(format!("missing shape parameter in '{s}'")))?;
        match head {
            "power" => WeightSequence::power(c, second),
            "geometric" => WeightSequence::geometric(c, second),
            other => Err(Error::Parse(format!("unknown sequence kind '{other}'"))),
        }
    }
}

/// `ln(e^a + e^b)`.
pub fn ln_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// `ln zeta(p, n)` (Hurwitz zeta, `p > 1`, `n >= 1`) with a relative error
/// bound. Direct summation below [`DIRECT_SUM_UNTIL`], Euler-Maclaurin above;
/// the first omitted Euler-Maclaurin term bounds the truncation error because
/// `x^-p` is completely monotone.
fn ln_hurwitz_zeta(p: f64, n: f64) -> (f64, f64) {
    let mut start = n;
    let mut ln_direct = f64::NEG_INFINITY;
    let mut direct_terms = 0usize;
    if n < DIRECT_SUM_UNTIL {
        let count = (DIRECT_SUM_UNTIL - n).ceil() as usize;
        let ln_first = -p * n.ln();
        // Sum smallest first, scaled by the first (largest) term.
        let mut acc = 0.0;
        for k in (0..count).rev() {
            let m = n + k as f64;
            acc += (-p * m.ln() - ln_first).exp();
        }
        ln_direct = ln_first + acc.ln();
        direct_terms = count;
        start += count as f64;
    }
    let big_n = start;
    let inv2 = 1.0 / (big_n * big_n);
    let q = p - 1.0;
    // Corrections relative to the leading term N^(1-p)/(p-1).
    let t1 = q / (2.0 * big_n);
    let t2 = q * p / 12.0 * inv2;
    let t3 = -q * p * (p + 1.0) * (p + 2.0) / 720.0 * inv2 * inv2;
    let t4 = q * p * (p + 1.0) * (p + 2.0) * (p + 3.0) * (p + 4.0) / 30240.0 * inv2 * inv2 * inv2;
    let next = q * p * (p + 1.0) * (p + 2.0) * (p + 3.0) * (p + 4.0) * (p + 5.0) * (p + 6.0)
        / 1_209_600.0
        * inv2
        * inv2
        * inv2
        * inv2;
    let ln_em = (1.0 - p) * big_n.ln() - q.ln() + (t1 + t2 + t3 + t4).ln_1p();
    let ln_total = ln_add_exp(ln_direct, ln_em);
    let rounding = 64.0 * f64::EPSILON * (direct_terms as f64 + 16.0);
    let em_share = (ln_em - ln_total).exp();
    (ln_total, rounding + next.abs() * em_share)
}

/// Default probe grid: `n = 2^k` for `k = 1..=19`, plus `10^6`.
pub fn default_probes() -> Vec<u64> {
    let mut v: Vec<u64> = (1..=19).map(|k| 1u64 << k).collect();
    v.push(1_000_000);
    v
}

/// Probe grid for onset searches: every `n` in `1..=1024`, then `2^k` up to `10^6`.
pub fn onset_probes() -> Vec<u64> {
    let mut v: Vec<u64> = (1..=1024).collect();
    v.extend((11..=19).map(|k| 1u64 << k));
    v.push(1_000_000);
    v
}

fn validate_probes(probes: &[u64]) -> Result<()> {
    if probes.is_empty() {
        return Err(Error::EmptyProbes);
    }
    if probes[0] == 0 || probes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Parse("probe grid must be positive and strictly increasing".into()));
    }
    Ok(())
}

/// Upper half of the probe grid; liminf/limsup proxies are taken over it.
fn tail(probes: &[u64]) -> &[u64] {
    &probes[probes.len() / 2..]
}

fn require_closed(seq: &WeightSequence) -> Result<()> {
    if seq.is_closed_form() {
        Ok(())
    } else {
        Err(Error::NotClosedForm)
    }
}

/// Estimate of the index `a{w_n^2}` with its per-probe values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AIndex {
    /// `(n, a_n)` for every probe.
    pub per_n: Vec<(u64, f64)>,
    /// Tail minimum of `a_n` (liminf proxy).
    pub a_est: f64,
    /// Last-quartile spread below 0.01.
    pub converged: bool,
    /// Largest relative residual of `n (r_n/n)^{a_n} = 1` over the probes.
    pub max_residual: f64,
}

/// `a_n = ln n / (ln n - ln r_n)`, the solution of `n (r_n/n)^{a_n} = 1`.
pub fn index_a(seq: &WeightSequence, probes: &[u64]) -> Result<AIndex> {
    require_closed(seq)?;
    validate_probes(probes)?;
    let mut per_n = Vec::with_capacity(probes.len());
    let mut max_residual: f64 = 0.0;
    for &n in probes {
        let ln_r = seq.tail_sum(n)?.ln()?;
        let ln_n = (n as f64).ln();
        if ln_r >= ln_n {
            return Err(Error::DegenerateIndex { n, r_n: ln_r.exp() });
        }
        let a = ln_n / (ln_n - ln_r);
        // ln of n (r_n/n)^a; the defining equation says it is 0.
        let residual = (ln_n + a * (ln_r - ln_n)).exp_m1().abs();
        max_residual = max_residual.max(residual);
        per_n.push((n, a));
    }
    let tail_vals: Vec<f64> = per_n[probes.len() / 2..].iter().map(|&(_, a)| a).collect();
    let a_est = tail_vals.iter().copied().fold(f64::INFINITY, f64::min);
    let quartile = &per_n[(3 * per_n.len()) / 4..];
    let (qmin, qmax) = quartile
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &(_, a)| (lo.min(a), hi.max(a)));
    Ok(AIndex {
        per_n,
        a_est,
        converged: qmax - qmin < 0.01,
        max_residual,
    })
}

/// Limsup proxy of `ln n / |ln w_n^2|` (Besicovitch-Taylor exponent).
pub fn index_e_bt(seq: &WeightSequence, probes: &[u64]) -> Result<f64> {
    require_closed(seq)?;
    validate_probes(probes)?;
    let mut best = f64::NEG_INFINITY;
    for &n in tail(probes) {
        let denom = seq.ln_w2(n)?.abs();
        let ratio = if denom == 0.0 {
            f64::INFINITY
        } else {
            (n as f64).ln() / denom
        };
        best = best.max(ratio);
    }
    Ok(best)
}

/// Log-log slope below which `(w_n^2)^(a-1) r_n` counts as tending to 0 over
/// the probe tail.
pub const BM_SLOPE_THRESHOLD: f64 = -1e-3;

/// Grid estimate of the Bouligand-Minkowski index: the smallest grid value
/// `a` for which `(w_n^2)^(a-1) r_n` decreases strictly along the probe tail
/// with tail log-log slope at most [`BM_SLOPE_THRESHOLD`].
pub fn index_e_bm(seq: &WeightSequence, a_grid: &[f64], probes: &[u64]) -> Result<f64> {
    require_closed(seq)?;
    validate_probes(probes)?;
    if a_grid.is_empty() || a_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::GridTooCoarse);
    }
    let t = tail(probes);
    if t.len() < 2 {
        return Err(Error::EmptyProbes);
    }
    let mut pts = Vec::with_capacity(t.len());
    for &n in t {
        pts.push(((n as f64).ln(), seq.ln_w2(n)?, seq.tail_sum(n)?.ln()?));
    }
    for &a in a_grid {
        let ln_g: Vec<f64> = pts.iter().map(|&(_, lw2, lr)| (a - 1.0) * lw2 + lr).collect();
        let decreasing = ln_g.windows(2).all(|w| w[1] < w[0]);
        let (ln_n0, ln_n1) = (pts[0].0, pts[pts.len() - 1].0);
        let slope = (ln_g[ln_g.len() - 1] - ln_g[0]) / (ln_n1 - ln_n0);
        if decreasing && slope <= BM_SLOPE_THRESHOLD {
            return Ok(a);
        }
    }
    Err(Error::GridTooCoarse)
}

/// `0.01, 0.02, ..., 0.99`.
pub fn default_a_grid() -> Vec<f64> {
    (1..100).map(|k| k as f64 / 100.0).collect()
}

/// Onsets of the three "finally" inequalities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FinallyReport {
    pub theta: f64,
    pub delta: f64,
    /// `(1/theta) (1 - delta)`.
    pub epsilon: f64,
    /// `w_n^2 < n^(-1/theta)`.
    pub onset_w2: u64,
    /// `r_n < (w_n^2)^(1-delta)`.
    pub onset_tail_vs_w2: u64,
    /// `r_n < n^(-epsilon)`.
    pub onset_tail_power: u64,
}

fn onset(probes: &[u64], holds: &[bool], which: &'static str) -> Result<u64> {
    // Smallest probe from which the inequality holds through the end.
    let mut start = None;
    for (i, &ok) in holds.iter().enumerate().rev() {
        if ok {
            start = Some(probes[i]);
        } else {
            break;
        }
    }
    start.ok_or(Error::NeverHolds { which })
}

/// Checks the three "finally" inequalities against the certified tail
/// bracket: `r_n < X` counts only when the bracket's upper end is below `X`.
pub fn verify_finally_inequalities(
    seq: &WeightSequence,
    theta: f64,
    delta: f64,
    probes: &[u64],
) -> Result<FinallyReport> {
    require_closed(seq)?;
    validate_probes(probes)?;
    let e_bt = index_e_bt(seq, probes)?;
    for (name, value) in [("theta", theta), ("delta", delta)] {
        if !(value > e_bt && value < 1.0) {
            return Err(Error::InadmissibleParameter { name, value, lo: e_bt });
        }
    }
    let epsilon = (1.0 / theta) * (1.0 - delta);
    let mut h1 = Vec::with_capacity(probes.len());
    let mut h2 = Vec::with_capacity(probes.len());
    let mut h3 = Vec::with_capacity(probes.len());
    for &n in probes {
        let ln_n = (n as f64).ln();
        let lw2 = seq.ln_w2(n)?;
        let r_hi = seq.tail_sum(n)?.log_hi;
        h1.push(lw2 < -ln_n / theta);
        h2.push(r_hi < (1.0 - delta) * lw2);
        h3.push(r_hi < -epsilon * ln_n);
    }
    Ok(FinallyReport {
        theta,
        delta,
        epsilon,
        onset_w2: onset(probes, &h1, "w_n^2 < n^(-1/theta)")?,
        onset_tail_vs_w2: onset(probes, &h2, "r_n < (w_n^2)^(1-delta)")?,
        onset_tail_power: onset(probes, &h3, "r_n < n^(-epsilon)")?,
    })
}

/// Comparability of `ln n` and `|ln w_n|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prop7Report {
    pub liminf_proxy: f64,
    pub limsup_proxy: f64,
    pub comparable: bool,
}

pub fn prop7_ratio(seq: &WeightSequence, probes: &[u64]) -> Result<Prop7Report> {
    require_closed(seq)?;
    validate_probes(probes)?;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &n in tail(probes) {
        let denom = seq.ln_w(n)?.abs();
        let r = if denom == 0.0 {
            f64::INFINITY
        } else {
            (n as f64).ln() / denom
        };
        lo = lo.min(r);
        hi = hi.max(r);
    }
    Ok(Prop7Report {
        liminf_proxy: lo,
        limsup_proxy: hi,
        comparable: lo > 0.01 && hi < 100.0,
    })
}

/// Margin added to the smallest exponent `mu` with `r_n >= n^(-mu)` on the probes.
pub const MU_MARGIN: f64 = 0.01;

/// Smallest `mu` (plus [`MU_MARGIN`]) with `r_n >= n^(-mu)` at every probe `n >= 2`.
pub fn lower_exponent_mu(seq: &WeightSequence, probes: &[u64]) -> Result<f64> {
    require_closed(seq)?;
    validate_probes(probes)?;
    let mut mu = f64::NEG_INFINITY;
    for &n in probes.iter().filter(|&&n| n >= 2) {
        let ln_r = seq.tail_sum(n)?.log_lo;
        mu = mu.max(-ln_r / (n as f64).ln());
    }
    Ok(mu + MU_MARGIN)
}

/// All sequence-level indexes in one record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexReport {
    pub a_est: f64,
    pub a_converged: bool,
    pub e_bt_est: f64,
    pub e_bm_est: f64,
    pub theta: f64,
    pub delta: f64,
    pub epsilon: f64,
    pub mu: f64,
    pub onset_w2: u64,
    pub onset_tail_vs_w2: u64,
    pub onset_tail_power: u64,
    pub prop7: Prop7Report,
    /// Both hypotheses `a != 0` and `e_BT != 1` appear to hold at the horizon.
    pub hypotheses_hold: bool,
}

/// Builds an [`IndexReport`]. `theta`/`delta` default to the midpoint of the
/// admissible range `(e_BT, 1)`.
pub fn index_report(
    seq: &WeightSequence,
    theta: Option<f64>,
    delta: Option<f64>,
) -> Result<IndexReport> {
    let probes = default_probes();
    let a = index_a(seq, &probes)?;
    let e_bt = index_e_bt(seq, &probes)?;
    let e_bm = index_e_bm(seq, &default_a_grid(), &probes)?;
    let onset_grid = onset_probes();
    let e_bt_onset = index_e_bt(seq, &onset_grid)?;
    let mid = 0.5 * (1.0 + e_bt.max(e_bt_onset));
    let theta = theta.unwrap_or(mid);
    let delta = delta.unwrap_or(mid);
    let fin = verify_finally_inequalities(seq, theta, delta, &onset_grid)?;
    let prop7 = prop7_ratio(seq, &probes)?;
    Ok(IndexReport {
        a_est: a.a_est,
        a_converged: a.converged,
        e_bt_est: e_bt,
        e_bm_est: e_bm,
        theta,
        delta,
        epsilon: fin.epsilon,
        mu: lower_exponent_mu(seq, &probes)?,
        onset_w2: fin.onset_w2,
        onset_tail_vs_w2: fin.onset_tail_vs_w2,
        onset_tail_power: fin.onset_tail_power,
        hypotheses_hold: prop7.comparable && e_bt < 0.99,
        prop7,
    })
}
