//! Command-line front end. Exit codes: 0 clean, 1 findings present,
//! 2 usage or input error.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::auxfn::{
    build_f, build_h, choose_subsequence, little_o_check, rate_rows, series_diagnostics,
    RateFunction, RateKind, RateRow, Schedule, SeriesDiagnostics, Verdict, DEFAULT_S_MAX,
};
use crate::dilation::{dilate_1d, dilate_2d, identity_rhs_2d, RectUnionArtifact, Rectangle};
use crate::error::{Error, Result};
use crate::interval1d::{DisjointIntervalSet, Interval};
use crate::scan::{
    probe_point, scan_theorem6, separation_check, theorem13_rows, PointRow, ScanConfig,
    ASPECT_LIMITS,
};
use crate::setmodel::{build_cover, build_packing, CompactSetModel, CoverCm, CoverVerdict, Cube};
use crate::weights::{index_report, WeightSequence};

const CANONICAL: &str = "power:c=0.25,p=2";

#[derive(Debug, Parser)]
#[command(name = "densitometer", version, about = "Density bounds for box-minus-cubes compact sets")]
struct Cli {
    /// Directory that relative input and output paths are resolved against.
    #[arg(long, global = true, default_value = ".")]
    out_dir: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sequence indexes a, e_BT, e_BM and the finally-inequalities.
    Indices {
        #[arg(long)]
        seq: WeightSequence,
        #[arg(long)]
        theta: Option<f64>,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// One-dimensional simultaneous dilation.
    Dilate1d {
        /// Inline JSON `[[lo,hi],...]` or a path to such a file.
        #[arg(long = "in")]
        input: String,
        #[arg(long)]
        gamma: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Two-dimensional simultaneous dilation.
    Dilate2d {
        /// Inline JSON or path; entries `[x,y,w]` (squares) or `[x0,x1,y0,y1]`.
        #[arg(long = "in")]
        input: String,
        #[arg(long)]
        gamma: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Subsequence s_l and the step functions h, f as CSV.
    Auxfn {
        #[arg(long)]
        seq: WeightSequence,
        #[arg(long, default_value_t = 12)]
        ell_max: usize,
        #[arg(long, default_value_t = DEFAULT_S_MAX)]
        s_max: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Series and little-o diagnostics.
    Diag {
        #[command(subcommand)]
        which: Diag,
    },
    /// Shelf-packed truncated set.
    BuildSet {
        #[arg(long)]
        seq: WeightSequence,
        #[arg(long)]
        n: usize,
        /// Outer box `x0,x1,y0,y1`.
        #[arg(long, default_value = "0,1,0,1")]
        outer: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exceptional cover C_m through block s_hi.
    Cover {
        #[arg(long)]
        set: PathBuf,
        #[arg(long, default_value_t = 3)]
        m: u32,
        /// Defaults to the last block the truncation holds.
        #[arg(long)]
        s_hi: Option<u32>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Density scan against h(t).
    Scan {
        #[arg(long)]
        set: PathBuf,
        #[arg(long)]
        auxfn: PathBuf,
        #[command(flatten)]
        scan: ScanArgs,
        #[arg(long)]
        s_hi: Option<u32>,
        /// Also scan this point (`x,y`), reported with its cover verdict.
        #[arg(long)]
        probe: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// indices, auxfn diagnostics, build-set, cover and scan in one run.
    VerifyAll {
        #[arg(long, default_value = CANONICAL)]
        seq: WeightSequence,
        /// Cover horizon s_hi; the set holds cubes 1..n_{level+1}-1.
        #[arg(long, default_value_t = 4)]
        level: u32,
        #[arg(long, default_value_t = 12)]
        ell_max: usize,
        #[command(flatten)]
        scan: ScanArgs,
    },
}

#[derive(Debug, Args)]
struct ScanArgs {
    #[arg(long, value_delimiter = ',', default_values_t = [0.25, 0.05, 0.01])]
    t: Vec<f64>,
    #[arg(long, default_value_t = 100)]
    points: usize,
    #[arg(long, default_value_t = 500)]
    rects: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 3)]
    m: u32,
    /// Aspect range `lo,hi` within [0.05, 20].
    #[arg(long, value_delimiter = ',', default_values_t = [ASPECT_LIMITS.0, ASPECT_LIMITS.1])]
    aspect: Vec<f64>,
}

impl ScanArgs {
    fn config(&self, s_hi: u32) -> Result<ScanConfig> {
        let [lo, hi] = self.aspect[..] else {
            return Err(Error::InvalidConfig("--aspect takes two values".into()));
        };
        let c = ScanConfig {
            t_grid: self.t.clone(),
            points: self.points,
            rects_per_point: self.rects,
            seed: self.seed,
            aspect_range: (lo, hi),
            m: self.m,
            s_hi,
        };
        c.validate()?;
        Ok(c)
    }
}

#[derive(Debug, Subcommand)]
enum Diag {
    /// Partial sums of 2^s r, 2^s sqrt(r), 4^s r at n_s.
    Series {
        #[arg(long)]
        seq: WeightSequence,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        #[arg(long, default_value_t = DEFAULT_S_MAX)]
        s_max: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Trace of f(b) |ln b| along the subsequence.
    Littleo {
        #[arg(long)]
        seq: WeightSequence,
        #[arg(long, default_value_t = 12)]
        ell_max: usize,
        #[arg(long, default_value_t = DEFAULT_S_MAX)]
        s_max: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Outcome {
    Clean,
    Findings,
}

impl Outcome {
    fn from_ok(ok: bool) -> Self {
        if ok {
            Outcome::Clean
        } else {
            Outcome::Findings
        }
    }
}

/// Parses `argv` (program name first) and runs the command.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(&cli) {
        Ok(Outcome::Clean) => 0,
        Ok(Outcome::Findings) => 1,
        Err(e @ Error::Divergent { .. }) => {
            eprintln!("finding: {e}");
            1
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

struct Ctx<'a> {
    dir: &'a Path,
}

impl Ctx<'_> {
    fn path(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.dir.join(p)
        }
    }

    fn read(&self, p: &Path) -> Result<String> {
        Ok(fs::read_to_string(self.path(p))?)
    }

    /// Inline JSON if it parses, otherwise a path.
    fn json_arg<T: for<'de> Deserialize<'de>>(&self, arg: &str) -> Result<T> {
        match serde_json::from_str(arg) {
            Ok(v) => Ok(v),
            Err(_) if !arg.trim_start().starts_with('[') => Ok(serde_json::from_str(&self.read(Path::new(arg))?)?),
            Err(e) => Err(e.into()),
        }
    }

    fn emit(&self, out: Option<&Path>, text: &str) -> Result<()> {
        match out {
            Some(p) => {
                let p = self.path(p);
                if let Some(parent) = p.parent() {
                    fs::create_dir_all(parent)?;
                }
                fs::write(p, text)?;
            }
            None => io::stdout().write_all(text.as_bytes())?,
        }
        Ok(())
    }

    fn emit_json<T: Serialize>(&self, out: Option<&Path>, v: &T) -> Result<()> {
        let mut s = serde_json::to_string_pretty(v)?;
        s.push('\n');
        self.emit(out, &s)
    }

    fn emit_csv<T: Serialize>(&self, out: Option<&Path>, rows: &[T]) -> Result<()> {
        self.emit(out, &csv_string(rows)?)
    }
}

fn csv_string<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

fn parse_floats(s: &str, n: usize, what: &str) -> Result<Vec<f64>> {
    let v: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::Parse(format!("{what}: {e}")))?;
    if v.len() != n {
        return Err(Error::Parse(format!("{what}: expected {n} numbers, got {}", v.len())));
    }
    Ok(v)
}

#[derive(Serialize)]
struct Dilate1dArtifact {
    union: DisjointIntervalSet,
    measure: f64,
    identity_rhs: f64,
    gamma: f64,
    pieces: Vec<[Interval; 3]>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum CubeSpec {
    Square(Cube),
    Rect(Rectangle),
}

#[derive(Serialize)]
struct SeriesRow {
    series: &'static str,
    s: u32,
    log_term: f64,
    term: f64,
    partial_sum: f64,
    ratio: Option<f64>,
}

fn series_rows(d: &SeriesDiagnostics) -> Vec<SeriesRow> {
    d.traces
        .iter()
        .flat_map(|tr| {
            tr.terms.iter().map(|t| SeriesRow {
                series: tr.series.as_str(),
                s: t.s,
                log_term: t.log_term,
                term: t.term,
                partial_sum: t.partial_sum,
                ratio: t.ratio,
            })
        })
        .collect()
}

#[derive(Serialize)]
struct BlockArtifact {
    s: u32,
    gamma: f64,
    first: usize,
    last: usize,
    measure: f64,
    identity_rhs: f64,
    rects: Vec<Rectangle>,
}

#[derive(Serialize)]
struct CoverArtifact {
    m: u32,
    s_hi: u32,
    measure_bound: f64,
    blocks_measure: f64,
    blocks: Vec<BlockArtifact>,
}

impl From<&CoverCm> for CoverArtifact {
    fn from(c: &CoverCm) -> Self {
        CoverArtifact {
            m: c.m,
            s_hi: c.s_hi,
            measure_bound: c.measure_bound,
            blocks_measure: c.blocks_measure(),
            blocks: c
                .blocks
                .iter()
                .map(|b| BlockArtifact {
                    s: b.s,
                    gamma: b.gamma,
                    first: b.first,
                    last: b.last,
                    measure: b.measure,
                    identity_rhs: b.identity_rhs,
                    rects: b.union.rects().collect(),
                })
                .collect(),
        }
    }
}

/// Largest block the truncation holds.
fn max_level(model: &CompactSetModel) -> Result<u32> {
    let sch = Schedule::new(DEFAULT_S_MAX)?;
    (1..DEFAULT_S_MAX)
        .take_while(|&s| sch.block_end(s).is_some_and(|e| e <= model.trunc() as u128))
        .last()
        .ok_or(Error::TruncationTooSmall {
            trunc: model.trunc(),
            needed: 3,
        })
}

fn load_h(ctx: &Ctx, p: &Path) -> Result<RateFunction> {
    let text = ctx.read(p)?;
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let rows = rdr.deserialize().collect::<std::result::Result<Vec<RateRow>, _>>()?;
    RateFunction::from_rows(&rows, RateKind::H)
}

fn dispatch(cli: &Cli) -> Result<Outcome> {
    let ctx = Ctx { dir: &cli.out_dir };
    match &cli.command {
        Command::Indices {
            seq,
            theta,
            delta,
            out,
        } => {
            let r = index_report(seq, *theta, *delta)?;
            ctx.emit_json(out.as_deref(), &r)?;
            Ok(Outcome::from_ok(r.hypotheses_hold))
        }
        Command::Dilate1d { input, gamma, out } => {
            let ivs: Vec<Interval> = ctx.json_arg(input)?;
            let r = dilate_1d(&ivs, *gamma)?;
            ctx.emit_json(
                out.as_deref(),
                &Dilate1dArtifact {
                    measure: r.measure(),
                    identity_rhs: r.identity_rhs(),
                    gamma: r.gamma,
                    pieces: r.pieces.iter().map(|p| [p.left, p.right, p.hull]).collect(),
                    union: r.union,
                },
            )?;
            Ok(Outcome::Clean)
        }
        Command::Dilate2d { input, gamma, out } => {
            let specs: Vec<CubeSpec> = ctx.json_arg(input)?;
            let rects = specs
                .into_iter()
                .map(|c| match c {
                    CubeSpec::Square(q) => q.rect(),
                    CubeSpec::Rect(r) => Ok(r),
                })
                .collect::<Result<Vec<_>>>()?;
            let u = dilate_2d(&rects, *gamma)?;
            ctx.emit_json(out.as_deref(), &RectUnionArtifact::new(&u, identity_rhs_2d(&rects, *gamma)))?;
            Ok(Outcome::Clean)
        }
        Command::Auxfn {
            seq,
            ell_max,
            s_max,
            out,
        } => {
            let sel = choose_subsequence(seq, &Schedule::new(*s_max)?, *ell_max)?;
            ctx.emit_csv(out.as_deref(), &rate_rows(&sel)?)?;
            Ok(Outcome::Clean)
        }
        Command::Diag {
            which: Diag::Series { seq, tol, s_max, out },
        } => {
            let d = series_diagnostics(seq, &Schedule::new(*s_max)?, *tol)?;
            ctx.emit_csv(out.as_deref(), &series_rows(&d))?;
            Ok(Outcome::Clean)
        }
        Command::Diag {
            which: Diag::Littleo {
                seq,
                ell_max,
                s_max,
                out,
            },
        } => {
            let sel = choose_subsequence(seq, &Schedule::new(*s_max)?, *ell_max)?;
            let tr = little_o_check(&sel);
            ctx.emit_csv(out.as_deref(), &tr.entries)?;
            eprintln!("verdict: {:?}", tr.verdict);
            Ok(Outcome::from_ok(tr.verdict != Verdict::Diverging))
        }
        Command::BuildSet { seq, n, outer, out } => {
            let o = parse_floats(outer, 4, "--outer")?;
            let model = build_packing(seq, *n, Rectangle::new(o[0], o[1], o[2], o[3])?)?;
            ctx.emit_json(out.as_deref(), &model)?;
            Ok(Outcome::Clean)
        }
        Command::Cover { set, m, s_hi, out } => {
            let model: CompactSetModel = serde_json::from_str(&ctx.read(set)?)?;
            let s_hi = match s_hi {
                Some(s) => *s,
                None => max_level(&model)?,
            };
            let cover = build_cover(&model, *m, s_hi)?;
            ctx.emit_json(out.as_deref(), &CoverArtifact::from(&cover))?;
            Ok(Outcome::Clean)
        }
        Command::Scan {
            set,
            auxfn,
            scan,
            s_hi,
            probe,
            out,
        } => {
            let model: CompactSetModel = serde_json::from_str(&ctx.read(set)?)?;
            let h = load_h(&ctx, auxfn)?;
            let s_hi = match s_hi {
                Some(s) => *s,
                None => max_level(&model)?,
            };
            let config = scan.config(s_hi)?;
            let cover = build_cover(&model, config.m, s_hi)?;
            let report = scan_theorem6(&model, &cover, &h, &config)?;
            ctx.emit_csv(out.as_deref(), &report.rows)?;
            for s in &report.per_t {
                eprintln!(
                    "t = {}: h = {}, eligible {}/{}, min margin {}, violations {}",
                    s.t, s.h, s.eligible_pairs, s.pairs, s.min_margin, s.violations
                );
            }
            if let Some(p) = probe {
                let xy = parse_floats(p, 2, "--probe")?;
                let pr = probe_point(&model, &cover, &h, &config, (xy[0], xy[1]))?;
                eprintln!("probe ({}, {}): {:?}, violations {}", xy[0], xy[1], pr.verdict.overall, pr.violations());
            }
            Ok(Outcome::from_ok(report.violations() == 0))
        }
        Command::VerifyAll {
            seq,
            level,
            ell_max,
            scan,
        } => verify_all(&ctx, seq, *level, *ell_max, scan),
    }
}

#[derive(Serialize)]
struct SummaryRow {
    step: &'static str,
    metric: String,
    value: String,
    status: &'static str,
}

struct Summary {
    rows: Vec<SummaryRow>,
    clean: bool,
}

impl Summary {
    fn add(&mut self, step: &'static str, metric: impl Into<String>, value: impl ToString, ok: bool) {
        self.clean &= ok;
        self.rows.push(SummaryRow {
            step,
            metric: metric.into(),
            value: value.to_string(),
            status: if ok { "ok" } else { "finding" },
        });
    }

    fn info(&mut self, step: &'static str, metric: impl Into<String>, value: impl ToString) {
        self.add(step, metric, value, true);
    }
}

fn verify_all(ctx: &Ctx, seq: &WeightSequence, level: u32, ell_max: usize, args: &ScanArgs) -> Result<Outcome> {
    fs::create_dir_all(ctx.dir)?;
    let config = args.config(level)?;
    let mut sum = Summary {
        rows: Vec::new(),
        clean: true,
    };

    let idx = index_report(seq, None, None)?;
    ctx.emit_json(Some(Path::new("indices.json")), &idx)?;
    sum.info("indices", "a", idx.a_est);
    sum.info("indices", "e_bt", idx.e_bt_est);
    sum.info("indices", "e_bm", idx.e_bm_est);
    sum.add("indices", "hypotheses_hold", idx.hypotheses_hold, idx.hypotheses_hold);

    let sch = Schedule::new(DEFAULT_S_MAX)?;
    let sel = choose_subsequence(seq, &sch, ell_max)?;
    ctx.emit_csv(Some(Path::new("h.csv")), &rate_rows(&sel)?)?;
    let h = build_h(&sel)?;
    let f = build_f(&sel)?;
    let s_ell: Vec<String> = sel.s_ell.iter().map(u32::to_string).collect();
    sum.info("auxfn", "s_ell", s_ell.join(" "));

    match series_diagnostics(seq, &sch, 1e-12) {
        Ok(d) => {
            ctx.emit_csv(Some(Path::new("series.csv")), &series_rows(&d))?;
            for tr in &d.traces {
                let at = tr.below_tol_at.map_or("beyond horizon".to_string(), |s| s.to_string());
                sum.info("series", format!("{} below 1e-12 at s", tr.series.as_str()), at);
                sum.info("series", format!("{} sum", tr.series.as_str()), tr.sum);
            }
        }
        Err(e @ Error::Divergent { .. }) => sum.add("series", "divergence", e, false),
        Err(e) => return Err(e),
    }

    let lo = little_o_check(&sel);
    ctx.emit_csv(Some(Path::new("littleo.csv")), &lo.entries)?;
    sum.add("littleo", "verdict", format!("{:?}", lo.verdict).to_lowercase(), lo.verdict != Verdict::Diverging);

    let n = sch
        .block_end(level)
        .filter(|&e| e <= usize::MAX as u128)
        .ok_or_else(|| Error::InvalidConfig(format!("level {level} is too large")))? as usize;
    let model = build_packing(seq, n, Rectangle::new(0.0, 1.0, 0.0, 1.0)?)?;
    ctx.emit_json(Some(Path::new("set.json")), &model)?;
    sum.info("build-set", "trunc", n);
    sum.info("build-set", "k_measure", model.k_measure()?);

    let cover = build_cover(&model, config.m, level)?;
    ctx.emit_json(Some(Path::new("cover.json")), &CoverArtifact::from(&cover))?;
    for b in &cover.blocks {
        let rel = ((b.measure - b.identity_rhs) / b.identity_rhs).abs();
        sum.add("cover", format!("block {} measure", b.s), b.measure, rel < 1e-9);
    }
    sum.info("cover", "measure_bound", cover.measure_bound);

    let report = scan_theorem6(&model, &cover, &h, &config)?;
    ctx.emit_csv(Some(Path::new("scan.csv")), &report.rows)?;
    sum.info("scan", "acceptance", report.acceptance);
    for s in &report.per_t {
        sum.info("scan", format!("t={} eligible pairs", s.t), s.eligible_pairs);
        sum.info("scan", format!("t={} min margin", s.t), s.min_margin);
        sum.add("scan", format!("t={} violations", s.t), s.violations, s.violations == 0);
    }

    let adv = model.cube(300.min(n));
    let p = (adv.x + adv.w / 2.0, adv.y + adv.w / 2.0);
    let probe = probe_point(&model, &cover, &h, &config, p)?;
    let probe_rows: Vec<PointRow> = probe.rows.clone();
    ctx.emit_csv(Some(Path::new("probe.csv")), &probe_rows)?;
    let flagged = probe.verdict.overall == CoverVerdict::InCover;
    sum.add("probe", "in-cube point in cover", flagged, flagged);
    sum.info("probe", "violations", probe.violations());

    let sep = separation_check(&model, &cover, &h, &config)?;
    ctx.emit_json(Some(Path::new("separation.json")), &sep)?;
    sum.add("separation", "violations", sep.violations(), sep.violations() == 0);

    let t13 = theorem13_rows(&report, &f)?;
    ctx.emit_csv(Some(Path::new("theorem13.csv")), &t13)?;
    for r in &t13 {
        sum.add("theorem13", format!("t={} deficit", r.t), r.worst_deficit, r.within_envelope);
    }

    let text = csv_string(&sum.rows)?;
    ctx.emit(Some(Path::new("summary.csv")), &text)?;
    print!("{text}");
    Ok(Outcome::from_ok(sum.clean))
}
