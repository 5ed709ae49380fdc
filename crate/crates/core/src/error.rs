use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid weight sequence: {0}")]
    InvalidSequence(String),
    #[error("index {n} out of range (served: 1..={max})")]
    OutOfRange { n: f64, max: f64 },
    #[error("tail sum r_{n} is zero; its logarithm is undefined")]
    ZeroTail { n: u64 },
    #[error("index estimates need a closed-form (infinite) sequence")]
    NotClosedForm,
    #[error("degenerate index at n = {n}: r_n = {r_n} is not below n")]
    DegenerateIndex { n: u64, r_n: f64 },
    #[error("grid too coarse: no grid value brackets the index")]
    GridTooCoarse,
    #[error("inadmissible parameter {name} = {value}: must lie in ({lo}, 1)")]
    InadmissibleParameter { name: &'static str, value: f64, lo: f64 },
    #[error("inequality {which} never holds on the probe horizon")]
    NeverHolds { which: &'static str },
    #[error("empty probe grid")]
    EmptyProbes,

    #[error("invalid interval ({lo}, {hi})")]
    InvalidInterval { lo: f64, hi: f64 },
    #[error("dilation factor must exceed 1, got {0}")]
    InvalidGamma(f64),
    #[error("input intervals {0} and {1} overlap")]
    OverlappingInputs(usize, usize),
    #[error("input cubes {0} and {1} overlap")]
    OverlappingCubes(usize, usize),
    #[error("point ({0}, {1}) is not outside the dilation")]
    PointNotOutside(f64, f64),
    #[error("rectangle does not contain the point")]
    PointNotInRect,

    #[error("no admissible successor after s = {last_s} within horizon s_max = {s_max} (selected {selected:?})")]
    HorizonExhausted {
        last_s: u32,
        s_max: u32,
        selected: Vec<u32>,
        log_b: Vec<f64>,
    },
    #[error("t = exp({log_t}) lies below the smallest constructed breakpoint exp({log_floor})")]
    BelowHorizon { log_t: f64, log_floor: f64 },
    #[error("series {series} fails to decrease for 5 consecutive terms ending at s = {s}")]
    Divergent { series: &'static str, s: u32 },

    #[error("packing infeasible: total area {total_area}, largest side {w1}, outer {outer_w} x {outer_h}")]
    PackingInfeasible {
        total_area: f64,
        w1: f64,
        outer_w: f64,
        outer_h: f64,
    },
    #[error("empty rectangle")]
    EmptyRect,
    #[error("truncation N = {trunc} too small: cover horizon needs cubes up to {needed}")]
    TruncationTooSmall { trunc: usize, needed: u128 },
    #[error("acceptance rate {accepted}/{draws} below 1%")]
    AcceptanceTooLow { accepted: usize, draws: usize },
    #[error("invalid scan configuration: {0}")]
    InvalidConfig(String),

    #[error("parse error: {0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
