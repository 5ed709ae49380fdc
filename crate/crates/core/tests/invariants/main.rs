//! Property suites for every module, plus artifact round trips.

mod auxfn;
mod cli;
mod common;
mod dilation;
mod interval;
mod scan;
mod setmodel;
