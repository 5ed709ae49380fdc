pub mod auxfn;
pub mod cli;
pub mod dilation;
pub mod error;
pub mod interval1d;
pub mod scan;
pub mod setmodel;
pub mod weights;

pub use error::{Error, Result};
