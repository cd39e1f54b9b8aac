// NaN-rejecting guards are written as negated comparisons on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod cli;
pub mod combinat;
pub mod error;
pub mod fractional;
pub mod montecarlo;
pub mod processes;
pub mod specfun;
pub mod stats;
pub mod subordinator;
mod sum;

pub use error::{Error, Result};
