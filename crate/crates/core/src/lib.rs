// `!(x > 0.0)` style guards are used on purpose to reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod battery;
pub mod error;
pub mod link_stats;
pub mod monte_carlo;
pub mod params;
pub mod specfun;
pub mod sweep;

pub use error::{Error, Result};
