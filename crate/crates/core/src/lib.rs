// NaN-rejecting guards are written as `!(x > 0.0)` on purpose
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::type_complexity)]

pub mod config;
pub mod divergences;
pub mod duality;
pub mod error;
pub mod exponents;
pub mod hockey_stick;
pub mod io;
pub mod linalg;
pub mod oracles;
pub mod quadrature;
pub mod rs_dist;
pub mod suite;
pub mod trace_reps;

pub use config::{Config, LogBase};
pub use error::{Error, Result};
