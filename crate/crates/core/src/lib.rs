// NaN-rejecting guards like `!(x > 0.0)` are deliberate.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
pub mod cluster;
pub mod data;
pub mod error;
pub mod eval;
pub mod pipeline;
pub mod rbfnn;
pub mod svm;
pub mod ucp;

pub use error::{Error, Result, Stage};
