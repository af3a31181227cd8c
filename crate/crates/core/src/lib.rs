// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod classify;
pub mod error;
pub mod grid;
pub mod infer;
pub mod metrics;
pub mod record;
pub mod synth;
