// `!(x > 0.0)` guards also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod harness;
pub mod imgcore;
pub mod metrics;
pub mod simulator;
pub mod spectral;
pub mod sysperf;
pub mod vision;
