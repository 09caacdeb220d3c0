//! Experiment harness for sumscale problems: run descriptions, parallel
//! suite execution, table output and the acceptance checks behind
//! `sumscale verify`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod emit;
pub mod error;
pub mod rng;
pub mod runner;
pub mod spec;
pub mod verify;

pub use error::{HarnessError, Result};
pub use runner::{run, run_all, Row};
pub use spec::{RunSpec, Start, Suite};
