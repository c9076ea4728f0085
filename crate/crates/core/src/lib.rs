#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod calibrate;
pub mod characterize;
pub mod circuit;
pub mod compact_model;
pub mod error;
pub mod footprint;
pub mod numerics;

pub use compact_model::{BiasPoint, ModelCard, Polarity, Vnwfet};
pub use error::{Error, Result};
pub use numerics::SolverConfig;
