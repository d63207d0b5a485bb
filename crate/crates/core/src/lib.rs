//! Finite-volume solver for the 2D Euler equations with MUSCL reconstruction
//! and the Koren limiter, where limiting can be restricted to troubled cells
//! flagged from cell-average density, plus near-shock solution-quality
//! diagnostics.
//!
//! Numerical code is generic over the scalar type through [`Real`]; the
//! aliases below fix it to `f64`, the precision used by the CLI.

// `!(x > 0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod boundary;
pub mod cases;
pub mod cli;
pub mod config;
pub mod diagnostics;
pub mod error;
pub mod euler;
pub mod field;
pub mod indicator;
pub mod mesh;
pub mod output;
pub mod reconstruction;
pub mod scalar;
pub mod solver;

pub use error::{Error, Result};
pub use scalar::Real;

pub type ConservedState = euler::ConservedState<f64>;
pub type PrimitiveState = euler::PrimitiveState<f64>;
pub type GasModel = euler::GasModel<f64>;
pub type StructuredMesh = mesh::StructuredMesh<f64>;
pub type CellField = field::CellField<f64>;
pub type CaseDefinition = cases::CaseDefinition<f64>;
pub type RunConfig = solver::RunConfig<f64>;
pub type RunOutput = solver::RunOutput<f64>;
pub type LineProfile = diagnostics::LineProfile<f64>;
pub type ShockLineReport = diagnostics::ShockLineReport<f64>;
