//! VML: a small language for run-time variability.
//!
//! A model declares context variables (inputs), variation points (decisions),
//! properties to optimize and rules that constrain decisions when a context
//! condition holds. This crate parses and checks models, lowers them to a
//! weighted constraint optimization problem, solves it over the discretized
//! domains, emits MiniZinc, and replays context changes through a pipeline
//! of linked models.

pub mod analysis;
pub mod compile;
pub mod diagnostic;
pub mod domain;
pub mod expr;
pub mod runtime;
pub mod solve;
pub mod syntax;
pub mod units;

pub use analysis::{analyze, TypedModel};
pub use diagnostic::{Code, Diagnostic, Severity};
pub use syntax::{parse_model, pretty_print};
