//! Toolchain for value-dependent global session descriptions.
//!
//! A description lists the messages each participant creates and sends. The
//! [`check`] module walks it with a [`KnowledgeIndex`](model::KnowledgeIndex)
//! recording which roles have seen which values, and rejects any step where a
//! role would use a value it has not learned. The [`sim`] module replays a
//! checked description against concrete values and evaluates the refinement
//! predicates.

pub mod check;
pub mod model;
pub mod sim;
pub mod syntax;
pub mod value;

pub use check::{check_file, CheckResult, Code, Diagnostic, Severity};
pub use syntax::{parse, parse_trace, print, SourceFile, Trace};
pub use value::Value;
