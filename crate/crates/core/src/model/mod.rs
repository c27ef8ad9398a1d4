//! Domain types shared by the parser, checker and simulator.

mod knowledge;
mod types;

pub use knowledge::{overlapping, KnowledgeError, KnowledgeIndex, KnowledgeItem};
pub use types::{
    free_var_occurrences, free_vars, is_identifier, ArithOp, BaseKind, BoolOp, CmpOp, Constructor,
    RefExpr, RefKind, RoleId, Span, Spanned, TypeExpr, VarId, VariantDecl,
};
