//! Names, payload types and the refinement expression language.

use std::collections::BTreeSet;
use std::fmt;
use std::hash::{Hash, Hasher};

use num_bigint::BigInt;

/// A source region. `line`/`col` are 1-based and refer to `start`.
///
/// Spans never take part in structural equality or hashing: two ASTs that
/// differ only in where they came from compare equal.
#[derive(Debug, Clone, Copy, Default)]
pub struct Span {
    pub start: usize,
    pub end: usize,
    pub line: u32,
    pub col: u32,
}

impl Span {
    pub fn new(start: usize, end: usize, line: u32, col: u32) -> Self {
        Span {
            start,
            end,
            line,
            col,
        }
    }

    pub fn len(&self) -> usize {
        self.end.saturating_sub(self.start)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Smallest span covering both `self` and `other`.
    pub fn to(self, other: Span) -> Span {
        let first = if other.start < self.start {
            other
        } else {
            self
        };
        Span {
            start: first.start,
            end: self.end.max(other.end),
            line: first.line,
            col: first.col,
        }
    }
}

impl PartialEq for Span {
    fn eq(&self, _: &Span) -> bool {
        true
    }
}

impl Eq for Span {}

impl Hash for Span {
    fn hash<H: Hasher>(&self, _: &mut H) {}
}

/// A value paired with the span it was written at.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Spanned<T> {
    pub node: T,
    pub span: Span,
}

impl<T> Spanned<T> {
    pub fn new(node: T, span: Span) -> Self {
        Spanned { node, span }
    }

    pub fn dummy(node: T) -> Self {
        Spanned {
            node,
            span: Span::default(),
        }
    }
}

/// True if `s` is a letter followed by letters, digits or underscores.
pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

macro_rules! name_type {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub struct $name(String);

        impl $name {
            /// Panics if `name` is not a valid identifier.
            pub fn new(name: impl Into<String>) -> Self {
                let name = name.into();
                assert!(is_identifier(&name), "invalid identifier {name:?}");
                $name(name)
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                $name::new(s)
            }
        }
    };
}

name_type!(
    /// A protocol participant, compared by its tag.
    RoleId
);
name_type!(
    /// A message variable.
    VarId
);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BaseKind {
    Int,
    Bool,
    Str,
}

impl BaseKind {
    pub fn keyword(self) -> &'static str {
        match self {
            BaseKind::Int => "Int",
            BaseKind::Bool => "Bool",
            BaseKind::Str => "Str",
        }
    }
}

/// Message payload types.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TypeExpr {
    Base(BaseKind),
    /// Arity is at least two.
    Tuple(Vec<TypeExpr>),
    /// Reference to a [`VariantDecl`] by name.
    Named(Spanned<String>),
    /// A payload constrained by a predicate over `binder` and earlier messages.
    Refined {
        payload: Box<TypeExpr>,
        binder: VarId,
        predicate: RefExpr,
    },
}

impl TypeExpr {
    /// The payload type with any top-level refinement removed.
    pub fn carrier(&self) -> &TypeExpr {
        match self {
            TypeExpr::Refined { payload, .. } => payload.carrier(),
            other => other,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Constructor {
    pub tag: Spanned<String>,
    pub payload: Option<TypeExpr>,
}

/// `type CMD = Math | Echo | Quit`
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VariantDecl {
    pub name: Spanned<String>,
    pub constructors: Vec<Constructor>,
}

impl VariantDecl {
    pub fn constructor(&self, tag: &str) -> Option<&Constructor> {
        self.constructors.iter().find(|c| c.tag.node == tag)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoolOp {
    And,
    Or,
}

impl ArithOp {
    pub fn symbol(self) -> &'static str {
        match self {
            ArithOp::Add => "+",
            ArithOp::Sub => "-",
            ArithOp::Mul => "*",
        }
    }
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "==",
            CmpOp::Ne => "!=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
        }
    }
}

impl BoolOp {
    pub fn keyword(self) -> &'static str {
        match self {
            BoolOp::And => "and",
            BoolOp::Or => "or",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RefExpr {
    pub kind: RefKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum RefKind {
    IntLit(BigInt),
    BoolLit(bool),
    StrLit(String),
    /// A previously created message.
    VarRef(VarId),
    /// The value being refined.
    Binder(VarId),
    /// 1-based tuple projection.
    Proj(Box<RefExpr>, usize),
    /// Payload of a refined message.
    UnwrapDep(Box<RefExpr>),
    Arith(ArithOp, Box<RefExpr>, Box<RefExpr>),
    Cmp(CmpOp, Box<RefExpr>, Box<RefExpr>),
    BoolOp(BoolOp, Box<RefExpr>, Box<RefExpr>),
}

impl RefExpr {
    pub fn new(kind: RefKind, span: Span) -> Self {
        RefExpr { kind, span }
    }

    /// Builds an expression with a default span; handy in tests and generators.
    pub fn bare(kind: RefKind) -> Self {
        RefExpr {
            kind,
            span: Span::default(),
        }
    }

    pub fn int(v: impl Into<BigInt>) -> Self {
        Self::bare(RefKind::IntLit(v.into()))
    }

    pub fn var(name: &str) -> Self {
        Self::bare(RefKind::VarRef(VarId::new(name)))
    }

    pub fn binder(name: &str) -> Self {
        Self::bare(RefKind::Binder(VarId::new(name)))
    }

    pub fn proj(self, index: usize) -> Self {
        Self::bare(RefKind::Proj(Box::new(self), index))
    }

    pub fn unwrap_dep(self) -> Self {
        Self::bare(RefKind::UnwrapDep(Box::new(self)))
    }

    pub fn arith(op: ArithOp, lhs: RefExpr, rhs: RefExpr) -> Self {
        Self::bare(RefKind::Arith(op, Box::new(lhs), Box::new(rhs)))
    }

    pub fn cmp(op: CmpOp, lhs: RefExpr, rhs: RefExpr) -> Self {
        Self::bare(RefKind::Cmp(op, Box::new(lhs), Box::new(rhs)))
    }

    pub fn bool_op(op: BoolOp, lhs: RefExpr, rhs: RefExpr) -> Self {
        Self::bare(RefKind::BoolOp(op, Box::new(lhs), Box::new(rhs)))
    }

    pub fn children(&self) -> Vec<&RefExpr> {
        match &self.kind {
            RefKind::IntLit(_)
            | RefKind::BoolLit(_)
            | RefKind::StrLit(_)
            | RefKind::VarRef(_)
            | RefKind::Binder(_) => vec![],
            RefKind::Proj(e, _) | RefKind::UnwrapDep(e) => vec![e],
            RefKind::Arith(_, l, r) | RefKind::Cmp(_, l, r) | RefKind::BoolOp(_, l, r) => {
                vec![l, r]
            }
        }
    }
}

/// Message variables a predicate mentions; the refinement binder is excluded.
pub fn free_vars(expr: &RefExpr) -> BTreeSet<VarId> {
    let mut out = BTreeSet::new();
    collect_vars(expr, &mut |v, _| {
        out.insert(v.clone());
    });
    out
}

/// Like [`free_vars`] but in first-occurrence order, with the span of that
/// first occurrence.
pub fn free_var_occurrences(expr: &RefExpr) -> Vec<(VarId, Span)> {
    let mut out: Vec<(VarId, Span)> = Vec::new();
    collect_vars(expr, &mut |v, span| {
        if !out.iter().any(|(seen, _)| seen == v) {
            out.push((v.clone(), span));
        }
    });
    out
}

fn collect_vars(expr: &RefExpr, f: &mut impl FnMut(&VarId, Span)) {
    if let RefKind::VarRef(v) = &expr.kind {
        f(v, expr.span);
    }
    for child in expr.children() {
        collect_vars(child, f);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vars(names: &[&str]) -> BTreeSet<VarId> {
        names.iter().map(|n| VarId::new(*n)).collect()
    }

    #[test]
    fn free_vars_excludes_binder() {
        let e = RefExpr::cmp(
            CmpOp::Eq,
            RefExpr::arith(ArithOp::Add, RefExpr::var("m1").proj(2), RefExpr::int(1)),
            RefExpr::binder("x"),
        );
        assert_eq!(free_vars(&e), vars(&["m1"]));
    }

    #[test]
    fn free_vars_of_literal_is_empty() {
        assert!(free_vars(&RefExpr::int(5)).is_empty());
    }

    #[test]
    fn free_vars_collects_every_reference() {
        let e = RefExpr::cmp(
            CmpOp::Eq,
            RefExpr::var("m2").proj(1),
            RefExpr::var("m1").proj(2),
        );
        assert_eq!(free_vars(&e), vars(&["m1", "m2"]));
        let order: Vec<_> = free_var_occurrences(&e)
            .into_iter()
            .map(|(v, _)| v.to_string())
            .collect();
        assert_eq!(order, ["m2", "m1"]);
    }

    #[test]
    fn identifiers() {
        assert!(is_identifier("Alice"));
        assert!(is_identifier("m_1"));
        assert!(!is_identifier("1m"));
        assert!(!is_identifier("_x"));
        assert!(!is_identifier(""));
    }

    #[test]
    fn spans_do_not_affect_equality() {
        let a = RefExpr::new(RefKind::BoolLit(true), Span::new(0, 4, 1, 1));
        let b = RefExpr::new(RefKind::BoolLit(true), Span::new(10, 14, 3, 7));
        assert_eq!(a, b);
    }
}
