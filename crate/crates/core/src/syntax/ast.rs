//! Abstract syntax of `.ssn` files.

use num_bigint::BigInt;

use crate::model::{RoleId, Span, Spanned, TypeExpr, VarId, VariantDecl};

/// One session construct. A [`Block`] sequences them left to right.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SessionExpr {
    NewMsg {
        var: Spanned<VarId>,
        ty: TypeExpr,
        creator: Spanned<RoleId>,
    },
    /// `ty` is always [`TypeExpr::Refined`] at the top.
    NewDepMsg {
        var: Spanned<VarId>,
        ty: TypeExpr,
        creator: Spanned<RoleId>,
    },
    Send {
        var: Spanned<VarId>,
        sender: Spanned<RoleId>,
        receiver: Spanned<RoleId>,
    },
    Read {
        var: Spanned<VarId>,
        arms: Vec<Arm>,
    },
    /// Re-enter the enclosing protocol.
    Rec,
    /// Run `target` to completion, then either stop or re-enter the caller.
    Call {
        target: Spanned<String>,
        args: Vec<Spanned<String>>,
        then_rec: bool,
    },
    End,
}

impl SessionExpr {
    /// Constructs that end the current path.
    pub fn is_terminator(&self) -> bool {
        matches!(
            self,
            SessionExpr::Read { .. }
                | SessionExpr::Rec
                | SessionExpr::Call { .. }
                | SessionExpr::End
        )
    }

    pub fn keyword(&self) -> &'static str {
        match self {
            SessionExpr::NewMsg { .. } => "msg",
            SessionExpr::NewDepMsg { .. } => "dep",
            SessionExpr::Send { .. } => "send",
            SessionExpr::Read { .. } => "read",
            SessionExpr::Rec => "rec",
            SessionExpr::Call { .. } => "call",
            SessionExpr::End => "end",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Stmt {
    pub expr: SessionExpr,
    pub span: Span,
    /// `--` comment lines written directly above the statement.
    pub comments: Vec<String>,
}

impl Stmt {
    pub fn new(expr: SessionExpr) -> Self {
        Stmt {
            expr,
            span: Span::default(),
            comments: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Block {
    pub stmts: Vec<Stmt>,
    /// Comments between the last statement and the closing brace.
    pub trailing: Vec<String>,
}

impl Block {
    pub fn new(stmts: Vec<Stmt>) -> Self {
        Block {
            stmts,
            trailing: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Pattern {
    Tag(String),
    Int(BigInt),
    Str(String),
    Bool(bool),
    Wildcard,
}

impl std::fmt::Display for Pattern {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Pattern::Tag(t) => f.write_str(t),
            Pattern::Int(i) => write!(f, "{i}"),
            Pattern::Str(s) => f.write_str(&crate::syntax::quote(s)),
            Pattern::Bool(b) => write!(f, "{b}"),
            Pattern::Wildcard => f.write_str("_"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Arm {
    pub pattern: Spanned<Pattern>,
    pub body: Block,
    pub comments: Vec<String>,
}

/// A higher-order protocol parameter, `body : protocol[Alice, Bob]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ProtocolParam {
    pub name: Spanned<String>,
    pub signature: Vec<Spanned<RoleId>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ProtocolDecl {
    pub name: Spanned<String>,
    pub params: Vec<ProtocolParam>,
    pub participants: Vec<Spanned<RoleId>>,
    pub body: Block,
}

impl ProtocolDecl {
    pub fn is_ground(&self) -> bool {
        self.params.is_empty()
    }

    pub fn participant_ids(&self) -> Vec<RoleId> {
        self.participants.iter().map(|p| p.node.clone()).collect()
    }

    pub fn param(&self, name: &str) -> Option<&ProtocolParam> {
        self.params.iter().find(|p| p.name.node == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ItemKind {
    Roles(Vec<Spanned<RoleId>>),
    Variant(VariantDecl),
    Protocol(ProtocolDecl),
    Entry(Spanned<String>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Item {
    pub kind: ItemKind,
    pub comments: Vec<String>,
}

impl Item {
    pub fn new(kind: ItemKind) -> Self {
        Item {
            kind,
            comments: Vec::new(),
        }
    }
}

/// A parsed `.ssn` file; declarations are kept in source order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct SourceFile {
    pub items: Vec<Item>,
    pub trailing: Vec<String>,
}

impl SourceFile {
    pub fn roles(&self) -> impl Iterator<Item = &Spanned<RoleId>> {
        self.items.iter().flat_map(|item| match &item.kind {
            ItemKind::Roles(roles) => roles.as_slice(),
            _ => &[],
        })
    }

    pub fn variants(&self) -> impl Iterator<Item = &VariantDecl> {
        self.items.iter().filter_map(|item| match &item.kind {
            ItemKind::Variant(v) => Some(v),
            _ => None,
        })
    }

    pub fn protocols(&self) -> impl Iterator<Item = &ProtocolDecl> {
        self.items.iter().filter_map(|item| match &item.kind {
            ItemKind::Protocol(p) => Some(p),
            _ => None,
        })
    }

    pub fn variant(&self, name: &str) -> Option<&VariantDecl> {
        self.variants().find(|v| v.name.node == name)
    }

    pub fn protocol(&self, name: &str) -> Option<&ProtocolDecl> {
        self.protocols().find(|p| p.name.node == name)
    }

    /// The explicit `entry` declaration, if any (the last one wins).
    pub fn entry_decl(&self) -> Option<&Spanned<String>> {
        self.items.iter().rev().find_map(|item| match &item.kind {
            ItemKind::Entry(name) => Some(name),
            _ => None,
        })
    }

    /// Name of the entry protocol: the `entry` declaration, or else the last
    /// protocol in the file.
    pub fn entry_name(&self) -> Option<&str> {
        match self.entry_decl() {
            Some(name) => Some(&name.node),
            None => self.protocols().last().map(|p| p.name.node.as_str()),
        }
    }
}

/// Visits every statement in `block`, arms included, in source order.
pub fn walk_stmts<'a>(block: &'a Block, f: &mut impl FnMut(&'a Stmt)) {
    for stmt in &block.stmts {
        f(stmt);
        if let SessionExpr::Read { arms, .. } = &stmt.expr {
            for arm in arms {
                walk_stmts(&arm.body, f);
            }
        }
    }
}
