//! Brute-force re-derivation of checker verdicts for call-free protocols.
//!
//! Every path through the `read` arms is expanded into a flat statement list,
//! and every obligation is recomputed from scratch by scanning the prefix
//! before the statement. Nothing is threaded from one statement to the next.

use std::collections::BTreeSet;

use sessioncheck_core::check::Code;
use sessioncheck_core::model::{RefExpr, RefKind, RoleId, TypeExpr, VarId};
use sessioncheck_core::syntax::{Block, Pattern, SessionExpr, SourceFile, Stmt};

/// `(var, type, knowers)` in creation order.
pub type FlatIndex = Vec<(VarId, TypeExpr, Vec<RoleId>)>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinalPath {
    pub arms: Vec<String>,
    pub terminator: String,
    pub index: FlatIndex,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub errors: BTreeSet<Code>,
    /// Only meaningful when `errors` is empty.
    pub finals: Vec<FinalPath>,
}

impl Verdict {
    pub fn accepted(&self) -> bool {
        self.errors.is_empty()
    }
}

struct Path<'a> {
    stmts: Vec<&'a Stmt>,
    arms: Vec<String>,
}

fn expand<'a>(block: &'a Block, prefix: &[&'a Stmt], arms: &[String], out: &mut Vec<Path<'a>>) {
    let mut stmts = prefix.to_vec();
    for stmt in &block.stmts {
        stmts.push(stmt);
        match &stmt.expr {
            SessionExpr::Read { var, arms: cases } => {
                for case in cases {
                    let mut labels = arms.to_vec();
                    labels.push(format!("{}={}", var.node, case.pattern.node));
                    expand(&case.body, &stmts, &labels, out);
                }
                return;
            }
            SessionExpr::End | SessionExpr::Rec => {
                out.push(Path {
                    stmts,
                    arms: arms.to_vec(),
                });
                return;
            }
            _ => {}
        }
    }
}

/// The creator and type of the first creation of `var` in `prefix`.
fn creation<'a>(prefix: &[&'a Stmt], var: &VarId) -> Option<(usize, &'a RoleId, &'a TypeExpr)> {
    prefix.iter().enumerate().find_map(|(i, s)| match &s.expr {
        SessionExpr::NewMsg {
            var: v,
            ty,
            creator,
        }
        | SessionExpr::NewDepMsg {
            var: v,
            ty,
            creator,
        } if &v.node == var => Some((i, &creator.node, ty)),
        _ => None,
    })
}

fn knowers(prefix: &[&Stmt], var: &VarId) -> Vec<RoleId> {
    let Some((at, creator, _)) = creation(prefix, var) else {
        return Vec::new();
    };
    let mut who = vec![creator.clone()];
    for s in &prefix[at + 1..] {
        if let SessionExpr::Send {
            var: v, receiver, ..
        } = &s.expr
        {
            if &v.node == var && !who.contains(&receiver.node) {
                who.push(receiver.node.clone());
            }
        }
    }
    who
}

fn refs(e: &RefExpr, out: &mut Vec<VarId>) {
    match &e.kind {
        RefKind::VarRef(v) => out.push(v.clone()),
        RefKind::Proj(inner, _) | RefKind::UnwrapDep(inner) => refs(inner, out),
        RefKind::Arith(_, l, r) | RefKind::Cmp(_, l, r) | RefKind::BoolOp(_, l, r) => {
            refs(l, out);
            refs(r, out);
        }
        RefKind::IntLit(_) | RefKind::BoolLit(_) | RefKind::StrLit(_) | RefKind::Binder(_) => {}
    }
}

fn flat_index(prefix: &[&Stmt]) -> FlatIndex {
    let mut seen: Vec<VarId> = Vec::new();
    for s in prefix {
        if let SessionExpr::NewMsg { var, .. } | SessionExpr::NewDepMsg { var, .. } = &s.expr {
            if !seen.contains(&var.node) {
                seen.push(var.node.clone());
            }
        }
    }
    seen.into_iter()
        .map(|v| {
            let (_, _, ty) = creation(prefix, &v).expect("seen above");
            let who = knowers(prefix, &v);
            (v, ty.clone(), who)
        })
        .collect()
}

fn exhaustive(file: &SourceFile, ty: &TypeExpr, pats: &[&Pattern]) -> bool {
    if pats.contains(&&Pattern::Wildcard) {
        return true;
    }
    let carrier = match ty {
        TypeExpr::Refined { payload, .. } => payload.as_ref(),
        other => other,
    };
    match carrier {
        TypeExpr::Base(sessioncheck_core::model::BaseKind::Bool) => {
            pats.contains(&&Pattern::Bool(true)) && pats.contains(&&Pattern::Bool(false))
        }
        TypeExpr::Named(name) => file.variant(&name.node).is_some_and(|decl| {
            decl.constructors
                .iter()
                .all(|c| pats.contains(&&Pattern::Tag(c.tag.node.clone())))
        }),
        _ => false,
    }
}

/// Recomputes the verdict for the single protocol in a call-free file.
pub fn derive(file: &SourceFile) -> Verdict {
    let decl = file.protocols().next().expect("one protocol");
    let participants = decl.participant_ids();
    let is_participant = |r: &RoleId| participants.contains(r);
    let mut paths = Vec::new();
    expand(&decl.body, &[], &[], &mut paths);

    let mut errors = BTreeSet::new();
    let mut finals = Vec::new();
    for path in &paths {
        for (i, stmt) in path.stmts.iter().enumerate() {
            let prefix = &path.stmts[..i];
            match &stmt.expr {
                SessionExpr::NewMsg { var, creator, .. } => {
                    if !is_participant(&creator.node) {
                        errors.insert(Code::E002);
                    }
                    if creation(prefix, &var.node).is_some() {
                        errors.insert(Code::E009);
                    }
                }
                SessionExpr::NewDepMsg { var, ty, creator } => {
                    if !is_participant(&creator.node) {
                        errors.insert(Code::E002);
                    }
                    if let TypeExpr::Refined { predicate, .. } = ty {
                        let mut used = Vec::new();
                        refs(predicate, &mut used);
                        for u in used {
                            if creation(prefix, &u).is_none() {
                                errors.insert(Code::E009);
                            } else if !knowers(prefix, &u).contains(&creator.node) {
                                errors.insert(Code::E004);
                            }
                        }
                    }
                    if creation(prefix, &var.node).is_some() {
                        errors.insert(Code::E009);
                    }
                }
                SessionExpr::Send {
                    var,
                    sender,
                    receiver,
                } => {
                    if !is_participant(&sender.node) || !is_participant(&receiver.node) {
                        errors.insert(Code::E002);
                    }
                    if sender.node == receiver.node {
                        errors.insert(Code::E011);
                    }
                    if creation(prefix, &var.node).is_none() {
                        errors.insert(Code::E009);
                    } else if !knowers(prefix, &var.node).contains(&sender.node) {
                        errors.insert(Code::E003);
                    }
                }
                SessionExpr::Read { var, arms } => match creation(prefix, &var.node) {
                    None => {
                        errors.insert(Code::E009);
                    }
                    Some((_, _, ty)) => {
                        let who = knowers(prefix, &var.node);
                        if participants.iter().any(|p| !who.contains(p)) {
                            errors.insert(Code::E005);
                        }
                        let pats: Vec<&Pattern> = arms.iter().map(|a| &a.pattern.node).collect();
                        if !exhaustive(file, ty, &pats) {
                            errors.insert(Code::E006);
                        }
                    }
                },
                SessionExpr::End | SessionExpr::Rec => finals.push(FinalPath {
                    arms: path.arms.clone(),
                    terminator: stmt.expr.keyword().to_string(),
                    index: flat_index(prefix),
                }),
                SessionExpr::Call { .. } => panic!("the oracle handles call-free protocols only"),
            }
        }
    }
    Verdict { errors, finals }
}
