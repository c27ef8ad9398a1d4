//! Canonical `.ssn` formatting. `parse(&print(f))` is structurally equal to `f`.

use std::fmt::Write;

use super::ast::*;
use super::lexer::quote;
use crate::model::{CmpOp, RefExpr, RefKind, TypeExpr};

const INDENT: &str = "  ";

pub fn print(file: &SourceFile) -> String {
    let mut out = String::new();
    for (i, item) in file.items.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        comments(&mut out, &item.comments, 0);
        match &item.kind {
            ItemKind::Roles(roles) => {
                let names: Vec<_> = roles.iter().map(|r| r.node.as_str()).collect();
                writeln!(out, "roles {}", names.join(", ")).unwrap();
            }
            ItemKind::Variant(v) => {
                let ctors: Vec<_> = v
                    .constructors
                    .iter()
                    .map(|c| match &c.payload {
                        None => c.tag.node.clone(),
                        Some(TypeExpr::Tuple(elems)) => {
                            let elems: Vec<_> = elems.iter().map(print_type).collect();
                            format!("{}({})", c.tag.node, elems.join(", "))
                        }
                        Some(ty) => format!("{}({})", c.tag.node, print_type(ty)),
                    })
                    .collect();
                writeln!(out, "type {} = {}", v.name.node, ctors.join(" | ")).unwrap();
            }
            ItemKind::Protocol(p) => protocol(&mut out, p),
            ItemKind::Entry(name) => writeln!(out, "entry {}", name.node).unwrap(),
        }
    }
    if !file.trailing.is_empty() {
        if !file.items.is_empty() {
            out.push('\n');
        }
        comments(&mut out, &file.trailing, 0);
    }
    out
}

fn comments(out: &mut String, lines: &[String], depth: usize) {
    for line in lines {
        writeln!(out, "{}--{}", INDENT.repeat(depth), line).unwrap();
    }
}

/// The `protocol Name<...> [roles]` header, without the body.
pub fn protocol_header(p: &ProtocolDecl) -> String {
    let mut out = format!("protocol {}", p.name.node);
    if !p.params.is_empty() {
        let params: Vec<_> = p
            .params
            .iter()
            .map(|param| {
                let sig: Vec<_> = param.signature.iter().map(|r| r.node.as_str()).collect();
                format!("{} : protocol[{}]", param.name.node, sig.join(", "))
            })
            .collect();
        write!(out, "<{}>", params.join(", ")).unwrap();
    }
    let parts: Vec<_> = p.participants.iter().map(|r| r.node.as_str()).collect();
    write!(out, " [{}]", parts.join(", ")).unwrap();
    out
}

fn protocol(out: &mut String, p: &ProtocolDecl) {
    writeln!(out, "{} {{", protocol_header(p)).unwrap();
    block(out, &p.body, 1);
    out.push_str("}\n");
}

fn block(out: &mut String, b: &Block, depth: usize) {
    for stmt in &b.stmts {
        comments(out, &stmt.comments, depth);
        out.push_str(&INDENT.repeat(depth));
        stmt_text(out, &stmt.expr, depth);
        out.push('\n');
    }
    comments(out, &b.trailing, depth);
}

/// Single-line rendering of a statement; `read` shows only its head.
pub fn stmt_summary(expr: &SessionExpr) -> String {
    match expr {
        SessionExpr::Read { var, .. } => format!("read {}", var.node),
        other => {
            let mut out = String::new();
            stmt_text(&mut out, other, 0);
            out
        }
    }
}

fn stmt_text(out: &mut String, expr: &SessionExpr, depth: usize) {
    match expr {
        SessionExpr::NewMsg { var, ty, creator } => write!(
            out,
            "msg {} : {} by {}",
            var.node,
            print_type(ty),
            creator.node
        )
        .unwrap(),
        SessionExpr::NewDepMsg { var, ty, creator } => write!(
            out,
            "dep {} : {} by {}",
            var.node,
            print_type(ty),
            creator.node
        )
        .unwrap(),
        SessionExpr::Send {
            var,
            sender,
            receiver,
        } => write!(
            out,
            "send {} {} -> {}",
            var.node, sender.node, receiver.node
        )
        .unwrap(),
        SessionExpr::Read { var, arms } => {
            writeln!(out, "read {} {{", var.node).unwrap();
            for arm in arms {
                comments(out, &arm.comments, depth + 1);
                write!(out, "{}{} => ", INDENT.repeat(depth + 1), arm.pattern.node).unwrap();
                match arm.body.stmts.as_slice() {
                    [only] if only.comments.is_empty() && arm.body.trailing.is_empty() => {
                        stmt_text(out, &only.expr, depth + 1);
                        out.push('\n');
                    }
                    _ => {
                        out.push_str("{\n");
                        block(out, &arm.body, depth + 2);
                        writeln!(out, "{}}}", INDENT.repeat(depth + 1)).unwrap();
                    }
                }
            }
            write!(out, "{}}}", INDENT.repeat(depth)).unwrap();
        }
        SessionExpr::Rec => out.push_str("rec"),
        SessionExpr::Call {
            target,
            args,
            then_rec,
        } => {
            write!(out, "call {}", target.node).unwrap();
            if !args.is_empty() {
                let args: Vec<_> = args.iter().map(|a| a.node.as_str()).collect();
                write!(out, "({})", args.join(", ")).unwrap();
            }
            if *then_rec {
                out.push_str(" then rec");
            }
        }
        SessionExpr::End => out.push_str("end"),
    }
}

pub fn print_type(ty: &TypeExpr) -> String {
    match ty {
        TypeExpr::Base(kind) => kind.keyword().to_string(),
        TypeExpr::Tuple(elems) => {
            let elems: Vec<_> = elems.iter().map(print_type).collect();
            format!("({})", elems.join(", "))
        }
        TypeExpr::Named(name) => name.node.clone(),
        TypeExpr::Refined {
            payload,
            binder,
            predicate,
        } => format!(
            "({} : {} where {})",
            binder,
            print_type(payload),
            print_predicate(predicate)
        ),
    }
}

/// A whole predicate `binder == constant` prints as `literal(constant)`.
fn print_predicate(p: &RefExpr) -> String {
    if let RefKind::Cmp(CmpOp::Eq, l, r) = &p.kind {
        let constant = matches!(
            r.kind,
            RefKind::IntLit(_) | RefKind::StrLit(_) | RefKind::BoolLit(_)
        );
        if matches!(l.kind, RefKind::Binder(_)) && constant {
            return format!("literal({})", print_ref(r));
        }
    }
    print_ref(p)
}

const OR: u8 = 1;
const AND: u8 = 2;
const CMP: u8 = 3;
const ADD: u8 = 4;
const MUL: u8 = 5;
const POSTFIX: u8 = 6;
const ATOM: u8 = 7;

fn prec(e: &RefExpr) -> u8 {
    match &e.kind {
        RefKind::BoolOp(crate::model::BoolOp::Or, ..) => OR,
        RefKind::BoolOp(crate::model::BoolOp::And, ..) => AND,
        RefKind::Cmp(..) => CMP,
        RefKind::Arith(crate::model::ArithOp::Mul, ..) => MUL,
        RefKind::Arith(..) => ADD,
        RefKind::Proj(..) => POSTFIX,
        _ => ATOM,
    }
}

fn wrapped(e: &RefExpr, parens: bool) -> String {
    if parens {
        format!("({})", print_ref(e))
    } else {
        print_ref(e)
    }
}

pub fn print_ref(e: &RefExpr) -> String {
    match &e.kind {
        RefKind::IntLit(i) => i.to_string(),
        RefKind::BoolLit(b) => b.to_string(),
        RefKind::StrLit(s) => quote(s),
        RefKind::VarRef(v) | RefKind::Binder(v) => v.to_string(),
        RefKind::Proj(base, i) => format!("{}.{}", wrapped(base, prec(base) < POSTFIX), i),
        RefKind::UnwrapDep(inner) => format!("val({})", print_ref(inner)),
        RefKind::Arith(op, l, r) => {
            let p = prec(e);
            format!(
                "{} {} {}",
                wrapped(l, prec(l) < p),
                op.symbol(),
                wrapped(r, prec(r) <= p)
            )
        }
        RefKind::Cmp(op, l, r) => format!(
            "{} {} {}",
            wrapped(l, prec(l) <= CMP),
            op.symbol(),
            wrapped(r, prec(r) <= CMP)
        ),
        RefKind::BoolOp(op, l, r) => {
            let p = prec(e);
            format!(
                "{} {} {}",
                wrapped(l, prec(l) < p),
                op.keyword(),
                wrapped(r, prec(r) <= p)
            )
        }
    }
}
