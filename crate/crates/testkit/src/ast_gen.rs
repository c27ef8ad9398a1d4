//! Arbitrary syntax trees for round-trip testing.
//!
//! Trees are syntactically well formed (every block ends in a terminator,
//! tuples have at least two elements, refinements appear only at the top of
//! `dep`) but carry no semantic guarantees.

use num_bigint::BigInt;
use proptest::prelude::*;

use sessioncheck_core::model::{
    is_identifier, ArithOp, BaseKind, BoolOp, CmpOp, Constructor, RefExpr, RefKind, RoleId,
    Spanned, TypeExpr, VarId, VariantDecl,
};
use sessioncheck_core::syntax::{
    is_keyword, Arm, Block, Item, ItemKind, Pattern, ProtocolDecl, ProtocolParam, SessionExpr,
    SourceFile, Stmt,
};

/// Refinement binders come from this set and ordinary names never do, so a
/// printed binder reparses as a binder.
const BINDERS: [&str; 3] = ["x", "y", "self_"];

pub fn ident() -> impl Strategy<Value = String> {
    "[A-Za-z][A-Za-z0-9_]{0,5}".prop_filter("reserved word or binder", |s| {
        is_identifier(s) && !is_keyword(s) && !BINDERS.contains(&s.as_str())
    })
}

fn dummy<T>(node: T) -> Spanned<T> {
    Spanned::dummy(node)
}

fn role() -> impl Strategy<Value = Spanned<RoleId>> {
    ident().prop_map(|s| dummy(RoleId::new(s)))
}

fn var() -> impl Strategy<Value = Spanned<VarId>> {
    ident().prop_map(|s| dummy(VarId::new(s)))
}

fn comment() -> impl Strategy<Value = String> {
    "( [a-z0-9]{1,6}){0,3}"
}

fn comments() -> impl Strategy<Value = Vec<String>> {
    prop::collection::vec(comment(), 0..2)
}

fn string_lit() -> impl Strategy<Value = String> {
    "[a-z \"\\\\\n\t]{0,6}"
}

fn int_lit() -> impl Strategy<Value = BigInt> {
    prop_oneof![
        (-1000i64..1000).prop_map(BigInt::from),
        any::<i128>().prop_map(BigInt::from),
    ]
}

fn base() -> impl Strategy<Value = BaseKind> {
    prop_oneof![
        Just(BaseKind::Int),
        Just(BaseKind::Bool),
        Just(BaseKind::Str)
    ]
}

/// A type without refinements.
pub fn plain_type() -> impl Strategy<Value = TypeExpr> {
    let leaf = prop_oneof![
        base().prop_map(TypeExpr::Base),
        ident().prop_map(|s| TypeExpr::Named(dummy(s))),
    ];
    leaf.prop_recursive(3, 12, 4, |inner| {
        prop::collection::vec(inner, 2..4).prop_map(TypeExpr::Tuple)
    })
}

pub fn ref_expr(binder: &'static str) -> impl Strategy<Value = RefExpr> {
    let leaf = prop_oneof![
        int_lit().prop_map(|i| RefExpr::bare(RefKind::IntLit(i))),
        any::<bool>().prop_map(|b| RefExpr::bare(RefKind::BoolLit(b))),
        string_lit().prop_map(|s| RefExpr::bare(RefKind::StrLit(s))),
        ident().prop_map(|s| RefExpr::var(&s)),
        Just(RefExpr::binder(binder)),
    ];
    leaf.prop_recursive(5, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), 1usize..5).prop_map(|(e, i)| e.proj(i)),
            inner.clone().prop_map(RefExpr::unwrap_dep),
            (
                prop_oneof![Just(ArithOp::Add), Just(ArithOp::Sub), Just(ArithOp::Mul)],
                inner.clone(),
                inner.clone()
            )
                .prop_map(|(op, l, r)| RefExpr::arith(op, l, r)),
            (
                prop_oneof![
                    Just(CmpOp::Eq),
                    Just(CmpOp::Ne),
                    Just(CmpOp::Lt),
                    Just(CmpOp::Le)
                ],
                inner.clone(),
                inner.clone()
            )
                .prop_map(|(op, l, r)| RefExpr::cmp(op, l, r)),
            (
                prop_oneof![Just(BoolOp::And), Just(BoolOp::Or)],
                inner.clone(),
                inner
            )
                .prop_map(|(op, l, r)| RefExpr::bool_op(op, l, r)),
        ]
    })
}

fn refined_type() -> impl Strategy<Value = TypeExpr> {
    prop::sample::select(BINDERS.to_vec()).prop_flat_map(|binder| {
        (plain_type(), ref_expr(binder)).prop_map(move |(payload, predicate)| TypeExpr::Refined {
            payload: Box::new(payload),
            binder: VarId::new(binder),
            predicate,
        })
    })
}

fn pattern() -> impl Strategy<Value = Pattern> {
    prop_oneof![
        ident().prop_map(Pattern::Tag),
        int_lit().prop_map(Pattern::Int),
        string_lit().prop_map(Pattern::Str),
        any::<bool>().prop_map(Pattern::Bool),
        Just(Pattern::Wildcard),
    ]
}

fn stmt(expr: SessionExpr, comments: Vec<String>) -> Stmt {
    Stmt {
        comments,
        ..Stmt::new(expr)
    }
}

fn step() -> impl Strategy<Value = SessionExpr> {
    prop_oneof![
        (var(), plain_type(), role()).prop_map(|(var, ty, creator)| SessionExpr::NewMsg {
            var,
            ty,
            creator
        }),
        (var(), refined_type(), role()).prop_map(|(var, ty, creator)| SessionExpr::NewDepMsg {
            var,
            ty,
            creator
        }),
        (var(), role(), role()).prop_map(|(var, sender, receiver)| SessionExpr::Send {
            var,
            sender,
            receiver
        }),
    ]
}

fn leaf_terminator() -> impl Strategy<Value = SessionExpr> {
    prop_oneof![
        Just(SessionExpr::End),
        Just(SessionExpr::Rec),
        (ident(), prop::collection::vec(ident(), 0..3), any::<bool>()).prop_map(
            |(target, args, then_rec)| SessionExpr::Call {
                target: dummy(target),
                args: args.into_iter().map(dummy).collect(),
                then_rec,
            }
        ),
    ]
}

fn block_of(terminator: impl Strategy<Value = SessionExpr>) -> impl Strategy<Value = Block> {
    (
        prop::collection::vec((step(), comments()), 0..3),
        terminator,
        comments(),
        comments(),
    )
        .prop_map(|(steps, term, term_comments, trailing)| {
            let mut stmts: Vec<Stmt> = steps.into_iter().map(|(e, c)| stmt(e, c)).collect();
            stmts.push(stmt(term, term_comments));
            Block { stmts, trailing }
        })
}

/// Blocks nest through `read` arms up to depth five.
pub fn block() -> impl Strategy<Value = Block> {
    block_of(leaf_terminator()).prop_recursive(5, 24, 3, |inner| {
        let read = (
            var(),
            prop::collection::vec((pattern(), inner, comments()), 1..4),
        )
            .prop_map(|(var, arms)| SessionExpr::Read {
                var,
                arms: arms
                    .into_iter()
                    .map(|(p, body, comments)| Arm {
                        pattern: dummy(p),
                        body,
                        comments,
                    })
                    .collect(),
            });
        block_of(prop_oneof![1 => leaf_terminator(), 2 => read])
    })
}

fn protocol() -> impl Strategy<Value = ProtocolDecl> {
    (
        ident(),
        prop::collection::vec((ident(), prop::collection::vec(role(), 0..3)), 0..3),
        prop::collection::vec(role(), 1..4),
        block(),
    )
        .prop_map(|(name, params, participants, body)| ProtocolDecl {
            name: dummy(name),
            params: params
                .into_iter()
                .map(|(n, signature)| ProtocolParam {
                    name: dummy(n),
                    signature,
                })
                .collect(),
            participants,
            body,
        })
}

fn variant() -> impl Strategy<Value = VariantDecl> {
    (
        ident(),
        prop::collection::vec((ident(), prop::option::of(plain_type())), 1..4),
    )
        .prop_map(|(name, ctors)| VariantDecl {
            name: dummy(name),
            constructors: ctors
                .into_iter()
                .map(|(tag, payload)| Constructor {
                    tag: dummy(tag),
                    payload,
                })
                .collect(),
        })
}

fn item() -> impl Strategy<Value = Item> {
    let kind = prop_oneof![
        prop::collection::vec(role(), 1..4).prop_map(ItemKind::Roles),
        variant().prop_map(ItemKind::Variant),
        protocol().prop_map(ItemKind::Protocol),
        ident().prop_map(|s| ItemKind::Entry(dummy(s))),
    ];
    (kind, comments()).prop_map(|(kind, comments)| Item { kind, comments })
}

pub fn source_file() -> impl Strategy<Value = SourceFile> {
    (prop::collection::vec(item(), 0..5), comments())
        .prop_map(|(items, trailing)| SourceFile { items, trailing })
}
