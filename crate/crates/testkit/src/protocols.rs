//! Random call-free protocols over at most four roles and eight steps.
//!
//! Each message name has a fixed type so every generated predicate and
//! pattern is well kinded; the interesting variation is in who creates,
//! sends and inspects what. Choices are drawn as raw numbers and resolved
//! against the statements already built on the same path, biased towards
//! sends by a role that created the message, so a useful share of protocols
//! is accepted.

use num_bigint::BigInt;
use proptest::prelude::*;

use sessioncheck_core::model::{
    ArithOp, BaseKind, CmpOp, Constructor, RefExpr, RoleId, Spanned, TypeExpr, VarId, VariantDecl,
};
use sessioncheck_core::syntax::{
    Arm, Block, Item, ItemKind, Pattern, ProtocolDecl, SessionExpr, SourceFile, Stmt,
};

pub const ROLES: [&str; 4] = ["A", "B", "C", "D"];
pub const MAX_STEPS: usize = 8;

/// `m1`, `m2`: Int. `m3`: Bool. `m4`: Choice. `m5`, `m6`: refined Int.
const VARS: [&str; 6] = ["m1", "m2", "m3", "m4", "m5", "m6"];
const TAGS: [&str; 3] = ["Red", "Green", "Blue"];

#[derive(Debug, Clone)]
enum VarSel {
    /// Index into the names created earlier on this path, if any.
    Bound(u8),
    Any(u8),
}

#[derive(Debug, Clone)]
enum RawStep {
    Create {
        var: u8,
        creator: u8,
        refs: Vec<u8>,
        offset: i8,
    },
    Send {
        var: VarSel,
        /// `None` means the role that created the message.
        sender: Option<u8>,
        receiver: u8,
    },
}

#[derive(Debug, Clone)]
enum RawTail {
    End,
    Rec,
    Read {
        var: VarSel,
        arms: Vec<(u8, RawBlock)>,
    },
}

#[derive(Debug, Clone)]
struct RawBlock {
    steps: Vec<RawStep>,
    tail: Box<RawTail>,
}

fn var_sel() -> impl Strategy<Value = VarSel> {
    prop_oneof![
        9 => any::<u8>().prop_map(VarSel::Bound),
        1 => any::<u8>().prop_map(VarSel::Any),
    ]
}

fn raw_step() -> impl Strategy<Value = RawStep> {
    prop_oneof![
        2 => (any::<u8>(), any::<u8>(), prop::collection::vec(any::<u8>(), 0..3), -3i8..4)
            .prop_map(|(var, creator, refs, offset)| RawStep::Create { var, creator, refs, offset }),
        3 => (var_sel(), prop_oneof![3 => Just(None), 1 => any::<u8>().prop_map(Some)], any::<u8>())
            .prop_map(|(var, sender, receiver)| RawStep::Send { var, sender, receiver }),
    ]
}

fn raw_block() -> impl Strategy<Value = RawBlock> {
    let leaf = (
        prop::collection::vec(raw_step(), 0..6),
        prop_oneof![3 => Just(RawTail::End), 1 => Just(RawTail::Rec)],
    )
        .prop_map(|(steps, tail)| RawBlock {
            steps,
            tail: Box::new(tail),
        });
    leaf.prop_recursive(2, 12, 3, |inner| {
        (
            prop::collection::vec(raw_step(), 0..5),
            prop_oneof![
                1 => Just(RawTail::End),
                2 => (var_sel(), prop::collection::vec((any::<u8>(), inner), 1..4))
                    .prop_map(|(var, arms)| RawTail::Read { var, arms }),
            ],
        )
            .prop_map(|(steps, tail)| RawBlock {
                steps,
                tail: Box::new(tail),
            })
    })
}

/// Call-free single-protocol files.
pub fn call_free_protocol() -> impl Strategy<Value = SourceFile> {
    (1usize..=4, any::<u8>(), raw_block()).prop_map(|(n, mask, raw)| build(n, mask, &raw))
}

fn dummy<T>(node: T) -> Spanned<T> {
    Spanned::dummy(node)
}

fn var_type(name: &str) -> TypeExpr {
    match name {
        "m1" | "m2" => TypeExpr::Base(BaseKind::Int),
        "m3" => TypeExpr::Base(BaseKind::Bool),
        "m4" => TypeExpr::Named(dummy("Choice".to_string())),
        _ => TypeExpr::Base(BaseKind::Int),
    }
}

fn is_dependent(name: &str) -> bool {
    matches!(name, "m5" | "m6")
}

/// Patterns available for each message name; the last entry is always `_`.
fn patterns(name: &str) -> Vec<Pattern> {
    let mut pats = match name {
        "m3" => vec![Pattern::Bool(true), Pattern::Bool(false)],
        "m4" => TAGS.iter().map(|t| Pattern::Tag(t.to_string())).collect(),
        _ => (0..3).map(|i| Pattern::Int(BigInt::from(i))).collect(),
    };
    pats.push(Pattern::Wildcard);
    pats
}

struct Builder {
    roles: Vec<RoleId>,
    budget: usize,
}

impl Builder {
    fn role(&self, i: u8) -> Spanned<RoleId> {
        dummy(self.roles[i as usize % self.roles.len()].clone())
    }

    /// Mostly a name not yet created on this path.
    fn fresh_name(&self, choice: u8, created: &[(VarId, RoleId)]) -> &'static str {
        let start = choice as usize % VARS.len();
        if choice < 200 {
            for k in 0..VARS.len() {
                let name = VARS[(start + k) % VARS.len()];
                if !created.iter().any(|(v, _)| v.as_str() == name) {
                    return name;
                }
            }
        }
        VARS[start]
    }

    /// Mostly an integer-valued name already created on this path.
    fn int_ref(&self, choice: u8, created: &[(VarId, RoleId)]) -> Option<&'static str> {
        const INTS: [&str; 4] = ["m1", "m2", "m5", "m6"];
        let bound: Vec<&'static str> = INTS
            .into_iter()
            .filter(|n| created.iter().any(|(v, _)| v.as_str() == *n))
            .collect();
        match choice {
            0..220 if bound.is_empty() => None,
            0..220 => Some(bound[choice as usize % bound.len()]),
            _ => Some(INTS[choice as usize % INTS.len()]),
        }
    }

    /// Mostly a role other than the sender.
    fn receiver(&self, choice: u8, sender: &RoleId) -> Spanned<RoleId> {
        let others: Vec<&RoleId> = self.roles.iter().filter(|r| *r != sender).collect();
        if choice < 220 && !others.is_empty() {
            dummy(others[choice as usize % others.len()].clone())
        } else {
            self.role(choice)
        }
    }

    fn select(&self, sel: &VarSel, created: &[(VarId, RoleId)]) -> VarId {
        match sel {
            VarSel::Bound(i) if !created.is_empty() => {
                created[*i as usize % created.len()].0.clone()
            }
            VarSel::Bound(i) | VarSel::Any(i) => VarId::new(VARS[*i as usize % VARS.len()]),
        }
    }

    fn block(&mut self, raw: &RawBlock, mut created: Vec<(VarId, RoleId)>) -> Block {
        let mut stmts = Vec::new();
        for step in &raw.steps {
            if self.budget == 0 {
                break;
            }
            self.budget -= 1;
            stmts.push(Stmt::new(self.step(step, &mut created)));
        }
        let tail = match raw.tail.as_ref() {
            RawTail::Read { var, arms } if self.budget > 0 => {
                self.budget -= 1;
                let var = self.select(var, &created);
                let choices = patterns(var.as_str());
                let arms = arms
                    .iter()
                    .map(|(p, body)| Arm {
                        pattern: dummy(choices[*p as usize % choices.len()].clone()),
                        body: self.block(body, created.clone()),
                        comments: Vec::new(),
                    })
                    .collect();
                SessionExpr::Read {
                    var: dummy(var),
                    arms,
                }
            }
            RawTail::Rec => SessionExpr::Rec,
            _ => SessionExpr::End,
        };
        stmts.push(Stmt::new(tail));
        Block::new(stmts)
    }

    fn step(&self, step: &RawStep, created: &mut Vec<(VarId, RoleId)>) -> SessionExpr {
        match step {
            RawStep::Create {
                var,
                creator,
                refs,
                offset,
            } => {
                let name = self.fresh_name(*var, created);
                let var = dummy(VarId::new(name));
                let creator = self.role(*creator);
                let before = created.clone();
                if !created.iter().any(|(v, _)| v == &var.node) {
                    created.push((var.node.clone(), creator.node.clone()));
                }
                if !is_dependent(name) {
                    return SessionExpr::NewMsg {
                        var,
                        ty: var_type(name),
                        creator,
                    };
                }
                let mut rhs = RefExpr::int(*offset);
                for r in refs.iter().filter_map(|r| self.int_ref(*r, &before)) {
                    let operand = if is_dependent(r) {
                        RefExpr::var(r).unwrap_dep()
                    } else {
                        RefExpr::var(r)
                    };
                    rhs = RefExpr::arith(ArithOp::Add, operand, rhs);
                }
                SessionExpr::NewDepMsg {
                    var,
                    ty: TypeExpr::Refined {
                        payload: Box::new(TypeExpr::Base(BaseKind::Int)),
                        binder: VarId::new("x"),
                        predicate: RefExpr::cmp(CmpOp::Eq, RefExpr::binder("x"), rhs),
                    },
                    creator,
                }
            }
            RawStep::Send {
                var: VarSel::Bound(choice),
                receiver,
                ..
            } if created.is_empty() => self.step(
                &RawStep::Create {
                    var: *choice,
                    creator: *receiver,
                    refs: Vec::new(),
                    offset: 0,
                },
                created,
            ),
            RawStep::Send {
                var,
                sender,
                receiver,
            } => {
                let var = self.select(var, created);
                let sender = match sender {
                    Some(i) => self.role(*i),
                    None => created
                        .iter()
                        .find(|(v, _)| v == &var)
                        .map(|(_, r)| dummy(r.clone()))
                        .unwrap_or_else(|| self.role(0)),
                };
                let receiver = self.receiver(*receiver, &sender.node);
                SessionExpr::Send {
                    var: dummy(var),
                    sender,
                    receiver,
                }
            }
        }
    }
}

fn build(n_roles: usize, mask: u8, raw: &RawBlock) -> SourceFile {
    let declared: Vec<RoleId> = ROLES[..n_roles].iter().map(|r| RoleId::new(*r)).collect();
    let mut participants: Vec<RoleId> = declared
        .iter()
        .enumerate()
        .filter(|(i, _)| mask & (1 << i) != 0)
        .map(|(_, r)| r.clone())
        .collect();
    // Mostly use every declared role so that E002 stays a minority.
    if participants.is_empty() || mask & 0xC0 != 0 {
        participants = declared.clone();
    }
    let mut builder = Builder {
        roles: declared.clone(),
        budget: MAX_STEPS,
    };
    let body = builder.block(raw, Vec::new());
    let choice = VariantDecl {
        name: dummy("Choice".to_string()),
        constructors: TAGS
            .iter()
            .map(|t| Constructor {
                tag: dummy(t.to_string()),
                payload: None,
            })
            .collect(),
    };
    SourceFile {
        items: vec![
            Item::new(ItemKind::Roles(declared.into_iter().map(dummy).collect())),
            Item::new(ItemKind::Variant(choice)),
            Item::new(ItemKind::Protocol(ProtocolDecl {
                name: dummy("P".to_string()),
                params: Vec::new(),
                participants: participants.into_iter().map(dummy).collect(),
                body,
            })),
        ],
        trailing: Vec::new(),
    }
}

/// Number of message, send and read statements in a block tree.
pub fn step_count(block: &Block) -> usize {
    block
        .stmts
        .iter()
        .map(|s| match &s.expr {
            SessionExpr::Read { arms, .. } => {
                1 + arms.iter().map(|a| step_count(&a.body)).sum::<usize>()
            }
            SessionExpr::NewMsg { .. }
            | SessionExpr::NewDepMsg { .. }
            | SessionExpr::Send { .. } => 1,
            _ => 0,
        })
        .sum()
}
