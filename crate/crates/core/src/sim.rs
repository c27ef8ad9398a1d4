//! Deterministic execution of a checked protocol against a concrete trace.
//!
//! One trace drives every role. Each creation step consumes the next binding,
//! refinements are evaluated on the bound value, `read` selects the first arm
//! whose pattern matches, and every `send` logs the knowledge index it
//! produces. Values of refined types are represented by their payload alone.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use serde_json::json;

use crate::check::{check_file, describe_index, index_json, Diagnostic};
use crate::model::{
    free_vars, ArithOp, BoolOp, CmpOp, KnowledgeIndex, RefExpr, RefKind, RoleId, Span, TypeExpr,
    VarId,
};
use crate::syntax::{
    print_ref, print_type, Block, Pattern, ProtocolDecl, SessionExpr, SourceFile, Trace,
};
use crate::value::Value;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalError {
    pub span: Span,
    pub message: String,
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for EvalError {}

fn eval_error(span: Span, message: impl Into<String>) -> EvalError {
    EvalError {
        span,
        message: message.into(),
    }
}

/// Evaluates a predicate. `binder_value` is the value the refinement binder
/// stands for, if any.
pub fn eval_ref(
    expr: &RefExpr,
    bindings: &HashMap<VarId, Value>,
    binder_value: Option<&Value>,
) -> Result<Value, EvalError> {
    let eval = |e: &RefExpr| eval_ref(e, bindings, binder_value);
    let int = |e: &RefExpr| -> Result<BigInt, EvalError> {
        match eval(e)? {
            Value::Int(i) => Ok(i),
            other => Err(eval_error(
                e.span,
                format!("expected an integer, found {other}"),
            )),
        }
    };
    let boolean = |e: &RefExpr| -> Result<bool, EvalError> {
        match eval(e)? {
            Value::Bool(b) => Ok(b),
            other => Err(eval_error(
                e.span,
                format!("expected a boolean, found {other}"),
            )),
        }
    };
    match &expr.kind {
        RefKind::IntLit(i) => Ok(Value::Int(i.clone())),
        RefKind::BoolLit(b) => Ok(Value::Bool(*b)),
        RefKind::StrLit(s) => Ok(Value::Str(s.clone())),
        RefKind::VarRef(v) => bindings
            .get(v)
            .cloned()
            .ok_or_else(|| eval_error(expr.span, format!("`{v}` has no value"))),
        RefKind::Binder(v) => binder_value
            .cloned()
            .ok_or_else(|| eval_error(expr.span, format!("binder `{v}` has no value"))),
        RefKind::Proj(base, index) => match eval(base)? {
            Value::Tuple(mut vals) if (1..=vals.len()).contains(index) => {
                Ok(vals.swap_remove(index - 1))
            }
            other => Err(eval_error(
                expr.span,
                format!("cannot take position {index} of {other}"),
            )),
        },
        RefKind::UnwrapDep(inner) => eval(inner),
        RefKind::Arith(op, l, r) => {
            let (a, b) = (int(l)?, int(r)?);
            Ok(Value::Int(match op {
                ArithOp::Add => a + b,
                ArithOp::Sub => a - b,
                ArithOp::Mul => a * b,
            }))
        }
        RefKind::Cmp(op @ (CmpOp::Lt | CmpOp::Le), l, r) => {
            let (a, b) = (int(l)?, int(r)?);
            Ok(Value::Bool(if *op == CmpOp::Lt { a < b } else { a <= b }))
        }
        RefKind::Cmp(op, l, r) => {
            let (a, b) = (eval(l)?, eval(r)?);
            Ok(Value::Bool((a == b) == (*op == CmpOp::Eq)))
        }
        RefKind::BoolOp(op, l, r) => {
            let a = boolean(l)?;
            Ok(Value::Bool(match (op, a) {
                (BoolOp::And, false) => false,
                (BoolOp::Or, true) => true,
                _ => boolean(r)?,
            }))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_steps: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_steps: 10_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Event {
    MsgCreated {
        var: VarId,
        value: Value,
        creator: RoleId,
    },
    RefinementChecked {
        var: VarId,
        predicate: String,
        verdict: bool,
        witness: Vec<(VarId, Value)>,
    },
    Sent {
        var: VarId,
        sender: RoleId,
        receiver: RoleId,
        index: KnowledgeIndex,
        protocol: String,
        span: Span,
    },
    CaseTaken {
        var: VarId,
        pattern: Pattern,
    },
    Recursed {
        protocol: String,
    },
    Called {
        protocol: String,
    },
    Ended {
        protocol: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Status {
    Completed,
    RefinementViolated {
        var: VarId,
        span: Span,
    },
    /// `var` is `None` when the step budget ran out.
    TraceExhausted {
        var: Option<VarId>,
        note: String,
    },
    TraceMismatch {
        var: VarId,
        expected: String,
        got: String,
    },
}

impl Status {
    pub fn kind(&self) -> &'static str {
        match self {
            Status::Completed => "completed",
            Status::RefinementViolated { .. } => "refinement_violated",
            Status::TraceExhausted { .. } => "trace_exhausted",
            Status::TraceMismatch { .. } => "trace_mismatch",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunReport {
    pub events: Vec<Event>,
    pub status: Status,
    /// Trace bindings still unconsumed when the run stopped.
    pub leftover: Vec<VarId>,
    pub steps: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SimError {
    /// The file does not pass the checker.
    Rejected(Vec<Diagnostic>),
}

impl fmt::Display for SimError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimError::Rejected(diags) => write!(
                f,
                "the protocol has {} checker error(s); fix them before simulating",
                diags.len()
            ),
        }
    }
}

impl std::error::Error for SimError {}

impl Event {
    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Event::MsgCreated {
                var,
                value,
                creator,
            } => json!({
                "kind": "msg_created",
                "var": var.as_str(),
                "value": value.to_json(),
                "creator": creator.as_str(),
            }),
            Event::RefinementChecked {
                var,
                predicate,
                verdict,
                witness,
            } => json!({
                "kind": "refinement_checked",
                "var": var.as_str(),
                "predicate": predicate,
                "verdict": verdict,
                "witness": witness
                    .iter()
                    .map(|(v, val)| (v.to_string(), val.to_json()))
                    .collect::<serde_json::Map<_, _>>(),
            }),
            Event::Sent {
                var,
                sender,
                receiver,
                index,
                protocol,
                span,
            } => json!({
                "kind": "sent",
                "var": var.as_str(),
                "sender": sender.as_str(),
                "receiver": receiver.as_str(),
                "protocol": protocol,
                "line": span.line,
                "index": index_json(index),
            }),
            Event::CaseTaken { var, pattern } => json!({
                "kind": "case_taken",
                "var": var.as_str(),
                "pattern": pattern.to_string(),
            }),
            Event::Recursed { protocol } => json!({ "kind": "recursed", "protocol": protocol }),
            Event::Called { protocol } => json!({ "kind": "called", "protocol": protocol }),
            Event::Ended { protocol } => json!({ "kind": "ended", "protocol": protocol }),
        }
    }
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Event::MsgCreated {
                var,
                value,
                creator,
            } => write!(f, "{creator} creates {var} = {value}"),
            Event::RefinementChecked {
                var,
                predicate,
                verdict,
                witness,
            } => {
                let w: Vec<_> = witness
                    .iter()
                    .map(|(v, val)| format!("{v} = {val}"))
                    .collect();
                write!(
                    f,
                    "check {var}: {predicate} is {verdict} with {}",
                    w.join(", ")
                )
            }
            Event::Sent {
                var,
                sender,
                receiver,
                index,
                ..
            } => {
                write!(
                    f,
                    "{sender} -> {receiver}: {var}; index [{}]",
                    describe_index(index).join("; ")
                )
            }
            Event::CaseTaken { var, pattern } => write!(f, "case {var} => {pattern}"),
            Event::Recursed { protocol } => write!(f, "rec {protocol}"),
            Event::Called { protocol } => write!(f, "call {protocol}"),
            Event::Ended { protocol } => write!(f, "end {protocol}"),
        }
    }
}

impl Status {
    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Status::Completed => json!({ "kind": self.kind() }),
            Status::RefinementViolated { var, span } => json!({
                "kind": self.kind(),
                "var": var.as_str(),
                "line": span.line,
                "col": span.col,
                "len": span.len(),
            }),
            Status::TraceExhausted { var, note } => json!({
                "kind": self.kind(),
                "var": var.as_ref().map(VarId::as_str),
                "note": note,
            }),
            Status::TraceMismatch { var, expected, got } => json!({
                "kind": self.kind(),
                "var": var.as_str(),
                "expected": expected,
                "got": got,
            }),
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Status::Completed => f.write_str("completed"),
            Status::RefinementViolated { var, span } => write!(
                f,
                "refinement violated: `{var}` at {}:{}",
                span.line, span.col
            ),
            Status::TraceExhausted {
                var: Some(var),
                note,
            } => {
                write!(f, "trace exhausted at `{var}`: {note}")
            }
            Status::TraceExhausted { var: None, note } => write!(f, "trace exhausted: {note}"),
            Status::TraceMismatch { var, expected, got } => {
                write!(
                    f,
                    "trace mismatch at `{var}`: expected {expected}, got {got}"
                )
            }
        }
    }
}

impl RunReport {
    /// `{status, events: [{kind, ...}], leftover, steps}`
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "status": self.status.to_json(),
            "events": self.events.iter().map(Event::to_json).collect::<Vec<_>>(),
            "leftover": self.leftover.iter().map(VarId::as_str).collect::<Vec<_>>(),
            "steps": self.steps,
        })
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (i, e) in self.events.iter().enumerate() {
            out.push_str(&format!("{:>4}  {e}\n", i + 1));
        }
        if !self.leftover.is_empty() {
            let names: Vec<_> = self.leftover.iter().map(VarId::as_str).collect();
            out.push_str(&format!("unused bindings: {}\n", names.join(", ")));
        }
        out.push_str(&format!("status: {}\n", self.status));
        out
    }

    pub fn consumed(&self) -> usize {
        self.events
            .iter()
            .filter(|e| matches!(e, Event::MsgCreated { .. }))
            .count()
    }
}

struct Frame<'f> {
    decl: &'f ProtocolDecl,
    label: String,
    params: HashMap<String, String>,
    index: KnowledgeIndex,
    values: HashMap<VarId, Value>,
    block: &'f Block,
    pos: usize,
    /// Whether the caller re-enters its own body once this frame ends.
    rec_caller: bool,
}

impl<'f> Frame<'f> {
    fn enter(decl: &'f ProtocolDecl, params: HashMap<String, String>, rec_caller: bool) -> Self {
        let label = if decl.params.is_empty() {
            decl.name.node.clone()
        } else {
            let parts: Vec<_> = decl
                .params
                .iter()
                .map(|p| format!("{}={}", p.name.node, params[&p.name.node]))
                .collect();
            format!("{}<{}>", decl.name.node, parts.join(", "))
        };
        Frame {
            decl,
            label,
            params,
            index: KnowledgeIndex::new(),
            values: HashMap::new(),
            block: &decl.body,
            pos: 0,
            rec_caller,
        }
    }

    fn restart(&mut self) {
        self.index = KnowledgeIndex::new();
        self.values.clear();
        self.block = &self.decl.body;
        self.pos = 0;
    }
}

fn matches(pattern: &Pattern, value: &Value) -> bool {
    match (pattern, value) {
        (Pattern::Wildcard, _) => true,
        (Pattern::Tag(t), Value::Con(tag, _)) => t == tag,
        (Pattern::Int(i), Value::Int(v)) => i == v,
        (Pattern::Str(s), Value::Str(v)) => s == v,
        (Pattern::Bool(b), Value::Bool(v)) => b == v,
        _ => false,
    }
}

/// Runs the entry protocol of a file that passes the checker.
pub fn run_trace(file: &SourceFile, trace: &Trace, limits: Limits) -> Result<RunReport, SimError> {
    let checked = check_file(file);
    if checked.has_errors() {
        return Err(SimError::Rejected(checked.errors().cloned().collect()));
    }
    let entry = file
        .entry_name()
        .and_then(|name| file.protocol(name))
        .expect("a checked file has a ground entry protocol");
    Ok(Machine {
        file,
        trace,
        next: 0,
        events: Vec::new(),
        steps: 0,
    }
    .run(entry, limits))
}

struct Machine<'f, 't> {
    file: &'f SourceFile,
    trace: &'t Trace,
    next: usize,
    events: Vec<Event>,
    steps: usize,
}

impl<'f> Machine<'f, '_> {
    fn run(mut self, entry: &'f ProtocolDecl, limits: Limits) -> RunReport {
        let mut stack = vec![Frame::enter(entry, HashMap::new(), false)];
        let status = loop {
            if self.steps >= limits.max_steps {
                break Status::TraceExhausted {
                    var: None,
                    note: format!(
                        "stopped after {} steps; raise --max-steps if the protocol is meant to run longer",
                        limits.max_steps
                    ),
                };
            }
            self.steps += 1;
            match self.step(&mut stack) {
                Ok(true) => break Status::Completed,
                Ok(false) => {}
                Err(status) => break status,
            }
        };
        RunReport {
            events: self.events,
            status,
            leftover: self.trace.bindings[self.next..]
                .iter()
                .map(|b| b.var.clone())
                .collect(),
            steps: self.steps,
        }
    }

    fn consume(&mut self, var: &VarId, ty: &TypeExpr) -> Result<Value, Status> {
        let Some(binding) = self.trace.bindings.get(self.next) else {
            return Err(Status::TraceExhausted {
                var: Some(var.clone()),
                note: "the trace has no binding left".into(),
            });
        };
        self.next += 1;
        if &binding.var != var {
            return Err(Status::TraceMismatch {
                var: var.clone(),
                expected: format!("a binding for `{var}`"),
                got: format!("{} = {}", binding.var, binding.value),
            });
        }
        if !binding.value.conforms(ty, self.file) {
            return Err(Status::TraceMismatch {
                var: var.clone(),
                expected: print_type(ty.carrier()),
                got: binding.value.to_string(),
            });
        }
        Ok(binding.value.clone())
    }

    /// Executes one statement. Returns `Ok(true)` once the entry frame ends.
    fn step(&mut self, stack: &mut Vec<Frame<'f>>) -> Result<bool, Status> {
        let file = self.file;
        let frame = stack
            .last_mut()
            .expect("the stack is never empty while running");
        let stmt = &frame.block.stmts[frame.pos];
        match &stmt.expr {
            SessionExpr::NewMsg { var, ty, creator }
            | SessionExpr::NewDepMsg { var, ty, creator } => {
                let value = self.consume(&var.node, ty)?;
                self.events.push(Event::MsgCreated {
                    var: var.node.clone(),
                    value: value.clone(),
                    creator: creator.node.clone(),
                });
                if let TypeExpr::Refined {
                    binder, predicate, ..
                } = ty
                {
                    let verdict = match eval_ref(predicate, &frame.values, Some(&value)) {
                        Ok(Value::Bool(b)) => b,
                        Ok(other) => {
                            return Err(Status::TraceMismatch {
                                var: var.node.clone(),
                                expected: "a boolean refinement".into(),
                                got: other.to_string(),
                            })
                        }
                        Err(err) => {
                            return Err(Status::TraceMismatch {
                                var: var.node.clone(),
                                expected: print_type(ty.carrier()),
                                got: err.message,
                            })
                        }
                    };
                    let mut witness = vec![(binder.clone(), value.clone())];
                    for v in free_vars(predicate) {
                        if let Some(val) = frame.values.get(&v) {
                            witness.push((v, val.clone()));
                        }
                    }
                    self.events.push(Event::RefinementChecked {
                        var: var.node.clone(),
                        predicate: print_ref(predicate),
                        verdict,
                        witness,
                    });
                    if !verdict {
                        return Err(Status::RefinementViolated {
                            var: var.node.clone(),
                            span: stmt.span,
                        });
                    }
                }
                frame.index = frame
                    .index
                    .introduce(&var.node, ty, &creator.node)
                    .expect("the checker rules out duplicate variables on a path");
                frame.values.insert(var.node.clone(), value);
                frame.pos += 1;
            }
            SessionExpr::Send {
                var,
                sender,
                receiver,
            } => {
                frame.index = frame
                    .index
                    .learn(&var.node, &receiver.node)
                    .expect("the checker rules out unbound variables");
                self.events.push(Event::Sent {
                    var: var.node.clone(),
                    sender: sender.node.clone(),
                    receiver: receiver.node.clone(),
                    index: frame.index.clone(),
                    protocol: frame.label.clone(),
                    span: stmt.span,
                });
                frame.pos += 1;
            }
            SessionExpr::Read { var, arms } => {
                let value = &frame.values[&var.node];
                let Some(arm) = arms.iter().find(|a| matches(&a.pattern.node, value)) else {
                    let pats: Vec<_> = arms.iter().map(|a| a.pattern.node.to_string()).collect();
                    return Err(Status::TraceMismatch {
                        var: var.node.clone(),
                        expected: format!("a value matching {}", pats.join(" | ")),
                        got: value.to_string(),
                    });
                };
                self.events.push(Event::CaseTaken {
                    var: var.node.clone(),
                    pattern: arm.pattern.node.clone(),
                });
                frame.block = &arm.body;
                frame.pos = 0;
            }
            SessionExpr::Rec => {
                self.events.push(Event::Recursed {
                    protocol: frame.label.clone(),
                });
                frame.restart();
            }
            SessionExpr::Call {
                target,
                args,
                then_rec,
            } => {
                let resolve = |name: &str| {
                    frame
                        .params
                        .get(name)
                        .cloned()
                        .unwrap_or_else(|| name.to_string())
                };
                let callee_name = resolve(&target.node);
                let callee = file
                    .protocol(&callee_name)
                    .expect("the checker resolves every call");
                let params = callee
                    .params
                    .iter()
                    .zip(args)
                    .map(|(p, a)| (p.name.node.clone(), resolve(&a.node)))
                    .collect();
                let next = Frame::enter(callee, params, *then_rec);
                self.events.push(Event::Called {
                    protocol: next.label.clone(),
                });
                stack.push(next);
            }
            SessionExpr::End => loop {
                let done = stack.pop().expect("the stack is never empty while running");
                self.events.push(Event::Ended {
                    protocol: done.label.clone(),
                });
                let Some(caller) = stack.last_mut() else {
                    return Ok(true);
                };
                if done.rec_caller {
                    self.events.push(Event::Recursed {
                        protocol: caller.label.clone(),
                    });
                    caller.restart();
                    break;
                }
            },
        }
        Ok(false)
    }
}
