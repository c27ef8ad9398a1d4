//! Static checking of session descriptions.
//!
//! Each protocol body is walked once from an empty [`KnowledgeIndex`]. Every
//! construct has an obligation (a role may only create a refinement from
//! values it knows, only send what it knows, and only branch on values every
//! participant knows) and an effect on the index. A violated obligation becomes
//! a [`Diagnostic`]; the effect is then applied anyway so one mistake does not
//! cascade into unrelated reports.
//!
//! `rec` is a back-edge: the body was, or will be, checked from the empty
//! index, so nothing is unfolded. `call` checks the participant lists with
//! [`overlapping`] and leaves the caller's index untouched. Protocols with
//! protocol parameters are checked once per distinct instantiation, or
//! against their declared parameter signatures when never instantiated.

mod diag;
mod kind;

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;

pub use diag::{Code, Diagnostic, Related, Severity};
pub use kind::{kind_of_ref, KindEnv, KindError};

use crate::model::{
    free_var_occurrences, overlapping, BaseKind, KnowledgeIndex, RoleId, Span, Spanned, TypeExpr,
    VarId, VariantDecl,
};
use crate::syntax::{
    print_type, stmt_summary, Arm, Block, Pattern, ProtocolDecl, SessionExpr, SourceFile, Stmt,
};

/// Where a control path ended.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PathLabel {
    /// Protocol instance, e.g. `Server` or `Hoppy<body=Greeting>`.
    pub protocol: String,
    /// Case arms taken, e.g. `cmd=Math`.
    pub arms: Vec<String>,
    /// The statement that ended the path.
    pub terminator: String,
}

impl fmt::Display for PathLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.protocol)?;
        for arm in &self.arms {
            write!(f, " / {arm}")?;
        }
        write!(f, " -> {}", self.terminator)
    }
}

/// The index before and after one statement on one path.
#[derive(Debug, Clone)]
pub struct StepRecord {
    pub protocol: String,
    pub arms: Vec<String>,
    pub span: Span,
    pub summary: String,
    pub before: KnowledgeIndex,
    pub after: KnowledgeIndex,
}

/// One checked protocol instance, in checking order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceInfo {
    pub label: String,
    pub protocol: String,
    pub participants: Vec<RoleId>,
}

#[derive(Debug, Clone, Default)]
pub struct CheckResult {
    /// Sorted by source position.
    pub diagnostics: Vec<Diagnostic>,
    /// One entry per terminating path; empty whenever there are errors.
    pub final_indices: Vec<(PathLabel, KnowledgeIndex)>,
    pub steps: Vec<StepRecord>,
    pub instances: Vec<InstanceInfo>,
}

impl CheckResult {
    pub fn errors(&self) -> impl Iterator<Item = &Diagnostic> {
        self.diagnostics.iter().filter(|d| d.is_error())
    }

    pub fn has_errors(&self) -> bool {
        self.errors().next().is_some()
    }

    pub fn error_codes(&self) -> Vec<Code> {
        self.errors().map(|d| d.code).collect()
    }
}

pub fn check_file(file: &SourceFile) -> CheckResult {
    Checker::new(file, BTreeSet::new()).run()
}

/// Checks with the given obligations switched off. Used to show that each
/// obligation is what rejects its witness protocol.
#[cfg(feature = "mutation")]
pub fn check_file_without(file: &SourceFile, disabled: &[Code]) -> CheckResult {
    Checker::new(file, disabled.iter().copied().collect()).run()
}

#[derive(Debug, Clone)]
struct ParamBinding {
    signature: Vec<RoleId>,
    actual: Option<String>,
}

struct Frame<'f> {
    label: String,
    decl: &'f ProtocolDecl,
    participants: Vec<RoleId>,
    params: HashMap<String, ParamBinding>,
}

#[derive(Clone)]
struct PathState {
    index: KnowledgeIndex,
    arms: Vec<String>,
    created: HashMap<VarId, Span>,
    interactions: usize,
}

struct Checker<'f> {
    file: &'f SourceFile,
    roles: HashSet<RoleId>,
    variants: HashMap<&'f str, &'f VariantDecl>,
    protocols: HashMap<&'f str, &'f ProtocolDecl>,
    disabled: BTreeSet<Code>,
    result: CheckResult,
    queued: HashSet<(String, Vec<String>)>,
    queue: VecDeque<(String, Vec<String>)>,
}

impl<'f> Checker<'f> {
    fn new(file: &'f SourceFile, disabled: BTreeSet<Code>) -> Self {
        Checker {
            file,
            roles: HashSet::new(),
            variants: HashMap::new(),
            protocols: HashMap::new(),
            disabled,
            result: CheckResult::default(),
            queued: HashSet::new(),
            queue: VecDeque::new(),
        }
    }

    fn enforced(&self, code: Code) -> bool {
        !self.disabled.contains(&code)
    }

    fn report(&mut self, d: Diagnostic) {
        self.result.diagnostics.push(d);
    }

    fn run(mut self) -> CheckResult {
        self.declarations();
        self.entry();

        let file = self.file;
        for decl in file.protocols() {
            if decl.is_ground() && self.protocols.get(decl.name.node.as_str()) == Some(&decl) {
                self.instance(decl, &[]);
            }
        }
        while let Some((name, args)) = self.queue.pop_front() {
            let decl = self.protocols[name.as_str()];
            self.instance(decl, &args);
        }
        let instantiated: HashSet<String> = self.queued.iter().map(|(n, _)| n.clone()).collect();
        for decl in file.protocols() {
            if !decl.is_ground()
                && !instantiated.contains(&decl.name.node)
                && self.protocols.get(decl.name.node.as_str()) == Some(&decl)
            {
                self.signature_instance(decl);
            }
        }

        let mut result = self.result;
        result.diagnostics.sort_by(|a, b| {
            (a.span.start, a.span.end, a.code, &a.message).cmp(&(
                b.span.start,
                b.span.end,
                b.code,
                &b.message,
            ))
        });
        result.diagnostics.dedup_by(|a, b| {
            a.code == b.code
                && a.span.start == b.span.start
                && a.span.end == b.span.end
                && a.message == b.message
        });
        if result.has_errors() {
            result.final_indices.clear();
        }
        result
    }

    // ---- declarations ----------------------------------------------------

    fn declarations(&mut self) {
        let file = self.file;
        let mut declared: HashMap<&RoleId, Span> = HashMap::new();
        for role in file.roles() {
            if let Some(first) = declared.insert(&role.node, role.span) {
                let d = Diagnostic::error(
                    Code::E001,
                    role.span,
                    format!("role `{}` is declared twice", role.node),
                )
                .with_related(first, "first declared here");
                self.report(d);
            }
            self.roles.insert(role.node.clone());
        }
        for v in file.variants() {
            if let Some(first) = self.variants.get(v.name.node.as_str()) {
                let d = Diagnostic::error(
                    Code::E001,
                    v.name.span,
                    format!("type `{}` is declared twice", v.name.node),
                )
                .with_related(first.name.span, "first declared here");
                self.report(d);
            } else {
                self.variants.insert(&v.name.node, v);
            }
        }
        for p in file.protocols() {
            if let Some(first) = self.protocols.get(p.name.node.as_str()) {
                let d = Diagnostic::error(
                    Code::E001,
                    p.name.span,
                    format!("protocol `{}` is declared twice", p.name.node),
                )
                .with_related(first.name.span, "first declared here");
                self.report(d);
            } else {
                self.protocols.insert(&p.name.node, p);
            }
        }
        for v in file.variants() {
            let mut seen: HashMap<&str, Span> = HashMap::new();
            for ctor in &v.constructors {
                if let Some(first) = seen.insert(&ctor.tag.node, ctor.tag.span) {
                    let d = Diagnostic::error(
                        Code::E001,
                        ctor.tag.span,
                        format!(
                            "constructor `{}` appears twice in `{}`",
                            ctor.tag.node, v.name.node
                        ),
                    )
                    .with_related(first, "first listed here");
                    self.report(d);
                }
                if let Some(ty) = &ctor.payload {
                    self.resolve_type(ty);
                }
            }
        }
        for p in file.protocols() {
            self.role_list(&p.participants, "participant");
            let mut seen: HashMap<&str, Span> = HashMap::new();
            for param in &p.params {
                if self.protocols.contains_key(param.name.node.as_str()) {
                    self.report(Diagnostic::error(
                        Code::E001,
                        param.name.span,
                        format!(
                            "protocol parameter `{}` has the same name as a declared protocol",
                            param.name.node
                        ),
                    ));
                }
                if let Some(first) = seen.insert(&param.name.node, param.name.span) {
                    let d = Diagnostic::error(
                        Code::E001,
                        param.name.span,
                        format!("protocol parameter `{}` is declared twice", param.name.node),
                    )
                    .with_related(first, "first declared here");
                    self.report(d);
                }
                self.role_list(&param.signature, "signature role");
            }
        }
    }

    fn role_list(&mut self, roles: &[Spanned<RoleId>], what: &str) {
        let mut seen: HashMap<&RoleId, Span> = HashMap::new();
        for role in roles {
            if !self.roles.contains(&role.node) {
                self.report(Diagnostic::error(
                    Code::E001,
                    role.span,
                    format!("unknown role `{}`; declare it in a `roles` line", role.node),
                ));
            }
            if let Some(first) = seen.insert(&role.node, role.span) {
                let d = Diagnostic::error(
                    Code::E001,
                    role.span,
                    format!("{what} `{}` is listed twice", role.node),
                )
                .with_related(first, "first listed here");
                self.report(d);
            }
        }
    }

    fn entry(&mut self) {
        let file = self.file;
        let Some(name) = file.entry_name() else {
            self.report(Diagnostic::error(
                Code::E001,
                Span::new(0, 0, 1, 1),
                "the file declares no protocol to use as entry point",
            ));
            return;
        };
        let span = file
            .entry_decl()
            .map(|e| e.span)
            .or_else(|| file.protocols().last().map(|p| p.name.span))
            .unwrap_or_default();
        match self.protocols.get(name) {
            None => self.report(Diagnostic::error(
                Code::E001,
                span,
                format!("entry protocol `{name}` is not declared"),
            )),
            Some(decl) if !decl.is_ground() => {
                let d = Diagnostic::error(
                    Code::E012,
                    span,
                    format!("entry protocol `{name}` takes protocol parameters; the entry point must be ground"),
                )
                .with_related(decl.name.span, "declared here");
                self.report(d);
            }
            Some(_) => {}
        }
    }

    fn resolve_type(&mut self, ty: &TypeExpr) {
        match ty {
            TypeExpr::Base(_) => {}
            TypeExpr::Tuple(elems) => elems.iter().for_each(|t| self.resolve_type(t)),
            TypeExpr::Named(name) => {
                if !self.variants.contains_key(name.node.as_str()) {
                    self.report(Diagnostic::error(
                        Code::E001,
                        name.span,
                        format!("unknown type `{}`", name.node),
                    ));
                }
            }
            TypeExpr::Refined { payload, .. } => self.resolve_type(payload),
        }
    }

    // ---- protocol instances ------------------------------------------------

    fn instance(&mut self, decl: &'f ProtocolDecl, args: &[String]) {
        let mut params = HashMap::new();
        let mut label = decl.name.node.clone();
        if !args.is_empty() {
            let parts: Vec<_> = decl
                .params
                .iter()
                .zip(args)
                .map(|(p, a)| format!("{}={}", p.name.node, a))
                .collect();
            label = format!("{label}<{}>", parts.join(", "));
        }
        for (param, actual) in decl.params.iter().zip(args) {
            params.insert(
                param.name.node.clone(),
                ParamBinding {
                    signature: param.signature.iter().map(|r| r.node.clone()).collect(),
                    actual: Some(actual.clone()),
                },
            );
        }
        self.walk_protocol(Frame {
            label,
            decl,
            participants: decl.participant_ids(),
            params,
        });
    }

    fn signature_instance(&mut self, decl: &'f ProtocolDecl) {
        let mut params = HashMap::new();
        let mut parts = Vec::new();
        for param in &decl.params {
            let signature: Vec<RoleId> = param.signature.iter().map(|r| r.node.clone()).collect();
            let names: Vec<_> = signature.iter().map(RoleId::as_str).collect();
            parts.push(format!(
                "{} : protocol[{}]",
                param.name.node,
                names.join(", ")
            ));
            params.insert(
                param.name.node.clone(),
                ParamBinding {
                    signature,
                    actual: None,
                },
            );
        }
        self.walk_protocol(Frame {
            label: format!("{}<{}>", decl.name.node, parts.join(", ")),
            decl,
            participants: decl.participant_ids(),
            params,
        });
    }

    fn walk_protocol(&mut self, frame: Frame<'f>) {
        self.result.instances.push(InstanceInfo {
            label: frame.label.clone(),
            protocol: frame.decl.name.node.clone(),
            participants: frame.participants.clone(),
        });
        let state = PathState {
            index: KnowledgeIndex::new(),
            arms: Vec::new(),
            created: HashMap::new(),
            interactions: 0,
        };
        self.block(&frame, &frame.decl.body, state);
    }

    // ---- statements --------------------------------------------------------

    fn block(&mut self, frame: &Frame<'f>, block: &'f Block, mut state: PathState) {
        let count = block.stmts.len();
        for (i, stmt) in block.stmts.iter().enumerate() {
            let tail = i + 1 == count;
            if stmt.expr.is_terminator() && !tail && self.enforced(Code::E007) {
                self.report(Diagnostic::error(
                    Code::E007,
                    stmt.span,
                    format!(
                        "`{}` ends the path, but more statements follow it",
                        stmt.expr.keyword()
                    ),
                ));
            }
            let before = state.index.clone();
            match &stmt.expr {
                SessionExpr::NewMsg { .. }
                | SessionExpr::NewDepMsg { .. }
                | SessionExpr::Send { .. } => {
                    self.step(frame, stmt, &mut state);
                    state.interactions += 1;
                }
                SessionExpr::Read { var, arms } => {
                    self.record_step(frame, stmt, &state, before);
                    self.read(frame, stmt, var, arms, &state);
                    continue;
                }
                SessionExpr::Rec => {
                    if state.interactions == 0 {
                        self.report(Diagnostic::warning(
                            Code::E007,
                            stmt.span,
                            format!(
                                "`rec` re-enters `{}` before any message is exchanged",
                                frame.decl.name.node
                            ),
                        ));
                    }
                }
                SessionExpr::Call {
                    target,
                    args,
                    then_rec: _,
                } => self.call(frame, target, args),
                SessionExpr::End => {}
            }
            self.record_step(frame, stmt, &state, before);
            if stmt.expr.is_terminator() && tail {
                let label = PathLabel {
                    protocol: frame.label.clone(),
                    arms: state.arms.clone(),
                    terminator: stmt_summary(&stmt.expr),
                };
                self.result.final_indices.push((label, state.index.clone()));
            }
        }
        match block.stmts.last() {
            Some(last) if !last.expr.is_terminator() && self.enforced(Code::E007) => {
                self.report(Diagnostic::error(
                    Code::E007,
                    last.span,
                    "the path ends without `end`, `rec` or `call`",
                ))
            }
            _ => {}
        }
    }

    fn record_step(
        &mut self,
        frame: &Frame,
        stmt: &Stmt,
        state: &PathState,
        before: KnowledgeIndex,
    ) {
        self.result.steps.push(StepRecord {
            protocol: frame.label.clone(),
            arms: state.arms.clone(),
            span: stmt.span,
            summary: stmt_summary(&stmt.expr),
            before,
            after: state.index.clone(),
        });
    }

    /// Reports E001/E002 and returns whether `role` is a declared participant.
    fn participant(&mut self, frame: &Frame, role: &Spanned<RoleId>) -> bool {
        if !self.roles.contains(&role.node) {
            self.report(Diagnostic::error(
                Code::E001,
                role.span,
                format!("unknown role `{}`", role.node),
            ));
            return false;
        }
        if !frame.participants.contains(&role.node) {
            if self.enforced(Code::E002) {
                self.report(Diagnostic::error(
                    Code::E002,
                    role.span,
                    format!(
                        "`{}` is not a participant of `{}`",
                        role.node, frame.decl.name.node
                    ),
                ));
            }
            return false;
        }
        true
    }

    fn introduce(
        &mut self,
        state: &mut PathState,
        var: &Spanned<VarId>,
        ty: &TypeExpr,
        creator: &Spanned<RoleId>,
    ) {
        match state.index.introduce(&var.node, ty, &creator.node) {
            Ok(next) => {
                state.index = next;
                state.created.insert(var.node.clone(), var.span);
            }
            Err(_) => {
                let mut d = Diagnostic::error(
                    Code::E009,
                    var.span,
                    format!(
                        "message variable `{}` is already bound on this path",
                        var.node
                    ),
                );
                if let Some(first) = state.created.get(&var.node) {
                    d = d.with_related(*first, "first bound here");
                }
                self.report(d);
            }
        }
    }

    fn step(&mut self, frame: &Frame, stmt: &Stmt, state: &mut PathState) {
        match &stmt.expr {
            SessionExpr::NewMsg { var, ty, creator } => {
                self.participant(frame, creator);
                self.resolve_type(ty);
                self.introduce(state, var, ty, creator);
            }
            SessionExpr::NewDepMsg { var, ty, creator } => {
                self.participant(frame, creator);
                self.resolve_type(ty);
                if let TypeExpr::Refined {
                    payload,
                    binder,
                    predicate,
                } = ty
                {
                    let mut unknown = Vec::new();
                    for (dep, span) in free_var_occurrences(predicate) {
                        if !state.index.contains(&dep) {
                            self.report(Diagnostic::error(
                                Code::E009,
                                span,
                                format!("`{dep}` is not bound on this path"),
                            ));
                        } else if !state.index.knows(&dep, &creator.node) {
                            unknown.push(dep);
                        }
                    }
                    if !unknown.is_empty() && self.enforced(Code::E004) {
                        let names: Vec<_> = unknown.iter().map(|v| format!("`{v}`")).collect();
                        let mut d = Diagnostic::error(
                            Code::E004,
                            stmt.span,
                            format!(
                                "`{}` creates `{}` from {}, which `{}` has not learned",
                                creator.node,
                                var.node,
                                names.join(", "),
                                creator.node
                            ),
                        );
                        if let Some(first) = state.created.get(&unknown[0]) {
                            d = d.with_related(*first, format!("`{}` is created here", unknown[0]));
                        }
                        self.report(d);
                    }
                    self.kind_check(state, payload, binder, predicate);
                }
                self.introduce(state, var, ty, creator);
            }
            SessionExpr::Send {
                var,
                sender,
                receiver,
            } => {
                self.participant(frame, sender);
                self.participant(frame, receiver);
                if sender.node == receiver.node && self.enforced(Code::E011) {
                    self.report(Diagnostic::error(
                        Code::E011,
                        stmt.span,
                        format!("`{}` sends `{}` to itself", sender.node, var.node),
                    ));
                }
                if !state.index.contains(&var.node) {
                    self.report(Diagnostic::error(
                        Code::E009,
                        var.span,
                        format!("`{}` is not bound on this path", var.node),
                    ));
                    return;
                }
                if !state.index.knows(&var.node, &sender.node) && self.enforced(Code::E003) {
                    let mut d = Diagnostic::error(
                        Code::E003,
                        stmt.span,
                        format!("`{}` sends `{}` without knowing it", sender.node, var.node),
                    );
                    if let Some(first) = state.created.get(&var.node) {
                        d = d.with_related(*first, format!("`{}` is created here", var.node));
                    }
                    self.report(d);
                }
                state.index = state
                    .index
                    .learn(&var.node, &receiver.node)
                    .expect("presence checked above");
            }
            _ => unreachable!("only message steps reach `step`"),
        }
    }

    fn kind_check(
        &mut self,
        state: &PathState,
        payload: &TypeExpr,
        binder: &VarId,
        predicate: &crate::model::RefExpr,
    ) {
        if !self.enforced(Code::E010) {
            return;
        }
        let env = KindEnv {
            vars: state
                .index
                .items()
                .iter()
                .map(|item| (item.var.clone(), item.ty.clone()))
                .collect(),
            binder: Some((binder.clone(), payload.clone())),
        };
        match kind_of_ref(predicate, &env) {
            Ok(TypeExpr::Base(BaseKind::Bool)) | Err(KindError::Unbound(..)) => {}
            Ok(other) => self.report(Diagnostic::error(
                Code::E010,
                predicate.span,
                format!("a refinement must be Bool, found {}", print_type(&other)),
            )),
            Err(err) => self.report(Diagnostic::error(Code::E010, err.span(), err.message())),
        }
    }

    fn read(
        &mut self,
        frame: &Frame<'f>,
        stmt: &Stmt,
        var: &Spanned<VarId>,
        arms: &'f [Arm],
        state: &PathState,
    ) {
        match state.index.get(&var.node) {
            None => self.report(Diagnostic::error(
                Code::E009,
                var.span,
                format!("`{}` is not bound on this path", var.node),
            )),
            Some(item) => {
                let missing: Vec<_> = frame
                    .participants
                    .iter()
                    .filter(|r| !item.is_known_by(r))
                    .map(|r| format!("`{r}`"))
                    .collect();
                if !missing.is_empty() && self.enforced(Code::E005) {
                    let mut d = Diagnostic::error(
                        Code::E005,
                        stmt.span,
                        format!(
                            "cannot branch on `{}`: {} {} not learned it",
                            var.node,
                            missing.join(", "),
                            if missing.len() == 1 { "has" } else { "have" }
                        ),
                    );
                    if let Some(first) = state.created.get(&var.node) {
                        d = d.with_related(*first, format!("`{}` is created here", var.node));
                    }
                    self.report(d);
                }
                let carrier = item.ty.carrier().clone();
                self.coverage(stmt, var, &carrier, arms);
            }
        }
        for arm in arms {
            let mut arm_state = state.clone();
            arm_state
                .arms
                .push(format!("{}={}", var.node, arm.pattern.node));
            self.block(frame, &arm.body, arm_state);
        }
    }

    fn coverage(&mut self, stmt: &Stmt, var: &Spanned<VarId>, ty: &TypeExpr, arms: &[Arm]) {
        let mut wildcard = false;
        let mut seen: Vec<&Pattern> = Vec::new();
        for arm in arms {
            let pat = &arm.pattern.node;
            if wildcard || seen.contains(&pat) {
                self.report(Diagnostic::warning(
                    Code::E006,
                    arm.pattern.span,
                    format!("arm `{pat}` is unreachable"),
                ));
                continue;
            }
            let fits = match (pat, ty) {
                (Pattern::Wildcard, _) => {
                    wildcard = true;
                    true
                }
                (Pattern::Tag(tag), TypeExpr::Named(name)) => {
                    match self.variants.get(name.node.as_str()) {
                        Some(decl) if decl.constructor(tag).is_none() => {
                            self.report(Diagnostic::error(
                                Code::E001,
                                arm.pattern.span,
                                format!("`{}` has no constructor `{tag}`", name.node),
                            ));
                        }
                        _ => {}
                    }
                    true
                }
                (Pattern::Bool(_), TypeExpr::Base(BaseKind::Bool))
                | (Pattern::Int(_), TypeExpr::Base(BaseKind::Int))
                | (Pattern::Str(_), TypeExpr::Base(BaseKind::Str)) => true,
                _ => false,
            };
            if !fits && self.enforced(Code::E010) {
                self.report(Diagnostic::error(
                    Code::E010,
                    arm.pattern.span,
                    format!(
                        "pattern `{pat}` does not match values of type {}",
                        print_type(ty)
                    ),
                ));
            }
            seen.push(pat);
        }
        if wildcard || !self.enforced(Code::E006) {
            return;
        }
        let missing: Vec<String> = match ty {
            TypeExpr::Named(name) => match self.variants.get(name.node.as_str()) {
                Some(decl) => decl
                    .constructors
                    .iter()
                    .filter(|c| !seen.contains(&&Pattern::Tag(c.tag.node.clone())))
                    .map(|c| format!("`{}`", c.tag.node))
                    .collect(),
                None => return,
            },
            TypeExpr::Base(BaseKind::Bool) => [true, false]
                .into_iter()
                .filter(|b| !seen.contains(&&Pattern::Bool(*b)))
                .map(|b| format!("`{b}`"))
                .collect(),
            _ => vec!["`_`".to_string()],
        };
        if !missing.is_empty() {
            self.report(Diagnostic::error(
                Code::E006,
                stmt.span,
                format!(
                    "case split on `{}` is not exhaustive; missing {}",
                    var.node,
                    missing.join(", ")
                ),
            ));
        }
    }

    /// Participant list of a protocol argument, and the ground protocol it
    /// names when known.
    fn resolve_arg(
        &mut self,
        frame: &Frame,
        arg: &Spanned<String>,
    ) -> Option<(Vec<RoleId>, Option<String>)> {
        if let Some(binding) = frame.params.get(&arg.node) {
            return Some((binding.signature.clone(), binding.actual.clone()));
        }
        match self.protocols.get(arg.node.as_str()) {
            Some(decl) if decl.is_ground() => {
                Some((decl.participant_ids(), Some(decl.name.node.clone())))
            }
            Some(decl) => {
                self.report(Diagnostic::error(
                    Code::E001,
                    arg.span,
                    format!(
                        "`{}` takes protocol parameters itself and cannot be passed as an argument",
                        decl.name.node
                    ),
                ));
                None
            }
            None => {
                self.report(Diagnostic::error(
                    Code::E001,
                    arg.span,
                    format!("unknown protocol `{}`", arg.node),
                ));
                None
            }
        }
    }

    fn call(&mut self, frame: &Frame, target: &Spanned<String>, args: &[Spanned<String>]) {
        let callee_roles = if let Some(binding) = frame.params.get(&target.node) {
            if !args.is_empty() {
                self.report(Diagnostic::error(
                    Code::E001,
                    target.span,
                    format!("protocol parameter `{}` takes no arguments", target.node),
                ));
            }
            binding.signature.clone()
        } else if let Some(callee) = self.protocols.get(target.node.as_str()).copied() {
            if callee.params.len() != args.len() {
                self.report(Diagnostic::error(
                    Code::E001,
                    target.span,
                    format!(
                        "`{}` expects {} protocol argument(s), found {}",
                        callee.name.node,
                        callee.params.len(),
                        args.len()
                    ),
                ));
            } else if !args.is_empty() {
                let mut actuals = Some(Vec::new());
                for (param, arg) in callee.params.iter().zip(args) {
                    let Some((roles, actual)) = self.resolve_arg(frame, arg) else {
                        actuals = None;
                        continue;
                    };
                    let signature: Vec<RoleId> =
                        param.signature.iter().map(|r| r.node.clone()).collect();
                    if !overlapping(&roles, &signature) && self.enforced(Code::E008) {
                        self.report(Diagnostic::error(
                            Code::E008,
                            arg.span,
                            format!(
                                "participants [{}] of `{}` do not appear in order within the signature [{}] of `{}`",
                                join_roles(&roles),
                                arg.node,
                                join_roles(&signature),
                                param.name.node
                            ),
                        ));
                    }
                    match (&mut actuals, actual) {
                        (Some(list), Some(name)) => list.push(name),
                        _ => actuals = None,
                    }
                }
                if let Some(actuals) = actuals {
                    let key = (callee.name.node.clone(), actuals);
                    if self.queued.insert(key.clone()) {
                        self.queue.push_back(key);
                    }
                }
            }
            callee.participant_ids()
        } else {
            self.report(Diagnostic::error(
                Code::E001,
                target.span,
                format!("unknown protocol `{}`", target.node),
            ));
            return;
        };
        if !overlapping(&callee_roles, &frame.participants) && self.enforced(Code::E008) {
            self.report(Diagnostic::error(
                Code::E008,
                target.span,
                format!(
                    "participants [{}] of `{}` do not appear in order within [{}] of `{}`",
                    join_roles(&callee_roles),
                    target.node,
                    join_roles(&frame.participants),
                    frame.decl.name.node
                ),
            ));
        }
    }
}

fn join_roles(roles: &[RoleId]) -> String {
    roles
        .iter()
        .map(RoleId::as_str)
        .collect::<Vec<_>>()
        .join(", ")
}

/// Renders `index` as `var : type {knowers}` lines.
pub fn describe_index(index: &KnowledgeIndex) -> Vec<String> {
    index
        .items()
        .iter()
        .map(|item| {
            format!(
                "{} : {} {{{}}}",
                item.var,
                print_type(&item.ty),
                join_roles(item.knowers())
            )
        })
        .collect()
}

/// `[{var, type, knowers}]`
pub fn index_json(index: &KnowledgeIndex) -> serde_json::Value {
    index
        .items()
        .iter()
        .map(|item| {
            serde_json::json!({
                "var": item.var.as_str(),
                "type": print_type(&item.ty),
                "knowers": item.knowers().iter().map(RoleId::as_str).collect::<Vec<_>>(),
            })
        })
        .collect()
}
