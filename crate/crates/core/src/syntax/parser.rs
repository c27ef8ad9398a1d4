//! Recursive-descent parser for `.ssn` files.
//!
//! Every decision needs at most two tokens of lookahead. On a syntax error the
//! parser records it and skips to the next statement (inside a block) or the
//! next declaration (at top level), so one run reports several errors.

use num_bigint::BigInt;

use super::ast::*;
use super::lexer::{is_keyword, lex, Comment, Tok, Token};
use super::ParseError;
use crate::model::{
    ArithOp, BaseKind, BoolOp, CmpOp, Constructor, RefExpr, RefKind, RoleId, Span, Spanned,
    TypeExpr, VarId, VariantDecl,
};

type PResult<T> = Result<T, ParseError>;

const STMT_KEYWORDS: &[&str] = &["msg", "dep", "send", "read", "rec", "call", "end"];
const ITEM_KEYWORDS: &[&str] = &["roles", "type", "protocol", "entry"];

/// Parses a whole `.ssn` file.
pub fn parse(src: &str) -> Result<SourceFile, Vec<ParseError>> {
    let lexed = lex(src);
    let mut p = Parser {
        tokens: lexed.tokens,
        pos: 0,
        comments: lexed.comments,
        next_comment: 0,
        errors: lexed.errors,
    };
    let file = p.file();
    if p.errors.is_empty() {
        Ok(file)
    } else {
        Err(p.errors)
    }
}

pub(super) struct Parser {
    pub(super) tokens: Vec<Token>,
    pub(super) pos: usize,
    comments: Vec<Comment>,
    next_comment: usize,
    pub(super) errors: Vec<ParseError>,
}

impl Parser {
    pub(super) fn from_tokens(tokens: Vec<Token>) -> Self {
        Parser {
            tokens,
            pos: 0,
            comments: Vec::new(),
            next_comment: 0,
            errors: Vec::new(),
        }
    }

    pub(super) fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn peek_at(&self, n: usize) -> &Tok {
        let i = (self.pos + n).min(self.tokens.len() - 1);
        &self.tokens[i].tok
    }

    pub(super) fn span(&self) -> Span {
        self.tokens[self.pos].span
    }

    fn prev_span(&self) -> Span {
        self.tokens[self.pos.saturating_sub(1)].span
    }

    pub(super) fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    pub(super) fn at(&self, tok: &Tok) -> bool {
        self.peek() == tok
    }

    pub(super) fn at_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    pub(super) fn eat(&mut self, tok: &Tok) -> bool {
        if self.at(tok) {
            self.bump();
            true
        } else {
            false
        }
    }

    pub(super) fn unexpected(&self, what: &str) -> ParseError {
        ParseError::new(
            self.span(),
            format!("expected {what}, found {}", self.peek().describe()),
        )
    }

    pub(super) fn expect(&mut self, tok: Tok, what: &str) -> PResult<Span> {
        if self.at(&tok) {
            Ok(self.bump().span)
        } else {
            Err(self.unexpected(what))
        }
    }

    /// Like [`expect`](Self::expect) for a closing delimiter; the error points
    /// at the opening one when the input ends first.
    pub(super) fn expect_close(&mut self, tok: Tok, open: Span, what: &str) -> PResult<Span> {
        if self.at(&tok) {
            Ok(self.bump().span)
        } else if self.at(&Tok::Eof) {
            Err(ParseError::new(
                open,
                format!("unclosed delimiter, expected {what}"),
            ))
        } else {
            Err(self.unexpected(what))
        }
    }

    fn expect_kw(&mut self, kw: &str) -> PResult<Span> {
        if self.at_kw(kw) {
            Ok(self.bump().span)
        } else {
            Err(self.unexpected(&format!("`{kw}`")))
        }
    }

    pub(super) fn ident(&mut self, what: &str) -> PResult<Spanned<String>> {
        match self.peek() {
            Tok::Ident(s) if !is_keyword(s) => {
                let s = s.clone();
                let t = self.bump();
                Ok(Spanned::new(s, t.span))
            }
            _ => Err(self.unexpected(what)),
        }
    }

    fn role(&mut self) -> PResult<Spanned<RoleId>> {
        let name = self.ident("a role name")?;
        Ok(Spanned::new(RoleId::new(name.node), name.span))
    }

    fn var(&mut self) -> PResult<Spanned<VarId>> {
        let name = self.ident("a message variable")?;
        Ok(Spanned::new(VarId::new(name.node), name.span))
    }

    fn role_list(&mut self) -> PResult<Vec<Spanned<RoleId>>> {
        let mut roles = vec![self.role()?];
        while self.eat(&Tok::Comma) {
            roles.push(self.role()?);
        }
        Ok(roles)
    }

    fn take_comments(&mut self, before: usize) -> Vec<String> {
        let mut out = Vec::new();
        while let Some(c) = self.comments.get(self.next_comment) {
            if c.start >= before {
                break;
            }
            out.push(c.text.clone());
            self.next_comment += 1;
        }
        out
    }

    // ---- declarations ----------------------------------------------------

    fn file(&mut self) -> SourceFile {
        let mut items = Vec::new();
        while !self.at(&Tok::Eof) {
            let comments = self.take_comments(self.span().start);
            match self.item() {
                Ok(kind) => items.push(Item { kind, comments }),
                Err(e) => {
                    self.errors.push(e);
                    self.recover_item();
                }
            }
        }
        let trailing = self.take_comments(usize::MAX);
        SourceFile { items, trailing }
    }

    fn recover_item(&mut self) {
        let start = self.pos;
        let mut depth = 0i32;
        loop {
            match self.peek() {
                Tok::Eof => return,
                Tok::LBrace => depth += 1,
                Tok::RBrace => depth -= 1,
                Tok::Ident(s)
                    if depth <= 0 && self.pos > start && ITEM_KEYWORDS.contains(&s.as_str()) =>
                {
                    return
                }
                _ => {}
            }
            self.bump();
        }
    }

    fn item(&mut self) -> PResult<ItemKind> {
        if self.at_kw("roles") {
            self.bump();
            return Ok(ItemKind::Roles(self.role_list()?));
        }
        if self.at_kw("type") {
            return self.variant_decl().map(ItemKind::Variant);
        }
        if self.at_kw("protocol") {
            return self.protocol_decl().map(ItemKind::Protocol);
        }
        if self.at_kw("entry") {
            self.bump();
            return Ok(ItemKind::Entry(self.ident("a protocol name")?));
        }
        Err(self.unexpected("`roles`, `type`, `protocol` or `entry`"))
    }

    fn variant_decl(&mut self) -> PResult<VariantDecl> {
        self.expect_kw("type")?;
        let name = self.ident("a type name")?;
        self.expect(Tok::Assign, "`=`")?;
        let mut constructors = vec![self.constructor()?];
        while self.eat(&Tok::Pipe) {
            constructors.push(self.constructor()?);
        }
        Ok(VariantDecl { name, constructors })
    }

    fn constructor(&mut self) -> PResult<Constructor> {
        let tag = self.ident("a constructor name")?;
        let payload = if self.at(&Tok::LParen) {
            let open = self.bump().span;
            let mut elems = vec![self.ty(false)?];
            while self.eat(&Tok::Comma) {
                elems.push(self.ty(false)?);
            }
            self.expect_close(Tok::RParen, open, "`)`")?;
            Some(if elems.len() == 1 {
                elems.pop().unwrap()
            } else {
                TypeExpr::Tuple(elems)
            })
        } else {
            None
        };
        Ok(Constructor { tag, payload })
    }

    fn protocol_decl(&mut self) -> PResult<ProtocolDecl> {
        self.expect_kw("protocol")?;
        let name = self.ident("a protocol name")?;
        let mut params = Vec::new();
        if self.at(&Tok::Lt) {
            let open = self.bump().span;
            loop {
                let pname = self.ident("a protocol parameter name")?;
                self.expect(Tok::Colon, "`:`")?;
                self.expect_kw("protocol")?;
                let sig_open = self.expect(Tok::LBracket, "`[`")?;
                let signature = if self.at(&Tok::RBracket) {
                    Vec::new()
                } else {
                    self.role_list()?
                };
                self.expect_close(Tok::RBracket, sig_open, "`]`")?;
                params.push(ProtocolParam {
                    name: pname,
                    signature,
                });
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
            self.expect_close(Tok::Gt, open, "`>`")?;
        }
        let open = self.expect(Tok::LBracket, "`[` and the participant list")?;
        let participants = self.role_list()?;
        self.expect_close(Tok::RBracket, open, "`]`")?;
        let body = self.block()?;
        Ok(ProtocolDecl {
            name,
            params,
            participants,
            body,
        })
    }

    // ---- statements ------------------------------------------------------

    fn block(&mut self) -> PResult<Block> {
        let open = self.expect(Tok::LBrace, "`{`")?;
        let reported = self.errors.len();
        let stmts = self.stmts(true);
        let trailing = self.take_comments(self.span().start);
        self.expect_close(Tok::RBrace, open, "`}`")?;
        let block = Block { stmts, trailing };
        if self.errors.len() == reported {
            self.check_block_end(&block, open);
        }
        Ok(block)
    }

    fn check_block_end(&mut self, block: &Block, open: Span) {
        match block.stmts.last() {
            None => self.errors.push(ParseError::new(
                open,
                "empty block; a block must end with `end`, `rec`, `call` or `read`",
            )),
            Some(last) if !last.expr.is_terminator() => self.errors.push(ParseError::new(
                last.span,
                format!(
                    "`{}` cannot end a block; finish with `end`, `rec`, `call` or `read`",
                    last.expr.keyword()
                ),
            )),
            Some(_) => {}
        }
    }

    fn at_stmt(&self) -> bool {
        matches!(self.peek(), Tok::Ident(s) if STMT_KEYWORDS.contains(&s.as_str()))
    }

    /// Parses statements until something that cannot start one. With
    /// `in_braces`, unknown tokens are reported and skipped until the
    /// closing brace.
    fn stmts(&mut self, in_braces: bool) -> Vec<Stmt> {
        let mut stmts = Vec::new();
        loop {
            while self.eat(&Tok::Semi) {}
            if !self.at_stmt() {
                if in_braces && !self.at(&Tok::RBrace) && !self.at(&Tok::Eof) {
                    let err = self.unexpected("a statement or `}`");
                    self.errors.push(err);
                    self.recover_stmt();
                    continue;
                }
                return stmts;
            }
            let comments = self.take_comments(self.span().start);
            match self.stmt() {
                Ok(mut stmt) => {
                    stmt.comments = comments;
                    stmts.push(stmt);
                }
                Err(e) => {
                    self.errors.push(e);
                    self.recover_stmt();
                }
            }
        }
    }

    fn recover_stmt(&mut self) {
        let start = self.pos;
        let mut depth = 0i32;
        loop {
            match self.peek() {
                Tok::Eof => return,
                Tok::LBrace => depth += 1,
                Tok::RBrace if depth == 0 => return,
                Tok::RBrace => depth -= 1,
                Tok::Ident(s)
                    if depth == 0 && self.pos > start && STMT_KEYWORDS.contains(&s.as_str()) =>
                {
                    return
                }
                _ => {}
            }
            self.bump();
        }
    }

    fn stmt(&mut self) -> PResult<Stmt> {
        let start = self.span();
        let kw = match self.peek() {
            Tok::Ident(s) => s.clone(),
            _ => return Err(self.unexpected("a statement")),
        };
        self.bump();
        let expr = match kw.as_str() {
            "msg" | "dep" => {
                let var = self.var()?;
                self.expect(Tok::Colon, "`:`")?;
                let ty_span = self.span();
                let ty = self.ty(true)?;
                let refined = matches!(ty, TypeExpr::Refined { .. });
                if kw == "msg" && refined {
                    return Err(ParseError::new(
                        ty_span,
                        "a refined message type needs `dep`, not `msg`",
                    ));
                }
                if kw == "dep" && !refined {
                    return Err(ParseError::new(
                        ty_span,
                        "`dep` needs a refined type `(x : T where ...)`",
                    ));
                }
                self.expect_kw("by")?;
                let creator = self.role()?;
                if kw == "msg" {
                    SessionExpr::NewMsg { var, ty, creator }
                } else {
                    SessionExpr::NewDepMsg { var, ty, creator }
                }
            }
            "send" => {
                let var = self.var()?;
                let sender = self.role()?;
                self.expect(Tok::Arrow, "`->`")?;
                let receiver = self.role()?;
                SessionExpr::Send {
                    var,
                    sender,
                    receiver,
                }
            }
            "read" => {
                let var = self.var()?;
                let open = self.expect(Tok::LBrace, "`{`")?;
                let mut arms = Vec::new();
                while !self.at(&Tok::RBrace) && !self.at(&Tok::Eof) {
                    let comments = self.take_comments(self.span().start);
                    let mut arm = self.arm()?;
                    arm.comments = comments;
                    arms.push(arm);
                }
                self.expect_close(Tok::RBrace, open, "`}`")?;
                if arms.is_empty() {
                    return Err(ParseError::new(open, "`read` needs at least one arm"));
                }
                SessionExpr::Read { var, arms }
            }
            "rec" => SessionExpr::Rec,
            "call" => {
                let target = self.ident("a protocol name")?;
                let mut args = Vec::new();
                if self.at(&Tok::LParen) {
                    let open = self.bump().span;
                    args.push(self.ident("a protocol name")?);
                    while self.eat(&Tok::Comma) {
                        args.push(self.ident("a protocol name")?);
                    }
                    self.expect_close(Tok::RParen, open, "`)`")?;
                }
                let then_rec = if self.at_kw("then") {
                    self.bump();
                    self.expect_kw("rec")?;
                    true
                } else {
                    false
                };
                SessionExpr::Call {
                    target,
                    args,
                    then_rec,
                }
            }
            "end" => SessionExpr::End,
            _ => unreachable!("at_stmt guarantees a statement keyword"),
        };
        let span = start.to(self.prev_span());
        self.eat(&Tok::Semi);
        Ok(Stmt {
            expr,
            span,
            comments: Vec::new(),
        })
    }

    fn arm(&mut self) -> PResult<Arm> {
        let pattern = self.pattern()?;
        self.expect(Tok::FatArrow, "`=>`")?;
        let body = if self.at(&Tok::LBrace) {
            self.block()?
        } else {
            let at = self.span();
            let reported = self.errors.len();
            let stmts = self.stmts(false);
            if stmts.is_empty() {
                return Err(ParseError::new(
                    at,
                    "expected a statement or `{` after `=>`",
                ));
            }
            let block = Block::new(stmts);
            if self.errors.len() == reported {
                self.check_block_end(&block, at);
            }
            block
        };
        Ok(Arm {
            pattern,
            body,
            comments: Vec::new(),
        })
    }

    fn pattern(&mut self) -> PResult<Spanned<Pattern>> {
        let span = self.span();
        let pat = match self.peek().clone() {
            Tok::Underscore => Pattern::Wildcard,
            Tok::Int(i) => Pattern::Int(i),
            Tok::Minus => match self.peek_at(1).clone() {
                Tok::Int(i) => {
                    self.bump();
                    Pattern::Int(-i)
                }
                _ => return Err(self.unexpected("a pattern")),
            },
            Tok::Str(s) => Pattern::Str(s),
            Tok::Ident(s) if s == "true" => Pattern::Bool(true),
            Tok::Ident(s) if s == "false" => Pattern::Bool(false),
            Tok::Ident(s) if !is_keyword(&s) => Pattern::Tag(s),
            _ => return Err(self.unexpected("a pattern")),
        };
        self.bump();
        Ok(Spanned::new(pat, span.to(self.prev_span())))
    }

    // ---- types -----------------------------------------------------------

    /// `refined_ok` admits `(x : T where p)` at this position.
    fn ty(&mut self, refined_ok: bool) -> PResult<TypeExpr> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                let kind = match s.as_str() {
                    "Int" => Some(BaseKind::Int),
                    "Bool" => Some(BaseKind::Bool),
                    "Str" => Some(BaseKind::Str),
                    _ => None,
                };
                if let Some(kind) = kind {
                    self.bump();
                    return Ok(TypeExpr::Base(kind));
                }
                Ok(TypeExpr::Named(self.ident("a type")?))
            }
            Tok::LParen => {
                let open = self.span();
                if matches!(self.peek_at(1), Tok::Ident(s) if !is_keyword(s))
                    && self.peek_at(2) == &Tok::Colon
                {
                    if !refined_ok {
                        return Err(ParseError::new(
                            open,
                            "refined types may only appear directly after `dep m :`",
                        ));
                    }
                    return self.refined(open);
                }
                self.bump();
                let mut elems = vec![self.ty(false)?];
                while self.eat(&Tok::Comma) {
                    elems.push(self.ty(false)?);
                }
                if self.at_kw("where") {
                    return Err(ParseError::new(
                        open,
                        "a refinement must name its binder: `(x : T where ...)`",
                    ));
                }
                self.expect_close(Tok::RParen, open, "`,` or `)`")?;
                if elems.len() < 2 {
                    return Err(ParseError::new(
                        open,
                        "tuple types need at least two elements",
                    ));
                }
                Ok(TypeExpr::Tuple(elems))
            }
            _ => Err(self.unexpected("a type")),
        }
    }

    fn refined(&mut self, open: Span) -> PResult<TypeExpr> {
        self.expect(Tok::LParen, "`(`")?;
        let binder = self.var()?.node;
        self.expect(Tok::Colon, "`:`")?;
        let payload = self.ty(false)?;
        if !self.at_kw("where") {
            if self.at(&Tok::Eof) {
                return Err(ParseError::new(open, "unterminated refinement"));
            }
            return Err(self.unexpected("`where`"));
        }
        self.bump();
        let predicate = self.ref_expr(Some(&binder)).map_err(|e| {
            if self.at(&Tok::Eof) {
                ParseError::new(open, "unterminated refinement")
            } else {
                e
            }
        })?;
        self.expect_close(Tok::RParen, open, "`)` closing the refinement")?;
        Ok(TypeExpr::Refined {
            payload: Box::new(payload),
            binder,
            predicate,
        })
    }

    // ---- refinement expressions --------------------------------------------

    pub(super) fn ref_expr(&mut self, binder: Option<&VarId>) -> PResult<RefExpr> {
        let mut lhs = self.and_expr(binder)?;
        while self.at_kw("or") {
            self.bump();
            let rhs = self.and_expr(binder)?;
            lhs = binary(RefKind::BoolOp, BoolOp::Or, lhs, rhs);
        }
        Ok(lhs)
    }

    fn and_expr(&mut self, binder: Option<&VarId>) -> PResult<RefExpr> {
        let mut lhs = self.cmp_expr(binder)?;
        while self.at_kw("and") {
            self.bump();
            let rhs = self.cmp_expr(binder)?;
            lhs = binary(RefKind::BoolOp, BoolOp::And, lhs, rhs);
        }
        Ok(lhs)
    }

    fn cmp_op(&self) -> Option<CmpOp> {
        match self.peek() {
            Tok::EqEq => Some(CmpOp::Eq),
            Tok::Ne => Some(CmpOp::Ne),
            Tok::Lt => Some(CmpOp::Lt),
            Tok::Le => Some(CmpOp::Le),
            _ => None,
        }
    }

    fn cmp_expr(&mut self, binder: Option<&VarId>) -> PResult<RefExpr> {
        let lhs = self.add_expr(binder)?;
        let Some(op) = self.cmp_op() else {
            return Ok(lhs);
        };
        self.bump();
        let rhs = self.add_expr(binder)?;
        if self.cmp_op().is_some() {
            return Err(ParseError::new(
                self.span(),
                "comparisons do not chain; add parentheses",
            ));
        }
        Ok(binary(RefKind::Cmp, op, lhs, rhs))
    }

    fn add_expr(&mut self, binder: Option<&VarId>) -> PResult<RefExpr> {
        let mut lhs = self.mul_expr(binder)?;
        loop {
            let op = match self.peek() {
                Tok::Plus => ArithOp::Add,
                Tok::Minus => ArithOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.mul_expr(binder)?;
            lhs = binary(RefKind::Arith, op, lhs, rhs);
        }
    }

    fn mul_expr(&mut self, binder: Option<&VarId>) -> PResult<RefExpr> {
        let mut lhs = self.postfix(binder)?;
        while self.eat(&Tok::Star) {
            let rhs = self.postfix(binder)?;
            lhs = binary(RefKind::Arith, ArithOp::Mul, lhs, rhs);
        }
        Ok(lhs)
    }

    fn postfix(&mut self, binder: Option<&VarId>) -> PResult<RefExpr> {
        let mut e = self.primary(binder)?;
        while self.at(&Tok::Dot) {
            self.bump();
            let index = match self.peek().clone() {
                Tok::Int(i) => i,
                _ => return Err(self.unexpected("a tuple position")),
            };
            let span = self.bump().span;
            let index = usize::try_from(&index)
                .ok()
                .filter(|i| *i >= 1)
                .ok_or_else(|| ParseError::new(span, "tuple positions start at 1"))?;
            let full = e.span.to(span);
            e = RefExpr::new(RefKind::Proj(Box::new(e), index), full);
        }
        Ok(e)
    }

    fn primary(&mut self, binder: Option<&VarId>) -> PResult<RefExpr> {
        let start = self.span();
        match self.peek().clone() {
            Tok::Int(i) => {
                self.bump();
                Ok(RefExpr::new(RefKind::IntLit(i), start))
            }
            Tok::Minus => {
                self.bump();
                match self.peek().clone() {
                    Tok::Int(i) => {
                        let end = self.bump().span;
                        Ok(RefExpr::new(RefKind::IntLit(-i), start.to(end)))
                    }
                    _ => Err(self.unexpected("an integer after `-`")),
                }
            }
            Tok::Str(s) => {
                self.bump();
                Ok(RefExpr::new(RefKind::StrLit(s), start))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.ref_expr(binder)?;
                let end = self.expect_close(Tok::RParen, start, "`)`")?;
                Ok(RefExpr::new(inner.kind, start.to(end)))
            }
            Tok::Ident(s) => match s.as_str() {
                "true" | "false" => {
                    self.bump();
                    Ok(RefExpr::new(RefKind::BoolLit(s == "true"), start))
                }
                "val" | "literal" | "next" => {
                    self.bump();
                    let open = self.expect(Tok::LParen, "`(`")?;
                    let inner = self.ref_expr(binder)?;
                    let end = self.expect_close(Tok::RParen, open, "`)`")?;
                    let span = start.to(end);
                    if s == "val" {
                        return Ok(RefExpr::new(RefKind::UnwrapDep(Box::new(inner)), span));
                    }
                    let Some(binder) = binder else {
                        return Err(ParseError::new(
                            start,
                            format!("`{s}(...)` is only allowed inside a refinement"),
                        ));
                    };
                    let this = RefExpr::new(RefKind::Binder(binder.clone()), start);
                    let rhs = if s == "next" {
                        let one = RefExpr::new(RefKind::IntLit(BigInt::from(1)), span);
                        RefExpr::new(
                            RefKind::Arith(ArithOp::Add, Box::new(inner), Box::new(one)),
                            span,
                        )
                    } else {
                        inner
                    };
                    Ok(RefExpr::new(
                        RefKind::Cmp(CmpOp::Eq, Box::new(this), Box::new(rhs)),
                        span,
                    ))
                }
                _ => {
                    let name = self.ident("an expression")?;
                    let var = VarId::new(name.node);
                    let kind = if Some(&var) == binder {
                        RefKind::Binder(var)
                    } else {
                        RefKind::VarRef(var)
                    };
                    Ok(RefExpr::new(kind, name.span))
                }
            },
            _ => Err(self.unexpected("an expression")),
        }
    }
}

fn binary<Op>(
    make: fn(Op, Box<RefExpr>, Box<RefExpr>) -> RefKind,
    op: Op,
    lhs: RefExpr,
    rhs: RefExpr,
) -> RefExpr {
    let span = lhs.span.to(rhs.span);
    RefExpr::new(make(op, Box::new(lhs), Box::new(rhs)), span)
}
