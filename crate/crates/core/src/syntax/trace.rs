//! `.trace` files: one `var = value` binding per line.

use super::lexer::{lex, Tok};
use super::parser::Parser;
use super::ParseError;
use crate::model::{Span, VarId};
use crate::value::Value;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Binding {
    pub var: VarId,
    pub value: Value,
    pub span: Span,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Trace {
    pub bindings: Vec<Binding>,
}

impl Trace {
    pub fn new(bindings: impl IntoIterator<Item = (VarId, Value)>) -> Self {
        Trace {
            bindings: bindings
                .into_iter()
                .map(|(var, value)| Binding {
                    var,
                    value,
                    span: Span::default(),
                })
                .collect(),
        }
    }
}

pub fn parse_trace(src: &str) -> Result<Trace, ParseError> {
    let lexed = lex(src);
    if let Some(err) = lexed.errors.into_iter().next() {
        return Err(err);
    }
    let mut p = Parser::from_tokens(lexed.tokens);
    let mut bindings = Vec::new();
    loop {
        while p.eat(&Tok::Semi) {}
        if p.at(&Tok::Eof) {
            break;
        }
        let var = p.ident("a message variable")?;
        p.expect(Tok::Assign, "`=`")?;
        let value = p.value()?;
        bindings.push(Binding {
            var: VarId::new(var.node),
            value,
            span: var.span.to(p.tokens[p.pos - 1].span),
        });
    }
    Ok(Trace { bindings })
}

/// Parses a single value, e.g. `(SYN, 100)`.
pub fn parse_value(src: &str) -> Result<Value, ParseError> {
    let lexed = lex(src);
    if let Some(err) = lexed.errors.into_iter().next() {
        return Err(err);
    }
    let mut p = Parser::from_tokens(lexed.tokens);
    let v = p.value()?;
    if !p.at(&Tok::Eof) {
        return Err(p.unexpected("end of input"));
    }
    Ok(v)
}

impl Parser {
    pub(super) fn value(&mut self) -> Result<Value, ParseError> {
        match self.peek().clone() {
            Tok::Int(i) => {
                self.bump();
                Ok(Value::Int(i))
            }
            Tok::Minus => {
                self.bump();
                match self.peek().clone() {
                    Tok::Int(i) => {
                        self.bump();
                        Ok(Value::Int(-i))
                    }
                    _ => Err(self.unexpected("an integer after `-`")),
                }
            }
            Tok::Str(s) => {
                self.bump();
                Ok(Value::Str(s))
            }
            Tok::Ident(s) if s == "true" || s == "false" => {
                self.bump();
                Ok(Value::Bool(s == "true"))
            }
            Tok::Ident(_) => {
                let tag = self.ident("a value")?;
                if !self.at(&Tok::LParen) {
                    return Ok(Value::Con(tag.node, None));
                }
                let open = self.bump().span;
                let mut elems = self.value_list(open)?;
                let payload = if elems.len() == 1 {
                    elems.pop().unwrap()
                } else {
                    Value::Tuple(elems)
                };
                Ok(Value::Con(tag.node, Some(Box::new(payload))))
            }
            Tok::LParen => {
                let open = self.bump().span;
                let elems = self.value_list(open)?;
                if elems.len() < 2 {
                    return Err(ParseError::new(open, "tuples need at least two elements"));
                }
                Ok(Value::Tuple(elems))
            }
            _ => Err(self.unexpected("a value")),
        }
    }

    fn value_list(&mut self, open: Span) -> Result<Vec<Value>, ParseError> {
        let mut elems = vec![self.value()?];
        while self.eat(&Tok::Comma) {
            elems.push(self.value()?);
        }
        self.expect_close(Tok::RParen, open, "`,` or `)`")?;
        Ok(elems)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tuple_with_constructor() {
        let t = parse_trace("m1 = (SYN, 100)").unwrap();
        assert_eq!(t.bindings.len(), 1);
        assert_eq!(t.bindings[0].var, VarId::new("m1"));
        assert_eq!(
            t.bindings[0].value,
            Value::Tuple(vec![Value::con("SYN", None), Value::int(100)])
        );
    }

    #[test]
    fn empty_trace() {
        assert_eq!(parse_trace("").unwrap(), Trace::default());
        assert_eq!(parse_trace("-- nothing\n\n").unwrap(), Trace::default());
    }

    #[test]
    fn truncated_tuple() {
        let err = parse_trace("m1 = (SYN,").unwrap_err();
        assert_eq!(err.span.line, 1);
    }

    #[test]
    fn every_value_form() {
        let t = parse_trace(
            "a = -3\nb = true; c = \"say \\\"hi\\\"\"\nd = Add(1, 2)\ne = Some(x)\nf = ((1, 2), false)",
        )
        .unwrap();
        let vals: Vec<_> = t.bindings.iter().map(|b| b.value.to_string()).collect();
        assert_eq!(
            vals,
            [
                "-3",
                "true",
                "\"say \\\"hi\\\"\"",
                "Add(1, 2)",
                "Some(x)",
                "((1, 2), false)"
            ]
        );
    }

    #[test]
    fn value_round_trip() {
        for text in ["(SYN, 100)", "Add(1, -2)", "\"a\\\\b\"", "Wrap((1, 2))"] {
            let v = parse_value(text).unwrap();
            assert_eq!(parse_value(&v.to_string()).unwrap(), v);
        }
    }
}
