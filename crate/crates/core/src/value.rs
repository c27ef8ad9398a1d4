//! Concrete message values used by traces and the simulator.

use std::fmt;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde_json::json;

use crate::model::TypeExpr;
use crate::syntax::{quote, SourceFile};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Value {
    Int(BigInt),
    Bool(bool),
    Str(String),
    Tuple(Vec<Value>),
    Con(String, Option<Box<Value>>),
}

impl Value {
    pub fn int(i: impl Into<BigInt>) -> Value {
        Value::Int(i.into())
    }

    pub fn str(s: impl Into<String>) -> Value {
        Value::Str(s.into())
    }

    pub fn con(tag: &str, payload: Option<Value>) -> Value {
        Value::Con(tag.to_string(), payload.map(Box::new))
    }

    /// Structural typing against a payload type. Values of refined types are
    /// represented by their payload, so refinements are looked through here.
    pub fn conforms(&self, ty: &TypeExpr, file: &SourceFile) -> bool {
        use crate::model::BaseKind;
        match (self, ty) {
            (_, TypeExpr::Refined { payload, .. }) => self.conforms(payload, file),
            (Value::Int(_), TypeExpr::Base(BaseKind::Int))
            | (Value::Bool(_), TypeExpr::Base(BaseKind::Bool))
            | (Value::Str(_), TypeExpr::Base(BaseKind::Str)) => true,
            (Value::Tuple(vals), TypeExpr::Tuple(tys)) => {
                vals.len() == tys.len() && vals.iter().zip(tys).all(|(v, t)| v.conforms(t, file))
            }
            (Value::Con(tag, payload), TypeExpr::Named(name)) => {
                let Some(ctor) = file.variant(&name.node).and_then(|d| d.constructor(tag)) else {
                    return false;
                };
                match (payload, &ctor.payload) {
                    (None, None) => true,
                    (Some(v), Some(t)) => v.conforms(t, file),
                    _ => false,
                }
            }
            _ => false,
        }
    }

    /// JSON rendering: integers become numbers when they fit in 64 bits and
    /// decimal strings otherwise; constructors become `{"tag", "payload"?}`.
    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Value::Int(i) => match i.to_i64() {
                Some(n) => json!(n),
                None => json!(i.to_string()),
            },
            Value::Bool(b) => json!(b),
            Value::Str(s) => json!(s),
            Value::Tuple(vals) => {
                serde_json::Value::Array(vals.iter().map(Value::to_json).collect())
            }
            Value::Con(tag, None) => json!({ "tag": tag }),
            Value::Con(tag, Some(p)) => json!({ "tag": tag, "payload": p.to_json() }),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(i) => write!(f, "{i}"),
            Value::Bool(b) => write!(f, "{b}"),
            Value::Str(s) => f.write_str(&quote(s)),
            Value::Tuple(vals) => {
                f.write_str("(")?;
                for (i, v) in vals.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{v}")?;
                }
                f.write_str(")")
            }
            Value::Con(tag, None) => f.write_str(tag),
            Value::Con(tag, Some(p)) => match p.as_ref() {
                Value::Tuple(vals) => {
                    write!(f, "{tag}")?;
                    write!(f, "{}", Value::Tuple(vals.clone()))
                }
                other => write!(f, "{tag}({other})"),
            },
        }
    }
}
