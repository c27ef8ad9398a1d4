//! Kinding for refinement predicates.

use std::collections::HashMap;

use crate::model::{BaseKind, CmpOp, RefExpr, RefKind, Span, TypeExpr, VarId};
use crate::syntax::print_type;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum KindError {
    /// A message variable with no binding in the environment.
    Unbound(VarId, Span),
    Mismatch {
        span: Span,
        message: String,
    },
}

impl KindError {
    pub fn span(&self) -> Span {
        match self {
            KindError::Unbound(_, span) => *span,
            KindError::Mismatch { span, .. } => *span,
        }
    }

    pub fn message(&self) -> String {
        match self {
            KindError::Unbound(v, _) => format!("`{v}` is not bound"),
            KindError::Mismatch { message, .. } => message.clone(),
        }
    }
}

/// Types of the message variables in scope, plus the refinement binder.
#[derive(Debug, Clone, Default)]
pub struct KindEnv {
    pub vars: HashMap<VarId, TypeExpr>,
    pub binder: Option<(VarId, TypeExpr)>,
}

impl KindEnv {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn bind(mut self, var: &str, ty: TypeExpr) -> Self {
        self.vars.insert(VarId::new(var), ty);
        self
    }

    pub fn with_binder(mut self, var: &str, ty: TypeExpr) -> Self {
        self.binder = Some((VarId::new(var), ty));
        self
    }
}

const INT: TypeExpr = TypeExpr::Base(BaseKind::Int);
const BOOL: TypeExpr = TypeExpr::Base(BaseKind::Bool);
const STR: TypeExpr = TypeExpr::Base(BaseKind::Str);

fn mismatch(span: Span, message: String) -> KindError {
    KindError::Mismatch { span, message }
}

fn expect(e: &RefExpr, env: &KindEnv, want: &TypeExpr, context: &str) -> Result<(), KindError> {
    let got = kind_of_ref(e, env)?;
    if &got == want {
        Ok(())
    } else {
        Err(mismatch(
            e.span,
            format!(
                "{context} needs {}, found {}",
                print_type(want),
                print_type(&got)
            ),
        ))
    }
}

pub fn kind_of_ref(expr: &RefExpr, env: &KindEnv) -> Result<TypeExpr, KindError> {
    match &expr.kind {
        RefKind::IntLit(_) => Ok(INT),
        RefKind::BoolLit(_) => Ok(BOOL),
        RefKind::StrLit(_) => Ok(STR),
        RefKind::VarRef(v) => env
            .vars
            .get(v)
            .cloned()
            .ok_or_else(|| KindError::Unbound(v.clone(), expr.span)),
        RefKind::Binder(v) => match &env.binder {
            Some((b, ty)) if b == v => Ok(ty.clone()),
            _ => Err(KindError::Unbound(v.clone(), expr.span)),
        },
        RefKind::Proj(base, index) => match kind_of_ref(base, env)? {
            TypeExpr::Tuple(elems) => elems.get(index - 1).cloned().ok_or_else(|| {
                mismatch(
                    expr.span,
                    format!(
                        "position {index} is out of range for a {}-tuple",
                        elems.len()
                    ),
                )
            }),
            refined @ TypeExpr::Refined { .. } => Err(mismatch(
                base.span,
                format!(
                    "cannot project from refined type {}; unwrap it with `val(...)` first",
                    print_type(&refined)
                ),
            )),
            other => Err(mismatch(
                base.span,
                format!("cannot project from non-tuple type {}", print_type(&other)),
            )),
        },
        RefKind::UnwrapDep(inner) => match kind_of_ref(inner, env)? {
            TypeExpr::Refined { payload, .. } => Ok(*payload),
            other => Err(mismatch(
                inner.span,
                format!(
                    "`val` needs a refined message, found {}",
                    print_type(&other)
                ),
            )),
        },
        RefKind::Arith(op, l, r) => {
            let context = format!("`{}`", op.symbol());
            expect(l, env, &INT, &context)?;
            expect(r, env, &INT, &context)?;
            Ok(INT)
        }
        RefKind::Cmp(op @ (CmpOp::Lt | CmpOp::Le), l, r) => {
            let context = format!("`{}`", op.symbol());
            expect(l, env, &INT, &context)?;
            expect(r, env, &INT, &context)?;
            Ok(BOOL)
        }
        RefKind::Cmp(op, l, r) => {
            let lk = kind_of_ref(l, env)?;
            if !matches!(lk, TypeExpr::Base(_)) {
                return Err(mismatch(
                    l.span,
                    format!(
                        "`{}` compares Int, Bool or Str values, found {}",
                        op.symbol(),
                        print_type(&lk)
                    ),
                ));
            }
            expect(r, env, &lk, &format!("`{}`", op.symbol()))?;
            Ok(BOOL)
        }
        RefKind::BoolOp(op, l, r) => {
            let context = format!("`{}`", op.keyword());
            expect(l, env, &BOOL, &context)?;
            expect(r, env, &BOOL, &context)?;
            Ok(BOOL)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ArithOp, BoolOp, Spanned};

    fn packet_int() -> TypeExpr {
        TypeExpr::Tuple(vec![TypeExpr::Named(Spanned::dummy("Packet".into())), INT])
    }

    #[test]
    fn projection_arithmetic() {
        let env = KindEnv::new().bind("m1", packet_int());
        let e = RefExpr::arith(ArithOp::Add, RefExpr::var("m1").proj(2), RefExpr::int(1));
        assert_eq!(kind_of_ref(&e, &env), Ok(INT));
    }

    #[test]
    fn int_vs_str_equality() {
        let env = KindEnv::new().bind("m1", packet_int());
        let e = RefExpr::cmp(
            CmpOp::Eq,
            RefExpr::var("m1").proj(2),
            RefExpr::bare(RefKind::StrLit("hi".into())),
        );
        assert!(matches!(
            kind_of_ref(&e, &env),
            Err(KindError::Mismatch { .. })
        ));
    }

    #[test]
    fn boolean_connective() {
        let e = RefExpr::bool_op(
            BoolOp::And,
            RefExpr::bare(RefKind::BoolLit(true)),
            RefExpr::cmp(CmpOp::Lt, RefExpr::int(1), RefExpr::int(2)),
        );
        assert_eq!(kind_of_ref(&e, &KindEnv::new()), Ok(BOOL));
    }

    #[test]
    fn refined_values_need_unwrapping() {
        let refined = TypeExpr::Refined {
            payload: Box::new(packet_int()),
            binder: VarId::new("x"),
            predicate: RefExpr::bare(RefKind::BoolLit(true)),
        };
        let env = KindEnv::new().bind("m2", refined);
        assert!(kind_of_ref(&RefExpr::var("m2").proj(2), &env).is_err());
        assert_eq!(
            kind_of_ref(&RefExpr::var("m2").unwrap_dep().proj(2), &env),
            Ok(INT)
        );
        assert!(kind_of_ref(&RefExpr::int(1).unwrap_dep(), &env).is_err());
    }

    #[test]
    fn out_of_range_projection() {
        let env = KindEnv::new().bind("m1", packet_int());
        assert!(kind_of_ref(&RefExpr::var("m1").proj(3), &env).is_err());
    }

    #[test]
    fn binder_and_unbound() {
        let env = KindEnv::new().with_binder("x", STR);
        assert_eq!(kind_of_ref(&RefExpr::binder("x"), &env), Ok(STR));
        assert!(matches!(
            kind_of_ref(&RefExpr::var("ghost"), &env),
            Err(KindError::Unbound(..))
        ));
    }

    #[test]
    fn variants_are_not_comparable() {
        let env = KindEnv::new().bind("m1", packet_int());
        let e = RefExpr::cmp(
            CmpOp::Eq,
            RefExpr::var("m1").proj(1),
            RefExpr::var("m1").proj(1),
        );
        assert!(kind_of_ref(&e, &env).is_err());
    }
}
