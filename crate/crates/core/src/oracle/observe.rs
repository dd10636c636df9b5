use std::fmt;
use std::sync::Arc;

use crate::normalize::normalize_type;
use crate::reduce::{evaluate, prim_spine};
use crate::syntax::{Prim, Term, Type};

use super::{OracleError, SemValue, R};

/// A finite, canonical encoding of a first-order value.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Observation {
    Unit,
    Pair(Box<Observation>, Box<Observation>),
    TagL(Box<Observation>),
    TagR(Box<Observation>),
    Wrap(Box<Observation>),
}

impl Observation {
    /// Reads back the natural number encoding `mu(\X. 1 + X)`.
    pub fn as_nat(&self) -> Option<u64> {
        let mut n = 0;
        let mut cur = self;
        loop {
            let Observation::Wrap(inner) = cur else { return None };
            match &**inner {
                Observation::TagL(u) if **u == Observation::Unit => return Some(n),
                Observation::TagR(next) => {
                    n += 1;
                    cur = next;
                }
                _ => return None,
            }
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Observation::Unit => 1,
            Observation::Pair(a, b) => 1 + a.size() + b.size(),
            Observation::TagL(a) | Observation::TagR(a) | Observation::Wrap(a) => 1 + a.size(),
        }
    }
}

impl fmt::Display for Observation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Observation::Unit => write!(f, "unit"),
            Observation::Pair(a, b) => write!(f, "pair({a}, {b})"),
            Observation::TagL(a) => write!(f, "tagL({a})"),
            Observation::TagR(a) => write!(f, "tagR({a})"),
            Observation::Wrap(a) => write!(f, "wrap({a})"),
        }
    }
}

/// Closed types built from `1`, `0`, products, sums and recursive types,
/// with no function types anywhere.
pub fn is_observable(t: &Type) -> bool {
    fn go(t: &Type, depth: usize) -> bool {
        match t {
            Type::Var(i, _) => *i < depth,
            Type::Fun(..) => false,
            Type::App(a, b) | Type::Prod(a, b) | Type::Sum(a, b) => go(a, depth) && go(b, depth),
            Type::Lam(_, _, b) => go(b, depth + 1),
            Type::Mu(b) => go(b, depth),
            Type::Zero | Type::One => true,
        }
    }
    go(&normalize_type(t), 0)
}

fn not_observable(t: &Type) -> OracleError {
    OracleError::NotObservable(t.to_string())
}

/// Unfolds `mu F σ̄` once.
fn unfold(t: &Type) -> Option<Type> {
    let (head, args) = t.spine();
    let Type::Mu(body) = head else { return None };
    Some(normalize_type(&Type::apps(
        Type::app((**body).clone(), head.clone()),
        args.into_iter().cloned(),
    )))
}

/// Observes a semantic value at type `t`.
pub fn observe(v: &SemValue, t: &Type) -> R<Observation> {
    if !is_observable(t) {
        return Err(not_observable(t));
    }
    observe_sem(v, &normalize_type(t))
}

fn observe_sem(v: &SemValue, t: &Type) -> R<Observation> {
    let bad = || OracleError::IllShapedValue(format!("{v:?} at type `{t}`"));
    Ok(match (t, v) {
        (Type::One, SemValue::Unit) => Observation::Unit,
        (Type::Prod(a, b), SemValue::Pair(x, y)) => {
            Observation::Pair(Box::new(observe_sem(x, a)?), Box::new(observe_sem(y, b)?))
        }
        (Type::Sum(a, _), SemValue::TagL(x)) => Observation::TagL(Box::new(observe_sem(x, a)?)),
        (Type::Sum(_, b), SemValue::TagR(x)) => Observation::TagR(Box::new(observe_sem(x, b)?)),
        (_, SemValue::Wrap(x)) => Observation::Wrap(Box::new(observe_sem(x, &unfold(t).ok_or_else(bad)?)?)),
        _ => return Err(bad()),
    })
}

/// Evaluates `m` with the small-step machine and observes the resulting
/// value at type `t`. Lazy components (pairs built by `fork`) are
/// evaluated as they are observed.
pub fn observe_term(m: &Term, t: &Type, fuel: usize) -> R<Observation> {
    if !is_observable(t) {
        return Err(not_observable(t));
    }
    observe_syn(m, &normalize_type(t), fuel)
}

fn observe_syn(m: &Term, t: &Type, fuel: usize) -> R<Observation> {
    let v = evaluate(m, fuel, false)?.value;
    let bad = || OracleError::IllShapedValue(format!("`{v}` at type `{t}`"));
    let s = prim_spine(&v).ok_or_else(bad)?;
    let sub = |w: &Arc<Term>, ty: &Type| observe_syn(w, ty, fuel).map(Box::new);
    Ok(match (t, s.prim, s.arg) {
        (Type::One, Prim::Tt, None) => Observation::Unit,
        (Type::Prod(a, b), Prim::Fork(l, r), Some(w)) => {
            let side = |c: &Arc<Term>| {
                Arc::new(Term::app(
                    Term::ty_apps((**c).clone(), s.types.iter().map(|t| (*t).clone())),
                    (**w).clone(),
                ))
            };
            Observation::Pair(sub(&side(l), a)?, sub(&side(r), b)?)
        }
        (Type::Sum(a, _), Prim::Inl, Some(w)) => Observation::TagL(sub(w, a)?),
        (Type::Sum(_, b), Prim::Inr, Some(w)) => Observation::TagR(sub(w, b)?),
        (_, Prim::In, Some(w)) => Observation::Wrap(sub(w, &unfold(t).ok_or_else(bad)?)?),
        _ => return Err(bad()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::denote;
    use crate::surface::{nat_literal, nat_type};

    #[test]
    fn nat_three() {
        let obs = observe(&denote(&nat_literal(3)).unwrap(), &nat_type()).unwrap();
        assert_eq!(obs.to_string(), "wrap(tagR(wrap(tagR(wrap(tagR(wrap(tagL(unit))))))))");
        assert_eq!(obs.as_nat(), Some(3));
        assert_eq!(observe_term(&nat_literal(3), &nat_type(), 1000).unwrap(), obs);
    }

    #[test]
    fn unit() {
        assert_eq!(observe(&SemValue::Unit, &Type::One).unwrap(), Observation::Unit);
    }

    #[test]
    fn functions_are_not_observable() {
        let t = Type::fun(Type::One, Type::One);
        assert!(matches!(
            observe(&SemValue::Unit, &t),
            Err(OracleError::NotObservable(_))
        ));
        assert!(!is_observable(&Type::var(0, "a")));
        assert!(is_observable(&nat_type()));
    }
}
