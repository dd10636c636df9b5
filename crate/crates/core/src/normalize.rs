//! Normalization of types and the equivalence used by conversion.
//!
//! The rewrite rules, read left to right:
//!
//! ```text
//! (\X. t) s        ~>  t[s/X]
//! (t1 * t2) s      ~>  t1 s * t2 s        (same for +)
//! 1 s ~> 1,   0 s ~> 0
//! \X. t X          ~>  t                  (X not free in t)
//! \X. t1 * t2      ~>  (\X. t1) * (\X. t2)  (same for +)
//! \X. 1 ~> 1,  \X. 0 ~> 0
//! ```
//!
//! The last two lines are consequences of the others under η-expansion;
//! orienting them this way makes normal forms unique, so that for example
//! `\X. 1 + X` and `1 + \X. X` normalize to the same type.
//!
//! Strategy is full normal order with a fuel bound; congruence applies
//! under every constructor including binders.

use std::sync::Arc;

use thiserror::Error;

use crate::syntax::{instantiate_type, shift, Prim, PrimAnn, Scheme, Term, Type};

pub const DEFAULT_FUEL: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("type normalization ran out of fuel on `{0}`")]
pub struct NormalizeError(pub String);

struct Normalizer {
    fuel: usize,
    start: Type,
}

impl Normalizer {
    fn tick(&mut self) -> Result<(), NormalizeError> {
        if self.fuel == 0 {
            return Err(NormalizeError(self.start.to_string()));
        }
        self.fuel -= 1;
        Ok(())
    }

    fn nf(&mut self, t: &Type) -> Result<Type, NormalizeError> {
        Ok(match t {
            Type::Var(..) | Type::Zero | Type::One => t.clone(),
            Type::App(f, a) => {
                let h = self.nf(f)?;
                match h {
                    Type::Lam(_, _, body) => {
                        self.tick()?;
                        self.nf(&instantiate_type(&body, a))?
                    }
                    Type::Prod(l, r) => {
                        self.tick()?;
                        let l = self.nf(&Type::App(l, a.clone()))?;
                        let r = self.nf(&Type::App(r, a.clone()))?;
                        Type::prod(l, r)
                    }
                    Type::Sum(l, r) => {
                        self.tick()?;
                        let l = self.nf(&Type::App(l, a.clone()))?;
                        let r = self.nf(&Type::App(r, a.clone()))?;
                        Type::sum(l, r)
                    }
                    Type::One | Type::Zero => {
                        self.tick()?;
                        h
                    }
                    h => Type::app(h, self.nf(a)?),
                }
            }
            Type::Lam(n, k, b) => {
                let body = self.nf(b)?;
                self.lam(n, k, body)?
            }
            Type::Mu(b) => Type::mu(self.nf(b)?),
            Type::Fun(a, b) => Type::fun(self.nf(a)?, self.nf(b)?),
            Type::Prod(a, b) => Type::prod(self.nf(a)?, self.nf(b)?),
            Type::Sum(a, b) => Type::sum(self.nf(a)?, self.nf(b)?),
        })
    }

    /// Rebuilds `\X. body` for a body already in normal form.
    fn lam(&mut self, n: &crate::syntax::Name, k: &crate::syntax::Kind, body: Type) -> Result<Type, NormalizeError> {
        match body {
            Type::App(ref g, ref x) if matches!(**x, Type::Var(0, _)) && !g.has_free(0) => {
                self.tick()?;
                Ok(shift(g, -1))
            }
            Type::Prod(l, r) => {
                self.tick()?;
                let l = self.lam(n, k, (*l).clone())?;
                let r = self.lam(n, k, (*r).clone())?;
                Ok(Type::prod(l, r))
            }
            Type::Sum(l, r) => {
                self.tick()?;
                let l = self.lam(n, k, (*l).clone())?;
                let r = self.lam(n, k, (*r).clone())?;
                Ok(Type::sum(l, r))
            }
            Type::One | Type::Zero => {
                self.tick()?;
                Ok(body)
            }
            body => Ok(Type::Lam(n.clone(), k.clone(), Arc::new(body))),
        }
    }
}

pub fn try_normalize(t: &Type, fuel: usize) -> Result<Type, NormalizeError> {
    Normalizer { fuel, start: t.clone() }.nf(t)
}

/// The normal form of a kinded type.
///
/// # Panics
///
/// Panics if normalization exceeds [`DEFAULT_FUEL`] rewrite steps, which
/// cannot happen for well-kinded input.
pub fn normalize_type(t: &Type) -> Type {
    match try_normalize(t, DEFAULT_FUEL) {
        Ok(t) => t,
        Err(e) => panic!("{e}"),
    }
}

pub fn normalize_scheme(s: &Scheme) -> Scheme {
    Scheme {
        binders: s.binders.clone(),
        body: normalize_type(&s.body),
    }
}

pub fn types_equivalent(a: &Scheme, b: &Scheme) -> bool {
    a.binders.len() == b.binders.len()
        && a.binders.iter().zip(&b.binders).all(|(x, y)| x.1 == y.1)
        && normalize_type(&a.body) == normalize_type(&b.body)
}

/// Normalizes every type occurring in a term.
pub fn normalize_term_types(m: &Term) -> Term {
    let n = |t: &Arc<Term>| Arc::new(normalize_term_types(t));
    match m {
        Term::Var(..) => m.clone(),
        Term::App(f, a) => Term::App(n(f), n(a)),
        Term::Lam(x, p, b) => Term::Lam(x.clone(), p.as_ref().map(normalize_type), n(b)),
        Term::Let(x, s, a, b) => Term::Let(x.clone(), normalize_scheme(s), n(a), n(b)),
        Term::TyLam(x, k, b) => Term::TyLam(x.clone(), k.clone(), n(b)),
        Term::TyApp(f, t) => Term::TyApp(n(f), normalize_type(t)),
        Term::Ascribe(a, s) => Term::Ascribe(n(a), normalize_scheme(s)),
        Term::Prim(p, ann) => {
            let p = match p {
                Prim::Map(t, c) => Prim::Map(normalize_type(t), n(c)),
                Prim::Fold(t, c) => Prim::Fold(normalize_type(t), n(c)),
                Prim::Fork(a, b) => Prim::Fork(n(a), n(b)),
                Prim::Join(a, b) => Prim::Join(n(a), n(b)),
                other => other.clone(),
            };
            let ann = ann
                .as_ref()
                .map(|a| PrimAnn::new(a.kind.clone(), a.types.iter().map(normalize_type).collect()));
            Term::Prim(p, ann)
        }
    }
}

pub fn is_normal(t: &Type) -> bool {
    redex_positions(t).is_empty()
}

/// Path from the root to a subterm: each step picks child 0 or 1.
pub type Path = Vec<u8>;

fn children(t: &Type) -> Vec<&Arc<Type>> {
    match t {
        Type::App(a, b) | Type::Fun(a, b) | Type::Prod(a, b) | Type::Sum(a, b) => vec![a, b],
        Type::Lam(_, _, b) | Type::Mu(b) => vec![b],
        Type::Var(..) | Type::Zero | Type::One => vec![],
    }
}

/// Contracts the redex at the root of `t`, if there is one.
pub fn contract(t: &Type) -> Option<Type> {
    match t {
        Type::App(f, a) => match &**f {
            Type::Lam(_, _, body) => Some(instantiate_type(body, a)),
            Type::Prod(l, r) => Some(Type::Prod(
                Arc::new(Type::App(l.clone(), a.clone())),
                Arc::new(Type::App(r.clone(), a.clone())),
            )),
            Type::Sum(l, r) => Some(Type::Sum(
                Arc::new(Type::App(l.clone(), a.clone())),
                Arc::new(Type::App(r.clone(), a.clone())),
            )),
            Type::One => Some(Type::One),
            Type::Zero => Some(Type::Zero),
            _ => None,
        },
        Type::Lam(n, k, body) => match &**body {
            Type::App(g, x) if matches!(**x, Type::Var(0, _)) && !g.has_free(0) => Some(shift(g, -1)),
            Type::Prod(l, r) => Some(Type::Prod(
                Arc::new(Type::Lam(n.clone(), k.clone(), l.clone())),
                Arc::new(Type::Lam(n.clone(), k.clone(), r.clone())),
            )),
            Type::Sum(l, r) => Some(Type::Sum(
                Arc::new(Type::Lam(n.clone(), k.clone(), l.clone())),
                Arc::new(Type::Lam(n.clone(), k.clone(), r.clone())),
            )),
            Type::One => Some(Type::One),
            Type::Zero => Some(Type::Zero),
            _ => None,
        },
        _ => None,
    }
}

/// Every position holding a redex, in prefix order.
pub fn redex_positions(t: &Type) -> Vec<Path> {
    fn go(t: &Type, path: &mut Path, out: &mut Vec<Path>) {
        if contract(t).is_some() {
            out.push(path.clone());
        }
        for (i, c) in children(t).into_iter().enumerate() {
            path.push(i as u8);
            go(c, path, out);
            path.pop();
        }
    }
    let mut out = Vec::new();
    go(t, &mut Vec::new(), &mut out);
    out
}

/// Contracts the redex at `path`.
pub fn rewrite_at(t: &Type, path: &[u8]) -> Option<Type> {
    let Some((&first, rest)) = path.split_first() else {
        return contract(t);
    };
    let sub = |c: &Arc<Type>| rewrite_at(c, rest).map(Arc::new);
    Some(match (t, first) {
        (Type::App(a, b), 0) => Type::App(sub(a)?, b.clone()),
        (Type::App(a, b), 1) => Type::App(a.clone(), sub(b)?),
        (Type::Fun(a, b), 0) => Type::Fun(sub(a)?, b.clone()),
        (Type::Fun(a, b), 1) => Type::Fun(a.clone(), sub(b)?),
        (Type::Prod(a, b), 0) => Type::Prod(sub(a)?, b.clone()),
        (Type::Prod(a, b), 1) => Type::Prod(a.clone(), sub(b)?),
        (Type::Sum(a, b), 0) => Type::Sum(sub(a)?, b.clone()),
        (Type::Sum(a, b), 1) => Type::Sum(a.clone(), sub(b)?),
        (Type::Lam(n, k, b), 0) => Type::Lam(n.clone(), k.clone(), sub(b)?),
        (Type::Mu(b), 0) => Type::Mu(sub(b)?),
        _ => return None,
    })
}
