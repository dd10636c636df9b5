//! A big-step definitional interpreter, independent of [`crate::reduce`].
//!
//! Terms denote [`SemValue`]s under an environment of semantic values for
//! term variables and closed types for type variables. `fold` recurses in
//! the host language over [`SemValue::Wrap`] spines and `map` is
//! interpreted directly over semantic values.

mod observe;

use std::fmt;
use std::rc::Rc;
use std::sync::Arc;

use thiserror::Error;

use crate::normalize::normalize_type;
use crate::reduce::EvalError;
use crate::syntax::{close_type, instantiate_type, shift, Kind, Prim, PrimAnn, Term, Type};

pub use observe::{is_observable, observe, observe_term, Observation};

pub const DEFAULT_FUEL: usize = crate::reduce::DEFAULT_FUEL;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("oracle ran out of fuel")]
    OutOfFuel,
    #[error("ill-shaped value: {0}")]
    IllShapedValue(String),
    #[error("type `{0}` is not observable")]
    NotObservable(String),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

fn ill(msg: impl Into<String>) -> OracleError {
    OracleError::IllShapedValue(msg.into())
}

type R<T> = Result<T, OracleError>;

/// Semantic values.
#[derive(Clone)]
pub enum SemValue {
    Fun(Closure),
    Poly(Closure),
    Pair(Rc<SemValue>, Rc<SemValue>),
    TagL(Rc<SemValue>),
    TagR(Rc<SemValue>),
    Unit,
    Wrap(Rc<SemValue>),
    Prim(Rc<SemPrim>),
}

#[derive(Clone)]
pub struct Closure {
    env: Env,
    body: Arc<Term>,
}

/// A primitive waiting for arguments.
#[derive(Clone)]
pub struct SemPrim {
    pub op: SemOp,
    pub ann: PrimAnn,
    pub types: Vec<Type>,
}

#[derive(Clone)]
pub enum SemOp {
    In,
    Unin,
    Map(Type, Rc<SemValue>),
    Fold(Type, Rc<SemValue>),
    Fst,
    Snd,
    Fork(Rc<SemValue>, Rc<SemValue>),
    Inl,
    Inr,
    Join(Rc<SemValue>, Rc<SemValue>),
    Tt,
    Absurd,
}

impl SemPrim {
    fn arity(&self) -> usize {
        match (&self.op, &self.ann.kind) {
            (SemOp::Map(..), Kind::Arrow(_, k2)) => k2.arity(),
            _ => self.ann.kind.arity(),
        }
    }
}

impl fmt::Debug for SemValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SemValue::Fun(_) => write!(f, "<fun>"),
            SemValue::Poly(_) => write!(f, "<poly>"),
            SemValue::Pair(a, b) => write!(f, "pair({a:?}, {b:?})"),
            SemValue::TagL(a) => write!(f, "tagL({a:?})"),
            SemValue::TagR(a) => write!(f, "tagR({a:?})"),
            SemValue::Unit => write!(f, "unit"),
            SemValue::Wrap(a) => write!(f, "wrap({a:?})"),
            SemValue::Prim(p) => write!(f, "<{} with {} type args>", op_name(&p.op), p.types.len()),
        }
    }
}

fn op_name(op: &SemOp) -> &'static str {
    match op {
        SemOp::In => "in",
        SemOp::Unin => "unin",
        SemOp::Map(..) => "map",
        SemOp::Fold(..) => "fold",
        SemOp::Fst => "fst",
        SemOp::Snd => "snd",
        SemOp::Fork(..) => "fork",
        SemOp::Inl => "inl",
        SemOp::Inr => "inr",
        SemOp::Join(..) => "join",
        SemOp::Tt => "tt",
        SemOp::Absurd => "absurd",
    }
}

struct Cons<T> {
    head: T,
    tail: Option<Rc<Cons<T>>>,
}

/// Term variables map to semantic values, type variables to closed types.
#[derive(Clone, Default)]
pub struct Env {
    terms: Option<Rc<Cons<Rc<SemValue>>>>,
    /// Innermost first.
    types: Rc<Vec<Type>>,
}

impl Env {
    pub fn new() -> Env {
        Env::default()
    }

    pub fn push_term(&self, v: Rc<SemValue>) -> Env {
        Env {
            terms: Some(Rc::new(Cons {
                head: v,
                tail: self.terms.clone(),
            })),
            types: self.types.clone(),
        }
    }

    pub fn push_type(&self, t: Type) -> Env {
        let mut types = Vec::with_capacity(self.types.len() + 1);
        types.push(t);
        types.extend(self.types.iter().cloned());
        Env {
            terms: self.terms.clone(),
            types: Rc::new(types),
        }
    }

    fn term(&self, i: usize) -> Option<Rc<SemValue>> {
        let mut cur = self.terms.as_ref()?;
        for _ in 0..i {
            cur = cur.tail.as_ref()?;
        }
        Some(cur.head.clone())
    }

    fn close(&self, t: &Type) -> Type {
        close_type(t, &self.types)
    }
}

/// Denotes a closed term.
pub fn denote(m: &Term) -> R<Rc<SemValue>> {
    denote_with_fuel(m, DEFAULT_FUEL)
}

pub fn denote_with_fuel(m: &Term, fuel: usize) -> R<Rc<SemValue>> {
    Interp { fuel }.denote(m, &Env::new())
}

/// Denotes `m` under `env`.
pub fn denote_in(m: &Term, env: &Env, fuel: usize) -> R<Rc<SemValue>> {
    Interp { fuel }.denote(m, env)
}

struct Interp {
    fuel: usize,
}

impl Interp {
    fn tick(&mut self) -> R<()> {
        if self.fuel == 0 {
            return Err(OracleError::OutOfFuel);
        }
        self.fuel -= 1;
        Ok(())
    }

    fn denote(&mut self, m: &Term, env: &Env) -> R<Rc<SemValue>> {
        self.tick()?;
        match m {
            Term::Var(i, n) => env.term(*i).ok_or_else(|| ill(format!("unbound variable {n}"))),
            Term::App(f, a) => {
                let fv = self.denote(f, env)?;
                let av = self.denote(a, env)?;
                self.apply(&fv, av)
            }
            Term::Lam(_, _, body) => Ok(Rc::new(SemValue::Fun(Closure {
                env: env.clone(),
                body: body.clone(),
            }))),
            Term::TyLam(_, _, body) => Ok(Rc::new(SemValue::Poly(Closure {
                env: env.clone(),
                body: body.clone(),
            }))),
            Term::Let(_, _, bound, body) => {
                let v = self.denote(bound, env)?;
                self.denote(body, &env.push_term(v))
            }
            Term::TyApp(f, t) => {
                let fv = self.denote(f, env)?;
                self.apply_type(&fv, env.close(t))
            }
            Term::Ascribe(inner, _) => self.denote(inner, env),
            Term::Prim(_, None) => Err(ill("primitive without annotation")),
            Term::Prim(p, Some(ann)) => {
                let mut sub = |c: &Arc<Term>| self.denote(c, env);
                let op = match p {
                    Prim::In => SemOp::In,
                    Prim::Unin => SemOp::Unin,
                    Prim::Map(t, c) => SemOp::Map(env.close(t), sub(c)?),
                    Prim::Fold(t, c) => SemOp::Fold(env.close(t), sub(c)?),
                    Prim::Fst => SemOp::Fst,
                    Prim::Snd => SemOp::Snd,
                    Prim::Fork(a, b) => SemOp::Fork(sub(a)?, sub(b)?),
                    Prim::Inl => SemOp::Inl,
                    Prim::Inr => SemOp::Inr,
                    Prim::Join(a, b) => SemOp::Join(sub(a)?, sub(b)?),
                    Prim::Tt => SemOp::Tt,
                    Prim::Absurd => SemOp::Absurd,
                };
                let ann = PrimAnn::new(ann.kind.clone(), ann.types.iter().map(|t| env.close(t)).collect());
                Ok(prim_value(SemPrim {
                    op,
                    ann,
                    types: Vec::new(),
                }))
            }
        }
    }

    fn apply_type(&mut self, v: &SemValue, t: Type) -> R<Rc<SemValue>> {
        match v {
            SemValue::Poly(c) => self.denote(&c.body, &c.env.push_type(t)),
            SemValue::Prim(p) if p.types.len() < p.arity() => {
                let mut p2 = (**p).clone();
                p2.types.push(t);
                Ok(prim_value(p2))
            }
            other => Err(ill(format!("type application of {other:?}"))),
        }
    }

    fn apply_types(&mut self, v: &Rc<SemValue>, ts: &[Type]) -> R<Rc<SemValue>> {
        let mut cur = v.clone();
        for t in ts {
            cur = self.apply_type(&cur, t.clone())?;
        }
        Ok(cur)
    }

    fn apply(&mut self, f: &SemValue, a: Rc<SemValue>) -> R<Rc<SemValue>> {
        self.tick()?;
        match f {
            SemValue::Fun(c) => self.denote(&c.body, &c.env.push_term(a)),
            SemValue::Prim(p) if p.types.len() == p.arity() => self.apply_prim(p, a),
            other => Err(ill(format!("application of {other:?}"))),
        }
    }

    fn apply_prim(&mut self, p: &Rc<SemPrim>, a: Rc<SemValue>) -> R<Rc<SemValue>> {
        let ts = &p.types;
        match (&p.op, &*a) {
            (SemOp::In, _) => Ok(Rc::new(SemValue::Wrap(a))),
            (SemOp::Inl, _) => Ok(Rc::new(SemValue::TagL(a))),
            (SemOp::Inr, _) => Ok(Rc::new(SemValue::TagR(a))),
            (SemOp::Unin, SemValue::Wrap(w)) => Ok(w.clone()),
            (SemOp::Fst, SemValue::Pair(l, _)) => Ok(l.clone()),
            (SemOp::Snd, SemValue::Pair(_, r)) => Ok(r.clone()),
            (SemOp::Fork(f, g), _) => {
                let f = self.apply_types(f, ts)?;
                let g = self.apply_types(g, ts)?;
                Ok(Rc::new(SemValue::Pair(self.apply(&f, a.clone())?, self.apply(&g, a)?)))
            }
            (SemOp::Join(f, _), SemValue::TagL(x)) => {
                let f = self.apply_types(f, ts)?;
                self.apply(&f, x.clone())
            }
            (SemOp::Join(_, g), SemValue::TagR(x)) => {
                let g = self.apply_types(g, ts)?;
                self.apply(&g, x.clone())
            }
            (SemOp::Fold(tau, alg), SemValue::Wrap(w)) => {
                let k = p.ann.kind.clone();
                let me = Rc::new(SemValue::Prim(Rc::new(SemPrim {
                    op: p.op.clone(),
                    ann: p.ann.clone(),
                    types: Vec::new(),
                })));
                let carrier = p.ann.types[0].clone();
                let mapped = self.map(tau, &k, &Type::mu(tau.clone()), &carrier, &me, ts, w.clone())?;
                let alg = self.apply_types(alg, ts)?;
                self.apply(&alg, mapped)
            }
            (SemOp::Map(tau, f), _) => {
                let Kind::Arrow(k1, _) = &p.ann.kind else {
                    return Err(ill("map annotation without arrow kind"));
                };
                self.map(tau, k1, &p.ann.types[0], &p.ann.types[1], f, ts, a)
            }
            (op, v) => Err(ill(format!("{} applied to {v:?}", op_name(op)))),
        }
    }

    /// Interprets `map[tau](f) rho` at `v`, where `f : t1 ->k1 t2`.
    #[allow(clippy::too_many_arguments)]
    fn map(
        &mut self,
        tau: &Type,
        k1: &Kind,
        t1: &Type,
        t2: &Type,
        f: &Rc<SemValue>,
        rho: &[Type],
        v: Rc<SemValue>,
    ) -> R<Rc<SemValue>> {
        self.tick()?;
        let g = normalize_type(&Type::apps(
            Type::app(shift(tau, 1), Type::var(0, "X")),
            rho.iter().map(|r| shift(r, 1)),
        ));
        if !g.has_free(0) {
            return Ok(v);
        }
        let sub = |h: &Type| {
            map_value(
                Type::Lam("X".into(), k1.clone(), Arc::new(h.clone())),
                Kind::arrow(k1.clone(), Kind::Star),
                t1,
                t2,
                f,
            )
        };
        let (head, sigma) = g.spine();
        if let Type::Var(0, _) = head {
            let mut cur = v;
            for (i, s) in sigma.iter().enumerate() {
                if !s.has_free(0) {
                    continue;
                }
                let j = k1.domains()[i].clone();
                let args = sigma.iter().enumerate().map(|(l, s2)| {
                    if l < i {
                        instantiate_type(s2, t2)
                    } else if l == i {
                        Type::var(0, "Y")
                    } else {
                        instantiate_type(s2, t1)
                    }
                });
                let outer = Type::Lam("Y".into(), j.clone(), Arc::new(Type::apps(t1.clone(), args)));
                let inner = map_value(
                    Type::Lam("X".into(), k1.clone(), Arc::new((*s).clone())),
                    Kind::arrow(k1.clone(), j.clone()),
                    t1,
                    t2,
                    f,
                );
                cur = self.map(
                    &outer,
                    &j,
                    &instantiate_type(s, t1),
                    &instantiate_type(s, t2),
                    &inner,
                    &[],
                    cur,
                )?;
            }
            let lowered: Vec<Type> = sigma.iter().map(|s| instantiate_type(s, t2)).collect();
            let fv = self.apply_types(f, &lowered)?;
            return self.apply(&fv, cur);
        }
        let again = |me: &mut Self, h: &Type, w: &Rc<SemValue>| {
            me.map(
                &Type::Lam("X".into(), k1.clone(), Arc::new(h.clone())),
                k1,
                t1,
                t2,
                f,
                &[],
                w.clone(),
            )
        };
        match (&g, head, &*v) {
            (Type::Prod(a, b), _, SemValue::Pair(x, y)) => {
                let x = again(self, a, x)?;
                let y = again(self, b, y)?;
                Ok(Rc::new(SemValue::Pair(x, y)))
            }
            (Type::Sum(a, _), _, SemValue::TagL(x)) => Ok(Rc::new(SemValue::TagL(again(self, a, x)?))),
            (Type::Sum(_, b), _, SemValue::TagR(x)) => Ok(Rc::new(SemValue::TagR(again(self, b, x)?))),
            (_, Type::Mu(body), SemValue::Wrap(w)) => {
                let unrolled = normalize_type(&Type::apps(
                    Type::app((**body).clone(), head.clone()),
                    sigma.iter().map(|s| (*s).clone()),
                ));
                Ok(Rc::new(SemValue::Wrap(again(self, &unrolled, w)?)))
            }
            (Type::Fun(a, b), _, SemValue::Fun(_) | SemValue::Prim(_)) if !a.has_free(0) => {
                let env = Env::new().push_term(sub(b)).push_term(v.clone());
                let body = Term::app(Term::var(2, "g"), Term::app(Term::var(1, "h"), Term::var(0, "x")));
                Ok(Rc::new(SemValue::Fun(Closure {
                    env,
                    body: Arc::new(body),
                })))
            }
            _ => Err(ill(format!("map at `{g}` over {v:?}"))),
        }
    }
}

fn prim_value(p: SemPrim) -> Rc<SemValue> {
    if matches!(p.op, SemOp::Tt) && p.types.len() == p.arity() {
        return Rc::new(SemValue::Unit);
    }
    Rc::new(SemValue::Prim(Rc::new(p)))
}

fn map_value(index: Type, kind: Kind, t1: &Type, t2: &Type, f: &Rc<SemValue>) -> Rc<SemValue> {
    prim_value(SemPrim {
        op: SemOp::Map(index, f.clone()),
        ann: PrimAnn::new(kind, vec![t1.clone(), t2.clone()]),
        types: Vec::new(),
    })
}
