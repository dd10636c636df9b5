//! Call-by-value small-step reduction on closed, elaborated terms.
//!
//! Primitives take as many type arguments as the arity of their
//! annotation kind before their term argument. A primitive spine is a
//! value while it is waiting for arguments, and also once it holds its
//! term argument if it is a constructor (`in`, `inl`, `inr`, `fork`,
//! `absurd`). Reduction of `map` is type directed: the index applied to a
//! fresh variable and the type arguments is normalized and the shape of
//! the result decides the rule.

use std::sync::Arc;

use thiserror::Error;

use crate::normalize::normalize_type;
use crate::syntax::{
    instantiate_term, instantiate_type, instantiate_type_in_term, shift, Arg, Kind, Prim, PrimAnn, Term, Type,
};

pub const DEFAULT_FUEL: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("out of fuel after {steps} steps")]
    OutOfFuel { steps: usize, last: Box<Term> },
    #[error("stuck: {reason} at `{redex}`")]
    StuckTerm { reason: String, redex: Box<Term> },
}

fn stuck(reason: &str, redex: &Term) -> EvalError {
    EvalError::StuckTerm {
        reason: reason.into(),
        redex: Box::new(redex.clone()),
    }
}

/// Number of type arguments a primitive takes before its term argument.
pub fn prim_arity(p: &Prim, ann: &PrimAnn) -> usize {
    match (p, &ann.kind) {
        (Prim::Map(..), Kind::Arrow(_, k2)) => k2.arity(),
        _ => ann.kind.arity(),
    }
}

/// Constructors: applying them to their term argument yields a value.
pub fn is_constructor(p: &Prim) -> bool {
    matches!(p, Prim::In | Prim::Inl | Prim::Inr | Prim::Fork(..) | Prim::Absurd)
}

/// A primitive applied to some arguments, with its components.
#[derive(Clone, Debug)]
pub struct PrimSpine<'a> {
    pub prim: &'a Prim,
    pub ann: &'a PrimAnn,
    pub types: Vec<&'a Type>,
    pub arg: Option<&'a Arc<Term>>,
}

/// Splits `m` as `p τ1 .. τn [N]` when it has that shape.
pub fn prim_spine(m: &Term) -> Option<PrimSpine<'_>> {
    let (head, args) = m.spine();
    let Term::Prim(prim, Some(ann)) = head else { return None };
    let mut types = Vec::new();
    let mut arg = None;
    for a in args {
        match a {
            Arg::Ty(t) if arg.is_none() => types.push(t),
            Arg::Tm(t) if arg.is_none() => arg = Some(t),
            _ => return None,
        }
    }
    Some(PrimSpine { prim, ann, types, arg })
}

/// Recognizes values.
pub fn is_value(m: &Term) -> bool {
    match m {
        Term::Lam(..) | Term::TyLam(..) => true,
        Term::Var(..) | Term::Let(..) | Term::Ascribe(..) => false,
        _ => match prim_spine(m) {
            None => false,
            Some(s) => {
                let n = prim_arity(s.prim, s.ann);
                s.prim.components().iter().all(|c| is_value(c))
                    && s.types.len() <= n
                    && match s.arg {
                        None => true,
                        Some(v) => s.types.len() == n && is_constructor(s.prim) && is_value(v),
                    }
            }
        },
    }
}

/// Outcome of looking for the next step.
enum Step {
    Value,
    Stepped(&'static str, Term),
}

type SR = Result<Step, EvalError>;

/// Performs one reduction step. Returns `None` on values.
pub fn step(m: &Term) -> Result<Option<(&'static str, Term)>, EvalError> {
    Ok(match go(m)? {
        Step::Value => None,
        Step::Stepped(tag, n) => Some((tag, n)),
    })
}

fn go(m: &Term) -> SR {
    match m {
        Term::Lam(..) | Term::TyLam(..) => Ok(Step::Value),
        Term::Var(..) => Err(stuck("free variable", m)),
        Term::Ascribe(inner, _) => Ok(Step::Stepped("asc", (**inner).clone())),
        Term::Let(x, s, bound, body) => match go(bound)? {
            Step::Stepped(tag, b) => Ok(Step::Stepped(
                tag,
                Term::Let(x.clone(), s.clone(), Arc::new(b), body.clone()),
            )),
            Step::Value => Ok(Step::Stepped("let", instantiate_term(body, bound))),
        },
        Term::TyApp(f, t) => match go(f)? {
            Step::Stepped(tag, f2) => Ok(Step::Stepped(tag, Term::TyApp(Arc::new(f2), t.clone()))),
            Step::Value => contract_ty_app(m, f, t),
        },
        Term::App(f, a) => match go(f)? {
            Step::Stepped(tag, f2) => Ok(Step::Stepped(tag, Term::App(Arc::new(f2), a.clone()))),
            Step::Value => match go(a)? {
                Step::Stepped(tag, a2) => Ok(Step::Stepped(tag, Term::App(f.clone(), Arc::new(a2)))),
                Step::Value => contract_app(m, f, a),
            },
        },
        Term::Prim(_, None) => Err(stuck("primitive without annotation", m)),
        Term::Prim(p, ann) => {
            let comps = p.components();
            for (i, c) in comps.iter().enumerate() {
                if let Step::Stepped(tag, c2) = go(c)? {
                    let mut new: Vec<Arc<Term>> = comps.iter().map(|x| (*x).clone()).collect();
                    new[i] = Arc::new(c2);
                    return Ok(Step::Stepped(
                        tag,
                        Term::Prim(crate::typing::rebuild(p, new), ann.clone()),
                    ));
                }
            }
            Ok(Step::Value)
        }
    }
}

fn contract_ty_app(m: &Term, f: &Term, t: &Type) -> SR {
    if let Term::TyLam(_, _, body) = f {
        return Ok(Step::Stepped("type-beta", instantiate_type_in_term(body, t)));
    }
    match prim_spine(f) {
        Some(s) if s.arg.is_none() && s.types.len() < prim_arity(s.prim, s.ann) => Ok(Step::Value),
        _ => Err(stuck("type application of a non-polymorphic value", m)),
    }
}

fn contract_app(m: &Term, f: &Term, a: &Arc<Term>) -> SR {
    if let Term::Lam(_, _, body) = f {
        return Ok(Step::Stepped("beta", instantiate_term(body, a)));
    }
    let Some(s) = prim_spine(f) else {
        return Err(stuck("application of a non-function", m));
    };
    if s.arg.is_some() || s.types.len() != prim_arity(s.prim, s.ann) {
        return Err(stuck("primitive applied before all type arguments", m));
    }
    if is_constructor(s.prim) {
        return Ok(Step::Value);
    }
    let rho: Vec<Type> = s.types.iter().map(|t| (*t).clone()).collect();
    let scrut = prim_spine(a);
    let result = match (s.prim, &scrut) {
        (Prim::Unin, Some(v)) if matches!(v.prim, Prim::In) => ("unin", (**v.arg.unwrap()).clone()),
        (Prim::Fst | Prim::Snd, Some(v)) if matches!(v.prim, Prim::Fork(..)) => {
            let Prim::Fork(l, r) = v.prim else { unreachable!() };
            let (tag, side) = if matches!(s.prim, Prim::Fst) {
                ("fst", l)
            } else {
                ("snd", r)
            };
            (tag, Term::app(apply_types(side, &v.types), (**v.arg.unwrap()).clone()))
        }
        (Prim::Join(l, r), Some(v)) if matches!(v.prim, Prim::Inl | Prim::Inr) => {
            let (tag, side) = if matches!(v.prim, Prim::Inl) {
                ("join-inl", l)
            } else {
                ("join-inr", r)
            };
            (
                tag,
                Term::app(Term::ty_apps((**side).clone(), rho), (**v.arg.unwrap()).clone()),
            )
        }
        (Prim::Fold(tau, alg), Some(v)) if matches!(v.prim, Prim::In) => {
            let c = s.ann.types[0].clone();
            let k = s.ann.kind.clone();
            let map = Term::prim_ann(
                Prim::Map(tau.clone(), Arc::new(head_of(f))),
                PrimAnn::new(Kind::arrow(k.clone(), k), vec![Type::mu(tau.clone()), c]),
            );
            let inner = Term::app(Term::ty_apps(map, rho.clone()), (**v.arg.unwrap()).clone());
            ("fold", Term::app(Term::ty_apps((**alg).clone(), rho), inner))
        }
        (Prim::Map(tau, fun), _) => return map_step(m, tau, s.ann, fun, &rho, a),
        _ => return Err(stuck("no rule applies", m)),
    };
    Ok(Step::Stepped(result.0, result.1))
}

fn apply_types(m: &Term, types: &[&Type]) -> Term {
    Term::ty_apps(m.clone(), types.iter().map(|t| (*t).clone()))
}

fn head_of(m: &Term) -> Term {
    m.spine().0.clone()
}

fn map_prim(index: Type, k: Kind, t1: Type, t2: Type, f: Arc<Term>) -> Term {
    Term::prim_ann(Prim::Map(index, f), PrimAnn::new(k, vec![t1, t2]))
}

fn map_step(m: &Term, tau: &Type, ann: &PrimAnn, f: &Arc<Term>, rho: &[Type], v: &Arc<Term>) -> SR {
    let Kind::Arrow(k1, _) = &ann.kind else {
        return Err(stuck("map annotation without arrow kind", m));
    };
    let k1 = (**k1).clone();
    let (t1, t2) = (&ann.types[0], &ann.types[1]);
    let x = Type::var(0, "X");
    let g = normalize_type(&Type::apps(
        Type::app(shift(tau, 1), x),
        rho.iter().map(|r| shift(r, 1)),
    ));
    let at2 = |h: &Type| instantiate_type(h, t2);
    let at1 = |h: &Type| instantiate_type(h, t1);
    let mapped = |h: &Type| {
        map_prim(
            Type::Lam("X".into(), k1.clone(), Arc::new(h.clone())),
            Kind::arrow(k1.clone(), Kind::Star),
            t1.clone(),
            t2.clone(),
            f.clone(),
        )
    };
    let stepped = |tag, t| Ok(Step::Stepped(tag, t));

    if !g.has_free(0) {
        let tag = if g == Type::One { "map-unit" } else { "map-const" };
        return stepped(tag, (**v).clone());
    }
    let (head, sigma) = g.spine();
    if matches!(head, Type::Var(0, _)) {
        let lowered: Vec<Type> = sigma.iter().map(|s| at2(s)).collect();
        if sigma.iter().all(|s| !s.has_free(0)) {
            return stepped(
                "map-var",
                Term::app(Term::ty_apps((**f).clone(), lowered), (**v).clone()),
            );
        }
        let kinds = k1.domains();
        let mut cur = (**v).clone();
        for (i, s) in sigma.iter().enumerate() {
            if !s.has_free(0) {
                continue;
            }
            let j = kinds[i].clone();
            let mut args: Vec<Type> = Vec::new();
            for (l, s2) in sigma.iter().enumerate() {
                args.push(match l.cmp(&i) {
                    std::cmp::Ordering::Less => at2(s2),
                    std::cmp::Ordering::Equal => Type::var(0, "Y"),
                    std::cmp::Ordering::Greater => at1(s2),
                });
            }
            let outer_index = Type::Lam("Y".into(), j.clone(), Arc::new(Type::apps(t1.clone(), args)));
            let inner = map_prim(
                Type::Lam("X".into(), k1.clone(), Arc::new((*s).clone())),
                Kind::arrow(k1.clone(), j.clone()),
                t1.clone(),
                t2.clone(),
                f.clone(),
            );
            let outer = map_prim(outer_index, Kind::arrow(j, Kind::Star), at1(s), at2(s), Arc::new(inner));
            cur = Term::app(outer, cur);
        }
        return stepped("map-nest", Term::app(Term::ty_apps((**f).clone(), lowered), cur));
    }
    let scrut = prim_spine(v);
    match (&g, head, &scrut) {
        (Type::Prod(a, b), _, Some(sv)) if matches!(sv.prim, Prim::Fork(..)) && sv.arg.is_some() => {
            let Prim::Fork(v1, v2) = sv.prim else { unreachable!() };
            let s = normalize_type(&Type::apps(
                sv.ann.types[0].clone(),
                sv.types.iter().map(|t| (*t).clone()),
            ));
            let side = |h: &Type, vi: &Arc<Term>| {
                Arc::new(Term::Lam(
                    "x".into(),
                    Some(s.clone()),
                    Arc::new(Term::app(
                        mapped(h),
                        Term::app(apply_types(vi, &sv.types), Term::var(0, "x")),
                    )),
                ))
            };
            let fork = Term::prim_ann(
                Prim::Fork(side(a, v1), side(b, v2)),
                PrimAnn::new(Kind::Star, vec![s.clone(), at2(a), at2(b)]),
            );
            stepped("map-prod", Term::app(fork, (**sv.arg.unwrap()).clone()))
        }
        (Type::Sum(a, b), _, Some(sv)) if matches!(sv.prim, Prim::Inl | Prim::Inr) && sv.arg.is_some() => {
            let left = matches!(sv.prim, Prim::Inl);
            let inj = Term::prim_ann(sv.prim.clone(), PrimAnn::new(Kind::Star, vec![at2(a), at2(b)]));
            let inner = Term::app(mapped(if left { a } else { b }), (**sv.arg.unwrap()).clone());
            stepped(if left { "map-inl" } else { "map-inr" }, Term::app(inj, inner))
        }
        (_, Type::Mu(body), Some(sv)) if matches!(sv.prim, Prim::In) && sv.arg.is_some() => {
            let unrolled = normalize_type(&Type::apps(
                Type::app((**body).clone(), head.clone()),
                sigma.iter().map(|s| (*s).clone()),
            ));
            let inj = Term::ty_apps(
                Term::prim_ann(Prim::In, PrimAnn::new(sv.ann.kind.clone(), vec![at2(body)])),
                sigma.iter().map(|s| at2(s)),
            );
            stepped(
                "map-mu",
                Term::app(inj, Term::app(mapped(&unrolled), (**sv.arg.unwrap()).clone())),
            )
        }
        (Type::Fun(a, b), _, _) if !a.has_free(0) => {
            let body = Term::app(mapped(b), Term::app((**v).clone(), Term::var(0, "x")));
            stepped("map-fun", Term::Lam("x".into(), Some(shift(a, -1)), Arc::new(body)))
        }
        _ => Err(stuck("map over a value of unexpected shape", m)),
    }
}

/// One entry of a trace: the rule applied and the resulting term.
#[derive(Clone, Debug)]
pub struct TraceStep {
    pub rule: &'static str,
    pub term: Term,
}

#[derive(Clone, Debug)]
pub struct Evaluation {
    pub value: Term,
    pub steps: usize,
    pub trace: Vec<TraceStep>,
}

impl Evaluation {
    /// `(rule, before, after)` triples, given the starting term.
    pub fn triples<'a>(&'a self, start: &'a Term) -> impl Iterator<Item = (&'static str, &'a Term, &'a Term)> + 'a {
        let befores = std::iter::once(start).chain(self.trace.iter().map(|s| &s.term));
        befores.zip(self.trace.iter()).map(|(b, s)| (s.rule, b, &s.term))
    }
}

/// Steps `m` to a value, taking at most `fuel` steps.
pub fn evaluate(m: &Term, fuel: usize, keep_trace: bool) -> Result<Evaluation, EvalError> {
    evaluate_with(m, fuel, |_| (), keep_trace)
}

/// Like [`evaluate`], calling `on_step` after each step.
pub fn evaluate_with(
    m: &Term,
    fuel: usize,
    mut on_step: impl FnMut(&TraceStep),
    keep_trace: bool,
) -> Result<Evaluation, EvalError> {
    let mut cur = m.clone();
    let mut trace = Vec::new();
    let mut steps = 0;
    loop {
        match step(&cur)? {
            None => {
                return Ok(Evaluation {
                    value: cur,
                    steps,
                    trace,
                })
            }
            Some((rule, next)) => {
                if steps == fuel {
                    return Err(EvalError::OutOfFuel {
                        steps,
                        last: Box::new(cur),
                    });
                }
                steps += 1;
                let entry = TraceStep { rule, term: next };
                on_step(&entry);
                cur = entry.term.clone();
                if keep_trace {
                    trace.push(entry);
                }
            }
        }
    }
}

/// A position inside a term: child indices from the root.
pub type Position = Vec<usize>;

/// Every way of writing `m` as `E[r]` with `r` a redex, found by walking
/// all positions allowed by the evaluation-context grammar.
pub fn decompositions(m: &Term) -> Vec<Position> {
    let mut out = Vec::new();
    collect(m, &mut Vec::new(), &mut out);
    out
}

fn is_redex(m: &Term) -> bool {
    if is_value(m) {
        return false;
    }
    match m {
        Term::Ascribe(..) => true,
        Term::Let(_, _, b, _) => is_value(b),
        Term::TyApp(f, _) => is_value(f),
        Term::App(f, a) => is_value(f) && is_value(a),
        _ => false,
    }
}

fn collect(m: &Term, path: &mut Position, out: &mut Vec<Position>) {
    if is_redex(m) {
        out.push(path.clone());
    }
    let mut visit = |i: usize, c: &Term, out: &mut Vec<Position>| {
        path.push(i);
        collect(c, path, out);
        path.pop();
    };
    match m {
        Term::App(f, a) => {
            visit(0, f, out);
            if is_value(f) {
                visit(1, a, out);
            }
        }
        Term::TyApp(f, _) => visit(0, f, out),
        Term::Let(_, _, b, _) => visit(0, b, out),
        Term::Prim(p, _) => {
            for (i, c) in p.components().into_iter().enumerate() {
                visit(i, c, out);
                if !is_value(c) {
                    break;
                }
            }
        }
        _ => {}
    }
}
