//! Bidirectional, Church-style type checking with elaboration.
//!
//! Checking a surface term returns an elaborated copy of it in which every
//! λ carries its parameter type, every primitive carries a [`PrimAnn`],
//! and ascriptions are gone. Elaborated terms synthesize their types, which
//! is what lets the reducer's results be re-checked step by step.

mod arrow;
mod derivation;
mod prims;

use std::sync::Arc;

use thiserror::Error;

use crate::kinding::{check_kind, check_scheme, synth_kind, KindCtx, KindError, PKind};
use crate::normalize::{normalize_type, types_equivalent};
use crate::surface::Printer;
use crate::syntax::{instantiate_scheme, shift_scheme, Kind, Name, Prim, PrimAnn, Scheme, Term, Type, VarClass};

pub use arrow::{expand_arrow, match_arrow, solve_hole, solve_index, ArrowShape};
pub use derivation::{audit, derive, Derivation};
pub use prims::{prim_sig, PrimSig};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TypeError {
    #[error("type mismatch in `{term}`: expected {expected}, found {found}")]
    TypeMismatch {
        term: String,
        expected: String,
        found: String,
    },
    #[error("cannot synthesize a type for `{0}`; add an annotation")]
    CannotSynthesize(String),
    #[error("`{term}` has type {found}, which is not polymorphic")]
    NotAForall { term: String, found: String },
    #[error("`{prim}` cannot have type {expected}")]
    ArrowShapeMismatch { prim: String, expected: String },
    #[error("bad annotation on `{prim}`: {message}")]
    BadAnnotation { prim: String, message: String },
    #[error("unbound term variable #{0}")]
    UnboundVar(usize),
    #[error(transparent)]
    Kind(#[from] KindError),
}

type R<T> = Result<T, TypeError>;

/// Typing context: kinds of type variables and schemes of term variables.
#[derive(Clone, Debug, Default)]
pub struct TyCtx {
    pub kinds: KindCtx,
    /// `(name, scheme, number of type variables when pushed)`
    terms: Vec<(Name, Scheme, usize)>,
}

impl TyCtx {
    pub fn new() -> TyCtx {
        TyCtx::default()
    }

    pub fn push_type(&mut self, n: Name, k: Kind) {
        self.kinds.push(n, k, VarClass::Mixed);
    }

    pub fn pop_type(&mut self) {
        self.kinds.pop();
    }

    pub fn push_term(&mut self, n: Name, s: Scheme) {
        self.terms.push((n, s, self.kinds.len()));
    }

    pub fn pop_term(&mut self) {
        self.terms.pop();
    }

    pub fn lookup(&self, i: usize) -> R<Scheme> {
        let pos = self.terms.len().checked_sub(i + 1).ok_or(TypeError::UnboundVar(i))?;
        let (_, s, depth) = &self.terms[pos];
        Ok(shift_scheme(s, (self.kinds.len() - depth) as isize, 0))
    }

    fn printer(&self) -> Printer {
        Printer {
            abbrevs: Vec::new(),
            types: self.kinds.names().into_iter().map(|(n, _)| n).collect(),
            terms: self.terms.iter().map(|t| t.0.clone()).collect(),
        }
    }

    pub fn show_type(&self, t: &Type) -> String {
        self.printer().ty(t)
    }

    pub fn show_scheme(&self, s: &Scheme) -> String {
        self.printer().scheme(s)
    }

    pub fn show_term(&self, m: &Term) -> String {
        let s = self.printer().term(m);
        if s.chars().count() > 120 {
            let cut: String = s.chars().take(117).collect();
            format!("{cut}...")
        } else {
            s
        }
    }
}

/// Checks `m` against `s`, returning the elaborated term.
pub fn check_term(ctx: &TyCtx, m: &Term, s: &Scheme) -> R<Term> {
    Checker { ctx: ctx.clone() }.check(m, s)
}

/// Synthesizes a scheme for `m`, returning the elaborated term with it.
pub fn infer_term(ctx: &TyCtx, m: &Term) -> R<(Term, Scheme)> {
    Checker { ctx: ctx.clone() }.infer(m)
}

fn mono(t: Type) -> Scheme {
    Scheme::mono(t)
}

fn is_cannot_synth(e: &TypeError) -> bool {
    matches!(e, TypeError::CannotSynthesize(_))
}

struct Checker {
    ctx: TyCtx,
}

impl Checker {
    fn mismatch(&self, m: &Term, expected: &Scheme, found: &Scheme) -> TypeError {
        TypeError::TypeMismatch {
            term: self.ctx.show_term(m),
            expected: self.ctx.show_scheme(expected),
            found: self.ctx.show_scheme(found),
        }
    }

    fn shape(&self, p: &Prim, expected: &Scheme) -> TypeError {
        TypeError::ArrowShapeMismatch {
            prim: p.keyword().into(),
            expected: self.ctx.show_scheme(expected),
        }
    }

    fn with_type<T>(&mut self, n: &Name, k: &Kind, f: impl FnOnce(&mut Self) -> T) -> T {
        self.ctx.push_type(n.clone(), k.clone());
        let out = f(self);
        self.ctx.pop_type();
        out
    }

    fn with_term<T>(&mut self, n: &Name, s: Scheme, f: impl FnOnce(&mut Self) -> T) -> T {
        self.ctx.push_term(n.clone(), s);
        let out = f(self);
        self.ctx.pop_term();
        out
    }

    fn kind_star(&self, t: &Type) -> R<()> {
        check_kind(&self.ctx.kinds, t, &Kind::Star).map_err(Into::into)
    }

    fn check(&mut self, m: &Term, s: &Scheme) -> R<Term> {
        match m {
            Term::TyLam(n, k, body) if !s.binders.is_empty() => {
                if s.binders[0].1 != *k {
                    let found = Scheme {
                        binders: vec![(n.clone(), k.clone())],
                        body: Type::One,
                    };
                    return Err(self.mismatch(m, s, &found));
                }
                let rest = Scheme {
                    binders: s.binders[1..].to_vec(),
                    body: s.body.clone(),
                };
                let body = self.with_type(n, k, |c| c.check(body, &rest))?;
                Ok(Term::TyLam(n.clone(), k.clone(), Arc::new(body)))
            }
            Term::Prim(p, None) => self.check_prim(p, s),
            _ if !s.binders.is_empty() => self.infer_and_compare(m, s),
            Term::Lam(x, p, body) => {
                let Type::Fun(a, b) = normalize_type(&s.body) else {
                    return match p {
                        Some(p) => Err(self.mismatch(m, s, &mono(Type::fun(p.clone(), Type::var(0, "?"))))),
                        None => Err(TypeError::TypeMismatch {
                            term: self.ctx.show_term(m),
                            expected: self.ctx.show_scheme(s),
                            found: "a function".into(),
                        }),
                    };
                };
                let param = match p {
                    Some(p) => {
                        self.kind_star(p)?;
                        if !types_equivalent(&mono(p.clone()), &mono((*a).clone())) {
                            return Err(self.mismatch(m, s, &mono(Type::Fun(Arc::new(p.clone()), b.clone()))));
                        }
                        p.clone()
                    }
                    None => (*a).clone(),
                };
                let body = self.with_term(x, mono(param.clone()), |c| c.check(body, &mono((*b).clone())))?;
                Ok(Term::Lam(x.clone(), Some(param), Arc::new(body)))
            }
            Term::App(f, a) => self.check_app(m, f, a, &s.body),
            Term::Let(x, sc, bound, body) => {
                let bound = self.check_let_bound(sc, bound)?;
                let body = self.with_term(x, sc.clone(), |c| c.check(body, s))?;
                Ok(Term::Let(x.clone(), sc.clone(), Arc::new(bound), Arc::new(body)))
            }
            _ => self.infer_and_compare(m, s),
        }
    }

    fn infer_and_compare(&mut self, m: &Term, s: &Scheme) -> R<Term> {
        let (m2, found) = self.infer(m)?;
        if types_equivalent(&found, s) {
            Ok(m2)
        } else {
            Err(self.mismatch(m, s, &found))
        }
    }

    fn check_let_bound(&mut self, sc: &Scheme, bound: &Term) -> R<Term> {
        check_scheme(&self.ctx.kinds, sc)?;
        self.check(bound, sc)
    }

    fn check_app(&mut self, whole: &Term, f: &Term, a: &Term, r: &Type) -> R<Term> {
        match self.infer(f) {
            Ok((f2, fs)) => {
                let (dom, cod) = self.as_function(f, &fs)?;
                if !types_equivalent(&mono(cod.clone()), &mono(r.clone())) {
                    return Err(self.mismatch(whole, &mono(r.clone()), &mono(cod)));
                }
                let a2 = self.check(a, &mono(dom))?;
                return Ok(Term::app(f2, a2));
            }
            Err(e) if !is_cannot_synth(&e) => return Err(e),
            Err(_) => {}
        }
        if let Term::Prim(p, None) = f {
            if let Some(dom) = self.domain_from_result(p, r) {
                let a2 = self.check(a, &mono(dom.clone()))?;
                let f2 = self.check(f, &mono(Type::fun(dom, r.clone())))?;
                return Ok(Term::app(f2, a2));
            }
        }
        let (a2, s) = self.infer(a)?;
        if !s.is_mono() {
            return Err(TypeError::TypeMismatch {
                term: self.ctx.show_term(a),
                expected: "a monomorphic argument".into(),
                found: self.ctx.show_scheme(&s),
            });
        }
        let f2 = self.check(f, &mono(Type::fun(s.body, r.clone())))?;
        Ok(Term::app(f2, a2))
    }

    /// For primitives whose argument type is determined by the result
    /// type, computes that argument type.
    fn domain_from_result(&self, p: &Prim, r: &Type) -> Option<Type> {
        let r = normalize_type(r);
        match p {
            Prim::In => {
                let (head, args) = r.spine();
                let Type::Mu(f) = head else { return None };
                Some(normalize_type(&Type::apps(
                    Type::app((**f).clone(), head.clone()),
                    args.into_iter().cloned(),
                )))
            }
            Prim::Inl | Prim::Inr => match r {
                Type::Sum(a, b) => Some(if matches!(p, Prim::Inl) {
                    (*a).clone()
                } else {
                    (*b).clone()
                }),
                _ => None,
            },
            Prim::Fold(tau, _) => {
                let k = synth_kind(&self.ctx.kinds, tau).ok()?;
                (k.join(&PKind::Arrow(Box::new(PKind::Star), Box::new(PKind::Star)))
                    .is_some())
                .then(|| normalize_type(&Type::mu(tau.clone())))
            }
            Prim::Absurd => Some(Type::Zero),
            _ => None,
        }
    }

    fn as_function(&self, f: &Term, fs: &Scheme) -> R<(Type, Type)> {
        if fs.is_mono() {
            if let Type::Fun(a, b) = normalize_type(&fs.body) {
                return Ok(((*a).clone(), (*b).clone()));
            }
        }
        Err(TypeError::TypeMismatch {
            term: self.ctx.show_term(f),
            expected: "a function".into(),
            found: self.ctx.show_scheme(fs),
        })
    }

    fn infer(&mut self, m: &Term) -> R<(Term, Scheme)> {
        match m {
            Term::Var(i, _) => Ok((m.clone(), self.ctx.lookup(*i)?)),
            Term::App(f, a) => {
                if let Term::Prim(p @ (Prim::Fst | Prim::Snd | Prim::Unin), None) = &**f {
                    return self.infer_projection(p, a);
                }
                let (f2, fs) = self.infer(f)?;
                let (dom, cod) = self.as_function(f, &fs)?;
                let a2 = self.check(a, &mono(dom))?;
                Ok((Term::app(f2, a2), mono(cod)))
            }
            Term::Lam(x, Some(p), body) => {
                self.kind_star(p)?;
                let (b2, bs) = self.with_term(x, mono(p.clone()), |c| c.infer(body))?;
                if !bs.is_mono() {
                    return Err(TypeError::TypeMismatch {
                        term: self.ctx.show_term(m),
                        expected: "a monomorphic body".into(),
                        found: self.ctx.show_scheme(&bs),
                    });
                }
                Ok((
                    Term::Lam(x.clone(), Some(p.clone()), Arc::new(b2)),
                    mono(Type::fun(p.clone(), bs.body)),
                ))
            }
            Term::Lam(_, None, _) => Err(TypeError::CannotSynthesize(self.ctx.show_term(m))),
            Term::Let(x, sc, bound, body) => {
                let bound = self.check_let_bound(sc, bound)?;
                let (b2, bs) = self.with_term(x, sc.clone(), |c| c.infer(body))?;
                Ok((Term::Let(x.clone(), sc.clone(), Arc::new(bound), Arc::new(b2)), bs))
            }
            Term::TyLam(n, k, body) => {
                let (b2, bs) = self.with_type(n, k, |c| c.infer(body))?;
                let mut binders = vec![(n.clone(), k.clone())];
                binders.extend(bs.binders);
                Ok((
                    Term::TyLam(n.clone(), k.clone(), Arc::new(b2)),
                    Scheme { binders, body: bs.body },
                ))
            }
            Term::TyApp(f, t) => {
                let (f2, fs) = self.infer(f)?;
                let Some((_, k)) = fs.binders.first() else {
                    return Err(TypeError::NotAForall {
                        term: self.ctx.show_term(f),
                        found: self.ctx.show_scheme(&fs),
                    });
                };
                check_kind(&self.ctx.kinds, t, k)?;
                Ok((Term::ty_app(f2, t.clone()), instantiate_scheme(&fs, t)))
            }
            Term::Ascribe(inner, s) => {
                check_scheme(&self.ctx.kinds, s)?;
                Ok((self.check(inner, s)?, s.clone()))
            }
            Term::Prim(Prim::Tt, None) => Ok((
                Term::prim_ann(Prim::Tt, PrimAnn::new(Kind::Star, vec![])),
                mono(Type::One),
            )),
            Term::Prim(_, None) => Err(TypeError::CannotSynthesize(self.ctx.show_term(m))),
            Term::Prim(p, Some(ann)) => {
                let sig = prim_sig(&self.ctx.kinds, p, ann)?;
                let comps = p.components();
                let mut checked = Vec::new();
                for (c, s) in comps.iter().zip(&sig.components) {
                    checked.push(Arc::new(self.check(c, s)?));
                }
                Ok((Term::Prim(rebuild(p, checked), Some(ann.clone())), sig.scheme))
            }
        }
    }

    /// `fst a`, `snd a` and `unin a` synthesize from the argument.
    fn infer_projection(&mut self, p: &Prim, a: &Term) -> R<(Term, Scheme)> {
        let (a2, s) = self.infer(a)?;
        let t = if s.is_mono() {
            normalize_type(&s.body)
        } else {
            Type::Zero
        };
        let fail = || TypeError::TypeMismatch {
            term: self.ctx.show_term(a),
            expected: if matches!(p, Prim::Unin) {
                "a recursive type".into()
            } else {
                "a product".into()
            },
            found: self.ctx.show_scheme(&s),
        };
        match (p, &t) {
            (Prim::Fst | Prim::Snd, Type::Prod(l, r)) => {
                let ann = PrimAnn::new(Kind::Star, vec![(**l).clone(), (**r).clone()]);
                let out = if matches!(p, Prim::Fst) { l } else { r };
                Ok((Term::app(Term::prim_ann(p.clone(), ann), a2), mono((**out).clone())))
            }
            (Prim::Unin, _) => {
                let (head, args) = t.spine();
                let Type::Mu(f) = head else { return Err(fail()) };
                let k = synth_kind(&self.ctx.kinds, head)?.default_star();
                if k.arity() != args.len() {
                    return Err(fail());
                }
                let ann = PrimAnn::new(k, vec![(**f).clone()]);
                let prim = Term::ty_apps(Term::prim_ann(Prim::Unin, ann), args.iter().map(|x| (*x).clone()));
                let out = normalize_type(&Type::apps(
                    Type::app((**f).clone(), head.clone()),
                    args.into_iter().cloned(),
                ));
                Ok((Term::app(prim, a2), mono(out)))
            }
            _ => Err(fail()),
        }
    }

    fn check_prim(&mut self, p: &Prim, s: &Scheme) -> R<Term> {
        if let Prim::Tt = p {
            if normalize_type(&s.body) != Type::One {
                return Err(self.shape(p, s));
            }
            let k = Kind::from_args(&s.binders.iter().map(|b| b.1.clone()).collect::<Vec<_>>(), Kind::Star);
            return Ok(Term::prim_ann(Prim::Tt, PrimAnn::new(k, vec![])));
        }
        let Some(ArrowShape { dom, kind: k, cod }) = match_arrow(s) else {
            return Err(self.shape(p, s));
        };
        let ann = |types: Vec<Type>| PrimAnn::new(k.clone(), types);
        let done = |p: Prim, a: PrimAnn| Ok(Term::prim_ann(p, a));
        match p {
            Prim::In | Prim::Unin => {
                let (mu, other) = if matches!(p, Prim::In) {
                    (&cod, &dom)
                } else {
                    (&dom, &cod)
                };
                if let Type::Mu(f) = mu {
                    if normalize_type(&Type::app((**f).clone(), mu.clone())) == *other {
                        return done(p.clone(), ann(vec![(**f).clone()]));
                    }
                }
                self.check_mu_spine(p, s)
            }
            Prim::Map(tau, f) => self.check_map(p, s, tau, f, dom, k.clone(), cod),
            Prim::Fold(tau, alg) => {
                check_kind(&self.ctx.kinds, tau, &Kind::arrow(k.clone(), k.clone()))?;
                if normalize_type(&Type::mu(tau.clone())) != dom {
                    return Err(self.shape(p, s));
                }
                let alg = self.check(alg, &expand_arrow(&Type::app(tau.clone(), cod.clone()), &k, &cod))?;
                done(Prim::Fold(tau.clone(), Arc::new(alg)), ann(vec![cod]))
            }
            Prim::Fst | Prim::Snd => match &dom {
                Type::Prod(a, b) if **(if matches!(p, Prim::Fst) { a } else { b }) == cod => {
                    done(p.clone(), ann(vec![(**a).clone(), (**b).clone()]))
                }
                _ => Err(self.shape(p, s)),
            },
            Prim::Inl | Prim::Inr => match &cod {
                Type::Sum(a, b) if **(if matches!(p, Prim::Inl) { a } else { b }) == dom => {
                    done(p.clone(), ann(vec![(**a).clone(), (**b).clone()]))
                }
                _ => Err(self.shape(p, s)),
            },
            Prim::Fork(l, r) => {
                let Type::Prod(a, b) = &cod else {
                    return Err(self.shape(p, s));
                };
                let l = self.check(l, &expand_arrow(&dom, &k, a))?;
                let r = self.check(r, &expand_arrow(&dom, &k, b))?;
                done(
                    Prim::Fork(Arc::new(l), Arc::new(r)),
                    ann(vec![dom.clone(), (**a).clone(), (**b).clone()]),
                )
            }
            Prim::Join(l, r) => {
                let Type::Sum(a, b) = &dom else {
                    return Err(self.shape(p, s));
                };
                let l = self.check(l, &expand_arrow(a, &k, &cod))?;
                let r = self.check(r, &expand_arrow(b, &k, &cod))?;
                done(
                    Prim::Join(Arc::new(l), Arc::new(r)),
                    ann(vec![(**a).clone(), (**b).clone(), cod.clone()]),
                )
            }
            Prim::Absurd => {
                if dom != Type::Zero {
                    return Err(self.shape(p, s));
                }
                done(Prim::Absurd, ann(vec![cod]))
            }
            Prim::Tt => unreachable!(),
        }
    }

    /// `in`/`unin` used at a fully applied recursive type such as
    /// `(mu F) b => ...`: elaborates to `/\a. in{k|F} r1 .. rn`.
    fn check_mu_spine(&mut self, p: &Prim, s: &Scheme) -> R<Term> {
        let Type::Fun(a, b) = normalize_type(&s.body) else {
            return Err(self.shape(p, s));
        };
        let (mu_side, other) = if matches!(p, Prim::In) { (&*b, &*a) } else { (&*a, &*b) };
        let (head, args) = mu_side.spine();
        let Type::Mu(f) = head else {
            return Err(self.shape(p, s));
        };
        let mut inner = self.ctx.kinds.clone();
        for (n, k) in &s.binders {
            inner.push(n.clone(), k.clone(), VarClass::Mixed);
        }
        let k = synth_kind(&inner, head)?.default_star();
        let unrolled = normalize_type(&Type::apps(
            Type::app((**f).clone(), head.clone()),
            args.iter().map(|x| (*x).clone()),
        ));
        if k.arity() != args.len() || args.is_empty() || unrolled != *other {
            return Err(self.shape(p, s));
        }
        let prim = Term::ty_apps(
            Term::prim_ann(p.clone(), PrimAnn::new(k, vec![(**f).clone()])),
            args.iter().map(|x| (*x).clone()),
        );
        Ok(s.binders
            .iter()
            .rev()
            .fold(prim, |acc, (n, k)| Term::TyLam(n.clone(), k.clone(), Arc::new(acc))))
    }

    #[allow(clippy::too_many_arguments)]
    fn check_map(&mut self, p: &Prim, s: &Scheme, tau: &Type, f: &Arc<Term>, dom: Type, k: Kind, cod: Type) -> R<Term> {
        let kt = synth_kind(&self.ctx.kinds, tau)?.default_star();
        let Kind::Arrow(k1, k2) = &kt else {
            return Err(TypeError::Kind(KindError::KindMismatch {
                expected: "k1 -> k2".into(),
                actual: kt.to_string(),
                location: format!("map index `{}`", self.ctx.show_type(tau)),
            }));
        };
        if **k2 != k {
            return Err(self.shape(p, s));
        }
        let solved = solve_index(tau, &dom).zip(solve_index(tau, &cod));
        let (t1, t2, f2) = match solved {
            Some((t1, t2)) => {
                let f2 = self.check(f, &expand_arrow(&t1, k1, &t2))?;
                (t1, t2, f2)
            }
            None => {
                let (f2, fs) = self.infer(f)?;
                let shape = match_arrow(&fs)
                    .filter(|sp| sp.kind == **k1)
                    .ok_or_else(|| self.shape(p, s))?;
                (shape.dom, shape.cod, f2)
            }
        };
        let applied = |t: &Type| normalize_type(&Type::app(tau.clone(), t.clone()));
        if applied(&t1) != dom || applied(&t2) != cod {
            return Err(self.shape(p, s));
        }
        Ok(Term::prim_ann(
            Prim::Map(tau.clone(), Arc::new(f2)),
            PrimAnn::new(kt.clone(), vec![t1, t2]),
        ))
    }
}

/// Replaces the components of a primitive.
pub fn rebuild(p: &Prim, comps: Vec<Arc<Term>>) -> Prim {
    let mut it = comps.into_iter();
    match p {
        Prim::Map(t, _) => Prim::Map(t.clone(), it.next().unwrap()),
        Prim::Fold(t, _) => Prim::Fold(t.clone(), it.next().unwrap()),
        Prim::Fork(..) => Prim::Fork(it.next().unwrap(), it.next().unwrap()),
        Prim::Join(..) => Prim::Join(it.next().unwrap(), it.next().unwrap()),
        other => other.clone(),
    }
}

#[cfg(test)]
mod tests;
