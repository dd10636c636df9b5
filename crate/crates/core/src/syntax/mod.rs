//! Abstract syntax for kinds, types, schemes and terms.
//!
//! Binding is nameless: every variable is a de Bruijn index, and binders
//! keep the surface name only as a printing hint. Equality on [`Type`],
//! [`Scheme`] and [`Term`] ignores those hints, so `==` is α-equivalence.
//!
//! Type variables share one index space whether they were bound by a
//! type-level λ (functorial, the `X` class) or by `∀`/`Λ` (mixed variance,
//! the `α` class). The class of a variable is a property of its binder and
//! is tracked by the contexts in [`crate::kinding`].

mod free;
mod subst;

use std::fmt;
use std::sync::Arc;

pub use free::{FreeVar, VarClass};
pub use subst::*;

/// Printing hint carried by binders and variables.
pub type Name = Arc<str>;

pub fn name(s: &str) -> Name {
    Arc::from(s)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Kind {
    Star,
    Arrow(Box<Kind>, Box<Kind>),
}

impl Kind {
    pub fn arrow(dom: Kind, cod: Kind) -> Kind {
        Kind::Arrow(Box::new(dom), Box::new(cod))
    }

    /// Builds `k1 -> ... -> kn -> result`.
    pub fn from_args(args: &[Kind], result: Kind) -> Kind {
        args.iter().rev().fold(result, |acc, k| Kind::arrow(k.clone(), acc))
    }

    /// Number of leading arrow domains.
    pub fn arity(&self) -> usize {
        match self {
            Kind::Star => 0,
            Kind::Arrow(_, cod) => 1 + cod.arity(),
        }
    }

    /// The leading domains of the kind, outermost first.
    pub fn domains(&self) -> Vec<Kind> {
        let mut out = Vec::new();
        let mut k = self;
        while let Kind::Arrow(d, c) = k {
            out.push((**d).clone());
            k = c;
        }
        out
    }

    pub fn split_arrow(&self) -> Option<(&Kind, &Kind)> {
        match self {
            Kind::Arrow(d, c) => Some((d, c)),
            Kind::Star => None,
        }
    }
}

#[derive(Clone, Debug)]
pub enum Type {
    Var(usize, Name),
    App(Arc<Type>, Arc<Type>),
    /// Type-level λ; binds a functorial variable.
    Lam(Name, Kind, Arc<Type>),
    Mu(Arc<Type>),
    Fun(Arc<Type>, Arc<Type>),
    Zero,
    One,
    Prod(Arc<Type>, Arc<Type>),
    Sum(Arc<Type>, Arc<Type>),
}

impl PartialEq for Type {
    fn eq(&self, other: &Self) -> bool {
        use Type::*;
        match (self, other) {
            (Var(a, _), Var(b, _)) => a == b,
            (App(f, a), App(g, b)) => f == g && a == b,
            (Lam(_, k, a), Lam(_, l, b)) => k == l && a == b,
            (Mu(a), Mu(b)) => a == b,
            (Fun(a, b), Fun(c, d)) | (Prod(a, b), Prod(c, d)) | (Sum(a, b), Sum(c, d)) => a == c && b == d,
            (Zero, Zero) | (One, One) => true,
            _ => false,
        }
    }
}

impl Eq for Type {}

impl Type {
    pub fn var(idx: usize, hint: &str) -> Type {
        Type::Var(idx, name(hint))
    }
    pub fn app(f: Type, a: Type) -> Type {
        Type::App(Arc::new(f), Arc::new(a))
    }
    pub fn apps(head: Type, args: impl IntoIterator<Item = Type>) -> Type {
        args.into_iter().fold(head, Type::app)
    }
    pub fn lam(hint: &str, kind: Kind, body: Type) -> Type {
        Type::Lam(name(hint), kind, Arc::new(body))
    }
    pub fn mu(body: Type) -> Type {
        Type::Mu(Arc::new(body))
    }
    pub fn fun(a: Type, b: Type) -> Type {
        Type::Fun(Arc::new(a), Arc::new(b))
    }
    pub fn prod(a: Type, b: Type) -> Type {
        Type::Prod(Arc::new(a), Arc::new(b))
    }
    pub fn sum(a: Type, b: Type) -> Type {
        Type::Sum(Arc::new(a), Arc::new(b))
    }

    /// Splits `h a1 ... an` into `(h, [a1..an])`.
    pub fn spine(&self) -> (&Type, Vec<&Type>) {
        let mut args = Vec::new();
        let mut t = self;
        while let Type::App(f, a) = t {
            args.push(&**a);
            t = f;
        }
        args.reverse();
        (t, args)
    }

    /// Number of nodes, used by generators and fuel heuristics.
    pub fn size(&self) -> usize {
        match self {
            Type::Var(..) | Type::Zero | Type::One => 1,
            Type::Lam(_, _, b) | Type::Mu(b) => 1 + b.size(),
            Type::App(a, b) | Type::Fun(a, b) | Type::Prod(a, b) | Type::Sum(a, b) => 1 + a.size() + b.size(),
        }
    }
}

/// A prenex type scheme `∀a1:k1 ... ∀an:kn. body`.
///
/// `binders[0]` is the outermost quantifier; inside `body` the innermost
/// binder has index 0.
#[derive(Clone, Debug)]
pub struct Scheme {
    pub binders: Vec<(Name, Kind)>,
    pub body: Type,
}

impl PartialEq for Scheme {
    fn eq(&self, other: &Self) -> bool {
        self.binders.len() == other.binders.len()
            && self.binders.iter().zip(&other.binders).all(|(a, b)| a.1 == b.1)
            && self.body == other.body
    }
}

impl Eq for Scheme {}

impl Scheme {
    pub fn mono(body: Type) -> Scheme {
        Scheme {
            binders: Vec::new(),
            body,
        }
    }

    pub fn is_mono(&self) -> bool {
        self.binders.is_empty()
    }

    pub fn forall(hint: &str, kind: Kind, inner: Scheme) -> Scheme {
        let mut binders = vec![(name(hint), kind)];
        binders.extend(inner.binders);
        Scheme {
            binders,
            body: inner.body,
        }
    }
}

impl From<Type> for Scheme {
    fn from(t: Type) -> Scheme {
        Scheme::mono(t)
    }
}

/// Built-in operations of the calculus. Some carry a type index or
/// sub-terms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Prim {
    In,
    Unin,
    Map(Type, Arc<Term>),
    Fold(Type, Arc<Term>),
    Fst,
    Snd,
    Fork(Arc<Term>, Arc<Term>),
    Inl,
    Inr,
    Join(Arc<Term>, Arc<Term>),
    Tt,
    Absurd,
}

impl Prim {
    pub fn keyword(&self) -> &'static str {
        match self {
            Prim::In => "in",
            Prim::Unin => "unin",
            Prim::Map(..) => "map",
            Prim::Fold(..) => "fold",
            Prim::Fst => "fst",
            Prim::Snd => "snd",
            Prim::Fork(..) => "fork",
            Prim::Inl => "inl",
            Prim::Inr => "inr",
            Prim::Join(..) => "join",
            Prim::Tt => "tt",
            Prim::Absurd => "absurd",
        }
    }

    /// Number of types an elaborated annotation must carry.
    pub fn annotation_width(&self) -> usize {
        match self {
            Prim::Tt => 0,
            Prim::In | Prim::Unin | Prim::Fold(..) | Prim::Absurd => 1,
            Prim::Map(..) | Prim::Fst | Prim::Snd | Prim::Inl | Prim::Inr => 2,
            Prim::Fork(..) | Prim::Join(..) => 3,
        }
    }

    /// Sub-terms of the primitive, in evaluation order.
    pub fn components(&self) -> Vec<&Arc<Term>> {
        match self {
            Prim::Map(_, m) | Prim::Fold(_, m) => vec![m],
            Prim::Fork(m, n) | Prim::Join(m, n) => vec![m, n],
            _ => Vec::new(),
        }
    }
}

/// Elaboration annotation on a primitive: the kind `k` of its arrow type
/// and the metavariables of its typing rule.
///
/// | primitive     | kind       | types          | type                                 |
/// |---------------|------------|----------------|--------------------------------------|
/// | `in`          | `k`        | `F`            | `F μF →k μF`                         |
/// | `unin`        | `k`        | `F`            | `μF →k F μF`                         |
/// | `map[F]`      | `k1 -> k2` | `A, B`         | `F A →k2 F B` (argument `A →k1 B`)   |
/// | `fold[F]`     | `k`        | `C`            | `μF →k C` (argument `F C →k C`)      |
/// | `fst`/`snd`   | `k`        | `A, B`         | `A × B →k A` / `A × B →k B`          |
/// | `fork`        | `k`        | `S, A, B`      | `S →k A × B`                         |
/// | `inl`/`inr`   | `k`        | `A, B`         | `A →k A + B` / `B →k A + B`          |
/// | `join`        | `k`        | `A, B, T`      | `A + B →k T`                         |
/// | `tt`          | `k`        |                | `∀ᾱ. 1`                              |
/// | `absurd`      | `k`        | `T`            | `0 →k T`                             |
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimAnn {
    pub kind: Kind,
    pub types: Vec<Type>,
}

impl PrimAnn {
    pub fn new(kind: Kind, types: Vec<Type>) -> PrimAnn {
        PrimAnn { kind, types }
    }
}

#[derive(Clone, Debug)]
pub enum Term {
    Var(usize, Name),
    App(Arc<Term>, Arc<Term>),
    /// Term λ; the parameter type is optional in source and always present
    /// after elaboration.
    Lam(Name, Option<Type>, Arc<Term>),
    Let(Name, Scheme, Arc<Term>, Arc<Term>),
    TyLam(Name, Kind, Arc<Term>),
    TyApp(Arc<Term>, Type),
    Ascribe(Arc<Term>, Scheme),
    Prim(Prim, Option<PrimAnn>),
}

impl PartialEq for Term {
    fn eq(&self, other: &Self) -> bool {
        use Term::*;
        match (self, other) {
            (Var(a, _), Var(b, _)) => a == b,
            (App(f, a), App(g, b)) => f == g && a == b,
            (Lam(_, s, a), Lam(_, t, b)) => s == t && a == b,
            (Let(_, s, a, b), Let(_, t, c, d)) => s == t && a == c && b == d,
            (TyLam(_, k, a), TyLam(_, l, b)) => k == l && a == b,
            (TyApp(a, s), TyApp(b, t)) => a == b && s == t,
            (Ascribe(a, s), Ascribe(b, t)) => a == b && s == t,
            (Prim(p, a), Prim(q, b)) => p == q && a == b,
            _ => false,
        }
    }
}

impl Eq for Term {}

/// One argument in an application spine.
#[derive(Clone, Debug, PartialEq)]
pub enum Arg<'a> {
    Ty(&'a Type),
    Tm(&'a Arc<Term>),
}

impl Term {
    pub fn var(idx: usize, hint: &str) -> Term {
        Term::Var(idx, name(hint))
    }
    pub fn app(f: Term, a: Term) -> Term {
        Term::App(Arc::new(f), Arc::new(a))
    }
    pub fn lam(hint: &str, param: Option<Type>, body: Term) -> Term {
        Term::Lam(name(hint), param, Arc::new(body))
    }
    pub fn ty_lam(hint: &str, kind: Kind, body: Term) -> Term {
        Term::TyLam(name(hint), kind, Arc::new(body))
    }
    pub fn ty_app(f: Term, t: Type) -> Term {
        Term::TyApp(Arc::new(f), t)
    }
    pub fn ty_apps(f: Term, ts: impl IntoIterator<Item = Type>) -> Term {
        ts.into_iter().fold(f, Term::ty_app)
    }
    pub fn let_(hint: &str, scheme: Scheme, bound: Term, body: Term) -> Term {
        Term::Let(name(hint), scheme, Arc::new(bound), Arc::new(body))
    }
    pub fn prim(p: Prim) -> Term {
        Term::Prim(p, None)
    }
    pub fn prim_ann(p: Prim, ann: PrimAnn) -> Term {
        Term::Prim(p, Some(ann))
    }

    /// Splits an application spine into its head and arguments.
    pub fn spine(&self) -> (&Term, Vec<Arg<'_>>) {
        let mut args = Vec::new();
        let mut t = self;
        loop {
            match t {
                Term::App(f, a) => {
                    args.push(Arg::Tm(a));
                    t = f;
                }
                Term::TyApp(f, ty) => {
                    args.push(Arg::Ty(ty));
                    t = f;
                }
                _ => break,
            }
        }
        args.reverse();
        (t, args)
    }

    /// Drops the annotations the checker adds to primitives.
    pub fn erase_annotations(&self) -> Term {
        let e = |t: &Arc<Term>| Arc::new(t.erase_annotations());
        match self {
            Term::Var(..) => self.clone(),
            Term::App(f, a) => Term::App(e(f), e(a)),
            Term::Lam(x, p, b) => Term::Lam(x.clone(), p.clone(), e(b)),
            Term::Let(x, s, a, b) => Term::Let(x.clone(), s.clone(), e(a), e(b)),
            Term::TyLam(x, k, b) => Term::TyLam(x.clone(), k.clone(), e(b)),
            Term::TyApp(f, t) => Term::TyApp(e(f), t.clone()),
            Term::Ascribe(a, s) => Term::Ascribe(e(a), s.clone()),
            Term::Prim(p, _) => {
                let p = match p {
                    Prim::Map(t, c) => Prim::Map(t.clone(), e(c)),
                    Prim::Fold(t, c) => Prim::Fold(t.clone(), e(c)),
                    Prim::Fork(a, b) => Prim::Fork(e(a), e(b)),
                    Prim::Join(a, b) => Prim::Join(e(a), e(b)),
                    other => other.clone(),
                };
                Term::Prim(p, None)
            }
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Term::Var(..) => 1,
            Term::App(a, b) => 1 + a.size() + b.size(),
            Term::Lam(_, _, b) | Term::TyLam(_, _, b) => 1 + b.size(),
            Term::Let(_, _, a, b) => 1 + a.size() + b.size(),
            Term::TyApp(a, _) | Term::Ascribe(a, _) => 1 + a.size(),
            Term::Prim(p, _) => 1 + p.components().iter().map(|c| c.size()).sum::<usize>(),
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::surface::print_kind(self))
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::surface::print_type(self))
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::surface::print_scheme(self))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::surface::print_term(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alpha_eq_ignores_binder_names() {
        let a = Type::lam("X", Kind::Star, Type::var(0, "X"));
        let b = Type::lam("Y", Kind::Star, Type::var(0, "Y"));
        assert_eq!(a, b);
        let c = Type::lam("X", Kind::Star, Type::One);
        assert_ne!(a, c);
    }

    #[test]
    fn alpha_eq_on_schemes() {
        let id = |n: &str| Scheme {
            binders: vec![(name(n), Kind::Star)],
            body: Type::fun(Type::var(0, n), Type::var(0, n)),
        };
        assert_eq!(id("a"), id("b"));
    }

    #[test]
    fn kind_arity() {
        let k = Kind::arrow(Kind::arrow(Kind::Star, Kind::Star), Kind::arrow(Kind::Star, Kind::Star));
        assert_eq!(k.arity(), 2);
        assert_eq!(k.domains().len(), 2);
        assert_eq!(Kind::Star.arity(), 0);
    }
}
