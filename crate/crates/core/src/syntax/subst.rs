//! Shifting and capture-avoiding substitution on de Bruijn syntax.

use std::sync::Arc;

use super::{Prim, PrimAnn, Scheme, Term, Type};

/// Applies `f(index, depth)` to every variable of `ty`, where `depth` is the
/// number of binders crossed inside `ty`.
fn map_type_vars(ty: &Type, depth: usize, f: &impl Fn(usize, &super::Name, usize) -> Type) -> Type {
    match ty {
        Type::Var(i, n) => f(*i, n, depth),
        Type::App(a, b) => Type::App(
            Arc::new(map_type_vars(a, depth, f)),
            Arc::new(map_type_vars(b, depth, f)),
        ),
        Type::Lam(n, k, b) => Type::Lam(n.clone(), k.clone(), Arc::new(map_type_vars(b, depth + 1, f))),
        Type::Mu(b) => Type::Mu(Arc::new(map_type_vars(b, depth, f))),
        Type::Fun(a, b) => Type::Fun(
            Arc::new(map_type_vars(a, depth, f)),
            Arc::new(map_type_vars(b, depth, f)),
        ),
        Type::Prod(a, b) => Type::Prod(
            Arc::new(map_type_vars(a, depth, f)),
            Arc::new(map_type_vars(b, depth, f)),
        ),
        Type::Sum(a, b) => Type::Sum(
            Arc::new(map_type_vars(a, depth, f)),
            Arc::new(map_type_vars(b, depth, f)),
        ),
        Type::Zero => Type::Zero,
        Type::One => Type::One,
    }
}

/// Adds `by` to every variable at or above `cutoff`.
pub fn shift_type(ty: &Type, by: isize, cutoff: usize) -> Type {
    if by == 0 {
        return ty.clone();
    }
    map_type_vars(ty, cutoff, &|i, n, c| {
        if i >= c {
            let j = i as isize + by;
            debug_assert!(j >= 0, "negative de Bruijn index after shift");
            Type::Var(j as usize, n.clone())
        } else {
            Type::Var(i, n.clone())
        }
    })
}

pub fn shift(ty: &Type, by: isize) -> Type {
    shift_type(ty, by, 0)
}

/// Replaces the free variable `index` of `ty` by `by`, leaving every other
/// variable untouched. `by` is interpreted in the same context as `ty`.
pub fn subst_type(ty: &Type, index: usize, by: &Type) -> Type {
    map_type_vars(ty, 0, &|i, n, c| {
        if i == index + c {
            shift(by, c as isize)
        } else {
            Type::Var(i, n.clone())
        }
    })
}

/// Eliminates the binder at relative position `at`: variables below `at`
/// stay, `at` becomes `by` (which lives outside that binder), and the
/// variables above it move down by one.
pub fn instantiate_type_at(ty: &Type, at: usize, by: &Type) -> Type {
    map_type_vars(ty, 0, &|i, n, c| {
        let level = at + c;
        if i < level {
            Type::Var(i, n.clone())
        } else if i == level {
            shift(by, level as isize)
        } else {
            Type::Var(i - 1, n.clone())
        }
    })
}

/// `body[by/0]` for the body of a type-level binder.
pub fn instantiate_type(body: &Type, by: &Type) -> Type {
    instantiate_type_at(body, 0, by)
}

/// Instantiates the outermost quantifier of a scheme.
pub fn instantiate_scheme(s: &Scheme, by: &Type) -> Scheme {
    let n = s.binders.len();
    assert!(n > 0, "instantiate_scheme on a monotype");
    Scheme {
        binders: s.binders[1..].to_vec(),
        body: instantiate_type_at(&s.body, n - 1, by),
    }
}

pub fn shift_scheme(s: &Scheme, by: isize, cutoff: usize) -> Scheme {
    Scheme {
        binders: s.binders.clone(),
        body: shift_type(&s.body, by, cutoff + s.binders.len()),
    }
}

/// Simultaneously replaces variables `0..env.len()` by closed types, where
/// `env[0]` is the replacement for index 0. Variables beyond the
/// environment move down by `env.len()`.
pub fn close_type(ty: &Type, env: &[Type]) -> Type {
    if env.is_empty() {
        return ty.clone();
    }
    map_type_vars(ty, 0, &|i, n, c| {
        if i < c {
            Type::Var(i, n.clone())
        } else if i - c < env.len() {
            shift(&env[i - c], c as isize)
        } else {
            Type::Var(i - env.len(), n.clone())
        }
    })
}

// ---------------------------------------------------------------------------
// Terms

/// Generic traversal over a term with separate term and type depths.
struct TermMap<'a> {
    on_var: &'a dyn Fn(usize, &super::Name, usize, usize) -> Term,
    on_type: &'a dyn Fn(&Type, usize) -> Type,
}

impl TermMap<'_> {
    fn scheme(&self, s: &Scheme, ty_depth: usize) -> Scheme {
        Scheme {
            binders: s.binders.clone(),
            body: (self.on_type)(&s.body, ty_depth + s.binders.len()),
        }
    }

    fn ann(&self, a: &PrimAnn, ty_depth: usize) -> PrimAnn {
        PrimAnn {
            kind: a.kind.clone(),
            types: a.types.iter().map(|t| (self.on_type)(t, ty_depth)).collect(),
        }
    }

    fn term(&self, m: &Term, d: usize, td: usize) -> Term {
        let rec = |t: &Arc<Term>, d, td| Arc::new(self.term(t, d, td));
        match m {
            Term::Var(i, n) => (self.on_var)(*i, n, d, td),
            Term::App(f, a) => Term::App(rec(f, d, td), rec(a, d, td)),
            Term::Lam(n, p, b) => Term::Lam(n.clone(), p.as_ref().map(|t| (self.on_type)(t, td)), rec(b, d + 1, td)),
            Term::Let(n, s, a, b) => Term::Let(n.clone(), self.scheme(s, td), rec(a, d, td), rec(b, d + 1, td)),
            Term::TyLam(n, k, b) => Term::TyLam(n.clone(), k.clone(), rec(b, d, td + 1)),
            Term::TyApp(f, t) => Term::TyApp(rec(f, d, td), (self.on_type)(t, td)),
            Term::Ascribe(a, s) => Term::Ascribe(rec(a, d, td), self.scheme(s, td)),
            Term::Prim(p, ann) => {
                let p = match p {
                    Prim::Map(t, m) => Prim::Map((self.on_type)(t, td), rec(m, d, td)),
                    Prim::Fold(t, m) => Prim::Fold((self.on_type)(t, td), rec(m, d, td)),
                    Prim::Fork(a, b) => Prim::Fork(rec(a, d, td), rec(b, d, td)),
                    Prim::Join(a, b) => Prim::Join(rec(a, d, td), rec(b, d, td)),
                    other => other.clone(),
                };
                Term::Prim(p, ann.as_ref().map(|a| self.ann(a, td)))
            }
        }
    }
}

/// Shifts free term variables at or above `cutoff` by `by`.
pub fn shift_term(m: &Term, by: isize, cutoff: usize) -> Term {
    if by == 0 {
        return m.clone();
    }
    let tm = TermMap {
        on_var: &|i, n, d, _| {
            if i >= cutoff + d {
                Term::Var((i as isize + by) as usize, n.clone())
            } else {
                Term::Var(i, n.clone())
            }
        },
        on_type: &|t, _| t.clone(),
    };
    tm.term(m, 0, 0)
}

/// Shifts free type variables occurring in a term.
pub fn shift_types_in_term(m: &Term, by: isize, cutoff: usize) -> Term {
    if by == 0 {
        return m.clone();
    }
    let tm = TermMap {
        on_var: &|i, n, _, _| Term::Var(i, n.clone()),
        on_type: &|t, td| shift_type(t, by, cutoff + td),
    };
    tm.term(m, 0, 0)
}

/// `body[v/0]` for the body of a term binder.
pub fn instantiate_term(body: &Term, v: &Term) -> Term {
    let tm = TermMap {
        on_var: &|i, n, d, td| {
            if i < d {
                Term::Var(i, n.clone())
            } else if i == d {
                shift_types_in_term(&shift_term(v, d as isize, 0), td as isize, 0)
            } else {
                Term::Var(i - 1, n.clone())
            }
        },
        on_type: &|t, _| t.clone(),
    };
    tm.term(body, 0, 0)
}

/// Replaces the free term variable `index` by `v` without removing a binder.
pub fn subst_term(m: &Term, index: usize, v: &Term) -> Term {
    let tm = TermMap {
        on_var: &|i, n, d, td| {
            if i == index + d {
                shift_types_in_term(&shift_term(v, d as isize, 0), td as isize, 0)
            } else {
                Term::Var(i, n.clone())
            }
        },
        on_type: &|t, _| t.clone(),
    };
    tm.term(m, 0, 0)
}

/// `body[τ/0]` for the body of a `Λ`.
pub fn instantiate_type_in_term(body: &Term, by: &Type) -> Term {
    let tm = TermMap {
        on_var: &|i, n, _, _| Term::Var(i, n.clone()),
        on_type: &|t, td| instantiate_type_at(t, td, by),
    };
    tm.term(body, 0, 0)
}

/// Replaces the free type variable `index` inside a term.
pub fn subst_type_in_term(m: &Term, index: usize, by: &Type) -> Term {
    let tm = TermMap {
        on_var: &|i, n, _, _| Term::Var(i, n.clone()),
        on_type: &|t, td| subst_type(t, index + td, &shift(by, td as isize)),
    };
    tm.term(m, 0, 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::Kind;

    fn star() -> Kind {
        Kind::Star
    }

    #[test]
    fn list_body_substitution() {
        // (1 + (a * X))[List/a], with a = 1 and X = 0 inside λX.
        let body = Type::sum(Type::One, Type::prod(Type::var(1, "a"), Type::var(0, "X")));
        let list = Type::var(5, "List");
        let got = subst_type(&Type::lam("X", star(), body), 0, &list);
        let want = Type::lam(
            "X",
            star(),
            Type::sum(Type::One, Type::prod(Type::var(6, "List"), Type::var(0, "X"))),
        );
        assert_eq!(got, want);
    }

    #[test]
    fn substitution_avoids_capture() {
        // (λX. a)[X/a] where the outer X is free index 1 and a is index 0.
        let t = Type::lam("X", star(), Type::var(1, "a"));
        let got = subst_type(&t, 0, &Type::var(1, "X"));
        // The free X is now index 2 inside the binder; it does not point at the binder.
        assert_eq!(got, Type::lam("Y", star(), Type::var(2, "X")));
    }

    #[test]
    fn bound_occurrences_untouched() {
        let t = Type::lam("X", star(), Type::var(0, "X"));
        assert_eq!(subst_type(&t, 0, &Type::One), t);
    }

    #[test]
    fn instantiate_lowers_outer_vars() {
        // body = a(1) * X(0), instantiate X := 1
        let body = Type::prod(Type::var(1, "a"), Type::var(0, "X"));
        assert_eq!(
            instantiate_type(&body, &Type::One),
            Type::prod(Type::var(0, "a"), Type::One)
        );
    }

    #[test]
    fn term_beta_substitution() {
        // (λx. x) applied: body x[v/x] = v
        let v = Term::prim(Prim::Tt);
        assert_eq!(instantiate_term(&Term::var(0, "x"), &v), v);
        // let y = v in y
        let body = Term::var(0, "y");
        assert_eq!(instantiate_term(&body, &v), v);
    }

    #[test]
    fn type_instantiation_in_term_reaches_annotations() {
        // Λa. λ(x:a). x  instantiated with 1
        let body = Term::lam("x", Some(Type::var(0, "a")), Term::var(0, "x"));
        let got = instantiate_type_in_term(&body, &Type::One);
        assert_eq!(got, Term::lam("x", Some(Type::One), Term::var(0, "x")));
    }

    #[test]
    fn term_substitution_shifts_under_binders() {
        // (λy. x) [z/x] where z is free index 3 outside.
        let m = Term::lam("y", None, Term::var(1, "x"));
        let got = subst_term(&m, 0, &Term::var(3, "z"));
        assert_eq!(got, Term::lam("y", None, Term::var(4, "z")));
    }

    #[test]
    fn close_type_replaces_prefix() {
        let t = Type::prod(Type::var(0, "a"), Type::lam("X", star(), Type::var(2, "b")));
        let got = close_type(&t, &[Type::One, Type::Zero]);
        assert_eq!(got, Type::prod(Type::One, Type::lam("X", star(), Type::Zero)));
    }
}
