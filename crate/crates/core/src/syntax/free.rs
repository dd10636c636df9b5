use std::collections::BTreeSet;

use super::{Name, Prim, Scheme, Term, Type};

/// Which binder a type variable comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VarClass {
    /// Bound by `∀` or `Λ`; may occur with mixed variance.
    Mixed,
    /// Bound by a type-level λ; must occur strictly positively.
    Functor,
}

/// A free variable reported with its name and class.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct FreeVar {
    pub name: Name,
    pub class: VarClass,
}

impl Type {
    /// Free type variable indices, relative to the context of `self`.
    pub fn free_vars(&self) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        collect_type(self, 0, &mut out);
        out
    }

    pub fn has_free(&self, index: usize) -> bool {
        occurs(self, index)
    }

    /// Free variables resolved against a context listing `(name, class)`
    /// with the innermost binder last.
    pub fn free_vars_in(&self, ctx: &[(Name, VarClass)]) -> BTreeSet<FreeVar> {
        self.free_vars()
            .into_iter()
            .filter_map(|i| {
                let pos = ctx.len().checked_sub(i + 1)?;
                let (name, class) = &ctx[pos];
                Some(FreeVar {
                    name: name.clone(),
                    class: *class,
                })
            })
            .collect()
    }
}

fn occurs(t: &Type, index: usize) -> bool {
    match t {
        Type::Var(i, _) => *i == index,
        Type::Lam(_, _, b) => occurs(b, index + 1),
        Type::Mu(b) => occurs(b, index),
        Type::App(a, b) | Type::Fun(a, b) | Type::Prod(a, b) | Type::Sum(a, b) => occurs(a, index) || occurs(b, index),
        Type::Zero | Type::One => false,
    }
}

fn collect_type(t: &Type, depth: usize, out: &mut BTreeSet<usize>) {
    match t {
        Type::Var(i, _) => {
            if *i >= depth {
                out.insert(i - depth);
            }
        }
        Type::Lam(_, _, b) => collect_type(b, depth + 1, out),
        Type::Mu(b) => collect_type(b, depth, out),
        Type::App(a, b) | Type::Fun(a, b) | Type::Prod(a, b) | Type::Sum(a, b) => {
            collect_type(a, depth, out);
            collect_type(b, depth, out);
        }
        Type::Zero | Type::One => {}
    }
}

impl Scheme {
    pub fn free_vars(&self) -> BTreeSet<usize> {
        let n = self.binders.len();
        self.body
            .free_vars()
            .into_iter()
            .filter(|i| *i >= n)
            .map(|i| i - n)
            .collect()
    }
}

impl Term {
    /// Free term variable indices.
    pub fn free_term_vars(&self) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        collect_term(self, 0, &mut out);
        out
    }

    /// Free type variable indices occurring in annotations.
    pub fn free_type_vars(&self) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        collect_term_types(self, 0, &mut out);
        out
    }

    pub fn is_closed(&self) -> bool {
        self.free_term_vars().is_empty() && self.free_type_vars().is_empty()
    }
}

fn collect_term(m: &Term, depth: usize, out: &mut BTreeSet<usize>) {
    match m {
        Term::Var(i, _) => {
            if *i >= depth {
                out.insert(i - depth);
            }
        }
        Term::App(a, b) => {
            collect_term(a, depth, out);
            collect_term(b, depth, out);
        }
        Term::Lam(_, _, b) => collect_term(b, depth + 1, out),
        Term::Let(_, _, a, b) => {
            collect_term(a, depth, out);
            collect_term(b, depth + 1, out);
        }
        Term::TyLam(_, _, b) | Term::TyApp(b, _) | Term::Ascribe(b, _) => collect_term(b, depth, out),
        Term::Prim(p, _) => {
            for c in p.components() {
                collect_term(c, depth, out);
            }
        }
    }
}

fn add_shifted(t: &Type, depth: usize, out: &mut BTreeSet<usize>) {
    for i in t.free_vars() {
        if i >= depth {
            out.insert(i - depth);
        }
    }
}

fn collect_term_types(m: &Term, depth: usize, out: &mut BTreeSet<usize>) {
    match m {
        Term::Var(..) => {}
        Term::App(a, b) => {
            collect_term_types(a, depth, out);
            collect_term_types(b, depth, out);
        }
        Term::Lam(_, p, b) => {
            if let Some(p) = p {
                add_shifted(p, depth, out);
            }
            collect_term_types(b, depth, out);
        }
        Term::Let(_, s, a, b) => {
            for i in s.free_vars() {
                if i >= depth {
                    out.insert(i - depth);
                }
            }
            collect_term_types(a, depth, out);
            collect_term_types(b, depth, out);
        }
        Term::TyLam(_, _, b) => collect_term_types(b, depth + 1, out),
        Term::TyApp(f, t) => {
            add_shifted(t, depth, out);
            collect_term_types(f, depth, out);
        }
        Term::Ascribe(a, s) => {
            for i in s.free_vars() {
                if i >= depth {
                    out.insert(i - depth);
                }
            }
            collect_term_types(a, depth, out);
        }
        Term::Prim(p, ann) => {
            if let Prim::Map(t, _) | Prim::Fold(t, _) = p {
                add_shifted(t, depth, out);
            }
            if let Some(a) = ann {
                for t in &a.types {
                    add_shifted(t, depth, out);
                }
            }
            for c in p.components() {
                collect_term_types(c, depth, out);
            }
        }
    }
}
