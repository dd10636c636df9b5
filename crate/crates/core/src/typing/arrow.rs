//! Arrow types at arbitrary kinds and their inverse.
//!
//! `A ->k B` at `k = k1 -> ... -> kn -> *` stands for the scheme
//! `forall a1:k1 ... an:kn. A a1 ... an => B a1 ... an`.

use std::sync::Arc;

use crate::normalize::normalize_type;
use crate::syntax::{name, shift, shift_type, Kind, Name, Scheme, Type};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArrowShape {
    pub dom: Type,
    pub kind: Kind,
    pub cod: Type,
}

fn binder_name(i: usize) -> Name {
    const NAMES: [&str; 4] = ["a", "b", "c", "d"];
    match NAMES.get(i) {
        Some(n) => name(n),
        None => name(&format!("a{i}")),
    }
}

/// Builds the scheme of `dom ->k cod`.
pub fn expand_arrow(dom: &Type, kind: &Kind, cod: &Type) -> Scheme {
    let ks = kind.domains();
    let n = ks.len();
    let args: Vec<Type> = (0..n).map(|i| Type::Var(n - 1 - i, binder_name(i))).collect();
    let body = Type::fun(
        Type::apps(shift(dom, n as isize), args.clone()),
        Type::apps(shift(cod, n as isize), args),
    );
    Scheme {
        binders: ks.into_iter().enumerate().map(|(i, k)| (binder_name(i), k)).collect(),
        body,
    }
}

/// Reads `σ` as an arrow at the kind given by all of its binders. Domain
/// and codomain come back normalized.
pub fn match_arrow(s: &Scheme) -> Option<ArrowShape> {
    let body = normalize_type(&s.body);
    let Type::Fun(a, b) = body else { return None };
    let wrap = |t: &Type| {
        let lam = s
            .binders
            .iter()
            .rev()
            .fold(t.clone(), |acc, (n, k)| Type::Lam(n.clone(), k.clone(), Arc::new(acc)));
        normalize_type(&lam)
    };
    Some(ArrowShape {
        dom: wrap(&a),
        kind: Kind::from_args(&s.binders.iter().map(|b| b.1.clone()).collect::<Vec<_>>(), Kind::Star),
        cod: wrap(&b),
    })
}

/// Finds `t` such that `nf(pattern[t/hole]) = target`, where `pattern` is
/// normal and mentions the hole (index 0 of its context) only in Miller
/// pattern positions. `target` lives in the same context as `pattern`,
/// which has the hole as its innermost entry. The solution is returned
/// relative to the context without the hole.
pub fn solve_hole(pattern: &Type, target: &Type) -> Option<Type> {
    let mut m = Matcher {
        solution: None,
        kinds: Vec::new(),
    };
    if m.go(pattern, target, 0) {
        m.solution
    } else {
        None
    }
}

struct Matcher {
    solution: Option<Type>,
    /// Kinds and names of binders crossed inside the pattern, outermost first.
    kinds: Vec<(Name, Kind)>,
}

impl Matcher {
    fn go(&mut self, p: &Type, t: &Type, depth: usize) -> bool {
        let (head, args) = p.spine();
        if matches!(head, Type::Var(i, _) if *i == depth) {
            let vars: Option<Vec<usize>> = args
                .iter()
                .map(|a| match a {
                    Type::Var(j, _) if *j < depth => Some(*j),
                    _ => None,
                })
                .collect();
            let Some(vars) = vars else { return true };
            let distinct = vars.iter().enumerate().all(|(i, v)| !vars[..i].contains(v));
            if !distinct {
                return true;
            }
            return match self.abstract_over(t, &vars, depth) {
                Some(cand) => match &self.solution {
                    Some(prev) => *prev == cand,
                    None => {
                        self.solution = Some(cand);
                        true
                    }
                },
                None => false,
            };
        }
        match (p, t) {
            (Type::Var(a, _), Type::Var(b, _)) => a == b,
            (Type::App(f, a), Type::App(g, b)) => self.go(f, g, depth) && self.go(a, b, depth),
            (Type::Lam(n, k, a), Type::Lam(_, l, b)) => {
                if k != l {
                    return false;
                }
                self.kinds.push((n.clone(), k.clone()));
                let ok = self.go(a, b, depth + 1);
                self.kinds.pop();
                ok
            }
            (Type::Mu(a), Type::Mu(b)) => self.go(a, b, depth),
            (Type::Fun(a, b), Type::Fun(c, d))
            | (Type::Prod(a, b), Type::Prod(c, d))
            | (Type::Sum(a, b), Type::Sum(c, d)) => self.go(a, c, depth) && self.go(b, d, depth),
            (Type::Zero, Type::Zero) | (Type::One, Type::One) => true,
            _ => false,
        }
    }

    /// `\x1..xm. t` where `xi` replaces the pattern-bound variable
    /// `vars[i]`; fails if `t` mentions other pattern-bound variables or
    /// the hole.
    fn abstract_over(&self, t: &Type, vars: &[usize], depth: usize) -> Option<Type> {
        let m = vars.len();
        let body = rename(t, 0, &|v, e| {
            if v < e {
                return Some(v);
            }
            let g = v - e;
            if g < depth {
                let i = vars.iter().position(|x| *x == g)?;
                Some(e + (m - 1 - i))
            } else if g == depth {
                None
            } else {
                // outer context, minus the hole
                Some(e + m + (g - depth - 1))
            }
        })?;
        let lam = vars.iter().rev().fold(body, |acc, v| {
            let (n, k) = self.kinds[self.kinds.len() - 1 - v].clone();
            Type::Lam(n, k, Arc::new(acc))
        });
        Some(normalize_type(&lam))
    }
}

fn rename(t: &Type, e: usize, f: &dyn Fn(usize, usize) -> Option<usize>) -> Option<Type> {
    let r = |x: &Arc<Type>, e| rename(x, e, f).map(Arc::new);
    Some(match t {
        Type::Var(i, n) => Type::Var(f(*i, e)?, n.clone()),
        Type::App(a, b) => Type::App(r(a, e)?, r(b, e)?),
        Type::Lam(n, k, b) => Type::Lam(n.clone(), k.clone(), r(b, e + 1)?),
        Type::Mu(b) => Type::Mu(r(b, e)?),
        Type::Fun(a, b) => Type::Fun(r(a, e)?, r(b, e)?),
        Type::Prod(a, b) => Type::Prod(r(a, e)?, r(b, e)?),
        Type::Sum(a, b) => Type::Sum(r(a, e)?, r(b, e)?),
        Type::Zero => Type::Zero,
        Type::One => Type::One,
    })
}

/// Solves `nf(index X) = target` for `X`, with `index` and `target` in the
/// same context.
pub fn solve_index(index: &Type, target: &Type) -> Option<Type> {
    let pattern = normalize_type(&Type::app(shift(index, 1), Type::Var(0, name("X"))));
    solve_hole(&pattern, &shift_type(&normalize_type(target), 1, 0))
}
