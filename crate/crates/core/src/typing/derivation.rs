//! Typing derivations for elaborated terms.
//!
//! [`derive`] rebuilds a derivation tree for a fully annotated term using
//! only the declarative rules read syntax-directedly, with an explicit
//! `T-Conv` node wherever two types are identified up to normalization.
//! It shares no code with the bidirectional checker beyond the primitive
//! signatures, so agreement between the two is a meaningful audit.

use std::fmt;

use crate::kinding::{check_kind, check_scheme};
use crate::normalize::{normalize_type, types_equivalent};
use crate::syntax::{instantiate_scheme, Scheme, Term, Type};

use super::prims::prim_sig;
use super::{TyCtx, TypeError};

#[derive(Clone, Debug)]
pub struct Derivation {
    pub rule: &'static str,
    pub subject: Term,
    pub scheme: Scheme,
    pub premises: Vec<Derivation>,
}

impl Derivation {
    pub fn size(&self) -> usize {
        1 + self.premises.iter().map(Derivation::size).sum::<usize>()
    }

    pub fn rules(&self) -> Vec<&'static str> {
        let mut out = vec![self.rule];
        for p in &self.premises {
            out.extend(p.rules());
        }
        out
    }

    fn write(&self, f: &mut fmt::Formatter<'_>, indent: usize) -> fmt::Result {
        let mut subject = self.subject.to_string();
        if subject.chars().count() > 80 {
            subject = subject.chars().take(77).collect::<String>() + "...";
        }
        writeln!(
            f,
            "{:indent$}{}  {} : {}",
            "",
            self.rule,
            subject,
            self.scheme,
            indent = indent
        )?;
        for p in &self.premises {
            p.write(f, indent + 2)?;
        }
        Ok(())
    }
}

impl fmt::Display for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f, 0)
    }
}

type R<T> = Result<T, TypeError>;

fn node(rule: &'static str, m: &Term, scheme: Scheme, premises: Vec<Derivation>) -> Derivation {
    Derivation {
        rule,
        subject: m.clone(),
        scheme,
        premises,
    }
}

/// Wraps `d` in a conversion to `target` when its scheme differs
/// syntactically.
fn conv(ctx: &TyCtx, m: &Term, d: Derivation, target: &Scheme) -> R<Derivation> {
    if d.scheme == *target {
        return Ok(d);
    }
    if !types_equivalent(&d.scheme, target) {
        return Err(TypeError::TypeMismatch {
            term: ctx.show_term(m),
            expected: ctx.show_scheme(target),
            found: ctx.show_scheme(&d.scheme),
        });
    }
    Ok(node("T-Conv", m, target.clone(), vec![d]))
}

fn function(ctx: &TyCtx, m: &Term, s: &Scheme) -> R<(Type, Type)> {
    if s.is_mono() {
        if let Type::Fun(a, b) = normalize_type(&s.body) {
            return Ok(((*a).clone(), (*b).clone()));
        }
    }
    Err(TypeError::TypeMismatch {
        term: ctx.show_term(m),
        expected: "a function".into(),
        found: ctx.show_scheme(s),
    })
}

/// Derives the type of an elaborated term.
pub fn derive(ctx: &TyCtx, m: &Term) -> R<Derivation> {
    let mut ctx = ctx.clone();
    go(&mut ctx, m)
}

fn go(ctx: &mut TyCtx, m: &Term) -> R<Derivation> {
    match m {
        Term::Var(i, _) => Ok(node("T-Var", m, ctx.lookup(*i)?, vec![])),
        Term::App(f, a) => {
            let df = go(ctx, f)?;
            let (dom, cod) = function(ctx, f, &df.scheme)?;
            let da = go(ctx, a)?;
            let da = conv(ctx, a, da, &Scheme::mono(dom))?;
            Ok(node("T-App", m, Scheme::mono(cod), vec![df, da]))
        }
        Term::Lam(x, Some(p), body) => {
            check_kind(&ctx.kinds, p, &crate::syntax::Kind::Star)?;
            ctx.push_term(x.clone(), Scheme::mono(p.clone()));
            let db = go(ctx, body);
            ctx.pop_term();
            let db = db?;
            if !db.scheme.is_mono() {
                return Err(TypeError::CannotSynthesize(ctx.show_term(m)));
            }
            let s = Scheme::mono(Type::fun(p.clone(), db.scheme.body.clone()));
            Ok(node("T-Abs", m, s, vec![db]))
        }
        Term::Lam(_, None, _) | Term::Ascribe(..) => Err(TypeError::CannotSynthesize(ctx.show_term(m))),
        Term::Let(x, s, bound, body) => {
            check_scheme(&ctx.kinds, s)?;
            let db = go(ctx, bound)?;
            let db = conv(ctx, bound, db, s)?;
            ctx.push_term(x.clone(), s.clone());
            let dbody = go(ctx, body);
            ctx.pop_term();
            let dbody = dbody?;
            let out = dbody.scheme.clone();
            Ok(node("T-Let", m, out, vec![db, dbody]))
        }
        Term::TyLam(n, k, body) => {
            ctx.push_type(n.clone(), k.clone());
            let db = go(ctx, body);
            ctx.pop_type();
            let db = db?;
            let mut binders = vec![(n.clone(), k.clone())];
            binders.extend(db.scheme.binders.iter().cloned());
            let s = Scheme {
                binders,
                body: db.scheme.body.clone(),
            };
            Ok(node("T-TypeAbs", m, s, vec![db]))
        }
        Term::TyApp(f, t) => {
            let df = go(ctx, f)?;
            let Some((_, k)) = df.scheme.binders.first() else {
                return Err(TypeError::NotAForall {
                    term: ctx.show_term(f),
                    found: ctx.show_scheme(&df.scheme),
                });
            };
            check_kind(&ctx.kinds, t, k)?;
            let s = instantiate_scheme(&df.scheme, t);
            Ok(node("T-TypeApp", m, s, vec![df]))
        }
        Term::Prim(_, None) => Err(TypeError::CannotSynthesize(ctx.show_term(m))),
        Term::Prim(p, Some(ann)) => {
            let sig = prim_sig(&ctx.kinds, p, ann)?;
            let mut premises = Vec::new();
            for (c, s) in p.components().into_iter().zip(&sig.components) {
                let dc = go(ctx, c)?;
                premises.push(conv(ctx, c, dc, s)?);
            }
            Ok(node(sig.rule, m, sig.scheme, premises))
        }
    }
}

/// Checks that `m` derives a scheme equivalent to `expected`.
pub fn audit(ctx: &TyCtx, m: &Term, expected: &Scheme) -> R<Derivation> {
    let d = derive(ctx, m)?;
    conv(ctx, m, d, expected)
}
