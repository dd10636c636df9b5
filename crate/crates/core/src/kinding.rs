//! Well-formedness of types and schemes.
//!
//! Kinds are synthesized bottom-up. The constants `0` and `1` and the
//! pointwise `×`/`+` are polykinded, so synthesis works over partial kinds
//! in which [`PKind::Any`] stands for "any kind fits here"; partial kinds
//! are merged where two subterms must agree. A leftover `Any` defaults to
//! `*` when a concrete kind is requested.
//!
//! Functorial variables (bound by type-level λ) are hidden while checking
//! the domain of `=>`, which enforces strict positivity.

use thiserror::Error;

use crate::syntax::{Kind, Name, Scheme, Type, VarClass};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KindError {
    #[error("unbound type variable #{0}")]
    UnboundTypeVar(usize),
    #[error("kind mismatch in {location}: expected {expected}, found {actual}")]
    KindMismatch {
        expected: String,
        actual: String,
        location: String,
    },
    #[error("functorial variable `{0}` occurs in the domain of a function type")]
    FunctorVarInDomain(String),
    #[error("body of mu has kind {0}, which is not of the form k -> k")]
    MuBodyNotEndo(String),
    #[error("scheme body has kind {0}, expected *")]
    SchemeBodyNotStar(String),
}

/// A kind with holes for polykinded positions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PKind {
    Any,
    Star,
    Arrow(Box<PKind>, Box<PKind>),
}

impl PKind {
    fn arrow(a: PKind, b: PKind) -> PKind {
        PKind::Arrow(Box::new(a), Box::new(b))
    }

    /// Replaces every hole by `*`.
    pub fn default_star(&self) -> Kind {
        match self {
            PKind::Any | PKind::Star => Kind::Star,
            PKind::Arrow(a, b) => Kind::arrow(a.default_star(), b.default_star()),
        }
    }

    /// The most specific partial kind compatible with both, if any.
    pub fn join(&self, other: &PKind) -> Option<PKind> {
        match (self, other) {
            (PKind::Any, k) | (k, PKind::Any) => Some(k.clone()),
            (PKind::Star, PKind::Star) => Some(PKind::Star),
            (PKind::Arrow(a, b), PKind::Arrow(c, d)) => Some(PKind::arrow(a.join(c)?, b.join(d)?)),
            _ => None,
        }
    }

    fn show(&self) -> String {
        match self {
            PKind::Any => "_".into(),
            PKind::Star => "*".into(),
            PKind::Arrow(a, b) => match **a {
                PKind::Arrow(..) => format!("({}) -> {}", a.show(), b.show()),
                _ => format!("{} -> {}", a.show(), b.show()),
            },
        }
    }
}

impl From<&Kind> for PKind {
    fn from(k: &Kind) -> PKind {
        match k {
            Kind::Star => PKind::Star,
            Kind::Arrow(a, b) => PKind::arrow((&**a).into(), (&**b).into()),
        }
    }
}

#[derive(Clone, Debug)]
struct Entry {
    name: Name,
    kind: Kind,
    class: VarClass,
    hidden: bool,
}

/// The combined Δ/Φ context. Entries are ordered outermost first; the
/// class of each entry records whether it lives in Δ or Φ.
#[derive(Clone, Debug, Default)]
pub struct KindCtx {
    entries: Vec<Entry>,
}

impl KindCtx {
    pub fn new() -> KindCtx {
        KindCtx::default()
    }

    /// A Δ-only context from `∀` binders (outermost first).
    pub fn from_mixed(binders: &[(Name, Kind)]) -> KindCtx {
        let mut ctx = KindCtx::new();
        for (n, k) in binders {
            ctx.push(n.clone(), k.clone(), VarClass::Mixed);
        }
        ctx
    }

    pub fn push(&mut self, name: Name, kind: Kind, class: VarClass) {
        self.entries.push(Entry {
            name,
            kind,
            class,
            hidden: false,
        });
    }

    pub fn pop(&mut self) {
        self.entries.pop();
    }

    pub fn with(&self, name: Name, kind: Kind, class: VarClass) -> KindCtx {
        let mut c = self.clone();
        c.push(name, kind, class);
        c
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Kind of variable `index` (0 = innermost).
    pub fn kind_of(&self, index: usize) -> Option<&Kind> {
        let pos = self.entries.len().checked_sub(index + 1)?;
        Some(&self.entries[pos].kind)
    }

    pub fn names(&self) -> Vec<(Name, VarClass)> {
        self.entries.iter().map(|e| (e.name.clone(), e.class)).collect()
    }

    /// Copy of the context with Φ emptied.
    fn without_functors(&self) -> KindCtx {
        KindCtx {
            entries: self
                .entries
                .iter()
                .map(|e| Entry {
                    hidden: e.hidden || e.class == VarClass::Functor,
                    ..e.clone()
                })
                .collect(),
        }
    }

    fn lookup(&self, index: usize) -> Result<&Entry, KindError> {
        let pos = self
            .entries
            .len()
            .checked_sub(index + 1)
            .ok_or(KindError::UnboundTypeVar(index))?;
        let e = &self.entries[pos];
        if e.hidden {
            return Err(KindError::FunctorVarInDomain(e.name.to_string()));
        }
        Ok(e)
    }
}

fn mismatch(expected: &PKind, actual: &PKind, ty: &Type) -> KindError {
    KindError::KindMismatch {
        expected: expected.show(),
        actual: actual.show(),
        location: format!("`{ty}`"),
    }
}

/// Synthesizes the partial kind of `ty`.
pub fn synth_kind(ctx: &KindCtx, ty: &Type) -> Result<PKind, KindError> {
    match ty {
        Type::Var(i, _) => Ok((&ctx.lookup(*i)?.kind).into()),
        Type::App(f, a) => match synth_kind(ctx, f)? {
            PKind::Arrow(dom, cod) => {
                check_pkind(ctx, a, &dom)?;
                Ok(*cod)
            }
            PKind::Any => {
                synth_kind(ctx, a)?;
                Ok(PKind::Any)
            }
            PKind::Star => Err(mismatch(&PKind::arrow(PKind::Any, PKind::Any), &PKind::Star, f)),
        },
        Type::Lam(n, k, body) => {
            let inner = ctx.with(n.clone(), k.clone(), VarClass::Functor);
            Ok(PKind::arrow(k.into(), synth_kind(&inner, body)?))
        }
        Type::Mu(body) => match synth_kind(ctx, body)? {
            PKind::Any => Ok(PKind::Any),
            PKind::Arrow(a, b) => a
                .join(&b)
                .ok_or_else(|| KindError::MuBodyNotEndo(PKind::Arrow(a.clone(), b.clone()).show())),
            PKind::Star => Err(KindError::MuBodyNotEndo("*".into())),
        },
        Type::Fun(a, b) => {
            check_pkind(&ctx.without_functors(), a, &PKind::Star)?;
            check_pkind(ctx, b, &PKind::Star)?;
            Ok(PKind::Star)
        }
        Type::Zero | Type::One => Ok(PKind::Any),
        Type::Prod(a, b) | Type::Sum(a, b) => {
            let ka = synth_kind(ctx, a)?;
            let kb = synth_kind(ctx, b)?;
            ka.join(&kb).ok_or_else(|| mismatch(&ka, &kb, b))
        }
    }
}

/// Checks `ty` against a partial kind, returning the refined kind.
pub fn check_pkind(ctx: &KindCtx, ty: &Type, expected: &PKind) -> Result<PKind, KindError> {
    let actual = synth_kind(ctx, ty)?;
    expected.join(&actual).ok_or_else(|| mismatch(expected, &actual, ty))
}

/// `Δ;Φ ⊢ τ : k` for a given `k`.
pub fn check_kind(ctx: &KindCtx, ty: &Type, expected: &Kind) -> Result<(), KindError> {
    check_pkind(ctx, ty, &expected.into()).map(|_| ())
}

/// Infers the kind of `ty`, defaulting polykinded positions to `*`.
pub fn infer_kind(ctx: &KindCtx, ty: &Type) -> Result<Kind, KindError> {
    Ok(synth_kind(ctx, ty)?.default_star())
}

/// `Δ ⊢ σ : scheme`: binders extend Δ and the body must have kind `*`
/// with Φ empty.
pub fn check_scheme(ctx: &KindCtx, s: &Scheme) -> Result<(), KindError> {
    let mut inner = ctx.without_functors();
    for (n, k) in &s.binders {
        inner.push(n.clone(), k.clone(), VarClass::Mixed);
    }
    let k = synth_kind(&inner, &s.body)?;
    match k.join(&PKind::Star) {
        Some(_) => Ok(()),
        None => Err(KindError::SchemeBodyNotStar(k.show())),
    }
}
