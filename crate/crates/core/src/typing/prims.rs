//! Types of annotated primitives.

use crate::kinding::{check_kind, KindCtx};
use crate::syntax::{Kind, Prim, PrimAnn, Scheme, Type};

use super::arrow::expand_arrow;
use super::TypeError;

/// The scheme of an annotated primitive, plus the schemes its components
/// must have (in order).
pub struct PrimSig {
    pub scheme: Scheme,
    pub components: Vec<Scheme>,
    pub rule: &'static str,
}

fn bad_ann(p: &Prim, msg: &str) -> TypeError {
    TypeError::BadAnnotation {
        prim: p.keyword().into(),
        message: msg.into(),
    }
}

/// Checks the kinds recorded in an annotation and computes the signature.
pub fn prim_sig(kctx: &KindCtx, p: &Prim, ann: &PrimAnn) -> Result<PrimSig, TypeError> {
    if ann.types.len() != p.annotation_width() {
        return Err(bad_ann(p, "wrong number of types"));
    }
    let k = &ann.kind;
    let t = &ann.types;
    let at = |ty: &Type, kind: &Kind| check_kind(kctx, ty, kind).map_err(TypeError::from);
    let endo = Kind::arrow(k.clone(), k.clone());
    let sig = |scheme, components, rule| {
        Ok(PrimSig {
            scheme,
            components,
            rule,
        })
    };
    match p {
        Prim::In | Prim::Unin => {
            at(&t[0], &endo)?;
            let mu = Type::mu(t[0].clone());
            let unrolled = Type::app(t[0].clone(), mu.clone());
            if matches!(p, Prim::In) {
                sig(expand_arrow(&unrolled, k, &mu), vec![], "T-In")
            } else {
                sig(expand_arrow(&mu, k, &unrolled), vec![], "T-Out")
            }
        }
        Prim::Map(tau, _) => {
            let Kind::Arrow(k1, k2) = k else {
                return Err(bad_ann(p, "map annotation needs an arrow kind"));
            };
            at(tau, k)?;
            at(&t[0], k1)?;
            at(&t[1], k1)?;
            sig(
                expand_arrow(
                    &Type::app(tau.clone(), t[0].clone()),
                    k2,
                    &Type::app(tau.clone(), t[1].clone()),
                ),
                vec![expand_arrow(&t[0], k1, &t[1])],
                "T-Map",
            )
        }
        Prim::Fold(tau, _) => {
            at(tau, &endo)?;
            at(&t[0], k)?;
            sig(
                expand_arrow(&Type::mu(tau.clone()), k, &t[0]),
                vec![expand_arrow(&Type::app(tau.clone(), t[0].clone()), k, &t[0])],
                "T-Fold",
            )
        }
        Prim::Fst | Prim::Snd => {
            at(&t[0], k)?;
            at(&t[1], k)?;
            let prod = Type::prod(t[0].clone(), t[1].clone());
            if matches!(p, Prim::Fst) {
                sig(expand_arrow(&prod, k, &t[0]), vec![], "T-Fst")
            } else {
                sig(expand_arrow(&prod, k, &t[1]), vec![], "T-Snd")
            }
        }
        Prim::Fork(..) => {
            for ty in t {
                at(ty, k)?;
            }
            sig(
                expand_arrow(&t[0], k, &Type::prod(t[1].clone(), t[2].clone())),
                vec![expand_arrow(&t[0], k, &t[1]), expand_arrow(&t[0], k, &t[2])],
                "T-Fork",
            )
        }
        Prim::Inl | Prim::Inr => {
            at(&t[0], k)?;
            at(&t[1], k)?;
            let sum = Type::sum(t[0].clone(), t[1].clone());
            if matches!(p, Prim::Inl) {
                sig(expand_arrow(&t[0], k, &sum), vec![], "T-Inl")
            } else {
                sig(expand_arrow(&t[1], k, &sum), vec![], "T-Inr")
            }
        }
        Prim::Join(..) => {
            for ty in t {
                at(ty, k)?;
            }
            sig(
                expand_arrow(&Type::sum(t[0].clone(), t[1].clone()), k, &t[2]),
                vec![expand_arrow(&t[0], k, &t[2]), expand_arrow(&t[1], k, &t[2])],
                "T-Join",
            )
        }
        Prim::Tt => {
            let ks = k.domains();
            let binders = ks
                .into_iter()
                .enumerate()
                .map(|(i, k)| (crate::syntax::name(&format!("a{i}")), k))
                .collect();
            sig(
                Scheme {
                    binders,
                    body: Type::One,
                },
                vec![],
                "T-Unit",
            )
        }
        Prim::Absurd => {
            at(&t[0], k)?;
            sig(expand_arrow(&Type::Zero, k, &t[0]), vec![], "T-Empty")
        }
    }
}
