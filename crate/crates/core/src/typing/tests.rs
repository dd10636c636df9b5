use super::*;
use crate::surface::{parse, parse_scheme, parse_term};

const PRELUDE: &str = "
type Nat = mu(\\X:*. 1 + X);
type Expr = \\X:*. Nat + X * X;
type Free = \\f:* -> *. \\a:*. mu(\\X:*. a + f X);
let add : Nat => Nat => Nat = \\m. fold[\\X:*. 1 + X](join(\\u. \\n. n, \\r. \\n. in (inr (r n)))) m;
";

fn prelude_ctx(extra: &str) -> (TyCtx, crate::surface::SourceFile) {
    let f = parse(&format!("{PRELUDE}{extra}")).unwrap();
    let mut ctx = TyCtx::new();
    for (n, s, m) in f.let_decls() {
        check_term(&ctx, m, s).unwrap_or_else(|e| panic!("{n}: {e}"));
        ctx.push_term(n.into(), s.clone());
    }
    (ctx, f)
}

#[test]
fn eval_checks_against_fold_arrow() {
    let (ctx, f) = prelude_ctx("fold[Expr](join(\\x. x, \\x. add (fst x) (snd x)));");
    let nat = f.type_decl("Nat").unwrap();
    let expr = f.type_decl("Expr").unwrap();
    let s = expand_arrow(&Type::mu(expr.clone()), &Kind::Star, nat);
    let m = check_term(&ctx, f.main.as_ref().unwrap(), &s).unwrap();
    audit(&ctx, &m, &s).unwrap();
}

#[test]
fn ascribed_inl_synthesizes() {
    let m = parse_term("(inl : forall a b. a => a + b)").unwrap();
    let (elab, s) = infer_term(&TyCtx::new(), &m).unwrap();
    assert_eq!(s, parse_scheme("forall a b. a => a + b").unwrap());
    let d = derive(&TyCtx::new(), &elab).unwrap();
    assert!(types_equivalent(&d.scheme, &s));
}

#[test]
fn reorder_checks() {
    let (ctx, f) = prelude_ctx("/\\f:* -> * g:* -> *. map[Free](join(inr, inl));");
    let s = parse_scheme("forall f:* -> * g:* -> * a. mu(\\X:*. a + (f + g) X) => mu(\\X:*. a + (g + f) X)").unwrap();
    let m = check_term(&ctx, f.main.as_ref().unwrap(), &s).unwrap();
    audit(&ctx, &m, &s).unwrap();
}

#[test]
fn identity_and_type_application() {
    let m = parse_term("let id : forall a. a => a = /\\a. \\x. x in id @[1] tt").unwrap();
    let (elab, s) = infer_term(&TyCtx::new(), &m).unwrap();
    assert_eq!(s, Scheme::mono(Type::One));
    audit(&TyCtx::new(), &elab, &s).unwrap();
}

#[test]
fn mismatch_is_reported() {
    let m = parse_term("(tt : 0)").unwrap();
    assert!(matches!(
        infer_term(&TyCtx::new(), &m),
        Err(TypeError::ArrowShapeMismatch { .. })
    ));
    let m = parse_term("((\\x. x) : 1 => 0)").unwrap();
    assert!(matches!(
        infer_term(&TyCtx::new(), &m),
        Err(TypeError::TypeMismatch { .. })
    ));
}

#[test]
fn bare_primitive_cannot_synthesize() {
    let m = parse_term("inl").unwrap();
    assert!(matches!(
        infer_term(&TyCtx::new(), &m),
        Err(TypeError::CannotSynthesize(_))
    ));
}

#[test]
fn type_application_needs_forall() {
    let m = parse_term("tt @[1]").unwrap();
    assert!(matches!(
        infer_term(&TyCtx::new(), &m),
        Err(TypeError::NotAForall { .. })
    ));
}

#[test]
fn literals_and_addition() {
    let (ctx, f) = prelude_ctx("add 2 3;");
    let (elab, s) = infer_term(&ctx, f.main.as_ref().unwrap()).unwrap();
    assert!(types_equivalent(&s, &Scheme::mono(f.type_decl("Nat").unwrap().clone())));
    audit(&ctx, &elab, &s).unwrap();
}

#[test]
fn conversion_is_stable() {
    let m = parse_term("\\(x : (\\X:*. X * X) 1). fst x").unwrap();
    let (_, s) = infer_term(&TyCtx::new(), &m).unwrap();
    let other = parse_scheme("1 * 1 => 1").unwrap();
    assert!(check_term(&TyCtx::new(), &m, &other).is_ok());
    assert!(types_equivalent(&s, &other));
}

#[test]
fn in_at_applied_recursive_type() {
    let src = "/\\b. \\(x : b). (in (inl x) : (mu(\\X:* -> *. \\a:*. a + X a)) b);";
    let f = parse(src).unwrap();
    let (elab, s) = infer_term(&TyCtx::new(), f.main.as_ref().unwrap()).unwrap();
    audit(&TyCtx::new(), &elab, &s).unwrap();
}

#[test]
fn escaping_kinds_are_rejected() {
    let m = parse_term("/\\f:* -> *. \\(x : f). x").unwrap();
    assert!(matches!(infer_term(&TyCtx::new(), &m), Err(TypeError::Kind(_))));
}
