//! Bidirectional checking with elaboration, an independent derivation
//! of the result and a type error.

use xdt::program::load;
use xdt::typing::{audit, TyCtx};

const SRC: &str = r"
type Free = \f:* -> *. \a:*. mu(\X:*. a + f X);
let reorder : forall f:* -> * g:* -> * a. Free (f + g) a => Free (g + f) a =
  /\f:* -> * g:* -> *. map[Free](join(inr, inl));
";

fn main() {
    let p = load(SRC).expect("type-checks");
    for line in p.describe() {
        println!("{line}");
    }
    let (scheme, term) = p.let_decl("reorder").unwrap();
    println!("\nelaborated: {term}");
    let d = audit(&TyCtx::new(), term, scheme).expect("derivation");
    println!("derivation with {} nodes, rules used: {:?}", d.size(), {
        let mut r = d.rules();
        r.sort();
        r.dedup();
        r
    });

    match load("let bad : forall a. a => a = /\\a. \\x. tt;") {
        Ok(_) => println!("unexpectedly accepted"),
        Err(e) => println!("\nrejected: {e}"),
    }
}
