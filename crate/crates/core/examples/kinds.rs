//! Kind inference for type declarations, and a rejected type.

use xdt::kinding::{infer_kind, KindCtx};
use xdt::program::load;
use xdt::surface::parse_type;

const SRC: &str = r"
type Free = \f:* -> *. \a:*. mu(\X:*. a + f X);
type Prog = \f:(* -> *) -> * -> *. mu(\X:* -> *. \a:*. a + f X a);
type Catch = \X:* -> *. \a:*. 1 + X (X a) * X (X a);
type List = \a:*. mu(\X:*. 1 + a * X);
";

fn main() {
    let p = load(SRC).expect("well-kinded");
    for name in ["Free", "Prog", "Catch", "List"] {
        let (_, k) = p.type_decl(name).unwrap();
        println!("{name} :: {k}");
    }

    // A functor variable may not appear to the left of an arrow.
    let bad = parse_type(r"\X:*. X => 1").unwrap();
    match infer_kind(&KindCtx::new(), &bad) {
        Ok(k) => println!("unexpectedly kinded: {k}"),
        Err(e) => println!("rejected: {e}"),
    }
}
