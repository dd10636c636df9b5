//! Parses a program, prints it back and checks the round trip.

use xdt::surface::{parse, print_file, print_term};

const SRC: &str = r"
type Free = \f:* -> *. \a:*. mu(\X:*. a + f X);
let pure : forall f:* -> * a. a => Free f a = /\f:* -> * a. \x. in (inl x);
let twice : forall a. (a => a) => a => a = /\a. \f x. f (f x);
twice @[1] (\x. x) tt;
";

fn main() {
    let file = parse(SRC).expect("parses");
    let printed = print_file(&file);
    println!("{printed}");
    let again = parse(&printed).expect("printed text parses");
    assert!(again.alpha_eq(&file));
    println!("round trip: alpha-equal");

    let shadowed = xdt::surface::parse_term(r"\x. \y. (\x. x y) x").unwrap();
    println!("{}", print_term(&shadowed));
}
