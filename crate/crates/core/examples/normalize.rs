//! Type normalization, shown one rewrite at a time.

use xdt::normalize::{normalize_type, redex_positions, rewrite_at, types_equivalent};
use xdt::surface::{parse_type, print_type};
use xdt::syntax::Scheme;

fn main() {
    let t = parse_type(r"(\f:* -> *. \a:*. mu(\X:*. a + f X)) (\X:*. X * X) 1").unwrap();
    let mut cur = t.clone();
    println!("   {}", print_type(&cur));
    while let Some(p) = redex_positions(&cur).first().cloned() {
        cur = rewrite_at(&cur, &p).unwrap();
        println!("=> {}", print_type(&cur));
    }
    assert_eq!(cur, normalize_type(&t));

    let a = parse_type(r"(\X:*. 1 + X) * (\X:*. X)").unwrap();
    let b = parse_type(r"\X:*. (1 + X) * X").unwrap();
    println!(
        "\n{} and {} are equivalent: {}",
        print_type(&a),
        print_type(&b),
        types_equivalent(&Scheme::mono(a.clone()), &Scheme::mono(b.clone()))
    );
}
