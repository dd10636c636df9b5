//! Small-step evaluation of an extended expression language, with the
//! rule used at every step.

use std::collections::BTreeMap;

use xdt::normalize::normalize_term_types;
use xdt::oracle::observe_term;
use xdt::program::load;
use xdt::reduce::{evaluate, DEFAULT_FUEL};
use xdt::surface::print_term;

fn main() {
    let path = xdt::corpus::corpus_dir().join("mul.xdt");
    let src = std::fs::read_to_string(path).unwrap();
    let p = load(&src).expect("corpus file checks");
    let ev = evaluate(&p.to_term(), DEFAULT_FUEL, true).expect("terminates");

    let mut rules: BTreeMap<&str, usize> = BTreeMap::new();
    for s in &ev.trace {
        *rules.entry(s.rule).or_default() += 1;
    }
    for s in ev.trace.iter().rev().take(3).rev() {
        println!(
            "{:<10} {}",
            s.rule,
            print_term(&normalize_term_types(&s.term).erase_annotations())
        );
    }
    println!("\n{} steps: {rules:?}", ev.steps);
    println!("value: {}", print_term(&ev.value.erase_annotations()));
    let (_, s) = p.main.as_ref().unwrap();
    let observed = observe_term(&ev.value, &s.body, DEFAULT_FUEL).expect("observable");
    println!("as a number: {}", observed.as_nat().expect("a natural number"));
}
