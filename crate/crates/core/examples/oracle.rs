//! The denotational interpreter next to the small-step machine.

use xdt::oracle::{denote, observe, observe_term};
use xdt::reduce::DEFAULT_FUEL;

fn main() {
    for entry in xdt::corpus::load_corpus().expect("corpus loads") {
        let Some((_, s)) = &entry.program.main else { continue };
        let m = entry.program.to_term();
        let big = denote(&m).and_then(|v| observe(&v, &s.body)).expect("oracle");
        let small = observe_term(&m, &s.body, DEFAULT_FUEL).expect("small-step");
        let n = big.as_nat().map(|n| format!(" = {n}")).unwrap_or_default();
        println!(
            "{:<8} {}  {big}{n}",
            entry.name(),
            if big == small { "agree   " } else { "DISAGREE" }
        );
    }
}
