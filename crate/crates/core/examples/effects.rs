//! Handlers over free monads: aborting, swapping signatures and catching
//! exceptions, each written as a term in the scope of a corpus file.

use xdt::corpus::{corpus_dir, load_file};
use xdt::oracle::{denote, observe};

fn run(file: &str, src: &str) {
    let entry = load_file(&corpus_dir().join(file)).expect("corpus file checks");
    let (m, s) = entry.program.elaborate_in_scope(src).expect("term checks");
    let v = denote(&m).and_then(|v| observe(&v, &s.body)).expect("observable");
    let ty = entry.program.printer().scheme(&s);
    println!("{src}\n  : {ty}\n  = {v}\n");
}

fn main() {
    run(
        "free.xdt",
        "runVoid @[Maybe Nat] (hAbort @[Void] @[Nat] (pure @[Abort + Void] @[Nat] 2))",
    );
    run(
        "free.xdt",
        "runVoid @[Maybe Nat] (hAbort @[Void] @[Nat] (abort @[Void] @[Nat]))",
    );
    run("reorder.xdt", "reorder @[Choose] @[Tick] @[Nat] (tick (ret 1))");
    run("catch.xdt", "runAbort @[Nat] (eCatch @[Nat] (catch @[Nat] (throw @[Prog Catch Nat]) (ret @[Prog Catch Nat] (ret @[Nat] 3))))");
    run("catch.xdt", "runAbort @[Nat] (eCatch @[Nat] (catch @[Nat] (ret @[Prog Catch Nat] (throw @[Nat])) (ret @[Prog Catch Nat] (ret @[Nat] 3))))");
}
