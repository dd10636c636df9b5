//! Checks every bundled program against its expectation file.

fn main() {
    let entries = xdt::corpus::load_corpus().expect("corpus loads");
    let mut failed = 0;
    for e in &entries {
        match xdt::corpus::verify(e) {
            Ok(x) => println!(
                "ok   {:<8} {} steps, {}",
                e.name(),
                x.steps.unwrap_or(0),
                x.observation.unwrap_or_default()
            ),
            Err(err) => {
                failed += 1;
                println!("FAIL {err}");
            }
        }
    }
    std::process::exit(if failed == 0 { 0 } else { 1 });
}
