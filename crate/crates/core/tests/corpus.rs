use xdt::corpus::{load_corpus, verify};

#[test]
fn every_corpus_file_meets_its_expectation() {
    let entries = load_corpus().unwrap();
    assert!(entries.len() >= 8);
    for e in &entries {
        verify(e).unwrap_or_else(|err| panic!("{err}"));
    }
}
