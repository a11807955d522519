//! The corpus is its own regression suite: every stored verdict must
//! reproduce from a clean state.

use subsym_core::corpus;

#[test]
fn every_stored_verdict_reproduces() {
    let mut checked = 0usize;
    for id in corpus::ids() {
        let sf = corpus::load(id).unwrap_or_else(|e| panic!("{id}: parse failed: {e}"));
        for exp in &sf.expectations {
            corpus::verify_expectation(&sf, exp)
                .unwrap_or_else(|e| panic!("{id}: {exp:?}: {e}"));
            checked += 1;
        }
    }
    assert!(checked >= 50, "expected a substantial expectation set, got {checked}");
}
