//! Acceptance battery: every criterion prints one pass/fail line and the
//! test fails if any criterion does.

#[test]
fn acceptance_criteria() {
    let results = relspan::suite::acceptance();
    let mut all = true;
    for r in &results {
        println!("{}", r.line());
        all &= r.passed;
    }
    assert!(all, "some acceptance criteria failed (see lines above)");
}
