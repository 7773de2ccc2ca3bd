//! Acceptance suite: runs every criterion with the pinned seed and prints one
//! pass/fail line per criterion.

use levy_noise::validate::{run_all, DEFAULT_SEED};

#[test]
fn acceptance_criteria() {
    let results = run_all(DEFAULT_SEED).expect("suite must run to completion");
    let mut all_ok = true;
    for r in &results {
        let status = if r.passed { "PASS" } else { "FAIL" };
        println!("criterion {:>2} [{status}] {} — {}", r.id, r.name, r.summary);
        for d in &r.details {
            println!("             {d}");
        }
        all_ok &= r.passed;
    }
    assert!(all_ok, "acceptance criteria failed; see lines above");
}
