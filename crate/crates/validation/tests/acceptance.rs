//! Prints one `PASS`/`FAIL` line per criterion and fails if any failed.

use quadcurl_validation::run_all;

#[test]
fn acceptance() {
    let results = run_all(|c| println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.label, c.detail));
    let failed = results.iter().filter(|c| !c.passed).count();
    println!("acceptance: {} of {} criteria passed", results.len() - failed, results.len());
    assert_eq!(failed, 0, "{failed} acceptance criteria failed");
}
