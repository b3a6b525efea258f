//! One PASS/FAIL line per acceptance criterion. Tolerances live in
//! `cutplane::verify`; this file only reports and asserts.
//!
//! Criterion 9 currently fails on two of its checks; see the README section
//! "Known limitations". The assertion is kept so the failure stays visible.

use cutplane::verify;

#[test]
fn acceptance() {
    let results = verify::run_all();
    for r in &results {
        println!("{}", r.line());
        for c in &r.checks {
            let mark = if c.passed { "ok  " } else { "FAIL" };
            println!(
                "    {mark} {}: {:.3e} (tol {:.1e}){}",
                c.name,
                c.value,
                c.tolerance,
                c.note.as_ref().map_or(String::new(), |n| format!(" [{n}]"))
            );
        }
    }
    let coverage = verify::exercise_identifiers();
    let missing: Vec<_> = coverage.iter().filter(|c| !c.raised).map(|c| c.code).collect();
    println!(
        "{} identifier coverage: {}/{} raised{}",
        if missing.is_empty() { "PASS" } else { "FAIL" },
        coverage.len() - missing.len(),
        coverage.len(),
        if missing.is_empty() { String::new() } else { format!(", missing {missing:?}") }
    );
    let failed: Vec<u32> = results.iter().filter(|r| !r.passed).map(|r| r.id).collect();
    assert!(missing.is_empty(), "identifiers never raised: {missing:?}");
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
