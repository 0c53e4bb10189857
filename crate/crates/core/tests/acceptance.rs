//! Runs every row of the reproduction table and prints one line per row.

use unitfield::repro::{self, CriterionOutcome};

fn line(o: &CriterionOutcome) -> String {
    let mut s = format!(
        "{} criterion {:<3} {} ({:.2} s)",
        if o.passed { "PASS" } else { "FAIL" },
        o.id,
        o.title,
        o.elapsed_s
    );
    if let Some(e) = &o.error {
        s.push_str(&format!(" error: {e}"));
    }
    for c in o.failures() {
        s.push_str(&format!("\n      {}: {:.6e} vs limit {:.3e}", c.name, c.value, c.limit));
    }
    s
}

#[test]
fn acceptance() {
    let outcomes = repro::run_all();
    for o in &outcomes {
        println!("\n{}", line(o));
    }
    let failed: Vec<&str> = outcomes.iter().filter(|o| !o.passed).map(|o| o.id.as_str()).collect();
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
