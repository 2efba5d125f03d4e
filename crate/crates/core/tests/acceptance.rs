use std::io::Write;
use std::time::Instant;

use chromalg::selftest::{criterion, SelftestConfig};

/// Bypasses the test harness capture so the verdicts show in every run.
fn say(line: &str) {
    let _ = writeln!(std::io::stderr().lock(), "{line}");
}

#[test]
fn acceptance() {
    let cfg = SelftestConfig::default();
    let mut failed = Vec::new();
    for id in 1..=10 {
        let start = Instant::now();
        let r = criterion(id, &cfg);
        say(&format!("{r} [{:.1}s]", start.elapsed().as_secs_f64()));
        for f in r.failures.iter().skip(1) {
            say(&format!("    {f}"));
        }
        if !r.passed {
            failed.push(id);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
