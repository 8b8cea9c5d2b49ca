//! Acceptance run: every numbered check once, one line each, plus wall-clock
//! limits where a check has one. Exits non-zero on any failure.

use std::process::ExitCode;

use qot_cli::suites;

/// Wall-clock limits in seconds, by check id.
const LIMITS: [(u8, f64); 3] = [(1, 10.0), (5, 30.0), (11, 60.0)];

fn main() -> ExitCode {
    let seed = std::env::var("QOT_SEED").ok().and_then(|s| s.parse().ok()).unwrap_or(0);
    let mut failures = 0;
    for id in 1..=13u8 {
        let o = suites::run(id, seed);
        let limit = LIMITS.iter().find(|(i, _)| *i == id).map(|&(_, l)| l);
        let in_time = limit.is_none_or(|l| o.seconds < l);
        let ok = o.passed && in_time;
        if !ok {
            failures += 1;
        }
        let budget = limit.map_or(String::new(), |l| format!(" (limit {l:.0}s)"));
        println!(
            "[{}] {:>2} {:<34} {:>7.2}s{budget}  {}",
            if ok { "PASS" } else { "FAIL" },
            id,
            o.name,
            o.seconds,
            o.detail
        );
    }
    println!("acceptance: {} of 13 passed", 13 - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
