//! Acceptance battery: one PASS/FAIL line per criterion, nonzero exit if
//! any criterion fails. Detail lines for every individual check follow
//! each criterion.

use std::process::ExitCode;
use std::time::Instant;

use awtp_core::verify::{self, Check};
use awtp_core::Result;

const SEED: u64 = 20_240_901;
const TRIALS: u64 = 10_000;
const SESSIONS: u64 = 1_000;

fn criteria() -> Vec<(&'static str, Box<dyn Fn() -> Result<Vec<Check>>>)> {
    vec![
        ("1 correctness (passive, 10^3 sessions per variant)", Box::new(|| verify::correctness(SESSIONS, SEED))),
        ("2 strong reliability (10^4 sessions per strategy)", Box::new(|| verify::strong_reliability(TRIALS, SEED))),
        ("3 perfect secrecy (exhaustive)", Box::new(verify::perfect_secrecy)),
        ("4 MAC forgery (exhaustive, q=7, l=2)", Box::new(verify::mac_forgery)),
        ("5 AMD security (exhaustive, q=7, d=1)", Box::new(verify::amd_security)),
        ("6 extractor exactness (q=11, N<=4)", Box::new(verify::extractor)),
        ("7 LV code", Box::new(|| verify::lv_code(TRIALS, SEED))),
        ("8 rate vs bound", Box::new(verify::rate_vs_bound)),
        (
            "9 weak reliability and weak rate",
            Box::new(|| {
                let mut c = verify::weak_reliability(TRIALS, SEED)?;
                c.extend(verify::weak_rate()?);
                Ok(c)
            }),
        ),
        ("10 mutual-information identities", Box::new(verify::mutual_information)),
    ]
}

fn main() -> ExitCode {
    let mut failed = 0;
    for (name, run) in criteria() {
        let start = Instant::now();
        let result = run();
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(checks) => {
                let pass = checks.iter().all(|c| c.pass);
                failed += (!pass) as usize;
                println!("{} criterion {name} ({secs:.1}s)", if pass { "PASS" } else { "FAIL" });
                for c in &checks {
                    println!("    {c}");
                }
            }
            Err(e) => {
                failed += 1;
                println!("FAIL criterion {name} ({secs:.1}s): error: {e}");
            }
        }
    }
    if failed == 0 {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} criteria failed");
        ExitCode::FAILURE
    }
}
