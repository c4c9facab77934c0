//! Runs `spherelab verify-all` twice and prints one line per criterion.
//!
//! Criteria 1 to 10 are read from the first report. Criterion 11 holds when
//! both reports are byte-identical once `duration_ms` is zeroed.

use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::Instant;

use spherelab_cli::report::{Report, Verdict};

const TITLES: [&str; 11] = [
    "volume calibration",
    "Clifford torus constants",
    "tube volume formula",
    "tube inequality chain",
    "Willmore lower bound",
    "focal radius of tori",
    "distance bound for linked loops",
    "linking number robustness",
    "convexity of complements",
    "band width",
    "determinism",
];

fn run_verify_all(out: &Path) -> (Option<i32>, String) {
    let status = Command::new(env!("CARGO_BIN_EXE_spherelab"))
        .args(["verify-all", "--seed", "42", "--out"])
        .arg(out)
        .status()
        .expect("spawn spherelab");
    let text = std::fs::read_to_string(out).unwrap_or_default();
    (status.code(), text)
}

fn without_duration(text: &str) -> Option<String> {
    let mut report: Report = serde_json::from_str(text).ok()?;
    report.duration_ms = 0;
    report.to_json().ok()
}

fn main() -> ExitCode {
    let dir = tempfile::tempdir().expect("temp dir");
    // the output path is echoed in the report, so both runs share it
    let report_path = dir.path().join("report.json");
    let start = Instant::now();
    let (code_a, first) = run_verify_all(&report_path);
    let elapsed = start.elapsed();
    let (code_b, second) = run_verify_all(&report_path);

    let report: Option<Report> = serde_json::from_str(&first).ok();
    let mut verdicts = Vec::new();
    for (i, title) in TITLES.iter().enumerate().take(10) {
        let id = i + 1;
        let summary = format!("criterion {id}: {title}");
        let ok = report
            .as_ref()
            .and_then(|r| r.results.iter().find(|row| row.name == summary))
            .is_some_and(|row| row.verdict == Verdict::Pass);
        if !ok {
            if let Some(r) = &report {
                let prefix = format!("criterion {id}/");
                for row in r
                    .results
                    .iter()
                    .filter(|row| row.name.starts_with(&prefix) && row.verdict == Verdict::Fail)
                {
                    eprintln!(
                        "    failed: {} = {} (tolerance {})",
                        row.name, row.value, row.tolerance
                    );
                }
            }
        }
        verdicts.push(ok);
    }
    let identical = match (without_duration(&first), without_duration(&second)) {
        (Some(a), Some(b)) => a == b,
        _ => false,
    };
    verdicts.push(identical && code_a == code_b);

    for (i, ok) in verdicts.iter().enumerate() {
        println!(
            "criterion {:>2} {:<34} {}",
            i + 1,
            TITLES[i],
            if *ok { "PASS" } else { "FAIL" }
        );
    }
    println!(
        "verify-all exit codes {code_a:?}, {code_b:?}; first run {:.1?}",
        elapsed
    );

    let all = verdicts.iter().all(|&ok| ok) && code_a == Some(0);
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
