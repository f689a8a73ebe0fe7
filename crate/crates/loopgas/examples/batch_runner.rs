//! Runs a JSON batch of experiment specifications and writes one report
//! file per entry.
//!
//! The input file holds an array of specifications in the same schema the
//! CLI accepts, for example:
//!
//! ```json
//! [
//!   {"kind": "degeneracy", "topology": {"kind": "annulus", "lx": 2, "ly": 1}},
//!   {"kind": "commutators", "topology": {"kind": "torus", "lx": 2, "ly": 2}}
//! ]
//! ```
//!
//! Run with: `cargo run --release --example batch_runner -- batch.json out_dir`

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use loopgas::experiments::{run, ExperimentSpec};

fn main() -> ExitCode {
    let mut args = std::env::args().skip(1);
    let (Some(input), Some(out_dir)) = (args.next(), args.next()) else {
        eprintln!("usage: batch_runner <specs.json> <output-dir>");
        return ExitCode::from(2);
    };

    let text = match fs::read_to_string(&input) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("cannot read {input}: {e}");
            return ExitCode::from(2);
        }
    };
    let specs: Vec<ExperimentSpec> = match serde_json::from_str(&text) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("cannot parse {input}: {e}");
            return ExitCode::from(2);
        }
    };
    if let Err(e) = fs::create_dir_all(&out_dir) {
        eprintln!("cannot create {out_dir}: {e}");
        return ExitCode::from(2);
    }

    let mut failures = 0usize;
    for (i, spec) in specs.iter().enumerate() {
        let label = format!(
            "{:02}_{}_{}_{}x{}",
            i, spec.kind, spec.topology.kind, spec.topology.lx, spec.topology.ly
        );
        match run(spec) {
            Ok(report) => {
                let path: PathBuf = [out_dir.as_str(), &format!("{label}.json")].iter().collect();
                match serde_json::to_string_pretty(&report) {
                    Ok(body) => {
                        if let Err(e) = fs::write(&path, body + "\n") {
                            eprintln!("{label}: cannot write report: {e}");
                            failures += 1;
                            continue;
                        }
                    }
                    Err(e) => {
                        eprintln!("{label}: cannot serialize report: {e}");
                        failures += 1;
                        continue;
                    }
                }
                println!("{label}: {}", if report.passed { "PASS" } else { "FAIL" });
                if !report.passed {
                    failures += 1;
                }
            }
            Err(e) => {
                eprintln!("{label}: refused: {e}");
                failures += 1;
            }
        }
    }
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failures} of {} runs did not pass", specs.len());
        ExitCode::FAILURE
    }
}
