//! Command-line front end: one experiment per invocation.
//!
//! Prints one PASS/FAIL line per assertion, writes the JSON report (plus a
//! plot-ready CSV eigenvalue sidecar) when asked, and exits 0 only if every
//! assertion passed. Exit code 1 means a completed run with failed
//! assertions; exit code 2 means the experiment could not run at all.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use loopgas::experiments::{self, ExperimentKind, ExperimentSpec, Report};
use loopgas::lattice::{Topology, TopologyKind};

#[derive(Parser)]
#[command(
    name = "loopgas",
    version,
    about = "Exact verification experiments for the merged spin-1 loop-gas model",
    after_help = "EXPERIMENTS:\n  groundstate-check, degeneracy, beta-verify, excitation-energy, braiding,\n  fusion, duality-check, commutators, appendixA-check, gap-estimate\n\nEXIT CODES:\n  0 all assertions passed, 1 some assertion failed, 2 the run was refused\n\nEXAMPLES:\n  loopgas degeneracy --topology torus --lx 2 --ly 2 --json report.json\n  loopgas braiding --topology torus --lx 4 --ly 4\n  loopgas groundstate-check --topology annulus --lx 2 --ly 2 --sector-a 1 --sector-b 0"
)]
struct Cli {
    /// Which verification to run (see the list below).
    experiment: String,
    /// Lattice topology.
    #[arg(long, value_parser = parse_topology)]
    topology: TopologyKind,
    /// Columns of the lattice.
    #[arg(long)]
    lx: usize,
    /// Rows of the lattice.
    #[arg(long)]
    ly: usize,
    /// Winding parities for copy A, one digit per homology class (e.g. "10").
    #[arg(long)]
    sector_a: Option<String>,
    /// Winding parities for copy B.
    #[arg(long)]
    sector_b: Option<String>,
    /// Write the JSON report here; eigenvalue lists also land in a CSV
    /// sidecar with the same stem.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Cap on worker threads for the matrix-free solver.
    #[arg(long)]
    threads: Option<usize>,
    /// Eigenvalues below this tolerance count as numerically zero.
    #[arg(long, default_value_t = experiments::DEFAULT_KERNEL_TOL)]
    tol: f64,
    /// Seed for the eigensolver's starting block.
    #[arg(long, default_value_t = experiments::DEFAULT_SEED)]
    seed: u64,
}

fn parse_topology(s: &str) -> Result<TopologyKind, String> {
    match s {
        "sphere" => Ok(TopologyKind::Sphere),
        "annulus" => Ok(TopologyKind::Annulus),
        "torus" => Ok(TopologyKind::Torus),
        other => Err(format!("unknown topology {other:?} (expected sphere, annulus or torus)")),
    }
}

fn parse_sector(which: &str, s: &str) -> Result<Vec<bool>, String> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            other => Err(format!("{which}: winding digit {other:?} is not 0 or 1")),
        })
        .collect()
}

fn write_reports(report: &Report, json_path: &PathBuf) -> Result<(), String> {
    let text = serde_json::to_string_pretty(report)
        .map_err(|e| format!("serializing report: {e}"))?;
    std::fs::write(json_path, text + "\n")
        .map_err(|e| format!("writing {}: {e}", json_path.display()))?;
    println!("report written to {}", json_path.display());
    if let Some(eigenvalues) = &report.eigenvalues {
        let csv_path = json_path.with_extension("csv");
        let mut csv = String::from("index,eigenvalue\n");
        for (i, v) in eigenvalues.iter().enumerate() {
            csv.push_str(&format!("{i},{v}\n"));
        }
        std::fs::write(&csv_path, csv)
            .map_err(|e| format!("writing {}: {e}", csv_path.display()))?;
        println!("eigenvalues written to {}", csv_path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();

    let kind: ExperimentKind = match cli.experiment.parse() {
        Ok(kind) => kind,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let mut spec = ExperimentSpec::new(
        kind,
        Topology { kind: cli.topology, lx: cli.lx, ly: cli.ly },
    );
    spec.kernel_tol = cli.tol;
    spec.seed = cli.seed;
    for (which, given, slot) in [
        ("--sector-a", &cli.sector_a, &mut spec.sector_a),
        ("--sector-b", &cli.sector_b, &mut spec.sector_b),
    ] {
        if let Some(s) = given {
            match parse_sector(which, s) {
                Ok(w) => *slot = Some(w),
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            }
        }
    }
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("warning: could not cap worker threads: {e}");
        }
    }

    let report = match experiments::run(&spec) {
        Ok(report) => report,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };

    println!(
        "{} on {} {}x{}",
        report.experiment, report.topology, report.lx, report.ly
    );
    for a in &report.assertions {
        let verdict = if a.passed { "PASS" } else { "FAIL" };
        println!("  {verdict} {} — {}", a.name, a.detail);
    }
    for w in &report.warnings {
        println!("  warning: {w}");
    }
    let passed = report.assertions.iter().filter(|a| a.passed).count();
    println!(
        "result: {} ({passed}/{} assertions) in {:.2}s",
        if report.passed { "PASS" } else { "FAIL" },
        report.assertions.len(),
        report.wall_seconds
    );

    if let Some(json_path) = &cli.json {
        if let Err(e) = write_reports(&report, json_path) {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }

    if report.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
