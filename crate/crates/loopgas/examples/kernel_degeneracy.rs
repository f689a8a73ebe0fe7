//! Measures the ground-space dimension on a small annulus and prints the
//! low spectrum, including any numerical zero modes beyond the exact
//! winding-sector span.
//!
//! Run with: `cargo run --release --example kernel_degeneracy`

use loopgas::experiments::{run, ExperimentKind, ExperimentSpec};
use loopgas::lattice::{Topology, TopologyKind};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = ExperimentSpec::new(
        ExperimentKind::Degeneracy,
        Topology { kind: TopologyKind::Annulus, lx: 2, ly: 1 },
    );
    let report = run(&spec)?;

    for a in &report.assertions {
        println!("{} {} — {}", if a.passed { "PASS" } else { "FAIL" }, a.name, a.detail);
    }
    for w in &report.warnings {
        println!("warning: {w}");
    }
    if let Some(evs) = &report.eigenvalues {
        println!("low spectrum:");
        for (i, e) in evs.iter().take(10).enumerate() {
            println!("  lambda[{i}] = {e:+.12e}");
        }
    }
    println!(
        "measured kernel: {}, exact sector span: {}",
        report.values["kernel_dim_measured"], report.values["sector_span_rank"],
    );
    Ok(())
}
