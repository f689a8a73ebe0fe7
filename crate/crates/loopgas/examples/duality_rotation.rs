//! Shows the single-site rotation that exchanges the diagonal and
//! off-diagonal operator families, then runs the full lattice-level
//! equivalence on a small torus.
//!
//! Run with: `cargo run --release --example duality_rotation`

use loopgas::experiments::{run, ExperimentKind, ExperimentSpec};
use loopgas::lattice::{Topology, TopologyKind};
use loopgas::spin1ops::{sx, sz, u_duality};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let u = u_duality();
    println!("single-site rotation U (rows of the 3x3 matrix):");
    for row in 0..3 {
        let entries: Vec<String> =
            (0..3).map(|col| format!("{}", u.entry(row, col))).collect();
        println!("  [{}]", entries.join(", "));
    }
    println!("U * Sz * U == Sx: {}", u.mul(&sz()).mul(&u) == sx());
    println!("U is its own inverse: {}", u.mul(&u) == loopgas::spin1ops::SiteMatrix::identity());
    println!();

    let spec = ExperimentSpec::new(
        ExperimentKind::DualityCheck,
        Topology { kind: TopologyKind::Torus, lx: 2, ly: 2 },
    );
    let report = run(&spec)?;
    for a in &report.assertions {
        println!("{} {} — {}", if a.passed { "PASS" } else { "FAIL" }, a.name, a.detail);
    }
    Ok(())
}
