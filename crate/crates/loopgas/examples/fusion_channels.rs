//! Drags two string endpoints onto the same vertex and inspects what is
//! left behind: same-copy endpoints annihilate to vacuum, different-copy
//! endpoints fuse into the residual charge detected by the second vertex
//! projector family.
//!
//! Run with: `cargo run --release --example fusion_channels`

use loopgas::experiments::{run, ExperimentKind, ExperimentSpec};
use loopgas::lattice::{Topology, TopologyKind};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = ExperimentSpec::new(
        ExperimentKind::Fusion,
        Topology { kind: TopologyKind::Torus, lx: 4, ly: 2 },
    );
    let report = run(&spec)?;

    for a in &report.assertions {
        println!("{} {} — {}", if a.passed { "PASS" } else { "FAIL" }, a.name, a.detail);
    }
    println!();
    println!("fused-vertex charge, same copy:      {}", report.values["q2_same_copy"]);
    println!("fused-vertex charge, different copy: {}", report.values["q2_different_copy"]);
    println!("energy after same-copy fusion:       {}", report.values["energy_same_copy"]);
    println!("energy after cross-copy fusion:      {}", report.values["energy_different_copy"]);
    println!("pairing-state Gram matrix:           {}", report.values["pairing_gram"]);
    Ok(())
}
