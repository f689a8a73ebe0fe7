//! Acceptance gate: twelve capability checks, one test per capability,
//! each printing a single PASS/FAIL summary line (visible with
//! `cargo test --test acceptance -- --nocapture`).
//!
//! Tolerances used throughout, in units of the coupling J = 1:
//!
//! * numerical kernel window: eigenvalues below `1e-9` count as zero;
//! * the first eigenvalue beyond the claimed ground space must exceed
//!   `1e-7` (one hundred times the kernel window);
//! * iterative eigenpairs must carry measured residuals below
//!   `1e-8 · ‖H‖`.
//!
//! Checks that disagree with the simulator's measurements fail loudly with
//! the measured value in the panic message; nothing here rounds a
//! disagreement away. The heavy spectral solves share a lock so at most
//! one large Krylov basis is in memory at a time.

use std::sync::Mutex;

use loopgas::experiments::{run, ExperimentKind, ExperimentSpec, Report};
use loopgas::lattice::{build_lattice, Topology, TopologyKind};
use loopgas::merge::{config_from_labels, merged_amplitude, multiplicity};
use loopgas::scalar::ExactScalar;

static SPECTRAL: Mutex<()> = Mutex::new(());

fn report(kind: ExperimentKind, topology: TopologyKind, lx: usize, ly: usize) -> Report {
    let spec = ExperimentSpec::new(kind, Topology { kind: topology, lx, ly });
    match run(&spec) {
        Ok(r) => r,
        Err(e) => panic!("{kind} on {topology} {lx}x{ly} refused to run: {e}"),
    }
}

fn verdict(ok: bool, line: &str) {
    println!("{} {line}", if ok { "PASS" } else { "FAIL" });
}

/// Panics with every failed assertion of the report, or returns it.
fn expect_pass(r: Report, context: &str) -> Report {
    if !r.passed {
        let failed: Vec<String> = r
            .assertions
            .iter()
            .filter(|a| !a.passed)
            .map(|a| format!("{}: {}", a.name, a.detail))
            .collect();
        panic!("{context} failed: {}", failed.join(" | "));
    }
    r
}

fn named(r: &Report, name: &str) -> bool {
    r.assertions.iter().any(|a| a.name == name && a.passed)
}

#[test]
fn annihilation_is_exact_on_every_tested_lattice() {
    let lattices = [
        (TopologyKind::Sphere, 2, 2),
        (TopologyKind::Annulus, 2, 2),
        (TopologyKind::Torus, 2, 2),
        (TopologyKind::Torus, 3, 2),
    ];
    let mut total = 0.0f64;
    for (kind, lx, ly) in lattices {
        let r = expect_pass(
            report(ExperimentKind::GroundstateCheck, kind, lx, ly),
            &format!("groundstate-check on {kind} {lx}x{ly}"),
        );
        assert!(
            r.wall_seconds < 60.0,
            "annihilation on {kind} {lx}x{ly} took {:.1}s, budget 60s",
            r.wall_seconds
        );
        total += r.wall_seconds;
    }
    verdict(
        true,
        &format!(
            "exact annihilation of every sector state on all four lattices ({total:.2}s total)"
        ),
    );
}

#[test]
fn ground_space_dimension_matches_the_claimed_counts() {
    let _lock = SPECTRAL.lock().unwrap();
    let lattices = [
        (TopologyKind::Sphere, 2, 2),
        (TopologyKind::Annulus, 2, 2),
        (TopologyKind::Torus, 2, 2),
        (TopologyKind::Torus, 3, 2),
    ];
    let mut measured = Vec::new();
    for (kind, lx, ly) in lattices {
        let r = report(ExperimentKind::Degeneracy, kind, lx, ly);
        let context = format!("degeneracy on {kind} {lx}x{ly}");
        // The exact-layer facts and the solver's self-certification must
        // hold regardless of what dimension comes out.
        for name in [
            "sector-states-annihilated-exactly",
            "sector-gram-rank-matches-claimed-count",
            "residuals-within-documented-bound",
            "kernel-window-separation-unambiguous",
        ] {
            assert!(named(&r, name), "{context}: prerequisite `{name}` did not hold");
        }
        measured.push((
            context,
            r.values["kernel_dim_expected"].as_u64().unwrap(),
            r.values["kernel_dim_measured"].as_u64().unwrap(),
        ));
    }
    let summary: Vec<String> = measured
        .iter()
        .map(|(c, e, m)| format!("{c}: claimed {e}, measured {m}"))
        .collect();
    let all_match = measured.iter().all(|(_, e, m)| e == m);
    verdict(all_match, &format!("ground-space dimensions — {}", summary.join("; ")));
    for (context, expected, got) in measured {
        assert_eq!(
            expected, got,
            "{context}: measured kernel dimension {got} deviates from the claimed \
             topological count {expected}"
        );
    }
}

#[test]
fn amplitudes_follow_the_multiplicity_counting_rule() {
    for (kind, lx, ly) in [
        (TopologyKind::Sphere, 2, 2),
        (TopologyKind::Annulus, 2, 2),
        (TopologyKind::Torus, 2, 2),
        (TopologyKind::Torus, 3, 2),
    ] {
        expect_pass(
            report(ExperimentKind::BetaVerify, kind, lx, ly),
            &format!("beta-verify on {kind} {lx}x{ly}"),
        );
    }
    verdict(
        true,
        "closed-form amplitudes (multiplicity × (1/√2)^singles, loop counting, winding \
         defect) match the oracle merge on all four lattices",
    );
}

#[test]
fn dressed_string_pairs_cost_exactly_two_units() {
    for (lx, ly) in [(2, 2), (3, 2)] {
        let r = expect_pass(
            report(ExperimentKind::ExcitationEnergy, TopologyKind::Torus, lx, ly),
            &format!("excitation-energy on torus {lx}x{ly}"),
        );
        for name in [
            "vertex-pair-eigenstate-energy-2J",
            "plaquette-pair-eigenstate-energy-2J",
            "dual-transport-route-gives-energy-2J",
        ] {
            assert!(named(&r, name), "torus {lx}x{ly}: `{name}` missing or failed");
        }
    }
    verdict(
        true,
        "vertex and plaquette pair states are exact eigenstates at energy 2J, including \
         the route through the dual lattice and the site rotation",
    );
}

#[test]
fn three_pairing_states_span_a_three_dimensional_space() {
    let r = expect_pass(
        report(ExperimentKind::Fusion, TopologyKind::Torus, 4, 2),
        "fusion on torus 4x2",
    );
    assert!(named(&r, "pairing-states-have-gram-rank-3"));
    assert!(named(&r, "pairing-states-overlap"));
    verdict(
        true,
        &format!(
            "the three endpoint pairings of four vertex excitations have exact Gram rank 3 \
             with nonzero mutual overlaps (Gram = {})",
            r.values["pairing_gram"]
        ),
    );
}

#[test]
fn fusion_channels_distinguish_vacuum_from_residual_charge() {
    let r = expect_pass(
        report(ExperimentKind::Fusion, TopologyKind::Torus, 4, 2),
        "fusion on torus 4x2",
    );
    for name in [
        "same-copy-fusion-leaves-vacuum-at-fused-vertex",
        "same-copy-fusion-restores-2J-eigenstate",
        "different-copy-fusion-leaves-q2-particle",
        "unfused-endpoints-stay-excited",
    ] {
        assert!(named(&r, name), "fusion: `{name}` missing or failed");
    }
    // Frozen regression: the exact residual charge at the fused vertex.
    let q2 = &r.values["q2_different_copy"];
    assert_eq!(
        q2["exact"].as_str().unwrap(),
        "((47 + 0√2)/2^1) / ((110 + 0√2)/2^0)",
        "cross-copy residual charge drifted from the recorded exact value"
    );
    assert!((q2["float"].as_f64().unwrap() - 47.0 / 220.0).abs() < 1e-15);
    verdict(
        true,
        "same-copy fusion returns the pair to vacuum at the fused vertex; cross-copy \
         fusion leaves the residual charge 47/220 detected by the second projector family",
    );
}

#[test]
fn braiding_phases_are_minus_one_same_copy_plus_one_across() {
    // Headline size: supports stay sparse, nothing materializes the
    // 3^32-dimensional basis.
    let big = expect_pass(
        report(ExperimentKind::Braiding, TopologyKind::Torus, 4, 4),
        "braiding on torus 4x4",
    );
    assert!(named(&big, "same-copy-braiding-phase-is-minus-one"));
    assert!(named(&big, "different-copy-braiding-phase-is-plus-one"));
    assert!(
        big.warnings.iter().any(|w| w.contains("materialized cross-check skipped")),
        "the 4x4 run is expected to stay in sparse-support arithmetic"
    );
    // Cross-check size: small enough to recompute every overlap exactly.
    let small = expect_pass(
        report(ExperimentKind::Braiding, TopologyKind::Torus, 3, 3),
        "braiding on torus 3x3",
    );
    assert!(named(&small, "materialized-overlaps-confirm-sparse-ratios"));
    verdict(
        true,
        "braiding a vertex excitation around a flux gives −1 on the same copy and +1 \
         across copies (4x4 sparse supports; 3x3 materialized cross-check)",
    );
}

#[test]
fn single_site_rotation_intertwines_the_two_operator_families() {
    for (lx, ly) in [(2, 2), (3, 2)] {
        let r = expect_pass(
            report(ExperimentKind::DualityCheck, TopologyKind::Torus, lx, ly),
            &format!("duality-check on torus {lx}x{ly}"),
        );
        for name in [
            "site-transform-exchanges-sz-and-sx",
            "plaquette-families-equal-transformed-dual-vertex-families",
            "vertex-families-equal-transformed-dual-plaquette-families",
            "rotated-dual-sector-sum-collapses-onto-trivial-sector",
        ] {
            assert!(named(&r, name), "torus {lx}x{ly}: `{name}` missing or failed");
        }
    }
    verdict(
        true,
        "the site rotation exchanges diagonal and off-diagonal families operator-by-\
         operator and collapses the dual sector sum onto the trivial sector state",
    );
}

#[test]
fn projector_commutation_pattern_is_exact() {
    let small = expect_pass(
        report(ExperimentKind::Commutators, TopologyKind::Torus, 2, 2),
        "commutators on torus 2x2",
    );
    for name in [
        "a1-commutes-with-plaquette-families",
        "b1-commutes-with-vertex-families",
        "q2-pairs-fail-to-commute-on-every-adjacent-pair",
    ] {
        assert!(named(&small, name), "commutators: `{name}` missing or failed");
    }
    // On 3x2 a genuinely disjoint vertex–plaquette pair exists, so the
    // commuting-disjoint-pair statement has content there.
    let wide = expect_pass(
        report(ExperimentKind::Commutators, TopologyKind::Torus, 3, 2),
        "commutators on torus 3x2",
    );
    assert!(named(&wide, "disjoint-pairs-commute"));
    verdict(
        true,
        "parity families commute with everything; the two line-counting families fail to \
         commute on every adjacent vertex–plaquette pair and on no disjoint pair",
    );
}

#[test]
fn obstructed_doubled_lines_are_excluded_exactly() {
    let r = expect_pass(
        report(ExperimentKind::AppendixACheck, TopologyKind::Torus, 4, 4),
        "appendixA-check on torus 4x4",
    );
    for name in [
        "obstructed-configuration-is-not-decomposable",
        "obstructed-configuration-has-zero-amplitude-in-every-sector",
        "b2-preserves-single-line-parities",
        "b2-branch-exhibits-three-excited-corners",
        "reference-configuration-follows-amplitude-law",
    ] {
        assert!(named(&r, name), "`{name}` missing or failed");
    }
    verdict(
        true,
        &format!(
            "the undecomposable doubled-line configuration has amplitude zero in all 16 \
             sector pairs; line-flip branch census: {}",
            r.values["b3_branches"]
        ),
    );
}

#[test]
fn winding_witness_configuration_separates_sector_states() {
    let (lx, ly) = (4usize, 4usize);
    let geom = build_lattice(&Topology { kind: TopologyKind::Torus, lx, ly }).unwrap();
    let h = |i: usize, j: usize| j * lx + i;
    let v = |i: usize, j: usize| lx * ly + j * lx + i;
    let ring = [h(0, 0), v(1, 0), h(1, 1), v(2, 1), h(2, 2), v(3, 2), h(3, 3), v(0, 3)];
    let mut labels = vec![0u8; geom.num_edges()];
    for &e in &ring {
        labels[e] = 1;
    }
    let config = config_from_labels(&labels);

    let mu_11 = multiplicity(&geom, config, &[true, true], &[false, false]);
    let mu_cross = multiplicity(&geom, config, &[true, false], &[false, true]);
    let amp_11 = merged_amplitude(&geom, config, &[true, true], &[false, false]);
    let amp_cross = merged_amplitude(&geom, config, &[true, false], &[false, true]);
    verdict(
        mu_11 == 1 && mu_cross == 0,
        &format!(
            "staircase ring multiplicities: 1 in the (1,1)/(0,0) pair (amplitude \
             {amp_11}), 0 in the (1,0)/(0,1) pair — the two ground states differ"
        ),
    );
    assert_eq!(mu_11, 1);
    assert_eq!(mu_cross, 0);
    assert_eq!(amp_11, ExactScalar::inv_sqrt2_pow(8));
    assert!(amp_cross.is_zero());
}

#[test]
fn spectral_gap_is_positive_at_every_solver_accessible_size() {
    let _lock = SPECTRAL.lock().unwrap();
    // Frozen from earlier certified runs; an iterative solver drift beyond
    // 1e-9 J on these would flag a real regression.
    let frozen = [
        (TopologyKind::Annulus, 2, 1, 0.1453623202815386),
        (TopologyKind::Torus, 2, 2, 0.1980622641951611),
    ];
    let mut lines = Vec::new();
    for (kind, lx, ly, expected) in frozen {
        let r = expect_pass(
            report(ExperimentKind::GapEstimate, kind, lx, ly),
            &format!("gap-estimate on {kind} {lx}x{ly}"),
        );
        let gap = r.values["gap"].as_f64().unwrap();
        assert!(gap > 0.0, "{kind} {lx}x{ly}: gap {gap} is not positive");
        assert!(
            (gap - expected).abs() < 1e-9,
            "{kind} {lx}x{ly}: gap {gap} drifted from the frozen value {expected}"
        );
        lines.push(format!("{kind} {lx}x{ly}: {gap:.12}"));
    }
    verdict(
        true,
        &format!(
            "finite-size gap above the measured ground space — {} (finite lattices only; \
             no thermodynamic-limit claim)",
            lines.join("; ")
        ),
    );
}
