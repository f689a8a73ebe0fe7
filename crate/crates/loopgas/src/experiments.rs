//! Runnable verification experiments and their JSON reports.
//!
//! Each experiment wires the exact layer (sector states, stamped operators,
//! GF(2) counting) and the floating-point spectral layer into one named
//! verification. A [`Report`] carries a pass/fail verdict per assertion,
//! exact values rendered as strings next to their float companions, and the
//! eigenvalue list whenever an iterative solve ran.
//!
//! Reports are reproducible: the same [`ExperimentSpec`] (seed included)
//! yields a byte-identical report, with wall-clock time quarantined in its
//! own field. Oversized inputs are refused up front: iterative solves are
//! capped at basis dimension `3^14`, and state materialization inherits the
//! pair-enumeration cap from the merge layer.

use std::collections::{BTreeMap, BTreeSet};
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use crate::gf2::{boundary, EdgeSubset, Gf2System};
use crate::lattice::{build_lattice, LatticeError, LatticeGeometry, Topology, TopologyKind};
use crate::merge::{
    all_merged_sector_states, config3_string, config_from_labels, decomposable, label_at, merge,
    merged_amplitude, merged_ground_state, multiplicity, split_config, subgraph_invariants,
    winding_rank, MergeError, MergedState, Spin1Config, MAX_MERGE_PAIRS,
};
use crate::scalar::{ExactRatio, ExactScalar};
use crate::spectral::{
    expectation, gram_rank, index_to_config, lowest_eigenvalues, state_to_dense, LanczosOptions,
    SpectralError, SpectralReport, Spin1Matvec, MAX_DENSE_EDGES,
};
use crate::spin1ops::{
    a1_vertex, a2_vertex, a3_vertex, b1_plaquette, b2_plaquette, b3_plaquette, hamiltonian,
    q1_plaquette, q1_vertex, q2_plaquette, q2_vertex, single_parity, sx, sx2, sz, sz2, transform_u,
    u_duality, x_swap, LatticeOperator, SiteMatrix,
};
use crate::toric::{
    apply_x_string, apply_z_string, dual_path, primal_path, toric_ground_state, SpinHalfConfig,
    ToricError, ToricState,
};

/// Eigenvalues below this (in units of the coupling) count as kernel members.
pub const DEFAULT_KERNEL_TOL: f64 = 1e-9;

/// Converged eigenpairs must satisfy `‖Hy − θy‖ ≤ RESIDUAL_FACTOR · ‖H‖`.
pub const RESIDUAL_FACTOR: f64 = 1e-8;

/// Default seed for the eigensolver's starting block.
pub const DEFAULT_SEED: u64 = 0x6c6f_6f70;

/// Spectral experiments refuse lattices above this edge count.
pub const MAX_SOLVER_EDGES: usize = MAX_DENSE_EDGES;

/// Version tag carried by every [`Report`].
pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// The named verifications exposed by the command-line front end.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExperimentKind {
    /// Exact annihilation of the closed-form sector states by every projector.
    #[serde(rename = "groundstate-check")]
    GroundstateCheck,
    /// Kernel dimension against the claimed topological count.
    #[serde(rename = "degeneracy")]
    Degeneracy,
    /// Amplitude law of the merged states: multiplicities, loop counting.
    #[serde(rename = "beta-verify")]
    BetaVerify,
    /// String-dressed states as exact finite-energy eigenstates.
    #[serde(rename = "excitation-energy")]
    ExcitationEnergy,
    /// Loop transport around one endpoint: the mutual statistics sign.
    #[serde(rename = "braiding")]
    Braiding,
    /// String endpoints brought together: vacuum versus leftover particle.
    #[serde(rename = "fusion")]
    Fusion,
    /// Vertex/plaquette exchange under the on-site basis rotation.
    #[serde(rename = "duality-check")]
    DualityCheck,
    /// Commuting and non-commuting operator pairs, checked exactly.
    #[serde(rename = "commutators")]
    Commutators,
    /// The obstructed configuration and its excited plaquette branches.
    #[serde(rename = "appendixA-check")]
    AppendixACheck,
    /// Smallest nonzero eigenvalue above the measured kernel.
    #[serde(rename = "gap-estimate")]
    GapEstimate,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 10] = [
        ExperimentKind::GroundstateCheck,
        ExperimentKind::Degeneracy,
        ExperimentKind::BetaVerify,
        ExperimentKind::ExcitationEnergy,
        ExperimentKind::Braiding,
        ExperimentKind::Fusion,
        ExperimentKind::DualityCheck,
        ExperimentKind::Commutators,
        ExperimentKind::AppendixACheck,
        ExperimentKind::GapEstimate,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::GroundstateCheck => "groundstate-check",
            ExperimentKind::Degeneracy => "degeneracy",
            ExperimentKind::BetaVerify => "beta-verify",
            ExperimentKind::ExcitationEnergy => "excitation-energy",
            ExperimentKind::Braiding => "braiding",
            ExperimentKind::Fusion => "fusion",
            ExperimentKind::DualityCheck => "duality-check",
            ExperimentKind::Commutators => "commutators",
            ExperimentKind::AppendixACheck => "appendixA-check",
            ExperimentKind::GapEstimate => "gap-estimate",
        }
    }
}

impl std::fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = ExperimentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ExperimentKind::ALL
            .iter()
            .find(|k| k.name() == s)
            .copied()
            .ok_or_else(|| ExperimentError::UnknownExperiment(s.to_string()))
    }
}

fn default_kernel_tol() -> f64 {
    DEFAULT_KERNEL_TOL
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

/// Everything needed to reproduce one experiment run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub kind: ExperimentKind,
    pub topology: Topology,
    /// Winding parities of copy A, one per homology class (default all even).
    #[serde(default)]
    pub sector_a: Option<Vec<bool>>,
    /// Winding parities of copy B.
    #[serde(default)]
    pub sector_b: Option<Vec<bool>>,
    /// Eigenvalues below this count as numerically zero.
    #[serde(default = "default_kernel_tol")]
    pub kernel_tol: f64,
    /// Seed for the eigensolver's starting block.
    #[serde(default = "default_seed")]
    pub seed: u64,
}

impl ExperimentSpec {
    pub fn new(kind: ExperimentKind, topology: Topology) -> Self {
        ExperimentSpec {
            kind,
            topology,
            sector_a: None,
            sector_b: None,
            kernel_tol: DEFAULT_KERNEL_TOL,
            seed: DEFAULT_SEED,
        }
    }
}

/// One named pass/fail check inside a report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Assertion {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Machine-readable outcome of one experiment run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub experiment: String,
    pub topology: String,
    pub lx: usize,
    pub ly: usize,
    /// Echo of the inputs and of the frozen instance choices.
    pub parameters: BTreeMap<String, String>,
    /// True iff every assertion passed.
    pub passed: bool,
    pub warnings: Vec<String>,
    pub assertions: Vec<Assertion>,
    /// Named results: exact values as strings, floats as numbers.
    pub values: BTreeMap<String, serde_json::Value>,
    /// Ascending eigenvalue list when a spectral solve ran.
    pub eigenvalues: Option<Vec<f64>>,
    /// Quarantined here so the rest of the report is reproducible.
    pub wall_seconds: f64,
}

/// Errors that prevent an experiment from running at all. A completed run
/// with failed assertions is *not* an error; it is a report.
#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(
        "unknown experiment {0:?} (expected one of: groundstate-check, degeneracy, beta-verify, \
         excitation-energy, braiding, fusion, duality-check, commutators, appendixA-check, \
         gap-estimate)"
    )]
    UnknownExperiment(String),
    #[error("{experiment} needs a torus, got {got}")]
    NeedsTorus { experiment: &'static str, got: TopologyKind },
    #[error("{experiment} needs extents at least {min_lx}x{min_ly}, got {lx}x{ly}")]
    ExtentsTooSmall {
        experiment: &'static str,
        min_lx: usize,
        min_ly: usize,
        lx: usize,
        ly: usize,
    },
    #[error(
        "{edges} edges give basis dimension 3^{edges} ≈ {dim:.3e}, above the solver cap \
         3^{MAX_SOLVER_EDGES}; pick a lattice with at most {MAX_SOLVER_EDGES} edges"
    )]
    BasisTooLarge { edges: usize, dim: f64 },
    #[error("sector parameter invalid: {0}")]
    BadSector(String),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Toric(#[from] ToricError),
    #[error(transparent)]
    Merge(#[from] MergeError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

/// Runs one experiment to completion and returns its report.
pub fn run(spec: &ExperimentSpec) -> Result<Report, ExperimentError> {
    let geom = build_lattice(&spec.topology)?;
    match spec.kind {
        ExperimentKind::GroundstateCheck => groundstate_check(spec, &geom),
        ExperimentKind::Degeneracy => degeneracy(spec, &geom),
        ExperimentKind::BetaVerify => beta_verify(spec, &geom),
        ExperimentKind::ExcitationEnergy => excitation_energy(spec, &geom),
        ExperimentKind::Braiding => braiding(spec, &geom),
        ExperimentKind::Fusion => fusion(spec, &geom),
        ExperimentKind::DualityCheck => duality_check(spec, &geom),
        ExperimentKind::Commutators => commutators(spec, &geom),
        ExperimentKind::AppendixACheck => appendix_a_check(spec, &geom),
        ExperimentKind::GapEstimate => gap_estimate(spec, &geom),
    }
}

// ---------------------------------------------------------------------------
// Report assembly
// ---------------------------------------------------------------------------

struct ReportBuilder {
    started: Instant,
    report: Report,
}

impl ReportBuilder {
    fn new(spec: &ExperimentSpec) -> Self {
        ReportBuilder {
            started: Instant::now(),
            report: Report {
                schema_version: REPORT_SCHEMA_VERSION,
                experiment: spec.kind.name().to_string(),
                topology: spec.topology.kind.to_string(),
                lx: spec.topology.lx,
                ly: spec.topology.ly,
                parameters: BTreeMap::new(),
                passed: false,
                warnings: Vec::new(),
                assertions: Vec::new(),
                values: BTreeMap::new(),
                eigenvalues: None,
                wall_seconds: 0.0,
            },
        }
    }

    fn param(&mut self, key: &str, value: impl ToString) {
        self.report.parameters.insert(key.to_string(), value.to_string());
    }

    fn value(&mut self, key: &str, value: serde_json::Value) {
        self.report.values.insert(key.to_string(), value);
    }

    fn warn(&mut self, message: impl Into<String>) {
        self.report.warnings.push(message.into());
    }

    fn check(&mut self, name: &str, passed: bool, detail: impl Into<String>) -> bool {
        self.report.assertions.push(Assertion {
            name: name.to_string(),
            passed,
            detail: detail.into(),
        });
        passed
    }

    fn eigenvalues(&mut self, list: Vec<f64>) {
        self.report.eigenvalues = Some(list);
    }

    fn finish(mut self) -> Report {
        self.report.passed = !self.report.assertions.is_empty()
            && self.report.assertions.iter().all(|a| a.passed);
        self.report.wall_seconds = self.started.elapsed().as_secs_f64();
        self.report
    }
}

// ---------------------------------------------------------------------------
// Shared helpers
// ---------------------------------------------------------------------------

fn require_torus(
    spec: &ExperimentSpec,
    experiment: &'static str,
    min_lx: usize,
    min_ly: usize,
) -> Result<(), ExperimentError> {
    if spec.topology.kind != TopologyKind::Torus {
        return Err(ExperimentError::NeedsTorus { experiment, got: spec.topology.kind });
    }
    if spec.topology.lx < min_lx || spec.topology.ly < min_ly {
        return Err(ExperimentError::ExtentsTooSmall {
            experiment,
            min_lx,
            min_ly,
            lx: spec.topology.lx,
            ly: spec.topology.ly,
        });
    }
    Ok(())
}

fn solver_guard(geom: &LatticeGeometry) -> Result<(), ExperimentError> {
    let edges = geom.num_edges();
    if edges > MAX_SOLVER_EDGES {
        return Err(ExperimentError::BasisTooLarge { edges, dim: 3f64.powi(edges as i32) });
    }
    Ok(())
}

fn sector_or_trivial(
    geom: &LatticeGeometry,
    given: &Option<Vec<bool>>,
    which: &str,
) -> Result<Vec<bool>, ExperimentError> {
    let classes = geom.noncontractible().len();
    match given {
        None => Ok(vec![false; classes]),
        Some(w) if w.len() == classes => Ok(w.clone()),
        Some(w) => Err(ExperimentError::BadSector(format!(
            "{which} lists {} winding parities, the topology has {classes} homology classes",
            w.len()
        ))),
    }
}

fn sector_label(w: &[bool]) -> String {
    if w.is_empty() {
        return "-".into();
    }
    w.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

fn note_ignored_sectors(spec: &ExperimentSpec, rb: &mut ReportBuilder) {
    if spec.sector_a.is_some() || spec.sector_b.is_some() {
        rb.warn("this experiment enumerates sectors itself; the sector parameters are ignored");
    }
}

/// All winding-parity vectors, in the enumeration order used by the library.
fn all_sectors(classes: usize) -> Vec<Vec<bool>> {
    (0u32..(1 << classes))
        .map(|bits| (0..classes).map(|k| bits >> k & 1 == 1).collect())
        .collect()
}

fn torus_h(geom: &LatticeGeometry, i: usize, j: usize) -> usize {
    let t = geom.topology();
    (j % t.ly) * t.lx + i % t.lx
}

fn torus_v(geom: &LatticeGeometry, i: usize, j: usize) -> usize {
    let t = geom.topology();
    t.lx * t.ly + (j % t.ly) * t.lx + i % t.lx
}

fn torus_vertex(geom: &LatticeGeometry, i: usize, j: usize) -> usize {
    let t = geom.topology();
    (j % t.ly) * t.lx + i % t.lx
}

fn torus_plaq(geom: &LatticeGeometry, i: usize, j: usize) -> usize {
    let t = geom.topology();
    (j % t.ly) * t.lx + i % t.lx
}

fn vertex_star(geom: &LatticeGeometry, v: usize) -> EdgeSubset {
    EdgeSubset::from_indices(geom.num_edges(), geom.vertex_edges(v))
}

fn edge_list(subset: &EdgeSubset) -> Vec<usize> {
    subset.iter().collect()
}

fn subset_bits(subset: &EdgeSubset) -> SpinHalfConfig {
    let mut c: SpinHalfConfig = 0;
    for e in subset.iter() {
        c |= 1 << e;
    }
    c
}

fn ratio_string(num: &ExactScalar, den: &ExactScalar) -> String {
    format!("({num}) / ({den})")
}

fn ratio_json(r: &ExactRatio) -> serde_json::Value {
    json!({ "exact": ratio_string(&r.num, &r.den), "float": r.to_f64() })
}

fn scalar_json(x: &ExactScalar) -> serde_json::Value {
    json!({ "exact": x.to_string(), "float": x.to_f64() })
}

fn unit_ratio() -> ExactRatio {
    ExactRatio::new(ExactScalar::one(), ExactScalar::one())
}

/// True when `num/den = ±(√2)^m` for some integer `m`. Checked on the
/// squares, which must both be pure powers of two.
fn power_of_sqrt2_ratio(num: &ExactScalar, den: &ExactScalar) -> bool {
    if num.is_zero() || den.is_zero() {
        return false;
    }
    let n2 = num.clone() * num.clone();
    let d2 = den.clone() * den.clone();
    let (na, nb, _) = n2.parts();
    let (da, db, _) = d2.parts();
    nb == 0 && db == 0 && na > 0 && da > 0 && na.count_ones() == 1 && da.count_ones() == 1
}

/// Re-labels a state through an edge bijection onto another lattice.
fn transport_state(
    state: &MergedState,
    edge_map: &[usize],
    target: &LatticeGeometry,
) -> MergedState {
    let mut out = MergedState::from_raw(target.num_edges(), target.geometry_hash());
    for (&c, a) in state.iter() {
        let mut labels = vec![0u8; target.num_edges()];
        for (de, &pe) in edge_map.iter().enumerate() {
            labels[pe] = label_at(c, de);
        }
        out.add(config_from_labels(&labels), a.clone());
    }
    out
}

/// Equal-weight sum of the sector states over *ordered* sector pairs; by
/// bilinearity of the merge this is the merge of the two democratic toric
/// sums.
fn ordered_sector_sum(geom: &LatticeGeometry) -> Result<MergedState, ExperimentError> {
    let rank = geom.noncontractible().len();
    let mut out = MergedState::zero(geom);
    for wa in all_sectors(rank) {
        let a = toric_ground_state(geom, &wa)?;
        for wb in all_sectors(rank) {
            let b = toric_ground_state(geom, &wb)?;
            out.add_state(&merge(geom, &a, &b)?, &ExactScalar::one());
        }
    }
    Ok(out)
}

/// Sum over *ordered* sector pairs of `merge(dress(a), b)`, with the dressing
/// applied to the first copy.
fn ordered_dressed_sum<F>(
    geom: &LatticeGeometry,
    dress: F,
) -> Result<MergedState, ExperimentError>
where
    F: Fn(&ToricState) -> ToricState,
{
    let sectors = all_sectors(geom.noncontractible().len());
    let mut out = MergedState::zero(geom);
    for wa in &sectors {
        let a = dress(&toric_ground_state(geom, wa)?);
        for wb in &sectors {
            let b = toric_ground_state(geom, wb)?;
            out.add_state(&merge(geom, &a, &b)?, &ExactScalar::one());
        }
    }
    Ok(out)
}

/// Does the subset cross every plaquette boundary an even number of times
/// (i.e. is it a closed loop of the dual lattice)?
fn closed_on_dual_lattice(geom: &LatticeGeometry, subset: &EdgeSubset) -> bool {
    (0..geom.num_plaquettes()).all(|p| subset.and(&geom.plaquette_boundary(p)).count() % 2 == 0)
}

/// The diagonal loop sign `(−1)^{|c ∩ loop|}` over one toric copy's support,
/// provided it is the same for every configuration; `None` if mixed.
fn uniform_loop_sign(state: &ToricState, loop_edges: &EdgeSubset) -> Option<i8> {
    let mut sign: Option<i8> = None;
    for (&c, _) in state.iter() {
        let mut parity = 0u32;
        for e in loop_edges.iter() {
            parity ^= (c >> e & 1) as u32;
        }
        let s = if parity == 1 { -1 } else { 1 };
        match sign {
            None => sign = Some(s),
            Some(prev) if prev != s => return None,
            _ => {}
        }
    }
    sign
}

/// Single-line parity violation at a vertex, read off one configuration.
fn q1_excited_at(geom: &LatticeGeometry, config: Spin1Config, v: usize) -> bool {
    let singles = geom
        .vertex_edges(v)
        .iter()
        .filter(|&&e| label_at(config, e) == 1)
        .count();
    singles % 2 == 1
}

/// Doubled-line condition violation at a vertex: no single lines but an odd
/// number of doubled ones.
fn q2_excited_at(geom: &LatticeGeometry, config: Spin1Config, v: usize) -> bool {
    let mut singles = 0usize;
    let mut doubles = 0usize;
    for &e in geom.vertex_edges(v) {
        match label_at(config, e) {
            1 => singles += 1,
            2 => doubles += 1,
            _ => {}
        }
    }
    singles == 0 && doubles % 2 == 1
}

/// Edges stamped by at least one term of any of the operators.
fn operator_edges(ops: &[&LatticeOperator]) -> Vec<usize> {
    let mut set = BTreeSet::new();
    for op in ops {
        for term in &op.terms {
            for (e, _) in &term.stamps {
                set.insert(*e);
            }
        }
    }
    set.into_iter().collect()
}

/// Exact test of `[X, Y] = 0`. Both operators act as the identity outside
/// their stamped edges, so the commutator factorizes as a local operator
/// tensored with the identity; enumerating every configuration of the union
/// support (vacuum elsewhere) decides the full-space statement.
fn commutator_vanishes(x: &LatticeOperator, y: &LatticeOperator) -> bool {
    let edges = operator_edges(&[x, y]);
    let mut labels = vec![0u8; x.num_edges()];
    let total = 3usize.pow(edges.len() as u32);
    for idx in 0..total {
        let mut rem = idx;
        for &e in &edges {
            labels[e] = (rem % 3) as u8;
            rem /= 3;
        }
        let c = config_from_labels(&labels);
        let xy = x.apply(&y.apply_to_config(c));
        let yx = y.apply(&x.apply_to_config(c));
        if xy != yx {
            return false;
        }
    }
    true
}

/// The coefficient and per-edge stamp of a one-term operator.
fn single_term_map(op: &LatticeOperator) -> Option<(ExactScalar, BTreeMap<usize, SiteMatrix>)> {
    if op.terms.len() != 1 {
        return None;
    }
    let term = &op.terms[0];
    let mut stamps = BTreeMap::new();
    for (e, m) in &term.stamps {
        if stamps.insert(*e, m.clone()).is_some() {
            return None;
        }
    }
    Some((term.coeff.clone(), stamps))
}

/// Conjugates every stamp of a one-term operator by the on-site rotation and
/// transports its edges through the bijection onto the other lattice.
fn transported_conjugate(
    op: &LatticeOperator,
    edge_map: &[usize],
) -> Option<(ExactScalar, BTreeMap<usize, SiteMatrix>)> {
    let u = u_duality();
    let (coeff, stamps) = single_term_map(op)?;
    Some((
        coeff,
        stamps.into_iter().map(|(de, m)| (edge_map[de], u.mul(&m).mul(&u))).collect(),
    ))
}

/// Per-site projector expectations across the whole lattice, split by
/// family and by whether the expectation is exactly one, exactly zero, or
/// something in between.
struct Localization {
    q1_vertices_one: Vec<usize>,
    q1_vertices_frac: Vec<usize>,
    q2_vertices: Vec<usize>,
    q1_plaquettes_one: Vec<usize>,
    q1_plaquettes_frac: Vec<usize>,
    q2_plaquettes: Vec<usize>,
}

fn localize_excitations(geom: &LatticeGeometry, state: &MergedState) -> Localization {
    let unit = unit_ratio();
    let mut loc = Localization {
        q1_vertices_one: Vec::new(),
        q1_vertices_frac: Vec::new(),
        q2_vertices: Vec::new(),
        q1_plaquettes_one: Vec::new(),
        q1_plaquettes_frac: Vec::new(),
        q2_plaquettes: Vec::new(),
    };
    for v in 0..geom.num_vertices() {
        let r1 = expectation(&q1_vertex(geom, v), state);
        if r1 == unit {
            loc.q1_vertices_one.push(v);
        } else if !r1.is_zero() {
            loc.q1_vertices_frac.push(v);
        }
        if !expectation(&q2_vertex(geom, v), state).is_zero() {
            loc.q2_vertices.push(v);
        }
    }
    for p in 0..geom.num_plaquettes() {
        let r1 = expectation(&q1_plaquette(geom, p), state);
        if r1 == unit {
            loc.q1_plaquettes_one.push(p);
        } else if !r1.is_zero() {
            loc.q1_plaquettes_frac.push(p);
        }
        if !expectation(&q2_plaquette(geom, p), state).is_zero() {
            loc.q2_plaquettes.push(p);
        }
    }
    loc
}

impl Localization {
    /// Only the listed vertices carry a parity defect; nothing else anywhere.
    fn only_vertices(&self, vertices: &[usize]) -> bool {
        self.q1_vertices_one == vertices
            && self.q1_vertices_frac.is_empty()
            && self.q2_vertices.is_empty()
            && self.q1_plaquettes_one.is_empty()
            && self.q1_plaquettes_frac.is_empty()
            && self.q2_plaquettes.is_empty()
    }

    /// Only the listed plaquettes carry a flux defect; nothing else anywhere.
    fn only_plaquettes(&self, plaquettes: &[usize]) -> bool {
        self.q1_plaquettes_one == plaquettes
            && self.q1_plaquettes_frac.is_empty()
            && self.q2_plaquettes.is_empty()
            && self.q1_vertices_one.is_empty()
            && self.q1_vertices_frac.is_empty()
            && self.q2_vertices.is_empty()
    }
}

/// Shifts a state by `-energy` times itself and reports whether the image of
/// the Hamiltonian equals that multiple exactly.
fn is_exact_eigenstate(h: &LatticeOperator, state: &MergedState, energy: i128) -> bool {
    if state.is_zero() {
        return false;
    }
    let mut image = h.apply(state);
    image.add_state(state, &ExactScalar::from_int(-energy));
    image.is_zero()
}

// ---------------------------------------------------------------------------
// Kernel solves shared by degeneracy and gap-estimate
// ---------------------------------------------------------------------------

struct KernelSolve {
    merged: Vec<((Vec<bool>, Vec<bool>), MergedState)>,
    annihilated: bool,
    sector_rank: usize,
    float: SpectralReport,
    extras: usize,
    eigenvalues: Vec<f64>,
}

/// Exact sector span plus a deflated iterative solve for anything the span
/// misses. The wanted-eigenvalue count adapts until the spectrum is visibly
/// resolved past the numerical kernel (or three rounds pass).
fn solve_kernel(
    spec: &ExperimentSpec,
    geom: &LatticeGeometry,
    keep_vectors: bool,
) -> Result<KernelSolve, ExperimentError> {
    solver_guard(geom)?;
    let merged = all_merged_sector_states(geom)?;
    let h = hamiltonian(geom);
    let annihilated = merged.iter().all(|(_, s)| h.apply(s).is_zero());
    let states: Vec<MergedState> = merged.iter().map(|(_, s)| s.clone()).collect();
    let sector_rank = gram_rank(&states);

    let mv = Spin1Matvec::compile(geom, &h)?;
    let deflation: Vec<Vec<f64>> =
        merged.iter().map(|(_, s)| state_to_dense(s)).collect::<Result<_, _>>()?;
    let dim = mv.dim();
    let (max_vectors, max_matvecs) = if dim <= 60_000 {
        (480, 4000)
    } else if dim <= 600_000 {
        (360, 1800)
    } else {
        (120, 600)
    };

    let mut want = 6usize;
    let mut round = 0usize;
    let (float, extras) = loop {
        let opts = LanczosOptions {
            block_size: (want + 2).clamp(6, 24),
            max_vectors,
            max_matvecs,
            seed: spec.seed,
            keep_ritz_vectors: keep_vectors,
            ..LanczosOptions::default()
        };
        let rep = lowest_eigenvalues(&mv, want, &deflation, &opts);
        let extras = rep.eigenvalues.iter().take_while(|&&e| e < spec.kernel_tol).count();
        round += 1;
        if extras + 2 <= rep.eigenvalues.len() || round >= 3 {
            break (rep, extras);
        }
        want = extras + 4;
    };

    let mut eigenvalues = vec![0.0f64; sector_rank];
    eigenvalues.extend(float.eigenvalues.iter().copied());
    eigenvalues.sort_by(|a, b| a.partial_cmp(b).unwrap());

    Ok(KernelSolve { merged, annihilated, sector_rank, float, extras, eigenvalues })
}

fn residual_checks(rb: &mut ReportBuilder, float: &SpectralReport) {
    let worst = float.residuals.iter().cloned().fold(0.0f64, f64::max);
    let bound = RESIDUAL_FACTOR * float.norm_bound;
    rb.check(
        "residuals-within-documented-bound",
        !float.residuals.is_empty() && worst <= bound,
        format!("max measured residual {worst:.3e}, bound {bound:.3e}"),
    );
    if float.exhausted {
        rb.warn("the iterative solve exhausted the reachable subspace (small lattice)");
    }
    rb.value("matvecs", json!(float.matvecs));
    rb.value("krylov_dim", json!(float.krylov_dim));
    rb.value("restarts", json!(float.restarts));
    rb.value("deflated", json!(float.deflated));
    rb.value("norm_bound", json!(float.norm_bound));
}

/// Diagnostic descriptions of zero modes beyond the exact sector span.
fn extra_mode_findings(geom: &LatticeGeometry, solve: &KernelSolve) -> Vec<serde_json::Value> {
    let Some(vectors) = &solve.float.ritz_vectors else {
        return Vec::new();
    };
    let mut out = Vec::new();
    for (k, vec) in vectors.iter().enumerate().take(solve.extras) {
        let (mut best, mut best_w) = (0usize, 0.0f64);
        for (i, &a) in vec.iter().enumerate() {
            let w = a * a;
            if w > best_w {
                best = i;
                best_w = w;
            }
        }
        let config = index_to_config(best, geom.num_edges());
        let (singles, _) = split_config(config, geom.num_edges());
        out.push(json!({
            "eigenvalue": solve.float.eigenvalues[k],
            "residual": solve.float.residuals[k],
            "dominant_config": config3_string(config, geom.num_edges()),
            "dominant_weight": best_w,
            "dominant_decomposable": decomposable(geom, config),
            "dominant_singles_winding": geom.winding(&singles),
        }));
    }
    out
}

// ---------------------------------------------------------------------------
// groundstate-check
// ---------------------------------------------------------------------------

fn groundstate_check(
    spec: &ExperimentSpec,
    geom: &LatticeGeometry,
) -> Result<Report, ExperimentError> {
    let mut rb = ReportBuilder::new(spec);
    let states: Vec<((Vec<bool>, Vec<bool>), MergedState)> =
        if spec.sector_a.is_none() && spec.sector_b.is_none() {
            all_merged_sector_states(geom)?
        } else {
            let wa = sector_or_trivial(geom, &spec.sector_a, "sector-a")?;
            let wb = sector_or_trivial(geom, &spec.sector_b, "sector-b")?;
            vec![((wa.clone(), wb.clone()), merged_ground_state(geom, &wa, &wb)?)]
        };
    rb.param("states", states.len());
    let supports: Vec<serde_json::Value> = states
        .iter()
        .map(|((wa, wb), s)| {
            json!({
                "sector_a": sector_label(wa),
                "sector_b": sector_label(wb),
                "support": s.support_len(),
            })
        })
        .collect();
    rb.value("sector_states", serde_json::Value::Array(supports));

    let nv = geom.num_vertices();
    let np = geom.num_plaquettes();
    let mut ok = [true; 4];
    for (_, s) in &states {
        for v in 0..nv {
            ok[0] &= q1_vertex(geom, v).apply(s).is_zero();
            ok[1] &= q2_vertex(geom, v).apply(s).is_zero();
        }
        for p in 0..np {
            ok[2] &= q1_plaquette(geom, p).apply(s).is_zero();
            ok[3] &= q2_plaquette(geom, p).apply(s).is_zero();
        }
    }
    let n_states = states.len();
    rb.check(
        "q1-vertex-projectors-annihilate",
        ok[0],
        format!("{n_states} states × {nv} vertices, exact zero images"),
    );
    rb.check(
        "q2-vertex-projectors-annihilate",
        ok[1],
        format!("{n_states} states × {nv} vertices, exact zero images"),
    );
    rb.check(
        "q1-plaquette-projectors-annihilate",
        ok[2],
        format!("{n_states} states × {np} plaquettes, exact zero images"),
    );
    rb.check(
        "q2-plaquette-projectors-annihilate",
        ok[3],
        format!("{n_states} states × {np} plaquettes, exact zero images"),
    );
    let h = hamiltonian(geom);
    rb.check(
        "hamiltonian-annihilates-sector-states",
        states.iter().all(|(_, s)| h.apply(s).is_zero()),
        "H·Ψ = 0 with exact amplitudes",
    );
    Ok(rb.finish())
}

// ---------------------------------------------------------------------------
// degeneracy
// ---------------------------------------------------------------------------

fn degeneracy(spec: &ExperimentSpec, geom: &LatticeGeometry) -> Result<Report, ExperimentError> {
    let mut rb = ReportBuilder::new(spec);
    note_ignored_sectors(spec, &mut rb);
    rb.param("kernel_tol", spec.kernel_tol);
    rb.param("seed", spec.seed);
    let expected = match spec.topology.kind {
        TopologyKind::Sphere => 1usize,
        TopologyKind::Annulus => 3,
        TopologyKind::Torus => 10,
    };
    let solve = solve_kernel(spec, geom, true)?;
    let measured = solve.sector_rank + solve.extras;

    rb.check(
        "sector-states-annihilated-exactly",
        solve.annihilated,
        format!("H·Ψ = 0 for all {} closed-form sector states", solve.merged.len()),
    );
    rb.check(
        "sector-gram-rank-matches-claimed-count",
        solve.sector_rank == expected,
        format!(
            "exact Gram rank {} across {} sector states; claimed degeneracy {expected}",
            solve.sector_rank,
            solve.merged.len()
        ),
    );
    rb.check(
        "kernel-dimension-matches-claimed-count",
        measured == expected,
        format!(
            "measured kernel dimension {measured} ({} exact sector modes + {} further numerical \
             zero modes); claimed {expected}",
            solve.sector_rank, solve.extras
        ),
    );
    rb.check(
        "gram-rank-equals-kernel-dimension",
        solve.sector_rank == measured,
        format!("sector span rank {} vs measured kernel {measured}", solve.sector_rank),
    );
    let beyond_claimed = solve.eigenvalues.get(expected).copied();
    rb.check(
        "eigenvalue-beyond-claimed-kernel-exceeds-floor",
        beyond_claimed.map_or(false, |e| e > 1e-7),
        format!("eigenvalue[{expected}] = {beyond_claimed:?}, floor 1e-7"),
    );
    let beyond_measured = solve.eigenvalues.get(measured).copied();
    let separated = beyond_measured.map_or(false, |e| e >= 100.0 * spec.kernel_tol);
    rb.check(
        "kernel-window-separation-unambiguous",
        separated,
        format!(
            "eigenvalue[{measured}] = {beyond_measured:?} vs 100 × kernel_tol = {:.1e}",
            100.0 * spec.kernel_tol
        ),
    );
    if !separated {
        rb.warn("kernel window ambiguous: the next eigenvalue sits within 100× the tolerance");
    }
    residual_checks(&mut rb, &solve.float);

    if solve.extras > 0 {
        rb.warn(format!(
            "{} zero modes beyond the sector span: the measured degeneracy exceeds the claimed \
             topological count at this size",
            solve.extras
        ));
        let findings = extra_mode_findings(geom, &solve);
        if !findings.is_empty() {
            rb.value("extra_zero_modes", serde_json::Value::Array(findings));
        }
    }
    rb.value("kernel_dim_expected", json!(expected));
    rb.value("kernel_dim_measured", json!(measured));
    rb.value("sector_span_rank", json!(solve.sector_rank));
    rb.value("extra_zero_mode_count", json!(solve.extras));
    rb.eigenvalues(solve.eigenvalues);
    Ok(rb.finish())
}

// ---------------------------------------------------------------------------
// gap-estimate
// ---------------------------------------------------------------------------

fn gap_estimate(spec: &ExperimentSpec, geom: &LatticeGeometry) -> Result<Report, ExperimentError> {
    let mut rb = ReportBuilder::new(spec);
    note_ignored_sectors(spec, &mut rb);
    rb.param("kernel_tol", spec.kernel_tol);
    rb.param("seed", spec.seed);
    let solve = solve_kernel(spec, geom, false)?;
    let measured = solve.sector_rank + solve.extras;

    rb.check(
        "sector-states-annihilated-exactly",
        solve.annihilated,
        format!("H·Ψ = 0 for all {} closed-form sector states", solve.merged.len()),
    );
    let gap = solve.eigenvalues.get(measured).copied();
    rb.check(
        "positive-gap-above-measured-kernel",
        gap.map_or(false, |g| g >= 100.0 * spec.kernel_tol),
        format!(
            "smallest eigenvalue above the {measured}-dimensional measured kernel: {gap:?} \
             (a finite-size property check, not a converged thermodynamic value)"
        ),
    );
    residual_checks(&mut rb, &solve.float);
    rb.value("kernel_dim_measured", json!(measured));
    rb.value("sector_span_rank", json!(solve.sector_rank));
    if let Some(g) = gap {
        rb.value("gap", json!(g));
    }
    rb.eigenvalues(solve.eigenvalues);
    Ok(rb.finish())
}

// ---------------------------------------------------------------------------
// beta-verify
// ---------------------------------------------------------------------------

fn beta_verify(spec: &ExperimentSpec, geom: &LatticeGeometry) -> Result<Report, ExperimentError> {
    let mut rb = ReportBuilder::new(spec);
    note_ignored_sectors(spec, &mut rb);
    let n = geom.num_edges();
    let classes = geom.noncontractible().len();
    let cb_len = geom.contractible_basis().len();
    let materializable = (2 * cb_len) as u32 <= MAX_MERGE_PAIRS.trailing_zeros();

    if materializable {
        let sectors = all_sectors(classes);
        let mut oracle_ok = true;
        let mut mu_ok = true;
        let mut mu_checked = 0usize;
        let mut pair_count = 0usize;
        for (i, wa) in sectors.iter().enumerate() {
            for wb in sectors.iter().skip(i) {
                pair_count += 1;
                let a = toric_ground_state(geom, wa)?;
                let b = toric_ground_state(geom, wb)?;
                let oracle = merge(geom, &a, &b)?;
                let closed = merged_ground_state(geom, wa, wb)?;
                if oracle != closed {
                    oracle_ok = false;
                }
                for (&config, amp) in closed.iter() {
                    let mu = multiplicity(geom, config, wa, wb);
                    let (singles, _) = split_config(config, n);
                    let law = ExactScalar::from_int(mu as i128)
                        * ExactScalar::inv_sqrt2_pow(singles.count() as u32);
                    if !mu.is_power_of_two() || law != amp.clone() {
                        mu_ok = false;
                    }
                    mu_checked += 1;
                }
            }
        }
        rb.check(
            "oracle-merge-matches-closed-form",
            oracle_ok,
            format!("{pair_count} sector pairs compared amplitude-for-amplitude"),
        );
        rb.check(
            "amplitudes-are-multiplicity-times-root-half-power",
            mu_ok,
            format!("{mu_checked} configurations re-derived as μ · (1/√2)^(single edges)"),
        );

        let trivial = vec![false; classes];
        let state = merged_ground_state(geom, &trivial, &trivial)?;
        let mut betti_ok = true;
        let mut betti_checked = 0usize;
        let mut cycle_ok = true;
        let mut pure_count = 0usize;
        for (&config, amp) in state.iter() {
            let (singles, doubles) = split_config(config, n);
            if !doubles.is_empty() {
                continue;
            }
            pure_count += 1;
            let (_, betti) = subgraph_invariants(geom, &singles);
            let rhs = EdgeSubset::empty(geom.num_vertices());
            let count =
                Gf2System::boundary_system(geom, &singles, &rhs).solve_and_count().num_solutions();
            if count != 1u128 << betti {
                cycle_ok = false;
            }
            if winding_rank(geom, &singles) == 0 {
                betti_checked += 1;
                let law = ExactScalar::from_int(1i128 << betti)
                    * ExactScalar::inv_sqrt2_pow(singles.count() as u32);
                if law != amp.clone() {
                    betti_ok = false;
                }
            }
        }
        rb.check(
            "cycle-count-matches-betti-number",
            cycle_ok && pure_count > 0,
            format!("2^betti closed subsets counted on each of {pure_count} pure-loop configurations"),
        );
        rb.check(
            "pure-loop-amplitude-law-holds-for-winding-trivial-subgraphs",
            betti_ok && betti_checked > 0,
            format!(
                "amplitude = 2^betti · (1/√2)^(loop edges) on {betti_checked} of {pure_count} \
                 pure-loop configurations (the remainder carry winding-locked cycles)"
            ),
        );
        rb.value("pure_loop_configs", json!(pure_count));
        rb.value("winding_trivial_configs", json!(betti_checked));
    } else {
        rb.warn(
            "state materialization above the pair-enumeration cap; running the sparse \
             per-configuration checks only",
        );
    }

    if spec.topology.kind != TopologyKind::Sphere {
        let lx = spec.topology.lx;
        let ring_edges: Vec<usize> = (0..2 * lx).collect();
        let rings = EdgeSubset::from_indices(n, &ring_edges);
        let (_, betti) = subgraph_invariants(geom, &rings);
        let rank = winding_rank(geom, &rings);
        let mut labels = vec![0u8; n];
        for &e in &ring_edges {
            labels[e] = 1;
        }
        let config = config_from_labels(&labels);
        let trivial = vec![false; classes];
        let mu = multiplicity(geom, config, &trivial, &trivial);
        rb.check(
            "winding-defect-halves-multiplicity",
            boundary(geom, &rings).is_empty()
                && betti == 2
                && rank == 1
                && mu == 2
                && mu != 1u128 << betti,
            format!(
                "two parallel rings: betti {betti}, winding rank {rank}, μ = {mu} = \
                 2^(betti − rank) ≠ 2^betti"
            ),
        );
        rb.value(
            "winding_defect",
            json!({ "betti": betti, "winding_rank": rank, "multiplicity": mu as u64 }),
        );
    }

    if spec.topology.kind == TopologyKind::Torus && spec.topology.lx >= 4 && spec.topology.ly >= 4 {
        let ring = [
            torus_h(geom, 0, 0),
            torus_v(geom, 1, 0),
            torus_h(geom, 1, 1),
            torus_v(geom, 2, 1),
            torus_h(geom, 2, 2),
            torus_v(geom, 3, 2),
            torus_h(geom, 3, 3),
            torus_v(geom, 0, 3),
        ];
        let ring_set = EdgeSubset::from_indices(n, &ring);
        let closed = boundary(geom, &ring_set).is_empty();
        let winding = geom.winding(&ring_set);
        let shares: Vec<usize> =
            geom.noncontractible().iter().map(|r| ring_set.and(r).count()).collect();
        let mut labels = vec![0u8; n];
        for &e in &ring {
            labels[e] = 1;
        }
        let config = config_from_labels(&labels);
        let mu_both = multiplicity(geom, config, &[true, true], &[false, false]);
        let mu_split = multiplicity(geom, config, &[true, false], &[false, true]);
        let amp_both = merged_amplitude(geom, config, &[true, true], &[false, false]);
        rb.check(
            "winding-pair-witness-separates-sector-states",
            closed
                && winding == vec![true, true]
                && shares.iter().all(|&s| s >= 1)
                && mu_both == 1
                && mu_split == 0
                && !amp_both.is_zero(),
            format!(
                "8-edge doubly-winding ring: μ = {mu_both} when both windings sit on copy A, \
                 μ = {mu_split} when they split across copies"
            ),
        );
        rb.value("witness_config", json!(config3_string(config, n)));
        rb.value("witness_amplitude", scalar_json(&amp_both));
        rb.value("witness_ring_overlap_with_reference_rings", json!(shares));
    }

    Ok(rb.finish())
}

// ---------------------------------------------------------------------------
// excitation-energy
// ---------------------------------------------------------------------------

fn excitation_energy(
    spec: &ExperimentSpec,
    geom: &LatticeGeometry,
) -> Result<Report, ExperimentError> {
    require_torus(spec, "excitation-energy", 2, 2)?;
    let mut rb = ReportBuilder::new(spec);
    let wa = sector_or_trivial(geom, &spec.sector_a, "sector-a")?;
    let wb = sector_or_trivial(geom, &spec.sector_b, "sector-b")?;
    rb.param("sector_a", sector_label(&wa));
    rb.param("sector_b", sector_label(&wb));
    let h = hamiltonian(geom);
    let a0 = toric_ground_state(geom, &wa)?;
    let b0 = toric_ground_state(geom, &wb)?;

    // Vertex pair: a line-parity string between two far-apart vertices.
    let eta = [0usize, geom.num_vertices() - 1];
    let gamma_eta = primal_path(geom, eta[0], eta[1]);
    rb.param("vertex_pair", format!("{},{}", eta[0], eta[1]));
    rb.value("vertex_string", json!(edge_list(&gamma_eta)));
    let psi_vertex = merge(geom, &apply_x_string(&a0, &gamma_eta), &b0)?;
    rb.check(
        "vertex-pair-eigenstate-energy-2J",
        is_exact_eigenstate(&h, &psi_vertex, 2),
        "H·Ψ = 2·Ψ with exact amplitudes",
    );
    let loc = localize_excitations(geom, &psi_vertex);
    rb.check(
        "vertex-excitations-localized-at-endpoints",
        loc.only_vertices(&eta),
        format!(
            "⟨Q1⟩ = 1 exactly at vertices {:?} and every other projector expectation \
             vanishes exactly",
            eta
        ),
    );

    // Plaquette pair: a flux string along a dual path, applied to copy A.
    let xi = [0usize, geom.num_plaquettes() - 1];
    let gamma_xi = dual_path(geom, xi[0], xi[1]);
    rb.param("plaquette_pair", format!("{},{}", xi[0], xi[1]));
    rb.value("plaquette_string", json!(edge_list(&gamma_xi)));
    let psi_plaq = merge(geom, &apply_z_string(&a0, &gamma_xi), &b0)?;
    rb.check(
        "plaquette-pair-eigenstate-energy-2J",
        is_exact_eigenstate(&h, &psi_plaq, 2),
        "H·Ψ = 2·Ψ with exact amplitudes",
    );
    let loc = localize_excitations(geom, &psi_plaq);
    rb.check(
        "plaquette-excitations-localized-at-endpoints",
        loc.only_plaquettes(&xi),
        format!(
            "⟨Q1⟩ = 1 exactly at plaquettes {:?} and every other projector expectation \
             vanishes exactly",
            xi
        ),
    );

    // Same flux pair reached through the dual lattice: dress a vertex pair
    // over there, pull the state back through the edge bijection, rotate
    // every site. Individual winding sectors mix under the rotation, so the
    // route comparison sums over every ordered dual sector pair; that sum
    // interferes down to the winding-trivial pair on this side.
    let (dual, edge_map) = geom.dual_geometry()?;
    let d_ends = [geom.dual_vertex_of_plaquette(xi[0]), geom.dual_vertex_of_plaquette(xi[1])];
    let dual_indices: Vec<usize> =
        (0..edge_map.len()).filter(|&de| gamma_xi.contains(edge_map[de])).collect();
    let gamma_dual = EdgeSubset::from_indices(dual.num_edges(), &dual_indices);
    let ends = boundary(&dual, &gamma_dual);
    let endpoints_match =
        ends.count() == 2 && ends.contains(d_ends[0]) && ends.contains(d_ends[1]);
    let via = transform_u(&transport_state(
        &ordered_dressed_sum(&dual, |s| apply_x_string(s, &gamma_dual))?,
        &edge_map,
        geom,
    ));
    rb.check(
        "dual-transport-route-gives-energy-2J",
        endpoints_match && is_exact_eigenstate(&h, &via, 2),
        "the transported dual vertex-pair sum is an exact eigenstate at the same energy",
    );
    let loc = localize_excitations(geom, &via);
    rb.check(
        "dual-transport-route-localizes-at-same-plaquettes",
        loc.only_plaquettes(&xi),
        format!("⟨Q1⟩ = 1 exactly at plaquettes {:?} after transport and rotation", xi),
    );
    let rank = geom.noncontractible().len();
    let a_triv = toric_ground_state(geom, &vec![false; rank])?;
    let b_triv = toric_ground_state(geom, &vec![false; rank])?;
    let collapse_target = merge(geom, &apply_z_string(&a_triv, &gamma_xi), &b_triv)?;
    match via.scalar_multiple_of(&collapse_target) {
        Some((num, den)) if power_of_sqrt2_ratio(&num, &den) => {
            rb.check(
                "dual-route-sector-sum-collapses-onto-trivial-pair",
                true,
                format!(
                    "transported sum over all ordered dual sectors = {} × the \
                     winding-trivial flux pair",
                    ratio_string(&num, &den)
                ),
            );
            rb.value("route_collapse_ratio", json!(ratio_string(&num, &den)));
        }
        Some((num, den)) => {
            rb.check(
                "dual-route-sector-sum-collapses-onto-trivial-pair",
                false,
                format!(
                    "routes proportional but the ratio {} is not ±(√2)^m",
                    ratio_string(&num, &den)
                ),
            );
        }
        None => {
            rb.check(
                "dual-route-sector-sum-collapses-onto-trivial-pair",
                false,
                "the transported dual sector sum is not proportional to the \
                 winding-trivial flux pair",
            );
        }
    }

    Ok(rb.finish())
}

// ---------------------------------------------------------------------------
// fusion
// ---------------------------------------------------------------------------

fn fusion(spec: &ExperimentSpec, geom: &LatticeGeometry) -> Result<Report, ExperimentError> {
    require_torus(spec, "fusion", 4, 2)?;
    let lx = spec.topology.lx;
    let n = geom.num_edges();
    let mut rb = ReportBuilder::new(spec);
    let wa = sector_or_trivial(geom, &spec.sector_a, "sector-a")?;
    let wb = sector_or_trivial(geom, &spec.sector_b, "sector-b")?;
    rb.param("sector_a", sector_label(&wa));
    rb.param("sector_b", sector_label(&wb));
    let a0 = toric_ground_state(geom, &wa)?;
    let b0 = toric_ground_state(geom, &wb)?;
    let h = hamiltonian(geom);

    // Two open strings whose endpoints meet at one vertex.
    let string_a = EdgeSubset::from_indices(
        n,
        &[torus_v(geom, 0, 0), torus_h(geom, 0, 1), torus_h(geom, 1, 1)],
    );
    let string_b =
        EdgeSubset::from_indices(n, &[torus_h(geom, lx - 2, 0), torus_h(geom, lx - 1, 0)]);
    let fused = torus_vertex(geom, 0, 0);
    let spectators = [torus_vertex(geom, 2, 1), torus_vertex(geom, lx - 2, 0)];
    rb.param("fused_vertex", fused);
    rb.value("string_a", json!(edge_list(&string_a)));
    rb.value("string_b", json!(edge_list(&string_b)));
    rb.value("spectator_vertices", json!(spectators));

    let q1_fused = q1_vertex(geom, fused);
    let q2_fused = q2_vertex(geom, fused);

    // Same copy: both strings dress copy A; their shared endpoint heals.
    let psi_same = merge(geom, &apply_x_string(&apply_x_string(&a0, &string_a), &string_b), &b0)?;
    let same_q1 = expectation(&q1_fused, &psi_same);
    let same_q2 = expectation(&q2_fused, &psi_same);
    rb.check(
        "same-copy-fusion-leaves-vacuum-at-fused-vertex",
        same_q1.is_zero() && same_q2.is_zero(),
        format!("⟨Q1⟩ = ⟨Q2⟩ = 0 exactly at vertex {fused}"),
    );
    rb.check(
        "same-copy-fusion-restores-2J-eigenstate",
        is_exact_eigenstate(&h, &psi_same, 2),
        "only the two far endpoints keep paying energy",
    );

    // Different copies: the endpoints meet but cannot cancel.
    let psi_diff = merge(geom, &apply_x_string(&a0, &string_a), &apply_x_string(&b0, &string_b))?;
    let diff_q1 = expectation(&q1_fused, &psi_diff);
    let diff_q2 = expectation(&q2_fused, &psi_diff);
    rb.check(
        "different-copy-fusion-leaves-q2-particle",
        diff_q1.is_zero() && diff_q2.signum() > 0,
        format!(
            "⟨Q1⟩ = 0 but ⟨Q2⟩ = {} ≈ {:.6} > 0 at vertex {fused}",
            ratio_string(&diff_q2.num, &diff_q2.den),
            diff_q2.to_f64()
        ),
    );
    rb.value("q2_same_copy", ratio_json(&same_q2));
    rb.value("q2_different_copy", ratio_json(&diff_q2));
    rb.value("energy_same_copy", ratio_json(&expectation(&h, &psi_same)));
    rb.value("energy_different_copy", ratio_json(&expectation(&h, &psi_diff)));

    let unit = unit_ratio();
    let spectators_ok = spectators.iter().all(|&v| {
        expectation(&q1_vertex(geom, v), &psi_same) == unit
            && expectation(&q1_vertex(geom, v), &psi_diff) == unit
    });
    rb.check(
        "unfused-endpoints-stay-excited",
        spectators_ok,
        format!("⟨Q1⟩ = 1 exactly at vertices {:?} in both channels", spectators),
    );

    // Three pairings of four defects on one row: a two-dimensional fusion
    // space plus one dependent state, all mutually non-orthogonal.
    let segment = |from: usize, to: usize| {
        let edges: Vec<usize> = (from..to).map(|i| torus_h(geom, i, 0)).collect();
        EdgeSubset::from_indices(n, &edges)
    };
    let pairings = [
        ("(12)(34)", segment(0, 1), segment(2, 3)),
        ("(13)(24)", segment(0, 2), segment(1, 3)),
        ("(14)(23)", segment(0, 3), segment(1, 2)),
    ];
    let mut states = Vec::new();
    for (label, ga, gb) in &pairings {
        rb.param(
            &format!("pairing_{label}"),
            format!("a:{:?} b:{:?}", edge_list(ga), edge_list(gb)),
        );
        states.push(merge(geom, &apply_x_string(&a0, ga), &apply_x_string(&b0, gb))?);
    }
    let rank = gram_rank(&states);
    rb.check(
        "pairing-states-have-gram-rank-3",
        rank == 3,
        format!("exact Gram rank {rank} across the three assignment states"),
    );
    let mut gram = Vec::new();
    let mut any_overlap = false;
    for (i, si) in states.iter().enumerate() {
        let mut row = Vec::new();
        for (j, sj) in states.iter().enumerate() {
            let ip = si.inner(sj);
            if i != j && !ip.is_zero() {
                any_overlap = true;
            }
            row.push(json!(ip.to_string()));
        }
        gram.push(serde_json::Value::Array(row));
    }
    rb.check(
        "pairing-states-overlap",
        any_overlap,
        "at least one pair of distinct assignment states has nonzero exact overlap",
    );
    rb.value("pairing_gram", serde_json::Value::Array(gram));

    Ok(rb.finish())
}

// ---------------------------------------------------------------------------
// braiding
// ---------------------------------------------------------------------------

fn braiding(spec: &ExperimentSpec, geom: &LatticeGeometry) -> Result<Report, ExperimentError> {
    require_torus(spec, "braiding", 3, 3)?;
    let (lx, ly) = (spec.topology.lx, spec.topology.ly);
    let mut rb = ReportBuilder::new(spec);
    let wa = sector_or_trivial(geom, &spec.sector_a, "sector-a")?;
    let wb = sector_or_trivial(geom, &spec.sector_b, "sector-b")?;
    rb.param("sector_a", sector_label(&wa));
    rb.param("sector_b", sector_label(&wb));
    let trivial_sectors = wa.iter().all(|&b| !b) && wb.iter().all(|&b| !b);
    let a0 = toric_ground_state(geom, &wa)?;
    let b0 = toric_ground_state(geom, &wb)?;

    let eta = [torus_vertex(geom, 1, 1), torus_vertex(geom, lx - 1, 1)];
    let gamma_eta = primal_path(geom, eta[0], eta[1]);
    let xi = [torus_plaq(geom, 0, ly - 1), torus_plaq(geom, lx - 2, ly - 1)];
    let gamma_xi = dual_path(geom, xi[0], xi[1]);
    let braid_loop = vertex_star(geom, eta[0]);
    rb.param("vertex_pair", format!("{},{}", eta[0], eta[1]));
    rb.param("plaquette_pair", format!("{},{}", xi[0], xi[1]));
    rb.value("vertex_string", json!(edge_list(&gamma_eta)));
    rb.value("plaquette_string", json!(edge_list(&gamma_xi)));
    rb.value("braid_loop", json!(edge_list(&braid_loop)));

    rb.check(
        "braid-loop-is-closed-on-dual-lattice",
        closed_on_dual_lattice(geom, &braid_loop),
        format!("the star of vertex {} meets every plaquette on an even edge count", eta[0]),
    );
    let string_overlap = braid_loop.and(&gamma_eta).count();
    let avoids_flux_string = braid_loop.and(&gamma_xi).count() == 0;
    rb.check(
        "braid-loop-encircles-only-first-vertex-excitation",
        string_overlap % 2 == 1 && avoids_flux_string,
        format!(
            "the loop crosses the vertex string on {string_overlap} edges (odd) and avoids \
             the flux string entirely"
        ),
    );

    // Same copy: one copy carries both the parity string and the flux
    // string. Different copies: the flux pair moves to copy B.
    let a_eta = apply_x_string(&a0, &gamma_eta);
    let a_same = apply_z_string(&a_eta, &gamma_xi);
    let b_same = b0.clone();
    let a_diff = a_eta;
    let b_diff = apply_z_string(&b0, &gamma_xi);

    // The loop acts diagonally on the copy carrying the flux pair; its sign
    // on each configuration is the crossing parity with the loop. A uniform
    // sign over the support moves through the bilinear merge unchanged, so
    // it *is* the before/after ratio of the merged states.
    let sign_same = uniform_loop_sign(&a_same, &braid_loop);
    let sign_diff = uniform_loop_sign(&b_diff, &braid_loop);
    rb.check(
        "same-copy-braiding-phase-is-minus-one",
        sign_same == Some(-1),
        format!(
            "uniform crossing parity over {} support configurations gives ratio −1",
            a_same.support_len()
        ),
    );
    rb.check(
        "different-copy-braiding-phase-is-plus-one",
        sign_diff == Some(1),
        format!(
            "uniform crossing parity over {} support configurations gives ratio +1",
            b_diff.support_len()
        ),
    );
    rb.value("braid_ratio_same_copy", json!(sign_same));
    rb.value("braid_ratio_different_copy", json!(sign_diff));

    // The ratio only means something on a state with nonzero norm. The
    // all-singles probe along the parity string has exactly one merge
    // preimage (a closed sub-collection of an open simple path is empty),
    // so its merged amplitude factorizes and is nonzero by inspection.
    if trivial_sectors {
        let probe = subset_bits(&gamma_eta);
        let weight = ExactScalar::inv_sqrt2_pow(gamma_eta.count() as u32);
        let amp_same =
            a_same.amplitude(probe) * b_same.amplitude(0) * weight.clone();
        let amp_diff = a_diff.amplitude(probe) * b_diff.amplitude(0) * weight;
        rb.check(
            "braided-states-have-nonzero-norm-certificate",
            !amp_same.is_zero() && !amp_diff.is_zero(),
            "the unique-preimage probe configuration carries a nonzero exact amplitude in \
             both assignments",
        );
        let probe_merged = {
            let mut labels = vec![0u8; geom.num_edges()];
            for e in gamma_eta.iter() {
                labels[e] = 1;
            }
            config_from_labels(&labels)
        };
        rb.value("probe_config", json!(config3_string(probe_merged, geom.num_edges())));
        rb.value("probe_amplitude_same_copy", scalar_json(&amp_same));
        rb.value("probe_amplitude_different_copy", scalar_json(&amp_diff));
    } else {
        rb.warn("norm certificate is only set up for trivial base sectors; skipped");
    }

    // Cross-check against fully materialized states when the pair count
    // permits; above the cap the sparse route is the only one, by design.
    let pairs = a_same.support_len() as u128 * b_same.support_len() as u128;
    if pairs <= MAX_MERGE_PAIRS {
        let mut confirmed = true;
        for (la, lb, sign) in [
            (&a_same, &b_same, -1i128),
            (&a_diff, &b_diff, 1i128),
        ] {
            let before = merge(geom, la, lb)?;
            let after = if sign == -1 {
                merge(geom, &apply_z_string(la, &braid_loop), lb)?
            } else {
                merge(geom, la, &apply_z_string(lb, &braid_loop))?
            };
            let num = before.inner(&after);
            let den = before.norm2();
            let mut diff = num;
            diff = diff + den.clone() * ExactScalar::from_int(-sign);
            if den.is_zero() || !diff.is_zero() {
                confirmed = false;
            }
        }
        rb.check(
            "materialized-overlaps-confirm-sparse-ratios",
            confirmed,
            format!("⟨Ψ|loop|Ψ⟩ / ⟨Ψ|Ψ⟩ recomputed exactly from {pairs} configuration pairs"),
        );
    } else {
        rb.warn(format!(
            "materialized cross-check skipped: {pairs} configuration pairs exceed the \
             enumeration cap; the sparse support arithmetic above stands alone"
        ));
    }

    // Loops that enclose nothing, or both endpoints, see total parity only.
    let null_loop = vertex_star(geom, torus_vertex(geom, 0, ly - 1));
    let both_loop = vertex_star(geom, eta[0]).xor(&vertex_star(geom, eta[1]));
    let null_sign = uniform_loop_sign(&a_same, &null_loop);
    let both_sign = uniform_loop_sign(&a_same, &both_loop);
    rb.check(
        "null-loop-gives-plus-one",
        null_sign == Some(1),
        "a loop enclosing no endpoint reports +1",
    );
    rb.check(
        "two-endpoint-loop-gives-plus-one",
        both_sign == Some(1),
        "a loop enclosing both endpoints reports +1",
    );
    rb.warn(
        "the null loop and the two-endpoint loop enclose an even number of endpoints; their \
         +1 is the total-parity case, not a braiding phase",
    );

    Ok(rb.finish())
}

// ---------------------------------------------------------------------------
// duality-check
// ---------------------------------------------------------------------------

fn duality_check(spec: &ExperimentSpec, geom: &LatticeGeometry) -> Result<Report, ExperimentError> {
    require_torus(spec, "duality-check", 2, 2)?;
    let mut rb = ReportBuilder::new(spec);
    note_ignored_sectors(spec, &mut rb);

    let u = u_duality();
    let id = SiteMatrix::identity();
    rb.check(
        "site-transform-is-symmetric-orthogonal-involution",
        u.mul(&u) == id && u.transpose() == u,
        "U² = 1 and Uᵀ = U on the three-state site",
    );
    rb.check(
        "site-transform-exchanges-sz-and-sx",
        u.mul(&sz()).mul(&u) == sx() && u.mul(&sx()).mul(&u) == sz(),
        "U Sᶻ U = Sˣ and U Sˣ U = Sᶻ entrywise over ℤ[√2]",
    );
    rb.check(
        "site-transform-exchanges-parity-and-line-flip",
        u.mul(&single_parity()).mul(&u) == x_swap() && u.mul(&sz2()).mul(&u) == sx2(),
        "U carries the single-line parity stamp to the 0↔2 swap and (Sᶻ)² to (Sˣ)²",
    );

    let (dual, edge_map) = geom.dual_geometry()?;
    rb.param("dual_edges", dual.num_edges());

    type VertexFamily = fn(&LatticeGeometry, usize) -> LatticeOperator;
    type PlaquetteFamily = fn(&LatticeGeometry, usize) -> LatticeOperator;
    let vertex_families: [VertexFamily; 3] = [a1_vertex, a2_vertex, a3_vertex];
    let plaquette_families: [PlaquetteFamily; 3] = [b1_plaquette, b2_plaquette, b3_plaquette];

    let mut forward_ok = true;
    for p in 0..geom.num_plaquettes() {
        let dv = geom.dual_vertex_of_plaquette(p);
        for i in 0..3 {
            let lhs = single_term_map(&plaquette_families[i](geom, p));
            let rhs = transported_conjugate(&vertex_families[i](&dual, dv), &edge_map);
            if lhs.is_none() || lhs != rhs {
                forward_ok = false;
            }
        }
    }
    rb.check(
        "plaquette-families-equal-transformed-dual-vertex-families",
        forward_ok,
        format!(
            "stamped-term equality over {} plaquettes × 3 families",
            geom.num_plaquettes()
        ),
    );

    let mut star_lookup: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    for v in 0..geom.num_vertices() {
        let mut star: Vec<usize> = geom.vertex_edges(v).to_vec();
        star.sort_unstable();
        star_lookup.insert(star, v);
    }
    let mut reverse_ok = true;
    let mut matched = BTreeSet::new();
    for q in 0..dual.num_plaquettes() {
        let mut transported: Vec<usize> =
            dual.plaquette_edges(q).iter().map(|&de| edge_map[de]).collect();
        transported.sort_unstable();
        match star_lookup.get(&transported) {
            None => reverse_ok = false,
            Some(&v) => {
                matched.insert(v);
                for i in 0..3 {
                    let lhs = single_term_map(&vertex_families[i](geom, v));
                    let rhs = transported_conjugate(&plaquette_families[i](&dual, q), &edge_map);
                    if lhs.is_none() || lhs != rhs {
                        reverse_ok = false;
                    }
                }
            }
        }
    }
    reverse_ok &= matched.len() == geom.num_vertices();
    rb.check(
        "vertex-families-equal-transformed-dual-plaquette-families",
        reverse_ok,
        format!(
            "each of the {} dual plaquettes lands on a distinct primal vertex star with \
             matching stamps",
            dual.num_plaquettes()
        ),
    );

    // State-level: a single sector state does not map onto a single dual
    // sector state — the rotation mixes winding sectors — but the democratic
    // sum over every ordered dual sector pair interferes down to exactly one
    // vector on this side: the winding-trivial sector state.
    let cb_len = geom.contractible_basis().len();
    if (2 * cb_len) as u32 <= MAX_MERGE_PAIRS.trailing_zeros() {
        let dual_full = ordered_sector_sum(&dual)?;
        let image = transform_u(&transport_state(&dual_full, &edge_map, geom));
        let rank = geom.noncontractible().len();
        let trivial = merged_ground_state(geom, &vec![false; rank], &vec![false; rank])?;
        match image.scalar_multiple_of(&trivial) {
            Some((num, den)) if power_of_sqrt2_ratio(&num, &den) => {
                rb.check(
                    "rotated-dual-sector-sum-collapses-onto-trivial-sector",
                    true,
                    format!(
                        "transport + rotation of the full ordered dual sector sum = {} × \
                         the winding-trivial sector state",
                        ratio_string(&num, &den)
                    ),
                );
                rb.value("state_collapse_ratio", json!(ratio_string(&num, &den)));
            }
            Some((num, den)) => {
                rb.check(
                    "rotated-dual-sector-sum-collapses-onto-trivial-sector",
                    false,
                    format!(
                        "states proportional but the ratio {} is not ±(√2)^m",
                        ratio_string(&num, &den)
                    ),
                );
            }
            None => {
                rb.check(
                    "rotated-dual-sector-sum-collapses-onto-trivial-sector",
                    false,
                    "the rotated dual sector sum is not proportional to the \
                     winding-trivial sector state",
                );
            }
        }
    } else {
        rb.warn("state-level comparison skipped: materialization above the enumeration cap");
    }

    Ok(rb.finish())
}

// ---------------------------------------------------------------------------
// commutators
// ---------------------------------------------------------------------------

fn commutators(spec: &ExperimentSpec, geom: &LatticeGeometry) -> Result<Report, ExperimentError> {
    let mut rb = ReportBuilder::new(spec);
    note_ignored_sectors(spec, &mut rb);

    let mut adjacent: Vec<(usize, usize)> = Vec::new();
    for p in 0..geom.num_plaquettes() {
        let mut corners = BTreeSet::new();
        for &e in geom.plaquette_edges(p) {
            let [a, b] = geom.edge_vertices(e);
            corners.insert(a);
            corners.insert(b);
        }
        for v in corners {
            adjacent.push((v, p));
        }
    }
    rb.param("adjacent_pairs", adjacent.len());

    let mut a1_ok = true;
    let mut b1_ok = true;
    let mut q2_noncommuting = true;
    for &(v, p) in &adjacent {
        let a_family = [a1_vertex(geom, v), a2_vertex(geom, v), a3_vertex(geom, v)];
        let b_family = [b1_plaquette(geom, p), b2_plaquette(geom, p), b3_plaquette(geom, p)];
        for b in &b_family {
            a1_ok &= commutator_vanishes(&a_family[0], b);
        }
        for a in &a_family {
            b1_ok &= commutator_vanishes(&b_family[0], a);
        }
        q2_noncommuting &= !commutator_vanishes(&q2_vertex(geom, v), &q2_plaquette(geom, p));
    }
    rb.check(
        "a1-commutes-with-plaquette-families",
        a1_ok,
        format!("[A1(v), Bi(p)] = 0 for i = 1,2,3 on all {} adjacent pairs", adjacent.len()),
    );
    rb.check(
        "b1-commutes-with-vertex-families",
        b1_ok,
        format!("[B1(p), Ai(v)] = 0 for i = 1,2,3 on all {} adjacent pairs", adjacent.len()),
    );
    rb.check(
        "q2-pairs-fail-to-commute-on-every-adjacent-pair",
        q2_noncommuting,
        format!("[Q2(v), Q2(p)] ≠ 0 on each of the {} adjacent pairs", adjacent.len()),
    );

    let disjoint = (0..geom.num_vertices()).find_map(|v| {
        let star = vertex_star(geom, v);
        (0..geom.num_plaquettes())
            .find(|&p| star.and(&geom.plaquette_boundary(p)).count() == 0)
            .map(|p| (v, p))
    });
    match disjoint {
        Some((v, p)) => {
            let ok = commutator_vanishes(&q2_vertex(geom, v), &q2_plaquette(geom, p))
                && commutator_vanishes(&q1_vertex(geom, v), &q1_plaquette(geom, p));
            rb.check(
                "disjoint-pairs-commute",
                ok,
                format!("vertex {v} and plaquette {p} share no edge; their terms commute"),
            );
        }
        None => {
            rb.warn("every vertex touches every plaquette on this lattice; no disjoint sample");
        }
    }

    Ok(rb.finish())
}

// ---------------------------------------------------------------------------
// appendixA-check
// ---------------------------------------------------------------------------

fn appendix_a_check(
    spec: &ExperimentSpec,
    geom: &LatticeGeometry,
) -> Result<Report, ExperimentError> {
    require_torus(spec, "appendixA-check", 4, 4)?;
    let n = geom.num_edges();
    let mut rb = ReportBuilder::new(spec);
    note_ignored_sectors(spec, &mut rb);

    // Singles: two disjoint plaquette loops. Doubles: three open arcs whose
    // endpoints land on the loops with the parity pattern that defeats
    // every closed-pair overlay.
    let loop_a = geom.plaquette_boundary(torus_plaq(geom, 0, 0));
    let loop_b = geom.plaquette_boundary(torus_plaq(geom, 2, 2));
    let arcs: [Vec<usize>; 3] = [
        vec![torus_h(geom, 1, 1), torus_v(geom, 2, 1)],
        vec![
            torus_h(geom, 1, 0),
            torus_h(geom, 2, 0),
            torus_v(geom, 3, 0),
            torus_v(geom, 3, 1),
        ],
        vec![
            torus_v(geom, 0, 1),
            torus_h(geom, 0, 2),
            torus_v(geom, 1, 2),
            torus_h(geom, 1, 3),
        ],
    ];
    let mut labels = vec![0u8; n];
    for e in loop_a.iter().chain(loop_b.iter()) {
        labels[e] = 1;
    }
    for arc in &arcs {
        for &e in arc {
            debug_assert_eq!(labels[e], 0, "instance edges must not collide");
            labels[e] = 2;
        }
    }
    let config = config_from_labels(&labels);
    rb.value("obstructed_config", json!(config3_string(config, n)));

    rb.check(
        "obstructed-configuration-is-not-decomposable",
        !decomposable(geom, config),
        "no pair of closed loop collections overlays this labeling",
    );
    let sectors = all_sectors(geom.noncontractible().len());
    let mut all_zero = true;
    let mut pair_count = 0usize;
    for wa in &sectors {
        for wb in &sectors {
            pair_count += 1;
            if multiplicity(geom, config, wa, wb) != 0 {
                all_zero = false;
            }
        }
    }
    rb.check(
        "obstructed-configuration-has-zero-amplitude-in-every-sector",
        all_zero,
        format!("μ = 0 across all {pair_count} ordered sector pairs"),
    );

    // Plaquette flips on the obstructed configuration: every branch keeps
    // the single-line parities, and some branch shows exactly three corners
    // violating the doubled-line vertex condition.
    let mut parity_ok = true;
    let mut three_corner: Option<(usize, Spin1Config)> = None;
    let mut b2_branches = 0usize;
    for p in 0..geom.num_plaquettes() {
        let mut corners = BTreeSet::new();
        for &e in geom.plaquette_edges(p) {
            let [a, b] = geom.edge_vertices(e);
            corners.insert(a);
            corners.insert(b);
        }
        let image = b2_plaquette(geom, p).apply_to_config(config);
        for (&branch, _) in image.iter() {
            b2_branches += 1;
            for v in 0..geom.num_vertices() {
                if q1_excited_at(geom, branch, v) != q1_excited_at(geom, config, v) {
                    parity_ok = false;
                }
            }
            let excited = corners.iter().filter(|&&v| q2_excited_at(geom, branch, v)).count();
            if excited == 3 && three_corner.is_none() {
                three_corner = Some((p, branch));
            }
        }
    }
    rb.check(
        "b2-preserves-single-line-parities",
        parity_ok && b2_branches > 0,
        format!("{b2_branches} branches over all plaquettes keep every vertex parity"),
    );
    rb.check(
        "b2-branch-exhibits-three-excited-corners",
        three_corner.is_some(),
        match &three_corner {
            Some((p, _)) => format!(
                "plaquette {p} has a branch with exactly three corners violating the \
                 doubled-line vertex condition"
            ),
            None => "no branch with exactly three excited corners found".to_string(),
        },
    );
    if let Some((p, branch)) = &three_corner {
        rb.value(
            "b2_witness",
            json!({ "plaquette": p, "branch": config3_string(*branch, n) }),
        );
    }

    // Doubled-line plaquette moves are weaker: flipping a doubled arc away
    // can land back inside the decomposable set. Reported, not asserted.
    let mut b3_branches = 0usize;
    let mut b3_decomposable = 0usize;
    let mut b3_witness: Option<(usize, Spin1Config)> = None;
    for p in 0..geom.num_plaquettes() {
        let image = b3_plaquette(geom, p).apply_to_config(config);
        for (&branch, _) in image.iter() {
            b3_branches += 1;
            if decomposable(geom, branch) {
                b3_decomposable += 1;
                if b3_witness.is_none() {
                    b3_witness = Some((p, branch));
                }
            }
        }
    }
    rb.value(
        "b3_branches",
        json!({ "total": b3_branches, "decomposable": b3_decomposable }),
    );
    if let Some((p, branch)) = &b3_witness {
        rb.value(
            "b3_decomposable_witness",
            json!({ "plaquette": p, "branch": config3_string(*branch, n) }),
        );
    }

    // The same two loops without the arcs sit squarely inside the amplitude
    // law: μ = 2^betti and the weight follows the single-edge count.
    let mut ref_labels = vec![0u8; n];
    for e in loop_a.iter().chain(loop_b.iter()) {
        ref_labels[e] = 1;
    }
    let ref_config = config_from_labels(&ref_labels);
    let trivial = vec![false; geom.noncontractible().len()];
    let mu = multiplicity(geom, ref_config, &trivial, &trivial);
    let (ref_singles, _) = split_config(ref_config, n);
    let (_, betti) = subgraph_invariants(geom, &ref_singles);
    let amp = merged_amplitude(geom, ref_config, &trivial, &trivial);
    let law = ExactScalar::from_int(4) * ExactScalar::inv_sqrt2_pow(8);
    rb.check(
        "reference-configuration-follows-amplitude-law",
        decomposable(geom, ref_config) && mu == 4 && betti == 2 && amp == law,
        format!("two disjoint loops alone: μ = {mu} = 2^{betti}, amplitude μ · (1/√2)^8"),
    );
    rb.value("reference_amplitude", scalar_json(&amp));

    Ok(rb.finish())
}

// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(kind: ExperimentKind, topo: TopologyKind, lx: usize, ly: usize) -> ExperimentSpec {
        ExperimentSpec::new(kind, Topology { kind: topo, lx, ly })
    }

    #[test]
    fn experiment_names_round_trip() {
        for kind in ExperimentKind::ALL {
            assert_eq!(kind.name().parse::<ExperimentKind>().unwrap(), kind);
        }
        assert!("braids".parse::<ExperimentKind>().is_err());
        assert_eq!(
            "appendixA-check".parse::<ExperimentKind>().unwrap(),
            ExperimentKind::AppendixACheck
        );
    }

    #[test]
    fn spec_json_round_trip() {
        let s = spec(ExperimentKind::Braiding, TopologyKind::Torus, 4, 4);
        let text = serde_json::to_string(&s).unwrap();
        assert!(text.contains("\"braiding\""));
        let back: ExperimentSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(back.kind, s.kind);
        assert_eq!(back.topology.lx, 4);
        // Defaults fill in when omitted.
        let sparse: ExperimentSpec = serde_json::from_str(
            r#"{"kind":"degeneracy","topology":{"kind":"annulus","lx":2,"ly":1}}"#,
        )
        .unwrap();
        assert_eq!(sparse.kernel_tol, DEFAULT_KERNEL_TOL);
        assert_eq!(sparse.seed, DEFAULT_SEED);
        assert!(sparse.sector_a.is_none());
    }

    #[test]
    fn groundstate_check_passes_on_small_annulus() {
        let report = run(&spec(ExperimentKind::GroundstateCheck, TopologyKind::Annulus, 2, 1))
            .expect("runs");
        assert!(report.passed, "assertions: {:?}", report.assertions);
        assert_eq!(report.assertions.len(), 5);
    }

    #[test]
    fn degeneracy_reports_honest_mismatch_on_small_annulus() {
        let report =
            run(&spec(ExperimentKind::Degeneracy, TopologyKind::Annulus, 2, 1)).expect("runs");
        assert!(!report.passed, "the measured kernel exceeds the claimed count at this size");
        let by_name = |name: &str| {
            report.assertions.iter().find(|a| a.name == name).map(|a| a.passed)
        };
        assert_eq!(by_name("sector-states-annihilated-exactly"), Some(true));
        assert_eq!(by_name("sector-gram-rank-matches-claimed-count"), Some(true));
        assert_eq!(by_name("kernel-dimension-matches-claimed-count"), Some(false));
        assert_eq!(by_name("residuals-within-documented-bound"), Some(true));
        assert_eq!(report.values["kernel_dim_measured"], json!(4));
        assert!(report.eigenvalues.is_some());
    }

    #[test]
    fn solver_refuses_oversized_lattices() {
        let err = run(&spec(ExperimentKind::Degeneracy, TopologyKind::Torus, 3, 3)).unwrap_err();
        assert!(matches!(err, ExperimentError::BasisTooLarge { edges: 18, .. }));
    }

    #[test]
    fn braiding_needs_a_large_enough_torus() {
        let err = run(&spec(ExperimentKind::Braiding, TopologyKind::Torus, 2, 2)).unwrap_err();
        assert!(matches!(err, ExperimentError::ExtentsTooSmall { .. }));
        let err = run(&spec(ExperimentKind::Braiding, TopologyKind::Annulus, 4, 4)).unwrap_err();
        assert!(matches!(err, ExperimentError::NeedsTorus { .. }));
    }

    #[test]
    fn commutators_pass_on_smallest_torus() {
        let report =
            run(&spec(ExperimentKind::Commutators, TopologyKind::Torus, 2, 2)).expect("runs");
        assert!(report.passed, "assertions: {:?}", report.assertions);
        // Every vertex touches every plaquette at this size.
        assert!(!report.warnings.is_empty());
    }

    #[test]
    fn obstructed_configuration_checks_pass() {
        let report =
            run(&spec(ExperimentKind::AppendixACheck, TopologyKind::Torus, 4, 4)).expect("runs");
        assert!(report.passed, "assertions: {:?}", report.assertions);
    }

    #[test]
    fn reports_are_deterministic() {
        let s = spec(ExperimentKind::Commutators, TopologyKind::Torus, 2, 2);
        let mut first = run(&s).expect("runs");
        let mut second = run(&s).expect("runs");
        first.wall_seconds = 0.0;
        second.wall_seconds = 0.0;
        assert_eq!(
            serde_json::to_string(&first).unwrap(),
            serde_json::to_string(&second).unwrap()
        );
    }
}
