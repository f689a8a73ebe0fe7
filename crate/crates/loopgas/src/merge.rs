//! The edge-wise merge of two toric-code copies into a spin-1 loop gas.
//!
//! Per edge, the two spin-1/2 layers are projected onto their triplet
//! (the interlayer singlet is removed), leaving three local labels:
//! `0` = no line, `1` = a single line, `2` = a doubled line. A pair of
//! spin-1/2 configurations `(c_A, c_B)` maps onto the label sum
//! `c_A(e) + c_B(e)`, and the projection contributes one factor `1/√2`
//! for every edge where exactly one copy carries a line (the symmetrized
//! triplet component of an anti-aligned pair).
//!
//! Two routes to the merged amplitudes are implemented and tested against
//! each other:
//!
//! * [`merge`] — the oracle: enumerate every pair of configurations in the
//!   two input states and accumulate `amp_A · amp_B · (1/√2)^{#singles}`.
//! * [`merged_amplitude`] — the closed form: a merged configuration with
//!   single-line set `S` and doubled-line set `D` receives amplitude
//!   `μ · (1/√2)^{|S|}`, where `μ` counts the GF(2) solutions `S₁ ⊆ S` of
//!   `∂S₁ = ∂D` subject to the copy-A winding parities. `μ` is zero or a
//!   power of two; on a simply connected lattice it equals `2^{n_L}` with
//!   `n_L` the first Betti number of the single-line subgraph, while
//!   non-trivial winding can reduce the exponent by the subgraph's winding
//!   rank.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf2::{boundary, EdgeSubset, Gf2System};
use crate::lattice::LatticeGeometry;
use crate::scalar::ExactScalar;
use crate::toric::{SpinHalfConfig, ToricState};

/// One spin-1 configuration: two bits per edge, value `0`, `1` or `2`.
pub type Spin1Config = u128;

/// Edge label: no line.
pub const NO_LINE: u8 = 0;
/// Edge label: a single line.
pub const SINGLE: u8 = 1;
/// Edge label: a doubled line.
pub const DOUBLE: u8 = 2;

/// Cap on the number of configuration pairs [`merge`] will enumerate.
pub const MAX_MERGE_PAIRS: u128 = 1 << 26;

/// Errors from merged-state construction and I/O.
#[derive(Debug, Error)]
pub enum MergeError {
    #[error("merging these states would enumerate {pairs} pairs (cap {MAX_MERGE_PAIRS}); use merged_amplitude for single configurations")]
    TooManyPairs { pairs: u128 },
    #[error("state file invalid: {0}")]
    BadFile(String),
}

/// Label of edge `e` in a merged configuration.
pub fn label_at(config: Spin1Config, e: usize) -> u8 {
    (config >> (2 * e) & 3) as u8
}

/// Builds a merged configuration from per-edge labels.
pub fn config_from_labels(labels: &[u8]) -> Spin1Config {
    let mut c: Spin1Config = 0;
    for (e, &l) in labels.iter().enumerate() {
        debug_assert!(l <= DOUBLE);
        c |= (l as u128) << (2 * e);
    }
    c
}

/// The merged configuration of a pair of spin-1/2 configurations.
pub fn merge_pair_config(ca: SpinHalfConfig, cb: SpinHalfConfig, num_edges: usize) -> Spin1Config {
    debug_assert!(num_edges >= 64 || (ca | cb) >> num_edges == 0);
    // Doubled lines get label 2 (high bit of the pair), singles label 1.
    spread_bits(ca & cb) << 1 | spread_bits(ca ^ cb)
}

/// Spreads a 64-bit mask into every other bit of a u128.
fn spread_bits(mask: u64) -> u128 {
    let mut out: u128 = 0;
    let mut m = mask;
    while m != 0 {
        let e = m.trailing_zeros();
        out |= 1u128 << (2 * e);
        m &= m - 1;
    }
    out
}

/// The single-line and doubled-line edge sets of a merged configuration.
pub fn split_config(config: Spin1Config, num_edges: usize) -> (EdgeSubset, EdgeSubset) {
    let mut singles = EdgeSubset::empty(num_edges);
    let mut doubles = EdgeSubset::empty(num_edges);
    for e in 0..num_edges {
        match label_at(config, e) {
            SINGLE => singles.insert(e),
            DOUBLE => doubles.insert(e),
            _ => {}
        }
    }
    (singles, doubles)
}

/// Renders a merged configuration as a `'0'/'1'/'2'` string, index = edge id.
pub fn config3_string(config: Spin1Config, num_edges: usize) -> String {
    (0..num_edges)
        .map(|e| char::from(b'0' + label_at(config, e)))
        .collect()
}

/// Parses the output of [`config3_string`].
pub fn parse_config3_string(s: &str, num_edges: usize) -> Result<Spin1Config, MergeError> {
    if s.len() != num_edges {
        return Err(MergeError::BadFile(format!(
            "configuration string has {} characters, lattice has {num_edges} edges",
            s.len()
        )));
    }
    let mut config: Spin1Config = 0;
    for (e, ch) in s.chars().enumerate() {
        match ch {
            '0' => {}
            '1' => config |= 1u128 << (2 * e),
            '2' => config |= 2u128 << (2 * e),
            other => {
                return Err(MergeError::BadFile(format!("bad character {other:?} in configuration")))
            }
        }
    }
    Ok(config)
}

/// Sparse spin-1 state with exact amplitudes, keyed by merged configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MergedState {
    num_edges: usize,
    geometry_hash: u64,
    amps: BTreeMap<Spin1Config, ExactScalar>,
}

impl MergedState {
    pub fn zero(geom: &LatticeGeometry) -> Self {
        MergedState {
            num_edges: geom.num_edges(),
            geometry_hash: geom.geometry_hash(),
            amps: BTreeMap::new(),
        }
    }

    /// A zero state sharing `other`'s lattice identity.
    pub fn zero_like(other: &MergedState) -> Self {
        MergedState {
            num_edges: other.num_edges,
            geometry_hash: other.geometry_hash,
            amps: BTreeMap::new(),
        }
    }

    /// A zero state from raw identity data (for operator plumbing that does
    /// not hold a geometry reference).
    pub fn from_raw(num_edges: usize, geometry_hash: u64) -> Self {
        MergedState { num_edges, geometry_hash, amps: BTreeMap::new() }
    }

    pub fn num_edges(&self) -> usize {
        self.num_edges
    }

    pub fn geometry_hash(&self) -> u64 {
        self.geometry_hash
    }

    pub fn support_len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_zero(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn amplitude(&self, config: Spin1Config) -> ExactScalar {
        self.amps.get(&config).cloned().unwrap_or_else(ExactScalar::zero)
    }

    pub fn add(&mut self, config: Spin1Config, value: ExactScalar) {
        if value.is_zero() {
            return;
        }
        let slot = self.amps.entry(config).or_insert_with(ExactScalar::zero);
        *slot = slot.clone() + value;
        if slot.is_zero() {
            self.amps.remove(&config);
        }
    }

    /// Adds `factor · other` into `self`.
    pub fn add_state(&mut self, other: &MergedState, factor: &ExactScalar) {
        assert_eq!(self.geometry_hash, other.geometry_hash);
        for (c, a) in other.amps.iter() {
            self.add(*c, a.clone() * factor.clone());
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Spin1Config, &ExactScalar)> {
        self.amps.iter()
    }

    pub fn scale(&mut self, factor: &ExactScalar) {
        if factor.is_zero() {
            self.amps.clear();
            return;
        }
        for v in self.amps.values_mut() {
            *v = v.clone() * factor.clone();
        }
    }

    /// Exact inner product `⟨self|other⟩` (amplitudes are real).
    pub fn inner(&self, other: &MergedState) -> ExactScalar {
        assert_eq!(
            self.geometry_hash, other.geometry_hash,
            "inner product between states on different lattices"
        );
        let (small, large) =
            if self.amps.len() <= other.amps.len() { (self, other) } else { (other, self) };
        let mut acc = ExactScalar::zero();
        for (c, a) in small.amps.iter() {
            if let Some(b) = large.amps.get(c) {
                acc = acc + a.clone() * b.clone();
            }
        }
        acc
    }

    pub fn norm2(&self) -> ExactScalar {
        let mut acc = ExactScalar::zero();
        for a in self.amps.values() {
            acc = acc + a.clone() * a.clone();
        }
        acc
    }

    /// If `self == λ·other` exactly, returns λ as `(numerator, denominator)`.
    pub fn scalar_multiple_of(&self, other: &MergedState) -> Option<(ExactScalar, ExactScalar)> {
        assert_eq!(self.geometry_hash, other.geometry_hash);
        if other.is_zero() {
            return if self.is_zero() {
                Some((ExactScalar::zero(), ExactScalar::one()))
            } else {
                None
            };
        }
        let (c0, den) = other.amps.iter().next().unwrap();
        let num = self.amplitude(*c0);
        for c in self.amps.keys().chain(other.amps.keys()) {
            if self.amplitude(*c) * den.clone() != other.amplitude(*c) * num.clone() {
                return None;
            }
        }
        Some((num, den.clone()))
    }

    pub fn to_file(&self) -> MergedStateFile {
        MergedStateFile {
            version: 1,
            geometry_hash: format!("{:016x}", self.geometry_hash),
            num_edges: self.num_edges,
            amplitudes: self
                .amps
                .iter()
                .map(|(c, a)| (config3_string(*c, self.num_edges), a.clone()))
                .collect(),
        }
    }

    pub fn from_file(geom: &LatticeGeometry, file: &MergedStateFile) -> Result<Self, MergeError> {
        if file.version != 1 {
            return Err(MergeError::BadFile(format!("unknown version {}", file.version)));
        }
        let expected = format!("{:016x}", geom.geometry_hash());
        if file.geometry_hash != expected {
            return Err(MergeError::BadFile(format!(
                "geometry hash {} does not match lattice {}",
                file.geometry_hash, expected
            )));
        }
        if file.num_edges != geom.num_edges() {
            return Err(MergeError::BadFile("edge count mismatch".into()));
        }
        let mut state = MergedState::zero(geom);
        for (s, a) in &file.amplitudes {
            state.add(parse_config3_string(s, geom.num_edges())?, a.clone());
        }
        Ok(state)
    }
}

/// JSON-facing snapshot of a [`MergedState`]; configurations are written as
/// `'0'/'1'/'2'` strings indexed by edge id.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MergedStateFile {
    pub version: u32,
    pub geometry_hash: String,
    pub num_edges: usize,
    pub amplitudes: Vec<(String, ExactScalar)>,
}

/// Oracle merge: enumerates every pair of support configurations and
/// accumulates `amp_A · amp_B · (1/√2)^{#anti-aligned edges}`.
pub fn merge(
    geom: &LatticeGeometry,
    a: &ToricState,
    b: &ToricState,
) -> Result<MergedState, MergeError> {
    assert_eq!(a.geometry_hash(), geom.geometry_hash());
    assert_eq!(b.geometry_hash(), geom.geometry_hash());
    let pairs = a.support_len() as u128 * b.support_len() as u128;
    if pairs > MAX_MERGE_PAIRS {
        return Err(MergeError::TooManyPairs { pairs });
    }
    let n = geom.num_edges();
    let mut out = MergedState::zero(geom);
    for (&ca, wa) in a.iter() {
        for (&cb, wb) in b.iter() {
            let singles = (ca ^ cb).count_ones();
            let weight = wa.clone() * wb.clone() * ExactScalar::inv_sqrt2_pow(singles);
            out.add(merge_pair_config(ca, cb, n), weight);
        }
    }
    Ok(out)
}

/// Number of connected components and first Betti number `n_L` of the
/// subgraph spanned by `support` (isolated vertices are not counted).
pub fn subgraph_invariants(geom: &LatticeGeometry, support: &EdgeSubset) -> (usize, usize) {
    let nv = geom.num_vertices();
    let mut parent: Vec<usize> = (0..nv).collect();
    fn find(parent: &mut Vec<usize>, mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut touched = vec![false; nv];
    let mut edges = 0usize;
    for e in support.iter() {
        edges += 1;
        let [u, v] = geom.edge_vertices(e);
        touched[u] = true;
        touched[v] = true;
        let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
        if ru != rv {
            parent[ru] = rv;
        }
    }
    let mut roots = std::collections::BTreeSet::new();
    let mut vertices = 0usize;
    for v in 0..nv {
        if touched[v] {
            vertices += 1;
            roots.insert(find(&mut parent, v));
        }
    }
    let components = roots.len();
    let betti = edges + components - vertices;
    (components, betti)
}

/// Rank of the winding map restricted to the cycle space of the subgraph
/// spanned by `support` (0 on the sphere or for winding-trivial subgraphs).
pub fn winding_rank(geom: &LatticeGeometry, support: &EdgeSubset) -> usize {
    let rhs = EdgeSubset::empty(geom.num_vertices());
    let free = Gf2System::boundary_system(geom, support, &rhs).solve_and_count();
    let mut sys = Gf2System::boundary_system(geom, support, &rhs);
    for cut in geom.cross_cuts() {
        sys.push_pairing_row(cut, false);
    }
    let constrained = sys.solve_and_count();
    // Both systems are solvable (the empty set is a cycle with no winding).
    debug_assert!(free.is_solvable() && constrained.is_solvable());
    (free.log2_solutions - constrained.log2_solutions) as usize
}

/// The GF(2) multiplicity `μ` of a merged configuration in the image of the
/// sector pair `(wind_a, wind_b)`: the number of ways to split its
/// single-line set between the two copies so both copy configurations are
/// closed and carry the requested windings. Zero or a power of two.
pub fn multiplicity(
    geom: &LatticeGeometry,
    config: Spin1Config,
    wind_a: &[bool],
    wind_b: &[bool],
) -> u128 {
    let classes = geom.cross_cuts().len();
    assert_eq!(wind_a.len(), classes, "copy-A winding parities");
    assert_eq!(wind_b.len(), classes, "copy-B winding parities");
    let (singles, doubles) = split_config(config, geom.num_edges());
    // Copy B carries S \ S₁ plus the doubles; closure of both copies forces
    // the single-line set itself to be closed.
    if !boundary(geom, &singles).is_empty() {
        return 0;
    }
    // Winding bookkeeping: wind_B = wind_A ⊕ wind(S) class by class.
    for (k, cut) in geom.cross_cuts().iter().enumerate() {
        if wind_b[k] != (wind_a[k] ^ singles.dot(cut)) {
            return 0;
        }
    }
    let rhs = boundary(geom, &doubles);
    let mut sys = Gf2System::boundary_system(geom, &singles, &rhs);
    for (k, cut) in geom.cross_cuts().iter().enumerate() {
        // S₁ ∪ D must wind like copy A: cut·S₁ = wind_a[k] ⊕ cut·D.
        sys.push_pairing_row(cut, wind_a[k] ^ doubles.dot(cut));
    }
    sys.solve_and_count().num_solutions()
}

/// Closed-form merged amplitude: `μ · (1/√2)^{|S|}`.
pub fn merged_amplitude(
    geom: &LatticeGeometry,
    config: Spin1Config,
    wind_a: &[bool],
    wind_b: &[bool],
) -> ExactScalar {
    let mu = multiplicity(geom, config, wind_a, wind_b);
    if mu == 0 {
        return ExactScalar::zero();
    }
    let (singles, _) = split_config(config, geom.num_edges());
    debug_assert!(mu <= i128::MAX as u128);
    ExactScalar::from_int(mu as i128) * ExactScalar::inv_sqrt2_pow(singles.count() as u32)
}

/// True iff the merged configuration lies in the image of *some* sector
/// pair: its single-line set is closed and can absorb the doubled-line
/// boundary.
pub fn decomposable(geom: &LatticeGeometry, config: Spin1Config) -> bool {
    let (singles, doubles) = split_config(config, geom.num_edges());
    if !boundary(geom, &singles).is_empty() {
        return false;
    }
    let rhs = boundary(geom, &doubles);
    Gf2System::boundary_system(geom, &singles, &rhs)
        .solve_and_count()
        .num_solutions()
        > 0
}

/// The merged ground state for one sector pair, built by discovering the
/// support from configuration pairs and then assigning each configuration
/// its closed-form amplitude `μ · (1/√2)^{|S|}` independently.
pub fn merged_ground_state(
    geom: &LatticeGeometry,
    wind_a: &[bool],
    wind_b: &[bool],
) -> Result<MergedState, MergeError> {
    let a = crate::toric::toric_ground_state(geom, wind_a)
        .map_err(|e| MergeError::BadFile(e.to_string()))?;
    let b = crate::toric::toric_ground_state(geom, wind_b)
        .map_err(|e| MergeError::BadFile(e.to_string()))?;
    let pairs = a.support_len() as u128 * b.support_len() as u128;
    if pairs > MAX_MERGE_PAIRS {
        return Err(MergeError::TooManyPairs { pairs });
    }
    let n = geom.num_edges();
    let mut support = std::collections::BTreeSet::new();
    for (&ca, _) in a.iter() {
        for (&cb, _) in b.iter() {
            support.insert(merge_pair_config(ca, cb, n));
        }
    }
    let mut out = MergedState::zero(geom);
    for config in support {
        let amp = merged_amplitude(geom, config, wind_a, wind_b);
        debug_assert!(!amp.is_zero(), "support configurations have nonzero multiplicity");
        out.add(config, amp);
    }
    Ok(out)
}

/// All merged ground states, one per *unordered* sector pair (the merge is
/// symmetric in its two inputs), keyed by the pair of winding vectors.
pub fn all_merged_sector_states(
    geom: &LatticeGeometry,
) -> Result<Vec<((Vec<bool>, Vec<bool>), MergedState)>, MergeError> {
    let classes = geom.noncontractible().len();
    let sectors: Vec<Vec<bool>> = (0u32..(1 << classes))
        .map(|bits| (0..classes).map(|k| bits >> k & 1 == 1).collect())
        .collect();
    let mut out = Vec::new();
    for (i, wa) in sectors.iter().enumerate() {
        for wb in sectors.iter().skip(i) {
            let state = merged_ground_state(geom, wa, wb)?;
            out.push(((wa.clone(), wb.clone()), state));
        }
    }
    Ok(out)
}
