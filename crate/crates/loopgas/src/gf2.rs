//! GF(2) linear algebra over edge subsets.
//!
//! Loop configurations, plaquette boundaries, string paths and winding cuts
//! are all subsets of lattice edges, i.e. vectors over GF(2) with symmetric
//! difference as addition. This module packs a subset into a single machine
//! word ([`EdgeSubset`], up to 64 edges — ample for the desk-scale lattices
//! this crate targets, where the largest case is the 4×4 torus with 32
//! edges) and provides the two primitives everything else leans on:
//!
//! * the boundary map `∂`, sending an edge set to the set of vertices it
//!   touches an odd number of times, and
//! * [`Gf2System`]: a linear system `M·x = r` over a restricted column
//!   support, solved by Gaussian elimination with deterministic pivoting.
//!   [`Gf2System::solve_and_count`] reports the full solution count, which is
//!   always `0` or `2^nullity` — the multiplicity engine behind merged
//!   amplitudes.
//!
//! Row-echelon reduction ([`Echelon`]) is shared with the lattice module for
//! cycle-space rank and independence questions.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::LatticeGeometry;

/// Largest supported subset length (one machine word).
pub const MAX_EDGES: usize = 64;

/// Errors from subset construction and parsing.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum Gf2Error {
    #[error("subset length {0} exceeds the {MAX_EDGES}-edge limit")]
    TooLong(usize),
    #[error("index {index} out of range for subset of length {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("hex string does not describe a subset of length {0}")]
    BadHex(usize),
    #[error("subset length {got} does not match geometry with {expected} edges")]
    LengthMismatch { got: usize, expected: usize },
}

/// A packed index set over the edges of a fixed lattice (also reused for
/// vertex parity vectors, where indices run over vertices instead).
///
/// Addition is symmetric difference (`^`); the zero vector is the empty set.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeSubset {
    bits: u64,
    len: u16,
}

impl EdgeSubset {
    /// The empty subset over `len` indices.
    pub fn empty(len: usize) -> Self {
        assert!(len <= MAX_EDGES, "subset length {len} exceeds {MAX_EDGES}");
        EdgeSubset { bits: 0, len: len as u16 }
    }

    /// Builds a subset from explicit indices.
    pub fn from_indices(len: usize, indices: &[usize]) -> Self {
        let mut s = EdgeSubset::empty(len);
        for &i in indices {
            s.insert(i);
        }
        s
    }

    /// Builds a subset from a raw bit pattern (low bit = index 0).
    pub fn from_bits(len: usize, bits: u64) -> Self {
        let mut s = EdgeSubset::empty(len);
        debug_assert!(len == 64 || bits < (1u64 << len), "bits outside subset length");
        s.bits = bits;
        s
    }

    /// The raw bit pattern.
    pub fn bits(&self) -> u64 {
        self.bits
    }

    /// Number of indices the subset ranges over.
    pub fn len(&self) -> usize {
        self.len as usize
    }

    /// True iff no index is set.
    pub fn is_empty(&self) -> bool {
        self.bits == 0
    }

    /// Number of set indices.
    pub fn count(&self) -> usize {
        self.bits.count_ones() as usize
    }

    /// Membership test.
    pub fn contains(&self, index: usize) -> bool {
        assert!(index < self.len(), "index {index} out of range");
        self.bits >> index & 1 == 1
    }

    /// Inserts an index.
    pub fn insert(&mut self, index: usize) {
        assert!(index < self.len(), "index {index} out of range");
        self.bits |= 1 << index;
    }

    /// Toggles an index.
    pub fn toggle(&mut self, index: usize) {
        assert!(index < self.len(), "index {index} out of range");
        self.bits ^= 1 << index;
    }

    /// Symmetric difference (GF(2) addition).
    pub fn xor(&self, other: &Self) -> Self {
        assert_eq!(self.len, other.len, "subset length mismatch");
        EdgeSubset { bits: self.bits ^ other.bits, len: self.len }
    }

    /// Intersection.
    pub fn and(&self, other: &Self) -> Self {
        assert_eq!(self.len, other.len, "subset length mismatch");
        EdgeSubset { bits: self.bits & other.bits, len: self.len }
    }

    /// Union.
    pub fn or(&self, other: &Self) -> Self {
        assert_eq!(self.len, other.len, "subset length mismatch");
        EdgeSubset { bits: self.bits | other.bits, len: self.len }
    }

    /// Parity of the intersection with `other` — the GF(2) pairing.
    pub fn dot(&self, other: &Self) -> bool {
        self.and(other).count() % 2 == 1
    }

    /// Iterator over set indices in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        let len = self.len();
        (0..len).filter(move |&i| self.bits >> i & 1 == 1)
    }

    /// Hex encoding (low nibble first trimmed form is avoided: fixed width).
    pub fn to_hex(&self) -> String {
        let width = self.len().div_ceil(4);
        format!("{:0width$x}", self.bits, width = width.max(1))
    }

    /// Parses the fixed-width hex form produced by [`EdgeSubset::to_hex`].
    pub fn from_hex(len: usize, hex: &str) -> Result<Self, Gf2Error> {
        if len > MAX_EDGES {
            return Err(Gf2Error::TooLong(len));
        }
        let bits = u64::from_str_radix(hex, 16).map_err(|_| Gf2Error::BadHex(len))?;
        if len < 64 && bits >= 1u64 << len {
            return Err(Gf2Error::BadHex(len));
        }
        Ok(EdgeSubset { bits, len: len as u16 })
    }
}

impl std::fmt::Debug for EdgeSubset {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "EdgeSubset{{")?;
        for (n, i) in self.iter().enumerate() {
            if n > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}/{}", self.len)
    }
}

/// Serialized subset: hex bits plus the hash of the geometry it indexes,
/// so a file cannot silently be replayed against a different lattice.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EdgeSubsetFile {
    pub version: u32,
    pub geometry_hash: String,
    pub num_edges: usize,
    pub bits_hex: String,
}

impl EdgeSubset {
    /// Serializable form tied to `geom`.
    pub fn to_file(&self, geom: &LatticeGeometry) -> Result<EdgeSubsetFile, Gf2Error> {
        if self.len() != geom.num_edges() {
            return Err(Gf2Error::LengthMismatch { got: self.len(), expected: geom.num_edges() });
        }
        Ok(EdgeSubsetFile {
            version: 1,
            geometry_hash: format!("{:016x}", geom.geometry_hash()),
            num_edges: self.len(),
            bits_hex: self.to_hex(),
        })
    }

    /// Reads back a serialized subset, verifying the geometry hash.
    pub fn from_file(file: &EdgeSubsetFile, geom: &LatticeGeometry) -> Result<Self, Gf2Error> {
        let expected = format!("{:016x}", geom.geometry_hash());
        if file.geometry_hash != expected || file.num_edges != geom.num_edges() {
            return Err(Gf2Error::LengthMismatch {
                got: file.num_edges,
                expected: geom.num_edges(),
            });
        }
        EdgeSubset::from_hex(file.num_edges, &file.bits_hex)
    }
}

/// Boundary map: vertices incident to an odd number of edges of `subset`.
///
/// The returned `EdgeSubset` indexes vertices. A set is closed (a disjoint
/// union of loops) iff its boundary is empty.
pub fn boundary(geom: &LatticeGeometry, subset: &EdgeSubset) -> EdgeSubset {
    assert_eq!(subset.len(), geom.num_edges(), "subset/geometry mismatch");
    let mut parity = EdgeSubset::empty(geom.num_vertices());
    for e in subset.iter() {
        let [u, v] = geom.edge_vertices(e);
        parity.toggle(u);
        parity.toggle(v);
    }
    parity
}

/// Row-echelon form of a list of GF(2) vectors; answers rank, membership and
/// independent-subset questions deterministically (lowest pivot index first).
#[derive(Debug, Clone)]
pub struct Echelon {
    len: usize,
    /// Reduced rows, each with a distinct pivot (lowest set bit).
    rows: Vec<u64>,
    /// Pivot column of each reduced row.
    pivots: Vec<usize>,
    /// Indices (into the input list) of an independent generating subset.
    kept: Vec<usize>,
}

impl Echelon {
    /// Reduces `vectors` (all of equal length) to echelon form.
    pub fn new(len: usize, vectors: &[EdgeSubset]) -> Self {
        let mut ech = Echelon { len, rows: Vec::new(), pivots: Vec::new(), kept: Vec::new() };
        for (i, v) in vectors.iter().enumerate() {
            if ech.insert(v) {
                ech.kept.push(i);
            }
        }
        ech
    }

    /// Inserts one vector; returns true iff it enlarged the span.
    pub fn insert(&mut self, v: &EdgeSubset) -> bool {
        assert_eq!(v.len(), self.len, "vector length mismatch");
        let mut bits = v.bits();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if bits >> p & 1 == 1 {
                bits ^= row;
            }
        }
        if bits == 0 {
            return false;
        }
        let pivot = bits.trailing_zeros() as usize;
        // Keep rows sorted by pivot so reduction order is deterministic.
        let pos = self.pivots.partition_point(|&p| p < pivot);
        self.rows.insert(pos, bits);
        self.pivots.insert(pos, pivot);
        true
    }

    /// Dimension of the span.
    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// True iff `v` lies in the span.
    pub fn contains(&self, v: &EdgeSubset) -> bool {
        let mut bits = v.bits();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if bits >> p & 1 == 1 {
                bits ^= row;
            }
        }
        bits == 0
    }

    /// Indices of the input vectors that form an independent basis.
    pub fn kept_indices(&self) -> &[usize] {
        &self.kept
    }
}

/// A GF(2) linear system over a restricted set of unknowns.
///
/// Columns are the edges of a `support` subset (in increasing edge order);
/// rows are parity constraints. The stock constructor builds the boundary
/// system "`∂(x) = rhs` with `x ⊆ support`"; winding constraints are added as
/// extra rows pairing against homology cuts.
#[derive(Debug, Clone)]
pub struct Gf2System {
    /// Edge id of each column.
    columns: Vec<usize>,
    /// Each row: mask over columns plus its right-hand parity bit.
    rows: Vec<(u64, bool)>,
    num_edges: usize,
}

/// Outcome of [`Gf2System::solve_and_count`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveCount {
    /// One solution (as an edge subset over the full lattice), if any exist.
    pub witness: Option<EdgeSubset>,
    /// log₂ of the solution count when solvable.
    pub log2_solutions: u32,
}

impl SolveCount {
    /// The literal solution count: `0`, or `2^log2_solutions`.
    pub fn num_solutions(&self) -> u128 {
        if self.witness.is_none() {
            0
        } else {
            1u128 << self.log2_solutions
        }
    }

    pub fn is_solvable(&self) -> bool {
        self.witness.is_some()
    }
}

impl Gf2System {
    /// Builds the boundary system: unknown `x ⊆ support` with `∂x = rhs`
    /// (one row per vertex; `rhs` indexes vertices).
    pub fn boundary_system(
        geom: &LatticeGeometry,
        support: &EdgeSubset,
        rhs: &EdgeSubset,
    ) -> Self {
        assert_eq!(support.len(), geom.num_edges(), "support/geometry mismatch");
        assert_eq!(rhs.len(), geom.num_vertices(), "rhs must index vertices");
        let columns: Vec<usize> = support.iter().collect();
        let mut rows = vec![(0u64, false); geom.num_vertices()];
        for (col, &e) in columns.iter().enumerate() {
            let [u, v] = geom.edge_vertices(e);
            rows[u].0 ^= 1 << col;
            rows[v].0 ^= 1 << col;
        }
        for (v, row) in rows.iter_mut().enumerate() {
            row.1 = rhs.contains(v);
        }
        Gf2System { columns, rows, num_edges: geom.num_edges() }
    }

    /// Adds a pairing constraint: `|x ∩ mask| ≡ parity (mod 2)`.
    ///
    /// `mask` indexes the full edge set; only its overlap with the column
    /// support matters.
    pub fn push_pairing_row(&mut self, mask: &EdgeSubset, parity: bool) {
        assert_eq!(mask.len(), self.num_edges, "mask/geometry mismatch");
        let mut bits = 0u64;
        for (col, &e) in self.columns.iter().enumerate() {
            if mask.contains(e) {
                bits |= 1 << col;
            }
        }
        self.rows.push((bits, parity));
    }

    /// Number of unknowns.
    pub fn num_columns(&self) -> usize {
        self.columns.len()
    }

    /// Gaussian elimination with deterministic lowest-column-first pivoting.
    ///
    /// Returns the solution count (`0` or `2^nullity`) and, when solvable,
    /// the witness with all free variables set to zero.
    pub fn solve_and_count(&self) -> SolveCount {
        let n = self.columns.len();
        let mut rows: Vec<(u64, bool)> = self.rows.iter().filter(|r| r.0 != 0 || r.1).cloned().collect();
        let mut pivot_of_col: Vec<Option<usize>> = vec![None; n];
        let mut eliminated: Vec<(u64, bool)> = Vec::new();
        for col in 0..n {
            let Some(pos) = rows.iter().position(|r| r.0 >> col & 1 == 1) else {
                continue;
            };
            let pivot_row = rows.swap_remove(pos);
            for r in rows.iter_mut() {
                if r.0 >> col & 1 == 1 {
                    r.0 ^= pivot_row.0;
                    r.1 ^= pivot_row.1;
                }
            }
            pivot_of_col[col] = Some(eliminated.len());
            eliminated.push(pivot_row);
        }
        // Any surviving row is all-zero on the left; a set parity bit means
        // the system is inconsistent.
        if rows.iter().any(|r| r.1) {
            return SolveCount { witness: None, log2_solutions: 0 };
        }
        let rank = eliminated.len();
        let nullity = (n - rank) as u32;
        // Back-substitute with free variables at zero. Eliminated rows were
        // fully reduced against each other below their pivot, so a single
        // bottom-up pass suffices.
        let mut x = 0u64;
        for col in (0..n).rev() {
            if let Some(idx) = pivot_of_col[col] {
                let (mask, mut parity) = eliminated[idx];
                // Only higher columns are assigned so far, so `mask & x` is
                // exactly the fixed part of this row.
                if (mask & x).count_ones() % 2 == 1 {
                    parity = !parity;
                }
                if parity {
                    x |= 1 << col;
                }
            }
        }
        let mut witness = EdgeSubset::empty(self.num_edges);
        for (col, &e) in self.columns.iter().enumerate() {
            if x >> col & 1 == 1 {
                witness.insert(e);
            }
        }
        debug_assert!(self.check(&witness), "witness fails its own system");
        SolveCount { witness: Some(witness), log2_solutions: nullity }
    }

    /// Verifies a candidate solution against every row.
    pub fn check(&self, candidate: &EdgeSubset) -> bool {
        let mut x = 0u64;
        for (col, &e) in self.columns.iter().enumerate() {
            if candidate.contains(e) {
                x |= 1 << col;
            }
        }
        self.rows.iter().all(|&(mask, parity)| ((mask & x).count_ones() % 2 == 1) == parity)
    }

    /// Lazily enumerates every solution. Intended for small supports only
    /// (the count is exponential in the nullity); exhaustive oracles and the
    /// tests are the customers.
    pub fn solutions(&self) -> impl Iterator<Item = EdgeSubset> + '_ {
        let n = self.columns.len();
        assert!(n <= 24, "solution enumeration is exponential; support too large ({n} columns)");
        let full = EdgeSubset::empty(self.num_edges);
        let solvable = self.solve_and_count().is_solvable();
        (0u64..(1u64 << n)).filter_map(move |bits| {
            if !solvable {
                return None;
            }
            let mut candidate = full;
            for (col, &e) in self.columns.iter().enumerate() {
                if bits >> col & 1 == 1 {
                    candidate.insert(e);
                }
            }
            if self.check(&candidate) {
                Some(candidate)
            } else {
                None
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_lattice, Topology, TopologyKind};
    use proptest::prelude::*;

    fn torus22() -> LatticeGeometry {
        build_lattice(&Topology { kind: TopologyKind::Torus, lx: 2, ly: 2 }).unwrap()
    }

    #[test]
    fn subset_basics() {
        let mut s = EdgeSubset::empty(10);
        s.insert(3);
        s.insert(7);
        assert!(s.contains(3) && s.contains(7) && !s.contains(0));
        assert_eq!(s.count(), 2);
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![3, 7]);
        let t = EdgeSubset::from_indices(10, &[3, 4]);
        assert_eq!(s.xor(&t).iter().collect::<Vec<_>>(), vec![4, 7]);
        assert!(s.dot(&t));
    }

    #[test]
    fn hex_round_trip() {
        let s = EdgeSubset::from_indices(12, &[0, 5, 11]);
        let back = EdgeSubset::from_hex(12, &s.to_hex()).unwrap();
        assert_eq!(s, back);
        assert!(EdgeSubset::from_hex(4, "ff").is_err());
    }

    #[test]
    fn boundary_of_plaquette_is_empty() {
        let geom = torus22();
        for p in 0..geom.num_plaquettes() {
            let b = geom.plaquette_boundary(p);
            assert!(boundary(&geom, &b).is_empty(), "plaquette {p} boundary not closed");
        }
    }

    #[test]
    fn boundary_of_single_edge_is_its_endpoints() {
        let geom = torus22();
        let s = EdgeSubset::from_indices(geom.num_edges(), &[0]);
        let b = boundary(&geom, &s);
        let [u, v] = geom.edge_vertices(0);
        assert_eq!(b.iter().collect::<Vec<_>>(), {
            let mut ends = vec![u, v];
            ends.sort();
            ends
        });
    }

    #[test]
    fn solve_plaquette_support_counts_cycles() {
        // Unknown x ⊆ ∂p with ∂x = 0: solutions are ∅ and ∂p itself.
        let geom = torus22();
        let support = geom.plaquette_boundary(0);
        let rhs = EdgeSubset::empty(geom.num_vertices());
        let sys = Gf2System::boundary_system(&geom, &support, &rhs);
        let count = sys.solve_and_count();
        assert_eq!(count.num_solutions(), 2);
        assert!(sys.check(count.witness.as_ref().unwrap()));
    }

    #[test]
    fn solve_inconsistent_system() {
        // A single odd vertex can never be the boundary of anything.
        let geom = torus22();
        let support = geom.plaquette_boundary(0);
        let rhs = EdgeSubset::from_indices(geom.num_vertices(), &[0]);
        let sys = Gf2System::boundary_system(&geom, &support, &rhs);
        assert_eq!(sys.solve_and_count().num_solutions(), 0);
    }

    #[test]
    fn pairing_row_restricts_solutions() {
        // 4×2 torus: plaquettes p(0,0) and p(2,0) are vertex-disjoint, so a
        // support made of both has cycle space {∅, ∂p0, ∂p2, both} (dim 2).
        let geom = build_lattice(&Topology { kind: TopologyKind::Torus, lx: 4, ly: 2 }).unwrap();
        let p0 = geom.plaquette_boundary(0);
        let p2 = geom.plaquette_boundary(2);
        assert!(p0.and(&p2).is_empty(), "test premise: disjoint plaquettes");
        let support = p0.or(&p2);
        let rhs = EdgeSubset::empty(geom.num_vertices());
        let mut sys = Gf2System::boundary_system(&geom, &support, &rhs);
        assert_eq!(sys.solve_and_count().num_solutions(), 4);
        // Require odd overlap with edge h(0,0): keeps exactly the two
        // solutions containing ∂p0.
        sys.push_pairing_row(&EdgeSubset::from_indices(geom.num_edges(), &[0]), true);
        let count = sys.solve_and_count();
        assert_eq!(count.num_solutions(), 2);
        assert_eq!(count.num_solutions(), sys.solutions().count() as u128);
        let witness = count.witness.unwrap();
        assert!(sys.check(&witness));
        // A second parity row can make it unsatisfiable: odd overlap with a
        // mask disjoint from the support.
        sys.push_pairing_row(&EdgeSubset::from_indices(geom.num_edges(), &[1]), true);
        assert_eq!(sys.solve_and_count().num_solutions(), 0);
        assert_eq!(sys.solutions().count(), 0);
    }

    /// Exhaustive oracle: count satisfying subsets by full enumeration.
    fn brute_count(sys: &Gf2System) -> u128 {
        let n = sys.num_columns();
        assert!(n <= 20, "oracle meant for small supports");
        sys.solutions().count() as u128
    }

    #[test]
    fn echelon_rank_and_membership() {
        let geom = torus22();
        let boundaries: Vec<EdgeSubset> =
            (0..geom.num_plaquettes()).map(|p| geom.plaquette_boundary(p)).collect();
        let ech = Echelon::new(geom.num_edges(), &boundaries);
        // On the torus the product of all plaquette boundaries is empty:
        // rank is P − 1.
        assert_eq!(ech.rank(), geom.num_plaquettes() - 1);
        let sum = boundaries.iter().fold(EdgeSubset::empty(geom.num_edges()), |acc, b| acc.xor(b));
        assert!(sum.is_empty());
        assert!(ech.contains(&boundaries[3]));
        assert!(!ech.contains(&geom.noncontractible()[0]));
    }

    proptest! {
        #[test]
        fn boundary_is_linear(bits_a in 0u64..256, bits_b in 0u64..256) {
            let geom = torus22();
            let a = EdgeSubset::from_bits(geom.num_edges(), bits_a);
            let b = EdgeSubset::from_bits(geom.num_edges(), bits_b);
            let lhs = boundary(&geom, &a.xor(&b));
            let rhs = boundary(&geom, &a).xor(&boundary(&geom, &b));
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn solver_count_matches_exhaustive(
            support_bits in 0u64..256,
            rhs_choice in 0u64..16,
            pairing_bits in 0u64..256,
            parity in proptest::bool::ANY,
        ) {
            let geom = torus22();
            let support = EdgeSubset::from_bits(geom.num_edges(), support_bits);
            // Use the boundary of some edge set as rhs so both solvable and
            // unsolvable cases appear.
            let rhs_src = EdgeSubset::from_bits(geom.num_edges(), rhs_choice);
            let rhs = boundary(&geom, &rhs_src);
            let mut sys = Gf2System::boundary_system(&geom, &support, &rhs);
            sys.push_pairing_row(
                &EdgeSubset::from_bits(geom.num_edges(), pairing_bits),
                parity,
            );
            let fast = sys.solve_and_count();
            let brute = brute_count(&sys);
            prop_assert_eq!(fast.num_solutions(), brute);
            if let Some(w) = fast.witness {
                prop_assert!(sys.check(&w));
            }
        }
    }
}
