//! Square-lattice geometry on the sphere, annulus and torus.
//!
//! Spins live on edges; stabilizers live on vertices and plaquettes. This
//! module owns every geometric fact the rest of the crate consumes:
//! incidence maps, the GF(2) cycle space, representatives of the
//! non-contractible classes, and the homology cross cuts used to detect
//! winding parity.
//!
//! # Conventions (external contract)
//!
//! All indexing is row-major with x varying fastest. Writing `lx`, `ly` for
//! the extents:
//!
//! * **Torus** (`lx, ly ≥ 2`): vertices `(i, j) ↦ j·lx + i` for
//!   `0 ≤ i < lx`, `0 ≤ j < ly`. Horizontal edge `h(i, j)` joins `(i, j)` to
//!   `(i+1 mod lx, j)` and has id `j·lx + i`; vertical edge `v(i, j)` joins
//!   `(i, j)` to `(i, j+1 mod ly)` and has id `lx·ly + j·lx + i`. Plaquette
//!   `p(i, j) ↦ j·lx + i` is bounded by `h(i,j)`, `h(i,j+1)`, `v(i,j)`,
//!   `v(i+1,j)` (cyclic arithmetic).
//! * **Annulus** (`lx ≥ 2, ly ≥ 1`): periodic in x, open in y. Vertices
//!   `(i, j)` with `0 ≤ j ≤ ly` and id `j·lx + i`; horizontal edges exist on
//!   every vertex row (`id = j·lx + i`), vertical edges between rows
//!   (`id = lx·(ly+1) + j·lx + i`). The two boundary faces carry no
//!   stabilizer.
//! * **Sphere** (`lx, ly ≥ 1`): a planar `lx×ly` patch of plaquettes plus
//!   one exterior face, so `V − E + F = 2`. Vertices `(i, j)` with
//!   `0 ≤ i ≤ lx`, `0 ≤ j ≤ ly`, id `j·(lx+1) + i`; horizontal edge ids
//!   `j·lx + i`, vertical edge ids `lx·(ly+1) + j·(lx+1) + i`. Only the
//!   interior plaquettes are stabilized.
//!
//! Degenerate extents that would give an edge both endpoints on one vertex
//! or a plaquette a repeated edge (e.g. a 1×n torus) are rejected.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf2::{Echelon, EdgeSubset, MAX_EDGES};

/// Surface the lattice is embedded in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TopologyKind {
    Sphere,
    Annulus,
    Torus,
}

impl std::fmt::Display for TopologyKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            TopologyKind::Sphere => "sphere",
            TopologyKind::Annulus => "annulus",
            TopologyKind::Torus => "torus",
        };
        f.write_str(s)
    }
}

/// A topology kind plus extents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Topology {
    pub kind: TopologyKind,
    pub lx: usize,
    pub ly: usize,
}

/// Errors from lattice construction and deserialization.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum LatticeError {
    #[error("degenerate extents {lx}x{ly} for {kind}: {reason}")]
    DegenerateExtents { kind: TopologyKind, lx: usize, ly: usize, reason: &'static str },
    #[error("lattice has {edges} edges; this build supports at most {MAX_EDGES}")]
    TooManyEdges { edges: usize },
    #[error("dual construction is only provided for the torus")]
    UnsupportedDual,
    #[error("geometry file invalid: {0}")]
    BadFile(String),
}

/// Immutable geometric data for one lattice. Build once, share freely.
#[derive(Debug, Clone)]
pub struct LatticeGeometry {
    topology: Topology,
    num_vertices: usize,
    num_edges: usize,
    /// Endpoints of each edge.
    edge_vertices: Vec<[usize; 2]>,
    /// Edges incident to each vertex, ascending.
    vertex_edges: Vec<Vec<usize>>,
    /// Boundary edges of each stabilized plaquette (4 each), ascending.
    plaquette_edges: Vec<Vec<usize>>,
    /// Stabilized plaquettes incident to each edge (1 or 2).
    edge_plaquettes: Vec<Vec<usize>>,
    /// Dual-lattice vertex id of each plaquette.
    dual_vertex_of_plaquette: Vec<usize>,
    /// One closed representative per non-contractible class.
    noncontractible: Vec<EdgeSubset>,
    /// One dual cut per class; a closed set winds class `k` iff it meets
    /// `cross_cuts[k]` an odd number of times.
    cross_cuts: Vec<EdgeSubset>,
    /// Unstabilized faces (sphere: exterior; annulus: the two boundaries).
    outer_faces: usize,
}

impl LatticeGeometry {
    pub fn topology(&self) -> &Topology {
        &self.topology
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn num_edges(&self) -> usize {
        self.num_edges
    }

    pub fn num_plaquettes(&self) -> usize {
        self.plaquette_edges.len()
    }

    /// Unstabilized face count (for Euler bookkeeping).
    pub fn outer_faces(&self) -> usize {
        self.outer_faces
    }

    /// Endpoints of edge `e`.
    pub fn edge_vertices(&self, e: usize) -> [usize; 2] {
        self.edge_vertices[e]
    }

    /// Edges incident to vertex `v`, ascending.
    pub fn vertex_edges(&self, v: usize) -> &[usize] {
        &self.vertex_edges[v]
    }

    /// Boundary edges of plaquette `p`, ascending.
    pub fn plaquette_edges(&self, p: usize) -> &[usize] {
        &self.plaquette_edges[p]
    }

    /// Stabilized plaquettes containing edge `e` (1 on open boundaries, else 2).
    pub fn edge_plaquettes(&self, e: usize) -> &[usize] {
        &self.edge_plaquettes[e]
    }

    /// Dual vertex id of plaquette `p` (see [`LatticeGeometry::dual_geometry`]).
    pub fn dual_vertex_of_plaquette(&self, p: usize) -> usize {
        self.dual_vertex_of_plaquette[p]
    }

    /// Boundary of plaquette `p` as an edge subset.
    pub fn plaquette_boundary(&self, p: usize) -> EdgeSubset {
        EdgeSubset::from_indices(self.num_edges, &self.plaquette_edges[p])
    }

    /// Representatives of the non-contractible loop classes
    /// (torus: x then y; annulus: x; sphere: none).
    pub fn noncontractible(&self) -> &[EdgeSubset] {
        &self.noncontractible
    }

    /// Homology cross cuts, aligned with [`LatticeGeometry::noncontractible`]:
    /// cut `k` pairs odd with class-`k` representatives and even with every
    /// plaquette boundary and every other class.
    pub fn cross_cuts(&self) -> &[EdgeSubset] {
        &self.cross_cuts
    }

    /// Winding parities of a *closed* edge set, one bool per class.
    pub fn winding(&self, subset: &EdgeSubset) -> Vec<bool> {
        self.cross_cuts.iter().map(|cut| subset.dot(cut)).collect()
    }

    /// An independent set of plaquette boundaries spanning the contractible
    /// cycles (torus: all but one plaquette; annulus and sphere: all).
    pub fn contractible_basis(&self) -> Vec<EdgeSubset> {
        let boundaries: Vec<EdgeSubset> =
            (0..self.num_plaquettes()).map(|p| self.plaquette_boundary(p)).collect();
        let ech = Echelon::new(self.num_edges, &boundaries);
        ech.kept_indices().iter().map(|&i| boundaries[i]).collect()
    }

    /// A basis of the full cycle space: the contractible basis followed by
    /// the non-contractible representatives. Its length is `E − V + 1`.
    pub fn cycle_basis(&self) -> Vec<EdgeSubset> {
        let mut basis = self.contractible_basis();
        basis.extend(self.noncontractible.iter().cloned());
        basis
    }

    /// Stable 64-bit hash of the incidence structure (FNV-1a over a
    /// canonical byte serialization); stored in state files so they cannot
    /// be replayed against a different lattice.
    pub fn geometry_hash(&self) -> u64 {
        let mut h = Fnv::new();
        h.byte(match self.topology.kind {
            TopologyKind::Sphere => 0,
            TopologyKind::Annulus => 1,
            TopologyKind::Torus => 2,
        });
        h.word(self.topology.lx as u64);
        h.word(self.topology.ly as u64);
        h.word(self.num_vertices as u64);
        h.word(self.num_edges as u64);
        for &[u, v] in &self.edge_vertices {
            h.word(u as u64);
            h.word(v as u64);
        }
        for edges in &self.plaquette_edges {
            h.word(edges.len() as u64);
            for &e in edges {
                h.word(e as u64);
            }
        }
        for s in self.noncontractible.iter().chain(self.cross_cuts.iter()) {
            h.word(s.bits());
        }
        h.finish()
    }

    /// The dual lattice and the edge bijection onto it.
    ///
    /// Only the torus is self-dual as a square lattice (the dual of the
    /// sphere patch has an exterior vertex of high degree and is out of
    /// scope). Returns the dual geometry — again an `lx×ly` torus whose
    /// vertex `(i, j)` sits at the center of primal plaquette `p(i, j)` —
    /// and `map` with `map[dual_edge] = primal_edge`.
    pub fn dual_geometry(&self) -> Result<(LatticeGeometry, Vec<usize>), LatticeError> {
        if self.topology.kind != TopologyKind::Torus {
            return Err(LatticeError::UnsupportedDual);
        }
        let (lx, ly) = (self.topology.lx, self.topology.ly);
        let dual = build_lattice(&self.topology)?;
        let horiz = |i: usize, j: usize| j * lx + i;
        let vert = |i: usize, j: usize| lx * ly + j * lx + i;
        let mut map = vec![0usize; self.num_edges];
        for j in 0..ly {
            for i in 0..lx {
                // Dual horizontal edge (i,j)–(i+1,j) crosses the primal
                // vertical edge v(i+1, j); dual vertical edge (i,j)–(i,j+1)
                // crosses the primal horizontal edge h(i, j+1).
                map[horiz(i, j)] = vert((i + 1) % lx, j);
                map[vert(i, j)] = horiz(i, (j + 1) % ly);
            }
        }
        Ok((dual, map))
    }

    /// Serializable snapshot of the geometry.
    pub fn to_file(&self) -> GeometryFile {
        GeometryFile {
            version: 1,
            topology: self.topology,
            num_vertices: self.num_vertices,
            num_edges: self.num_edges,
            edge_vertices: self.edge_vertices.clone(),
            vertex_edges: self.vertex_edges.clone(),
            plaquette_edges: self.plaquette_edges.clone(),
            dual_vertex_of_plaquette: self.dual_vertex_of_plaquette.clone(),
            noncontractible: self.noncontractible.iter().map(|s| s.to_hex()).collect(),
            cross_cuts: self.cross_cuts.iter().map(|s| s.to_hex()).collect(),
            outer_faces: self.outer_faces,
            geometry_hash: format!("{:016x}", self.geometry_hash()),
        }
    }

    /// Rebuilds a geometry from a snapshot, verifying it against a fresh
    /// construction for the same topology (files are untrusted input).
    pub fn from_file(file: &GeometryFile) -> Result<LatticeGeometry, LatticeError> {
        if file.version != 1 {
            return Err(LatticeError::BadFile(format!("unknown version {}", file.version)));
        }
        let fresh = build_lattice(&file.topology)?;
        let snapshot = fresh.to_file();
        if snapshot != *file {
            return Err(LatticeError::BadFile(
                "snapshot disagrees with canonical construction for its topology".into(),
            ));
        }
        Ok(fresh)
    }
}

/// JSON-facing snapshot of a [`LatticeGeometry`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeometryFile {
    pub version: u32,
    pub topology: Topology,
    pub num_vertices: usize,
    pub num_edges: usize,
    pub edge_vertices: Vec<[usize; 2]>,
    pub vertex_edges: Vec<Vec<usize>>,
    pub plaquette_edges: Vec<Vec<usize>>,
    pub dual_vertex_of_plaquette: Vec<usize>,
    pub noncontractible: Vec<String>,
    pub cross_cuts: Vec<String>,
    pub outer_faces: usize,
    pub geometry_hash: String,
}

/// Builds the geometry for `topology`, validating extents.
pub fn build_lattice(topology: &Topology) -> Result<LatticeGeometry, LatticeError> {
    let &Topology { kind, lx, ly } = topology;
    let reject = |reason| LatticeError::DegenerateExtents { kind, lx, ly, reason };
    match kind {
        TopologyKind::Torus => {
            if lx < 2 || ly < 2 {
                return Err(reject(
                    "a torus needs lx, ly ≥ 2 (smaller extents give self-loop edges or plaquettes with repeated edges)",
                ));
            }
        }
        TopologyKind::Annulus => {
            if lx < 2 || ly < 1 {
                return Err(reject("an annulus needs lx ≥ 2 and ly ≥ 1"));
            }
        }
        TopologyKind::Sphere => {
            if lx < 1 || ly < 1 {
                return Err(reject("a sphere patch needs lx, ly ≥ 1"));
            }
        }
    }

    let builder = match kind {
        TopologyKind::Torus => build_torus(lx, ly),
        TopologyKind::Annulus => build_annulus(lx, ly),
        TopologyKind::Sphere => build_sphere(lx, ly),
    };
    if builder.edge_vertices.len() > MAX_EDGES {
        return Err(LatticeError::TooManyEdges { edges: builder.edge_vertices.len() });
    }
    Ok(builder.finish(*topology))
}

/// Raw incidence data before derived maps are filled in.
struct RawLattice {
    num_vertices: usize,
    edge_vertices: Vec<[usize; 2]>,
    plaquette_edges: Vec<Vec<usize>>,
    noncontractible: Vec<Vec<usize>>,
    cross_cuts: Vec<Vec<usize>>,
    outer_faces: usize,
}

impl RawLattice {
    fn finish(self, topology: Topology) -> LatticeGeometry {
        let num_edges = self.edge_vertices.len();
        let mut vertex_edges = vec![Vec::new(); self.num_vertices];
        for (e, &[u, v]) in self.edge_vertices.iter().enumerate() {
            vertex_edges[u].push(e);
            vertex_edges[v].push(e);
        }
        let mut edge_plaquettes = vec![Vec::new(); num_edges];
        for (p, edges) in self.plaquette_edges.iter().enumerate() {
            for &e in edges {
                edge_plaquettes[e].push(p);
            }
        }
        let mut plaquette_edges = self.plaquette_edges;
        for edges in plaquette_edges.iter_mut() {
            edges.sort_unstable();
        }
        let dual_vertex_of_plaquette = (0..plaquette_edges.len()).collect();
        LatticeGeometry {
            topology,
            num_vertices: self.num_vertices,
            num_edges,
            edge_vertices: self.edge_vertices,
            vertex_edges,
            plaquette_edges,
            edge_plaquettes,
            dual_vertex_of_plaquette,
            noncontractible: self
                .noncontractible
                .iter()
                .map(|ids| EdgeSubset::from_indices(num_edges, ids))
                .collect(),
            cross_cuts: self
                .cross_cuts
                .iter()
                .map(|ids| EdgeSubset::from_indices(num_edges, ids))
                .collect(),
            outer_faces: self.outer_faces,
        }
    }
}

fn build_torus(lx: usize, ly: usize) -> RawLattice {
    let vid = |i: usize, j: usize| j * lx + i;
    let h = |i: usize, j: usize| j * lx + i;
    let v = |i: usize, j: usize| lx * ly + j * lx + i;
    let mut edge_vertices = vec![[0, 0]; 2 * lx * ly];
    for j in 0..ly {
        for i in 0..lx {
            edge_vertices[h(i, j)] = [vid(i, j), vid((i + 1) % lx, j)];
            edge_vertices[v(i, j)] = [vid(i, j), vid(i, (j + 1) % ly)];
        }
    }
    let mut plaquette_edges = Vec::with_capacity(lx * ly);
    for j in 0..ly {
        for i in 0..lx {
            plaquette_edges.push(vec![h(i, j), h(i, (j + 1) % ly), v(i, j), v((i + 1) % lx, j)]);
        }
    }
    RawLattice {
        num_vertices: lx * ly,
        edge_vertices,
        plaquette_edges,
        noncontractible: vec![
            (0..lx).map(|i| h(i, 0)).collect(),
            (0..ly).map(|j| v(0, j)).collect(),
        ],
        cross_cuts: vec![
            (0..ly).map(|j| h(0, j)).collect(),
            (0..lx).map(|i| v(i, 0)).collect(),
        ],
        outer_faces: 0,
    }
}

fn build_annulus(lx: usize, ly: usize) -> RawLattice {
    let vid = |i: usize, j: usize| j * lx + i;
    let h = |i: usize, j: usize| j * lx + i;
    let v = |i: usize, j: usize| lx * (ly + 1) + j * lx + i;
    let mut edge_vertices = vec![[0, 0]; lx * (ly + 1) + lx * ly];
    for j in 0..=ly {
        for i in 0..lx {
            edge_vertices[h(i, j)] = [vid(i, j), vid((i + 1) % lx, j)];
        }
    }
    for j in 0..ly {
        for i in 0..lx {
            edge_vertices[v(i, j)] = [vid(i, j), vid(i, j + 1)];
        }
    }
    let mut plaquette_edges = Vec::with_capacity(lx * ly);
    for j in 0..ly {
        for i in 0..lx {
            plaquette_edges.push(vec![h(i, j), h(i, j + 1), v(i, j), v((i + 1) % lx, j)]);
        }
    }
    RawLattice {
        num_vertices: lx * (ly + 1),
        edge_vertices,
        plaquette_edges,
        noncontractible: vec![(0..lx).map(|i| h(i, 0)).collect()],
        cross_cuts: vec![(0..=ly).map(|j| h(0, j)).collect()],
        outer_faces: 2,
    }
}

fn build_sphere(lx: usize, ly: usize) -> RawLattice {
    let vid = |i: usize, j: usize| j * (lx + 1) + i;
    let h = |i: usize, j: usize| j * lx + i;
    let v = |i: usize, j: usize| lx * (ly + 1) + j * (lx + 1) + i;
    let mut edge_vertices = vec![[0, 0]; lx * (ly + 1) + (lx + 1) * ly];
    for j in 0..=ly {
        for i in 0..lx {
            edge_vertices[h(i, j)] = [vid(i, j), vid(i + 1, j)];
        }
    }
    for j in 0..ly {
        for i in 0..=lx {
            edge_vertices[v(i, j)] = [vid(i, j), vid(i, j + 1)];
        }
    }
    let mut plaquette_edges = Vec::with_capacity(lx * ly);
    for j in 0..ly {
        for i in 0..lx {
            plaquette_edges.push(vec![h(i, j), h(i, j + 1), v(i, j), v(i + 1, j)]);
        }
    }
    RawLattice {
        num_vertices: (lx + 1) * (ly + 1),
        edge_vertices,
        plaquette_edges,
        noncontractible: Vec::new(),
        cross_cuts: Vec::new(),
        outer_faces: 1,
    }
}

/// Minimal FNV-1a hasher (stable across platforms and runs, unlike the
/// standard library's randomized hashers).
struct Fnv(u64);

impl Fnv {
    fn new() -> Self {
        Fnv(0xcbf2_9ce4_8422_2325)
    }

    fn byte(&mut self, b: u8) {
        self.0 ^= b as u64;
        self.0 = self.0.wrapping_mul(0x0000_0100_0000_01b3);
    }

    fn word(&mut self, w: u64) {
        for b in w.to_le_bytes() {
            self.byte(b);
        }
    }

    fn finish(&self) -> u64 {
        self.0
    }
}
