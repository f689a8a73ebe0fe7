//! Exact desk-scale simulator for a spin-1 loop gas built by merging two
//! toric-code copies.
//!
//! Two spin-1/2 toric-code layers are fused edge by edge: projecting out the
//! interlayer singlet leaves a triplet (spin-1) per edge, and the images of
//! pairs of toric-code ground states become a gas of loops that may share
//! edges. Loop configurations carry three local labels — no line, a single
//! line, or a doubled line — and the projected Hamiltonian is a sum of
//! non-commuting vertex and plaquette projectors that nevertheless shares
//! the exact ground space spanned by those merged states.
//!
//! Everything here is exact: amplitudes are integers times powers of `1/√2`,
//! degeneracy counts come from GF(2) linear algebra, and the iterative
//! eigensolver is only used to confirm — in floating point, with explicit
//! residuals — what the exact layer already proved.
//!
//! Organization:
//!
//! * [`scalar`] — exact arithmetic in `Z[√2]` scaled by powers of two.
//! * [`gf2`] — bit-packed edge subsets and GF(2) linear solving.
//! * [`lattice`] — square lattices on sphere, annulus and torus.
//! * [`toric`] — a single toric-code copy: ground states, strings, sectors.
//! * [`merge`] — the edge-wise merge of two copies and its amplitude laws.
//! * [`spin1ops`] — spin-1 site matrices, lattice operators, Hamiltonian.
//! * [`spectral`] — sparse matvec, Lanczos, exact Gram ranks.
//! * [`experiments`] — runnable verifications behind the `loopgas` binary.

pub mod experiments;
pub mod gf2;
pub mod lattice;
pub mod merge;
pub mod scalar;
pub mod spectral;
pub mod spin1ops;
pub mod toric;
