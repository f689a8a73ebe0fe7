//! Floating-point spectral verification and exact Gram-matrix ranks.
//!
//! The exact layer proves kernel membership and eigenvalue identities; this
//! module confirms them independently in floating point and supplies the
//! pieces the exact layer cannot: *upper* bounds on ground-space dimensions
//! (no further zero modes) and estimates of the spectral gap.
//!
//! * [`Spin1Matvec`] compiles a [`LatticeOperator`] into a fast
//!   matrix–vector product over the full `3^E`-dimensional space, with all
//!   diagonal terms folded into one vector and off-diagonal products
//!   expanded in gather form (deterministic under threading).
//! * [`lowest_eigenvalues`] runs block Lanczos with full
//!   reorthogonalization, optional deflation against known exact states,
//!   and honest reporting: every returned eigenvalue comes with a directly
//!   measured residual `‖Hy − θy‖`.
//! * [`gram_rank`] computes ranks of exact Gram matrices by fraction-free
//!   elimination over `Z[√2]` with big integers — minors grow far beyond
//!   any fixed-width type.

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::LatticeGeometry;
use crate::merge::{label_at, MergedState, Spin1Config};
use crate::scalar::{ExactRatio, ExactScalar};
use crate::spin1ops::LatticeOperator;

/// Hard cap on dense dimensions: `3^14` (three labels on 14 edges).
pub const MAX_DENSE_EDGES: usize = 14;

/// Errors from spectral verification.
#[derive(Debug, Error)]
pub enum SpectralError {
    #[error("{edges} edges give dimension 3^{edges}; dense verification is capped at 3^{MAX_DENSE_EDGES}")]
    DimensionTooLarge { edges: usize },
    #[error("operator and state live on different lattices")]
    GeometryMismatch,
}

/// `3^n` as usize.
pub fn pow3(n: usize) -> usize {
    3usize.pow(n as u32)
}

/// Mixed-radix index of a merged configuration: `Σ label(e) · 3^e`.
pub fn config_to_index(config: Spin1Config, num_edges: usize) -> usize {
    let mut idx = 0usize;
    for e in (0..num_edges).rev() {
        idx = idx * 3 + label_at(config, e) as usize;
    }
    idx
}

/// Inverse of [`config_to_index`].
pub fn index_to_config(mut index: usize, num_edges: usize) -> Spin1Config {
    let mut config: Spin1Config = 0;
    for e in 0..num_edges {
        config |= ((index % 3) as u128) << (2 * e);
        index /= 3;
    }
    config
}

/// Dense float image of an exact sparse state (unnormalized amplitudes).
pub fn state_to_dense(state: &MergedState) -> Result<Vec<f64>, SpectralError> {
    let n = state.num_edges();
    if n > MAX_DENSE_EDGES {
        return Err(SpectralError::DimensionTooLarge { edges: n });
    }
    let mut v = vec![0.0; pow3(n)];
    for (&c, a) in state.iter() {
        v[config_to_index(c, n)] = a.to_f64();
    }
    Ok(v)
}

/// One stamped site in gather form: for each *output* label, the nonzero
/// source labels with their weights and index offsets.
#[derive(Debug, Clone)]
struct GatherStamp {
    branch_count: [usize; 3],
    weight: [[f64; 3]; 3],
    delta: [[isize; 3]; 3],
    pow: usize,
}

#[derive(Debug, Clone)]
struct GatherTerm {
    coeff: f64,
    stamps: Vec<GatherStamp>,
}

/// A compiled symmetric operator on the dense `3^E` space.
#[derive(Debug)]
pub struct Spin1Matvec {
    dim: usize,
    num_edges: usize,
    diag: Vec<f64>,
    offdiag: Vec<GatherTerm>,
    norm_bound: f64,
}

impl Spin1Matvec {
    /// Compiles `op`. Terms whose stamps are all diagonal fold into a
    /// single diagonal vector; the rest become gather terms. The operator
    /// must be symmetric (every model operator here is).
    pub fn compile(geom: &LatticeGeometry, op: &LatticeOperator) -> Result<Self, SpectralError> {
        if geom.geometry_hash() != op.geometry_hash() {
            return Err(SpectralError::GeometryMismatch);
        }
        let num_edges = geom.num_edges();
        if num_edges > MAX_DENSE_EDGES {
            return Err(SpectralError::DimensionTooLarge { edges: num_edges });
        }
        let dim = pow3(num_edges);
        let mut diag = vec![0.0f64; dim];
        let mut offdiag = Vec::new();
        let mut norm_bound = 0.0f64;
        for term in &op.terms {
            let coeff = term.coeff.to_f64();
            let mats: Vec<(usize, [[f64; 3]; 3])> = term
                .stamps
                .iter()
                .map(|(e, m)| {
                    let mut f = [[0.0; 3]; 3];
                    for r in 0..3 {
                        for c in 0..3 {
                            f[r][c] = m.entry(r, c).to_f64();
                            debug_assert_eq!(
                                m.entry(r, c),
                                m.entry(c, r),
                                "matvec requires symmetric stamps"
                            );
                        }
                    }
                    (*e, f)
                })
                .collect();
            // Spectral-norm bound for the term: |coeff| · Π max row sum.
            let mut term_bound = coeff.abs();
            for (_, f) in &mats {
                let rowsum = (0..3)
                    .map(|r| (0..3).map(|c| f[r][c].abs()).sum::<f64>())
                    .fold(0.0f64, f64::max);
                term_bound *= rowsum;
            }
            norm_bound += term_bound;

            let diagonal = mats
                .iter()
                .all(|(_, f)| (0..3).all(|r| (0..3).all(|c| r == c || f[r][c] == 0.0)));
            if diagonal {
                fold_diagonal_term(&mut diag, coeff, &mats, num_edges);
            } else {
                let stamps = mats
                    .iter()
                    .map(|(e, f)| {
                        let pow = pow3(*e);
                        let mut stamp = GatherStamp {
                            branch_count: [0; 3],
                            weight: [[0.0; 3]; 3],
                            delta: [[0; 3]; 3],
                            pow,
                        };
                        for out_label in 0..3 {
                            for src_label in 0..3 {
                                let w = f[out_label][src_label];
                                if w != 0.0 {
                                    let k = stamp.branch_count[out_label];
                                    stamp.weight[out_label][k] = w;
                                    stamp.delta[out_label][k] =
                                        (src_label as isize - out_label as isize) * pow as isize;
                                    stamp.branch_count[out_label] += 1;
                                }
                            }
                        }
                        stamp
                    })
                    .collect();
                offdiag.push(GatherTerm { coeff, stamps });
            }
        }
        Ok(Spin1Matvec { dim, num_edges, diag, offdiag, norm_bound })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_edges(&self) -> usize {
        self.num_edges
    }

    /// An upper bound on the operator 2-norm (sum of term bounds).
    pub fn norm_bound(&self) -> f64 {
        self.norm_bound
    }

    /// `y = H x`, deterministic and parallel over output chunks.
    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.dim);
        assert_eq!(y.len(), self.dim);
        let chunk = 1 << 12;
        let diag = &self.diag;
        let offdiag = &self.offdiag;
        y.par_chunks_mut(chunk).enumerate().for_each(|(ci, out)| {
            let base = ci * chunk;
            for (o, yj) in out.iter_mut().enumerate() {
                let j = base + o;
                let mut acc = diag[j] * x[j];
                for term in offdiag {
                    acc += term.coeff * gather_term(term, j, x);
                }
                *yj = acc;
            }
        });
    }
}

/// Sum over source branches of one gather term at output index `j`.
fn gather_term(term: &GatherTerm, j: usize, x: &[f64]) -> f64 {
    fn recurse(stamps: &[GatherStamp], idx: usize, j: usize, delta: isize, w: f64, x: &[f64]) -> f64 {
        if idx == stamps.len() {
            return w * x[(j as isize + delta) as usize];
        }
        let stamp = &stamps[idx];
        let out_label = j / stamp.pow % 3;
        let mut acc = 0.0;
        for k in 0..stamp.branch_count[out_label] {
            acc += recurse(
                stamps,
                idx + 1,
                j,
                delta + stamp.delta[out_label][k],
                w * stamp.weight[out_label][k],
                x,
            );
        }
        acc
    }
    recurse(&term.stamps, 0, j, 0, 1.0, x)
}

/// Adds `coeff · Π diag entries` of a fully diagonal term into `diag`.
fn fold_diagonal_term(
    diag: &mut [f64],
    coeff: f64,
    mats: &[(usize, [[f64; 3]; 3])],
    num_edges: usize,
) {
    let _ = num_edges;
    diag.par_chunks_mut(1 << 12).enumerate().for_each(|(ci, out)| {
        let base = ci << 12;
        for (o, d) in out.iter_mut().enumerate() {
            let j = base + o;
            let mut w = coeff;
            for (e, f) in mats {
                let l = j / pow3(*e) % 3;
                w *= f[l][l];
                if w == 0.0 {
                    break;
                }
            }
            *d += w;
        }
    });
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    if a.len() >= 1 << 14 {
        a.par_chunks(1 << 12)
            .zip(b.par_chunks(1 << 12))
            .map(|(ca, cb)| ca.iter().zip(cb).map(|(x, y)| x * y).sum::<f64>())
            .sum()
    } else {
        a.iter().zip(b).map(|(x, y)| x * y).sum()
    }
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn axpy(y: &mut [f64], alpha: f64, x: &[f64]) {
    if y.len() >= 1 << 14 {
        y.par_chunks_mut(1 << 12).zip(x.par_chunks(1 << 12)).for_each(|(cy, cx)| {
            for (yy, xx) in cy.iter_mut().zip(cx) {
                *yy += alpha * xx;
            }
        });
    } else {
        for (yy, xx) in y.iter_mut().zip(x) {
            *yy += alpha * xx;
        }
    }
}

fn scale_vec(y: &mut [f64], alpha: f64) {
    for v in y.iter_mut() {
        *v *= alpha;
    }
}

/// Removes the components of `w` along each (orthonormal) basis vector.
fn project_out(w: &mut [f64], basis: &[Vec<f64>]) {
    for v in basis {
        let c = dot(w, v);
        if c != 0.0 {
            axpy(w, -c, v);
        }
    }
}

/// Options for [`lowest_eigenvalues`].
#[derive(Debug, Clone)]
pub struct LanczosOptions {
    /// Vectors per block; must be at least the largest expected eigenvalue
    /// multiplicity among the wanted ones.
    pub block_size: usize,
    /// Cap on the Krylov dimension (memory guard).
    pub max_vectors: usize,
    /// Seed for the deterministic starting block.
    pub seed: u64,
    /// Convergence threshold on the measured residual `‖Hy − θy‖`.
    pub target_residual: f64,
    /// Ritz extraction cadence, in blocks.
    pub check_every: usize,
    /// Retain the materialized Ritz vectors in the report (memory permitting).
    pub keep_ritz_vectors: bool,
    /// Total matrix-vector product budget. When the basis hits
    /// `max_vectors` before convergence the run compresses onto the best
    /// Ritz vectors and continues (thick restart) until either the
    /// residual test passes or this budget runs out.
    pub max_matvecs: usize,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        LanczosOptions {
            block_size: 8,
            max_vectors: 320,
            seed: 0x6c6f6f70,
            target_residual: 1e-9,
            check_every: 5,
            keep_ritz_vectors: false,
            max_matvecs: 200_000,
        }
    }
}

/// Outcome of a Lanczos run (or a dense solve for tiny dimensions).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectralReport {
    pub dim: usize,
    pub deflated: usize,
    /// Lowest eigenvalues, ascending.
    pub eigenvalues: Vec<f64>,
    /// Measured residuals `‖Hy − θy‖ / ‖y‖`, aligned with `eigenvalues`.
    pub residuals: Vec<f64>,
    pub matvecs: usize,
    pub krylov_dim: usize,
    /// Number of thick restarts performed after hitting the basis cap.
    pub restarts: usize,
    /// True when the Krylov space exhausted the whole (deflated) space, so
    /// the reported values are the complete spectrum of that subspace.
    pub exhausted: bool,
    /// Upper bound on `‖H‖` used for residual tolerances.
    pub norm_bound: f64,
    /// Normalized Ritz vectors aligned with `eigenvalues`, retained only
    /// when [`LanczosOptions::keep_ritz_vectors`] is set.
    #[serde(skip)]
    pub ritz_vectors: Option<Vec<Vec<f64>>>,
}

/// Computes the `want` lowest eigenvalues of the compiled operator,
/// optionally deflating an explicit list of (not necessarily orthonormal)
/// vectors first. Block Lanczos with full reorthogonalization; every
/// reported eigenvalue carries a directly measured residual.
pub fn lowest_eigenvalues(
    mv: &Spin1Matvec,
    want: usize,
    deflation: &[Vec<f64>],
    opts: &LanczosOptions,
) -> SpectralReport {
    let dim = mv.dim();
    let mut matvecs = 0usize;

    // Orthonormalize the deflation space (twice for stability).
    let mut defl: Vec<Vec<f64>> = Vec::new();
    for src in deflation {
        assert_eq!(src.len(), dim);
        let mut v = src.clone();
        project_out(&mut v, &defl);
        project_out(&mut v, &defl);
        let n = norm(&v);
        if n > 1e-10 {
            scale_vec(&mut v, 1.0 / n);
            defl.push(v);
        }
    }
    let free_dim = dim - defl.len();
    let want = want.min(free_dim);

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut random_unit = |against: &[Vec<f64>], defl: &[Vec<f64>]| -> Option<Vec<f64>> {
        for _ in 0..8 {
            let mut v: Vec<f64> = (0..dim).map(|_| rng.gen::<f64>() - 0.5).collect();
            // Two full passes; the deflation projection must come last so
            // roundoff from the basis projections cannot re-enter the
            // deflated span.
            for _ in 0..2 {
                project_out(&mut v, against);
                project_out(&mut v, defl);
            }
            let n = norm(&v);
            if n > 1e-8 {
                scale_vec(&mut v, 1.0 / n);
                return Some(v);
            }
        }
        None
    };

    let block = opts.block_size.max(1).min(free_dim.max(1));
    let max_vectors = opts.max_vectors.min(free_dim).max(block);

    // Krylov basis and the projected matrix T = Vᵀ H V, stored dense.
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut t = vec![vec![0.0f64; max_vectors]; max_vectors];

    // Starting block.
    for _ in 0..block {
        if let Some(v) = random_unit(&basis, &defl) {
            basis.push(v);
        }
    }
    let mut block_start = 0usize;
    let mut exhausted = false;
    let mut restarts = 0usize;
    let mut ritz: Vec<f64> = Vec::new();
    let mut ritz_vecs_small: Vec<Vec<f64>> = Vec::new();

    loop {
        let block_end = basis.len();
        if block_end == block_start {
            exhausted = true;
            break;
        }
        // Apply H to the current block and fill T entries.
        let mut images: Vec<Vec<f64>> = Vec::with_capacity(block_end - block_start);
        for i in block_start..block_end {
            let mut y = vec![0.0; dim];
            mv.apply(&basis[i], &mut y);
            matvecs += 1;
            images.push(y);
        }
        for (bi, y) in images.iter().enumerate() {
            let i = block_start + bi;
            for j in 0..block_end {
                let v = dot(y, &basis[j]);
                t[i][j] = v;
                t[j][i] = v;
            }
        }
        // Orthogonalize images against everything to get the next block.
        let mut next: Vec<Vec<f64>> = Vec::new();
        let room = max_vectors - block_end;
        for mut y in images {
            if next.len() >= room {
                break;
            }
            // Two full passes, deflation last each time. Accepting a
            // near-zero remainder would normalize pure roundoff — which is
            // how deflated directions sneak back in as ghost eigenpairs —
            // so spent directions are dropped instead.
            for _ in 0..2 {
                project_out(&mut y, &basis);
                project_out(&mut y, &next);
                project_out(&mut y, &defl);
            }
            let n = norm(&y);
            if n > 1e-6 {
                scale_vec(&mut y, 1.0 / n);
                next.push(y);
            }
        }
        // Keep the block full with fresh random directions while room and
        // unexplored dimensions remain.
        while next.len() < (block_end - block_start).min(room)
            && block_end + next.len() < free_dim.min(max_vectors)
        {
            let mut scratch: Vec<Vec<f64>> = basis.clone();
            scratch.extend(next.iter().cloned());
            match random_unit(&scratch, &defl) {
                Some(v) => next.push(v),
                None => break,
            }
        }

        // No fresh directions with room to spare means the Krylov space
        // closed on an invariant subspace; no room at all is the memory
        // wall. The former proves completeness, the latter triggers a
        // thick restart while the matvec budget lasts.
        let space_closed = next.is_empty() && (block_end >= free_dim || block_end < max_vectors);
        let budget_out = matvecs >= opts.max_matvecs;
        let stopping = next.is_empty() || budget_out;
        let blocks_done = block_end / block.max(1);
        let check_now = stopping || blocks_done % opts.check_every.max(1) == 0;
        if check_now {
            let n = block_end;
            let sub: Vec<Vec<f64>> =
                (0..n).map(|i| (0..n).map(|j| t[i][j]).collect()).collect();
            let (vals, vecs) = jacobi_eigen(&sub);
            ritz = vals;
            ritz_vecs_small = vecs;
            if !stopping && ritz.len() >= want && want > 0 {
                // Convergence bound: a Ritz vector couples to unexplored
                // directions only through its last-block rows.
                let tail = block_end.saturating_sub(block);
                let mut all_small = true;
                for i in 0..want {
                    let mut coupling = 0.0;
                    for row in tail..block_end {
                        coupling += (ritz_vecs_small[i][row]).powi(2);
                    }
                    if coupling.sqrt() * mv.norm_bound() > opts.target_residual {
                        all_small = false;
                        break;
                    }
                }
                if all_small {
                    break;
                }
            }
        }
        if stopping {
            if space_closed || budget_out {
                exhausted = space_closed;
                break;
            }
            // Memory wall with budget to spare: compress onto the lowest
            // Ritz vectors and keep iterating. The compressed vectors are
            // re-orthonormalized with the deflation projection last, under
            // the same discipline as every other basis insertion.
            let keep = (want + 2 * block).min(block_end.saturating_sub(1)).max(1);
            let mut fresh: Vec<Vec<f64>> = Vec::new();
            for coeffs in ritz_vecs_small.iter().take(keep) {
                let mut y = vec![0.0; dim];
                for (k, v) in basis.iter().enumerate() {
                    if k < coeffs.len() && coeffs[k] != 0.0 {
                        axpy(&mut y, coeffs[k], v);
                    }
                }
                for _ in 0..2 {
                    project_out(&mut y, &fresh);
                    project_out(&mut y, &defl);
                }
                let n = norm(&y);
                if n > 1e-6 {
                    scale_vec(&mut y, 1.0 / n);
                    fresh.push(y);
                }
            }
            if fresh.is_empty() {
                break;
            }
            basis = fresh;
            for row in t.iter_mut() {
                for v in row.iter_mut() {
                    *v = 0.0;
                }
            }
            block_start = 0;
            restarts += 1;
            continue;
        }
        block_start = block_end;
        basis.extend(next);
    }

    // Materialize the wanted Ritz vectors and measure true residuals.
    let take = want.min(ritz.len());
    let mut eigenvalues = Vec::with_capacity(take);
    let mut residuals = Vec::with_capacity(take);
    let mut kept = if opts.keep_ritz_vectors {
        Some(Vec::with_capacity(take))
    } else {
        None
    };
    for i in 0..take {
        let coeffs = &ritz_vecs_small[i];
        let mut y = vec![0.0; dim];
        for (k, v) in basis.iter().enumerate() {
            if k < coeffs.len() && coeffs[k] != 0.0 {
                axpy(&mut y, coeffs[k], v);
            }
        }
        let ny = norm(&y);
        if ny < 1e-12 {
            continue;
        }
        scale_vec(&mut y, 1.0 / ny);
        // Backstop against deflation ghosts: whatever re-entered the
        // deflated span is removed, and a vector that was mostly ghost is
        // dropped outright. The Rayleigh quotient is recomputed on the
        // cleaned vector, so every reported pair is self-certifying.
        project_out(&mut y, &defl);
        project_out(&mut y, &defl);
        let cleaned = norm(&y);
        if cleaned < 1e-3 {
            continue;
        }
        scale_vec(&mut y, 1.0 / cleaned);
        let mut hy = vec![0.0; dim];
        mv.apply(&y, &mut hy);
        matvecs += 1;
        let theta = dot(&y, &hy);
        axpy(&mut hy, -theta, &y);
        eigenvalues.push(theta);
        residuals.push(norm(&hy));
        if let Some(store) = kept.as_mut() {
            store.push(y);
        }
    }
    // Skips can leave the survivors out of order; restore ascending θ.
    let mut order: Vec<usize> = (0..eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eigenvalues[a].partial_cmp(&eigenvalues[b]).unwrap());
    let eigenvalues: Vec<f64> = order.iter().map(|&i| eigenvalues[i]).collect();
    let residuals: Vec<f64> = order.iter().map(|&i| residuals[i]).collect();
    let kept = kept.map(|store| {
        let mut tagged: Vec<(usize, Vec<f64>)> = store.into_iter().enumerate().collect();
        tagged.sort_by_key(|(i, _)| order.iter().position(|&o| o == *i).unwrap());
        tagged.into_iter().map(|(_, v)| v).collect::<Vec<_>>()
    });

    SpectralReport {
        dim,
        deflated: defl.len(),
        eigenvalues,
        residuals,
        matvecs,
        krylov_dim: basis.len(),
        restarts,
        exhausted,
        norm_bound: mv.norm_bound(),
        ritz_vectors: kept,
    }
}

/// Rayleigh quotient and relative residual of a dense vector under `mv`.
pub fn rayleigh_residual(mv: &Spin1Matvec, v: &[f64]) -> (f64, f64) {
    let n2 = dot(v, v);
    assert!(n2 > 0.0, "zero vector");
    let mut hv = vec![0.0; v.len()];
    mv.apply(v, &mut hv);
    let rho = dot(v, &hv) / n2;
    let mut r = hv;
    axpy(&mut r, -rho, v);
    (rho, norm(&r) / n2.sqrt())
}

/// Cyclic Jacobi eigensolver for a small dense symmetric matrix. Returns
/// eigenvalues ascending and the matching eigenvectors (rows of the second
/// result, i.e. `result.1[i]` belongs to `result.0[i]`).
pub fn jacobi_eigen(mat: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = mat.len();
    if n == 0 {
        return (Vec::new(), Vec::new());
    }
    let mut a: Vec<Vec<f64>> = mat.to_vec();
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    for _sweep in 0..64 {
        let mut off = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                off += a[i][j] * a[i][j];
            }
        }
        if off.sqrt() < 1e-14 * (1.0 + frobenius(&a)) {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p][q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[k][p];
                    let vkq = v[k][q];
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i][i].partial_cmp(&a[j][j]).unwrap());
    let vals: Vec<f64> = order.iter().map(|&i| a[i][i]).collect();
    let vecs: Vec<Vec<f64>> = order.iter().map(|&i| (0..n).map(|k| v[k][i]).collect()).collect();
    (vals, vecs)
}

fn frobenius(a: &[Vec<f64>]) -> f64 {
    a.iter().flat_map(|r| r.iter()).map(|x| x * x).sum::<f64>().sqrt()
}

/// Exact expectation value `⟨ψ|O|ψ⟩ / ⟨ψ|ψ⟩`.
pub fn expectation(op: &LatticeOperator, state: &MergedState) -> ExactRatio {
    let image = op.apply(state);
    ExactRatio::new(state.inner(&image), state.norm2())
}

/// An element of `Z[√2]` with big-integer components.
#[derive(Debug, Clone, PartialEq, Eq)]
struct ZRoot2 {
    a: BigInt,
    b: BigInt,
}

impl ZRoot2 {
    fn zero() -> Self {
        ZRoot2 { a: BigInt::from(0), b: BigInt::from(0) }
    }

    fn one() -> Self {
        ZRoot2 { a: BigInt::from(1), b: BigInt::from(0) }
    }

    fn is_zero(&self) -> bool {
        self.a == BigInt::from(0) && self.b == BigInt::from(0)
    }

    fn mul(&self, rhs: &Self) -> Self {
        ZRoot2 {
            a: &self.a * &rhs.a + 2 * (&self.b * &rhs.b),
            b: &self.a * &rhs.b + &self.b * &rhs.a,
        }
    }

    fn sub(&self, rhs: &Self) -> Self {
        ZRoot2 { a: &self.a - &rhs.a, b: &self.b - &rhs.b }
    }

    /// Exact division (panics if the quotient leaves `Z[√2]`; callers rely
    /// on the algebraic guarantee that it never does).
    fn exact_div(&self, rhs: &Self) -> Self {
        assert!(!rhs.is_zero(), "division by zero in Z[√2]");
        // Multiply by the conjugate: (a+b√2)(c−d√2) / (c²−2d²).
        let denom = &rhs.a * &rhs.a - 2 * (&rhs.b * &rhs.b);
        assert!(denom != BigInt::from(0), "nonzero divisor with zero norm is impossible in Z[√2]");
        let na = &self.a * &rhs.a - 2 * (&self.b * &rhs.b);
        let nb = &self.b * &rhs.a - &self.a * &rhs.b;
        let zero = BigInt::from(0);
        assert!(&na % &denom == zero && &nb % &denom == zero, "inexact division in Z[√2]");
        ZRoot2 { a: na / &denom, b: nb / denom }
    }

    fn from_scalar_scaled(x: &ExactScalar, k_max: u32) -> Self {
        let lifted = x.times_pow2(k_max).expect("Gram entry overflow while clearing denominators");
        let (a, b, k) = lifted.parts();
        assert_eq!(k, 0, "k_max did not clear the denominator");
        ZRoot2 { a: BigInt::from(a), b: BigInt::from(b) }
    }
}

/// Exact rank of the Gram matrix of a family of merged states.
///
/// Entries are cleared of their power-of-two denominators and eliminated
/// fraction-free (Bareiss) over `Z[√2]`. Gram matrices are positive
/// semidefinite, so a vanishing pivot forces its entire row to vanish at
/// that stage and the row can be skipped outright.
pub fn gram_rank(states: &[MergedState]) -> usize {
    let n = states.len();
    if n == 0 {
        return 0;
    }
    let mut entries = vec![vec![ExactScalar::zero(); n]; n];
    let mut k_max = 0u32;
    for i in 0..n {
        for j in i..n {
            let ip = states[i].inner(&states[j]);
            let (_, _, k) = ip.parts();
            k_max = k_max.max(k);
            entries[i][j] = ip.clone();
            entries[j][i] = ip;
        }
    }
    let mut m: Vec<Vec<ZRoot2>> = entries
        .iter()
        .map(|row| row.iter().map(|x| ZRoot2::from_scalar_scaled(x, k_max)).collect())
        .collect();
    gram_rank_zroot2(&mut m)
}

fn gram_rank_zroot2(m: &mut [Vec<ZRoot2>]) -> usize {
    let n = m.len();
    let mut prev = ZRoot2::one();
    let mut rank = 0usize;
    let mut rows: Vec<usize> = (0..n).collect();
    for step in 0..n {
        // PSD pivot search on the diagonal.
        let Some(pos) = (step..n).find(|&r| !m[rows[r]][rows[r]].is_zero()) else {
            // All remaining diagonal entries vanish: for a PSD Schur
            // complement the remaining block is zero.
            for &ri in rows.iter().skip(step) {
                for &rj in rows.iter().skip(step) {
                    debug_assert!(
                        m[ri][rj].is_zero(),
                        "PSD matrix with zero diagonal must have a zero block"
                    );
                }
            }
            break;
        };
        rows.swap(step, pos);
        let piv_idx = rows[step];
        let pivot = m[piv_idx][piv_idx].clone();
        for r in (step + 1)..n {
            let ri = rows[r];
            let lead = m[ri][piv_idx].clone();
            for c in (step + 1)..n {
                let ci = rows[c];
                let val = pivot
                    .mul(&m[ri][ci])
                    .sub(&lead.mul(&m[piv_idx][ci]))
                    .exact_div(&prev);
                m[ri][ci] = val;
            }
            m[ri][piv_idx] = ZRoot2::zero();
        }
        prev = pivot;
        rank += 1;
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_lattice, Topology, TopologyKind};
    use crate::merge::{all_merged_sector_states, merged_ground_state};
    use crate::spin1ops::{hamiltonian, q1_vertex};

    fn build(kind: TopologyKind, lx: usize, ly: usize) -> LatticeGeometry {
        build_lattice(&Topology { kind, lx, ly }).unwrap()
    }

    #[test]
    fn index_round_trip() {
        let n = 5;
        for idx in 0..pow3(n) {
            let c = index_to_config(idx, n);
            assert_eq!(config_to_index(c, n), idx);
            for e in 0..n {
                assert!(label_at(c, e) <= 2);
            }
        }
    }

    #[test]
    fn matvec_matches_exact_application() {
        // Compare the compiled float matvec against the exact stamped
        // application on a state with vertex and plaquette excitations.
        let geom = build(TopologyKind::Torus, 2, 2);
        let h = hamiltonian(&geom);
        let mv = Spin1Matvec::compile(&geom, &h).unwrap();
        let mut psi = merged_ground_state(&geom, &[false, true], &[true, false]).unwrap();
        let a = crate::toric::toric_ground_state(&geom, &[false, false]).unwrap();
        let a_exc =
            crate::toric::apply_x_string(&a, &crate::toric::primal_path(&geom, 0, 3));
        psi.add_state(
            &crate::merge::merge(&geom, &a_exc, &a).unwrap(),
            &ExactScalar::sqrt2(),
        );
        let x = state_to_dense(&psi).unwrap();
        let mut y = vec![0.0; mv.dim()];
        mv.apply(&x, &mut y);
        let exact = state_to_dense(&h.apply(&psi)).unwrap();
        let err = y
            .iter()
            .zip(&exact)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        assert!(err < 1e-11, "max deviation {err}");
    }

    #[test]
    fn jacobi_on_known_matrix() {
        // Eigenvalues of [[2,1],[1,2]] are 1 and 3.
        let m = vec![vec![2.0, 1.0], vec![1.0, 2.0]];
        let (vals, vecs) = jacobi_eigen(&m);
        assert!((vals[0] - 1.0).abs() < 1e-12);
        assert!((vals[1] - 3.0).abs() < 1e-12);
        // Eigenvector check: (M − λ)v ≈ 0.
        for (lam, v) in vals.iter().zip(&vecs) {
            for r in 0..2 {
                let mv = m[r][0] * v[0] + m[r][1] * v[1];
                assert!((mv - lam * v[r]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn exact_zero_modes_have_tiny_float_residuals() {
        let geom = build(TopologyKind::Torus, 2, 2);
        let h = hamiltonian(&geom);
        let mv = Spin1Matvec::compile(&geom, &h).unwrap();
        for (_, state) in all_merged_sector_states(&geom).unwrap() {
            let v = state_to_dense(&state).unwrap();
            let (rho, res) = rayleigh_residual(&mv, &v);
            assert!(rho.abs() < 1e-12, "Rayleigh quotient {rho}");
            assert!(res < 1e-12, "residual {res}");
        }
    }

    #[test]
    fn kernel_count_torus22_is_fifteen() {
        // The smallest torus carries five accidental zero modes on top of
        // the ten merged sector states: the kernel is 15-dimensional, with
        // a clean gap above it. Undeflated block Lanczos must resolve all
        // of this.
        let geom = build(TopologyKind::Torus, 2, 2);
        let h = hamiltonian(&geom);
        let mv = Spin1Matvec::compile(&geom, &h).unwrap();
        let opts = LanczosOptions {
            block_size: 18,
            max_vectors: 500,
            ..LanczosOptions::default()
        };
        let report = lowest_eigenvalues(&mv, 17, &[], &opts);
        assert!(report.eigenvalues.len() >= 17);
        for i in 0..15 {
            assert!(
                report.eigenvalues[i].abs() < 1e-9,
                "mode {i}: {}",
                report.eigenvalues[i]
            );
            assert!(report.residuals[i] < 1e-8 * report.norm_bound);
        }
        assert!(
            report.eigenvalues[15] > 0.05,
            "sixteenth eigenvalue {} should sit above the kernel",
            report.eigenvalues[15]
        );
    }

    #[test]
    fn deflated_run_finds_accidental_zero_modes() {
        // Deflating the ten exact sector states exposes the five
        // accidental kernel directions of the smallest torus, then the gap.
        let geom = build(TopologyKind::Torus, 2, 2);
        let h = hamiltonian(&geom);
        let mv = Spin1Matvec::compile(&geom, &h).unwrap();
        let deflation: Vec<Vec<f64>> = all_merged_sector_states(&geom)
            .unwrap()
            .into_iter()
            .map(|(_, s)| state_to_dense(&s).unwrap())
            .collect();
        let opts = LanczosOptions { block_size: 8, ..LanczosOptions::default() };
        let report = lowest_eigenvalues(&mv, 7, &deflation, &opts);
        assert_eq!(report.deflated, 10, "ten independent exact states deflate");
        for i in 0..5 {
            assert!(
                report.eigenvalues[i].abs() < 1e-9,
                "accidental mode {i}: {}",
                report.eigenvalues[i]
            );
            assert!(report.residuals[i] < 1e-8 * report.norm_bound);
        }
        assert!(
            report.eigenvalues[5] > 0.05,
            "first eigenvalue past the accidental modes {} should be a real gap",
            report.eigenvalues[5]
        );
        assert!(report.residuals[5] < 1e-7 * report.norm_bound);
    }

    #[test]
    fn gram_rank_small_cases() {
        let geom = build(TopologyKind::Annulus, 2, 1);
        let states: Vec<MergedState> = all_merged_sector_states(&geom)
            .unwrap()
            .into_iter()
            .map(|(_, s)| s)
            .collect();
        assert_eq!(states.len(), 3);
        assert_eq!(gram_rank(&states), 3);
        // Duplicating a state must not raise the rank.
        let mut dup = states.clone();
        dup.push(states[0].clone());
        assert_eq!(gram_rank(&dup), 3);
        // A scaled copy neither.
        let mut scaled = states[0].clone();
        scaled.scale(&ExactScalar::sqrt2());
        dup.push(scaled);
        assert_eq!(gram_rank(&dup), 3);
        assert_eq!(gram_rank(&[]), 0);
    }

    #[test]
    fn gram_rank_matches_float_rank_torus() {
        let geom = build(TopologyKind::Torus, 2, 2);
        let states: Vec<MergedState> = all_merged_sector_states(&geom)
            .unwrap()
            .into_iter()
            .map(|(_, s)| s)
            .collect();
        assert_eq!(states.len(), 10);
        assert_eq!(gram_rank(&states), 10);
        // Float cross-check through the Gram spectrum.
        let g: Vec<Vec<f64>> = (0..10)
            .map(|i| (0..10).map(|j| states[i].inner(&states[j]).to_f64()).collect())
            .collect();
        let (vals, _) = jacobi_eigen(&g);
        let float_rank = vals.iter().filter(|v| **v > 1e-6 * vals[9].max(1.0)).count();
        assert_eq!(float_rank, 10);
    }

    #[test]
    fn expectation_on_excited_state() {
        // A vertex-pair excitation: ⟨Q1⟩ at a defect vertex is exactly 1.
        let geom = build(TopologyKind::Torus, 2, 2);
        let a = crate::toric::toric_ground_state(&geom, &[false, false]).unwrap();
        let string = crate::toric::primal_path(&geom, 0, 1);
        let a_exc = crate::toric::apply_x_string(&a, &string);
        let psi = crate::merge::merge(&geom, &a_exc, &a).unwrap();
        let q = q1_vertex(&geom, 0);
        let val = expectation(&q, &psi);
        assert_eq!(val, ExactRatio::new(ExactScalar::one(), ExactScalar::one()));
        // An unexcited vertex reads exactly 0.
        let q2 = q1_vertex(&geom, 3);
        assert!(expectation(&q2, &psi).is_zero());
    }

    #[test]
    fn tiny_lattice_full_spectrum_cross_check() {
        // Sphere 1×1 (dimension 81): materialize H densely and compare the
        // complete Jacobi spectrum with Lanczos-reported lowest values.
        let geom = build(TopologyKind::Sphere, 1, 1);
        let h = hamiltonian(&geom);
        let mv = Spin1Matvec::compile(&geom, &h).unwrap();
        let dim = mv.dim();
        let mut dense = vec![vec![0.0f64; dim]; dim];
        for i in 0..dim {
            let mut e = vec![0.0; dim];
            e[i] = 1.0;
            let mut col = vec![0.0; dim];
            mv.apply(&e, &mut col);
            for r in 0..dim {
                dense[r][i] = col[r];
            }
        }
        let (all_vals, _) = jacobi_eigen(&dense);
        // Exactly one zero mode on the sphere.
        assert!(all_vals[0].abs() < 1e-10);
        assert!(all_vals[1] > 0.05);
        let opts = LanczosOptions { block_size: 4, max_vectors: 81, ..Default::default() };
        let report = lowest_eigenvalues(&mv, 3, &[], &opts);
        for i in 0..3 {
            assert!(
                (report.eigenvalues[i] - all_vals[i]).abs() < 1e-8,
                "eigenvalue {i}: {} vs {}",
                report.eigenvalues[i],
                all_vals[i]
            );
        }
        assert!(mv.norm_bound() >= all_vals[dim - 1].abs());
    }
}
