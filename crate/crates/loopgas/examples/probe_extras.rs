//! Scratch probe: dissect the numerical zero modes beyond the sector span.

use loopgas::lattice::{build_lattice, Topology, TopologyKind};
use loopgas::merge::{
    all_merged_sector_states, config3_string, decomposable, split_config, subgraph_invariants,
    winding_rank,
};
use loopgas::spectral::{
    index_to_config, lowest_eigenvalues, state_to_dense, LanczosOptions, Spin1Matvec,
};
use loopgas::spin1ops::hamiltonian;

fn main() {
    for (kind, lx, ly) in [(TopologyKind::Annulus, 2, 1), (TopologyKind::Torus, 2, 2)] {
        let geom = build_lattice(&Topology { kind, lx, ly }).unwrap();
        let n = geom.num_edges();
        let h = hamiltonian(&geom);
        let mv = Spin1Matvec::compile(&geom, &h).unwrap();
        let merged = all_merged_sector_states(&geom).unwrap();
        let deflation: Vec<Vec<f64>> =
            merged.iter().map(|(_, s)| state_to_dense(s).unwrap()).collect();
        let opts = LanczosOptions {
            block_size: 8,
            max_vectors: 700,
            keep_ritz_vectors: true,
            ..LanczosOptions::default()
        };
        let rep = lowest_eigenvalues(&mv, 8, &deflation, &opts);
        println!("=== {kind} {lx}x{ly}: evs {:?}", &rep.eigenvalues[..6.min(rep.eigenvalues.len())]);
        let vecs = rep.ritz_vectors.as_ref().unwrap();
        for (k, ev) in rep.eigenvalues.iter().enumerate() {
            if *ev > 1e-9 {
                break;
            }
            println!("--- extra mode {k} (ev {ev:+.3e}, residual {:.3e})", rep.residuals[k]);
            let v = &vecs[k];
            let mut entries: Vec<(f64, usize)> = v
                .iter()
                .enumerate()
                .filter(|(_, a)| a.abs() > 1e-8)
                .map(|(i, a)| (*a, i))
                .collect();
            entries.sort_by(|x, y| y.0.abs().partial_cmp(&x.0.abs()).unwrap());
            println!("    support {} configs", entries.len());
            for (a, i) in entries.iter().take(40) {
                let c = index_to_config(*i, n);
                let (s, d) = split_config(c, n);
                let (comp, betti) = subgraph_invariants(&geom, &s);
                println!(
                    "    {:+.6} {} |S|={} |D|={} comp={} betti={} wrank={} dec={}",
                    a,
                    config3_string(c, n),
                    s.count(),
                    d.count(),
                    comp,
                    betti,
                    winding_rank(&geom, &s),
                    decomposable(&geom, c),
                );
            }
        }
    }
}
