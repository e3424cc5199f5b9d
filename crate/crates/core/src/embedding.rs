//! Graph-state embedding: one qubit per node, `H` on every qubit, then a
//! `CZ` for every edge.

use num_complex::Complex64;

use crate::graphs::Graph;
use crate::statevector::{Statevector, MAX_QUBITS};

/// `prod_{(i,j) in E} CZ_ij  H^n |0...0>`.
///
/// Every amplitude has magnitude `2^{-n/2}`; the sign of basis state `x` is
/// `(-1)^{number of edges with both endpoints set in x}`, so it is computed
/// directly instead of applying gates one by one.
pub fn embed_graph(graph: &Graph) -> Statevector {
    let n = graph.n_nodes();
    assert!(n <= MAX_QUBITS, "{n} nodes exceeds the {MAX_QUBITS}-qubit simulator cap");
    let amp = (0.5f64).powf(n as f64 / 2.0);
    let masks: Vec<usize> = graph.edges().map(|(a, b)| (1 << a) | (1 << b)).collect();
    let amps = (0..1usize << n)
        .map(|x| {
            let odd = masks.iter().filter(|&&m| x & m == m).count() % 2 == 1;
            Complex64::new(if odd { -amp } else { amp }, 0.0)
        })
        .collect();
    Statevector::from_amplitudes(amps).expect("power-of-two length")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::gen_er_graph;
    use crate::statevector::Gate;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn gate_by_gate(graph: &Graph, edges: &[(usize, usize)]) -> Statevector {
        let mut s = Statevector::zero_state(graph.n_nodes()).unwrap();
        for q in 0..graph.n_nodes() {
            s.apply(&Gate::h(q), &[]).unwrap();
        }
        for &(a, b) in edges {
            s.apply(&Gate::cz(a, b), &[]).unwrap();
        }
        s
    }

    #[test]
    fn empty_graph_is_plus_state() {
        let s = embed_graph(&Graph::empty(2).unwrap());
        for a in s.amplitudes() {
            assert!((a - Complex64::new(0.5, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn single_edge_phases_11() {
        let s = embed_graph(&Graph::new(2, [(0, 1)]).unwrap());
        let want = [0.5, 0.5, 0.5, -0.5];
        for (a, w) in s.amplitudes().iter().zip(want) {
            assert!((a.re - w).abs() < 1e-15 && a.im == 0.0);
        }
    }

    #[test]
    fn matches_circuit_in_any_edge_order() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..20 {
            let g = gen_er_graph(6, 0.5, &mut rng).unwrap();
            let direct = embed_graph(&g);
            let mut edges: Vec<_> = g.edges().collect();
            let reference = gate_by_gate(&g, &edges);
            edges.shuffle(&mut rng);
            let shuffled = gate_by_gate(&g, &edges);
            assert_eq!(reference, shuffled);
            for (a, b) in direct.amplitudes().iter().zip(reference.amplitudes()) {
                assert!((a - b).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn isomorphic_graphs_give_permuted_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(18);
        for _ in 0..20 {
            let g = gen_er_graph(6, 0.5, &mut rng).unwrap();
            let mut perm: Vec<usize> = (0..6).collect();
            perm.shuffle(&mut rng);
            let lhs = embed_graph(&g.permuted(&perm).unwrap());
            let rhs = embed_graph(&g).permute_qubits(&perm).unwrap();
            for (a, b) in lhs.amplitudes().iter().zip(rhs.amplitudes()) {
                assert!((a - b).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn embedded_states_have_zero_z_expectations() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for _ in 0..50 {
            let g = gen_er_graph(6, 0.6, &mut rng).unwrap();
            let s = embed_graph(&g);
            assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
            assert!(s.expectations_z().iter().all(|z| z.abs() < 1e-12));
        }
    }
}
