//! Statevector simulation of symmetry-restricted variational circuits trained
//! with the quantum natural gradient to mark the members of a k-clique in a
//! random graph.
//!
//! The pieces, bottom-up:
//!
//! * [`statevector`]: dense amplitudes and gate kernels.
//! * [`ansatz`]: the permutation-invariant, cyclic-invariant and
//!   strongly-entangling templates, parameter-shift gradients and the
//!   Fubini-Study metric.
//! * [`graphs`] and [`dataset`]: Erdős–Rényi features, exact clique
//!   enumeration, labels and balanced datasets.
//! * [`embedding`]: graph states (`H` on every qubit, `CZ` per edge).
//! * [`training`]: loss, natural-gradient steps, node accuracy and the
//!   multi-seed experiment loop.

pub mod ansatz;
pub mod dataset;
pub mod embedding;
pub mod error;
pub mod graphs;
pub mod statevector;
pub mod sweep;
pub mod training;

pub use ansatz::{
    build_cyclic_invariant, build_permutation_invariant, build_strongly_entangling, evaluate,
    expectation_gradient, fubini_study_metric, AnsatzKind, CircuitTemplate,
};
pub use dataset::{build_dataset, Dataset, Item};
pub use embedding::embed_graph;
pub use error::{Error, Result};
pub use graphs::{find_k_cliques, gen_er_graph, make_label, Graph, LabelVector};
pub use statevector::{apply_gate, Gate, GateKind, Statevector};
pub use sweep::CompiledCircuit;
pub use training::{
    loss, node_avg_accuracy, qng_step, run_experiment, run_experiment_with, AccuracyCurve, LossKind,
    TrainConfig,
};
