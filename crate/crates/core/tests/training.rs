use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use clique_qml::training::{node_avg_accuracy, qng_step_states, run_experiment, LossKind, TrainConfig};
use clique_qml::{build_dataset, embed_graph, evaluate, qng_step, AnsatzKind, Graph, LabelVector, Statevector};

fn random_params(n: usize, scale: f64, rng: &mut impl Rng) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-scale..scale)).collect()
}

fn labeled(n: usize, k: usize, size: usize, seed: u64) -> Vec<(Graph, LabelVector)> {
    build_dataset(n, k, size, (0.3, 0.9), seed)
        .unwrap()
        .items
        .into_iter()
        .map(|it| (it.graph, it.label))
        .collect()
}

fn batch_loss(kind: AnsatzKind, reps: usize, params: &[f64], data: &[(Statevector, Vec<f64>)]) -> f64 {
    let t = kind.build(6, reps).unwrap();
    let total: f64 = data
        .iter()
        .map(|(s, y)| LossKind::MeanSquared.value(&evaluate(&t, params, s).unwrap().expectations_z(), y))
        .sum();
    total / data.len() as f64
}

fn embedded(data: &[(Graph, LabelVector)]) -> Vec<(Statevector, Vec<f64>)> {
    data.iter().map(|(g, l)| (embed_graph(g), l.as_f64())).collect()
}

#[test]
fn loss_gradient_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let data = embedded(&labeled(6, 4, 4, 5));
    let batch: Vec<(&Statevector, &[f64])> = data.iter().map(|(s, y)| (s, y.as_slice())).collect();
    for kind in AnsatzKind::ALL {
        let reps = 2;
        let t = kind.build(6, reps).unwrap();
        let p = random_params(t.n_params(), PI, &mut rng);
        let report = qng_step_states(&t.compile(), &p, &batch, 0.01, 1e-3, LossKind::MeanSquared).unwrap();
        assert!((report.loss - batch_loss(kind, reps, &p, &data)).abs() < 1e-12);
        let h = 1e-5;
        for c in 0..p.len() {
            let (mut up, mut down) = (p.clone(), p.clone());
            up[c] += h;
            down[c] -= h;
            let fd = (batch_loss(kind, reps, &up, &data) - batch_loss(kind, reps, &down, &data)) / (2.0 * h);
            assert!((report.gradient[c] - fd).abs() < 1e-5, "{kind} class {c}: {} vs {fd}", report.gradient[c]);
        }
    }
}

/// Recovers the update direction `(G + reg I)^-1 g` from a step.
fn direction(before: &[f64], after: &[f64], lr: f64) -> Vec<f64> {
    before.iter().zip(after).map(|(a, b)| (a - b) / lr).collect()
}

fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    dot / (na * nb)
}

#[test]
fn heavy_regularization_approaches_plain_gradient_descent() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let data = embedded(&labeled(6, 4, 6, 6));
    let batch: Vec<(&Statevector, &[f64])> = data.iter().map(|(s, y)| (s, y.as_slice())).collect();
    for kind in AnsatzKind::ALL {
        let t = kind.build(6, kind.default_repetitions()).unwrap();
        let p = random_params(t.n_params(), PI, &mut rng);
        let r = qng_step_states(&t.compile(), &p, &batch, 1.0, 1e6, LossKind::MeanSquared).unwrap();
        let d = direction(&p, &r.params, 1.0);
        assert!(cosine(&d, &r.gradient) > 0.999, "{kind}: cosine {}", cosine(&d, &r.gradient));
    }
}

#[test]
fn regularized_metric_is_well_conditioned() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let data = labeled(6, 4, 4, 7);
    let reg = 1e-3;
    for kind in AnsatzKind::ALL {
        let t = kind.build(6, kind.default_repetitions()).unwrap();
        let p = random_params(t.n_params(), PI, &mut rng);
        let n = t.n_params();
        let mut mean = DMatrix::<f64>::zeros(n, n);
        for (g, _) in &data {
            mean += clique_qml::fubini_study_metric(&t, &p, &embed_graph(g)).unwrap();
        }
        mean /= data.len() as f64;
        mean += DMatrix::identity(n, n) * reg;
        let lowest = SymmetricEigen::new(mean).eigenvalues.min();
        assert!(lowest >= reg - 1e-9, "{kind}: lowest eigenvalue {lowest}");
    }
}

#[test]
fn untrained_circuits_guess_at_chance() {
    let data = labeled(6, 4, 500, 21);
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let t = AnsatzKind::StronglyEntangling.build(6, 3).unwrap();
    let mut total = 0.0;
    let draws = 10;
    for _ in 0..draws {
        let p = random_params(t.n_params(), PI, &mut rng);
        total += node_avg_accuracy(&t, &p, &data).unwrap();
    }
    let mean = total / draws as f64;
    assert!((mean - 0.5).abs() <= 0.05, "mean untrained accuracy {mean}");
}

#[test]
fn trained_permutation_invariant_model_scores_relabeled_data_identically() {
    let t = AnsatzKind::PermutationInvariant.build(6, 10).unwrap();
    let train = labeled(6, 4, 20, 31);
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let mut p = random_params(t.n_params(), 0.1, &mut rng);
    for chunk in train.chunks(5) {
        p = qng_step(&t, &p, chunk, 0.05, 1e-3).unwrap();
    }
    let val = labeled(6, 4, 40, 32);
    let perm = [3, 0, 5, 1, 4, 2];
    let relabeled: Vec<(Graph, LabelVector)> = val
        .iter()
        .map(|(g, l)| (g.permuted(&perm).unwrap(), l.permuted(&perm).unwrap()))
        .collect();
    let a = node_avg_accuracy(&t, &p, &val).unwrap();
    let b = node_avg_accuracy(&t, &p, &relabeled).unwrap();
    assert!((a - b).abs() <= 1e-10, "{a} vs {b}");
}

fn small_config(kind: AnsatzKind) -> TrainConfig {
    let mut c = TrainConfig::new(kind, 5, 3);
    c.repetitions = 2;
    c.epochs = 3;
    c.train_size = 20;
    c.dataset_size = 60;
    c.batch_size = 5;
    c.seeds = vec![0, 1, 2];
    c
}

#[test]
fn experiments_are_deterministic() {
    for kind in AnsatzKind::ALL {
        let a = run_experiment(&small_config(kind)).unwrap();
        let b = run_experiment(&small_config(kind)).unwrap();
        assert_eq!(a.curve.to_csv_string(), b.curve.to_csv_string());
        for (x, y) in a.seeds.iter().zip(&b.seeds) {
            let bits = |v: &[f64]| v.iter().map(|f| f.to_bits()).collect::<Vec<_>>();
            assert_eq!(bits(&x.final_params), bits(&y.final_params));
        }
        let mut other = small_config(kind);
        other.seeds = vec![3, 4, 5];
        assert_ne!(run_experiment(&other).unwrap().curve, a.curve);
    }
}

#[test]
fn curve_has_one_record_per_epoch_and_single_seed_has_no_spread() {
    let mut c = small_config(AnsatzKind::PermutationInvariant);
    c.seeds = vec![7];
    let r = run_experiment(&c).unwrap();
    let epochs: Vec<usize> = r.curve.records.iter().map(|r| r.epoch).collect();
    assert_eq!(epochs, vec![1, 2, 3]);
    assert!(r.curve.records.iter().all(|r| r.node_avg_error == 0.0 && (0.0..=1.0).contains(&r.node_avg)));
}

#[test]
fn full_size_datasets_are_balanced_and_valid() {
    for (n, k) in [(6, 4), (8, 5)] {
        let ds = build_dataset(n, k, 3000, (0.3, 0.9), 1).unwrap();
        assert_eq!(ds.class_counts(), (1500, 1500));
        for item in &ds.items {
            item.label.validate(&item.graph, k).unwrap();
            assert!((0.3..=0.9).contains(&item.edge_prob));
        }
    }
}
