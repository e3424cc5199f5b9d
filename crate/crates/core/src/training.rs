//! Loss, quantum-natural-gradient updates, accuracy and the multi-seed
//! experiment loop.

use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ansatz::{AnsatzKind, CircuitTemplate};
use crate::dataset::{build_dataset, check_edge_prob_range, sample_balanced, Dataset, Item, DEFAULT_EDGE_PROB_RANGE};
use crate::embedding::embed_graph;
use crate::error::{Error, Result};
use crate::graphs::{Graph, LabelVector};
use crate::statevector::Statevector;
use crate::sweep::CompiledCircuit;

/// Exact CSV header of accuracy-curve files.
pub const CURVE_HEADER: &str = "Epoch,Node_Avg,Node_Avg_Error";

/// Normal quantile for a two-sided 95% interval.
pub const Z_95: f64 = 1.96;

pub const DEFAULT_LEARNING_RATE: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LossKind {
    /// `(1/n) sum (z_i - y_i)^2`
    MeanSquared,
    /// `1 - (1/n) sum z_i y_i`
    Linear,
}

impl LossKind {
    pub fn value(self, predictions: &[f64], label: &[f64]) -> f64 {
        let n = predictions.len() as f64;
        match self {
            LossKind::MeanSquared => {
                predictions.iter().zip(label).map(|(z, y)| (z - y) * (z - y)).sum::<f64>() / n
            }
            LossKind::Linear => 1.0 - predictions.iter().zip(label).map(|(z, y)| z * y).sum::<f64>() / n,
        }
    }

    /// `dL/dz_i`.
    pub fn weights(self, predictions: &[f64], label: &[f64]) -> Vec<f64> {
        let n = predictions.len() as f64;
        match self {
            LossKind::MeanSquared => predictions.iter().zip(label).map(|(z, y)| 2.0 * (z - y) / n).collect(),
            LossKind::Linear => label.iter().map(|y| -y / n).collect(),
        }
    }
}

impl fmt::Display for LossKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LossKind::MeanSquared => "mse",
            LossKind::Linear => "linear",
        })
    }
}

impl FromStr for LossKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mse" | "mean-squared" => Ok(LossKind::MeanSquared),
            "linear" => Ok(LossKind::Linear),
            other => Err(Error::Usage(format!("unknown loss '{other}' (expected mse or linear)"))),
        }
    }
}

/// Mean squared error between per-qubit predictions and a label.
pub fn loss(predictions: &[f64], label: &LabelVector) -> Result<f64> {
    if predictions.len() != label.len() {
        return Err(Error::Usage(format!(
            "{} predictions for a {}-entry label",
            predictions.len(),
            label.len()
        )));
    }
    Ok(LossKind::MeanSquared.value(predictions, &label.as_f64()))
}

/// How the per-epoch training graphs are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TrainingSet {
    /// The first `train_size` dataset items, reused every epoch.
    Fixed,
    /// A freshly generated balanced set every epoch.
    Resample,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub ansatz: AnsatzKind,
    pub n_qubits: usize,
    pub k: usize,
    pub repetitions: usize,
    pub epochs: usize,
    pub train_size: usize,
    pub dataset_size: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub metric_regularizer: f64,
    /// Initial parameters are uniform in `[-init_scale, init_scale]`.
    pub init_scale: f64,
    pub edge_prob_range: (f64, f64),
    pub loss: LossKind,
    pub training_set: TrainingSet,
    pub seeds: Vec<u64>,
}

impl TrainConfig {
    /// Defaults for a given ansatz and register: 50 epochs, 100 training
    /// graphs out of 3000, mini-batches of 20, ten seeds.
    pub fn new(ansatz: AnsatzKind, n_qubits: usize, k: usize) -> Self {
        Self {
            ansatz,
            n_qubits,
            k,
            repetitions: ansatz.default_repetitions(),
            epochs: 50,
            train_size: 100,
            dataset_size: 3000,
            batch_size: 20,
            learning_rate: DEFAULT_LEARNING_RATE,
            metric_regularizer: 1e-3,
            init_scale: 0.1,
            edge_prob_range: DEFAULT_EDGE_PROB_RANGE,
            loss: LossKind::MeanSquared,
            training_set: TrainingSet::Fixed,
            seeds: (0..10).collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if self.epochs == 0 {
            return fail("epochs must be at least 1".into());
        }
        if self.train_size == 0 || self.train_size >= self.dataset_size {
            return fail(format!(
                "training size {} must be positive and below the dataset size {}",
                self.train_size, self.dataset_size
            ));
        }
        if self.batch_size == 0 {
            return fail("batch size must be at least 1".into());
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return fail(format!("learning rate {} must be positive", self.learning_rate));
        }
        if !(self.metric_regularizer >= 0.0 && self.metric_regularizer.is_finite()) {
            return fail(format!("metric regularizer {} must be non-negative", self.metric_regularizer));
        }
        if !(self.init_scale >= 0.0 && self.init_scale.is_finite()) {
            return fail(format!("init scale {} must be non-negative", self.init_scale));
        }
        if self.seeds.is_empty() {
            return fail("at least one seed is required".into());
        }
        if self.k == 0 || self.k > self.n_qubits {
            return fail(format!("clique size {} must be in 1..={}", self.k, self.n_qubits));
        }
        check_edge_prob_range(self.edge_prob_range)?;
        self.ansatz.build(self.n_qubits, self.repetitions).map(|_| ())
    }
}

/// Sums in a fixed binary-tree order so results do not depend on how the
/// terms were produced.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        n if n <= 8 => values.iter().sum(),
        n => {
            let (a, b) = values.split_at(n / 2);
            pairwise_sum(a) + pairwise_sum(b)
        }
    }
}

fn pairwise_sum_vecs(mut vecs: Vec<Vec<f64>>) -> Vec<f64> {
    while vecs.len() > 1 {
        let mut next = Vec::with_capacity(vecs.len().div_ceil(2));
        let mut it = vecs.into_iter();
        while let Some(mut a) = it.next() {
            if let Some(b) = it.next() {
                a.iter_mut().zip(&b).for_each(|(x, y)| *x += y);
            }
            next.push(a);
        }
        vecs = next;
    }
    vecs.pop().unwrap_or_default()
}

/// Sample mean and 95% interval half-width `1.96 * s / sqrt(n)` with the
/// `n - 1` sample deviation. A single value has zero width.
pub fn mean_ci95(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = pairwise_sum(values) / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let sq: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
    let sd = (pairwise_sum(&sq) / (n - 1) as f64).sqrt();
    (mean, Z_95 * sd / (n as f64).sqrt())
}

/// Per-sample loss, loss gradient and Fubini-Study metric.
struct SampleTerms {
    loss: f64,
    grad: Vec<f64>,
    metric: Vec<f64>,
}

fn sample_terms(
    circuit: &CompiledCircuit,
    params: &[f64],
    state: &Statevector,
    label: &[f64],
    loss_kind: LossKind,
) -> SampleTerms {
    let tangents = circuit.tangents(params, state);
    let z = tangents.expectations_z();
    let jac = tangents.z_jacobian();
    let weights = loss_kind.weights(&z, label);
    let p = circuit.n_params();
    let mut grad = vec![0.0; p];
    for (q, w) in weights.iter().enumerate() {
        for (g, j) in grad.iter_mut().zip(&jac[q * p..(q + 1) * p]) {
            *g += w * j;
        }
    }
    SampleTerms { loss: loss_kind.value(&z, label), grad, metric: tangents.metric() }
}

/// Outcome of one natural-gradient update.
#[derive(Debug, Clone)]
pub struct StepReport {
    pub params: Vec<f64>,
    /// Batch-mean loss before the update.
    pub loss: f64,
    /// Batch-mean loss gradient before the update.
    pub gradient: Vec<f64>,
}

/// One update `theta - lr * (G + reg I)^-1 g` on already-embedded inputs,
/// where `g` and `G` are batch means of the per-sample loss gradient and
/// metric.
pub fn qng_step_states(
    circuit: &CompiledCircuit,
    params: &[f64],
    batch: &[(&Statevector, &[f64])],
    lr: f64,
    reg: f64,
    loss_kind: LossKind,
) -> Result<StepReport> {
    if batch.is_empty() {
        return Err(Error::Usage("natural-gradient step on an empty batch".into()));
    }
    let p = circuit.n_params();
    if params.len() != p {
        return Err(Error::Usage(format!("circuit has {p} parameters, got {}", params.len())));
    }
    for (state, label) in batch {
        if state.n_qubits() != circuit.n_qubits() || label.len() != circuit.n_qubits() {
            return Err(Error::Usage("batch item does not match the circuit width".into()));
        }
    }
    let terms: Vec<SampleTerms> = batch
        .par_iter()
        .map(|(state, label)| sample_terms(circuit, params, state, label, loss_kind))
        .collect();
    let scale = 1.0 / batch.len() as f64;
    let losses: Vec<f64> = terms.iter().map(|t| t.loss).collect();
    let (grads, metrics): (Vec<_>, Vec<_>) = terms.into_iter().map(|t| (t.grad, t.metric)).unzip();
    let grad: Vec<f64> = pairwise_sum_vecs(grads).into_iter().map(|g| g * scale).collect();
    let metric: Vec<f64> = pairwise_sum_vecs(metrics).into_iter().map(|g| g * scale).collect();

    let mut system = DMatrix::from_row_slice(p, p, &metric);
    for i in 0..p {
        system[(i, i)] += reg;
    }
    let rhs = DVector::from_column_slice(&grad);
    let max_diag = (0..p).map(|i| system[(i, i)]).fold(0.0, f64::max);
    let singular = |pivot: f64| {
        Error::Numerical(format!(
            "regularized metric is singular or indefinite (n = {p}, reg = {reg:e}, \
             largest diagonal entry {max_diag:e}, smallest pivot {pivot:e})"
        ))
    };
    let chol = system.cholesky().ok_or_else(|| singular(f64::NAN))?;
    let min_pivot = chol.l_dirty().diagonal().iter().map(|d| d * d).fold(f64::INFINITY, f64::min);
    if min_pivot <= f64::EPSILON * max_diag.max(1.0) {
        return Err(singular(min_pivot));
    }
    let direction = chol.solve(&rhs);
    if direction.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical(format!("natural-gradient direction is not finite (reg = {reg:e})")));
    }
    let new_params = params.iter().zip(direction.iter()).map(|(t, d)| t - lr * d).collect();
    Ok(StepReport { params: new_params, loss: pairwise_sum(&losses) * scale, gradient: grad })
}

/// One natural-gradient update on a batch of labeled graphs with the mean
/// squared error loss.
pub fn qng_step(
    template: &CircuitTemplate,
    params: &[f64],
    batch: &[(Graph, LabelVector)],
    lr: f64,
    reg: f64,
) -> Result<Vec<f64>> {
    let states: Vec<Statevector> = batch.iter().map(|(g, _)| embed_graph(g)).collect();
    let labels: Vec<Vec<f64>> = batch.iter().map(|(_, l)| l.as_f64()).collect();
    let items: Vec<(&Statevector, &[f64])> =
        states.iter().zip(&labels).map(|(s, l)| (s, l.as_slice())).collect();
    if params.len() != template.n_params() {
        return Err(Error::Usage(format!(
            "template has {} parameters, got {}",
            template.n_params(),
            params.len()
        )));
    }
    qng_step_states(&template.compile(), params, &items, lr, reg, LossKind::MeanSquared)
        .map(|r| r.params)
}

/// Fraction of qubits whose prediction sign matches the label. A prediction
/// of exactly zero never matches.
pub fn node_accuracy(predictions: &[f64], label: &[i8]) -> f64 {
    let hits = predictions
        .iter()
        .zip(label)
        .filter(|(&z, &y)| (z > 0.0 && y > 0) || (z < 0.0 && y < 0))
        .count();
    hits as f64 / label.len() as f64
}

fn accuracy_on_states(circuit: &CompiledCircuit, params: &[f64], data: &[(Statevector, &LabelVector)]) -> f64 {
    let per_item: Vec<f64> = data
        .par_iter()
        .map(|(state, label)| node_accuracy(&circuit.run(params, state).expectations_z(), label.values()))
        .collect();
    pairwise_sum(&per_item) / per_item.len() as f64
}

/// Mean over items of the per-graph node accuracy.
pub fn node_avg_accuracy(
    template: &CircuitTemplate,
    params: &[f64],
    dataset: &[(Graph, LabelVector)],
) -> Result<f64> {
    if dataset.is_empty() {
        return Err(Error::Usage("accuracy of an empty dataset".into()));
    }
    let first = embed_graph(&dataset[0].0);
    template.check_call(params, &first)?;
    let data: Vec<(Statevector, &LabelVector)> =
        dataset.iter().map(|(g, l)| (embed_graph(g), l)).collect();
    Ok(accuracy_on_states(&template.compile(), params, &data))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochRecord {
    pub epoch: usize,
    pub node_avg: f64,
    pub node_avg_error: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct AccuracyCurve {
    pub records: Vec<EpochRecord>,
}

impl AccuracyCurve {
    pub fn last(&self) -> Option<&EpochRecord> {
        self.records.last()
    }

    /// Writes the curve with the exact header `Epoch,Node_Avg,Node_Avg_Error`.
    /// Values use the shortest representation that parses back exactly.
    pub fn write_csv(&self, mut out: impl Write) -> Result<()> {
        writeln!(out, "{CURVE_HEADER}")?;
        for r in &self.records {
            writeln!(out, "{},{},{}", r.epoch, r.node_avg, r.node_avg_error)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("ascii output")
    }

    /// Parses a curve file; errors name the offending line.
    pub fn read_csv(input: impl BufRead) -> Result<Self> {
        let mut lines = input.lines();
        let header = lines.next().ok_or_else(|| Error::Parse("empty curve file".into()))??;
        if header.trim_end() != CURVE_HEADER {
            return Err(Error::Parse(format!("line 1: expected header '{CURVE_HEADER}', found '{header}'")));
        }
        let mut records: Vec<EpochRecord> = Vec::new();
        for (i, line) in lines.enumerate() {
            let line = line?;
            let lineno = i + 2;
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.trim_end().split(',').collect();
            if fields.len() != 3 {
                return Err(Error::Parse(format!("line {lineno}: expected 3 fields, found {}", fields.len())));
            }
            let bad = |what: &str, v: &str| Error::Parse(format!("line {lineno}: bad {what} '{v}'"));
            let epoch: usize = fields[0].parse().map_err(|_| bad("epoch", fields[0]))?;
            let node_avg: f64 = fields[1].parse().map_err(|_| bad("Node_Avg", fields[1]))?;
            let node_avg_error: f64 = fields[2].parse().map_err(|_| bad("Node_Avg_Error", fields[2]))?;
            if records.last().is_some_and(|r| r.epoch >= epoch) {
                return Err(Error::Parse(format!("line {lineno}: epochs must increase strictly")));
            }
            records.push(EpochRecord { epoch, node_avg, node_avg_error });
        }
        Ok(Self { records })
    }
}

/// Validation accuracy per epoch for one seed.
#[derive(Debug, Clone, PartialEq)]
pub struct SeedCurve {
    pub seed: u64,
    pub accuracies: Vec<f64>,
    pub final_params: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub curve: AccuracyCurve,
    pub seeds: Vec<SeedCurve>,
}

impl ExperimentResult {
    /// Long-format per-seed curves: `Epoch,Seed,Node_Avg`.
    pub fn write_seed_csv(&self, mut out: impl Write) -> Result<()> {
        writeln!(out, "Epoch,Seed,Node_Avg")?;
        let epochs = self.curve.records.iter().map(|r| r.epoch);
        for (e, epoch) in epochs.enumerate() {
            for s in &self.seeds {
                writeln!(out, "{epoch},{},{}", s.seed, s.accuracies[e])?;
            }
        }
        out.flush()?;
        Ok(())
    }
}

/// Progress notifications from [`run_experiment_with`].
#[derive(Debug, Clone, Copy)]
pub struct Progress {
    pub seed: u64,
    pub epoch: usize,
    pub train_loss: f64,
    pub accuracy: f64,
}

/// Runs every seed with per-seed generated datasets.
pub fn run_experiment(config: &TrainConfig) -> Result<ExperimentResult> {
    run_experiment_with(config, None, &mut |_| {})
}

/// Runs every seed. With `dataset` set, all seeds share it and only the
/// initialization and batch order vary; otherwise each seed generates its
/// own dataset of `config.dataset_size` graphs.
pub fn run_experiment_with(
    config: &TrainConfig,
    dataset: Option<&Dataset>,
    progress: &mut dyn FnMut(Progress),
) -> Result<ExperimentResult> {
    config.validate()?;
    if let Some(ds) = dataset {
        if ds.n_nodes != config.n_qubits || ds.k != config.k {
            return Err(Error::Config(format!(
                "dataset is for {} nodes / {}-cliques, config asks for {} / {}",
                ds.n_nodes, ds.k, config.n_qubits, config.k
            )));
        }
        if ds.len() <= config.train_size {
            return Err(Error::Config(format!(
                "dataset has {} items, need more than the training size {}",
                ds.len(),
                config.train_size
            )));
        }
    }
    let template = config.ansatz.build(config.n_qubits, config.repetitions)?;
    let circuit = template.compile();
    let mut seeds = Vec::with_capacity(config.seeds.len());
    for &seed in &config.seeds {
        let generated;
        let ds = match dataset {
            Some(ds) => ds,
            None => {
                generated = build_dataset(
                    config.n_qubits,
                    config.k,
                    config.dataset_size,
                    config.edge_prob_range,
                    seed,
                )?;
                &generated
            }
        };
        seeds.push(train_seed(config, &circuit, ds, seed, progress)?);
    }
    let records = (0..config.epochs)
        .map(|e| {
            let accs: Vec<f64> = seeds.iter().map(|s| s.accuracies[e]).collect();
            let (node_avg, node_avg_error) = mean_ci95(&accs);
            EpochRecord { epoch: e + 1, node_avg, node_avg_error }
        })
        .collect();
    Ok(ExperimentResult { curve: AccuracyCurve { records }, seeds })
}

fn embed_items(items: &[Item]) -> Vec<(Statevector, &LabelVector)> {
    items.par_iter().map(|it| (embed_graph(&it.graph), &it.label)).collect()
}

fn train_seed(
    config: &TrainConfig,
    circuit: &CompiledCircuit,
    dataset: &Dataset,
    seed: u64,
    progress: &mut dyn FnMut(Progress),
) -> Result<SeedCurve> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    let mut params: Vec<f64> = (0..circuit.n_params())
        .map(|_| if config.init_scale > 0.0 { rng.gen_range(-config.init_scale..=config.init_scale) } else { 0.0 })
        .collect();

    let (train_items, val_items) = dataset.items.split_at(config.train_size);
    let validation = embed_items(val_items);
    let mut fresh: Vec<Item>;
    let mut train: Vec<(Statevector, Vec<f64>)> =
        train_items.iter().map(|it| (embed_graph(&it.graph), it.label.as_f64())).collect();

    let mut accuracies = Vec::with_capacity(config.epochs);
    for epoch in 1..=config.epochs {
        if config.training_set == TrainingSet::Resample && epoch > 1 {
            fresh = sample_balanced(config.n_qubits, config.k, config.train_size, config.edge_prob_range, &mut rng)?;
            train = fresh.iter().map(|it| (embed_graph(&it.graph), it.label.as_f64())).collect();
        }
        let mut order: Vec<usize> = (0..train.len()).collect();
        order.shuffle(&mut rng);
        let mut losses = Vec::new();
        for chunk in order.chunks(config.batch_size) {
            let batch: Vec<(&Statevector, &[f64])> =
                chunk.iter().map(|&i| (&train[i].0, train[i].1.as_slice())).collect();
            let report = qng_step_states(
                circuit,
                &params,
                &batch,
                config.learning_rate,
                config.metric_regularizer,
                config.loss,
            )?;
            losses.push(report.loss);
            params = report.params;
        }
        let accuracy = accuracy_on_states(circuit, &params, &validation);
        accuracies.push(accuracy);
        progress(Progress {
            seed,
            epoch,
            train_loss: pairwise_sum(&losses) / losses.len() as f64,
            accuracy,
        });
    }
    Ok(SeedCurve { seed, accuracies, final_params: params })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statevector::Gate;
    use std::f64::consts::PI;

    #[test]
    fn loss_examples() {
        let label = LabelVector::from_members(4, &[0, 2]).unwrap();
        let y = label.as_f64();
        assert_eq!(loss(&y, &label).unwrap(), 0.0);
        let neg: Vec<f64> = y.iter().map(|v| -v).collect();
        assert_eq!(loss(&neg, &label).unwrap(), 4.0);
        assert_eq!(loss(&[0.0; 4], &LabelVector::blank(4)).unwrap(), 1.0);
        assert!(loss(&[0.0; 3], &label).is_err());
    }

    #[test]
    fn accuracy_sign_rule() {
        assert_eq!(node_accuracy(&[0.3, -0.2, 0.9], &[1, -1, 1]), 1.0);
        assert_eq!(node_accuracy(&[0.0, 0.0], &[1, -1]), 0.0);
        assert_eq!(node_accuracy(&[0.5, 0.5, -0.5, -0.5], &[1, -1, 1, -1]), 0.5);
    }

    #[test]
    fn single_rx_qng_step() {
        let t = CircuitTemplate::new(1, vec![Gate::rx(0, 0)], 1).unwrap();
        let zero = Statevector::zero_state(1).unwrap();
        let label = [-1.0];
        let report =
            qng_step_states(&t.compile(), &[PI / 2.0], &[(&zero, &label[..])], 0.1, 0.0, LossKind::MeanSquared)
                .unwrap();
        assert!((report.gradient[0] + 2.0).abs() < 1e-12);
        assert!((report.params[0] - (PI / 2.0 + 0.8)).abs() < 1e-12);
    }

    #[test]
    fn critical_point_is_fixed() {
        // RX(0)|0> gives <Z> = 1 exactly; the gradient sin(theta) term vanishes.
        let t = CircuitTemplate::new(1, vec![Gate::rx(0, 0)], 1).unwrap();
        let zero = Statevector::zero_state(1).unwrap();
        let label = [1.0];
        let report =
            qng_step_states(&t.compile(), &[0.0], &[(&zero, &label[..])], 0.1, 1e-3, LossKind::MeanSquared)
                .unwrap();
        assert_eq!(report.params, vec![0.0]);
    }

    #[test]
    fn singular_metric_is_a_numerical_error() {
        // RZ on |0> only adds a global phase, so the metric is exactly zero.
        let t = CircuitTemplate::new(1, vec![Gate::rz(0, 0)], 1).unwrap();
        let zero = Statevector::zero_state(1).unwrap();
        let label = [1.0];
        let err = qng_step_states(&t.compile(), &[0.3], &[(&zero, &label[..])], 0.1, 0.0, LossKind::MeanSquared)
            .unwrap_err();
        assert!(matches!(err, Error::Numerical(_)), "{err}");
    }

    #[test]
    fn empty_batch_rejected() {
        let t = CircuitTemplate::new(1, vec![Gate::rx(0, 0)], 1).unwrap();
        assert!(qng_step(&t, &[0.0], &[], 0.1, 1e-3).is_err());
    }

    #[test]
    fn ci_of_known_values() {
        let (m, e) = mean_ci95(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        let sd = (5.0f64 / 3.0).sqrt();
        assert!((e - 1.96 * sd / 2.0).abs() < 1e-15);
        assert_eq!(mean_ci95(&[0.7]), (0.7, 0.0));
    }

    #[test]
    fn pairwise_sum_matches_naive() {
        let v: Vec<f64> = (0..1000).map(|i| i as f64 * 0.5).collect();
        assert_eq!(pairwise_sum(&v), v.iter().sum::<f64>());
        let vecs = vec![vec![1.0, 2.0], vec![3.0, 4.0], vec![5.0, 6.0]];
        assert_eq!(pairwise_sum_vecs(vecs), vec![9.0, 12.0]);
    }

    #[test]
    fn config_validation() {
        let mut c = TrainConfig::new(AnsatzKind::PermutationInvariant, 6, 4);
        assert!(c.validate().is_ok());
        c.epochs = 0;
        assert!(matches!(c.validate(), Err(Error::Config(_))));
        let mut c = TrainConfig::new(AnsatzKind::CyclicInvariant, 4, 3);
        assert!(c.validate().is_err());
        c.n_qubits = 6;
        c.train_size = 3000;
        assert!(c.validate().is_err());
    }

    #[test]
    fn curve_csv_round_trip_and_errors() {
        let curve = AccuracyCurve {
            records: vec![
                EpochRecord { epoch: 1, node_avg: 0.5123456789012345, node_avg_error: 0.01 },
                EpochRecord { epoch: 2, node_avg: 2.0 / 3.0, node_avg_error: 0.0 },
            ],
        };
        let text = curve.to_csv_string();
        assert!(text.starts_with("Epoch,Node_Avg,Node_Avg_Error\n1,"));
        assert_eq!(AccuracyCurve::read_csv(text.as_bytes()).unwrap(), curve);
        let bad = "Epoch,Node_Avg,Node_Avg_Error\n1,0.5,0.1\n2,abc,0.1\n";
        let err = AccuracyCurve::read_csv(bad.as_bytes()).unwrap_err();
        assert!(err.to_string().contains("line 3"), "{err}");
        assert!(AccuracyCurve::read_csv("Epoch,Acc\n".as_bytes()).is_err());
    }
}
