//! The three layer templates compared in the clique experiments and exact
//! derivatives of circuits built from them.
//!
//! A [`CircuitTemplate`] is an ordered gate list whose parameter slots point
//! at *parameter classes*. Gates related by the symmetry the template is meant
//! to respect share a class, so a single trainable value drives all of them.
//!
//! * [`AnsatzKind::PermutationInvariant`]: per layer, `RX(a)` on every qubit,
//!   `RY(b)` on every qubit and `RZZ(c)` on every unordered qubit pair. The
//!   layer unitary commutes with every relabeling of the qubits.
//! * [`AnsatzKind::CyclicInvariant`]: `RX(a)`, `RY(b)`, then `RZZ(c)` on the
//!   nearest-neighbour ring and `RZZ(d)` on the next-nearest ring. Commutes
//!   with cyclic shifts only.
//! * [`AnsatzKind::StronglyEntangling`]: unshared `U3` on every qubit followed
//!   by a CNOT ring of stride 1, then again with a CNOT ring of stride 2.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::statevector::{apply_bound, expectation_z, Gate, Statevector};
use crate::sweep::CompiledCircuit;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AnsatzKind {
    PermutationInvariant,
    CyclicInvariant,
    StronglyEntangling,
}

impl AnsatzKind {
    pub const ALL: [AnsatzKind; 3] = [
        AnsatzKind::PermutationInvariant,
        AnsatzKind::CyclicInvariant,
        AnsatzKind::StronglyEntangling,
    ];

    /// Repetition counts that put each template near 120 trainable values.
    pub fn default_repetitions(self) -> usize {
        match self {
            AnsatzKind::PermutationInvariant => 40,
            AnsatzKind::CyclicInvariant => 30,
            AnsatzKind::StronglyEntangling => 3,
        }
    }

    /// Number of parameter classes for `repetitions` layers on `n_qubits`.
    pub fn n_params(self, n_qubits: usize, repetitions: usize) -> usize {
        match self {
            AnsatzKind::PermutationInvariant => 3 * repetitions,
            AnsatzKind::CyclicInvariant => 4 * repetitions,
            AnsatzKind::StronglyEntangling => repetitions * 2 * n_qubits * 3,
        }
    }

    pub fn build(self, n_qubits: usize, repetitions: usize) -> Result<CircuitTemplate> {
        match self {
            AnsatzKind::PermutationInvariant => build_permutation_invariant(n_qubits, repetitions),
            AnsatzKind::CyclicInvariant => build_cyclic_invariant(n_qubits, repetitions),
            AnsatzKind::StronglyEntangling => build_strongly_entangling(n_qubits, repetitions),
        }
    }

    /// Short tag used in file names: `Sn`, `Cn`, `Entanglement`.
    pub fn file_tag(self) -> &'static str {
        match self {
            AnsatzKind::PermutationInvariant => "Sn",
            AnsatzKind::CyclicInvariant => "Cn",
            AnsatzKind::StronglyEntangling => "Entanglement",
        }
    }
}

impl fmt::Display for AnsatzKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AnsatzKind::PermutationInvariant => "perm",
            AnsatzKind::CyclicInvariant => "cyclic",
            AnsatzKind::StronglyEntangling => "standard",
        })
    }
}

impl FromStr for AnsatzKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "perm" | "permutation" | "sn" => Ok(AnsatzKind::PermutationInvariant),
            "cyclic" | "cn" => Ok(AnsatzKind::CyclicInvariant),
            "standard" | "strong" | "entanglement" => Ok(AnsatzKind::StronglyEntangling),
            other => Err(Error::Usage(format!(
                "unknown ansatz '{other}' (expected perm, cyclic or standard)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircuitTemplate {
    n_qubits: usize,
    gates: Vec<Gate>,
    n_params: usize,
}

impl CircuitTemplate {
    /// Checks that every gate fits the register and that the slots cover
    /// exactly the classes `0..n_params`.
    pub fn new(n_qubits: usize, gates: Vec<Gate>, n_params: usize) -> Result<Self> {
        let mut used = vec![false; n_params];
        for gate in &gates {
            let gate = Gate::new(gate.kind, gate.qubits.clone(), gate.slots.clone())?;
            if let Some(q) = gate.qubits.iter().find(|&&q| q >= n_qubits) {
                return Err(Error::Usage(format!(
                    "{} on qubit {q} outside a {n_qubits}-qubit register",
                    gate.kind
                )));
            }
            for &class in &gate.slots {
                let flag = used.get_mut(class).ok_or_else(|| {
                    Error::Usage(format!("parameter class {class} >= n_params {n_params}"))
                })?;
                *flag = true;
            }
        }
        if let Some(unused) = used.iter().position(|u| !u) {
            return Err(Error::Usage(format!("parameter class {unused} is never referenced")));
        }
        Ok(Self { n_qubits, gates, n_params })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn n_params(&self) -> usize {
        self.n_params
    }

    /// `(gate index, slot index, class)` for every parameter slot.
    pub fn slot_classes(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        self.gates
            .iter()
            .enumerate()
            .flat_map(|(g, gate)| gate.slots.iter().enumerate().map(move |(s, &c)| (g, s, c)))
    }

    pub fn compile(&self) -> CompiledCircuit {
        CompiledCircuit::new(self)
    }

    pub(crate) fn check_call(&self, params: &[f64], input: &Statevector) -> Result<()> {
        if params.len() != self.n_params {
            return Err(Error::Usage(format!(
                "template has {} parameters, got {}",
                self.n_params,
                params.len()
            )));
        }
        if input.n_qubits() != self.n_qubits {
            return Err(Error::Usage(format!(
                "template acts on {} qubits, input state has {}",
                self.n_qubits,
                input.n_qubits()
            )));
        }
        Ok(())
    }
}

fn check_size(name: &str, n_qubits: usize, min_qubits: usize, repetitions: usize) -> Result<()> {
    if n_qubits < min_qubits {
        return Err(Error::Config(format!(
            "{name} template needs at least {min_qubits} qubits, got {n_qubits}"
        )));
    }
    if n_qubits > crate::statevector::MAX_QUBITS {
        return Err(Error::Config(format!("{n_qubits} qubits exceeds the simulator cap")));
    }
    if repetitions == 0 {
        return Err(Error::Config(format!("{name} template needs at least one repetition")));
    }
    Ok(())
}

fn push_rotation_layer(gates: &mut Vec<Gate>, n: usize, x_class: usize, y_class: usize) {
    gates.extend((0..n).map(|q| Gate::rx(q, x_class)));
    gates.extend((0..n).map(|q| Gate::ry(q, y_class)));
}

pub fn build_permutation_invariant(n_qubits: usize, repetitions: usize) -> Result<CircuitTemplate> {
    check_size("permutation-invariant", n_qubits, 2, repetitions)?;
    let n = n_qubits;
    let mut gates = Vec::with_capacity(repetitions * (2 * n + n * (n - 1) / 2));
    for r in 0..repetitions {
        let base = 3 * r;
        push_rotation_layer(&mut gates, n, base, base + 1);
        for i in 0..n {
            for j in i + 1..n {
                gates.push(Gate::rzz(i, j, base + 2));
            }
        }
    }
    CircuitTemplate::new(n, gates, 3 * repetitions)
}

/// `RZZ` orbits of the cyclic group: distance-1 and distance-2 couplings
/// around the ring. For fewer than five qubits the two orbits overlap or
/// shrink, so that case is rejected.
pub fn build_cyclic_invariant(n_qubits: usize, repetitions: usize) -> Result<CircuitTemplate> {
    check_size("cyclic-invariant", n_qubits, 5, repetitions)?;
    let n = n_qubits;
    let mut gates = Vec::with_capacity(repetitions * 4 * n);
    for r in 0..repetitions {
        let base = 4 * r;
        push_rotation_layer(&mut gates, n, base, base + 1);
        for (distance, class) in [(1, base + 2), (2, base + 3)] {
            gates.extend((0..n).map(|i| Gate::rzz(i, (i + distance) % n, class)));
        }
    }
    CircuitTemplate::new(n, gates, 4 * repetitions)
}

pub fn build_strongly_entangling(n_qubits: usize, repetitions: usize) -> Result<CircuitTemplate> {
    check_size("strongly-entangling", n_qubits, 3, repetitions)?;
    let n = n_qubits;
    let mut gates = Vec::with_capacity(repetitions * 4 * n);
    let mut next = 0;
    for _ in 0..repetitions {
        for stride in [1, 2] {
            for q in 0..n {
                gates.push(Gate::u3(q, [next, next + 1, next + 2]));
                next += 3;
            }
            gates.extend((0..n).map(|i| Gate::cnot(i, (i + stride) % n)));
        }
    }
    CircuitTemplate::new(n, gates, next)
}

/// Runs the template gate by gate on a copy of `input`.
pub fn evaluate(template: &CircuitTemplate, params: &[f64], input: &Statevector) -> Result<Statevector> {
    template.check_call(params, input)?;
    let mut state = input.clone();
    for gate in &template.gates {
        state.apply(gate, params)?;
    }
    Ok(state)
}

/// Evaluates with slot `slot` of gate `gate` offset by `delta`, leaving the
/// other gates of the same class untouched.
fn evaluate_shifted(
    template: &CircuitTemplate,
    params: &[f64],
    input: &Statevector,
    shift: (usize, usize, f64),
) -> Statevector {
    let mut state = input.clone();
    let amps = state.amplitudes_mut();
    let mut values = [0.0; 3];
    for (g, gate) in template.gates.iter().enumerate() {
        for (v, &c) in values.iter_mut().zip(&gate.slots) {
            *v = params[c];
        }
        if g == shift.0 {
            values[shift.1] += shift.2;
        }
        apply_bound(amps, gate.kind, &gate.qubits, &values[..gate.slots.len()]);
    }
    state
}

/// Exact `d<Z_qubit>/d theta_c` for every class `c` by the two-point
/// parameter-shift rule, summed over all slots that share a class.
pub fn expectation_gradient(
    template: &CircuitTemplate,
    params: &[f64],
    input: &Statevector,
    qubit: usize,
) -> Result<Vec<f64>> {
    template.check_call(params, input)?;
    if qubit >= template.n_qubits {
        return Err(Error::Usage(format!("qubit {qubit} outside the register")));
    }
    let shift = std::f64::consts::FRAC_PI_2;
    let mut grad = vec![0.0; template.n_params];
    for (g, s, class) in template.slot_classes() {
        let plus = evaluate_shifted(template, params, input, (g, s, shift));
        let minus = evaluate_shifted(template, params, input, (g, s, -shift));
        grad[class] +=
            0.5 * (expectation_z(plus.amplitudes(), qubit) - expectation_z(minus.amplitudes(), qubit));
    }
    Ok(grad)
}

/// The gauge-invariant Fubini-Study metric
/// `g_ij = Re[<d_i psi|d_j psi> - <d_i psi|psi><psi|d_j psi>]` of the output
/// state, with each `|d_i psi>` obtained by generator insertion.
pub fn fubini_study_metric(
    template: &CircuitTemplate,
    params: &[f64],
    input: &Statevector,
) -> Result<DMatrix<f64>> {
    template.check_call(params, input)?;
    let compiled = template.compile();
    let tangents = compiled.tangents(params, input);
    let n = template.n_params;
    Ok(DMatrix::from_row_slice(n, n, &tangents.metric()))
}
