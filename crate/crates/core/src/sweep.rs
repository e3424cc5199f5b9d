//! Fused execution of a [`CircuitTemplate`] and a single forward sweep that
//! produces the output state together with every parameter-class tangent
//! `|d_c psi>`.
//!
//! Consecutive gates that share a class and commute with each other (rotations
//! about the same axis on distinct qubits, or any run of `RZZ`) are fused into
//! one step. Since each gate's generator commutes with the whole run, the
//! derivative contribution of the run is `(-i/2) * sum(generators) * psi`
//! evaluated after the run. A run of `RZZ` collapses to a single diagonal
//! phase.

use num_complex::Complex64;

use crate::ansatz::CircuitTemplate;
use crate::statevector::{
    apply_cnot, apply_cz, apply_h, apply_rx, apply_ry, apply_rz, inner, GateKind, Statevector,
};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Axis {
    X,
    Y,
    Z,
}

#[derive(Debug, Clone)]
enum Step {
    Fixed { kind: GateKind, a: usize, b: usize },
    Rotation { axis: Axis, qubits: Vec<usize>, class: usize },
    /// `diag[x]` is the eigenvalue of `sum Z_a Z_b` over the fused pairs.
    ZzPhase { pairs: Vec<(usize, usize)>, diag: Vec<f64>, class: usize },
}

#[derive(Debug, Clone)]
pub struct CompiledCircuit {
    n_qubits: usize,
    n_params: usize,
    steps: Vec<Step>,
}

impl CompiledCircuit {
    pub fn new(template: &CircuitTemplate) -> Self {
        let n_qubits = template.n_qubits();
        let mut steps: Vec<Step> = Vec::new();
        let push_rotation = |steps: &mut Vec<Step>, axis: Axis, q: usize, class: usize| {
            if let Some(Step::Rotation { axis: a, qubits, class: c }) = steps.last_mut() {
                if *a == axis && *c == class && !qubits.contains(&q) {
                    qubits.push(q);
                    return;
                }
            }
            steps.push(Step::Rotation { axis, qubits: vec![q], class });
        };
        for gate in template.gates() {
            let q = &gate.qubits;
            match gate.kind {
                GateKind::Rx => push_rotation(&mut steps, Axis::X, q[0], gate.slots[0]),
                GateKind::Ry => push_rotation(&mut steps, Axis::Y, q[0], gate.slots[0]),
                GateKind::Rz => push_rotation(&mut steps, Axis::Z, q[0], gate.slots[0]),
                GateKind::U3 => {
                    push_rotation(&mut steps, Axis::Z, q[0], gate.slots[0]);
                    push_rotation(&mut steps, Axis::Y, q[0], gate.slots[1]);
                    push_rotation(&mut steps, Axis::Z, q[0], gate.slots[2]);
                }
                GateKind::Rzz => {
                    let class = gate.slots[0];
                    match steps.last_mut() {
                        Some(Step::ZzPhase { pairs, class: c, .. }) if *c == class => {
                            pairs.push((q[0], q[1]))
                        }
                        _ => steps.push(Step::ZzPhase {
                            pairs: vec![(q[0], q[1])],
                            diag: Vec::new(),
                            class,
                        }),
                    }
                }
                GateKind::Cz | GateKind::Cnot => {
                    steps.push(Step::Fixed { kind: gate.kind, a: q[0], b: q[1] })
                }
                GateKind::H => steps.push(Step::Fixed { kind: gate.kind, a: q[0], b: q[0] }),
            }
        }
        let dim = 1usize << n_qubits;
        for step in &mut steps {
            if let Step::ZzPhase { pairs, diag, .. } = step {
                *diag = (0..dim)
                    .map(|x| {
                        pairs
                            .iter()
                            .map(|&(a, b)| if ((x >> a) ^ (x >> b)) & 1 == 0 { 1.0 } else { -1.0 })
                            .sum()
                    })
                    .collect();
            }
        }
        Self { n_qubits, n_params: template.n_params(), steps }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn n_params(&self) -> usize {
        self.n_params
    }

    /// Output state. Shapes are assumed to have been checked by the caller.
    pub fn run(&self, params: &[f64], input: &Statevector) -> Statevector {
        debug_assert_eq!(params.len(), self.n_params);
        let mut state = input.clone();
        let mut phase = Vec::new();
        for step in &self.steps {
            let prepared = Prepared::new(step, params, &mut phase);
            prepared.apply(step, state.amplitudes_mut(), &phase);
        }
        state
    }

    /// Output state and all class tangents in one pass.
    pub fn tangents(&self, params: &[f64], input: &Statevector) -> Tangents {
        debug_assert_eq!(params.len(), self.n_params);
        let dim = 1usize << self.n_qubits;
        let mut psi = input.amplitudes().to_vec();
        let mut tangents: Vec<Vec<Complex64>> = vec![Vec::new(); self.n_params];
        // classes whose tangent is nonzero so far, in first-touch order
        let mut active: Vec<usize> = Vec::new();
        let mut phase = Vec::new();
        for step in &self.steps {
            let prepared = Prepared::new(step, params, &mut phase);
            prepared.apply(step, &mut psi, &phase);
            for &c in &active {
                prepared.apply(step, &mut tangents[c], &phase);
            }
            let class = match step {
                Step::Fixed { .. } => continue,
                Step::Rotation { class, .. } | Step::ZzPhase { class, .. } => *class,
            };
            if tangents[class].is_empty() {
                tangents[class] = vec![ZERO; dim];
                active.push(class);
            }
            add_generator(step, &psi, &mut tangents[class]);
        }
        for t in tangents.iter_mut().filter(|t| t.is_empty()) {
            *t = vec![ZERO; dim];
        }
        Tangents { n_qubits: self.n_qubits, state: psi, tangents }
    }
}

/// Angle-dependent data for one step, computed once and reused for the state
/// and all tangents.
enum Prepared {
    None,
    Angle(f64),
}

impl Prepared {
    fn new(step: &Step, params: &[f64], phase: &mut Vec<Complex64>) -> Self {
        match step {
            Step::Fixed { .. } => Prepared::None,
            Step::Rotation { class, .. } => Prepared::Angle(params[*class]),
            Step::ZzPhase { diag, class, .. } => {
                let half = params[*class] / 2.0;
                phase.clear();
                phase.extend(diag.iter().map(|&h| Complex64::from_polar(1.0, -half * h)));
                Prepared::None
            }
        }
    }

    fn apply(&self, step: &Step, amps: &mut [Complex64], phase: &[Complex64]) {
        match (step, self) {
            (Step::Fixed { kind, a, b }, _) => match kind {
                GateKind::Cz => apply_cz(amps, *a, *b),
                GateKind::Cnot => apply_cnot(amps, *a, *b),
                GateKind::H => apply_h(amps, *a),
                _ => unreachable!("parameterized gate compiled as fixed"),
            },
            (Step::Rotation { axis, qubits, .. }, Prepared::Angle(theta)) => {
                for &q in qubits {
                    match axis {
                        Axis::X => apply_rx(amps, q, *theta),
                        Axis::Y => apply_ry(amps, q, *theta),
                        Axis::Z => apply_rz(amps, q, *theta),
                    }
                }
            }
            (Step::ZzPhase { .. }, _) => {
                for (a, p) in amps.iter_mut().zip(phase) {
                    *a *= p;
                }
            }
            (Step::Rotation { .. }, Prepared::None) => unreachable!(),
        }
    }
}

/// `out += (-i/2) * G * psi` for the step's summed generator `G`.
fn add_generator(step: &Step, psi: &[Complex64], out: &mut [Complex64]) {
    let minus_half_i = Complex64::new(0.0, -0.5);
    match step {
        Step::Fixed { .. } => {}
        Step::Rotation { axis, qubits, .. } => {
            for &q in qubits {
                let bit = 1usize << q;
                for (x, o) in out.iter_mut().enumerate() {
                    let v = match axis {
                        Axis::X => psi[x ^ bit],
                        // Y|0> = i|1>, Y|1> = -i|0>
                        Axis::Y => {
                            if x & bit == 0 {
                                Complex64::new(0.0, -1.0) * psi[x | bit]
                            } else {
                                Complex64::new(0.0, 1.0) * psi[x ^ bit]
                            }
                        }
                        Axis::Z => {
                            if x & bit == 0 {
                                psi[x]
                            } else {
                                -psi[x]
                            }
                        }
                    };
                    *o += minus_half_i * v;
                }
            }
        }
        Step::ZzPhase { diag, .. } => {
            for ((o, p), &h) in out.iter_mut().zip(psi).zip(diag) {
                *o += minus_half_i * h * p;
            }
        }
    }
}

/// Output state of a circuit and its derivatives with respect to each
/// parameter class.
#[derive(Debug, Clone)]
pub struct Tangents {
    n_qubits: usize,
    state: Vec<Complex64>,
    tangents: Vec<Vec<Complex64>>,
}

impl Tangents {
    pub fn state(&self) -> &[Complex64] {
        &self.state
    }

    pub fn tangent(&self, class: usize) -> &[Complex64] {
        &self.tangents[class]
    }

    pub fn expectations_z(&self) -> Vec<f64> {
        crate::statevector::expectations_z(&self.state, self.n_qubits)
    }

    /// Row-major `n_params x n_params` Fubini-Study metric.
    pub fn metric(&self) -> Vec<f64> {
        let n = self.tangents.len();
        let overlaps: Vec<Complex64> = self.tangents.iter().map(|t| inner(&self.state, t)).collect();
        let mut g = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let v = inner(&self.tangents[i], &self.tangents[j]).re
                    - (overlaps[i].conj() * overlaps[j]).re;
                g[i * n + j] = v;
                g[j * n + i] = v;
            }
        }
        g
    }

    /// Row-major `n_qubits x n_params` Jacobian of `<Z_q>`:
    /// `d<Z_q>/d theta_c = 2 Re <psi| Z_q |d_c psi>`.
    pub fn z_jacobian(&self) -> Vec<f64> {
        let n = self.tangents.len();
        let nq = self.n_qubits;
        let mut jac = vec![0.0; nq * n];
        for (c, t) in self.tangents.iter().enumerate() {
            let mut acc = vec![0.0; nq];
            for (x, (p, d)) in self.state.iter().zip(t).enumerate() {
                let w = 2.0 * (p.conj() * d).re;
                for (q, a) in acc.iter_mut().enumerate() {
                    if (x >> q) & 1 == 0 {
                        *a += w;
                    } else {
                        *a -= w;
                    }
                }
            }
            for q in 0..nq {
                jac[q * n + c] = acc[q];
            }
        }
        jac
    }
}
