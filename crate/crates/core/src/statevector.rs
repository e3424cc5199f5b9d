//! Dense statevector simulation.
//!
//! Amplitudes are indexed by computational basis state with qubit 0 as the
//! least-significant bit, so basis index `0b10` is `|q1=1, q0=0>`.
//!
//! Rotation conventions are the usual half-angle ones:
//! `RX(t) = exp(-i t X / 2)`, `RY(t) = exp(-i t Y / 2)`, `RZ(t) = exp(-i t Z / 2)`,
//! `RZZ(t) = exp(-i t Z(x)Z / 2)` and `U3(a, b, c) = RZ(c) RY(b) RZ(a)`.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest register the simulator accepts.
pub const MAX_QUBITS: usize = 24;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GateKind {
    Rx,
    Ry,
    Rz,
    Rzz,
    Cz,
    Cnot,
    H,
    U3,
}

impl GateKind {
    pub fn arity(self) -> usize {
        match self {
            GateKind::Rzz | GateKind::Cz | GateKind::Cnot => 2,
            _ => 1,
        }
    }

    pub fn n_params(self) -> usize {
        match self {
            GateKind::Rx | GateKind::Ry | GateKind::Rz | GateKind::Rzz => 1,
            GateKind::U3 => 3,
            GateKind::Cz | GateKind::Cnot | GateKind::H => 0,
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            GateKind::Rx => "RX",
            GateKind::Ry => "RY",
            GateKind::Rz => "RZ",
            GateKind::Rzz => "RZZ",
            GateKind::Cz => "CZ",
            GateKind::Cnot => "CNOT",
            GateKind::H => "H",
            GateKind::U3 => "U3",
        };
        f.write_str(name)
    }
}

/// A gate placement. `slots` index into the parameter vector handed to
/// [`apply_gate`]; for two-qubit gates `qubits[0]` is the control of a CNOT.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gate {
    pub kind: GateKind,
    pub qubits: Vec<usize>,
    pub slots: Vec<usize>,
}

impl Gate {
    pub fn new(kind: GateKind, qubits: Vec<usize>, slots: Vec<usize>) -> Result<Self> {
        if qubits.len() != kind.arity() {
            return Err(Error::Usage(format!(
                "{kind} acts on {} qubit(s), got {}",
                kind.arity(),
                qubits.len()
            )));
        }
        if qubits.len() == 2 && qubits[0] == qubits[1] {
            return Err(Error::Usage(format!("{kind} needs distinct qubits, got {qubits:?}")));
        }
        if slots.len() != kind.n_params() {
            return Err(Error::Usage(format!(
                "{kind} takes {} parameter(s), got {}",
                kind.n_params(),
                slots.len()
            )));
        }
        Ok(Self { kind, qubits, slots })
    }

    pub fn rx(q: usize, slot: usize) -> Self {
        Self { kind: GateKind::Rx, qubits: vec![q], slots: vec![slot] }
    }

    pub fn ry(q: usize, slot: usize) -> Self {
        Self { kind: GateKind::Ry, qubits: vec![q], slots: vec![slot] }
    }

    pub fn rz(q: usize, slot: usize) -> Self {
        Self { kind: GateKind::Rz, qubits: vec![q], slots: vec![slot] }
    }

    pub fn rzz(a: usize, b: usize, slot: usize) -> Self {
        Self { kind: GateKind::Rzz, qubits: vec![a, b], slots: vec![slot] }
    }

    pub fn u3(q: usize, slots: [usize; 3]) -> Self {
        Self { kind: GateKind::U3, qubits: vec![q], slots: slots.to_vec() }
    }

    pub fn cz(a: usize, b: usize) -> Self {
        Self { kind: GateKind::Cz, qubits: vec![a, b], slots: Vec::new() }
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        Self { kind: GateKind::Cnot, qubits: vec![control, target], slots: Vec::new() }
    }

    pub fn h(q: usize) -> Self {
        Self { kind: GateKind::H, qubits: vec![q], slots: Vec::new() }
    }

    fn check_qubits(&self, n_qubits: usize) -> Result<()> {
        if let Some(&q) = self.qubits.iter().find(|&&q| q >= n_qubits) {
            return Err(Error::Usage(format!(
                "{} on qubit {q} but the register has {n_qubits} qubit(s)",
                self.kind
            )));
        }
        if self.qubits.len() == 2 && self.qubits[0] == self.qubits[1] {
            return Err(Error::Usage(format!("{} needs distinct qubits", self.kind)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl Statevector {
    /// `|0...0>` on `n_qubits` qubits.
    pub fn zero_state(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(Error::Config(format!(
                "register size must be in 1..={MAX_QUBITS}, got {n_qubits}"
            )));
        }
        let mut amps = vec![ZERO; 1 << n_qubits];
        amps[0] = ONE;
        Ok(Self { n_qubits, amps })
    }

    /// Wraps raw amplitudes. The length must be a power of two; no
    /// normalization is applied.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::Usage(format!("amplitude count {len} is not a power of two >= 2")));
        }
        let n_qubits = len.trailing_zeros() as usize;
        if n_qubits > MAX_QUBITS {
            return Err(Error::Config(format!("{n_qubits} qubits exceeds the cap of {MAX_QUBITS}")));
        }
        Ok(Self { n_qubits, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Statevector) -> Complex64 {
        inner(&self.amps, &other.amps)
    }

    pub fn apply(&mut self, gate: &Gate, params: &[f64]) -> Result<()> {
        apply_gate(self, gate, params)
    }

    /// `<psi| Z_qubit |psi>`.
    pub fn expectation_z(&self, qubit: usize) -> Result<f64> {
        if qubit >= self.n_qubits {
            return Err(Error::Usage(format!(
                "qubit {qubit} out of range for {} qubit(s)",
                self.n_qubits
            )));
        }
        Ok(expectation_z(&self.amps, qubit))
    }

    /// `<Z_i>` for every qubit, in qubit order.
    pub fn expectations_z(&self) -> Vec<f64> {
        expectations_z(&self.amps, self.n_qubits)
    }

    /// The state `P|psi>` where `P` moves qubit `i` to qubit `perm[i]`.
    pub fn permute_qubits(&self, perm: &[usize]) -> Result<Statevector> {
        check_permutation(perm, self.n_qubits)?;
        let mut out = vec![ZERO; self.amps.len()];
        for (x, &a) in self.amps.iter().enumerate() {
            let mut y = 0usize;
            for (i, &p) in perm.iter().enumerate() {
                y |= ((x >> i) & 1) << p;
            }
            out[y] = a;
        }
        Ok(Statevector { n_qubits: self.n_qubits, amps: out })
    }
}

pub(crate) fn check_permutation(perm: &[usize], n: usize) -> Result<()> {
    if perm.len() != n {
        return Err(Error::Usage(format!("permutation has {} entries, expected {n}", perm.len())));
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || std::mem::replace(&mut seen[p], true) {
            return Err(Error::Usage(format!("{perm:?} is not a permutation of 0..{n}")));
        }
    }
    Ok(())
}

/// Applies `gate` in place, reading rotation angles from `params[gate.slots[..]]`.
pub fn apply_gate(state: &mut Statevector, gate: &Gate, params: &[f64]) -> Result<()> {
    gate.check_qubits(state.n_qubits)?;
    if gate.slots.len() != gate.kind.n_params() {
        return Err(Error::Usage(format!(
            "{} takes {} parameter(s), gate carries {}",
            gate.kind,
            gate.kind.n_params(),
            gate.slots.len()
        )));
    }
    let mut values = [0.0; 3];
    for (v, &slot) in values.iter_mut().zip(&gate.slots) {
        *v = *params.get(slot).ok_or_else(|| {
            Error::Usage(format!(
                "{} reads parameter {slot} but only {} supplied",
                gate.kind,
                params.len()
            ))
        })?;
    }
    apply_bound(&mut state.amps, gate.kind, &gate.qubits, &values);
    Ok(())
}

/// Applies a gate whose angles are already resolved. No range checks.
pub(crate) fn apply_bound(amps: &mut [Complex64], kind: GateKind, qubits: &[usize], values: &[f64]) {
    match kind {
        GateKind::Rx => apply_rx(amps, qubits[0], values[0]),
        GateKind::Ry => apply_ry(amps, qubits[0], values[0]),
        GateKind::Rz => apply_rz(amps, qubits[0], values[0]),
        GateKind::Rzz => apply_rzz(amps, qubits[0], qubits[1], values[0]),
        GateKind::Cz => apply_cz(amps, qubits[0], qubits[1]),
        GateKind::Cnot => apply_cnot(amps, qubits[0], qubits[1]),
        GateKind::H => apply_h(amps, qubits[0]),
        GateKind::U3 => {
            apply_rz(amps, qubits[0], values[0]);
            apply_ry(amps, qubits[0], values[1]);
            apply_rz(amps, qubits[0], values[2]);
        }
    }
}

/// Visits every amplitude pair `(i, i | 1<<q)` with bit `q` of `i` clear.
#[inline]
fn for_each_pair(amps: &mut [Complex64], q: usize, mut f: impl FnMut(&mut Complex64, &mut Complex64)) {
    let step = 1usize << q;
    for chunk in amps.chunks_exact_mut(step << 1) {
        let (lo, hi) = chunk.split_at_mut(step);
        for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
            f(a, b);
        }
    }
}

#[cfg(test)]
pub(crate) fn apply_1q(amps: &mut [Complex64], q: usize, m: [[Complex64; 2]; 2]) {
    for_each_pair(amps, q, |a, b| {
        let (x, y) = (*a, *b);
        *a = m[0][0] * x + m[0][1] * y;
        *b = m[1][0] * x + m[1][1] * y;
    });
}

pub(crate) fn apply_rx(amps: &mut [Complex64], q: usize, theta: f64) {
    let (s, c) = (theta / 2.0).sin_cos();
    for_each_pair(amps, q, |a, b| {
        let (x, y) = (*a, *b);
        // c*x - i s*y
        *a = Complex64::new(c * x.re + s * y.im, c * x.im - s * y.re);
        *b = Complex64::new(c * y.re + s * x.im, c * y.im - s * x.re);
    });
}

pub(crate) fn apply_ry(amps: &mut [Complex64], q: usize, theta: f64) {
    let (s, c) = (theta / 2.0).sin_cos();
    for_each_pair(amps, q, |a, b| {
        let (x, y) = (*a, *b);
        *a = x * c - y * s;
        *b = x * s + y * c;
    });
}

pub(crate) fn apply_rz(amps: &mut [Complex64], q: usize, theta: f64) {
    let (s, c) = (theta / 2.0).sin_cos();
    let lo = Complex64::new(c, -s);
    let hi = Complex64::new(c, s);
    for_each_pair(amps, q, |a, b| {
        *a *= lo;
        *b *= hi;
    });
}

pub(crate) fn apply_rzz(amps: &mut [Complex64], qa: usize, qb: usize, theta: f64) {
    let (s, c) = (theta / 2.0).sin_cos();
    let same = Complex64::new(c, -s);
    let diff = Complex64::new(c, s);
    for (x, a) in amps.iter_mut().enumerate() {
        let parity = ((x >> qa) ^ (x >> qb)) & 1;
        *a *= if parity == 0 { same } else { diff };
    }
}

pub(crate) fn apply_cz(amps: &mut [Complex64], qa: usize, qb: usize) {
    let mask = (1usize << qa) | (1usize << qb);
    for (x, a) in amps.iter_mut().enumerate() {
        if x & mask == mask {
            *a = -*a;
        }
    }
}

pub(crate) fn apply_cnot(amps: &mut [Complex64], control: usize, target: usize) {
    let cbit = 1usize << control;
    let tbit = 1usize << target;
    for x in 0..amps.len() {
        if x & cbit != 0 && x & tbit == 0 {
            amps.swap(x, x | tbit);
        }
    }
}

pub(crate) fn apply_h(amps: &mut [Complex64], q: usize) {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    for_each_pair(amps, q, |a, b| {
        let (x, y) = (*a, *b);
        *a = (x + y) * r;
        *b = (x - y) * r;
    });
}

pub(crate) fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).fold(ZERO, |acc, (x, y)| acc + x.conj() * y)
}

pub(crate) fn expectation_z(amps: &[Complex64], qubit: usize) -> f64 {
    let bit = 1usize << qubit;
    amps.iter()
        .enumerate()
        .map(|(x, a)| if x & bit == 0 { a.norm_sqr() } else { -a.norm_sqr() })
        .sum()
}

pub(crate) fn expectations_z(amps: &[Complex64], n_qubits: usize) -> Vec<f64> {
    let mut out = vec![0.0; n_qubits];
    for (x, a) in amps.iter().enumerate() {
        let p = a.norm_sqr();
        for (q, e) in out.iter_mut().enumerate() {
            if (x >> q) & 1 == 0 {
                *e += p;
            } else {
                *e -= p;
            }
        }
    }
    out
}
