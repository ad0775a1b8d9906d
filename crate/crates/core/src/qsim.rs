//! State-vector simulator of the quantum query model.
//!
//! The input register `P` is never simulated: every `U_t` acts as the identity
//! on it, so for a fixed input `x` only the `Q ∪ R` space evolves. Qubit
//! layout: `0..p` hold the pointer `i` (little-endian), qubit `p` is the answer
//! bit `b`, and the workspace `R` follows.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::fourier::ComplexPoly;
use crate::{Error, Result};

/// Tolerance for unitarity and norm checks.
pub const UNITARY_TOL: f64 = 1e-10;
/// Largest workspace size.
pub const MAX_WORKSPACE: usize = 16;
/// Largest input arity for exhaustive runs over all inputs.
pub const EXHAUSTIVE_MAX_ARITY: usize = 12;
/// Largest number of qubits a dense gate block may act on.
pub const MAX_DENSE_QUBITS: usize = 3;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Register sizes for input arity `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Registers {
    pub n: usize,
    pub pointer_bits: usize,
    pub workspace: usize,
}

impl Registers {
    pub fn new(n: usize, workspace: usize) -> Result<Self> {
        if n == 0 || n > 1 << 20 {
            return Err(Error::InvalidArity {
                n,
                reason: "query model needs 1 ≤ n ≤ 2^20".into(),
            });
        }
        if workspace > MAX_WORKSPACE {
            return Err(Error::LimitExceeded(format!(
                "workspace of {workspace} qubits exceeds {MAX_WORKSPACE}"
            )));
        }
        Ok(Registers {
            n,
            pointer_bits: n.next_power_of_two().trailing_zeros() as usize,
            workspace,
        })
    }

    /// Qubits in `Q` (pointer plus answer bit).
    pub fn q_bits(&self) -> usize {
        self.pointer_bits + 1
    }

    pub fn num_qubits(&self) -> usize {
        self.q_bits() + self.workspace
    }

    pub fn dim(&self) -> usize {
        1 << self.num_qubits()
    }

    pub fn answer_qubit(&self) -> usize {
        self.pointer_bits
    }

    pub fn pointer_qubits(&self) -> Vec<usize> {
        (0..self.pointer_bits).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: Vec<Complex64>,
}

impl StateVector {
    /// `|0…0⟩`.
    pub fn zero(dim: usize) -> Self {
        let mut amps = vec![ZERO; dim];
        amps[0] = ONE;
        StateVector { amps }
    }

    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        if !amps.len().is_power_of_two() {
            return Err(Error::DimensionMismatch(format!(
                "state dimension {} is not a power of two",
                amps.len()
            )));
        }
        Ok(StateVector { amps })
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Gate {
    H(usize),
    X(usize),
    Z(usize),
    Phase(usize, f64),
    Cnot {
        control: usize,
        target: usize,
    },
    Cz(usize, usize),
    /// Phase −1 on basis states where every listed qubit is 1.
    Mcz(Vec<usize>),
    Swap(usize, usize),
    /// Dense row-major `2^k × 2^k` block; `qubits[0]` is the low local bit.
    Unitary {
        qubits: Vec<usize>,
        matrix: Vec<Complex64>,
    },
    /// Basis permutation of the whole space: `|i⟩ ↦ |perm[i]⟩`.
    Permutation(Vec<usize>),
}

fn hadamard() -> Vec<Complex64> {
    let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
    vec![h, h, h, -h]
}

/// `M` with `M|0⟩ = (|0⟩ − |1⟩)/√2`.
pub fn minus_prep() -> Vec<Complex64> {
    let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
    vec![h, h, -h, h]
}

/// `M⁻¹ = M†`.
pub fn minus_unprep() -> Vec<Complex64> {
    let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
    vec![h, -h, h, h]
}

/// `max |(U†U − I)_{ij}|` for a row-major square matrix.
pub fn unitarity_deviation(matrix: &[Complex64], size: usize) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..size {
        for j in 0..size {
            let dot: Complex64 = (0..size)
                .map(|k| matrix[k * size + i].conj() * matrix[k * size + j])
                .sum();
            let target = if i == j { ONE } else { ZERO };
            worst = worst.max((dot - target).norm());
        }
    }
    worst
}

fn apply_dense(amps: &mut [Complex64], qubits: &[usize], matrix: &[Complex64]) {
    let k = qubits.len();
    let size = 1 << k;
    let mask: usize = qubits.iter().map(|q| 1 << q).sum();
    let offsets: Vec<usize> = (0..size)
        .map(|local| {
            qubits
                .iter()
                .enumerate()
                .filter(|(j, _)| local >> j & 1 == 1)
                .map(|(_, q)| 1 << q)
                .sum()
        })
        .collect();
    let mut buf = vec![ZERO; size];
    for base in 0..amps.len() {
        if base & mask != 0 {
            continue;
        }
        for (local, off) in offsets.iter().enumerate() {
            buf[local] = amps[base | off];
        }
        for (row, off) in offsets.iter().enumerate() {
            amps[base | off] = (0..size)
                .map(|col| matrix[row * size + col] * buf[col])
                .sum();
        }
    }
}

impl Gate {
    /// Qubits touched by the gate (empty for full-space permutations).
    pub fn qubits(&self) -> Vec<usize> {
        match self {
            Gate::H(q) | Gate::X(q) | Gate::Z(q) | Gate::Phase(q, _) => vec![*q],
            Gate::Cnot { control, target } => vec![*control, *target],
            Gate::Cz(a, b) | Gate::Swap(a, b) => vec![*a, *b],
            Gate::Mcz(qs) | Gate::Unitary { qubits: qs, .. } => qs.clone(),
            Gate::Permutation(_) => Vec::new(),
        }
    }

    fn validate(&self, num_qubits: usize) -> Result<()> {
        let qubits = self.qubits();
        if let Some(q) = qubits.iter().find(|&&q| q >= num_qubits) {
            return Err(Error::DimensionMismatch(format!(
                "gate {self:?} addresses qubit {q} of {num_qubits}"
            )));
        }
        let mut sorted = qubits.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != qubits.len() {
            return Err(Error::InvalidGate(format!("repeated qubit in {self:?}")));
        }
        match self {
            Gate::Mcz(qs) if qs.is_empty() => {
                Err(Error::InvalidGate("mcz needs at least one qubit".into()))
            }
            Gate::Phase(_, theta) if !theta.is_finite() => {
                Err(Error::InvalidGate("non-finite phase".into()))
            }
            Gate::Unitary { qubits, matrix } => {
                if qubits.is_empty() || qubits.len() > MAX_DENSE_QUBITS {
                    return Err(Error::InvalidGate(format!(
                        "dense blocks act on 1..={MAX_DENSE_QUBITS} qubits"
                    )));
                }
                let size = 1 << qubits.len();
                if matrix.len() != size * size {
                    return Err(Error::DimensionMismatch(format!(
                        "{} matrix entries for a {size}×{size} block",
                        matrix.len()
                    )));
                }
                let dev = unitarity_deviation(matrix, size);
                if dev.is_nan() || dev > UNITARY_TOL {
                    return Err(Error::NonUnitary(dev));
                }
                Ok(())
            }
            Gate::Permutation(perm) => {
                if perm.len() != 1 << num_qubits {
                    return Err(Error::DimensionMismatch(format!(
                        "permutation of length {} on a {}-dimensional space",
                        perm.len(),
                        1usize << num_qubits
                    )));
                }
                let mut seen = vec![false; perm.len()];
                for &p in perm {
                    if p >= perm.len() || std::mem::replace(&mut seen[p], true) {
                        return Err(Error::NonUnitary(1.0));
                    }
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn apply(&self, state: &mut StateVector) {
        let amps = &mut state.amps;
        match self {
            Gate::H(q) => apply_dense(amps, &[*q], &hadamard()),
            Gate::X(q) => {
                let bit = 1 << q;
                for i in (0..amps.len()).filter(|i| i & bit == 0) {
                    amps.swap(i, i | bit);
                }
            }
            Gate::Z(q) => Gate::Phase(*q, std::f64::consts::PI).apply(state),
            Gate::Phase(q, theta) => {
                let bit = 1 << q;
                let phase = Complex64::from_polar(1.0, *theta);
                for (i, a) in amps.iter_mut().enumerate() {
                    if i & bit != 0 {
                        *a *= phase;
                    }
                }
            }
            Gate::Cnot { control, target } => {
                let (c, t) = (1 << control, 1 << target);
                for i in (0..amps.len()).filter(|i| i & c != 0 && i & t == 0) {
                    amps.swap(i, i | t);
                }
            }
            Gate::Cz(a, b) => Gate::Mcz(vec![*a, *b]).apply(state),
            Gate::Mcz(qs) => {
                let mask: usize = qs.iter().map(|q| 1 << q).sum();
                for (i, a) in amps.iter_mut().enumerate() {
                    if i & mask == mask {
                        *a = -*a;
                    }
                }
            }
            Gate::Swap(a, b) => {
                let (a, b) = (1 << a, 1 << b);
                for i in (0..amps.len()).filter(|i| i & a != 0 && i & b == 0) {
                    amps.swap(i, i ^ a ^ b);
                }
            }
            Gate::Unitary { qubits, matrix } => apply_dense(amps, qubits, matrix),
            Gate::Permutation(perm) => {
                let mut out = vec![ZERO; amps.len()];
                for (i, &p) in perm.iter().enumerate() {
                    out[p] = amps[i];
                }
                *amps = out;
            }
        }
    }
}

/// The oracle gate: `|i, b⟩|c⟩ ↦ |i, b ⊕ x_{i+1}⟩|c⟩` for pointer values
/// `i < n`, identity for `i ≥ n`. `x` is an input index.
pub fn oracle_apply(state: &mut StateVector, regs: &Registers, x: usize) {
    let pointer_mask = (1 << regs.pointer_bits) - 1;
    let answer = 1 << regs.answer_qubit();
    for idx in 0..state.amps.len() {
        let i = idx & pointer_mask;
        if idx & answer == 0 && i < regs.n && x >> i & 1 == 1 {
            state.amps.swap(idx, idx | answer);
        }
    }
}

/// `U_T O U_{T−1} ⋯ U_1 O U_0`, stored as the layers `U_0 … U_T`.
#[derive(Debug, Clone, PartialEq)]
pub struct QueryAlgorithm {
    registers: Registers,
    layers: Vec<Vec<Gate>>,
}

impl QueryAlgorithm {
    pub fn new(registers: Registers, layers: Vec<Vec<Gate>>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::InvalidArgument("an algorithm needs U_0".into()));
        }
        for gate in layers.iter().flatten() {
            gate.validate(registers.num_qubits())?;
        }
        Ok(QueryAlgorithm { registers, layers })
    }

    pub fn registers(&self) -> &Registers {
        &self.registers
    }

    /// Number of oracle calls `T`.
    pub fn queries(&self) -> usize {
        self.layers.len() - 1
    }

    pub fn layers(&self) -> &[Vec<Gate>] {
        &self.layers
    }

    fn apply_layer(&self, t: usize, state: &mut StateVector) -> Result<()> {
        for gate in &self.layers[t] {
            gate.apply(state);
            let norm = state.norm();
            if (norm - 1.0).abs() > UNITARY_TOL {
                return Err(Error::NormDrift(norm));
            }
        }
        Ok(())
    }

    fn check_input(&self, x: usize) -> Result<()> {
        if self.registers.n < usize::BITS as usize && x >> self.registers.n != 0 {
            return Err(Error::DimensionMismatch(format!(
                "input index {x} has more than n={} bits",
                self.registers.n
            )));
        }
        Ok(())
    }

    /// States `φ_0(x), …, φ_T(x)`, where `φ_t` follows `U_t`.
    pub fn run_trace(&self, x: usize) -> Result<Vec<StateVector>> {
        self.check_input(x)?;
        let mut state = StateVector::zero(self.registers.dim());
        let mut trace = Vec::with_capacity(self.layers.len());
        for t in 0..self.layers.len() {
            if t > 0 {
                oracle_apply(&mut state, &self.registers, x);
            }
            self.apply_layer(t, &mut state)?;
            trace.push(state.clone());
        }
        Ok(trace)
    }

    /// Final state `φ_T(x)`.
    pub fn run(&self, x: usize) -> Result<StateVector> {
        Ok(self.run_trace(x)?.pop().expect("at least one layer"))
    }

    pub fn to_json(&self) -> CircuitJson {
        CircuitJson {
            n: self.registers.n,
            r: self.registers.workspace,
            queries: Some(self.queries()),
            gates: self
                .layers
                .iter()
                .enumerate()
                .flat_map(|(t, layer)| layer.iter().map(move |g| GateJson::from_gate(t, g)))
                .collect(),
        }
    }

    pub fn from_json(json: &CircuitJson) -> Result<Self> {
        let registers = Registers::new(json.n, json.r)?;
        let max_t = json.gates.iter().map(|g| g.t).max().unwrap_or(0);
        let queries = json.queries.unwrap_or(max_t);
        if max_t > queries {
            return Err(Error::InvalidArgument(format!(
                "gate at t={max_t} beyond the declared {queries} queries"
            )));
        }
        let mut layers = vec![Vec::new(); queries + 1];
        for g in &json.gates {
            layers[g.t].push(g.to_gate()?);
        }
        Self::new(registers, layers)
    }
}

/// Circuit file: `{n, r, gates: [{t, kind, qubits, params | matrix}]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircuitJson {
    pub n: usize,
    #[serde(default)]
    pub r: usize,
    /// `T`; defaults to the largest `t` among the gates.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub queries: Option<usize>,
    pub gates: Vec<GateJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateJson {
    pub t: usize,
    pub kind: String,
    #[serde(default)]
    pub qubits: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub params: Vec<f64>,
    /// Row-major entries as `[re, im]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<[f64; 2]>>>,
}

impl GateJson {
    fn from_gate(t: usize, gate: &Gate) -> Self {
        let mut json = GateJson {
            t,
            kind: String::new(),
            qubits: gate.qubits(),
            params: Vec::new(),
            matrix: None,
        };
        json.kind = match gate {
            Gate::H(_) => "h",
            Gate::X(_) => "x",
            Gate::Z(_) => "z",
            Gate::Phase(_, theta) => {
                json.params = vec![*theta];
                "phase"
            }
            Gate::Cnot { .. } => "cnot",
            Gate::Cz(..) => "cz",
            Gate::Mcz(_) => "mcz",
            Gate::Swap(..) => "swap",
            Gate::Unitary { qubits, matrix } => {
                let size = 1 << qubits.len();
                json.matrix = Some(
                    matrix
                        .chunks(size)
                        .map(|row| row.iter().map(|z| [z.re, z.im]).collect())
                        .collect(),
                );
                "unitary"
            }
            Gate::Permutation(perm) => {
                json.params = perm.iter().map(|&p| p as f64).collect();
                "permutation"
            }
        }
        .to_string();
        json
    }

    fn to_gate(&self) -> Result<Gate> {
        let arity = |k: usize| -> Result<()> {
            if self.qubits.len() != k {
                return Err(Error::InvalidGate(format!(
                    "`{}` takes {k} qubit(s), got {}",
                    self.kind,
                    self.qubits.len()
                )));
            }
            Ok(())
        };
        let q = &self.qubits;
        Ok(match self.kind.to_ascii_lowercase().as_str() {
            "h" => {
                arity(1)?;
                Gate::H(q[0])
            }
            "x" => {
                arity(1)?;
                Gate::X(q[0])
            }
            "z" => {
                arity(1)?;
                Gate::Z(q[0])
            }
            "phase" => {
                arity(1)?;
                let theta = *self
                    .params
                    .first()
                    .ok_or_else(|| Error::InvalidGate("phase needs params: [theta]".into()))?;
                Gate::Phase(q[0], theta)
            }
            "cnot" => {
                arity(2)?;
                Gate::Cnot {
                    control: q[0],
                    target: q[1],
                }
            }
            "cz" => {
                arity(2)?;
                Gate::Cz(q[0], q[1])
            }
            "mcz" => Gate::Mcz(q.clone()),
            "swap" => {
                arity(2)?;
                Gate::Swap(q[0], q[1])
            }
            "unitary" => {
                let rows = self
                    .matrix
                    .as_ref()
                    .ok_or_else(|| Error::InvalidGate("unitary needs a matrix".into()))?;
                Gate::Unitary {
                    qubits: q.clone(),
                    matrix: rows
                        .iter()
                        .flatten()
                        .map(|[re, im]| Complex64::new(*re, *im))
                        .collect(),
                }
            }
            "permutation" => Gate::Permutation(
                self.params
                    .iter()
                    .map(|&p| {
                        if p >= 0.0 && p.fract() == 0.0 {
                            Ok(p as usize)
                        } else {
                            Err(Error::InvalidGate(format!("bad permutation entry {p}")))
                        }
                    })
                    .collect::<Result<_>>()?,
            ),
            other => return Err(Error::InvalidGate(format!("unknown gate kind `{other}`"))),
        })
    }
}

/// Reads designated qubits as the output `y` (first listed qubit is the low
/// bit). Values outside `outcomes`, when given, count as abstaining.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Measurement {
    pub output_qubits: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outcomes: Option<Vec<u64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeDistribution {
    pub probabilities: BTreeMap<u64, f64>,
    pub abstain: f64,
}

impl Measurement {
    pub fn new(output_qubits: Vec<usize>) -> Self {
        Measurement {
            output_qubits,
            outcomes: None,
        }
    }

    /// Outcome of a basis state, `None` for abstention.
    pub fn outcome(&self, basis: usize) -> Option<u64> {
        let y = self
            .output_qubits
            .iter()
            .enumerate()
            .fold(0u64, |acc, (j, &q)| acc | ((basis >> q & 1) as u64) << j);
        match &self.outcomes {
            Some(valid) if !valid.contains(&y) => None,
            _ => Some(y),
        }
    }

    pub fn validate(&self, regs: &Registers) -> Result<()> {
        if let Some(q) = self.output_qubits.iter().find(|&&q| q >= regs.num_qubits()) {
            return Err(Error::DimensionMismatch(format!(
                "measurement reads qubit {q} of {}",
                regs.num_qubits()
            )));
        }
        Ok(())
    }

    pub fn distribution(&self, state: &StateVector) -> OutcomeDistribution {
        let mut probabilities = BTreeMap::new();
        let mut abstain = 0.0;
        for (basis, p) in state.probabilities().into_iter().enumerate() {
            match self.outcome(basis) {
                Some(y) => *probabilities.entry(y).or_insert(0.0) += p,
                None => abstain += p,
            }
        }
        OutcomeDistribution {
            probabilities,
            abstain,
        }
    }

    /// Squared-amplitude mass of the basis states reading `y`.
    pub fn probability(&self, state: &StateVector, y: u64) -> f64 {
        state
            .probabilities()
            .into_iter()
            .enumerate()
            .filter(|&(basis, _)| self.outcome(basis) == Some(y))
            .map(|(_, p)| p)
            .sum()
    }
}

/// Probability that `meas` observes `y` after running `alg` on input `x`.
pub fn acceptance_prob(alg: &QueryAlgorithm, meas: &Measurement, x: usize, y: u64) -> Result<f64> {
    meas.validate(alg.registers())?;
    Ok(meas.probability(&alg.run(x)?, y))
}

/// One-query algorithm recovering `z` from `e(z)`: Hadamards on the pointer
/// and `M` on the answer bit, one oracle call, then Hadamards and `M⁻¹`.
pub fn build_example1(n: usize) -> Result<(QueryAlgorithm, Measurement)> {
    if n < 2 || !n.is_power_of_two() {
        return Err(Error::InvalidArity {
            n,
            reason: "the one-query decoder needs n a power of two, n ≥ 2".into(),
        });
    }
    let regs = Registers::new(n, 0)?;
    let answer = regs.answer_qubit();
    let layer = |m: Vec<Complex64>| -> Vec<Gate> {
        let mut gates: Vec<Gate> = regs.pointer_qubits().into_iter().map(Gate::H).collect();
        gates.push(Gate::Unitary {
            qubits: vec![answer],
            matrix: m,
        });
        gates
    };
    let alg = QueryAlgorithm::new(regs, vec![layer(minus_prep()), layer(minus_unprep())])?;
    Ok((alg, Measurement::new(regs.pointer_qubits())))
}

/// Gates for `2|s⟩⟨s| − I` on the pointer, up to a global sign.
fn diffusion(regs: &Registers) -> Vec<Gate> {
    let ptr = regs.pointer_qubits();
    let mut gates: Vec<Gate> = ptr.iter().map(|&q| Gate::H(q)).collect();
    gates.extend(ptr.iter().map(|&q| Gate::X(q)));
    gates.push(Gate::Mcz(ptr.clone()));
    gates.extend(ptr.iter().map(|&q| Gate::X(q)));
    gates.extend(ptr.iter().map(|&q| Gate::H(q)));
    gates
}

/// Grover search over the pointer with `iterations` oracle calls; the
/// measurement reads the pointer.
pub fn build_grover(n: usize, iterations: usize) -> Result<(QueryAlgorithm, Measurement)> {
    if n < 2 {
        return Err(Error::InvalidArity {
            n,
            reason: "search needs n ≥ 2".into(),
        });
    }
    let regs = Registers::new(n, 0)?;
    let answer = regs.answer_qubit();
    let mut first: Vec<Gate> = regs.pointer_qubits().into_iter().map(Gate::H).collect();
    first.push(Gate::Unitary {
        qubits: vec![answer],
        matrix: minus_prep(),
    });
    let mut layers = vec![first];
    for t in 1..=iterations {
        let mut layer = diffusion(&regs);
        if t == iterations {
            layer.push(Gate::Unitary {
                qubits: vec![answer],
                matrix: minus_unprep(),
            });
        }
        layers.push(layer);
    }
    let alg = QueryAlgorithm::new(regs, layers)?;
    Ok((alg, Measurement::new(regs.pointer_qubits())))
}

fn check_exhaustive(n: usize) -> Result<()> {
    if n > EXHAUSTIVE_MAX_ARITY {
        return Err(Error::LimitExceeded(format!(
            "exhaustive simulation is limited to n ≤ {EXHAUSTIVE_MAX_ARITY}, got n={n}"
        )));
    }
    Ok(())
}

/// `φ_t(x)` for every input `x`, indexed by `x`.
pub fn states_at(alg: &QueryAlgorithm, t: usize) -> Result<Vec<StateVector>> {
    let n = alg.registers().n;
    check_exhaustive(n)?;
    if t > alg.queries() {
        return Err(Error::InvalidArgument(format!(
            "t={t} exceeds T={}",
            alg.queries()
        )));
    }
    (0..1usize << n)
        .into_par_iter()
        .map(|x| Ok(alg.run_trace(x)?.swap_remove(t)))
        .collect()
}

/// Amplitude polynomials `p_ψ(x)` after `t` queries, one per basis state `ψ`.
pub fn extract_amplitude_polys(
    alg: &QueryAlgorithm,
    t: usize,
    zero_tol: f64,
) -> Result<Vec<ComplexPoly>> {
    let n = alg.registers().n;
    let states = states_at(alg, t)?;
    (0..alg.registers().dim())
        .map(|psi| {
            let amps: Vec<Complex64> = states.iter().map(|s| s.amplitudes()[psi]).collect();
            ComplexPoly::interpolate(n, &amps, zero_tol)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfn::{bv_encoding, InputIndex};

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-12
    }

    #[test]
    fn registers_sizes() {
        let r = Registers::new(4, 0).unwrap();
        assert_eq!((r.pointer_bits, r.q_bits(), r.dim()), (2, 3, 8));
        let r = Registers::new(5, 1).unwrap();
        assert_eq!((r.pointer_bits, r.num_qubits()), (3, 5));
        assert_eq!(Registers::new(1, 0).unwrap().pointer_bits, 0);
        assert!(Registers::new(4, MAX_WORKSPACE + 1).is_err());
    }

    #[test]
    fn oracle_on_zero_input_is_identity() {
        let regs = Registers::new(4, 1).unwrap();
        let amps: Vec<Complex64> = (0..regs.dim())
            .map(|i| Complex64::new(i as f64, 0.5))
            .collect();
        let mut s = StateVector::from_amplitudes(amps.clone()).unwrap();
        oracle_apply(&mut s, &regs, 0);
        assert_eq!(s.amplitudes(), &amps[..]);
    }

    #[test]
    fn oracle_flips_answer_for_set_bit() {
        let regs = Registers::new(2, 0).unwrap();
        let x = InputIndex::new(2).from_bitstring("01").unwrap(); // x_1=0, x_2=1
                                                                  // |i=1, b=0⟩ is basis index 1
        let mut s = StateVector::zero(4);
        s.amps = vec![ZERO, ONE, ZERO, ZERO];
        oracle_apply(&mut s, &regs, x);
        assert_eq!(s.amplitudes()[1 | 2], ONE);
        // |i=0, b⟩ untouched
        let mut s = StateVector::zero(4);
        oracle_apply(&mut s, &regs, x);
        assert_eq!(s.amplitudes()[0], ONE);
    }

    #[test]
    fn oracle_is_involution_and_ignores_out_of_range_pointers() {
        let regs = Registers::new(3, 0).unwrap(); // pointer value 3 is out of range
        let amps: Vec<Complex64> = (0..regs.dim())
            .map(|i| Complex64::new(i as f64, -(i as f64)))
            .collect();
        for x in 0..8 {
            let mut s = StateVector::from_amplitudes(amps.clone()).unwrap();
            oracle_apply(&mut s, &regs, x);
            assert_eq!(s.amplitudes()[3], amps[3]);
            assert_eq!(s.amplitudes()[3 | 4], amps[3 | 4]);
            oracle_apply(&mut s, &regs, x);
            assert_eq!(s.amplitudes(), &amps[..]);
        }
    }

    #[test]
    fn phase_kickback() {
        // oracle: build the state explicitly, compare with the (−1)^{x_i} phases
        let regs = Registers::new(4, 0).unwrap();
        let x = 0b0110;
        let mut s = StateVector::zero(regs.dim());
        for q in regs.pointer_qubits() {
            Gate::H(q).apply(&mut s);
        }
        Gate::Unitary {
            qubits: vec![2],
            matrix: minus_prep(),
        }
        .apply(&mut s);
        oracle_apply(&mut s, &regs, x);
        let c = 0.5 * FRAC_1_SQRT_2;
        for i in 0..4usize {
            let sign = if x >> i & 1 == 1 { -1.0 } else { 1.0 };
            assert!(close(s.amplitudes()[i], Complex64::new(sign * c, 0.0)));
            assert!(close(s.amplitudes()[i | 4], Complex64::new(-sign * c, 0.0)));
        }
    }

    #[test]
    fn trivial_algorithm() {
        let regs = Registers::new(3, 1).unwrap();
        let alg = QueryAlgorithm::new(regs, vec![vec![]]).unwrap();
        let state = alg.run(5).unwrap();
        assert_eq!(state.amplitudes()[0], ONE);
        let meas = Measurement::new(vec![0, 1]);
        assert_eq!(acceptance_prob(&alg, &meas, 5, 0).unwrap(), 1.0);
        assert!(alg.run(8).is_err());
    }

    #[test]
    fn example1_decodes_every_z() {
        for n in [2usize, 4, 8, 16] {
            let (alg, meas) = build_example1(n).unwrap();
            assert_eq!(alg.queries(), 1);
            for z in 0..n as u64 {
                let x = bv_encoding(n, z);
                let state = alg.run(x).unwrap();
                // final state is |z, 0⟩
                assert!((state.amplitudes()[z as usize].norm() - 1.0).abs() < 1e-12);
                assert!((acceptance_prob(&alg, &meas, x, z).unwrap() - 1.0).abs() < 1e-12);
                if n > 2 {
                    assert!(acceptance_prob(&alg, &meas, x, z ^ 1).unwrap() < 1e-12);
                }
            }
        }
        assert!(build_example1(6).is_err());
    }

    #[test]
    fn example1_n4_specific_input() {
        let (alg, meas) = build_example1(4).unwrap();
        let x = InputIndex::new(4).from_bitstring("0101").unwrap();
        let dist = meas.distribution(&alg.run(x).unwrap());
        assert!((dist.probabilities[&1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn grover_one_iteration_n4_is_exact() {
        let (alg, meas) = build_grover(4, 1).unwrap();
        for marked in 0..4usize {
            let x = 1 << marked;
            let p = acceptance_prob(&alg, &meas, x, marked as u64).unwrap();
            assert!((p - 1.0).abs() < 1e-12);
            // answer bit restored to 0
            let state = alg.run(x).unwrap();
            assert!((state.amplitudes()[marked].norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn distribution_sums_to_one_with_abstention() {
        let (alg, _) = build_grover(8, 2).unwrap();
        let meas = Measurement {
            output_qubits: vec![0, 1, 2],
            outcomes: Some(vec![0, 1, 2, 3]),
        };
        for x in [0usize, 1, 0b1000_0000, 0b1010_0101] {
            let d = meas.distribution(&alg.run(x).unwrap());
            let total: f64 = d.probabilities.values().sum::<f64>() + d.abstain;
            assert!((total - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn rejects_bad_gates() {
        let regs = Registers::new(4, 0).unwrap();
        let bad = Gate::Unitary {
            qubits: vec![0],
            matrix: vec![ONE, ONE, ZERO, ONE],
        };
        assert!(matches!(
            QueryAlgorithm::new(regs, vec![vec![bad]]),
            Err(Error::NonUnitary(_))
        ));
        assert!(QueryAlgorithm::new(regs, vec![vec![Gate::H(3)]]).is_err());
        assert!(QueryAlgorithm::new(regs, vec![vec![Gate::Cz(1, 1)]]).is_err());
        assert!(QueryAlgorithm::new(regs, vec![vec![Gate::Permutation(vec![0; 8])]]).is_err());
        let four = Gate::Unitary {
            qubits: vec![0, 1, 2, 3],
            matrix: vec![ONE; 256],
        };
        assert!(QueryAlgorithm::new(Registers::new(8, 0).unwrap(), vec![vec![four]]).is_err());
    }

    #[test]
    fn named_gates_match_dense_blocks() {
        let regs = Registers::new(4, 0).unwrap();
        let base: Vec<Complex64> = (0..8)
            .map(|i| Complex64::new((i as f64 + 1.0).sqrt(), 0.3 * i as f64))
            .collect();
        let norm = base.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        let base: Vec<Complex64> = base.iter().map(|a| a / norm).collect();
        let cnot = vec![
            ONE, ZERO, ZERO, ZERO, //
            ZERO, ZERO, ZERO, ONE, //
            ZERO, ZERO, ONE, ZERO, //
            ZERO, ONE, ZERO, ZERO,
        ];
        let pairs = [
            (
                Gate::Cnot {
                    control: 0,
                    target: 2,
                },
                Gate::Unitary {
                    qubits: vec![0, 2],
                    matrix: cnot,
                },
            ),
            (
                Gate::Z(1),
                Gate::Unitary {
                    qubits: vec![1],
                    matrix: vec![ONE, ZERO, ZERO, -ONE],
                },
            ),
            (
                Gate::X(2),
                Gate::Unitary {
                    qubits: vec![2],
                    matrix: vec![ZERO, ONE, ONE, ZERO],
                },
            ),
            (
                Gate::Swap(0, 2),
                Gate::Permutation(
                    (0..8)
                        .map(|i: usize| (i & 2) | (i >> 2 & 1) | ((i & 1) << 2))
                        .collect(),
                ),
            ),
        ];
        for (named, dense) in pairs {
            QueryAlgorithm::new(regs, vec![vec![named.clone(), dense.clone()]]).unwrap();
            let mut a = StateVector::from_amplitudes(base.clone()).unwrap();
            let mut b = a.clone();
            named.apply(&mut a);
            dense.apply(&mut b);
            for (u, v) in a.amplitudes().iter().zip(b.amplitudes()) {
                assert!(close(*u, *v), "{named:?}");
            }
        }
    }

    #[test]
    fn circuit_json_round_trip() {
        let (alg, _) = build_grover(4, 2).unwrap();
        let text = serde_json::to_string(&alg.to_json()).unwrap();
        let back = QueryAlgorithm::from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back, alg);
        let (alg, _) = build_example1(8).unwrap();
        let back = QueryAlgorithm::from_json(&alg.to_json()).unwrap();
        assert_eq!(back, alg);
    }

    #[test]
    fn circuit_json_errors() {
        let bad = r#"{"n":4,"gates":[{"t":0,"kind":"teleport","qubits":[0]}]}"#;
        let json: CircuitJson = serde_json::from_str(bad).unwrap();
        assert!(matches!(
            QueryAlgorithm::from_json(&json),
            Err(Error::InvalidGate(_))
        ));
        let bad = r#"{"n":4,"queries":0,"gates":[{"t":1,"kind":"h","qubits":[0]}]}"#;
        let json: CircuitJson = serde_json::from_str(bad).unwrap();
        assert!(QueryAlgorithm::from_json(&json).is_err());
    }

    #[test]
    fn amplitude_polys_before_any_query_are_constant() {
        let (alg, _) = build_example1(4).unwrap();
        let polys = extract_amplitude_polys(&alg, 0, 1e-8).unwrap();
        assert!(polys.iter().all(|p| p.degree() == 0));
        let polys = extract_amplitude_polys(&alg, 1, 1e-8).unwrap();
        assert!(polys.iter().all(|p| p.degree() <= 1));
        assert!(polys.iter().any(|p| p.degree() == 1));
    }

    #[test]
    fn exhaustive_cap() {
        let (alg, _) = build_grover(13, 1).unwrap();
        assert!(matches!(states_at(&alg, 0), Err(Error::LimitExceeded(_))));
    }
}
