//! Exact state-vector simulation.
//!
//! Amplitude index bit `n-1-k` holds the qubit at position `k` of the state's
//! qubit order, so an index written in binary (MSB first) reads as the
//! bitstring in qubit order. The order is the circuit's measurement order
//! followed by any unmeasured qubits.

use std::collections::HashMap;
use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64 as C64;

use crate::circuit::{Circuit, Gate, Qubit, SingleKind};
use crate::error::{Error, Result};
use crate::rng::SeededRng;
use crate::samples::{parse_bitstring, SampleSet};

pub const DEFAULT_MAX_QUBITS: usize = 26;

pub type Matrix2 = [[C64; 2]; 2];
pub type Matrix4 = [[C64; 4]; 4];

const fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// √X, √Y and √W with W = (X+Y)/√2.
pub fn single_matrix(kind: SingleKind) -> Matrix2 {
    let s = FRAC_1_SQRT_2;
    match kind {
        SingleKind::SX => [[c(s, 0.0), c(0.0, -s)], [c(0.0, -s), c(s, 0.0)]],
        SingleKind::SY => [[c(s, 0.0), c(-s, 0.0)], [c(s, 0.0), c(s, 0.0)]],
        SingleKind::SW => {
            // e^{iπ/4} / √2 = (1 + i) / 2
            let w = c(0.5, 0.5);
            [[c(s, 0.0), -w], [w.conj(), c(s, 0.0)]]
        }
    }
}

/// fSim(θ, φ) in the basis |00>, |01>, |10>, |11>.
pub fn fsim_matrix(theta: f64, phi: f64) -> Matrix4 {
    let (s, co) = theta.sin_cos();
    let z = c(0.0, 0.0);
    [
        [c(1.0, 0.0), z, z, z],
        [z, c(co, 0.0), c(0.0, -s), z],
        [z, c(0.0, -s), c(co, 0.0), z],
        [z, z, z, C64::from_polar(1.0, -phi)],
    ]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pauli {
    X,
    Y,
    Z,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    qubit_order: Vec<Qubit>,
    position: HashMap<Qubit, usize>,
    amps: Vec<C64>,
}

impl StateVector {
    /// |0...0> over `qubit_order`.
    pub fn zero(qubit_order: Vec<Qubit>, max_qubits: usize) -> Result<Self> {
        let n = qubit_order.len();
        if n > max_qubits {
            return Err(Error::TooManyQubits { n, max: max_qubits });
        }
        let mut amps = vec![C64::new(0.0, 0.0); 1usize << n];
        amps[0] = C64::new(1.0, 0.0);
        let position = qubit_order.iter().enumerate().map(|(i, &q)| (q, i)).collect();
        Ok(Self {
            qubit_order,
            position,
            amps,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.qubit_order.len()
    }

    pub fn qubit_order(&self) -> &[Qubit] {
        &self.qubit_order
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    fn bit(&self, q: Qubit) -> usize {
        self.n_qubits() - 1 - self.position[&q]
    }

    pub fn apply_single(&mut self, q: Qubit, m: &Matrix2) {
        let stride = 1usize << self.bit(q);
        for base in (0..self.amps.len()).step_by(2 * stride) {
            for i in base..base + stride {
                let (a0, a1) = (self.amps[i], self.amps[i + stride]);
                self.amps[i] = m[0][0] * a0 + m[0][1] * a1;
                self.amps[i + stride] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
    }

    pub fn apply_fsim(&mut self, q0: Qubit, q1: Qubit, theta: f64, phi: f64) {
        let (b0, b1) = (self.bit(q0), self.bit(q1));
        let (m0, m1) = (1usize << b0, 1usize << b1);
        let (s, co) = theta.sin_cos();
        let mis = C64::new(0.0, -s);
        let phase = C64::from_polar(1.0, -phi);
        for i in 0..self.amps.len() {
            if i & (m0 | m1) != 0 {
                continue;
            }
            // |q0 q1> = |01> is i|m1, |10> is i|m0
            let (i01, i10, i11) = (i | m1, i | m0, i | m0 | m1);
            let (a01, a10) = (self.amps[i01], self.amps[i10]);
            self.amps[i01] = a01 * co + mis * a10;
            self.amps[i10] = mis * a01 + a10 * co;
            self.amps[i11] *= phase;
        }
    }

    pub fn apply_pauli(&mut self, q: Qubit, p: Pauli) {
        let stride = 1usize << self.bit(q);
        let i = C64::new(0.0, 1.0);
        for base in (0..self.amps.len()).step_by(2 * stride) {
            for k in base..base + stride {
                let (a0, a1) = (self.amps[k], self.amps[k + stride]);
                let (n0, n1) = match p {
                    Pauli::X => (a1, a0),
                    Pauli::Y => (-i * a1, i * a0),
                    Pauli::Z => (a0, -a1),
                };
                self.amps[k] = n0;
                self.amps[k + stride] = n1;
            }
        }
    }

    /// Applies one gate; measurement gates are no-ops here.
    pub fn apply_gate(&mut self, gate: &Gate) {
        match gate {
            Gate::Single { kind, qubit } => self.apply_single(*qubit, &single_matrix(*kind)),
            Gate::Fsim { q0, q1, theta, phi } => self.apply_fsim(*q0, *q1, *theta, *phi),
            Gate::Meas(_) => {}
        }
    }

    /// Probabilities over the first `k` qubits of the order, marginalizing
    /// the rest. Index convention matches [`SampleSet`].
    pub fn leading_marginal(&self, k: usize) -> Vec<f64> {
        let rest = self.n_qubits() - k;
        let block = 1usize << rest;
        self.amps
            .chunks(block)
            .map(|ch| ch.iter().map(|a| a.norm_sqr()).sum())
            .collect()
    }
}

/// Simulates `circuit` from |0...0> with the default qubit cap.
pub fn simulate(circuit: &Circuit) -> Result<StateVector> {
    simulate_with_limit(circuit, DEFAULT_MAX_QUBITS)
}

pub fn simulate_with_limit(circuit: &Circuit, max_qubits: usize) -> Result<StateVector> {
    let mut state = StateVector::zero(circuit.bit_order(), max_qubits)?;
    for gate in circuit.gates() {
        state.apply_gate(gate);
    }
    Ok(state)
}

/// Output distribution over the measured qubits, indexed like [`SampleSet`].
pub fn output_probabilities(circuit: &Circuit) -> Result<Vec<f64>> {
    let state = simulate(circuit)?;
    Ok(state.leading_marginal(circuit.measured().len()))
}

/// Amplitude of `bitstring` (over [`Circuit::bit_order`]).
pub fn amplitude(circuit: &Circuit, bitstring: &str) -> Result<C64> {
    let n = circuit.n_qubits();
    let idx = parse_bitstring(bitstring, n)?;
    let state = simulate(circuit)?;
    Ok(state.amps[idx as usize])
}

/// Inverse-CDF sampler over a finite distribution.
#[derive(Clone, Debug)]
pub struct DiscreteSampler {
    cdf: Vec<f64>,
}

impl DiscreteSampler {
    pub fn new(probs: &[f64]) -> Self {
        let mut acc = 0.0;
        let cdf = probs
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        Self { cdf }
    }

    pub fn draw(&self, rng: &mut SeededRng) -> u64 {
        let total = *self.cdf.last().unwrap_or(&0.0);
        let u = rng.next_f64() * total;
        let idx = self.cdf.partition_point(|&c| c <= u);
        idx.min(self.cdf.len() - 1) as u64
    }
}

/// `shots` i.i.d. draws from the ideal output distribution. Shot `k` uses
/// substream `k` of `seed`.
pub fn sample(circuit: &Circuit, shots: usize, seed: u64) -> Result<SampleSet> {
    if shots < 1 {
        return Err(Error::Domain("shots must be at least 1".into()));
    }
    let probs = output_probabilities(circuit)?;
    let sampler = DiscreteSampler::new(&probs);
    let bits = (0..shots)
        .map(|shot| sampler.draw(&mut SeededRng::substream(seed, shot as u64)))
        .collect();
    SampleSet::new(circuit.measured(), bits)
}

/// Kolmogorov-Smirnov distance between the empirical distribution of
/// `D * p` (over all outcomes) and Exp(1).
pub fn porter_thomas_ks(probs: &[f64]) -> f64 {
    let d = probs.len() as f64;
    let mut scaled: Vec<f64> = probs.iter().map(|p| p * d).collect();
    scaled.sort_by(f64::total_cmp);
    let n = scaled.len() as f64;
    scaled
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let model = 1.0 - (-x).exp();
            let lo = i as f64 / n;
            let hi = (i + 1) as f64 / n;
            (model - lo).abs().max((hi - model).abs())
        })
        .fold(0.0, f64::max)
}
