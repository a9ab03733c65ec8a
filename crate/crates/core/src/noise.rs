//! Discrete (digital) error model.
//!
//! Every single-qubit gate, fSim gate and readout carries an independent
//! error probability from the calibration record (`e1`, `e2`, `e3`). The
//! forecast fidelity is the probability that none of them fires. The same
//! rates drive a stochastic Pauli-trajectory sampler that stands in for the
//! physical device.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::circuit::{gate_census, pair_key, Circuit, GateCensus, Gate, Qubit};
use crate::error::{Error, Result};
use crate::hwmodel::HardwareModel;
use crate::rng::SeededRng;
use crate::samples::SampleSet;
use crate::statevec::{output_probabilities, DiscreteSampler, Pauli, StateVector, DEFAULT_MAX_QUBITS};

/// Logical qubit label -> physical qubit id.
pub type QubitMap = BTreeMap<Qubit, u32>;

/// Maps each register qubit to itself (circuits already on physical labels).
pub fn identity_map(circuit: &Circuit) -> QubitMap {
    circuit.qubits().iter().map(|&q| (q, q)).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FidelityForecast {
    pub f_est: f64,
    pub single_qubit: f64,
    pub two_qubit: f64,
    pub readout: f64,
    pub census: GateCensus,
}

fn physical(map: &QubitMap, q: Qubit) -> Result<u32> {
    map.get(&q)
        .copied()
        .ok_or_else(|| Error::Mapping(format!("logical qubit Q{q} is unmapped")))
}

/// `e1`, `e3` of the working physical qubit behind logical `q`.
fn qubit_errors(model: &HardwareModel, map: &QubitMap, q: Qubit) -> Result<(f64, f64)> {
    let p = physical(map, q)?;
    let rec = model
        .qubit(p)
        .ok_or_else(|| Error::Mapping(format!("physical qubit {p} does not exist")))?;
    if !rec.working {
        return Err(Error::Mapping(format!(
            "Q{q} maps to non-working physical qubit {p}"
        )));
    }
    Ok((rec.e1.unwrap_or(0.0), rec.e3.unwrap_or(0.0)))
}

fn pair_error(model: &HardwareModel, map: &QubitMap, a: Qubit, b: Qubit) -> Result<f64> {
    let (pa, pb) = (physical(map, a)?, physical(map, b)?);
    match model.coupler_between(pa, pb) {
        Some(c) if c.working => Ok(c.e2.unwrap_or(0.0)),
        Some(_) => Err(Error::Mapping(format!(
            "pair (Q{a}, Q{b}) maps to non-working coupler ({pa}, {pb})"
        ))),
        None => Err(Error::Mapping(format!(
            "pair (Q{a}, Q{b}) maps to uncoupled qubits ({pa}, {pb})"
        ))),
    }
}

/// Product of per-element success probabilities over the executed gates and
/// measured qubits.
pub fn forecast_fidelity(
    circuit: &Circuit,
    model: &HardwareModel,
    map: &QubitMap,
) -> Result<FidelityForecast> {
    let census = gate_census(circuit);
    let mut single_qubit = 1.0;
    for (&q, &n) in &census.sq_per_qubit {
        let (e1, _) = qubit_errors(model, map, q)?;
        single_qubit *= (1.0 - e1).powi(n as i32);
    }
    let mut two_qubit = 1.0;
    for (&(a, b), &n) in &census.tq_per_pair {
        two_qubit *= (1.0 - pair_error(model, map, a, b)?).powi(n as i32);
    }
    let mut readout = 1.0;
    for &q in &census.measured {
        let (_, e3) = qubit_errors(model, map, q)?;
        readout *= 1.0 - e3;
    }
    Ok(FidelityForecast {
        f_est: single_qubit * two_qubit * readout,
        single_qubit,
        two_qubit,
        readout,
        census,
    })
}

fn check_fidelity(f: f64) -> Result<()> {
    if (0.0..=1.0).contains(&f) {
        Ok(())
    } else {
        Err(Error::Domain(format!("fidelity {f} outside [0, 1]")))
    }
}

fn check_shots(shots: usize) -> Result<()> {
    if shots < 1 {
        Err(Error::Domain("shots must be at least 1".into()))
    } else {
        Ok(())
    }
}

/// White-noise model: each shot is ideal with probability `fidelity`,
/// otherwise uniformly random.
pub fn sample_white_noise(
    circuit: &Circuit,
    fidelity: f64,
    shots: usize,
    seed: u64,
) -> Result<SampleSet> {
    check_fidelity(fidelity)?;
    check_shots(shots)?;
    let probs = output_probabilities(circuit)?;
    let sampler = DiscreteSampler::new(&probs);
    let dim = probs.len() as u64;
    let bits = (0..shots)
        .map(|shot| {
            let mut rng = SeededRng::substream(seed, shot as u64);
            if rng.chance(fidelity) {
                sampler.draw(&mut rng)
            } else {
                rng.below(dim)
            }
        })
        .collect();
    SampleSet::new(circuit.measured(), bits)
}

/// Counters recorded while sampling trajectories.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct TrajectoryStats {
    pub shots: usize,
    /// Shots in which no gate error was injected.
    pub gate_error_free: usize,
    /// Shots with neither a gate error nor a readout flip.
    pub error_free: usize,
}

#[derive(Clone, Copy, Debug)]
enum ErrorSite {
    One(Qubit),
    Two(Qubit, Qubit),
}

struct NoisyGate<'a> {
    gate: &'a Gate,
    error: f64,
    site: ErrorSite,
}

const PAULIS: [Option<Pauli>; 4] = [None, Some(Pauli::X), Some(Pauli::Y), Some(Pauli::Z)];

/// Memory allowed for cached intermediate states.
const CHECKPOINT_BYTES: usize = 64 << 20;

/// Stochastic Pauli trajectories: after each gate, with the element's error
/// probability, one uniformly random non-identity Pauli hits the gate's
/// qubit(s); each measured bit then flips with probability `e3`.
///
/// Shot `k` draws from substream `k` of `seed`. With all rates zero the
/// output equals [`crate::statevec::sample`] for the same seed.
pub fn sample_pauli_trajectories(
    circuit: &Circuit,
    model: &HardwareModel,
    map: &QubitMap,
    shots: usize,
    seed: u64,
) -> Result<SampleSet> {
    sample_pauli_trajectories_with_stats(circuit, model, map, shots, seed).map(|(s, _)| s)
}

pub fn sample_pauli_trajectories_with_stats(
    circuit: &Circuit,
    model: &HardwareModel,
    map: &QubitMap,
    shots: usize,
    seed: u64,
) -> Result<(SampleSet, TrajectoryStats)> {
    check_shots(shots)?;
    let mut gates = Vec::new();
    for g in circuit.gates() {
        match g {
            Gate::Single { qubit, .. } => gates.push(NoisyGate {
                gate: g,
                error: qubit_errors(model, map, *qubit)?.0,
                site: ErrorSite::One(*qubit),
            }),
            Gate::Fsim { q0, q1, .. } => gates.push(NoisyGate {
                gate: g,
                error: pair_error(model, map, *q0, *q1)?,
                site: ErrorSite::Two(*q0, *q1),
            }),
            Gate::Meas(_) => {}
        }
    }
    let measured = circuit.measured();
    let readout = measured
        .iter()
        .map(|&q| qubit_errors(model, map, q).map(|e| e.1))
        .collect::<Result<Vec<f64>>>()?;
    let k = measured.len();

    // Ideal run with periodic checkpoints to restart faulty trajectories from.
    let order = circuit.bit_order();
    let mut state = StateVector::zero(order.clone(), DEFAULT_MAX_QUBITS)?;
    let state_bytes = (1usize << order.len()) * 16;
    let interval = ((gates.len() * state_bytes) / CHECKPOINT_BYTES).max(1);
    let mut checkpoints = vec![state.clone()];
    for (i, ng) in gates.iter().enumerate() {
        state.apply_gate(ng.gate);
        if (i + 1) % interval == 0 {
            checkpoints.push(state.clone());
        }
    }
    let ideal = DiscreteSampler::new(&state.leading_marginal(k));

    let mut stats = TrajectoryStats {
        shots,
        ..Default::default()
    };
    let mut bits = Vec::with_capacity(shots);
    let mut events: Vec<(usize, [Option<Pauli>; 2])> = Vec::new();
    for shot in 0..shots {
        let mut rng = SeededRng::substream(seed, shot as u64);
        events.clear();
        for (i, ng) in gates.iter().enumerate() {
            if rng.chance(ng.error) {
                let paulis = match ng.site {
                    ErrorSite::One(_) => [PAULIS[1 + rng.below(3) as usize], None],
                    ErrorSite::Two(..) => {
                        let code = 1 + rng.below(15) as usize;
                        [PAULIS[code / 4], PAULIS[code % 4]]
                    }
                };
                events.push((i, paulis));
            }
        }
        let mut outcome = if events.is_empty() {
            stats.gate_error_free += 1;
            ideal.draw(&mut rng)
        } else {
            let first = events[0].0;
            let start = first / interval;
            let mut psi = checkpoints[start].clone();
            let mut next_event = events.iter().peekable();
            for (i, ng) in gates.iter().enumerate().skip(start * interval) {
                psi.apply_gate(ng.gate);
                while let Some((_, paulis)) = next_event.next_if(|(j, _)| *j == i) {
                    let targets = match ng.site {
                        ErrorSite::One(q) => [Some(q), None],
                        ErrorSite::Two(a, b) => [Some(a), Some(b)],
                    };
                    for (q, p) in targets.into_iter().zip(paulis) {
                        if let (Some(q), Some(p)) = (q, p) {
                            psi.apply_pauli(q, *p);
                        }
                    }
                }
            }
            DiscreteSampler::new(&psi.leading_marginal(k)).draw(&mut rng)
        };
        let mut flipped = false;
        for (j, &e3) in readout.iter().enumerate() {
            if rng.chance(e3) {
                outcome ^= 1 << (k - 1 - j);
                flipped = true;
            }
        }
        if events.is_empty() && !flipped {
            stats.error_free += 1;
        }
        bits.push(outcome);
    }
    Ok((SampleSet::new(measured, bits)?, stats))
}

/// Probability that a trajectory is entirely error free, `(gate-only, with
/// readout)`.
pub fn error_free_probability(
    circuit: &Circuit,
    model: &HardwareModel,
    map: &QubitMap,
) -> Result<(f64, f64)> {
    let f = forecast_fidelity(circuit, model, map)?;
    Ok((f.single_qubit * f.two_qubit, f.f_est))
}

/// Pair key of a gate's physical coupler, for reporting.
pub fn physical_pair(map: &QubitMap, a: Qubit, b: Qubit) -> Result<(u32, u32)> {
    Ok(pair_key(physical(map, a)?, physical(map, b)?))
}
