//! Layered circuit IR for random circuit sampling.
//!
//! A circuit is a sequence of layers over an ordered qubit register. Each
//! layer is one of
//!
//! * `Single`: at most one of √X, √Y, √W per qubit,
//! * `Double`: disjoint fSim gates, optionally tagged with the pattern label
//!   (A-D) that produced them,
//! * `Measure`: a single final `MEAS` gate.
//!
//! Qubits are identified by integer labels and printed as `Q<n>`. The bit
//! order of every sample and amplitude follows the `MEAS` target order.

mod generate;
mod patch;
mod text;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

pub use generate::{generate_rcs, GeneratorOptions, PatternSchedule, DEFAULT_SEQUENCE};
pub use patch::{remove_cross_patch_gates, split_patches, PatchSplit};
pub use text::{parse, serialize};

pub type Qubit = u32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum SingleKind {
    SX,
    SY,
    SW,
}

impl SingleKind {
    pub const ALL: [SingleKind; 3] = [SingleKind::SX, SingleKind::SY, SingleKind::SW];

    pub fn mnemonic(self) -> &'static str {
        match self {
            SingleKind::SX => "SX",
            SingleKind::SY => "SY",
            SingleKind::SW => "SW",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Gate {
    Single { kind: SingleKind, qubit: Qubit },
    Fsim { q0: Qubit, q1: Qubit, theta: f64, phi: f64 },
    Meas(Vec<Qubit>),
}

impl Gate {
    pub fn targets(&self) -> Vec<Qubit> {
        match self {
            Gate::Single { qubit, .. } => vec![*qubit],
            Gate::Fsim { q0, q1, .. } => vec![*q0, *q1],
            Gate::Meas(qs) => qs.clone(),
        }
    }

    fn first_target(&self) -> Qubit {
        match self {
            Gate::Single { qubit, .. } => *qubit,
            Gate::Fsim { q0, .. } => *q0,
            Gate::Meas(qs) => qs.first().copied().unwrap_or(0),
        }
    }

    fn relabel(&self, f: impl Fn(Qubit) -> Qubit) -> Gate {
        match self {
            Gate::Single { kind, qubit } => Gate::Single {
                kind: *kind,
                qubit: f(*qubit),
            },
            Gate::Fsim { q0, q1, theta, phi } => Gate::Fsim {
                q0: f(*q0),
                q1: f(*q1),
                theta: *theta,
                phi: *phi,
            },
            Gate::Meas(qs) => Gate::Meas(qs.iter().map(|&q| f(q)).collect()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum LayerKind {
    Single,
    Double,
    Measure,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Layer {
    pub kind: LayerKind,
    /// Pattern label of a `Double` layer, when known.
    pub pattern: Option<char>,
    pub gates: Vec<Gate>,
}

impl Layer {
    pub fn single(gates: Vec<Gate>) -> Self {
        Self {
            kind: LayerKind::Single,
            pattern: None,
            gates,
        }
    }

    pub fn double(pattern: Option<char>, gates: Vec<Gate>) -> Self {
        Self {
            kind: LayerKind::Double,
            pattern,
            gates,
        }
    }

    pub fn measure(qubits: Vec<Qubit>) -> Self {
        Self {
            kind: LayerKind::Measure,
            pattern: None,
            gates: vec![Gate::Meas(qubits)],
        }
    }
}

/// Ordered unordered-pair key.
pub fn pair_key(a: Qubit, b: Qubit) -> (Qubit, Qubit) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    qubits: Vec<Qubit>,
    layers: Vec<Layer>,
}

impl Circuit {
    /// Validates the layer structure and sorts each layer's gates by first
    /// target so that equal circuits compare (and print) equal.
    pub fn new(qubits: Vec<Qubit>, mut layers: Vec<Layer>) -> Result<Self> {
        let register: BTreeSet<Qubit> = qubits.iter().copied().collect();
        if register.len() != qubits.len() {
            return Err(Error::InvalidCircuit("duplicate qubit label in register".into()));
        }
        let n_layers = layers.len();
        for (i, layer) in layers.iter_mut().enumerate() {
            check_layer(i, layer, &register)?;
            if layer.kind == LayerKind::Measure && i + 1 != n_layers {
                return Err(Error::InvalidCircuit(format!(
                    "layer {i}: MEASURE must be the last layer"
                )));
            }
            layer.gates.sort_by_key(Gate::first_target);
        }
        for i in 0..n_layers {
            if layers[i].kind == LayerKind::Double
                && (i == 0 || layers[i - 1].kind != LayerKind::Single)
            {
                return Err(Error::InvalidCircuit(format!(
                    "layer {i}: DOUBLE layer must follow a SINGLE layer"
                )));
            }
        }
        Ok(Self { qubits, layers })
    }

    /// A circuit with no gates except a final measurement of every qubit.
    pub fn measure_only(qubits: Vec<Qubit>) -> Self {
        let layers = vec![Layer::measure(qubits.clone())];
        Self::new(qubits, layers).expect("measure-only circuit is valid")
    }

    pub fn qubits(&self) -> &[Qubit] {
        &self.qubits
    }

    pub fn n_qubits(&self) -> usize {
        self.qubits.len()
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    /// Number of two-qubit (DOUBLE) layers, the cycle count `m`.
    pub fn cycles(&self) -> usize {
        self.layers
            .iter()
            .filter(|l| l.kind == LayerKind::Double)
            .count()
    }

    /// Pattern labels of the DOUBLE layers, in order.
    pub fn pattern_labels(&self) -> Vec<Option<char>> {
        self.layers
            .iter()
            .filter(|l| l.kind == LayerKind::Double)
            .map(|l| l.pattern)
            .collect()
    }

    /// Bit order of samples: the `MEAS` targets, or the register when the
    /// circuit has no measurement layer.
    pub fn measured(&self) -> Vec<Qubit> {
        match self.layers.last() {
            Some(Layer {
                kind: LayerKind::Measure,
                gates,
                ..
            }) => gates[0].targets(),
            _ => self.qubits.clone(),
        }
    }

    /// Bit order of state vectors: measured qubits first (in `MEAS` order),
    /// then any unmeasured register qubits.
    pub fn bit_order(&self) -> Vec<Qubit> {
        let mut order = self.measured();
        for &q in &self.qubits {
            if !order.contains(&q) {
                order.push(q);
            }
        }
        order
    }

    pub fn gates(&self) -> impl Iterator<Item = &Gate> {
        self.layers.iter().flat_map(|l| l.gates.iter())
    }

    /// Union of all fSim pairs, as ordered keys.
    pub fn coupled_pairs(&self) -> BTreeSet<(Qubit, Qubit)> {
        self.gates()
            .filter_map(|g| match g {
                Gate::Fsim { q0, q1, .. } => Some(pair_key(*q0, *q1)),
                _ => None,
            })
            .collect()
    }

    /// Copy with every fSim gate on `pair` given new angles.
    pub fn with_fsim_params(&self, pair: (Qubit, Qubit), theta: f64, phi: f64) -> Circuit {
        let key = pair_key(pair.0, pair.1);
        let mut out = self.clone();
        for layer in out.layers.iter_mut() {
            for g in layer.gates.iter_mut() {
                if let Gate::Fsim {
                    q0,
                    q1,
                    theta: t,
                    phi: p,
                } = g
                {
                    if pair_key(*q0, *q1) == key {
                        *t = theta;
                        *p = phi;
                    }
                }
            }
        }
        out
    }

    /// Relabels every qubit through `map`, which must cover the register.
    pub fn relabel(&self, map: &BTreeMap<Qubit, Qubit>) -> Result<Circuit> {
        let missing: Vec<Qubit> = self
            .qubits
            .iter()
            .copied()
            .filter(|q| !map.contains_key(q))
            .collect();
        if !missing.is_empty() {
            return Err(Error::Mapping(format!("no image for qubits {missing:?}")));
        }
        let f = |q: Qubit| map[&q];
        let qubits = self.qubits.iter().map(|&q| f(q)).collect();
        let layers = self
            .layers
            .iter()
            .map(|l| Layer {
                kind: l.kind,
                pattern: l.pattern,
                gates: l.gates.iter().map(|g| g.relabel(f)).collect(),
            })
            .collect();
        Circuit::new(qubits, layers)
    }

    pub fn census(&self) -> GateCensus {
        gate_census(self)
    }
}

fn check_layer(i: usize, layer: &Layer, register: &BTreeSet<Qubit>) -> Result<()> {
    let mut used = BTreeSet::new();
    for g in &layer.gates {
        let ok_kind = matches!(
            (layer.kind, g),
            (LayerKind::Single, Gate::Single { .. })
                | (LayerKind::Double, Gate::Fsim { .. })
                | (LayerKind::Measure, Gate::Meas(_))
        );
        if !ok_kind {
            return Err(Error::InvalidCircuit(format!(
                "layer {i}: gate {g:?} does not belong in a {:?} layer",
                layer.kind
            )));
        }
        let targets = g.targets();
        if targets.is_empty() {
            return Err(Error::InvalidCircuit(format!("layer {i}: MEAS without targets")));
        }
        for q in targets {
            if !register.contains(&q) {
                return Err(Error::InvalidCircuit(format!(
                    "layer {i}: Q{q} is not in the register"
                )));
            }
            if !used.insert(q) {
                return Err(Error::InvalidCircuit(format!(
                    "layer {i}: Q{q} is targeted twice"
                )));
            }
        }
    }
    if layer.kind == LayerKind::Measure && layer.gates.len() != 1 {
        return Err(Error::InvalidCircuit(format!(
            "layer {i}: MEASURE layer holds exactly one MEAS gate"
        )));
    }
    Ok(())
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&serialize(self))
    }
}

/// Gate counts and usage maps; the input to fidelity forecasts and embedding
/// scores.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct GateCensus {
    pub n_sq: usize,
    pub n_tq: usize,
    pub n_meas: usize,
    pub sq_per_qubit: BTreeMap<Qubit, usize>,
    pub tq_per_pair: BTreeMap<(Qubit, Qubit), usize>,
    pub measured: Vec<Qubit>,
}

pub fn gate_census(circuit: &Circuit) -> GateCensus {
    let mut c = GateCensus::default();
    for g in circuit.gates() {
        match g {
            Gate::Single { qubit, .. } => {
                c.n_sq += 1;
                *c.sq_per_qubit.entry(*qubit).or_default() += 1;
            }
            Gate::Fsim { q0, q1, .. } => {
                c.n_tq += 1;
                *c.tq_per_pair.entry(pair_key(*q0, *q1)).or_default() += 1;
            }
            Gate::Meas(qs) => {
                c.n_meas += qs.len();
                c.measured.extend_from_slice(qs);
            }
        }
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sx(q: Qubit) -> Gate {
        Gate::Single {
            kind: SingleKind::SX,
            qubit: q,
        }
    }

    fn fsim(a: Qubit, b: Qubit) -> Gate {
        Gate::Fsim {
            q0: a,
            q1: b,
            theta: 1.0,
            phi: 0.5,
        }
    }

    #[test]
    fn measure_only_census() {
        let c = Circuit::measure_only(vec![0, 1, 2]);
        let census = gate_census(&c);
        assert_eq!((census.n_sq, census.n_tq, census.n_meas), (0, 0, 3));
    }

    #[test]
    fn overlapping_targets_are_rejected() {
        let err = Circuit::new(
            vec![0, 1, 2],
            vec![Layer::single(vec![sx(0)]), Layer::double(None, vec![fsim(0, 1), fsim(1, 2)])],
        );
        assert!(matches!(err, Err(Error::InvalidCircuit(m)) if m.contains("Q1")));
    }

    #[test]
    fn double_needs_single_before_it() {
        let err = Circuit::new(vec![0, 1], vec![Layer::double(None, vec![fsim(0, 1)])]);
        assert!(matches!(err, Err(Error::InvalidCircuit(_))));
    }

    #[test]
    fn measure_must_be_last() {
        let err = Circuit::new(
            vec![0],
            vec![Layer::measure(vec![0]), Layer::single(vec![sx(0)])],
        );
        assert!(matches!(err, Err(Error::InvalidCircuit(_))));
    }

    #[test]
    fn unknown_qubit_is_rejected() {
        assert!(Circuit::new(vec![0], vec![Layer::single(vec![sx(4)])]).is_err());
    }

    #[test]
    fn gates_are_canonically_ordered() {
        let c = Circuit::new(vec![0, 1, 2], vec![Layer::single(vec![sx(2), sx(0), sx(1)])]).unwrap();
        let order: Vec<_> = c.layers()[0].gates.iter().map(|g| g.targets()[0]).collect();
        assert_eq!(order, vec![0, 1, 2]);
    }

    #[test]
    fn fsim_substitution_only_touches_the_pair() {
        let c = Circuit::new(
            vec![0, 1, 2, 3],
            vec![
                Layer::single(vec![sx(0)]),
                Layer::double(None, vec![fsim(0, 1), fsim(2, 3)]),
            ],
        )
        .unwrap();
        let d = c.with_fsim_params((1, 0), 2.0, -1.0);
        let params: Vec<_> = d
            .gates()
            .filter_map(|g| match g {
                Gate::Fsim { theta, phi, .. } => Some((*theta, *phi)),
                _ => None,
            })
            .collect();
        assert_eq!(params, vec![(2.0, -1.0), (1.0, 0.5)]);
    }

    #[test]
    fn relabel_requires_full_cover() {
        let c = Circuit::measure_only(vec![0, 1]);
        let map: BTreeMap<_, _> = [(0, 5)].into_iter().collect();
        assert!(matches!(c.relabel(&map), Err(Error::Mapping(_))));
    }
}
