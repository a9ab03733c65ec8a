use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::{FRAC_PI_2, FRAC_PI_6};

use serde::{Deserialize, Serialize};

use super::{pair_key, Circuit, Gate, Layer, Qubit, SingleKind};
use crate::error::{Error, Result};
use crate::hwmodel::HardwareModel;
use crate::rng::SeededRng;

/// A-B-C-D then C-D-A-B.
pub const DEFAULT_SEQUENCE: &str = "ABCDCDAB";

/// Which qubit pairs each pattern couples, and the order patterns are
/// applied in (cyclically, one pattern per cycle).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternSchedule {
    pub patterns: BTreeMap<char, Vec<(Qubit, Qubit)>>,
    pub sequence: Vec<char>,
}

impl PatternSchedule {
    pub fn new(patterns: BTreeMap<char, Vec<(Qubit, Qubit)>>, sequence: &str) -> Result<Self> {
        Ok(Self {
            patterns,
            sequence: parse_sequence(sequence)?,
        })
    }

    /// Brickwork patterns on a `rows x cols` grid labelled row-major:
    /// A/B are horizontal couplers starting at even/odd columns, C/D are
    /// vertical couplers starting at even/odd rows.
    pub fn grid(rows: u32, cols: u32) -> Self {
        let id = |r: u32, c: u32| r * cols + c;
        let mut patterns: BTreeMap<char, Vec<(Qubit, Qubit)>> =
            ['A', 'B', 'C', 'D'].into_iter().map(|l| (l, Vec::new())).collect();
        for r in 0..rows {
            for c in 0..cols.saturating_sub(1) {
                let label = if c % 2 == 0 { 'A' } else { 'B' };
                patterns.get_mut(&label).unwrap().push((id(r, c), id(r, c + 1)));
            }
        }
        for r in 0..rows.saturating_sub(1) {
            for c in 0..cols {
                let label = if r % 2 == 0 { 'C' } else { 'D' };
                patterns.get_mut(&label).unwrap().push((id(r, c), id(r + 1, c)));
            }
        }
        Self {
            patterns,
            sequence: DEFAULT_SEQUENCE.chars().collect(),
        }
    }

    /// Grid qubit labels matching [`PatternSchedule::grid`].
    pub fn grid_qubits(rows: u32, cols: u32) -> Vec<Qubit> {
        (0..rows * cols).collect()
    }

    /// The ten-qubit example layout used in the circuit-construction step of
    /// the cloud workflow (qubits 1..=10).
    pub fn ten_qubit_example() -> (Vec<Qubit>, Self) {
        let patterns = [
            ('A', vec![(1, 4), (2, 5), (3, 6)]),
            ('B', vec![(5, 8), (6, 9), (7, 10)]),
            ('C', vec![(4, 8), (5, 9), (6, 10)]),
            ('D', vec![(1, 5), (2, 6), (3, 7)]),
        ]
        .into_iter()
        .collect();
        (
            (1..=10).collect(),
            Self {
                patterns,
                sequence: DEFAULT_SEQUENCE.chars().collect(),
            },
        )
    }

    pub fn with_sequence(mut self, sequence: &str) -> Result<Self> {
        self.sequence = parse_sequence(sequence)?;
        Ok(self)
    }

    /// Label of the `k`-th two-qubit layer.
    pub fn label_at(&self, k: usize) -> char {
        self.sequence[k % self.sequence.len()]
    }

    pub fn validate(&self, qubits: &[Qubit]) -> Result<()> {
        let register: BTreeSet<Qubit> = qubits.iter().copied().collect();
        if self.sequence.is_empty() {
            return Err(Error::InvalidSchedule("empty pattern sequence".into()));
        }
        for label in &self.sequence {
            if !self.patterns.contains_key(label) {
                return Err(Error::InvalidSchedule(format!(
                    "sequence uses undefined pattern {label}"
                )));
            }
        }
        for (label, pairs) in &self.patterns {
            let mut used = BTreeSet::new();
            for &(a, b) in pairs {
                if a == b {
                    return Err(Error::InvalidSchedule(format!(
                        "pattern {label}: pair (Q{a}, Q{b}) couples a qubit to itself"
                    )));
                }
                for q in [a, b] {
                    if !register.contains(&q) {
                        return Err(Error::InvalidSchedule(format!(
                            "pattern {label}: unknown qubit Q{q}"
                        )));
                    }
                    if !used.insert(q) {
                        return Err(Error::InvalidSchedule(format!(
                            "pattern {label}: Q{q} appears in two pairs"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Checks that every pair is a working coupler of `model`, with pattern
    /// qubit labels taken as physical ids.
    pub fn validate_on(&self, model: &HardwareModel) -> Result<()> {
        for (label, pairs) in &self.patterns {
            for &(a, b) in pairs {
                match model.coupler_between(a, b) {
                    Some(c) if c.working => {}
                    _ => {
                        return Err(Error::InvalidSchedule(format!(
                            "pattern {label}: no working coupler between Q{a} and Q{b}"
                        )))
                    }
                }
            }
        }
        Ok(())
    }

    pub fn all_pairs(&self) -> BTreeSet<(Qubit, Qubit)> {
        self.patterns
            .values()
            .flatten()
            .map(|&(a, b)| pair_key(a, b))
            .collect()
    }
}

fn parse_sequence(s: &str) -> Result<Vec<char>> {
    let seq: Vec<char> = s
        .chars()
        .filter(|c| !matches!(c, '-' | '–' | ',' | ' '))
        .collect();
    if seq.is_empty() {
        return Err(Error::InvalidSchedule("empty pattern sequence".into()));
    }
    Ok(seq)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorOptions {
    /// Allow a qubit to receive the same single-qubit gate in consecutive
    /// layers.
    pub allow_repeat: bool,
    pub fsim_theta: f64,
    pub fsim_phi: f64,
}

impl Default for GeneratorOptions {
    fn default() -> Self {
        Self {
            allow_repeat: false,
            fsim_theta: FRAC_PI_2,
            fsim_phi: FRAC_PI_6,
        }
    }
}

/// Builds an RCS circuit: `cycles` rounds of (random single-qubit layer,
/// patterned fSim layer), one more random single-qubit layer, then a
/// measurement of every qubit in `qubits` order.
pub fn generate_rcs(
    qubits: &[Qubit],
    schedule: &PatternSchedule,
    cycles: usize,
    seed: u64,
    options: GeneratorOptions,
) -> Result<Circuit> {
    if cycles < 1 {
        return Err(Error::InvalidSchedule("cycles must be at least 1".into()));
    }
    schedule.validate(qubits)?;

    let mut rng = SeededRng::new(seed);
    let mut previous: Vec<Option<SingleKind>> = vec![None; qubits.len()];
    let mut single_layer = |rng: &mut SeededRng| {
        let gates = qubits
            .iter()
            .zip(previous.iter_mut())
            .map(|(&q, prev)| {
                let kind = match (*prev, options.allow_repeat) {
                    (Some(p), false) => {
                        let others: Vec<SingleKind> =
                            SingleKind::ALL.into_iter().filter(|&k| k != p).collect();
                        others[rng.below(2) as usize]
                    }
                    _ => SingleKind::ALL[rng.below(3) as usize],
                };
                *prev = Some(kind);
                Gate::Single { kind, qubit: q }
            })
            .collect();
        Layer::single(gates)
    };

    let mut layers = Vec::with_capacity(2 * cycles + 2);
    for k in 0..cycles {
        layers.push(single_layer(&mut rng));
        let label = schedule.label_at(k);
        let gates = schedule.patterns[&label]
            .iter()
            .map(|&(a, b)| Gate::Fsim {
                q0: a,
                q1: b,
                theta: options.fsim_theta,
                phi: options.fsim_phi,
            })
            .collect();
        layers.push(Layer::double(Some(label), gates));
    }
    layers.push(single_layer(&mut rng));
    layers.push(Layer::measure(qubits.to_vec()));
    Circuit::new(qubits.to_vec(), layers)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{gate_census, serialize, LayerKind};

    fn grid2x2() -> (Vec<Qubit>, PatternSchedule) {
        (PatternSchedule::grid_qubits(2, 2), PatternSchedule::grid(2, 2))
    }

    #[test]
    fn layer_structure_of_eight_cycles() {
        let (qs, sched) = grid2x2();
        let c = generate_rcs(&qs, &sched, 8, 1, GeneratorOptions::default()).unwrap();
        let labels: String = c.pattern_labels().into_iter().map(|l| l.unwrap()).collect();
        assert_eq!(labels, "ABCDCDAB");
        let count = |k| c.layers().iter().filter(|l| l.kind == k).count();
        assert_eq!(count(LayerKind::Double), 8);
        assert_eq!(count(LayerKind::Single), 9);
        assert_eq!(count(LayerKind::Measure), 1);
        assert_eq!(gate_census(&c).n_sq, 4 * 9);
    }

    #[test]
    fn deterministic_under_seed() {
        let (qs, sched) = grid2x2();
        let a = generate_rcs(&qs, &sched, 8, 7, GeneratorOptions::default()).unwrap();
        let b = generate_rcs(&qs, &sched, 8, 7, GeneratorOptions::default()).unwrap();
        assert_eq!(serialize(&a), serialize(&b));
    }

    #[test]
    fn seeds_differ() {
        let (qs, sched) = PatternSchedule::ten_qubit_example();
        let differing = (0..100u64)
            .filter(|&s| {
                let a = generate_rcs(&qs, &sched, 12, 2 * s, GeneratorOptions::default()).unwrap();
                let b =
                    generate_rcs(&qs, &sched, 12, 2 * s + 1, GeneratorOptions::default()).unwrap();
                a != b
            })
            .count();
        assert!(differing >= 99);
    }

    #[test]
    fn no_consecutive_repeats_by_default() {
        let (qs, sched) = PatternSchedule::ten_qubit_example();
        for seed in 0..50 {
            let c = generate_rcs(&qs, &sched, 20, seed, GeneratorOptions::default()).unwrap();
            let singles: Vec<_> = c
                .layers()
                .iter()
                .filter(|l| l.kind == LayerKind::Single)
                .collect();
            for w in singles.windows(2) {
                for (g0, g1) in w[0].gates.iter().zip(&w[1].gates) {
                    assert_ne!(g0, g1, "seed {seed}");
                }
            }
        }
    }

    #[test]
    fn repeats_happen_when_allowed() {
        let (qs, sched) = PatternSchedule::ten_qubit_example();
        let opts = GeneratorOptions {
            allow_repeat: true,
            ..Default::default()
        };
        let c = generate_rcs(&qs, &sched, 20, 3, opts).unwrap();
        let singles: Vec<_> = c
            .layers()
            .iter()
            .filter(|l| l.kind == LayerKind::Single)
            .collect();
        let repeats: usize = singles
            .windows(2)
            .map(|w| w[0].gates.iter().zip(&w[1].gates).filter(|(a, b)| a == b).count())
            .sum();
        assert!(repeats > 0);
    }

    #[test]
    fn pattern_cycling() {
        let (qs, sched) = PatternSchedule::ten_qubit_example();
        let sched = sched.with_sequence("ABCDCDBA").unwrap();
        let c = generate_rcs(&qs, &sched, 19, 0, GeneratorOptions::default()).unwrap();
        for (k, label) in c.pattern_labels().into_iter().enumerate() {
            assert_eq!(label, Some(sched.sequence[k % 8]));
        }
    }

    #[test]
    fn ten_qubit_two_qubit_gate_count_matches_schedule_enumeration() {
        let (qs, sched) = PatternSchedule::ten_qubit_example();
        for depth in [12, 16, 20, 24] {
            let c = generate_rcs(&qs, &sched, depth, 5, GeneratorOptions::default()).unwrap();
            let expected: usize = (0..depth)
                .map(|k| sched.patterns[&sched.label_at(k)].len())
                .sum();
            assert_eq!(gate_census(&c).n_tq, expected);
        }
        // every pattern in the listing has three pairs
        let c = generate_rcs(&qs, &sched, 12, 5, GeneratorOptions::default()).unwrap();
        assert_eq!(gate_census(&c).n_tq, 36);
    }

    #[test]
    fn invalid_inputs() {
        let (qs, sched) = grid2x2();
        assert!(generate_rcs(&qs, &sched, 0, 0, GeneratorOptions::default()).is_err());
        let mut bad = sched.clone();
        bad.patterns.insert('A', vec![(0, 1), (1, 3)]);
        assert!(matches!(
            generate_rcs(&qs, &bad, 4, 0, GeneratorOptions::default()),
            Err(Error::InvalidSchedule(_))
        ));
        let mut unknown = sched.clone();
        unknown.patterns.insert('B', vec![(0, 9)]);
        assert!(generate_rcs(&qs, &unknown, 4, 0, GeneratorOptions::default()).is_err());
        let undefined = sched.with_sequence("ABE").unwrap();
        assert!(generate_rcs(&qs, &undefined, 4, 0, GeneratorOptions::default()).is_err());
    }

    #[test]
    fn grid_patterns_tile_all_couplers() {
        let s = PatternSchedule::grid(4, 4);
        assert_eq!(s.all_pairs().len(), 24);
        s.validate(&PatternSchedule::grid_qubits(4, 4)).unwrap();
        let model = HardwareModel::uniform_grid(4, 4, 0.001, 0.004, 0.01).unwrap();
        s.validate_on(&model).unwrap();
    }
}
