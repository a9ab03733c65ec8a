use std::collections::{BTreeMap, BTreeSet};

use super::{Circuit, Gate, Layer, LayerKind, Qubit};
use crate::error::{Error, Result};

/// Result of cutting a circuit into independently simulable patches.
#[derive(Clone, Debug, PartialEq)]
pub struct PatchSplit {
    /// One circuit per partition block, in partition order.
    pub patches: Vec<Circuit>,
    /// Deleted cross-patch fSim gates as `(layer index, gate)`.
    pub removed: Vec<(usize, Gate)>,
}

fn patch_of(circuit: &Circuit, partition: &[Vec<Qubit>]) -> Result<BTreeMap<Qubit, usize>> {
    let register: BTreeSet<Qubit> = circuit.qubits().iter().copied().collect();
    let mut owner = BTreeMap::new();
    for (i, block) in partition.iter().enumerate() {
        if block.is_empty() {
            return Err(Error::InvalidPartition(format!("patch {i} is empty")));
        }
        for &q in block {
            if !register.contains(&q) {
                return Err(Error::InvalidPartition(format!(
                    "Q{q} in patch {i} is not a circuit qubit"
                )));
            }
            if let Some(prev) = owner.insert(q, i) {
                return Err(Error::InvalidPartition(format!(
                    "Q{q} appears in patches {prev} and {i}"
                )));
            }
        }
    }
    let uncovered: Vec<Qubit> = register
        .iter()
        .copied()
        .filter(|q| !owner.contains_key(q))
        .collect();
    if !uncovered.is_empty() {
        return Err(Error::InvalidPartition(format!(
            "qubits {uncovered:?} are not in any patch"
        )));
    }
    Ok(owner)
}

fn crosses(g: &Gate, owner: &BTreeMap<Qubit, usize>) -> bool {
    matches!(g, Gate::Fsim { q0, q1, .. } if owner[q0] != owner[q1])
}

/// Splits `circuit` along `partition`. Cross-patch fSim gates are deleted;
/// everything else is kept layer-for-layer in the patch that owns it.
pub fn split_patches(circuit: &Circuit, partition: &[Vec<Qubit>]) -> Result<PatchSplit> {
    let owner = patch_of(circuit, partition)?;
    let mut removed = Vec::new();
    let mut per_patch: Vec<Vec<Layer>> = vec![Vec::new(); partition.len()];

    for (li, layer) in circuit.layers().iter().enumerate() {
        let mut gates: Vec<Vec<Gate>> = vec![Vec::new(); partition.len()];
        for g in &layer.gates {
            match g {
                Gate::Single { qubit, .. } => gates[owner[qubit]].push(g.clone()),
                Gate::Fsim { q0, .. } if !crosses(g, &owner) => gates[owner[q0]].push(g.clone()),
                Gate::Fsim { .. } => removed.push((li, g.clone())),
                Gate::Meas(qs) => {
                    for (p, block) in gates.iter_mut().enumerate() {
                        let mine: Vec<Qubit> =
                            qs.iter().copied().filter(|q| owner[q] == p).collect();
                        if !mine.is_empty() {
                            block.push(Gate::Meas(mine));
                        }
                    }
                }
            }
        }
        for (p, gs) in gates.into_iter().enumerate() {
            if layer.kind == LayerKind::Measure && gs.is_empty() {
                continue;
            }
            per_patch[p].push(Layer {
                kind: layer.kind,
                pattern: layer.pattern,
                gates: gs,
            });
        }
    }

    let patches = partition
        .iter()
        .zip(per_patch)
        .map(|(block, layers)| {
            let block: BTreeSet<Qubit> = block.iter().copied().collect();
            let qubits = circuit
                .qubits()
                .iter()
                .copied()
                .filter(|q| block.contains(q))
                .collect();
            Circuit::new(qubits, layers)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PatchSplit { patches, removed })
}

/// The full-register "patched" circuit: same layers, cross-patch fSim gates
/// deleted. This is what runs on the device when verifying by patches.
pub fn remove_cross_patch_gates(circuit: &Circuit, partition: &[Vec<Qubit>]) -> Result<Circuit> {
    let owner = patch_of(circuit, partition)?;
    let layers = circuit
        .layers()
        .iter()
        .map(|l| Layer {
            kind: l.kind,
            pattern: l.pattern,
            gates: l
                .gates
                .iter()
                .filter(|g| !crosses(g, &owner))
                .cloned()
                .collect(),
        })
        .collect();
    Circuit::new(circuit.qubits().to_vec(), layers)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{gate_census, generate_rcs, GeneratorOptions, PatternSchedule};

    fn line4(cycles: usize) -> Circuit {
        let patterns = [('A', vec![(1, 2)])].into_iter().collect();
        let sched = PatternSchedule::new(patterns, "A").unwrap();
        generate_rcs(&[0, 1, 2, 3], &sched, cycles, 11, GeneratorOptions::default()).unwrap()
    }

    #[test]
    fn single_patch_is_identity() {
        let c = line4(5);
        let split = split_patches(&c, &[vec![0, 1, 2, 3]]).unwrap();
        assert!(split.removed.is_empty());
        assert_eq!(split.patches, vec![c]);
    }

    #[test]
    fn cross_gate_removed_every_layer() {
        let cycles = 6;
        let c = line4(cycles);
        let split = split_patches(&c, &[vec![0, 1], vec![2, 3]]).unwrap();
        assert_eq!(split.removed.len(), cycles);
        for p in &split.patches {
            assert_eq!(p.cycles(), cycles);
            assert_eq!(gate_census(p).n_tq, 0);
            assert_eq!(gate_census(p).n_sq, 2 * (cycles + 1));
        }
    }

    #[test]
    fn gate_multiset_is_conserved() {
        let (rows, cols) = (3, 4);
        let c = generate_rcs(
            &PatternSchedule::grid_qubits(rows, cols),
            &PatternSchedule::grid(rows, cols),
            10,
            3,
            GeneratorOptions::default(),
        )
        .unwrap();
        let partition = vec![vec![0, 1, 4, 5, 8, 9], vec![2, 3, 6, 7, 10, 11]];
        let split = split_patches(&c, &partition).unwrap();
        let whole = gate_census(&c);
        let parts: Vec<_> = split.patches.iter().map(gate_census).collect();
        assert_eq!(
            whole.n_tq,
            parts.iter().map(|p| p.n_tq).sum::<usize>() + split.removed.len()
        );
        assert_eq!(whole.n_sq, parts.iter().map(|p| p.n_sq).sum::<usize>());
        assert_eq!(whole.n_meas, parts.iter().map(|p| p.n_meas).sum::<usize>());

        let patched = remove_cross_patch_gates(&c, &partition).unwrap();
        assert_eq!(gate_census(&patched).n_tq + split.removed.len(), whole.n_tq);
    }

    #[test]
    fn bad_partitions() {
        let c = line4(2);
        assert!(matches!(
            split_patches(&c, &[vec![0, 1], vec![1, 2, 3]]),
            Err(Error::InvalidPartition(_))
        ));
        assert!(matches!(
            split_patches(&c, &[vec![0, 1], vec![2]]),
            Err(Error::InvalidPartition(_))
        ));
        assert!(split_patches(&c, &[vec![0, 1, 2, 3, 4]]).is_err());
    }
}
