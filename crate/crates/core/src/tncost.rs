//! Tensor-network amplitude contraction and classical cost estimates.
//!
//! A circuit and a fixed output bitstring become a closed network of rank-1
//! boundary vectors and rank-2/rank-4 gate tensors over dimension-2 bonds.
//! A seeded greedy search picks a pairwise contraction order, bonds are
//! sliced until the largest intermediate fits a memory cap, and the plan's
//! operation count converts to wall-clock time on a machine profile.
//!
//! Costs are in complex multiply-accumulate operations: a step merging
//! tensors over index union `U` costs `2^|U|`, and every step runs once per
//! slice.

use std::cmp::{Ordering, Reverse};
use std::collections::{BTreeMap, BTreeSet, BinaryHeap};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};
use crate::rng::SeededRng;
use crate::samples::parse_bitstring;
use crate::statevec::{fsim_matrix, single_matrix};

pub type Index = u32;

#[derive(Clone, Debug, PartialEq)]
pub struct Tensor {
    /// Row-major: the first index is the most significant.
    pub indices: Vec<Index>,
    pub data: Vec<C64>,
}

impl Tensor {
    fn rank(&self) -> usize {
        self.indices.len()
    }

    /// Transposes to the given index order.
    fn permuted(&self, order: &[Index]) -> Vec<C64> {
        if order == self.indices.as_slice() {
            return self.data.clone();
        }
        let r = self.rank();
        let src_stride: Vec<usize> = order
            .iter()
            .map(|i| {
                let pos = self.indices.iter().position(|j| j == i).expect("index present");
                1usize << (r - 1 - pos)
            })
            .collect();
        let mut out = Vec::with_capacity(self.data.len());
        let mut counter = vec![0u8; r];
        let mut offset = 0usize;
        for _ in 0..self.data.len() {
            out.push(self.data[offset]);
            for k in (0..r).rev() {
                if counter[k] == 0 {
                    counter[k] = 1;
                    offset += src_stride[k];
                    break;
                }
                counter[k] = 0;
                offset -= src_stride[k];
            }
        }
        out
    }

    /// The sub-tensor with `index` fixed to `value`.
    fn fixed(&self, index: Index, value: usize) -> Tensor {
        let Some(pos) = self.indices.iter().position(|&i| i == index) else {
            return self.clone();
        };
        let r = self.rank();
        let bit = 1usize << (r - 1 - pos);
        let data = (0..self.data.len())
            .filter(|x| ((x & bit) != 0) == (value == 1))
            .map(|x| self.data[x])
            .collect();
        let mut indices = self.indices.clone();
        indices.remove(pos);
        Tensor { indices, data }
    }
}

/// Contracts every shared index of `a` and `b`; the result keeps `a`'s free
/// indices followed by `b`'s.
fn contract_pair(a: &Tensor, b: &Tensor) -> Tensor {
    let shared: Vec<Index> = a.indices.iter().copied().filter(|i| b.indices.contains(i)).collect();
    let a_free: Vec<Index> = a.indices.iter().copied().filter(|i| !shared.contains(i)).collect();
    let b_free: Vec<Index> = b.indices.iter().copied().filter(|i| !shared.contains(i)).collect();
    let am = a.permuted(&[a_free.as_slice(), shared.as_slice()].concat());
    let bm = b.permuted(&[shared.as_slice(), b_free.as_slice()].concat());
    let (m, k, n) = (1usize << a_free.len(), 1usize << shared.len(), 1usize << b_free.len());
    let mut data = vec![C64::new(0.0, 0.0); m * n];
    for i in 0..m {
        let row = &mut data[i * n..(i + 1) * n];
        for l in 0..k {
            let x = am[i * k + l];
            if x == C64::new(0.0, 0.0) {
                continue;
            }
            let brow = &bm[l * n..(l + 1) * n];
            for (o, y) in row.iter_mut().zip(brow) {
                *o += x * y;
            }
        }
    }
    Tensor {
        indices: [a_free, b_free].concat(),
        data,
    }
}

/// Closed network for one amplitude; every index is a bond between exactly
/// two tensors.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorNetwork {
    pub tensors: Vec<Tensor>,
    pub n_indices: usize,
}

impl TensorNetwork {
    pub fn index_sets(&self) -> Vec<Vec<Index>> {
        self.tensors.iter().map(|t| t.indices.clone()).collect()
    }
}

/// Network whose full contraction is `<bitstring| C |0...0>`, with the
/// bitstring read over [`Circuit::bit_order`].
pub fn build_network(circuit: &Circuit, bitstring: &str) -> Result<TensorNetwork> {
    let order = circuit.bit_order();
    let bits = parse_bitstring(bitstring, order.len())?;
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    let mut next: Index = 0;
    let mut wire = BTreeMap::new();
    let mut tensors = Vec::new();
    for &q in circuit.qubits() {
        wire.insert(q, next);
        tensors.push(Tensor {
            indices: vec![next],
            data: vec![one, zero],
        });
        next += 1;
    }
    for g in circuit.gates() {
        match g {
            Gate::Single { kind, qubit } => {
                let m = single_matrix(*kind);
                let input = wire[qubit];
                tensors.push(Tensor {
                    indices: vec![next, input],
                    data: m.iter().flatten().copied().collect(),
                });
                wire.insert(*qubit, next);
                next += 1;
            }
            Gate::Fsim { q0, q1, theta, phi } => {
                let m = fsim_matrix(*theta, *phi);
                let (i0, i1) = (wire[q0], wire[q1]);
                tensors.push(Tensor {
                    indices: vec![next, next + 1, i0, i1],
                    data: m.iter().flatten().copied().collect(),
                });
                wire.insert(*q0, next);
                wire.insert(*q1, next + 1);
                next += 2;
            }
            Gate::Meas(_) => {}
        }
    }
    let n = order.len();
    for (k, q) in order.iter().enumerate() {
        let bit = (bits >> (n - 1 - k)) & 1;
        tensors.push(Tensor {
            indices: vec![wire[q]],
            data: if bit == 0 { vec![one, zero] } else { vec![zero, one] },
        });
    }
    Ok(TensorNetwork {
        tensors,
        n_indices: next as usize,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContractionPlan {
    /// Inputs are ids `0..n_inputs`; step `k` creates id `n_inputs + k`.
    pub n_inputs: usize,
    pub steps: Vec<(usize, usize)>,
    pub sliced: Vec<Index>,
    pub flops_complex: f64,
    pub peak_elements: f64,
}

impl ContractionPlan {
    pub fn n_slices(&self) -> f64 {
        2f64.powi(self.sliced.len() as i32)
    }
}

/// Index sets of all tensors (inputs then intermediates) and per-step unions.
fn step_sets(inputs: &[Vec<Index>], steps: &[(usize, usize)]) -> (Vec<Vec<Index>>, Vec<Vec<Index>>) {
    let mut sets: Vec<Vec<Index>> = inputs.to_vec();
    let mut unions = Vec::with_capacity(steps.len());
    for &(a, b) in steps {
        let (sa, sb) = (&sets[a], &sets[b]);
        let mut union = sa.clone();
        union.extend(sb.iter().filter(|i| !sa.contains(i)));
        let result: Vec<Index> = union
            .iter()
            .copied()
            .filter(|i| !(sa.contains(i) && sb.contains(i)))
            .collect();
        unions.push(union);
        sets.push(result);
    }
    (sets, unions)
}

fn count_unsliced(set: &[Index], sliced: &BTreeSet<Index>) -> i32 {
    set.iter().filter(|i| !sliced.contains(i)).count() as i32
}

/// `(flops, log2 peak)` of an order under a slicing set.
pub fn plan_cost(
    sets: &[Vec<Index>],
    unions: &[Vec<Index>],
    sliced: &BTreeSet<Index>,
) -> (f64, i32) {
    let per_slice: f64 = unions
        .iter()
        .map(|u| 2f64.powi(count_unsliced(u, sliced)))
        .sum();
    let peak = sets.iter().map(|s| count_unsliced(s, sliced)).max().unwrap_or(0);
    (per_slice * 2f64.powi(sliced.len() as i32), peak)
}

#[derive(PartialEq)]
struct Candidate {
    key: f64,
    a: usize,
    b: usize,
}

impl Eq for Candidate {}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key
            .total_cmp(&other.key)
            .then(self.a.cmp(&other.a))
            .then(self.b.cmp(&other.b))
    }
}

const GREEDY_TEMPERATURE: f64 = 0.3;

/// One greedy pass: repeatedly merge the connected pair minimizing
/// `size(out) - size(a) - size(b)`, perturbed by Gumbel noise when `rng` is
/// given.
fn greedy_order(inputs: &[Vec<Index>], mut rng: Option<&mut SeededRng>) -> Vec<(usize, usize)> {
    let mut sets: Vec<Option<Vec<Index>>> = inputs.iter().cloned().map(Some).collect();
    let mut owners: BTreeMap<Index, Vec<usize>> = BTreeMap::new();
    for (t, s) in inputs.iter().enumerate() {
        for &i in s {
            owners.entry(i).or_default().push(t);
        }
    }
    let size = |s: &[Index]| 2f64.powi(s.len() as i32);
    let mut heap = BinaryHeap::new();
    let push = |heap: &mut BinaryHeap<Reverse<Candidate>>, sets: &[Option<Vec<Index>>], a: usize, b: usize, rng: &mut Option<&mut SeededRng>| {
        let (sa, sb) = (sets[a].as_ref().unwrap(), sets[b].as_ref().unwrap());
        let out = sa.iter().filter(|i| !sb.contains(i)).count() + sb.iter().filter(|i| !sa.contains(i)).count();
        let (za, zb, zo) = (size(sa), size(sb), 2f64.powi(out as i32));
        let mut key = zo - za - zb;
        if let Some(r) = rng.as_deref_mut() {
            let u = r.next_f64().max(f64::MIN_POSITIVE);
            key -= GREEDY_TEMPERATURE * za.max(zb).max(zo) * -(-u.ln()).ln();
        }
        heap.push(Reverse(Candidate { key, a: a.min(b), b: a.max(b) }));
    };
    let mut seen = BTreeSet::new();
    for own in owners.values() {
        if let [a, b] = own.as_slice() {
            if seen.insert((*a.min(b), *a.max(b))) {
                push(&mut heap, &sets, *a, *b, &mut rng);
            }
        }
    }
    let mut alive = inputs.len();
    let mut steps = Vec::new();
    while alive > 1 {
        let (a, b) = loop {
            match heap.pop() {
                Some(Reverse(c)) if sets[c.a].is_some() && sets[c.b].is_some() => break (c.a, c.b),
                Some(_) => continue,
                None => {
                    // disconnected: outer product of the two smallest
                    let mut live: Vec<usize> = (0..sets.len()).filter(|&t| sets[t].is_some()).collect();
                    live.sort_by_key(|&t| (sets[t].as_ref().unwrap().len(), t));
                    break (live[0], live[1]);
                }
            }
        };
        let sa = sets[a].take().unwrap();
        let sb = sets[b].take().unwrap();
        let mut out: Vec<Index> = sa.iter().copied().filter(|i| !sb.contains(i)).collect();
        out.extend(sb.iter().copied().filter(|i| !sa.contains(i)));
        let id = sets.len();
        for i in &sa {
            if sb.contains(i) {
                owners.remove(i);
            }
        }
        let mut nbrs = BTreeSet::new();
        for &i in &out {
            let own = owners.get_mut(&i).unwrap();
            for o in own.iter_mut() {
                if *o == a || *o == b {
                    *o = id;
                } else {
                    nbrs.insert(*o);
                }
            }
        }
        sets.push(Some(out));
        steps.push((a, b));
        alive -= 1;
        for n in nbrs {
            push(&mut heap, &sets, id, n, &mut rng);
        }
    }
    steps
}

/// Slices bonds until the peak fits `cap_log2`, each time taking the bond
/// that lowers the peak most (then cheapest, then smallest index).
fn slice_to_cap(sets: &[Vec<Index>], unions: &[Vec<Index>], cap_log2: i32) -> BTreeSet<Index> {
    let mut sliced = BTreeSet::new();
    loop {
        let (_, peak) = plan_cost(sets, unions, &sliced);
        if peak <= cap_log2 {
            return sliced;
        }
        let candidates: BTreeSet<Index> = sets
            .iter()
            .filter(|s| count_unsliced(s, &sliced) == peak)
            .flat_map(|s| s.iter().copied())
            .filter(|i| !sliced.contains(i))
            .collect();
        let mut best: Option<(i32, f64, Index)> = None;
        for c in candidates {
            let mut trial = sliced.clone();
            trial.insert(c);
            let (flops, p) = plan_cost(sets, unions, &trial);
            let better = match best {
                None => true,
                Some((bp, bf, _)) => p < bp || (p == bp && flops < bf),
            };
            if better {
                best = Some((p, flops, c));
            }
        }
        sliced.insert(best.expect("a peak tensor has an unsliced index").2);
    }
}

pub const DEFAULT_RESTARTS: usize = 64;

/// Best of `restarts` seeded greedy orders (restart 0 is noise-free), each
/// sliced to fit `memory_cap_elements`; ties go to the lower peak, then the
/// earlier restart.
pub fn plan_contraction(
    network: &TensorNetwork,
    memory_cap_elements: f64,
    seed: u64,
    restarts: usize,
) -> Result<ContractionPlan> {
    let inputs = network.index_sets();
    let largest = inputs.iter().map(|s| s.len()).max().unwrap_or(0);
    if !(memory_cap_elements >= 2f64.powi(largest as i32)) {
        return Err(Error::Domain(format!(
            "memory cap of {memory_cap_elements} elements is below the largest input tensor (2^{largest})"
        )));
    }
    let cap_log2 = memory_cap_elements.log2().floor().min(i32::MAX as f64) as i32;
    let mut best: Option<ContractionPlan> = None;
    for r in 0..restarts.max(1) {
        let steps = if r == 0 {
            greedy_order(&inputs, None)
        } else {
            let mut rng = SeededRng::substream(seed, r as u64);
            greedy_order(&inputs, Some(&mut rng))
        };
        let (sets, unions) = step_sets(&inputs, &steps);
        let sliced = slice_to_cap(&sets, &unions, cap_log2);
        let (flops, peak) = plan_cost(&sets, &unions, &sliced);
        let plan = ContractionPlan {
            n_inputs: inputs.len(),
            steps,
            sliced: sliced.into_iter().collect(),
            flops_complex: flops,
            peak_elements: 2f64.powi(peak),
        };
        let better = match &best {
            None => true,
            Some(b) => (plan.flops_complex, plan.peak_elements) < (b.flops_complex, b.peak_elements),
        };
        if better {
            best = Some(plan);
        }
    }
    Ok(best.expect("at least one restart"))
}

/// Recomputes `(flops, peak)` for `plan` on `network`, independent of the
/// values stored in the plan.
pub fn recompute_cost(network: &TensorNetwork, plan: &ContractionPlan) -> (f64, f64) {
    let (sets, unions) = step_sets(&network.index_sets(), &plan.steps);
    let sliced: BTreeSet<Index> = plan.sliced.iter().copied().collect();
    let (f, p) = plan_cost(&sets, &unions, &sliced);
    (f, 2f64.powi(p))
}

/// Executes `plan`, summing over every assignment of the sliced bonds.
pub fn contract(network: &TensorNetwork, plan: &ContractionPlan) -> Result<C64> {
    if plan.n_inputs != network.tensors.len() {
        return Err(Error::LengthMismatch {
            expected: network.tensors.len(),
            got: plan.n_inputs,
        });
    }
    if network.tensors.is_empty() {
        return Ok(C64::new(1.0, 0.0));
    }
    let mut total = C64::new(0.0, 0.0);
    for slice in 0..(1usize << plan.sliced.len()) {
        let mut pool: Vec<Option<Tensor>> = network
            .tensors
            .iter()
            .map(|t| {
                let mut t = t.clone();
                for (k, &idx) in plan.sliced.iter().enumerate() {
                    t = t.fixed(idx, (slice >> k) & 1);
                }
                Some(t)
            })
            .collect();
        for &(a, b) in &plan.steps {
            let ta = pool[a].take().ok_or_else(|| Error::Domain(format!("tensor {a} reused")))?;
            let tb = pool[b].take().ok_or_else(|| Error::Domain(format!("tensor {b} reused")))?;
            pool.push(Some(contract_pair(&ta, &tb)));
        }
        let last = pool.pop().flatten().expect("final tensor");
        if !last.indices.is_empty() {
            return Err(Error::Domain("plan leaves open indices".into()));
        }
        total += last.data[0];
    }
    Ok(total)
}

/// Amplitude of `bitstring` by network contraction.
pub fn tn_amplitude(
    circuit: &Circuit,
    bitstring: &str,
    memory_cap_elements: f64,
    seed: u64,
) -> Result<C64> {
    let net = build_network(circuit, bitstring)?;
    let plan = plan_contraction(&net, memory_cap_elements, seed, DEFAULT_RESTARTS)?;
    contract(&net, &plan)
}

pub const SECONDS_PER_YEAR: f64 = 3.156e7;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MachineProfile {
    pub name: String,
    /// Machine floating-point operations per second.
    pub peak_flops: f64,
    pub efficiency: f64,
    pub machine_flops_per_complex_op: f64,
    pub memory_bytes: f64,
    pub bytes_per_element: f64,
}

impl MachineProfile {
    pub const NAMES: [&'static str; 2] = ["frontier-9.2PB", "frontier-762.2PB"];

    pub fn named(name: &str) -> Result<Self> {
        let memory_bytes = match name {
            "frontier-9.2PB" => 9.2e15,
            "frontier-762.2PB" => 762.2e15,
            _ => {
                return Err(Error::Domain(format!(
                    "unknown machine profile {name:?}; known: {}",
                    Self::NAMES.join(", ")
                )))
            }
        };
        Ok(Self {
            name: name.to_string(),
            peak_flops: 1.685e18,
            efficiency: 0.2,
            machine_flops_per_complex_op: 8.0,
            memory_bytes,
            bytes_per_element: 8.0,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            self.peak_flops,
            self.efficiency,
            self.machine_flops_per_complex_op,
            self.memory_bytes,
            self.bytes_per_element,
        ];
        if positive.iter().any(|v| !(*v > 0.0 && v.is_finite())) || self.efficiency > 1.0 {
            return Err(Error::Domain(format!(
                "profile {:?} needs positive finite values and efficiency <= 1",
                self.name
            )));
        }
        Ok(())
    }

    pub fn memory_cap_elements(&self) -> f64 {
        self.memory_bytes / self.bytes_per_element
    }
}

/// Frugal-sampling total: `flops * n_samples * fidelity`.
pub fn estimate_sampling_cost(plan_flops: f64, n_samples: u64, fidelity: f64) -> Result<f64> {
    if n_samples < 1 {
        return Err(Error::Domain("n_samples must be at least 1".into()));
    }
    if !(fidelity > 0.0 && fidelity <= 1.0) {
        return Err(Error::Domain(format!("fidelity {fidelity} outside (0, 1]")));
    }
    if !(plan_flops >= 0.0 && plan_flops.is_finite()) {
        return Err(Error::Domain(format!("flops {plan_flops} must be finite and >= 0")));
    }
    Ok(plan_flops * n_samples as f64 * fidelity)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RuntimeEstimate {
    pub seconds: f64,
    pub years: f64,
}

pub fn estimate_runtime(total_complex_flops: f64, profile: &MachineProfile) -> Result<RuntimeEstimate> {
    profile.validate()?;
    if !(total_complex_flops >= 0.0 && total_complex_flops.is_finite()) {
        return Err(Error::Domain(format!(
            "flops {total_complex_flops} must be finite and >= 0"
        )));
    }
    let seconds = total_complex_flops * profile.machine_flops_per_complex_op
        / (profile.peak_flops * profile.efficiency);
    Ok(RuntimeEstimate {
        seconds,
        years: seconds / SECONDS_PER_YEAR,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostReport {
    pub flops_complex: f64,
    pub peak_elements: f64,
    pub sliced_bonds: usize,
    pub n_samples: u64,
    pub fidelity: f64,
    pub total_flops: f64,
    pub profile: MachineProfile,
    pub seconds: f64,
    pub years: f64,
}

pub fn cost_report(
    plan: &ContractionPlan,
    n_samples: u64,
    fidelity: f64,
    profile: &MachineProfile,
) -> Result<CostReport> {
    let total = estimate_sampling_cost(plan.flops_complex, n_samples, fidelity)?;
    let rt = estimate_runtime(total, profile)?;
    Ok(CostReport {
        flops_complex: plan.flops_complex,
        peak_elements: plan.peak_elements,
        sliced_bonds: plan.sliced.len(),
        n_samples,
        fidelity,
        total_flops: total,
        profile: profile.clone(),
        seconds: rt.seconds,
        years: rt.years,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{generate_rcs, GeneratorOptions, Layer, PatternSchedule, SingleKind};
    use crate::samples::format_bitstring;
    use crate::statevec::amplitude;

    fn grid_circuit(rows: u32, cols: u32, cycles: usize, seed: u64) -> Circuit {
        generate_rcs(
            &PatternSchedule::grid_qubits(rows, cols),
            &PatternSchedule::grid(rows, cols),
            cycles,
            seed,
            GeneratorOptions::default(),
        )
        .unwrap()
    }

    fn close(a: C64, b: C64) -> bool {
        (a - b).norm() < 1e-8
    }

    #[test]
    fn empty_circuit_amplitude_is_one() {
        let c = Circuit::new(vec![0, 1], vec![]).unwrap();
        let net = build_network(&c, "00").unwrap();
        let plan = plan_contraction(&net, f64::INFINITY, 0, 4).unwrap();
        assert!(close(contract(&net, &plan).unwrap(), C64::new(1.0, 0.0)));
        assert!(matches!(build_network(&c, "0"), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn single_sx_amplitude() {
        let c = Circuit::new(
            vec![0],
            vec![Layer::single(vec![Gate::Single {
                kind: SingleKind::SX,
                qubit: 0,
            }])],
        )
        .unwrap();
        let amp = tn_amplitude(&c, "1", f64::INFINITY, 0).unwrap();
        assert!(close(amp, C64::new(0.0, -std::f64::consts::FRAC_1_SQRT_2)));
    }

    #[test]
    fn two_tensor_hand_count() {
        let t = |indices: Vec<Index>| Tensor {
            data: vec![C64::new(1.0, 0.0); 1 << indices.len()],
            indices,
        };
        let inputs = vec![vec![0, 1], vec![1, 2]];
        let (sets, unions) = step_sets(&inputs, &[(0, 1)]);
        assert_eq!(plan_cost(&sets, &unions, &BTreeSet::new()), (8.0, 2));
        let r = contract_pair(&t(vec![0, 1]), &t(vec![1, 2]));
        assert_eq!(r.indices, vec![0, 2]);
        assert!(r.data.iter().all(|v| *v == C64::new(2.0, 0.0)));
    }

    #[test]
    fn permute_and_fix() {
        let t = Tensor {
            indices: vec![5, 7],
            data: (0..4).map(|v| C64::new(v as f64, 0.0)).collect(),
        };
        let p = t.permuted(&[7, 5]);
        assert_eq!(p.iter().map(|c| c.re).collect::<Vec<_>>(), vec![0.0, 2.0, 1.0, 3.0]);
        let f = t.fixed(5, 1);
        assert_eq!(f.indices, vec![7]);
        assert_eq!(f.data.iter().map(|c| c.re).collect::<Vec<_>>(), vec![2.0, 3.0]);
    }

    #[test]
    fn matches_state_vector_capped_and_uncapped() {
        let c = grid_circuit(3, 4, 10, 5);
        let mut rng = SeededRng::new(11);
        for _ in 0..3 {
            let bits = format_bitstring(rng.below(1 << 12), 12);
            let net = build_network(&c, &bits).unwrap();
            let free = plan_contraction(&net, f64::INFINITY, 1, 8).unwrap();
            let capped = plan_contraction(&net, free.peak_elements / 8.0, 1, 8).unwrap();
            assert!(capped.peak_elements <= free.peak_elements / 8.0);
            assert!(capped.flops_complex >= free.flops_complex);
            assert!(!capped.sliced.is_empty());
            let want = amplitude(&c, &bits).unwrap();
            assert!(close(contract(&net, &free).unwrap(), want));
            assert!(close(contract(&net, &capped).unwrap(), want));
            assert_eq!(recompute_cost(&net, &capped), (capped.flops_complex, capped.peak_elements));
        }
    }

    #[test]
    fn cap_below_input_is_rejected() {
        let c = grid_circuit(2, 2, 2, 0);
        let net = build_network(&c, "0000").unwrap();
        assert!(plan_contraction(&net, 8.0, 0, 2).is_err());
        let plan = plan_contraction(&net, 16.0, 0, 2).unwrap();
        assert!(plan.peak_elements <= 16.0);
    }

    #[test]
    fn flops_bounded_by_state_vector_work() {
        let (n, m) = (12usize, 10usize);
        let c = grid_circuit(3, 4, m, 2);
        let net = build_network(&c, &"0".repeat(n)).unwrap();
        let plan = plan_contraction(&net, f64::INFINITY, 0, DEFAULT_RESTARTS).unwrap();
        assert!(plan.flops_complex <= 2.0 * (m * n) as f64 * 2f64.powi(n as i32), "{}", plan.flops_complex);
    }

    #[test]
    fn plan_is_structural() {
        let c = grid_circuit(2, 3, 6, 9);
        let a = plan_contraction(&build_network(&c, "000000").unwrap(), 64.0, 3, 8).unwrap();
        let b = plan_contraction(&build_network(&c, "101101").unwrap(), 64.0, 3, 8).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn flops_scale_with_slice_count() {
        let c = grid_circuit(2, 3, 6, 9);
        let net = build_network(&c, "000000").unwrap();
        let plan = plan_contraction(&net, 16.0, 0, 1).unwrap();
        let (sets, unions) = step_sets(&net.index_sets(), &plan.steps);
        let mut sliced: BTreeSet<Index> = plan.sliced.iter().copied().collect();
        let per_slice: f64 = unions
            .iter()
            .map(|u| 2f64.powi(count_unsliced(u, &sliced)))
            .sum();
        assert_eq!(plan.flops_complex, per_slice * plan.n_slices());
        // one more sliced bond: twice the slices, never less work
        let (before, _) = plan_cost(&sets, &unions, &sliced);
        let extra = (0..net.n_indices as Index).find(|i| !sliced.contains(i)).unwrap();
        sliced.insert(extra);
        let (after, _) = plan_cost(&sets, &unions, &sliced);
        assert!(after >= before);
    }

    #[test]
    fn flops_grow_with_depth() {
        let mut last = 0.0;
        for m in [4, 8, 12, 16] {
            let c = grid_circuit(3, 3, m, 1);
            let net = build_network(&c, "000000000").unwrap();
            let plan = plan_contraction(&net, f64::INFINITY, 0, 16).unwrap();
            assert!(plan.flops_complex >= last, "m={m}: {} < {last}", plan.flops_complex);
            last = plan.flops_complex;
        }
    }

    #[test]
    fn runtime_formula() {
        let p = MachineProfile::named("frontier-9.2PB").unwrap();
        let rt = estimate_runtime(2.1e28, &p).unwrap();
        assert!((rt.seconds - 4.985e11).abs() / 4.985e11 < 1e-3);
        assert!((rt.years / 1.6e4 - 1.0).abs() < 0.02);
        assert_eq!(estimate_runtime(0.0, &p).unwrap().seconds, 0.0);
        let big = MachineProfile::named("frontier-762.2PB").unwrap();
        assert!((estimate_runtime(1.8e25, &big).unwrap().years - 13.5).abs() < 0.1);
        assert!(MachineProfile::named("summit").is_err());
        let bad = MachineProfile {
            efficiency: 1.5,
            ..p.clone()
        };
        assert!(estimate_runtime(1.0, &bad).is_err());
        assert!(estimate_runtime(-1.0, &p).is_err());
        assert_eq!(p.memory_cap_elements(), 1.15e15);
    }

    #[test]
    fn sampling_cost_is_linear() {
        assert_eq!(estimate_sampling_cost(7.0, 1, 1.0).unwrap(), 7.0);
        assert_eq!(
            estimate_sampling_cost(7.0, 3, 0.5).unwrap() * 2.0,
            estimate_sampling_cost(7.0, 3, 1.0).unwrap()
        );
        let t = estimate_sampling_cost(1e12, 1_000_000, 5.4e-4).unwrap();
        assert!((t / 5.4e14 - 1.0).abs() < 1e-12);
        assert!(estimate_sampling_cost(1.0, 0, 0.5).is_err());
        assert!(estimate_sampling_cost(1.0, 1, 0.0).is_err());
    }
}
