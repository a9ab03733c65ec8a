//! Error-aware placement of a logical circuit onto the hardware grid.
//!
//! The logical coupling graph (every pair that carries an fSim gate) is
//! embedded as a subgraph of the working hardware graph. Placements are
//! scored by the additive surrogate
//! `sum n_sq(q) c(e1) + [q measured] c(e3) + sum n_tq(a,b) c(e2)` with
//! `c(e) = -ln(1 - e)`, so `exp(-score)` is the forecast fidelity of the
//! placed circuit.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::circuit::{gate_census, pair_key, Circuit, Qubit};
use crate::error::{Error, Result};
use crate::hwmodel::HardwareModel;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    First,
    #[default]
    Best,
}

impl std::str::FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "first" => Ok(Strategy::First),
            "best" => Ok(Strategy::Best),
            _ => Err(Error::Domain(format!("unknown strategy {s:?} (first|best)"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EmbedOptions {
    pub strategy: Strategy,
    /// Maximum number of search nodes (tentative placements); `None` searches
    /// exhaustively.
    pub node_budget: Option<u64>,
    /// Physical qubits that must not be used even if working.
    pub excluded: BTreeSet<u32>,
}

pub const DEFAULT_NODE_BUDGET: u64 = 2_000_000;

impl Default for EmbedOptions {
    fn default() -> Self {
        Self {
            strategy: Strategy::Best,
            node_budget: Some(DEFAULT_NODE_BUDGET),
            excluded: BTreeSet::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CouplerAssignment {
    pub logical: (Qubit, Qubit),
    pub physical: (u32, u32),
    pub coupler: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mapping {
    pub qubits: BTreeMap<Qubit, u32>,
    pub couplers: Vec<CouplerAssignment>,
    pub score: f64,
    /// True when the search space was exhausted, so a `best` result is
    /// proven optimal.
    pub exhaustive: bool,
    pub nodes: u64,
}

impl Mapping {
    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("mapping serializes")
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

fn cost(e: Option<f64>) -> f64 {
    -(-e.unwrap_or(0.0)).ln_1p()
}

/// Usage weights of the logical circuit.
struct Usage {
    qubits: Vec<Qubit>,
    sq: Vec<f64>,
    meas: Vec<bool>,
    edges: Vec<(usize, usize, f64)>,
    neighbours: Vec<Vec<(usize, f64)>>,
}

impl Usage {
    fn of(circuit: &Circuit) -> Self {
        let census = gate_census(circuit);
        let qubits = circuit.qubits().to_vec();
        let pos: BTreeMap<Qubit, usize> = qubits.iter().enumerate().map(|(i, &q)| (q, i)).collect();
        let sq = qubits
            .iter()
            .map(|q| *census.sq_per_qubit.get(q).unwrap_or(&0) as f64)
            .collect();
        let measured: BTreeSet<Qubit> = census.measured.iter().copied().collect();
        let meas = qubits.iter().map(|q| measured.contains(q)).collect();
        let mut neighbours = vec![Vec::new(); qubits.len()];
        let mut edges = Vec::new();
        for (&(a, b), &n) in &census.tq_per_pair {
            let (i, j) = (pos[&a], pos[&b]);
            edges.push((i, j, n as f64));
            neighbours[i].push((j, n as f64));
            neighbours[j].push((i, n as f64));
        }
        Self {
            qubits,
            sq,
            meas,
            edges,
            neighbours,
        }
    }
}

/// Working hardware graph restricted to allowed qubits, densely indexed.
struct Hardware {
    ids: Vec<u32>,
    c1: Vec<f64>,
    c3: Vec<f64>,
    adj: Vec<Vec<usize>>,
    /// `c(e2)` between dense indices, NaN when not coupled.
    c2: Vec<f64>,
    coupler_id: Vec<u32>,
}

impl Hardware {
    fn of(model: &HardwareModel, excluded: &BTreeSet<u32>) -> Self {
        let qs: Vec<_> = model
            .working_qubits()
            .filter(|q| !excluded.contains(&q.id))
            .collect();
        let ids: Vec<u32> = qs.iter().map(|q| q.id).collect();
        let pos: BTreeMap<u32, usize> = ids.iter().enumerate().map(|(i, &q)| (q, i)).collect();
        let n = ids.len();
        let mut c2 = vec![f64::NAN; n * n];
        let mut coupler_id = vec![u32::MAX; n * n];
        let mut adj = vec![Vec::new(); n];
        for c in model.working_couplers() {
            if let (Some(&i), Some(&j)) = (pos.get(&c.q0), pos.get(&c.q1)) {
                c2[i * n + j] = cost(c.e2);
                c2[j * n + i] = cost(c.e2);
                coupler_id[i * n + j] = c.id;
                coupler_id[j * n + i] = c.id;
                adj[i].push(j);
                adj[j].push(i);
            }
        }
        for a in adj.iter_mut() {
            a.sort_unstable();
            a.dedup();
        }
        Self {
            c1: qs.iter().map(|q| cost(q.e1)).collect(),
            c3: qs.iter().map(|q| cost(q.e3)).collect(),
            ids,
            adj,
            c2,
            coupler_id,
        }
    }

    fn n(&self) -> usize {
        self.ids.len()
    }

    fn edge(&self, i: usize, j: usize) -> f64 {
        self.c2[i * self.n() + j]
    }
}

struct Search<'a> {
    usage: &'a Usage,
    hw: &'a Hardware,
    strategy: Strategy,
    budget: Option<u64>,
    order: Vec<usize>,
    /// For each position in `order`, the earlier-placed logical neighbours.
    back: Vec<Vec<(usize, f64)>>,
    /// Cheapest placement cost of each logical qubit over all hardware.
    node_min: Vec<f64>,
    /// Sum of `node_min` over order positions `k..`.
    suffix_node: Vec<f64>,
    /// Lower bound on edge costs of edges whose later endpoint is at
    /// position `k..`.
    suffix_edge: Vec<f64>,
    assign: Vec<usize>,
    used: Vec<bool>,
    nodes: u64,
    exhausted_budget: bool,
    best: Option<(f64, Vec<u32>, Vec<usize>)>,
}

const TIE: f64 = 1e-12;

impl Search<'_> {
    fn qubit_cost(&self, l: usize, p: usize) -> f64 {
        self.usage.sq[l] * self.hw.c1[p] + if self.usage.meas[l] { self.hw.c3[p] } else { 0.0 }
    }

    /// Score summed in a fixed order so equal placements get equal scores.
    fn canonical_score(&self, assign: &[usize]) -> f64 {
        let mut s = 0.0;
        for l in 0..assign.len() {
            s += self.qubit_cost(l, assign[l]);
        }
        for &(a, b, n) in &self.usage.edges {
            s += n * self.hw.edge(assign[a], assign[b]);
        }
        s
    }

    fn candidates(&self, k: usize) -> Vec<usize> {
        let l = self.order[k];
        let degree = self.usage.neighbours[l].len();
        let back = &self.back[k];
        let pool: Vec<usize> = match back.first() {
            Some(&(nb, _)) => self.hw.adj[self.assign[nb]].clone(),
            None => (0..self.hw.n()).collect(),
        };
        pool.into_iter()
            .filter(|&p| !self.used[p] && self.hw.adj[p].len() >= degree)
            .filter(|&p| {
                back.iter()
                    .all(|&(nb, _)| !self.hw.edge(self.assign[nb], p).is_nan())
            })
            .collect()
    }

    /// Every unplaced logical neighbour of `l` (now at `p`) still has a free
    /// hardware neighbour of `p`.
    fn forward_ok(&self, l: usize, p: usize, placed: &[bool]) -> bool {
        self.usage.neighbours[l].iter().all(|&(u, _)| {
            placed[u] || self.hw.adj[p].iter().any(|&q| !self.used[q])
        })
    }

    fn run(&mut self) {
        let mut placed = vec![false; self.usage.qubits.len()];
        self.descend(0, 0.0, &mut placed);
    }

    /// Returns false to stop the whole search.
    fn descend(&mut self, k: usize, partial: f64, placed: &mut Vec<bool>) -> bool {
        if k == self.order.len() {
            let score = self.canonical_score(&self.assign);
            let seq: Vec<u32> = self.assign.iter().map(|&p| self.hw.ids[p]).collect();
            let better = match &self.best {
                None => true,
                Some((s, best_seq, _)) => {
                    score < s - TIE * s.abs().max(1.0)
                        || (score <= s + TIE * s.abs().max(1.0) && seq < *best_seq)
                }
            };
            if better {
                self.best = Some((score, seq, self.assign.clone()));
            }
            return self.strategy == Strategy::Best;
        }
        let l = self.order[k];
        for p in self.candidates(k) {
            if let Some(b) = self.budget {
                if self.nodes >= b {
                    self.exhausted_budget = true;
                    return false;
                }
            }
            self.nodes += 1;
            let mut add = self.qubit_cost(l, p);
            for &(nb, n) in &self.back[k] {
                add += n * self.hw.edge(self.assign[nb], p);
            }
            let next = partial + add;
            if let Some((s, _, _)) = &self.best {
                let bound = next + self.suffix_node[k + 1] + self.suffix_edge[k + 1];
                if bound > s + TIE * s.abs().max(1.0) {
                    continue;
                }
            }
            self.assign[l] = p;
            self.used[p] = true;
            placed[l] = true;
            let ok = self.forward_ok(l, p, placed);
            let go_on = !ok || self.descend(k + 1, next, placed);
            placed[l] = false;
            self.used[p] = false;
            if !go_on {
                return false;
            }
        }
        true
    }
}

/// Most-constrained-first order: start at the highest-degree qubit, then
/// repeatedly take the qubit with the most already-ordered neighbours
/// (ties: higher degree, then smaller label). Disconnected components are
/// visited in turn.
fn search_order(usage: &Usage) -> Vec<usize> {
    let n = usage.qubits.len();
    let mut in_order = vec![false; n];
    let mut linked = vec![0usize; n];
    let mut order = Vec::with_capacity(n);
    while order.len() < n {
        let next = (0..n)
            .filter(|&i| !in_order[i])
            .max_by(|&a, &b| {
                (linked[a], usage.neighbours[a].len())
                    .cmp(&(linked[b], usage.neighbours[b].len()))
                    .then(usage.qubits[b].cmp(&usage.qubits[a]))
            })
            .unwrap();
        in_order[next] = true;
        order.push(next);
        for &(u, _) in &usage.neighbours[next] {
            linked[u] += 1;
        }
    }
    order
}

/// Places `circuit`'s qubits on working hardware qubits so that every fSim
/// pair lands on a working coupler.
pub fn embed(circuit: &Circuit, model: &HardwareModel, options: &EmbedOptions) -> Result<Mapping> {
    let usage = Usage::of(circuit);
    let hw = Hardware::of(model, &options.excluded);
    if usage.qubits.len() > hw.n() {
        return Err(Error::NoEmbedding(format!(
            "{} logical qubits but only {} usable hardware qubits",
            usage.qubits.len(),
            hw.n()
        )));
    }
    let order = search_order(&usage);
    let rank: Vec<usize> = {
        let mut r = vec![0; order.len()];
        for (k, &l) in order.iter().enumerate() {
            r[l] = k;
        }
        r
    };
    let back: Vec<Vec<(usize, f64)>> = order
        .iter()
        .enumerate()
        .map(|(k, &l)| {
            let mut b: Vec<(usize, f64)> = usage.neighbours[l]
                .iter()
                .copied()
                .filter(|&(u, _)| rank[u] < k)
                .collect();
            b.sort_by_key(|&(u, _)| rank[u]);
            b
        })
        .collect();

    let min_c2 = hw.c2.iter().copied().filter(|c| !c.is_nan()).fold(f64::INFINITY, f64::min);
    let min_c2 = if min_c2.is_finite() { min_c2 } else { 0.0 };
    let mut search = Search {
        usage: &usage,
        hw: &hw,
        strategy: options.strategy,
        budget: options.node_budget,
        order: order.clone(),
        back: back.clone(),
        node_min: Vec::new(),
        suffix_node: Vec::new(),
        suffix_edge: Vec::new(),
        assign: vec![usize::MAX; usage.qubits.len()],
        used: vec![false; hw.n()],
        nodes: 0,
        exhausted_budget: false,
        best: None,
    };
    search.node_min = (0..usage.qubits.len())
        .map(|l| {
            (0..hw.n())
                .map(|p| search.qubit_cost(l, p))
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    let n = order.len();
    search.suffix_node = vec![0.0; n + 1];
    search.suffix_edge = vec![0.0; n + 1];
    for k in (0..n).rev() {
        search.suffix_node[k] = search.suffix_node[k + 1] + search.node_min[order[k]];
        let edge_weight: f64 = back[k].iter().map(|&(_, w)| w).sum();
        search.suffix_edge[k] = search.suffix_edge[k + 1] + edge_weight * min_c2;
    }
    search.run();

    let exhaustive = !search.exhausted_budget;
    let nodes = search.nodes;
    match search.best {
        Some((score, _, assign)) => {
            let qubits: BTreeMap<Qubit, u32> = usage
                .qubits
                .iter()
                .zip(&assign)
                .map(|(&l, &p)| (l, hw.ids[p]))
                .collect();
            let couplers = usage
                .edges
                .iter()
                .map(|&(a, b, _)| {
                    let (pa, pb) = (assign[a], assign[b]);
                    CouplerAssignment {
                        logical: (usage.qubits[a], usage.qubits[b]),
                        physical: (hw.ids[pa], hw.ids[pb]),
                        coupler: hw.coupler_id[pa * hw.n() + pb],
                    }
                })
                .collect();
            Ok(Mapping {
                qubits,
                couplers,
                score,
                exhaustive,
                nodes,
            })
        }
        None if exhaustive => Err(Error::NoEmbedding(format!(
            "exhausted search over {nodes} placements"
        ))),
        None => Err(Error::BudgetExhausted(nodes)),
    }
}

/// Recomputes a mapping's score from the circuit census and the model,
/// independently of the search; fails if the mapping is invalid.
pub fn mapping_score(circuit: &Circuit, model: &HardwareModel, qubits: &BTreeMap<Qubit, u32>) -> Result<f64> {
    check_mapping(circuit, model, qubits)?;
    let census = gate_census(circuit);
    let mut s = 0.0;
    for &q in circuit.qubits() {
        let rec = model.qubit(qubits[&q]).expect("checked");
        let n = *census.sq_per_qubit.get(&q).unwrap_or(&0) as f64;
        s += n * cost(rec.e1);
        if census.measured.contains(&q) {
            s += cost(rec.e3);
        }
    }
    for (&(a, b), &n) in &census.tq_per_pair {
        let c = model.coupler_between(qubits[&a], qubits[&b]).expect("checked");
        s += n as f64 * cost(c.e2);
    }
    Ok(s)
}

/// Validity: total over the register, injective, onto working qubits, and
/// every logical pair on a working coupler.
pub fn check_mapping(circuit: &Circuit, model: &HardwareModel, qubits: &BTreeMap<Qubit, u32>) -> Result<()> {
    let mut images = BTreeSet::new();
    for &q in circuit.qubits() {
        let p = *qubits
            .get(&q)
            .ok_or_else(|| Error::Mapping(format!("Q{q} is unmapped")))?;
        match model.qubit(p) {
            Some(r) if r.working => {}
            _ => return Err(Error::Mapping(format!("Q{q} -> {p} is not a working qubit"))),
        }
        if !images.insert(p) {
            return Err(Error::Mapping(format!("physical qubit {p} used twice")));
        }
    }
    for (a, b) in circuit.coupled_pairs() {
        let (pa, pb) = (qubits[&a], qubits[&b]);
        match model.coupler_between(pa, pb) {
            Some(c) if c.working => {}
            _ => {
                return Err(Error::Mapping(format!(
                    "pair (Q{a}, Q{b}) -> ({pa}, {pb}) has no working coupler"
                )))
            }
        }
    }
    Ok(())
}

/// Rewrites `circuit` onto physical labels. With `calibrated` set, every
/// fSim gate takes the target coupler's calibrated angles when present.
pub fn apply_mapping(
    circuit: &Circuit,
    mapping: &Mapping,
    calibrated: Option<&HardwareModel>,
) -> Result<Circuit> {
    let mut out = circuit.relabel(&mapping.qubits)?;
    for (a, b) in circuit.coupled_pairs() {
        let key = pair_key(a, b);
        if !mapping.couplers.iter().any(|c| pair_key(c.logical.0, c.logical.1) == key) {
            return Err(Error::Mapping(format!("no coupler assigned to (Q{a}, Q{b})")));
        }
    }
    if let Some(model) = calibrated {
        for c in &mapping.couplers {
            let rec = model
                .coupler_between(c.physical.0, c.physical.1)
                .ok_or_else(|| Error::Mapping(format!("no coupler {:?}", c.physical)))?;
            if let Some((theta, phi)) = rec.fsim_params() {
                out = out.with_fsim_params(c.physical, theta, phi);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{generate_rcs, serialize, Gate, GeneratorOptions, Layer, PatternSchedule, SingleKind};
    use crate::hwmodel::{CouplerRecord, QubitRecord};
    use crate::noise::{forecast_fidelity, identity_map};

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

    fn exhaustive() -> EmbedOptions {
        EmbedOptions {
            node_budget: None,
            ..Default::default()
        }
    }

    #[test]
    fn single_qubit_goes_to_best_qubit() {
        let c = Circuit::new(
            vec![0],
            vec![
                Layer::single(vec![Gate::Single {
                    kind: SingleKind::SX,
                    qubit: 0,
                }]),
                Layer::measure(vec![0]),
            ],
        )
        .unwrap();
        let m = HardwareModel::new(
            "two",
            1,
            2,
            vec![
                QubitRecord::working(0, 0, 0, 0.002, 0.01),
                QubitRecord::working(1, 0, 1, 0.001, 0.01),
            ],
            vec![CouplerRecord::working(0, 0, 1, 0.005)],
        )
        .unwrap();
        let map = embed(&c, &m, &exhaustive()).unwrap();
        assert_eq!(map.qubits[&0], 1);
        assert!(map.exhaustive);
    }

    #[test]
    fn avoids_dead_coupler_and_matches_forecast() {
        let c = grid_circuit(2, 2, 6, 1);
        let m = HardwareModel::uniform_grid(3, 3, 0.001, 0.004, 0.01)
            .unwrap()
            .with_disabled(&[], &[(4, 5)])
            .unwrap();
        let map = embed(&c, &m, &exhaustive()).unwrap();
        check_mapping(&c, &m, &map.qubits).unwrap();
        assert!(map
            .couplers
            .iter()
            .all(|a| pair_key(a.physical.0, a.physical.1) != (4, 5)));
        let score = mapping_score(&c, &m, &map.qubits).unwrap();
        assert!((score - map.score).abs() < 1e-12);
        let physical = apply_mapping(&c, &map, None).unwrap();
        let f = forecast_fidelity(&physical, &m, &identity_map(&physical)).unwrap();
        assert!((f.f_est - (-map.score).exp()).abs() < 1e-9);
    }

    #[test]
    fn identity_mapping_round_trip() {
        let c = grid_circuit(2, 2, 3, 4);
        let m = HardwareModel::uniform_grid(2, 2, 0.001, 0.004, 0.01).unwrap();
        let map = embed(&c, &m, &exhaustive()).unwrap();
        // uniform errors: every placement ties, smallest sequence is identity
        assert_eq!(map.qubits, identity_map(&c));
        assert_eq!(apply_mapping(&c, &map, None).unwrap(), c);
    }

    #[test]
    fn swapped_labels_keep_census() {
        let c = grid_circuit(1, 2, 3, 4);
        let mapping = Mapping {
            qubits: [(0, 1), (1, 0)].into_iter().collect(),
            couplers: vec![CouplerAssignment {
                logical: (0, 1),
                physical: (1, 0),
                coupler: 0,
            }],
            score: 0.0,
            exhaustive: true,
            nodes: 0,
        };
        let d = apply_mapping(&c, &mapping, None).unwrap();
        let (a, b) = (gate_census(&c), gate_census(&d));
        assert_eq!((a.n_sq, a.n_tq, a.n_meas), (b.n_sq, b.n_tq, b.n_meas));
        let swap = |s: String| s.replace("Q0", "Qx").replace("Q1", "Q0").replace("Qx", "Q1");
        let sorted = |s: String| {
            let mut v: Vec<String> = s.lines().map(str::to_string).collect();
            v.sort();
            v
        };
        assert_eq!(sorted(swap(serialize(&c))), sorted(serialize(&d)));
    }

    #[test]
    fn calibrated_params_are_substituted() {
        let c = grid_circuit(1, 2, 2, 0);
        let mut model = HardwareModel::uniform_grid(1, 2, 0.001, 0.004, 0.01).unwrap();
        let mut doc: serde_json::Value = serde_json::from_str(&model.to_json_string()).unwrap();
        doc["couplers"][0]["fsim_theta"] = serde_json::json!(1.25);
        doc["couplers"][0]["fsim_phi"] = serde_json::json!(0.5);
        model = HardwareModel::from_json_str(&doc.to_string()).unwrap();
        let map = embed(&c, &model, &exhaustive()).unwrap();
        let d = apply_mapping(&c, &map, Some(&model)).unwrap();
        assert!(d.gates().all(|g| match g {
            Gate::Fsim { theta, phi, .. } => *theta == 1.25 && *phi == 0.5,
            _ => true,
        }));
    }

    #[test]
    fn impossible_and_budget_failures_differ() {
        let c = grid_circuit(2, 2, 3, 0);
        let line = HardwareModel::uniform_grid(1, 6, 0.001, 0.004, 0.01).unwrap();
        assert!(matches!(embed(&c, &line, &exhaustive()), Err(Error::NoEmbedding(_))));
        let opts = EmbedOptions {
            node_budget: Some(3),
            ..Default::default()
        };
        assert!(matches!(embed(&c, &line, &opts), Err(Error::BudgetExhausted(3))));
    }

    #[test]
    fn first_strategy_returns_valid_mapping() {
        let c = grid_circuit(3, 3, 4, 2);
        let m = HardwareModel::uniform_grid(5, 5, 0.001, 0.004, 0.01)
            .unwrap()
            .with_disabled(&[6, 18], &[])
            .unwrap();
        let opts = EmbedOptions {
            strategy: Strategy::First,
            ..Default::default()
        };
        let map = embed(&c, &m, &opts).unwrap();
        check_mapping(&c, &m, &map.qubits).unwrap();
        assert!(!map.qubits.values().any(|p| *p == 6 || *p == 18));
    }

    #[test]
    fn excluded_qubits_are_avoided() {
        let c = grid_circuit(2, 2, 3, 0);
        let m = HardwareModel::uniform_grid(3, 3, 0.001, 0.004, 0.01).unwrap();
        let opts = EmbedOptions {
            excluded: [0, 8].into_iter().collect(),
            ..exhaustive()
        };
        let map = embed(&c, &m, &opts).unwrap();
        assert!(!map.qubits.values().any(|p| *p == 0 || *p == 8));
        let opts = EmbedOptions {
            excluded: [1, 3, 5, 7].into_iter().collect(),
            ..exhaustive()
        };
        assert!(matches!(embed(&c, &m, &opts), Err(Error::NoEmbedding(_))));
    }

    #[test]
    fn mapping_json_round_trip() {
        let c = grid_circuit(2, 2, 3, 0);
        let m = HardwareModel::uniform_grid(2, 3, 0.001, 0.004, 0.01).unwrap();
        let map = embed(&c, &m, &exhaustive()).unwrap();
        assert_eq!(Mapping::from_json_str(&map.to_json_string()).unwrap(), map);
    }
}
