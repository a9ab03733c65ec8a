//! Hardware topology and calibration data.
//!
//! A [`HardwareModel`] is a rectangular grid of qubits joined by couplers
//! between nearest neighbours, together with the per-element calibration
//! record (Pauli errors, readout error, coherence times, fSim angles).
//! Models are validated on construction and immutable afterwards.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};

pub const DEFAULT_SQ_GATE_NS: f64 = 26.0;
pub const DEFAULT_TQ_GATE_NS: f64 = 40.0;

fn default_sq_gate_ns() -> f64 {
    DEFAULT_SQ_GATE_NS
}

fn default_tq_gate_ns() -> f64 {
    DEFAULT_TQ_GATE_NS
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QubitRecord {
    pub id: u32,
    pub row: u32,
    pub col: u32,
    pub working: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e3: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t1_us: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t2_us: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f01_ghz: Option<f64>,
    #[serde(default = "default_sq_gate_ns")]
    pub sq_gate_ns: f64,
    #[serde(flatten)]
    pub extra: Map<String, Value>,
}

impl QubitRecord {
    /// A working qubit with the given errors and typical coherence values.
    pub fn working(id: u32, row: u32, col: u32, e1: f64, e3: f64) -> Self {
        Self {
            id,
            row,
            col,
            working: true,
            e1: Some(e1),
            e3: Some(e3),
            t1_us: None,
            t2_us: None,
            f01_ghz: None,
            sq_gate_ns: DEFAULT_SQ_GATE_NS,
            extra: Map::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CouplerRecord {
    pub id: u32,
    pub q0: u32,
    pub q1: u32,
    pub working: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fsim_theta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fsim_phi: Option<f64>,
    #[serde(default = "default_tq_gate_ns")]
    pub tq_gate_ns: f64,
    #[serde(flatten)]
    pub extra: Map<String, Value>,
}

impl CouplerRecord {
    pub fn working(id: u32, q0: u32, q1: u32, e2: f64) -> Self {
        Self {
            id,
            q0,
            q1,
            working: true,
            e2: Some(e2),
            fsim_theta: None,
            fsim_phi: None,
            tq_gate_ns: DEFAULT_TQ_GATE_NS,
            extra: Map::new(),
        }
    }

    pub fn fsim_params(&self) -> Option<(f64, f64)> {
        Some((self.fsim_theta?, self.fsim_phi?))
    }
}

/// Serialized form; the model proper adds lookup tables built at validation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct ConfigDoc {
    name: String,
    rows: u32,
    cols: u32,
    qubits: Vec<QubitRecord>,
    couplers: Vec<CouplerRecord>,
    #[serde(flatten)]
    extra: Map<String, Value>,
}

#[derive(Clone, Debug)]
pub struct HardwareModel {
    doc: ConfigDoc,
    qubit_index: HashMap<u32, usize>,
    pair_index: HashMap<(u32, u32), usize>,
}

impl PartialEq for HardwareModel {
    fn eq(&self, other: &Self) -> bool {
        self.doc == other.doc
    }
}

fn ordered(a: u32, b: u32) -> (u32, u32) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

impl HardwareModel {
    pub fn new(
        name: impl Into<String>,
        rows: u32,
        cols: u32,
        qubits: Vec<QubitRecord>,
        couplers: Vec<CouplerRecord>,
    ) -> Result<Self> {
        Self::from_doc(ConfigDoc {
            name: name.into(),
            rows,
            cols,
            qubits,
            couplers,
            extra: Map::new(),
        })
    }

    /// Full `rows x cols` grid, every element working with uniform errors.
    /// Qubit ids run row-major; couplers are horizontal first, then vertical.
    pub fn uniform_grid(rows: u32, cols: u32, e1: f64, e2: f64, e3: f64) -> Result<Self> {
        let mut qubits = Vec::new();
        for r in 0..rows {
            for c in 0..cols {
                qubits.push(QubitRecord::working(r * cols + c, r, c, e1, e3));
            }
        }
        let mut couplers = Vec::new();
        for (a, b) in grid_pairs(rows, cols) {
            let mut cp = CouplerRecord::working(couplers.len() as u32, a, b, e2);
            cp.fsim_theta = Some(std::f64::consts::FRAC_PI_2);
            cp.fsim_phi = Some(std::f64::consts::FRAC_PI_6);
            couplers.push(cp);
        }
        Self::new(format!("grid-{rows}x{cols}"), rows, cols, qubits, couplers)
    }

    fn from_doc(doc: ConfigDoc) -> Result<Self> {
        let violations = validate(&doc);
        if !violations.is_empty() {
            return Err(Error::Validation(violations));
        }
        let qubit_index = doc
            .qubits
            .iter()
            .enumerate()
            .map(|(i, q)| (q.id, i))
            .collect();
        let pair_index = doc
            .couplers
            .iter()
            .enumerate()
            .map(|(i, c)| (ordered(c.q0, c.q1), i))
            .collect();
        Ok(Self {
            doc,
            qubit_index,
            pair_index,
        })
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let doc: ConfigDoc = serde_json::from_str(text)?;
        Self::from_doc(doc)
    }

    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.doc).expect("config serializes");
        s.push('\n');
        s
    }

    pub fn name(&self) -> &str {
        &self.doc.name
    }

    pub fn rows(&self) -> u32 {
        self.doc.rows
    }

    pub fn cols(&self) -> u32 {
        self.doc.cols
    }

    pub fn qubits(&self) -> &[QubitRecord] {
        &self.doc.qubits
    }

    pub fn couplers(&self) -> &[CouplerRecord] {
        &self.doc.couplers
    }

    pub fn qubit(&self, id: u32) -> Option<&QubitRecord> {
        self.qubit_index.get(&id).map(|&i| &self.doc.qubits[i])
    }

    pub fn coupler_between(&self, a: u32, b: u32) -> Option<&CouplerRecord> {
        self.pair_index
            .get(&ordered(a, b))
            .map(|&i| &self.doc.couplers[i])
    }

    pub fn working_qubits(&self) -> impl Iterator<Item = &QubitRecord> {
        self.doc.qubits.iter().filter(|q| q.working)
    }

    pub fn working_couplers(&self) -> impl Iterator<Item = &CouplerRecord> {
        self.doc.couplers.iter().filter(|c| c.working)
    }

    /// Adjacency over working couplers, sorted by neighbour id.
    pub fn working_adjacency(&self) -> BTreeMap<u32, Vec<u32>> {
        let mut adj: BTreeMap<u32, Vec<u32>> =
            self.working_qubits().map(|q| (q.id, Vec::new())).collect();
        for c in self.working_couplers() {
            adj.entry(c.q0).or_default().push(c.q1);
            adj.entry(c.q1).or_default().push(c.q0);
        }
        for v in adj.values_mut() {
            v.sort_unstable();
        }
        adj
    }

    /// Working qubits that pass `criteria`; the rest are candidates for
    /// exclusion from a benchmark region.
    pub fn select_qubits(&self, criteria: &QualityCriteria) -> BTreeSet<u32> {
        self.working_qubits()
            .filter(|q| criteria.accepts(q))
            .map(|q| q.id)
            .collect()
    }

    /// Copy of the model with the listed elements marked non-working.
    /// Couplers touching a disabled qubit are disabled too.
    pub fn with_disabled(&self, qubits: &[u32], couplers: &[(u32, u32)]) -> Result<Self> {
        let mut doc = self.doc.clone();
        let dead: BTreeSet<u32> = qubits.iter().copied().collect();
        let dead_pairs: BTreeSet<(u32, u32)> =
            couplers.iter().map(|&(a, b)| ordered(a, b)).collect();
        for q in doc.qubits.iter_mut() {
            if dead.contains(&q.id) {
                q.working = false;
            }
        }
        for c in doc.couplers.iter_mut() {
            if dead.contains(&c.q0)
                || dead.contains(&c.q1)
                || dead_pairs.contains(&ordered(c.q0, c.q1))
            {
                c.working = false;
            }
        }
        Self::from_doc(doc)
    }

    pub fn error_summary(&self, metric: Metric) -> Result<ErrorSummary> {
        let values: Vec<f64> = match metric {
            Metric::E2 => self.working_couplers().filter_map(|c| c.e2).collect(),
            _ => self
                .working_qubits()
                .filter_map(|q| match metric {
                    Metric::E1 => q.e1,
                    Metric::E3 => q.e3,
                    Metric::T1 => q.t1_us,
                    Metric::T2 => q.t2_us,
                    Metric::E2 => unreachable!(),
                })
                .collect(),
        };
        ErrorSummary::from_values(metric, values)
    }
}

pub fn load_config(path: impl AsRef<Path>) -> Result<HardwareModel> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    HardwareModel::from_json_str(&text)
}

pub fn save_config(model: &HardwareModel, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, model.to_json_string()).map_err(|e| Error::io(path, e))
}

/// Nearest-neighbour pairs of a full grid, horizontal then vertical.
pub fn grid_pairs(rows: u32, cols: u32) -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    for r in 0..rows {
        for c in 0..cols.saturating_sub(1) {
            out.push((r * cols + c, r * cols + c + 1));
        }
    }
    for r in 0..rows.saturating_sub(1) {
        for c in 0..cols {
            out.push((r * cols + c, (r + 1) * cols + c));
        }
    }
    out
}

fn in_unit(v: f64) -> bool {
    (0.0..1.0).contains(&v)
}

fn validate(doc: &ConfigDoc) -> Vec<String> {
    let mut bad = Vec::new();
    let mut by_id: HashMap<u32, &QubitRecord> = HashMap::new();
    let mut coords: HashMap<(u32, u32), u32> = HashMap::new();

    for q in &doc.qubits {
        if by_id.insert(q.id, q).is_some() {
            bad.push(format!("qubit {}: duplicate id", q.id));
        }
        if q.row >= doc.rows || q.col >= doc.cols {
            bad.push(format!(
                "qubit {}: position ({}, {}) outside {}x{} grid",
                q.id, q.row, q.col, doc.rows, doc.cols
            ));
        }
        if let Some(other) = coords.insert((q.row, q.col), q.id) {
            bad.push(format!(
                "qubit {}: position ({}, {}) already used by qubit {other}",
                q.id, q.row, q.col
            ));
        }
        for (key, v) in [("e1", q.e1), ("e3", q.e3)] {
            match v {
                Some(v) if !in_unit(v) => {
                    bad.push(format!("qubit {}: {key}={v} outside [0, 1)", q.id))
                }
                None if q.working => {
                    bad.push(format!("qubit {}: working qubit missing {key}", q.id))
                }
                _ => {}
            }
        }
        for (key, v) in [("t1_us", q.t1_us), ("t2_us", q.t2_us)] {
            if let Some(v) = v {
                if !(v >= 0.0) {
                    bad.push(format!("qubit {}: {key}={v} is negative", q.id));
                }
            }
        }
        if let Some(f) = q.f01_ghz {
            if !(f > 0.0) {
                bad.push(format!("qubit {}: f01_ghz={f} must be positive", q.id));
            }
        }
        if !(q.sq_gate_ns > 0.0) {
            bad.push(format!("qubit {}: sq_gate_ns must be positive", q.id));
        }
    }

    let mut coupler_ids = BTreeSet::new();
    let mut pairs: HashMap<(u32, u32), u32> = HashMap::new();
    for c in &doc.couplers {
        if !coupler_ids.insert(c.id) {
            bad.push(format!("coupler {}: duplicate id", c.id));
        }
        if c.q0 == c.q1 {
            bad.push(format!("coupler {}: endpoints are the same qubit", c.id));
        }
        if let Some(other) = pairs.insert(ordered(c.q0, c.q1), c.id) {
            bad.push(format!(
                "coupler {}: pair ({}, {}) already used by coupler {other}",
                c.id, c.q0, c.q1
            ));
        }
        let (a, b) = (by_id.get(&c.q0), by_id.get(&c.q1));
        for (end, rec) in [(c.q0, a), (c.q1, b)] {
            if rec.is_none() {
                bad.push(format!("coupler {}: endpoint qubit {end} does not exist", c.id));
            }
        }
        if let (Some(a), Some(b)) = (a, b) {
            if a.row.abs_diff(b.row) + a.col.abs_diff(b.col) != 1 {
                bad.push(format!(
                    "coupler {}: qubits {} and {} are not grid-adjacent",
                    c.id, c.q0, c.q1
                ));
            }
            if c.working && !(a.working && b.working) {
                let dead = if a.working { b.id } else { a.id };
                bad.push(format!(
                    "coupler {}: working coupler has non-working endpoint qubit {dead}",
                    c.id
                ));
            }
        }
        match c.e2 {
            Some(v) if !in_unit(v) => bad.push(format!("coupler {}: e2={v} outside [0, 1)", c.id)),
            None if c.working => bad.push(format!("coupler {}: working coupler missing e2", c.id)),
            _ => {}
        }
        if !(c.tq_gate_ns > 0.0) {
            bad.push(format!("coupler {}: tq_gate_ns must be positive", c.id));
        }
    }
    bad
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    E1,
    E2,
    E3,
    T1,
    T2,
}

impl Metric {
    pub const ALL: [Metric; 5] = [Metric::E1, Metric::E2, Metric::E3, Metric::T1, Metric::T2];
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Metric::E1 => "e1",
            Metric::E2 => "e2",
            Metric::E3 => "e3",
            Metric::T1 => "t1",
            Metric::T2 => "t2",
        })
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Metric::ALL
            .into_iter()
            .find(|m| m.to_string() == s.to_ascii_lowercase())
            .ok_or_else(|| Error::Domain(format!("unknown metric {s:?}")))
    }
}

/// Mean, median and empirical CDF of one metric over working elements.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ErrorSummary {
    pub metric: Metric,
    pub count: usize,
    pub mean: f64,
    pub median: f64,
    /// `(value, fraction of elements <= value)`, sorted by value.
    pub cdf: Vec<(f64, f64)>,
}

impl ErrorSummary {
    pub fn from_values(metric: Metric, mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySelection(metric.to_string()));
        }
        values.sort_by(f64::total_cmp);
        let n = values.len();
        let mean = values.iter().sum::<f64>() / n as f64;
        let median = if n % 2 == 1 {
            values[n / 2]
        } else {
            0.5 * (values[n / 2 - 1] + values[n / 2])
        };
        let cdf = values
            .iter()
            .enumerate()
            .map(|(i, &v)| (v, (i + 1) as f64 / n as f64))
            .collect();
        Ok(Self {
            metric,
            count: n,
            mean,
            median,
            cdf,
        })
    }
}

/// Thresholds for picking a benchmark region out of the working qubits.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct QualityCriteria {
    pub max_e1: Option<f64>,
    pub max_e3: Option<f64>,
    pub min_t1_us: Option<f64>,
}

impl QualityCriteria {
    fn accepts(&self, q: &QubitRecord) -> bool {
        let le = |v: Option<f64>, lim: Option<f64>| match (v, lim) {
            (_, None) => true,
            (Some(v), Some(l)) => v <= l,
            (None, Some(_)) => false,
        };
        let ge = |v: Option<f64>, lim: Option<f64>| match (v, lim) {
            (_, None) => true,
            (Some(v), Some(l)) => v >= l,
            (None, Some(_)) => false,
        };
        le(q.e1, self.max_e1) && le(q.e3, self.max_e3) && ge(q.t1_us, self.min_t1_us)
    }
}
