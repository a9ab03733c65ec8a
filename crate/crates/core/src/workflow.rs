//! File-based task store behind the command-line pipeline.
//!
//! A task moves through construct (`gen`), transpile, execute (`run`) and
//! post-process (`xeb`, `fit`, `cost`, `report`, `export`). Everything lives
//! in one directory per task:
//!
//! ```text
//! <root>/<id>/task.json          status, timestamps, failure message
//!             manifest.json      layout, seeds, circuits, mapping options, backend
//!             config.json        hardware snapshot taken at `gen`
//!             circuits/<k>.qc    logical circuits
//!             mapping.json
//!             transpiled/<k>.qc  circuits on physical labels
//!             samples/<k>.txt
//!             results.json
//!             report/{curve.csv, curve.svg, error_cdf.csv, cost.json}
//! ```
//!
//! Files are written to a temporary name and renamed into place, and a lock
//! file admits one writer per task. Apart from the timestamps in
//! `task.json`, every artifact is a pure function of the config, manifest
//! and seeds.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::circuit::{
    self, generate_rcs, Circuit, GeneratorOptions, Layer, LayerKind, PatternSchedule, Qubit,
    DEFAULT_SEQUENCE,
};
use crate::embed::{
    apply_mapping, check_mapping, embed, mapping_score, CouplerAssignment, EmbedOptions, Mapping,
    Strategy,
};
use crate::error::{Error, Result};
use crate::hwmodel::{HardwareModel, Metric, QualityCriteria};
use crate::noise::{forecast_fidelity, identity_map, sample_pauli_trajectories, sample_white_noise};
use crate::rng::{SeededRng, GENERATOR_NAME};
use crate::samples::SampleSet;
use crate::statevec::sample;
use crate::tncost::{build_network, cost_report, plan_contraction, CostReport, MachineProfile};
use crate::xeb::{
    attach_forecast, curve_csv, curve_from_estimates, curve_svg, fit_decay, fit_fsim_batch,
    linear_xeb, CurvePoint, DecayFit, FsimFitOptions, FsimFitResult, XebEstimate,
};

/// The synthetic calibration file shipped with the crate.
pub const BUNDLED_CONFIG: &str = include_str!("../data/tianyan287-like.json");

pub fn bundled_config() -> HardwareModel {
    HardwareModel::from_json_str(BUNDLED_CONFIG).expect("bundled config is valid")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TaskStatus {
    Created,
    Transpiled,
    Running,
    Done,
    Failed,
}

impl TaskStatus {
    pub fn can_become(self, next: TaskStatus) -> bool {
        use TaskStatus::*;
        matches!(
            (self, next),
            (Created, Transpiled) | (Transpiled, Running) | (Running, Running) | (Running, Done) | (Running, Failed)
        )
    }
}

impl fmt::Display for TaskStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            TaskStatus::Created => "created",
            TaskStatus::Transpiled => "transpiled",
            TaskStatus::Running => "running",
            TaskStatus::Done => "done",
            TaskStatus::Failed => "failed",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StatusChange {
    pub status: TaskStatus,
    pub at: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TaskRecord {
    pub status: TaskStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
    pub created_at: String,
    pub updated_at: String,
    pub history: Vec<StatusChange>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Backend {
    Ideal,
    WhiteNoise { fidelity: f64 },
    PauliTrajectory,
}

impl FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ideal" => Ok(Backend::Ideal),
            "pauli" | "pauli-trajectory" => Ok(Backend::PauliTrajectory),
            _ => match s.split_once(':') {
                Some(("white-noise", f)) => {
                    let fidelity: f64 = f
                        .parse()
                        .map_err(|_| Error::Domain(format!("bad fidelity {f:?}")))?;
                    if !(0.0..=1.0).contains(&fidelity) {
                        return Err(Error::Domain(format!("fidelity {fidelity} outside [0, 1]")));
                    }
                    Ok(Backend::WhiteNoise { fidelity })
                }
                _ => Err(Error::Domain(format!(
                    "unknown backend {s:?} (ideal | white-noise:<F> | pauli)"
                ))),
            },
        }
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Backend::Ideal => f.write_str("ideal"),
            Backend::WhiteNoise { fidelity } => write!(f, "white-noise:{fidelity}"),
            Backend::PauliTrajectory => f.write_str("pauli"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircuitEntry {
    pub index: usize,
    pub cycles: usize,
    pub instance: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TranspileSettings {
    pub strategy: Strategy,
    pub identity: bool,
    pub node_budget: Option<u64>,
    pub calibrated_params: bool,
    pub criteria: QualityCriteria,
    pub excluded: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Execution {
    pub backend: Backend,
    pub shots: usize,
    pub seeds: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub format: u32,
    pub rng: String,
    pub seed: u64,
    pub config: String,
    pub qubits: Vec<Qubit>,
    pub schedule: PatternSchedule,
    pub generator: GeneratorOptions,
    pub circuits: Vec<CircuitEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transpile: Option<TranspileSettings>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub execution: Option<Execution>,
}

/// Circuit layout to generate.
#[derive(Clone, Debug, PartialEq)]
pub enum Layout {
    Grid { rows: u32, cols: u32 },
    /// The 10-qubit example layout (qubits 1..=10, patterns A-D).
    TenQubitExample,
}

impl Layout {
    /// Most nearly square `rows x cols` grid with `n` qubits.
    pub fn for_qubits(n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("need at least one qubit".into()));
        }
        let rows = (1..=n).filter(|r| n % r == 0 && r * r <= n).max().unwrap_or(1);
        Ok(Layout::Grid { rows, cols: n / rows })
    }

    fn build(&self) -> (Vec<Qubit>, PatternSchedule) {
        match self {
            Layout::Grid { rows, cols } => (
                PatternSchedule::grid_qubits(*rows, *cols),
                PatternSchedule::grid(*rows, *cols),
            ),
            Layout::TenQubitExample => PatternSchedule::ten_qubit_example(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GenSpec {
    pub layout: Layout,
    pub cycles: Vec<usize>,
    pub repeat: usize,
    pub seed: u64,
    pub sequence: Option<String>,
    pub options: GeneratorOptions,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct TranspileSpec {
    pub strategy: Strategy,
    /// Map every logical qubit to the physical qubit with the same id.
    pub identity: bool,
    pub node_budget: Option<u64>,
    pub calibrated_params: bool,
    pub criteria: QualityCriteria,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircuitResult {
    pub index: usize,
    pub cycles: usize,
    pub instance: usize,
    pub xeb: XebEstimate,
    pub forecast: f64,
    pub forecast_single: f64,
    pub forecast_two: f64,
    pub forecast_readout: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TaskResults {
    pub backend: Backend,
    pub shots: usize,
    pub circuits: Vec<CircuitResult>,
    pub curve: Vec<CurvePoint>,
    pub decay: Option<DecayFit>,
    #[serde(default)]
    pub fits: BTreeMap<String, FsimFitResult>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportFiles {
    pub curve_csv: PathBuf,
    pub curve_svg: PathBuf,
    pub error_cdf_csv: PathBuf,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CostSpec {
    pub profile: MachineProfile,
    pub n_samples: u64,
    pub fidelity: Option<f64>,
    pub restarts: usize,
}

const FORMAT: u32 = 1;
const SEED_DOMAIN_CIRCUIT: u64 = 1;
const SEED_DOMAIN_RUN: u64 = 2;
const SEED_DOMAIN_COST: u64 = 3;

/// Independent child seed for item `k` of a given purpose.
pub fn derive_seed(seed: u64, domain: u64, k: u64) -> u64 {
    SeededRng::substream(seed, (domain << 40) | k).next_u64()
}

fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    Ok(serde_json::from_str(&read_file(path)?)?)
}

/// Writes via a temporary sibling and a rename, so readers never see a
/// partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().unwrap_or(Path::new("."));
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("file");
    let tmp = dir.join(format!(".{name}.tmp"));
    let mut f = fs::File::create(&tmp).map_err(|e| Error::io(&tmp, e))?;
    f.write_all(bytes).map_err(|e| Error::io(&tmp, e))?;
    f.sync_all().map_err(|e| Error::io(&tmp, e))?;
    drop(f);
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

fn now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true)
}

/// Held while a command mutates a task directory.
struct TaskLock {
    path: PathBuf,
}

impl TaskLock {
    fn acquire(dir: &Path, id: &str) -> Result<Self> {
        let path = dir.join(".lock");
        for _ in 0..2 {
            match fs::OpenOptions::new().write(true).create_new(true).open(&path) {
                Ok(mut f) => {
                    let _ = write!(f, "{}", std::process::id());
                    return Ok(Self { path });
                }
                Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => {
                    if lock_is_stale(&path) {
                        let _ = fs::remove_file(&path);
                        continue;
                    }
                    return Err(Error::Locked(id.to_string()));
                }
                Err(e) => return Err(Error::io(&path, e)),
            }
        }
        Err(Error::Locked(id.to_string()))
    }
}

impl Drop for TaskLock {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.path);
    }
}

/// A lock whose owner process no longer exists (Linux `/proc` check).
fn lock_is_stale(path: &Path) -> bool {
    let Ok(text) = fs::read_to_string(path) else {
        return false;
    };
    let Ok(pid) = text.trim().parse::<u32>() else {
        return false;
    };
    let proc = Path::new("/proc");
    proc.is_dir() && !proc.join(pid.to_string()).exists()
}

fn concat_layers(circuits: &[Circuit]) -> Result<Circuit> {
    let first = circuits
        .first()
        .ok_or_else(|| Error::Domain("task has no circuits".into()))?;
    let mut layers: Vec<Layer> = Vec::new();
    let mut measured: BTreeSet<Qubit> = BTreeSet::new();
    for c in circuits {
        for l in c.layers() {
            if l.kind == LayerKind::Measure {
                measured.extend(c.measured());
            } else {
                layers.push(l.clone());
            }
        }
    }
    let order: Vec<Qubit> = first
        .qubits()
        .iter()
        .copied()
        .filter(|q| measured.contains(q))
        .collect();
    if !order.is_empty() {
        layers.push(Layer::measure(order));
    }
    Circuit::new(first.qubits().to_vec(), layers)
}

fn pair_label(pair: (Qubit, Qubit)) -> String {
    format!("{}-{}", pair.0, pair.1)
}

pub struct TaskStore {
    root: PathBuf,
}

impl TaskStore {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Self { root: root.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn task_dir(&self, id: &str) -> PathBuf {
        self.root.join(id)
    }

    fn existing_dir(&self, id: &str) -> Result<PathBuf> {
        let dir = self.task_dir(id);
        if id.is_empty() || id.contains(['/', '\\']) || !dir.join("task.json").is_file() {
            return Err(Error::UnknownTask(id.to_string()));
        }
        Ok(dir)
    }

    pub fn list(&self) -> Result<Vec<(String, TaskStatus)>> {
        let mut out = Vec::new();
        let entries = match fs::read_dir(&self.root) {
            Ok(e) => e,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(out),
            Err(e) => return Err(Error::io(&self.root, e)),
        };
        for entry in entries {
            let entry = entry.map_err(|e| Error::io(&self.root, e))?;
            let name = entry.file_name().to_string_lossy().to_string();
            if let Ok(rec) = self.record(&name) {
                out.push((name, rec.status));
            }
        }
        out.sort_by(|a, b| a.0.cmp(&b.0));
        Ok(out)
    }

    pub fn record(&self, id: &str) -> Result<TaskRecord> {
        read_json(&self.existing_dir(id)?.join("task.json"))
    }

    pub fn manifest(&self, id: &str) -> Result<Manifest> {
        read_json(&self.existing_dir(id)?.join("manifest.json"))
    }

    pub fn config(&self, id: &str) -> Result<HardwareModel> {
        HardwareModel::from_json_str(&read_file(&self.existing_dir(id)?.join("config.json"))?)
    }

    pub fn mapping(&self, id: &str) -> Result<Mapping> {
        Mapping::from_json_str(&read_file(&self.existing_dir(id)?.join("mapping.json"))?)
    }

    fn load_circuits(&self, id: &str, sub: &str) -> Result<Vec<Circuit>> {
        let dir = self.existing_dir(id)?;
        let manifest = self.manifest(id)?;
        manifest
            .circuits
            .iter()
            .map(|e| {
                let path = dir.join(sub).join(format!("{}.qc", e.index));
                circuit::parse(&read_file(&path)?)
            })
            .collect()
    }

    /// Logical circuits as generated.
    pub fn circuits(&self, id: &str) -> Result<Vec<Circuit>> {
        self.load_circuits(id, "circuits")
    }

    /// Circuits on physical labels.
    pub fn transpiled(&self, id: &str) -> Result<Vec<Circuit>> {
        self.load_circuits(id, "transpiled")
    }

    pub fn samples(&self, id: &str) -> Result<Vec<SampleSet>> {
        let dir = self.existing_dir(id)?;
        self.manifest(id)?
            .circuits
            .iter()
            .map(|e| SampleSet::load(dir.join("samples").join(format!("{}.txt", e.index))))
            .collect()
    }

    fn set_status(&self, dir: &Path, next: TaskStatus, message: Option<String>) -> Result<TaskRecord> {
        let path = dir.join("task.json");
        let mut rec: TaskRecord = read_json(&path)?;
        if !rec.status.can_become(next) {
            return Err(Error::IllegalTransition {
                from: rec.status.to_string(),
                to: next.to_string(),
            });
        }
        let at = now();
        if rec.status != next {
            rec.history.push(StatusChange {
                status: next,
                at: at.clone(),
            });
        }
        rec.status = next;
        rec.message = message;
        rec.updated_at = at;
        write_json(&path, &rec)?;
        Ok(rec)
    }

    fn require(&self, id: &str, allowed: &[TaskStatus], next: TaskStatus) -> Result<TaskRecord> {
        let rec = self.record(id)?;
        if !allowed.contains(&rec.status) {
            return Err(Error::IllegalTransition {
                from: rec.status.to_string(),
                to: next.to_string(),
            });
        }
        Ok(rec)
    }

    fn require_done(&self, id: &str) -> Result<()> {
        let rec = self.record(id)?;
        if rec.status != TaskStatus::Done {
            return Err(Error::TaskNotDone {
                id: id.to_string(),
                status: rec.status.to_string(),
                message: rec.message.unwrap_or_else(|| "no results yet".into()),
            });
        }
        Ok(())
    }

    fn new_id(&self) -> String {
        let nanos = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_nanos() as u64)
            .unwrap_or(0);
        let mut rng = SeededRng::new(nanos ^ ((std::process::id() as u64) << 32));
        loop {
            let id = format!(
                "{}-{:06x}",
                chrono::Utc::now().format("%Y%m%dT%H%M%S"),
                rng.below(1 << 24)
            );
            if !self.task_dir(&id).exists() {
                return id;
            }
        }
    }

    /// Construct step: writes the logical circuits and returns the new task
    /// id.
    pub fn create(&self, model: &HardwareModel, spec: &GenSpec) -> Result<String> {
        if spec.cycles.is_empty() || spec.repeat == 0 {
            return Err(Error::Domain("need at least one depth and one instance".into()));
        }
        let (qubits, mut schedule) = spec.layout.build();
        schedule = schedule.with_sequence(spec.sequence.as_deref().unwrap_or(DEFAULT_SEQUENCE))?;
        schedule.validate(&qubits)?;

        let mut entries = Vec::new();
        let mut texts = Vec::new();
        for &m in &spec.cycles {
            for r in 0..spec.repeat {
                let index = entries.len();
                let seed = derive_seed(spec.seed, SEED_DOMAIN_CIRCUIT, index as u64);
                let c = generate_rcs(&qubits, &schedule, m, seed, spec.options)?;
                texts.push(circuit::serialize(&c));
                entries.push(CircuitEntry {
                    index,
                    cycles: m,
                    instance: r,
                    seed,
                });
            }
        }
        let manifest = Manifest {
            format: FORMAT,
            rng: GENERATOR_NAME.to_string(),
            seed: spec.seed,
            config: model.name().to_string(),
            qubits,
            schedule,
            generator: spec.options,
            circuits: entries,
            transpile: None,
            execution: None,
        };

        fs::create_dir_all(&self.root).map_err(|e| Error::io(&self.root, e))?;
        let id = self.new_id();
        let dir = self.task_dir(&id);
        fs::create_dir(&dir).map_err(|e| Error::io(&dir, e))?;
        let _lock = TaskLock::acquire(&dir, &id)?;
        for (e, text) in manifest.circuits.iter().zip(&texts) {
            write_atomic(&dir.join("circuits").join(format!("{}.qc", e.index)), text.as_bytes())?;
        }
        write_atomic(&dir.join("config.json"), model.to_json_string().as_bytes())?;
        write_json(&dir.join("manifest.json"), &manifest)?;
        let at = now();
        write_json(
            &dir.join("task.json"),
            &TaskRecord {
                status: TaskStatus::Created,
                message: None,
                created_at: at.clone(),
                updated_at: at.clone(),
                history: vec![StatusChange {
                    status: TaskStatus::Created,
                    at,
                }],
            },
        )?;
        Ok(id)
    }

    /// Transpile step: one placement for all circuits of the task.
    pub fn transpile(&self, id: &str, spec: &TranspileSpec) -> Result<Mapping> {
        let dir = self.existing_dir(id)?;
        let _lock = TaskLock::acquire(&dir, id)?;
        self.require(id, &[TaskStatus::Created], TaskStatus::Transpiled)?;
        let model = self.config(id)?;
        let circuits = self.circuits(id)?;
        let union = concat_layers(&circuits)?;
        let selected = model.select_qubits(&spec.criteria);
        let excluded: BTreeSet<u32> = model
            .working_qubits()
            .map(|q| q.id)
            .filter(|q| !selected.contains(q))
            .collect();

        let mapping = if spec.identity {
            let qubits = identity_map(&union);
            if let Some(q) = qubits.values().find(|q| excluded.contains(q)) {
                return Err(Error::Mapping(format!("identity placement uses excluded qubit {q}")));
            }
            check_mapping(&union, &model, &qubits)?;
            let couplers = union
                .coupled_pairs()
                .into_iter()
                .map(|(a, b)| CouplerAssignment {
                    logical: (a, b),
                    physical: (a, b),
                    coupler: model.coupler_between(a, b).map(|c| c.id).unwrap_or(u32::MAX),
                })
                .collect();
            Mapping {
                score: mapping_score(&union, &model, &qubits)?,
                qubits,
                couplers,
                exhaustive: true,
                nodes: 0,
            }
        } else {
            embed(
                &union,
                &model,
                &EmbedOptions {
                    strategy: spec.strategy,
                    node_budget: spec.node_budget,
                    excluded: excluded.clone(),
                },
            )?
        };

        let calibrated = spec.calibrated_params.then_some(&model);
        for (k, c) in circuits.iter().enumerate() {
            let physical = apply_mapping(c, &mapping, calibrated)?;
            write_atomic(
                &dir.join("transpiled").join(format!("{k}.qc")),
                circuit::serialize(&physical).as_bytes(),
            )?;
        }
        write_atomic(&dir.join("mapping.json"), format!("{}\n", mapping.to_json_string()).as_bytes())?;
        let mut manifest = self.manifest(id)?;
        manifest.transpile = Some(TranspileSettings {
            strategy: spec.strategy,
            identity: spec.identity,
            node_budget: spec.node_budget,
            calibrated_params: spec.calibrated_params,
            criteria: spec.criteria.clone(),
            excluded: excluded.into_iter().collect(),
        });
        write_json(&dir.join("manifest.json"), &manifest)?;
        self.set_status(&dir, TaskStatus::Transpiled, None)?;
        Ok(mapping)
    }

    /// Execute step. A task left `running` by an interrupted run resumes with
    /// its recorded backend, skipping circuits whose samples already exist.
    pub fn run(&self, id: &str, backend: Backend, shots: usize) -> Result<Execution> {
        let dir = self.existing_dir(id)?;
        let _lock = TaskLock::acquire(&dir, id)?;
        let rec = self.require(id, &[TaskStatus::Transpiled, TaskStatus::Running], TaskStatus::Running)?;
        if shots < 1 {
            return Err(Error::Domain("shots must be at least 1".into()));
        }
        let mut manifest = self.manifest(id)?;
        let execution = match (rec.status, &manifest.execution) {
            (TaskStatus::Running, Some(ex)) => {
                if ex.backend != backend || ex.shots != shots {
                    return Err(Error::Domain(format!(
                        "task {id} is resuming a run with backend {} and {} shots",
                        ex.backend, ex.shots
                    )));
                }
                ex.clone()
            }
            _ => {
                let ex = Execution {
                    backend,
                    shots,
                    seeds: (0..manifest.circuits.len())
                        .map(|k| derive_seed(manifest.seed, SEED_DOMAIN_RUN, k as u64))
                        .collect(),
                };
                manifest.execution = Some(ex.clone());
                write_json(&dir.join("manifest.json"), &manifest)?;
                self.set_status(&dir, TaskStatus::Running, None)?;
                ex
            }
        };

        let outcome = (|| -> Result<()> {
            let model = self.config(id)?;
            let circuits = self.transpiled(id)?;
            for (k, c) in circuits.iter().enumerate() {
                let path = dir.join("samples").join(format!("{k}.txt"));
                if path.is_file() {
                    continue;
                }
                let seed = execution.seeds[k];
                let s = match execution.backend {
                    Backend::Ideal => sample(c, shots, seed)?,
                    Backend::WhiteNoise { fidelity } => sample_white_noise(c, fidelity, shots, seed)?,
                    Backend::PauliTrajectory => {
                        sample_pauli_trajectories(c, &model, &identity_map(c), shots, seed)?
                    }
                };
                write_atomic(&path, s.to_text().as_bytes())?;
            }
            Ok(())
        })();
        match outcome {
            Ok(()) => {
                self.set_status(&dir, TaskStatus::Done, None)?;
                Ok(execution)
            }
            Err(e) => {
                self.set_status(&dir, TaskStatus::Failed, Some(e.to_string()))?;
                Err(e)
            }
        }
    }

    /// Per-circuit XEB and forecasts recomputed from stored artifacts.
    pub fn analyze(&self, id: &str) -> Result<TaskResults> {
        self.require_done(id)?;
        let manifest = self.manifest(id)?;
        let execution = manifest
            .execution
            .clone()
            .ok_or_else(|| Error::Domain(format!("task {id} has no execution record")))?;
        let model = self.config(id)?;
        let circuits = self.transpiled(id)?;
        let samples = self.samples(id)?;
        let mut results = Vec::new();
        let mut estimates = Vec::new();
        let mut forecasts = Vec::new();
        for ((e, c), s) in manifest.circuits.iter().zip(&circuits).zip(&samples) {
            let xeb = linear_xeb(s, c)?;
            let f = forecast_fidelity(c, &model, &identity_map(c))?;
            estimates.push((e.cycles, xeb));
            forecasts.push((e.cycles, f.f_est));
            results.push(CircuitResult {
                index: e.index,
                cycles: e.cycles,
                instance: e.instance,
                xeb,
                forecast: f.f_est,
                forecast_single: f.single_qubit,
                forecast_two: f.two_qubit,
                forecast_readout: f.readout,
            });
        }
        let mut curve = curve_from_estimates(&estimates)?;
        attach_forecast(&mut curve, &forecasts);
        let fits = self.stored_results(id).map(|r| r.fits).unwrap_or_default();
        Ok(TaskResults {
            backend: execution.backend,
            shots: execution.shots,
            circuits: results,
            decay: fit_decay(&curve),
            curve,
            fits,
        })
    }

    fn stored_results(&self, id: &str) -> Option<TaskResults> {
        read_json(&self.task_dir(id).join("results.json")).ok()
    }

    /// Post-process step: computes and stores `results.json`.
    pub fn xeb(&self, id: &str) -> Result<TaskResults> {
        let dir = self.existing_dir(id)?;
        let _lock = TaskLock::acquire(&dir, id)?;
        let results = self.analyze(id)?;
        write_json(&dir.join("results.json"), &results)?;
        Ok(results)
    }

    /// Stored results of a finished task (read-only).
    pub fn result(&self, id: &str) -> Result<TaskResults> {
        self.require_done(id)?;
        match self.stored_results(id) {
            Some(r) => Ok(r),
            None => self.analyze(id),
        }
    }

    /// Refits the fSim angles of one physical pair against every circuit
    /// that uses it.
    pub fn fit(
        &self,
        id: &str,
        pair: (Qubit, Qubit),
        init: Option<(f64, f64)>,
        options: &FsimFitOptions,
    ) -> Result<FsimFitResult> {
        let dir = self.existing_dir(id)?;
        let _lock = TaskLock::acquire(&dir, id)?;
        self.require_done(id)?;
        let circuits = self.transpiled(id)?;
        let samples = self.samples(id)?;
        let key = circuit::pair_key(pair.0, pair.1);
        let instances: Vec<(&Circuit, &SampleSet)> = circuits
            .iter()
            .zip(&samples)
            .filter(|(c, _)| c.coupled_pairs().contains(&key))
            .collect();
        let init = match init {
            Some(i) => i,
            None => instances
                .first()
                .and_then(|(c, _)| {
                    c.gates().find_map(|g| match g {
                        circuit::Gate::Fsim { q0, q1, theta, phi }
                            if circuit::pair_key(*q0, *q1) == key =>
                        {
                            Some((*theta, *phi))
                        }
                        _ => None,
                    })
                })
                .ok_or_else(|| {
                    Error::Fit(format!("no circuit in task {id} has an FSIM gate on {key:?}"))
                })?,
        };
        let fit = fit_fsim_batch(&instances, key, init, options)?;
        let mut results = match self.stored_results(id) {
            Some(r) => r,
            None => self.analyze(id)?,
        };
        results.fits.insert(pair_label(key), fit.clone());
        write_json(&dir.join("results.json"), &results)?;
        Ok(fit)
    }

    /// Contraction cost of the deepest circuit's amplitude, scaled to a
    /// sampling task. Writes `report/cost.json`.
    pub fn cost(&self, id: &str, spec: &CostSpec) -> Result<CostReport> {
        let dir = self.existing_dir(id)?;
        let _lock = TaskLock::acquire(&dir, id)?;
        let manifest = self.manifest(id)?;
        let transpiled = self.transpiled(id).ok();
        let circuits = match &transpiled {
            Some(t) => t.clone(),
            None => self.circuits(id)?,
        };
        let k = manifest
            .circuits
            .iter()
            .max_by(|a, b| a.cycles.cmp(&b.cycles).then(b.index.cmp(&a.index)))
            .map(|e| e.index)
            .ok_or_else(|| Error::Domain("task has no circuits".into()))?;
        let c = &circuits[k];
        let fidelity = match (spec.fidelity, &transpiled) {
            (Some(f), _) => f,
            (None, Some(_)) => forecast_fidelity(c, &self.config(id)?, &identity_map(c))?.f_est,
            (None, None) => 1.0,
        };
        let net = build_network(c, &"0".repeat(c.n_qubits()))?;
        let plan = plan_contraction(
            &net,
            spec.profile.memory_cap_elements(),
            derive_seed(manifest.seed, SEED_DOMAIN_COST, 0),
            spec.restarts,
        )?;
        let report = cost_report(&plan, spec.n_samples, fidelity, &spec.profile)?;
        write_json(&dir.join("report").join("cost.json"), &report)?;
        Ok(report)
    }

    /// Curve CSV/SVG and calibration CDFs; also refreshes `results.json`.
    pub fn report(&self, id: &str) -> Result<ReportFiles> {
        let dir = self.existing_dir(id)?;
        let _lock = TaskLock::acquire(&dir, id)?;
        let results = self.analyze(id)?;
        write_json(&dir.join("results.json"), &results)?;
        let report = dir.join("report");
        let files = ReportFiles {
            curve_csv: report.join("curve.csv"),
            curve_svg: report.join("curve.svg"),
            error_cdf_csv: report.join("error_cdf.csv"),
        };
        write_atomic(&files.curve_csv, curve_csv(&results.curve).as_bytes())?;
        write_atomic(&files.curve_svg, curve_svg(&results.curve).as_bytes())?;
        write_atomic(&files.error_cdf_csv, error_cdf_csv(&self.config(id)?)?.as_bytes())?;
        Ok(files)
    }

    /// Zips the task directory (entries sorted, fixed timestamps) to `out`,
    /// default `<root>/<id>.zip`.
    pub fn export(&self, id: &str, out: Option<&Path>) -> Result<PathBuf> {
        let dir = self.existing_dir(id)?;
        let _lock = TaskLock::acquire(&dir, id)?;
        let out = out
            .map(Path::to_path_buf)
            .unwrap_or_else(|| self.root.join(format!("{id}.zip")));
        let mut files = Vec::new();
        collect_files(&dir, &dir, &mut files)?;
        files.sort();
        let mut buf = std::io::Cursor::new(Vec::new());
        {
            let mut zip = zip::ZipWriter::new(&mut buf);
            let opts = zip::write::SimpleFileOptions::default()
                .compression_method(zip::CompressionMethod::Deflated)
                .last_modified_time(zip::DateTime::default())
                .unix_permissions(0o644);
            for rel in &files {
                let bytes = fs::read(dir.join(rel)).map_err(|e| Error::io(dir.join(rel), e))?;
                zip.start_file(format!("{id}/{rel}"), opts)
                    .map_err(|e| Error::Archive(e.to_string()))?;
                zip.write_all(&bytes).map_err(|e| Error::io(&out, e))?;
            }
            zip.finish().map_err(|e| Error::Archive(e.to_string()))?;
        }
        write_atomic(&out, buf.get_ref())?;
        Ok(out)
    }

    /// Unpacks an exported archive into the store; returns the task id.
    pub fn import(&self, archive: &Path) -> Result<String> {
        let bytes = fs::read(archive).map_err(|e| Error::io(archive, e))?;
        let mut zip = zip::ZipArchive::new(std::io::Cursor::new(bytes))
            .map_err(|e| Error::Archive(e.to_string()))?;
        let mut id: Option<String> = None;
        let mut entries = Vec::new();
        for i in 0..zip.len() {
            let mut f = zip.by_index(i).map_err(|e| Error::Archive(e.to_string()))?;
            let name = f
                .enclosed_name()
                .ok_or_else(|| Error::Archive(format!("unsafe entry name {:?}", f.name())))?;
            let mut parts = name.components();
            let top = parts
                .next()
                .map(|c| c.as_os_str().to_string_lossy().to_string())
                .ok_or_else(|| Error::Archive("empty entry name".into()))?;
            let rel: PathBuf = parts.collect();
            match &id {
                None => id = Some(top),
                Some(t) if *t != top => {
                    return Err(Error::Archive(format!("archive mixes tasks {t} and {top}")))
                }
                _ => {}
            }
            if f.is_dir() {
                continue;
            }
            let mut data = Vec::new();
            f.read_to_end(&mut data).map_err(|e| Error::io(archive, e))?;
            entries.push((rel, data));
        }
        let id = id.ok_or_else(|| Error::Archive("empty archive".into()))?;
        let dir = self.task_dir(&id);
        if dir.exists() {
            return Err(Error::Archive(format!("task {id} already exists in {}", self.root.display())));
        }
        if !entries.iter().any(|(rel, _)| rel == Path::new("task.json")) {
            return Err(Error::Archive("archive has no task.json".into()));
        }
        for (rel, data) in entries {
            write_atomic(&dir.join(rel), &data)?;
        }
        Ok(id)
    }
}

fn collect_files(base: &Path, dir: &Path, out: &mut Vec<String>) -> Result<()> {
    for entry in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let entry = entry.map_err(|e| Error::io(dir, e))?;
        let path = entry.path();
        let name = entry.file_name().to_string_lossy().to_string();
        if name.starts_with('.') {
            continue;
        }
        if path.is_dir() {
            collect_files(base, &path, out)?;
        } else {
            let rel = path.strip_prefix(base).expect("under base");
            let parts: Vec<String> = rel
                .components()
                .map(|c| c.as_os_str().to_string_lossy().to_string())
                .collect();
            out.push(parts.join("/"));
        }
    }
    Ok(())
}

/// `metric,value,cdf` rows for e1, e2 and e3 over working elements.
pub fn error_cdf_csv(model: &HardwareModel) -> Result<String> {
    let mut out = String::from("metric,value,cdf\n");
    for metric in [Metric::E1, Metric::E2, Metric::E3] {
        let summary = match model.error_summary(metric) {
            Ok(s) => s,
            Err(Error::EmptySelection(_)) => continue,
            Err(e) => return Err(e),
        };
        for (v, f) in summary.cdf {
            out.push_str(&format!("{metric},{v},{f}\n"));
        }
    }
    Ok(out)
}
