use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use serde::Serialize;

use rcsbench::circuit::{GeneratorOptions, Qubit};
use rcsbench::embed::Strategy;
use rcsbench::hwmodel::{load_config, HardwareModel, QualityCriteria};
use rcsbench::tncost::{estimate_runtime, estimate_sampling_cost, MachineProfile, DEFAULT_RESTARTS};
use rcsbench::workflow::{
    bundled_config, Backend, CostSpec, GenSpec, Layout, TaskStore, TranspileSpec,
};
use rcsbench::xeb::FsimFitOptions;

/// Random circuit sampling benchmark pipeline: generate, transpile, run,
/// analyze and cost RCS experiments against a local calibration model.
#[derive(Parser)]
#[command(name = "rcsbench", version)]
struct Cli {
    /// Hardware calibration JSON (defaults to the bundled synthetic config).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory holding task directories.
    #[arg(long, global = true, default_value = "task")]
    task_root: PathBuf,
    /// Master seed for `gen`.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Print machine-readable JSON on stdout.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate RCS circuits into a new task; prints the task id.
    Gen {
        /// Grid size as ROWSxCOLS, e.g. 4x4.
        #[arg(long, conflicts_with_all = ["qubits", "ten_qubit_example"])]
        grid: Option<String>,
        /// Number of qubits; picks the most nearly square grid.
        #[arg(long)]
        qubits: Option<u32>,
        /// Use the 10-qubit example layout with patterns A-D.
        #[arg(long)]
        ten_qubit_example: bool,
        /// Circuit depths (comma separated).
        #[arg(long, value_delimiter = ',', required = true)]
        cycles: Vec<usize>,
        /// Instances per depth.
        #[arg(long, default_value_t = 1)]
        repeat: usize,
        /// Pattern sequence, e.g. ABCDCDAB.
        #[arg(long)]
        sequence: Option<String>,
        /// Allow a qubit to repeat its single-qubit gate in consecutive layers.
        #[arg(long)]
        allow_repeat: bool,
        #[arg(long, default_value_t = std::f64::consts::FRAC_PI_2)]
        theta: f64,
        #[arg(long, default_value_t = std::f64::consts::FRAC_PI_6)]
        phi: f64,
    },
    /// Place the task's circuits on the hardware.
    Transpile {
        task: String,
        /// first | best
        #[arg(long, default_value = "best")]
        strategy: Strategy,
        /// Search node budget for the embedding.
        #[arg(long, default_value_t = rcsbench::embed::DEFAULT_NODE_BUDGET)]
        node_budget: u64,
        /// Keep logical labels as physical labels.
        #[arg(long)]
        identity: bool,
        /// Replace fSim angles with each coupler's calibrated values.
        #[arg(long)]
        calibrated: bool,
        #[arg(long)]
        max_e1: Option<f64>,
        #[arg(long)]
        max_e3: Option<f64>,
        #[arg(long)]
        min_t1: Option<f64>,
    },
    /// Sample every circuit of the task on a backend.
    Run {
        task: String,
        /// ideal | white-noise:<F> | pauli
        #[arg(long, default_value = "ideal")]
        backend: Backend,
        #[arg(long, default_value_t = 100_000)]
        shots: usize,
    },
    /// Compute linear XEB per circuit and per depth; writes results.json.
    Xeb { task: String },
    /// Fit fSim angles on one coupler from the task's samples.
    Fit {
        task: String,
        /// Physical pair as A-B.
        #[arg(long)]
        pair: String,
        #[arg(long, requires = "phi0")]
        theta0: Option<f64>,
        #[arg(long, requires = "theta0")]
        phi0: Option<f64>,
        #[arg(long, default_value_t = 500)]
        budget: usize,
    },
    /// Tensor-network cost of classically spoofing the task, or of raw FLOPs.
    Cost {
        task: Option<String>,
        /// Total complex FLOPs to convert into runtime (no task needed).
        #[arg(long, conflicts_with = "task")]
        flops: Option<f64>,
        /// Machine profile.
        #[arg(long, default_value = "frontier-9.2PB")]
        profile: String,
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
        /// Target fidelity (defaults to the task's forecast).
        #[arg(long)]
        fidelity: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_RESTARTS)]
        restarts: usize,
    },
    /// Write curve CSV/SVG and calibration error CDFs.
    Report { task: String },
    /// Zip the task directory.
    Export {
        task: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Unpack an exported archive into the task root.
    Import { archive: PathBuf },
    /// Show one task's status, or list all tasks.
    Status { task: Option<String> },
}

fn parse_pair(s: &str) -> Result<(Qubit, Qubit)> {
    let (a, b) = s
        .split_once('-')
        .with_context(|| format!("pair {s:?} must look like A-B"))?;
    Ok((a.trim().parse()?, b.trim().parse()?))
}

fn parse_grid(s: &str) -> Result<Layout> {
    let (r, c) = s
        .split_once(['x', 'X'])
        .with_context(|| format!("grid {s:?} must look like ROWSxCOLS"))?;
    Ok(Layout::Grid {
        rows: r.parse()?,
        cols: c.parse()?,
    })
}

fn emit<T: Serialize>(json: bool, value: &T, text: impl FnOnce() -> String) -> Result<()> {
    if json {
        println!("{}", serde_json::to_string_pretty(value)?);
    } else {
        println!("{}", text());
    }
    Ok(())
}

fn model(cli: &Cli) -> Result<HardwareModel> {
    Ok(match &cli.config {
        Some(p) => load_config(p)?,
        None => bundled_config(),
    })
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let store = TaskStore::new(&cli.task_root);
    let json = cli.json;
    match &cli.command {
        Command::Gen {
            grid,
            qubits,
            ten_qubit_example,
            cycles,
            repeat,
            sequence,
            allow_repeat,
            theta,
            phi,
        } => {
            let layout = match (grid, qubits, ten_qubit_example) {
                (Some(g), None, false) => parse_grid(g)?,
                (None, Some(n), false) => Layout::for_qubits(*n)?,
                (None, None, true) => Layout::TenQubitExample,
                _ => bail!("give exactly one of --grid, --qubits, --ten-qubit-example"),
            };
            let spec = GenSpec {
                layout,
                cycles: cycles.clone(),
                repeat: *repeat,
                seed: cli.seed,
                sequence: sequence.clone(),
                options: GeneratorOptions {
                    allow_repeat: *allow_repeat,
                    fsim_theta: *theta,
                    fsim_phi: *phi,
                },
            };
            let id = store.create(&model(&cli)?, &spec)?;
            emit(json, &serde_json::json!({ "task_id": id }), || id.clone())
        }
        Command::Transpile {
            task,
            strategy,
            node_budget,
            identity,
            calibrated,
            max_e1,
            max_e3,
            min_t1,
        } => {
            let mapping = store.transpile(
                task,
                &TranspileSpec {
                    strategy: *strategy,
                    identity: *identity,
                    node_budget: Some(*node_budget),
                    calibrated_params: *calibrated,
                    criteria: QualityCriteria {
                        max_e1: *max_e1,
                        max_e3: *max_e3,
                        min_t1_us: *min_t1,
                    },
                },
            )?;
            emit(json, &mapping, || {
                let mut s = format!(
                    "{task}: transpiled (score {:.6}, {} search nodes{})\n",
                    mapping.score,
                    mapping.nodes,
                    if mapping.exhaustive { "" } else { ", not exhaustive" }
                );
                for (l, p) in &mapping.qubits {
                    s.push_str(&format!("  Q{l} -> {p}\n"));
                }
                s.trim_end().to_string()
            })
        }
        Command::Run { task, backend, shots } => {
            let ex = store.run(task, *backend, *shots)?;
            emit(json, &ex, || {
                format!("{task}: done ({} circuits, {} shots, {})", ex.seeds.len(), ex.shots, ex.backend)
            })
        }
        Command::Xeb { task } => {
            let r = store.xeb(task)?;
            emit(json, &r, || {
                let mut s = String::from("cycles  instances  f_xeb        stderr       forecast\n");
                for p in &r.curve {
                    s.push_str(&format!(
                        "{:>6}  {:>9}  {:<11.6}  {:<11.6}  {}\n",
                        p.cycles,
                        p.instances,
                        p.estimate.f_xeb,
                        p.estimate.stderr,
                        p.f_forecast.map(|f| format!("{f:.6}")).unwrap_or_default()
                    ));
                }
                if let Some(d) = r.decay {
                    s.push_str(&format!("decay per cycle {:.6}, amplitude {:.6}\n", d.rate, d.amplitude));
                }
                s.trim_end().to_string()
            })
        }
        Command::Fit {
            task,
            pair,
            theta0,
            phi0,
            budget,
        } => {
            let pair = parse_pair(pair)?;
            let init = theta0.zip(*phi0);
            let opts = FsimFitOptions {
                budget: *budget,
                ..FsimFitOptions::default()
            };
            let fit = store.fit(task, pair, init, &opts)?;
            emit(json, &fit, || {
                format!(
                    "pair {}-{}: theta {:.6} phi {:.6} (objective {:.6}, fidelity {:.6}, {} evaluations, {} search steps)",
                    fit.pair.0, fit.pair.1, fit.theta, fit.phi, fit.objective, fit.fidelity, fit.trace.len(), fit.iterations
                )
            })
        }
        Command::Cost {
            task,
            flops,
            profile,
            samples,
            fidelity,
            restarts,
        } => {
            let profile = MachineProfile::named(profile)?;
            let report = match (task, flops) {
                (None, Some(f)) => {
                    let total = match fidelity {
                        Some(fid) => estimate_sampling_cost(*f, *samples, *fid)?,
                        None => *f,
                    };
                    let rt = estimate_runtime(total, &profile)?;
                    let v = serde_json::json!({
                        "profile": profile.name,
                        "total_flops": total,
                        "seconds": rt.seconds,
                        "years": rt.years,
                    });
                    return emit(json, &v, || {
                        format!("{total:.3e} complex FLOPs on {}: {:.3e} s = {:.4} years", profile.name, rt.seconds, rt.years)
                    });
                }
                (Some(id), None) => store.cost(
                    id,
                    &CostSpec {
                        profile,
                        n_samples: *samples,
                        fidelity: *fidelity,
                        restarts: *restarts,
                    },
                )?,
                _ => bail!("give a task id or --flops"),
            };
            emit(json, &report, || {
                format!(
                    "per amplitude {:.3e} complex FLOPs (peak {:.3e} elements, {} sliced bonds)\n\
                     {} samples at F={:.4}: {:.3e} FLOPs on {}: {:.3e} s = {:.4} years",
                    report.flops_complex,
                    report.peak_elements,
                    report.sliced_bonds,
                    report.n_samples,
                    report.fidelity,
                    report.total_flops,
                    report.profile.name,
                    report.seconds,
                    report.years
                )
            })
        }
        Command::Report { task } => {
            let files = store.report(task)?;
            emit(json, &files, || {
                format!(
                    "{}\n{}\n{}",
                    files.curve_csv.display(),
                    files.curve_svg.display(),
                    files.error_cdf_csv.display()
                )
            })
        }
        Command::Export { task, out } => {
            let path = store.export(task, out.as_deref())?;
            emit(json, &serde_json::json!({ "archive": path }), || path.display().to_string())
        }
        Command::Import { archive } => {
            let id = store.import(archive)?;
            emit(json, &serde_json::json!({ "task_id": id }), || id.clone())
        }
        Command::Status { task } => match task {
            Some(id) => {
                let rec = store.record(id)?;
                emit(json, &rec, || match &rec.message {
                    Some(m) => format!("{id}: {} ({m})", rec.status),
                    None => format!("{id}: {}", rec.status),
                })
            }
            None => {
                let all = store.list()?;
                let v: Vec<_> = all
                    .iter()
                    .map(|(id, s)| serde_json::json!({ "task_id": id, "status": s }))
                    .collect();
                emit(json, &v, || {
                    all.iter()
                        .map(|(id, s)| format!("{id}  {s}"))
                        .collect::<Vec<_>>()
                        .join("\n")
                })
            }
        },
    }
}
