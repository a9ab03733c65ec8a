//! Acceptance suite. Runs each criterion in sequence, prints one
//! `PASS`/`FAIL` line per criterion with its wall time and budget, and exits
//! non-zero if any criterion fails.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use rcsbench::circuit::{
    gate_census, generate_rcs, remove_cross_patch_gates, split_patches, Circuit, GeneratorOptions,
    PatternSchedule, Qubit,
};
use rcsbench::embed::{embed, EmbedOptions, Strategy};
use rcsbench::error::Error;
use rcsbench::hwmodel::{grid_pairs, CouplerRecord, HardwareModel, QubitRecord};
use rcsbench::noise::{forecast_fidelity, identity_map, sample_pauli_trajectories, sample_white_noise};
use rcsbench::rng::SeededRng;
use rcsbench::statevec::{amplitude, output_probabilities, porter_thomas_ks, sample};
use rcsbench::tncost::{
    build_network, contract, estimate_runtime, plan_contraction, MachineProfile,
};
use rcsbench::xeb::{angle_distance, fit_fsim_batch, linear_xeb, mean_estimate, FsimFitOptions};

type Outcome = Result<String, String>;

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

fn runtime_conversion() -> Outcome {
    let profile = MachineProfile::named("frontier-9.2PB").map_err(|e| e.to_string())?;
    let rt = estimate_runtime(2.1e28, &profile).map_err(|e| e.to_string())?;
    let rel = (rt.years / 1.6e4 - 1.0).abs();
    let msg = format!("{:.1} years, {:.2}% from 1.6e4", rt.years, rel * 100.0);
    if rel <= 0.02 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn white_noise_calibration() -> Outcome {
    let c = grid_circuit(4, 4, 14, 2024);
    let mut parts = Vec::new();
    let mut ok = true;
    for (k, f) in [0.1, 0.3, 0.5, 1.0].into_iter().enumerate() {
        let s = sample_white_noise(&c, f, 100_000, 100 + k as u64).map_err(|e| e.to_string())?;
        let x = linear_xeb(&s, &c).map_err(|e| e.to_string())?;
        let z = (x.f_xeb - f) / x.stderr;
        ok &= z.abs() <= 3.0;
        parts.push(format!("F={f}: {:.4} ({z:+.2} se)", x.f_xeb));
    }
    let msg = parts.join(", ");
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn paper_rate_model(rows: u32, cols: u32) -> HardwareModel {
    HardwareModel::uniform_grid(rows, cols, 1e-3, 4.4e-3, 0.013).unwrap()
}

fn pauli_consistency() -> Outcome {
    let model = paper_rate_model(3, 4);
    let mut xebs = Vec::new();
    let mut forecasts = Vec::new();
    for k in 0..4u64 {
        let c = grid_circuit(3, 4, 12, 300 + k);
        let map = identity_map(&c);
        let s = sample_pauli_trajectories(&c, &model, &map, 25_000, 400 + k).map_err(|e| e.to_string())?;
        xebs.push(linear_xeb(&s, &c).map_err(|e| e.to_string())?);
        forecasts.push(forecast_fidelity(&c, &model, &map).map_err(|e| e.to_string())?.f_est);
    }
    let x = mean_estimate(&xebs).map_err(|e| e.to_string())?;
    let f = forecasts.iter().sum::<f64>() / forecasts.len() as f64;
    let rel = (x.f_xeb / f - 1.0).abs();
    let msg = format!("xeb {:.4} +- {:.4}, forecast {:.4}, {:.2}% apart", x.f_xeb, x.stderr, f, rel * 100.0);
    if rel <= 0.10 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn patch_property() -> Outcome {
    let model = paper_rate_model(3, 4);
    let partition: Vec<Vec<Qubit>> = vec![vec![0, 1, 4, 5, 8, 9], vec![2, 3, 6, 7, 10, 11]];
    let mut product_sum = 0.0;
    let mut patched_sum = 0.0;
    let mut strict = true;
    let n = 4u64;
    for k in 0..n {
        let c = grid_circuit(3, 4, 12, 300 + k);
        let full = forecast_fidelity(&c, &model, &identity_map(&c)).map_err(|e| e.to_string())?.f_est;
        let patched_circuit = remove_cross_patch_gates(&c, &partition).map_err(|e| e.to_string())?;
        let patched = forecast_fidelity(&patched_circuit, &model, &identity_map(&patched_circuit))
            .map_err(|e| e.to_string())?
            .f_est;
        strict &= patched > full;
        let split = split_patches(&c, &partition).map_err(|e| e.to_string())?;
        let mut product = 1.0;
        for (j, p) in split.patches.iter().enumerate() {
            let s = sample_pauli_trajectories(p, &model, &identity_map(p), 25_000, 500 + 10 * k + j as u64)
                .map_err(|e| e.to_string())?;
            product *= linear_xeb(&s, p).map_err(|e| e.to_string())?.f_xeb;
        }
        product_sum += product;
        patched_sum += patched;
    }
    let (product, patched) = (product_sum / n as f64, patched_sum / n as f64);
    let rel = (product / patched - 1.0).abs();
    let msg = format!(
        "patch XEB product {product:.4}, patched forecast {patched:.4} ({:.2}% apart), patched > full: {strict}",
        rel * 100.0
    );
    if rel <= 0.15 && strict {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn porter_thomas() -> Outcome {
    let mut worst: f64 = 0.0;
    for seed in 0..5u64 {
        let c = grid_circuit(4, 4, 12, 700 + seed);
        let p = output_probabilities(&c).map_err(|e| e.to_string())?;
        worst = worst.max(porter_thomas_ks(&p));
    }
    let msg = format!("max KS over 5 seeds {worst:.5}");
    if worst < 0.01 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn fsim_plant_and_recover() -> Outcome {
    let mut patterns = BTreeMap::new();
    patterns.insert('A', vec![(0, 1)]);
    let schedule = PatternSchedule::new(patterns, "A").unwrap();
    let mut rng = SeededRng::new(61);
    let mut recovered = 0;
    let mut worst: f64 = 0.0;
    for plant in 0..10u64 {
        let theta = 0.3 + (PI - 0.6) * rng.next_f64();
        let phi = 2.0 * PI * rng.next_f64();
        let opts = GeneratorOptions {
            fsim_theta: theta,
            fsim_phi: phi,
            ..Default::default()
        };
        let data: Vec<(Circuit, _)> = (0..10u64)
            .map(|i| {
                let seed = 10_000 * (plant + 1) + i;
                let c = generate_rcs(&[0, 1], &schedule, 8, seed, opts).unwrap();
                let s = sample(&c, 10_000, seed).unwrap();
                (c, s)
            })
            .collect();
        let refs: Vec<_> = data.iter().map(|(c, s)| (c, s)).collect();
        let fit = fit_fsim_batch(&refs, (0, 1), (PI / 2.0, PI / 6.0), &FsimFitOptions::default())
            .map_err(|e| e.to_string())?;
        let err = (fit.theta - theta).abs().max(angle_distance(fit.phi, phi));
        worst = worst.max(err);
        if err <= 0.02 {
            recovered += 1;
        }
    }
    let msg = format!("{recovered}/10 within 0.02 rad (worst {worst:.4})");
    if recovered >= 9 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

/// Random 4x4 device with up to three dead qubits or couplers.
fn random_device(rng: &mut SeededRng) -> HardwareModel {
    let pairs = grid_pairs(4, 4);
    let n_dead = rng.below(4) as usize;
    let mut dead_q = BTreeSet::new();
    let mut dead_c = BTreeSet::new();
    for _ in 0..n_dead {
        if rng.chance(0.5) {
            dead_q.insert(rng.below(16) as u32);
        } else {
            dead_c.insert(rng.below(pairs.len() as u64) as usize);
        }
    }
    // coarse error levels so that ties between placements actually occur
    let level = |rng: &mut SeededRng, base: f64| base * (1 + rng.below(3)) as f64;
    let qubits = (0..16u32)
        .map(|id| {
            let mut q = QubitRecord::working(id, id / 4, id % 4, level(rng, 1e-3), level(rng, 1e-2));
            if dead_q.contains(&id) {
                q.working = false;
                q.e1 = None;
                q.e3 = None;
            }
            q
        })
        .collect();
    let couplers = pairs
        .iter()
        .enumerate()
        .map(|(i, &(a, b))| {
            let mut c = CouplerRecord::working(i as u32, a, b, level(rng, 4e-3));
            if dead_c.contains(&i) || dead_q.contains(&a) || dead_q.contains(&b) {
                c.working = false;
                c.e2 = None;
            }
            c
        })
        .collect();
    HardwareModel::new("oracle-4x4", 4, 4, qubits, couplers).unwrap()
}

fn star_schedule() -> (Vec<Qubit>, PatternSchedule) {
    let mut patterns = BTreeMap::new();
    for (label, leaf) in ['A', 'B', 'C', 'D'].into_iter().zip(1..) {
        patterns.insert(label, vec![(0, leaf)]);
    }
    (vec![0, 1, 2, 3, 4], PatternSchedule::new(patterns, "ABCD").unwrap())
}

fn oracle_circuit(case: u64) -> Circuit {
    let grid = |r, c| (PatternSchedule::grid_qubits(r, c), PatternSchedule::grid(r, c));
    let (qubits, schedule) = match case % 7 {
        0 => grid(2, 2),
        1 => grid(1, 5),
        2 => star_schedule(),
        3 => grid(2, 3),
        4 => grid(3, 3),
        5 => grid(2, 4),
        _ => grid(1, 7),
    };
    generate_rcs(&qubits, &schedule, 4 + (case % 3) as usize, case, GeneratorOptions::default()).unwrap()
}

/// Minimum placement cost over every valid assignment, enumerated in
/// register order with no heuristics beyond rejecting a partial assignment
/// once one of its gate pairs lacks a working coupler.
fn brute_force_best(circuit: &Circuit, model: &HardwareModel) -> Option<f64> {
    let census = gate_census(circuit);
    let logical: Vec<Qubit> = circuit.qubits().to_vec();
    let pairs: Vec<((Qubit, Qubit), usize)> = census.tq_per_pair.iter().map(|(k, v)| (*k, *v)).collect();
    let cost = |e: f64| -(1.0 - e).ln();
    let alive: Vec<u32> = model.working_qubits().map(|q| q.id).collect();
    let mut best: Option<f64> = None;
    let mut assign: BTreeMap<Qubit, u32> = BTreeMap::new();
    let mut used = BTreeSet::new();

    let linked = |m: &BTreeMap<Qubit, u32>| {
        pairs.iter().all(|&((a, b), _)| match (m.get(&a), m.get(&b)) {
            (Some(&pa), Some(&pb)) => model.coupler_between(pa, pb).is_some_and(|c| c.working),
            _ => true,
        })
    };

    fn rec(
        i: usize,
        logical: &[Qubit],
        alive: &[u32],
        assign: &mut BTreeMap<Qubit, u32>,
        used: &mut BTreeSet<u32>,
        linked: &dyn Fn(&BTreeMap<Qubit, u32>) -> bool,
        leaf: &mut dyn FnMut(&BTreeMap<Qubit, u32>),
    ) {
        if i == logical.len() {
            leaf(assign);
            return;
        }
        for &p in alive {
            if used.insert(p) {
                assign.insert(logical[i], p);
                if linked(assign) {
                    rec(i + 1, logical, alive, assign, used, linked, leaf);
                }
                assign.remove(&logical[i]);
                used.remove(&p);
            }
        }
    }

    let mut leaf = |m: &BTreeMap<Qubit, u32>| {
        let mut total = 0.0;
        for &((a, b), n) in &pairs {
            match model.coupler_between(m[&a], m[&b]) {
                Some(c) if c.working => total += n as f64 * cost(c.e2.unwrap()),
                _ => return,
            }
        }
        for (&q, &p) in m {
            let rec = model.qubit(p).unwrap();
            total += *census.sq_per_qubit.get(&q).unwrap_or(&0) as f64 * cost(rec.e1.unwrap());
            if census.measured.contains(&q) {
                total += cost(rec.e3.unwrap());
            }
        }
        if best.is_none_or(|b| total < b) {
            best = Some(total);
        }
    };
    rec(0, &logical, &alive, &mut assign, &mut used, &linked, &mut leaf);
    best
}

fn embedding_oracle() -> Outcome {
    let mut rng = SeededRng::new(4242);
    let mut failures = Vec::new();
    let mut infeasible = 0;
    for case in 0..100u64 {
        let model = random_device(&mut rng);
        let circuit = oracle_circuit(case);
        let opts = EmbedOptions {
            strategy: Strategy::Best,
            node_budget: None,
            excluded: BTreeSet::new(),
        };
        let truth = brute_force_best(&circuit, &model);
        match (embed(&circuit, &model, &opts), truth) {
            (Ok(m), Some(t)) => {
                if !m.exhaustive || (m.score - t).abs() > 1e-9 * t.max(1e-12) {
                    failures.push(format!("case {case}: score {} vs {t}", m.score));
                }
            }
            (Err(Error::NoEmbedding(_)), None) => infeasible += 1,
            (got, t) => failures.push(format!("case {case}: {got:?} vs {t:?}")),
        }
    }
    if failures.is_empty() {
        Ok(format!("100 cases agree ({infeasible} without a placement)"))
    } else {
        Err(failures.join("; "))
    }
}

fn tn_amplitude_oracle() -> Outcome {
    let mut rng = SeededRng::new(99);
    let shapes = [(2u32, 2u32), (2, 3), (3, 3), (2, 5), (3, 4), (4, 4), (3, 5), (4, 5)];
    let mut worst: f64 = 0.0;
    let mut sliced_plans = 0;
    for case in 0..100u64 {
        let (r, c) = shapes[rng.below(shapes.len() as u64) as usize];
        let cycles = 2 + rng.below(7) as usize;
        let circuit = grid_circuit(r, c, cycles, 9000 + case);
        let n = circuit.n_qubits();
        let bits: String = (0..n).map(|_| if rng.chance(0.5) { '1' } else { '0' }).collect();
        let truth = amplitude(&circuit, &bits).map_err(|e| e.to_string())?;
        let net = build_network(&circuit, &bits).map_err(|e| e.to_string())?;
        let free = plan_contraction(&net, f64::INFINITY, case, 8).map_err(|e| e.to_string())?;
        let cap = (free.peak_elements / 8.0).max(16.0);
        let capped = plan_contraction(&net, cap, case, 8).map_err(|e| e.to_string())?;
        if !capped.sliced.is_empty() {
            sliced_plans += 1;
        }
        if capped.peak_elements > cap {
            return Err(format!("case {case}: capped peak {} above cap {cap}", capped.peak_elements));
        }
        for plan in [&free, &capped] {
            let a = contract(&net, plan).map_err(|e| e.to_string())?;
            worst = worst.max((a - truth).norm());
        }
    }
    let msg = format!("max |error| {worst:.2e} over 200 contractions ({sliced_plans} sliced plans)");
    if worst <= 1e-8 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn cli(root: &Path, args: &[&str]) -> Result<String, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_rcsbench"))
        .arg("--task-root")
        .arg(root)
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("{args:?}: {}", String::from_utf8_lossy(&out.stderr)));
    }
    Ok(String::from_utf8_lossy(&out.stdout).trim().to_string())
}

fn first_fsim_pair(dir: &Path) -> Result<String, String> {
    let text = fs::read_to_string(dir.join("transpiled/0.qc")).map_err(|e| e.to_string())?;
    let line = text
        .lines()
        .find(|l| l.starts_with("FSIM"))
        .ok_or("no FSIM gate")?;
    let f: Vec<&str> = line.split_whitespace().collect();
    Ok(format!("{}-{}", &f[1][1..], &f[2][1..]))
}

fn pipeline(root: &Path, backend: &str) -> Result<PathBuf, String> {
    let id = cli(root, &["--seed", "17", "gen", "--qubits", "12", "--cycles", "8,12", "--repeat", "2"])?;
    let dir = root.join(&id);
    cli(root, &["transpile", &id, "--min-t1", "10"])?;
    cli(root, &["run", &id, "--backend", backend, "--shots", "5000"])?;
    cli(root, &["xeb", &id])?;
    let pair = first_fsim_pair(&dir)?;
    cli(root, &["fit", &id, "--pair", &pair, "--budget", "100"])?;
    cli(root, &["cost", &id, "--restarts", "4"])?;
    cli(root, &["report", &id])?;
    cli(root, &["export", &id, "--out", root.join("export.zip").to_str().unwrap()])?;
    Ok(dir)
}

fn tree(dir: &Path, base: &Path, out: &mut BTreeMap<String, Vec<u8>>) {
    for e in fs::read_dir(dir).unwrap() {
        let p = e.unwrap().path();
        if p.is_dir() {
            tree(&p, base, out);
        } else {
            let rel = p.strip_prefix(base).unwrap().to_string_lossy().to_string();
            let mut bytes = fs::read(&p).unwrap();
            if rel == "task.json" {
                let mut v: serde_json::Value = serde_json::from_slice(&bytes).unwrap();
                let o = v.as_object_mut().unwrap();
                o.remove("created_at");
                o.remove("updated_at");
                for h in o["history"].as_array_mut().unwrap() {
                    h.as_object_mut().unwrap().remove("at");
                }
                bytes = serde_json::to_vec(&v).unwrap();
            }
            out.insert(rel, bytes);
        }
    }
}

fn cli_determinism() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut compared = 0;
    for backend in ["white-noise:0.4", "pauli"] {
        let mut trees = Vec::new();
        for run in 0..2 {
            let root = tmp.path().join(format!("{backend}-{run}").replace(':', "_"));
            let dir = pipeline(&root, backend)?;
            let mut t = BTreeMap::new();
            tree(&dir, &dir, &mut t);
            trees.push(t);
        }
        if trees[0].keys().ne(trees[1].keys()) {
            return Err(format!("{backend}: file lists differ"));
        }
        for (name, bytes) in &trees[0] {
            if trees[1][name] != *bytes {
                return Err(format!("{backend}: {name} differs"));
            }
        }
        compared += trees[0].len();
    }
    Ok(format!("{compared} files identical across repeated pipelines"))
}

fn main() {
    let criteria: Vec<(&str, Duration, fn() -> Outcome)> = vec![
        ("runtime conversion", Duration::from_secs(1), runtime_conversion),
        ("white-noise XEB calibration", Duration::from_secs(120), white_noise_calibration),
        ("pauli-trajectory XEB vs forecast", Duration::from_secs(300), pauli_consistency),
        ("patch property", Duration::from_secs(300), patch_property),
        ("porter-thomas", Duration::from_secs(60), porter_thomas),
        ("fsim plant and recover", Duration::from_secs(120), fsim_plant_and_recover),
        ("embedding oracle", Duration::from_secs(60), embedding_oracle),
        ("tensor-network amplitude oracle", Duration::from_secs(300), tn_amplitude_oracle),
        ("end-to-end cli determinism", Duration::from_secs(300), cli_determinism),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (name, budget, check) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let result = check();
        let took = start.elapsed();
        let (ok, detail) = match result {
            Ok(d) if took <= budget => (true, d),
            Ok(d) => (false, format!("{d}; over time budget")),
            Err(d) => (false, d),
        };
        if !ok {
            failed += 1;
        }
        println!(
            "{} {name}: {detail} [{:.1}s of {}s]",
            if ok { "PASS" } else { "FAIL" },
            took.as_secs_f64(),
            budget.as_secs()
        );
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
