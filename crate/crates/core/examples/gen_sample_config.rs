//! Writes the bundled synthetic calibration file `data/tianyan287-like.json`.
//!
//! 15 x 7 grid (105 qubits), 182 of the 188 grid couplers present, one dead
//! qubit and two qubits with short T1. Error rates are log-normal draws
//! rescaled so the working-element means are exactly 1.0e-3 (e1),
//! 4.4e-3 (e2) and 1.3e-2 (e3).
//!
//! Run with `cargo run --example gen_sample_config [output path]`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_6, PI};

use rcsbench::hwmodel::{grid_pairs, save_config, CouplerRecord, HardwareModel, QubitRecord};
use rcsbench::rng::SeededRng;

const ROWS: u32 = 15;
const COLS: u32 = 7;
const DEAD: u32 = 52;
const LOW_T1: [u32; 2] = [23, 88];
const MISSING: [(u32, u32); 6] = [(3, 10), (15, 16), (40, 41), (61, 68), (79, 80), (97, 104)];

fn normal(rng: &mut SeededRng) -> f64 {
    let u1 = rng.next_f64().max(f64::MIN_POSITIVE);
    let u2 = rng.next_f64();
    (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
}

fn lognormal_with_mean(rng: &mut SeededRng, n: usize, sigma: f64, mean: f64) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| (sigma * normal(rng)).exp()).collect();
    let m = raw.iter().sum::<f64>() / n as f64;
    let mut v: Vec<f64> = raw.iter().map(|x| x * mean / m).collect();
    // absorb the rounding residue into the largest entry
    let residue = mean * n as f64 - v.iter().sum::<f64>();
    let imax = (0..n).max_by(|&a, &b| v[a].total_cmp(&v[b])).unwrap();
    v[imax] += residue;
    v
}

fn main() -> anyhow::Result<()> {
    let out = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/data/tianyan287-like.json").into());
    let mut rng = SeededRng::new(287);

    let n = (ROWS * COLS) as usize;
    let e1 = lognormal_with_mean(&mut rng, n - 1, 0.35, 1.0e-3);
    let e3 = lognormal_with_mean(&mut rng, n - 1, 0.30, 1.3e-2);
    let mut qubits = Vec::with_capacity(n);
    let mut k = 0;
    for id in 0..ROWS * COLS {
        let (row, col) = (id / COLS, id % COLS);
        if id == DEAD {
            let mut q = QubitRecord::working(id, row, col, 0.0, 0.0);
            q.working = false;
            q.e1 = None;
            q.e3 = None;
            qubits.push(q);
            continue;
        }
        let mut q = QubitRecord::working(id, row, col, e1[k], e3[k]);
        k += 1;
        let t1 = if LOW_T1.contains(&id) {
            6.0 + 2.0 * rng.next_f64()
        } else {
            (35.0 + 8.0 * normal(&mut rng)).max(15.0)
        };
        q.t1_us = Some(t1);
        q.t2_us = Some((t1 * (0.4 + 0.4 * rng.next_f64())).min(2.0 * t1));
        q.f01_ghz = Some(4.2 + 0.6 * rng.next_f64());
        qubits.push(q);
    }

    let pairs: Vec<(u32, u32)> = grid_pairs(ROWS, COLS)
        .into_iter()
        .filter(|p| !MISSING.contains(p))
        .collect();
    let live = pairs.iter().filter(|(a, b)| *a != DEAD && *b != DEAD).count();
    let e2 = lognormal_with_mean(&mut rng, live, 0.35, 4.4e-3);
    let mut couplers = Vec::with_capacity(pairs.len());
    let mut k = 0;
    for (id, &(a, b)) in pairs.iter().enumerate() {
        let mut c = CouplerRecord::working(id as u32, a, b, 0.0);
        c.fsim_theta = Some(FRAC_PI_2 + 0.02 * normal(&mut rng));
        c.fsim_phi = Some(FRAC_PI_6 + 0.02 * normal(&mut rng));
        if a == DEAD || b == DEAD {
            c.working = false;
            c.e2 = None;
        } else {
            c.e2 = Some(e2[k]);
            k += 1;
        }
        couplers.push(c);
    }

    let model = HardwareModel::new("tianyan287-like", ROWS, COLS, qubits, couplers)?;
    save_config(&model, &out)?;
    println!(
        "wrote {out}: {} qubits, {} couplers",
        model.qubits().len(),
        model.couplers().len()
    );
    Ok(())
}
