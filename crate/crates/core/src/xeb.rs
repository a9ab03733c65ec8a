//! Linear cross-entropy benchmarking.
//!
//! `F_XEB = D * mean(p_ideal(x_i)) - 1` with `D = 2^n` over the measured
//! qubits. The module also aggregates estimates into fidelity-vs-cycles
//! curves and refits fSim angles by maximizing agreement between measured
//! samples and re-simulated ideal distributions.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::circuit::{pair_key, Circuit, Qubit};
use crate::error::{Error, Result};
use crate::samples::SampleSet;
use crate::statevec::output_probabilities;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct XebEstimate {
    pub f_xeb: f64,
    pub n_samples: usize,
    pub stderr: f64,
    pub n_qubits: usize,
}

fn check_order(samples: &SampleSet, circuit: &Circuit) -> Result<()> {
    let measured = circuit.measured();
    if samples.qubits() != measured.as_slice() {
        return Err(Error::QubitOrderMismatch {
            samples: samples.qubits().to_vec(),
            circuit: measured,
        });
    }
    Ok(())
}

pub fn linear_xeb(samples: &SampleSet, circuit: &Circuit) -> Result<XebEstimate> {
    check_order(samples, circuit)?;
    let probs = output_probabilities(circuit)?;
    linear_xeb_from_probs(samples, &probs)
}

/// Same estimator against a precomputed ideal distribution indexed like the
/// samples.
pub fn linear_xeb_from_probs(samples: &SampleSet, probs: &[f64]) -> Result<XebEstimate> {
    let n = samples.n_qubits();
    if probs.len() != 1usize << n {
        return Err(Error::LengthMismatch {
            expected: 1usize << n,
            got: probs.len(),
        });
    }
    let count = samples.len();
    if count == 0 {
        return Err(Error::Domain("no samples".into()));
    }
    let d = probs.len() as f64;
    let values = || samples.bits().iter().map(|&b| probs[b as usize]);
    let mean = values().sum::<f64>() / count as f64;
    let var = values().map(|p| (p - mean).powi(2)).sum::<f64>() / count as f64;
    let mut stderr = (d * d * var / count as f64).sqrt();
    if !(stderr > 0.0) {
        stderr = 1.0 / count as f64;
    }
    Ok(XebEstimate {
        f_xeb: d * mean - 1.0,
        n_samples: count,
        stderr,
        n_qubits: n,
    })
}

/// Mean of several estimates with the pooled standard error
/// `sqrt(sum se_i^2) / k`.
pub fn mean_estimate(estimates: &[XebEstimate]) -> Result<XebEstimate> {
    let k = estimates.len();
    if k == 0 {
        return Err(Error::Domain("no estimates to average".into()));
    }
    let f_xeb = estimates.iter().map(|e| e.f_xeb).sum::<f64>() / k as f64;
    let stderr = estimates.iter().map(|e| e.stderr * e.stderr).sum::<f64>().sqrt() / k as f64;
    Ok(XebEstimate {
        f_xeb,
        n_samples: estimates.iter().map(|e| e.n_samples).sum(),
        stderr,
        n_qubits: estimates[0].n_qubits,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub cycles: usize,
    pub instances: usize,
    pub estimate: XebEstimate,
    pub f_forecast: Option<f64>,
}

/// Groups per-instance estimates by depth.
pub fn curve_from_estimates(entries: &[(usize, XebEstimate)]) -> Result<Vec<CurvePoint>> {
    if entries.is_empty() {
        return Err(Error::Domain("empty curve input".into()));
    }
    let mut by_depth: BTreeMap<usize, Vec<XebEstimate>> = BTreeMap::new();
    for (m, e) in entries {
        by_depth.entry(*m).or_default().push(*e);
    }
    by_depth
        .into_iter()
        .map(|(cycles, es)| {
            Ok(CurvePoint {
                cycles,
                instances: es.len(),
                estimate: mean_estimate(&es)?,
                f_forecast: None,
            })
        })
        .collect()
}

/// Fidelity per depth from `(cycles, circuit, samples)` instances.
pub fn xeb_curve(instances: &[(usize, &Circuit, &SampleSet)]) -> Result<Vec<CurvePoint>> {
    let estimates = instances
        .iter()
        .map(|(m, c, s)| Ok((*m, linear_xeb(s, c)?)))
        .collect::<Result<Vec<_>>>()?;
    curve_from_estimates(&estimates)
}

/// Attaches the mean forecast per depth from `(cycles, forecast)` pairs.
pub fn attach_forecast(points: &mut [CurvePoint], forecasts: &[(usize, f64)]) {
    for p in points.iter_mut() {
        let fs: Vec<f64> = forecasts
            .iter()
            .filter(|(m, _)| *m == p.cycles)
            .map(|(_, f)| *f)
            .collect();
        if !fs.is_empty() {
            p.f_forecast = Some(fs.iter().sum::<f64>() / fs.len() as f64);
        }
    }
}

/// `f(m) = amplitude * exp(rate * m)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub rate: f64,
    pub amplitude: f64,
}

/// Least-squares line through `ln f_xeb` against cycles, using the points
/// with positive fidelity. `None` with fewer than two usable depths.
pub fn fit_decay(points: &[CurvePoint]) -> Option<DecayFit> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.estimate.f_xeb > 0.0)
        .map(|p| (p.cycles as f64, p.estimate.f_xeb.ln()))
        .collect();
    let distinct = pts.windows(2).any(|w| w[0].0 != w[1].0);
    if pts.len() < 2 || !distinct {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let rate = sxy / sxx;
    Some(DecayFit {
        rate,
        amplitude: (my - rate * mx).exp(),
    })
}

pub const CURVE_CSV_HEADER: &str = "cycles,f_xeb,stderr,f_forecast";

pub fn curve_csv(points: &[CurvePoint]) -> String {
    let mut out = format!("{CURVE_CSV_HEADER}\n");
    for p in points {
        let forecast = p.f_forecast.map(|f| f.to_string()).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{}",
            p.cycles, p.estimate.f_xeb, p.estimate.stderr, forecast
        );
    }
    out
}

/// Fidelity vs cycles on a log axis: measured points with 1-sigma bars,
/// forecast as a dashed line.
pub fn curve_svg(points: &[CurvePoint]) -> String {
    const W: f64 = 480.0;
    const H: f64 = 320.0;
    const L: f64 = 64.0;
    const R: f64 = 16.0;
    const T: f64 = 16.0;
    const B: f64 = 48.0;

    let mut values: Vec<f64> = points
        .iter()
        .flat_map(|p| {
            [
                Some(p.estimate.f_xeb - p.estimate.stderr),
                Some(p.estimate.f_xeb + p.estimate.stderr),
                p.f_forecast,
            ]
        })
        .flatten()
        .filter(|v| *v > 0.0)
        .collect();
    if values.is_empty() {
        values.push(1.0);
    }
    let lo = values.iter().cloned().fold(f64::INFINITY, f64::min).log10().floor();
    let mut hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max).log10().ceil();
    if hi <= lo {
        hi = lo + 1.0;
    }
    let (m0, m1) = match (points.first(), points.last()) {
        (Some(a), Some(b)) if b.cycles > a.cycles => (a.cycles as f64, b.cycles as f64),
        (Some(a), _) => (a.cycles as f64 - 1.0, a.cycles as f64 + 1.0),
        _ => (0.0, 1.0),
    };
    let x = |m: f64| L + (m - m0) / (m1 - m0) * (W - L - R);
    let y = |f: f64| {
        let v = f.max(10f64.powf(lo)).log10();
        T + (hi - v) / (hi - lo) * (H - T - B)
    };

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(
        s,
        r#"<rect x="{L}" y="{T}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        W - L - R,
        H - T - B
    );
    for e in (lo as i32)..=(hi as i32) {
        let yy = y(10f64.powi(e));
        let _ = writeln!(
            s,
            r##"<line x1="{L}" y1="{yy:.2}" x2="{:.2}" y2="{yy:.2}" stroke="#ddd"/><text x="{:.2}" y="{:.2}" text-anchor="end">1e{e}</text>"##,
            W - R,
            L - 4.0,
            yy + 4.0
        );
    }
    for p in points {
        let xx = x(p.cycles as f64);
        let _ = writeln!(
            s,
            r#"<text x="{xx:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            H - B + 16.0,
            p.cycles
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">cycles</text>"#,
        (L + W - R) / 2.0,
        H - 8.0
    );
    let _ = writeln!(
        s,
        r#"<text x="14" y="{:.2}" text-anchor="middle" transform="rotate(-90 14 {:.2})">fidelity</text>"#,
        (T + H - B) / 2.0,
        (T + H - B) / 2.0
    );
    let forecast: Vec<String> = points
        .iter()
        .filter_map(|p| p.f_forecast.map(|f| format!("{:.2},{:.2}", x(p.cycles as f64), y(f))))
        .collect();
    if !forecast.is_empty() {
        let _ = writeln!(
            s,
            r#"<polyline points="{}" fill="none" stroke="gray" stroke-dasharray="4 3"/>"#,
            forecast.join(" ")
        );
    }
    for p in points {
        let xx = x(p.cycles as f64);
        let e = &p.estimate;
        let _ = writeln!(
            s,
            r#"<line x1="{xx:.2}" y1="{:.2}" x2="{xx:.2}" y2="{:.2}" stroke="steelblue"/>"#,
            y(e.f_xeb - e.stderr),
            y(e.f_xeb + e.stderr)
        );
        if e.f_xeb > 0.0 {
            let _ = writeln!(
                s,
                r#"<circle cx="{xx:.2}" cy="{:.2}" r="3" fill="steelblue"/>"#,
                y(e.f_xeb)
            );
        }
    }
    s.push_str("</svg>\n");
    s
}

// ---------------------------------------------------------------------------
// fSim refitting

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitEvaluation {
    pub theta: f64,
    pub phi: f64,
    pub objective: f64,
    /// True when this evaluation improved on every earlier one.
    pub accepted: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FsimFitResult {
    pub pair: (Qubit, Qubit),
    pub theta: f64,
    pub phi: f64,
    pub objective: f64,
    /// Least-squares fidelity of the samples under the fitted parameters.
    pub fidelity: f64,
    pub init_objective: f64,
    pub iterations: usize,
    pub trace: Vec<FitEvaluation>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FsimFitOptions {
    pub budget: usize,
    pub tolerance: f64,
    pub initial_step: f64,
    /// Coarse `(theta points, phi points)` scan before the local search.
    pub scan: Option<(usize, usize)>,
}

impl Default for FsimFitOptions {
    fn default() -> Self {
        Self {
            budget: 500,
            tolerance: 1e-3,
            initial_step: PI / 24.0,
            scan: Some((13, 25)),
        }
    }
}

pub const MIN_FIT_SHOTS: usize = 100;

struct FitInstance<'a> {
    circuit: &'a Circuit,
    counts: Vec<(usize, f64)>,
    shots: f64,
}

/// Agreement between samples and the ideal distributions at `(theta, phi)`:
/// with `X_c = D mean p(x) - 1` and `S_c = D sum p^2 - 1` per instance, the
/// objective is `sum X / sqrt(sum S)` and the fidelity `sum X / sum S`.
///
/// Plain linear XEB rewards parameters that concentrate the ideal
/// distribution; dividing by `sqrt(sum S)` removes that bias so the maximum
/// sits at the true angles.
pub struct FsimObjective<'a> {
    pair: (Qubit, Qubit),
    instances: Vec<FitInstance<'a>>,
}

impl<'a> FsimObjective<'a> {
    pub fn new(instances: &[(&'a Circuit, &'a SampleSet)], pair: (Qubit, Qubit)) -> Result<Self> {
        let pair = pair_key(pair.0, pair.1);
        if instances.is_empty() {
            return Err(Error::Fit("no circuit instances".into()));
        }
        let mut total = 0;
        let mut out = Vec::with_capacity(instances.len());
        for (k, (c, s)) in instances.iter().enumerate() {
            if !c.coupled_pairs().contains(&pair) {
                return Err(Error::Fit(format!(
                    "instance {k} has no FSIM gate on (Q{}, Q{})",
                    pair.0, pair.1
                )));
            }
            check_order(s, c)?;
            total += s.len();
            out.push(FitInstance {
                circuit: c,
                counts: s
                    .counts()
                    .into_iter()
                    .map(|(b, n)| (b as usize, n as f64))
                    .collect(),
                shots: s.len() as f64,
            });
        }
        if total < MIN_FIT_SHOTS {
            return Err(Error::Fit(format!(
                "only {total} shots; collect at least {MIN_FIT_SHOTS} (10^4 or more for 0.02 rad precision)"
            )));
        }
        Ok(Self { pair, instances: out })
    }

    /// `(objective, fidelity)` at the given angles.
    pub fn evaluate(&self, theta: f64, phi: f64) -> Result<(f64, f64)> {
        let (mut sx, mut ss) = (0.0, 0.0);
        for inst in &self.instances {
            let probs = output_probabilities(&inst.circuit.with_fsim_params(self.pair, theta, phi))?;
            let d = probs.len() as f64;
            let hit: f64 = inst.counts.iter().map(|&(b, n)| n * probs[b]).sum();
            sx += d * hit / inst.shots - 1.0;
            ss += d * probs.iter().map(|p| p * p).sum::<f64>() - 1.0;
        }
        let ss = ss.max(1e-12);
        Ok((sx / ss.sqrt(), sx / ss))
    }
}

fn wrap_phi(phi: f64) -> f64 {
    let w = (phi + PI).rem_euclid(2.0 * PI) - PI;
    if w < -PI {
        -PI
    } else {
        w
    }
}

/// Refits `(theta, phi)` of the fSim gates on `pair` against one sample set.
pub fn fit_fsim(
    samples: &SampleSet,
    circuit: &Circuit,
    pair: (Qubit, Qubit),
    init: (f64, f64),
) -> Result<FsimFitResult> {
    fit_fsim_batch(&[(circuit, samples)], pair, init, &FsimFitOptions::default())
}

/// Refits against several circuit instances sharing the same physical pair.
///
/// Search domain is `theta in [0, pi]` (clamped) and `phi` on the circle
/// `[-pi, pi)`. An optional coarse grid scan picks the start point, then a
/// compass search halves its step until it drops below the tolerance or the
/// evaluation budget runs out.
pub fn fit_fsim_batch(
    instances: &[(&Circuit, &SampleSet)],
    pair: (Qubit, Qubit),
    init: (f64, f64),
    options: &FsimFitOptions,
) -> Result<FsimFitResult> {
    let objective = FsimObjective::new(instances, pair)?;
    if !(0.0..=PI).contains(&init.0) || !(-PI..=PI).contains(&init.1) {
        return Err(Error::Domain(format!(
            "initial parameters ({}, {}) outside theta in [0, pi], phi in [-pi, pi]",
            init.0, init.1
        )));
    }
    let mut trace: Vec<FitEvaluation> = Vec::new();
    let mut best = (init.0, init.1, f64::NEG_INFINITY);
    let eval = |theta: f64, phi: f64, trace: &mut Vec<FitEvaluation>, best: &mut (f64, f64, f64)| -> Result<bool> {
        let (obj, _) = objective.evaluate(theta, phi)?;
        let accepted = obj > best.2;
        if accepted {
            *best = (theta, phi, obj);
        }
        trace.push(FitEvaluation {
            theta,
            phi,
            objective: obj,
            accepted,
        });
        Ok(accepted)
    };

    eval(init.0, init.1, &mut trace, &mut best)?;
    let init_objective = best.2;
    if let Some((nt, np)) = options.scan {
        for i in 0..nt {
            for j in 0..np {
                if trace.len() >= options.budget {
                    break;
                }
                let theta = if nt > 1 { PI * i as f64 / (nt - 1) as f64 } else { init.0 };
                let phi = if np > 1 { -PI + 2.0 * PI * j as f64 / (np - 1) as f64 } else { init.1 };
                eval(theta, wrap_phi(phi), &mut trace, &mut best)?;
            }
        }
    }

    let mut step = options.initial_step;
    let mut iterations = 0;
    'search: while step > options.tolerance {
        let mut improved = false;
        for (dt, dp) in [(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0)] {
            if trace.len() >= options.budget {
                break 'search;
            }
            let theta = (best.0 + dt * step).clamp(0.0, PI);
            let phi = wrap_phi(best.1 + dp * step);
            if theta == best.0 && phi == best.1 {
                continue;
            }
            if eval(theta, phi, &mut trace, &mut best)? {
                improved = true;
                iterations += 1;
                break;
            }
        }
        if !improved {
            step /= 2.0;
        }
    }

    let (theta, phi, obj) = best;
    let (_, fidelity) = objective.evaluate(theta, phi)?;
    Ok(FsimFitResult {
        pair: objective.pair,
        theta,
        phi,
        objective: obj,
        fidelity,
        init_objective,
        iterations,
        trace,
    })
}

/// Distance on the circle.
pub fn angle_distance(a: f64, b: f64) -> f64 {
    wrap_phi(a - b).abs()
}
