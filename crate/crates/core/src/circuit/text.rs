//! Line-oriented circuit text format.
//!
//! ```text
//! # qubits: Q0 Q1
//! SX Q0
//! SY Q1
//! ---
//! #: double A
//! FSIM Q0 Q1 1.5707963267948966e0 5.2359877559829882e-1
//! ---
//! MEAS Q0 Q1
//! ```
//!
//! One gate per line, layers separated by `---`, `#` starts a comment. Two
//! comment forms carry metadata: the `# qubits:` header fixing register order,
//! and `#:` directives naming a layer's kind (written for DOUBLE layers and
//! for empty layers). Angles are printed with 17 significant digits so that
//! parsing returns the exact same `f64`.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use super::{Circuit, Gate, Layer, LayerKind, Qubit, SingleKind};
use crate::error::{Error, Result};

pub fn serialize(circuit: &Circuit) -> String {
    let mut out = String::from("# qubits:");
    for q in circuit.qubits() {
        let _ = write!(out, " Q{q}");
    }
    out.push('\n');
    for (i, layer) in circuit.layers().iter().enumerate() {
        if i > 0 {
            out.push_str("---\n");
        }
        match (layer.kind, layer.pattern) {
            (LayerKind::Double, Some(p)) => {
                let _ = writeln!(out, "#: double {p}");
            }
            (LayerKind::Double, None) => out.push_str("#: double\n"),
            (LayerKind::Single, _) if layer.gates.is_empty() => out.push_str("#: single\n"),
            _ => {}
        }
        for g in &layer.gates {
            match g {
                Gate::Single { kind, qubit } => {
                    let _ = writeln!(out, "{} Q{qubit}", kind.mnemonic());
                }
                Gate::Fsim { q0, q1, theta, phi } => {
                    let _ = writeln!(out, "FSIM Q{q0} Q{q1} {theta:.16e} {phi:.16e}");
                }
                Gate::Meas(qs) => {
                    out.push_str("MEAS");
                    for q in qs {
                        let _ = write!(out, " Q{q}");
                    }
                    out.push('\n');
                }
            }
        }
    }
    out
}

fn syntax(line: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        line,
        message: message.into(),
    }
}

fn parse_label(tok: &str, line: usize) -> Result<Qubit> {
    tok.strip_prefix('Q')
        .and_then(|n| n.parse::<Qubit>().ok())
        .ok_or_else(|| syntax(line, format!("bad qubit label {tok:?}")))
}

fn parse_angle(tok: &str, line: usize) -> Result<f64> {
    tok.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| syntax(line, format!("bad angle {tok:?}")))
}

struct PendingLayer {
    first_line: usize,
    directive: Option<(LayerKind, Option<char>)>,
    gates: Vec<(usize, Gate)>,
}

impl PendingLayer {
    fn new(first_line: usize) -> Self {
        Self {
            first_line,
            directive: None,
            gates: Vec::new(),
        }
    }

    fn is_blank(&self) -> bool {
        self.directive.is_none() && self.gates.is_empty()
    }

    fn finish(self, register: &mut Vec<Qubit>, fixed_register: bool) -> Result<Layer> {
        let inferred = self.gates.iter().map(|(l, g)| {
            let k = match g {
                Gate::Single { .. } => LayerKind::Single,
                Gate::Fsim { .. } => LayerKind::Double,
                Gate::Meas(_) => LayerKind::Measure,
            };
            (*l, k)
        });
        let mut kind = self.directive.map(|d| d.0);
        for (line, k) in inferred {
            match kind {
                None => kind = Some(k),
                Some(prev) if prev != k => {
                    return Err(syntax(
                        line,
                        format!("{k:?} gate inside a {prev:?} layer"),
                    ))
                }
                _ => {}
            }
        }
        let mut used = BTreeSet::new();
        for (line, g) in &self.gates {
            for q in g.targets() {
                if !used.insert(q) {
                    return Err(syntax(*line, format!("Q{q} is already used in this layer")));
                }
                if !register.contains(&q) {
                    if fixed_register {
                        return Err(syntax(*line, format!("Q{q} is not in the qubit header")));
                    }
                    register.push(q);
                }
            }
        }
        if kind == Some(LayerKind::Measure) && self.gates.len() != 1 {
            return Err(syntax(self.first_line, "a measurement layer holds one MEAS line"));
        }
        Ok(Layer {
            kind: kind.unwrap_or(LayerKind::Single),
            pattern: self.directive.and_then(|d| d.1),
            gates: self.gates.into_iter().map(|(_, g)| g).collect(),
        })
    }
}

pub fn parse(text: &str) -> Result<Circuit> {
    let mut register: Option<Vec<Qubit>> = None;
    let mut chunks: Vec<PendingLayer> = vec![PendingLayer::new(1)];
    let mut separators = 0usize;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if line == "---" {
            separators += 1;
            chunks.push(PendingLayer::new(line_no + 1));
            continue;
        }
        if let Some(rest) = line.strip_prefix("# qubits:") {
            if register.is_some() {
                return Err(syntax(line_no, "duplicate qubit header"));
            }
            let qs = rest
                .split_whitespace()
                .map(|t| parse_label(t, line_no))
                .collect::<Result<Vec<_>>>()?;
            register = Some(qs);
            continue;
        }
        if let Some(rest) = line.strip_prefix("#:") {
            let mut toks = rest.split_whitespace();
            let directive = match (toks.next(), toks.next(), toks.next()) {
                (Some("single"), None, _) => (LayerKind::Single, None),
                (Some("measure"), None, _) => (LayerKind::Measure, None),
                (Some("double"), None, _) => (LayerKind::Double, None),
                (Some("double"), Some(p), None) if p.chars().count() == 1 => {
                    (LayerKind::Double, p.chars().next())
                }
                _ => return Err(syntax(line_no, format!("unknown directive {line:?}"))),
            };
            let current = chunks.last_mut().unwrap();
            if current.directive.is_some() {
                return Err(syntax(line_no, "second layer directive in one layer"));
            }
            current.directive = Some(directive);
            continue;
        }
        if line.starts_with('#') {
            continue;
        }
        let line = line.split('#').next().unwrap().trim();
        let toks: Vec<&str> = line.split_whitespace().collect();
        let gate = match toks.as_slice() {
            [op @ ("SX" | "SY" | "SW"), q] => Gate::Single {
                kind: match *op {
                    "SX" => SingleKind::SX,
                    "SY" => SingleKind::SY,
                    _ => SingleKind::SW,
                },
                qubit: parse_label(q, line_no)?,
            },
            ["SX" | "SY" | "SW", ..] => {
                return Err(syntax(line_no, "single-qubit gate takes exactly one qubit"))
            }
            ["FSIM", a, b, theta, phi] => {
                let (q0, q1) = (parse_label(a, line_no)?, parse_label(b, line_no)?);
                if q0 == q1 {
                    return Err(syntax(line_no, "FSIM needs two distinct qubits"));
                }
                Gate::Fsim {
                    q0,
                    q1,
                    theta: parse_angle(theta, line_no)?,
                    phi: parse_angle(phi, line_no)?,
                }
            }
            ["FSIM", ..] => {
                return Err(syntax(line_no, "FSIM takes two qubits and two angles"))
            }
            ["MEAS", rest @ ..] if !rest.is_empty() => Gate::Meas(
                rest.iter()
                    .map(|t| parse_label(t, line_no))
                    .collect::<Result<Vec<_>>>()?,
            ),
            ["MEAS"] => return Err(syntax(line_no, "MEAS needs at least one qubit")),
            [op, ..] => return Err(syntax(line_no, format!("unknown gate {op:?}"))),
            [] => continue,
        };
        chunks.last_mut().unwrap().gates.push((line_no, gate));
    }

    if separators == 0 && chunks[0].is_blank() {
        chunks.clear();
    }
    let fixed = register.is_some();
    let mut register = register.unwrap_or_default();
    let mut layers = Vec::with_capacity(chunks.len());
    for chunk in chunks {
        let first = chunk.first_line;
        let layer = chunk.finish(&mut register, fixed)?;
        layers.push((first, layer));
    }
    let (lines, layers): (Vec<usize>, Vec<Layer>) = layers.into_iter().unzip();
    Circuit::new(register, layers).map_err(|e| match e {
        Error::InvalidCircuit(m) => {
            // point at the offending layer when the message names one
            let line = m
                .strip_prefix("layer ")
                .and_then(|r| r.split(':').next())
                .and_then(|i| i.parse::<usize>().ok())
                .and_then(|i| lines.get(i).copied())
                .unwrap_or(1);
            syntax(line, m)
        }
        other => other,
    })
}
