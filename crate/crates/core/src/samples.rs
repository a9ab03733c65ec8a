//! Measured bitstrings with their qubit order.
//!
//! A bitstring is stored as an integer whose most significant of `n` bits is
//! the first listed qubit, so `"100"` over `Q3 Q7 Q9` means Q3 read 1.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::circuit::Qubit;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SampleSet {
    qubits: Vec<Qubit>,
    bits: Vec<u64>,
}

impl SampleSet {
    pub fn new(qubits: Vec<Qubit>, bits: Vec<u64>) -> Result<Self> {
        if qubits.len() > 64 {
            return Err(Error::Domain("sample sets hold at most 64 qubits".into()));
        }
        let n = qubits.len();
        if let Some(b) = bits.iter().find(|&&b| n < 64 && b >> n != 0) {
            return Err(Error::Domain(format!("bitstring {b} exceeds {n} qubits")));
        }
        Ok(Self { qubits, bits })
    }

    pub fn qubits(&self) -> &[Qubit] {
        &self.qubits
    }

    pub fn n_qubits(&self) -> usize {
        self.qubits.len()
    }

    pub fn bits(&self) -> &[u64] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// Occurrence count per outcome.
    pub fn counts(&self) -> BTreeMap<u64, usize> {
        let mut out = BTreeMap::new();
        for &b in &self.bits {
            *out.entry(b).or_default() += 1;
        }
        out
    }

    /// The same shots restricted to `order` (a subset of the qubits, in any
    /// order).
    pub fn marginal(&self, order: &[Qubit]) -> Result<SampleSet> {
        let n = self.n_qubits();
        let shifts = order
            .iter()
            .map(|q| {
                self.qubits
                    .iter()
                    .position(|p| p == q)
                    .map(|pos| n - 1 - pos)
                    .ok_or_else(|| Error::QubitOrderMismatch {
                        samples: self.qubits.clone(),
                        circuit: order.to_vec(),
                    })
            })
            .collect::<Result<Vec<_>>>()?;
        let k = order.len();
        let bits = self
            .bits
            .iter()
            .map(|&b| {
                shifts
                    .iter()
                    .enumerate()
                    .fold(0u64, |acc, (j, &s)| acc | (((b >> s) & 1) << (k - 1 - j)))
            })
            .collect();
        SampleSet::new(order.to_vec(), bits)
    }

    pub fn to_text(&self) -> String {
        let n = self.n_qubits();
        let mut out = String::with_capacity(16 + self.bits.len() * (n + 1));
        out.push_str("# qubits:");
        for q in &self.qubits {
            let _ = write!(out, " Q{q}");
        }
        out.push('\n');
        for &b in &self.bits {
            for k in (0..n).rev() {
                out.push(if (b >> k) & 1 == 1 { '1' } else { '0' });
            }
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines
            .next()
            .ok_or_else(|| Error::Syntax {
                line: 1,
                message: "missing qubit header".into(),
            })?;
        let qubits = header
            .strip_prefix("# qubits:")
            .ok_or_else(|| Error::Syntax {
                line: 1,
                message: "expected `# qubits:` header".into(),
            })?
            .split_whitespace()
            .map(|t| {
                t.strip_prefix('Q')
                    .and_then(|n| n.parse::<Qubit>().ok())
                    .ok_or_else(|| Error::Syntax {
                        line: 1,
                        message: format!("bad qubit label {t:?}"),
                    })
            })
            .collect::<Result<Vec<_>>>()?;
        let n = qubits.len();
        let mut bits = Vec::new();
        for (i, line) in lines {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            bits.push(parse_bitstring(line, n).map_err(|e| Error::Syntax {
                line: i + 1,
                message: e.to_string(),
            })?);
        }
        SampleSet::new(qubits, bits)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_text(&text)
    }
}

/// Parses a `'0'/'1'` string of length `n`, first character most significant.
pub fn parse_bitstring(s: &str, n: usize) -> Result<u64> {
    if s.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: s.len(),
        });
    }
    s.bytes().try_fold(0u64, |acc, c| match c {
        b'0' => Ok(acc << 1),
        b'1' => Ok((acc << 1) | 1),
        _ => Err(Error::Domain(format!("bitstring {s:?} has a non-binary character"))),
    })
}

pub fn format_bitstring(bits: u64, n: usize) -> String {
    (0..n)
        .rev()
        .map(|k| if (bits >> k) & 1 == 1 { '1' } else { '0' })
        .collect()
}
