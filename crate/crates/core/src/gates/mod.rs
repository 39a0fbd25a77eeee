//! Gate Hamiltonians whose ground states encode a truth table.

mod compose;
pub mod library;
mod synth;

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::analysis::{encode_word, word_label};
use crate::error::{PbitError, Result};
use crate::model::CouplingMatrix;
use crate::oracle::{for_each_state, MAX_ENUMERATION};

pub use compose::{compose, fold_constant, Part};
pub use synth::{synthesize_gate, SynthesisRequest};

/// Energies closer than this count as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Terminal {
    pub label: String,
    pub index: usize,
}

/// On-disk gate description. `truth_table` rows are bit strings over
/// `visible` in listed order, first label leftmost.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GateSpec {
    pub name: String,
    pub n: usize,
    pub visible: Vec<Terminal>,
    pub auxiliary: Vec<usize>,
    pub truth_table: Vec<String>,
    #[serde(rename = "J")]
    pub j: Vec<Vec<f64>>,
    pub h: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub origin: Option<String>,
}

impl GateSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let gate: GateSpec = serde_json::from_str(text)?;
        gate.check_shape()?;
        Ok(gate)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("gate specs serialize");
        s.push('\n');
        s
    }

    pub fn labels(&self) -> Vec<&str> {
        self.visible.iter().map(|t| t.label.as_str()).collect()
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.visible
            .iter()
            .find(|t| t.label == label)
            .map(|t| t.index)
            .ok_or_else(|| {
                PbitError::argument(format!("gate `{}` has no terminal `{label}`", self.name))
            })
    }

    pub fn coupling(&self, i0: f64) -> Result<CouplingMatrix> {
        CouplingMatrix::new(self.j.clone(), self.h.clone(), i0)
    }

    /// Truth rows as words over the visible terminals.
    pub fn truth_words(&self) -> Result<BTreeSet<u64>> {
        let w = self.visible.len();
        let mut set = BTreeSet::new();
        for row in &self.truth_table {
            if row.len() != w || !row.chars().all(|c| c == '0' || c == '1') {
                return Err(PbitError::config(format!(
                    "gate `{}`: truth row `{row}` is not {w} binary digits",
                    self.name
                )));
            }
            if !set.insert(u64::from_str_radix(row, 2).unwrap()) {
                return Err(PbitError::config(format!(
                    "gate `{}`: duplicate truth row `{row}`",
                    self.name
                )));
            }
        }
        Ok(set)
    }

    /// Structural checks: indices partition `0..n`, matrix shapes, distinct rows.
    pub fn check_shape(&self) -> Result<()> {
        let bad = |msg: String| Err(PbitError::config(format!("gate `{}`: {msg}", self.name)));
        if self.j.len() != self.n || self.h.len() != self.n {
            return bad(format!("J/h sizes do not match n = {}", self.n));
        }
        let mut seen = vec![false; self.n];
        for idx in self
            .visible
            .iter()
            .map(|t| t.index)
            .chain(self.auxiliary.iter().copied())
        {
            if idx >= self.n || std::mem::replace(&mut seen[idx], true) {
                return bad(format!("index {idx} repeated or out of range"));
            }
        }
        if seen.iter().any(|s| !s) {
            return bad("visible and auxiliary indices must cover every p-bit".into());
        }
        let labels: BTreeSet<&str> = self.visible.iter().map(|t| t.label.as_str()).collect();
        if labels.len() != self.visible.len() {
            return bad("duplicate terminal label".into());
        }
        self.truth_words()?;
        self.coupling(1.0)?;
        Ok(())
    }

    fn visible_ids(&self) -> Vec<usize> {
        self.visible.iter().map(|t| t.index).collect()
    }
}

/// A gate whose ground states were checked against its truth table.
#[derive(Debug, Clone, PartialEq)]
pub struct VerifiedGate {
    spec: GateSpec,
    /// Ground energy `E / I0`.
    pub ground_energy: f64,
    /// Energy gap `E / I0` from the ground set to the next level.
    pub gap: f64,
    /// Number of ground states over all p-bits.
    pub ground_states: usize,
}

impl VerifiedGate {
    pub fn spec(&self) -> &GateSpec {
        &self.spec
    }

    pub fn into_spec(self) -> GateSpec {
        self.spec
    }

    pub fn coupling(&self, i0: f64) -> Result<CouplingMatrix> {
        if i0 < 0.0 {
            return Err(PbitError::argument(format!("I0 = {i0} must be >= 0")));
        }
        self.spec.coupling(i0)
    }
}

/// Why a gate failed verification.
#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub gate: String,
    pub ground_energy: f64,
    /// Ground states whose visible projection is not a truth row, as
    /// `(full state bits p-bit 0 first, visible word)`.
    pub spurious: Vec<(String, String)>,
    /// Truth rows reached by no ground state.
    pub missing: Vec<String>,
}

impl VerificationReport {
    pub fn summary(&self) -> String {
        let mut parts = Vec::new();
        if !self.spurious.is_empty() {
            let shown: Vec<String> = self
                .spurious
                .iter()
                .take(8)
                .map(|(s, v)| format!("{s} (visible {v})"))
                .collect();
            parts.push(format!(
                "{} spurious ground state(s): {}",
                self.spurious.len(),
                shown.join(", ")
            ));
        }
        if !self.missing.is_empty() {
            parts.push(format!(
                "truth rows above ground: {}",
                self.missing.join(", ")
            ));
        }
        parts.join("; ")
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.gate, self.summary())
    }
}

/// Enumerates every state and checks that the visible projections of the
/// minimum-energy states are exactly the truth table.
pub fn verify_ground_states(gate: &GateSpec, i0_check: f64) -> Result<VerifiedGate> {
    if !(i0_check > 0.0) {
        return Err(PbitError::argument("I0 for verification must be > 0"));
    }
    gate.check_shape()?;
    if gate.n > MAX_ENUMERATION {
        return Err(PbitError::Capacity(format!(
            "gate `{}` has {} p-bits; enumeration is limited to {MAX_ENUMERATION}",
            gate.name, gate.n
        )));
    }
    let truth = gate.truth_words()?;
    let ids = gate.visible_ids();
    let j: Vec<f64> = gate.j.concat();
    let mut energies = vec![0.0; 1 << gate.n];
    for_each_state(&j, &gate.h, &vec![None; gate.n], |s, e| {
        energies[s as usize] = e * i0_check
    })?;

    let min = energies.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut reached = BTreeSet::new();
    let mut spurious = Vec::new();
    let mut ground = 0;
    let mut next = f64::INFINITY;
    for (s, &e) in energies.iter().enumerate() {
        if e - min <= DEGENERACY_TOL {
            ground += 1;
            let word = encode_word(s as u64, &ids);
            reached.insert(word);
            if !truth.contains(&word) {
                spurious.push((
                    (0..gate.n)
                        .map(|i| if (s >> i) & 1 == 1 { '1' } else { '0' })
                        .collect(),
                    word_label(word, ids.len()),
                ));
            }
        } else {
            next = next.min(e);
        }
    }
    let missing: Vec<String> = truth
        .difference(&reached)
        .map(|&w| word_label(w, ids.len()))
        .collect();
    if !spurious.is_empty() || !missing.is_empty() {
        return Err(PbitError::Verification(Box::new(VerificationReport {
            gate: gate.name.clone(),
            ground_energy: min / i0_check,
            spurious,
            missing,
        })));
    }
    Ok(VerifiedGate {
        spec: gate.clone(),
        ground_energy: min / i0_check,
        gap: (next - min) / i0_check,
        ground_states: ground,
    })
}

/// Truth rows of a Boolean function of the first `inputs` visible bits.
pub fn truth_table_of(inputs: usize, f: impl Fn(u64) -> u64, outputs: usize) -> Vec<String> {
    (0..1u64 << inputs)
        .map(|x| word_label((x << outputs) | f(x), inputs + outputs))
        .collect()
}
