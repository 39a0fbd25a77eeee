//! Exact Boltzmann statistics of a single machine by full enumeration.

use std::io::Write;

use crate::analysis::encode_word;
use crate::error::{PbitError, Result};
use crate::model::{CouplingMatrix, TerminalMode};
use crate::network::NetworkSpec;

/// Largest machine the oracle will enumerate.
pub const MAX_ENUMERATION: usize = 24;

/// `E = -I0 (1/2 sum_ij J_ij m_i m_j + sum_i h_i m_i)` for a bipolar state.
pub fn energy(coupling: &CouplingMatrix, state: &[f64]) -> Result<f64> {
    if state.len() != coupling.len() {
        return Err(PbitError::argument(format!(
            "state has {} entries for {} p-bits",
            state.len(),
            coupling.len()
        )));
    }
    if let Some(bad) = state.iter().find(|&&m| m != 1.0 && m != -1.0) {
        return Err(PbitError::argument(format!(
            "state entry {bad} is not bipolar"
        )));
    }
    Ok(energy_unchecked(coupling, state))
}

fn energy_unchecked(coupling: &CouplingMatrix, m: &[f64]) -> f64 {
    let mut pair = 0.0;
    let mut bias = 0.0;
    for i in 0..m.len() {
        let row = coupling.row(i);
        let mut s = 0.0;
        for j in 0..m.len() {
            s += row[j] * m[j];
        }
        pair += 0.5 * m[i] * s;
        bias += coupling.h(i) * m[i];
    }
    -coupling.i0() * (pair + bias)
}

/// Energy of a packed state (bit `i` set means p-bit `i` is high).
pub fn energy_of(coupling: &CouplingMatrix, state: u64) -> f64 {
    let m: Vec<f64> = (0..coupling.len())
        .map(|i| if (state >> i) & 1 == 1 { 1.0 } else { -1.0 })
        .collect();
    energy_unchecked(coupling, &m)
}

/// Visits every state consistent with `fixed` (`Some(bit)` pins a p-bit) in
/// Gray-code order, passing `(packed state, dimensionless energy E / I0)`.
/// Energies are updated incrementally in O(n) per state.
pub(crate) fn for_each_state(
    j: &[f64],
    h: &[f64],
    fixed: &[Option<bool>],
    mut visit: impl FnMut(u64, f64),
) -> Result<()> {
    let n = h.len();
    if n > MAX_ENUMERATION {
        return Err(PbitError::Capacity(format!(
            "{n} p-bits exceeds the {MAX_ENUMERATION}-bit enumeration limit"
        )));
    }
    let free: Vec<usize> = (0..n).filter(|&i| fixed[i].is_none()).collect();
    let mut m: Vec<f64> = fixed
        .iter()
        .map(|f| if *f == Some(true) { 1.0 } else { -1.0 })
        .collect();
    let mut state: u64 = fixed
        .iter()
        .enumerate()
        .filter(|(_, f)| **f == Some(true))
        .fold(0, |acc, (i, _)| acc | (1 << i));
    // field[i] = sum_k J_ik m_k
    let mut field: Vec<f64> = (0..n)
        .map(|i| (0..n).map(|k| j[i * n + k] * m[k]).sum())
        .collect();
    let mut e: f64 = -(0..n)
        .map(|i| 0.5 * m[i] * field[i] + h[i] * m[i])
        .sum::<f64>();
    visit(state, e);
    for step in 1u64..(1u64 << free.len()) {
        let k = free[step.trailing_zeros() as usize];
        let old = m[k];
        e += 2.0 * old * (field[k] + h[k]);
        for (i, f) in field.iter_mut().enumerate() {
            *f -= 2.0 * j[i * n + k] * old;
        }
        m[k] = -old;
        state ^= 1 << k;
        visit(state, e);
    }
    Ok(())
}

/// Boltzmann probabilities of all `2^n` packed states; states inconsistent
/// with the clamps carry probability zero.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactDistribution {
    pub n: usize,
    /// Indexed by packed state, bit `i` = p-bit `i`.
    pub probabilities: Vec<f64>,
}

impl ExactDistribution {
    pub fn probability(&self, state: u64) -> f64 {
        self.probabilities[state as usize]
    }

    pub fn total(&self) -> f64 {
        self.probabilities.iter().sum()
    }

    /// Marginal over the listed p-bits, indexed by the word they form with
    /// the first id as most significant bit.
    pub fn project(&self, ids: &[usize]) -> Result<Vec<f64>> {
        if let Some(&bad) = ids.iter().find(|&&i| i >= self.n) {
            return Err(PbitError::argument(format!("p-bit {bad} out of range")));
        }
        let mut out = vec![0.0; 1 << ids.len()];
        for (s, &p) in self.probabilities.iter().enumerate() {
            out[encode_word(s as u64, ids) as usize] += p;
        }
        Ok(out)
    }

    /// Conditions on the clamped p-bits' rail values.
    pub fn condition(&self, modes: &[TerminalMode]) -> Result<ExactDistribution> {
        let fixed = fixed_bits(self.n, modes)?;
        let mut probabilities: Vec<f64> = self
            .probabilities
            .iter()
            .enumerate()
            .map(|(s, &p)| if consistent(s as u64, &fixed) { p } else { 0.0 })
            .collect();
        let z: f64 = probabilities.iter().sum();
        if z <= 0.0 {
            return Err(PbitError::argument(
                "conditioning event has zero probability",
            ));
        }
        for p in &mut probabilities {
            *p /= z;
        }
        Ok(ExactDistribution {
            n: self.n,
            probabilities,
        })
    }

    /// CSV `state_bits,probability`; `state_bits` lists p-bit 0 first.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "state_bits,probability")?;
        for (s, p) in self.probabilities.iter().enumerate() {
            let bits: String = (0..self.n)
                .map(|i| if (s >> i) & 1 == 1 { '1' } else { '0' })
                .collect();
            writeln!(out, "{bits},{p:.17e}")?;
        }
        Ok(())
    }
}

fn fixed_bits(n: usize, modes: &[TerminalMode]) -> Result<Vec<Option<bool>>> {
    if modes.len() != n {
        return Err(PbitError::config(format!(
            "{} modes for {n} p-bits",
            modes.len()
        )));
    }
    modes
        .iter()
        .enumerate()
        .map(|(i, m)| match m {
            TerminalMode::Free => Ok(None),
            TerminalMode::ClampedHigh => Ok(Some(true)),
            TerminalMode::ClampedLow => Ok(Some(false)),
            TerminalMode::Wired(_) => Err(PbitError::Unsupported(format!(
                "p-bit {i} is wired; the oracle covers isolated machines only"
            ))),
        })
        .collect()
}

fn consistent(state: u64, fixed: &[Option<bool>]) -> bool {
    fixed
        .iter()
        .enumerate()
        .all(|(i, f)| f.is_none_or(|b| ((state >> i) & 1 == 1) == b))
}

/// `P(state) = exp(-E(state)) / Z` over the states consistent with `modes`.
pub fn boltzmann_distribution(
    coupling: &CouplingMatrix,
    modes: &[TerminalMode],
) -> Result<ExactDistribution> {
    let n = coupling.len();
    if n > MAX_ENUMERATION {
        return Err(PbitError::Capacity(format!(
            "{n} p-bits exceeds the {MAX_ENUMERATION}-bit enumeration limit"
        )));
    }
    let fixed = fixed_bits(n, modes)?;
    let i0 = coupling.i0();
    let j: Vec<f64> = coupling.rows().concat();
    let mut log_w = vec![f64::NEG_INFINITY; 1 << n];
    let mut max = f64::NEG_INFINITY;
    for_each_state(&j, coupling.biases(), &fixed, |s, e| {
        let w = -i0 * e;
        log_w[s as usize] = w;
        max = max.max(w);
    })?;
    let mut probabilities: Vec<f64> = log_w.iter().map(|&w| (w - max).exp()).collect();
    let z: f64 = probabilities.iter().sum();
    for p in &mut probabilities {
        *p /= z;
    }
    Ok(ExactDistribution { n, probabilities })
}

/// Oracle for a network that is one unwired machine.
pub fn network_distribution(net: &NetworkSpec) -> Result<ExactDistribution> {
    if !net.is_single_machine() {
        return Err(PbitError::Unsupported(
            "composite networks have no Boltzmann oracle".into(),
        ));
    }
    let m = &net.machines[0];
    boltzmann_distribution(&m.coupling, &m.modes())
}

pub fn euclidean_distance(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(PbitError::argument(format!(
            "distributions over {} and {} states",
            p.len(),
            q.len()
        )));
    }
    Ok(p.iter()
        .zip(q)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt())
}
