//! Machines, directed wires between machines and the network they form.
//!
//! P-bits get global ids by concatenating machines in order, so each machine
//! owns a contiguous id range.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{PbitError, Result};
use crate::model::{CouplingMatrix, LogicLevel, PBitConfig, QuantizationConfig, TerminalMode};
use crate::time::SimTime;

/// Packed network states use one `u64` word.
pub const MAX_PBITS: usize = 64;

/// One Boltzmann machine: symmetric couplings served by one weight-logic
/// block that refreshes every `tau_sample`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MachineSpec {
    pub name: String,
    pub coupling: CouplingMatrix,
    pub tau_sample: SimTime,
    pub quantization: QuantizationConfig,
    /// Local order matches the coupling matrix; `id` fields hold global ids.
    pub pbits: Vec<PBitConfig>,
}

impl MachineSpec {
    /// Machine with every p-bit free, `tau_N = 200 ms`, `tau_sample = 1 ms`.
    pub fn new(name: impl Into<String>, coupling: CouplingMatrix) -> Self {
        let pbits = (0..coupling.len())
            .map(|i| PBitConfig::new(i, SimTime::from_millis(200)))
            .collect();
        Self {
            name: name.into(),
            coupling,
            tau_sample: SimTime::from_millis(1),
            quantization: QuantizationConfig::default(),
            pbits,
        }
    }

    pub fn len(&self) -> usize {
        self.pbits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pbits.is_empty()
    }

    pub fn modes(&self) -> Vec<TerminalMode> {
        self.pbits.iter().map(|p| p.mode).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Wire {
    pub source: usize,
    pub dest: usize,
    /// Interconnect delay; zero means the destination reads the source's
    /// current output.
    #[serde(default)]
    pub delay: SimTime,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkSpec {
    pub machines: Vec<MachineSpec>,
    pub wires: Vec<Wire>,
    /// Semantic names ("A", "S0", "Cout") to global p-bit ids.
    pub labels: BTreeMap<String, usize>,
    /// Machine whose weight-logic refresh drives trace logging.
    pub log_machine: usize,
}

impl NetworkSpec {
    pub fn empty() -> Self {
        Self {
            machines: Vec::new(),
            wires: Vec::new(),
            labels: BTreeMap::new(),
            log_machine: 0,
        }
    }

    pub fn single(machine: MachineSpec, labels: &[(&str, usize)]) -> Self {
        let mut net = Self::empty();
        net.push_machine(machine, "", labels);
        net
    }

    /// Appends a machine, renumbers its p-bits to global ids and registers
    /// `prefix + label` for each local label. Returns the global offset.
    pub fn push_machine(
        &mut self,
        mut machine: MachineSpec,
        prefix: &str,
        labels: &[(&str, usize)],
    ) -> usize {
        let offset = self.pbit_count();
        for (local, p) in machine.pbits.iter_mut().enumerate() {
            p.id = offset + local;
        }
        for (label, local) in labels {
            self.labels
                .insert(format!("{prefix}{label}"), offset + local);
        }
        self.machines.push(machine);
        offset
    }

    pub fn pbit_count(&self) -> usize {
        self.machines.iter().map(|m| m.len()).sum()
    }

    pub fn machine_offsets(&self) -> Vec<usize> {
        let mut offsets = Vec::with_capacity(self.machines.len());
        let mut acc = 0;
        for m in &self.machines {
            offsets.push(acc);
            acc += m.len();
        }
        offsets
    }

    /// `(machine index, local index)` of a global id.
    pub fn locate(&self, id: usize) -> Option<(usize, usize)> {
        let mut offset = 0;
        for (mi, m) in self.machines.iter().enumerate() {
            if id < offset + m.len() {
                return Some((mi, id - offset));
            }
            offset += m.len();
        }
        None
    }

    pub fn pbit(&self, id: usize) -> Option<&PBitConfig> {
        let (m, l) = self.locate(id)?;
        Some(&self.machines[m].pbits[l])
    }

    pub fn pbit_mut(&mut self, id: usize) -> Option<&mut PBitConfig> {
        let (m, l) = self.locate(id)?;
        Some(&mut self.machines[m].pbits[l])
    }

    pub fn pbits(&self) -> impl Iterator<Item = &PBitConfig> {
        self.machines.iter().flat_map(|m| m.pbits.iter())
    }

    pub fn pbits_mut(&mut self) -> impl Iterator<Item = &mut PBitConfig> {
        self.machines.iter_mut().flat_map(|m| m.pbits.iter_mut())
    }

    pub fn label(&self, name: &str) -> Result<usize> {
        self.labels
            .get(name)
            .copied()
            .ok_or_else(|| PbitError::argument(format!("unknown label `{name}`")))
    }

    pub fn labels_of(&self, names: &[&str]) -> Result<Vec<usize>> {
        names.iter().map(|n| self.label(n)).collect()
    }

    pub fn is_single_machine(&self) -> bool {
        self.machines.len() == 1 && self.wires.is_empty()
    }

    /// Ties the input of `name` to the rail for `level`.
    pub fn clamp(&mut self, name: &str, level: LogicLevel) -> Result<()> {
        let id = self.label(name)?;
        let p = self.pbit_mut(id).expect("label ids are in range");
        if let TerminalMode::Wired(_) = p.mode {
            return Err(PbitError::config(format!(
                "`{name}` is wired and cannot be clamped"
            )));
        }
        p.mode = TerminalMode::clamped(level);
        Ok(())
    }

    /// Clamps the bits of `value` onto labels listed most-significant first.
    pub fn clamp_word(&mut self, names: &[&str], value: u64) -> Result<()> {
        let w = names.len();
        if w < 64 && value >> w != 0 {
            return Err(PbitError::argument(format!(
                "{value} does not fit in {w} bits"
            )));
        }
        for (k, name) in names.iter().enumerate() {
            let bit = (value >> (w - 1 - k)) & 1 == 1;
            self.clamp(name, LogicLevel::from_bit(bit))?;
        }
        Ok(())
    }

    /// Directed connection: `dest` stops listening to its weight logic and
    /// follows the output of `source`.
    pub fn wire(&mut self, source: usize, dest: usize, delay: SimTime) -> Result<()> {
        let p = self
            .pbit_mut(dest)
            .ok_or_else(|| PbitError::config(format!("wire destination {dest} out of range")))?;
        p.mode = TerminalMode::Wired(source);
        self.wires.push(Wire {
            source,
            dest,
            delay,
        });
        Ok(())
    }

    pub fn set_jitter(&mut self, jitter_fraction: f64) {
        for p in self.pbits_mut() {
            p.jitter_fraction = jitter_fraction;
        }
    }

    pub fn set_tau_sample(&mut self, tau: SimTime) {
        for m in &mut self.machines {
            m.tau_sample = tau;
        }
    }

    pub fn set_quantization(&mut self, q: QuantizationConfig) {
        for m in &mut self.machines {
            m.quantization = q;
        }
    }

    pub fn set_i0(&mut self, i0: f64) -> Result<()> {
        for m in &mut self.machines {
            m.coupling = m.coupling.with_i0(i0)?;
        }
        Ok(())
    }

    pub fn min_retention(&self) -> Option<SimTime> {
        self.pbits().map(|p| p.retention_time).min()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.pbit_count();
        if self.machines.is_empty() {
            return Err(PbitError::config("network has no machines"));
        }
        if n > MAX_PBITS {
            return Err(PbitError::Capacity(format!(
                "{n} p-bits exceeds the {MAX_PBITS}-bit packed state"
            )));
        }
        if self.log_machine >= self.machines.len() {
            return Err(PbitError::config("log machine index out of range"));
        }
        let mut id = 0;
        for (mi, m) in self.machines.iter().enumerate() {
            if m.coupling.len() != m.pbits.len() {
                return Err(PbitError::config(format!(
                    "machine `{}`: {} couplings for {} p-bits",
                    m.name,
                    m.coupling.len(),
                    m.pbits.len()
                )));
            }
            if m.tau_sample == SimTime::ZERO {
                return Err(PbitError::config(format!(
                    "machine `{}`: tau_sample must be > 0",
                    m.name
                )));
            }
            m.quantization.validate()?;
            for p in &m.pbits {
                if p.id != id {
                    return Err(PbitError::config(format!(
                        "machine `{}`: p-bit id {} out of order (expected {id})",
                        m.name, p.id
                    )));
                }
                p.validate()?;
                if let TerminalMode::Wired(src) = p.mode {
                    let (src_m, _) = self.locate(src).ok_or_else(|| {
                        PbitError::config(format!("p-bit {id} wired to missing p-bit {src}"))
                    })?;
                    if src_m == mi {
                        return Err(PbitError::config(format!(
                            "p-bit {id} wired within its own machine; directed wires must cross machines"
                        )));
                    }
                    let count = self.wires.iter().filter(|w| w.dest == id).count();
                    if count != 1 || !self.wires.iter().any(|w| w.dest == id && w.source == src) {
                        return Err(PbitError::config(format!(
                            "p-bit {id} must have exactly one wire, from {src}"
                        )));
                    }
                }
                id += 1;
            }
        }
        for w in &self.wires {
            match self.pbit(w.dest).map(|p| p.mode) {
                Some(TerminalMode::Wired(src)) if src == w.source => {}
                _ => {
                    return Err(PbitError::config(format!(
                        "wire {} -> {} does not match the destination's mode",
                        w.source, w.dest
                    )))
                }
            }
        }
        // No pair of machines may drive each other.
        let edges: Vec<(usize, usize)> = self
            .wires
            .iter()
            .map(|w| {
                (
                    self.locate(w.source).unwrap().0,
                    self.locate(w.dest).unwrap().0,
                )
            })
            .collect();
        for &(a, b) in &edges {
            if edges.contains(&(b, a)) {
                return Err(PbitError::config(format!(
                    "machines {a} and {b} are wired in both directions"
                )));
            }
        }
        for (label, &id) in &self.labels {
            if id >= n {
                return Err(PbitError::config(format!(
                    "label `{label}` points past the last p-bit"
                )));
            }
        }
        Ok(())
    }
}

/// Assignment of retention times `tau_N` to p-bits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RetentionPlan {
    Uniform {
        ms: f64,
    },
    /// One value per p-bit in global order.
    PerPbit {
        ms: Vec<f64>,
    },
    /// Independent normal draws, clipped to `[min_ms, max_ms]`.
    Normal {
        mean_ms: f64,
        std_ms: f64,
        min_ms: f64,
        max_ms: f64,
        seed: u64,
    },
}

impl RetentionPlan {
    pub fn uniform_ms(ms: f64) -> Self {
        RetentionPlan::Uniform { ms }
    }

    pub fn times(&self, n: usize) -> Result<Vec<SimTime>> {
        let ms: Vec<f64> = match self {
            RetentionPlan::Uniform { ms } => vec![*ms; n],
            RetentionPlan::PerPbit { ms } => {
                if ms.len() != n {
                    return Err(PbitError::config(format!(
                        "retention plan lists {} values for {n} p-bits",
                        ms.len()
                    )));
                }
                ms.clone()
            }
            RetentionPlan::Normal {
                mean_ms,
                std_ms,
                min_ms,
                max_ms,
                seed,
            } => {
                if !(min_ms <= max_ms) {
                    return Err(PbitError::config("retention plan: min_ms > max_ms"));
                }
                let normal = Normal::new(*mean_ms, *std_ms)
                    .map_err(|e| PbitError::config(format!("retention plan: {e}")))?;
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                (0..n)
                    .map(|_| normal.sample(&mut rng).clamp(*min_ms, *max_ms))
                    .collect()
            }
        };
        ms.iter()
            .map(|&v| {
                if v.is_finite() && v > 0.0 {
                    Ok(SimTime::from_millis_f64(v))
                } else {
                    Err(PbitError::config(format!(
                        "retention time {v} ms must be positive"
                    )))
                }
            })
            .collect()
    }

    pub fn apply(&self, net: &mut NetworkSpec) -> Result<()> {
        let times = self.times(net.pbit_count())?;
        for (p, t) in net.pbits_mut().zip(times) {
            p.retention_time = t;
        }
        Ok(())
    }
}

/// Initial offsets of each p-bit's first update.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhasePlan {
    /// Every p-bit first updates at t = 0.
    Aligned,
    /// Local p-bit `i` of an `n`-bit machine starts at `i * tau_N / n`.
    Staggered,
    /// Uniform in `[0, tau_N)`, drawn from the given seed.
    Random { seed: u64 },
}

impl PhasePlan {
    pub fn apply(&self, net: &mut NetworkSpec) {
        match *self {
            PhasePlan::Aligned => {
                for p in net.pbits_mut() {
                    p.phase = SimTime::ZERO;
                }
            }
            PhasePlan::Staggered => {
                for m in &mut net.machines {
                    let n = m.pbits.len() as u64;
                    for (i, p) in m.pbits.iter_mut().enumerate() {
                        p.phase = SimTime(p.retention_time.0 * i as u64 / n);
                    }
                }
            }
            PhasePlan::Random { seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                for p in net.pbits_mut() {
                    p.phase = SimTime(rng.random_range(0..p.retention_time.0));
                }
            }
        }
    }
}
