//! Domain types and the pure arithmetic of a single p-bit and its weight logic.
//!
//! A p-bit reads an analog input voltage in `[0, 5] V`, decodes it to a
//! dimensionless input `m = 2 V - 5`, and emits logic 1 with probability
//! `sigmoid(m)`. The weight logic computes `I0 (h_j + sum_i J_ij m_i)` from
//! the bipolar outputs of a machine, saturates it to `[-5, 5]` and encodes it
//! back to a voltage with `V = (I + 5) / 2`, the inverse of the p-bit's decode.
//!
//! Nothing in this module knows about time or randomness sources.

use serde::{Deserialize, Serialize};

use crate::error::{PbitError, Result};
use crate::time::SimTime;

/// Upper supply rail. Lower rail is 0 V.
pub const RAIL_VOLTS: f64 = 5.0;

/// Magnitude at which the weight logic saturates its computed input.
pub const INPUT_LIMIT: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LogicLevel {
    Low,
    High,
}

impl LogicLevel {
    pub fn from_bit(bit: bool) -> Self {
        if bit {
            LogicLevel::High
        } else {
            LogicLevel::Low
        }
    }

    pub fn is_high(self) -> bool {
        self == LogicLevel::High
    }

    pub fn bit(self) -> u8 {
        self.is_high() as u8
    }

    /// `m = 2 S - 1`
    pub fn bipolar(self) -> f64 {
        if self.is_high() {
            1.0
        } else {
            -1.0
        }
    }

    pub fn voltage(self) -> Voltage {
        if self.is_high() {
            Voltage::HIGH
        } else {
            Voltage::LOW
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            LogicLevel::Low => LogicLevel::High,
            LogicLevel::High => LogicLevel::Low,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Voltage(pub f64);

impl Voltage {
    pub const LOW: Voltage = Voltage(0.0);
    pub const MID: Voltage = Voltage(RAIL_VOLTS / 2.0);
    pub const HIGH: Voltage = Voltage(RAIL_VOLTS);

    pub fn volts(self) -> f64 {
        self.0
    }

    pub fn within_rails(self) -> bool {
        (0.0..=RAIL_VOLTS).contains(&self.0)
    }
}

/// Coupling matrix `J`, bias vector `h` and correlation strength `I0` of one
/// Boltzmann machine. `J` is stored row-major, has a zero diagonal and is
/// symmetric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingMatrix {
    n: usize,
    j: Vec<f64>,
    h: Vec<f64>,
    i0: f64,
}

impl CouplingMatrix {
    pub fn new(j: Vec<Vec<f64>>, h: Vec<f64>, i0: f64) -> Result<Self> {
        let n = h.len();
        if j.len() != n || j.iter().any(|row| row.len() != n) {
            return Err(PbitError::config(format!(
                "J must be {n}x{n} to match h of length {n}"
            )));
        }
        Self::from_flat(n, j.into_iter().flatten().collect(), h, i0)
    }

    pub fn from_flat(n: usize, j: Vec<f64>, h: Vec<f64>, i0: f64) -> Result<Self> {
        if j.len() != n * n || h.len() != n {
            return Err(PbitError::config(format!(
                "dimension mismatch: expected {n}x{n} J and {n} biases"
            )));
        }
        if !i0.is_finite() || i0 < 0.0 {
            return Err(PbitError::config(format!(
                "I0 must be finite and >= 0, got {i0}"
            )));
        }
        if j.iter().chain(h.iter()).any(|x| !x.is_finite()) {
            return Err(PbitError::config("J and h entries must be finite"));
        }
        for a in 0..n {
            if j[a * n + a] != 0.0 {
                return Err(PbitError::config(format!("J[{a}][{a}] must be zero")));
            }
            for b in (a + 1)..n {
                if j[a * n + b] != j[b * n + a] {
                    return Err(PbitError::config(format!(
                        "J must be symmetric within a machine: J[{a}][{b}] != J[{b}][{a}]"
                    )));
                }
            }
        }
        Ok(Self { n, j, h, i0 })
    }

    /// Uncoupled machine with zero biases.
    pub fn zeros(n: usize, i0: f64) -> Self {
        Self {
            n,
            j: vec![0.0; n * n],
            h: vec![0.0; n],
            i0,
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn i0(&self) -> f64 {
        self.i0
    }

    pub fn with_i0(&self, i0: f64) -> Result<Self> {
        Self::from_flat(self.n, self.j.clone(), self.h.clone(), i0)
    }

    pub fn j(&self, a: usize, b: usize) -> f64 {
        self.j[a * self.n + b]
    }

    pub fn h(&self, a: usize) -> f64 {
        self.h[a]
    }

    pub fn biases(&self) -> &[f64] {
        &self.h
    }

    pub fn row(&self, a: usize) -> &[f64] {
        &self.j[a * self.n..(a + 1) * self.n]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|a| self.row(a).to_vec()).collect()
    }

    /// Unsaturated input `I'_j = I0 (h_j + sum_i J_ji m_i)` for bipolar `m`.
    pub fn local_input(&self, j: usize, bipolar: &[f64]) -> f64 {
        let field: f64 = self.row(j).iter().zip(bipolar).map(|(w, m)| w * m).sum();
        self.i0 * (self.h[j] + field)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode", content = "source")]
pub enum TerminalMode {
    Free,
    /// Input tied to the 5 V rail.
    ClampedHigh,
    /// Input tied to ground.
    ClampedLow,
    /// Input driven by the output of a p-bit in another machine.
    Wired(usize),
}

impl TerminalMode {
    pub fn clamped(level: LogicLevel) -> Self {
        match level {
            LogicLevel::High => TerminalMode::ClampedHigh,
            LogicLevel::Low => TerminalMode::ClampedLow,
        }
    }

    /// Rail value for clamped modes.
    pub fn rail(self) -> Option<LogicLevel> {
        match self {
            TerminalMode::ClampedHigh => Some(LogicLevel::High),
            TerminalMode::ClampedLow => Some(LogicLevel::Low),
            _ => None,
        }
    }

    pub fn is_free(self) -> bool {
        self == TerminalMode::Free
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PBitConfig {
    pub id: usize,
    pub retention_time: SimTime,
    pub phase: SimTime,
    pub jitter_fraction: f64,
    pub mode: TerminalMode,
}

impl PBitConfig {
    pub fn new(id: usize, retention_time: SimTime) -> Self {
        Self {
            id,
            retention_time,
            phase: SimTime::ZERO,
            jitter_fraction: DEFAULT_JITTER,
            mode: TerminalMode::Free,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.retention_time == SimTime::ZERO {
            return Err(PbitError::config(format!(
                "p-bit {}: retention time must be positive",
                self.id
            )));
        }
        if !(0.0..1.0).contains(&self.jitter_fraction) {
            return Err(PbitError::config(format!(
                "p-bit {}: jitter fraction must lie in [0, 1), got {}",
                self.id, self.jitter_fraction
            )));
        }
        Ok(())
    }
}

/// Per-update retention-time jitter used unless a scenario overrides it.
pub const DEFAULT_JITTER: f64 = 0.005;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuantizationConfig {
    /// DAC resolution on the weight-logic write path; 0 disables quantization.
    pub dac_bits: u32,
    /// ADC resolution on the p-bit read path; 0 disables quantization.
    pub adc_bits: u32,
    pub vref: Voltage,
}

impl Default for QuantizationConfig {
    fn default() -> Self {
        Self {
            dac_bits: 0,
            adc_bits: 0,
            vref: Voltage::HIGH,
        }
    }
}

impl QuantizationConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dac_bits > 24 || self.adc_bits > 24 {
            return Err(PbitError::config("converter resolution above 24 bits"));
        }
        if !(self.vref.0 > 0.0 && self.vref.0.is_finite()) {
            return Err(PbitError::config("vref must be positive"));
        }
        Ok(())
    }

    pub fn dac(&self, v: Voltage) -> Voltage {
        quantize(v, self.dac_bits, self.vref)
    }

    pub fn adc(&self, v: Voltage) -> Voltage {
        quantize(v, self.adc_bits, self.vref)
    }
}

/// Converter code for `v` at `bits` resolution: nearest code, ties away from
/// zero, clamped to `[0, 2^bits - 1]`.
pub fn converter_code(v: Voltage, bits: u32, vref: Voltage) -> u32 {
    let steps = (1u64 << bits) as f64;
    let code = (v.0 / vref.0 * steps).round();
    code.clamp(0.0, steps - 1.0) as u32
}

/// Maps `v` onto the converter grid `code * vref / 2^bits`. Zero bits is the
/// identity.
pub fn quantize(v: Voltage, bits: u32, vref: Voltage) -> Voltage {
    if bits == 0 {
        return v;
    }
    let steps = (1u64 << bits) as f64;
    Voltage(converter_code(v, bits, vref) as f64 * vref.0 / steps)
}

/// `S(x) = 1 / (1 + e^{-2x})`, equivalently `(1 + tanh x) / 2`.
pub fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-2.0 * x).exp())
}

pub fn saturate(x: f64) -> f64 {
    x.clamp(-INPUT_LIMIT, INPUT_LIMIT)
}

/// The p-bit's input decode `m = 2 V - 5`.
pub fn decode_input(v: Voltage) -> f64 {
    2.0 * v.0 - RAIL_VOLTS
}

/// The weight logic's output encode `V = (I + 5) / 2`.
pub fn encode_input(i: f64) -> Voltage {
    Voltage((i + RAIL_VOLTS) / 2.0)
}

/// One p-bit update: emit High iff `sigmoid(2 V - 5) > u`.
///
/// `u` is a uniform draw in `[0, 1)` supplied by the caller.
pub fn sample_pbit(v_in: Voltage, u: f64) -> Result<LogicLevel> {
    if !v_in.within_rails() {
        return Err(PbitError::Contract(format!(
            "p-bit input {} V lies outside [0, {RAIL_VOLTS}] V",
            v_in.0
        )));
    }
    if !(0.0..1.0).contains(&u) {
        return Err(PbitError::Contract(format!(
            "uniform draw {u} outside [0, 1)"
        )));
    }
    let bias = sigmoid(decode_input(v_in));
    Ok(LogicLevel::from_bit(bias > u))
}

/// Probability that a p-bit held at `v_in` emits High.
pub fn high_probability(v_in: Voltage) -> f64 {
    sigmoid(decode_input(v_in))
}

/// Published voltage for free p-bit `j` given the machine's bipolar outputs.
pub(crate) fn free_input_voltage(
    coupling: &CouplingMatrix,
    j: usize,
    bipolar: &[f64],
    q: &QuantizationConfig,
) -> Voltage {
    let saturated = saturate(coupling.local_input(j, bipolar));
    q.dac(encode_input(saturated))
}

/// Weight logic for one machine.
///
/// `outputs` is a snapshot of every p-bit in the machine. Free p-bits get the
/// encoded, saturated, optionally quantized weighted sum; clamped p-bits get
/// their rail; wired p-bits are skipped (`None`) because their input is bound
/// to another machine.
pub fn weight_inputs(
    coupling: &CouplingMatrix,
    outputs: &[LogicLevel],
    modes: &[TerminalMode],
    q: &QuantizationConfig,
) -> Result<Vec<Option<Voltage>>> {
    let n = coupling.len();
    if outputs.len() != n || modes.len() != n {
        return Err(PbitError::config(format!(
            "weight logic for {n} p-bits received {} outputs and {} modes",
            outputs.len(),
            modes.len()
        )));
    }
    let bipolar: Vec<f64> = outputs.iter().map(|s| s.bipolar()).collect();
    Ok(modes
        .iter()
        .enumerate()
        .map(|(j, mode)| match mode {
            TerminalMode::Free => Some(free_input_voltage(coupling, j, &bipolar, q)),
            TerminalMode::ClampedHigh => Some(Voltage::HIGH),
            TerminalMode::ClampedLow => Some(Voltage::LOW),
            TerminalMode::Wired(_) => None,
        })
        .collect())
}

/// `tau0 * exp(delta / kT)`, in seconds.
pub fn retention_time_from_barrier(tau0_seconds: f64, delta_over_kt: f64) -> Result<f64> {
    if !(tau0_seconds > 0.0 && tau0_seconds.is_finite()) {
        return Err(PbitError::argument("tau0 must be positive and finite"));
    }
    if !(delta_over_kt >= 0.0) {
        return Err(PbitError::argument("barrier height must be >= 0"));
    }
    let tau = tau0_seconds * delta_over_kt.exp();
    // The result must also fit the virtual clock (u64 microseconds).
    if !tau.is_finite() || tau * 1e6 >= u64::MAX as f64 {
        return Err(PbitError::Range(format!(
            "retention time {tau0_seconds} s * exp({delta_over_kt}) overflows"
        )));
    }
    Ok(tau)
}
