//! JSON scenario files, single runs and parameter sweeps.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{histogram, EmpiricalDistribution, DEFAULT_BURN_IN};
use crate::dynamics::{run, Budget, RecordOptions, SampleInstant, SimulationTrace};
use crate::error::{PbitError, Result};
use crate::gates::{verify_ground_states, GateSpec};
use crate::model::{CouplingMatrix, LogicLevel, QuantizationConfig, DEFAULT_JITTER};
use crate::network::{MachineSpec, NetworkSpec, PhasePlan, RetentionPlan};
use crate::networks;
use crate::oracle::{euclidean_distance, network_distribution};
use crate::time::SimTime;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "builder", rename_all = "snake_case", deny_unknown_fields)]
pub enum NetworkRef {
    /// One uncoupled p-bit whose input is held at `I0 * bias`.
    Single {
        bias: f64,
    },
    And {
        i0: f64,
    },
    FullAdder {
        i0: f64,
    },
    Rca4 {
        i0: f64,
    },
    Factorizer {
        i0: f64,
    },
    /// A gate file, resolved relative to the scenario file.
    Gate {
        path: PathBuf,
        i0: f64,
    },
}

impl NetworkRef {
    /// The same network at a different `I0`.
    pub fn with_i0(&self, value: f64) -> Result<Self> {
        let mut out = self.clone();
        match &mut out {
            NetworkRef::Single { .. } => {
                return Err(PbitError::Unsupported("a single p-bit has no I0".into()))
            }
            NetworkRef::And { i0 }
            | NetworkRef::FullAdder { i0 }
            | NetworkRef::Rca4 { i0 }
            | NetworkRef::Factorizer { i0 }
            | NetworkRef::Gate { i0, .. } => *i0 = value,
        }
        Ok(out)
    }
}

/// Clamps the listed labels (most significant first) to the bits of `value`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Clamp {
    pub labels: Vec<String>,
    pub value: u64,
}

impl Clamp {
    pub fn word(labels: &[&str], value: u64) -> Self {
        Clamp {
            labels: labels.iter().map(|s| s.to_string()).collect(),
            value,
        }
    }
}

fn default_seed() -> u64 {
    1
}
fn default_samples() -> u64 {
    500_000
}
fn default_burn_in() -> f64 {
    DEFAULT_BURN_IN
}
fn default_tau_sample() -> f64 {
    1.0
}
fn default_retention() -> RetentionPlan {
    RetentionPlan::Uniform { ms: 200.0 }
}
fn default_phases() -> PhasePlan {
    PhasePlan::Random { seed: 0 }
}
fn default_jitter() -> f64 {
    DEFAULT_JITTER
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub network: NetworkRef,
    #[serde(default)]
    pub clamps: Vec<Clamp>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Trace samples to collect.
    #[serde(default = "default_samples")]
    pub samples: u64,
    #[serde(default = "default_burn_in")]
    pub burn_in: f64,
    #[serde(default = "default_tau_sample")]
    pub tau_sample_ms: f64,
    #[serde(default = "default_retention")]
    pub retention: RetentionPlan,
    #[serde(default = "default_phases")]
    pub phases: PhasePlan,
    #[serde(default = "default_jitter")]
    pub jitter: f64,
    #[serde(default)]
    pub quantization: QuantizationConfig,
    #[serde(default)]
    pub sample_at: SampleInstant,
    /// Histogram labels, most significant first. Defaults per builder.
    #[serde(default)]
    pub visible: Option<Vec<String>>,
    /// Log machine for composite networks (defaults to the first).
    #[serde(default)]
    pub log_machine: Option<usize>,
}

impl ScenarioConfig {
    pub fn new(network: NetworkRef) -> Self {
        Self {
            network,
            clamps: Vec::new(),
            seed: default_seed(),
            samples: default_samples(),
            burn_in: default_burn_in(),
            tau_sample_ms: default_tau_sample(),
            retention: default_retention(),
            phases: default_phases(),
            jitter: default_jitter(),
            quantization: QuantizationConfig::default(),
            sample_at: SampleInstant::default(),
            visible: None,
            log_machine: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ScenarioConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads a scenario and resolves gate paths against its directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut cfg = Self::from_json(&std::fs::read_to_string(path)?)?;
        if let NetworkRef::Gate { path: gate, .. } = &mut cfg.network {
            if gate.is_relative() {
                if let Some(dir) = path.parent() {
                    *gate = dir.join(&*gate);
                }
            }
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.burn_in) {
            return Err(PbitError::config(format!(
                "burn_in {} must lie in [0, 1)",
                self.burn_in
            )));
        }
        if !(self.tau_sample_ms.is_finite() && self.tau_sample_ms >= 0.001) {
            return Err(PbitError::config("tau_sample_ms must be at least 1 us"));
        }
        if !(0.0..1.0).contains(&self.jitter) {
            return Err(PbitError::config("jitter must lie in [0, 1)"));
        }
        self.quantization.validate()?;
        if let Some(v) = &self.visible {
            if v.is_empty() || v.len() > 64 {
                return Err(PbitError::config("visible must list 1..=64 labels"));
            }
        }
        match self.network {
            NetworkRef::Single { bias } if !bias.is_finite() => {
                Err(PbitError::config("bias must be finite"))
            }
            NetworkRef::And { i0 }
            | NetworkRef::FullAdder { i0 }
            | NetworkRef::Rca4 { i0 }
            | NetworkRef::Factorizer { i0 }
            | NetworkRef::Gate { i0, .. }
                if !(i0.is_finite() && i0 >= 0.0) =>
            {
                Err(PbitError::config("i0 must be finite and >= 0"))
            }
            _ => Ok(()),
        }
    }

    /// Builds the network with clamps, timing and quantization applied.
    pub fn build(&self) -> Result<NetworkSpec> {
        self.validate()?;
        let mut net = match &self.network {
            NetworkRef::Single { bias } => {
                let c = CouplingMatrix::new(vec![vec![0.0]], vec![*bias], 1.0)?;
                NetworkSpec::single(MachineSpec::new("pbit", c), &[("X", 0)])
            }
            NetworkRef::And { i0 } => networks::and_network(*i0)?,
            NetworkRef::FullAdder { i0 } => networks::full_adder_network(*i0)?,
            NetworkRef::Rca4 { i0 } => {
                networks::build_rca4(*i0, &RetentionPlan::uniform_ms(200.0))?
            }
            NetworkRef::Factorizer { i0 } => networks::build_factorizer(*i0)?.network,
            NetworkRef::Gate { path, i0 } => {
                let gate = GateSpec::load(path)?;
                let verified = verify_ground_states(&gate, 1.0)?;
                let labels: Vec<(&str, usize)> = gate
                    .visible
                    .iter()
                    .map(|t| (t.label.as_str(), t.index))
                    .collect();
                NetworkSpec::single(
                    MachineSpec::new(gate.name.clone(), verified.coupling(*i0)?),
                    &labels,
                )
            }
        };
        self.retention.apply(&mut net)?;
        self.phases.apply(&mut net);
        net.set_jitter(self.jitter);
        net.set_tau_sample(SimTime::from_millis_f64(self.tau_sample_ms));
        net.set_quantization(self.quantization);
        if let Some(m) = self.log_machine {
            net.log_machine = m;
        }
        for clamp in &self.clamps {
            let labels: Vec<&str> = clamp.labels.iter().map(|s| s.as_str()).collect();
            if labels.len() == 1 && clamp.value > 1 {
                return Err(PbitError::config(format!(
                    "clamp value {} for single label `{}`",
                    clamp.value, labels[0]
                )));
            }
            net.clamp_word(&labels, clamp.value)?;
        }
        net.validate()?;
        Ok(net)
    }

    pub fn visible_labels(&self) -> Vec<String> {
        if let Some(v) = &self.visible {
            return v.clone();
        }
        let v: Vec<&str> = match &self.network {
            NetworkRef::Single { .. } => vec!["X"],
            NetworkRef::And { .. } => vec!["A", "B", "C"],
            NetworkRef::FullAdder { .. } => vec!["A", "B", "Cin", "S", "Cout"],
            NetworkRef::Rca4 { .. } => networks::RCA_A
                .iter()
                .chain(&networks::RCA_B)
                .chain(&networks::RCA_SUM)
                .copied()
                .collect(),
            NetworkRef::Factorizer { .. } => networks::FACT_A
                .iter()
                .chain(&networks::FACT_B)
                .copied()
                .collect(),
            NetworkRef::Gate { path, .. } => {
                return GateSpec::load(path)
                    .map(|g| g.labels().iter().map(|s| s.to_string()).collect())
                    .unwrap_or_default()
            }
        };
        v.into_iter().map(String::from).collect()
    }
}

#[derive(Debug, Clone)]
pub struct ScenarioOutcome {
    pub network: NetworkSpec,
    pub trace: SimulationTrace,
    pub histogram: EmpiricalDistribution,
    /// Oracle over the visible word, for single unwired machines only.
    pub oracle: Option<Vec<f64>>,
    pub distance: Option<f64>,
}

pub fn run_scenario(cfg: &ScenarioConfig) -> Result<ScenarioOutcome> {
    let net = cfg.build()?;
    let labels = cfg.visible_labels();
    let ids = net.labels_of(&labels.iter().map(|s| s.as_str()).collect::<Vec<_>>())?;
    let record = RecordOptions {
        instant: cfg.sample_at,
        updates: false,
    };
    let trace = run(&net, cfg.seed, Budget::Samples(cfg.samples), record)?;
    let hist = histogram(&trace, &ids, &labels, cfg.burn_in)?;
    let (oracle, distance) = if net.is_single_machine() && ids.len() <= 24 {
        let exact = network_distribution(&net)?.project(&ids)?;
        let d = euclidean_distance(&hist.dense()?, &exact)?;
        (Some(exact), Some(d))
    } else {
        (None, None)
    };
    Ok(ScenarioOutcome {
        network: net,
        trace,
        histogram: hist,
        oracle,
        distance,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TauRow {
    pub tau_sample_ms: f64,
    /// `tau_sample / min tau_N`.
    pub tau_ratio: f64,
    pub distance: f64,
    pub histogram: Vec<f64>,
}

fn require_oracle(cfg: &ScenarioConfig) -> Result<()> {
    let net = cfg.build()?;
    if !net.is_single_machine() {
        return Err(PbitError::Unsupported(
            "sweeps compare against the Boltzmann oracle, which needs a single unwired machine"
                .into(),
        ));
    }
    Ok(())
}

/// Oracle distance for each sampling time; every row reuses the base seed.
pub fn sweep_sampling_time(base: &ScenarioConfig, taus_ms: &[f64]) -> Result<Vec<TauRow>> {
    require_oracle(base)?;
    taus_ms
        .par_iter()
        .map(|&tau| {
            let mut cfg = base.clone();
            cfg.tau_sample_ms = tau;
            let out = run_scenario(&cfg)?;
            let min_tau = out
                .network
                .min_retention()
                .expect("non-empty")
                .as_millis_f64();
            Ok(TauRow {
                tau_sample_ms: tau,
                tau_ratio: SimTime::from_millis_f64(tau).as_millis_f64() / min_tau,
                distance: out.distance.expect("single machine"),
                histogram: out.histogram.dense()?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct I0Row {
    pub i0: f64,
    pub distance: f64,
    pub histogram: Vec<f64>,
}

/// Oracle distance for each interaction strength.
pub fn sweep_i0(base: &ScenarioConfig, values: &[f64]) -> Result<Vec<I0Row>> {
    require_oracle(base)?;
    values
        .par_iter()
        .map(|&i0| {
            let mut cfg = base.clone();
            cfg.network = base.network.with_i0(i0)?;
            let out = run_scenario(&cfg)?;
            Ok(I0Row {
                i0,
                distance: out.distance.expect("single machine"),
                histogram: out.histogram.dense()?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RetentionRow {
    pub plan: RetentionPlan,
    pub min_tau_ms: f64,
    pub tau_ratio: f64,
    pub distance: f64,
}

/// Oracle distance for each retention plan. Plans whose shortest retention
/// time is below the sampling time are rejected.
pub fn sweep_retention_spread(
    base: &ScenarioConfig,
    plans: &[RetentionPlan],
) -> Result<Vec<RetentionRow>> {
    require_oracle(base)?;
    plans
        .par_iter()
        .map(|plan| {
            let mut cfg = base.clone();
            cfg.retention = plan.clone();
            let net = cfg.build()?;
            let min_tau = net.min_retention().expect("non-empty").as_millis_f64();
            let tau_sample = SimTime::from_millis_f64(cfg.tau_sample_ms).as_millis_f64();
            if tau_sample > min_tau {
                return Err(PbitError::config(format!(
                    "tau_sample {tau_sample} ms exceeds the shortest retention time {min_tau} ms"
                )));
            }
            let out = run_scenario(&cfg)?;
            Ok(RetentionRow {
                plan: plan.clone(),
                min_tau_ms: min_tau,
                tau_ratio: tau_sample / min_tau,
                distance: out.distance.expect("single machine"),
            })
        })
        .collect()
}

/// Convenience for `clamps`: a single label pinned to one level.
pub fn clamp_level(label: &str, level: LogicLevel) -> Clamp {
    Clamp::word(&[label], level.bit() as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::sigmoid;

    #[test]
    fn json_defaults_and_unknown_fields() {
        let cfg =
            ScenarioConfig::from_json(r#"{"network": {"builder": "and", "i0": 0.8}}"#).unwrap();
        assert_eq!(cfg.samples, 500_000);
        assert_eq!(cfg.burn_in, 0.1);
        assert_eq!(cfg.tau_sample_ms, 1.0);
        assert!(ScenarioConfig::from_json(
            r#"{"network": {"builder": "and", "i0": 0.8}, "sedd": 3}"#
        )
        .is_err());
        assert!(ScenarioConfig::from_json(r#"{"network": {"builder": "and", "i0": -1}}"#).is_err());
        assert!(ScenarioConfig::from_json(r#"{"network": {"builder": "nand", "i0": 1}}"#).is_err());
        assert!(ScenarioConfig::from_json(
            r#"{"network": {"builder": "and", "i0": 1}, "burn_in": 1.0}"#
        )
        .is_err());
    }

    #[test]
    fn clamps_apply_words() {
        let mut cfg = ScenarioConfig::new(NetworkRef::Rca4 { i0: 1.0 });
        cfg.clamps = vec![
            Clamp::word(&networks::RCA_A, 10),
            Clamp::word(&networks::RCA_B, 13),
        ];
        let net = cfg.build().unwrap();
        let a3 = net.label("A3").unwrap();
        assert_eq!(
            net.pbit(a3).unwrap().mode,
            crate::model::TerminalMode::ClampedHigh
        );
        cfg.clamps = vec![Clamp::word(&["A3"], 2)];
        assert!(cfg.build().is_err());
    }

    #[test]
    fn single_pbit_follows_sigmoid() {
        let mut cfg = ScenarioConfig::new(NetworkRef::Single { bias: 0.5 });
        cfg.samples = 20_000;
        cfg.sample_at = SampleInstant::Update;
        cfg.burn_in = 0.0;
        let out = run_scenario(&cfg).unwrap();
        let p = out.histogram.probability(1);
        let sd = (sigmoid(0.5) * (1.0 - sigmoid(0.5)) / 20_000.0).sqrt();
        assert!((p - sigmoid(0.5)).abs() < 4.0 * sd, "{p}");
        assert!(out.distance.unwrap() < 0.02);
    }

    #[test]
    fn sweeps_reject_composites() {
        let cfg = ScenarioConfig::new(NetworkRef::Rca4 { i0: 1.0 });
        assert!(matches!(
            sweep_sampling_time(&cfg, &[1.0]),
            Err(PbitError::Unsupported(_))
        ));
    }

    #[test]
    fn sweep_rows_follow_input_order_and_replay() {
        let mut cfg = ScenarioConfig::new(NetworkRef::And { i0: 0.8 });
        cfg.samples = 2_000;
        let a = sweep_sampling_time(&cfg, &[1.0, 50.0]).unwrap();
        assert_eq!(a.len(), 2);
        assert_eq!(a[1].tau_ratio, 0.25);
        let b = sweep_sampling_time(&cfg, &[1.0, 50.0]).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn retention_sweep_enforces_sampling_bound() {
        let mut cfg = ScenarioConfig::new(NetworkRef::And { i0: 0.8 });
        cfg.samples = 1_000;
        cfg.tau_sample_ms = 100.0;
        let plans = [RetentionPlan::PerPbit {
            ms: vec![50.0, 200.0, 350.0],
        }];
        assert!(sweep_retention_spread(&cfg, &plans).is_err());
        let plans = [RetentionPlan::PerPbit {
            ms: vec![100.0, 200.0, 350.0],
        }];
        assert_eq!(
            sweep_retention_spread(&cfg, &plans).unwrap()[0].tau_ratio,
            1.0
        );
    }

    #[test]
    fn i0_sweep_starts_uniform() {
        let mut cfg = ScenarioConfig::new(NetworkRef::And { i0: 0.8 });
        cfg.samples = 20_000;
        cfg.tau_sample_ms = 20.0;
        let rows = sweep_i0(&cfg, &[0.0, 1.0]).unwrap();
        assert_eq!(rows[0].i0, 0.0);
        assert!(rows[0].distance < 0.05);
        assert!(rows[1].histogram[7] > rows[0].histogram[7]);
        let single = ScenarioConfig::new(NetworkRef::Single { bias: 0.0 });
        assert!(single.network.with_i0(1.0).is_err());
    }
}
