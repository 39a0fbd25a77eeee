//! Virtual-time simulation of asynchronous stochastic p-bit networks.
//!
//! * [`model`]: voltages, the sigmoid, the p-bit sampling rule and the
//!   weight-logic arithmetic.
//! * [`network`]: machines, wires, retention and phase plans.
//! * [`dynamics`]: the event engine, traces and the serialization metric.
//! * [`oracle`]: exact Boltzmann statistics of one machine.
//! * [`gates`] and [`networks`]: verified gate Hamiltonians and the adder,
//!   ripple-carry and factorizer builders.
//! * [`analysis`] and [`scenario`]: histograms, scenario files and sweeps.

pub mod analysis;
pub mod dynamics;
pub mod error;
pub mod gates;
pub mod model;
pub mod network;
pub mod networks;
pub mod oracle;
pub mod scenario;
pub mod time;

pub use analysis::{artificial_node, histogram, histogram_labels, EmpiricalDistribution, Mode};
pub use dynamics::{run, Budget, RecordOptions, SampleInstant, SimulationTrace, Simulator};
pub use error::{PbitError, Result};
pub use gates::{verify_ground_states, GateSpec, VerifiedGate};
pub use model::{
    sample_pbit, sigmoid, weight_inputs, CouplingMatrix, LogicLevel, PBitConfig,
    QuantizationConfig, TerminalMode, Voltage,
};
pub use network::{MachineSpec, NetworkSpec, PhasePlan, RetentionPlan, Wire};
pub use oracle::{boltzmann_distribution, energy, euclidean_distance, ExactDistribution};
pub use scenario::{run_scenario, ScenarioConfig};
pub use time::SimTime;
