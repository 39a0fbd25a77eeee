mod engine;
mod event;
mod serialization;
mod trace;

pub use engine::{pbit_rng, run, Budget, RecordOptions, Simulator};
pub use event::{Event, EventKind};
pub use serialization::{parallel_flags, serialization_metric, serialization_profile};
pub use trace::{SampleInstant, SimulationTrace, TraceSample, UpdateRecord};
