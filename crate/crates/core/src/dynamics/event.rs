use std::cmp::Ordering;

use crate::time::SimTime;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EventKind {
    /// Weight logic of a machine recomputes and republishes its inputs.
    WeightRefresh(usize),
    /// A p-bit reads its input and resamples its output.
    PBitUpdate(usize),
}

impl EventKind {
    /// Refreshes sort before updates scheduled for the same instant.
    fn priority(self) -> u8 {
        match self {
            EventKind::WeightRefresh(_) => 0,
            EventKind::PBitUpdate(_) => 1,
        }
    }
}

/// Total order: `(time, kind priority, seq)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Event {
    pub time: SimTime,
    pub kind: EventKind,
    pub seq: u64,
}

impl Ord for Event {
    fn cmp(&self, other: &Self) -> Ordering {
        self.time
            .cmp(&other.time)
            .then(self.kind.priority().cmp(&other.kind.priority()))
            .then(self.seq.cmp(&other.seq))
    }
}

impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
