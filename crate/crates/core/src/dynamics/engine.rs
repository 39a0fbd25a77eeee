//! The discrete-event engine.
//!
//! Two event streams drive a network:
//!
//! * every p-bit resamples its output once per retention time, reading the
//!   input voltage it currently holds;
//! * every machine's weight logic snapshots the machine's outputs once per
//!   `tau_sample` and republishes the inputs of its free p-bits.
//!
//! Between refreshes a free p-bit's input is stale by construction. Wired
//! p-bits bypass their weight logic and read the source p-bit's output
//! directly, optionally through a delay line.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::event::{Event, EventKind};
use super::trace::{SampleInstant, SimulationTrace};
use crate::error::Result;
use crate::model::{free_input_voltage, sample_pbit, LogicLevel, TerminalMode, Voltage};
use crate::network::NetworkSpec;
use crate::time::SimTime;

/// When a run stops.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Budget {
    /// Stop once the trace holds this many samples.
    Samples(u64),
    /// Process every event strictly before this virtual time.
    Duration(SimTime),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RecordOptions {
    pub instant: SampleInstant,
    /// Keep a log of every p-bit update (needed by the serialization metric).
    pub updates: bool,
}

/// Per-p-bit RNG: one ChaCha stream per p-bit id under the run seed, so draws
/// never depend on how events from different p-bits interleave.
pub fn pbit_rng(seed: u64, pbit: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(pbit as u64);
    rng
}

#[derive(Debug, Clone)]
struct DelayLine {
    delay: SimTime,
    /// Source output as seen at the far end of the wire.
    visible: LogicLevel,
    pending: VecDeque<(SimTime, LogicLevel)>,
}

impl DelayLine {
    fn read(&mut self, now: SimTime) -> LogicLevel {
        if now.0 >= self.delay.0 {
            let horizon = now - self.delay;
            while let Some(&(t, level)) = self.pending.front() {
                if t > horizon {
                    break;
                }
                self.visible = level;
                self.pending.pop_front();
            }
        }
        self.visible
    }
}

#[derive(Debug, Clone, Copy)]
enum Binding {
    Free,
    Rail,
    Wire { source: usize, line: Option<usize> },
}

/// Mutable state of one run over an immutable network.
#[derive(Debug, Clone)]
pub struct Simulator<'a> {
    net: &'a NetworkSpec,
    clock: SimTime,
    outputs: Vec<LogicLevel>,
    bipolar: Vec<f64>,
    packed: u64,
    held: Vec<Voltage>,
    bindings: Vec<Binding>,
    machine_of: Vec<usize>,
    offsets: Vec<usize>,
    /// A machine whose outputs have not changed since its last refresh would
    /// republish identical inputs.
    dirty: Vec<bool>,
    rngs: Vec<ChaCha8Rng>,
    lines: Vec<DelayLine>,
    /// Delay lines fed by each p-bit.
    feeds: Vec<Vec<usize>>,
    queue: BinaryHeap<Reverse<Event>>,
    seq: u64,
    record: RecordOptions,
    trace: SimulationTrace,
}

impl<'a> Simulator<'a> {
    /// Validates the network, draws initial outputs and schedules one
    /// refresh per machine at t = 0 and each p-bit's first update at its
    /// phase.
    pub fn new(net: &'a NetworkSpec, seed: u64, record: RecordOptions) -> Result<Self> {
        net.validate()?;
        let n = net.pbit_count();
        let offsets = net.machine_offsets();
        let mut machine_of = Vec::with_capacity(n);
        for (mi, m) in net.machines.iter().enumerate() {
            machine_of.extend(std::iter::repeat(mi).take(m.len()));
        }

        let mut rngs: Vec<ChaCha8Rng> = (0..n).map(|i| pbit_rng(seed, i)).collect();
        let mut outputs = Vec::with_capacity(n);
        let mut held = Vec::with_capacity(n);
        let mut bindings = Vec::with_capacity(n);
        let mut lines = Vec::new();
        let mut feeds = vec![Vec::new(); n];
        for (i, p) in net.pbits().enumerate() {
            match p.mode {
                TerminalMode::ClampedHigh | TerminalMode::ClampedLow => {
                    let rail = p.mode.rail().unwrap();
                    outputs.push(rail);
                    held.push(rail.voltage());
                    bindings.push(Binding::Rail);
                }
                TerminalMode::Free => {
                    outputs.push(LogicLevel::from_bit(rngs[i].random::<bool>()));
                    held.push(Voltage::MID);
                    bindings.push(Binding::Free);
                }
                TerminalMode::Wired(source) => {
                    outputs.push(LogicLevel::from_bit(rngs[i].random::<bool>()));
                    held.push(Voltage::MID);
                    let wire = net
                        .wires
                        .iter()
                        .find(|w| w.dest == i)
                        .expect("validated wire");
                    let line = (wire.delay > SimTime::ZERO).then(|| {
                        feeds[source].push(lines.len());
                        lines.push((wire.delay, source));
                        lines.len() - 1
                    });
                    bindings.push(Binding::Wire { source, line });
                }
            }
        }
        let lines = lines
            .into_iter()
            .map(|(delay, source)| DelayLine {
                delay,
                visible: outputs[source],
                pending: VecDeque::new(),
            })
            .collect();

        let bipolar = outputs.iter().map(|s| s.bipolar()).collect();
        let packed = pack(&outputs);
        let mut sim = Simulator {
            net,
            clock: SimTime::ZERO,
            outputs,
            bipolar,
            packed,
            held,
            bindings,
            machine_of,
            offsets,
            dirty: vec![true; net.machines.len()],
            rngs,
            lines,
            feeds,
            queue: BinaryHeap::new(),
            seq: 0,
            record,
            trace: SimulationTrace::new(n, record.instant),
        };
        for mi in 0..net.machines.len() {
            sim.schedule(SimTime::ZERO, EventKind::WeightRefresh(mi));
        }
        for (i, p) in net.pbits().enumerate() {
            sim.schedule(p.phase, EventKind::PBitUpdate(i));
        }
        Ok(sim)
    }

    fn schedule(&mut self, time: SimTime, kind: EventKind) {
        let seq = self.seq;
        self.seq += 1;
        self.queue.push(Reverse(Event { time, kind, seq }));
    }

    pub fn network(&self) -> &NetworkSpec {
        self.net
    }

    pub fn clock(&self) -> SimTime {
        self.clock
    }

    pub fn outputs(&self) -> &[LogicLevel] {
        &self.outputs
    }

    pub fn output(&self, pbit: usize) -> LogicLevel {
        self.outputs[pbit]
    }

    /// Packed outputs, bit `i` = p-bit `i`.
    pub fn state(&self) -> u64 {
        self.packed
    }

    /// Input voltage currently held for `pbit`: the last published weight
    /// logic value for free p-bits, the rail for clamped ones. For wired
    /// p-bits this is unused and stays at mid-rail.
    pub fn held_input(&self, pbit: usize) -> Voltage {
        self.held[pbit]
    }

    pub fn peek(&self) -> Option<&Event> {
        self.queue.peek().map(|r| &r.0)
    }

    pub fn trace(&self) -> &SimulationTrace {
        &self.trace
    }

    pub fn into_trace(self) -> SimulationTrace {
        self.trace
    }

    /// Processes the earliest pending event and returns it.
    pub fn step(&mut self) -> Option<Event> {
        let Reverse(event) = self.queue.pop()?;
        debug_assert!(event.time >= self.clock);
        self.clock = event.time;
        match event.kind {
            EventKind::PBitUpdate(i) => self.update_pbit(i),
            EventKind::WeightRefresh(m) => self.refresh_machine(m),
        }
        Some(event)
    }

    fn update_pbit(&mut self, i: usize) {
        let now = self.clock;
        let net = self.net;
        let mi = self.machine_of[i];
        let machine = &net.machines[mi];
        let v = match self.bindings[i] {
            Binding::Free | Binding::Rail => self.held[i],
            Binding::Wire { source, line } => match line {
                None => self.outputs[source].voltage(),
                Some(k) => self.lines[k].read(now).voltage(),
            },
        };
        let v = machine.quantization.adc(v);
        let rng = &mut self.rngs[i];
        let u: f64 = rng.random();
        let next = sample_pbit(v, u).expect("held inputs stay within the rails");

        let cfg = &machine.pbits[i - self.offsets[mi]];
        let tau = cfg.retention_time.0 as f64;
        let factor = if cfg.jitter_fraction > 0.0 {
            1.0 + rng.random_range(-cfg.jitter_fraction..cfg.jitter_fraction)
        } else {
            1.0
        };
        let dt = SimTime(((tau * factor).round() as u64).max(1));

        if next != self.outputs[i] {
            self.outputs[i] = next;
            self.bipolar[i] = next.bipolar();
            self.packed ^= 1 << i;
            self.dirty[mi] = true;
            for &k in &self.feeds[i] {
                self.lines[k].pending.push_back((now, next));
            }
        }
        if self.record.updates {
            self.trace.updates.push(super::trace::UpdateRecord {
                time: now,
                pbit: i as u32,
            });
        }
        if self.record.instant == SampleInstant::Update {
            self.trace.push(now, self.packed);
        }
        self.schedule(now + dt, EventKind::PBitUpdate(i));
    }

    fn refresh_machine(&mut self, mi: usize) {
        let net = self.net;
        let machine = &net.machines[mi];
        if self.dirty[mi] {
            let off = self.offsets[mi];
            let snapshot = &self.bipolar[off..off + machine.len()];
            for (local, p) in machine.pbits.iter().enumerate() {
                if p.mode == TerminalMode::Free {
                    self.held[off + local] = free_input_voltage(
                        &machine.coupling,
                        local,
                        snapshot,
                        &machine.quantization,
                    );
                }
            }
            self.dirty[mi] = false;
        }
        if self.record.instant == SampleInstant::Refresh && mi == net.log_machine {
            self.trace.push(self.clock, self.packed);
        }
        let next = self.clock + machine.tau_sample;
        self.schedule(next, EventKind::WeightRefresh(mi));
    }

    /// Steps until the budget is exhausted.
    pub fn run_until(&mut self, budget: Budget) {
        match budget {
            Budget::Samples(k) => {
                while (self.trace.samples.len() as u64) < k {
                    if self.step().is_none() {
                        break;
                    }
                }
            }
            Budget::Duration(end) => {
                while let Some(e) = self.peek() {
                    if e.time >= end {
                        break;
                    }
                    self.step();
                }
            }
        }
    }
}

fn pack(outputs: &[LogicLevel]) -> u64 {
    outputs
        .iter()
        .enumerate()
        .fold(0, |acc, (i, s)| acc | ((s.is_high() as u64) << i))
}

/// Runs `net` from its initial schedule until `budget` is used up.
/// Deterministic in `(net, seed, budget, record)`.
pub fn run(
    net: &NetworkSpec,
    seed: u64,
    budget: Budget,
    record: RecordOptions,
) -> Result<SimulationTrace> {
    let mut sim = Simulator::new(net, seed, record)?;
    if budget == Budget::Samples(0) {
        return Ok(sim.into_trace());
    }
    sim.run_until(budget);
    let mut trace = sim.into_trace();
    if let Budget::Samples(k) = budget {
        trace.samples.truncate(k as usize);
    }
    Ok(trace)
}
