//! Recorded simulation output and its CSV / binary exports.
//!
//! Binary layout (all integers little-endian):
//!
//! ```text
//! magic   b"PBTR"
//! version u32 = 1
//! n_pbits u32
//! count   u64                 number of samples
//! times   count x u64         sample times in microseconds
//! states  count x u64         packed outputs, bit i = p-bit i
//! ```

use std::io::{self, BufRead, Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{PbitError, Result};
use crate::model::LogicLevel;
use crate::time::SimTime;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SampleInstant {
    /// After each refresh of the log machine's weight logic.
    #[default]
    Refresh,
    /// After each p-bit update anywhere in the network.
    Update,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TraceSample {
    pub time: SimTime,
    /// Bit `i` is the output of p-bit `i`.
    pub state: u64,
}

impl TraceSample {
    pub fn output(&self, pbit: usize) -> LogicLevel {
        LogicLevel::from_bit((self.state >> pbit) & 1 == 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct UpdateRecord {
    pub time: SimTime,
    pub pbit: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimulationTrace {
    pub n_pbits: usize,
    pub instant: SampleInstant,
    /// Strictly increasing in time.
    pub samples: Vec<TraceSample>,
    /// Every p-bit update in event order; empty unless recording was requested.
    pub updates: Vec<UpdateRecord>,
}

impl SimulationTrace {
    pub fn new(n_pbits: usize, instant: SampleInstant) -> Self {
        Self {
            n_pbits,
            instant,
            samples: Vec::new(),
            updates: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Appends a sample; a sample at the same instant as the previous one
    /// replaces it, keeping times strictly increasing.
    pub(crate) fn push(&mut self, time: SimTime, state: u64) {
        match self.samples.last_mut() {
            Some(last) if last.time == time => last.state = state,
            _ => self.samples.push(TraceSample { time, state }),
        }
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let mut header = String::from("time_us");
        for i in 0..self.n_pbits {
            header.push_str(&format!(",pbit_{i}"));
        }
        writeln!(out, "{header}")?;
        let mut line = String::with_capacity(16 + 2 * self.n_pbits);
        for s in &self.samples {
            line.clear();
            line.push_str(&s.time.0.to_string());
            for i in 0..self.n_pbits {
                line.push(',');
                line.push(if (s.state >> i) & 1 == 1 { '1' } else { '0' });
            }
            line.push('\n');
            out.write_all(line.as_bytes())?;
        }
        out.flush()?;
        Ok(())
    }

    /// Parses the CSV written by [`write_csv`](Self::write_csv). Update
    /// records are not part of the CSV.
    pub fn read_csv<R: BufRead>(input: R) -> Result<Self> {
        let mut lines = input.lines();
        let header = lines
            .next()
            .ok_or_else(|| PbitError::argument("empty trace CSV"))??;
        let cols: Vec<&str> = header.trim().split(',').collect();
        if cols.first() != Some(&"time_us")
            || cols[1..]
                .iter()
                .enumerate()
                .any(|(i, c)| *c != format!("pbit_{i}"))
        {
            return Err(PbitError::argument(
                "trace CSV header must be time_us,pbit_0,...",
            ));
        }
        let n = cols.len() - 1;
        let mut trace = SimulationTrace::new(n, SampleInstant::Refresh);
        for (lineno, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let mut fields = line.trim().split(',');
            let bad = || PbitError::argument(format!("trace CSV line {}: malformed", lineno + 2));
            let time: u64 = fields.next().and_then(|f| f.parse().ok()).ok_or_else(bad)?;
            let mut state = 0u64;
            let mut count = 0;
            for (i, f) in fields.enumerate() {
                match f {
                    "0" => {}
                    "1" => state |= 1 << i,
                    _ => return Err(bad()),
                }
                count += 1;
            }
            if count != n {
                return Err(bad());
            }
            trace.samples.push(TraceSample {
                time: SimTime(time),
                state,
            });
        }
        Ok(trace)
    }

    pub fn write_binary<W: Write>(&self, mut out: W) -> Result<()> {
        out.write_all(b"PBTR")?;
        out.write_all(&1u32.to_le_bytes())?;
        out.write_all(&(self.n_pbits as u32).to_le_bytes())?;
        out.write_all(&(self.samples.len() as u64).to_le_bytes())?;
        for s in &self.samples {
            out.write_all(&s.time.0.to_le_bytes())?;
        }
        for s in &self.samples {
            out.write_all(&s.state.to_le_bytes())?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn read_binary<R: Read>(mut input: R) -> Result<Self> {
        let mut magic = [0u8; 4];
        input.read_exact(&mut magic)?;
        if &magic != b"PBTR" {
            return Err(PbitError::argument("not a binary trace (bad magic)"));
        }
        let version = read_u32(&mut input)?;
        if version != 1 {
            return Err(PbitError::argument(format!(
                "unsupported trace version {version}"
            )));
        }
        let n = read_u32(&mut input)? as usize;
        let count = read_u64(&mut input)? as usize;
        let times = (0..count)
            .map(|_| read_u64(&mut input))
            .collect::<io::Result<Vec<_>>>()?;
        let states = (0..count)
            .map(|_| read_u64(&mut input))
            .collect::<io::Result<Vec<_>>>()?;
        Ok(SimulationTrace {
            n_pbits: n,
            instant: SampleInstant::Refresh,
            samples: times
                .into_iter()
                .zip(states)
                .map(|(t, state)| TraceSample {
                    time: SimTime(t),
                    state,
                })
                .collect(),
            updates: Vec::new(),
        })
    }
}

fn read_u32<R: Read>(r: &mut R) -> io::Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_u64<R: Read>(r: &mut R) -> io::Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}
