//! Histograms over visible p-bits and word encodings.

use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;

use crate::dynamics::SimulationTrace;
use crate::error::{PbitError, Result};
use crate::network::NetworkSpec;

/// Default fraction of leading samples discarded before counting.
pub const DEFAULT_BURN_IN: f64 = 0.1;

/// Word formed by the listed p-bits of a packed state, first id most
/// significant: `sum_k 2^(w-1-k) * bit(ids[k])`.
pub fn encode_word(state: u64, ids: &[usize]) -> u64 {
    ids.iter()
        .fold(0, |acc, &i| (acc << 1) | ((state >> i) & 1))
}

/// Inverse of [`encode_word`] restricted to the listed p-bits.
pub fn decode_word(word: u64, ids: &[usize]) -> u64 {
    let w = ids.len();
    ids.iter()
        .enumerate()
        .fold(0, |acc, (k, &i)| acc | (((word >> (w - 1 - k)) & 1) << i))
}

/// `4A + 2B + C` for labels `[A, B, C]`, and the same weighting for wider
/// words.
pub fn artificial_node(net: &NetworkSpec, labels: &[&str], state: u64) -> Result<u64> {
    Ok(encode_word(state, &net.labels_of(labels)?))
}

/// Word as a bit string, most significant bit first.
pub fn word_label(word: u64, width: usize) -> String {
    (0..width)
        .rev()
        .map(|k| if (word >> k) & 1 == 1 { '1' } else { '0' })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EmpiricalDistribution {
    /// Visible labels, most significant first.
    pub labels: Vec<String>,
    pub counts: BTreeMap<u64, u64>,
    pub total: u64,
    pub burn_in_discarded: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Mode {
    pub state: u64,
    pub label: String,
    pub count: u64,
    pub probability: f64,
}

impl EmpiricalDistribution {
    pub fn width(&self) -> usize {
        self.labels.len()
    }

    pub fn count(&self, word: u64) -> u64 {
        self.counts.get(&word).copied().unwrap_or(0)
    }

    pub fn probability(&self, word: u64) -> f64 {
        self.count(word) as f64 / self.total as f64
    }

    /// Probabilities of every word `0..2^w`.
    pub fn dense(&self) -> Result<Vec<f64>> {
        if self.width() > 24 {
            return Err(PbitError::Capacity(format!(
                "{} visible bits is too wide for a dense table",
                self.width()
            )));
        }
        let mut out = vec![0.0; 1 << self.width()];
        for (&w, &c) in &self.counts {
            out[w as usize] = c as f64 / self.total as f64;
        }
        Ok(out)
    }

    /// Total probability of the words satisfying `pred`.
    pub fn mass(&self, mut pred: impl FnMut(u64) -> bool) -> f64 {
        let hits: u64 = self
            .counts
            .iter()
            .filter(|(w, _)| pred(**w))
            .map(|(_, c)| c)
            .sum();
        hits as f64 / self.total as f64
    }

    /// Up to `k` states by descending probability, ties by ascending word.
    pub fn mode_report(&self, k: usize) -> Result<Vec<Mode>> {
        if k == 0 {
            return Err(PbitError::argument("mode report needs k >= 1"));
        }
        let mut entries: Vec<(u64, u64)> = self.counts.iter().map(|(&w, &c)| (w, c)).collect();
        entries.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        Ok(entries
            .into_iter()
            .take(k)
            .map(|(w, c)| self.mode(w, c))
            .collect())
    }

    fn mode(&self, word: u64, count: u64) -> Mode {
        Mode {
            state: word,
            label: word_label(word, self.width()),
            count,
            probability: count as f64 / self.total as f64,
        }
    }

    /// One row per word when the table is dense enough (at most 12 bits),
    /// otherwise one row per observed word; ascending word order.
    pub fn table(&self) -> Vec<Mode> {
        let rows: Vec<u64> = if self.width() <= 12 {
            (0..1u64 << self.width()).collect()
        } else {
            self.counts.keys().copied().collect()
        };
        rows.into_iter()
            .map(|w| self.mode(w, self.count(w)))
            .collect()
    }

    /// [`table`](Self::table) as `state,label,count,probability`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "state,label,count,probability")?;
        for m in self.table() {
            writeln!(out, "{},{},{},{}", m.state, m.label, m.count, m.probability)?;
        }
        Ok(())
    }
}

/// Counts visible words over the trace after discarding the first
/// `burn_in` fraction of samples.
pub fn histogram(
    trace: &SimulationTrace,
    ids: &[usize],
    labels: &[String],
    burn_in: f64,
) -> Result<EmpiricalDistribution> {
    if !(0.0..1.0).contains(&burn_in) {
        return Err(PbitError::argument(format!(
            "burn-in {burn_in} must lie in [0, 1)"
        )));
    }
    if ids.is_empty() || ids.len() > 64 || ids.len() != labels.len() {
        return Err(PbitError::argument("visible set must name 1..=64 p-bits"));
    }
    if let Some(&bad) = ids.iter().find(|&&i| i >= trace.n_pbits) {
        return Err(PbitError::argument(format!("p-bit {bad} not in trace")));
    }
    let skip = (burn_in * trace.len() as f64).floor() as usize;
    let kept = &trace.samples[skip..];
    if kept.is_empty() {
        return Err(PbitError::argument("no samples left after burn-in"));
    }
    let mut counts = BTreeMap::new();
    for s in kept {
        *counts.entry(encode_word(s.state, ids)).or_insert(0) += 1;
    }
    Ok(EmpiricalDistribution {
        labels: labels.to_vec(),
        counts,
        total: kept.len() as u64,
        burn_in_discarded: skip as u64,
    })
}

/// [`histogram`] over labelled p-bits of `net`.
pub fn histogram_labels(
    trace: &SimulationTrace,
    net: &NetworkSpec,
    labels: &[&str],
    burn_in: f64,
) -> Result<EmpiricalDistribution> {
    let ids = net.labels_of(labels)?;
    let owned: Vec<String> = labels.iter().map(|s| s.to_string()).collect();
    histogram(trace, &ids, &owned, burn_in)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::SampleInstant;
    use crate::model::CouplingMatrix;
    use crate::network::MachineSpec;
    use crate::time::SimTime;
    use proptest::prelude::*;

    fn trace(states: &[u64]) -> SimulationTrace {
        let mut t = SimulationTrace::new(3, SampleInstant::Refresh);
        for (k, &s) in states.iter().enumerate() {
            t.samples.push(crate::dynamics::TraceSample {
                time: SimTime(k as u64),
                state: s,
            });
        }
        t
    }

    fn abc() -> NetworkSpec {
        NetworkSpec::single(
            MachineSpec::new("and", CouplingMatrix::zeros(3, 1.0)),
            &[("A", 0), ("B", 1), ("C", 2)],
        )
    }

    #[test]
    fn artificial_node_examples() {
        let net = abc();
        assert_eq!(artificial_node(&net, &["A", "B", "C"], 0b111).unwrap(), 7);
        // A = p-bit 0 high, B low, C = p-bit 2 high.
        assert_eq!(artificial_node(&net, &["A", "B", "C"], 0b101).unwrap(), 5);
        assert_eq!(artificial_node(&net, &["A", "B", "C"], 0b001).unwrap(), 4);
        assert!(artificial_node(&net, &["A", "D"], 0).is_err());
    }

    #[test]
    fn burn_in_zero_keeps_everything() {
        let t = trace(&[0, 1, 2, 3, 4, 5, 6, 7, 0, 1]);
        let ids = [0, 1, 2];
        let labels: Vec<String> = ["A", "B", "C"].iter().map(|s| s.to_string()).collect();
        let d = histogram(&t, &ids, &labels, 0.0).unwrap();
        assert_eq!(d.total, 10);
        let d = histogram(&t, &ids, &labels, 0.25).unwrap();
        assert_eq!((d.total, d.burn_in_discarded), (8, 2));
        assert!(histogram(&t, &ids, &labels, 1.0).is_err());
        assert!(histogram(&trace(&[]), &ids, &labels, 0.0).is_err());
    }

    #[test]
    fn mode_report_orders_by_probability_then_word() {
        let t = trace(&[0b001, 0b001, 0b100, 0b100, 0b010]);
        let labels: Vec<String> = ["A", "B", "C"].iter().map(|s| s.to_string()).collect();
        let d = histogram(&t, &[0, 1, 2], &labels, 0.0).unwrap();
        let top = d.mode_report(2).unwrap();
        // 0b001 -> word 4 (A), 0b100 -> word 1 (C): tie broken by word.
        assert_eq!(top.iter().map(|m| m.state).collect::<Vec<_>>(), vec![1, 4]);
        assert_eq!(top[0].label, "001");
        assert_eq!(d.mode_report(100).unwrap().len(), 3);
        assert!(d.mode_report(0).is_err());
    }

    #[test]
    fn csv_has_every_word_for_narrow_tables() {
        let t = trace(&[0b111]);
        let labels: Vec<String> = ["A", "B"].iter().map(|s| s.to_string()).collect();
        let d = histogram(&t, &[0, 1], &labels, 0.0).unwrap();
        let mut buf = Vec::new();
        d.write_csv(&mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "state,label,count,probability\n0,00,0,0\n1,01,0,0\n2,10,0,0\n3,11,1,1\n"
        );
    }

    proptest! {
        #[test]
        fn word_encoding_is_bijective(w in 1usize..12, perm_seed in any::<u64>(), word in any::<u64>()) {
            // Distinct ids drawn from 0..64.
            let mut ids: Vec<usize> = Vec::new();
            let mut x = perm_seed;
            while ids.len() < w {
                x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let id = (x >> 58) as usize;
                if !ids.contains(&id) { ids.push(id); }
            }
            let word = word & ((1 << w) - 1);
            prop_assert_eq!(encode_word(decode_word(word, &ids), &ids), word);
        }

        #[test]
        fn histogram_conserves_samples(states in proptest::collection::vec(0u64..8, 1..300), burn in 0.0f64..0.99) {
            let t = trace(&states);
            let labels: Vec<String> = ["A", "B", "C"].iter().map(|s| s.to_string()).collect();
            match histogram(&t, &[0, 1, 2], &labels, burn) {
                Ok(d) => {
                    prop_assert_eq!(d.counts.values().sum::<u64>(), d.total);
                    prop_assert_eq!(d.total + d.burn_in_discarded, states.len() as u64);
                }
                Err(_) => prop_assert!((burn * states.len() as f64).floor() as usize == states.len()),
            }
        }
    }
}
