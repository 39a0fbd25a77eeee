//! Exhaustive search for small gate Hamiltonians.
//!
//! Candidates are parameter vectors `(J_01, J_02, .., J_{n-2,n-1}, h_0, .., h_{n-1})`
//! on the grid `step * k`, `|step * k| <= bound`. They are visited by
//! increasing L1 norm and, within a norm, lexicographically with each
//! coordinate running from negative to positive.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{verify_ground_states, GateSpec, Terminal};
use crate::error::{PbitError, Result};

/// Largest gate the exhaustive search accepts.
pub const MAX_SYNTH_BITS: usize = 6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthesisRequest {
    pub name: String,
    /// Visible labels in truth-table column order.
    pub visible: Vec<String>,
    pub truth_table: Vec<String>,
    #[serde(default)]
    pub n_aux: usize,
    #[serde(default = "default_bound")]
    pub search_bound: f64,
    /// Grid spacing: 1 for integers, 0.5 for half-integers.
    #[serde(default = "default_step")]
    pub step: f64,
}

fn default_bound() -> f64 {
    2.0
}

fn default_step() -> f64 {
    1.0
}

/// Returns the first verified gate in search order.
pub fn synthesize_gate(req: &SynthesisRequest) -> Result<GateSpec> {
    let v = req.visible.len();
    let n = v + req.n_aux;
    if v == 0 || n > MAX_SYNTH_BITS {
        return Err(PbitError::argument(format!(
            "synthesis needs 1..={MAX_SYNTH_BITS} bits in total, got {n}"
        )));
    }
    if !(req.step > 0.0) || !(req.search_bound >= 0.0) {
        return Err(PbitError::argument("step must be > 0 and bound >= 0"));
    }
    let levels = (req.search_bound / req.step + 1e-9).floor() as i64;

    let template = GateSpec {
        name: req.name.clone(),
        n,
        visible: req
            .visible
            .iter()
            .enumerate()
            .map(|(index, label)| Terminal {
                label: label.clone(),
                index,
            })
            .collect(),
        auxiliary: (v..n).collect(),
        truth_table: req.truth_table.clone(),
        j: vec![vec![0.0; n]; n],
        h: vec![0.0; n],
        origin: Some("synthesized".into()),
    };
    let truth: BTreeSet<u64> = template.truth_words()?;

    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .collect();
    let p = pairs.len() + n;
    let states = 1usize << n;
    // features[s][k]: contribution of parameter k to E(s) per unit value.
    let features: Vec<Vec<i64>> = (0..states)
        .map(|s| {
            let m = |i: usize| if (s >> i) & 1 == 1 { 1 } else { -1 };
            pairs
                .iter()
                .map(|&(a, b)| -m(a) * m(b))
                .chain((0..n).map(|i| -m(i)))
                .collect()
        })
        .collect();
    // Visible word of each state; visible bit 0 is the leftmost column.
    let words: Vec<u64> = (0..states)
        .map(|s| (0..v).fold(0, |acc, i| (acc << 1) | ((s >> i) & 1) as u64))
        .collect();

    // columns[k][s]: the same features indexed by parameter first.
    let columns: Vec<Vec<i64>> = (0..p)
        .map(|k| features.iter().map(|f| f[k]).collect())
        .collect();
    // Without auxiliary bits each truth row is exactly one state.
    let ground: Vec<usize> = (0..states).filter(|&s| truth.contains(&words[s])).collect();
    let others: Vec<usize> = (0..states)
        .filter(|&s| !truth.contains(&words[s]))
        .collect();
    let accepts_plain = |e: &[i64]| -> bool {
        let e0 = e[ground[0]];
        ground[1..].iter().all(|&s| e[s] == e0) && others.iter().all(|&s| e[s] > e0)
    };
    let accepts_aux = |e: &[i64]| -> bool {
        let min = *e.iter().min().expect("at least one state");
        let mut reached = 0u64;
        for s in 0..states {
            if e[s] == min {
                if !truth.contains(&words[s]) {
                    return false;
                }
                reached |= 1 << words[s];
            }
        }
        reached.count_ones() as usize == truth.len()
    };
    let accepts = |e: &[i64]| {
        if req.n_aux == 0 {
            accepts_plain(e)
        } else {
            accepts_aux(e)
        }
    };
    // Each unit of norm still to spend moves an energy difference by at most 2.
    let reachable = |e: &[i64], rest: i64| -> bool {
        if req.n_aux > 0 {
            return true;
        }
        let e0 = e[ground[0]];
        ground[1..].iter().all(|&s| (e[s] - e0).abs() <= 2 * rest)
            && others.iter().all(|&s| e[s] - e0 + 2 * rest > 0)
    };

    let mut walk = Walk {
        k: vec![0; p],
        energies: vec![0; states],
        columns: &columns,
        levels,
    };
    for norm in 0..=(p as i64 * levels) {
        if let Some(found) = walk.search(0, norm, &accepts, &reachable) {
            let mut gate = template.clone();
            for (idx, &(a, b)) in pairs.iter().enumerate() {
                let val = found[idx] as f64 * req.step;
                gate.j[a][b] = val;
                gate.j[b][a] = val;
            }
            for i in 0..n {
                gate.h[i] = found[pairs.len() + i] as f64 * req.step;
            }
            // Integer search and float verification must agree.
            verify_ground_states(&gate, 1.0)?;
            return Ok(gate);
        }
    }
    Err(PbitError::NotFound(format!(
        "no gate `{}` with {} auxiliary bit(s) within |J|, |h| <= {}",
        req.name, req.n_aux, req.search_bound
    )))
}

struct Walk<'a> {
    k: Vec<i64>,
    /// Energy of every state under the coordinates fixed so far.
    energies: Vec<i64>,
    columns: &'a [Vec<i64>],
    levels: i64,
}

impl Walk<'_> {
    fn set(&mut self, pos: usize, x: i64) {
        let d = x - self.k[pos];
        if d != 0 {
            for (e, f) in self.energies.iter_mut().zip(&self.columns[pos]) {
                *e += f * d;
            }
            self.k[pos] = x;
        }
    }

    /// Lexicographic walk over vectors with `sum |k_i| = remaining` from
    /// position `pos` onward.
    fn search(
        &mut self,
        pos: usize,
        remaining: i64,
        accepts: &impl Fn(&[i64]) -> bool,
        reachable: &impl Fn(&[i64], i64) -> bool,
    ) -> Option<Vec<i64>> {
        let last = self.k.len() - 1;
        if pos == last {
            if remaining > self.levels {
                return None;
            }
            let options: &[i64] = if remaining == 0 {
                &[0]
            } else {
                &[-remaining, remaining]
            };
            for &x in options {
                self.set(pos, x);
                if accepts(&self.energies) {
                    return Some(self.k.clone());
                }
            }
            self.set(pos, 0);
            return None;
        }
        let left = (last - pos) as i64;
        let lim = remaining.min(self.levels);
        for x in -lim..=lim {
            let rest = remaining - x.abs();
            if rest > left * self.levels {
                continue;
            }
            self.set(pos, x);
            if !reachable(&self.energies, rest) {
                continue;
            }
            if let Some(found) = self.search(pos + 1, rest, accepts, reachable) {
                return Some(found);
            }
        }
        self.set(pos, 0);
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn req(name: &str, visible: &[&str], rows: &[&str], n_aux: usize) -> SynthesisRequest {
        SynthesisRequest {
            name: name.into(),
            visible: visible.iter().map(|s| s.to_string()).collect(),
            truth_table: rows.iter().map(|s| s.to_string()).collect(),
            n_aux,
            search_bound: 2.0,
            step: 1.0,
        }
    }

    #[test]
    fn not_gate_is_antiferromagnetic() {
        let g = synthesize_gate(&req("not", &["a", "o"], &["01", "10"], 0)).unwrap();
        assert!(g.j[0][1] < 0.0);
        assert_eq!(g.h, vec![0.0, 0.0]);
    }

    #[test]
    fn copy_gate_is_ferromagnetic() {
        let g = synthesize_gate(&req("copy", &["a", "o"], &["00", "11"], 0)).unwrap();
        assert!(g.j[0][1] > 0.0);
    }

    #[test]
    fn and_gate_exists_within_bound_two() {
        let g = synthesize_gate(&req(
            "and",
            &["A", "B", "C"],
            &["000", "010", "100", "111"],
            0,
        ))
        .unwrap();
        verify_ground_states(&g, 1.0).unwrap();
        assert!(g.j.iter().flatten().chain(&g.h).all(|x| x.abs() <= 2.0));
    }

    #[test]
    fn xor_needs_an_auxiliary_bit() {
        let rows = ["000", "011", "101", "110"];
        assert!(matches!(
            synthesize_gate(&req("xor", &["a", "b", "o"], &rows, 0)),
            Err(PbitError::NotFound(_))
        ));
        let g = synthesize_gate(&req("xor", &["a", "b", "o"], &rows, 1)).unwrap();
        assert_eq!(g.n, 4);
    }

    #[test]
    fn half_integer_grid() {
        let mut r = req("copy", &["a", "o"], &["00", "11"], 0);
        r.step = 0.5;
        let g = synthesize_gate(&r).unwrap();
        assert_eq!(g.j[0][1], 0.5);
    }

    #[test]
    fn oversized_requests_are_rejected() {
        let r = req("big", &["a", "b", "c", "d"], &["0000"], 3);
        assert!(synthesize_gate(&r).is_err());
    }
}
