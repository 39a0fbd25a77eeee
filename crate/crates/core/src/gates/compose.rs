//! Building larger gates from smaller ones.

use super::{verify_ground_states, GateSpec, Terminal};
use crate::error::{PbitError, Result};

/// One sub-gate instance inside a composite: `map[k]` is the composite
/// p-bit carrying the sub-gate's local p-bit `k`.
#[derive(Debug, Clone)]
pub struct Part<'a> {
    pub gate: &'a GateSpec,
    pub map: Vec<usize>,
    pub weight: f64,
}

impl<'a> Part<'a> {
    /// Maps the sub-gate's visible terminals in listed order, then its
    /// auxiliary p-bits in listed order.
    pub fn wired(
        gate: &'a GateSpec,
        terminals: &[usize],
        aux: &[usize],
        weight: f64,
    ) -> Result<Self> {
        if terminals.len() != gate.visible.len() || aux.len() != gate.auxiliary.len() {
            return Err(PbitError::config(format!(
                "part `{}` expects {} terminals and {} auxiliary p-bits",
                gate.name,
                gate.visible.len(),
                gate.auxiliary.len()
            )));
        }
        let mut map = vec![usize::MAX; gate.n];
        for (t, &dst) in gate.visible.iter().zip(terminals) {
            map[t.index] = dst;
        }
        for (&a, &dst) in gate.auxiliary.iter().zip(aux) {
            map[a] = dst;
        }
        Ok(Part { gate, map, weight })
    }
}

/// Sums the weighted sub-gate Hamiltonians over shared p-bits and verifies
/// the whole against `truth_table`. Visible terminals take indices
/// `0..labels.len()`; the rest are auxiliary.
pub fn compose(
    name: &str,
    n: usize,
    labels: &[&str],
    truth_table: Vec<String>,
    parts: &[Part<'_>],
) -> Result<GateSpec> {
    let mut j = vec![vec![0.0; n]; n];
    let mut h = vec![0.0; n];
    for part in parts {
        if !(part.weight > 0.0) {
            return Err(PbitError::config("composition weights must be positive"));
        }
        let g = part.gate;
        if part.map.len() != g.n || part.map.iter().any(|&d| d >= n) {
            return Err(PbitError::config(format!(
                "part `{}` maps outside the composite",
                g.name
            )));
        }
        for a in 0..g.n {
            h[part.map[a]] += part.weight * g.h[a];
            for b in 0..g.n {
                if a != b {
                    j[part.map[a]][part.map[b]] += part.weight * g.j[a][b];
                }
            }
        }
    }
    let gate = GateSpec {
        name: name.into(),
        n,
        visible: labels
            .iter()
            .enumerate()
            .map(|(index, l)| Terminal {
                label: l.to_string(),
                index,
            })
            .collect(),
        auxiliary: (labels.len()..n).collect(),
        truth_table,
        j,
        h,
        origin: Some("composed".into()),
    };
    verify_ground_states(&gate, 1.0)?;
    Ok(gate)
}

/// Removes terminal `label` by fixing it to `value`: its couplings move into
/// the neighbours' biases and the truth table keeps only matching rows.
pub fn fold_constant(gate: &GateSpec, label: &str, value: bool) -> Result<GateSpec> {
    let col = gate
        .visible
        .iter()
        .position(|t| t.label == label)
        .ok_or_else(|| {
            PbitError::argument(format!("gate `{}` has no terminal `{label}`", gate.name))
        })?;
    let k = gate.visible[col].index;
    let m = if value { 1.0 } else { -1.0 };
    let keep: Vec<usize> = (0..gate.n).filter(|&i| i != k).collect();
    let renum = |i: usize| if i > k { i - 1 } else { i };
    let digit = if value { '1' } else { '0' };
    let folded = GateSpec {
        name: format!("{}[{label}={}]", gate.name, value as u8),
        n: gate.n - 1,
        visible: gate
            .visible
            .iter()
            .filter(|t| t.index != k)
            .map(|t| Terminal {
                label: t.label.clone(),
                index: renum(t.index),
            })
            .collect(),
        auxiliary: gate.auxiliary.iter().map(|&a| renum(a)).collect(),
        truth_table: gate
            .truth_table
            .iter()
            .filter(|row| row.chars().nth(col) == Some(digit))
            .map(|row| {
                row.chars()
                    .enumerate()
                    .filter(|&(c, _)| c != col)
                    .map(|(_, ch)| ch)
                    .collect()
            })
            .collect(),
        j: keep
            .iter()
            .map(|&a| keep.iter().map(|&b| gate.j[a][b]).collect())
            .collect(),
        h: keep.iter().map(|&a| gate.h[a] + gate.j[a][k] * m).collect(),
        origin: gate.origin.clone(),
    };
    verify_ground_states(&folded, 1.0)?;
    Ok(folded)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::library;
    use crate::gates::truth_table_of;

    #[test]
    fn nand_from_and_and_not() {
        let and = library::gate("and").unwrap();
        let not = library::gate("not").unwrap();
        // 0 = A, 1 = B, 2 = Y, 3 = internal AND output.
        let parts = [
            Part::wired(&and, &[0, 1, 3], &[], 1.0).unwrap(),
            Part::wired(&not, &[3, 2], &[], 1.0).unwrap(),
        ];
        let g = compose(
            "nand",
            4,
            &["A", "B", "Y"],
            truth_table_of(2, |x| (x != 3) as u64, 1),
            &parts,
        )
        .unwrap();
        assert_eq!(g.auxiliary, vec![3]);
    }

    #[test]
    fn wrong_table_fails() {
        let and = library::gate("and").unwrap();
        let parts = [Part::wired(&and, &[0, 1, 2], &[], 1.0).unwrap()];
        let or_rows = truth_table_of(2, |x| (x != 0) as u64, 1);
        assert!(compose("x", 3, &["A", "B", "C"], or_rows, &parts).is_err());
    }

    #[test]
    fn folding_an_and_input_gives_copy_or_zero() {
        let and = library::gate("and").unwrap();
        let g = fold_constant(&and, "A", true).unwrap();
        assert_eq!(g.truth_table, vec!["00", "11"]);
        let g = fold_constant(&and, "B", false).unwrap();
        assert_eq!(g.truth_table, vec!["00", "10"]);
        assert_eq!(g.labels(), vec!["A", "C"]);
    }
}
