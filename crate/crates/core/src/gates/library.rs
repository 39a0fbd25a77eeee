//! The shipped gate files and the recipes that regenerate them.
//!
//! AND and OR are transcribed; NOT, COPY, XOR and the auxiliary-free adder
//! core come from [`synthesize_gate`]; the half and full adders are composed
//! from those.

use super::{
    compose, synthesize_gate, truth_table_of, verify_ground_states, GateSpec, Part,
    SynthesisRequest, VerifiedGate,
};
use crate::error::{PbitError, Result};

pub const NAMES: [&str; 8] = [
    "and",
    "or",
    "not",
    "copy",
    "xor",
    "adder_core",
    "half_adder",
    "full_adder",
];

fn source(name: &str) -> Option<&'static str> {
    Some(match name {
        "and" => include_str!("../../gates/and.json"),
        "or" => include_str!("../../gates/or.json"),
        "not" => include_str!("../../gates/not.json"),
        "copy" => include_str!("../../gates/copy.json"),
        "xor" => include_str!("../../gates/xor.json"),
        "adder_core" => include_str!("../../gates/adder_core.json"),
        "half_adder" => include_str!("../../gates/half_adder.json"),
        "full_adder" => include_str!("../../gates/full_adder.json"),
        _ => return None,
    })
}

/// A shipped gate file, parsed but not verified.
pub fn gate(name: &str) -> Result<GateSpec> {
    let text =
        source(name).ok_or_else(|| PbitError::argument(format!("no shipped gate `{name}`")))?;
    GateSpec::from_json(text)
}

/// A shipped gate after ground-state verification.
pub fn verified(name: &str) -> Result<VerifiedGate> {
    verify_ground_states(&gate(name)?, 1.0)
}

fn request(name: &str, visible: &[&str], rows: Vec<String>, n_aux: usize) -> SynthesisRequest {
    SynthesisRequest {
        name: name.into(),
        visible: visible.iter().map(|s| s.to_string()).collect(),
        truth_table: rows,
        n_aux,
        search_bound: 2.0,
        step: 1.0,
    }
}

pub fn synthesize_not() -> Result<GateSpec> {
    synthesize_gate(&request(
        "not",
        &["A", "Y"],
        truth_table_of(1, |x| x ^ 1, 1),
        0,
    ))
}

pub fn synthesize_copy() -> Result<GateSpec> {
    synthesize_gate(&request(
        "copy",
        &["A", "Y"],
        truth_table_of(1, |x| x, 1),
        0,
    ))
}

pub fn synthesize_xor() -> Result<GateSpec> {
    synthesize_gate(&request(
        "xor",
        &["A", "B", "Y"],
        truth_table_of(2, |x| (x >> 1) ^ (x & 1), 1),
        1,
    ))
}

/// `A + B + Cin = S + 2 Cout` on five p-bits with no auxiliary.
pub fn synthesize_adder_core() -> Result<GateSpec> {
    synthesize_gate(&request(
        "adder_core",
        &["A", "B", "Cin", "S", "Cout"],
        full_adder_table(),
        0,
    ))
}

fn full_adder_table() -> Vec<String> {
    truth_table_of(
        3,
        |v| {
            let sum = (v >> 2) + ((v >> 1) & 1) + (v & 1);
            ((sum & 1) << 1) | (sum >> 1)
        },
        2,
    )
}

/// `S = (A or B) and not (A and B)`, `C = A and B` over six p-bits:
/// A, B, S, C visible; `A or B` and `not C` auxiliary.
pub fn compose_half_adder(and: &GateSpec, or: &GateSpec, not: &GateSpec) -> Result<GateSpec> {
    let (a, b, s, c, q, nc) = (0, 1, 2, 3, 4, 5);
    let parts = [
        Part::wired(or, &[a, b, q], &[], 1.0)?,
        Part::wired(and, &[a, b, c], &[], 1.0)?,
        Part::wired(not, &[c, nc], &[], 1.0)?,
        Part::wired(and, &[q, nc, s], &[], 1.0)?,
    ];
    compose(
        "half_adder",
        6,
        &["A", "B", "S", "C"],
        truth_table_of(2, |x| (((x >> 1) ^ (x & 1)) << 1) | ((x >> 1) & (x & 1)), 2),
        &parts,
    )
}

/// Two XOR / AND stages joined by an OR over fourteen p-bits. Each AND
/// reads copies of its inputs so no pair of p-bits collects couplings from
/// two sub-gates. The adder core, at double weight, couples the five
/// terminals directly.
pub fn compose_full_adder(
    and: &GateSpec,
    or: &GateSpec,
    xor: &GateSpec,
    copy: &GateSpec,
    core: &GateSpec,
) -> Result<GateSpec> {
    let (a, b, cin, s, cout) = (0, 1, 2, 3, 4);
    let (x, x1, x2, y1, y2, a2, b2, xc, cc) = (5, 6, 7, 8, 9, 10, 11, 12, 13);
    let parts = [
        Part::wired(xor, &[a, b, x], &[x1], 1.0)?,
        Part::wired(copy, &[a, a2], &[], 1.0)?,
        Part::wired(copy, &[b, b2], &[], 1.0)?,
        Part::wired(and, &[a2, b2, y1], &[], 1.0)?,
        Part::wired(xor, &[x, cin, s], &[x2], 1.0)?,
        Part::wired(copy, &[x, xc], &[], 1.0)?,
        Part::wired(copy, &[cin, cc], &[], 1.0)?,
        Part::wired(and, &[xc, cc, y2], &[], 1.0)?,
        Part::wired(or, &[y1, y2, cout], &[], 1.0)?,
        Part::wired(core, &[a, b, cin, s, cout], &[], 2.0)?,
    ];
    compose(
        "full_adder",
        14,
        &["A", "B", "Cin", "S", "Cout"],
        full_adder_table(),
        &parts,
    )
}

/// Rebuilds every generated gate from the transcribed AND and OR files.
/// Returns them in [`NAMES`] order.
pub fn regenerate() -> Result<Vec<GateSpec>> {
    let and = gate("and")?;
    let or = gate("or")?;
    verify_ground_states(&and, 1.0)?;
    verify_ground_states(&or, 1.0)?;
    let not = synthesize_not()?;
    let copy = synthesize_copy()?;
    let xor = synthesize_xor()?;
    let core = synthesize_adder_core()?;
    let ha = compose_half_adder(&and, &or, &not)?;
    let fa = compose_full_adder(&and, &or, &xor, &copy, &core)?;
    Ok(vec![and, or, not, copy, xor, core, ha, fa])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_shipped_gate_verifies() {
        for name in NAMES {
            verified(name).unwrap_or_else(|e| panic!("{name}: {e}"));
        }
        assert!(gate("nand").is_err());
    }

    #[test]
    fn shipped_sizes() {
        let sizes: Vec<(usize, usize)> = NAMES
            .iter()
            .map(|n| {
                let g = gate(n).unwrap();
                (g.n, g.auxiliary.len())
            })
            .collect();
        assert_eq!(
            sizes,
            vec![
                (3, 0),
                (3, 0),
                (2, 0),
                (2, 0),
                (4, 1),
                (5, 0),
                (6, 2),
                (14, 9)
            ]
        );
    }
}
