//! Builders for the AND machine, the full adder, the 4-bit ripple-carry
//! adder and the 2x2-bit factorizer.

use crate::error::{PbitError, Result};
use crate::gates::{fold_constant, library, GateSpec, VerifiedGate};
use crate::model::CouplingMatrix;
use crate::network::{MachineSpec, NetworkSpec, RetentionPlan};
use crate::time::SimTime;

pub const AND_PBITS: usize = 3;
pub const FULL_ADDER_PBITS: usize = 14;
pub const RCA4_PBITS: usize = 48;
pub const FACTORIZER_PBITS: usize = 46;

fn check_i0(i0: f64) -> Result<()> {
    if i0.is_finite() && i0 >= 0.0 {
        Ok(())
    } else {
        Err(PbitError::argument(format!(
            "I0 = {i0} must be finite and >= 0"
        )))
    }
}

fn machine_from(gate: &VerifiedGate, name: &str, i0: f64) -> Result<MachineSpec> {
    check_i0(i0)?;
    Ok(MachineSpec::new(name, gate.coupling(i0)?))
}

fn terminal_labels(gate: &GateSpec) -> Vec<(&str, usize)> {
    gate.visible
        .iter()
        .map(|t| (t.label.as_str(), t.index))
        .collect()
}

/// Three p-bits `A`, `B`, `C` with `C = A and B` at the ground state.
pub fn build_and_machine(i0: f64) -> Result<MachineSpec> {
    machine_from(&library::verified("and")?, "and", i0)
}

pub fn and_network(i0: f64) -> Result<NetworkSpec> {
    let g = library::verified("and")?;
    Ok(NetworkSpec::single(
        machine_from(&g, "and", i0)?,
        &terminal_labels(g.spec()),
    ))
}

/// Fourteen p-bits; terminals `A`, `B`, `Cin`, `S`, `Cout` are p-bits 0..5.
pub fn build_full_adder(i0: f64) -> Result<MachineSpec> {
    machine_from(&library::verified("full_adder")?, "full_adder", i0)
}

pub fn full_adder_network(i0: f64) -> Result<NetworkSpec> {
    let g = library::verified("full_adder")?;
    Ok(NetworkSpec::single(
        machine_from(&g, "full_adder", i0)?,
        &terminal_labels(g.spec()),
    ))
}

/// Retention times drawn around 200 ms, clipped to [137, 263] ms.
pub fn default_rca_retention(seed: u64) -> RetentionPlan {
    RetentionPlan::Normal {
        mean_ms: 200.0,
        std_ms: 25.0,
        min_ms: 137.0,
        max_ms: 263.0,
        seed,
    }
}

/// Half adder on bit 0 and full adders on bits 1..3, carries passed over
/// directed wires. Labels: `A0..A3`, `B0..B3`, `S0..S3`, `Cout`, plus
/// `FA{k}.Cin` for the carry inputs.
pub fn build_rca4(i0: f64, retention: &RetentionPlan) -> Result<NetworkSpec> {
    check_i0(i0)?;
    let ha = library::verified("half_adder")?;
    let fa = library::verified("full_adder")?;
    let mut net = NetworkSpec::empty();
    let ha_off = net.push_machine(
        MachineSpec::new("ha0", ha.coupling(i0)?),
        "",
        &[("A0", 0), ("B0", 1), ("S0", 2)],
    );
    let mut carry = ha_off + ha.spec().index_of("C")?;
    for k in 1..4 {
        let spec = fa.spec();
        let (a, b, cin, s, cout) = (
            spec.index_of("A")?,
            spec.index_of("B")?,
            spec.index_of("Cin")?,
            spec.index_of("S")?,
            spec.index_of("Cout")?,
        );
        let (la, lb, ls, lc) = (
            format!("A{k}"),
            format!("B{k}"),
            format!("S{k}"),
            format!("FA{k}.Cin"),
        );
        let mut labels = vec![
            (la.as_str(), a),
            (lb.as_str(), b),
            (ls.as_str(), s),
            (lc.as_str(), cin),
        ];
        if k == 3 {
            labels.push(("Cout", cout));
        }
        let off = net.push_machine(
            MachineSpec::new(format!("fa{k}"), fa.coupling(i0)?),
            "",
            &labels,
        );
        net.wire(carry, off + cin, SimTime::ZERO)?;
        carry = off + cout;
    }
    if net.pbit_count() != RCA4_PBITS {
        return Err(PbitError::config(format!(
            "ripple-carry adder has {} p-bits, expected {RCA4_PBITS}",
            net.pbit_count()
        )));
    }
    retention.apply(&mut net)?;
    net.validate()?;
    Ok(net)
}

/// Labels of the RCA sum word, most significant first.
pub const RCA_SUM: [&str; 5] = ["Cout", "S3", "S2", "S1", "S0"];
pub const RCA_A: [&str; 4] = ["A3", "A2", "A1", "A0"];
pub const RCA_B: [&str; 4] = ["B3", "B2", "B1", "B0"];

/// Labels of the factorizer's words, most significant first.
pub const FACT_A: [&str; 2] = ["A2", "A1"];
pub const FACT_B: [&str; 2] = ["B2", "B1"];
pub const FACT_S: [&str; 4] = ["S3", "S2", "S1", "S0"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AccountingRow {
    pub machine: String,
    pub role: String,
    pub pbits: usize,
}

#[derive(Debug, Clone)]
pub struct Factorizer {
    pub network: NetworkSpec,
    pub accounting: Vec<AccountingRow>,
}

impl Factorizer {
    pub fn accounting_table(&self) -> String {
        let mut out = String::from("machine,role,pbits\n");
        for r in &self.accounting {
            out.push_str(&format!("{},{},{}\n", r.machine, r.role, r.pbits));
        }
        out.push_str(&format!("total,,{}\n", self.network.pbit_count()));
        out
    }
}

/// Product `S = A * B` of two 2-bit numbers (`A = 2 A2 + A1`).
///
/// One machine holds the four AND gates over shared inputs `A1, A2, B1, B2`
/// (partial products `P_ab = A_a B_b`); `S0` is `P11`. Three full adders add
/// the remaining columns, constant-zero terminals folded into the biases:
///
/// * `fa1`: `P21 + P12` gives `S1`, carry-in folded;
/// * `fa2`: `P22 + C1` gives `S2`, `B` folded;
/// * `fa3`: `C2` gives `S3`, `A` and `B` folded.
///
/// Carries run forward over wires; each partial-product p-bit reads its
/// adder input terminal over a reversed wire.
pub fn build_factorizer(i0: f64) -> Result<Factorizer> {
    check_i0(i0)?;
    let and = library::verified("and")?;
    let fa = library::verified("full_adder")?;

    // AND machine layout: inputs A1 A2 B1 B2, then P11 P21 P12 P22.
    let (a1, a2, b1, b2) = (0, 1, 2, 3);
    let products = [
        ("P11", 4, a1, b1),
        ("P21", 5, a2, b1),
        ("P12", 6, a1, b2),
        ("P22", 7, a2, b2),
    ];
    let mut j = vec![vec![0.0; 8]; 8];
    let mut h = vec![0.0; 8];
    let g = and.spec();
    let (ga, gb, gc) = (g.index_of("A")?, g.index_of("B")?, g.index_of("C")?);
    for &(_, p, x, y) in &products {
        let map = [(ga, x), (gb, y), (gc, p)];
        for &(la, da) in &map {
            h[da] += g.h[la];
            for &(lb, db) in &map {
                if la != lb {
                    j[da][db] += g.j[la][lb];
                }
            }
        }
    }
    let and_machine = MachineSpec::new("and4", CouplingMatrix::new(j, h, i0)?);

    let fa1 = crate::gates::verify_ground_states(&fold_constant(fa.spec(), "Cin", false)?, 1.0)?;
    let fa2 = crate::gates::verify_ground_states(&fold_constant(fa.spec(), "B", false)?, 1.0)?;
    let fa3_spec = fold_constant(&fold_constant(fa.spec(), "A", false)?, "B", false)?;
    let fa3 = crate::gates::verify_ground_states(&fa3_spec, 1.0)?;

    let mut net = NetworkSpec::empty();
    let and_labels: Vec<(&str, usize)> = [("A1", a1), ("A2", a2), ("B1", b1), ("B2", b2)]
        .into_iter()
        .chain(products.iter().map(|&(l, p, _, _)| (l, p)))
        .chain([("S0", 4)])
        .collect();
    let and_off = net.push_machine(and_machine, "", &and_labels);
    let f1 = fa1.spec();
    let off1 = net.push_machine(
        MachineSpec::new("fa1", fa1.coupling(i0)?),
        "fa1.",
        &terminal_labels(f1),
    );
    let f2 = fa2.spec();
    let off2 = net.push_machine(
        MachineSpec::new("fa2", fa2.coupling(i0)?),
        "fa2.",
        &terminal_labels(f2),
    );
    let f3 = fa3.spec();
    let off3 = net.push_machine(
        MachineSpec::new("fa3", fa3.coupling(i0)?),
        "fa3.",
        &terminal_labels(f3),
    );
    for (label, id) in [
        ("S1", off1 + f1.index_of("S")?),
        ("S2", off2 + f2.index_of("S")?),
        ("S3", off3 + f3.index_of("S")?),
    ] {
        net.labels.insert(label.into(), id);
    }

    net.wire(
        off1 + f1.index_of("Cout")?,
        off2 + f2.index_of("Cin")?,
        SimTime::ZERO,
    )?;
    net.wire(
        off2 + f2.index_of("Cout")?,
        off3 + f3.index_of("Cin")?,
        SimTime::ZERO,
    )?;
    net.wire(off1 + f1.index_of("A")?, and_off + 5, SimTime::ZERO)?;
    net.wire(off1 + f1.index_of("B")?, and_off + 6, SimTime::ZERO)?;
    net.wire(off2 + f2.index_of("A")?, and_off + 7, SimTime::ZERO)?;

    let accounting = vec![
        AccountingRow {
            machine: "and4".into(),
            role: "shared inputs A1 A2 B1 B2".into(),
            pbits: 4,
        },
        AccountingRow {
            machine: "and4".into(),
            role: "partial products P11 P21 P12 P22".into(),
            pbits: 4,
        },
        AccountingRow {
            machine: "fa1".into(),
            role: "full adder, Cin = 0 folded".into(),
            pbits: f1.n,
        },
        AccountingRow {
            machine: "fa2".into(),
            role: "full adder, B = 0 folded".into(),
            pbits: f2.n,
        },
        AccountingRow {
            machine: "fa3".into(),
            role: "full adder, A = B = 0 folded".into(),
            pbits: f3.n,
        },
    ];
    let listed: usize = accounting.iter().map(|r| r.pbits).sum();
    if listed != net.pbit_count() || listed != FACTORIZER_PBITS {
        return Err(PbitError::config(format!(
            "factorizer accounting lists {listed} p-bits, network has {}, expected {FACTORIZER_PBITS}",
            net.pbit_count()
        )));
    }
    net.validate()?;
    Ok(Factorizer {
        network: net,
        accounting,
    })
}
