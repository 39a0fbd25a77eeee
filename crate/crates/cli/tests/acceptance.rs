//! The fifteen acceptance criteria. Each test prints one `PASS` / `FAIL`
//! line before asserting, so `cargo test --test acceptance -- --nocapture`
//! gives the whole scorecard.

use std::path::{Path, PathBuf};
use std::process::Command;

use pbit::dynamics::{parallel_flags, RecordOptions, SampleInstant, Simulator};
use pbit::gates::library;
use pbit::model::{sigmoid, TerminalMode};
use pbit::{
    boltzmann_distribution, euclidean_distance, histogram, networks, run, Budget, CouplingMatrix,
    GateSpec, MachineSpec, NetworkSpec, PhasePlan, SimTime,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

const UNIFORM_TOL: f64 = 0.02;
const ORACLE_DISTANCE: f64 = 0.05;
const DIRECT_AND_MIN: f64 = 0.9;
const DIRECT_AND_SLACK: f64 = 0.03;
const INVERTED_AND_MASS: f64 = 0.9;
const INVERTED_AND_SPREAD: f64 = 0.05;
const BREAKDOWN_MASS: f64 = 0.5;
const SERIALIZATION_DROP: f64 = 5.0;
const FA_DIRECT_MASS: f64 = 0.75;
const FA_INVERTED_MASS: f64 = 0.85;
const RCA_DIRECT_MASS: f64 = 0.5;
const RCA_PAIR_MIN: f64 = 0.02;
const RCA_VALID_MASS: f64 = 0.9;
const FACTOR_MASS: f64 = 0.7;
const FACTOR_UNIFORM_TOL: f64 = 0.03;

fn verdict(n: u32, ok: bool, detail: impl AsRef<str>) {
    println!(
        "criterion {n:>2}: {} {}",
        if ok { "PASS" } else { "FAIL" },
        detail.as_ref()
    );
}

fn workspace() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn scenario(name: &str) -> PathBuf {
    workspace().join("scenarios").join(format!("{name}.json"))
}

fn pbit_sim(args: &[&str]) -> std::process::Output {
    let out = Command::new(env!("CARGO_BIN_EXE_pbit-sim"))
        .args(args)
        .output()
        .expect("pbit-sim runs");
    assert!(
        out.status.success(),
        "pbit-sim {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

/// Runs a scenario with JSON output and returns the parsed histogram.json.
fn run_json(path: &Path, extra: &[&str]) -> Value {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec![
        "run",
        path.to_str().unwrap(),
        "--format",
        "json",
        "--out",
        dir.path().to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    pbit_sim(&args);
    let text = std::fs::read_to_string(dir.path().join("histogram.json")).unwrap();
    serde_json::from_str(&text).unwrap()
}

/// `(state, probability)` rows of a histogram.json.
fn states(v: &Value) -> Vec<(u64, f64)> {
    v["states"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| {
            (
                s["state"].as_u64().unwrap(),
                s["probability"].as_f64().unwrap(),
            )
        })
        .collect()
}

fn prob(rows: &[(u64, f64)], word: u64) -> f64 {
    rows.iter().find(|r| r.0 == word).map_or(0.0, |r| r.1)
}

fn mass(rows: &[(u64, f64)], pred: impl Fn(u64) -> bool) -> f64 {
    rows.iter().filter(|r| pred(r.0)).map(|r| r.1).sum()
}

#[test]
fn c01_sigmoid_response() {
    let dir = tempfile::tempdir().unwrap();
    let n = 100_000.0;
    let mut worst: f64 = 0.0;
    let mut ok = true;
    for k in 0..=8 {
        let v = 0.625 * k as f64;
        let bias = 2.0 * v - 5.0;
        let path = dir.path().join(format!("v{k}.json"));
        std::fs::write(
            &path,
            format!(r#"{{"network": {{"builder": "single", "bias": {bias}}}, "samples": 100000, "burn_in": 0.0, "sample_at": "update"}}"#),
        )
        .unwrap();
        let res = run_json(&path, &["--seed", "11"]);
        let p_hat = prob(&states(&res), 1);
        let p = sigmoid(bias);
        let sigma = (p * (1.0 - p) / n).sqrt();
        let z = (p_hat - p).abs() / sigma;
        worst = worst.max(z);
        ok &= z <= 3.0;
    }
    verdict(
        1,
        ok,
        format!("worst deviation {worst:.2} sigma over 9 voltages"),
    );
    assert!(ok);
}

#[test]
fn c02_uncorrelated_and() {
    let rows = states(&run_json(&scenario("and_uncorrelated"), &[]));
    let worst = (0..8)
        .map(|w| (prob(&rows, w) - 0.125).abs())
        .fold(0.0, f64::max);
    let ok = worst <= UNIFORM_TOL;
    verdict(2, ok, format!("max |p - 1/8| = {worst:.4}"));
    assert!(ok);
}

#[test]
fn c03_correlated_and_matches_oracle() {
    let res = run_json(&scenario("and_correlated"), &[]);
    let d = res["distance"].as_f64().unwrap();
    let ok = d < ORACLE_DISTANCE;
    verdict(3, ok, format!("oracle distance {d:.4}"));
    assert!(ok);
}

#[test]
fn c04_direct_and() {
    let res = run_json(&scenario("and_direct"), &[]);
    let rows = states(&res);
    let p = mass(&rows, |w| w & 1 == 1);
    let oracle: Vec<f64> = res["oracle"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect();
    let expected: f64 = oracle
        .iter()
        .enumerate()
        .filter(|(w, _)| w & 1 == 1)
        .map(|(_, p)| p)
        .sum();
    let ok = p >= DIRECT_AND_MIN && p >= expected - DIRECT_AND_SLACK;
    verdict(4, ok, format!("P(C=1) = {p:.4}, oracle {expected:.4}"));
    assert!(ok);
}

#[test]
fn c05_inverted_and() {
    let rows = states(&run_json(&scenario("and_inverted"), &[]));
    let peaks = [prob(&rows, 0b000), prob(&rows, 0b010), prob(&rows, 0b100)];
    let total: f64 = peaks.iter().sum();
    let spread = peaks
        .iter()
        .map(|p| (p - total / 3.0).abs())
        .fold(0.0, f64::max);
    let ok = total >= INVERTED_AND_MASS && spread <= INVERTED_AND_SPREAD;
    verdict(
        5,
        ok,
        format!("mass {total:.4} on 00x/01x/10x, max offset from a third {spread:.4}"),
    );
    assert!(ok);
}

#[test]
fn c06_sampling_time_breakdown() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let path = scenario("and_breakdown");
    pbit_sim(&[
        "sweep-tau",
        path.to_str().unwrap(),
        "--taus",
        "1,100,200,400",
        "--format",
        "json",
        "--out",
        out,
    ]);
    let rows: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("distance.json")).unwrap())
            .unwrap();
    let rows = rows.as_array().unwrap();
    let d: Vec<f64> = rows
        .iter()
        .map(|r| r["distance"].as_f64().unwrap())
        .collect();
    let monotone = d.windows(2).all(|w| w[1] >= w[0]);
    let late: Vec<f64> = rows
        .iter()
        .filter(|r| r["tau_sample_ms"].as_f64().unwrap() >= 200.0)
        .map(|r| {
            let h = r["histogram"].as_array().unwrap();
            h[0b001].as_f64().unwrap() + h[0b110].as_f64().unwrap()
        })
        .collect();
    let ok = monotone && late.iter().all(|&m| m > BREAKDOWN_MASS);
    verdict(
        6,
        ok,
        format!("distances {d:.3?}, mass on 001+110 at >= 200 ms {late:.3?}"),
    );
    assert!(ok);
}

#[test]
fn c07_serialization_emerges() {
    // AND machine, every p-bit starting at t = 0 with the default 0.5% jitter.
    let net = networks::and_network(0.8).unwrap();
    let n = net.pbit_count();
    let window = SimTime::from_millis(10);
    let seeds = 64u64;
    let record = RecordOptions {
        instant: SampleInstant::Refresh,
        updates: true,
    };
    let mut initial = 0.0;
    let mut late = 0.0;
    for seed in 0..seeds {
        let mut sim = Simulator::new(&net, seed, record).unwrap();
        while sim.trace().updates.len() < 10_000 {
            sim.step().unwrap();
        }
        let trace = sim.into_trace();
        let flags = parallel_flags(&trace, &net, window).unwrap();
        let frac = |f: &[bool]| f.iter().filter(|&&x| x).count() as f64 / f.len() as f64;
        initial += frac(&flags[..n]);
        late += frac(&flags[flags.len() - 1000..]);
    }
    initial /= seeds as f64;
    late /= seeds as f64;
    let ok = initial > 0.0 && initial >= SERIALIZATION_DROP * late;
    verdict(
        7,
        ok,
        format!("metric {initial:.3} over the first round, {late:.3} over the last 1000 updates ({seeds}-seed mean)"),
    );
    assert!(ok);
}

#[test]
fn c08_retention_spread() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let path = scenario("and_correlated");
    pbit_sim(&[
        "sweep-retention",
        path.to_str().unwrap(),
        "--format",
        "json",
        "--out",
        out,
    ]);
    let rows: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("retention.json")).unwrap())
            .unwrap();
    let d: Vec<f64> = rows
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["distance"].as_f64().unwrap())
        .collect();
    let ok = d.len() == 3 && d.iter().all(|&x| x < ORACLE_DISTANCE);
    verdict(8, ok, format!("distances {d:.4?}"));
    assert!(ok);
}

#[test]
fn c09_full_adder() {
    let direct = states(&run_json(&scenario("full_adder_direct"), &[]));
    let (mode, p) = direct
        .iter()
        .copied()
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap();
    let inverted = states(&run_json(&scenario("full_adder_inverted"), &[]));
    let m = mass(&inverted, |w| matches!(w, 0b110 | 0b101 | 0b011));
    let ok = mode == 0b01 && p >= FA_DIRECT_MASS && m >= FA_INVERTED_MASS;
    verdict(
        9,
        ok,
        format!("direct mode (S,Cout) = {mode:02b} at {p:.4}; inverted mass {m:.4}"),
    );
    assert!(ok);
}

#[test]
fn c10_rca_direct() {
    let rows = states(&run_json(&scenario("rca_direct"), &[]));
    let (mode, p) = rows
        .iter()
        .copied()
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap();
    let ok = mode == 23 && p >= RCA_DIRECT_MASS;
    verdict(10, ok, format!("modal sum {mode} at {p:.4}"));
    assert!(ok);
}

#[test]
fn c11_rca_inverted() {
    // Visible word: A3..A0 then B3..B0.
    let rows = states(&run_json(&scenario("rca_inverted"), &[]));
    let pairs: Vec<(u64, u64)> = (8..16).map(|a| (a, 23 - a)).collect();
    let per_pair: Vec<f64> = pairs
        .iter()
        .map(|&(a, b)| prob(&rows, (a << 4) | b))
        .collect();
    let valid: f64 = per_pair.iter().sum();
    let least = per_pair.iter().copied().fold(1.0, f64::min);
    let ok = least >= RCA_PAIR_MIN && valid >= RCA_VALID_MASS;
    verdict(
        11,
        ok,
        format!("mass on A+B=23 {valid:.4}, smallest of 8 pairs {least:.4}"),
    );
    assert!(ok);
}

#[test]
fn c12_factorizer() {
    // Visible word: A2 A1 B2 B1, so (A, B) = (2, 3) is 0b1011.
    let rows = states(&run_json(&scenario("factorizer"), &[]));
    let factors = prob(&rows, 0b1011) + prob(&rows, 0b1110);
    let control = states(&run_json(&scenario("factorizer_uncorrelated"), &[]));
    let worst = (0..16)
        .map(|w| (prob(&control, w) - 1.0 / 16.0).abs())
        .fold(0.0, f64::max);
    let ok = factors >= FACTOR_MASS && worst <= FACTOR_UNIFORM_TOL;
    verdict(
        12,
        ok,
        format!("(2,3)+(3,2) = {factors:.4}; I0 = 0 control max |p - 1/16| = {worst:.4}"),
    );
    assert!(ok);
}

#[test]
fn c13_gate_library_verifies() {
    let gate_dir = workspace().join("crates/core/gates");
    let mut ok = true;
    let mut checked = 0;
    for name in library::NAMES {
        let path = gate_dir.join(format!("{name}.json"));
        let status = Command::new(env!("CARGO_BIN_EXE_pbit-sim"))
            .args(["verify", path.to_str().unwrap()])
            .output()
            .unwrap()
            .status;
        ok &= status.success();
        checked += 1;
    }
    let mut bad: GateSpec = library::gate("and").unwrap();
    bad.j[0][2] = -bad.j[0][2];
    bad.j[2][0] = -bad.j[2][0];
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad_and.json");
    std::fs::write(&path, bad.to_json()).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_pbit-sim"))
        .args(["verify", path.to_str().unwrap()])
        .output()
        .unwrap();
    let rejected = out.status.code() == Some(3);
    ok &= rejected;
    verdict(
        13,
        ok,
        format!("{checked} shipped gates verify; corrupted AND rejected: {rejected}"),
    );
    assert!(ok);
}

fn run_csv(path: &Path, dir: &Path, extra: &[&str]) -> Vec<(String, Vec<u8>)> {
    let mut args = vec![
        "run",
        path.to_str().unwrap(),
        "--trace",
        "--out",
        dir.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    pbit_sim(&args);
    ["histogram.csv", "trace.csv"]
        .iter()
        .map(|f| (f.to_string(), std::fs::read(dir.join(f)).unwrap()))
        .collect()
}

#[test]
fn c14_determinism() {
    let cases: [(&str, &[&str]); 4] = [
        ("and_correlated", &[]),
        ("full_adder_inverted", &["--samples", "100000"]),
        ("rca_inverted", &["--samples", "200000"]),
        ("factorizer", &["--samples", "100000"]),
    ];
    let mut ok = true;
    for (name, extra) in cases {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        ok &=
            run_csv(&scenario(name), a.path(), extra) == run_csv(&scenario(name), b.path(), extra);
    }
    let sweep = |dir: &Path| {
        pbit_sim(&[
            "sweep-tau",
            scenario("and_breakdown").to_str().unwrap(),
            "--taus",
            "1,200",
            "--samples",
            "50000",
            "--out",
            dir.to_str().unwrap(),
        ]);
        std::fs::read(dir.join("distance.csv")).unwrap()
    };
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    ok &= sweep(a.path()) == sweep(b.path());
    verdict(
        14,
        ok,
        "histogram.csv, trace.csv and distance.csv identical on rerun",
    );
    assert!(ok);
}

fn random_machine(rng: &mut ChaCha8Rng) -> CouplingMatrix {
    let n = rng.random_range(2..=6usize);
    let mut j = vec![vec![0.0; n]; n];
    for a in 0..n {
        for b in a + 1..n {
            let v = rng.random_range(-2.0..=2.0);
            j[a][b] = v;
            j[b][a] = v;
        }
    }
    let h = (0..n).map(|_| rng.random_range(-2.0..=2.0)).collect();
    let i0 = 1.0 - rng.random::<f64>();
    CouplingMatrix::new(j, h, i0).unwrap()
}

#[test]
fn c15_oracle_properties() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let machines: Vec<CouplingMatrix> = (0..50).map(|_| random_machine(&mut rng)).collect();
    let mut failures = Vec::new();
    let mut worst: f64 = 0.0;
    for (k, c) in machines.iter().enumerate() {
        let n = c.len();
        let free = vec![TerminalMode::Free; n];
        let exact = boltzmann_distribution(c, &free).unwrap();
        if (exact.total() - 1.0).abs() > 1e-12 {
            failures.push(format!("{k}: normalization"));
        }

        let no_bias = CouplingMatrix::new(c.rows(), vec![0.0; n], c.i0()).unwrap();
        let sym = boltzmann_distribution(&no_bias, &free).unwrap();
        let mask = (1u64 << n) - 1;
        if (0..=mask).any(|s| (sym.probability(s) - sym.probability(!s & mask)).abs() > 1e-12) {
            failures.push(format!("{k}: flip symmetry"));
        }

        let mut modes = free.clone();
        modes[k % n] = TerminalMode::ClampedHigh;
        let clamped = boltzmann_distribution(c, &modes).unwrap();
        let cond = exact.condition(&modes).unwrap();
        if (0..=mask).any(|s| (clamped.probability(s) - cond.probability(s)).abs() > 1e-12) {
            failures.push(format!("{k}: clamped conditioning"));
        }

        let mut m = MachineSpec::new("random", c.clone());
        m.tau_sample = SimTime::from_millis(2);
        let mut net = NetworkSpec::single(m, &[]);
        PhasePlan::Random { seed: k as u64 }.apply(&mut net);
        let record = RecordOptions {
            instant: SampleInstant::Update,
            updates: false,
        };
        let trace = run(&net, k as u64, Budget::Samples(500_000), record).unwrap();
        let ids: Vec<usize> = (0..n).collect();
        let labels: Vec<String> = ids.iter().map(|i| format!("m{i}")).collect();
        let hist = histogram(&trace, &ids, &labels, 0.1).unwrap();
        let d = euclidean_distance(&hist.dense().unwrap(), &exact.project(&ids).unwrap()).unwrap();
        worst = worst.max(d);
        if d >= ORACLE_DISTANCE {
            failures.push(format!("{k}: sampler distance {d:.4}"));
        }
    }
    let ok = failures.is_empty();
    verdict(
        15,
        ok,
        format!("50 machines, worst sampler distance {worst:.4}; failures {failures:?}"),
    );
    assert!(ok);
}
