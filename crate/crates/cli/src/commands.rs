use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context, Result};
use pbit::analysis::Mode;
use pbit::gates::{synthesize_gate, SynthesisRequest};
use pbit::scenario::{self, ScenarioConfig};
use pbit::{verify_ground_states, EmpiricalDistribution, GateSpec, PbitError, RetentionPlan};
use serde::Serialize;

use crate::output::{write_file, write_json};
use crate::{Format, Output, Overrides};

/// 2 for bad input, 3 for a gate that fails verification or synthesis,
/// 1 for anything else.
pub fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<PbitError>() {
            return match e {
                PbitError::Verification(_) | PbitError::NotFound(_) => 3,
                PbitError::Io(_) => 1,
                _ => 2,
            };
        }
        if cause.downcast_ref::<serde_json::Error>().is_some() {
            return 2;
        }
    }
    1
}

fn load_scenario(path: &Path, o: &Overrides) -> Result<ScenarioConfig> {
    let mut cfg =
        ScenarioConfig::load(path).with_context(|| format!("loading {}", path.display()))?;
    if let Some(seed) = o.seed {
        cfg.seed = seed;
    }
    if let Some(samples) = o.samples {
        cfg.samples = samples;
    }
    if let Some(b) = o.burn_in {
        cfg.burn_in = b;
    }
    cfg.validate()?;
    Ok(cfg)
}

#[derive(Serialize)]
struct HistogramJson<'a> {
    labels: &'a [String],
    total: u64,
    burn_in_discarded: u64,
    distance: Option<f64>,
    oracle: Option<&'a [f64]>,
    states: Vec<Mode>,
}

pub fn run(path: &Path, o: &Overrides, out: &Output, trace: bool, top: usize) -> Result<()> {
    let cfg = load_scenario(path, o)?;
    let res = scenario::run_scenario(&cfg)?;
    let hist = &res.histogram;
    match out.format {
        Format::Csv => write_file(&out.out, "histogram.csv", |w| Ok(hist.write_csv(w)?))?,
        Format::Json => write_json(
            &out.out,
            "histogram.json",
            &HistogramJson {
                labels: &hist.labels,
                total: hist.total,
                burn_in_discarded: hist.burn_in_discarded,
                distance: res.distance,
                oracle: res.oracle.as_deref(),
                states: hist.table(),
            },
        )?,
    };
    if trace {
        write_file(&out.out, "trace.csv", |w| Ok(res.trace.write_csv(w)?))?;
    }
    println!(
        "{} samples counted over {} ({} discarded as burn-in)",
        hist.total,
        hist.labels.join(" "),
        hist.burn_in_discarded
    );
    if let Some(d) = res.distance {
        println!("oracle distance {d:.6}");
    }
    for m in hist.mode_report(top)? {
        println!("{:>8} {} {:.6}", m.state, m.label, m.probability);
    }
    Ok(())
}

pub fn sweep_tau(path: &Path, taus: &[f64], o: &Overrides, out: &Output) -> Result<()> {
    let cfg = load_scenario(path, o)?;
    let rows = scenario::sweep_sampling_time(&cfg, taus)?;
    match out.format {
        Format::Csv => write_file(&out.out, "distance.csv", |w| {
            writeln!(w, "tau_ratio,distance")?;
            for r in &rows {
                writeln!(w, "{},{}", r.tau_ratio, r.distance)?;
            }
            Ok(())
        })?,
        Format::Json => write_json(&out.out, "distance.json", &rows)?,
    };
    for r in &rows {
        println!(
            "tau_sample {} ms  ratio {:.4}  distance {:.6}",
            r.tau_sample_ms, r.tau_ratio, r.distance
        );
    }
    Ok(())
}

pub fn sweep_i0(path: &Path, values: &[f64], o: &Overrides, out: &Output) -> Result<()> {
    let cfg = load_scenario(path, o)?;
    let rows = scenario::sweep_i0(&cfg, values)?;
    match out.format {
        Format::Csv => write_file(&out.out, "i0.csv", |w| {
            writeln!(w, "i0,distance")?;
            for r in &rows {
                writeln!(w, "{},{}", r.i0, r.distance)?;
            }
            Ok(())
        })?,
        Format::Json => write_json(&out.out, "i0.json", &rows)?,
    };
    for r in &rows {
        println!("I0 {}  distance {:.6}", r.i0, r.distance);
    }
    Ok(())
}

fn default_plans() -> Vec<RetentionPlan> {
    [
        [200.0, 200.0, 200.0],
        [137.0, 200.0, 263.0],
        [50.0, 200.0, 350.0],
    ]
    .iter()
    .map(|ms| RetentionPlan::PerPbit { ms: ms.to_vec() })
    .collect()
}

pub fn sweep_retention(
    path: &Path,
    plans: Option<&Path>,
    o: &Overrides,
    out: &Output,
) -> Result<()> {
    let cfg = load_scenario(path, o)?;
    let plans: Vec<RetentionPlan> = match plans {
        Some(p) => {
            let text =
                std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            serde_json::from_str(&text).with_context(|| format!("parsing {}", p.display()))?
        }
        None => {
            let n = cfg.build()?.pbit_count();
            if n != 3 {
                return Err(PbitError::config(format!(
                    "the default plans cover 3 p-bits, this network has {n}; pass --plans"
                ))
                .into());
            }
            default_plans()
        }
    };
    let rows = scenario::sweep_retention_spread(&cfg, &plans)?;
    match out.format {
        Format::Csv => write_file(&out.out, "retention.csv", |w| {
            writeln!(w, "plan,min_tau_ms,tau_ratio,distance")?;
            for (i, r) in rows.iter().enumerate() {
                writeln!(w, "{i},{},{},{}", r.min_tau_ms, r.tau_ratio, r.distance)?;
            }
            Ok(())
        })?,
        Format::Json => write_json(&out.out, "retention.json", &rows)?,
    };
    for (i, r) in rows.iter().enumerate() {
        println!(
            "plan {i}  min tau_N {} ms  distance {:.6}",
            r.min_tau_ms, r.distance
        );
    }
    Ok(())
}

pub fn verify(path: &Path, i0_check: f64) -> Result<()> {
    let gate = GateSpec::load(path).with_context(|| format!("loading {}", path.display()))?;
    let v = verify_ground_states(&gate, i0_check)?;
    println!(
        "{}: ok, {} ground state(s) at E/I0 = {}, gap {}",
        gate.name, v.ground_states, v.ground_energy, v.gap
    );
    Ok(())
}

pub fn synth(path: &Path, out: Option<&Path>) -> Result<()> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let req: SynthesisRequest =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    let gate = synthesize_gate(&req)?;
    match out {
        Some(p) => {
            std::fs::write(p, gate.to_json())
                .with_context(|| format!("writing {}", p.display()))?;
            eprintln!("wrote {}", p.display());
        }
        None => print!("{}", gate.to_json()),
    }
    Ok(())
}

/// Rebuilds a distribution from `state,label,count,probability` rows.
fn read_histogram(path: &Path) -> Result<EmpiricalDistribution> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut lines = text.lines();
    if lines.next() != Some("state,label,count,probability") {
        return Err(PbitError::config(format!("{} is not a histogram.csv", path.display())).into());
    }
    let mut counts = BTreeMap::new();
    let mut width = None;
    for (no, line) in lines.enumerate() {
        let f: Vec<&str> = line.split(',').collect();
        let parsed = match f.as_slice() {
            [state, label, count, _] => state
                .parse::<u64>()
                .ok()
                .zip(count.parse::<u64>().ok())
                .map(|x| (x, label.len())),
            _ => None,
        };
        let Some(((state, count), w)) = parsed else {
            return Err(
                PbitError::config(format!("{}:{}: malformed row", path.display(), no + 2)).into(),
            );
        };
        if *width.get_or_insert(w) != w {
            bail!("{}:{}: label width changes", path.display(), no + 2);
        }
        if count > 0 {
            counts.insert(state, count);
        }
    }
    let width = width.unwrap_or(0);
    let total = counts.values().sum();
    if total == 0 {
        return Err(PbitError::config(format!("{} holds no counts", path.display())).into());
    }
    Ok(EmpiricalDistribution {
        labels: (0..width)
            .map(|k| format!("bit{}", width - 1 - k))
            .collect(),
        counts,
        total,
        burn_in_discarded: 0,
    })
}

pub fn report(path: &Path, top: usize, format: Format) -> Result<()> {
    let hist = read_histogram(path)?;
    let modes = hist.mode_report(top)?;
    match format {
        Format::Csv => {
            println!("state,label,count,probability");
            for m in &modes {
                println!("{},{},{},{}", m.state, m.label, m.count, m.probability);
            }
        }
        Format::Json => println!("{}", serde_json::to_string_pretty(&modes)?),
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_follow_the_error_kind() {
        let wrap = |e: PbitError| anyhow::Error::from(e).context("outer");
        assert_eq!(exit_code(&wrap(PbitError::config("x"))), 2);
        assert_eq!(exit_code(&wrap(PbitError::NotFound("x".into()))), 3);
        let io = std::io::Error::new(std::io::ErrorKind::NotFound, "gone");
        assert_eq!(exit_code(&wrap(PbitError::Io(io))), 1);
        assert_eq!(exit_code(&anyhow::anyhow!("plain")), 1);
    }

    #[test]
    fn histogram_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("h.csv");
        std::fs::write(
            &path,
            "state,label,count,probability\n0,0,3,0.75\n1,1,1,0.25\n",
        )
        .unwrap();
        let h = read_histogram(&path).unwrap();
        assert_eq!(h.total, 4);
        assert_eq!(h.width(), 1);
        assert_eq!(h.count(1), 1);
        std::fs::write(&path, "state,label,count,probability\n0,0,x,0\n").unwrap();
        assert!(read_histogram(&path).is_err());
    }
}
