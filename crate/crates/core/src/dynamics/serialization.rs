//! How often p-bits of one machine update (nearly) together.

use super::trace::SimulationTrace;
use crate::error::{PbitError, Result};
use crate::network::NetworkSpec;
use crate::time::SimTime;

/// Marks each recorded update that had a companion: another p-bit of the
/// same machine updating within `[t - window, t]`, equal times included.
pub fn parallel_flags(
    trace: &SimulationTrace,
    net: &NetworkSpec,
    window: SimTime,
) -> Result<Vec<bool>> {
    if window == SimTime::ZERO {
        return Err(PbitError::argument("serialization window must be > 0"));
    }
    if trace.updates.is_empty() {
        return Err(PbitError::argument(
            "trace carries no update records; record updates when running",
        ));
    }
    let n = net.pbit_count();
    let mut machine_of = vec![0; n];
    for (mi, off) in net.machine_offsets().into_iter().enumerate() {
        for m in machine_of.iter_mut().skip(off).take(net.machines[mi].len()) {
            *m = mi;
        }
    }
    let members: Vec<Vec<usize>> = {
        let offs = net.machine_offsets();
        net.machines
            .iter()
            .zip(offs)
            .map(|(m, off)| (off..off + m.len()).collect())
            .collect()
    };

    let mut last: Vec<Option<SimTime>> = vec![None; n];
    let mut flags = Vec::with_capacity(trace.updates.len());
    let ups = &trace.updates;
    let mut start = 0;
    while start < ups.len() {
        let t = ups[start].time;
        let mut end = start;
        while end < ups.len() && ups[end].time == t {
            end += 1;
        }
        let group = &ups[start..end];
        for u in group {
            let i = u.pbit as usize;
            let mi = machine_of[i];
            let tied = group
                .iter()
                .any(|o| o.pbit as usize != i && machine_of[o.pbit as usize] == mi);
            let recent = members[mi]
                .iter()
                .any(|&k| k != i && last[k].is_some_and(|lt| lt.0 + window.0 >= t.0));
            flags.push(tied || recent);
        }
        for u in group {
            last[u.pbit as usize] = Some(t);
        }
        start = end;
    }
    Ok(flags)
}

/// Fraction of updates that had a companion within `window`.
pub fn serialization_metric(
    trace: &SimulationTrace,
    net: &NetworkSpec,
    window: SimTime,
) -> Result<f64> {
    let flags = parallel_flags(trace, net, window)?;
    Ok(fraction(&flags))
}

/// The metric over consecutive blocks of `block` updates, in event order.
/// A trailing partial block is dropped.
pub fn serialization_profile(
    trace: &SimulationTrace,
    net: &NetworkSpec,
    window: SimTime,
    block: usize,
) -> Result<Vec<f64>> {
    if block == 0 {
        return Err(PbitError::argument("block size must be > 0"));
    }
    let flags = parallel_flags(trace, net, window)?;
    Ok(flags.chunks_exact(block).map(fraction).collect())
}

fn fraction(flags: &[bool]) -> f64 {
    flags.iter().filter(|&&f| f).count() as f64 / flags.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{run, Budget, RecordOptions};
    use crate::model::CouplingMatrix;
    use crate::network::{MachineSpec, PhasePlan};

    fn three() -> NetworkSpec {
        NetworkSpec::single(MachineSpec::new("m", CouplingMatrix::zeros(3, 1.0)), &[])
    }

    fn record() -> RecordOptions {
        RecordOptions {
            updates: true,
            ..Default::default()
        }
    }

    #[test]
    fn aligned_without_jitter_stays_parallel() {
        let mut net = three();
        net.set_jitter(0.0);
        let trace = run(
            &net,
            1,
            Budget::Duration(SimTime::from_millis(600_000)),
            record(),
        )
        .unwrap();
        let m = serialization_metric(&trace, &net, SimTime::from_millis(10)).unwrap();
        assert_eq!(m, 1.0);
    }

    #[test]
    fn staggered_phases_are_serial() {
        let mut net = three();
        net.set_jitter(0.0);
        PhasePlan::Staggered.apply(&mut net);
        let trace = run(
            &net,
            1,
            Budget::Duration(SimTime::from_millis(600_000)),
            record(),
        )
        .unwrap();
        let m = serialization_metric(&trace, &net, SimTime::from_millis(1)).unwrap();
        assert_eq!(m, 0.0);
    }

    #[test]
    fn zero_window_and_missing_updates_are_rejected() {
        let net = three();
        let trace = run(&net, 1, Budget::Samples(100), record()).unwrap();
        assert!(serialization_metric(&trace, &net, SimTime::ZERO).is_err());
        let bare = run(&net, 1, Budget::Samples(100), RecordOptions::default()).unwrap();
        assert!(serialization_metric(&bare, &net, SimTime(1)).is_err());
    }

    #[test]
    fn separate_machines_do_not_pair() {
        let mut net = NetworkSpec::empty();
        net.push_machine(
            MachineSpec::new("a", CouplingMatrix::zeros(1, 1.0)),
            "",
            &[],
        );
        net.push_machine(
            MachineSpec::new("b", CouplingMatrix::zeros(1, 1.0)),
            "",
            &[],
        );
        net.set_jitter(0.0);
        let trace = run(
            &net,
            1,
            Budget::Duration(SimTime::from_millis(10_000)),
            record(),
        )
        .unwrap();
        assert_eq!(
            serialization_metric(&trace, &net, SimTime(1000)).unwrap(),
            0.0
        );
    }
}
