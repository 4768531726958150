//! Cross-engine comparison (verify) and timing sweeps.
//!
//! Verification treats the serialized output stream as the contract: a
//! plan passes only when its output file bytes equal the reference
//! engine's bytes. Comparing bytes instead of event vectors means the
//! formatting layer is inside the verified surface too.

use std::time::{Duration, Instant};

use crate::inputs::InputQueue;
use crate::io::render_outputs;
use crate::network::Network;
use crate::neuron::SpikeEvent;
use crate::parallel::{run_parallel, ParallelPlan};
use crate::report::RunReport;
use crate::serial::run_serial;
use crate::SimError;

/// One plan's verification outcome.
#[derive(Debug, Clone)]
pub struct PlanVerdict {
    pub plan: ParallelPlan,
    pub pass: bool,
    /// First record where the streams part ways, when they do.
    pub divergence: Option<Divergence>,
}

#[derive(Debug, Clone)]
pub struct Divergence {
    /// Index into the serialized record streams.
    pub record: usize,
    /// Reference record at that index, if any.
    pub expected: Option<SpikeEvent>,
    /// Candidate record at that index, if any.
    pub actual: Option<SpikeEvent>,
}

impl std::fmt::Display for Divergence {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let show = |e: &Option<SpikeEvent>| match e {
            Some(e) => format!("{} {} {} {}", e.tick, e.core_x, e.core_y, e.neuron),
            None => "<end of stream>".to_string(),
        };
        write!(
            f,
            "record {}: expected {}, found {}",
            self.record,
            show(&self.expected),
            show(&self.actual)
        )
    }
}

#[derive(Debug, Clone)]
pub struct VerifyOutcome {
    pub serial_events: usize,
    pub verdicts: Vec<PlanVerdict>,
}

impl VerifyOutcome {
    pub fn all_pass(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }
}

fn first_divergence(expected: &[SpikeEvent], actual: &[SpikeEvent]) -> Option<Divergence> {
    let n = expected.len().max(actual.len());
    (0..n).find_map(|i| {
        let e = expected.get(i).copied();
        let a = actual.get(i).copied();
        (e != a).then_some(Divergence {
            record: i,
            expected: e,
            actual: a,
        })
    })
}

/// Run the reference engine once, then each plan once; a plan passes iff
/// its rendered output bytes match the reference bytes.
pub fn verify(
    net: &Network,
    inputs: &InputQueue,
    plans: &[ParallelPlan],
) -> Result<VerifyOutcome, SimError> {
    verify_mutated(net, inputs, plans, None)
}

/// Mutator passed to [`verify_mutated`]: receives the plan index and that
/// plan's events before comparison.
pub type EventMutator<'a> = &'a dyn Fn(usize, &mut Vec<SpikeEvent>);

/// Fault-injection hook for [`verify`]: the mutator sees each plan's
/// events before comparison. A correct system can never produce a FAIL
/// verdict, so this is how the FAIL path stays reachable end to end.
pub fn verify_mutated(
    net: &Network,
    inputs: &InputQueue,
    plans: &[ParallelPlan],
    mutate: Option<EventMutator>,
) -> Result<VerifyOutcome, SimError> {
    let (reference, _) = run_serial(net, inputs.clone())?;
    let reference_bytes = render_outputs(&reference);
    let mut verdicts = Vec::with_capacity(plans.len());
    for (i, plan) in plans.iter().enumerate() {
        let (mut events, _) = run_parallel(net, inputs.clone(), *plan)?;
        if let Some(mutate) = mutate {
            mutate(i, &mut events);
        }
        let pass = render_outputs(&events) == reference_bytes;
        let divergence = if pass {
            None
        } else {
            first_divergence(&reference, &events)
        };
        verdicts.push(PlanVerdict {
            plan: *plan,
            pass,
            divergence,
        });
    }
    Ok(VerifyOutcome {
        serial_events: reference.len(),
        verdicts,
    })
}

/// Median of the recorded wall times. Repetition counts are small, so
/// sorting a copy is fine; even lengths average the middle pair.
fn median(samples: &[Duration]) -> Duration {
    assert!(!samples.is_empty());
    let mut s = samples.to_vec();
    s.sort_unstable();
    let mid = s.len() / 2;
    if s.len() % 2 == 1 {
        s[mid]
    } else {
        (s[mid - 1] + s[mid]) / 2
    }
}

#[derive(Debug, Clone)]
pub struct SweepRow {
    pub plan: ParallelPlan,
    pub median: Duration,
    /// Reference median over this plan's median.
    pub speedup: f64,
    pub report: RunReport,
}

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub repetitions: usize,
    pub serial_median: Duration,
    pub serial_report: RunReport,
    pub rows: Vec<SweepRow>,
}

/// Time the reference engine and each plan `repetitions` times each and
/// compare medians. Every run's outputs are checked against the reference
/// so a sweep can never time a wrong answer.
pub fn sweep(
    net: &Network,
    inputs: &InputQueue,
    plans: &[ParallelPlan],
    repetitions: usize,
) -> Result<SweepOutcome, SimError> {
    assert!(repetitions >= 1);
    let mut serial_times = Vec::with_capacity(repetitions);
    let mut reference: Option<(Vec<SpikeEvent>, RunReport)> = None;
    for _ in 0..repetitions {
        let started = Instant::now();
        let out = run_serial(net, inputs.clone())?;
        serial_times.push(started.elapsed());
        reference.get_or_insert(out);
    }
    let (reference_events, serial_report) = reference.expect("repetitions >= 1");
    let serial_median = median(&serial_times);

    let mut rows = Vec::with_capacity(plans.len());
    for plan in plans {
        let mut times = Vec::with_capacity(repetitions);
        let mut report = None;
        for _ in 0..repetitions {
            let started = Instant::now();
            let (events, rep) = run_parallel(net, inputs.clone(), *plan)?;
            times.push(started.elapsed());
            assert_eq!(
                events,
                reference_events,
                "plan {} diverged from the reference during a sweep",
                plan.describe()
            );
            report.get_or_insert(rep);
        }
        let plan_median = median(&times);
        let speedup =
            serial_median.as_secs_f64() / plan_median.as_secs_f64().max(f64::MIN_POSITIVE);
        rows.push(SweepRow {
            plan: *plan,
            median: plan_median,
            speedup,
            report: report.expect("repetitions >= 1"),
        });
    }
    Ok(SweepOutcome {
        repetitions,
        serial_median,
        serial_report,
        rows,
    })
}
