//! Wall-time accounting for simulation runs.

use std::time::Duration;

/// Accumulated time per engine phase. Input delivery and spike dispatch both
/// count as router time; the remainder of a run (setup, output sorting) is
/// deliberately unattributed, so the three phases sum to <= total.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PhaseTimes {
    pub scheduler: Duration,
    pub router: Duration,
    pub neuron: Duration,
}

impl PhaseTimes {
    pub fn profiled_total(&self) -> Duration {
        self.scheduler + self.router + self.neuron
    }
}

/// Summary of one engine run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    /// Engine and plan descriptor, e.g. "serial" or
    /// "parallel/grid-level workers=4 chunk=64".
    pub engine: String,
    pub ticks: u32,
    pub output_spikes: usize,
    pub total: Duration,
    pub phases: PhaseTimes,
}

impl RunReport {
    pub fn phase_percent(&self, phase: Duration) -> f64 {
        let total = self.total.as_secs_f64();
        if total == 0.0 {
            return 0.0;
        }
        100.0 * phase.as_secs_f64() / total
    }

    pub fn neuron_percent(&self) -> f64 {
        self.phase_percent(self.phases.neuron)
    }

    /// Multi-line human summary; one line per phase with its share of the
    /// total wall time.
    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("engine    {}\n", self.engine));
        out.push_str(&format!("ticks     {}\n", self.ticks));
        out.push_str(&format!("spikes    {}\n", self.output_spikes));
        out.push_str(&format!(
            "total     {:.3} ms\n",
            self.total.as_secs_f64() * 1e3
        ));
        for (name, d) in [
            ("scheduler", self.phases.scheduler),
            ("router", self.phases.router),
            ("neuron", self.phases.neuron),
        ] {
            out.push_str(&format!(
                "  {:<9} {:>10.3} ms  {:>5.1}%\n",
                name,
                d.as_secs_f64() * 1e3,
                self.phase_percent(d),
            ));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn percentages_are_shares_of_total() {
        let report = RunReport {
            engine: "serial".into(),
            ticks: 10,
            output_spikes: 3,
            total: Duration::from_millis(100),
            phases: PhaseTimes {
                scheduler: Duration::from_millis(5),
                router: Duration::from_millis(15),
                neuron: Duration::from_millis(70),
            },
        };
        assert!((report.neuron_percent() - 70.0).abs() < 1e-9);
        let sum = report.phase_percent(report.phases.scheduler)
            + report.phase_percent(report.phases.router)
            + report.neuron_percent();
        assert!(sum <= 100.0);
        assert!(report.render().contains("neuron"));
    }
}
