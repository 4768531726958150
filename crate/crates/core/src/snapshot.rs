//! Canonical full-state capture for cross-engine comparison.
//!
//! Scheduler rows are recorded relative to the current ring position
//! (offset 0 = the row consumed this tick), so two engines compare equal
//! whenever their observable behaviour is equal, regardless of how each
//! stores its ring.

use crate::neuron::SpikeEvent;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateSnapshot {
    /// Ticks fully executed so far.
    pub tick: u32,
    /// Potentials in [core][neuron] order, cores row-major.
    pub potentials: Vec<i64>,
    /// Scheduler words per core, rows by offset from current: the slice is
    /// [core][offset][word] flattened, offset 0 first.
    pub sched_words: Vec<u64>,
    /// Output-bus events accumulated so far, canonical order.
    pub outputs: Vec<SpikeEvent>,
}

impl StateSnapshot {
    /// Human description of the first field where the two snapshots differ.
    pub fn first_difference(&self, other: &Self) -> Option<String> {
        if self.tick != other.tick {
            return Some(format!("tick counter: {} vs {}", self.tick, other.tick));
        }
        if let Some(i) = (0..self.potentials.len().max(other.potentials.len()))
            .find(|&i| self.potentials.get(i) != other.potentials.get(i))
        {
            return Some(format!(
                "potential slot {}: {:?} vs {:?}",
                i,
                self.potentials.get(i),
                other.potentials.get(i)
            ));
        }
        if let Some(i) = (0..self.sched_words.len().max(other.sched_words.len()))
            .find(|&i| self.sched_words.get(i) != other.sched_words.get(i))
        {
            return Some(format!(
                "scheduler word {}: {:?} vs {:?}",
                i,
                self.sched_words.get(i).map(|w| format!("{w:#x}")),
                other.sched_words.get(i).map(|w| format!("{w:#x}"))
            ));
        }
        if let Some(i) = (0..self.outputs.len().max(other.outputs.len()))
            .find(|&i| self.outputs.get(i) != other.outputs.get(i))
        {
            return Some(format!(
                "output event {}: {:?} vs {:?}",
                i,
                self.outputs.get(i),
                other.outputs.get(i)
            ));
        }
        None
    }
}
