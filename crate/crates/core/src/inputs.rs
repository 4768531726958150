//! External spike injection.
//!
//! Users specify the tick at which a spike should ARRIVE (be visible to the
//! neuron phase). Internally every arrival is staged as an offset-1 scheduler
//! delivery performed during the previous tick, so external spikes obey the
//! same offset >= 1 rule as routed spikes. Arrival at tick 0 is therefore
//! unrepresentable.

use crate::config::{CoreCoord, GridConfig};
use crate::error::SimError;

/// One record of an input stream: arrival semantics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct InputSpike {
    pub arrival_tick: u32,
    pub core: CoreCoord,
    pub axon: u32,
}

/// A delivery the engine performs at a specific tick.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InputPacket {
    pub core: CoreCoord,
    pub axon: u32,
    pub tick_offset: u32,
}

/// Input packets bucketed by the tick at which the engine delivers them.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct InputQueue {
    by_tick: Vec<Vec<InputPacket>>,
}

impl InputQueue {
    pub fn new(num_ticks: u32) -> Self {
        Self {
            by_tick: vec![Vec::new(); num_ticks as usize],
        }
    }

    /// Validate an arrival record and stage it one tick earlier at offset 1.
    pub fn stage_arrival(&mut self, spike: InputSpike, cfg: &GridConfig) -> Result<(), SimError> {
        if spike.arrival_tick == 0 || spike.arrival_tick as usize >= self.by_tick.len() {
            return Err(SimError::ArrivalTickOutOfRange {
                tick: spike.arrival_tick,
                num_ticks: self.by_tick.len() as u32,
            });
        }
        if !cfg.contains(spike.core) {
            return Err(SimError::CoreOutOfRange {
                core: spike.core,
                width: cfg.grid_width,
                height: cfg.grid_height,
            });
        }
        if spike.axon >= cfg.axons_per_core {
            return Err(SimError::AxonOutOfRange {
                axon: spike.axon,
                axons_per_core: cfg.axons_per_core,
            });
        }
        self.by_tick[(spike.arrival_tick - 1) as usize].push(InputPacket {
            core: spike.core,
            axon: spike.axon,
            tick_offset: 1,
        });
        Ok(())
    }

    pub fn from_arrivals(cfg: &GridConfig, arrivals: &[InputSpike]) -> Result<Self, SimError> {
        let mut queue = Self::new(cfg.num_ticks);
        for &spike in arrivals {
            queue.stage_arrival(spike, cfg)?;
        }
        Ok(queue)
    }

    /// Packets the engine must deliver during `tick`, right after the
    /// scheduler advance.
    pub fn packets_at(&self, tick: u32) -> &[InputPacket] {
        static EMPTY: [InputPacket; 0] = [];
        self.by_tick
            .get(tick as usize)
            .map_or(&EMPTY[..], Vec::as_slice)
    }

    pub fn total_packets(&self) -> usize {
        self.by_tick.iter().map(Vec::len).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> GridConfig {
        GridConfig {
            grid_width: 2,
            grid_height: 2,
            axons_per_core: 4,
            neurons_per_core: 1,
            num_weights_per_neuron: 4,
            max_tick_offset: 2,
            potential_bits: 8,
            weight_bits: 8,
            leak_bits: 8,
            threshold_bits: 8,
            reset_bits: 8,
            num_ticks: 4,
        }
    }

    #[test]
    fn arrival_is_staged_one_tick_earlier() {
        let cfg = cfg();
        let spike = InputSpike {
            arrival_tick: 2,
            core: CoreCoord::new(1, 0),
            axon: 3,
        };
        let queue = InputQueue::from_arrivals(&cfg, &[spike]).unwrap();
        assert!(queue.packets_at(0).is_empty());
        assert_eq!(
            queue.packets_at(1),
            [InputPacket {
                core: CoreCoord::new(1, 0),
                axon: 3,
                tick_offset: 1
            }]
        );
        assert!(queue.packets_at(2).is_empty());
        assert_eq!(queue.total_packets(), 1);
    }

    #[test]
    fn out_of_range_arrivals_are_rejected() {
        let cfg = cfg();
        let mut queue = InputQueue::new(cfg.num_ticks);
        let at = |tick| InputSpike {
            arrival_tick: tick,
            core: CoreCoord::new(0, 0),
            axon: 0,
        };
        assert!(matches!(
            queue.stage_arrival(at(0), &cfg),
            Err(SimError::ArrivalTickOutOfRange {
                tick: 0,
                num_ticks: 4
            })
        ));
        assert!(matches!(
            queue.stage_arrival(at(4), &cfg),
            Err(SimError::ArrivalTickOutOfRange {
                tick: 4,
                num_ticks: 4
            })
        ));
        let bad_core = InputSpike {
            arrival_tick: 1,
            core: CoreCoord::new(2, 0),
            axon: 0,
        };
        assert!(matches!(
            queue.stage_arrival(bad_core, &cfg),
            Err(SimError::CoreOutOfRange { .. })
        ));
        let bad_axon = InputSpike {
            arrival_tick: 1,
            core: CoreCoord::new(0, 0),
            axon: 4,
        };
        assert!(matches!(
            queue.stage_arrival(bad_axon, &cfg),
            Err(SimError::AxonOutOfRange { .. })
        ));
        assert_eq!(queue.total_packets(), 0);
    }
}
