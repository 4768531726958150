//! Simulation-time errors shared by the scheduler, router, and engines.

use thiserror::Error;

use crate::config::CoreCoord;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SimError {
    #[error("packet from core {src} with offset ({dx},{dy}) leaves the {width}x{height} grid")]
    RouteOffGrid {
        src: CoreCoord,
        dx: i32,
        dy: i32,
        width: u32,
        height: u32,
    },

    #[error("tick offset {offset} outside 1..={max}")]
    TickOffsetOutOfRange { offset: u32, max: u32 },

    #[error("axon {axon} outside 0..{axons_per_core}")]
    AxonOutOfRange { axon: u32, axons_per_core: u32 },

    #[error("core {core} outside {width}x{height} grid")]
    CoreOutOfRange {
        core: CoreCoord,
        width: u32,
        height: u32,
    },

    #[error("output-flagged spike cannot be packetized for the mesh")]
    OutputSpikeNotRoutable,

    #[error("arrival tick {tick} outside 1..{num_ticks}")]
    ArrivalTickOutOfRange { tick: u32, num_ticks: u32 },

    #[error("tick {tick}: {source}")]
    AtTick {
        tick: u32,
        #[source]
        source: Box<SimError>,
    },
}

impl SimError {
    pub fn at_tick(self, tick: u32) -> SimError {
        SimError::AtTick {
            tick,
            source: Box::new(self),
        }
    }
}
