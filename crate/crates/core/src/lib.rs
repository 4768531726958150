//! Tick-accurate simulator for a 2D grid of neuromorphic cores.
//!
//! Each core owns a set of input axons, a synaptic crossbar, leaky
//! integrate-and-fire neurons, and a slot in a 2D mesh. Spikes travel as
//! packets between cores and land in per-core ring-buffer schedulers a
//! configurable number of ticks in the future; output-flagged neurons emit
//! externally visible events instead.
//!
//! Two engines share all datapath math: [`serial`] is the obvious,
//! single-threaded reference; [`parallel`] runs flattened state on a worker
//! pool and is guaranteed (and heavily tested) to produce bit-identical
//! output under every strategy, worker count, and chunk size, because all
//! accumulation is wide with a single saturation at store time and all
//! concurrent writes are commutative idempotent bit-sets.

pub mod bits;
pub mod config;
pub mod error;
mod flat;
pub mod harness;
pub mod inputs;
pub mod io;
pub mod network;
pub mod neuron;
pub mod parallel;
pub mod report;
pub mod router;
pub mod scheduler;
pub mod serial;
pub mod snapshot;
pub mod workload;

#[cfg(test)]
pub(crate) mod testutil;

pub use bits::BitRow;
pub use config::{ConfigError, CoreCoord, GridConfig};
pub use error::SimError;
pub use harness::{Divergence, PlanVerdict, SweepOutcome, SweepRow, VerifyOutcome};
pub use inputs::{InputPacket, InputQueue, InputSpike};
pub use io::LoadError;
pub use network::{CoreConfig, Network, NetworkError};
pub use neuron::{AxonTypes, CsramEntry, Packet, SpikeEvent};
pub use parallel::{run_parallel, ParallelEngine, ParallelPlan, Strategy};
pub use report::{PhaseTimes, RunReport};
pub use router::{RoutePath, RoutedDelivery};
pub use scheduler::SchedulerSram;
pub use serial::{run_serial, SimulationState};
pub use snapshot::StateSnapshot;
pub use workload::{generate, DetRng, WorkloadParams};
