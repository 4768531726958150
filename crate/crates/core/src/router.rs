//! Mesh routing of spike packets between cores.
//!
//! The hop-by-hop walker models the hardware mesh: dimension-ordered, the
//! X offset is consumed before the Y offset, one core per hop. The direct
//! form collapses the walk into a single vector add. Both must agree on the
//! destination and on whether the route leaves the grid; the walk is what
//! the serial engine uses, the add is what the parallel engine uses.

use crate::config::{CoreCoord, GridConfig};
use crate::error::SimError;
use crate::network::Network;
use crate::neuron::{make_packet, Packet, SpikeEvent};
use crate::scheduler::SchedulerSram;

/// A packet resolved to its destination core and scheduler slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RoutedDelivery {
    pub core: CoreCoord,
    pub axon: u32,
    pub tick_offset: u32,
    /// Mesh links traversed: |dx| + |dy| on the hop path, 0 on the direct
    /// path (delivery happens in a single step).
    pub hops: u32,
}

/// Longest possible route on the grid: corner to corner.
pub fn max_hops(cfg: &GridConfig) -> u32 {
    cfg.grid_width + cfg.grid_height - 2
}

fn off_grid(src: CoreCoord, packet: &Packet, cfg: &GridConfig) -> SimError {
    SimError::RouteOffGrid {
        src,
        dx: packet.dx,
        dy: packet.dy,
        width: cfg.grid_width,
        height: cfg.grid_height,
    }
}

/// Walk the packet one mesh link at a time, X first, checking grid bounds
/// at every hop.
pub fn route_hop_by_hop(
    src: CoreCoord,
    packet: &Packet,
    cfg: &GridConfig,
) -> Result<RoutedDelivery, SimError> {
    let mut pos = src;
    let mut hops = 0u32;
    let mut dx = packet.dx;
    let mut dy = packet.dy;
    while dx != 0 {
        let step = dx.signum();
        pos = pos
            .offset_within(step, 0, cfg)
            .ok_or_else(|| off_grid(src, packet, cfg))?;
        dx -= step;
        hops += 1;
    }
    while dy != 0 {
        let step = dy.signum();
        pos = pos
            .offset_within(0, step, cfg)
            .ok_or_else(|| off_grid(src, packet, cfg))?;
        dy -= step;
        hops += 1;
    }
    Ok(RoutedDelivery {
        core: pos,
        axon: packet.dest_axon,
        tick_offset: packet.dest_tick_offset,
        hops,
    })
}

/// Resolve the packet's destination with one bounds-checked vector add.
pub fn route_direct(
    src: CoreCoord,
    packet: &Packet,
    cfg: &GridConfig,
) -> Result<RoutedDelivery, SimError> {
    let core = src
        .offset_within(packet.dx, packet.dy, cfg)
        .ok_or_else(|| off_grid(src, packet, cfg))?;
    Ok(RoutedDelivery {
        core,
        axon: packet.dest_axon,
        tick_offset: packet.dest_tick_offset,
        hops: 0,
    })
}

/// Which routing path resolves packet destinations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RoutePath {
    HopByHop,
    Direct,
}

/// Drain one tick's spiking neurons: output-flagged spikes become
/// [`SpikeEvent`]s, everything else is routed and staged in the destination
/// core's scheduler. `spiking` must be in canonical (core_y, core_x, neuron)
/// order; the returned events preserve it.
pub fn dispatch_spikes(
    spiking: &[(CoreCoord, u32)],
    net: &Network,
    scheds: &mut [SchedulerSram],
    tick: u32,
    path: RoutePath,
) -> Result<Vec<SpikeEvent>, SimError> {
    let cfg = net.config();
    let mut events = Vec::new();
    for &(coord, neuron) in spiking {
        let entry = &net.core(coord).neurons[neuron as usize];
        if entry.output_flag {
            events.push(SpikeEvent {
                tick,
                core_x: coord.x,
                core_y: coord.y,
                neuron,
            });
            continue;
        }
        let pkt = make_packet(entry)?;
        let delivery = match path {
            RoutePath::HopByHop => route_hop_by_hop(coord, &pkt, cfg)?,
            RoutePath::Direct => route_direct(coord, &pkt, cfg)?,
        };
        scheds[cfg.core_index(delivery.core)].deliver(delivery.axon, delivery.tick_offset)?;
    }
    debug_assert!(events
        .windows(2)
        .all(|w| w[0].sort_key() <= w[1].sort_key()));
    Ok(events)
}
