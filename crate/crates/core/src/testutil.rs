//! Hand-built miniature networks shared by unit tests. No randomness here:
//! every pattern is a fixed arithmetic function of the coordinates so test
//! failures reproduce exactly.

use crate::bits::BitRow;
use crate::config::{CoreCoord, GridConfig};
use crate::inputs::{InputQueue, InputSpike};
use crate::network::{CoreConfig, Network};
use crate::neuron::{AxonTypes, CsramEntry};

/// 1x2 grid: core (0,0) forwards into core (1,0) axon 0, whose neuron is an
/// output. Unit weights, threshold 1.
pub(crate) fn relay_net(ticks: u32) -> Network {
    let cfg = GridConfig {
        grid_width: 2,
        grid_height: 1,
        axons_per_core: 2,
        neurons_per_core: 1,
        num_weights_per_neuron: 4,
        max_tick_offset: 2,
        potential_bits: 16,
        weight_bits: 8,
        leak_bits: 8,
        threshold_bits: 16,
        reset_bits: 16,
        num_ticks: ticks,
    };
    let entry = |output: bool, dx: i32| CsramEntry {
        potential: 0,
        weights: vec![1, 0, 0, 0],
        connections: BitRow::from_bools(&[true, false]),
        threshold: 1,
        reset_potential: 0,
        leak: 0,
        dest_core_dx: dx,
        dest_core_dy: 0,
        dest_axon: 0,
        dest_tick_offset: 1,
        output_flag: output,
    };
    let cores = vec![
        CoreConfig {
            coord: CoreCoord::new(0, 0),
            axon_types: AxonTypes::new(vec![0, 1]),
            neurons: vec![entry(false, 1)],
        },
        CoreConfig {
            coord: CoreCoord::new(1, 0),
            axon_types: AxonTypes::new(vec![0, 1]),
            neurons: vec![entry(true, 0)],
        },
    ];
    Network::new(cfg, cores).unwrap()
}

/// A busy little grid: 70 axons (two connection words), five neurons per
/// core, mixed weights, leaks, thresholds, destinations and offsets.
pub(crate) fn noisy_net(width: u32, height: u32, ticks: u32) -> Network {
    let cfg = GridConfig {
        grid_width: width,
        grid_height: height,
        axons_per_core: 70,
        neurons_per_core: 5,
        num_weights_per_neuron: 4,
        max_tick_offset: 3,
        potential_bits: 16,
        weight_bits: 8,
        leak_bits: 8,
        threshold_bits: 16,
        reset_bits: 16,
        num_ticks: ticks,
    };
    let cores = cfg
        .cores()
        .map(|coord| {
            let (x, y) = (coord.x as usize, coord.y as usize);
            let neurons = (0..5usize)
                .map(|n| {
                    let threshold = 2 + ((n + x) % 5) as i64;
                    let output = (n + x + y) % 4 == 0;
                    let dest = CoreCoord::new(
                        ((x + n) % width as usize) as u32,
                        ((y + 2 * n + 1) % height as usize) as u32,
                    );
                    CsramEntry {
                        potential: n as i64 % threshold,
                        weights: vec![1 + n as i64, -1 - (n % 2) as i64, 2, -3],
                        connections: BitRow::from_bools(
                            &(0..70)
                                .map(|a| (a + n + x + y) % 3 == 0)
                                .collect::<Vec<_>>(),
                        ),
                        threshold,
                        reset_potential: (n % 2) as i64,
                        leak: -((n % 3) as i64),
                        dest_core_dx: dest.x as i32 - x as i32,
                        dest_core_dy: dest.y as i32 - y as i32,
                        dest_axon: ((n * 13 + x) % 70) as u32,
                        dest_tick_offset: 1 + ((n + y) % 2) as u32,
                        output_flag: output,
                    }
                })
                .collect();
            CoreConfig {
                coord,
                axon_types: AxonTypes::new((0..70).map(|a| a % 4).collect()),
                neurons,
            }
        })
        .collect();
    Network::new(cfg, cores).unwrap()
}

/// Deterministic sprinkle of input spikes over the first few ticks.
pub(crate) fn sprinkle_inputs(net: &Network) -> InputQueue {
    let cfg = net.config();
    let mut arrivals = Vec::new();
    for tick in 1..cfg.num_ticks.min(6) {
        for k in 0..3u32 {
            let core = cfg.core_at(((tick + k) as usize * 5 + k as usize) % cfg.num_cores());
            arrivals.push(InputSpike {
                arrival_tick: tick,
                core,
                axon: (tick * 7 + k * 11) % cfg.axons_per_core,
            });
        }
    }
    InputQueue::from_arrivals(cfg, &arrivals).unwrap()
}
