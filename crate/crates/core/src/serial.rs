//! Single-threaded reference engine.
//!
//! Every tick runs four strictly ordered steps: advance all schedulers,
//! deliver this tick's input packets, evaluate all neurons (cores row-major,
//! neurons ascending), then dispatch spikes hop by hop through the mesh.
//! This engine optimizes for being obviously correct; the parallel engine is
//! checked against it bit for bit.

use std::time::Instant;

use crate::config::CoreCoord;
use crate::error::SimError;
use crate::inputs::InputQueue;
use crate::network::Network;
use crate::neuron::{apply_leak_threshold_reset, synaptic_sum, SpikeEvent};
use crate::report::{PhaseTimes, RunReport};
use crate::router::{dispatch_spikes, RoutePath};
use crate::scheduler::SchedulerSram;
use crate::snapshot::StateSnapshot;

pub struct SimulationState<'net> {
    net: &'net Network,
    inputs: InputQueue,
    /// Live membrane potentials, [core][neuron]; the network's stored
    /// potentials are only the tick-0 initial values.
    potentials: Vec<i64>,
    scheds: Vec<SchedulerSram>,
    outputs: Vec<SpikeEvent>,
    tick: u32,
    phases: PhaseTimes,
}

impl<'net> SimulationState<'net> {
    pub fn new(net: &'net Network, inputs: InputQueue) -> Self {
        let cfg = net.config();
        let potentials = net
            .cores()
            .iter()
            .flat_map(|core| core.neurons.iter().map(|n| n.potential))
            .collect();
        let scheds = (0..cfg.num_cores())
            .map(|_| SchedulerSram::new(cfg.max_tick_offset, cfg.axons_per_core))
            .collect();
        Self {
            net,
            inputs,
            potentials,
            scheds,
            outputs: Vec::new(),
            tick: 0,
            phases: PhaseTimes::default(),
        }
    }

    pub fn tick(&self) -> u32 {
        self.tick
    }

    pub fn outputs(&self) -> &[SpikeEvent] {
        &self.outputs
    }

    /// Execute one full tick. Caller must not step past the configured
    /// number of ticks.
    pub fn run_tick(&mut self) -> Result<(), SimError> {
        let cfg = self.net.config();
        assert!(
            self.tick < cfg.num_ticks,
            "stepping past the configured tick count"
        );
        let tick = self.tick;

        let t0 = Instant::now();
        for sched in &mut self.scheds {
            sched.clear_current_and_advance();
        }

        let t1 = Instant::now();
        for pkt in self.inputs.packets_at(tick) {
            self.scheds[cfg.core_index(pkt.core)]
                .deliver(pkt.axon, pkt.tick_offset)
                .map_err(|e| e.at_tick(tick))?;
        }

        let t2 = Instant::now();
        let npc = cfg.neurons_per_core as usize;
        let mut spiking: Vec<(CoreCoord, u32)> = Vec::new();
        for (ci, core) in self.net.cores().iter().enumerate() {
            let spikes = self.scheds[ci].current_row();
            for (ni, entry) in core.neurons.iter().enumerate() {
                let acc = self.potentials[ci * npc + ni] as i128
                    + synaptic_sum(
                        entry.connections.words(),
                        spikes.words(),
                        &core.axon_types.types,
                        &entry.weights,
                    );
                let (potential, fired) = apply_leak_threshold_reset(
                    acc,
                    entry.leak,
                    entry.threshold,
                    entry.reset_potential,
                    cfg.potential_bits,
                );
                self.potentials[ci * npc + ni] = potential;
                if fired {
                    spiking.push((core.coord, ni as u32));
                }
            }
        }

        let t3 = Instant::now();
        let events = dispatch_spikes(
            &spiking,
            self.net,
            &mut self.scheds,
            tick,
            RoutePath::HopByHop,
        )
        .map_err(|e| e.at_tick(tick))?;
        self.outputs.extend(events);
        let t4 = Instant::now();

        self.phases.scheduler += t1 - t0;
        self.phases.router += (t2 - t1) + (t4 - t3);
        self.phases.neuron += t3 - t2;
        self.tick += 1;
        Ok(())
    }

    /// Run all remaining ticks and finish, returning the sorted output
    /// events plus timing.
    pub fn run(mut self) -> Result<(Vec<SpikeEvent>, RunReport), SimError> {
        let start = Instant::now();
        while self.tick < self.net.config().num_ticks {
            self.run_tick()?;
        }
        // Per-tick dispatch already appends in canonical order; the sort is
        // a cheap guarantee, not a reordering.
        debug_assert!(self
            .outputs
            .windows(2)
            .all(|w| w[0].sort_key() <= w[1].sort_key()));
        self.outputs.sort_unstable_by_key(SpikeEvent::sort_key);
        let report = RunReport {
            engine: "serial".into(),
            ticks: self.tick,
            output_spikes: self.outputs.len(),
            total: start.elapsed(),
            phases: self.phases,
        };
        Ok((self.outputs, report))
    }

    /// Full-state capture for oracle comparison.
    pub fn snapshot(&self) -> StateSnapshot {
        let cfg = self.net.config();
        let mut sched_words = Vec::new();
        for sched in &self.scheds {
            for offset in 0..cfg.max_tick_offset {
                sched_words.extend_from_slice(sched.row_at_offset(offset).words());
            }
        }
        StateSnapshot {
            tick: self.tick,
            potentials: self.potentials.clone(),
            sched_words,
            outputs: self.outputs.clone(),
        }
    }
}

/// Convenience wrapper: fresh state, full run.
pub fn run_serial(
    net: &Network,
    inputs: InputQueue,
) -> Result<(Vec<SpikeEvent>, RunReport), SimError> {
    SimulationState::new(net, inputs).run()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::BitRow;
    use crate::config::GridConfig;
    use crate::inputs::InputSpike;
    use crate::network::CoreConfig;
    use crate::neuron::{AxonTypes, CsramEntry};

    fn base_cfg(width: u32, height: u32, ticks: u32) -> GridConfig {
        GridConfig {
            grid_width: width,
            grid_height: height,
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
        }
    }

    fn unit_entry(output: bool, dx: i32) -> CsramEntry {
        CsramEntry {
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
        }
    }

    fn net_1x1(ticks: u32) -> Network {
        let cfg = base_cfg(1, 1, ticks);
        let cores = vec![CoreConfig {
            coord: CoreCoord::new(0, 0),
            axon_types: AxonTypes::new(vec![0, 1]),
            neurons: vec![unit_entry(true, 0)],
        }];
        Network::new(cfg, cores).unwrap()
    }

    /// Core 0 forwards into core 1's axon 0; core 1's neuron is an output.
    fn net_1x2_relay(ticks: u32) -> Network {
        let cfg = base_cfg(2, 1, ticks);
        let cores = vec![
            CoreConfig {
                coord: CoreCoord::new(0, 0),
                axon_types: AxonTypes::new(vec![0, 1]),
                neurons: vec![unit_entry(false, 1)],
            },
            CoreConfig {
                coord: CoreCoord::new(1, 0),
                axon_types: AxonTypes::new(vec![0, 1]),
                neurons: vec![unit_entry(true, 0)],
            },
        ];
        Network::new(cfg, cores).unwrap()
    }

    #[test]
    fn zero_ticks_produce_no_output() {
        let net = net_1x1(0);
        let (events, report) = run_serial(&net, InputQueue::new(0)).unwrap();
        assert!(events.is_empty());
        assert_eq!(report.ticks, 0);
    }

    #[test]
    fn quiet_network_stays_quiet() {
        let net = net_1x2_relay(8);
        let (events, _) = run_serial(&net, InputQueue::new(8)).unwrap();
        assert!(events.is_empty());
    }

    #[test]
    fn single_input_spike_is_seen_at_its_arrival_tick() {
        // Arrival at tick 1 drives the only neuron over threshold at tick 1.
        let net = net_1x1(3);
        let spike = InputSpike {
            arrival_tick: 1,
            core: CoreCoord::new(0, 0),
            axon: 0,
        };
        let queue = InputQueue::from_arrivals(net.config(), &[spike]).unwrap();
        let (events, _) = run_serial(&net, queue).unwrap();
        assert_eq!(
            events,
            [SpikeEvent {
                tick: 1,
                core_x: 0,
                core_y: 0,
                neuron: 0
            }]
        );
    }

    #[test]
    fn relay_adds_one_tick_of_mesh_latency() {
        // Stimulate core 0 so it fires at tick 1; its spike crosses the mesh
        // and core 1 fires at tick 2.
        let net = net_1x2_relay(4);
        let spike = InputSpike {
            arrival_tick: 1,
            core: CoreCoord::new(0, 0),
            axon: 0,
        };
        let queue = InputQueue::from_arrivals(net.config(), &[spike]).unwrap();
        let (events, _) = run_serial(&net, queue).unwrap();
        assert_eq!(
            events,
            [SpikeEvent {
                tick: 2,
                core_x: 1,
                core_y: 0,
                neuron: 0
            }]
        );
    }

    #[test]
    fn leak_accumulates_and_saturates_without_input() {
        let mut net = net_1x1(40);
        // Rebuild with a leaky, never-firing neuron. potential_bits=16.
        let cfg = *net.config();
        let mut entry = unit_entry(true, 0);
        entry.leak = -100;
        entry.threshold = 1000;
        net = Network::new(
            cfg,
            vec![CoreConfig {
                coord: CoreCoord::new(0, 0),
                axon_types: AxonTypes::new(vec![0, 1]),
                neurons: vec![entry],
            }],
        )
        .unwrap();
        let mut state = SimulationState::new(&net, InputQueue::new(40));
        for _ in 0..40 {
            state.run_tick().unwrap();
        }
        // 40 ticks at -100/tick would be -4000; the 16-bit floor is -32768,
        // not reached yet, so the exact value must match.
        assert_eq!(state.snapshot().potentials, [-4000]);
        assert!(state.outputs().is_empty());
    }

    #[test]
    fn repeated_runs_are_identical() {
        let net = net_1x2_relay(6);
        let spikes = [
            InputSpike {
                arrival_tick: 1,
                core: CoreCoord::new(0, 0),
                axon: 0,
            },
            InputSpike {
                arrival_tick: 3,
                core: CoreCoord::new(0, 0),
                axon: 0,
            },
        ];
        let queue = InputQueue::from_arrivals(net.config(), &spikes).unwrap();
        let (a, _) = run_serial(&net, queue.clone()).unwrap();
        let (b, _) = run_serial(&net, queue).unwrap();
        assert_eq!(a, b);
    }
}
