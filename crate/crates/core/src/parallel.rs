//! Data-parallel engine.
//!
//! A tick is the same four steps as the serial engine with a full barrier
//! between them; within a step, work items are either write-disjoint (each
//! task owns its slice of potentials) or commutative idempotent bit-sets
//! (scheduler and spike-flag words). Accumulation is wide with a single
//! saturation at store time, so no interleaving of tasks can change the
//! result: outputs are bit-identical to the serial engine under every plan.

use std::str::FromStr;
use std::sync::atomic::{AtomicU64, AtomicU8, Ordering};
use std::time::Instant;

use rayon::prelude::*;

use crate::error::SimError;
use crate::flat::{FlatState, PHASE_IDLE, PHASE_NEURON, PHASE_ROUTER, PHASE_SCHEDULER};
use crate::inputs::InputQueue;
use crate::network::Network;
use crate::neuron::{
    apply_leak_threshold_reset, synaptic_sum, synaptic_sum_tree, Packet, SpikeEvent,
};
use crate::report::{PhaseTimes, RunReport};
use crate::router::route_direct;
use crate::snapshot::StateSnapshot;

/// Granularity at which the neuron phase is split into parallel work.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strategy {
    /// Neurons within one core in parallel, cores sequential.
    CoreLevel,
    /// One work item per (core, neuron) across the whole grid.
    GridLevel,
    /// Grid-wide neuron items, each summing its axon terms through a
    /// balanced reduction tree instead of a linear pass.
    SynapseLevel,
}

impl Strategy {
    pub const ALL: [Strategy; 3] = [
        Strategy::CoreLevel,
        Strategy::GridLevel,
        Strategy::SynapseLevel,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Strategy::CoreLevel => "core-level",
            Strategy::GridLevel => "grid-level",
            Strategy::SynapseLevel => "synapse-level",
        }
    }
}

impl std::fmt::Display for Strategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "core-level" => Ok(Strategy::CoreLevel),
            "grid-level" => Ok(Strategy::GridLevel),
            "synapse-level" => Ok(Strategy::SynapseLevel),
            other => Err(format!(
                "unknown strategy '{other}' (expected core-level, grid-level or synapse-level)"
            )),
        }
    }
}

/// How a run is parallelized: strategy, worker threads, and work items per
/// task. `reduce_arity` only affects synapse-level reduction-tree shape and
/// never the numbers it produces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParallelPlan {
    pub strategy: Strategy,
    pub workers: usize,
    pub chunk: usize,
    pub reduce_arity: usize,
}

impl ParallelPlan {
    pub fn new(strategy: Strategy, workers: usize, chunk: usize) -> Self {
        assert!(workers >= 1, "a plan needs at least one worker");
        assert!(chunk >= 1, "a plan needs a chunk size of at least one");
        Self {
            strategy,
            workers,
            chunk,
            reduce_arity: 2,
        }
    }

    pub fn with_arity(mut self, arity: usize) -> Self {
        assert!(arity >= 2, "reduction tree arity must be at least 2");
        self.reduce_arity = arity;
        self
    }

    pub fn describe(&self) -> String {
        format!(
            "parallel/{} workers={} chunk={}",
            self.strategy, self.workers, self.chunk
        )
    }
}

#[derive(Clone, Copy)]
enum SumMode {
    Linear,
    Tree(usize),
}

/// Shared read-only context for one neuron-phase invocation.
struct NeuronCtx<'a> {
    npc: usize,
    apc: usize,
    wpr: usize,
    wpn: usize,
    potential_bits: u32,
    mode: SumMode,
    conn: &'a [u64],
    types: &'a [u32],
    weights: &'a [i64],
    leaks: &'a [i64],
    thresholds: &'a [i64],
    resets: &'a [i64],
    /// Snapshot of every core's current scheduler row, [core][word].
    rows: &'a [u64],
    spike_words: &'a [AtomicU64],
    phase: &'a AtomicU8,
}

impl NeuronCtx<'_> {
    #[inline]
    fn eval(&self, n: usize, potential: &mut i64) {
        debug_assert_eq!(self.phase.load(Ordering::Relaxed), PHASE_NEURON);
        let core = n / self.npc;
        let conn = &self.conn[n * self.wpr..][..self.wpr];
        let row = &self.rows[core * self.wpr..][..self.wpr];
        let types = &self.types[core * self.apc..][..self.apc];
        let weights = &self.weights[n * self.wpn..][..self.wpn];
        let sum = match self.mode {
            SumMode::Linear => synaptic_sum(conn, row, types, weights),
            SumMode::Tree(arity) => synaptic_sum_tree(conn, row, types, weights, arity),
        };
        let (new_potential, fired) = apply_leak_threshold_reset(
            *potential as i128 + sum,
            self.leaks[n],
            self.thresholds[n],
            self.resets[n],
            self.potential_bits,
        );
        *potential = new_potential;
        if fired {
            self.spike_words[n / 64].fetch_or(1u64 << (n % 64), Ordering::Relaxed);
        }
    }
}

struct FlatSim<'net> {
    net: &'net Network,
    plan: ParallelPlan,
    state: FlatState,
    inputs: InputQueue,
    outputs: Vec<SpikeEvent>,
    /// Reused per tick: current-row words, then spiking neuron indices.
    row_snapshot: Vec<u64>,
    spiking: Vec<u32>,
    tick: u32,
    phases: PhaseTimes,
}

impl FlatSim<'_> {
    fn step(&mut self) -> Result<(), SimError> {
        let cfg = *self.net.config();
        assert!(
            self.tick < cfg.num_ticks,
            "stepping past the configured tick count"
        );
        let tick = self.tick;
        let chunk = self.plan.chunk;

        // Scheduler phase: wipe the rows about to fall out of the window,
        // one work item per scheduler word, then advance each core's index.
        let t0 = Instant::now();
        self.state.set_phase(PHASE_SCHEDULER);
        {
            let st = &self.state;
            let wpr = st.wpr;
            (0..st.cores * wpr)
                .into_par_iter()
                .with_min_len(chunk)
                .for_each(|i| {
                    debug_assert_eq!(st.phase.load(Ordering::Relaxed), PHASE_SCHEDULER);
                    let base = st.sched_base(i / wpr, st.curr[i / wpr] as usize);
                    st.sched[base + i % wpr].store(0, Ordering::Relaxed);
                });
        }
        {
            let max = self.state.max_offset as u32;
            self.state.curr.par_chunks_mut(chunk).for_each(|cs| {
                for c in cs {
                    *c = (*c + 1) % max;
                }
            });
        }

        // Input delivery: external packets go straight into their target
        // core's scheduler; counted as router work like any other delivery.
        let t1 = Instant::now();
        self.state.set_phase(PHASE_ROUTER);
        {
            let st = &self.state;
            self.inputs
                .packets_at(tick)
                .par_iter()
                .with_min_len(chunk)
                .try_for_each(|pkt| -> Result<(), SimError> {
                    if pkt.tick_offset == 0 || pkt.tick_offset as usize > st.max_offset {
                        return Err(SimError::TickOffsetOutOfRange {
                            offset: pkt.tick_offset,
                            max: st.max_offset as u32,
                        }
                        .at_tick(tick));
                    }
                    if pkt.axon >= cfg.axons_per_core {
                        return Err(SimError::AxonOutOfRange {
                            axon: pkt.axon,
                            axons_per_core: cfg.axons_per_core,
                        }
                        .at_tick(tick));
                    }
                    st.deliver(cfg.core_index(pkt.core), pkt.axon, pkt.tick_offset);
                    Ok(())
                })?;
        }

        // Neuron phase: snapshot the consumable rows, then evaluate every
        // neuron under the plan's strategy.
        let t2 = Instant::now();
        self.state.set_phase(PHASE_NEURON);
        {
            let st = &self.state;
            self.row_snapshot.clear();
            self.row_snapshot.extend((0..st.cores * st.wpr).map(|i| {
                let base = st.sched_base(i / st.wpr, st.curr[i / st.wpr] as usize);
                st.sched[base + i % st.wpr].load(Ordering::Relaxed)
            }));
            for w in &st.spike_words {
                w.store(0, Ordering::Relaxed);
            }
        }
        {
            let st = &mut self.state;
            let ctx = NeuronCtx {
                npc: st.npc,
                apc: st.apc,
                wpr: st.wpr,
                wpn: st.wpn,
                potential_bits: cfg.potential_bits,
                mode: match self.plan.strategy {
                    Strategy::SynapseLevel => SumMode::Tree(self.plan.reduce_arity),
                    _ => SumMode::Linear,
                },
                conn: &st.conn_words,
                types: &st.axon_types,
                weights: &st.weights,
                leaks: &st.leaks,
                thresholds: &st.thresholds,
                resets: &st.resets,
                rows: &self.row_snapshot,
                spike_words: &st.spike_words,
                phase: &st.phase,
            };
            let npc = st.npc;
            match self.plan.strategy {
                Strategy::CoreLevel => {
                    for core in 0..st.cores {
                        st.potentials[core * npc..(core + 1) * npc]
                            .par_chunks_mut(chunk)
                            .enumerate()
                            .for_each(|(i, slab)| {
                                let start = core * npc + i * chunk;
                                for (j, p) in slab.iter_mut().enumerate() {
                                    ctx.eval(start + j, p);
                                }
                            });
                    }
                }
                Strategy::GridLevel | Strategy::SynapseLevel => {
                    st.potentials
                        .par_chunks_mut(chunk)
                        .enumerate()
                        .for_each(|(i, slab)| {
                            let start = i * chunk;
                            for (j, p) in slab.iter_mut().enumerate() {
                                ctx.eval(start + j, p);
                            }
                        });
                }
            }
        }
        {
            // Collect spikers in ascending neuron order; this fixes the
            // canonical output order regardless of task completion order.
            let st = &self.state;
            self.spiking.clear();
            for (wi, w) in st.spike_words.iter().enumerate() {
                let mut m = w.load(Ordering::Relaxed);
                while m != 0 {
                    self.spiking
                        .push((wi * 64 + m.trailing_zeros() as usize) as u32);
                    m &= m - 1;
                }
            }
        }

        // Router phase: output-bus events in canonical order, then all mesh
        // deliveries concurrently.
        let t3 = Instant::now();
        self.state.set_phase(PHASE_ROUTER);
        {
            let st = &self.state;
            for &n in &self.spiking {
                let d = st.dests[n as usize];
                if d.output {
                    let coord = cfg.core_at(n as usize / st.npc);
                    self.outputs.push(SpikeEvent {
                        tick,
                        core_x: coord.x,
                        core_y: coord.y,
                        neuron: (n as usize % st.npc) as u32,
                    });
                }
            }
            self.spiking.par_iter().with_min_len(chunk).try_for_each(
                |&n| -> Result<(), SimError> {
                    let d = st.dests[n as usize];
                    if d.output {
                        return Ok(());
                    }
                    let src = cfg.core_at(n as usize / st.npc);
                    let pkt = Packet {
                        dx: d.dx,
                        dy: d.dy,
                        dest_axon: d.axon,
                        dest_tick_offset: d.tick_offset,
                    };
                    let delivery = route_direct(src, &pkt, &cfg).map_err(|e| e.at_tick(tick))?;
                    st.deliver(
                        cfg.core_index(delivery.core),
                        delivery.axon,
                        delivery.tick_offset,
                    );
                    Ok(())
                },
            )?;
        }
        let t4 = Instant::now();
        self.state.set_phase(PHASE_IDLE);

        self.phases.scheduler += t1 - t0;
        self.phases.router += (t2 - t1) + (t4 - t3);
        self.phases.neuron += t3 - t2;
        self.tick += 1;
        Ok(())
    }
}

/// Parallel engine instance; owns its worker pool for its whole lifetime,
/// so stepping and full runs execute on the same threads.
pub struct ParallelEngine<'net> {
    pool: rayon::ThreadPool,
    sim: FlatSim<'net>,
}

impl<'net> ParallelEngine<'net> {
    pub fn new(net: &'net Network, inputs: InputQueue, plan: ParallelPlan) -> Self {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(plan.workers)
            .build()
            .expect("failed to build worker pool");
        let state = FlatState::from_network(net);
        let row_snapshot = Vec::with_capacity(state.cores * state.wpr);
        Self {
            pool,
            sim: FlatSim {
                net,
                plan,
                state,
                inputs,
                outputs: Vec::new(),
                row_snapshot,
                spiking: Vec::new(),
                tick: 0,
                phases: PhaseTimes::default(),
            },
        }
    }

    pub fn tick(&self) -> u32 {
        self.sim.tick
    }

    pub fn outputs(&self) -> &[SpikeEvent] {
        &self.sim.outputs
    }

    pub fn plan(&self) -> ParallelPlan {
        self.sim.plan
    }

    /// Execute one full tick on the worker pool.
    pub fn step(&mut self) -> Result<(), SimError> {
        let sim = &mut self.sim;
        self.pool.install(|| sim.step())
    }

    /// Run all remaining ticks, returning sorted outputs plus timing.
    pub fn run(mut self) -> Result<(Vec<SpikeEvent>, RunReport), SimError> {
        let start = Instant::now();
        let ticks = self.sim.net.config().num_ticks;
        while self.sim.tick < ticks {
            self.step()?;
        }
        let mut outputs = std::mem::take(&mut self.sim.outputs);
        debug_assert!(outputs
            .windows(2)
            .all(|w| w[0].sort_key() <= w[1].sort_key()));
        outputs.sort_unstable_by_key(SpikeEvent::sort_key);
        let report = RunReport {
            engine: self.sim.plan.describe(),
            ticks: self.sim.tick,
            output_spikes: outputs.len(),
            total: start.elapsed(),
            phases: self.sim.phases,
        };
        Ok((outputs, report))
    }

    /// Full-state capture in the same canonical form as the serial engine.
    pub fn snapshot(&self) -> StateSnapshot {
        let st = &self.sim.state;
        let mut sched_words = Vec::with_capacity(st.cores * st.max_offset * st.wpr);
        for core in 0..st.cores {
            for offset in 0..st.max_offset {
                let base = st.sched_base(core, (st.curr[core] as usize + offset) % st.max_offset);
                for w in 0..st.wpr {
                    sched_words.push(st.sched[base + w].load(Ordering::Relaxed));
                }
            }
        }
        StateSnapshot {
            tick: self.sim.tick,
            potentials: st.potentials.clone(),
            sched_words,
            outputs: self.sim.outputs.clone(),
        }
    }
}

/// Convenience wrapper: fresh engine, full run; workers do not outlive it.
pub fn run_parallel(
    net: &Network,
    inputs: InputQueue,
    plan: ParallelPlan,
) -> Result<(Vec<SpikeEvent>, RunReport), SimError> {
    ParallelEngine::new(net, inputs, plan).run()
}
