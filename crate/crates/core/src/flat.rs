//! Flattened engine state: every per-core object replaced by one contiguous
//! array, address-computable from (core, neuron, axon) indices alone.
//!
//! Mutable state is split by phase. Potentials are written only during the
//! neuron phase through disjoint chunks; scheduler words and spike flags are
//! atomics because concurrent tasks may set bits in the same word, and a
//! bit-set is commutative and idempotent. In debug builds a phase tag is
//! asserted at every write site.

use std::sync::atomic::{AtomicU64, AtomicU8, Ordering};

use crate::network::Network;

pub(crate) const PHASE_IDLE: u8 = 0;
pub(crate) const PHASE_SCHEDULER: u8 = 1;
pub(crate) const PHASE_NEURON: u8 = 2;
pub(crate) const PHASE_ROUTER: u8 = 3;

/// Where a neuron's spikes go; the flattened form of the destination fields
/// of its parameter record.
#[derive(Debug, Clone, Copy)]
pub(crate) struct DestRecord {
    pub dx: i32,
    pub dy: i32,
    pub axon: u32,
    pub tick_offset: u32,
    pub output: bool,
}

pub(crate) struct FlatState {
    pub cores: usize,
    pub npc: usize,
    pub apc: usize,
    pub wpn: usize,
    /// Scheduler/connection row width in 64-bit words.
    pub wpr: usize,
    pub max_offset: usize,

    // Read-only during a run.
    pub weights: Vec<i64>,
    pub conn_words: Vec<u64>,
    pub axon_types: Vec<u32>,
    pub leaks: Vec<i64>,
    pub thresholds: Vec<i64>,
    pub resets: Vec<i64>,
    pub dests: Vec<DestRecord>,

    // Mutated in place, phase by phase.
    pub potentials: Vec<i64>,
    /// One block for every core's ring: [core][row][word].
    pub sched: Vec<AtomicU64>,
    pub curr: Vec<u32>,
    /// One spike flag bit per neuron, [core][neuron] order.
    pub spike_words: Vec<AtomicU64>,

    pub phase: AtomicU8,
}

impl FlatState {
    pub fn from_network(net: &Network) -> Self {
        let cfg = net.config();
        let cores = cfg.num_cores();
        let npc = cfg.neurons_per_core as usize;
        let apc = cfg.axons_per_core as usize;
        let wpn = cfg.num_weights_per_neuron as usize;
        let wpr = crate::bits::words_for(apc);
        let max_offset = cfg.max_tick_offset as usize;
        let neurons = cores * npc;

        let mut weights = Vec::with_capacity(neurons * wpn);
        let mut conn_words = Vec::with_capacity(neurons * wpr);
        let mut axon_types = Vec::with_capacity(cores * apc);
        let mut leaks = Vec::with_capacity(neurons);
        let mut thresholds = Vec::with_capacity(neurons);
        let mut resets = Vec::with_capacity(neurons);
        let mut dests = Vec::with_capacity(neurons);
        let mut potentials = Vec::with_capacity(neurons);

        for core in net.cores() {
            axon_types.extend_from_slice(&core.axon_types.types);
            for entry in &core.neurons {
                weights.extend_from_slice(&entry.weights);
                conn_words.extend_from_slice(entry.connections.words());
                leaks.push(entry.leak);
                thresholds.push(entry.threshold);
                resets.push(entry.reset_potential);
                potentials.push(entry.potential);
                dests.push(DestRecord {
                    dx: entry.dest_core_dx,
                    dy: entry.dest_core_dy,
                    axon: entry.dest_axon,
                    tick_offset: entry.dest_tick_offset,
                    output: entry.output_flag,
                });
            }
        }

        Self {
            cores,
            npc,
            apc,
            wpn,
            wpr,
            max_offset,
            weights,
            conn_words,
            axon_types,
            leaks,
            thresholds,
            resets,
            dests,
            potentials,
            sched: (0..cores * max_offset * wpr)
                .map(|_| AtomicU64::new(0))
                .collect(),
            curr: vec![0; cores],
            spike_words: (0..neurons.div_ceil(64))
                .map(|_| AtomicU64::new(0))
                .collect(),
            phase: AtomicU8::new(PHASE_IDLE),
        }
    }

    #[inline]
    pub fn sched_base(&self, core: usize, row: usize) -> usize {
        (core * self.max_offset + row) * self.wpr
    }

    /// Stage a spike bit; callers resolve the destination core first.
    #[inline]
    pub fn deliver(&self, core: usize, axon: u32, tick_offset: u32) {
        debug_assert_eq!(self.phase.load(Ordering::Relaxed), PHASE_ROUTER);
        debug_assert!(tick_offset >= 1 && tick_offset as usize <= self.max_offset);
        debug_assert!((axon as usize) < self.apc);
        let row = (self.curr[core] as usize + tick_offset as usize) % self.max_offset;
        let base = self.sched_base(core, row);
        self.sched[base + axon as usize / 64]
            .fetch_or(1u64 << (axon as usize % 64), Ordering::Relaxed);
    }

    pub fn set_phase(&self, phase: u8) {
        self.phase.store(phase, Ordering::Relaxed);
    }
}
