//! Per-neuron parameter records and the LIF datapath shared by both engines.
//!
//! Accumulation runs in 128-bit arithmetic with no intermediate saturation;
//! the potential is saturated to its configured bitwidth exactly once, at
//! store time. That single-clamp rule is what makes the partial-sum order
//! of the parallel engine immaterial.

use crate::bits::BitRow;
use crate::config::GridConfig;
use crate::error::SimError;

/// Parameters of one neuron as held in its core's memory: current potential,
/// the weight set, the synaptic connection row, LIF constants, and the
/// destination of the spikes it generates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsramEntry {
    pub potential: i64,
    /// One weight per axon type; selected per axon via [`AxonTypes`].
    pub weights: Vec<i64>,
    /// Connection bit per axon of the core; length is `axons_per_core`.
    pub connections: BitRow,
    pub threshold: i64,
    pub reset_potential: i64,
    pub leak: i64,
    /// Signed core offset of the spike destination from the source core.
    pub dest_core_dx: i32,
    pub dest_core_dy: i32,
    pub dest_axon: u32,
    pub dest_tick_offset: u32,
    /// When set, spikes leave the grid on the output bus instead of
    /// entering the router.
    pub output_flag: bool,
}

/// Per-core axon type labels; each value indexes into every neuron's
/// weight set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxonTypes {
    pub types: Vec<u32>,
}

impl AxonTypes {
    pub fn new(types: Vec<u32>) -> Self {
        Self { types }
    }
}

/// Routed spike message: remaining hop offsets plus the delivery target at
/// the destination core.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Packet {
    pub dx: i32,
    pub dy: i32,
    pub dest_axon: u32,
    pub dest_tick_offset: u32,
}

/// Externally visible spike on the output bus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct SpikeEvent {
    pub tick: u32,
    pub core_x: u32,
    pub core_y: u32,
    pub neuron: u32,
}

impl SpikeEvent {
    /// Canonical file ordering: (tick, core_y, core_x, neuron).
    pub fn sort_key(&self) -> (u32, u32, u32, u32) {
        (self.tick, self.core_y, self.core_x, self.neuron)
    }
}

/// Clamp `value` into the signed range representable in `bits` bits.
pub fn saturate(value: i128, bits: u32) -> i64 {
    debug_assert!((2..=64).contains(&bits));
    let hi = (1i128 << (bits - 1)) - 1;
    let lo = -(1i128 << (bits - 1));
    value.clamp(lo, hi) as i64
}

/// Sum of the weights selected by spiking, connected axons. Exact in i128,
/// so any evaluation order produces the same value.
pub fn synaptic_sum(
    conn_words: &[u64],
    spike_words: &[u64],
    axon_types: &[u32],
    weights: &[i64],
) -> i128 {
    debug_assert_eq!(conn_words.len(), spike_words.len());
    let mut acc = 0i128;
    for (wi, (&c, &s)) in conn_words.iter().zip(spike_words).enumerate() {
        let mut active = c & s;
        while active != 0 {
            let axon = wi * 64 + active.trailing_zeros() as usize;
            acc += weights[axon_types[axon] as usize] as i128;
            active &= active - 1;
        }
    }
    acc
}

/// One tree leaf: the weight sum contributed by a single 64-axon word.
#[inline]
fn leaf_sum(conn: &[u64], spikes: &[u64], types: &[u32], weights: &[i64], word: usize) -> i128 {
    let mut acc = 0i128;
    let mut active = conn[word] & spikes[word];
    while active != 0 {
        let axon = word * 64 + active.trailing_zeros() as usize;
        acc += weights[types[axon] as usize] as i128;
        active &= active - 1;
    }
    acc
}

/// Like [`synaptic_sum`] but evaluated as a balanced reduction tree of the
/// given arity over word-block partial sums. Equal to `synaptic_sum` for
/// every input; the tree shape only changes the association order. Up to
/// 16 words (1024 axons) the levels fold in place on the stack; wider
/// crossbars take the recursive path.
pub fn synaptic_sum_tree(
    conn_words: &[u64],
    spike_words: &[u64],
    axon_types: &[u32],
    weights: &[i64],
    arity: usize,
) -> i128 {
    debug_assert!(arity >= 2);
    let n = conn_words.len();
    if n > 16 {
        return tree_reduce(conn_words, spike_words, axon_types, weights, 0, n, arity);
    }
    let mut sums = [0i128; 16];
    for (word, slot) in sums.iter_mut().enumerate().take(n) {
        *slot = leaf_sum(conn_words, spike_words, axon_types, weights, word);
    }
    let mut len = n;
    while len > 1 {
        let groups = len.div_ceil(arity);
        for g in 0..groups {
            let start = g * arity;
            let end = (start + arity).min(len);
            let mut acc = sums[start];
            for s in &sums[start + 1..end] {
                acc += s;
            }
            sums[g] = acc;
        }
        len = groups;
    }
    if n == 0 {
        0
    } else {
        sums[0]
    }
}

fn tree_reduce(
    conn: &[u64],
    spikes: &[u64],
    types: &[u32],
    weights: &[i64],
    lo: usize,
    hi: usize,
    arity: usize,
) -> i128 {
    let n = hi - lo;
    if n == 0 {
        return 0;
    }
    if n == 1 {
        return leaf_sum(conn, spikes, types, weights, lo);
    }
    let per = n.div_ceil(arity);
    let mut acc = 0i128;
    let mut start = lo;
    while start < hi {
        let end = (start + per).min(hi);
        acc += tree_reduce(conn, spikes, types, weights, start, end, arity);
        start = end;
    }
    acc
}

/// Membrane accumulation for one tick: current potential plus the synaptic
/// sum of this tick's spikes. Wide arithmetic, no intermediate saturation;
/// the entry is not mutated.
pub fn integrate(entry: &CsramEntry, axon_types: &AxonTypes, spikes: &BitRow) -> i128 {
    debug_assert_eq!(spikes.len(), entry.connections.len());
    entry.potential as i128
        + synaptic_sum(
            entry.connections.words(),
            spikes.words(),
            &axon_types.types,
            &entry.weights,
        )
}

/// Leak, threshold comparison, and reset on raw parameter values.
///
/// Returns the stored potential (saturated to `potential_bits`) and whether
/// the neuron spiked. The comparison is `v >= threshold`.
pub fn apply_leak_threshold_reset(
    accumulated: i128,
    leak: i64,
    threshold: i64,
    reset_potential: i64,
    potential_bits: u32,
) -> (i64, bool) {
    let v = accumulated + leak as i128;
    if v >= threshold as i128 {
        (saturate(reset_potential as i128, potential_bits), true)
    } else {
        (saturate(v, potential_bits), false)
    }
}

/// Entry-level form of [`apply_leak_threshold_reset`].
pub fn leak_threshold_reset(
    accumulated: i128,
    entry: &CsramEntry,
    cfg: &GridConfig,
) -> (i64, bool) {
    apply_leak_threshold_reset(
        accumulated,
        entry.leak,
        entry.threshold,
        entry.reset_potential,
        cfg.potential_bits,
    )
}

/// Packetize a spike from a non-output neuron.
pub fn make_packet(entry: &CsramEntry) -> Result<Packet, SimError> {
    if entry.output_flag {
        return Err(SimError::OutputSpikeNotRoutable);
    }
    Ok(Packet {
        dx: entry.dest_core_dx,
        dy: entry.dest_core_dy,
        dest_axon: entry.dest_axon,
        dest_tick_offset: entry.dest_tick_offset,
    })
}
