//! Independent brute-force reference for differential testing.
//!
//! Everything here is deliberately reimplemented from the documented
//! behaviour using the plainest possible data structures: per-axon bool
//! vectors, per-core ring heads, i128 arithmetic with explicit min/max
//! clamping. Nothing is shared with the engines beyond the domain types
//! (network description, spike records, snapshot container), so a bug
//! would have to be made twice, independently, to go unnoticed.
//!
//! Only tiny grids are in scope; nothing here tries to be fast.

use spikemesh::config::CoreCoord;
use spikemesh::inputs::InputSpike;
use spikemesh::network::Network;
use spikemesh::neuron::SpikeEvent;
use spikemesh::snapshot::StateSnapshot;

/// Complete simulator state at a tick boundary, naive representation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleTrace {
    /// Ticks fully executed so far.
    pub tick: u32,
    /// Ring position per core; all move in lockstep but are kept per core.
    pub heads: Vec<usize>,
    /// Scheduler contents as plain bools: [core][row][axon].
    pub rows: Vec<Vec<Vec<bool>>>,
    /// [core][neuron].
    pub potentials: Vec<Vec<i64>>,
    /// Externally visible events so far.
    pub outputs: Vec<SpikeEvent>,
}

impl OracleTrace {
    pub fn fresh(net: &Network) -> Self {
        let cfg = net.config();
        let cores = cfg.num_cores();
        let rows_per_core = cfg.max_tick_offset as usize;
        let axons = cfg.axons_per_core as usize;
        OracleTrace {
            tick: 0,
            heads: vec![0; cores],
            rows: vec![vec![vec![false; axons]; rows_per_core]; cores],
            potentials: net
                .cores()
                .iter()
                .map(|c| c.neurons.iter().map(|n| n.potential).collect())
                .collect(),
            outputs: Vec::new(),
        }
    }

    /// Repack into the engines' snapshot shape for direct comparison.
    /// Rows are emitted by offset from the current head; axon bits fill
    /// 64-bit words from the low end.
    pub fn snapshot(&self, net: &Network) -> StateSnapshot {
        let cfg = net.config();
        let rows_per_core = cfg.max_tick_offset as usize;
        let axons = cfg.axons_per_core as usize;
        let words_per_row = axons.div_ceil(64);
        let mut sched_words = Vec::new();
        for (core, rows) in self.rows.iter().enumerate() {
            for offset in 0..rows_per_core {
                let row = &rows[(self.heads[core] + offset) % rows_per_core];
                let mut words = vec![0u64; words_per_row];
                for (axon, &on) in row.iter().enumerate() {
                    if on {
                        words[axon / 64] |= 1u64 << (axon % 64);
                    }
                }
                sched_words.extend_from_slice(&words);
            }
        }
        StateSnapshot {
            tick: self.tick,
            potentials: self.potentials.iter().flatten().copied().collect(),
            sched_words,
            outputs: self.outputs.clone(),
        }
    }
}

fn clamp_to_bits(v: i128, bits: u32) -> i64 {
    let hi = (1i128 << (bits - 1)) - 1;
    let lo = -(1i128 << (bits - 1));
    v.max(lo).min(hi) as i64
}

/// Where a packet sent from `src` with the given core offsets ends up on a
/// width x height grid, or `None` when it leaves the mesh. Dimension-order
/// walking can only leave the grid if the endpoint is outside it, so the
/// endpoint check is the whole answer.
pub fn expected_destination(
    src: CoreCoord,
    dx: i32,
    dy: i32,
    width: u32,
    height: u32,
) -> Option<CoreCoord> {
    let x = src.x as i64 + dx as i64;
    let y = src.y as i64 + dy as i64;
    if x < 0 || y < 0 || x >= width as i64 || y >= height as i64 {
        return None;
    }
    Some(CoreCoord::new(x as u32, y as u32))
}

/// Execute one tick the slow, obvious way and return the next state.
///
/// `arrivals` is the complete input stream; the relevant records are
/// selected by tick here. Panics on malformed networks rather than
/// returning errors, because it only ever runs on validated ones.
pub fn brute_force_tick(
    net: &Network,
    arrivals: &[InputSpike],
    state: &OracleTrace,
) -> OracleTrace {
    let cfg = net.config();
    let t = state.tick;
    let rows_per_core = cfg.max_tick_offset as usize;
    let mut next = state.clone();

    // Advance every ring: wipe the row that was current last tick, then
    // move the head onto the row deliveries aimed at this tick.
    for core in 0..cfg.num_cores() {
        let head = next.heads[core];
        next.rows[core][head].iter_mut().for_each(|b| *b = false);
        next.heads[core] = (head + 1) % rows_per_core;
    }

    // Stage external input: a record arriving at tick T is delivered one
    // tick ahead, at offset 1, exactly like a routed packet would be.
    for spike in arrivals.iter().filter(|s| s.arrival_tick == t + 1) {
        let core = cfg.core_index(spike.core);
        let slot = (next.heads[core] + 1) % rows_per_core;
        next.rows[core][slot][spike.axon as usize] = true;
    }

    // Neuron phase: integrate the current row, fire and reset or store.
    let mut fired: Vec<(usize, usize)> = Vec::new();
    for core in 0..cfg.num_cores() {
        let desc = &net.cores()[core];
        let current = next.rows[core][next.heads[core]].clone();
        for (n, entry) in desc.neurons.iter().enumerate() {
            let mut acc = next.potentials[core][n] as i128;
            for (axon, &spiked) in current.iter().enumerate() {
                if spiked && entry.connections.get(axon) {
                    acc += entry.weights[desc.axon_types.types[axon] as usize] as i128;
                }
            }
            acc += entry.leak as i128;
            if acc >= entry.threshold as i128 {
                fired.push((core, n));
                next.potentials[core][n] =
                    clamp_to_bits(entry.reset_potential as i128, cfg.potential_bits);
            } else {
                next.potentials[core][n] = clamp_to_bits(acc, cfg.potential_bits);
            }
        }
    }

    // Dispatch in core-index, then neuron order (the canonical order).
    for (core, n) in fired {
        let desc = &net.cores()[core];
        let entry = &desc.neurons[n];
        if entry.output_flag {
            next.outputs.push(SpikeEvent {
                tick: t,
                core_x: desc.coord.x,
                core_y: desc.coord.y,
                neuron: n as u32,
            });
        } else {
            let dest = expected_destination(
                desc.coord,
                entry.dest_core_dx,
                entry.dest_core_dy,
                cfg.grid_width,
                cfg.grid_height,
            )
            .expect("validated network destinations stay on the grid");
            let dest = cfg.core_index(dest);
            let slot = (next.heads[dest] + entry.dest_tick_offset as usize) % rows_per_core;
            next.rows[dest][slot][entry.dest_axon as usize] = true;
        }
    }

    next.tick = t + 1;
    next
}

/// Run the whole input stream, returning the snapshot after every tick.
pub fn run_oracle(net: &Network, arrivals: &[InputSpike]) -> Vec<StateSnapshot> {
    let cfg = net.config();
    let mut state = OracleTrace::fresh(net);
    let mut snapshots = Vec::with_capacity(cfg.num_ticks as usize);
    for _ in 0..cfg.num_ticks {
        state = brute_force_tick(net, arrivals, &state);
        snapshots.push(state.snapshot(net));
    }
    snapshots
}
