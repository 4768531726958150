//! Seeded workload generation.
//!
//! A workload is a network plus an input stream, both fully determined by
//! a `WorkloadParams` value. The draw sequence is part of the crate's
//! stable interface: the same parameters must produce byte-identical
//! files on every platform and in every future version, because generated
//! corpora are regenerated from seeds rather than checked in.

use std::collections::BTreeSet;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::bits::BitRow;
use crate::config::{ConfigError, GridConfig};
use crate::inputs::InputSpike;
use crate::network::{CoreConfig, Network};
use crate::neuron::{AxonTypes, CsramEntry};

/// Deterministic RNG with platform-independent integer draws.
///
/// ChaCha8 keyed from a u64; bounded draws use widening-multiply rejection
/// so every bound maps the stream to an unbiased value without floating
/// point or platform-dependent shortcuts.
#[derive(Debug, Clone)]
pub struct DetRng(ChaCha8Rng);

impl DetRng {
    pub fn new(seed: u64) -> Self {
        Self(ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform draw in `0..bound`. `bound` of 0 is a caller bug.
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "below(0)");
        let mut m = (self.next_u64() as u128) * (bound as u128);
        let mut low = m as u64;
        if low < bound {
            // Reject the sliver that would bias small residues.
            let cutoff = bound.wrapping_neg() % bound;
            while low < cutoff {
                m = (self.next_u64() as u128) * (bound as u128);
                low = m as u64;
            }
        }
        (m >> 64) as u64
    }

    /// Uniform draw in `lo..=hi` (inclusive).
    pub fn range_i64(&mut self, lo: i64, hi: i64) -> i64 {
        assert!(lo <= hi, "empty range {lo}..={hi}");
        let span = (hi as i128 - lo as i128 + 1) as u128;
        if span > u64::MAX as u128 {
            // Full 64-bit span: any draw is in range.
            return self.next_u64() as i64;
        }
        lo.wrapping_add(self.below(span as u64) as i64)
    }

    /// Bernoulli trial. p <= 0 and p >= 1 resolve without consuming a draw
    /// so dense and empty crossbars cost nothing and stay stream-stable.
    pub fn bernoulli(&mut self, p: f64) -> bool {
        if p <= 0.0 {
            return false;
        }
        if p >= 1.0 {
            return true;
        }
        let cutoff = (p * (u64::MAX as f64 + 1.0)) as u64;
        self.next_u64() < cutoff
    }
}

/// Everything that determines a generated workload.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WorkloadParams {
    pub grid_width: u32,
    pub grid_height: u32,
    pub axons_per_core: u32,
    pub neurons_per_core: u32,
    pub num_weights_per_neuron: u32,
    pub max_tick_offset: u32,
    pub num_ticks: u32,
    pub potential_bits: u32,
    pub weight_bits: u32,
    pub leak_bits: u32,
    pub threshold_bits: u32,
    pub reset_bits: u32,
    /// Probability each crossbar point is connected.
    pub density: f64,
    /// Expected fraction of (core, axon) pairs spiked per input tick.
    pub spike_rate: f64,
    /// Probability a neuron reports externally instead of routing.
    pub output_fraction: f64,
    pub seed: u64,
}

impl WorkloadParams {
    /// Small defaults; override fields as needed.
    pub fn new(grid_width: u32, grid_height: u32, num_ticks: u32) -> Self {
        Self {
            grid_width,
            grid_height,
            axons_per_core: 16,
            neurons_per_core: 16,
            num_weights_per_neuron: 4,
            max_tick_offset: 4,
            num_ticks,
            potential_bits: 16,
            weight_bits: 8,
            leak_bits: 8,
            threshold_bits: 16,
            reset_bits: 16,
            density: 0.5,
            spike_rate: 0.05,
            output_fraction: 0.25,
            seed: 0,
        }
    }

    pub fn grid_config(&self) -> GridConfig {
        GridConfig {
            grid_width: self.grid_width,
            grid_height: self.grid_height,
            axons_per_core: self.axons_per_core,
            neurons_per_core: self.neurons_per_core,
            num_weights_per_neuron: self.num_weights_per_neuron,
            max_tick_offset: self.max_tick_offset,
            potential_bits: self.potential_bits,
            weight_bits: self.weight_bits,
            leak_bits: self.leak_bits,
            threshold_bits: self.threshold_bits,
            reset_bits: self.reset_bits,
            num_ticks: self.num_ticks,
        }
    }

    /// Named benchmark shapes. Grids are factorizations of the published
    /// core counts; the tick counts and per-core dimensions are exact.
    pub fn preset(name: &str) -> Option<Self> {
        let (w, h, axons, neurons, ticks) = match name {
            "mnist-12c" => (4, 3, 256, 256, 10010),
            "mnist-128c" => (8, 16, 256, 256, 10010),
            "mnist-512c" => (16, 32, 256, 256, 10010),
            "vmm-32x32" => (7, 3, 256, 256, 788),
            "vmm-50x50" => (9, 5, 512, 256, 889),
            "vmm-60x60" => (17, 3, 512, 256, 1095),
            "cifar10" => (6, 6, 256, 256, 10010),
            "truenorth-ref" => (64, 64, 256, 256, 500),
            _ => return None,
        };
        let mut p = Self::new(w, h, ticks);
        p.axons_per_core = axons;
        p.neurons_per_core = neurons;
        p.max_tick_offset = 16;
        if name == "truenorth-ref" {
            // The reference shape is exercised with no input stream.
            p.spike_rate = 0.0;
        }
        Some(p)
    }

    pub const PRESET_NAMES: [&'static str; 8] = [
        "mnist-12c",
        "mnist-128c",
        "mnist-512c",
        "vmm-32x32",
        "vmm-50x50",
        "vmm-60x60",
        "cifar10",
        "truenorth-ref",
    ];
}

fn signed_max(bits: u32) -> i64 {
    if bits >= 64 {
        i64::MAX
    } else {
        (1i64 << (bits - 1)) - 1
    }
}

fn signed_min(bits: u32) -> i64 {
    if bits >= 64 {
        i64::MIN
    } else {
        -(1i64 << (bits - 1))
    }
}

/// Build the network and input stream for `params`.
///
/// Draw order, fixed forever: per core in row-major order, axon types,
/// then per neuron weights, connections, threshold, starting potential,
/// reset potential, leak, output flag, and (for routed neurons) the
/// destination core, axon, and tick offset. Input spikes follow, one
/// arrival tick at a time.
///
/// Thresholds are positive and starting potentials sit strictly below
/// them, leaks are never positive, so a workload with an empty input
/// stream stays silent for any density.
pub fn generate(params: &WorkloadParams) -> Result<(Network, Vec<InputSpike>), ConfigError> {
    let cfg = params.grid_config();
    cfg.validate()?;
    let mut rng = DetRng::new(params.seed);
    let apc = cfg.axons_per_core as usize;
    let wpn = cfg.num_weights_per_neuron as usize;

    let w_max = signed_max(cfg.weight_bits);
    let w_min = signed_min(cfg.weight_bits);
    let t_cap = signed_max(cfg.threshold_bits).min(2 * w_max.max(1));
    let p_cap = signed_max(cfg.potential_bits);
    let r_cap = signed_max(cfg.reset_bits);
    let leak_floor = signed_min(cfg.leak_bits).max(-8);

    let mut cores = Vec::with_capacity(cfg.num_cores());
    for coord in cfg.cores() {
        let types = (0..apc)
            .map(|_| rng.below(cfg.num_weights_per_neuron as u64) as u32)
            .collect();
        let mut neurons = Vec::with_capacity(cfg.neurons_per_core as usize);
        for _ in 0..cfg.neurons_per_core {
            let weights: Vec<i64> = (0..wpn).map(|_| rng.range_i64(w_min, w_max)).collect();
            let mut connections = BitRow::zeros(apc);
            for a in 0..apc {
                if rng.bernoulli(params.density) {
                    connections.set(a);
                }
            }
            let threshold = rng.range_i64(1, t_cap);
            let potential = rng.range_i64(0, (threshold - 1).min(p_cap));
            let reset_potential = rng.range_i64(0, (threshold - 1).min(r_cap));
            let leak = rng.range_i64(leak_floor, 0);
            let output_flag = rng.bernoulli(params.output_fraction);
            let (dx, dy, dest_axon, dest_tick_offset) = if output_flag {
                (0, 0, 0, 1)
            } else {
                let dest = cfg.core_at(rng.below(cfg.num_cores() as u64) as usize);
                let axon = rng.below(cfg.axons_per_core as u64) as u32;
                let offset = if cfg.max_tick_offset >= 2 {
                    1 + rng.below(cfg.max_tick_offset as u64 - 1) as u32
                } else {
                    1
                };
                (
                    dest.x as i32 - coord.x as i32,
                    dest.y as i32 - coord.y as i32,
                    axon,
                    offset,
                )
            };
            neurons.push(CsramEntry {
                potential,
                weights,
                connections,
                threshold,
                reset_potential,
                leak,
                dest_core_dx: dx,
                dest_core_dy: dy,
                dest_axon,
                dest_tick_offset,
                output_flag,
            });
        }
        cores.push(CoreConfig {
            coord,
            axon_types: AxonTypes::new(types),
            neurons,
        });
    }
    let net = Network::new(cfg, cores).expect("generated networks are valid by construction");

    let sites = cfg.num_cores() as u64 * cfg.axons_per_core as u64;
    let per_tick = ((params.spike_rate * sites as f64).round() as u64).min(sites) as usize;
    let mut spikes = Vec::new();
    if per_tick > 0 {
        for tick in 1..cfg.num_ticks {
            let mut chosen = BTreeSet::new();
            while chosen.len() < per_tick {
                chosen.insert(rng.below(sites));
            }
            for site in chosen {
                spikes.push(InputSpike {
                    arrival_tick: tick,
                    core: cfg.core_at((site / cfg.axons_per_core as u64) as usize),
                    axon: (site % cfg.axons_per_core as u64) as u32,
                });
            }
        }
    }
    Ok((net, spikes))
}
