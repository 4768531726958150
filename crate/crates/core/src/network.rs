//! Static description of a configured grid: one axon-type table and one
//! neuron parameter table per core. Immutable once validated; engines keep
//! their mutable state (potentials, schedulers) separately.

use crate::config::{CoreCoord, GridConfig};
use crate::neuron::{AxonTypes, CsramEntry};

/// Per-core configuration: axon type labels plus one parameter record per
/// neuron, in ascending neuron order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoreConfig {
    pub coord: CoreCoord,
    pub axon_types: AxonTypes,
    pub neurons: Vec<CsramEntry>,
}

/// Structural violation found while assembling a network.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NetworkError {
    #[error("expected {expected} cores in row-major order, found {found}")]
    CoreCount { expected: usize, found: usize },
    #[error("core {index} is {found}, expected {expected} (row-major order)")]
    CoreOrder {
        index: usize,
        expected: CoreCoord,
        found: CoreCoord,
    },
    #[error("core {core}: expected {expected} axon types, found {found}")]
    AxonTypeCount {
        core: CoreCoord,
        expected: usize,
        found: usize,
    },
    #[error("core {core} axon {axon}: type {value} out of range (weights per neuron = {limit})")]
    AxonTypeRange {
        core: CoreCoord,
        axon: usize,
        value: u32,
        limit: u32,
    },
    #[error("core {core}: expected {expected} neurons, found {found}")]
    NeuronCount {
        core: CoreCoord,
        expected: usize,
        found: usize,
    },
    #[error("core {core} neuron {neuron}: expected {expected} weights, found {found}")]
    WeightCount {
        core: CoreCoord,
        neuron: usize,
        expected: usize,
        found: usize,
    },
    #[error("core {core} neuron {neuron}: expected {expected} connection bits, found {found}")]
    ConnectionCount {
        core: CoreCoord,
        neuron: usize,
        expected: usize,
        found: usize,
    },
    #[error("core {core} neuron {neuron}: {field} = {value} does not fit in {bits} signed bits")]
    ValueOverflow {
        core: CoreCoord,
        neuron: usize,
        field: &'static str,
        value: i64,
        bits: u32,
    },
    #[error("core {core} neuron {neuron}: destination axon {axon} out of range ({limit} axons per core)")]
    DestAxonRange {
        core: CoreCoord,
        neuron: usize,
        axon: u32,
        limit: u32,
    },
    #[error("core {core} neuron {neuron}: tick offset {offset} outside 1..={max}")]
    DestOffsetRange {
        core: CoreCoord,
        neuron: usize,
        offset: u32,
        max: u32,
    },
    #[error("core {core} neuron {neuron}: destination offset ({dx},{dy}) leaves the grid")]
    DestOffGrid {
        core: CoreCoord,
        neuron: usize,
        dx: i32,
        dy: i32,
    },
}

/// A validated grid: every core present in row-major order, every value
/// within its configured bitwidth, every non-output destination in-grid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Network {
    cfg: GridConfig,
    cores: Vec<CoreConfig>,
}

fn fits(value: i64, bits: u32) -> bool {
    let hi = (1i128 << (bits - 1)) - 1;
    let lo = -(1i128 << (bits - 1));
    lo <= value as i128 && value as i128 <= hi
}

impl Network {
    pub fn new(cfg: GridConfig, cores: Vec<CoreConfig>) -> Result<Self, NetworkError> {
        let expected_cores = cfg.num_cores();
        if cores.len() != expected_cores {
            return Err(NetworkError::CoreCount {
                expected: expected_cores,
                found: cores.len(),
            });
        }
        let apc = cfg.axons_per_core as usize;
        let npc = cfg.neurons_per_core as usize;
        let wpn = cfg.num_weights_per_neuron as usize;
        for (index, core) in cores.iter().enumerate() {
            let at = core.coord;
            let expected = cfg.core_at(index);
            if at != expected {
                return Err(NetworkError::CoreOrder {
                    index,
                    expected,
                    found: at,
                });
            }
            if core.axon_types.types.len() != apc {
                return Err(NetworkError::AxonTypeCount {
                    core: at,
                    expected: apc,
                    found: core.axon_types.types.len(),
                });
            }
            for (axon, &ty) in core.axon_types.types.iter().enumerate() {
                if ty >= cfg.num_weights_per_neuron {
                    return Err(NetworkError::AxonTypeRange {
                        core: at,
                        axon,
                        value: ty,
                        limit: cfg.num_weights_per_neuron,
                    });
                }
            }
            if core.neurons.len() != npc {
                return Err(NetworkError::NeuronCount {
                    core: at,
                    expected: npc,
                    found: core.neurons.len(),
                });
            }
            for (neuron, entry) in core.neurons.iter().enumerate() {
                if entry.weights.len() != wpn {
                    return Err(NetworkError::WeightCount {
                        core: at,
                        neuron,
                        expected: wpn,
                        found: entry.weights.len(),
                    });
                }
                if entry.connections.len() != apc {
                    return Err(NetworkError::ConnectionCount {
                        core: at,
                        neuron,
                        expected: apc,
                        found: entry.connections.len(),
                    });
                }
                let checks: [(&'static str, i64, u32); 4] = [
                    ("potential", entry.potential, cfg.potential_bits),
                    ("leak", entry.leak, cfg.leak_bits),
                    ("threshold", entry.threshold, cfg.threshold_bits),
                    ("reset", entry.reset_potential, cfg.reset_bits),
                ];
                for (field, value, bits) in checks {
                    if !fits(value, bits) {
                        return Err(NetworkError::ValueOverflow {
                            core: at,
                            neuron,
                            field,
                            value,
                            bits,
                        });
                    }
                }
                for &w in &entry.weights {
                    if !fits(w, cfg.weight_bits) {
                        return Err(NetworkError::ValueOverflow {
                            core: at,
                            neuron,
                            field: "weight",
                            value: w,
                            bits: cfg.weight_bits,
                        });
                    }
                }
                if entry.dest_axon >= cfg.axons_per_core {
                    return Err(NetworkError::DestAxonRange {
                        core: at,
                        neuron,
                        axon: entry.dest_axon,
                        limit: cfg.axons_per_core,
                    });
                }
                if entry.dest_tick_offset == 0 || entry.dest_tick_offset > cfg.max_tick_offset {
                    return Err(NetworkError::DestOffsetRange {
                        core: at,
                        neuron,
                        offset: entry.dest_tick_offset,
                        max: cfg.max_tick_offset,
                    });
                }
                if !entry.output_flag
                    && at
                        .offset_within(entry.dest_core_dx, entry.dest_core_dy, &cfg)
                        .is_none()
                {
                    return Err(NetworkError::DestOffGrid {
                        core: at,
                        neuron,
                        dx: entry.dest_core_dx,
                        dy: entry.dest_core_dy,
                    });
                }
            }
        }
        Ok(Self { cfg, cores })
    }

    pub fn config(&self) -> &GridConfig {
        &self.cfg
    }

    pub fn cores(&self) -> &[CoreConfig] {
        &self.cores
    }

    pub fn core(&self, coord: CoreCoord) -> &CoreConfig {
        &self.cores[self.cfg.core_index(coord)]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::BitRow;

    fn tiny_cfg() -> GridConfig {
        GridConfig {
            grid_width: 2,
            grid_height: 1,
            axons_per_core: 4,
            neurons_per_core: 1,
            num_weights_per_neuron: 4,
            max_tick_offset: 2,
            potential_bits: 8,
            weight_bits: 8,
            leak_bits: 8,
            threshold_bits: 8,
            reset_bits: 8,
            num_ticks: 4,
        }
    }

    fn entry() -> CsramEntry {
        CsramEntry {
            potential: 0,
            weights: vec![1, 0, 0, 0],
            connections: BitRow::zeros(4),
            threshold: 1,
            reset_potential: 0,
            leak: 0,
            dest_core_dx: 0,
            dest_core_dy: 0,
            dest_axon: 0,
            dest_tick_offset: 1,
            output_flag: false,
        }
    }

    fn cores(cfg: &GridConfig) -> Vec<CoreConfig> {
        cfg.cores()
            .map(|coord| CoreConfig {
                coord,
                axon_types: AxonTypes::new(vec![0, 1, 2, 3]),
                neurons: vec![entry()],
            })
            .collect()
    }

    #[test]
    fn valid_network_is_accepted() {
        let cfg = tiny_cfg();
        let net = Network::new(cfg, cores(&cfg)).unwrap();
        assert_eq!(net.cores().len(), 2);
        assert_eq!(net.core(CoreCoord::new(1, 0)).coord, CoreCoord::new(1, 0));
    }

    #[test]
    fn overweight_value_is_rejected_with_location() {
        let cfg = tiny_cfg();
        let mut cs = cores(&cfg);
        cs[1].neurons[0].weights[2] = 200;
        let err = Network::new(cfg, cs).unwrap_err();
        assert_eq!(
            err,
            NetworkError::ValueOverflow {
                core: CoreCoord::new(1, 0),
                neuron: 0,
                field: "weight",
                value: 200,
                bits: 8,
            }
        );
    }

    #[test]
    fn routed_destination_must_stay_on_grid() {
        let cfg = tiny_cfg();
        let mut cs = cores(&cfg);
        cs[0].neurons[0].dest_core_dx = -1;
        let err = Network::new(cfg, cs).unwrap_err();
        assert!(matches!(
            err,
            NetworkError::DestOffGrid {
                neuron: 0,
                dx: -1,
                dy: 0,
                ..
            }
        ));

        // The same offset is fine when the spike leaves on the output bus.
        let mut cs = cores(&cfg);
        cs[0].neurons[0].dest_core_dx = -1;
        cs[0].neurons[0].output_flag = true;
        assert!(Network::new(cfg, cs).is_ok());
    }

    #[test]
    fn misordered_cores_are_rejected() {
        let cfg = tiny_cfg();
        let mut cs = cores(&cfg);
        cs.swap(0, 1);
        let err = Network::new(cfg, cs).unwrap_err();
        assert!(matches!(err, NetworkError::CoreOrder { index: 0, .. }));
    }

    #[test]
    fn offset_zero_destination_is_rejected() {
        let cfg = tiny_cfg();
        let mut cs = cores(&cfg);
        cs[0].neurons[0].dest_tick_offset = 0;
        assert!(matches!(
            Network::new(cfg, cs).unwrap_err(),
            NetworkError::DestOffsetRange {
                offset: 0,
                max: 2,
                ..
            }
        ));
    }
}
