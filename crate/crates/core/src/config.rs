//! Static architecture description of a core grid.

use thiserror::Error;

/// Dimensions, per-core resource counts, and parameter bitwidths for a grid
/// of neuromorphic cores. All stored neuron parameters are signed integers
/// constrained to the configured bitwidths.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridConfig {
    pub grid_width: u32,
    pub grid_height: u32,
    pub axons_per_core: u32,
    pub neurons_per_core: u32,
    pub num_weights_per_neuron: u32,
    /// Ring-buffer depth of each core's scheduler; spikes can be delivered
    /// with an offset of 1..=max_tick_offset ticks into the future.
    pub max_tick_offset: u32,
    pub potential_bits: u32,
    pub weight_bits: u32,
    pub leak_bits: u32,
    pub threshold_bits: u32,
    pub reset_bits: u32,
    pub num_ticks: u32,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConfigError {
    #[error("{field} must be at least 1")]
    ZeroCount { field: &'static str },
    #[error("{field} = {value} outside supported bitwidth range 2..=64")]
    BadBitwidth { field: &'static str, value: u32 },
}

impl GridConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let counts = [
            ("grid_width", self.grid_width),
            ("grid_height", self.grid_height),
            ("axons_per_core", self.axons_per_core),
            ("neurons_per_core", self.neurons_per_core),
            ("num_weights_per_neuron", self.num_weights_per_neuron),
            ("max_tick_offset", self.max_tick_offset),
        ];
        for (field, value) in counts {
            if value == 0 {
                return Err(ConfigError::ZeroCount { field });
            }
        }
        let widths = [
            ("potential_bits", self.potential_bits),
            ("weight_bits", self.weight_bits),
            ("leak_bits", self.leak_bits),
            ("threshold_bits", self.threshold_bits),
            ("reset_bits", self.reset_bits),
        ];
        for (field, value) in widths {
            if !(2..=64).contains(&value) {
                return Err(ConfigError::BadBitwidth { field, value });
            }
        }
        Ok(())
    }

    pub fn num_cores(&self) -> usize {
        self.grid_width as usize * self.grid_height as usize
    }

    pub fn num_neurons(&self) -> usize {
        self.num_cores() * self.neurons_per_core as usize
    }

    /// Row-major core index: y selects the row, x the column.
    pub fn core_index(&self, core: CoreCoord) -> usize {
        core.y as usize * self.grid_width as usize + core.x as usize
    }

    pub fn core_at(&self, index: usize) -> CoreCoord {
        CoreCoord {
            x: (index % self.grid_width as usize) as u32,
            y: (index / self.grid_width as usize) as u32,
        }
    }

    pub fn contains(&self, core: CoreCoord) -> bool {
        core.x < self.grid_width && core.y < self.grid_height
    }

    /// Cores in row-major order (y outer, x inner).
    pub fn cores(&self) -> impl Iterator<Item = CoreCoord> + '_ {
        (0..self.grid_height)
            .flat_map(move |y| (0..self.grid_width).map(move |x| CoreCoord { x, y }))
    }
}

/// Absolute core coordinates within the grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CoreCoord {
    pub x: u32,
    pub y: u32,
}

impl CoreCoord {
    pub fn new(x: u32, y: u32) -> Self {
        Self { x, y }
    }

    /// Destination of applying a signed core offset, or `None` when the
    /// result leaves the grid.
    pub fn offset_within(self, dx: i32, dy: i32, cfg: &GridConfig) -> Option<CoreCoord> {
        let x = self.x as i64 + dx as i64;
        let y = self.y as i64 + dy as i64;
        if x < 0 || y < 0 || x >= cfg.grid_width as i64 || y >= cfg.grid_height as i64 {
            return None;
        }
        Some(CoreCoord {
            x: x as u32,
            y: y as u32,
        })
    }
}

impl std::fmt::Display for CoreCoord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}
