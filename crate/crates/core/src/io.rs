//! Text file formats for networks, input streams, and output spikes.
//!
//! Encodings are byte-stable: serializing equal in-memory values always
//! produces identical bytes, because end-to-end file comparison is the
//! equivalence oracle for the two engines. All values are decimal integers
//! separated by single spaces; every line ends with '\n'.
//!
//! Network files:
//! ```text
//! spikemesh-network v1
//! grid <width> <height>
//! axons_per_core <n>
//! neurons_per_core <n>
//! weights_per_neuron <n>
//! max_tick_offset <n>
//! num_ticks <n>
//! bits <potential> <weight> <leak> <threshold> <reset>
//! core <x> <y>
//! types <t0> ... <t{axons-1}>
//! n <potential> <leak> <threshold> <reset> <w0..w{k-1}> <dx> <dy> <axon> <offset> <out> <connbits>
//! ```
//! Cores appear in row-major order, neurons ascending; `connbits` is a
//! 0/1 string whose leftmost character is axon 0.
//!
//! Input files: a `spikemesh-inputs v1` header, then one
//! `<arrival_tick> <core_x> <core_y> <axon>` line per spike, sorted.
//!
//! Output files have no header: one `<tick> <core_x> <core_y> <neuron>`
//! line per spike, sorted by (tick, core_y, core_x, neuron). No events
//! produce an empty file.

use std::fmt::Write as _;
use std::path::Path;

use crate::bits::BitRow;
use crate::config::{CoreCoord, GridConfig};
use crate::inputs::InputSpike;
use crate::network::{CoreConfig, Network, NetworkError};
use crate::neuron::{AxonTypes, CsramEntry, SpikeEvent};

pub const NETWORK_HEADER: &str = "spikemesh-network v1";
pub const INPUTS_HEADER: &str = "spikemesh-inputs v1";

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("{0}")]
    Structure(#[from] NetworkError),

    #[error("{0}")]
    Config(#[from] crate::config::ConfigError),

    #[error("line {line}: arrival tick {tick} outside 1..{num_ticks}")]
    InputTickRange {
        line: usize,
        tick: u32,
        num_ticks: u32,
    },

    #[error("line {line}: core ({x},{y}) outside {width}x{height} grid")]
    InputCoreRange {
        line: usize,
        x: u32,
        y: u32,
        width: u32,
        height: u32,
    },

    #[error("line {line}: axon {axon} outside 0..{axons_per_core}")]
    InputAxonRange {
        line: usize,
        axon: u32,
        axons_per_core: u32,
    },

    #[error("line {line}: arrival ticks must be non-decreasing")]
    InputUnsorted { line: usize },
}

fn parse_err(line: usize, msg: impl Into<String>) -> LoadError {
    LoadError::Parse {
        line,
        msg: msg.into(),
    }
}

/// Numbered, non-empty lines of a file ('\r' tolerated, never written).
struct Lines<'a> {
    rest: std::str::Split<'a, char>,
    line_no: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Self {
            rest: text.split('\n'),
            line_no: 0,
        }
    }

    fn next(&mut self) -> Option<(usize, &'a str)> {
        for line in self.rest.by_ref() {
            self.line_no += 1;
            let line = line.trim_end_matches('\r');
            if !line.trim().is_empty() {
                return Some((self.line_no, line));
            }
        }
        None
    }

    fn expect(&mut self, what: &str) -> Result<(usize, &'a str), LoadError> {
        self.next()
            .ok_or_else(|| parse_err(self.line_no + 1, format!("expected {what}")))
    }
}

fn parse_int<T: std::str::FromStr>(tok: &str, line: usize, what: &str) -> Result<T, LoadError> {
    tok.parse()
        .map_err(|_| parse_err(line, format!("bad {what} value '{tok}'")))
}

/// One `key <values...>` header line with an exact value count.
fn keyed_values<'a>(
    lines: &mut Lines<'a>,
    key: &str,
    count: usize,
) -> Result<(usize, Vec<&'a str>), LoadError> {
    let (no, line) = lines.expect(&format!("'{key}' line"))?;
    let mut toks = line.split_ascii_whitespace();
    if toks.next() != Some(key) {
        return Err(parse_err(
            no,
            format!("expected '{key}' line, found '{line}'"),
        ));
    }
    let values: Vec<&str> = toks.collect();
    if values.len() != count {
        return Err(parse_err(
            no,
            format!("'{key}' expects {count} values, found {}", values.len()),
        ));
    }
    Ok((no, values))
}

pub fn render_network(net: &Network) -> String {
    let cfg = net.config();
    let mut out = String::new();
    out.push_str(NETWORK_HEADER);
    out.push('\n');
    let _ = writeln!(out, "grid {} {}", cfg.grid_width, cfg.grid_height);
    let _ = writeln!(out, "axons_per_core {}", cfg.axons_per_core);
    let _ = writeln!(out, "neurons_per_core {}", cfg.neurons_per_core);
    let _ = writeln!(out, "weights_per_neuron {}", cfg.num_weights_per_neuron);
    let _ = writeln!(out, "max_tick_offset {}", cfg.max_tick_offset);
    let _ = writeln!(out, "num_ticks {}", cfg.num_ticks);
    let _ = writeln!(
        out,
        "bits {} {} {} {} {}",
        cfg.potential_bits, cfg.weight_bits, cfg.leak_bits, cfg.threshold_bits, cfg.reset_bits
    );
    for core in net.cores() {
        let _ = writeln!(out, "core {} {}", core.coord.x, core.coord.y);
        out.push_str("types");
        for t in &core.axon_types.types {
            let _ = write!(out, " {t}");
        }
        out.push('\n');
        for e in &core.neurons {
            let _ = write!(
                out,
                "n {} {} {} {}",
                e.potential, e.leak, e.threshold, e.reset_potential
            );
            for w in &e.weights {
                let _ = write!(out, " {w}");
            }
            let _ = write!(
                out,
                " {} {} {} {} {} ",
                e.dest_core_dx,
                e.dest_core_dy,
                e.dest_axon,
                e.dest_tick_offset,
                u8::from(e.output_flag)
            );
            out.extend(
                (0..e.connections.len()).map(|i| if e.connections.get(i) { '1' } else { '0' }),
            );
            out.push('\n');
        }
    }
    out
}

pub fn parse_network(text: &str) -> Result<Network, LoadError> {
    let mut lines = Lines::new(text);
    let (no, header) = lines.expect("format header")?;
    if header != NETWORK_HEADER {
        return Err(parse_err(no, format!("unknown format header '{header}'")));
    }
    let (no, grid) = keyed_values(&mut lines, "grid", 2)?;
    let grid_width = parse_int(grid[0], no, "grid width")?;
    let grid_height = parse_int(grid[1], no, "grid height")?;
    let mut scalar = |key: &str| -> Result<u32, LoadError> {
        let (no, v) = keyed_values(&mut lines, key, 1)?;
        parse_int(v[0], no, key)
    };
    let axons_per_core = scalar("axons_per_core")?;
    let neurons_per_core = scalar("neurons_per_core")?;
    let num_weights_per_neuron = scalar("weights_per_neuron")?;
    let max_tick_offset = scalar("max_tick_offset")?;
    let num_ticks = scalar("num_ticks")?;
    let (no, bits) = keyed_values(&mut lines, "bits", 5)?;
    let cfg = GridConfig {
        grid_width,
        grid_height,
        axons_per_core,
        neurons_per_core,
        num_weights_per_neuron,
        max_tick_offset,
        potential_bits: parse_int(bits[0], no, "potential bits")?,
        weight_bits: parse_int(bits[1], no, "weight bits")?,
        leak_bits: parse_int(bits[2], no, "leak bits")?,
        threshold_bits: parse_int(bits[3], no, "threshold bits")?,
        reset_bits: parse_int(bits[4], no, "reset bits")?,
        num_ticks,
    };
    cfg.validate()?;

    let wpn = cfg.num_weights_per_neuron as usize;
    let apc = cfg.axons_per_core as usize;
    let mut cores = Vec::with_capacity(cfg.num_cores());
    for _ in 0..cfg.num_cores() {
        let (no, coord) = keyed_values(&mut lines, "core", 2)?;
        let coord = CoreCoord::new(
            parse_int(coord[0], no, "core x")?,
            parse_int(coord[1], no, "core y")?,
        );
        let (no, types) = keyed_values(&mut lines, "types", apc)?;
        let types = types
            .iter()
            .map(|t| parse_int(t, no, "axon type"))
            .collect::<Result<Vec<u32>, _>>()?;
        let mut neurons = Vec::with_capacity(cfg.neurons_per_core as usize);
        for _ in 0..cfg.neurons_per_core {
            let (no, fields) = keyed_values(&mut lines, "n", 10 + wpn)?;
            let weights = fields[4..4 + wpn]
                .iter()
                .map(|w| parse_int(w, no, "weight"))
                .collect::<Result<Vec<i64>, _>>()?;
            let connbits = fields[9 + wpn];
            if connbits.len() != apc {
                return Err(parse_err(
                    no,
                    format!(
                        "connection string has {} bits, expected {apc}",
                        connbits.len()
                    ),
                ));
            }
            let mut connections = BitRow::zeros(apc);
            for (i, ch) in connbits.bytes().enumerate() {
                match ch {
                    b'0' => {}
                    b'1' => connections.set(i),
                    other => {
                        return Err(parse_err(
                            no,
                            format!(
                                "connection string may only contain 0/1, found '{}'",
                                other as char
                            ),
                        ))
                    }
                }
            }
            let output_flag = match fields[8 + wpn] {
                "0" => false,
                "1" => true,
                other => {
                    return Err(parse_err(
                        no,
                        format!("output flag must be 0 or 1, found '{other}'"),
                    ))
                }
            };
            neurons.push(CsramEntry {
                potential: parse_int(fields[0], no, "potential")?,
                leak: parse_int(fields[1], no, "leak")?,
                threshold: parse_int(fields[2], no, "threshold")?,
                reset_potential: parse_int(fields[3], no, "reset potential")?,
                weights,
                connections,
                dest_core_dx: parse_int(fields[4 + wpn], no, "destination dx")?,
                dest_core_dy: parse_int(fields[5 + wpn], no, "destination dy")?,
                dest_axon: parse_int(fields[6 + wpn], no, "destination axon")?,
                dest_tick_offset: parse_int(fields[7 + wpn], no, "destination tick offset")?,
                output_flag,
            });
        }
        cores.push(CoreConfig {
            coord,
            axon_types: AxonTypes::new(types),
            neurons,
        });
    }
    if let Some((no, line)) = lines.next() {
        return Err(parse_err(
            no,
            format!("unexpected trailing content '{line}'"),
        ));
    }
    Ok(Network::new(cfg, cores)?)
}

pub fn save_network(net: &Network, path: &Path) -> Result<(), LoadError> {
    Ok(std::fs::write(path, render_network(net))?)
}

pub fn load_network(path: &Path) -> Result<Network, LoadError> {
    parse_network(&std::fs::read_to_string(path)?)
}

/// Serialize input spikes; sorts a copy into (tick, core_y, core_x, axon)
/// order so equal spike sets always produce equal bytes.
pub fn render_inputs(spikes: &[InputSpike]) -> String {
    let mut sorted: Vec<&InputSpike> = spikes.iter().collect();
    sorted.sort_unstable_by_key(|s| (s.arrival_tick, s.core.y, s.core.x, s.axon));
    let mut out = String::with_capacity(16 + sorted.len() * 12);
    out.push_str(INPUTS_HEADER);
    out.push('\n');
    for s in sorted {
        let _ = writeln!(
            out,
            "{} {} {} {}",
            s.arrival_tick, s.core.x, s.core.y, s.axon
        );
    }
    out
}

/// Parse and validate an input stream against its grid.
pub fn parse_inputs(text: &str, cfg: &GridConfig) -> Result<Vec<InputSpike>, LoadError> {
    let mut lines = Lines::new(text);
    let (no, header) = lines.expect("format header")?;
    if header != INPUTS_HEADER {
        return Err(parse_err(no, format!("unknown format header '{header}'")));
    }
    let mut spikes = Vec::new();
    let mut prev_tick = 0u32;
    while let Some((no, line)) = lines.next() {
        let toks: Vec<&str> = line.split_ascii_whitespace().collect();
        if toks.len() != 4 {
            return Err(parse_err(
                no,
                format!("expected 4 values per spike, found {}", toks.len()),
            ));
        }
        let arrival_tick: u32 = parse_int(toks[0], no, "arrival tick")?;
        let x: u32 = parse_int(toks[1], no, "core x")?;
        let y: u32 = parse_int(toks[2], no, "core y")?;
        let axon: u32 = parse_int(toks[3], no, "axon")?;
        if arrival_tick == 0 || arrival_tick >= cfg.num_ticks {
            return Err(LoadError::InputTickRange {
                line: no,
                tick: arrival_tick,
                num_ticks: cfg.num_ticks,
            });
        }
        if arrival_tick < prev_tick {
            return Err(LoadError::InputUnsorted { line: no });
        }
        prev_tick = arrival_tick;
        if !cfg.contains(CoreCoord::new(x, y)) {
            return Err(LoadError::InputCoreRange {
                line: no,
                x,
                y,
                width: cfg.grid_width,
                height: cfg.grid_height,
            });
        }
        if axon >= cfg.axons_per_core {
            return Err(LoadError::InputAxonRange {
                line: no,
                axon,
                axons_per_core: cfg.axons_per_core,
            });
        }
        spikes.push(InputSpike {
            arrival_tick,
            core: CoreCoord::new(x, y),
            axon,
        });
    }
    Ok(spikes)
}

pub fn save_inputs(spikes: &[InputSpike], path: &Path) -> Result<(), LoadError> {
    Ok(std::fs::write(path, render_inputs(spikes))?)
}

pub fn load_inputs(path: &Path, cfg: &GridConfig) -> Result<Vec<InputSpike>, LoadError> {
    parse_inputs(&std::fs::read_to_string(path)?, cfg)
}

pub fn render_outputs(events: &[SpikeEvent]) -> String {
    debug_assert!(events
        .windows(2)
        .all(|w| w[0].sort_key() <= w[1].sort_key()));
    let mut out = String::with_capacity(events.len() * 12);
    for e in events {
        let _ = writeln!(out, "{} {} {} {}", e.tick, e.core_x, e.core_y, e.neuron);
    }
    out
}

pub fn parse_outputs(text: &str) -> Result<Vec<SpikeEvent>, LoadError> {
    let mut events = Vec::new();
    let mut lines = Lines::new(text);
    while let Some((no, line)) = lines.next() {
        let toks: Vec<&str> = line.split_ascii_whitespace().collect();
        if toks.len() != 4 {
            return Err(parse_err(
                no,
                format!("expected 4 values per event, found {}", toks.len()),
            ));
        }
        events.push(SpikeEvent {
            tick: parse_int(toks[0], no, "tick")?,
            core_x: parse_int(toks[1], no, "core x")?,
            core_y: parse_int(toks[2], no, "core y")?,
            neuron: parse_int(toks[3], no, "neuron")?,
        });
    }
    Ok(events)
}

pub fn write_outputs(events: &[SpikeEvent], path: &Path) -> Result<(), LoadError> {
    Ok(std::fs::write(path, render_outputs(events))?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{noisy_net, relay_net};

    #[test]
    fn network_files_round_trip() {
        for net in [relay_net(4), noisy_net(3, 2, 9)] {
            let text = render_network(&net);
            let parsed = parse_network(&text).unwrap();
            assert_eq!(parsed, net);
            // Byte stability: rendering the parse reproduces the bytes.
            assert_eq!(render_network(&parsed), text);
        }
    }

    #[test]
    fn minimal_network_loads() {
        let text = "spikemesh-network v1\n\
                    grid 1 1\n\
                    axons_per_core 1\n\
                    neurons_per_core 1\n\
                    weights_per_neuron 4\n\
                    max_tick_offset 1\n\
                    num_ticks 2\n\
                    bits 8 8 8 8 8\n\
                    core 0 0\n\
                    types 0\n\
                    n 0 0 1 0 1 0 0 0 0 0 0 1 0 1\n";
        let net = parse_network(text).unwrap();
        assert_eq!(net.config().num_cores(), 1);
        let entry = &net.cores()[0].neurons[0];
        assert_eq!(entry.weights, [1, 0, 0, 0]);
        assert!(entry.connections.get(0));
        assert!(!entry.output_flag);
    }

    #[test]
    fn oversized_weight_is_a_located_error() {
        let net = relay_net(4);
        // Core (0,0)'s neuron line; bump its first weight past 8 bits.
        let line = "n 0 0 1 0 1 0 0 0 1 0 0 1 0 10";
        let text = render_network(&net);
        assert!(text.contains(line));
        let text = text.replace(line, "n 0 0 1 0 200 0 0 0 1 0 0 1 0 10");
        let err = parse_network(&text).unwrap_err();
        match err {
            LoadError::Structure(NetworkError::ValueOverflow {
                field: "weight",
                value: 200,
                ..
            }) => {}
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn off_grid_destination_is_a_distinct_error() {
        let net = relay_net(4);
        // Point core (0,0)'s neuron nine cores east, off the 2x1 grid.
        let line = "n 0 0 1 0 1 0 0 0 1 0 0 1 0 10";
        let text = render_network(&net).replace(line, "n 0 0 1 0 1 0 0 0 9 0 0 1 0 10");
        let err = parse_network(&text).unwrap_err();
        assert!(
            matches!(err, LoadError::Structure(NetworkError::DestOffGrid { .. })),
            "{err:?}"
        );
    }

    #[test]
    fn truncated_and_malformed_files_are_parse_errors() {
        assert!(matches!(
            parse_network("spikemesh-network v2\n"),
            Err(LoadError::Parse { line: 1, .. })
        ));
        let missing = "spikemesh-network v1\ngrid 1 1\n";
        assert!(matches!(
            parse_network(missing),
            Err(LoadError::Parse { .. })
        ));
        let net = relay_net(4);
        let truncated = render_network(&net)
            .lines()
            .take(10)
            .collect::<Vec<_>>()
            .join("\n");
        assert!(matches!(
            parse_network(&truncated),
            Err(LoadError::Parse { .. })
        ));
    }

    #[test]
    fn input_files_round_trip_and_validate() {
        let net = noisy_net(2, 2, 9);
        let cfg = net.config();
        let spikes = vec![
            InputSpike {
                arrival_tick: 1,
                core: CoreCoord::new(1, 1),
                axon: 5,
            },
            InputSpike {
                arrival_tick: 3,
                core: CoreCoord::new(0, 1),
                axon: 69,
            },
            InputSpike {
                arrival_tick: 3,
                core: CoreCoord::new(0, 0),
                axon: 0,
            },
        ];
        let text = render_inputs(&spikes);
        let parsed = parse_inputs(&text, cfg).unwrap();
        // Rendering sorts; the parse is the sorted multiset.
        assert_eq!(parsed.len(), spikes.len());
        assert_eq!(render_inputs(&parsed), text);

        let bad_tick = format!("{INPUTS_HEADER}\n0 0 0 0\n");
        assert!(matches!(
            parse_inputs(&bad_tick, cfg),
            Err(LoadError::InputTickRange {
                line: 2,
                tick: 0,
                ..
            })
        ));
        let bad_order = format!("{INPUTS_HEADER}\n3 0 0 0\n1 0 0 0\n");
        assert!(matches!(
            parse_inputs(&bad_order, cfg),
            Err(LoadError::InputUnsorted { line: 3 })
        ));
        let bad_core = format!("{INPUTS_HEADER}\n1 5 0 0\n");
        assert!(matches!(
            parse_inputs(&bad_core, cfg),
            Err(LoadError::InputCoreRange { .. })
        ));
        let bad_axon = format!("{INPUTS_HEADER}\n1 0 0 70\n");
        assert!(matches!(
            parse_inputs(&bad_axon, cfg),
            Err(LoadError::InputAxonRange { .. })
        ));
    }

    #[test]
    fn output_encoding_is_fixed() {
        assert_eq!(render_outputs(&[]), "");
        let one = SpikeEvent {
            tick: 7,
            core_x: 0,
            core_y: 0,
            neuron: 5,
        };
        assert_eq!(render_outputs(&[one]), "7 0 0 5\n");
        let parsed = parse_outputs("7 0 0 5\n").unwrap();
        assert_eq!(parsed, [one]);
    }
}
