//! Command-line front end.
//!
//! Exit codes: 0 success (and verify PASS), 1 verify FAIL, 2 usage or
//! load errors. Simulation runs one at a time; all parallelism lives
//! inside the engine.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use spikemesh::harness::{self, SweepOutcome, VerifyOutcome};
use spikemesh::inputs::InputQueue;
use spikemesh::io;
use spikemesh::network::Network;
use spikemesh::parallel::{run_parallel, ParallelPlan, Strategy};
use spikemesh::serial::run_serial;
use spikemesh::workload::{generate, WorkloadParams};

#[derive(Parser)]
#[command(
    name = "spikemesh",
    about = "Tick-accurate simulator for a 2D mesh of neuromorphic cores",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one workload and optionally write its output spikes.
    Run(RunArgs),
    /// Check that every parallel plan reproduces the serial output byte for byte.
    Verify(VerifyArgs),
    /// Time the serial engine against a set of parallel plans.
    Sweep(SweepArgs),
    /// Generate a seeded synthetic workload.
    Generate(GenerateArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EngineKind {
    Serial,
    Parallel,
}

#[derive(Args)]
struct RunArgs {
    /// Network description file.
    network: PathBuf,
    /// Input spike stream file.
    inputs: PathBuf,
    #[arg(long, value_enum, default_value = "serial")]
    engine: EngineKind,
    /// Parallel work split (parallel engine only).
    #[arg(long, default_value_t = Strategy::GridLevel)]
    strategy: Strategy,
    /// Worker thread count (parallel engine only).
    #[arg(long, default_value_t = 4)]
    workers: usize,
    /// Neurons per parallel work item (parallel engine only).
    #[arg(long, default_value_t = 64)]
    chunk: usize,
    /// Where to write the output spike file.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print the per-phase time breakdown.
    #[arg(long)]
    profile: bool,
}

#[derive(Args)]
struct VerifyArgs {
    network: PathBuf,
    inputs: PathBuf,
    /// Strategies to check, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = Strategy::ALL)]
    strategy: Vec<Strategy>,
    /// Worker counts to check, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = [1, 2, 4, 8])]
    workers: Vec<usize>,
    /// Chunk sizes to check, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = [1, 64])]
    chunk: Vec<usize>,
    /// Testing hook: perturb every plan's events before comparison so the
    /// FAIL path is exercisable against a correct build.
    #[arg(long, hide = true)]
    corrupt_candidate: bool,
}

#[derive(Args)]
struct SweepArgs {
    network: PathBuf,
    inputs: PathBuf,
    #[arg(long, value_delimiter = ',', default_values_t = Strategy::ALL)]
    strategy: Vec<Strategy>,
    #[arg(long, value_delimiter = ',', default_values_t = [1, 2, 4, 8])]
    workers: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = [64])]
    chunk: Vec<usize>,
    /// Timed repetitions per configuration; medians are reported.
    #[arg(long, default_value_t = 3)]
    repetitions: usize,
}

#[derive(Args)]
struct GenerateArgs {
    /// Named shape instead of explicit dimensions.
    #[arg(long, value_parser = WorkloadParams::PRESET_NAMES)]
    shape: Option<String>,
    #[arg(long, default_value_t = 2, conflicts_with = "shape")]
    grid_width: u32,
    #[arg(long, default_value_t = 2, conflicts_with = "shape")]
    grid_height: u32,
    #[arg(long, default_value_t = 16, conflicts_with = "shape")]
    axons_per_core: u32,
    #[arg(long, default_value_t = 16, conflicts_with = "shape")]
    neurons_per_core: u32,
    #[arg(long, default_value_t = 32, conflicts_with = "shape")]
    ticks: u32,
    /// Probability each crossbar point is connected (default 0.5).
    #[arg(long)]
    density: Option<f64>,
    /// Expected input spikes per axon per tick (default 0.05; named
    /// shapes may pin their own rate).
    #[arg(long)]
    spike_rate: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output path prefix; writes <prefix>.network.txt and <prefix>.inputs.txt.
    #[arg(long)]
    out: PathBuf,
}

/// Load failures exit 2; everything in them is user-fixable.
fn load_workload(network: &Path, inputs: &Path) -> Result<(Network, InputQueue), String> {
    let net = io::load_network(network)
        .map_err(|e| format!("failed to load network {}: {e}", network.display()))?;
    let spikes = io::load_inputs(inputs, net.config())
        .map_err(|e| format!("failed to load inputs {}: {e}", inputs.display()))?;
    let queue = InputQueue::from_arrivals(net.config(), &spikes)
        .map_err(|e| format!("failed to stage inputs {}: {e}", inputs.display()))?;
    Ok((net, queue))
}

fn cmd_run(args: &RunArgs) -> Result<ExitCode, String> {
    let (net, queue) = load_workload(&args.network, &args.inputs)?;
    let result = match args.engine {
        EngineKind::Serial => run_serial(&net, queue),
        EngineKind::Parallel => {
            let plan = ParallelPlan::new(args.strategy, args.workers, args.chunk);
            run_parallel(&net, queue, plan)
        }
    };
    let (events, report) = result.map_err(|e| format!("simulation failed: {e}"))?;
    if let Some(out) = &args.out {
        io::write_outputs(&events, out)
            .map_err(|e| format!("failed to write {}: {e}", out.display()))?;
    }
    if args.profile {
        print!("{}", report.render());
    } else {
        println!(
            "{}: {} ticks, {} output spikes, {:.3} ms",
            report.engine,
            report.ticks,
            report.output_spikes,
            report.total.as_secs_f64() * 1e3
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn plan_matrix(strategies: &[Strategy], workers: &[usize], chunks: &[usize]) -> Vec<ParallelPlan> {
    let mut plans = Vec::new();
    for &s in strategies {
        for &w in workers {
            for &c in chunks {
                plans.push(ParallelPlan::new(s, w, c));
            }
        }
    }
    plans
}

fn print_verify(outcome: &VerifyOutcome) {
    for v in &outcome.verdicts {
        if v.pass {
            println!("PASS {}", v.plan.describe());
        } else {
            println!("FAIL {}", v.plan.describe());
            if let Some(d) = &v.divergence {
                println!("     first divergence at {d}");
            }
        }
    }
    let failed = outcome.verdicts.iter().filter(|v| !v.pass).count();
    if failed == 0 {
        println!(
            "PASS: {} plans match the serial output ({} events)",
            outcome.verdicts.len(),
            outcome.serial_events
        );
    } else {
        println!(
            "FAIL: {failed} of {} plans diverged",
            outcome.verdicts.len()
        );
    }
}

fn cmd_verify(args: &VerifyArgs) -> Result<ExitCode, String> {
    if args.strategy.is_empty() || args.workers.is_empty() || args.chunk.is_empty() {
        return Err("verify needs at least one strategy, worker count, and chunk size".into());
    }
    let (net, queue) = load_workload(&args.network, &args.inputs)?;
    let plans = plan_matrix(&args.strategy, &args.workers, &args.chunk);
    let corrupt =
        |_: usize, events: &mut Vec<spikemesh::neuron::SpikeEvent>| match events.first_mut() {
            Some(e) => e.neuron += 1,
            None => events.push(spikemesh::neuron::SpikeEvent {
                tick: 0,
                core_x: 0,
                core_y: 0,
                neuron: 0,
            }),
        };
    let mutate: Option<harness::EventMutator> = args.corrupt_candidate.then_some(&corrupt);
    let outcome = harness::verify_mutated(&net, &queue, &plans, mutate)
        .map_err(|e| format!("simulation failed: {e}"))?;
    print_verify(&outcome);
    Ok(if outcome.all_pass() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn print_sweep(outcome: &SweepOutcome) {
    // Machine-readable block: fixed column order, one row per plan.
    println!("plan\tstrategy\tworkers\tchunk\tmedian_us\tspeedup");
    println!(
        "serial\tserial\t1\t-\t{}\t1.00",
        outcome.serial_median.as_micros()
    );
    for row in &outcome.rows {
        println!(
            "parallel\t{}\t{}\t{}\t{}\t{:.2}",
            row.plan.strategy,
            row.plan.workers,
            row.plan.chunk,
            row.median.as_micros(),
            row.speedup
        );
    }
    let best = outcome
        .rows
        .iter()
        .max_by(|a, b| a.speedup.total_cmp(&b.speedup));
    println!();
    println!(
        "serial median {:.3} ms over {} repetitions",
        outcome.serial_median.as_secs_f64() * 1e3,
        outcome.repetitions
    );
    if let Some(best) = best {
        println!(
            "best plan: {} at {:.2}x ({:.3} ms)",
            best.plan.describe(),
            best.speedup,
            best.median.as_secs_f64() * 1e3
        );
    }
}

fn cmd_sweep(args: &SweepArgs) -> Result<ExitCode, String> {
    if args.repetitions < 1 {
        return Err("--repetitions must be at least 1".into());
    }
    if args.strategy.is_empty() || args.workers.is_empty() || args.chunk.is_empty() {
        return Err("sweep needs at least one strategy, worker count, and chunk size".into());
    }
    let (net, queue) = load_workload(&args.network, &args.inputs)?;
    let plans = plan_matrix(&args.strategy, &args.workers, &args.chunk);
    let outcome = harness::sweep(&net, &queue, &plans, args.repetitions)
        .map_err(|e| format!("simulation failed: {e}"))?;
    print_sweep(&outcome);
    Ok(ExitCode::SUCCESS)
}

fn cmd_generate(args: &GenerateArgs) -> Result<ExitCode, String> {
    let mut params = match &args.shape {
        Some(name) => {
            WorkloadParams::preset(name).ok_or_else(|| format!("unknown shape '{name}'"))?
        }
        None => {
            let mut p = WorkloadParams::new(args.grid_width, args.grid_height, args.ticks);
            p.axons_per_core = args.axons_per_core;
            p.neurons_per_core = args.neurons_per_core;
            p
        }
    };
    if let Some(density) = args.density {
        params.density = density;
    }
    if let Some(rate) = args.spike_rate {
        params.spike_rate = rate;
    }
    params.seed = args.seed;
    let (net, spikes) =
        generate(&params).map_err(|e| format!("invalid workload parameters: {e}"))?;
    let prefix = args.out.as_os_str().to_string_lossy();
    let net_path = PathBuf::from(format!("{prefix}.network.txt"));
    let in_path = PathBuf::from(format!("{prefix}.inputs.txt"));
    io::save_network(&net, &net_path)
        .map_err(|e| format!("failed to write {}: {e}", net_path.display()))?;
    io::save_inputs(&spikes, &in_path)
        .map_err(|e| format!("failed to write {}: {e}", in_path.display()))?;
    println!(
        "wrote {} ({} cores) and {} ({} input spikes)",
        net_path.display(),
        net.config().num_cores(),
        in_path.display(),
        spikes.len()
    );
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Generate(args) => cmd_generate(args),
    };
    match result {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
