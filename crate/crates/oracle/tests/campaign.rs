//! Randomized differential campaign: many tiny seeded workloads, full
//! state compared after every tick between the brute-force reference,
//! the serial engine, and a rotating parallel configuration.

use spikemesh::inputs::InputQueue;
use spikemesh::parallel::{ParallelEngine, ParallelPlan, Strategy};
use spikemesh::serial::SimulationState;
use spikemesh::workload::{generate, DetRng, WorkloadParams};
use spikemesh_oracle::{brute_force_tick, OracleTrace};

/// Tiny shapes only: everything at most 2x2 cores, 8 axons, 8 neurons,
/// 20 ticks, so the naive oracle stays instant.
fn tiny_params(rng: &mut DetRng, seed: u64) -> WorkloadParams {
    let mut p = WorkloadParams::new(1 + rng.below(2) as u32, 1 + rng.below(2) as u32, 20);
    p.axons_per_core = 1 + rng.below(8) as u32;
    p.neurons_per_core = 1 + rng.below(8) as u32;
    p.max_tick_offset = 1 + rng.below(4) as u32;
    p.density = [0.0, 0.2, 0.5, 1.0][rng.below(4) as usize];
    p.spike_rate = [0.0, 0.1, 0.3][rng.below(3) as usize];
    p.output_fraction = 0.4;
    p.seed = seed;
    p
}

#[test]
fn thousand_tiny_workloads_show_zero_state_divergences() {
    let mut shape_rng = DetRng::new(0x0c_a11ed);
    let plans: Vec<ParallelPlan> = Strategy::ALL
        .iter()
        .flat_map(|&s| [ParallelPlan::new(s, 1, 1), ParallelPlan::new(s, 4, 2)])
        .collect();
    for i in 0..1000u64 {
        let params = tiny_params(&mut shape_rng, 1000 + i);
        let (net, arrivals) = generate(&params).expect("tiny shapes are valid");
        let queue = InputQueue::from_arrivals(net.config(), &arrivals).unwrap();

        let mut serial = SimulationState::new(&net, queue.clone());
        let plan = plans[(i % plans.len() as u64) as usize];
        let mut par = ParallelEngine::new(&net, queue, plan);
        let mut state = OracleTrace::fresh(&net);
        for tick in 0..net.config().num_ticks {
            state = brute_force_tick(&net, &arrivals, &state);
            serial.run_tick().unwrap();
            par.step().unwrap();
            let want = state.snapshot(&net);
            if let Some(diff) = want.first_difference(&serial.snapshot()) {
                panic!("workload {i} tick {tick}: serial diverged: {diff}\nparams: {params:?}");
            }
            if let Some(diff) = want.first_difference(&par.snapshot()) {
                panic!(
                    "workload {i} tick {tick}: {} diverged: {diff}\nparams: {params:?}",
                    plan.describe()
                );
            }
        }
    }
}
