//! Shared fixtures for the criterion benchmarks.

use pearl::tasks::{PreyKind, PreyTrajectory, PursuitWorld, Task};
use pearl::{trial_rng, CargoWorld, PearlRng, State};

pub fn pursuit_fixture(agents: usize) -> (PursuitWorld, State, PearlRng) {
    let prey = PreyTrajectory::new(PreyKind::Spiral, 0.02, 0, 30.0);
    let mut world = PursuitWorld::new(agents, 0.02, prey).expect("pursuit world");
    let mut rng = trial_rng(1234, agents as u64);
    let s0 = world.reset(&mut rng);
    (world, s0, rng)
}

pub fn cargo_fixture() -> (CargoWorld, State, PearlRng) {
    let mut world = CargoWorld::new(0.02, [0.0, 0.0, 1.2]).expect("cargo world");
    let mut rng = trial_rng(77, 0);
    let s0 = world.reset(&mut rng);
    (world, s0, rng)
}
