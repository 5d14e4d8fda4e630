//! Preference-balancing motion planning.
//!
//! Tasks are described as attractor and repeller intents over a joint
//! multi-robot position-velocity state. Intents become squared-distance /
//! inverse-squared-distance features; training fits linear weights over
//! them on a small domain by approximate value iteration; planning runs a
//! closed feedback loop that greedily maximizes the learned value with
//! per-axis quadratic action selection (deterministic, or least-squares
//! over a disturbance-injecting simulator for stochastic rejection) or
//! hierarchical grid search.

pub mod analysis;
pub mod config;
pub mod error;
pub mod features;
pub mod learning;
pub mod linalg;
pub mod mdp;
pub mod planner;
pub mod policies;
pub mod rng;
pub mod tasks;

pub use error::{Error, Result};
pub use features::{
    attractor_feature, feature_vector, q_value, repeller_feature, value, FeatureSet, Preference,
    PreferenceKind, RepellerForm, RobotBlock, Selector, StateLayout, Subspace, Target,
    WeightVector,
};
pub use learning::{
    avi_train, evaluate_policy, make_training_domain, monte_carlo_train, select_fittest,
    Candidate, TrainingConfig, TrainingDomain, TrainingReport, TrainingSetup,
};
pub use mdp::{
    estimate_disturbance, sample_disturbance, step, step_disturbed, Action,
    ControlAffineDynamics, DoubleIntegrator, GaussianDisturbance, State,
};
pub use planner::{plan_trajectory, Controller, Outcome, Trajectory, TrajectoryStep};
pub use policies::{
    axis_maximum, das_select, fit_axial_quadratic, hoot_select, lsapa_select, ActionBounds,
    AxialQ, AxialQuadratic, GenericAxialQ, PolicyConfig, PolicyMethod, SelectionDetail,
};
pub use rng::{master_rng, trial_rng, PearlRng};
pub use tasks::{
    boids_policy, cargo_step, gaussian_apf_policy, obstacle_step, pendulum_step, prey_reference,
    rendezvous_step, CargoWorld, Obstacle, ObstacleMode, ObstacleWorld, PendulumWorld, PreyKind,
    PreyTrajectory, PursuitWorld, RendezvousWorld, Task,
};
