//! Task config files: one human-editable TOML document per task carrying
//! the environment parameters, preference list, policy and training
//! settings, disturbance spec, and seeds. Parsing round-trips losslessly.

use crate::error::{Error, Result};
use crate::features::{
    FeatureSet, Preference, PreferenceKind, RepellerForm, Selector, Subspace, Target,
    WeightVector,
};
use crate::learning::{make_training_domain, TrainingConfig, TrainingDomain};
use crate::mdp::GaussianDisturbance;
use crate::policies::{PolicyConfig, PolicyMethod};
use crate::tasks::{
    CargoWorld, Obstacle, ObstacleMode, ObstacleWorld, PendulumWorld, PreyKind, PreyTrajectory,
    PursuitWorld, RendezvousWorld, Task,
};
use serde::{Deserialize, Serialize};

fn config_err(field: &str, message: impl Into<String>) -> Error {
    Error::Config {
        field: field.to_string(),
        message: message.into(),
    }
}

/// Scalar broadcast over all axes, or one value per axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScalarOrVec {
    Scalar(f64),
    Vec(Vec<f64>),
}

impl ScalarOrVec {
    pub fn expand(&self, axes: usize, field: &str) -> Result<Vec<f64>> {
        match self {
            ScalarOrVec::Scalar(v) => Ok(vec![*v; axes]),
            ScalarOrVec::Vec(v) if v.len() == axes => Ok(v.clone()),
            ScalarOrVec::Vec(v) => Err(config_err(
                field,
                format!("expected {axes} entries, got {}", v.len()),
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisturbanceSpec {
    pub mean: ScalarOrVec,
    pub std: ScalarOrVec,
}

impl DisturbanceSpec {
    pub fn build(&self, axes: usize) -> Result<GaussianDisturbance> {
        GaussianDisturbance::new(
            self.mean.expand(axes, "disturbance.mean")?,
            self.std.expand(axes, "disturbance.std")?,
        )
        .map_err(|e| config_err("disturbance", e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicySection {
    pub method: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples_per_axis: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hoot_levels: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hoot_branching: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lookahead_steps: Option<usize>,
}

impl PolicySection {
    pub fn build(&self) -> Result<PolicyConfig> {
        let method = parse_method(&self.method)?;
        let mut cfg = match method {
            PolicyMethod::Das => PolicyConfig::das(),
            PolicyMethod::Lsapa => PolicyConfig::lsapa(100),
            PolicyMethod::HootGrid => PolicyConfig::hoot(),
        };
        if let Some(n) = self.samples_per_axis {
            cfg.samples_per_axis = n;
        }
        if let Some(n) = self.hoot_levels {
            cfg.hoot_levels = n;
        }
        if let Some(n) = self.hoot_branching {
            cfg.hoot_branching = n;
        }
        if let Some(n) = self.lookahead_steps {
            cfg.lookahead_steps = n;
        }
        cfg.validate()
            .map_err(|e| config_err("policy", e.to_string()))?;
        Ok(cfg)
    }
}

pub fn parse_method(name: &str) -> Result<PolicyMethod> {
    Ok(match name {
        "das" => PolicyMethod::Das,
        "lsapa" => PolicyMethod::Lsapa,
        "hoot-grid" | "hoot" => PolicyMethod::HootGrid,
        other => {
            return Err(Error::UnknownKind {
                what: "policy method",
                got: other.to_string(),
            })
        }
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct TrainingSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples_per_iteration: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub goal_radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_mc: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eval_count: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eval_horizon: Option<f64>,
    /// Box inflation around the intent targets (meters).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub margin: Option<f64>,
    /// Pursuit-only: training team size.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub agents: Option<usize>,
}

impl TrainingSection {
    pub fn build(&self, seed: u64) -> TrainingConfig {
        let mut cfg = TrainingConfig {
            seed,
            ..TrainingConfig::default()
        };
        if let Some(v) = self.iterations {
            cfg.iterations = v;
        }
        if let Some(v) = self.samples_per_iteration {
            cfg.samples_per_iteration = v;
        }
        if let Some(v) = self.gamma {
            cfg.gamma = v;
        }
        if let Some(v) = self.goal_radius {
            cfg.goal_radius = v;
        }
        if let Some(v) = self.n_mc {
            cfg.n_mc = v;
        }
        if let Some(v) = self.eval_count {
            cfg.eval_count = v;
        }
        if let Some(v) = self.eval_horizon {
            cfg.eval_horizon_s = v;
        }
        cfg
    }

    pub fn margin(&self) -> f64 {
        self.margin.unwrap_or(0.4)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TargetSpec {
    Point(Vec<f64>),
    Reference(usize),
    Nearest(usize),
    Relation { other: usize, offset: Vec<f64> },
    Mutual,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreferenceSpec {
    pub kind: String,
    pub agents: Vec<usize>,
    pub subspace: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coords: Option<Vec<usize>>,
    pub target: TargetSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub form: Option<String>,
}

impl PreferenceSpec {
    pub fn build(&self, index: usize) -> Result<Preference> {
        let field = |name: &str| format!("preference[{index}].{name}");
        let kind = match self.kind.as_str() {
            "attractor" => PreferenceKind::Attractor,
            "repeller" => PreferenceKind::Repeller,
            other => return Err(config_err(&field("kind"), format!("unknown kind `{other}`"))),
        };
        let subspace = match self.subspace.as_str() {
            "position" => Subspace::Position,
            "velocity" => Subspace::Velocity,
            other => {
                return Err(config_err(
                    &field("subspace"),
                    format!("unknown subspace `{other}`"),
                ))
            }
        };
        let form = match self.form.as_deref() {
            None | Some("per-agent") => RepellerForm::PerAgent,
            Some("pairwise-shared") => RepellerForm::PairwiseShared,
            Some(other) => {
                return Err(config_err(&field("form"), format!("unknown form `{other}`")))
            }
        };
        let target = match &self.target {
            TargetSpec::Point(p) => Target::Point(p.clone()),
            TargetSpec::Reference(r) => Target::Reference(*r),
            TargetSpec::Nearest(r) => Target::NearestOf(*r),
            TargetSpec::Relation { other, offset } => Target::Relation {
                other: *other,
                offset: offset.clone(),
            },
            TargetSpec::Mutual => Target::Mutual,
        };
        Ok(Preference {
            kind,
            target,
            selector: Selector {
                subspace,
                coords: self.coords.clone(),
            },
            agents: self.agents.clone(),
            beta: self.beta.unwrap_or(1.0),
            form,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct PursuitSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub agents: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prey: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spawn_radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spiral_radial_rate: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spiral_angular_rate: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lemniscate_amplitude: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lemniscate_angular_rate: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub line_velocity: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub brownian_sigma: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct ObstaclesSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resample_period: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub goal_radius: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct CargoSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub goal: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct PendulumSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phase_switch: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_displacement_deg: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DynamicsSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightsSection {
    pub theta: Vec<f64>,
}

/// The on-disk task description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskConfig {
    pub task: String,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dynamics: Option<DynamicsSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub policy: Option<PolicySection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub disturbance: Option<DisturbanceSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub training: Option<TrainingSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<WeightsSection>,
    #[serde(default, skip_serializing_if = "Vec::is_empty", rename = "preference")]
    pub preferences: Vec<PreferenceSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pursuit: Option<PursuitSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub obstacles: Option<ObstaclesSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cargo: Option<CargoSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rendezvous: Option<RendezvousSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pendulum: Option<PendulumSection>,
}

/// Rendezvous currently has no tunables beyond the shared sections.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct RendezvousSection {}

impl TaskConfig {
    pub fn parse_str(text: &str) -> Result<Self> {
        let cfg: TaskConfig = toml::from_str(text).map_err(|e| Error::Config {
            field: "<document>".into(),
            message: e.to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse_str(&text)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config {
            field: "<document>".into(),
            message: e.to_string(),
        })
    }

    pub fn validate(&self) -> Result<()> {
        match self.task.as_str() {
            "pursuit" | "obstacles" | "cargo" | "rendezvous" | "pendulum" => {}
            other => {
                return Err(Error::UnknownKind {
                    what: "task",
                    got: other.to_string(),
                })
            }
        }
        if let Some(h) = self.horizon {
            if h < 0.0 {
                return Err(config_err("horizon", "must be non-negative"));
            }
        }
        for (i, p) in self.preferences.iter().enumerate() {
            p.build(i)?;
        }
        Ok(())
    }

    pub fn dt(&self) -> f64 {
        let default = if self.task == "obstacles" { 0.1 } else { 0.02 };
        self.dynamics
            .as_ref()
            .and_then(|d| d.dt)
            .unwrap_or(default)
    }

    pub fn horizon(&self) -> f64 {
        self.horizon.unwrap_or(match self.task.as_str() {
            "pursuit" => 20.0,
            "obstacles" => 250.0,
            "cargo" => 12.0,
            "rendezvous" => 15.0,
            "pendulum" => 10.0,
            _ => 20.0,
        })
    }

    /// Per-task default controller settings; the `[policy]` table overrides.
    pub fn policy(&self) -> Result<PolicyConfig> {
        if let Some(section) = &self.policy {
            return section.build();
        }
        Ok(match self.task.as_str() {
            "pursuit" => PolicyConfig::das().with_lookahead(100),
            "obstacles" => PolicyConfig::hoot(),
            "pendulum" => PolicyConfig::lsapa(100).with_lookahead(25),
            _ => PolicyConfig::lsapa(100),
        })
    }

    pub fn published_weights(&self) -> WeightVector {
        let theta = match self.task.as_str() {
            "pursuit" => crate::tasks::pursuit::PURSUIT_WEIGHTS.to_vec(),
            "obstacles" => crate::tasks::obstacles::OBSTACLE_WEIGHTS.to_vec(),
            "cargo" => crate::tasks::cargo::CARGO_WEIGHTS.to_vec(),
            "rendezvous" => crate::tasks::rendezvous::RENDEZVOUS_WEIGHTS.to_vec(),
            "pendulum" => crate::tasks::pendulum::PENDULUM_PS_WEIGHTS.to_vec(),
            _ => Vec::new(),
        };
        WeightVector { theta }
    }

    pub fn weights(&self) -> WeightVector {
        match &self.weights {
            Some(w) => WeightVector {
                theta: w.theta.clone(),
            },
            None => self.published_weights(),
        }
    }

    pub fn disturbance(&self, axes: usize) -> Result<Option<GaussianDisturbance>> {
        match &self.disturbance {
            Some(spec) => {
                let d = spec.build(axes)?;
                Ok(if d.is_zero() { None } else { Some(d) })
            }
            None => Ok(None),
        }
    }

    fn custom_features(&self, layout: &crate::features::StateLayout) -> Result<Option<FeatureSet>> {
        if self.preferences.is_empty() {
            return Ok(None);
        }
        let prefs: Result<Vec<Preference>> = self
            .preferences
            .iter()
            .enumerate()
            .map(|(i, p)| p.build(i))
            .collect();
        Ok(Some(FeatureSet::new(prefs?, layout.clone())?))
    }

    /// Build the planning instance of the task.
    pub fn build_task(&self) -> Result<Box<dyn Task>> {
        let dt = self.dt();
        let task: Box<dyn Task> = match self.task.as_str() {
            "pursuit" => {
                let section = self.pursuit.clone().unwrap_or_default();
                let kind = PreyKind::parse(section.prey.as_deref().unwrap_or("spiral"))?;
                let mut prey = PreyTrajectory::new(kind, dt, self.seed, self.horizon() + 5.0);
                if let Some(v) = section.spiral_radial_rate {
                    prey.radial_rate = v;
                }
                if kind == PreyKind::Spiral {
                    if let Some(v) = section.spiral_angular_rate {
                        prey.angular_rate = v;
                    }
                }
                if let Some(v) = section.lemniscate_amplitude {
                    prey.amplitude = v;
                }
                if kind == PreyKind::Lemniscate {
                    if let Some(v) = section.lemniscate_angular_rate {
                        prey.angular_rate = v;
                    }
                }
                if let Some(v) = &section.line_velocity {
                    if v.len() != 2 {
                        return Err(config_err("pursuit.line_velocity", "needs 2 entries"));
                    }
                    prey.line_velocity = [v[0], v[1]];
                }
                if let Some(v) = section.brownian_sigma {
                    prey.brownian_sigma = v;
                }
                let mut world = PursuitWorld::new(section.agents.unwrap_or(25), dt, prey)?;
                if let Some(r) = section.spawn_radius {
                    world = world.with_spawn_radius(r);
                }
                if let Some(features) = self.custom_features(world.features().layout())? {
                    world.replace_features(features)?;
                }
                Box::new(world)
            }
            "obstacles" => {
                let section = self.obstacles.clone().unwrap_or_default();
                let mut world = ObstacleWorld::new(section.count.unwrap_or(300), dt)?;
                if let Some(v) = section.resample_period {
                    world.resample_period = v;
                }
                if let Some(v) = section.goal_radius {
                    world.goal_radius = v;
                }
                if let Some(features) = self.custom_features(world.features().layout())? {
                    world.replace_features(features)?;
                }
                Box::new(world)
            }
            "cargo" => {
                let section = self.cargo.clone().unwrap_or_default();
                let goal = match section.goal {
                    Some(g) if g.len() == 3 => [g[0], g[1], g[2]],
                    Some(_) => return Err(config_err("cargo.goal", "needs 3 entries")),
                    None => [0.0, 0.0, 1.2],
                };
                let mut world = CargoWorld::new(dt, goal)?;
                if let Some(features) = self.custom_features(world.features().layout())? {
                    world.replace_features(features)?;
                }
                Box::new(world)
            }
            "rendezvous" => {
                let mut world = RendezvousWorld::new(dt)?;
                if let Some(features) = self.custom_features(world.features().layout())? {
                    world.replace_features(features)?;
                }
                Box::new(world)
            }
            "pendulum" => {
                let section = self.pendulum.clone().unwrap_or_default();
                let mut world = PendulumWorld::new(dt)?;
                if let Some(v) = section.phase_switch {
                    world.phase_switch = v;
                }
                if let Some(v) = section.initial_displacement_deg {
                    world.initial_displacement_deg = v;
                }
                if let Some(features) = self.custom_features(world.features().layout())? {
                    world.replace_features(features)?;
                }
                Box::new(world)
            }
            _ => unreachable!("validated task name"),
        };
        Ok(task)
    }

    /// Build the reduced training variant of the task (small team, static
    /// references) with the training goal tolerance installed.
    pub fn build_training_task(&self) -> Result<Box<dyn Task>> {
        let dt = self.dt();
        let training = self.training.clone().unwrap_or_default();
        let goal_radius = training.goal_radius.unwrap_or(0.05);
        let tol = goal_radius * goal_radius;
        let task: Box<dyn Task> = match self.task.as_str() {
            "pursuit" => {
                let agents = training.agents.unwrap_or(3);
                let prey = PreyTrajectory::new(PreyKind::Static, dt, self.seed, 60.0);
                let world =
                    PursuitWorld::new(agents, dt, prey)?.with_goal_tolerance(Some(tol));
                Box::new(world)
            }
            "obstacles" => {
                let mut world = ObstacleWorld::new(4, dt)?;
                world.goal = [0.0, 0.0];
                world.start = [0.0, 4.5];
                world.goal_radius = goal_radius;
                world.install_static_ring(3.0);
                world.rebuild_features()?;
                Box::new(world)
            }
            "cargo" => {
                let mut world = CargoWorld::new(dt, [0.0, 0.0, 0.0])?;
                world.goal_tolerance = tol;
                Box::new(world)
            }
            "rendezvous" => {
                let mut world = RendezvousWorld::new(dt)?;
                world.goal_tolerance = tol;
                Box::new(world)
            }
            "pendulum" => Box::new(PendulumWorld::new(dt)?),
            _ => unreachable!("validated task name"),
        };
        Ok(task)
    }

    pub fn training_config(&self) -> TrainingConfig {
        self.training
            .clone()
            .unwrap_or_default()
            .build(self.seed)
    }

    /// Training domain for the training task instance.
    pub fn training_domain(&self, task: &dyn Task) -> Result<TrainingDomain> {
        let training = self.training.clone().unwrap_or_default();
        let margin = training.margin();
        let speed_limit = if self.task == "obstacles" {
            Some(0.37)
        } else {
            None
        };
        let s0 = crate::mdp::State::zeros(task.dynamics().state_dim());
        let refs = task.refs(0.0, &s0);
        let bounds = task.action_bounds(&s0);
        let action_max: Vec<f64> = bounds.hi.clone();
        make_training_domain(task.features(), &refs, margin, speed_limit, &action_max)
    }
}

/// Explicit initial conditions for the plan command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitialConditionsFile {
    #[serde(rename = "state")]
    pub states: Vec<StateSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateSpec {
    pub coords: Vec<f64>,
}

impl InitialConditionsFile {
    pub fn from_path(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        toml::from_str(&text).map_err(|e| Error::Config {
            field: "<initial-conditions>".into(),
            message: e.to_string(),
        })
    }
}

/// Run the full training pipeline for a config: Monte-Carlo repeats of
/// approximate value iteration on the reduced task, each evaluated closed
/// loop, returning the fittest weights.
pub fn run_training(
    cfg: &TaskConfig,
    tcfg: &crate::learning::TrainingConfig,
) -> Result<crate::learning::TrainingReport> {
    let setup_task = cfg.build_training_task()?;
    let mut eval_task = cfg.build_training_task()?;
    let domain = cfg.training_domain(setup_task.as_ref())?;
    let s0 = crate::mdp::State::zeros(setup_task.dynamics().state_dim());
    let refs = setup_task.refs(0.0, &s0);
    let setup = crate::learning::TrainingSetup {
        dynamics: setup_task.dynamics(),
        features: setup_task.features(),
        refs,
        domain,
    };
    // Evaluation mirrors the training backup: plain one-step axial search.
    let controller = crate::planner::Controller::Value(PolicyConfig::das());
    crate::learning::monte_carlo_train(eval_task.as_mut(), &setup, tcfg, &controller)
}

/// Trained-weights artifact written by the train command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightsFile {
    pub task: String,
    pub theta: Vec<f64>,
    pub seed: u64,
    pub meta: WeightsMeta,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightsMeta {
    pub n_mc: usize,
    pub fittest_trial: usize,
    pub success_rate: f64,
    /// Mean time-to-goal among successes; negative when nothing succeeded.
    pub mean_duration: f64,
    pub intercept: f64,
    pub iteration_norms: Vec<f64>,
}

impl WeightsFile {
    pub fn parse_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config {
            field: "<weights>".into(),
            message: e.to_string(),
        })
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse_str(&text)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config {
            field: "<weights>".into(),
            message: e.to_string(),
        })
    }

    pub fn weight_vector(&self) -> WeightVector {
        WeightVector {
            theta: self.theta.clone(),
        }
    }
}

impl ObstacleWorld {
    /// Four motionless obstacles on a ring, never resampled; used as the
    /// reduced training environment.
    pub fn install_static_ring(&mut self, radius: f64) {
        self.n_obstacles = 4;
        self.resample_period = f64::INFINITY;
        self.obstacles = [[radius, 0.0], [0.0, radius], [0.0, -radius], [-radius, 0.0]]
            .iter()
            .map(|&pos| Obstacle {
                pos,
                heading: 0.0,
                mode: ObstacleMode::Linear,
                speed: 0.0,
                angular: 0.0,
                swerve_limit: 0.0,
                swerve_offset: 0.0,
                swerve_dir: 1.0,
            })
            .collect();
        self.static_env = true;
    }
}
