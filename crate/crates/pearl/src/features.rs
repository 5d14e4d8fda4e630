//! Task-preference features: build the feature vector from user intents and
//! evaluate the linear state-value function V and its action-value Q.
//!
//! A preference is an intent: attract some agents toward a target, or repel
//! them from it. Targets can be fixed points, per-step references (a moving
//! prey, the nearest obstacle), another robot's projection plus an offset,
//! or mutual separation among the agents themselves. Attractors measure
//! summed squared distance; repellers measure softened inverse squared
//! distance, either one reciprocal per agent or a single shared reciprocal
//! over all agent pairs.
//!
//! Moving references are passed per step as an explicit `refs` slice so
//! preferences stay immutable and evaluation stays pure.

use crate::error::{invalid, Error, Result};
use crate::linalg;
use crate::mdp::{Action, ControlAffineDynamics, State};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PreferenceKind {
    Attractor,
    Repeller,
}

/// What a preference measures distance to.
#[derive(Debug, Clone, PartialEq)]
pub enum Target {
    /// Fixed point in the selected subspace.
    Point(Vec<f64>),
    /// Per-step reference: `refs[k]` holds one point in the selected subspace.
    Reference(usize),
    /// Per-step reference: `refs[k]` is a flat list of candidate points; the
    /// nearest one to each agent's projection is used (linear scan).
    NearestOf(usize),
    /// Another robot's projection onto the same selector, plus an offset.
    Relation { other: usize, offset: Vec<f64> },
    /// Pairwise separation among the preference's own agents.
    Mutual,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subspace {
    Position,
    Velocity,
}

/// Coordinate-subspace mask: which coordinates of each robot's position or
/// velocity block the projection keeps. `coords: None` keeps the whole block.
#[derive(Debug, Clone, PartialEq)]
pub struct Selector {
    pub subspace: Subspace,
    pub coords: Option<Vec<usize>>,
}

impl Selector {
    pub fn position() -> Self {
        Selector {
            subspace: Subspace::Position,
            coords: None,
        }
    }

    pub fn velocity() -> Self {
        Selector {
            subspace: Subspace::Velocity,
            coords: None,
        }
    }

    pub fn position_coords(coords: Vec<usize>) -> Self {
        Selector {
            subspace: Subspace::Position,
            coords: Some(coords),
        }
    }

    pub fn velocity_coords(coords: Vec<usize>) -> Self {
        Selector {
            subspace: Subspace::Velocity,
            coords: Some(coords),
        }
    }
}

/// How a repeller aggregates over agents.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RepellerForm {
    /// One `(beta + d^2)^-1` term per agent.
    PerAgent,
    /// A single `(beta + sum of pairwise d^2)^-1` over all ordered agent
    /// pairs. Used with `Target::Mutual`.
    PairwiseShared,
}

/// One user intent.
#[derive(Debug, Clone, PartialEq)]
pub struct Preference {
    pub kind: PreferenceKind,
    pub target: Target,
    pub selector: Selector,
    /// Robot indices this preference applies to.
    pub agents: Vec<usize>,
    /// Softening constant for repellers.
    pub beta: f64,
    pub form: RepellerForm,
}

impl Preference {
    pub fn attractor(target: Target, selector: Selector, agents: Vec<usize>) -> Self {
        Preference {
            kind: PreferenceKind::Attractor,
            target,
            selector,
            agents,
            beta: 1.0,
            form: RepellerForm::PerAgent,
        }
    }

    pub fn repeller(target: Target, selector: Selector, agents: Vec<usize>, beta: f64) -> Self {
        Preference {
            kind: PreferenceKind::Repeller,
            target,
            selector,
            agents,
            beta,
            form: RepellerForm::PerAgent,
        }
    }

    pub fn mutual_repeller(selector: Selector, agents: Vec<usize>, beta: f64) -> Self {
        Preference {
            kind: PreferenceKind::Repeller,
            target: Target::Mutual,
            selector,
            agents,
            beta,
            form: RepellerForm::PairwiseShared,
        }
    }
}

/// Index map from (robot, subspace) to coordinates of the flat joint state.
#[derive(Debug, Clone, PartialEq)]
pub struct StateLayout {
    robots: Vec<RobotBlock>,
    state_len: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RobotBlock {
    pub pos: Vec<usize>,
    pub vel: Vec<usize>,
}

impl StateLayout {
    pub fn new(robots: Vec<RobotBlock>, state_len: usize) -> Result<Self> {
        for block in &robots {
            if block.pos.len() != block.vel.len() {
                return Err(invalid("robot position/velocity blocks differ in length"));
            }
            if block.pos.iter().chain(&block.vel).any(|&i| i >= state_len) {
                return Err(invalid("robot block index out of state range"));
            }
        }
        Ok(StateLayout { robots, state_len })
    }

    /// `n` identical robots with `dof` planar/spatial coordinates each,
    /// packed `[p_1..p_n, v_1..v_n]`.
    pub fn homogeneous(n: usize, dof: usize) -> Self {
        let half = n * dof;
        let robots = (0..n)
            .map(|r| RobotBlock {
                pos: (r * dof..(r + 1) * dof).collect(),
                vel: (half + r * dof..half + (r + 1) * dof).collect(),
            })
            .collect();
        StateLayout {
            robots,
            state_len: 2 * half,
        }
    }

    pub fn n_robots(&self) -> usize {
        self.robots.len()
    }

    pub fn robot(&self, r: usize) -> &RobotBlock {
        &self.robots[r]
    }

    pub fn state_len(&self) -> usize {
        self.state_len
    }

    fn selected(&self, robot: usize, sel: &Selector) -> Result<Vec<usize>> {
        let block = self
            .robots
            .get(robot)
            .ok_or_else(|| invalid(format!("robot index {robot} out of range")))?;
        let base = match sel.subspace {
            Subspace::Position => &block.pos,
            Subspace::Velocity => &block.vel,
        };
        match &sel.coords {
            None => Ok(base.clone()),
            Some(coords) => coords
                .iter()
                .map(|&c| {
                    base.get(c)
                        .copied()
                        .ok_or_else(|| invalid(format!("selector coordinate {c} out of range")))
                })
                .collect(),
        }
    }
}

/// Learned per-feature scaling; the trained policy artifact.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    pub theta: Vec<f64>,
}

impl WeightVector {
    pub fn new(theta: Vec<f64>) -> Result<Self> {
        if !theta.iter().all(|t| t.is_finite()) {
            return Err(Error::NonFinite { what: "weights" });
        }
        Ok(WeightVector { theta })
    }

    pub fn zeros(n: usize) -> Self {
        WeightVector {
            theta: vec![0.0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }
}

/// A validated (preferences, layout) pair with resolved coordinate indices.
/// This is the hot-path evaluator; the free functions below wrap it.
#[derive(Debug, Clone)]
pub struct FeatureSet {
    prefs: Vec<Preference>,
    layout: StateLayout,
    /// terms[i][k] = state indices for preference i, agent k.
    terms: Vec<Vec<Vec<usize>>>,
    /// For Relation targets: other robot's indices per preference.
    other_terms: Vec<Option<Vec<usize>>>,
}

impl FeatureSet {
    pub fn new(prefs: Vec<Preference>, layout: StateLayout) -> Result<Self> {
        let mut terms = Vec::with_capacity(prefs.len());
        let mut other_terms = Vec::with_capacity(prefs.len());
        for (i, pref) in prefs.iter().enumerate() {
            if pref.agents.is_empty() {
                return Err(Error::Config {
                    field: format!("preference[{i}].agents"),
                    message: "agent set must be non-empty".into(),
                });
            }
            if pref.beta < 0.0 {
                return Err(Error::Config {
                    field: format!("preference[{i}].beta"),
                    message: "beta must be >= 0".into(),
                });
            }
            if pref.kind == PreferenceKind::Repeller && pref.beta == 0.0 {
                return Err(Error::Config {
                    field: format!("preference[{i}].beta"),
                    message: "repeller beta must be > 0".into(),
                });
            }
            let mut pref_terms = Vec::with_capacity(pref.agents.len());
            for &agent in &pref.agents {
                let idx = layout.selected(agent, &pref.selector).map_err(|e| Error::Config {
                    field: format!("preference[{i}].selector"),
                    message: e.to_string(),
                })?;
                if idx.is_empty() {
                    return Err(Error::Config {
                        field: format!("preference[{i}].selector"),
                        message: "selector must keep at least one coordinate".into(),
                    });
                }
                pref_terms.push(idx);
            }
            let dim = pref_terms[0].len();
            if pref_terms.iter().any(|t| t.len() != dim) {
                return Err(Error::Config {
                    field: format!("preference[{i}].agents"),
                    message: "agents have different selected dimensionality".into(),
                });
            }
            let other = match &pref.target {
                Target::Point(p) => {
                    if p.len() != dim {
                        return Err(Error::Config {
                            field: format!("preference[{i}].target"),
                            message: format!("point has length {}, selector keeps {dim}", p.len()),
                        });
                    }
                    None
                }
                Target::Relation { other, offset } => {
                    if offset.len() != dim {
                        return Err(Error::Config {
                            field: format!("preference[{i}].target"),
                            message: format!(
                                "relation offset has length {}, selector keeps {dim}",
                                offset.len()
                            ),
                        });
                    }
                    let idx = layout.selected(*other, &pref.selector).map_err(|e| {
                        Error::Config {
                            field: format!("preference[{i}].target.other"),
                            message: e.to_string(),
                        }
                    })?;
                    Some(idx)
                }
                Target::Mutual => {
                    if pref.form != RepellerForm::PairwiseShared {
                        return Err(Error::Config {
                            field: format!("preference[{i}].target"),
                            message: "mutual target requires the pairwise-shared form".into(),
                        });
                    }
                    if pref.agents.len() < 2 {
                        return Err(Error::Config {
                            field: format!("preference[{i}].agents"),
                            message: "mutual separation needs at least two agents".into(),
                        });
                    }
                    None
                }
                Target::Reference(_) | Target::NearestOf(_) => None,
            };
            if pref.form == RepellerForm::PairwiseShared && pref.target != Target::Mutual {
                return Err(Error::Config {
                    field: format!("preference[{i}].form"),
                    message: "pairwise-shared form requires a mutual target".into(),
                });
            }
            other_terms.push(other);
            terms.push(pref_terms);
        }
        Ok(FeatureSet {
            prefs,
            layout,
            terms,
            other_terms,
        })
    }

    pub fn len(&self) -> usize {
        self.prefs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prefs.is_empty()
    }

    pub fn preferences(&self) -> &[Preference] {
        &self.prefs
    }

    pub fn layout(&self) -> &StateLayout {
        &self.layout
    }

    /// Deviation `proj(agent) - target` for preference `i`, agent slot `k`.
    fn deviation_sq(&self, i: usize, k: usize, s: &[f64], refs: &[Vec<f64>]) -> f64 {
        let idx = &self.terms[i][k];
        match &self.prefs[i].target {
            Target::Point(p) => idx
                .iter()
                .zip(p)
                .map(|(&j, &t)| {
                    let d = s[j] - t;
                    d * d
                })
                .sum(),
            Target::Reference(r) => {
                let target = &refs[*r];
                idx.iter()
                    .zip(target)
                    .map(|(&j, &t)| {
                        let d = s[j] - t;
                        d * d
                    })
                    .sum()
            }
            Target::NearestOf(r) => {
                let dim = idx.len();
                let list = &refs[*r];
                let mut best = f64::INFINITY;
                for chunk in list.chunks_exact(dim) {
                    let d2: f64 = idx
                        .iter()
                        .zip(chunk)
                        .map(|(&j, &t)| {
                            let d = s[j] - t;
                            d * d
                        })
                        .sum();
                    if d2 < best {
                        best = d2;
                    }
                }
                best
            }
            Target::Relation { offset, .. } => {
                let other = self.other_terms[i].as_ref().expect("validated relation");
                idx.iter()
                    .zip(other)
                    .zip(offset)
                    .map(|((&j, &o), &off)| {
                        let d = s[j] - (s[o] + off);
                        d * d
                    })
                    .sum()
            }
            Target::Mutual => unreachable!("mutual handled by pairwise form"),
        }
    }

    fn pairwise_sum_sq(&self, i: usize, s: &[f64]) -> f64 {
        // Ordered double sum over agent pairs (each unordered pair twice),
        // via sum_{a,b} (x_a - x_b)^2 = 2 [n sum x^2 - (sum x)^2] per
        // coordinate, which keeps the evaluation linear in the agent count.
        let terms = &self.terms[i];
        let n = terms.len() as f64;
        let dim = terms[0].len();
        let mut total = 0.0;
        for c in 0..dim {
            let mut sum = 0.0;
            let mut sum_sq = 0.0;
            for idx in terms {
                let v = s[idx[c]];
                sum += v;
                sum_sq += v * v;
            }
            total += 2.0 * (n * sum_sq - sum * sum);
        }
        total
    }

    pub fn feature(&self, i: usize, s: &[f64], refs: &[Vec<f64>]) -> f64 {
        let pref = &self.prefs[i];
        match (pref.kind, pref.form) {
            (PreferenceKind::Attractor, _) => (0..self.terms[i].len())
                .map(|k| self.deviation_sq(i, k, s, refs))
                .sum(),
            (PreferenceKind::Repeller, RepellerForm::PerAgent) => (0..self.terms[i].len())
                .map(|k| 1.0 / (pref.beta + self.deviation_sq(i, k, s, refs)))
                .sum(),
            (PreferenceKind::Repeller, RepellerForm::PairwiseShared) => {
                1.0 / (pref.beta + self.pairwise_sum_sq(i, s))
            }
        }
    }

    pub fn features_into(&self, s: &[f64], refs: &[Vec<f64>], out: &mut [f64]) {
        for i in 0..self.prefs.len() {
            out[i] = self.feature(i, s, refs);
        }
    }

    pub fn features(&self, s: &[f64], refs: &[Vec<f64>]) -> Vec<f64> {
        let mut out = vec![0.0; self.prefs.len()];
        self.features_into(s, refs, &mut out);
        out
    }

    /// V(s) = theta . F(s)
    pub fn value(&self, s: &[f64], refs: &[Vec<f64>], theta: &[f64]) -> f64 {
        (0..self.prefs.len())
            .map(|i| theta[i] * self.feature(i, s, refs))
            .sum()
    }

    /// All attractor features strictly below `tol` (squared distance units).
    pub fn attractors_within(&self, s: &[f64], refs: &[Vec<f64>], tol: f64) -> bool {
        self.prefs.iter().enumerate().all(|(i, p)| {
            p.kind != PreferenceKind::Attractor || self.feature(i, s, refs) < tol
        })
    }

    /// Verify the task is well formed: the state that places every agent on
    /// its attractor target exists (attractor targets are consistent) and
    /// does not coincide with any repeller point. Numeric check on the
    /// anchor state; references are resolved against `refs`.
    pub fn validate_well_formed(&self, refs: &[Vec<f64>]) -> Result<()> {
        let anchor = self.anchor_state(refs)?;
        for (i, pref) in self.prefs.iter().enumerate() {
            match pref.kind {
                PreferenceKind::Attractor => {
                    let f = self.feature(i, &anchor, refs);
                    if f > 1e-9 {
                        return Err(Error::Config {
                            field: format!("preference[{i}]"),
                            message: format!(
                                "attractor targets are inconsistent (residual {f:.3e} at the joint target)"
                            ),
                        });
                    }
                }
                PreferenceKind::Repeller => {
                    if pref.form == RepellerForm::PerAgent {
                        for k in 0..self.terms[i].len() {
                            if self.deviation_sq(i, k, &anchor, refs) < 1e-12 {
                                return Err(Error::Config {
                                    field: format!("preference[{i}]"),
                                    message: "a repeller point coincides with the attractor goal"
                                        .into(),
                                });
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// State with every coordinate on its attractor target; coordinates the
    /// attractors leave free are 0.
    pub fn anchor_state(&self, refs: &[Vec<f64>]) -> Result<Vec<f64>> {
        let mut anchor = vec![0.0; self.layout.state_len()];
        for (coord, value) in self.anchors_of(refs, Some(PreferenceKind::Attractor))? {
            anchor[coord] = value;
        }
        Ok(anchor)
    }

    /// (state coordinate, target value) pairs pinned by every preference.
    /// Relation targets pin the agent at the offset and the other robot at
    /// zero; nearest-of targets pin every listed point's coordinates.
    pub fn anchors(&self, refs: &[Vec<f64>]) -> Result<Vec<(usize, f64)>> {
        self.anchors_of(refs, None)
    }

    fn anchors_of(
        &self,
        refs: &[Vec<f64>],
        only: Option<PreferenceKind>,
    ) -> Result<Vec<(usize, f64)>> {
        let mut anchors = Vec::new();
        for (i, pref) in self.prefs.iter().enumerate() {
            if let Some(kind) = only {
                if pref.kind != kind {
                    continue;
                }
            }
            for (k, idx) in self.terms[i].iter().enumerate() {
                match &pref.target {
                    Target::Point(p) => {
                        for (&j, &t) in idx.iter().zip(p) {
                            anchors.push((j, t));
                        }
                    }
                    Target::Reference(r) => {
                        let target = refs.get(*r).ok_or_else(|| Error::Config {
                            field: format!("preference[{i}].target"),
                            message: format!("reference index {r} not provided"),
                        })?;
                        if target.len() != idx.len() {
                            return Err(Error::Config {
                                field: format!("preference[{i}].target"),
                                message: format!(
                                    "reference {r} has length {}, selector keeps {}",
                                    target.len(),
                                    idx.len()
                                ),
                            });
                        }
                        for (&j, &t) in idx.iter().zip(target) {
                            anchors.push((j, t));
                        }
                    }
                    Target::NearestOf(r) => {
                        let list = refs.get(*r).ok_or_else(|| Error::Config {
                            field: format!("preference[{i}].target"),
                            message: format!("reference index {r} not provided"),
                        })?;
                        if list.len() % idx.len() != 0 {
                            return Err(Error::Config {
                                field: format!("preference[{i}].target"),
                                message: "nearest-of list length not a multiple of selector size"
                                    .into(),
                            });
                        }
                        // Pin the box to contain every candidate point; only
                        // do it once (per first agent slot).
                        if k == 0 {
                            for chunk in list.chunks_exact(idx.len()) {
                                for (&j, &t) in idx.iter().zip(chunk) {
                                    anchors.push((j, t));
                                }
                            }
                        }
                    }
                    Target::Relation { offset, .. } => {
                        let other = self.other_terms[i].as_ref().expect("validated relation");
                        for ((&j, &o), &off) in idx.iter().zip(other).zip(offset) {
                            anchors.push((j, off));
                            anchors.push((o, 0.0));
                        }
                    }
                    Target::Mutual => {
                        for &j in idx {
                            anchors.push((j, 0.0));
                        }
                    }
                }
            }
        }
        Ok(anchors)
    }
}

fn feature_checked(
    s: &State,
    pref: &Preference,
    layout: &StateLayout,
    refs: &[Vec<f64>],
    expect: PreferenceKind,
) -> Result<f64> {
    if pref.kind != expect {
        return Err(invalid(format!(
            "expected a {:?} preference, got {:?}",
            expect, pref.kind
        )));
    }
    let set = FeatureSet::new(vec![pref.clone()], layout.clone())?;
    if s.len() != layout.state_len() {
        return Err(Error::DimensionMismatch {
            what: "state",
            expected: layout.state_len(),
            got: s.len(),
        });
    }
    Ok(set.feature(0, &s.coords, refs))
}

/// Sum over agents of squared distance from projection to target.
pub fn attractor_feature(
    s: &State,
    pref: &Preference,
    layout: &StateLayout,
    refs: &[Vec<f64>],
) -> Result<f64> {
    feature_checked(s, pref, layout, refs, PreferenceKind::Attractor)
}

/// Softened inverse squared distance, per agent or shared pairwise.
pub fn repeller_feature(
    s: &State,
    pref: &Preference,
    layout: &StateLayout,
    refs: &[Vec<f64>],
) -> Result<f64> {
    feature_checked(s, pref, layout, refs, PreferenceKind::Repeller)
}

pub fn feature_vector(
    s: &State,
    prefs: &[Preference],
    layout: &StateLayout,
    refs: &[Vec<f64>],
) -> Result<Vec<f64>> {
    let set = FeatureSet::new(prefs.to_vec(), layout.clone())?;
    if s.len() != layout.state_len() {
        return Err(Error::DimensionMismatch {
            what: "state",
            expected: layout.state_len(),
            got: s.len(),
        });
    }
    Ok(set.features(&s.coords, refs))
}

/// V(s) = theta . F(s)
pub fn value(
    s: &State,
    theta: &WeightVector,
    prefs: &[Preference],
    layout: &StateLayout,
    refs: &[Vec<f64>],
) -> Result<f64> {
    if theta.len() != prefs.len() {
        return Err(Error::DimensionMismatch {
            what: "weight vector",
            expected: prefs.len(),
            got: theta.len(),
        });
    }
    let f = feature_vector(s, prefs, layout, refs)?;
    Ok(linalg::dot(&theta.theta, &f))
}

/// Q(s, a) = V(step(s, a + xi)); xi defaults to zero.
#[allow(clippy::too_many_arguments)]
pub fn q_value(
    s: &State,
    a: &Action,
    dyn_: &dyn ControlAffineDynamics,
    theta: &WeightVector,
    prefs: &[Preference],
    layout: &StateLayout,
    refs: &[Vec<f64>],
    xi: Option<&Action>,
) -> Result<f64> {
    let next = match xi {
        Some(xi) => crate::mdp::step_disturbed(dyn_, s, a, xi)?,
        None => crate::mdp::step(dyn_, s, a)?,
    };
    value(&next, theta, prefs, layout, refs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mdp::DoubleIntegrator;
    use crate::rng::master_rng;
    use rand::Rng;

    fn planar_layout(n: usize) -> StateLayout {
        StateLayout::homogeneous(n, 2)
    }

    #[test]
    fn attractor_zero_at_target() {
        let layout = planar_layout(1);
        let pref = Preference::attractor(
            Target::Point(vec![1.0, 2.0]),
            Selector::position(),
            vec![0],
        );
        let s = State::new(vec![1.0, 2.0, 0.0, 0.0]).unwrap();
        assert_eq!(attractor_feature(&s, &pref, &layout, &[]).unwrap(), 0.0);
    }

    #[test]
    fn attractor_three_four_five() {
        let layout = planar_layout(1);
        let pref = Preference::attractor(
            Target::Point(vec![0.0, 0.0]),
            Selector::position(),
            vec![0],
        );
        let s = State::new(vec![3.0, 4.0, 0.0, 0.0]).unwrap();
        assert_eq!(attractor_feature(&s, &pref, &layout, &[]).unwrap(), 25.0);
    }

    #[test]
    fn velocity_attractor_against_reference() {
        // Three agents with velocities (1,0), (0,1), (1,1); reference (1,0).
        let layout = planar_layout(3);
        let pref = Preference::attractor(
            Target::Reference(0),
            Selector::velocity(),
            vec![0, 1, 2],
        );
        let mut coords = vec![0.0; 12];
        coords[6..8].copy_from_slice(&[1.0, 0.0]);
        coords[8..10].copy_from_slice(&[0.0, 1.0]);
        coords[10..12].copy_from_slice(&[1.0, 1.0]);
        let s = State::new(coords).unwrap();
        let refs = vec![vec![1.0, 0.0]];
        let f = attractor_feature(&s, &pref, &layout, &refs).unwrap();
        assert_eq!(f, 0.0 + 2.0 + 1.0);
    }

    #[test]
    fn repeller_at_point_is_one_over_beta() {
        let layout = planar_layout(1);
        let pref = Preference::repeller(
            Target::Point(vec![0.0, 0.0]),
            Selector::position(),
            vec![0],
            1.0,
        );
        let s = State::new(vec![0.0, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(repeller_feature(&s, &pref, &layout, &[]).unwrap(), 1.0);
    }

    #[test]
    fn repeller_at_distance_three() {
        let layout = planar_layout(1);
        let pref = Preference::repeller(
            Target::Point(vec![0.0, 0.0]),
            Selector::position(),
            vec![0],
            1.0,
        );
        let s = State::new(vec![3.0, 0.0, 0.0, 0.0]).unwrap();
        assert!((repeller_feature(&s, &pref, &layout, &[]).unwrap() - 0.1).abs() < 1e-15);
    }

    #[test]
    fn nearest_obstacle_repeller_with_small_beta() {
        let layout = planar_layout(1);
        let pref = Preference::repeller(Target::NearestOf(0), Selector::position(), vec![0], 0.01);
        let s = State::new(vec![0.0, 0.0, 0.0, 0.0]).unwrap();
        // Obstacles at distance 0.5 and 3.0; nearest wins.
        let refs = vec![vec![0.5, 0.0, 3.0, 0.0]];
        let f = repeller_feature(&s, &pref, &layout, &refs).unwrap();
        assert!((f - 1.0 / 0.26).abs() < 1e-12, "got {f}");
    }

    #[test]
    fn feature_vector_zero_at_joint_goal() {
        let layout = planar_layout(2);
        let prefs = vec![
            Preference::attractor(Target::Point(vec![0.0, 0.0]), Selector::position(), vec![0, 1]),
            Preference::attractor(Target::Point(vec![0.0, 0.0]), Selector::velocity(), vec![0, 1]),
        ];
        let s = State::zeros(8);
        let f = feature_vector(&s, &prefs, &layout, &[]).unwrap();
        assert_eq!(f, vec![0.0, 0.0]);
        assert_eq!(f.len(), prefs.len());
    }

    fn pursuit_prefs() -> Vec<Preference> {
        vec![
            Preference::attractor(Target::Reference(0), Selector::position(), vec![0, 1]),
            Preference::attractor(Target::Reference(1), Selector::velocity(), vec![0, 1]),
            Preference::mutual_repeller(Selector::position(), vec![0, 1], 1.0),
        ]
    }

    #[test]
    fn pursuit_features_hand_evaluated() {
        // Agent 0 exactly on the prey's state, agent 1 one meter away at rest.
        let layout = planar_layout(2);
        let prefs = pursuit_prefs();
        let s = State::new(vec![0.0, 0.0, 1.0, 0.0, 0.5, 0.0, 0.0, 0.0]).unwrap();
        let refs = vec![vec![0.0, 0.0], vec![0.5, 0.0]];
        let f = feature_vector(&s, &prefs, &layout, &refs).unwrap();
        assert_eq!(f[0], 1.0, "only the distant agent contributes distance");
        assert_eq!(f[1], 0.25, "only the resting agent misses the prey speed");
        // Ordered pairwise sum counts the (0,1) pair twice: 1/(1 + 2*1).
        assert!((f[2] - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn value_is_dot_product() {
        let layout = planar_layout(1);
        let prefs = vec![
            Preference::attractor(Target::Point(vec![0.0, 0.0]), Selector::position(), vec![0]),
            Preference::repeller(Target::Point(vec![5.0, 0.0]), Selector::position(), vec![0], 1.0),
        ];
        let s = State::new(vec![2.0, 0.0, 0.0, 0.0]).unwrap();
        // F = (4, 1/10); theta = (-1, -1) -> -4.1
        let theta = WeightVector::new(vec![-1.0, -1.0]).unwrap();
        let v = value(&s, &theta, &prefs, &layout, &[]).unwrap();
        assert!((v + 4.1).abs() < 1e-12);
    }

    #[test]
    fn value_zero_is_global_max_for_attractors() {
        let layout = planar_layout(1);
        let prefs = vec![
            Preference::attractor(Target::Point(vec![0.0, 0.0]), Selector::position(), vec![0]),
            Preference::attractor(Target::Point(vec![0.0, 0.0]), Selector::velocity(), vec![0]),
        ];
        let theta = WeightVector::new(vec![-1.0, -2.0]).unwrap();
        let goal = State::zeros(4);
        assert_eq!(value(&goal, &theta, &prefs, &layout, &[]).unwrap(), 0.0);
        let mut rng = master_rng(3);
        for _ in 0..50 {
            let s = State::new((0..4).map(|_| rng.random_range(-2.0..2.0)).collect()).unwrap();
            assert!(value(&s, &theta, &prefs, &layout, &[]).unwrap() <= 0.0);
        }
    }

    #[test]
    fn value_length_mismatch_is_error() {
        let layout = planar_layout(1);
        let prefs = vec![Preference::attractor(
            Target::Point(vec![0.0, 0.0]),
            Selector::position(),
            vec![0],
        )];
        let theta = WeightVector::new(vec![-1.0, -1.0]).unwrap();
        assert!(value(&State::zeros(4), &theta, &prefs, &layout, &[]).is_err());
    }

    #[test]
    fn q_value_composes_step_then_value() {
        let layout = StateLayout::homogeneous(1, 1);
        let dyn_ = DoubleIntegrator::new(1, 1.0);
        let prefs = vec![
            Preference::attractor(Target::Point(vec![0.0]), Selector::position(), vec![0]),
            Preference::attractor(Target::Point(vec![0.0]), Selector::velocity(), vec![0]),
        ];
        let theta = WeightVector::new(vec![-1.0, -1.0]).unwrap();
        let s = State::zeros(2);
        let a = Action::new(vec![2.0]).unwrap();
        let q = q_value(&s, &a, &dyn_, &theta, &prefs, &layout, &[], None).unwrap();
        assert!((q + 5.0).abs() < 1e-12, "next state (1,2) -> -(1+4)");
    }

    #[test]
    fn q_value_folds_disturbance_into_action() {
        let layout = StateLayout::homogeneous(1, 1);
        let dyn_ = DoubleIntegrator::new(1, 0.02);
        let prefs = vec![Preference::attractor(
            Target::Point(vec![0.0]),
            Selector::position(),
            vec![0],
        )];
        let theta = WeightVector::new(vec![-1.0]).unwrap();
        let s = State::new(vec![0.4, -0.1]).unwrap();
        let a = Action::new(vec![1.0]).unwrap();
        let xi = Action::new(vec![0.5]).unwrap();
        let folded = Action::new(vec![1.5]).unwrap();
        let q1 = q_value(&s, &a, &dyn_, &theta, &prefs, &layout, &[], Some(&xi)).unwrap();
        let q2 = q_value(&s, &folded, &dyn_, &theta, &prefs, &layout, &[], None).unwrap();
        assert_eq!(q1, q2);
    }

    #[test]
    fn attractors_are_translation_consistent() {
        let layout = planar_layout(1);
        let mut rng = master_rng(17);
        for _ in 0..50 {
            let target: Vec<f64> = (0..2).map(|_| rng.random_range(-3.0..3.0)).collect();
            let shift: Vec<f64> = (0..2).map(|_| rng.random_range(-3.0..3.0)).collect();
            let pos: Vec<f64> = (0..2).map(|_| rng.random_range(-3.0..3.0)).collect();
            let pref = Preference::attractor(
                Target::Point(target.clone()),
                Selector::position(),
                vec![0],
            );
            let shifted_pref = Preference::attractor(
                Target::Point(vec![target[0] + shift[0], target[1] + shift[1]]),
                Selector::position(),
                vec![0],
            );
            let s = State::new(vec![pos[0], pos[1], 0.0, 0.0]).unwrap();
            let s_shift =
                State::new(vec![pos[0] + shift[0], pos[1] + shift[1], 0.0, 0.0]).unwrap();
            let f = attractor_feature(&s, &pref, &layout, &[]).unwrap();
            let g = attractor_feature(&s_shift, &shifted_pref, &layout, &[]).unwrap();
            assert!((f - g).abs() < 1e-12);
        }
    }

    #[test]
    fn repeller_bounded_and_decreasing() {
        let layout = planar_layout(2);
        let beta = 0.5;
        let pref = Preference::repeller(
            Target::Point(vec![0.0, 0.0]),
            Selector::position(),
            vec![0, 1],
            beta,
        );
        let mut last = f64::INFINITY;
        for step in 0..100 {
            let d = step as f64 * 0.1;
            let s = State::new(vec![d, 0.0, d + 1.0, 0.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
            let f = repeller_feature(&s, &pref, &layout, &[]).unwrap();
            assert!(f > 0.0 && f <= 2.0 / beta + 1e-12, "bounds violated: {f}");
            assert!(f < last + 1e-15, "not decreasing at d={d}");
            last = f;
        }
    }

    #[test]
    fn empty_agent_set_rejected_with_field() {
        let layout = planar_layout(1);
        let pref = Preference::attractor(Target::Point(vec![0.0, 0.0]), Selector::position(), vec![]);
        let err = FeatureSet::new(vec![pref], layout).unwrap_err();
        match err {
            Error::Config { field, .. } => assert!(field.contains("agents"), "field {field}"),
            other => panic!("expected config error, got {other}"),
        }
    }

    #[test]
    fn well_formedness_rejects_repeller_on_goal() {
        let layout = planar_layout(1);
        let prefs = vec![
            Preference::attractor(Target::Point(vec![0.0, 0.0]), Selector::position(), vec![0]),
            Preference::repeller(Target::Point(vec![0.0, 0.0]), Selector::position(), vec![0], 1.0),
        ];
        let set = FeatureSet::new(prefs, layout).unwrap();
        assert!(set.validate_well_formed(&[]).is_err());
    }

    #[test]
    fn well_formedness_accepts_separated_intents() {
        let layout = planar_layout(1);
        let prefs = vec![
            Preference::attractor(Target::Point(vec![0.0, 0.0]), Selector::position(), vec![0]),
            Preference::repeller(Target::Point(vec![3.0, 0.0]), Selector::position(), vec![0], 1.0),
        ];
        let set = FeatureSet::new(prefs, layout).unwrap();
        set.validate_well_formed(&[]).unwrap();
    }
}
