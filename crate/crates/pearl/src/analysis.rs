//! Goal-progression checks and the restricted value-function extremum
//! analysis.
//!
//! For obstacle-style tasks the (negated) value function restricted to the
//! goal-agent line takes the form `V_x(x) = x^2 + c / ((x-1)^2 + d^2)`
//! with `c` the repeller/attractor weight ratio and `d` the obstacle
//! half-separation. Its minima are the value function's local maxima:
//! where gradient-following settles. `critical_points` isolates and
//! classifies them; `check_attractor_stability` verifies the sign and span
//! conditions under which attractor-only tasks provably progress.

use crate::error::{invalid, Result};
use crate::features::{FeatureSet, PreferenceKind, Target, WeightVector};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RestrictedValueParams {
    /// Ratio of repeller to attractor weight (>= 0; 0 removes the bump).
    pub c: f64,
    /// Obstacle half-separation from the analysis line.
    pub d: f64,
}

impl RestrictedValueParams {
    pub fn new(c: f64, d: f64) -> Result<Self> {
        if !(c >= 0.0 && d >= 0.0) {
            return Err(invalid("restricted value params need c >= 0 and d >= 0"));
        }
        Ok(RestrictedValueParams { c, d })
    }
}

/// `V_x(x) = x^2 + c / ((x-1)^2 + d^2)`
pub fn vx(x: f64, p: &RestrictedValueParams) -> f64 {
    let dx = x - 1.0;
    x * x + p.c / (dx * dx + p.d * p.d)
}

pub fn dvx(x: f64, p: &RestrictedValueParams) -> f64 {
    let dx = x - 1.0;
    let denom = dx * dx + p.d * p.d;
    2.0 * x - 2.0 * p.c * dx / (denom * denom)
}

pub fn ddvx(x: f64, p: &RestrictedValueParams) -> f64 {
    let dx = x - 1.0;
    let denom = dx * dx + p.d * p.d;
    2.0 + 2.0 * p.c * (3.0 * dx * dx - p.d * p.d) / (denom * denom * denom)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtremumKind {
    Minimum,
    Maximum,
    Inflection,
}

/// All critical points of `V_x` inside the interval, by bisection on sign
/// changes of the derivative sampled at 10^4 points, refined to 1e-10, and
/// classified by the second-derivative sign (|V''| < 1e-8 -> inflection).
pub fn critical_points(
    p: &RestrictedValueParams,
    interval: (f64, f64),
) -> Vec<(f64, ExtremumKind)> {
    let (lo, hi) = interval;
    debug_assert!(lo < hi);
    const SAMPLES: usize = 10_000;
    let h = (hi - lo) / SAMPLES as f64;
    let mut out = Vec::new();
    let mut x_prev = lo;
    let mut f_prev = dvx(lo, p);
    for i in 1..=SAMPLES {
        let x = lo + i as f64 * h;
        let f = dvx(x, p);
        if f_prev == 0.0 {
            out.push(classify(x_prev, p));
        } else if f_prev * f < 0.0 {
            let root = bisect(x_prev, x, p);
            out.push(classify(root, p));
        }
        x_prev = x;
        f_prev = f;
    }
    out
}

fn bisect(mut lo: f64, mut hi: f64, p: &RestrictedValueParams) -> f64 {
    let mut f_lo = dvx(lo, p);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo < 1e-10 {
            return mid;
        }
        let f_mid = dvx(mid, p);
        if f_mid == 0.0 {
            return mid;
        }
        if f_lo * f_mid < 0.0 {
            hi = mid;
        } else {
            lo = mid;
            f_lo = f_mid;
        }
    }
    0.5 * (lo + hi)
}

fn classify(x: f64, p: &RestrictedValueParams) -> (f64, ExtremumKind) {
    let second = ddvx(x, p);
    let kind = if second.abs() < 1e-8 {
        ExtremumKind::Inflection
    } else if second > 0.0 {
        ExtremumKind::Minimum
    } else {
        ExtremumKind::Maximum
    };
    (x, kind)
}

/// Why an attractor-only task fails the progression conditions.
#[derive(Debug, Clone, PartialEq)]
pub enum StabilityCheck {
    Holds,
    /// A learned weight is not negative.
    NonNegativeWeight { index: usize, value: f64 },
    /// A state coordinate is not covered by any attractor selector.
    UncoveredCoordinate { coordinate: usize },
}

impl StabilityCheck {
    pub fn holds(&self) -> bool {
        matches!(self, StabilityCheck::Holds)
    }
}

/// Attractor-only progression conditions: every weight strictly negative
/// and the attractor selectors jointly covering every state coordinate.
/// Calling this with repellers present is an error.
pub fn check_attractor_stability(
    theta: &WeightVector,
    features: &FeatureSet,
) -> Result<StabilityCheck> {
    let prefs = features.preferences();
    if prefs.iter().any(|p| p.kind == PreferenceKind::Repeller) {
        return Err(invalid(
            "stability check applies to attractor-only preference sets",
        ));
    }
    if theta.len() != prefs.len() {
        return Err(crate::error::Error::DimensionMismatch {
            what: "weight vector",
            expected: prefs.len(),
            got: theta.len(),
        });
    }
    for (i, &w) in theta.theta.iter().enumerate() {
        if w >= 0.0 {
            return Ok(StabilityCheck::NonNegativeWeight { index: i, value: w });
        }
    }
    let layout = features.layout();
    let mut covered = vec![false; layout.state_len()];
    for pref in prefs {
        let mut mark = |robot: usize| {
            let block = layout.robot(robot);
            let base = match pref.selector.subspace {
                crate::features::Subspace::Position => &block.pos,
                crate::features::Subspace::Velocity => &block.vel,
            };
            match &pref.selector.coords {
                None => {
                    for &i in base {
                        covered[i] = true;
                    }
                }
                Some(coords) => {
                    for &c in coords {
                        covered[base[c]] = true;
                    }
                }
            }
        };
        for &agent in &pref.agents {
            mark(agent);
        }
        if let Target::Relation { other, .. } = &pref.target {
            mark(*other);
        }
    }
    if let Some(coordinate) = covered.iter().position(|&c| !c) {
        return Ok(StabilityCheck::UncoveredCoordinate { coordinate });
    }
    Ok(StabilityCheck::Holds)
}
