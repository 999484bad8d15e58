//! Core primitives of the engagement market model.
//!
//! Players live on a Salop-style circle of content topics (Salop 1979): a
//! player is a `(topic angle, reach)` pair. Engaging with the previous
//! player's content produces a benefit `R cos Δ` and an attention cost
//! `R C(Δ)` where `Δ` is the shortest arc between the two topics. The
//! engaging player internalizes a share `gamma` of the benefit; the rest is
//! an externality to the content's creator.
//!
//! Angles are radians everywhere inside the crate. Degrees appear only at
//! the CLI and file boundaries.

use std::f64::consts::{PI, TAU};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Convert a CLI/file angle in degrees to internal radians.
pub fn deg_to_rad(deg: f64) -> f64 {
    deg * PI / 180.0
}

/// Convert an internal angle in radians to degrees for output.
pub fn rad_to_deg(rad: f64) -> f64 {
    rad * 180.0 / PI
}

/// A player: topic angle on the circle and audience reach.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlayerType {
    /// Topic angle in radians, in `[0, 2π)`.
    pub alpha: f64,
    /// Audience size, dimensionless, `>= 1`.
    pub reach: f64,
}

impl PlayerType {
    pub fn new(alpha: f64, reach: f64) -> Result<Self> {
        if !(0.0..TAU).contains(&alpha) {
            return Err(Error::domain(format!(
                "topic angle must lie in [0, 2π), got {alpha}"
            )));
        }
        if !(reach >= 1.0) {
            return Err(Error::domain(format!("reach must be >= 1, got {reach}")));
        }
        Ok(PlayerType { alpha, reach })
    }
}

/// Shortest arc between two topic angles, in `[0, π]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct TopicDistance(f64);

impl TopicDistance {
    pub fn new(delta: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&delta) {
            return Err(Error::domain(format!(
                "topic distance must lie in [0, π], got {delta}"
            )));
        }
        Ok(TopicDistance(delta))
    }

    pub fn radians(self) -> f64 {
        self.0
    }
}

/// Market-level parameters shared by the pricing and simulation layers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarketParams {
    /// Share of the engagement benefit internalized by the engaging player,
    /// strictly inside (0, 1).
    pub gamma: f64,
    /// Marginal value of a unit of engagement to the advertiser, `>= 0`.
    pub v: f64,
    /// Share of total engagement that originates from cartels, in `[0, 1]`.
    pub epsilon: f64,
}

impl MarketParams {
    pub fn new(gamma: f64, v: f64, epsilon: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma < 1.0) {
            return Err(Error::domain(format!(
                "gamma must lie strictly in (0, 1), got {gamma}"
            )));
        }
        if !(v >= 0.0) {
            return Err(Error::domain(format!("v must be >= 0, got {v}")));
        }
        if !(0.0..=1.0).contains(&epsilon) {
            return Err(Error::domain(format!(
                "epsilon must lie in [0, 1], got {epsilon}"
            )));
        }
        Ok(MarketParams { gamma, v, epsilon })
    }
}

/// Invert the reach CDF `F(R) = 1 - R^{-2}` (density `2 R^{-3}`, mean 2).
///
/// `u = 0` maps to the lower bound 1; `u -> 1` diverges.
pub fn reach_from_uniform(u: f64) -> f64 {
    debug_assert!((0.0..1.0).contains(&u));
    1.0 / (1.0 - u).sqrt()
}

/// Draw a player: topic uniform on the circle, reach by inverse CDF from the
/// power law with density `2 R^{-3}`.
pub fn sample_player<R: Rng + ?Sized>(rng: &mut R) -> PlayerType {
    let alpha = rng.random::<f64>() * TAU;
    let reach = reach_from_uniform(rng.random::<f64>());
    PlayerType { alpha, reach }
}

/// Mean reach conditional on `R <= r_bar`: `2 / (1 + 1/r_bar)`.
///
/// `r_bar = +∞` gives the unconditional mean 2.
pub fn truncated_mean_reach(r_bar: f64) -> f64 {
    2.0 / (1.0 + r_bar.recip())
}

/// Mean reach conditional on `lo <= R <= hi`: `2 / (1/lo + 1/hi)`.
pub fn banded_mean_reach(lo: f64, hi: f64) -> f64 {
    2.0 / (lo.recip() + hi.recip())
}

/// Shortest angle difference on the circle, `min{|a1-a2|, 2π - |a1-a2|}`.
///
/// Angles outside `[0, 2π)` are wrapped.
pub fn topic_distance(a1: f64, a2: f64) -> TopicDistance {
    let d = (a1 - a2).rem_euclid(TAU);
    TopicDistance(d.min(TAU - d))
}

/// Attention cost of an engagement: `sin Δ` up to 90°, then flat at 1.
pub fn engagement_cost(delta: TopicDistance) -> f64 {
    let d = delta.radians();
    if d <= PI / 2.0 {
        d.sin()
    } else {
        1.0
    }
}

/// Social welfare of one engagement decision: `a · R (cos Δ - C(Δ))`.
pub fn engagement_welfare(engaged: bool, reach: f64, delta: TopicDistance) -> f64 {
    if engaged {
        reach * (delta.radians().cos() - engagement_cost(delta))
    } else {
        0.0
    }
}

/// A player's payoff given her own action and the follower's action:
/// internalized benefit minus cost, plus the externality received from the
/// follower's engagement.
#[allow(clippy::too_many_arguments)]
pub fn player_payoff(
    engaged: bool,
    next_engaged: bool,
    own: PlayerType,
    delta_prev: TopicDistance,
    delta_next: TopicDistance,
    next_reach: f64,
    gamma: f64,
) -> f64 {
    let mut payoff = 0.0;
    if engaged {
        payoff += gamma * own.reach * delta_prev.radians().cos()
            - own.reach * engagement_cost(delta_prev);
    }
    if next_engaged {
        payoff += (1.0 - gamma) * next_reach * delta_next.radians().cos();
    }
    payoff
}
