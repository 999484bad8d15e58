//! Engagement decision rules: the non-cooperative equilibrium threshold
//! `arctan(gamma)` and the social-optimum threshold 45°.
//!
//! Both rules are cutoffs in topic distance: engage iff `Δ <= threshold`,
//! with ties counting as engagement.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::TopicDistance;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RuleKind {
    Equilibrium,
    SocialOptimum,
    Cartel,
}

/// Cutoff rule: engage iff the topic distance is at most `threshold`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EngagementRule {
    /// Cutoff in radians, in `[0, π]`.
    pub threshold: f64,
    pub kind: RuleKind,
}

impl EngagementRule {
    pub fn new(threshold: f64, kind: RuleKind) -> Result<Self> {
        if !(0.0..=PI).contains(&threshold) {
            return Err(Error::domain(format!(
                "engagement threshold must lie in [0, π], got {threshold}"
            )));
        }
        Ok(EngagementRule { threshold, kind })
    }

    /// Weak inequality: a tie at the threshold counts as engagement.
    pub fn engages(&self, delta: TopicDistance) -> bool {
        delta.radians() <= self.threshold
    }
}

/// Non-cooperative equilibrium rule: engage iff `Δ <= arctan(gamma)`.
pub fn equilibrium_rule(gamma: f64) -> Result<EngagementRule> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::domain(format!(
            "gamma must lie strictly in (0, 1), got {gamma}"
        )));
    }
    Ok(equilibrium_rule_unchecked(gamma))
}

/// Unchecked variant for boundary probes (e.g. `gamma = 1` in tests, whose
/// threshold coincides with the social optimum). Callers are responsible for
/// keeping `gamma` non-negative.
pub fn equilibrium_rule_unchecked(gamma: f64) -> EngagementRule {
    EngagementRule {
        threshold: gamma.atan(),
        kind: RuleKind::Equilibrium,
    }
}

/// Social-optimum rule: engage iff `Δ <= 45°`.
pub fn social_optimum_rule() -> EngagementRule {
    EngagementRule {
        threshold: PI / 4.0,
        kind: RuleKind::SocialOptimum,
    }
}

/// Probability that a uniformly drawn topic distance satisfies the rule.
///
/// Distances are uniform on `[0, π]`, so this is `threshold / π`.
pub fn engagement_probability(rule: &EngagementRule) -> f64 {
    rule.threshold / PI
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{engagement_cost, TopicDistance};

    #[test]
    fn thresholds_match_closed_forms() {
        assert_eq!(equilibrium_rule_unchecked(1.0).threshold, PI / 4.0);
        let r = equilibrium_rule(0.5).unwrap();
        assert!((r.threshold - 0.4636476090008061).abs() < 1e-15);
        assert!((crate::model::rad_to_deg(r.threshold) - 26.565_051_177_077_99).abs() < 1e-9);
        assert!(equilibrium_rule(1e-12).unwrap().threshold < 1e-11);
        assert_eq!(social_optimum_rule().threshold, PI / 4.0);
    }

    #[test]
    fn gamma_bounds_are_enforced() {
        assert!(equilibrium_rule(0.0).is_err());
        assert!(equilibrium_rule(1.0).is_err());
    }

    #[test]
    fn probability_examples() {
        let full = EngagementRule::new(PI, RuleKind::Cartel).unwrap();
        assert_eq!(engagement_probability(&full), 1.0);
        let none = EngagementRule::new(0.0, RuleKind::Cartel).unwrap();
        assert_eq!(engagement_probability(&none), 0.0);
        let eq = equilibrium_rule(0.5).unwrap();
        assert!((engagement_probability(&eq) - 0.14758361765043326).abs() < 1e-15);
    }

    #[test]
    fn equilibrium_is_individually_optimal_on_grid() {
        // Engage iff gamma*cos(d) - C(d) >= 0 iff d <= arctan(gamma).
        for gamma in [0.1, 0.3, 0.5, 0.9, 0.99] {
            let rule = equilibrium_rule(gamma).unwrap();
            for i in 0..=100_000 {
                let d = PI * i as f64 / 100_000.0;
                let dist = TopicDistance::new(d).unwrap();
                let private = gamma * d.cos() - engagement_cost(dist);
                let wants = private >= -1e-12;
                let says = rule.engages(dist);
                // Skip the knife edge where float rounding decides.
                if (private).abs() > 1e-9 {
                    assert_eq!(wants, says, "gamma={gamma} d={d} private={private}");
                }
            }
        }
    }

    #[test]
    fn equilibrium_engagements_are_nested_in_social_optimum() {
        let social = social_optimum_rule();
        for gamma in [0.1, 0.5, 0.9] {
            let eq = equilibrium_rule(gamma).unwrap();
            assert!(eq.threshold < social.threshold);
            let mut extra = 0usize;
            for i in 0..10_000 {
                let d = TopicDistance::new(PI * i as f64 / 10_000.0).unwrap();
                if eq.engages(d) {
                    assert!(social.engages(d));
                }
                if social.engages(d) && !eq.engages(d) {
                    extra += 1;
                }
            }
            assert!(extra > 0, "social optimum should strictly expand engagement");
        }
    }

    #[test]
    fn extra_social_engagements_have_lower_quality() {
        let social = social_optimum_rule();
        let eq = equilibrium_rule(0.4).unwrap();
        let mut min_eq_quality = f64::INFINITY;
        let mut max_extra_quality = f64::NEG_INFINITY;
        for i in 0..10_000 {
            let d = PI * i as f64 / 10_000.0;
            let dist = TopicDistance::new(d).unwrap();
            if eq.engages(dist) {
                min_eq_quality = min_eq_quality.min(d.cos());
            } else if social.engages(dist) {
                max_extra_quality = max_extra_quality.max(d.cos());
            }
        }
        assert!(min_eq_quality >= max_extra_quality);
    }
}
