//! The cartel entry game and its welfare analysis.
//!
//! A cartel is a commitment device: members must engage whenever the topic
//! distance to the previous member's post is at most the requirement `Λ`.
//! Entry is a simultaneous-move game played after types are drawn; the
//! analysis works in the transformed variable `λ = tan(Λ/2)`.
//!
//! # Payoff units
//!
//! The closed forms in this module integrate over the topic distance with
//! weight 2 rather than the uniform density `1/π`, which keeps them
//! polynomial in `λ`. They therefore equal `2π` times the per-member
//! statistical expectation; [`KAPPA`] is the documented conversion constant
//! applied whenever a closed form is compared against a Monte Carlo sample
//! mean. Signs, thresholds and argmax locations are unaffected by the scale.

use std::f64::consts::{FRAC_PI_2, PI, SQRT_2, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::banded_mean_reach;
use crate::numerics::{bisect, integrate};

/// Conversion from closed-form payoff units to per-member expectations:
/// closed forms are `KAPPA` times the statistical mean.
pub const KAPPA: f64 = TAU;

/// Welfare-maximizing engagement requirement when participation is not a
/// constraint: `λ = √2 - 1`, i.e. `Λ = 45°`.
pub const FIRST_BEST_LAMBDA: f64 = SQRT_2 - 1.0;

/// Absolute tolerance used by the quadrature fallback for `Λ > 90°`.
const QUAD_TOL: f64 = 1e-10;

/// A cartel agreement: engagement requirement plus an optional minimum-reach
/// entry requirement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CartelAgreement {
    /// Engagement requirement `Λ` in radians, in `(0, π]`. Members must
    /// engage whenever the topic distance is at most this angle.
    pub requirement: f64,
    /// Transformed requirement `λ = tan(Λ/2)`. Only meaningful as a closed-form
    /// variable for `Λ <= 90°` (it exceeds 1 beyond and blows up at `Λ = π`).
    pub lambda: f64,
    /// Minimum reach required to be eligible, `>= 1`; 1 means no restriction.
    pub min_reach: f64,
}

impl CartelAgreement {
    pub fn new(requirement: f64) -> Result<Self> {
        Self::with_min_reach(requirement, 1.0)
    }

    pub fn with_min_reach(requirement: f64, min_reach: f64) -> Result<Self> {
        if !(requirement > 0.0 && requirement <= PI) {
            return Err(Error::domain(format!(
                "engagement requirement must lie in (0, π], got {requirement}"
            )));
        }
        if !(min_reach >= 1.0) {
            return Err(Error::domain(format!(
                "minimum reach must be >= 1, got {min_reach}"
            )));
        }
        // tan(atan(1)) lands one ulp under 1; pin the 90° boundary so the
        // entry-game classification does not flip on it.
        let lambda = if requirement == FRAC_PI_2 {
            1.0
        } else {
            (requirement / 2.0).tan()
        };
        Ok(CartelAgreement {
            requirement,
            lambda,
            min_reach,
        })
    }

    /// Build from the transformed requirement `λ` (must be in `(0, 1]`),
    /// which is stored verbatim.
    pub fn from_lambda(lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda <= 1.0) {
            return Err(Error::domain(format!(
                "lambda must lie in (0, 1], got {lambda}"
            )));
        }
        Ok(CartelAgreement {
            requirement: 2.0 * lambda.atan(),
            lambda,
            min_reach: 1.0,
        })
    }
}

/// Outcome of the entry game.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum EntryOutcome {
    /// Every eligible player joins (`λ <= γ`).
    AllJoin,
    /// Players with reach up to `r_bar` join (`γ < λ < 1`).
    ThresholdJoin { r_bar: f64 },
    /// The requirement is too punishing; nobody joins (`λ >= 1`, i.e. `Λ >= 90°`).
    NobodyJoins,
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::domain(format!(
            "gamma must lie strictly in (0, 1), got {gamma}"
        )));
    }
    Ok(())
}

/// Own-engagement term of the member payoff per unit of own reach, in
/// closed-form units: `2 ∫_0^Λ (γ cos Δ - C(Δ)) dΔ`.
///
/// Closed form `-4λ(λ-γ)/(λ²+1)` for `Λ <= 90°`; adaptive quadrature of the
/// defining integral beyond, where the cost is capped at 1.
pub(crate) fn own_term_per_reach(requirement: f64, gamma: f64) -> f64 {
    if requirement <= FRAC_PI_2 {
        let l = (requirement / 2.0).tan();
        -4.0 * l * (l - gamma) / (l * l + 1.0)
    } else {
        let below = integrate(
            &|d: f64| gamma * d.cos() - d.sin(),
            0.0,
            FRAC_PI_2,
            QUAD_TOL,
        );
        let above = integrate(&|d: f64| gamma * d.cos() - 1.0, FRAC_PI_2, requirement, QUAD_TOL);
        2.0 * (below + above)
    }
}

/// Externality term of the member payoff per unit of expected member reach,
/// in closed-form units: `2 (1-γ) ∫_0^Λ cos Δ dΔ`.
pub(crate) fn externality_per_reach(requirement: f64, gamma: f64) -> f64 {
    if requirement <= FRAC_PI_2 {
        let l = (requirement / 2.0).tan();
        4.0 * l * (1.0 - gamma) / (l * l + 1.0)
    } else {
        2.0 * (1.0 - gamma) * integrate(&|d: f64| d.cos(), 0.0, requirement, QUAD_TOL)
    }
}

/// Expected payoff of a cartel member with the given reach, in closed-form
/// units (divide by [`KAPPA`] for the per-member expectation).
///
/// `expected_member_reach` is the mean reach of the following member under
/// the candidate membership set.
pub fn cartel_member_payoff(
    reach: f64,
    agreement: &CartelAgreement,
    gamma: f64,
    expected_member_reach: f64,
) -> Result<f64> {
    check_gamma(gamma)?;
    if !(reach >= 1.0) {
        return Err(Error::domain(format!("reach must be >= 1, got {reach}")));
    }
    Ok(reach * own_term_per_reach(agreement.requirement, gamma)
        + expected_member_reach * externality_per_reach(agreement.requirement, gamma))
}

/// Solve the entry game for the given agreement.
///
/// The `λ = γ` boundary is assigned to [`EntryOutcome::AllJoin`]: the member
/// payoff is strictly positive there. With a minimum-reach requirement the
/// participation threshold scales linearly in it.
pub fn entry_equilibrium(agreement: &CartelAgreement, gamma: f64) -> Result<EntryOutcome> {
    check_gamma(gamma)?;
    let l = agreement.lambda;
    if l <= gamma {
        Ok(EntryOutcome::AllJoin)
    } else if l < 1.0 {
        Ok(EntryOutcome::ThresholdJoin {
            r_bar: (2.0 - gamma - l) / (l - gamma) * agreement.min_reach,
        })
    } else {
        Ok(EntryOutcome::NobodyJoins)
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda > 0.0 && lambda <= 1.0) {
        return Err(Error::domain(format!(
            "lambda must lie in (0, 1], got {lambda}"
        )));
    }
    Ok(())
}

/// Mean payoff per player (members and non-members alike) generated by a
/// cartel with requirement `λ`, in closed-form units.
///
/// Piecewise: `8λ(1-λ)/(λ²+1)` while everyone joins (`λ <= γ`), then
/// `16λ(1-λ)²/((λ²+1)(2-γ-λ))` once high-reach players stay out. The two
/// branches meet continuously at `λ = γ` with a kink.
pub fn welfare_per_player(lambda: f64, gamma: f64) -> Result<f64> {
    check_lambda(lambda)?;
    check_gamma(gamma)?;
    let denom = lambda * lambda + 1.0;
    if lambda <= gamma {
        Ok(8.0 * lambda * (1.0 - lambda) / denom)
    } else {
        Ok(16.0 * lambda * (1.0 - lambda).powi(2) / (denom * (2.0 - gamma - lambda)))
    }
}

/// Mean payoff of a cartel member, in closed-form units.
///
/// Coincides with [`welfare_per_player`] while everyone joins; above `λ = γ`
/// it exceeds it by the inverse participation probability.
pub fn member_mean_payoff(lambda: f64, gamma: f64) -> Result<f64> {
    check_lambda(lambda)?;
    check_gamma(gamma)?;
    let denom = lambda * lambda + 1.0;
    if lambda <= gamma {
        Ok(8.0 * lambda * (1.0 - lambda) / denom)
    } else {
        Ok(4.0 * lambda * (1.0 - lambda) / denom * (2.0 - gamma - lambda) / (1.0 - gamma))
    }
}

/// Probability that a player joins the cartel (eligibility times entry),
/// for a minimum-reach requirement `min_reach >= 1`.
pub fn membership_share(lambda: f64, gamma: f64, min_reach: f64) -> Result<f64> {
    check_lambda(lambda)?;
    check_gamma(gamma)?;
    let eligible = min_reach.powi(-2);
    if lambda <= gamma {
        Ok(eligible)
    } else {
        Ok(4.0 * (1.0 - gamma) * (1.0 - lambda) / (2.0 - gamma - lambda).powi(2) * eligible)
    }
}

/// Sign-of-slope polynomial of the partial-participation welfare branch:
/// `w(λ) = γλ³ + γλ² + 3γλ - γ - 6λ + 2`.
pub fn welfare_slope_poly(lambda: f64, gamma: f64) -> f64 {
    gamma * lambda.powi(3) + gamma * lambda.powi(2) + 3.0 * gamma * lambda - gamma - 6.0 * lambda
        + 2.0
}

/// The internalized-share threshold below which the welfare-maximizing
/// cartel excludes some high-reach players, `≈ 0.3444`.
///
/// Closed cube-root expression; also the unique root in `(0, 1)` of
/// `λ⁴ + λ³ + 3λ² - 7λ + 2`.
pub fn gamma_inc() -> f64 {
    let c = (64.0 + 9.0 * 67f64.sqrt()).cbrt();
    (-2.0 - 11.0 / c + c) / 3.0
}

/// Welfare-maximizing engagement requirement for a given `gamma`.
///
/// First-best `√2 - 1` when `gamma` is large enough to sustain it; the
/// highest all-join requirement `λ = γ` in the intermediate range; otherwise
/// the interior root of [`welfare_slope_poly`] found by bisection to 1e-12.
pub fn optimal_lambda(gamma: f64) -> Result<f64> {
    check_gamma(gamma)?;
    if gamma >= FIRST_BEST_LAMBDA {
        Ok(FIRST_BEST_LAMBDA)
    } else if gamma >= gamma_inc() {
        Ok(gamma)
    } else {
        bisect(
            |l| welfare_slope_poly(l, gamma),
            1e-9,
            1.0 - 1e-9,
            1e-12,
            200,
        )
    }
}

/// Effect of a minimum-reach entry requirement on the welfare measures.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntryRequirementEffects {
    /// Mean member payoff: the unrestricted value times `min_reach`.
    pub member_value: f64,
    /// Mean payoff per player: the unrestricted value divided by `min_reach`.
    pub welfare: f64,
    /// Participation threshold; `+∞` encoded as `f64::INFINITY` when every
    /// eligible player joins.
    pub r_bar: f64,
}

/// Scale the welfare measures by a minimum-reach entry requirement: member
/// value is proportional to `min_reach`, per-player welfare to its inverse,
/// and the participation threshold scales linearly.
pub fn entry_requirement_effects(
    agreement: &CartelAgreement,
    gamma: f64,
) -> Result<EntryRequirementEffects> {
    let lambda = agreement.lambda;
    let base_v = member_mean_payoff(lambda, gamma)?;
    let base_w = welfare_per_player(lambda, gamma)?;
    let r_bar = match entry_equilibrium(agreement, gamma)? {
        EntryOutcome::AllJoin => f64::INFINITY,
        EntryOutcome::ThresholdJoin { r_bar } => r_bar,
        EntryOutcome::NobodyJoins => agreement.min_reach,
    };
    Ok(EntryRequirementEffects {
        member_value: base_v * agreement.min_reach,
        welfare: base_w / agreement.min_reach,
        r_bar,
    })
}

/// Mean reach of a member when membership is the reach band
/// `[min_reach, r_bar]`.
pub fn member_mean_reach(min_reach: f64, r_bar: f64) -> f64 {
    banded_mean_reach(min_reach, r_bar)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn agreement_from_lambda(l: f64) -> CartelAgreement {
        CartelAgreement::from_lambda(l).unwrap()
    }

    #[test]
    fn member_payoff_simplifies_at_lambda_equal_gamma() {
        let a = agreement_from_lambda(0.5);
        let u = cartel_member_payoff(1.7, &a, 0.5, 2.0).unwrap();
        assert!((u - 1.6).abs() < 1e-12, "got {u}");
        // Independent of own reach at lambda = gamma.
        let u2 = cartel_member_payoff(9.0, &a, 0.5, 2.0).unwrap();
        assert!((u - u2).abs() < 1e-12);
    }

    #[test]
    fn member_payoff_at_ninety_degrees_is_reach_difference() {
        // lambda = 1: payoff reduces to 2(1-gamma)(E R - R).
        let a = CartelAgreement::new(FRAC_PI_2).unwrap();
        let u = cartel_member_payoff(2.0, &a, 0.3, 2.0).unwrap();
        assert!(u.abs() < 1e-12);
        let below = cartel_member_payoff(1.5, &a, 0.3, 2.0).unwrap();
        assert!((below - 2.0 * 0.7 * 0.5).abs() < 1e-10);
    }

    #[test]
    fn general_cartel_payoff_is_strictly_negative_without_ads() {
        let a = CartelAgreement::new(PI).unwrap();
        for reach in [1.0, 2.0, 10.0] {
            let u = cartel_member_payoff(reach, &a, 0.5, 2.0).unwrap();
            assert!(u < 0.0, "reach {reach} gave {u}");
        }
        // Hand-derived form for the capped-cost region:
        // 2R(γ sin Λ - 1 - (Λ - π/2)) + 2(1-γ) E R sin Λ.
        let u = cartel_member_payoff(2.0, &a, 0.5, 2.0).unwrap();
        let expect = 2.0 * 2.0 * (0.5 * PI.sin() - 1.0 - (PI - FRAC_PI_2));
        assert!((u - expect).abs() < 1e-9, "{u} vs {expect}");
    }

    #[test]
    fn quadrature_branch_is_continuous_at_ninety_degrees() {
        let just_below = CartelAgreement::new(FRAC_PI_2 - 1e-9).unwrap();
        let just_above = CartelAgreement::new(FRAC_PI_2 + 1e-9).unwrap();
        let lo = cartel_member_payoff(3.0, &just_below, 0.4, 2.0).unwrap();
        let hi = cartel_member_payoff(3.0, &just_above, 0.4, 2.0).unwrap();
        assert!((lo - hi).abs() < 1e-7, "{lo} vs {hi}");
    }

    #[test]
    fn quadrature_matches_capped_cost_closed_form() {
        for requirement in [2.0, 2.5, 3.0, PI] {
            for gamma in [0.2, 0.5, 0.8] {
                let a = CartelAgreement::new(requirement).unwrap();
                let u = cartel_member_payoff(2.5, &a, gamma, 1.8).unwrap();
                let expect = 2.0 * 2.5 * (gamma * requirement.sin() - 1.0 - (requirement - FRAC_PI_2))
                    + 2.0 * (1.0 - gamma) * 1.8 * requirement.sin();
                assert!((u - expect).abs() < 1e-8, "Λ={requirement} γ={gamma}");
            }
        }
    }

    #[test]
    fn entry_cases_match_transformed_requirement() {
        let low = agreement_from_lambda(0.3);
        assert_eq!(entry_equilibrium(&low, 0.5).unwrap(), EntryOutcome::AllJoin);

        let moderate = agreement_from_lambda(0.5);
        match entry_equilibrium(&moderate, 0.1).unwrap() {
            EntryOutcome::ThresholdJoin { r_bar } => {
                assert!((r_bar - 3.5).abs() < 1e-12, "got {r_bar}")
            }
            other => panic!("expected threshold equilibrium, got {other:?}"),
        }

        let harsh = CartelAgreement::new(2.0 * 1.2f64.atan()).unwrap();
        assert!(harsh.lambda > 1.0);
        assert_eq!(
            entry_equilibrium(&harsh, 0.5).unwrap(),
            EntryOutcome::NobodyJoins
        );
    }

    #[test]
    fn boundary_lambda_equals_gamma_joins_all() {
        let a = agreement_from_lambda(0.37);
        assert_eq!(entry_equilibrium(&a, 0.37).unwrap(), EntryOutcome::AllJoin);
    }

    #[test]
    fn lambda_consistency_invariant() {
        for l in [0.01, 0.3, 0.9999, 1.0] {
            let a = agreement_from_lambda(l);
            assert!(((a.requirement / 2.0).tan() - a.lambda).abs() < 1e-12);
        }
    }

    #[test]
    fn welfare_examples() {
        let w = welfare_per_player(FIRST_BEST_LAMBDA, 0.5).unwrap();
        assert!((w - 4.0 * (SQRT_2 - 1.0)).abs() < 1e-12);
        assert!(welfare_per_player(1.0, 0.5).unwrap().abs() < 1e-15);
        assert!(welfare_per_player(1e-12, 0.5).unwrap() < 1e-10);
        assert!(welfare_per_player(0.0, 0.5).is_err());
    }

    #[test]
    fn welfare_is_continuous_with_kink_at_gamma() {
        let gamma = 0.35;
        let h = 1e-7;
        let left = welfare_per_player(gamma - h, gamma).unwrap();
        let at = welfare_per_player(gamma, gamma).unwrap();
        let right = welfare_per_player(gamma + h, gamma).unwrap();
        assert!((left - at).abs() < 1e-5);
        assert!((right - at).abs() < 1e-5);
        let d_left = (at - left) / h;
        let d_right = (right - at) / h;
        assert!(d_left.is_finite() && d_right.is_finite());
        assert!(
            (d_left - d_right).abs() > 0.1,
            "expected a kink: left {d_left}, right {d_right}"
        );
    }

    #[test]
    fn member_value_examples() {
        // V = W on the all-join branch.
        for l in [0.05, 0.2, 0.35] {
            let v = member_mean_payoff(l, 0.4).unwrap();
            let w = welfare_per_player(l, 0.4).unwrap();
            assert!((v - w).abs() < 1e-15);
        }
        let v = member_mean_payoff(0.5, 0.1).unwrap();
        assert!((v - 1.2444444444444442).abs() < 1e-12, "got {v}");
        assert!(member_mean_payoff(1.0, 0.1).unwrap().abs() < 1e-15);
    }

    #[test]
    fn member_value_exceeds_welfare_by_participation_probability() {
        for gamma in [0.1, 0.3, 0.6] {
            for i in 1..100 {
                let l = i as f64 / 100.0;
                let v = member_mean_payoff(l, gamma).unwrap();
                let w = welfare_per_player(l, gamma).unwrap();
                assert!(v >= w - 1e-12);
                if l > gamma {
                    let pr = membership_share(l, gamma, 1.0).unwrap();
                    assert!((w - pr * v).abs() < 1e-12, "gamma={gamma} l={l}");
                } else {
                    assert!((v - w).abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn gamma_inc_value_and_quartic_root() {
        let g = gamma_inc();
        assert!((g - 0.3444).abs() < 1e-4, "got {g}");
        let quartic = g.powi(4) + g.powi(3) + 3.0 * g * g - 7.0 * g + 2.0;
        assert!(quartic.abs() < 1e-10, "residual {quartic}");
        // Same as substituting lambda = gamma into the slope polynomial.
        assert!(welfare_slope_poly(g, g).abs() < 1e-10);
        assert!(g < FIRST_BEST_LAMBDA);
    }

    #[test]
    fn optimal_lambda_cases() {
        assert!((optimal_lambda(0.5).unwrap() - FIRST_BEST_LAMBDA).abs() < 1e-15);
        assert!((optimal_lambda(0.375).unwrap() - 0.375).abs() < 1e-15);
        let interior = optimal_lambda(0.1).unwrap();
        assert!((interior - 0.3359790863098703).abs() < 1e-9, "got {interior}");
        // The interior peak excludes some players: it lies strictly above
        // gamma, on the partial-participation branch.
        assert!(interior > 0.1 && interior < FIRST_BEST_LAMBDA);
        let share = membership_share(interior, 0.1, 1.0).unwrap();
        assert!(share < 1.0, "peak should exclude some players, share {share}");
    }

    #[test]
    fn welfare_is_single_peaked_at_optimal_lambda() {
        let grid = 10_000usize;
        for gamma in [0.1, 0.2, gamma_inc(), 0.375, 0.5, 0.8] {
            let l_star = optimal_lambda(gamma).unwrap();
            let mut prev = None;
            for i in 1..grid {
                let l = i as f64 / grid as f64;
                let w = welfare_per_player(l, gamma).unwrap();
                if let Some((lp, wp)) = prev {
                    let rising = w > wp;
                    if l < l_star && lp < l_star {
                        assert!(rising, "gamma={gamma}: W fell at l={l} < l*={l_star}");
                    }
                    if lp > l_star {
                        assert!(!rising, "gamma={gamma}: W rose at l={l} > l*={l_star}");
                    }
                }
                prev = Some((l, w));
            }
        }
    }

    #[test]
    fn sustainable_cartels_have_positive_welfare() {
        // Without advertising only lambda < 1 attracts members, and every
        // such cartel weakly improves welfare, vanishing at the lambda -> 1
        // limit.
        for gamma in [0.1, 0.5, 0.9] {
            for i in 1..100 {
                let l = i as f64 / 100.0;
                let a = agreement_from_lambda(l);
                if entry_equilibrium(&a, gamma).unwrap() != EntryOutcome::NobodyJoins {
                    assert!(a.requirement < FRAC_PI_2 + 1e-12);
                    assert!(welfare_per_player(l, gamma).unwrap() > 0.0);
                }
            }
        }
        assert!(welfare_per_player(1.0, 0.5).unwrap().abs() < 1e-15);
    }

    #[test]
    fn entry_requirement_scaling() {
        let gamma = 0.5;
        let base = CartelAgreement::from_lambda(0.3).unwrap();
        let eff1 = entry_requirement_effects(&base, gamma).unwrap();
        assert!((eff1.member_value - member_mean_payoff(0.3, gamma).unwrap()).abs() < 1e-15);
        assert!((eff1.welfare - welfare_per_player(0.3, gamma).unwrap()).abs() < 1e-15);

        let restricted = CartelAgreement::with_min_reach(base.requirement, 2.0).unwrap();
        let eff2 = entry_requirement_effects(&restricted, gamma).unwrap();
        assert!((eff2.member_value - 2.0 * eff1.member_value).abs() < 1e-12);
        assert!((eff2.welfare - eff1.welfare / 2.0).abs() < 1e-12);
        // lambda <= gamma: everyone eligible joins, so the share is the
        // eligibility probability min_reach^{-2}.
        assert!((membership_share(0.3, gamma, 2.0).unwrap() - 0.25).abs() < 1e-15);

        // Threshold case scales linearly in min_reach.
        let tight = CartelAgreement::with_min_reach(2.0 * 0.5f64.atan(), 3.0).unwrap();
        match entry_equilibrium(&tight, 0.1).unwrap() {
            EntryOutcome::ThresholdJoin { r_bar } => {
                assert!((r_bar - 3.5 * 3.0).abs() < 1e-12)
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn slope_poly_signs_at_brackets() {
        for gamma in [0.05, 0.2, 0.34] {
            assert!(welfare_slope_poly(1e-9, gamma) > 0.0);
            assert!(welfare_slope_poly(1.0 - 1e-9, gamma) < 0.0);
        }
    }
}
