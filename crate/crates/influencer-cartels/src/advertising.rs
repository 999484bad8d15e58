//! Engagement pricing and cartel sustainability once advertisers pay for
//! engagement quantity.
//!
//! Advertisers observe how much engagement a post received but not where it
//! came from, so the competitive price of one engagement unit is the
//! expected match quality `E[cos Δ]` over whoever engages, times the
//! marginal value `v`. Natural engagement is selected (`Δ <= arctan γ`);
//! cartel engagement is only as good as the cartel's requirement allows.
//!
//! # Units
//!
//! Payoffs returned here are per-member expectations: the closed-form cartel
//! payoff is divided by [`KAPPA`](crate::cartel::KAPPA) before the advertising
//! term (already an expectation) is added. Sign and threshold statements are
//! invariant to that normalization choice; absolute magnitudes are reported
//! in expectation units.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::cartel::{cartel_member_payoff, CartelAgreement, KAPPA};
use crate::error::{Error, Result};
use crate::model::{banded_mean_reach, MarketParams};

/// Per-unit engagement prices, in the same money units as `v`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PriceQuote {
    /// Price of natural (equilibrium-selected) engagement.
    pub natural: f64,
    /// Price of engagement from a cartel with the quoted requirement.
    pub cartel: f64,
    /// Blended market price: `(1-ε) natural + ε cartel`.
    pub engagement: f64,
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::domain(format!(
            "gamma must lie strictly in (0, 1), got {gamma}"
        )));
    }
    Ok(())
}

/// Price of natural engagement: `v γ / (arctan(γ) √(γ²+1))`.
///
/// Lies strictly inside `(0.9 v, v)` for every `gamma` in `(0, 1)`.
pub fn price_natural(gamma: f64, v: f64) -> Result<f64> {
    check_gamma(gamma)?;
    if !(v >= 0.0) {
        return Err(Error::domain(format!("v must be >= 0, got {v}")));
    }
    Ok(v * gamma / (gamma.atan() * (gamma * gamma + 1.0).sqrt()))
}

/// Price of cartel engagement with requirement `Λ` (radians): `v sin(Λ)/Λ`.
pub fn price_cartel(requirement: f64, v: f64) -> Result<f64> {
    if !(requirement > 0.0 && requirement <= PI) {
        return Err(Error::domain(format!(
            "engagement requirement must lie in (0, π], got {requirement}"
        )));
    }
    if !(v >= 0.0) {
        return Err(Error::domain(format!("v must be >= 0, got {v}")));
    }
    // sin(pi) is ~1e-16 in f64; a general cartel prices at exactly zero.
    if requirement >= PI {
        return Ok(0.0);
    }
    Ok(v * requirement.sin() / requirement)
}

/// Blended price when a share `ε` of engagement comes from a cartel with the
/// given requirement.
pub fn price_engagement(params: &MarketParams, requirement: f64) -> Result<PriceQuote> {
    let natural = price_natural(params.gamma, params.v)?;
    let cartel = price_cartel(requirement, params.v)?;
    Ok(PriceQuote {
        natural,
        cartel,
        engagement: (1.0 - params.epsilon) * natural + params.epsilon * cartel,
    })
}

/// Expected payoff (expectation units) of a cartel member once advertising
/// revenue is added: the no-advertising payoff plus
/// `(Λ/π)(1-γ) E[R | member] p_engagement`.
pub fn cartel_ad_payoff(
    reach: f64,
    agreement: &CartelAgreement,
    params: &MarketParams,
    expected_member_reach: f64,
) -> Result<f64> {
    let base = cartel_member_payoff(reach, agreement, params.gamma, expected_member_reach)? / KAPPA;
    let quote = price_engagement(params, agreement.requirement)?;
    Ok(base
        + agreement.requirement / PI
            * (1.0 - params.gamma)
            * expected_member_reach
            * quote.engagement)
}

/// Smallest marginal engagement value `v` that sustains a membership
/// threshold of at least `r_bar_target`.
///
/// Solves `cartel_ad_payoff(r_bar_target) = 0` for `v`, with the member reach
/// expectation implied by the target band; the payoff is affine and strictly
/// increasing in `v`, so the root is unique. Returns 0 when the cartel is
/// already self-sustaining at the target without advertising (`λ <= γ`, or a
/// threshold equilibrium whose `r_bar` exceeds the target).
pub fn min_v_for_sustained_cartel(
    agreement: &CartelAgreement,
    gamma: f64,
    epsilon: f64,
    r_bar_target: f64,
) -> Result<f64> {
    check_gamma(gamma)?;
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::domain(format!(
            "epsilon must lie in [0, 1], got {epsilon}"
        )));
    }
    if !(r_bar_target > agreement.min_reach) {
        return Err(Error::domain(format!(
            "target threshold {r_bar_target} must exceed the entry requirement {}",
            agreement.min_reach
        )));
    }
    let expected_reach = banded_mean_reach(agreement.min_reach, r_bar_target);
    let base =
        cartel_member_payoff(r_bar_target, agreement, gamma, expected_reach)? / KAPPA;
    // Price per unit of v.
    let unit_quote = price_engagement(&MarketParams::new(gamma, 1.0, epsilon)?, agreement.requirement)?;
    let slope =
        agreement.requirement / PI * (1.0 - gamma) * expected_reach * unit_quote.engagement;
    if slope <= 0.0 {
        return Err(Error::domain(
            "advertising term has zero weight (epsilon = 1 with a worthless \
             general-cartel price); no finite v sustains the target"
                .to_string(),
        ));
    }
    Ok((-base / slope).max(0.0))
}

/// Whether members of a general cartel would gain from slightly tightening
/// the requirement below 180°.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TighteningGain {
    /// Cartel-share threshold `ε* = γ / (γ + arctan(γ) √(γ²+1))`, always
    /// below one half.
    pub epsilon_star: f64,
    /// True when `ε > ε*`: the price gain from tightening outweighs the lost
    /// engagement quantity.
    pub prefers_tighter: bool,
}

/// Sign of the members' gain from marginally tightening a general cartel.
///
/// Equals the sign of `-d[(Λ/π) p_engagement]/dΛ` at `Λ = 180°`.
pub fn tightening_gain_sign(gamma: f64, epsilon: f64) -> Result<TighteningGain> {
    check_gamma(gamma)?;
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::domain(format!(
            "epsilon must lie in [0, 1], got {epsilon}"
        )));
    }
    let epsilon_star = gamma / (gamma + gamma.atan() * (gamma * gamma + 1.0).sqrt());
    Ok(TighteningGain {
        epsilon_star,
        prefers_tighter: epsilon > epsilon_star,
    })
}

/// Welfare accounting of a general cartel (`Λ = 180°`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneralCartelEffects {
    /// Change in expected welfare per engagement slot (expectation units,
    /// attention units): the benefit of uniformly matched engagement averages
    /// to zero while the attention cost does not.
    pub social_welfare_delta: f64,
    /// Change in the engagement price received by influencers outside the
    /// cartel: `-ε p_natural`.
    pub outsider_price_delta: f64,
    /// Expected advertiser profit; zero in a competitive market.
    pub advertiser_expected_profit: f64,
}

/// Welfare effects of a general cartel supplying a share `ε` of engagement.
pub fn welfare_effects_of_general_cartel(params: &MarketParams) -> Result<GeneralCartelEffects> {
    // E[cos Δ] = 0 and E[C(Δ)] = 1/2 + 1/π for Δ uniform on [0, π]; the
    // engaging member's mean reach is 2, and a share ε of engagement slots
    // carries the cartel obligation.
    let expected_cost = 0.5 + 1.0 / PI;
    let natural = price_natural(params.gamma, params.v)?;
    Ok(GeneralCartelEffects {
        social_welfare_delta: -params.epsilon * 2.0 * expected_cost,
        outsider_price_delta: -params.epsilon * natural,
        advertiser_expected_profit: 0.0,
    })
}
