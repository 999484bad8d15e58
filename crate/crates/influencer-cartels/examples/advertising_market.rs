//! Engagement pricing when advertisers pay for quantity: blended prices,
//! the advertising value needed to sustain a general cartel, and when
//! members would rather tighten the requirement.
//!
//! Run with: cargo run --example advertising_market

use std::f64::consts::PI;

use influencer_cartels::advertising::{
    min_v_for_sustained_cartel, price_engagement, tightening_gain_sign,
    welfare_effects_of_general_cartel,
};
use influencer_cartels::cartel::CartelAgreement;
use influencer_cartels::model::MarketParams;

fn main() {
    let gamma = 0.5;
    let v = 1.0;

    println!("blended engagement price, general cartel (Λ = 180°), v = {v}:\n");
    println!("{:>8} {:>12} {:>12} {:>12}", "epsilon", "natural", "cartel", "blended");
    for epsilon in [0.0, 0.1, 0.3, 0.5, 0.8, 1.0] {
        let params = MarketParams::new(gamma, v, epsilon).unwrap();
        let quote = price_engagement(&params, PI).unwrap();
        println!(
            "{epsilon:>8.2} {:>12.5} {:>12.5} {:>12.5}",
            quote.natural, quote.cartel, quote.engagement
        );
    }

    let general = CartelAgreement::new(PI).unwrap();
    println!("\nminimum v sustaining a membership threshold of 2 (gamma 0.5, eps 0.3):");
    let min_v = min_v_for_sustained_cartel(&general, gamma, 0.3, 2.0).unwrap();
    println!("  min_v = {min_v:.6}");
    for target in [1.5, 2.0, 4.0, 10.0] {
        let v_needed = min_v_for_sustained_cartel(&general, gamma, 0.3, target).unwrap();
        println!("  target reach {target:>5.1}: v >= {v_needed:.4}");
    }

    println!("\nwould general-cartel members gain from tightening Λ below 180°?");
    println!("{:>8} {:>12} {:>16}", "gamma", "epsilon*", "tighter at ε=0.6?");
    for g in [0.1, 0.3, 0.5, 0.7, 0.9] {
        let t = tightening_gain_sign(g, 0.6).unwrap();
        println!("{g:>8.2} {:>12.5} {:>16}", t.epsilon_star, t.prefers_tighter);
    }

    let params = MarketParams::new(gamma, v, 0.3).unwrap();
    let effects = welfare_effects_of_general_cartel(&params).unwrap();
    println!("\ngeneral cartel at ε = 0.3:");
    println!("  social welfare per engagement slot: {:+.5}", effects.social_welfare_delta);
    println!("  outsiders' price change:            {:+.5}", effects.outsider_price_delta);
    println!("  advertisers' expected profit:       {:+.5}", effects.advertiser_expected_profit);
}
