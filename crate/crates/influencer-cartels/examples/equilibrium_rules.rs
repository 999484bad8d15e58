//! Engagement decision rules: how the equilibrium cutoff arctan(γ) compares
//! with the 45° social optimum, and what that means for engagement rates.
//!
//! Run with: cargo run --example equilibrium_rules

use influencer_cartels::equilibrium::{
    engagement_probability, equilibrium_rule, social_optimum_rule,
};
use influencer_cartels::model::rad_to_deg;

fn main() {
    let social = social_optimum_rule();
    println!(
        "social optimum: engage whenever the topic distance is at most {:.1}°",
        rad_to_deg(social.threshold)
    );
    println!(
        "social-optimum engagement rate: {:.4}\n",
        engagement_probability(&social)
    );

    println!("{:>6} {:>14} {:>12} {:>14}", "gamma", "threshold (°)", "rate", "rate / social");
    for gamma in [0.05, 0.1, 0.25, 0.3444, 0.5, 0.75, 0.95] {
        let rule = equilibrium_rule(gamma).expect("gamma in (0,1)");
        let rate = engagement_probability(&rule);
        println!(
            "{gamma:>6.4} {:>14.3} {rate:>12.4} {:>14.3}",
            rad_to_deg(rule.threshold),
            rate / engagement_probability(&social)
        );
    }
    println!();
    println!("Every equilibrium engagement is also socially optimal; the reverse");
    println!("engagements (between arctan(γ) and 45°) are the ones free-riding kills.");
}
