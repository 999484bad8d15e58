//! The cartel entry game: who joins, and the Monte Carlo verification of
//! the participation threshold (2-γ-λ)/(λ-γ).
//!
//! Run with: cargo run --example entry_game

use influencer_cartels::cartel::{cartel_member_payoff, entry_equilibrium, CartelAgreement, EntryOutcome};
use influencer_cartels::model::{rad_to_deg, truncated_mean_reach};
use influencer_cartels::montecarlo::{simulate_cartel_entry, SimConfig};

fn main() {
    println!("entry outcomes across engagement requirements (gamma = 0.3):\n");
    println!("{:>10} {:>8} {:>24}", "Λ (°)", "λ", "outcome");
    for lambda in [0.1, 0.25, 0.3, 0.5, 0.8, 1.0, 1.3] {
        let requirement = 2.0 * f64::atan(lambda);
        let agreement = CartelAgreement::new(requirement).unwrap();
        let outcome = entry_equilibrium(&agreement, 0.3).unwrap();
        let label = match outcome {
            EntryOutcome::AllJoin => "everyone joins".to_string(),
            EntryOutcome::ThresholdJoin { r_bar } => format!("reach ≤ {r_bar:.3} joins"),
            EntryOutcome::NobodyJoins => "nobody joins".to_string(),
        };
        println!("{:>10.2} {lambda:>8.2} {label:>24}", rad_to_deg(requirement));
    }

    // Verify one threshold by simulation.
    let gamma = 0.1;
    let lambda = 0.5;
    let agreement = CartelAgreement::from_lambda(lambda).unwrap();
    let closed_form = match entry_equilibrium(&agreement, gamma).unwrap() {
        EntryOutcome::ThresholdJoin { r_bar } => r_bar,
        other => panic!("unexpected {other:?}"),
    };
    let config = SimConfig {
        n_players: 200_000,
        gamma,
        v: 0.0,
        epsilon: 0.0,
        agreement: Some(agreement),
        seed: 42,
        replications: 8,
    };
    let report = simulate_cartel_entry(&config).unwrap();
    let r_bar = report.fixed_point_r_bar.unwrap();
    println!("\nMonte Carlo check at gamma = {gamma}, lambda = {lambda}:");
    println!("  closed form threshold: {closed_form:.4}");
    println!("  simulated fixed point: {r_bar:.4} ± {:.4}", report.stderr_r_bar);
    println!("  membership share:      {:.4}", report.membership_share);

    // The marginal member is indifferent; reaches just around the threshold
    // strictly prefer their side.
    let e_reach = truncated_mean_reach(closed_form);
    for reach in [0.9 * closed_form, closed_form, 1.1 * closed_form] {
        let payoff = cartel_member_payoff(reach, &agreement, gamma, e_reach).unwrap();
        println!("  payoff at reach {reach:>6.3}: {payoff:+.5}");
    }
}
