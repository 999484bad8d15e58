//! Monte Carlo verification of the closed forms: engagement rates, member
//! payoffs (scaled by KAPPA), welfare curves and price formation.
//!
//! Run with: cargo run --release --example monte_carlo_checks

use std::f64::consts::PI;

use influencer_cartels::advertising::price_natural;
use influencer_cartels::cartel::{CartelAgreement, KAPPA};
use influencer_cartels::equilibrium::{engagement_probability, equilibrium_rule};
use influencer_cartels::montecarlo::{
    simulate_market, simulate_natural, welfare_grid, SimConfig,
};

fn main() {
    let base = SimConfig {
        n_players: 100_000,
        gamma: 0.5,
        v: 1.0,
        epsilon: 0.0,
        agreement: None,
        seed: 7,
        replications: 6,
    };

    let report = simulate_natural(&base).unwrap();
    let expect = engagement_probability(&equilibrium_rule(0.5).unwrap());
    println!("natural market, gamma = 0.5:");
    println!("  engagement rate: {:.5} (analytic {:.5})", report.engagement_rate, expect);
    println!(
        "  realized price:  {:.5} (analytic {:.5})",
        report.realized_price,
        price_natural(0.5, 1.0).unwrap()
    );

    let mixed = SimConfig {
        epsilon: 0.4,
        agreement: Some(CartelAgreement::new(PI).unwrap()),
        ..base.clone()
    };
    let report = simulate_market(&mixed).unwrap();
    println!("\nmixed market, 40% general-cartel engagement:");
    println!(
        "  realized price:  {:.5} (analytic {:.5})",
        report.realized_price,
        0.6 * price_natural(0.5, 1.0).unwrap()
    );

    println!("\nwelfare curve overlay (gamma = 0.375), closed form units via KAPPA = {KAPPA:.5}:");
    println!(
        "{:>8} {:>12} {:>12} {:>8} {:>12} {:>12}",
        "lambda", "W analytic", "W mc", "z", "V analytic", "V mc"
    );
    let lambdas: Vec<f64> = (1..=8).map(|i| i as f64 / 8.5).collect();
    for row in welfare_grid(&[0.375], &lambdas, 60_000, 10, 11).unwrap() {
        let z = (row.w_mc - row.w_analytic) / row.stderr;
        println!(
            "{:>8.4} {:>12.5} {:>12.5} {z:>+8.2} {:>12.5} {:>12.5}",
            row.lambda, row.w_analytic, row.w_mc, row.v_analytic, row.v_mc
        );
    }
}
