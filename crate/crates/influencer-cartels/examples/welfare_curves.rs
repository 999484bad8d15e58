//! Welfare and member-value curves over the engagement requirement, for the
//! three qualitatively different regimes of the internalized share.
//!
//! Writes `welfare_curves.csv` (long format, one row per (gamma, lambda))
//! ready for any plotting tool, and prints the peak of each curve.
//!
//! Run with: cargo run --example welfare_curves

use influencer_cartels::cartel::{
    gamma_inc, member_mean_payoff, membership_share, optimal_lambda, welfare_per_player,
    FIRST_BEST_LAMBDA,
};

fn main() {
    let gammas = [0.5, 0.375, 0.1];
    let points = 200;

    let mut csv = String::from("gamma,lambda,welfare,member_value,membership_share\n");
    for &gamma in &gammas {
        for i in 1..=points {
            let lambda = i as f64 / points as f64;
            csv.push_str(&format!(
                "{gamma},{lambda},{},{},{}\n",
                welfare_per_player(lambda, gamma).unwrap(),
                member_mean_payoff(lambda, gamma).unwrap(),
                membership_share(lambda, gamma, 1.0).unwrap()
            ));
        }
    }
    std::fs::write("welfare_curves.csv", csv).expect("write csv");
    println!("wrote welfare_curves.csv ({} gammas x {points} lambdas)\n", gammas.len());

    println!("first-best requirement: lambda_fb = {:.6} (45°)", FIRST_BEST_LAMBDA);
    println!("inclusion threshold:    gamma_inc = {:.6}\n", gamma_inc());
    println!(
        "{:>6} {:>12} {:>12} {:>12} {:>20}",
        "gamma", "peak lambda", "peak W", "share there", "regime"
    );
    for &gamma in &gammas {
        let l_star = optimal_lambda(gamma).unwrap();
        let regime = if gamma >= FIRST_BEST_LAMBDA {
            "first best"
        } else if gamma >= gamma_inc() {
            "capped at lambda=gamma"
        } else {
            "interior, some stay out"
        };
        println!(
            "{gamma:>6.3} {l_star:>12.6} {:>12.6} {:>12.4} {regime:>20}",
            welfare_per_player(l_star, gamma).unwrap(),
            membership_share(l_star, gamma, 1.0).unwrap()
        );
    }
}
