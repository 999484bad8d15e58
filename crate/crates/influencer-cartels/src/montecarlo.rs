//! Sampled-sequence simulator used to verify the closed forms: engagement
//! rates, cartel payoffs, entry fixed points, welfare curves, and price
//! formation.
//!
//! Replications are independent: each owns a counter-derived ChaCha stream,
//! so reports are bit-identical for a given `(config, seed)` regardless of
//! how many worker threads run them. Standard errors are computed across
//! replications, never within a sequence, because adjacent players' payoffs
//! share engagement events.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::advertising::price_engagement;
use crate::cartel::{
    externality_per_reach, member_mean_payoff, own_term_per_reach, welfare_per_player,
    CartelAgreement, KAPPA,
};
use crate::equilibrium::equilibrium_rule;
use crate::error::{Error, Result};
use crate::model::{
    engagement_cost, engagement_welfare, sample_player, topic_distance, MarketParams,
};

const FIXED_POINT_TOL: f64 = 1e-9;
const FIXED_POINT_MAX_ITER: usize = 10_000;

/// Configuration of one simulation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    /// Players per replication.
    pub n_players: usize,
    pub gamma: f64,
    pub v: f64,
    pub epsilon: f64,
    /// Cartel agreement; `None` simulates the natural market only.
    pub agreement: Option<CartelAgreement>,
    pub seed: u64,
    pub replications: usize,
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_players < 2 {
            return Err(Error::config(format!(
                "need at least 2 players, got {}",
                self.n_players
            )));
        }
        if self.replications < 1 {
            return Err(Error::config("need at least 1 replication".to_string()));
        }
        MarketParams::new(self.gamma, self.v, self.epsilon)?;
        Ok(())
    }

    fn params(&self) -> MarketParams {
        MarketParams {
            gamma: self.gamma,
            v: self.v,
            epsilon: self.epsilon,
        }
    }

    fn rng_for(&self, replication: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(replication as u64 + 1);
        rng
    }
}

/// Aggregated simulation output. Means and standard errors are taken across
/// replications.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    /// Share of defined engagement slots that ended in engagement.
    pub engagement_rate: f64,
    pub mean_welfare_per_player: f64,
    pub stderr_welfare: f64,
    /// Mean realized payoff: per member in cartel runs, per player otherwise.
    pub mean_member_payoff: f64,
    pub stderr_member_payoff: f64,
    /// Share of players who belong to the cartel (0 without one).
    pub membership_share: f64,
    /// Sample mean of `v cos Δ` over engagement events.
    pub realized_price: f64,
    pub stderr_price: f64,
    /// Converged participation threshold; `None` without a cartel. Reported
    /// as `+∞` when every eligible player joins (serialized as null).
    pub fixed_point_r_bar: Option<f64>,
    pub stderr_r_bar: f64,
    pub n_players: usize,
    pub replications: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, Default)]
struct RepStats {
    engagement_rate: f64,
    welfare: f64,
    member_payoff: f64,
    membership_share: f64,
    price: f64,
    r_bar: f64,
}

fn mean_and_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 || !mean.is_finite() {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn aggregate(config: &SimConfig, reps: Vec<RepStats>, cartel: bool) -> SimReport {
    let col = |f: fn(&RepStats) -> f64| reps.iter().map(f).collect::<Vec<_>>();
    let (rate, _) = mean_and_stderr(&col(|r| r.engagement_rate));
    let (welfare, se_w) = mean_and_stderr(&col(|r| r.welfare));
    let (payoff, se_p) = mean_and_stderr(&col(|r| r.member_payoff));
    let (share, _) = mean_and_stderr(&col(|r| r.membership_share));
    let (price, se_price) = mean_and_stderr(&col(|r| r.price));
    let (r_bar, se_r) = mean_and_stderr(&col(|r| r.r_bar));
    SimReport {
        engagement_rate: rate,
        mean_welfare_per_player: welfare,
        stderr_welfare: se_w,
        mean_member_payoff: payoff,
        stderr_member_payoff: se_p,
        membership_share: share,
        realized_price: price,
        stderr_price: se_price,
        fixed_point_r_bar: if cartel { Some(r_bar) } else { None },
        stderr_r_bar: se_r,
        n_players: config.n_players,
        replications: config.replications,
        seed: config.seed,
    }
}

/// Simulate the natural market: every player follows the equilibrium rule
/// `Δ <= arctan γ`.
///
/// The first player of each sequence has no predecessor; her slot is
/// excluded from all averages.
pub fn simulate_natural(config: &SimConfig) -> Result<SimReport> {
    config.validate()?;
    let rule = equilibrium_rule(config.gamma)?;
    let gamma = config.gamma;
    let v = config.v;
    let reps: Vec<RepStats> = (0..config.replications)
        .into_par_iter()
        .map(|rep| {
            let mut rng = config.rng_for(rep);
            let n = config.n_players;
            let players: Vec<_> = (0..n).map(|_| sample_player(&mut rng)).collect();
            let mut engaged = vec![false; n];
            let mut deltas = vec![topic_distance(0.0, 0.0); n];
            let mut engagements = 0usize;
            let mut welfare_sum = 0.0;
            let mut cos_sum = 0.0;
            for t in 1..n {
                let d = topic_distance(players[t].alpha, players[t - 1].alpha);
                deltas[t] = d;
                if rule.engages(d) {
                    engaged[t] = true;
                    engagements += 1;
                    cos_sum += d.radians().cos();
                }
                welfare_sum += engagement_welfare(engaged[t], players[t].reach, d);
            }
            // Realized payoffs need both own and follower actions: defined
            // for players 1..n-1.
            let mut payoff_sum = 0.0;
            for t in 1..n.saturating_sub(1) {
                let mut u = 0.0;
                if engaged[t] {
                    u += gamma * players[t].reach * deltas[t].radians().cos()
                        - players[t].reach * engagement_cost(deltas[t]);
                }
                if engaged[t + 1] {
                    u += (1.0 - gamma) * players[t + 1].reach * deltas[t + 1].radians().cos();
                }
                payoff_sum += u;
            }
            let slots = (n - 1) as f64;
            RepStats {
                engagement_rate: engagements as f64 / slots,
                welfare: welfare_sum / slots,
                member_payoff: payoff_sum / (n.saturating_sub(2).max(1)) as f64,
                membership_share: 0.0,
                price: if engagements > 0 {
                    v * cos_sum / engagements as f64
                } else {
                    0.0
                },
                r_bar: 0.0,
            }
        })
        .collect();
    Ok(aggregate(config, reps, false))
}

/// Empirical reach sample with prefix sums, for O(log n) conditional means.
pub struct ReachSample {
    sorted: Vec<f64>,
    prefix: Vec<f64>,
}

impl ReachSample {
    pub fn new(mut reaches: Vec<f64>) -> Self {
        reaches.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut prefix = Vec::with_capacity(reaches.len() + 1);
        let mut acc = 0.0;
        prefix.push(0.0);
        for r in &reaches {
            acc += r;
            prefix.push(acc);
        }
        ReachSample {
            sorted: reaches,
            prefix,
        }
    }

    fn count_below(&self, x: f64) -> usize {
        self.sorted.partition_point(|r| *r <= x)
    }

    /// Count and mean of reaches in `[lo, hi]`.
    pub fn band(&self, lo: f64, hi: f64) -> (usize, f64) {
        let i0 = self.sorted.partition_point(|r| *r < lo);
        let i1 = if hi.is_infinite() {
            self.sorted.len()
        } else {
            self.count_below(hi)
        };
        if i1 <= i0 {
            return (0, f64::NAN);
        }
        let count = i1 - i0;
        let mean = (self.prefix[i1] - self.prefix[i0]) / count as f64;
        (count, mean)
    }
}

/// Result of the best-response iteration on an empirical reach sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EmpiricalEntry {
    /// The own-engagement term is non-negative: joining dominates at every
    /// reach, the threshold is infinite.
    AllJoin,
    /// Interior fixed point.
    Threshold(f64),
    /// No sampled player is willing to join.
    Empty,
}

/// Iterate the threshold best response on an empirical reach sample until
/// the iterates move less than 1e-9.
///
/// Given a candidate threshold, membership is every sampled reach in
/// `[min_reach, r̄]`; the follower-reach expectation is the sample mean over
/// that band; the next candidate is the reach at which the member payoff
/// (including advertising revenue when `v > 0`) crosses zero. Starting from
/// `+∞` (the all-in best response, the default) the iteration descends to
/// the stable fixed point; a candidate whose band is empty means the
/// best-response threshold fell below every eligible reach, i.e. nobody
/// joins. A damping factor of 0.5 kicks in only when the iterates
/// oscillate, so monotone contractions — every closed-form-comparable case —
/// are left untouched.
pub fn entry_fixed_point(
    sample: &ReachSample,
    agreement: &CartelAgreement,
    params: &MarketParams,
    start: f64,
) -> Result<EmpiricalEntry> {
    let t_own = own_term_per_reach(agreement.requirement, params.gamma);
    if t_own >= 0.0 {
        return Ok(EmpiricalEntry::AllJoin);
    }
    let t_ext = externality_per_reach(agreement.requirement, params.gamma);
    let quote = price_engagement(params, agreement.requirement)?;
    let ad_rate = agreement.requirement / PI * (1.0 - params.gamma) * quote.engagement;

    let next_candidate = |r_bar: f64| -> Option<f64> {
        let (count, mean) = sample.band(agreement.min_reach, r_bar);
        if count == 0 {
            return None;
        }
        // Zero of r -> r * t_own + mean * t_ext + KAPPA * ad_rate * mean.
        Some((mean * t_ext + KAPPA * ad_rate * mean) / -t_own)
    };

    let mut r = start.max(agreement.min_reach);
    let mut last_delta = 0.0f64;
    let mut oscillations = 0usize;
    for _ in 0..FIXED_POINT_MAX_ITER {
        let proposed = match next_candidate(r) {
            Some(x) => x,
            None => return Ok(EmpiricalEntry::Empty),
        };
        let mut next = proposed;
        let delta = next - r;
        if delta * last_delta < 0.0 {
            oscillations += 1;
            if oscillations >= 2 {
                next = 0.5 * (next + r);
            }
        } else {
            oscillations = 0;
        }
        last_delta = delta;
        if (next - r).abs() < FIXED_POINT_TOL {
            if next < agreement.min_reach {
                return Ok(EmpiricalEntry::Empty);
            }
            return Ok(EmpiricalEntry::Threshold(next));
        }
        r = next;
    }
    Err(Error::NonConvergence {
        last: r,
        iterations: FIXED_POINT_MAX_ITER,
    })
}

/// Simulate the cartel entry game and the realized payoffs of the resulting
/// membership.
pub fn simulate_cartel_entry(config: &SimConfig) -> Result<SimReport> {
    config.validate()?;
    let agreement = config
        .agreement
        .ok_or_else(|| Error::config("cartel simulation requires an agreement".to_string()))?;
    let params = config.params();
    let reps: Result<Vec<RepStats>> = (0..config.replications)
        .into_par_iter()
        .map(|rep| {
            let mut rng = config.rng_for(rep);
            let n = config.n_players;
            let players: Vec<_> = (0..n).map(|_| sample_player(&mut rng)).collect();
            let sample = ReachSample::new(players.iter().map(|p| p.reach).collect());
            let entry = entry_fixed_point(&sample, &agreement, &params, f64::INFINITY)?;
            let (r_bar, joins): (f64, Box<dyn Fn(f64) -> bool>) = match entry {
                EmpiricalEntry::AllJoin => (
                    f64::INFINITY,
                    Box::new(move |r| r >= agreement.min_reach),
                ),
                EmpiricalEntry::Threshold(t) => {
                    (t, Box::new(move |r| r >= agreement.min_reach && r <= t))
                }
                EmpiricalEntry::Empty => (agreement.min_reach, Box::new(|_| false)),
            };
            let quote = price_engagement(&params, agreement.requirement)?;

            let members: Vec<usize> = (0..n).filter(|&i| joins(players[i].reach)).collect();
            let mut welfare_sum = 0.0;
            let mut cos_sum = 0.0;
            let mut engagements = 0usize;
            // Own-action component of each member's payoff, indexed by
            // position in `members`; the externality is credited to the
            // predecessor below.
            let mut own_component = vec![0.0; members.len()];
            let mut received = vec![0.0; members.len()];
            for w in 1..members.len() {
                let cur = players[members[w]];
                let prev = players[members[w - 1]];
                let d = topic_distance(cur.alpha, prev.alpha);
                let engages = d.radians() <= agreement.requirement;
                welfare_sum += engagement_welfare(engages, cur.reach, d);
                if engages {
                    engagements += 1;
                    cos_sum += d.radians().cos();
                    own_component[w] += params.gamma * cur.reach * d.radians().cos()
                        - cur.reach * engagement_cost(d);
                    // Externality plus advertising revenue, both credited to
                    // the member who received the engagement.
                    received[w - 1] += (1.0 - params.gamma)
                        * cur.reach
                        * (d.radians().cos() + quote.engagement);
                }
            }
            // Members with both neighbors defined: positions 1..len-1.
            let mut payoff_sum = 0.0;
            let interior = members.len().saturating_sub(2);
            for w in 1..members.len().saturating_sub(1) {
                payoff_sum += own_component[w] + received[w];
            }
            let transitions = members.len().saturating_sub(1);
            Ok(RepStats {
                engagement_rate: if transitions > 0 {
                    engagements as f64 / transitions as f64
                } else {
                    0.0
                },
                welfare: welfare_sum / (n - 1) as f64,
                member_payoff: if interior > 0 {
                    payoff_sum / interior as f64
                } else {
                    0.0
                },
                membership_share: members.len() as f64 / n as f64,
                price: if engagements > 0 {
                    config.v * cos_sum / engagements as f64
                } else {
                    0.0
                },
                r_bar,
            })
        })
        .collect();
    Ok(aggregate(config, reps?, true))
}

/// Simulate price formation: a share `ε` of engagement events comes from the
/// cartel (distance uniform up to the requirement), the rest from natural
/// engagement (distance uniform up to `arctan γ`).
pub fn simulate_market(config: &SimConfig) -> Result<SimReport> {
    config.validate()?;
    if config.epsilon > 0.0 && config.agreement.is_none() {
        return Err(Error::config(
            "market simulation with cartel share needs an agreement".to_string(),
        ));
    }
    let natural_cutoff = config.gamma.atan();
    let cartel_cutoff = config.agreement.map(|a| a.requirement).unwrap_or(0.0);
    let reps: Vec<RepStats> = (0..config.replications)
        .into_par_iter()
        .map(|rep| {
            let mut rng = config.rng_for(rep);
            let n = config.n_players;
            let mut cos_sum = 0.0;
            let mut welfare_sum = 0.0;
            let mut cartel_events = 0usize;
            for _ in 0..n {
                let from_cartel = rng.random::<f64>() < config.epsilon;
                let cutoff = if from_cartel {
                    cartel_events += 1;
                    cartel_cutoff
                } else {
                    natural_cutoff
                };
                let d = crate::model::TopicDistance::new(rng.random::<f64>() * cutoff)
                    .expect("cutoff within [0, pi]");
                let reach = crate::model::reach_from_uniform(rng.random::<f64>());
                cos_sum += d.radians().cos();
                welfare_sum += engagement_welfare(true, reach, d);
            }
            RepStats {
                engagement_rate: 1.0,
                welfare: welfare_sum / n as f64,
                member_payoff: 0.0,
                membership_share: cartel_events as f64 / n as f64,
                price: config.v * cos_sum / n as f64,
                r_bar: 0.0,
            }
        })
        .collect();
    Ok(aggregate(config, reps, false))
}

/// One row of the welfare-curve sweep: closed forms next to their Monte
/// Carlo estimates, scaled to closed-form units with [`KAPPA`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WelfareGridRow {
    pub gamma: f64,
    pub lambda: f64,
    pub w_analytic: f64,
    pub w_mc: f64,
    pub stderr: f64,
    pub v_analytic: f64,
    pub v_mc: f64,
    pub membership_share: f64,
}

/// Stable per-cell seed derivation for grid sweeps (splitmix64 over the base
/// seed and the cell coordinates).
pub fn mix_seed(base: u64, i: u64, j: u64) -> u64 {
    let mut z = base
        .wrapping_add(i.wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add(j.wrapping_mul(0xBF58_476D_1CE4_E5B9));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Sweep the welfare curve over a `(gamma, lambda)` grid, attaching Monte
/// Carlo estimates to the closed forms.
pub fn welfare_grid(
    gammas: &[f64],
    lambdas: &[f64],
    n_players: usize,
    replications: usize,
    seed: u64,
) -> Result<Vec<WelfareGridRow>> {
    let mut rows = Vec::with_capacity(gammas.len() * lambdas.len());
    for (i, &gamma) in gammas.iter().enumerate() {
        for (j, &lambda) in lambdas.iter().enumerate() {
            let agreement = CartelAgreement::from_lambda(lambda)?;
            let config = SimConfig {
                n_players,
                gamma,
                v: 0.0,
                epsilon: 0.0,
                agreement: Some(agreement),
                seed: mix_seed(seed, i as u64, j as u64),
                replications,
            };
            let report = simulate_cartel_entry(&config)?;
            rows.push(WelfareGridRow {
                gamma,
                lambda,
                w_analytic: welfare_per_player(lambda, gamma)?,
                w_mc: KAPPA * report.mean_welfare_per_player,
                stderr: KAPPA * report.stderr_welfare,
                v_analytic: member_mean_payoff(lambda, gamma)?,
                v_mc: KAPPA * report.mean_member_payoff,
                membership_share: report.membership_share,
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cartel::{cartel_member_payoff, entry_equilibrium, EntryOutcome};
    use crate::equilibrium::engagement_probability;

    fn base_config() -> SimConfig {
        SimConfig {
            n_players: 100_000,
            gamma: 0.5,
            v: 0.0,
            epsilon: 0.0,
            agreement: None,
            seed: 20_240_601,
            replications: 8,
        }
    }

    #[test]
    fn natural_engagement_rate_matches_probability() {
        let config = base_config();
        let report = simulate_natural(&config).unwrap();
        let expect = engagement_probability(&equilibrium_rule(0.5).unwrap());
        let se = 3.0 * (expect * (1.0 - expect) / (config.n_players as f64 * 8.0)).sqrt();
        assert!(
            (report.engagement_rate - expect).abs() < se.max(1e-4),
            "rate {} vs {expect}",
            report.engagement_rate
        );
        assert!(report.mean_welfare_per_player >= 0.0);
    }

    #[test]
    fn natural_rate_vanishes_with_gamma() {
        let config = SimConfig {
            gamma: 1e-4,
            n_players: 50_000,
            replications: 2,
            ..base_config()
        };
        let report = simulate_natural(&config).unwrap();
        assert!(report.engagement_rate < 1e-3);
    }

    #[test]
    fn reports_are_deterministic() {
        let config = SimConfig {
            n_players: 10_000,
            replications: 3,
            ..base_config()
        };
        let a = simulate_natural(&config).unwrap();
        let b = simulate_natural(&config).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }

    #[test]
    fn entry_threshold_matches_closed_form() {
        let agreement = CartelAgreement::from_lambda(0.5).unwrap();
        let config = SimConfig {
            gamma: 0.1,
            agreement: Some(agreement),
            n_players: 200_000,
            ..base_config()
        };
        let report = simulate_cartel_entry(&config).unwrap();
        let r_bar = report.fixed_point_r_bar.unwrap();
        assert!(
            (r_bar - 3.5).abs() < 3.0 * report.stderr_r_bar.max(1e-3),
            "r_bar {r_bar} se {}",
            report.stderr_r_bar
        );
        match entry_equilibrium(&agreement, 0.1).unwrap() {
            EntryOutcome::ThresholdJoin { r_bar: closed } => {
                assert!((closed - 3.5).abs() < 1e-12)
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn all_join_and_nobody_joins_cases() {
        let low = SimConfig {
            gamma: 0.5,
            agreement: Some(CartelAgreement::from_lambda(0.3).unwrap()),
            n_players: 20_000,
            replications: 2,
            ..base_config()
        };
        let report = simulate_cartel_entry(&low).unwrap();
        assert!((report.membership_share - 1.0).abs() < 1e-12);
        assert!(report.fixed_point_r_bar.unwrap().is_infinite());

        let harsh = SimConfig {
            gamma: 0.5,
            agreement: Some(CartelAgreement::new(2.0 * 1.2f64.atan()).unwrap()),
            n_players: 20_000,
            replications: 2,
            ..base_config()
        };
        let report = simulate_cartel_entry(&harsh).unwrap();
        assert_eq!(report.membership_share, 0.0);
    }

    #[test]
    fn fixed_point_is_stable_across_restarts() {
        let agreement = CartelAgreement::from_lambda(0.6).unwrap();
        let params = MarketParams::new(0.2, 0.0, 0.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let sample =
            ReachSample::new((0..300_000).map(|_| sample_player(&mut rng).reach).collect());
        let mut values = Vec::new();
        for start in [1.01, 10.0, 1000.0] {
            match entry_fixed_point(&sample, &agreement, &params, start).unwrap() {
                EmpiricalEntry::Threshold(t) => values.push(t),
                other => panic!("unexpected {other:?}"),
            }
        }
        assert!((values[0] - values[1]).abs() < 1e-6);
        assert!((values[0] - values[2]).abs() < 1e-6);
    }

    #[test]
    fn marginal_member_payoff_brackets_zero() {
        // At the converged threshold the closed-form payoff of the marginal
        // type is within MC error of zero, positive below, negative above.
        let agreement = CartelAgreement::from_lambda(0.5).unwrap();
        let config = SimConfig {
            gamma: 0.1,
            agreement: Some(agreement),
            n_players: 400_000,
            ..base_config()
        };
        let report = simulate_cartel_entry(&config).unwrap();
        let r_bar = report.fixed_point_r_bar.unwrap();
        let e_reach = crate::model::truncated_mean_reach(r_bar);
        let at = cartel_member_payoff(r_bar, &agreement, 0.1, e_reach).unwrap();
        assert!(at.abs() < 0.02, "payoff at threshold {at}");
        assert!(cartel_member_payoff(r_bar * 0.9, &agreement, 0.1, e_reach).unwrap() > 0.0);
        assert!(cartel_member_payoff(r_bar * 1.1, &agreement, 0.1, e_reach).unwrap() < 0.0);
    }

    #[test]
    fn kappa_scales_member_payoff_to_closed_form() {
        // kappa * (MC mean member payoff) ~ closed-form V on a grid.
        let mut checked = 0;
        for &gamma in &[0.1, 0.3, 0.5, 0.7] {
            for &lambda in &[0.15, 0.3, 0.45, 0.6, 0.8] {
                let config = SimConfig {
                    gamma,
                    agreement: Some(CartelAgreement::from_lambda(lambda).unwrap()),
                    n_players: 150_000,
                    replications: 10,
                    seed: mix_seed(1, (gamma * 100.0) as u64, (lambda * 100.0) as u64),
                    ..base_config()
                };
                let report = simulate_cartel_entry(&config).unwrap();
                let v_mc = KAPPA * report.mean_member_payoff;
                let se = KAPPA * report.stderr_member_payoff;
                let v = member_mean_payoff(lambda, gamma).unwrap();
                assert!(
                    (v_mc - v).abs() < 3.0 * se.max(1e-4),
                    "gamma={gamma} lambda={lambda}: {v_mc} vs {v} (se {se})"
                );
                checked += 1;
            }
        }
        assert!(checked >= 20);
    }

    #[test]
    fn market_price_examples() {
        let natural_only = SimConfig {
            epsilon: 0.0,
            v: 1.0,
            n_players: 400_000,
            ..base_config()
        };
        let report = simulate_market(&natural_only).unwrap();
        assert!(
            (report.realized_price - 0.9645549482369494).abs()
                < 3.0 * report.stderr_price.max(1e-5),
            "price {}",
            report.realized_price
        );

        let general = SimConfig {
            epsilon: 1.0,
            v: 1.0,
            agreement: Some(CartelAgreement::new(PI).unwrap()),
            n_players: 400_000,
            ..base_config()
        };
        let report = simulate_market(&general).unwrap();
        assert!(
            report.realized_price.abs() < 3.0 * report.stderr_price,
            "price {} se {}",
            report.realized_price,
            report.stderr_price
        );

        let mixed = SimConfig {
            epsilon: 0.5,
            v: 1.0,
            agreement: Some(CartelAgreement::new(PI).unwrap()),
            n_players: 400_000,
            ..base_config()
        };
        let report = simulate_market(&mixed).unwrap();
        assert!(
            (report.realized_price - 0.5 * 0.9645549482369494).abs()
                < 3.0 * report.stderr_price.max(1e-5)
        );
    }

    #[test]
    fn welfare_grid_overlays_closed_forms() {
        let lambdas: Vec<f64> = (1..=10).map(|i| i as f64 / 11.0).collect();
        let rows = welfare_grid(&[0.375], &lambdas, 60_000, 6, 17).unwrap();
        for row in rows {
            assert!(
                (row.w_mc - row.w_analytic).abs() < 3.0 * row.stderr.max(2e-3),
                "lambda={}: {} vs {} (se {})",
                row.lambda,
                row.w_mc,
                row.w_analytic,
                row.stderr
            );
        }
    }

    #[test]
    fn config_validation() {
        let mut config = base_config();
        config.n_players = 1;
        assert!(simulate_natural(&config).is_err());
        let mut config = base_config();
        config.replications = 0;
        assert!(simulate_natural(&config).is_err());
        let config = base_config();
        assert!(simulate_cartel_entry(&config).is_err(), "missing agreement");
    }
}
