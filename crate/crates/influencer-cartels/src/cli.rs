//! Command-line front end. Every analytic, simulation, protocol and
//! empirics capability is a subcommand with file-based, deterministic
//! inputs and outputs.
//!
//! Conventions:
//! - angles are degrees on the command line and in files, radians inside;
//! - `--out -` (the default for most commands) writes to stdout;
//! - relative `--out` paths resolve against `--out-dir` (env
//!   `CARTELS_OUT_DIR`);
//! - `--config FILE` loads a JSON object whose keys are the long flag names
//!   of the active subcommand; values found there override the flags;
//! - every output embeds the resolved configuration (a `# config:` comment
//!   row in CSV, a `config` field in JSON), so reruns are byte-identical.

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::advertising::{
    min_v_for_sustained_cartel, price_engagement, tightening_gain_sign,
    welfare_effects_of_general_cartel, GeneralCartelEffects, PriceQuote, TighteningGain,
};
use crate::cartel::{
    entry_equilibrium, entry_requirement_effects, gamma_inc, member_mean_payoff,
    member_mean_reach, membership_share, optimal_lambda, welfare_per_player, CartelAgreement,
    EntryOutcome, EntryRequirementEffects, FIRST_BEST_LAMBDA, KAPPA,
};
use crate::empirics::coherence::npmi_coherence;
use crate::empirics::lda::{lda_fit, CorpusDoc, LdaModel, LdaParams, PruneParams};
use crate::empirics::panel::{
    fe_regression, normalized_value, CommenterClass, RegressionResult,
};
use crate::empirics::similarity::cosine_similarity;
use crate::empirics::synth::{synth_generate, SynthConfig};
use crate::empirics::text::extract_hashtags;
use crate::empirics::topic_match::topic_match_table;
use crate::equilibrium::{engagement_probability, equilibrium_rule, social_optimum_rule};
use crate::error::{Error, Result};
use crate::io;
use crate::model::{deg_to_rad, rad_to_deg, MarketParams};
use crate::montecarlo::{
    simulate_cartel_entry, simulate_market, simulate_natural, welfare_grid, SimConfig, SimReport,
};
use crate::pod::{derive_obligations, direct_engagement_count, validate, ObligationMode};

#[derive(Debug, Parser)]
#[command(
    name = "cartels",
    version,
    about = "Engagement-cartel model: analytics, simulation, pod protocol, empirics"
)]
pub struct Cli {
    /// Directory that relative output paths resolve against.
    #[arg(long, global = true, env = "CARTELS_OUT_DIR")]
    pub out_dir: Option<PathBuf>,
    /// JSON file with flag overrides for the active subcommand.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Worker threads for simulation replications (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Equilibrium and social-optimum engagement thresholds.
    Equilibrium(EquilibriumArgs),
    /// Entry game, payoffs and welfare for one cartel agreement.
    Cartel(CartelArgs),
    /// Welfare and member-value curves over a lambda grid.
    WelfareCurve(WelfareCurveArgs),
    /// Engagement prices and general-cartel welfare effects.
    Advertising(AdvertisingArgs),
    /// Smallest advertising value sustaining a membership target.
    MinV(MinVArgs),
    /// Monte Carlo simulation.
    #[command(subcommand)]
    Simulate(SimulateCmd),
    /// Engagement-pod protocol tools.
    #[command(subcommand)]
    Pod(PodCmd),
    /// Measurement pipeline on file inputs.
    #[command(subcommand)]
    Empirics(EmpiricsCmd),
}

#[derive(Debug, Subcommand)]
pub enum SimulateCmd {
    /// Natural (non-cooperative) engagement.
    Natural(SimulateArgs),
    /// Cartel entry fixed point and realized member payoffs.
    Cartel(SimulateArgs),
    /// Price formation with mixed natural and cartel engagement.
    Market(SimulateArgs),
}

#[derive(Debug, Subcommand)]
pub enum PodCmd {
    /// Derive engagement obligations from a submission log.
    Obligations(PodObligationsArgs),
    /// Check obligations against engagement events and purge violators.
    Validate(PodValidateArgs),
    /// Obligated engager counts per post.
    Counts(PodCountsArgs),
}

#[derive(Debug, Subcommand)]
pub enum EmpiricsCmd {
    /// Generate a synthetic panel with embeddings and ground truth.
    Synth(SynthArgs),
    /// Cosine similarity for id pairs over an embeddings file.
    Similarity(SimilarityArgs),
    /// Within-estimator panel regression with clustered standard errors.
    Regress(RegressArgs),
    /// Fit LDA by collapsed Gibbs sampling.
    Lda(LdaArgs),
    /// NPMI coherence of a fitted model over a corpus.
    Coherence(CoherenceArgs),
    /// Commenter topic-match table by author main topic and class.
    TopicMatch(TopicMatchArgs),
    /// Normalized engagement value from class similarity means.
    Value(ValueArgs),
}

fn merge_config<T: Serialize + DeserializeOwned>(args: T, overrides: &serde_json::Value) -> Result<T> {
    let mut base = serde_json::to_value(&args)
        .map_err(|e| Error::config(format!("cannot serialize arguments: {e}")))?;
    if let (serde_json::Value::Object(base_map), serde_json::Value::Object(over)) =
        (&mut base, overrides)
    {
        for (k, v) in over {
            base_map.insert(k.clone(), v.clone());
        }
    } else {
        return Err(Error::config(
            "config file must contain a JSON object".to_string(),
        ));
    }
    serde_json::from_value(base).map_err(|e| Error::config(format!("bad config override: {e}")))
}

fn load_overrides(path: &Option<PathBuf>) -> Result<Option<serde_json::Value>> {
    match path {
        None => Ok(None),
        Some(p) => {
            let text = io::read_to_string(&p.to_string_lossy())?;
            let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| {
                Error::config(format!("{}: invalid JSON: {e}", p.display()))
            })?;
            Ok(Some(value))
        }
    }
}

/// Apply `--config` overrides when present, otherwise pass through.
fn finalize<T: Serialize + DeserializeOwned>(args: T, overrides: &Option<serde_json::Value>) -> Result<T> {
    match overrides {
        None => Ok(args),
        Some(v) => merge_config(args, v),
    }
}

fn resolve_out(out: &Option<String>, out_dir: &Option<PathBuf>) -> String {
    match out {
        None => "-".to_string(),
        Some(p) if p == "-" => "-".to_string(),
        Some(p) => {
            let path = PathBuf::from(p);
            if path.is_relative() {
                if let Some(dir) = out_dir {
                    return dir.join(path).to_string_lossy().into_owned();
                }
            }
            p.clone()
        }
    }
}

fn config_json<T: Serialize>(args: &T) -> Result<String> {
    serde_json::to_string(args).map_err(|e| Error::config(format!("cannot echo config: {e}")))
}

pub fn run() -> Result<()> {
    run_with(Cli::parse())
}

pub fn run_with(cli: Cli) -> Result<()> {
    if let Some(threads) = cli.threads {
        // Best effort: the global pool can only be sized once per process.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    let overrides = load_overrides(&cli.config)?;
    let out_dir = cli.out_dir.clone();
    match cli.command {
        Command::Equilibrium(args) => cmd_equilibrium(finalize(args, &overrides)?, &out_dir),
        Command::Cartel(args) => cmd_cartel(finalize(args, &overrides)?, &out_dir),
        Command::WelfareCurve(args) => cmd_welfare_curve(finalize(args, &overrides)?, &out_dir),
        Command::Advertising(args) => cmd_advertising(finalize(args, &overrides)?, &out_dir),
        Command::MinV(args) => cmd_min_v(finalize(args, &overrides)?, &out_dir),
        Command::Simulate(sub) => {
            let kind = match &sub {
                SimulateCmd::Natural(_) => SimKind::Natural,
                SimulateCmd::Cartel(_) => SimKind::Cartel,
                SimulateCmd::Market(_) => SimKind::Market,
            };
            let (SimulateCmd::Natural(args)
            | SimulateCmd::Cartel(args)
            | SimulateCmd::Market(args)) = sub;
            cmd_simulate(kind, finalize(args, &overrides)?, &out_dir)
        }
        Command::Pod(sub) => match sub {
            PodCmd::Obligations(args) => cmd_pod_obligations(finalize(args, &overrides)?, &out_dir),
            PodCmd::Validate(args) => cmd_pod_validate(finalize(args, &overrides)?, &out_dir),
            PodCmd::Counts(args) => cmd_pod_counts(finalize(args, &overrides)?, &out_dir),
        },
        Command::Empirics(sub) => match sub {
            EmpiricsCmd::Synth(args) => cmd_synth(finalize(args, &overrides)?, &out_dir),
            EmpiricsCmd::Similarity(args) => cmd_similarity(finalize(args, &overrides)?, &out_dir),
            EmpiricsCmd::Regress(args) => cmd_regress(finalize(args, &overrides)?, &out_dir),
            EmpiricsCmd::Lda(args) => cmd_lda(finalize(args, &overrides)?, &out_dir),
            EmpiricsCmd::Coherence(args) => cmd_coherence(finalize(args, &overrides)?, &out_dir),
            EmpiricsCmd::TopicMatch(args) => cmd_topic_match(finalize(args, &overrides)?, &out_dir),
            EmpiricsCmd::Value(args) => cmd_value(finalize(args, &overrides)?, &out_dir),
        },
    }
}

// ---------------------------------------------------------------------------
// equilibrium

#[derive(Debug, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct EquilibriumArgs {
    /// Internalized benefit share, strictly in (0, 1).
    #[arg(long, default_value_t = 0.5)]
    pub gamma: f64,
    /// Output path (`-` = stdout). Not part of the echoed config.
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<String>,
}

impl Default for EquilibriumArgs {
    fn default() -> Self {
        EquilibriumArgs {
            gamma: 0.5,
            out: None,
        }
    }
}

#[derive(Serialize)]
struct EquilibriumReport<'a> {
    config: &'a EquilibriumArgs,
    equilibrium_threshold_deg: f64,
    social_optimum_threshold_deg: f64,
    equilibrium_engagement_probability: f64,
    social_optimum_engagement_probability: f64,
}

fn cmd_equilibrium(args: EquilibriumArgs, out_dir: &Option<PathBuf>) -> Result<()> {
    let eq = equilibrium_rule(args.gamma)?;
    let social = social_optimum_rule();
    let report = EquilibriumReport {
        config: &args,
        equilibrium_threshold_deg: rad_to_deg(eq.threshold),
        social_optimum_threshold_deg: rad_to_deg(social.threshold),
        equilibrium_engagement_probability: engagement_probability(&eq),
        social_optimum_engagement_probability: engagement_probability(&social),
    };
    io::write_output(&resolve_out(&args.out, out_dir), &io::to_json_pretty(&report)?)
}

// ---------------------------------------------------------------------------
// cartel

#[derive(Debug, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct CartelArgs {
    #[arg(long, default_value_t = 0.5)]
    pub gamma: f64,
    /// Engagement requirement in degrees, in (0, 180].
    #[arg(long, default_value_t = 45.0)]
    pub lambda_deg: f64,
    /// Minimum-reach entry requirement.
    #[arg(long, default_value_t = 1.0)]
    pub min_reach: f64,
    /// Reach of the member whose payoff is evaluated (default: the mean
    /// member reach under the entry equilibrium).
    #[arg(long)]
    pub reach: Option<f64>,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<String>,
}

impl Default for CartelArgs {
    fn default() -> Self {
        CartelArgs {
            gamma: 0.5,
            lambda_deg: 45.0,
            min_reach: 1.0,
            reach: None,
            out: None,
        }
    }
}

#[derive(Serialize)]
struct CartelReport<'a> {
    config: &'a CartelArgs,
    lambda: f64,
    entry: EntryOutcome,
    expected_member_reach: Option<f64>,
    evaluated_reach: Option<f64>,
    member_payoff_closed_units: Option<f64>,
    member_payoff_expectation_units: Option<f64>,
    welfare: Option<f64>,
    member_value: Option<f64>,
    membership_share: Option<f64>,
    entry_requirement_effects: Option<EntryRequirementEffects>,
    optimal_lambda: f64,
    gamma_inc: f64,
    first_best_lambda: f64,
    kappa: f64,
}

fn cmd_cartel(args: CartelArgs, out_dir: &Option<PathBuf>) -> Result<()> {
    let agreement = CartelAgreement::with_min_reach(deg_to_rad(args.lambda_deg), args.min_reach)?;
    let entry = entry_equilibrium(&agreement, args.gamma)?;
    let expected = match entry {
        EntryOutcome::AllJoin => Some(member_mean_reach(agreement.min_reach, f64::INFINITY)),
        EntryOutcome::ThresholdJoin { r_bar } => {
            Some(member_mean_reach(agreement.min_reach, r_bar))
        }
        EntryOutcome::NobodyJoins => None,
    };
    let evaluated_reach = args.reach.or(expected);
    let payoff = match (expected, evaluated_reach) {
        (Some(e), Some(r)) => Some(crate::cartel::cartel_member_payoff(
            r, &agreement, args.gamma, e,
        )?),
        _ => None,
    };
    let in_curve_domain = agreement.lambda <= 1.0;
    let report = CartelReport {
        config: &args,
        lambda: agreement.lambda,
        entry,
        expected_member_reach: expected,
        evaluated_reach,
        member_payoff_closed_units: payoff,
        member_payoff_expectation_units: payoff.map(|p| p / KAPPA),
        welfare: if in_curve_domain {
            Some(welfare_per_player(agreement.lambda, args.gamma)? / agreement.min_reach)
        } else {
            None
        },
        member_value: if in_curve_domain {
            Some(member_mean_payoff(agreement.lambda, args.gamma)? * agreement.min_reach)
        } else {
            None
        },
        membership_share: if in_curve_domain {
            Some(membership_share(agreement.lambda, args.gamma, agreement.min_reach)?)
        } else {
            None
        },
        entry_requirement_effects: if in_curve_domain {
            Some(entry_requirement_effects(&agreement, args.gamma)?)
        } else {
            None
        },
        optimal_lambda: optimal_lambda(args.gamma)?,
        gamma_inc: gamma_inc(),
        first_best_lambda: FIRST_BEST_LAMBDA,
        kappa: KAPPA,
    };
    io::write_output(&resolve_out(&args.out, out_dir), &io::to_json_pretty(&report)?)
}

// ---------------------------------------------------------------------------
// welfare-curve

#[derive(Debug, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct WelfareCurveArgs {
    /// Comma-separated gamma values, one curve each.
    #[arg(long, value_delimiter = ',', default_values_t = vec![0.5, 0.375, 0.1])]
    pub gammas: Vec<f64>,
    #[arg(long, default_value_t = 0.02)]
    pub lambda_min: f64,
    #[arg(long, default_value_t = 1.0)]
    pub lambda_max: f64,
    #[arg(long, default_value_t = 50)]
    pub points: usize,
    /// Attach Monte Carlo estimates to every grid point.
    #[arg(long, default_value_t = false)]
    pub mc: bool,
    /// Players per replication for the Monte Carlo overlay.
    #[arg(long, default_value_t = 50_000)]
    pub n: usize,
    #[arg(long, default_value_t = 6)]
    pub reps: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<String>,
}

impl Default for WelfareCurveArgs {
    fn default() -> Self {
        WelfareCurveArgs {
            gammas: vec![0.5, 0.375, 0.1],
            lambda_min: 0.02,
            lambda_max: 1.0,
            points: 50,
            mc: false,
            n: 50_000,
            reps: 6,
            seed: 1,
            out: None,
        }
    }
}

fn lambda_grid(args: &WelfareCurveArgs) -> Result<Vec<f64>> {
    if !(args.lambda_min > 0.0 && args.lambda_min <= args.lambda_max && args.lambda_max <= 1.0) {
        return Err(Error::config(format!(
            "lambda grid must satisfy 0 < min <= max <= 1, got [{}, {}]",
            args.lambda_min, args.lambda_max
        )));
    }
    if args.points == 0 {
        return Err(Error::config("grid needs at least one point".to_string()));
    }
    if args.points == 1 {
        return Ok(vec![args.lambda_min]);
    }
    let step = (args.lambda_max - args.lambda_min) / (args.points - 1) as f64;
    Ok((0..args.points)
        .map(|i| args.lambda_min + step * i as f64)
        .collect())
}

fn cmd_welfare_curve(args: WelfareCurveArgs, out_dir: &Option<PathBuf>) -> Result<()> {
    let grid = lambda_grid(&args)?;
    let mut out = String::from("# schema: welfare-curve v1\n");
    out.push_str(&format!("# config: {}\n", config_json(&args)?));
    for &gamma in &args.gammas {
        out.push_str(&format!(
            "# gamma {gamma}: lambda_star={}, lambda_fb={}, gamma_inc={}\n",
            optimal_lambda(gamma)?,
            FIRST_BEST_LAMBDA,
            gamma_inc()
        ));
    }
    if args.mc {
        out.push_str("gamma,lambda,w_analytic,w_mc,stderr,v_analytic,v_mc,membership_share\n");
        let rows = welfare_grid(&args.gammas, &grid, args.n, args.reps, args.seed)?;
        for r in rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                r.gamma,
                r.lambda,
                r.w_analytic,
                r.w_mc,
                r.stderr,
                r.v_analytic,
                r.v_mc,
                r.membership_share
            ));
        }
    } else {
        out.push_str("gamma,lambda,w_analytic,v_analytic,membership_share\n");
        for &gamma in &args.gammas {
            for &lambda in &grid {
                out.push_str(&format!(
                    "{},{},{},{},{}\n",
                    gamma,
                    lambda,
                    welfare_per_player(lambda, gamma)?,
                    member_mean_payoff(lambda, gamma)?,
                    membership_share(lambda, gamma, 1.0)?
                ));
            }
        }
    }
    io::write_output(&resolve_out(&args.out, out_dir), &out)
}

// ---------------------------------------------------------------------------
// advertising

#[derive(Debug, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct AdvertisingArgs {
    #[arg(long, default_value_t = 0.5)]
    pub gamma: f64,
    #[arg(long, default_value_t = 0.3)]
    pub epsilon: f64,
    /// Marginal value of one engagement unit.
    #[arg(long, default_value_t = 1.0)]
    pub v: f64,
    /// Cartel engagement requirement in degrees.
    #[arg(long, default_value_t = 180.0)]
    pub lambda_deg: f64,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<String>,
}

impl Default for AdvertisingArgs {
    fn default() -> Self {
        AdvertisingArgs {
            gamma: 0.5,
            epsilon: 0.3,
            v: 1.0,
            lambda_deg: 180.0,
            out: None,
        }
    }
}

#[derive(Serialize)]
struct AdvertisingReport<'a> {
    config: &'a AdvertisingArgs,
    prices: PriceQuote,
    tightening: TighteningGain,
    general_cartel_effects: GeneralCartelEffects,
}

fn cmd_advertising(args: AdvertisingArgs, out_dir: &Option<PathBuf>) -> Result<()> {
    let params = MarketParams::new(args.gamma, args.v, args.epsilon)?;
    let report = AdvertisingReport {
        config: &args,
        prices: price_engagement(&params, deg_to_rad(args.lambda_deg))?,
        tightening: tightening_gain_sign(args.gamma, args.epsilon)?,
        general_cartel_effects: welfare_effects_of_general_cartel(&params)?,
    };
    io::write_output(&resolve_out(&args.out, out_dir), &io::to_json_pretty(&report)?)
}

// ---------------------------------------------------------------------------
// min-v

#[derive(Debug, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct MinVArgs {
    #[arg(long, default_value_t = 0.5)]
    pub gamma: f64,
    #[arg(long, default_value_t = 0.3)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 180.0)]
    pub lambda_deg: f64,
    /// Participation threshold the advertising value must sustain.
    #[arg(long, default_value_t = 2.0)]
    pub target_reach: f64,
    #[arg(long, default_value_t = 1.0)]
    pub min_reach: f64,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<String>,
}

impl Default for MinVArgs {
    fn default() -> Self {
        MinVArgs {
            gamma: 0.5,
            epsilon: 0.3,
            lambda_deg: 180.0,
            target_reach: 2.0,
            min_reach: 1.0,
            out: None,
        }
    }
}

#[derive(Serialize)]
struct MinVReport<'a> {
    config: &'a MinVArgs,
    min_v: f64,
}

fn cmd_min_v(args: MinVArgs, out_dir: &Option<PathBuf>) -> Result<()> {
    let agreement = CartelAgreement::with_min_reach(deg_to_rad(args.lambda_deg), args.min_reach)?;
    let min_v =
        min_v_for_sustained_cartel(&agreement, args.gamma, args.epsilon, args.target_reach)?;
    let report = MinVReport {
        config: &args,
        min_v,
    };
    io::write_output(&resolve_out(&args.out, out_dir), &io::to_json_pretty(&report)?)
}

// ---------------------------------------------------------------------------
// simulate

#[derive(Debug, Clone, Copy)]
enum SimKind {
    Natural,
    Cartel,
    Market,
}

#[derive(Debug, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct SimulateArgs {
    #[arg(long, default_value_t = 0.5)]
    pub gamma: f64,
    #[arg(long, default_value_t = 0.0)]
    pub v: f64,
    #[arg(long, default_value_t = 0.0)]
    pub epsilon: f64,
    /// Cartel engagement requirement in degrees (enables the agreement).
    #[arg(long)]
    pub lambda_deg: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub min_reach: f64,
    /// Players per replication.
    #[arg(long, default_value_t = 100_000)]
    pub n: usize,
    #[arg(long, default_value_t = 8)]
    pub reps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<String>,
}

impl Default for SimulateArgs {
    fn default() -> Self {
        SimulateArgs {
            gamma: 0.5,
            v: 0.0,
            epsilon: 0.0,
            lambda_deg: None,
            min_reach: 1.0,
            n: 100_000,
            reps: 8,
            seed: 0,
            out: None,
        }
    }
}

#[derive(Serialize)]
struct SimulateReport<'a> {
    config: &'a SimConfig,
    report: SimReport,
}

fn cmd_simulate(kind: SimKind, args: SimulateArgs, out_dir: &Option<PathBuf>) -> Result<()> {
    let agreement = match args.lambda_deg {
        Some(deg) => Some(CartelAgreement::with_min_reach(deg_to_rad(deg), args.min_reach)?),
        None => None,
    };
    let config = SimConfig {
        n_players: args.n,
        gamma: args.gamma,
        v: args.v,
        epsilon: args.epsilon,
        agreement,
        seed: args.seed,
        replications: args.reps,
    };
    let report = match kind {
        SimKind::Natural => simulate_natural(&config)?,
        SimKind::Cartel => simulate_cartel_entry(&config)?,
        SimKind::Market => simulate_market(&config)?,
    };
    let wrapped = SimulateReport {
        config: &config,
        report,
    };
    io::write_output(&resolve_out(&args.out, out_dir), &io::to_json_pretty(&wrapped)?)
}

// ---------------------------------------------------------------------------
// pod

#[derive(Debug, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct PodObligationsArgs {
    /// Submission log CSV (`member_id,post_id,timestamp`).
    #[arg(long, default_value = "-")]
    pub log: String,
    /// Window size: how many recent posts by others each submission owes.
    #[arg(long, default_value_t = 5)]
    pub n: usize,
    #[arg(long, value_enum, default_value_t = ObligationMode::SkipOwn)]
    #[serde(rename = "mode")]
    pub mode: ObligationMode,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<String>,
}

impl Default for PodObligationsArgs {
    fn default() -> Self {
        PodObligationsArgs {
            log: "-".to_string(),
            n: 5,
            mode: ObligationMode::SkipOwn,
            out: None,
        }
    }
}

#[derive(Serialize)]
struct ObligationsReport<'a> {
    config: &'a PodObligationsArgs,
    /// Post id to the sorted set of obligated member ids.
    obligations: BTreeMap<String, Vec<String>>,
    total_obligations: usize,
}

fn cmd_pod_obligations(args: PodObligationsArgs, out_dir: &Option<PathBuf>) -> Result<()> {
    let log = io::read_submission_log(&args.log)?;
    let set = derive_obligations(&log, args.n, args.mode)?;
    let obligations: BTreeMap<String, Vec<String>> = set
        .by_post()
        .into_iter()
        .map(|(post, members)| (post, members.into_iter().collect()))
        .collect();
    let report = ObligationsReport {
        config: &args,
        total_obligations: obligations.values().map(|m| m.len()).sum(),
        obligations,
    };
    io::write_output(&resolve_out(&args.out, out_dir), &io::to_json_pretty(&report)?)
}

#[derive(Debug, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct PodValidateArgs {
    #[arg(long, default_value = "-")]
    pub log: String,
    /// Engagement events CSV (`member_id,post_id,timestamp,kind`).
    #[arg(long)]
    pub events: String,
    #[arg(long, default_value_t = 5)]
    pub n: usize,
    #[arg(long, value_enum, default_value_t = ObligationMode::SkipOwn)]
    pub mode: ObligationMode,
    /// Deadline window before each submission; omit for "any time after the
    /// target post appeared".
    #[arg(long)]
    pub window: Option<u64>,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<String>,
}

impl Default for PodValidateArgs {
    fn default() -> Self {
        PodValidateArgs {
            log: "-".to_string(),
            events: String::new(),
            n: 5,
            mode: ObligationMode::SkipOwn,
            window: None,
            out: None,
        }
    }
}

#[derive(Serialize)]
struct ValidateReport<'a> {
    config: &'a PodValidateArgs,
    violations: Vec<(String, String)>,
    purged_log: Vec<crate::pod::Submission>,
}

fn cmd_pod_validate(args: PodValidateArgs, out_dir: &Option<PathBuf>) -> Result<()> {
    if args.events.is_empty() {
        return Err(Error::config("--events is required".to_string()));
    }
    let log = io::read_submission_log(&args.log)?;
    let events = io::read_events(&args.events)?;
    let set = derive_obligations(&log, args.n, args.mode)?;
    let outcome = validate(&log, &set, &events, args.window)?;
    let report = ValidateReport {
        config: &args,
        violations: outcome.violations,
        purged_log: outcome.purged_log,
    };
    io::write_output(&resolve_out(&args.out, out_dir), &io::to_json_pretty(&report)?)
}

#[derive(Debug, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct PodCountsArgs {
    #[arg(long, default_value = "-")]
    pub log: String,
    #[arg(long, default_value_t = 5)]
    pub n: usize,
    #[arg(long, value_enum, default_value_t = ObligationMode::SkipOwn)]
    pub mode: ObligationMode,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<String>,
}

impl Default for PodCountsArgs {
    fn default() -> Self {
        PodCountsArgs {
            log: "-".to_string(),
            n: 5,
            mode: ObligationMode::SkipOwn,
            out: None,
        }
    }
}

fn cmd_pod_counts(args: PodCountsArgs, out_dir: &Option<PathBuf>) -> Result<()> {
    let log = io::read_submission_log(&args.log)?;
    let set = derive_obligations(&log, args.n, args.mode)?;
    let counts = direct_engagement_count(&set);
    let mut out = String::from("# schema: pod-counts v1\n");
    out.push_str(&format!("# config: {}\n", config_json(&args)?));
    out.push_str("post_id,obligated_engagers\n");
    for (post, count) in counts {
        out.push_str(&format!("{post},{count}\n"));
    }
    io::write_output(&resolve_out(&args.out, out_dir), &out)
}

// ---------------------------------------------------------------------------
// empirics

#[derive(Debug, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct SynthArgs {
    #[arg(long, default_value_t = 1000)]
    pub authors: usize,
    #[arg(long, default_value_t = 5)]
    pub per_class: usize,
    #[arg(long, default_value_t = 0.5)]
    pub gamma: f64,
    /// Topic-cartel engagement requirement in degrees.
    #[arg(long, default_value_t = 45.0)]
    pub lambda_topic_deg: f64,
    #[arg(long, default_value_t = 16)]
    pub dim: usize,
    #[arg(long, default_value_t = 0.05)]
    pub sigma: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write `<prefix>_panel.csv`, `<prefix>_embeddings.csv` and
    /// `<prefix>_truth.json` instead of streaming the panel to stdout.
    #[arg(long)]
    #[serde(skip)]
    pub out_prefix: Option<String>,
}

impl Default for SynthArgs {
    fn default() -> Self {
        SynthArgs {
            authors: 1000,
            per_class: 5,
            gamma: 0.5,
            lambda_topic_deg: 45.0,
            dim: 16,
            sigma: 0.05,
            seed: 0,
            out_prefix: None,
        }
    }
}

fn cmd_synth(args: SynthArgs, out_dir: &Option<PathBuf>) -> Result<()> {
    let config = SynthConfig {
        n_authors: args.authors,
        commenters_per_class: args.per_class,
        gamma: args.gamma,
        lambda_topic: deg_to_rad(args.lambda_topic_deg),
        embed_dim: args.dim,
        noise_sigma: args.sigma,
        seed: args.seed,
    };
    let data = synth_generate(&config)?;
    let cfg = config_json(&args)?;
    match &args.out_prefix {
        None => io::write_output("-", &io::panel_csv(&data.panel, Some(&cfg))),
        Some(prefix) => {
            let prefix = resolve_out(&Some(prefix.clone()), out_dir);
            io::write_output(
                &format!("{prefix}_panel.csv"),
                &io::panel_csv(&data.panel, Some(&cfg)),
            )?;
            io::write_output(
                &format!("{prefix}_embeddings.csv"),
                &io::embeddings_csv(&data.embeddings, Some(&cfg))?,
            )?;
            #[derive(Serialize)]
            struct TruthReport<'a> {
                config: &'a SynthArgs,
                ground_truth: &'a crate::empirics::synth::GroundTruth,
            }
            io::write_output(
                &format!("{prefix}_truth.json"),
                &io::to_json_pretty(&TruthReport {
                    config: &args,
                    ground_truth: &data.ground_truth,
                })?,
            )
        }
    }
}

#[derive(Debug, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct SimilarityArgs {
    /// Embeddings CSV (header `id,<dim>`).
    #[arg(long)]
    pub embeddings: String,
    /// Pairs CSV (header `id_a,id_b`).
    #[arg(long)]
    pub pairs: String,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<String>,
}

impl Default for SimilarityArgs {
    fn default() -> Self {
        SimilarityArgs {
            embeddings: String::new(),
            pairs: String::new(),
            out: None,
        }
    }
}

fn cmd_similarity(args: SimilarityArgs, out_dir: &Option<PathBuf>) -> Result<()> {
    if args.embeddings.is_empty() || args.pairs.is_empty() {
        return Err(Error::config(
            "--embeddings and --pairs are required".to_string(),
        ));
    }
    let vectors = io::read_embeddings(&args.embeddings)?;
    let by_id: std::collections::HashMap<&str, usize> = vectors
        .iter()
        .enumerate()
        .map(|(i, v)| (v.id.as_str(), i))
        .collect();
    let content = io::read_to_string(&args.pairs)?;
    let mut lines = content
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.trim_start().starts_with('#') && !l.trim().is_empty());
    let (hline, header) = lines
        .next()
        .ok_or_else(|| Error::Parse {
            path: args.pairs.clone(),
            line: 1,
            msg: "missing pairs header `id_a,id_b`".to_string(),
        })?;
    if header != "id_a,id_b" {
        return Err(Error::Parse {
            path: args.pairs.clone(),
            line: hline,
            msg: format!("expected header `id_a,id_b`, got `{header}`"),
        });
    }
    let mut out = String::from("# schema: similarity v1\n");
    out.push_str(&format!("# config: {}\n", config_json(&args)?));
    out.push_str("id_a,id_b,similarity\n");
    for (lineno, line) in lines {
        let (a, b) = line.split_once(',').ok_or_else(|| Error::Parse {
            path: args.pairs.clone(),
            line: lineno,
            msg: "expected `id_a,id_b`".to_string(),
        })?;
        let missing = |id: &str| Error::Parse {
            path: args.pairs.clone(),
            line: lineno,
            msg: format!("id `{id}` not found in {}", args.embeddings),
        };
        let va = &vectors[*by_id.get(a).ok_or_else(|| missing(a))?];
        let vb = &vectors[*by_id.get(b).ok_or_else(|| missing(b))?];
        out.push_str(&format!("{a},{b},{}\n", cosine_similarity(va, vb)?));
    }
    io::write_output(&resolve_out(&args.out, out_dir), &out)
}

#[derive(Debug, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct RegressArgs {
    /// Panel CSV; `-` reads stdin.
    #[arg(long, default_value = "-")]
    pub panel: String,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<String>,
}

impl Default for RegressArgs {
    fn default() -> Self {
        RegressArgs {
            panel: "-".to_string(),
            out: None,
        }
    }
}

#[derive(Serialize)]
struct RegressReport<'a> {
    config: &'a RegressArgs,
    result: RegressionResult,
}

fn cmd_regress(args: RegressArgs, out_dir: &Option<PathBuf>) -> Result<()> {
    let panel = io::read_panel(&args.panel)?;
    let result = fe_regression(&panel)?;
    let report = RegressReport {
        config: &args,
        result,
    };
    io::write_output(&resolve_out(&args.out, out_dir), &io::to_json_pretty(&report)?)
}

#[derive(Debug, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct LdaArgs {
    /// Corpus CSV (`user_id,token`), or raw posts (`user_id,text`) with
    /// `--raw`.
    #[arg(long, default_value = "-")]
    pub corpus: String,
    /// Treat the input as raw post text and extract hashtags first.
    #[arg(long, default_value_t = false)]
    pub raw: bool,
    #[arg(long, default_value_t = 6)]
    pub k: usize,
    /// Document-topic smoothing (default 50/k).
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long, default_value_t = 0.01)]
    pub beta: f64,
    #[arg(long, default_value_t = 2000)]
    pub iterations: usize,
    #[arg(long, default_value_t = 500)]
    pub burn_in: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 50)]
    pub min_users: usize,
    #[arg(long, default_value_t = 0.33)]
    pub max_share: f64,
    #[arg(long, default_value_t = 1000)]
    pub max_tokens: usize,
    #[arg(long, default_value_t = 15)]
    pub min_unique: usize,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<String>,
}

impl Default for LdaArgs {
    fn default() -> Self {
        LdaArgs {
            corpus: "-".to_string(),
            raw: false,
            k: 6,
            alpha: None,
            beta: 0.01,
            iterations: 2000,
            burn_in: 500,
            seed: 0,
            min_users: 50,
            max_share: 0.33,
            max_tokens: 1000,
            min_unique: 15,
            out: None,
        }
    }
}

fn read_corpus_docs(args: &LdaArgs) -> Result<Vec<CorpusDoc>> {
    if args.raw {
        let posts = io::read_raw_posts(&args.corpus)?;
        let mut order: Vec<String> = Vec::new();
        let mut docs: std::collections::HashMap<String, Vec<String>> =
            std::collections::HashMap::new();
        for (user, text) in posts {
            let entry = docs.entry(user.clone()).or_default();
            if entry.is_empty() {
                order.push(user);
            }
            entry.extend(extract_hashtags(&text));
        }
        Ok(order
            .into_iter()
            .map(|user| {
                let tokens = docs.remove(&user).unwrap_or_default();
                CorpusDoc {
                    user_id: user,
                    tokens,
                }
            })
            .collect())
    } else {
        io::read_corpus(&args.corpus)
    }
}

#[derive(Serialize)]
struct LdaReport<'a> {
    config: &'a LdaArgs,
    model: LdaModel,
}

fn cmd_lda(args: LdaArgs, out_dir: &Option<PathBuf>) -> Result<()> {
    let docs = read_corpus_docs(&args)?;
    let params = LdaParams {
        k: args.k,
        alpha: args.alpha,
        beta: args.beta,
        iterations: args.iterations,
        burn_in: args.burn_in,
        seed: args.seed,
        prune: PruneParams {
            min_users: args.min_users,
            max_user_share: args.max_share,
            max_tokens_per_user: args.max_tokens,
            min_unique_tokens: args.min_unique,
        },
    };
    let model = lda_fit(&docs, &params)?;
    let report = LdaReport {
        config: &args,
        model,
    };
    io::write_output(&resolve_out(&args.out, out_dir), &io::to_json_pretty(&report)?)
}

#[derive(Debug, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct CoherenceArgs {
    /// Model JSON produced by `empirics lda`.
    #[arg(long)]
    pub model: String,
    #[arg(long, default_value = "-")]
    pub corpus: String,
    #[arg(long, default_value_t = false)]
    pub raw: bool,
    #[arg(long, default_value_t = 10)]
    pub top_n: usize,
    #[arg(long, default_value_t = 5)]
    pub window: usize,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<String>,
}

impl Default for CoherenceArgs {
    fn default() -> Self {
        CoherenceArgs {
            model: String::new(),
            corpus: "-".to_string(),
            raw: false,
            top_n: 10,
            window: 5,
            out: None,
        }
    }
}

fn load_model(path: &str) -> Result<LdaModel> {
    let text = io::read_to_string(path)?;
    // Accept either a bare model or the `empirics lda` report wrapper.
    #[derive(Deserialize)]
    struct Wrapper {
        model: LdaModel,
    }
    serde_json::from_str::<Wrapper>(&text)
        .map(|w| w.model)
        .or_else(|_| serde_json::from_str::<LdaModel>(&text))
        .map_err(|e| Error::config(format!("{path}: cannot parse LDA model: {e}")))
}

#[derive(Serialize)]
struct CoherenceReport<'a> {
    config: &'a CoherenceArgs,
    per_topic: Vec<f64>,
    mean: f64,
}

fn cmd_coherence(args: CoherenceArgs, out_dir: &Option<PathBuf>) -> Result<()> {
    if args.model.is_empty() {
        return Err(Error::config("--model is required".to_string()));
    }
    let model = load_model(&args.model)?;
    let docs = read_corpus_docs(&LdaArgs {
        corpus: args.corpus.clone(),
        raw: args.raw,
        ..LdaArgs::default()
    })?;
    let per_topic = npmi_coherence(&model, &docs, args.top_n, args.window)?;
    let mean = per_topic.iter().sum::<f64>() / per_topic.len() as f64;
    let report = CoherenceReport {
        config: &args,
        per_topic,
        mean,
    };
    io::write_output(&resolve_out(&args.out, out_dir), &io::to_json_pretty(&report)?)
}

#[derive(Debug, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct TopicMatchArgs {
    #[arg(long)]
    pub model: String,
    #[arg(long, default_value = "-")]
    pub panel: String,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<String>,
}

impl Default for TopicMatchArgs {
    fn default() -> Self {
        TopicMatchArgs {
            model: String::new(),
            panel: "-".to_string(),
            out: None,
        }
    }
}

fn cmd_topic_match(args: TopicMatchArgs, out_dir: &Option<PathBuf>) -> Result<()> {
    if args.model.is_empty() {
        return Err(Error::config("--model is required".to_string()));
    }
    let model = load_model(&args.model)?;
    let panel = io::read_panel(&args.panel)?;
    let rows = topic_match_table(&model, &panel)?;
    let mut out = String::from("# schema: topic-match v1\n");
    out.push_str(&format!("# config: {}\n", config_json(&args)?));
    out.push_str("author_topic,class,n,mean_share,ci_low,ci_high\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.author_topic, r.class, r.n, r.mean_share, r.ci_low, r.ci_high
        ));
    }
    io::write_output(&resolve_out(&args.out, out_dir), &out)
}

#[derive(Debug, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct ValueArgs {
    /// Panel CSV to take class similarity means from.
    #[arg(long, default_value = "-")]
    pub panel: String,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<String>,
}

impl Default for ValueArgs {
    fn default() -> Self {
        ValueArgs {
            panel: "-".to_string(),
            out: None,
        }
    }
}

#[derive(Serialize)]
struct ValueReport<'a> {
    config: &'a ValueArgs,
    class_means: BTreeMap<String, f64>,
    /// Normalized engagement value per cartel class:
    /// `(mean_class - mean_random) / (mean_natural - mean_random)`.
    normalized_value: BTreeMap<String, f64>,
}

fn cmd_value(args: ValueArgs, out_dir: &Option<PathBuf>) -> Result<()> {
    let panel = io::read_panel(&args.panel)?;
    let mut sums: BTreeMap<CommenterClass, (f64, usize)> = BTreeMap::new();
    for obs in &panel {
        let e = sums.entry(obs.class).or_insert((0.0, 0));
        e.0 += obs.similarity;
        e.1 += 1;
    }
    let mean = |class: CommenterClass| -> Option<f64> {
        sums.get(&class).map(|(s, n)| s / *n as f64)
    };
    let natural = mean(CommenterClass::Natural)
        .ok_or_else(|| Error::domain("panel has no natural observations".to_string()))?;
    let random = mean(CommenterClass::RandomUser)
        .ok_or_else(|| Error::domain("panel has no random-user observations".to_string()))?;
    let mut class_means = BTreeMap::new();
    let mut normalized = BTreeMap::new();
    for (class, (s, n)) in &sums {
        let m = s / *n as f64;
        class_means.insert(class.to_string(), m);
        if matches!(
            class,
            CommenterClass::GeneralCartel | CommenterClass::TopicCartel
        ) {
            normalized.insert(class.to_string(), normalized_value(m, natural, random)?);
        }
    }
    let report = ValueReport {
        config: &args,
        class_means,
        normalized_value: normalized,
    };
    io::write_output(&resolve_out(&args.out, out_dir), &io::to_json_pretty(&report)?)
}
