//! Panel fixed-effects regression of author-commenter similarity on
//! commenter class, with author-clustered standard errors.
//!
//! The estimator is the within transformation: similarity and the class
//! indicators are demeaned inside each author group and OLS runs on the
//! demeaned data, which absorbs one fixed effect per author (Wooldridge,
//! ch. 10). The covariance is the Liang-Zeger cluster sandwich with the CR1
//! small-sample factor `G/(G-1) * (n-1)/(n-k)`, where `k` counts the slope
//! coefficients plus the absorbed author effects.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Who the commenter is relative to the author. `Natural` (a non-cartel
/// user who actually commented) is the regression base category.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CommenterClass {
    Natural,
    GeneralCartel,
    TopicCartel,
    RandomUser,
}

impl CommenterClass {
    pub const ALL: [CommenterClass; 4] = [
        CommenterClass::Natural,
        CommenterClass::GeneralCartel,
        CommenterClass::TopicCartel,
        CommenterClass::RandomUser,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            CommenterClass::Natural => "natural",
            CommenterClass::GeneralCartel => "general_cartel",
            CommenterClass::TopicCartel => "topic_cartel",
            CommenterClass::RandomUser => "random_user",
        }
    }
}

impl fmt::Display for CommenterClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl FromStr for CommenterClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "natural" => Ok(CommenterClass::Natural),
            "general_cartel" => Ok(CommenterClass::GeneralCartel),
            "topic_cartel" => Ok(CommenterClass::TopicCartel),
            "random_user" => Ok(CommenterClass::RandomUser),
            other => Err(Error::domain(format!(
                "unknown commenter class `{other}` (expected natural, general_cartel, \
                 topic_cartel or random_user)"
            ))),
        }
    }
}

/// One author-commenter similarity observation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PanelObservation {
    pub author_id: String,
    pub commenter_id: String,
    pub class: CommenterClass,
    pub similarity: f64,
}

/// Estimate and inference for one commenter-class coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coefficient {
    pub estimate: f64,
    pub clustered_se: f64,
}

/// Output of [`fe_regression`]. Coefficients are relative to the `Natural`
/// base category; a class absent from the panel has no coefficient.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionResult {
    pub general_cartel: Option<Coefficient>,
    pub topic_cartel: Option<Coefficient>,
    pub random_user: Option<Coefficient>,
    /// Mean similarity over the `Natural` base observations.
    pub base_mean: f64,
    pub n_obs: usize,
    pub n_authors: usize,
    /// Documentation of the small-sample correction applied to the sandwich.
    pub small_sample: String,
}

impl RegressionResult {
    pub fn coefficient(&self, class: CommenterClass) -> Option<Coefficient> {
        match class {
            CommenterClass::Natural => None,
            CommenterClass::GeneralCartel => self.general_cartel,
            CommenterClass::TopicCartel => self.topic_cartel,
            CommenterClass::RandomUser => self.random_user,
        }
    }
}

/// Fit the within estimator with author-clustered standard errors.
///
/// Requires at least two authors, at least two observations per author, and
/// a `Natural` base observation for every author (the balanced-panel shape
/// the similarity data is built with).
pub fn fe_regression(panel: &[PanelObservation]) -> Result<RegressionResult> {
    for obs in panel {
        if !(-1.0..=1.0).contains(&obs.similarity) {
            return Err(Error::domain(format!(
                "similarity {} for author `{}` lies outside [-1, 1]",
                obs.similarity, obs.author_id
            )));
        }
    }
    // Group observation indices by author, keeping first-appearance order.
    let mut author_order: Vec<&str> = Vec::new();
    let mut groups: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, obs) in panel.iter().enumerate() {
        let entry = groups.entry(obs.author_id.as_str()).or_default();
        if entry.is_empty() {
            author_order.push(obs.author_id.as_str());
        }
        entry.push(i);
    }
    let n_authors = author_order.len();
    if n_authors < 2 {
        return Err(Error::domain(format!(
            "need at least 2 authors, got {n_authors}"
        )));
    }
    for author in &author_order {
        let idx = &groups[author];
        if idx.len() < 2 {
            return Err(Error::domain(format!(
                "author `{author}` has {} observation(s); need at least 2",
                idx.len()
            )));
        }
        if !idx
            .iter()
            .any(|&i| panel[i].class == CommenterClass::Natural)
        {
            return Err(Error::domain(format!(
                "author `{author}` has no natural base observation"
            )));
        }
    }

    // Regressors: indicators for the non-base classes present in the panel.
    let columns: Vec<CommenterClass> = [
        CommenterClass::GeneralCartel,
        CommenterClass::TopicCartel,
        CommenterClass::RandomUser,
    ]
    .into_iter()
    .filter(|c| panel.iter().any(|o| o.class == *c))
    .collect();
    if columns.is_empty() {
        return Err(Error::domain(
            "panel contains only the natural base category; nothing to estimate".to_string(),
        ));
    }
    let p = columns.len();
    let n = panel.len();

    // Within transformation.
    let mut y_t = vec![0.0f64; n];
    let mut x_t = vec![0.0f64; n * p];
    for author in &author_order {
        let idx = &groups[author];
        let m = idx.len() as f64;
        let y_mean = idx.iter().map(|&i| panel[i].similarity).sum::<f64>() / m;
        for (j, class) in columns.iter().enumerate() {
            let x_mean = idx
                .iter()
                .filter(|&&i| panel[i].class == *class)
                .count() as f64
                / m;
            for &i in idx {
                let raw = if panel[i].class == *class { 1.0 } else { 0.0 };
                x_t[i * p + j] = raw - x_mean;
            }
        }
        for &i in idx {
            y_t[i] = panel[i].similarity - y_mean;
        }
    }

    // A column with no within-author variation anywhere is collinear with
    // the fixed effects.
    for (j, class) in columns.iter().enumerate() {
        let sumsq: f64 = (0..n).map(|i| x_t[i * p + j].powi(2)).sum();
        if sumsq < 1e-12 {
            return Err(Error::RankDeficient(class.as_str().to_string()));
        }
    }

    let xtx = {
        let mut m = DMatrix::<f64>::zeros(p, p);
        for i in 0..n {
            for a in 0..p {
                for b in 0..p {
                    m[(a, b)] += x_t[i * p + a] * x_t[i * p + b];
                }
            }
        }
        m
    };
    let xty = {
        let mut v = DVector::<f64>::zeros(p);
        for i in 0..n {
            for a in 0..p {
                v[a] += x_t[i * p + a] * y_t[i];
            }
        }
        v
    };
    let chol = match nalgebra::Cholesky::new(xtx.clone()) {
        Some(c) => c,
        None => {
            // Name the first column whose removal restores full rank.
            for (j, class) in columns.iter().enumerate() {
                let reduced: Vec<usize> = (0..p).filter(|&a| a != j).collect();
                let mut m = DMatrix::<f64>::zeros(p - 1, p - 1);
                for i in 0..n {
                    for (ra, &a) in reduced.iter().enumerate() {
                        for (rb, &b) in reduced.iter().enumerate() {
                            m[(ra, rb)] += x_t[i * p + a] * x_t[i * p + b];
                        }
                    }
                }
                if nalgebra::Cholesky::new(m).is_some() {
                    return Err(Error::RankDeficient(class.as_str().to_string()));
                }
            }
            return Err(Error::RankDeficient(columns[0].as_str().to_string()));
        }
    };
    let beta = chol.solve(&xty);
    let xtx_inv = chol.inverse();

    // Residuals and the clustered meat.
    let mut meat = DMatrix::<f64>::zeros(p, p);
    for author in &author_order {
        let idx = &groups[author];
        let mut score = DVector::<f64>::zeros(p);
        for &i in idx {
            let mut fitted = 0.0;
            for a in 0..p {
                fitted += x_t[i * p + a] * beta[a];
            }
            let resid = y_t[i] - fitted;
            for a in 0..p {
                score[a] += x_t[i * p + a] * resid;
            }
        }
        meat += &score * score.transpose();
    }
    let g = n_authors as f64;
    let k = (p + n_authors) as f64;
    if n as f64 <= k {
        return Err(Error::domain(format!(
            "too few observations ({n}) for the CR1 correction with k = {k} parameters"
        )));
    }
    let cr1 = g / (g - 1.0) * (n as f64 - 1.0) / (n as f64 - k);
    let cov = &xtx_inv * meat * &xtx_inv * cr1;

    let base: Vec<f64> = panel
        .iter()
        .filter(|o| o.class == CommenterClass::Natural)
        .map(|o| o.similarity)
        .collect();
    let base_mean = base.iter().sum::<f64>() / base.len() as f64;

    let coef = |class: CommenterClass| -> Option<Coefficient> {
        columns.iter().position(|c| *c == class).map(|j| Coefficient {
            estimate: beta[j],
            clustered_se: cov[(j, j)].max(0.0).sqrt(),
        })
    };
    Ok(RegressionResult {
        general_cartel: coef(CommenterClass::GeneralCartel),
        topic_cartel: coef(CommenterClass::TopicCartel),
        random_user: coef(CommenterClass::RandomUser),
        base_mean,
        n_obs: n,
        n_authors,
        small_sample: format!(
            "CR1: G/(G-1) * (n-1)/(n-k) with G = {n_authors} clusters, n = {n}, \
             k = {} (slopes + absorbed author effects)",
            p + n_authors
        ),
    })
}

/// Value of a commenter class relative to natural engagement, normalized by
/// the random-match baseline: `(s_class - s_random) / (s_natural - s_random)`.
pub fn normalized_value(sim_class: f64, sim_natural: f64, sim_random: f64) -> Result<f64> {
    if !(sim_natural > sim_random) {
        return Err(Error::domain(format!(
            "normalization needs natural similarity ({sim_natural}) above random-match \
             similarity ({sim_random})"
        )));
    }
    Ok((sim_class - sim_random) / (sim_natural - sim_random))
}
