//! `score`: rank user-supplied candidates on a data file.
//!
//! Model file, linear case:
//!
//! ```json
//! {"kind": "linear", "sigma2": 1.0, "score": "multivariate",
//!  "candidates": [
//!    {"name": "full", "columns": [0, 1], "prior": "improper"},
//!    {"name": "small", "columns": [0], "prior": {"isotropic": {"c": 100.0}}},
//!    {"name": "custom", "columns": [1], "prior": {"gaussian": {"mean": [0.0], "cov": [[4.0]]}}}
//!  ]}
//! ```
//!
//! Each data line is `y,x_0,x_1,...`; `columns` index the `x` fields.
//! `score` is `multivariate` (default) or `prequential`.
//!
//! Univariate case, one observation per data line:
//!
//! ```json
//! {"kind": "univariate", "candidates": [
//!    {"name": "g", "family": {"gamma_known_shape": {"alpha": 2.0, "a": 1.0, "b": 1.0}}},
//!    {"name": "n", "family": {"normal_known_var": {"sigma2": 2.0, "prior_mean": 0.0, "prior_var": 2.0}}}
//! ]}
//! ```
//!
//! A `family` may also name a plain distribution (`laplace`, `poisson`, ...);
//! such candidates are rejected by the applicability check.
//! Blank lines and lines starting with `#` are skipped in data files.

use std::path::PathBuf;

use clap::{Args, ValueEnum};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{read_file, CliError, CliResult, EXIT_OK};
use crate::error::Error;
use crate::linear::{
    argmax, argmin, log_marginal_likelihood, multivariate_score, prequential_scores_common,
    LinearModelSpec, Prior,
};
use crate::sampling::Distribution;
use crate::univariate::{
    applicability_check, hyvarinen_or_disqualified, log_marginal_or_disqualified, ConjugateFamily,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ScoreCriterion {
    /// Smallest Hyvarinen score wins.
    Hyvarinen,
    /// Largest log marginal likelihood wins.
    Bf,
}

#[derive(Debug, Clone, Args)]
pub struct ScoreArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, value_enum)]
    pub criterion: ScoreCriterion,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelFile {
    Linear {
        sigma2: f64,
        #[serde(default)]
        score: LinearScore,
        candidates: Vec<LinearCandidate>,
    },
    Univariate {
        candidates: Vec<UnivariateCandidate>,
    },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinearScore {
    #[default]
    Multivariate,
    Prequential,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinearCandidate {
    pub name: Option<String>,
    pub columns: Vec<usize>,
    pub prior: PriorDesc,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PriorDesc {
    Improper,
    Isotropic { c: f64 },
    Gaussian { mean: Vec<f64>, cov: Vec<Vec<f64>> },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UnivariateCandidate {
    pub name: Option<String>,
    pub family: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CandidateScore {
    pub name: String,
    /// `null` when the candidate is disqualified (non-finite score).
    pub score: Option<f64>,
    pub disqualified: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoreOutput {
    pub kind: &'static str,
    pub criterion: ScoreCriterion,
    pub direction: &'static str,
    pub candidates: Vec<CandidateScore>,
    /// `differences[i][j] = score_i - score_j`; `null` where undefined.
    pub differences: Vec<Vec<Option<f64>>>,
    pub selected: usize,
    pub selected_name: String,
    /// Whether another candidate shares the winning score exactly.
    pub tie: bool,
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

fn names<T>(items: &[T], name: impl Fn(&T) -> Option<&String>) -> Vec<String> {
    items
        .iter()
        .enumerate()
        .map(|(i, c)| name(c).cloned().unwrap_or_else(|| format!("candidate {i}")))
        .collect()
}

/// Data rows of a file; `Err` carries a message with the 1-based line number.
pub fn parse_rows(text: &str) -> CliResult<Vec<(usize, Vec<f64>)>> {
    let mut rows = Vec::new();
    let mut width = None;
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let lineno = i + 1;
        let fields = line
            .split(',')
            .map(|f| {
                f.trim()
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| {
                        CliError::usage(format!(
                            "data line {lineno}: '{}' is not a finite number",
                            f.trim()
                        ))
                    })
            })
            .collect::<CliResult<Vec<f64>>>()?;
        match width {
            None => width = Some(fields.len()),
            Some(w) if w != fields.len() => {
                return Err(CliError::usage(format!(
                    "data line {lineno}: expected {w} fields, found {}",
                    fields.len()
                )))
            }
            _ => {}
        }
        rows.push((lineno, fields));
    }
    if rows.is_empty() {
        return Err(CliError::usage("data file has no observations"));
    }
    Ok(rows)
}

/// Parses a model file, pointing at the offending line on failure.
pub fn parse_model(text: &str) -> CliResult<ModelFile> {
    serde_json::from_str(text).map_err(|e| {
        CliError::usage(format!(
            "model file line {} column {}: {e}",
            e.line(),
            e.column()
        ))
    })
}

fn build_prior(desc: &PriorDesc, p: usize, sigma2: f64, name: &str) -> CliResult<Prior> {
    Ok(match desc {
        PriorDesc::Improper => Prior::ImproperFlat,
        PriorDesc::Isotropic { c } => {
            if !(*c > 0.0 && c.is_finite()) {
                return Err(CliError::usage(format!(
                    "{name}: isotropic c must be positive"
                )));
            }
            Prior::isotropic(p, *c, sigma2)
        }
        PriorDesc::Gaussian { mean, cov } => {
            if mean.len() != p || cov.len() != p || cov.iter().any(|r| r.len() != p) {
                return Err(CliError::usage(format!(
                    "{name}: prior mean/cov must have dimension {p} (number of columns)"
                )));
            }
            Prior::ProperGaussian {
                mean: DVector::from_vec(mean.clone()),
                cov: DMatrix::from_fn(p, p, |i, j| cov[i][j]),
            }
        }
    })
}

fn report(
    kind: &'static str,
    criterion: ScoreCriterion,
    labels: Vec<String>,
    scores: Vec<f64>,
) -> CliResult<ScoreOutput> {
    let (pick, direction) = match criterion {
        ScoreCriterion::Hyvarinen => (argmin(&scores), "min"),
        ScoreCriterion::Bf => (argmax(&scores), "max"),
    };
    let selected = pick.ok_or_else(|| CliError::usage("model file lists no candidates"))?;
    let tie = scores
        .iter()
        .enumerate()
        .any(|(i, &s)| i != selected && s == scores[selected]);
    let differences = scores
        .iter()
        .map(|a| scores.iter().map(|b| finite(a - b)).collect())
        .collect();
    Ok(ScoreOutput {
        kind,
        criterion,
        direction,
        candidates: labels
            .iter()
            .zip(&scores)
            .map(|(name, &s)| CandidateScore {
                name: name.clone(),
                score: finite(s),
                disqualified: !s.is_finite(),
            })
            .collect(),
        differences,
        selected,
        selected_name: labels[selected].clone(),
        tie,
    })
}

fn in_candidate(name: &str, e: Error) -> CliError {
    CliError::runtime(format!("candidate '{name}': {e}"))
}

pub fn score_linear(
    sigma2: f64,
    method: LinearScore,
    candidates: &[LinearCandidate],
    rows: &[(usize, Vec<f64>)],
    criterion: ScoreCriterion,
) -> CliResult<ScoreOutput> {
    if candidates.is_empty() {
        return Err(CliError::usage("model file lists no candidates"));
    }
    if !(sigma2 > 0.0 && sigma2.is_finite()) {
        return Err(CliError::usage("sigma2 must be positive"));
    }
    let labels = names(candidates, |c| c.name.as_ref());
    let width = rows[0].1.len();
    if width < 1 {
        return Err(CliError::usage(format!(
            "data line {}: missing response",
            rows[0].0
        )));
    }
    let n = rows.len();
    let y = DVector::from_iterator(n, rows.iter().map(|r| r.1[0]));
    let mut specs = Vec::with_capacity(candidates.len());
    for (cand, name) in candidates.iter().zip(&labels) {
        if let Some(&bad) = cand.columns.iter().find(|&&c| c + 1 >= width) {
            return Err(CliError::usage(format!(
                "{name}: column {bad} does not exist; data lines have {} covariates",
                width - 1
            )));
        }
        let p = cand.columns.len();
        let x = DMatrix::from_fn(n, p, |i, j| rows[i].1[cand.columns[j] + 1]);
        let prior = build_prior(&cand.prior, p, sigma2, name)?;
        if criterion == ScoreCriterion::Bf && !prior.is_proper() {
            return Err(in_candidate(name, Error::ImproperPriorHasNoMarginalMass));
        }
        specs.push(LinearModelSpec::new(x, sigma2, prior).map_err(|e| in_candidate(name, e))?);
    }
    let scores = match (criterion, method) {
        (ScoreCriterion::Bf, _) => specs
            .iter()
            .zip(&labels)
            .map(|(s, name)| log_marginal_likelihood(s, &y).map_err(|e| in_candidate(name, e)))
            .collect::<CliResult<Vec<f64>>>()?,
        (ScoreCriterion::Hyvarinen, LinearScore::Multivariate) => specs
            .iter()
            .zip(&labels)
            .map(|(s, name)| multivariate_score(s, &y).map_err(|e| in_candidate(name, e)))
            .collect::<CliResult<Vec<f64>>>()?,
        (ScoreCriterion::Hyvarinen, LinearScore::Prequential) => {
            prequential_scores_common(&specs, &y)?
        }
    };
    report("linear", criterion, labels, scores)
}

/// Reads a candidate's `family`: a conjugate family, or a plain distribution
/// that is then put through the applicability check.
pub fn parse_family(value: &Value, name: &str) -> CliResult<ConjugateFamily> {
    match serde_json::from_value::<ConjugateFamily>(value.clone()) {
        Ok(f) => Ok(f),
        Err(family_err) => match serde_json::from_value::<Distribution>(value.clone()) {
            Ok(d) => {
                applicability_check(&d).map_err(|e| in_candidate(name, e))?;
                Err(CliError::runtime(format!(
                    "candidate '{name}': {d:?} has no conjugate prior here; use normal_known_var, \
                     gamma_known_shape or pareto_known_scale"
                )))
            }
            Err(_) => Err(CliError::usage(format!("candidate '{name}': {family_err}"))),
        },
    }
}

pub fn score_univariate(
    candidates: &[UnivariateCandidate],
    rows: &[(usize, Vec<f64>)],
    criterion: ScoreCriterion,
) -> CliResult<ScoreOutput> {
    if candidates.is_empty() {
        return Err(CliError::usage("model file lists no candidates"));
    }
    if let Some((lineno, r)) = rows.iter().find(|r| r.1.len() != 1) {
        return Err(CliError::usage(format!(
            "data line {lineno}: expected one value, found {}",
            r.len()
        )));
    }
    let data: Vec<f64> = rows.iter().map(|r| r.1[0]).collect();
    let labels = names(candidates, |c| c.name.as_ref());
    let mut scores = Vec::with_capacity(candidates.len());
    for (cand, name) in candidates.iter().zip(&labels) {
        let family = parse_family(&cand.family, name)?;
        let s = match criterion {
            ScoreCriterion::Hyvarinen => hyvarinen_or_disqualified(&family, &data),
            ScoreCriterion::Bf => log_marginal_or_disqualified(&family, &data),
        }
        .map_err(|e| in_candidate(name, e))?;
        scores.push(s);
    }
    report("univariate", criterion, labels, scores)
}

pub fn score_files(
    model_text: &str,
    data_text: &str,
    criterion: ScoreCriterion,
) -> CliResult<ScoreOutput> {
    let model = parse_model(model_text)?;
    let rows = parse_rows(data_text)?;
    match model {
        ModelFile::Linear {
            sigma2,
            score,
            candidates,
        } => score_linear(sigma2, score, &candidates, &rows, criterion),
        ModelFile::Univariate { candidates } => score_univariate(&candidates, &rows, criterion),
    }
}

pub fn cmd_score(args: &ScoreArgs) -> CliResult<i32> {
    let model = read_file(&args.model)?;
    let data = read_file(&args.data)?;
    let out = score_files(&model, &data, args.criterion)?;
    let json = serde_json::to_string_pretty(&out)
        .map_err(|e| CliError::runtime(format!("cannot serialise report: {e}")))?;
    println!("{json}");
    Ok(EXIT_OK)
}
