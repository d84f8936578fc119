//! Gamma versus Normal and Pareto versus Normal selection accuracy.
//!
//! Each replication draws `n` points from one of the two families and scores
//! both candidates by prequential Hyvarinen score (argmin) and by log
//! marginal likelihood (argmax). The Normal candidate's known variance is
//! the variance of the non-Normal generator, and Normal data are drawn with
//! that generator's mean and variance, so both truths share their first two
//! moments.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::harness::config::{ExperimentConfig, Scenario};
use crate::harness::seed::task_rng;
use crate::linear::{argmax, argmin};
use crate::sampling::Distribution;
use crate::univariate::{
    applicability_check, hyvarinen_or_disqualified, log_marginal_or_disqualified, ConjugateFamily,
    GammaKnownShape, NormalKnownVar, ParetoKnownScale,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionCriterion {
    Hyvarinen,
    BayesFactor,
}

impl SelectionCriterion {
    pub fn tag(&self) -> &'static str {
        match self {
            SelectionCriterion::Hyvarinen => "hyvarinen",
            SelectionCriterion::BayesFactor => "bayes_factor",
        }
    }
}

/// The two candidates (index 0: the non-Normal family, index 1: Normal) and
/// the two generators, in the same order.
#[derive(Debug, Clone, PartialEq)]
pub struct UnivariateSetup {
    pub candidates: [ConjugateFamily; 2],
    pub generators: [Distribution; 2],
    pub labels: [&'static str; 2],
}

pub fn setup(config: &ExperimentConfig) -> Result<UnivariateSetup> {
    let u = &config.univariate;
    let (family, generator, label) = match config.scenario {
        Scenario::GammaVsNormal => (
            ConjugateFamily::GammaKnownShape(GammaKnownShape::new(
                u.gamma_shape,
                u.prior_a,
                u.prior_b,
            )?),
            Distribution::Gamma {
                shape: u.gamma_shape,
                rate: u.gamma_rate,
            },
            "gamma",
        ),
        Scenario::ParetoVsNormal => (
            ConjugateFamily::ParetoKnownScale(ParetoKnownScale::new(
                u.pareto_x_min,
                u.prior_a,
                u.prior_b,
            )?),
            Distribution::Pareto {
                x_min: u.pareto_x_min,
                shape: u.pareto_shape,
            },
            "pareto",
        ),
        other => {
            return Err(Error::InvalidParameters(format!(
                "{other} is not a univariate scenario"
            )))
        }
    };
    generator.validate()?;
    let var = generator.variance();
    if !var.is_finite() {
        return Err(Error::InvalidParameters(format!(
            "{label} generator has infinite variance; the Normal candidate needs a finite one"
        )));
    }
    let normal =
        ConjugateFamily::NormalKnownVar(NormalKnownVar::new(var, u.normal_prior_mean, var)?);
    let normal_gen = Distribution::Normal {
        mean: generator.mean(),
        var,
    };
    for c in [&family, &normal] {
        applicability_check(c)?;
    }
    Ok(UnivariateSetup {
        candidates: [family, normal],
        generators: [generator, normal_gen],
        labels: [label, "normal"],
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct UnivariateRow {
    pub scenario: Scenario,
    pub rep: usize,
    pub criterion: SelectionCriterion,
    pub selected: &'static str,
    pub true_model: &'static str,
    pub correct: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Accuracy {
    pub criterion: SelectionCriterion,
    pub true_model: &'static str,
    pub accuracy: f64,
    pub reps: usize,
}

/// Candidate scores for one replication: `(hyvarinen, log_marginal)`.
pub fn replication_scores(
    config: &ExperimentConfig,
    s: &UnivariateSetup,
    truth: usize,
    rep: usize,
) -> Result<([f64; 2], [f64; 2])> {
    let mut rng = task_rng(
        config.master_seed,
        config.scenario.tag(),
        rep as u64,
        truth as u64,
    );
    let data = s.generators[truth].sample_with(&mut rng, config.n)?;
    let mut h = [0.0; 2];
    let mut lm = [0.0; 2];
    for (k, c) in s.candidates.iter().enumerate() {
        h[k] = hyvarinen_or_disqualified(c, &data)?;
        lm[k] = log_marginal_or_disqualified(c, &data)?;
    }
    Ok((h, lm))
}

/// Rows ordered by (truth, rep, criterion); truth 0 is the non-Normal family.
pub fn run_univariate_study(config: &ExperimentConfig) -> Result<Vec<UnivariateRow>> {
    if !config.scenario.is_univariate() {
        return Err(Error::InvalidParameters(format!(
            "run_univariate_study called with scenario {}",
            config.scenario
        )));
    }
    config.validate()?;
    let s = setup(config)?;
    let tasks: Vec<(usize, usize)> = (0..2)
        .flat_map(|t| (0..config.reps).map(move |r| (t, r)))
        .collect();
    let scored: Vec<([f64; 2], [f64; 2])> = tasks
        .par_iter()
        .map(|&(t, r)| replication_scores(config, &s, t, r))
        .collect::<Result<_>>()?;

    let mut rows = Vec::with_capacity(tasks.len() * 2);
    for (&(truth, rep), (h, lm)) in tasks.iter().zip(&scored) {
        let picks = [
            (SelectionCriterion::Hyvarinen, argmin(h)),
            (SelectionCriterion::BayesFactor, argmax(lm)),
        ];
        for (criterion, pick) in picks {
            let pick = pick.ok_or(Error::EmptyCandidates)?;
            rows.push(UnivariateRow {
                scenario: config.scenario,
                rep,
                criterion,
                selected: s.labels[pick],
                true_model: s.labels[truth],
                correct: pick == truth,
            });
        }
    }
    Ok(rows)
}

/// Accuracy per (criterion, truth), in first-appearance order.
pub fn accuracy_table(rows: &[UnivariateRow]) -> Vec<Accuracy> {
    let mut out: Vec<(SelectionCriterion, &'static str, usize, usize)> = Vec::new();
    for r in rows {
        match out
            .iter_mut()
            .find(|e| e.0 == r.criterion && e.1 == r.true_model)
        {
            Some(e) => {
                e.2 += r.correct as usize;
                e.3 += 1;
            }
            None => out.push((r.criterion, r.true_model, r.correct as usize, 1)),
        }
    }
    out.into_iter()
        .map(|(criterion, true_model, hits, reps)| Accuracy {
            criterion,
            true_model,
            accuracy: hits as f64 / reps as f64,
            reps,
        })
        .collect()
}

pub fn accuracy(
    rows: &[UnivariateRow],
    criterion: SelectionCriterion,
    true_model: &str,
) -> Option<f64> {
    accuracy_table(rows)
        .into_iter()
        .find(|a| a.criterion == criterion && a.true_model == true_model)
        .map(|a| a.accuracy)
}
