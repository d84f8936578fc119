//! Nested-model boxplot study: seven candidates, four truths.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::harness::config::{ExperimentConfig, Scenario};
use crate::harness::design::{candidate_spec, draw_linear_dataset};
use crate::harness::seed::task_rng;
use crate::linear::{argmin, multivariate_score};

pub const SLOTS: usize = 6;

/// Candidate supports. `M1..M6` include the first k coefficients, `M7` none.
pub const SUPPORTS: [[bool; SLOTS]; 7] = [
    [true, false, false, false, false, false],
    [true, true, false, false, false, false],
    [true, true, true, false, false, false],
    [true, true, true, true, false, false],
    [true, true, true, true, true, false],
    [true, true, true, true, true, true],
    [false, false, false, false, false, false],
];

/// Indices into [`SUPPORTS`] of the generating models: M1, M3, M5, M7.
pub const TRUTHS: [usize; 4] = [0, 2, 4, 6];

/// Generating coefficients of candidate `k`: one on its support, zero elsewhere.
pub fn theta_of(model: usize) -> [f64; SLOTS] {
    SUPPORTS[model].map(|on| if on { 1.0 } else { 0.0 })
}

pub fn model_label(model: usize) -> String {
    format!("M{}", model + 1)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fig1Row {
    pub true_model: usize,
    pub rep: usize,
    pub candidate: usize,
    pub score: f64,
    pub selected: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Fig1Table {
    pub rows: Vec<Fig1Row>,
}

impl Fig1Table {
    /// Fraction of replications where the generating model was selected.
    pub fn selection_frequency(&self, true_model: usize) -> f64 {
        let (mut hit, mut total) = (0usize, 0usize);
        for r in self
            .rows
            .iter()
            .filter(|r| r.true_model == true_model && r.selected)
        {
            total += 1;
            if r.candidate == true_model {
                hit += 1;
            }
        }
        if total == 0 {
            0.0
        } else {
            hit as f64 / total as f64
        }
    }
}

/// Scores of all seven candidates on one simulated dataset.
pub fn fig1_replication(
    config: &ExperimentConfig,
    true_model: usize,
    rep: usize,
) -> Result<Vec<f64>> {
    let mut rng = task_rng(
        config.master_seed,
        Scenario::Fig1Boxplots.tag(),
        rep as u64,
        true_model as u64,
    );
    let data = draw_linear_dataset(&mut rng, config.n, &theta_of(true_model), config.sigma2);
    SUPPORTS
        .iter()
        .map(|support| {
            let spec = candidate_spec(&data.design, support, config.sigma2, config.prior_mode)?;
            multivariate_score(&spec, &data.y)
        })
        .collect()
}

pub fn run_fig1(config: &ExperimentConfig) -> Result<Fig1Table> {
    if config.scenario != Scenario::Fig1Boxplots {
        return Err(Error::InvalidParameters(format!(
            "run_fig1 called with scenario {}",
            config.scenario
        )));
    }
    config.validate()?;
    let tasks: Vec<(usize, usize)> = TRUTHS
        .iter()
        .flat_map(|&t| (0..config.reps).map(move |r| (t, r)))
        .collect();
    let scored: Vec<Vec<f64>> = tasks
        .par_iter()
        .map(|&(t, r)| fig1_replication(config, t, r))
        .collect::<Result<_>>()?;

    let mut rows = Vec::with_capacity(scored.len() * SUPPORTS.len());
    for (&(true_model, rep), scores) in tasks.iter().zip(&scored) {
        let best = argmin(scores).ok_or(Error::EmptyCandidates)?;
        for (candidate, &score) in scores.iter().enumerate() {
            rows.push(Fig1Row {
                true_model,
                rep,
                candidate,
                score,
                selected: candidate == best,
            });
        }
    }
    Ok(Fig1Table { rows })
}
