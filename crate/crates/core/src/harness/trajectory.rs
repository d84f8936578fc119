//! Log-Bayes factor and score difference along growing sample size.
//!
//! One dataset of the largest size is drawn per replication and shared by
//! every prior multiplier `c`; each `n` uses the prefix `y[..n]`. Both
//! statistics are oriented so that positive values favour the generating
//! model.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::harness::config::{ExperimentConfig, Scenario};
use crate::harness::design::{draw_linear_dataset, select_columns, LinearDataset};
use crate::harness::seed::task_rng;
use crate::linear::{GramStats, Prior, PriorFactor};

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRow {
    pub scenario: Scenario,
    pub c: f64,
    pub rep: usize,
    pub n: usize,
    /// `log m_true(y) - log m_alt(y)`.
    pub log_bf: f64,
    /// `H_alt(y) - H_true(y)`.
    pub score_diff: f64,
}

/// Generating coefficients and the supports of (true, alternative).
pub struct TrajectorySetup {
    pub theta: Vec<f64>,
    pub true_support: Vec<bool>,
    pub alt_support: Vec<bool>,
}

pub fn setup(scenario: Scenario) -> Result<TrajectorySetup> {
    match scenario {
        // M1: theta = (1, 0) is true, M0: theta = (0, 1) the alternative
        Scenario::Fig2NonNested => Ok(TrajectorySetup {
            theta: vec![1.0, 0.0],
            true_support: vec![true, false],
            alt_support: vec![false, true],
        }),
        // M6: all six coefficients one is true, M3: first three the alternative
        Scenario::Fig3Nested => Ok(TrajectorySetup {
            theta: vec![1.0; 6],
            true_support: vec![true; 6],
            alt_support: vec![true, true, true, false, false, false],
        }),
        other => Err(Error::InvalidParameters(format!(
            "{other} is not a trajectory scenario"
        ))),
    }
}

pub fn trajectory_dataset(config: &ExperimentConfig, rep: usize) -> Result<LinearDataset> {
    let s = setup(config.scenario)?;
    let mut rng = task_rng(config.master_seed, config.scenario.tag(), rep as u64, 0);
    Ok(draw_linear_dataset(
        &mut rng,
        config.n,
        &s.theta,
        config.sigma2,
    ))
}

/// Rows for one `(rep, c)` cell, `n = 1..=config.n`.
pub fn trajectory_cell(
    config: &ExperimentConfig,
    data: &LinearDataset,
    rep: usize,
    c: f64,
) -> Result<Vec<TrajectoryRow>> {
    let s = setup(config.scenario)?;
    let x_true = select_columns(&data.design, &s.true_support);
    let x_alt = select_columns(&data.design, &s.alt_support);
    let factor = |p: usize| match Prior::isotropic(p, c, config.sigma2) {
        Prior::ProperGaussian { mean, cov } => PriorFactor::new(&mean, &cov),
        Prior::ImproperFlat => unreachable!(),
    };
    let f_true = factor(x_true.ncols())?;
    let f_alt = factor(x_alt.ncols())?;
    let mut st_true = GramStats::new(x_true.ncols());
    let mut st_alt = GramStats::new(x_alt.ncols());

    let mut rows = Vec::with_capacity(config.n);
    for i in 0..config.n {
        let y = data.y[i];
        st_true.push(x_true.row(i).transpose().as_slice(), y);
        st_alt.push(x_alt.row(i).transpose().as_slice(), y);
        let t = f_true.evaluate(&st_true, config.sigma2)?;
        let a = f_alt.evaluate(&st_alt, config.sigma2)?;
        rows.push(TrajectoryRow {
            scenario: config.scenario,
            c,
            rep,
            n: i + 1,
            log_bf: t.log_marginal - a.log_marginal,
            score_diff: a.hyvarinen - t.hyvarinen,
        });
    }
    Ok(rows)
}

/// Rows ordered by `(c, rep, n)`.
pub fn run_trajectory(config: &ExperimentConfig) -> Result<Vec<TrajectoryRow>> {
    if !config.scenario.is_trajectory() {
        return Err(Error::InvalidParameters(format!(
            "run_trajectory called with scenario {}",
            config.scenario
        )));
    }
    config.validate()?;
    let datasets: Vec<LinearDataset> = (0..config.reps)
        .into_par_iter()
        .map(|rep| trajectory_dataset(config, rep))
        .collect::<Result<_>>()?;
    let tasks: Vec<(usize, usize)> = (0..config.c_grid.len())
        .flat_map(|ci| (0..config.reps).map(move |r| (ci, r)))
        .collect();
    let cells: Vec<Vec<TrajectoryRow>> = tasks
        .par_iter()
        .map(|&(ci, rep)| trajectory_cell(config, &datasets[rep], rep, config.c_grid[ci]))
        .collect::<Result<_>>()?;
    Ok(cells.into_iter().flatten().collect())
}

/// Mean `(log_bf, score_diff)` per `n` over all replications in `rows`.
pub fn mean_by_n(rows: &[TrajectoryRow]) -> BTreeMap<usize, (f64, f64)> {
    let mut acc: BTreeMap<usize, (f64, f64, usize)> = BTreeMap::new();
    for r in rows {
        let e = acc.entry(r.n).or_insert((0.0, 0.0, 0));
        e.0 += r.log_bf;
        e.1 += r.score_diff;
        e.2 += 1;
    }
    acc.into_iter()
        .map(|(n, (b, s, k))| (n, (b / k as f64, s / k as f64)))
        .collect()
}

/// Ratio of the least-squares slopes (against `n`) of the mean log-Bayes
/// factor and the mean score difference, fitted over the last `window`
/// fraction of the sample sizes. All rows must share one `c`.
pub fn estimate_slope_ratio(rows: &[TrajectoryRow], window: f64) -> Result<f64> {
    if !(window > 0.0 && window <= 1.0) {
        return Err(Error::InvalidParameters(format!(
            "window must lie in (0, 1], got {window}"
        )));
    }
    let first = rows
        .first()
        .ok_or_else(|| Error::DegenerateFit("no rows".into()))?;
    if rows.iter().any(|r| r.c != first.c) {
        return Err(Error::InvalidParameters(
            "rows mix several prior multipliers".into(),
        ));
    }
    let means = mean_by_n(rows);
    let n_max = *means.keys().next_back().unwrap_or(&0);
    let cutoff = n_max as f64 * (1.0 - window);
    let pts: Vec<(f64, f64, f64)> = means
        .iter()
        .filter(|(&n, _)| n as f64 > cutoff)
        .map(|(&n, &(b, s))| (n as f64, b, s))
        .collect();
    if pts.len() < 2 {
        return Err(Error::DegenerateFit(format!(
            "{} points in the fit window",
            pts.len()
        )));
    }
    let bf_slope = ls_slope(pts.iter().map(|p| (p.0, p.1)));
    let score_slope = ls_slope(pts.iter().map(|p| (p.0, p.2)));
    if !(score_slope > 0.0) {
        return Err(Error::DegenerateFit(format!(
            "score-difference slope {score_slope} is not positive"
        )));
    }
    Ok(bf_slope / score_slope)
}

fn ls_slope(points: impl Iterator<Item = (f64, f64)> + Clone) -> f64 {
    let k = points.clone().count() as f64;
    let (sx, sy) = points
        .clone()
        .fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / k, sy / k);
    let (sxy, sxx) = points.fold((0.0, 0.0), |(a, b), (x, y)| {
        (a + (x - mx) * (y - my), b + (x - mx) * (x - mx))
    });
    sxy / sxx
}
