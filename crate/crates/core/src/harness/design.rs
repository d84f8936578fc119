//! Synthetic regression data shared by the linear-model studies.
//!
//! Column 0 of every design is the intercept; the remaining columns are
//! i.i.d. standard normal. Rows are drawn one at a time (covariates, then
//! noise), so a dataset of length `n` is a prefix of the dataset of length
//! `n + 1` drawn from the same generator state.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::harness::config::PriorMode;
use crate::linear::{LinearModelSpec, Prior};

#[derive(Debug, Clone, PartialEq)]
pub struct LinearDataset {
    pub design: DMatrix<f64>,
    pub y: DVector<f64>,
}

pub fn draw_linear_dataset<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    theta: &[f64],
    sigma2: f64,
) -> LinearDataset {
    let k = theta.len();
    let sd = sigma2.sqrt();
    let mut design = DMatrix::zeros(n, k);
    let mut y = DVector::zeros(n);
    for i in 0..n {
        let mut mean = 0.0;
        for j in 0..k {
            let v = if j == 0 {
                1.0
            } else {
                rng.sample(StandardNormal)
            };
            design[(i, j)] = v;
            mean += v * theta[j];
        }
        let noise: f64 = rng.sample(StandardNormal);
        y[i] = mean + sd * noise;
    }
    LinearDataset { design, y }
}

/// Columns of `design` flagged in `support`.
pub fn select_columns(design: &DMatrix<f64>, support: &[bool]) -> DMatrix<f64> {
    let cols: Vec<usize> = support
        .iter()
        .enumerate()
        .filter_map(|(j, &on)| on.then_some(j))
        .collect();
    design.select_columns(cols.iter())
}

pub fn candidate_spec(
    design: &DMatrix<f64>,
    support: &[bool],
    sigma2: f64,
    prior: PriorMode,
) -> Result<LinearModelSpec> {
    let x = select_columns(design, support);
    let p = x.ncols();
    let prior = match prior {
        PriorMode::Improper => Prior::ImproperFlat,
        PriorMode::Proper(c) => Prior::isotropic(p, c, sigma2),
    };
    LinearModelSpec::new(x, sigma2, prior)
}
