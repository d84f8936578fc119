//! Gaussian linear models `y | theta ~ N(X theta, sigma2 I)` with known noise
//! variance and either a conjugate Gaussian prior or a flat improper prior on
//! `theta`.
//!
//! Under a proper prior `N(m, V)` the marginal of `y` is `N(X m, sigma2 I + X V X^T)`,
//! whose precision follows from the Woodbury identity:
//!
//! ```text
//! K = I/sigma2 - X (V^-1 + X^T X / sigma2)^-1 X^T / sigma2^2
//! ```
//!
//! Letting `V` grow without bound leaves `K = (I - P) / sigma2` with `P` the
//! projector onto the column space of `X`. That limit is singular but still
//! scores fine, which is how the flat prior is handled.
//!
//! Most quantities are computed from the sufficient statistics `X^T X`,
//! `X^T y` and `y^T y` ([`GramStats`]) so that trajectories over growing
//! prefixes of one dataset cost `O(p^3)` per step. [`GaussianMarginal`] keeps
//! the explicit `n x n` form for inspection and cross-checking.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scoring::{hyvarinen_pointwise, GaussianDensity};

const LN_2PI: f64 = 1.837_877_066_409_345_5;

/// Prior on the regression coefficients.
#[derive(Debug, Clone, PartialEq)]
pub enum Prior {
    ProperGaussian {
        mean: DVector<f64>,
        cov: DMatrix<f64>,
    },
    ImproperFlat,
}

impl Prior {
    /// `N(0, c * sigma2 * I_p)`.
    pub fn isotropic(p: usize, c: f64, sigma2: f64) -> Prior {
        Prior::ProperGaussian {
            mean: DVector::zeros(p),
            cov: DMatrix::identity(p, p) * (c * sigma2),
        }
    }

    pub fn is_proper(&self) -> bool {
        matches!(self, Prior::ProperGaussian { .. })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearModelSpec {
    design: DMatrix<f64>,
    sigma2: f64,
    prior: Prior,
}

impl LinearModelSpec {
    pub fn new(design: DMatrix<f64>, sigma2: f64, prior: Prior) -> Result<Self> {
        if design.nrows() == 0 {
            return Err(Error::InvalidParameters(
                "design needs at least one row".into(),
            ));
        }
        if !(sigma2 > 0.0 && sigma2.is_finite()) {
            return Err(Error::InvalidParameters(format!(
                "noise variance must be positive, got {sigma2}"
            )));
        }
        if design.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameters(
                "design contains non-finite entries".into(),
            ));
        }
        let p = design.ncols();
        match &prior {
            Prior::ProperGaussian { mean, cov } => {
                if mean.len() != p {
                    return Err(Error::DimensionMismatch {
                        expected: p,
                        got: mean.len(),
                    });
                }
                if cov.nrows() != p || cov.ncols() != p {
                    return Err(Error::DimensionMismatch {
                        expected: p,
                        got: cov.nrows().max(cov.ncols()),
                    });
                }
                PriorFactor::new(mean, cov)?;
            }
            Prior::ImproperFlat => {
                if p > design.nrows() {
                    return Err(Error::RankDeficientDesign { p });
                }
                thin_q(&design)?;
            }
        }
        Ok(Self {
            design,
            sigma2,
            prior,
        })
    }

    pub fn n(&self) -> usize {
        self.design.nrows()
    }

    pub fn p(&self) -> usize {
        self.design.ncols()
    }

    pub fn design(&self) -> &DMatrix<f64> {
        &self.design
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    pub fn prior(&self) -> &Prior {
        &self.prior
    }

    /// Same model restricted to the first `n` rows of the design.
    pub fn prefix(&self, n: usize) -> Result<Self> {
        if n == 0 || n > self.n() {
            return Err(Error::InvalidParameters(format!(
                "prefix length {n} outside 1..={}",
                self.n()
            )));
        }
        Self::new(
            self.design.rows(0, n).into_owned(),
            self.sigma2,
            self.prior.clone(),
        )
    }

    pub fn marginal(&self) -> Result<GaussianMarginal> {
        match self.prior {
            Prior::ProperGaussian { .. } => marginal_proper(self),
            Prior::ImproperFlat => marginal_improper(self),
        }
    }

    fn check_data(&self, y: &DVector<f64>) -> Result<()> {
        if y.len() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                got: y.len(),
            });
        }
        Ok(())
    }
}

/// Marginal distribution of the data under one model.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianMarginal {
    pub mean: DVector<f64>,
    pub precision: DMatrix<f64>,
    pub rank: usize,
    /// `log det(sigma2 I + X V X^T)`; `None` when the precision is singular.
    pub log_det_cov: Option<f64>,
}

/// Cholesky factor of the prior covariance plus the quantities derived from it.
#[derive(Debug, Clone)]
pub struct PriorFactor {
    mean: DVector<f64>,
    cov_inv: DMatrix<f64>,
    log_det_cov: f64,
}

impl PriorFactor {
    pub fn new(mean: &DVector<f64>, cov: &DMatrix<f64>) -> Result<Self> {
        let p = cov.nrows();
        let scale = cov.amax().max(1.0);
        for i in 0..p {
            for j in 0..i {
                if (cov[(i, j)] - cov[(j, i)]).abs() > 1e-10 * scale {
                    return Err(Error::NonSPDPrior);
                }
            }
        }
        let chol = Cholesky::new(cov.clone()).ok_or(Error::NonSPDPrior)?;
        let log_det_cov = 2.0
            * chol
                .l_dirty()
                .diagonal()
                .iter()
                .map(|d| d.ln())
                .sum::<f64>();
        if !log_det_cov.is_finite() {
            return Err(Error::NonSPDPrior);
        }
        Ok(Self {
            mean: mean.clone(),
            cov_inv: chol.inverse(),
            log_det_cov,
        })
    }

    fn from_prior(prior: &Prior) -> Result<Self> {
        match prior {
            Prior::ProperGaussian { mean, cov } => Self::new(mean, cov),
            Prior::ImproperFlat => Err(Error::ImproperPriorHasNoMarginalMass),
        }
    }

    /// Score and log marginal likelihood from sufficient statistics.
    pub fn evaluate(&self, stats: &GramStats, sigma2: f64) -> Result<MarginalSummary> {
        let p = self.mean.len();
        if stats.xtx.nrows() != p {
            return Err(Error::DimensionMismatch {
                expected: p,
                got: stats.xtx.nrows(),
            });
        }
        let n = stats.n as f64;
        let s2 = sigma2;
        let s4 = s2 * s2;
        let g = &stats.xtx;
        let m = &self.mean;
        let gm = g * m;
        let w = &stats.xty - &gm;
        let rr = stats.yty - 2.0 * m.dot(&stats.xty) + m.dot(&gm);

        if p == 0 {
            return Ok(MarginalSummary {
                hyvarinen: -2.0 * n / s2 + rr / s4,
                log_marginal: -0.5 * n * LN_2PI - 0.5 * n * s2.ln() - 0.5 * rr / s2,
            });
        }

        let a = &self.cov_inv + g / s2;
        let chol = Cholesky::new(a).ok_or(Error::NonSPDPrior)?;
        let log_det_a = 2.0
            * chol
                .l_dirty()
                .diagonal()
                .iter()
                .map(|d| d.ln())
                .sum::<f64>();
        let u = chol.solve(&w);
        let a_inv_g = chol.solve(g);

        let trace_k = n / s2 - a_inv_g.trace() / s4;
        let kr_sq = rr / s4 - 2.0 * w.dot(&u) / (s4 * s2) + u.dot(&(g * &u)) / (s4 * s4);
        let quad = rr / s2 - w.dot(&u) / s4;
        let log_det_cov = n * s2.ln() + self.log_det_cov + log_det_a;

        Ok(MarginalSummary {
            hyvarinen: -2.0 * trace_k + kr_sq,
            log_marginal: -0.5 * n * LN_2PI - 0.5 * log_det_cov - 0.5 * quad,
        })
    }
}

/// Multivariate Hyvarinen score and log marginal likelihood of one dataset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarginalSummary {
    pub hyvarinen: f64,
    pub log_marginal: f64,
}

/// Running `X^T X`, `X^T y`, `y^T y` and row count.
#[derive(Debug, Clone, PartialEq)]
pub struct GramStats {
    pub n: usize,
    pub xtx: DMatrix<f64>,
    pub xty: DVector<f64>,
    pub yty: f64,
}

impl GramStats {
    pub fn new(p: usize) -> Self {
        Self {
            n: 0,
            xtx: DMatrix::zeros(p, p),
            xty: DVector::zeros(p),
            yty: 0.0,
        }
    }

    pub fn from_data(design: &DMatrix<f64>, y: &DVector<f64>) -> Self {
        Self {
            n: design.nrows(),
            xtx: design.tr_mul(design),
            xty: design.tr_mul(y),
            yty: y.norm_squared(),
        }
    }

    pub fn push(&mut self, row: &[f64], y: f64) {
        let p = row.len();
        debug_assert_eq!(p, self.xty.len());
        for i in 0..p {
            for j in 0..p {
                self.xtx[(i, j)] += row[i] * row[j];
            }
            self.xty[i] += row[i] * y;
        }
        self.yty += y * y;
        self.n += 1;
    }
}

/// Marginal under a proper Gaussian prior, precision via Woodbury and
/// log-determinant via the matrix determinant lemma.
pub fn marginal_proper(spec: &LinearModelSpec) -> Result<GaussianMarginal> {
    let factor = PriorFactor::from_prior(&spec.prior)?;
    let x = &spec.design;
    let n = spec.n();
    let s2 = spec.sigma2;
    let mean = x * &factor.mean;
    if spec.p() == 0 {
        return Ok(GaussianMarginal {
            mean,
            precision: DMatrix::identity(n, n) / s2,
            rank: n,
            log_det_cov: Some(n as f64 * s2.ln()),
        });
    }
    let a = &factor.cov_inv + x.tr_mul(x) / s2;
    let chol = Cholesky::new(a).ok_or(Error::NonSPDPrior)?;
    let log_det_a = 2.0
        * chol
            .l_dirty()
            .diagonal()
            .iter()
            .map(|d| d.ln())
            .sum::<f64>();
    let a_inv_xt = chol.solve(&x.transpose());
    let mut precision = DMatrix::identity(n, n) / s2 - x * a_inv_xt / (s2 * s2);
    symmetrize(&mut precision);
    Ok(GaussianMarginal {
        mean,
        precision,
        rank: n,
        log_det_cov: Some(n as f64 * s2.ln() + factor.log_det_cov + log_det_a),
    })
}

/// Limit of the proper marginal as the prior covariance grows without bound:
/// zero mean and precision `(I - P) / sigma2`.
pub fn marginal_improper(spec: &LinearModelSpec) -> Result<GaussianMarginal> {
    let n = spec.n();
    let p = spec.p();
    if p > n {
        return Err(Error::RankDeficientDesign { p });
    }
    let q = thin_q(&spec.design)?;
    if n == p {
        // the projector is the identity
        return Ok(GaussianMarginal {
            mean: DVector::zeros(n),
            precision: DMatrix::zeros(n, n),
            rank: 0,
            log_det_cov: None,
        });
    }
    let mut precision = (DMatrix::identity(n, n) - &q * q.transpose()) / spec.sigma2;
    symmetrize(&mut precision);
    Ok(GaussianMarginal {
        mean: DVector::zeros(n),
        precision,
        rank: n - p,
        log_det_cov: None,
    })
}

/// Hyvarinen score of the whole data vector under the model's marginal.
pub fn multivariate_score(spec: &LinearModelSpec, y: &DVector<f64>) -> Result<f64> {
    spec.check_data(y)?;
    match &spec.prior {
        Prior::ProperGaussian { mean, cov } => {
            let factor = PriorFactor::new(mean, cov)?;
            let stats = GramStats::from_data(&spec.design, y);
            Ok(factor.evaluate(&stats, spec.sigma2)?.hyvarinen)
        }
        Prior::ImproperFlat => {
            let n = spec.n();
            let p = spec.p();
            let s2 = spec.sigma2;
            let q = thin_q(&spec.design)?;
            if n == p {
                return Ok(0.0);
            }
            let resid = y - &q * q.tr_mul(y);
            Ok(-2.0 * (n - p) as f64 / s2 + resid.norm_squared() / (s2 * s2))
        }
    }
}

/// `log N(y; X m, sigma2 I + X V X^T)`. Undefined for the flat prior.
pub fn log_marginal_likelihood(spec: &LinearModelSpec, y: &DVector<f64>) -> Result<f64> {
    spec.check_data(y)?;
    let factor = PriorFactor::from_prior(&spec.prior)?;
    let stats = GramStats::from_data(&spec.design, y);
    Ok(factor.evaluate(&stats, spec.sigma2)?.log_marginal)
}

/// `log m_a(y) - log m_b(y)`; positive values favour `a`.
pub fn log_bayes_factor(a: &LinearModelSpec, b: &LinearModelSpec, y: &DVector<f64>) -> Result<f64> {
    Ok(log_marginal_likelihood(a, y)? - log_marginal_likelihood(b, y)?)
}

/// One-step-ahead Gaussian predictive of `y[i]` given `y[..i]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepPredictive {
    pub index: usize,
    pub mean: f64,
    pub var: f64,
}

/// Predictives for steps `start..n`. The flat prior has no proper predictive
/// before `p` observations, so `start >= p` is required there.
pub fn one_step_predictives(
    spec: &LinearModelSpec,
    y: &DVector<f64>,
    start: usize,
) -> Result<Vec<StepPredictive>> {
    spec.check_data(y)?;
    let n = spec.n();
    let p = spec.p();
    let s2 = spec.sigma2;
    if !spec.prior.is_proper() && (n <= p || start < p) {
        return Err(Error::InsufficientBurnIn { n: n.min(start), p });
    }
    if start >= n {
        return Err(Error::InsufficientBurnIn { n, p: start });
    }

    // natural parameters of the posterior on theta
    let (mut precision, mut shift) = match &spec.prior {
        Prior::ProperGaussian { mean, cov } => {
            let factor = PriorFactor::new(mean, cov)?;
            let shift = &factor.cov_inv * &factor.mean;
            (factor.cov_inv, shift)
        }
        Prior::ImproperFlat => (DMatrix::zeros(p, p), DVector::zeros(p)),
    };

    let mut out = Vec::with_capacity(n - start);
    for i in 0..n {
        let row = spec.design.row(i).transpose();
        if i >= start {
            let (mean, var) = if p == 0 {
                (0.0, s2)
            } else {
                let chol = Cholesky::new(precision.clone()).ok_or(Error::AtStep {
                    index: i,
                    source: Box::new(Error::RankDeficientDesign { p }),
                })?;
                let post_mean = chol.solve(&shift);
                let v = chol.solve(&row);
                (row.dot(&post_mean), s2 + row.dot(&v))
            };
            out.push(StepPredictive {
                index: i,
                mean,
                var,
            });
        }
        precision += &row * row.transpose() / s2;
        shift += &row * (y[i] / s2);
    }
    Ok(out)
}

/// Prequential Hyvarinen score with the default start: step 0 for a proper
/// prior, step `p` for the flat prior.
pub fn prequential_score_linear(spec: &LinearModelSpec, y: &DVector<f64>) -> Result<f64> {
    let start = if spec.prior.is_proper() { 0 } else { spec.p() };
    prequential_score_linear_from(spec, y, start)
}

/// Prequential Hyvarinen score summed over steps `start..n`.
pub fn prequential_score_linear_from(
    spec: &LinearModelSpec,
    y: &DVector<f64>,
    start: usize,
) -> Result<f64> {
    let mut total = 0.0;
    for step in one_step_predictives(spec, y, start)? {
        let density = GaussianDensity::univariate(step.mean, step.var);
        total += hyvarinen_pointwise(&density, &[y[step.index]]).map_err(|e| Error::AtStep {
            index: step.index,
            source: Box::new(e),
        })?;
    }
    Ok(total)
}

/// Prequential scores of several candidates over a shared index set. When
/// any candidate has a flat prior, every sum starts after the largest
/// candidate dimension so that all totals cover the same observations.
pub fn prequential_scores_common(
    candidates: &[LinearModelSpec],
    y: &DVector<f64>,
) -> Result<Vec<f64>> {
    if candidates.is_empty() {
        return Err(Error::EmptyCandidates);
    }
    let start = if candidates.iter().all(|c| c.prior.is_proper()) {
        0
    } else {
        candidates.iter().map(LinearModelSpec::p).max().unwrap_or(0)
    };
    candidates
        .iter()
        .map(|c| prequential_score_linear_from(c, y, start))
        .collect()
}

/// Sum of one-step predictive log-densities. For a proper prior this equals
/// the log marginal likelihood.
pub fn prequential_log_density(spec: &LinearModelSpec, y: &DVector<f64>) -> Result<f64> {
    let start = if spec.prior.is_proper() { 0 } else { spec.p() };
    Ok(one_step_predictives(spec, y, start)?
        .iter()
        .map(|s| {
            let r = y[s.index] - s.mean;
            -0.5 * (LN_2PI + s.var.ln() + r * r / s.var)
        })
        .sum())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Criterion {
    /// Smallest multivariate Hyvarinen score.
    MinHyvarinen,
    /// Largest log marginal likelihood (Bayes factor).
    MaxMarginal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreReport {
    pub criterion: Criterion,
    pub scores: Vec<f64>,
    /// `differences[i][j] = scores[i] - scores[j]`.
    pub differences: Vec<Vec<f64>>,
    pub selected: usize,
}

impl ScoreReport {
    pub fn from_scores(criterion: Criterion, scores: Vec<f64>) -> Result<Self> {
        let selected = match criterion {
            Criterion::MinHyvarinen => argmin(&scores),
            Criterion::MaxMarginal => argmax(&scores),
        }
        .ok_or(Error::EmptyCandidates)?;
        let differences = scores
            .iter()
            .map(|a| scores.iter().map(|b| a - b).collect())
            .collect();
        Ok(Self {
            criterion,
            scores,
            differences,
            selected,
        })
    }
}

/// Index of the smallest value, lowest index on ties. NaN never wins.
pub fn argmin(values: &[f64]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, &v) in values.iter().enumerate() {
        if v.is_nan() {
            continue;
        }
        if best.is_none_or(|b| v < values[b]) {
            best = Some(i);
        }
    }
    best.or(if values.is_empty() { None } else { Some(0) })
}

/// Index of the largest value, lowest index on ties. NaN never wins.
pub fn argmax(values: &[f64]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, &v) in values.iter().enumerate() {
        if v.is_nan() {
            continue;
        }
        if best.is_none_or(|b| v > values[b]) {
            best = Some(i);
        }
    }
    best.or(if values.is_empty() { None } else { Some(0) })
}

pub fn select_model(
    candidates: &[LinearModelSpec],
    y: &DVector<f64>,
    criterion: Criterion,
) -> Result<ScoreReport> {
    if candidates.is_empty() {
        return Err(Error::EmptyCandidates);
    }
    let scores = candidates
        .iter()
        .map(|spec| match criterion {
            Criterion::MinHyvarinen => multivariate_score(spec, y),
            Criterion::MaxMarginal => log_marginal_likelihood(spec, y),
        })
        .collect::<Result<Vec<_>>>()?;
    ScoreReport::from_scores(criterion, scores)
}

/// Thin orthonormal basis of the column space, failing on rank deficiency.
fn thin_q(x: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let (n, p) = x.shape();
    if p == 0 {
        return Ok(DMatrix::zeros(n, 0));
    }
    if p > n {
        return Err(Error::RankDeficientDesign { p });
    }
    let qr = x.clone().qr();
    let r = qr.r();
    let diag_max = (0..p).map(|i| r[(i, i)].abs()).fold(0.0, f64::max);
    let tol = f64::EPSILON * n.max(p) as f64 * diag_max.max(f64::MIN_POSITIVE) * 10.0;
    if diag_max == 0.0 || (0..p).any(|i| r[(i, i)].abs() <= tol) {
        return Err(Error::RankDeficientDesign { p });
    }
    let q: nalgebra::OMatrix<f64, Dyn, Dyn> = qr.q();
    Ok(q)
}

fn symmetrize(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    for i in 0..n {
        for j in 0..i {
            let v = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
}
