//! One-parameter conjugate families with closed-form posterior predictives.
//!
//! | family            | likelihood                     | prior          | predictive support |
//! |-------------------|--------------------------------|----------------|--------------------|
//! | `NormalKnownVar`  | N(mu, sigma2), sigma2 known    | N(m, tau2)     | R                  |
//! | `GammaKnownShape` | Gamma(alpha, rate), alpha known| Gamma(a, b)    | x > 0              |
//! | `ParetoKnownScale`| Pareto(x_min, shape), x_min known | Gamma(a, b) | x > x_min          |

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::sampling::{Distribution, SamplerSpec};
use crate::scoring::{hyvarinen_pointwise, LaplaceDensity, SmoothLogDensity, Support};

const LN_2PI: f64 = 1.837_877_066_409_345_5;

/// Normal likelihood with known variance and a Normal prior on the mean.
///
/// Stored in natural parameters so that sequential updates are exact sums.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "NormalParams", into = "NormalParams")]
pub struct NormalKnownVar {
    sigma2: f64,
    precision: f64,
    weighted_mean: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
struct NormalParams {
    sigma2: f64,
    prior_mean: f64,
    prior_var: f64,
}

impl TryFrom<NormalParams> for NormalKnownVar {
    type Error = Error;
    fn try_from(p: NormalParams) -> Result<Self> {
        NormalKnownVar::new(p.sigma2, p.prior_mean, p.prior_var)
    }
}

impl From<NormalKnownVar> for NormalParams {
    fn from(n: NormalKnownVar) -> Self {
        NormalParams {
            sigma2: n.sigma2,
            prior_mean: n.prior_mean(),
            prior_var: n.prior_var(),
        }
    }
}

impl NormalKnownVar {
    pub fn new(sigma2: f64, prior_mean: f64, prior_var: f64) -> Result<Self> {
        positive("sigma2", sigma2)?;
        positive("prior_var", prior_var)?;
        finite("prior_mean", prior_mean)?;
        Ok(Self {
            sigma2,
            precision: 1.0 / prior_var,
            weighted_mean: prior_mean / prior_var,
        })
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    pub fn prior_mean(&self) -> f64 {
        self.weighted_mean / self.precision
    }

    pub fn prior_var(&self) -> f64 {
        1.0 / self.precision
    }
}

/// Gamma likelihood with known shape `alpha`; Gamma(a, rate b) prior on the rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GammaParams", into = "GammaParams")]
pub struct GammaKnownShape {
    pub alpha: f64,
    pub a: f64,
    pub b: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
struct GammaParams {
    alpha: f64,
    a: f64,
    b: f64,
}

impl TryFrom<GammaParams> for GammaKnownShape {
    type Error = Error;
    fn try_from(p: GammaParams) -> Result<Self> {
        GammaKnownShape::new(p.alpha, p.a, p.b)
    }
}

impl From<GammaKnownShape> for GammaParams {
    fn from(g: GammaKnownShape) -> Self {
        GammaParams {
            alpha: g.alpha,
            a: g.a,
            b: g.b,
        }
    }
}

impl GammaKnownShape {
    pub fn new(alpha: f64, a: f64, b: f64) -> Result<Self> {
        positive("alpha", alpha)?;
        positive("a", a)?;
        positive("b", b)?;
        Ok(Self { alpha, a, b })
    }
}

/// Pareto likelihood with known scale `x_min`; Gamma(a, rate b) prior on the shape.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ParetoParams", into = "ParetoParams")]
pub struct ParetoKnownScale {
    pub x_min: f64,
    pub a: f64,
    pub b: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
struct ParetoParams {
    x_min: f64,
    a: f64,
    b: f64,
}

impl TryFrom<ParetoParams> for ParetoKnownScale {
    type Error = Error;
    fn try_from(p: ParetoParams) -> Result<Self> {
        ParetoKnownScale::new(p.x_min, p.a, p.b)
    }
}

impl From<ParetoKnownScale> for ParetoParams {
    fn from(p: ParetoKnownScale) -> Self {
        ParetoParams {
            x_min: p.x_min,
            a: p.a,
            b: p.b,
        }
    }
}

impl ParetoKnownScale {
    pub fn new(x_min: f64, a: f64, b: f64) -> Result<Self> {
        positive("x_min", x_min)?;
        positive("a", a)?;
        positive("b", b)?;
        Ok(Self { x_min, a, b })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConjugateFamily {
    NormalKnownVar(NormalKnownVar),
    GammaKnownShape(GammaKnownShape),
    ParetoKnownScale(ParetoKnownScale),
}

impl ConjugateFamily {
    pub fn support(&self) -> Support {
        match self {
            ConjugateFamily::NormalKnownVar(_) => Support::Full,
            ConjugateFamily::GammaKnownShape(_) => Support::Positive,
            ConjugateFamily::ParetoKnownScale(p) => Support::Above(p.x_min),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ConjugateFamily::NormalKnownVar(_) => "normal",
            ConjugateFamily::GammaKnownShape(_) => "gamma",
            ConjugateFamily::ParetoKnownScale(_) => "pareto",
        }
    }

    fn absorb(&mut self, x: f64) {
        match self {
            ConjugateFamily::NormalKnownVar(n) => {
                n.precision += 1.0 / n.sigma2;
                n.weighted_mean += x / n.sigma2;
            }
            ConjugateFamily::GammaKnownShape(g) => {
                g.a += g.alpha;
                g.b += x;
            }
            ConjugateFamily::ParetoKnownScale(p) => {
                p.a += 1.0;
                p.b += (x / p.x_min).ln();
            }
        }
    }
}

/// Conjugate update of `family` on `data`. Observations are absorbed one at a
/// time, so updating on `d1` then `d2` gives bit-identical hyperparameters
/// to updating on `d1 ++ d2`.
pub fn posterior_update(family: &ConjugateFamily, data: &[f64]) -> Result<ConjugateFamily> {
    let support = family.support();
    let mut post = *family;
    for (index, &x) in data.iter().enumerate() {
        if !support.contains(&[x]) {
            return Err(Error::OutOfSupport { index, value: x });
        }
        post.absorb(x);
    }
    Ok(post)
}

/// Posterior predictive density of a [`ConjugateFamily`]; log-densities are
/// normalised.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Predictive(pub ConjugateFamily);

/// Predictive density for the next observation.
pub fn predictive(family: &ConjugateFamily) -> Predictive {
    Predictive(*family)
}

impl SmoothLogDensity for Predictive {
    fn dim(&self) -> usize {
        1
    }

    fn support(&self) -> Support {
        self.0.support()
    }

    fn log_density(&self, x: &[f64]) -> f64 {
        let x = x[0];
        if !self.support().contains(&[x]) {
            return f64::NEG_INFINITY;
        }
        match self.0 {
            ConjugateFamily::NormalKnownVar(n) => {
                let v = n.sigma2 + n.prior_var();
                let r = x - n.prior_mean();
                -0.5 * (LN_2PI + v.ln() + r * r / v)
            }
            ConjugateFamily::GammaKnownShape(g) => {
                ln_gamma(g.alpha + g.a) - ln_gamma(g.alpha) - ln_gamma(g.a)
                    + g.a * g.b.ln()
                    + (g.alpha - 1.0) * x.ln()
                    - (g.alpha + g.a) * (x + g.b).ln()
            }
            ConjugateFamily::ParetoKnownScale(p) => {
                let l = (x / p.x_min).ln();
                p.a.ln() + p.a * p.b.ln() - x.ln() - (p.a + 1.0) * (p.b + l).ln()
            }
        }
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let x = x[0];
        let g = match self.0 {
            ConjugateFamily::NormalKnownVar(n) => {
                -(x - n.prior_mean()) / (n.sigma2 + n.prior_var())
            }
            ConjugateFamily::GammaKnownShape(g) => {
                (g.alpha - 1.0) / x - (g.alpha + g.a) / (x + g.b)
            }
            ConjugateFamily::ParetoKnownScale(p) => {
                let bl = p.b + (x / p.x_min).ln();
                -1.0 / x - (p.a + 1.0) / (x * bl)
            }
        };
        vec![g]
    }

    fn laplacian(&self, x: &[f64]) -> f64 {
        let x = x[0];
        match self.0 {
            ConjugateFamily::NormalKnownVar(n) => -1.0 / (n.sigma2 + n.prior_var()),
            ConjugateFamily::GammaKnownShape(g) => {
                -(g.alpha - 1.0) / (x * x) + (g.alpha + g.a) / ((x + g.b) * (x + g.b))
            }
            ConjugateFamily::ParetoKnownScale(p) => {
                let bl = p.b + (x / p.x_min).ln();
                1.0 / (x * x) + (p.a + 1.0) * (bl + 1.0) / (x * x * bl * bl)
            }
        }
    }

    fn describe(&self) -> String {
        format!("{} predictive", self.0.name())
    }
}

/// Sum of one-step predictive Hyvarinen scores over `data` in order.
pub fn prequential_hyvarinen(family: &ConjugateFamily, data: &[f64]) -> Result<f64> {
    let support = family.support();
    let mut post = *family;
    let mut total = 0.0;
    for (index, &x) in data.iter().enumerate() {
        if !support.contains(&[x]) {
            return Err(Error::OutOfSupport { index, value: x });
        }
        total += hyvarinen_pointwise(&Predictive(post), &[x]).map_err(|e| Error::AtStep {
            index,
            source: Box::new(e),
        })?;
        post.absorb(x);
    }
    Ok(total)
}

/// Log marginal likelihood of `data`, accumulated through the chain rule.
pub fn log_marginal(family: &ConjugateFamily, data: &[f64]) -> Result<f64> {
    let support = family.support();
    let mut post = *family;
    let mut total = 0.0;
    for (index, &x) in data.iter().enumerate() {
        if !support.contains(&[x]) {
            return Err(Error::OutOfSupport { index, value: x });
        }
        total += Predictive(post).log_density(&[x]);
        post.absorb(x);
    }
    Ok(total)
}

/// Total Hyvarinen score, or `+inf` when the data leave the model's support.
pub fn hyvarinen_or_disqualified(family: &ConjugateFamily, data: &[f64]) -> Result<f64> {
    match prequential_hyvarinen(family, data) {
        Err(Error::OutOfSupport { .. }) => Ok(f64::INFINITY),
        other => other,
    }
}

/// Log marginal likelihood, or `-inf` when the data leave the model's support.
pub fn log_marginal_or_disqualified(family: &ConjugateFamily, data: &[f64]) -> Result<f64> {
    match log_marginal(family, data) {
        Err(Error::OutOfSupport { .. }) => Ok(f64::NEG_INFINITY),
        other => other,
    }
}

/// Whether a model can be scored with the Hyvarinen rule at all.
pub trait Applicability {
    fn applicability(&self) -> Result<()>;
}

impl Applicability for ConjugateFamily {
    fn applicability(&self) -> Result<()> {
        Ok(())
    }
}

impl Applicability for Distribution {
    fn applicability(&self) -> Result<()> {
        match *self {
            Distribution::Laplace { location, scale } => Err(Error::NonSmoothDensity(
                LaplaceDensity { location, scale }.describe(),
            )),
            Distribution::Poisson { rate } => Err(Error::DiscreteSupport(format!(
                "Poisson(rate {rate}) has integer support"
            ))),
            _ => Ok(()),
        }
    }
}

impl Applicability for SamplerSpec {
    fn applicability(&self) -> Result<()> {
        self.distribution.applicability()
    }
}

pub fn applicability_check<M: Applicability + ?Sized>(model: &M) -> Result<()> {
    model.applicability()
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameters(format!(
            "{name} must be positive and finite, got {v}"
        )))
    }
}

fn finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameters(format!(
            "{name} must be finite, got {v}"
        )))
    }
}
