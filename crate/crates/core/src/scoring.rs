//! The Hyvarinen score and the pieces it is built from.
//!
//! For a density `q` on an open subset of R^d the score of an outcome `x` is
//!
//! ```text
//! H(x, q) = 2 * laplacian(log q)(x) + |grad(log q)(x)|^2
//! ```
//!
//! It is a loss (smaller is better) and only touches derivatives of `log q`,
//! so any additive constant in the log-density, and hence the normalising
//! constant, drops out.

use std::fmt;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Default finite-difference step.
pub const FD_STEP: f64 = 1e-4;

/// Open support of a density, applied coordinate-wise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Support {
    /// All of R^d.
    Full,
    /// x > 0.
    Positive,
    /// x > lower.
    Above(f64),
}

impl Support {
    /// Whether every coordinate of `x` is strictly inside the support.
    pub fn contains(&self, x: &[f64]) -> bool {
        self.contains_with_margin(x, 0.0)
    }

    /// Whether every coordinate of `x` is at least `margin` inside the support.
    pub fn contains_with_margin(&self, x: &[f64], margin: f64) -> bool {
        x.iter().all(|&v| {
            v.is_finite()
                && match *self {
                    Support::Full => true,
                    Support::Positive => v > margin,
                    Support::Above(lower) => v > lower + margin,
                }
        })
    }
}

impl fmt::Display for Support {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Support::Full => write!(f, "full space"),
            Support::Positive => write!(f, "x > 0"),
            Support::Above(lower) => write!(f, "x > {lower}"),
        }
    }
}

/// A log-density known up to an additive constant, with analytic first and
/// second derivatives.
pub trait SmoothLogDensity {
    fn dim(&self) -> usize;

    fn support(&self) -> Support;

    fn log_density(&self, x: &[f64]) -> f64;

    fn gradient(&self, x: &[f64]) -> Vec<f64>;

    /// Trace of the Hessian of the log-density.
    fn laplacian(&self, x: &[f64]) -> f64;

    /// `false` for densities that are not twice differentiable everywhere on
    /// their support (for example the Laplace density at its location).
    fn is_smooth(&self) -> bool {
        true
    }

    /// Short description used in error messages.
    fn describe(&self) -> String {
        "density".to_string()
    }
}

impl<D: SmoothLogDensity + ?Sized> SmoothLogDensity for &D {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn support(&self) -> Support {
        (**self).support()
    }
    fn log_density(&self, x: &[f64]) -> f64 {
        (**self).log_density(x)
    }
    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        (**self).gradient(x)
    }
    fn laplacian(&self, x: &[f64]) -> f64 {
        (**self).laplacian(x)
    }
    fn is_smooth(&self) -> bool {
        (**self).is_smooth()
    }
    fn describe(&self) -> String {
        (**self).describe()
    }
}

impl<D: SmoothLogDensity + ?Sized> SmoothLogDensity for Box<D> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn support(&self) -> Support {
        (**self).support()
    }
    fn log_density(&self, x: &[f64]) -> f64 {
        (**self).log_density(x)
    }
    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        (**self).gradient(x)
    }
    fn laplacian(&self, x: &[f64]) -> f64 {
        (**self).laplacian(x)
    }
    fn is_smooth(&self) -> bool {
        (**self).is_smooth()
    }
    fn describe(&self) -> String {
        (**self).describe()
    }
}

/// `log_density + shift`, derivatives unchanged.
#[derive(Debug, Clone)]
pub struct Shifted<D> {
    pub inner: D,
    pub shift: f64,
}

impl<D: SmoothLogDensity> SmoothLogDensity for Shifted<D> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn support(&self) -> Support {
        self.inner.support()
    }
    fn log_density(&self, x: &[f64]) -> f64 {
        self.inner.log_density(x) + self.shift
    }
    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        self.inner.gradient(x)
    }
    fn laplacian(&self, x: &[f64]) -> f64 {
        self.inner.laplacian(x)
    }
    fn is_smooth(&self) -> bool {
        self.inner.is_smooth()
    }
    fn describe(&self) -> String {
        format!("{} shifted by {}", self.inner.describe(), self.shift)
    }
}

/// Multivariate Gaussian log-density parameterised by mean and precision.
/// The normalising constant is omitted.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianDensity {
    pub mean: DVector<f64>,
    pub precision: DMatrix<f64>,
}

impl GaussianDensity {
    pub fn new(mean: DVector<f64>, precision: DMatrix<f64>) -> Result<Self> {
        check_square(&precision, mean.len())?;
        Ok(Self { mean, precision })
    }

    /// Univariate N(mean, var).
    pub fn univariate(mean: f64, var: f64) -> Self {
        Self {
            mean: DVector::from_element(1, mean),
            precision: DMatrix::from_element(1, 1, 1.0 / var),
        }
    }

    fn centred(&self, x: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(x) - &self.mean
    }
}

impl SmoothLogDensity for GaussianDensity {
    fn dim(&self) -> usize {
        self.mean.len()
    }
    fn support(&self) -> Support {
        Support::Full
    }
    fn log_density(&self, x: &[f64]) -> f64 {
        let r = self.centred(x);
        -0.5 * r.dot(&(&self.precision * &r))
    }
    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let r = self.centred(x);
        (-(&self.precision * r)).iter().copied().collect()
    }
    fn laplacian(&self, _x: &[f64]) -> f64 {
        -self.precision.trace()
    }
    fn describe(&self) -> String {
        format!("Gaussian (dim {})", self.dim())
    }
}

/// Univariate Laplace log-density. Carries the non-differentiability flag so
/// that scoring refuses it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaplaceDensity {
    pub location: f64,
    pub scale: f64,
}

impl SmoothLogDensity for LaplaceDensity {
    fn dim(&self) -> usize {
        1
    }
    fn support(&self) -> Support {
        Support::Full
    }
    fn log_density(&self, x: &[f64]) -> f64 {
        -(x[0] - self.location).abs() / self.scale - (2.0 * self.scale).ln()
    }
    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        vec![-(x[0] - self.location).signum() / self.scale]
    }
    fn laplacian(&self, _x: &[f64]) -> f64 {
        0.0
    }
    fn is_smooth(&self) -> bool {
        false
    }
    fn describe(&self) -> String {
        format!(
            "Laplace(location {}, scale {}) is not differentiable at its location",
            self.location, self.scale
        )
    }
}

/// Adapter turning closures into a [`SmoothLogDensity`].
pub struct ClosureDensity<L, G, H> {
    pub dim: usize,
    pub support: Support,
    pub log_density: L,
    pub gradient: G,
    pub laplacian: H,
}

impl<L, G, H> SmoothLogDensity for ClosureDensity<L, G, H>
where
    L: Fn(&[f64]) -> f64,
    G: Fn(&[f64]) -> Vec<f64>,
    H: Fn(&[f64]) -> f64,
{
    fn dim(&self) -> usize {
        self.dim
    }
    fn support(&self) -> Support {
        self.support
    }
    fn log_density(&self, x: &[f64]) -> f64 {
        (self.log_density)(x)
    }
    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        (self.gradient)(x)
    }
    fn laplacian(&self, x: &[f64]) -> f64 {
        (self.laplacian)(x)
    }
}

/// Hyvarinen score of `x` under `density`.
pub fn hyvarinen_pointwise<D: SmoothLogDensity + ?Sized>(density: &D, x: &[f64]) -> Result<f64> {
    if !density.is_smooth() {
        return Err(Error::NonSmoothDensity(density.describe()));
    }
    if x.len() != density.dim() {
        return Err(Error::DimensionMismatch {
            expected: density.dim(),
            got: x.len(),
        });
    }
    let support = density.support();
    if !support.contains(x) {
        return Err(Error::PointOutsideSupport {
            point: x.to_vec(),
            support: support.to_string(),
        });
    }
    let grad = density.gradient(x);
    let grad_sq: f64 = grad.iter().map(|g| g * g).sum();
    Ok(2.0 * density.laplacian(x) + grad_sq)
}

/// Closed form of the score for a Gaussian with mean `mean` and (possibly
/// singular) precision `precision`: `-2 tr(K) + |K (x - mean)|^2`.
pub fn hyvarinen_gaussian(
    mean: &DVector<f64>,
    precision: &DMatrix<f64>,
    x: &DVector<f64>,
) -> Result<f64> {
    if x.len() != mean.len() {
        return Err(Error::DimensionMismatch {
            expected: mean.len(),
            got: x.len(),
        });
    }
    check_square(precision, mean.len())?;
    let kr = precision * (x - mean);
    Ok(-2.0 * precision.trace() + kr.norm_squared())
}

/// Prequential Hyvarinen score: the sum over `i` of the score of `data[i]`
/// under the one-step predictive built from `data[..i]`.
pub fn prequential_score<D, F>(mut predictive_at_step: F, data: &[Vec<f64>]) -> Result<f64>
where
    D: SmoothLogDensity,
    F: FnMut(usize, &[Vec<f64>]) -> Result<D>,
{
    if data.is_empty() {
        return Err(Error::InvalidParameters(
            "prequential score needs at least one observation".into(),
        ));
    }
    let mut total = 0.0;
    for (i, x) in data.iter().enumerate() {
        let step = predictive_at_step(i, &data[..i])
            .and_then(|d| hyvarinen_pointwise(&d, x))
            .map_err(|e| Error::AtStep {
                index: i,
                source: Box::new(e),
            })?;
        total += step;
    }
    Ok(total)
}

/// Central finite-difference gradient and Laplacian of `log_density` at `x`.
pub fn fd_gradient_laplacian<F>(log_density: F, x: &[f64], h: f64) -> Result<(Vec<f64>, f64)>
where
    F: Fn(&[f64]) -> f64,
{
    if !(h > 0.0) {
        return Err(Error::InvalidParameters(format!(
            "step must be positive, got {h}"
        )));
    }
    let centre = log_density(x);
    let mut point = x.to_vec();
    let mut grad = Vec::with_capacity(x.len());
    let mut lap = 0.0;
    for i in 0..x.len() {
        point[i] = x[i] + h;
        let up = log_density(&point);
        point[i] = x[i] - h;
        let down = log_density(&point);
        point[i] = x[i];
        if !(up.is_finite() && down.is_finite() && centre.is_finite()) {
            return Err(Error::InvalidParameters(format!(
                "log-density not finite near coordinate {i} of {x:?}"
            )));
        }
        grad.push((up - down) / (2.0 * h));
        lap += (up - 2.0 * centre + down) / (h * h);
    }
    Ok((grad, lap))
}

/// Checks `x` is at least `2h` inside `support` before differencing.
pub fn fd_margin_ok(support: Support, x: &[f64], h: f64) -> bool {
    support.contains_with_margin(x, 2.0 * h)
}

fn check_square(m: &DMatrix<f64>, dim: usize) -> Result<()> {
    if m.nrows() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: m.nrows(),
        });
    }
    if m.ncols() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: m.ncols(),
        });
    }
    Ok(())
}
