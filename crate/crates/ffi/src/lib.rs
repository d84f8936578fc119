//! C ABI over `score_select`.
//!
//! Every fallible function returns an [`SsStatus`] and writes its result
//! through an out-pointer. On failure a message is available from
//! [`ss_last_error_message`] on the same thread. Handles are opaque and must
//! be released with the matching `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use nalgebra::{DMatrix, DVector};
use score_select::linear::{
    log_marginal_likelihood, multivariate_score, prequential_score_linear, LinearModelSpec, Prior,
};
use score_select::scoring::hyvarinen_gaussian;
use score_select::univariate::{
    log_marginal, prequential_hyvarinen, ConjugateFamily, GammaKnownShape, NormalKnownVar,
    ParetoKnownScale,
};
use score_select::Error;

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    OutOfSupport = 4,
    ImproperPrior = 5,
    RankDeficient = 6,
    NonSpdPrior = 7,
    InsufficientBurnIn = 8,
    NotApplicable = 9,
    Internal = 10,
}

/// Gaussian linear model with known noise variance and its prior.
pub struct SsLinearModel {
    spec: LinearModelSpec,
}

/// One-parameter conjugate family (Normal, Gamma or Pareto).
pub struct SsFamily {
    family: ConjugateFamily,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_last_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(e: &Error) -> SsStatus {
    match e.root() {
        Error::PointOutsideSupport { .. } | Error::OutOfSupport { .. } => SsStatus::OutOfSupport,
        Error::NonSmoothDensity(_) | Error::DiscreteSupport(_) => SsStatus::NotApplicable,
        Error::DimensionMismatch { .. } => SsStatus::DimensionMismatch,
        Error::NonSPDPrior => SsStatus::NonSpdPrior,
        Error::RankDeficientDesign { .. } => SsStatus::RankDeficient,
        Error::ImproperPriorHasNoMarginalMass => SsStatus::ImproperPrior,
        Error::InsufficientBurnIn { .. } => SsStatus::InsufficientBurnIn,
        Error::InvalidParameters(_) | Error::EmptyCandidates => SsStatus::InvalidArgument,
        _ => SsStatus::Internal,
    }
}

struct Fail(SsStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(SsStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, records any failure and converts panics to `Internal`.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> SsStatus {
    clear_last_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SsStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic".to_string());
            SsStatus::Internal
        }
    }
}

/// # Safety
/// `ptr` must be null or valid for `len` reads.
unsafe fn slice<'a>(ptr: *const f64, len: usize, what: &str) -> Result<&'a [f64], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if ptr.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(ptr, len))
}

/// # Safety
/// `out` must be null or valid for one write.
unsafe fn write<T>(out: *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("out"));
    }
    out.write(value);
    Ok(())
}

/// # Safety
/// `design` must hold `n * p` row-major values.
unsafe fn design_matrix(design: *const f64, n: usize, p: usize) -> Result<DMatrix<f64>, Fail> {
    let len = n
        .checked_mul(p)
        .ok_or_else(|| Fail(SsStatus::InvalidArgument, "n * p overflows".into()))?;
    Ok(DMatrix::from_row_slice(n, p, slice(design, len, "design")?))
}

fn model_out(spec: LinearModelSpec) -> *mut SsLinearModel {
    Box::into_raw(Box::new(SsLinearModel { spec }))
}

/// Linear model `y ~ N(X theta, sigma2 I)`. `design` is `n x p`, row-major.
///
/// With `prior_mean` and `prior_cov` (`p` and `p x p` row-major) the prior is
/// `N(prior_mean, prior_cov)`. With both null the prior is flat (improper).
///
/// # Safety
/// Pointers must be valid for the stated lengths; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ss_linear_model_new(
    design: *const f64,
    n: usize,
    p: usize,
    sigma2: f64,
    prior_mean: *const f64,
    prior_cov: *const f64,
    out: *mut *mut SsLinearModel,
) -> SsStatus {
    guard(|| {
        let x = design_matrix(design, n, p)?;
        let prior = match (prior_mean.is_null(), prior_cov.is_null()) {
            (true, true) => Prior::ImproperFlat,
            (false, false) => Prior::ProperGaussian {
                mean: DVector::from_column_slice(slice(prior_mean, p, "prior_mean")?),
                cov: DMatrix::from_row_slice(p, p, slice(prior_cov, p * p, "prior_cov")?),
            },
            _ => {
                return Err(Fail(
                    SsStatus::InvalidArgument,
                    "prior_mean and prior_cov must both be set or both be null".into(),
                ))
            }
        };
        let spec = LinearModelSpec::new(x, sigma2, prior)?;
        write(out, model_out(spec))
    })
}

/// Linear model with the isotropic prior `N(0, c * sigma2 * I)`.
///
/// # Safety
/// `design` must hold `n * p` values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ss_linear_model_new_isotropic(
    design: *const f64,
    n: usize,
    p: usize,
    sigma2: f64,
    c: f64,
    out: *mut *mut SsLinearModel,
) -> SsStatus {
    guard(|| {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Fail(
                SsStatus::InvalidArgument,
                format!("c must be positive, got {c}"),
            ));
        }
        let x = design_matrix(design, n, p)?;
        let spec = LinearModelSpec::new(x, sigma2, Prior::isotropic(p, c, sigma2))?;
        write(out, model_out(spec))
    })
}

/// # Safety
/// `model` must be null or a handle from `ss_linear_model_new*` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ss_linear_model_free(model: *mut SsLinearModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// # Safety
/// `model` must be a live handle; `y` must hold `n` values.
unsafe fn with_model(
    model: *const SsLinearModel,
    y: *const f64,
    n: usize,
    out: *mut f64,
    f: impl FnOnce(&LinearModelSpec, &DVector<f64>) -> score_select::Result<f64>,
) -> SsStatus {
    guard(|| {
        let m = model.as_ref().ok_or_else(|| null("model"))?;
        let y = DVector::from_column_slice(slice(y, n, "y")?);
        write(out, f(&m.spec, &y)?)
    })
}

/// Multivariate Hyvarinen score of the marginal at `y` (lower is better).
///
/// # Safety
/// `model` must be a live handle; `y` must hold `n` values; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ss_linear_model_score(
    model: *const SsLinearModel,
    y: *const f64,
    n: usize,
    out: *mut f64,
) -> SsStatus {
    with_model(model, y, n, out, multivariate_score)
}

/// Log marginal likelihood. Fails with `ImproperPrior` for a flat prior.
///
/// # Safety
/// As for [`ss_linear_model_score`].
#[no_mangle]
pub unsafe extern "C" fn ss_linear_model_log_marginal(
    model: *const SsLinearModel,
    y: *const f64,
    n: usize,
    out: *mut f64,
) -> SsStatus {
    with_model(model, y, n, out, log_marginal_likelihood)
}

/// Prequential Hyvarinen score; a flat prior starts after `p` observations.
///
/// # Safety
/// As for [`ss_linear_model_score`].
#[no_mangle]
pub unsafe extern "C" fn ss_linear_model_prequential_score(
    model: *const SsLinearModel,
    y: *const f64,
    n: usize,
    out: *mut f64,
) -> SsStatus {
    with_model(model, y, n, out, prequential_score_linear)
}

/// Hyvarinen score of `N(mean, precision^-1)` at `x`, all of dimension `d`.
/// `precision` is `d x d`, row-major, and may be singular.
///
/// # Safety
/// Pointers must be valid for the stated lengths; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ss_hyvarinen_gaussian(
    mean: *const f64,
    precision: *const f64,
    x: *const f64,
    d: usize,
    out: *mut f64,
) -> SsStatus {
    guard(|| {
        let mean = DVector::from_column_slice(slice(mean, d, "mean")?);
        let prec = DMatrix::from_row_slice(d, d, slice(precision, d * d, "precision")?);
        let x = DVector::from_column_slice(slice(x, d, "x")?);
        write(out, hyvarinen_gaussian(&mean, &prec, &x)?)
    })
}

fn family_out(out: *mut *mut SsFamily, family: score_select::Result<ConjugateFamily>) -> SsStatus {
    guard(|| {
        let family = family?;
        // SAFETY: `write` checks for null; callers promise writability.
        unsafe { write(out, Box::into_raw(Box::new(SsFamily { family }))) }
    })
}

/// Normal likelihood with known variance `sigma2`, prior `N(prior_mean, prior_var)`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ss_family_new_normal(
    sigma2: f64,
    prior_mean: f64,
    prior_var: f64,
    out: *mut *mut SsFamily,
) -> SsStatus {
    family_out(
        out,
        NormalKnownVar::new(sigma2, prior_mean, prior_var).map(ConjugateFamily::NormalKnownVar),
    )
}

/// Gamma likelihood with known shape `alpha`, `Gamma(a, b)` prior on the rate.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ss_family_new_gamma(
    alpha: f64,
    a: f64,
    b: f64,
    out: *mut *mut SsFamily,
) -> SsStatus {
    family_out(
        out,
        GammaKnownShape::new(alpha, a, b).map(ConjugateFamily::GammaKnownShape),
    )
}

/// Pareto likelihood with known `x_min`, `Gamma(a, b)` prior on the shape.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ss_family_new_pareto(
    x_min: f64,
    a: f64,
    b: f64,
    out: *mut *mut SsFamily,
) -> SsStatus {
    family_out(
        out,
        ParetoKnownScale::new(x_min, a, b).map(ConjugateFamily::ParetoKnownScale),
    )
}

/// # Safety
/// `family` must be null or a handle from `ss_family_new_*` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ss_family_free(family: *mut SsFamily) {
    if !family.is_null() {
        drop(Box::from_raw(family));
    }
}

/// # Safety
/// `family` must be a live handle; `data` must hold `n` values.
unsafe fn with_family(
    family: *const SsFamily,
    data: *const f64,
    n: usize,
    out: *mut f64,
    f: impl FnOnce(&ConjugateFamily, &[f64]) -> score_select::Result<f64>,
) -> SsStatus {
    guard(|| {
        let fam = family.as_ref().ok_or_else(|| null("family"))?;
        let data = slice(data, n, "data")?;
        write(out, f(&fam.family, data)?)
    })
}

/// Prequential Hyvarinen score of the data in the given order. Fails with
/// `OutOfSupport` if any point lies outside the family's support.
///
/// # Safety
/// `family` must be a live handle; `data` must hold `n` values; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ss_family_prequential_hyvarinen(
    family: *const SsFamily,
    data: *const f64,
    n: usize,
    out: *mut f64,
) -> SsStatus {
    with_family(family, data, n, out, prequential_hyvarinen)
}

/// Log marginal likelihood of the data.
///
/// # Safety
/// As for [`ss_family_prequential_hyvarinen`].
#[no_mangle]
pub unsafe extern "C" fn ss_family_log_marginal(
    family: *const SsFamily,
    data: *const f64,
    n: usize,
    out: *mut f64,
) -> SsStatus {
    with_family(family, data, n, out, log_marginal)
}

/// Message of the last failure on this thread, or null. The pointer stays
/// valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn ss_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ss_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
