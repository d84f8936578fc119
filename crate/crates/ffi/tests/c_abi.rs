use std::ffi::CStr;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use nalgebra::{DMatrix, DVector};
use score_select::linear::{log_marginal_likelihood, multivariate_score, LinearModelSpec, Prior};
use score_select::univariate::{
    log_marginal, prequential_hyvarinen, ConjugateFamily, GammaKnownShape,
};
use score_select_ffi::*;

const X: [f64; 8] = [1.0, 0.3, 1.0, -1.2, 1.0, 0.8, 1.0, 2.0];
const Y: [f64; 4] = [0.9, -0.4, 1.3, 2.2];

fn last_error() -> String {
    let p = ss_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn spec(prior: Prior) -> LinearModelSpec {
    LinearModelSpec::new(DMatrix::from_row_slice(4, 2, &X), 2.0, prior).unwrap()
}

#[test]
fn linear_handle_matches_library() {
    unsafe {
        let mut m: *mut SsLinearModel = ptr::null_mut();
        assert_eq!(
            ss_linear_model_new_isotropic(X.as_ptr(), 4, 2, 2.0, 10.0, &mut m),
            SsStatus::Ok
        );
        assert!(ss_last_error_message().is_null());
        let mut h = 0.0;
        let mut lm = 0.0;
        assert_eq!(
            ss_linear_model_score(m, Y.as_ptr(), 4, &mut h),
            SsStatus::Ok
        );
        assert_eq!(
            ss_linear_model_log_marginal(m, Y.as_ptr(), 4, &mut lm),
            SsStatus::Ok
        );
        let s = spec(Prior::isotropic(2, 10.0, 2.0));
        let y = DVector::from_column_slice(&Y);
        assert_eq!(h, multivariate_score(&s, &y).unwrap());
        assert_eq!(lm, log_marginal_likelihood(&s, &y).unwrap());
        ss_linear_model_free(m);
    }
}

#[test]
fn explicit_prior_equals_isotropic() {
    let mean = [0.0, 0.0];
    let cov = [20.0, 0.0, 0.0, 20.0];
    unsafe {
        let mut a: *mut SsLinearModel = ptr::null_mut();
        let mut b: *mut SsLinearModel = ptr::null_mut();
        assert_eq!(
            ss_linear_model_new(X.as_ptr(), 4, 2, 2.0, mean.as_ptr(), cov.as_ptr(), &mut a),
            SsStatus::Ok
        );
        assert_eq!(
            ss_linear_model_new_isotropic(X.as_ptr(), 4, 2, 2.0, 10.0, &mut b),
            SsStatus::Ok
        );
        let (mut ha, mut hb) = (0.0, 0.0);
        ss_linear_model_prequential_score(a, Y.as_ptr(), 4, &mut ha);
        ss_linear_model_prequential_score(b, Y.as_ptr(), 4, &mut hb);
        assert_eq!(ha, hb);
        ss_linear_model_free(a);
        ss_linear_model_free(b);
    }
}

#[test]
fn improper_prior_has_no_marginal() {
    unsafe {
        let mut m: *mut SsLinearModel = ptr::null_mut();
        assert_eq!(
            ss_linear_model_new(X.as_ptr(), 4, 2, 2.0, ptr::null(), ptr::null(), &mut m),
            SsStatus::Ok
        );
        let mut h = f64::NAN;
        assert_eq!(
            ss_linear_model_score(m, Y.as_ptr(), 4, &mut h),
            SsStatus::Ok
        );
        assert_eq!(
            h,
            multivariate_score(&spec(Prior::ImproperFlat), &DVector::from_column_slice(&Y))
                .unwrap()
        );
        let mut lm = 0.0;
        assert_eq!(
            ss_linear_model_log_marginal(m, Y.as_ptr(), 4, &mut lm),
            SsStatus::ImproperPrior
        );
        assert!(last_error().contains("improper"), "{}", last_error());
        ss_linear_model_free(m);
    }
}

#[test]
fn argument_errors() {
    unsafe {
        let mut m: *mut SsLinearModel = ptr::null_mut();
        assert_eq!(
            ss_linear_model_new(ptr::null(), 4, 2, 2.0, ptr::null(), ptr::null(), &mut m),
            SsStatus::NullPointer
        );
        assert!(m.is_null());
        let mean = [0.0, 0.0];
        assert_eq!(
            ss_linear_model_new(X.as_ptr(), 4, 2, 2.0, mean.as_ptr(), ptr::null(), &mut m),
            SsStatus::InvalidArgument
        );
        let bad_cov = [1.0, 2.0, 2.0, 1.0];
        assert_eq!(
            ss_linear_model_new(
                X.as_ptr(),
                4,
                2,
                2.0,
                mean.as_ptr(),
                bad_cov.as_ptr(),
                &mut m
            ),
            SsStatus::NonSpdPrior
        );
        let collinear = [1.0, 2.0, 1.0, 2.0, 1.0, 2.0];
        assert_eq!(
            ss_linear_model_new(
                collinear.as_ptr(),
                3,
                2,
                1.0,
                ptr::null(),
                ptr::null(),
                &mut m
            ),
            SsStatus::RankDeficient
        );
        assert_eq!(
            ss_linear_model_new_isotropic(X.as_ptr(), 4, 2, 2.0, -1.0, &mut m),
            SsStatus::InvalidArgument
        );
        assert_eq!(
            ss_linear_model_new_isotropic(X.as_ptr(), 4, 2, 2.0, 1.0, ptr::null_mut()),
            SsStatus::NullPointer
        );
        let mut out = 0.0;
        assert_eq!(
            ss_linear_model_score(ptr::null(), Y.as_ptr(), 4, &mut out),
            SsStatus::NullPointer
        );
        assert!(last_error().contains("model"));

        assert_eq!(
            ss_linear_model_new_isotropic(X.as_ptr(), 4, 2, 2.0, 1.0, &mut m),
            SsStatus::Ok
        );
        assert_eq!(
            ss_linear_model_score(m, Y.as_ptr(), 3, &mut out),
            SsStatus::DimensionMismatch
        );
        ss_linear_model_free(m);
        ss_linear_model_free(ptr::null_mut());
    }
}

#[test]
fn gaussian_score() {
    let mean = [0.5, -1.0];
    let prec = [2.0, 0.5, 0.5, 1.0];
    let x = [1.0, 0.0];
    let mut out = 0.0;
    unsafe {
        assert_eq!(
            ss_hyvarinen_gaussian(mean.as_ptr(), prec.as_ptr(), x.as_ptr(), 2, &mut out),
            SsStatus::Ok
        );
    }
    // K(x - mu) = (1.5, 1.25)
    assert!((out - (-6.0 + 1.5f64.powi(2) + 1.25f64.powi(2))).abs() < 1e-12);
}

#[test]
fn family_handles() {
    let data = [0.7, 2.3, 1.1, 3.4];
    unsafe {
        let mut g: *mut SsFamily = ptr::null_mut();
        assert_eq!(ss_family_new_gamma(2.0, 1.0, 1.0, &mut g), SsStatus::Ok);
        let (mut h, mut lm) = (0.0, 0.0);
        assert_eq!(
            ss_family_prequential_hyvarinen(g, data.as_ptr(), 4, &mut h),
            SsStatus::Ok
        );
        assert_eq!(
            ss_family_log_marginal(g, data.as_ptr(), 4, &mut lm),
            SsStatus::Ok
        );
        let fam = ConjugateFamily::GammaKnownShape(GammaKnownShape::new(2.0, 1.0, 1.0).unwrap());
        assert_eq!(h, prequential_hyvarinen(&fam, &data).unwrap());
        assert_eq!(lm, log_marginal(&fam, &data).unwrap());
        ss_family_free(g);

        let mut p: *mut SsFamily = ptr::null_mut();
        assert_eq!(ss_family_new_pareto(1.0, 1.0, 1.0, &mut p), SsStatus::Ok);
        assert_eq!(
            ss_family_prequential_hyvarinen(p, data.as_ptr(), 4, &mut h),
            SsStatus::OutOfSupport
        );
        assert!(last_error().contains("0.7"), "{}", last_error());
        ss_family_free(p);

        let mut n: *mut SsFamily = ptr::null_mut();
        assert_eq!(
            ss_family_new_normal(-1.0, 0.0, 1.0, &mut n),
            SsStatus::InvalidArgument
        );
        assert!(n.is_null());
        assert_eq!(ss_family_new_normal(1.0, 0.0, 1.0, &mut n), SsStatus::Ok);
        assert_eq!(
            ss_family_log_marginal(n, data.as_ptr(), 4, &mut lm),
            SsStatus::Ok
        );
        assert!(lm.is_finite());
        ss_family_free(n);
    }
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(ss_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

fn header() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("include/score_select.h")
}

#[test]
fn header_declares_the_api() {
    let h = std::fs::read_to_string(header()).unwrap();
    for name in [
        "typedef struct SsLinearModel SsLinearModel;",
        "typedef struct SsFamily SsFamily;",
        "SS_STATUS_IMPROPER_PRIOR = 5",
        "ss_linear_model_new(",
        "ss_linear_model_new_isotropic(",
        "ss_linear_model_free(",
        "ss_linear_model_score(",
        "ss_linear_model_log_marginal(",
        "ss_linear_model_prequential_score(",
        "ss_hyvarinen_gaussian(",
        "ss_family_new_normal(",
        "ss_family_new_gamma(",
        "ss_family_new_pareto(",
        "ss_family_free(",
        "ss_family_prequential_hyvarinen(",
        "ss_family_log_marginal(",
        "ss_last_error_message(",
        "ss_version(",
    ] {
        assert!(h.contains(name), "header lacks {name}");
    }
}

const C_PROGRAM: &str = r#"
#include <stdio.h>
#include <string.h>
#include "score_select.h"

int main(void) {
    const double x[8] = {1.0, 0.3, 1.0, -1.2, 1.0, 0.8, 1.0, 2.0};
    const double y[4] = {0.9, -0.4, 1.3, 2.2};
    SsLinearModel *m = NULL;
    double h = 0.0, lm = 0.0;
    if (ss_linear_model_new(x, 4, 2, 2.0, NULL, NULL, &m) != SS_STATUS_OK) return 10;
    if (ss_linear_model_score(m, y, 4, &h) != SS_STATUS_OK) return 11;
    if (ss_linear_model_log_marginal(m, y, 4, &lm) != SS_STATUS_IMPROPER_PRIOR) return 12;
    if (ss_last_error_message() == NULL) return 13;
    ss_linear_model_free(m);
    printf("%.17g\n", h);
    return 0;
}
"#;

/// Compiles and runs a C program against the generated header and the
/// static library. Skipped when no C compiler is installed.
#[test]
fn c_program_links_and_runs() {
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".to_string());
    if Command::new(&cc).arg("--version").output().is_err() {
        eprintln!("skipping: no C compiler");
        return;
    }
    // target/<profile>/deps/<test binary>
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().and_then(Path::parent).unwrap();
    let lib = profile_dir.join("libscore_select_ffi.a");
    if !lib.exists() {
        eprintln!("skipping: {} not built", lib.display());
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    let bin = dir.path().join("main");
    std::fs::write(&src, C_PROGRAM).unwrap();
    let status = Command::new(&cc)
        .args(["-std=c99", "-Wall", "-Werror", "-I"])
        .arg(header().parent().unwrap())
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success(), "C build failed");
    let out = Command::new(&bin).output().unwrap();
    assert!(
        out.status.success(),
        "C program exit {:?}",
        out.status.code()
    );
    let h: f64 = String::from_utf8(out.stdout)
        .unwrap()
        .trim()
        .parse()
        .unwrap();
    let expected =
        multivariate_score(&spec(Prior::ImproperFlat), &DVector::from_column_slice(&Y)).unwrap();
    assert_eq!(h, expected);
}
