//! Acceptance suite. Runs every criterion at its stated tolerance, prints one
//! PASS/FAIL line per criterion and exits non-zero if any fails.
//!
//! Oracles here are computed independently of the library routes they check:
//! dense Cholesky for marginals, hand-rolled central differences, explicit
//! residual sums of squares.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use nalgebra::{Cholesky, DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use score_select::harness::trajectory::mean_by_n;
use score_select::harness::univariate_study::accuracy;
use score_select::harness::{
    estimate_slope_ratio, run_fig1, run_trajectory, run_univariate_study, ExperimentConfig,
    PriorMode, Scenario, SelectionCriterion, TrajectoryRow,
};
use score_select::linear::{
    log_marginal_likelihood, marginal_improper, marginal_proper, multivariate_score,
    one_step_predictives, LinearModelSpec, Prior,
};
use score_select::sampling::Distribution;
use score_select::scoring::{
    hyvarinen_pointwise, ClosureDensity, GaussianDensity, LaplaceDensity, Shifted,
    SmoothLogDensity, Support,
};
use score_select::univariate::{
    applicability_check, log_marginal, posterior_update, predictive, ConjugateFamily,
    GammaKnownShape, NormalKnownVar, ParetoKnownScale,
};
use score_select::Error;

const FD_H: f64 = 1e-4;

type Outcome = Result<String, String>;

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

fn rand_vec(rng: &mut ChaCha8Rng, d: usize) -> DVector<f64> {
    DVector::from_fn(d, |_, _| normal(rng))
}

fn rand_mat(rng: &mut ChaCha8Rng, r: usize, c: usize) -> DMatrix<f64> {
    DMatrix::from_fn(r, c, |_, _| normal(rng))
}

fn rand_spd(rng: &mut ChaCha8Rng, d: usize) -> DMatrix<f64> {
    let a = rand_mat(rng, d, d);
    &a * a.transpose() + DMatrix::identity(d, d) * 0.5
}

/// Relative error with unit floor on the reference magnitude.
fn rel(a: f64, reference: f64) -> f64 {
    (a - reference).abs() / reference.abs().max(1.0)
}

fn central_diff(f: &dyn Fn(&[f64]) -> f64, x: &[f64]) -> (Vec<f64>, f64) {
    let f0 = f(x);
    let mut g = vec![0.0; x.len()];
    let mut lap = 0.0;
    for i in 0..x.len() {
        let mut up = x.to_vec();
        let mut dn = x.to_vec();
        up[i] += FD_H;
        dn[i] -= FD_H;
        let (fu, fd) = (f(&up), f(&dn));
        g[i] = (fu - fd) / (2.0 * FD_H);
        lap += (fu - 2.0 * f0 + fd) / (FD_H * FD_H);
    }
    (g, lap)
}

fn dense_cov(x: &DMatrix<f64>, v: &DMatrix<f64>, s2: f64) -> DMatrix<f64> {
    DMatrix::identity(x.nrows(), x.nrows()) * s2 + x * v * x.transpose()
}

fn dense_log_normal(y: &DVector<f64>, mean: &DVector<f64>, cov: &DMatrix<f64>) -> f64 {
    let n = y.len() as f64;
    let chol = Cholesky::new(cov.clone()).expect("spd");
    let logdet = 2.0 * chol.l().diagonal().iter().map(|d| d.ln()).sum::<f64>();
    let r = y - mean;
    -0.5 * (n * (2.0 * std::f64::consts::PI).ln() + logdet + r.dot(&chol.solve(&r)))
}

fn within(elapsed: Duration, budget: Duration) -> Result<(), String> {
    if elapsed <= budget {
        Ok(())
    } else {
        Err(format!("runtime {elapsed:.2?} exceeds {budget:?}"))
    }
}

fn random_family(rng: &mut ChaCha8Rng, which: usize) -> ConjugateFamily {
    match which {
        0 => ConjugateFamily::NormalKnownVar(
            NormalKnownVar::new(
                rng.random_range(0.3..3.0),
                normal(rng),
                rng.random_range(0.3..3.0),
            )
            .unwrap(),
        ),
        1 => ConjugateFamily::GammaKnownShape(
            GammaKnownShape::new(
                rng.random_range(0.5..4.0),
                rng.random_range(1.0..5.0),
                rng.random_range(0.5..3.0),
            )
            .unwrap(),
        ),
        _ => ConjugateFamily::ParetoKnownScale(
            ParetoKnownScale::new(
                rng.random_range(0.5..2.0),
                rng.random_range(1.0..5.0),
                rng.random_range(0.5..3.0),
            )
            .unwrap(),
        ),
    }
}

fn interior(rng: &mut ChaCha8Rng, f: &ConjugateFamily) -> f64 {
    match f {
        ConjugateFamily::NormalKnownVar(_) => 2.0 * normal(rng),
        ConjugateFamily::GammaKnownShape(_) => rng.random_range(0.2..5.0),
        ConjugateFamily::ParetoKnownScale(p) => p.x_min + rng.random_range(0.05..4.0),
    }
}

fn c1_constant_invariance() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut checked = 0;
    for k in 0..100 {
        let shift = 1e3 * normal(&mut rng);
        let (a, b) = match k % 3 {
            0 => {
                let d = 1 + k % 5;
                let g = GaussianDensity::new(rand_vec(&mut rng, d), rand_spd(&mut rng, d)).unwrap();
                let x = rand_vec(&mut rng, d);
                let s = Shifted { inner: &g, shift };
                (
                    hyvarinen_pointwise(&g, x.as_slice()),
                    hyvarinen_pointwise(&s, x.as_slice()),
                )
            }
            1 => {
                let f = random_family(&mut rng, k % 3 + (k / 3) % 3);
                let p = predictive(&f);
                let x = [interior(&mut rng, &f)];
                let s = Shifted { inner: &p, shift };
                (hyvarinen_pointwise(&p, &x), hyvarinen_pointwise(&s, &x))
            }
            _ => {
                // quartic log density -x^4 / 4 + a x
                let a: f64 = normal(&mut rng);
                let dens = ClosureDensity {
                    dim: 1,
                    support: Support::Full,
                    log_density: move |x: &[f64]| -x[0].powi(4) / 4.0 + a * x[0],
                    gradient: move |x: &[f64]| vec![-x[0].powi(3) + a],
                    laplacian: |x: &[f64]| -3.0 * x[0] * x[0],
                };
                let x = [normal(&mut rng)];
                let s = Shifted {
                    inner: &dens,
                    shift,
                };
                (hyvarinen_pointwise(&dens, &x), hyvarinen_pointwise(&s, &x))
            }
        };
        let (a, b) = (a.map_err(|e| e.to_string())?, b.map_err(|e| e.to_string())?);
        if a.to_bits() != b.to_bits() {
            return Err(format!("instance {k}: {a} vs {b}"));
        }
        checked += 1;
    }
    within(start.elapsed(), Duration::from_secs(1))?;
    Ok(format!(
        "{checked} instances bit-identical in {:.2?}",
        start.elapsed()
    ))
}

fn c2_fd_oracles() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let mut worst = 0.0f64;
    let mut count = 0;
    let mut record = |e: f64, what: &str| -> Result<(), String> {
        count += 1;
        worst = worst.max(e);
        if e.is_nan() || e > 1e-5 {
            Err(format!("{what}: relative error {e:e}"))
        } else {
            Ok(())
        }
    };
    for which in 0..3 {
        let f = random_family(&mut rng, which);
        let p = predictive(&f);
        for _ in 0..10 {
            let x = [interior(&mut rng, &f)];
            let (g, lap) = central_diff(&|z| p.log_density(z), &x);
            record(rel(p.gradient(&x)[0], g[0]), f.name())?;
            record(rel(p.laplacian(&x), lap), f.name())?;
        }
    }
    // Gaussian marginals of linear models, log density from a dense covariance
    for k in 0..10 {
        let n = 2 + k % 5;
        let p = 1 + k % 3;
        let x = rand_mat(&mut rng, n, p);
        let s2 = rng.random_range(0.5..3.0);
        let v = rand_spd(&mut rng, p);
        let spec = LinearModelSpec::new(
            x.clone(),
            s2,
            Prior::ProperGaussian {
                mean: DVector::zeros(p),
                cov: v.clone(),
            },
        )
        .unwrap();
        let m = marginal_proper(&spec).unwrap();
        let dens = GaussianDensity::new(m.mean.clone(), m.precision.clone()).unwrap();
        let cov = dense_cov(&x, &v, s2);
        let zero = DVector::zeros(n);
        let y = rand_vec(&mut rng, n);
        let (g, lap) = central_diff(
            &|z| dense_log_normal(&DVector::from_column_slice(z), &zero, &cov),
            y.as_slice(),
        );
        for (a, b) in dens.gradient(y.as_slice()).iter().zip(&g) {
            record(rel(*a, *b), "marginal gradient")?;
        }
        record(rel(dens.laplacian(y.as_slice()), lap), "marginal laplacian")?;
    }
    within(start.elapsed(), Duration::from_secs(5))?;
    Ok(format!(
        "{count} comparisons, worst relative error {worst:.2e} (tol 1e-5)"
    ))
}

fn c3_woodbury() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let mut worst = 0.0f64;
    for k in 0..50 {
        let n = rng.random_range(1..=20);
        let p = rng.random_range(1..=6);
        let x = rand_mat(&mut rng, n, p);
        let v = rand_spd(&mut rng, p);
        let mean = rand_vec(&mut rng, p);
        let s2 = rng.random_range(0.2..5.0);
        let y = rand_vec(&mut rng, n);
        let cov = dense_cov(&x, &v, s2);
        let chol = Cholesky::new(cov.clone()).unwrap();
        let inv = chol.inverse();
        let logdet = 2.0 * chol.l().diagonal().iter().map(|d| d.ln()).sum::<f64>();
        let spec = LinearModelSpec::new(
            x.clone(),
            s2,
            Prior::ProperGaussian {
                mean: mean.clone(),
                cov: v,
            },
        )
        .unwrap();
        let m = marginal_proper(&spec).unwrap();
        let errs = [
            (&m.precision - &inv).norm() / inv.norm(),
            rel(m.log_det_cov.unwrap(), logdet),
            rel(
                log_marginal_likelihood(&spec, &y).unwrap(),
                dense_log_normal(&y, &(&x * &mean), &cov),
            ),
            rel(
                multivariate_score(&spec, &y).unwrap(),
                -2.0 * inv.trace() + (&inv * (&y - &x * &mean)).norm_squared(),
            ),
        ];
        for e in errs {
            worst = worst.max(e);
            if !(e < 1e-8) {
                return Err(format!("instance {k} (n={n}, p={p}): relative error {e:e}"));
            }
        }
    }
    within(start.elapsed(), Duration::from_secs(5))?;
    Ok(format!(
        "50 instances, worst relative error {worst:.2e} (tol 1e-8)"
    ))
}

fn c4_improper_limit() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let mut worst = 0.0f64;
    for k in 0..20 {
        let p = rng.random_range(1..=5);
        let n = p + rng.random_range(1..=15);
        let x = rand_mat(&mut rng, n, p);
        let y = rand_vec(&mut rng, n);
        let s2 = rng.random_range(0.5..4.0);
        let proper = LinearModelSpec::new(x.clone(), s2, Prior::isotropic(p, 1e12, s2)).unwrap();
        let h_proper = multivariate_score(&proper, &y).unwrap();
        // closed form -2 (n - p) / s2 + RSS / s2^2, RSS from the normal equations
        let beta = (x.transpose() * &x)
            .cholesky()
            .unwrap()
            .solve(&(x.transpose() * &y));
        let rss = (&y - &x * beta).norm_squared();
        let closed = -2.0 * (n - p) as f64 / s2 + rss / (s2 * s2);
        let flat = LinearModelSpec::new(x, s2, Prior::ImproperFlat).unwrap();
        let h_flat = multivariate_score(&flat, &y).unwrap();
        for e in [rel(h_proper, closed), rel(h_flat, closed)] {
            worst = worst.max(e);
            if !(e < 1e-3) {
                return Err(format!("instance {k}: relative error {e:e}"));
            }
        }
    }
    let x = rand_mat(&mut rng, 4, 4);
    let y = rand_vec(&mut rng, 4);
    let square = LinearModelSpec::new(x, 2.0, Prior::ImproperFlat).unwrap();
    let h = multivariate_score(&square, &y).unwrap();
    if h != 0.0 {
        return Err(format!("n = p score is {h}, expected exactly 0"));
    }
    let m = marginal_improper(&square).unwrap();
    if m.precision.iter().any(|&v| v != 0.0) {
        return Err("n = p marginal precision is not exactly zero".into());
    }
    within(start.elapsed(), Duration::from_secs(5))?;
    Ok(format!(
        "20 instances, worst relative error {worst:.2e} (tol 1e-3); n = p gives exactly 0"
    ))
}

fn c5_chain_rule() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let mut worst = 0.0f64;
    for k in 0..10 {
        let p = rng.random_range(1..=4);
        let n = rng.random_range(1..=20);
        let x = rand_mat(&mut rng, n, p);
        let y = rand_vec(&mut rng, n);
        let s2 = rng.random_range(0.5..4.0);
        let v = rand_spd(&mut rng, p);
        let spec = LinearModelSpec::new(
            x.clone(),
            s2,
            Prior::ProperGaussian {
                mean: DVector::zeros(p),
                cov: v.clone(),
            },
        )
        .unwrap();
        let sum: f64 = one_step_predictives(&spec, &y, 0)
            .unwrap()
            .iter()
            .map(|s| {
                let r = y[s.index] - s.mean;
                -0.5 * ((2.0 * std::f64::consts::PI * s.var).ln() + r * r / s.var)
            })
            .sum();
        let closed = dense_log_normal(&y, &DVector::zeros(n), &dense_cov(&x, &v, s2));
        let e = rel(sum, closed);
        worst = worst.max(e);
        if !(e < 1e-8) {
            return Err(format!("linear instance {k}: relative error {e:e}"));
        }
    }
    for which in 0..3 {
        for k in 0..5 {
            let f = random_family(&mut rng, which);
            let data: Vec<f64> = (0..10).map(|_| interior(&mut rng, &f)).collect();
            let mut sum = 0.0;
            for i in 0..data.len() {
                let post = posterior_update(&f, &data[..i]).unwrap();
                sum += predictive(&post).log_density(&data[i..=i]);
            }
            let e = rel(sum, log_marginal(&f, &data).unwrap());
            worst = worst.max(e);
            if !(e < 1e-8) {
                return Err(format!("{} instance {k}: relative error {e:e}", f.name()));
            }
        }
    }
    within(start.elapsed(), Duration::from_secs(5))?;
    Ok(format!(
        "linear + normal/gamma/pareto, worst relative error {worst:.2e} (tol 1e-8)"
    ))
}

fn c6_fig1() -> Outcome {
    let start = Instant::now();
    let mut config = ExperimentConfig::default_for(Scenario::Fig1Boxplots);
    config.reps = 100;
    config.n = 100;
    config.sigma2 = 10.0;
    config.prior_mode = PriorMode::Improper;
    let table = run_fig1(&config).map_err(|e| e.to_string())?;
    let freqs: Vec<(String, f64)> = [0, 2, 4, 6]
        .iter()
        .map(|&m| (format!("M{}", m + 1), table.selection_frequency(m)))
        .collect();
    let text = freqs
        .iter()
        .map(|(m, f)| format!("{m}={f:.2}"))
        .collect::<Vec<_>>()
        .join(" ");
    within(start.elapsed(), Duration::from_secs(60))?;
    if freqs.iter().all(|(_, f)| *f >= 0.95) {
        Ok(format!("selection frequency {text} (min 0.95)"))
    } else {
        Err(format!("selection frequency {text} (min 0.95)"))
    }
}

fn trajectory_runs() -> Result<Vec<(Scenario, Vec<TrajectoryRow>)>, String> {
    [Scenario::Fig2NonNested, Scenario::Fig3Nested]
        .into_iter()
        .map(|s| {
            let mut config = ExperimentConfig::default_for(s);
            config.reps = 20;
            config.n = 1000;
            config.c_grid = vec![100.0];
            run_trajectory(&config)
                .map(|rows| (s, rows))
                .map_err(|e| e.to_string())
        })
        .collect()
}

fn c7_slope_ratio(runs: &[(Scenario, Vec<TrajectoryRow>)], elapsed: Duration) -> Outcome {
    within(elapsed, Duration::from_secs(300))?;
    let mut parts = Vec::new();
    let mut ok = true;
    for (s, rows) in runs {
        let r = estimate_slope_ratio(rows, 0.5).map_err(|e| e.to_string())?;
        ok &= (2.5..=6.0).contains(&r);
        parts.push(format!("{s}={r:.3}"));
    }
    let text = format!("slope ratio {} (range [2.5, 6])", parts.join(" "));
    if ok {
        Ok(text)
    } else {
        Err(text)
    }
}

fn c8_consistency(runs: &[(Scenario, Vec<TrajectoryRow>)]) -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for (s, rows) in runs {
        let means = mean_by_n(rows);
        let (bf, sd) = *means.get(&1000).ok_or("no n = 1000 rows")?;
        ok &= bf > 0.0 && sd > 0.0;
        parts.push(format!("{s}: log_bf={bf:.2} score_diff={sd:.2}"));
    }
    let text = format!("means at n=1000 {}", parts.join("; "));
    if ok {
        Ok(text)
    } else {
        Err(text)
    }
}

fn univariate(scenario: Scenario) -> Result<(f64, f64), String> {
    let mut config = ExperimentConfig::default_for(scenario);
    config.reps = 100;
    let rows = run_univariate_study(&config).map_err(|e| e.to_string())?;
    let truth = if scenario == Scenario::GammaVsNormal {
        "gamma"
    } else {
        "pareto"
    };
    let bf = accuracy(&rows, SelectionCriterion::BayesFactor, truth).ok_or("no rows")?;
    let h = accuracy(&rows, SelectionCriterion::Hyvarinen, truth).ok_or("no rows")?;
    Ok((bf, h))
}

fn c9_gamma() -> Outcome {
    let start = Instant::now();
    let (bf, h) = univariate(Scenario::GammaVsNormal)?;
    within(start.elapsed(), Duration::from_secs(60))?;
    let text = format!("truth gamma: BF accuracy {bf:.2}, Hyvarinen accuracy {h:.2} (min 0.8)");
    if bf >= 0.8 && h >= 0.8 {
        Ok(text)
    } else {
        Err(text)
    }
}

fn c10_pareto() -> Outcome {
    let start = Instant::now();
    let (bf, h) = univariate(Scenario::ParetoVsNormal)?;
    within(start.elapsed(), Duration::from_secs(60))?;
    let text = format!(
        "truth pareto: BF accuracy {bf:.2} (min 0.95), Hyvarinen accuracy {h:.2} (max BF - 0.2)"
    );
    if bf >= 0.95 && h <= bf - 0.2 {
        Ok(text)
    } else {
        Err(text)
    }
}

fn c11_inapplicability() -> Outcome {
    let start = Instant::now();
    let laplace = Distribution::Laplace {
        location: 0.0,
        scale: 1.0,
    };
    match applicability_check(&laplace) {
        Err(Error::NonSmoothDensity(_)) => {}
        other => return Err(format!("Laplace candidate gave {other:?}")),
    }
    let dens = LaplaceDensity {
        location: 0.0,
        scale: 1.0,
    };
    match hyvarinen_pointwise(&dens, &[0.7]) {
        Err(Error::NonSmoothDensity(_)) => {}
        other => return Err(format!("scoring a Laplace density gave {other:?}")),
    }
    match applicability_check(&Distribution::Poisson { rate: 3.0 }) {
        Err(Error::DiscreteSupport(_)) => {}
        other => return Err(format!("Poisson candidate gave {other:?}")),
    }
    let x = DMatrix::from_row_slice(3, 1, &[1.0, 2.0, 3.0]);
    let spec = LinearModelSpec::new(x, 1.0, Prior::ImproperFlat).unwrap();
    let y = DVector::from_vec(vec![0.1, 0.2, 0.4]);
    match log_marginal_likelihood(&spec, &y) {
        Err(Error::ImproperPriorHasNoMarginalMass) => {}
        other => return Err(format!("improper candidate under BF gave {other:?}")),
    }
    within(start.elapsed(), Duration::from_secs(1))?;
    Ok("NonSmoothDensity, DiscreteSupport, ImproperPriorHasNoMarginalMass".into())
}

fn c12_determinism() -> Outcome {
    let start = Instant::now();
    let bin = env!("CARGO_BIN_EXE_score-select");
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let runs: [&[&str]; 3] = [
        &["--scenario", "fig1", "--reps", "30", "--seed", "7"],
        &[
            "--scenario",
            "fig3",
            "--reps",
            "4",
            "--n",
            "300",
            "--seed",
            "7",
        ],
        &["--scenario", "gamma-normal", "--reps", "30", "--seed", "7"],
    ];
    let mut summary = Vec::new();
    for (k, flags) in runs.iter().enumerate() {
        let mut outputs = Vec::new();
        for threads in ["1", "0"] {
            let out = dir.path().join(format!("run{k}_t{threads}"));
            let status = Command::new(bin)
                .arg("simulate")
                .args(*flags)
                .arg("--out")
                .arg(&out)
                .env("SCORE_SELECT_THREADS", threads)
                .output()
                .map_err(|e| e.to_string())?;
            if !status.status.success() {
                return Err(format!(
                    "simulate {flags:?} failed: {}",
                    String::from_utf8_lossy(&status.stderr)
                ));
            }
            let mut csv = out.into_os_string();
            csv.push(".csv");
            outputs.push(std::fs::read(csv).map_err(|e| e.to_string())?);
        }
        if outputs[0] != outputs[1] {
            return Err(format!(
                "{} CSV differs between 1 thread and auto",
                flags[1]
            ));
        }
        summary.push(format!("{} ({} bytes)", flags[1], outputs[0].len()));
    }
    within(start.elapsed(), Duration::from_secs(120))?;
    Ok(format!(
        "byte-identical with 1 thread and auto: {}",
        summary.join(", ")
    ))
}

fn run(id: usize, name: &str, f: impl FnOnce() -> Outcome) -> bool {
    let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        let msg = p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default();
        Err(format!("panicked: {msg}"))
    });
    let (tag, detail, ok) = match outcome {
        Ok(d) => ("PASS", d, true),
        Err(d) => ("FAIL", d, false),
    };
    println!("{tag} criterion {id:>2} {name}: {detail}");
    ok
}

fn main() {
    println!("acceptance: 12 criteria");
    let mut results = vec![
        run(1, "normalising-constant invariance", c1_constant_invariance),
        run(2, "finite-difference oracles", c2_fd_oracles),
        run(3, "Woodbury and determinant lemma vs dense", c3_woodbury),
        run(4, "improper-prior limit", c4_improper_limit),
        run(5, "chain rule", c5_chain_rule),
        run(6, "nested boxplot study selection", c6_fig1),
    ];
    let start = Instant::now();
    let runs = trajectory_runs();
    let elapsed = start.elapsed();
    match runs {
        Ok(runs) => {
            results.push(run(7, "trajectory slope ratio", || {
                c7_slope_ratio(&runs, elapsed)
            }));
            results.push(run(8, "consistency direction", || c8_consistency(&runs)));
        }
        Err(e) => {
            results.push(run(7, "trajectory slope ratio", || Err(e.clone())));
            results.push(run(8, "consistency direction", || Err(e.clone())));
        }
    }
    results.push(run(9, "gamma vs normal accuracy", c9_gamma));
    results.push(run(10, "pareto vs normal accuracy", c10_pareto));
    results.push(run(11, "inapplicability diagnostics", c11_inapplicability));
    results.push(run(12, "determinism across thread counts", c12_determinism));

    let passed = results.iter().filter(|&&ok| ok).count();
    println!("acceptance: {passed}/{} passed", results.len());
    if passed != results.len() {
        std::process::exit(1);
    }
}
