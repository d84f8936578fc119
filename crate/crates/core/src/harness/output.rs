//! CSV tables and run manifests.
//!
//! Schemas (header lines are written verbatim):
//!
//! - boxplots: `scenario,true_model,rep,candidate,score,selected`
//! - trajectories: `scenario,c,rep,n,log_bf,score_diff`
//! - univariate: `scenario,rep,criterion,selected,true_model,correct`
//!
//! Reals are written with 17 significant digits so they round-trip exactly.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::error::Result;
use crate::harness::config::{ExperimentConfig, PriorMode, Scenario};
use crate::harness::fig1::{model_label, run_fig1, Fig1Table, TRUTHS};
use crate::harness::trajectory::{estimate_slope_ratio, mean_by_n, run_trajectory, TrajectoryRow};
use crate::harness::univariate_study::{
    accuracy_table, run_univariate_study, setup, UnivariateRow,
};

pub const FIG1_HEADER: &str = "scenario,true_model,rep,candidate,score,selected";
pub const TRAJECTORY_HEADER: &str = "scenario,c,rep,n,log_bf,score_diff";
pub const UNIVARIATE_HEADER: &str = "scenario,rep,criterion,selected,true_model,correct";

/// Window used for the slope ratios reported in trajectory manifests.
pub const SLOPE_WINDOW: f64 = 0.5;

pub fn fmt_real(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, PartialEq)]
pub enum RunOutput {
    Fig1(Fig1Table),
    Trajectory(Vec<TrajectoryRow>),
    Univariate(Vec<UnivariateRow>),
}

pub fn run(config: &ExperimentConfig) -> Result<RunOutput> {
    match config.scenario {
        Scenario::Fig1Boxplots => run_fig1(config).map(RunOutput::Fig1),
        Scenario::Fig2NonNested | Scenario::Fig3Nested => {
            run_trajectory(config).map(RunOutput::Trajectory)
        }
        Scenario::GammaVsNormal | Scenario::ParetoVsNormal => {
            run_univariate_study(config).map(RunOutput::Univariate)
        }
    }
}

impl RunOutput {
    pub fn row_count(&self) -> usize {
        match self {
            RunOutput::Fig1(t) => t.rows.len(),
            RunOutput::Trajectory(r) => r.len(),
            RunOutput::Univariate(r) => r.len(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        match self {
            RunOutput::Fig1(t) => {
                s.push_str(FIG1_HEADER);
                s.push('\n');
                for r in &t.rows {
                    let _ = writeln!(
                        s,
                        "fig1,{},{},{},{},{}",
                        model_label(r.true_model),
                        r.rep,
                        model_label(r.candidate),
                        fmt_real(r.score),
                        r.selected as u8
                    );
                }
            }
            RunOutput::Trajectory(rows) => {
                s.push_str(TRAJECTORY_HEADER);
                s.push('\n');
                for r in rows {
                    let _ = writeln!(
                        s,
                        "{},{},{},{},{},{}",
                        r.scenario,
                        fmt_real(r.c),
                        r.rep,
                        r.n,
                        fmt_real(r.log_bf),
                        fmt_real(r.score_diff)
                    );
                }
            }
            RunOutput::Univariate(rows) => {
                s.push_str(UNIVARIATE_HEADER);
                s.push('\n');
                for r in rows {
                    let _ = writeln!(
                        s,
                        "{},{},{},{},{},{}",
                        r.scenario,
                        r.rep,
                        r.criterion.tag(),
                        r.selected,
                        r.true_model,
                        r.correct as u8
                    );
                }
            }
        }
        s
    }

    /// Headline statistics recorded in the manifest.
    pub fn summary(&self, config: &ExperimentConfig) -> Value {
        match self {
            RunOutput::Fig1(t) => {
                let freq: BTreeMap<String, f64> = TRUTHS
                    .iter()
                    .map(|&m| (model_label(m), t.selection_frequency(m)))
                    .collect();
                json!({ "true_model_selection_frequency": freq })
            }
            RunOutput::Trajectory(rows) => {
                let mut per_c = Vec::new();
                for &c in &config.c_grid {
                    let cell: Vec<TrajectoryRow> =
                        rows.iter().filter(|r| r.c == c).cloned().collect();
                    let last = mean_by_n(&cell).into_iter().next_back();
                    let ratio = estimate_slope_ratio(&cell, SLOPE_WINDOW);
                    per_c.push(json!({
                        "c": c,
                        "slope_ratio": ratio.as_ref().ok(),
                        "slope_ratio_error": ratio.as_ref().err().map(|e| e.to_string()),
                        "slope_window": SLOPE_WINDOW,
                        "final_n": last.map(|l| l.0),
                        "mean_log_bf_at_final_n": last.map(|l| l.1 .0),
                        "mean_score_diff_at_final_n": last.map(|l| l.1 .1),
                    }));
                }
                json!({ "per_c": per_c })
            }
            RunOutput::Univariate(rows) => json!({
                "accuracy": accuracy_table(rows),
                "acceptance_thresholds": univariate_thresholds(config.scenario),
            }),
        }
    }
}

/// Accuracy thresholds the harness uses to judge the univariate studies.
pub fn univariate_thresholds(scenario: Scenario) -> Value {
    match scenario {
        Scenario::GammaVsNormal => json!({
            "truth": "gamma",
            "bayes_factor_accuracy_min": 0.8,
            "hyvarinen_accuracy_min": 0.8,
        }),
        Scenario::ParetoVsNormal => json!({
            "truth": "pareto",
            "bayes_factor_accuracy_min": 0.95,
            "hyvarinen_accuracy_max_gap_below_bayes_factor": 0.2,
        }),
        _ => Value::Null,
    }
}

/// Choices the harness makes where the study description leaves freedom.
pub fn harness_choices(config: &ExperimentConfig) -> BTreeMap<String, String> {
    let mut m = BTreeMap::new();
    let mut put = |k: &str, v: String| {
        m.insert(k.to_string(), v);
    };
    put(
        "rng",
        "ChaCha8 per task, seeded by SHA-256(master_seed, scenario, rep, sub_tag)".into(),
    );
    put("number_format", "17 significant digits".into());
    match config.scenario {
        Scenario::Fig1Boxplots | Scenario::Fig2NonNested | Scenario::Fig3Nested => {
            put(
                "design",
                "column 1 intercept, remaining columns iid N(0,1), redrawn per replication".into(),
            );
            put(
                "candidates",
                "theta vectors define supports; candidates place priors on included coefficients"
                    .into(),
            );
            put("prior_mean", "zero".into());
        }
        _ => {}
    }
    match config.scenario {
        Scenario::Fig1Boxplots => {
            put(
                "criterion",
                "argmin multivariate Hyvarinen score, ties to lowest index".into(),
            );
            put(
                "prior",
                match config.prior_mode {
                    PriorMode::Improper => "flat improper".to_string(),
                    PriorMode::Proper(c) => format!("N(0, {c} sigma2 I)"),
                },
            );
            put(
                "truths",
                "M1, M3, M5, M7 (nested M1..M6 by leading coefficients, M7 empty)".into(),
            );
        }
        Scenario::Fig2NonNested | Scenario::Fig3Nested => {
            put("prior", "N(0, c sigma2 I) for every c in c_grid".into());
            put(
                "prefixes",
                "one dataset of length n per replication, shared by all c; statistics on y[1..k]"
                    .into(),
            );
            put(
                "sign",
                "log_bf = log m_true - log m_alt; score_diff = H_alt - H_true".into(),
            );
            put(
                "models",
                if config.scenario == Scenario::Fig2NonNested {
                    "true M1 theta=(1,0) vs alternative M0 theta=(0,1)".into()
                } else {
                    "true M6 theta=(1,1,1,1,1,1) vs alternative M3 support (1,1,1,0,0,0)".into()
                },
            );
        }
        Scenario::GammaVsNormal | Scenario::ParetoVsNormal => {
            if let Ok(s) = setup(config) {
                put("candidates", format!("{:?}", s.candidates));
                put("generators", format!("{:?}", s.generators));
            }
            put(
                "normal_candidate",
                "known variance = variance of the non-Normal generator; prior N(normal_prior_mean, that variance)".into(),
            );
            put(
                "hyvarinen",
                "prequential, data in sampled order; +inf if outside support".into(),
            );
            put(
                "bayes_factor",
                "log marginal likelihood; -inf if outside support".into(),
            );
        }
    }
    m
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputFile {
    pub path: String,
    pub sha256: String,
    pub rows: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub tool_version: String,
    pub config: ExperimentConfig,
    pub master_seed: u64,
    pub timestamp: String,
    pub harness_choices: BTreeMap<String, String>,
    pub summary: Value,
    pub outputs: Vec<OutputFile>,
}

impl RunManifest {
    pub fn new(config: &ExperimentConfig, output: &RunOutput, outputs: Vec<OutputFile>) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME").to_string(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            config: config.clone(),
            master_seed: config.master_seed,
            timestamp: chrono::Utc::now().to_rfc3339(),
            harness_choices: harness_choices(config),
            summary: output.summary(config),
            outputs,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn real_format_round_trips() {
        for x in [
            0.1,
            -1.0 / 3.0,
            1e-300,
            123456789.12345679,
            std::f64::consts::PI,
        ] {
            let s = fmt_real(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
            let mantissa = s.split('e').next().unwrap().replace(['-', '.'], "");
            assert_eq!(mantissa.len(), 17);
        }
    }

    #[test]
    fn csv_headers() {
        let mut c = ExperimentConfig::default_for(Scenario::Fig1Boxplots);
        c.reps = 1;
        let out = run(&c).unwrap();
        let csv = out.to_csv();
        assert!(csv.starts_with("scenario,true_model,rep,candidate,score,selected\n"));
        assert_eq!(csv.lines().count(), 1 + 28);
        assert_eq!(out.row_count(), 28);
    }

    #[test]
    fn manifest_records_choices() {
        let c = ExperimentConfig::default_for(Scenario::ParetoVsNormal);
        let choices = harness_choices(&c);
        assert!(choices.contains_key("normal_candidate"));
        assert!(univariate_thresholds(Scenario::ParetoVsNormal).is_object());
    }

    #[test]
    fn sha_hex() {
        assert_eq!(
            sha256_hex(b""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
    }
}
