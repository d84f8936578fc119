//! Seeded Monte Carlo studies.
//!
//! Every replication owns a generator seeded through [`derive_seed`], and
//! results are assembled in a canonical order, so output does not depend on
//! how rayon schedules the work.

pub mod config;
pub mod design;
pub mod fig1;
pub mod output;
pub mod seed;
pub mod trajectory;
pub mod univariate_study;

pub use config::{ExperimentConfig, PriorMode, Scenario, UnivariateSettings};
pub use fig1::{run_fig1, Fig1Row, Fig1Table};
pub use output::{run, RunManifest, RunOutput};
pub use seed::derive_seed;
pub use trajectory::{estimate_slope_ratio, run_trajectory, TrajectoryRow};
pub use univariate_study::{run_univariate_study, SelectionCriterion, UnivariateRow};
