use std::path::{Path, PathBuf};

use clap::Args;
use serde_json::Value;

use super::{read_file, with_thread_pool, CliError, CliResult, EXIT_OK};
use crate::harness::config::{ExperimentConfig, PriorMode, Scenario};
use crate::harness::output::{run, sha256_hex, OutputFile, RunManifest};

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    /// fig1 | fig2 | fig3 | gamma-normal | pareto-normal
    #[arg(long, value_parser = parse_scenario)]
    pub scenario: Option<Scenario>,
    #[arg(long)]
    pub reps: Option<usize>,
    /// Sample size (largest prefix for fig2/fig3).
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub sigma2: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// improper | proper:C
    #[arg(long, value_parser = parse_prior)]
    pub prior: Option<PriorMode>,
    /// Comma-separated prior variance multipliers, e.g. 1,10,100,1000.
    #[arg(long, value_delimiter = ',')]
    pub c_grid: Option<Vec<f64>>,
    /// Output prefix; writes `<out>.csv` and `<out>.manifest.json`.
    #[arg(long)]
    pub out: PathBuf,
    /// JSON config or a previous run manifest; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

fn parse_scenario(s: &str) -> Result<Scenario, String> {
    s.parse().map_err(|e: crate::Error| e.to_string())
}

fn parse_prior(s: &str) -> Result<PriorMode, String> {
    s.parse().map_err(|e: crate::Error| e.to_string())
}

/// Merges the optional config file with the flags.
pub fn resolve_config(args: &SimulateArgs) -> CliResult<ExperimentConfig> {
    let base = match &args.config {
        Some(path) => {
            let text = read_file(path)?;
            let value: Value = serde_json::from_str(&text)
                .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
            let inner = match value.get("config") {
                Some(c) if value.get("outputs").is_some() => c.clone(),
                _ => value,
            };
            let mut cfg: ExperimentConfig = serde_json::from_value(inner)
                .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
            if let Some(s) = args.scenario {
                cfg.scenario = s;
            }
            Some(cfg)
        }
        None => None,
    };
    let mut cfg = match (base, args.scenario) {
        (Some(cfg), _) => cfg,
        (None, Some(s)) => ExperimentConfig::default_for(s),
        (None, None) => return Err(CliError::usage("--scenario is required without --config")),
    };
    if let Some(v) = args.reps {
        cfg.reps = v;
    }
    if let Some(v) = args.n {
        cfg.n = v;
    }
    if let Some(v) = args.sigma2 {
        cfg.sigma2 = v;
    }
    if let Some(v) = args.seed {
        cfg.master_seed = v;
    }
    if let Some(v) = args.prior {
        cfg.prior_mode = v;
    }
    if let Some(v) = &args.c_grid {
        cfg.c_grid = v.clone();
    }
    cfg.validate().map_err(|e| CliError::usage(e.to_string()))?;
    Ok(cfg)
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

pub fn cmd_simulate(args: &SimulateArgs) -> CliResult<i32> {
    let config = resolve_config(args)?;
    let output = with_thread_pool(|| run(&config))??;
    let csv = output.to_csv();

    let csv_path = with_suffix(&args.out, ".csv");
    let manifest_path = with_suffix(&args.out, ".manifest.json");
    if let Some(dir) = csv_path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)
            .map_err(|e| CliError::runtime(format!("cannot create {}: {e}", dir.display())))?;
    }
    std::fs::write(&csv_path, csv.as_bytes())
        .map_err(|e| CliError::runtime(format!("cannot write {}: {e}", csv_path.display())))?;

    let manifest = RunManifest::new(
        &config,
        &output,
        vec![OutputFile {
            path: csv_path.display().to_string(),
            sha256: sha256_hex(csv.as_bytes()),
            rows: output.row_count(),
        }],
    );
    let json = serde_json::to_string_pretty(&manifest)
        .map_err(|e| CliError::runtime(format!("cannot serialise manifest: {e}")))?;
    std::fs::write(&manifest_path, json + "\n")
        .map_err(|e| CliError::runtime(format!("cannot write {}: {e}", manifest_path.display())))?;

    println!(
        "wrote {} ({} rows) and {}",
        csv_path.display(),
        output.row_count(),
        manifest_path.display()
    );
    Ok(EXIT_OK)
}
