//! `amo`: JSON-configured experiment runner for the amospec pipelines.
//!
//! Every subcommand reads one experiment config (`--config`), prints a
//! human-readable summary to stdout, and optionally exports its primary
//! artifact to `--out` in the chosen `--format`. Exit codes: 0 success,
//! 1 hard-check failure, 2 config or i/o error, 3 regime refusal.

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use amoharness::export::{fmt17, write_output};
use amoharness::{
    export_measure, export_report, export_spectral, json_17, run_localization_window,
    run_verify_mborel, run_verify_transition, site_spectral_measure, ExperimentConfig,
    ExportFormat, HarnessError, VerificationReport,
};
use amospec::measure::{dimension_report, m_borel};
use amospec::operator::lyapunov;
use amospec::spectral::{eigensolve, TruncatedOperator};

/// Experiment harness for the almost Mathieu dimension-bound pipelines.
#[derive(Parser)]
#[command(name = "amo", version, about)]
struct Cli {
    /// Experiment configuration (JSON; see schema/config.schema.json).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the seed in the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Writes the subcommand's primary artifact to this path.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Export format for --out; views without a tabular form accept only json.
    #[arg(long, global = true, default_value = "json", value_parser = parse_format)]
    format: ExportFormat,
    /// Overwrites existing output files.
    #[arg(long, global = true)]
    force: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Continued-fraction expansion and beta estimate of the frequency.
    Beta,
    /// Eigenvalues and site amplitudes of the symmetric truncation.
    Spectrum,
    /// Dimension report of the site spectral measure mu_0 + mu_1.
    MeasureDims,
    /// Sampled m-Borel transform values over the scale grid.
    Mborel,
    /// Lyapunov exponent estimate at the configured energy.
    Lyapunov,
    /// Measure-layer verification suite (scaling inequalities, examples).
    VerifyMborel,
    /// Transition pipeline: spectral-measure dimensions vs closed-form bounds.
    VerifyTransition,
    /// Localization pipeline: resonant-site decay windows of eigenvectors.
    Localization,
}

fn parse_format(s: &str) -> Result<ExportFormat, String> {
    s.parse().map_err(|e: HarnessError| e.to_string())
}

fn main() {
    let cli = Cli::parse();
    let code = match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    std::process::exit(code);
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig, HarnessError> {
    let path = cli
        .config
        .as_deref()
        .ok_or_else(|| HarnessError::Config("pass --config <path> to select an experiment".into()))?;
    let mut config = ExperimentConfig::load(path)?;
    if let Some(seed) = cli.seed {
        config = config.with_seed(seed);
    }
    if cli.force {
        config.output.force = true;
    }
    Ok(config)
}

/// Writes a JSON-only view to --out when given.
fn emit_view<T: Serialize>(cli: &Cli, force: bool, view: &T, what: &str) -> Result<(), HarnessError> {
    let Some(path) = &cli.out else {
        return Ok(());
    };
    if cli.format == ExportFormat::Csv {
        return Err(HarnessError::Config(format!(
            "{what} has no csv form; use --format json"
        )));
    }
    write_output(path, json_17(view)?.as_bytes(), force)?;
    println!("wrote {}", path.display());
    Ok(())
}

/// Prints the report, exports it when a destination is configured, and
/// maps it to the process exit code.
fn finish_report(
    cli: &Cli,
    config: &ExperimentConfig,
    report: &VerificationReport,
) -> Result<i32, HarnessError> {
    print!("{}", report.summary());
    let dest = cli.out.clone().or_else(|| config.output.report.clone());
    if let Some(path) = dest {
        export_report(report, cli.format, &path, config.output.force)?;
        println!("report written to {}", path.display());
    }
    Ok(report.exit_code())
}

#[derive(Serialize)]
struct BetaView {
    value: f64,
    tail_start: usize,
    n_convergents: usize,
    quotients: Vec<u64>,
    per_n: Vec<f64>,
}

#[derive(Serialize)]
struct LyapunovView {
    energy: f64,
    value: f64,
    split_half_dev: f64,
    n_steps: i64,
}

#[derive(Serialize)]
struct MborelRow {
    x: f64,
    eps: f64,
    value: f64,
}

#[derive(Serialize)]
struct MborelView {
    m: f64,
    rows: Vec<MborelRow>,
}

fn run(cli: &Cli) -> Result<i32, HarnessError> {
    let config = load_config(cli)?;
    match cli.cmd {
        Cmd::Beta => {
            let freq = config.frequency()?;
            let est = freq
                .beta(0)
                .map_err(|e| HarnessError::Config(format!("beta estimate: {e}")))?;
            println!(
                "beta_hat = {:.6} over {} convergents (tail from n = {})",
                est.value,
                freq.n_convergents(),
                est.tail_start
            );
            println!("quotients: {:?}", freq.quotients());
            let view = BetaView {
                value: est.value,
                tail_start: est.tail_start,
                n_convergents: freq.n_convergents(),
                quotients: freq.quotients().to_vec(),
                per_n: est.per_n.clone(),
            };
            emit_view(cli, config.output.force, &view, "beta view")?;
            Ok(0)
        }
        Cmd::Spectrum => {
            let op = config.operator()?;
            let t = TruncatedOperator::symmetric(&op, config.truncation)?;
            let data = eigensolve(&t, &[0, 1])?;
            let evs = data.eigenvalues();
            println!(
                "{} eigenvalues in [{:.6}, {:.6}]; orthonormality residual {:.3e}, \
                 eigen residual {:.3e}",
                data.size(),
                evs.first().copied().unwrap_or(f64::NAN),
                evs.last().copied().unwrap_or(f64::NAN),
                data.orthonormality_residual(),
                data.max_eigen_residual()
            );
            if let Some(path) = &cli.out {
                export_spectral(&data, cli.format, path, config.output.force)?;
                println!("wrote {}", path.display());
            }
            Ok(0)
        }
        Cmd::MeasureDims => {
            let op = config.operator()?;
            let (mu, defect) = site_spectral_measure(&op, config.truncation)?;
            let grid = config.scale_grid()?;
            let dims = dimension_report(
                &mu,
                &grid,
                &config.q_list,
                config.m,
                config.n_samples,
                config.seed,
            )?;
            println!(
                "site spectral measure: {} atoms, mass {:.6}, completeness defect {:.3e}",
                mu.len(),
                mu.total_mass(),
                defect
            );
            println!(
                "dim_H in [{:.4}, {:.4}], dim_P in [{:.4}, {:.4}]{}",
                dims.dim_h_minus_hat,
                dims.dim_h_plus_hat,
                dims.dim_p_minus_hat,
                dims.dim_p_plus_hat,
                if dims.clamped { " (clamped to [0, 1])" } else { "" }
            );
            for r in &dims.renyi {
                println!("D(q={}) in [{:.4}, {:.4}]", r.q, r.d_minus_hat, r.d_plus_hat);
            }
            if let Some(path) = &config.output.measure {
                export_measure(&mu, cli.format, path, config.output.force)?;
                println!("measure written to {}", path.display());
            }
            emit_view(cli, config.output.force, &dims, "dimension report")?;
            Ok(0)
        }
        Cmd::Mborel => {
            let op = config.operator()?;
            let (mu, _) = site_spectral_measure(&op, config.truncation)?;
            let grid = config.scale_grid()?;
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            let samples = mu.sample_indices(&mut rng, config.n_samples);
            let positions = mu.positions();
            let mut rows = Vec::with_capacity(samples.len() * grid.len());
            for &(idx, _) in &samples {
                let x = positions[idx];
                for &eps in grid.eps_values() {
                    rows.push(MborelRow {
                        x,
                        eps,
                        value: m_borel(&mu, config.m, x, eps),
                    });
                }
            }
            println!(
                "J(m={}) at {} sampled atoms over {} scales ({} rows)",
                config.m,
                samples.len(),
                grid.len(),
                rows.len()
            );
            if let Some(path) = &cli.out {
                match cli.format {
                    ExportFormat::Json => {
                        let view = MborelView { m: config.m, rows };
                        write_output(path, json_17(&view)?.as_bytes(), config.output.force)?;
                    }
                    ExportFormat::Csv => {
                        let mut text = String::from("x,eps,value\n");
                        for r in &rows {
                            text.push_str(&format!(
                                "{},{},{}\n",
                                fmt17(r.x),
                                fmt17(r.eps),
                                fmt17(r.value)
                            ));
                        }
                        write_output(path, text.as_bytes(), config.output.force)?;
                    }
                }
                println!("wrote {}", path.display());
            }
            Ok(0)
        }
        Cmd::Lyapunov => {
            let op = config.operator()?;
            let energy = config.energy.unwrap_or(0.0);
            let steps = config.lyapunov_steps.unwrap_or(1_000_000);
            let est = lyapunov(&op, energy, steps)?;
            println!(
                "Lyapunov estimate at E = {energy:.6}: {:.6} (split-half dev {:.3e}, {} steps)",
                est.value, est.split_half_dev, est.n_steps
            );
            let view = LyapunovView {
                energy,
                value: est.value,
                split_half_dev: est.split_half_dev,
                n_steps: est.n_steps,
            };
            emit_view(cli, config.output.force, &view, "lyapunov view")?;
            Ok(0)
        }
        Cmd::VerifyMborel => finish_report(cli, &config, &run_verify_mborel(&config)?),
        Cmd::VerifyTransition => finish_report(cli, &config, &run_verify_transition(&config)?),
        Cmd::Localization => finish_report(cli, &config, &run_localization_window(&config)?),
    }
}
