//! `hetrange`: simulate, sweep and verify the median-based MU distance
//! estimator.

use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use hetrange::analysis::verify_median_identity;
use hetrange::harness::{self, emit_csv, figure_preset, parse_sweep, run_figure, write_csv, FigureId};
use hetrange::{run_trial, Harness, Measurement, Scenario, SweepResult};

#[derive(Parser, Debug)]
#[command(name = "hetrange", version, about = "MBS-to-MU distance estimation from overheard power-controlled signals")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// Scenario file (JSON); missing keys take default values.
    #[arg(long, global = true)]
    scenario: Option<PathBuf>,
    /// Master seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Monte Carlo trials per point.
    #[arg(long, global = true)]
    trials: Option<usize>,
    /// Output file; CSV for sweeps and figures, JSON for estimates.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// The SBS knows every subblock SNR exactly.
    #[arg(long, global = true)]
    ideal_measurement: bool,
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    workers: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Simulate one observation window and estimate d0 from it.
    Estimate,
    /// Sweep one scenario parameter.
    Sweep {
        /// One of I, J, d0, d1, M, sigma_s.
        #[arg(long = "var")]
        variable: String,
        /// Comma-separated values, e.g. 10,50,200 or ideal,100.
        #[arg(long, allow_hyphen_values = true)]
        values: String,
    },
    /// Run a preset experiment.
    Figure {
        /// 3, 4, 5, 6 or table1.
        #[arg(long)]
        id: String,
    },
    /// Check the median identity of the SBS SNR distribution numerically.
    Verify {
        /// Shadowing spreads (dB) to check.
        #[arg(long, value_delimiter = ',', default_values_t = vec![0.1, 2.0, 4.0, 8.0, 12.0])]
        sigma: Vec<f64>,
    },
}

impl Common {
    fn scenario(&self) -> Result<Scenario> {
        let mut sc = match &self.scenario {
            Some(path) => Scenario::load(path).with_context(|| format!("loading {}", path.display()))?,
            None => Scenario::default(),
        };
        if let Some(seed) = self.seed {
            sc.seed = seed;
        }
        if let Some(trials) = self.trials {
            sc.trials = trials;
        }
        if self.ideal_measurement {
            sc.pilot_count = Measurement::Ideal;
        }
        sc.validate()?;
        Ok(sc)
    }

    fn harness(&self) -> Result<Harness> {
        Ok(match self.workers {
            Some(n) => Harness::with_workers(n)?,
            None => Harness::new(),
        })
    }

    fn write_results(&self, rows: &[SweepResult]) -> Result<()> {
        match &self.out {
            Some(path) => emit_csv(rows, path).with_context(|| format!("writing {}", path.display()))?,
            None => write_csv(rows, io::stdout().lock())?,
        }
        Ok(())
    }
}

fn estimate(common: &Common) -> Result<()> {
    let sc = common.scenario()?;
    let outcome = run_trial(&sc, 0)?;
    let json = serde_json::to_string_pretty(&outcome)?;
    match &common.out {
        Some(path) => std::fs::write(path, json + "\n")?,
        None => println!("{json}"),
    }
    Ok(())
}

fn figure(common: &Common, id: &str) -> Result<()> {
    let id: FigureId = id.parse()?;
    let mut preset = figure_preset(id, common.seed, common.trials, common.ideal_measurement);
    if let Some(path) = &common.scenario {
        // a scenario file replaces the preset base; the sweeps stay
        let base = Scenario::load(path)?;
        preset.base = base;
    }
    let started = Instant::now();
    let rows = run_figure(&common.harness()?, &preset, id == FigureId::Table1)?;
    if id == FigureId::Table1 {
        let mut err = io::stderr().lock();
        writeln!(err, "avg SNR (dB)   d0 (km)   epsilon")?;
        for r in &rows {
            writeln!(
                err,
                "{:>12.2}   {:>7.4}   {:>6.2}%",
                r.mean_measured_snr_db,
                match r.value {
                    harness::SweepValue::Real(v) => v,
                    _ => f64::NAN,
                },
                100.0 * r.mean_epsilon
            )?;
        }
    }
    eprintln!("figure {id}: {} rows in {:.1?}", rows.len(), started.elapsed());
    common.write_results(&rows)
}

fn verify(sigmas: &[f64]) -> Result<bool> {
    const LIMIT: f64 = 1e-9;
    let started = Instant::now();
    let mut all_ok = true;
    for &sigma in sigmas {
        let residual = verify_median_identity(sigma)?;
        let ok = residual <= LIMIT;
        all_ok &= ok;
        println!(
            "sigma_s = {sigma:>5} dB  |CDF(median) - 1/2| = {residual:.3e}  {}",
            if ok { "PASS" } else { "FAIL" }
        );
    }
    println!("checked {} values in {:.1?}", sigmas.len(), started.elapsed());
    Ok(all_ok)
}

fn run(cli: Cli) -> Result<bool> {
    match &cli.command {
        Command::Estimate => estimate(&cli.common)?,
        Command::Sweep { variable, values } => {
            let (var, vals) = parse_sweep(variable, values)?;
            if vals.is_empty() {
                bail!("--values is empty");
            }
            let sc = cli.common.scenario()?;
            let rows = cli.common.harness()?.sweep(&sc, var, &vals)?;
            cli.common.write_results(&rows)?;
        }
        Command::Figure { id } => figure(&cli.common, id)?,
        Command::Verify { sigma } => return verify(sigma),
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
