//! `dmimo` — command-line front end of the simulator.
//!
//! Exit codes: 0 success, 2 configuration or validation error, 3 numerical
//! failure (singular geometry), 4 I/O error.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use dmimo_core::lists;
use dmimo_core::manifest::RunManifest;
use dmimo_core::output::{gdop_csv, positioning_csv, rmse_rows, se_csv, PositioningRow};
use dmimo_core::positioning::{gdop_sequence, peb_table, rmse_sweep, sweep_deployment, Mode};
use dmimo_core::scenario::{load_scenario, ScenarioConfig};
use dmimo_core::se::{se_sweep, IsacRegime, SeCurve, SeSweepOptions};
use dmimo_core::deployment::generate_deployment;
use dmimo_core::{Error, ErrorClass};

#[derive(Parser, Debug)]
#[command(name = "dmimo", version, about = "Distributed-MIMO positioning and ISAC spectral-efficiency simulator")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Scenario (or manifest) file.
    #[arg(long, global = true)]
    scenario: Option<PathBuf>,
    /// Master seed; overrides the scenario's `seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// CSV destination; a `<out>.manifest` is written next to it. Default: standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (0 = all cores). Results do not depend on this.
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Delay and carrier-phase position error bounds per AP count.
    Peb {
        /// AP counts, e.g. `4..12` or `4, 6, 8`.
        #[arg(long)]
        counts: Option<String>,
    },
    /// Monte Carlo RMSE of the ML estimator, with companion PEB rows.
    Rmse {
        /// `delay`, `phase` or a comma-separated list of both.
        #[arg(long)]
        mode: Option<String>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        counts: Option<String>,
    },
    /// Uplink spectral efficiency per ISAC regime over a transmit-SNR grid.
    Se {
        /// Comma-separated regimes (with-isac, with-localization, with-sensing, without-isac).
        #[arg(long)]
        regimes: Option<String>,
        /// SNR grid in dB, e.g. `-10..30:5`.
        #[arg(long)]
        snr: Option<String>,
        #[arg(long)]
        realizations: Option<usize>,
        /// Report the sum over UEs instead of the per-UE average.
        #[arg(long)]
        sum: bool,
    },
    /// GDOP and carrier-phase PEB as APs are added in the given orders.
    Gdop {
        /// 1-based AP orderings separated by `;`, e.g. `1 2 3 4; 4 3 2 1`.
        #[arg(long)]
        orderings: Option<String>,
    },
    /// Load and validate a scenario, printing its resolved form.
    Validate,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Peb { .. } => "peb",
            Command::Rmse { .. } => "rmse",
            Command::Se { .. } => "se",
            Command::Gdop { .. } => "gdop",
            Command::Validate => "validate",
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let code = match e.class() {
                ErrorClass::Config => 2,
                ErrorClass::Numerical => 3,
                ErrorClass::Io => 4,
            };
            match &e {
                Error::SingularInformation { .. } => eprintln!("error: singular geometry: {e}"),
                _ => eprintln!("error: {e}"),
            }
            ExitCode::from(code)
        }
    }
}

/// Applies command-line overrides so that the resolved configuration alone
/// determines the output.
fn resolve(cli: &Cli) -> Result<ScenarioConfig, Error> {
    let path = cli
        .global
        .scenario
        .as_ref()
        .ok_or_else(|| Error::invalid("--scenario", "a scenario file is required"))?;
    let mut config = load_scenario(path)?;
    if let Some(seed) = cli.global.seed {
        config.seed = seed;
    }
    match &cli.command {
        Command::Peb { counts } => {
            if let Some(c) = counts {
                config.positioning.ap_counts = lists::parse_counts("--counts", c)?;
            }
        }
        Command::Rmse { mode, trials, counts } => {
            if let Some(m) = mode {
                config.positioning.modes = m
                    .split(',')
                    .map(|s| s.trim().parse::<Mode>())
                    .collect::<Result<Vec<_>, _>>()?;
            }
            if let Some(t) = trials {
                config.positioning.trials = *t;
            }
            if let Some(c) = counts {
                config.positioning.ap_counts = lists::parse_counts("--counts", c)?;
            }
        }
        Command::Se { regimes, snr, realizations, sum } => {
            if let Some(r) = regimes {
                config.se.regimes = r
                    .split(',')
                    .map(|s| s.trim().parse::<IsacRegime>())
                    .collect::<Result<Vec<_>, _>>()?;
            }
            if let Some(s) = snr {
                config.se.snr_db = lists::parse_grid("--snr", s)?;
            }
            if let Some(n) = realizations {
                config.se.realizations = *n;
            }
            if *sum {
                config.se.report_sum = true;
            }
        }
        Command::Gdop { orderings } => {
            if let Some(o) = orderings {
                config.gdop_orderings = lists::parse_orderings("--orderings", o)?;
            }
        }
        Command::Validate => {}
    }
    config.validate()?;
    Ok(config)
}

fn run(cli: &Cli) -> Result<(), Error> {
    let started = Instant::now();
    let config = resolve(cli)?;
    let jobs = cli.global.jobs;
    let seed = config.seed;
    let mut summary = String::new();
    let csv = match &cli.command {
        Command::Validate => {
            let dep = generate_deployment(&config)?;
            print!("{}", config.render());
            eprintln!(
                "ok: {} APs, {} UEs in a {} m square",
                dep.num_aps(),
                dep.num_ues(),
                config.area_side_m
            );
            return Ok(());
        }
        Command::Peb { .. } => {
            let rows = peb_table(&config, &config.positioning.ap_counts, &Mode::ALL)?;
            summary.push_str("num_aps  peb_delay_m   peb_phase_m   phase/delay\n");
            for pair in rows.chunks(2) {
                summary.push_str(&format!(
                    "{:>7}  {:<12.6}  {:<12.6e}  {:.6e}\n",
                    pair[0].num_aps,
                    pair[0].peb_m,
                    pair[1].peb_m,
                    pair[1].peb_m / pair[0].peb_m
                ));
            }
            positioning_csv(&rows.iter().map(PositioningRow::from).collect::<Vec<_>>(), seed)?
        }
        Command::Rmse { .. } => {
            let mut rows = Vec::new();
            summary.push_str("mode   num_aps  rmse_m        peb_m         rmse/peb      failures\n");
            for &mode in &config.positioning.modes {
                let curve = rmse_sweep(&config, mode, &config.positioning.ap_counts, config.positioning.trials, jobs)?;
                for p in &curve.points {
                    summary.push_str(&format!(
                        "{:<5}  {:>7}  {:<12.6e}  {:<12.6e}  {:<12.4e}  {}\n",
                        mode.to_string(),
                        p.num_aps,
                        p.rmse_m,
                        p.peb_m,
                        p.rmse_m / p.peb_m,
                        p.failures
                    ));
                }
                rows.extend(rmse_rows(&curve));
            }
            positioning_csv(&rows, seed)?
        }
        Command::Se { .. } => {
            let mut opts = SeSweepOptions::from_config(&config);
            opts.jobs = jobs;
            let curve = se_sweep(&config, &opts)?;
            summary.push_str(&gain_table(&curve));
            se_csv(&curve, seed)?
        }
        Command::Gdop { .. } => {
            if config.gdop_orderings.is_empty() {
                return Err(Error::invalid("gdop.orderings", "no orderings given (scenario key or --orderings)"));
            }
            let dep = sweep_deployment(&config, config.num_aps)?;
            let mut all = Vec::new();
            for (i, ordering) in config.gdop_orderings.iter().enumerate() {
                let steps = gdop_sequence(&config, &dep, ordering)?;
                if let Some(last) = steps.last() {
                    summary.push_str(&format!(
                        "ordering {}: final gdop {}\n",
                        i + 1,
                        last.gdop.map_or("inf".to_string(), |g| format!("{g:.6}"))
                    ));
                }
                all.push((i + 1, steps));
            }
            gdop_csv(&all, seed)?
        }
    };
    emit(cli, &config, &csv, &summary, started)
}

/// Gain of every regime over without-isac, per SNR; empty when there is nothing to compare.
fn gain_table(curve: &SeCurve) -> String {
    let mut regimes: Vec<IsacRegime> = Vec::new();
    for r in &curve.rows {
        if !regimes.contains(&r.regime) {
            regimes.push(r.regime);
        }
    }
    let others: Vec<IsacRegime> = regimes.iter().copied().filter(|r| *r != IsacRegime::WithoutIsac).collect();
    if !regimes.contains(&IsacRegime::WithoutIsac) || others.is_empty() {
        return String::new();
    }
    let mut out = format!("gain over without-isac\n{:>8}", "snr_db");
    for r in &others {
        out.push_str(&format!("  {:>17}", r.name()));
    }
    out.push('\n');
    let mut snrs: Vec<f64> = Vec::new();
    for r in &curve.rows {
        if !snrs.contains(&r.snr_db) {
            snrs.push(r.snr_db);
        }
    }
    for snr in snrs {
        out.push_str(&format!("{snr:>8}"));
        for r in &others {
            match curve.gain(snr, *r) {
                Some(g) if g.is_finite() => out.push_str(&format!("  {:>16.2}x", g)),
                _ => out.push_str(&format!("  {:>17}", "-")),
            }
        }
        out.push('\n');
    }
    out
}

fn write_file(path: &Path, contents: &str) -> Result<(), Error> {
    fs::write(path, contents).map_err(|e| {
        Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
    })
}

fn emit(cli: &Cli, config: &ScenarioConfig, csv: &str, summary: &str, started: Instant) -> Result<(), Error> {
    match &cli.global.out {
        Some(out) => {
            write_file(out, csv)?;
            let manifest = RunManifest {
                command: cli.command.name().to_string(),
                config: config.clone(),
                tool_version: env!("CARGO_PKG_VERSION").to_string(),
                outputs: vec![out.display().to_string()],
                duration_s: started.elapsed().as_secs_f64(),
                jobs: cli.global.jobs,
            };
            let mut manifest_path = out.clone().into_os_string();
            manifest_path.push(".manifest");
            write_file(Path::new(&manifest_path), &manifest.render())?;
            print!("{summary}");
        }
        None => {
            std::io::stdout().write_all(csv.as_bytes())?;
            eprint!("{summary}");
        }
    }
    Ok(())
}
