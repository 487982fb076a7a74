use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use losmimo_core::experiments::{
    emit_csv, emit_deviation_report, render_figure_svg, reproduce_figure, run_sweep,
    validate_config, ExperimentConfig, FigureId, FigureOptions, NormalizedConfig,
    DEFAULT_UNQUANTIZED_SAMPLES,
};

/// Achievable rates of LOS MIMO links with 1-bit receivers.
#[derive(Parser, Debug)]
#[command(name = "losmimo", version)]
struct Cli {
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Seed for the Monte-Carlo engines; overrides the config file.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the sweep described by a config file and write the results CSV.
    Sweep {
        /// TOML experiment file.
        #[arg(long)]
        config: PathBuf,
        /// Results CSV to write.
        #[arg(long)]
        out: PathBuf,
    },
    /// Regenerate a reference figure and report deviations from it.
    Figure {
        /// One of fig3a, fig3b, fig4a, fig4b, fig5, fig6.
        #[arg(long, value_parser = parse_figure)]
        id: FigureId,
        /// Directory receiving the data, the deviation report and the plot.
        #[arg(long)]
        out: PathBuf,
        /// Replace the per-curve rate tolerances, in bpcu.
        #[arg(long)]
        tolerance: Option<f64>,
        /// Samples for the unquantized reference curve.
        #[arg(long, default_value_t = DEFAULT_UNQUANTIZED_SAMPLES)]
        samples: usize,
        /// Exit with status 2 when a point falls outside its tolerance.
        #[arg(long)]
        strict: bool,
    },
    /// Validate a config file without running it.
    Check {
        /// TOML experiment file.
        #[arg(long)]
        config: PathBuf,
    },
}

fn parse_figure(s: &str) -> Result<FigureId, String> {
    s.parse().map_err(|e: losmimo_core::Error| e.to_string())
}

fn load(path: &Path, seed: Option<u64>) -> Result<NormalizedConfig> {
    let mut cfg = ExperimentConfig::load(path)?;
    if let Some(seed) = seed {
        cfg.engine.seed = seed;
    }
    Ok(validate_config(&cfg)?)
}

fn sweep(config: &Path, out: &Path, seed: Option<u64>) -> Result<ExitCode> {
    let cfg = load(config, seed)?;
    for note in &cfg.notes {
        eprintln!("note: {note}");
    }
    let start = Instant::now();
    let result = run_sweep(&cfg);
    for (row, t) in result.rows.iter().zip(&result.wallclock) {
        eprintln!(
            "{} S={} SNR={} dB M={} {}: {:.6} bpcu ({:.3} s)",
            row.experiment,
            row.s_factor,
            row.snr_db,
            row.m_rx,
            row.engine,
            row.mi_bpcu,
            t.as_secs_f64()
        );
    }
    for f in &result.failures {
        eprintln!(
            "skipped S={} SNR={} dB M={} {}: {}",
            f.s_factor, f.snr_db, f.m_rx, f.engine, f.message
        );
    }
    emit_csv(&result.rows, out)?;
    eprintln!(
        "wrote {} rows to {} in {:.2} s",
        result.rows.len(),
        out.display(),
        start.elapsed().as_secs_f64()
    );
    Ok(if result.failures.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(3)
    })
}

fn figure(id: FigureId, out: &Path, opts: FigureOptions, strict: bool) -> Result<ExitCode> {
    if opts.tolerance.is_some_and(|t| !(t.is_finite() && t >= 0.0)) {
        bail!("tolerance must be a non-negative number");
    }
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let start = Instant::now();
    let run = reproduce_figure(id, &opts)?;
    let data = out.join(format!("{id}.csv"));
    let report = out.join(format!("{id}_deviations.csv"));
    let plot = out.join(format!("{id}.svg"));
    emit_csv(&run.rows, &data)?;
    emit_deviation_report(&run.deviations, &report)?;
    std::fs::write(&plot, render_figure_svg(&run))
        .with_context(|| format!("writing {}", plot.display()))?;
    for f in &run.failures {
        eprintln!(
            "skipped S={} SNR={} dB M={}: {}",
            f.s_factor, f.snr_db, f.m_rx, f.message
        );
    }
    let outside: Vec<_> = run.deviations.iter().filter(|d| !d.within_tol).collect();
    for d in &outside {
        eprintln!(
            "outside tolerance: {} S={} SNR={} dB ours={:.6} reference={:.6} delta={:+.6} tol={}",
            d.curve, d.s, d.snr_db, d.ours, d.paper, d.delta, d.tolerance
        );
    }
    println!(
        "{id}: {}/{} points within tolerance ({:.1} s); wrote {}, {}, {}",
        run.deviations.len() - outside.len(),
        run.deviations.len(),
        start.elapsed().as_secs_f64(),
        data.display(),
        report.display(),
        plot.display()
    );
    Ok(if strict && !outside.is_empty() {
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    })
}

fn check(config: &Path) -> Result<ExitCode> {
    let cfg = load(config, None)?;
    println!("{}: valid", cfg.name);
    println!(
        "  tx: {} antennas ({}), constellation {} ({} inputs)",
        cfg.tx.len(),
        cfg.tx.kind(),
        cfg.constellation.kind(),
        cfg.ensemble.len()
    );
    for p in &cfg.rx {
        println!(
            "  S = {}: M = {} ({}), engine {}",
            p.s_factor,
            p.m_rx,
            p.array.kind(),
            cfg.engine.resolve(p.m_rx, cfg.exact_max_rx)
        );
    }
    println!("  {} SNR points, seed {}", cfg.snr_db.len(), cfg.seed);
    for note in &cfg.notes {
        println!("  note: {note}");
    }
    Ok(ExitCode::SUCCESS)
}

fn run(cli: Cli) -> Result<ExitCode> {
    if let Some(n) = cli.threads {
        if n == 0 {
            bail!("--threads must be at least 1");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the thread pool")?;
    }
    match cli.command {
        Command::Sweep { config, out } => sweep(&config, &out, cli.seed),
        Command::Figure {
            id,
            out,
            tolerance,
            samples,
            strict,
        } => {
            let opts = FigureOptions {
                seed: cli.seed.unwrap_or(0),
                tolerance,
                unquantized_samples: samples,
            };
            figure(id, &out, opts, strict)
        }
        Command::Check { config } => check(&config),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            // core errors already embed their cause in the message
            if e.downcast_ref::<losmimo_core::Error>().is_some() {
                eprintln!("error: {e}");
            } else {
                eprintln!("error: {e:#}");
            }
            ExitCode::FAILURE
        }
    }
}
