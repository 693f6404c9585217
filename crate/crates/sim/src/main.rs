use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};

use hcvlc_sim::io::{read_pgm, with_output, write_pgm, write_sweep_csv};
use hcvlc_sim::Config;

#[derive(Parser)]
#[command(
    name = "hcvlc",
    version,
    about = "Hyperchaos-scrambled DCO-OFDM VLC link simulator"
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// key = value configuration file.
    #[arg(short, long, global = true)]
    config: Option<PathBuf>,
    /// Override one key; may be repeated.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    overrides: Vec<String>,
    /// Root RNG seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// BER against SNR for both roles.
    SweepBer {
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Information leakage against SNR for both roles.
    SweepLeakage {
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Send a P5 PGM image over the link at the first grid SNR.
    SendImage {
        input: PathBuf,
        /// Recovered image.
        #[arg(short, long)]
        output: PathBuf,
        /// Pixel histograms of both images.
        #[arg(long)]
        histogram: Option<PathBuf>,
        /// BER and KS statistics.
        #[arg(long)]
        stats: Option<PathBuf>,
    },
    /// Master/slave error history under sliding-mode control.
    SyncDemo {
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Per-frame runtime against FFT size.
    Bench {
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Print the resolved configuration.
    ShowConfig,
}

fn load(common: &Common) -> anyhow::Result<Config> {
    let mut cfg = match &common.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    for kv in &common.overrides {
        cfg.apply_override(kv)
            .with_context(|| format!("--set {kv}"))?;
    }
    if let Some(seed) = common.seed {
        cfg.sim.rng_seed = seed;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let cfg = load(&cli.common)?;
    match cli.command {
        Command::SweepBer { output } => {
            let rows = hcvlc_sim::run_ber_sweep(&cfg)?;
            with_output(output.as_deref(), |w| write_sweep_csv(w, &rows))?;
        }
        Command::SweepLeakage { output } => {
            let rows = hcvlc_sim::run_leakage_sweep(&cfg)?;
            with_output(output.as_deref(), |w| write_sweep_csv(w, &rows))?;
        }
        Command::SendImage {
            input,
            output,
            histogram,
            stats,
        } => {
            let image = read_pgm(&input).with_context(|| format!("reading {}", input.display()))?;
            let t = hcvlc_sim::send_image(&cfg, &image)?;
            write_pgm(&output, &t.recovered)?;
            if let Some(p) = histogram {
                std::fs::write(p, hcvlc_sim::histogram_csv(&t))?;
            }
            let summary = hcvlc_sim::image_stats_csv(&t);
            match stats {
                Some(p) => std::fs::write(p, summary)?,
                None => eprint!("{summary}"),
            }
        }
        Command::SyncDemo { output } => {
            let demo = hcvlc_sim::sync_demo(&cfg)?;
            with_output(output.as_deref(), |w| w.write_all(demo.to_csv().as_bytes()))?;
            if !demo.held(cfg.sim.sync_tol) {
                anyhow::bail!(
                    "synchronization did not reach and hold tolerance {:e} (first within tolerance: {:?})",
                    cfg.sim.sync_tol,
                    demo.first_converged
                );
            }
        }
        Command::Bench { output } => {
            let rows = hcvlc_sim::bench_scaling(&cfg)?;
            with_output(output.as_deref(), |w| {
                w.write_all(hcvlc_sim::bench_csv(&rows).as_bytes())
            })?;
        }
        Command::ShowConfig => print!("{}", cfg.to_text()),
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
