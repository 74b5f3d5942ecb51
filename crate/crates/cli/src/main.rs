use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use hdir::harness::{self, ExperimentConfig};
use hdir::keyrate::Scenario;
use hdir::mcde::{ensemble_efficiency, mcde_threshold, EnsembleSim};
use hdir::nbldpc::DegreeDistribution;
use hdir::{Error, GfContext};

#[derive(Parser)]
#[command(name = "reconcile", version, about = "Information reconciliation simulator for high-dimensional QKD")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep a reconciliation method over a QBER grid.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        method: Option<String>,
        #[arg(long)]
        q: Option<usize>,
        /// Grid as `a:b:step`, a comma list or a single value.
        #[arg(long)]
        qber: Option<String>,
        #[arg(long)]
        frames: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte-Carlo density-evolution threshold of a degree distribution.
    Mcde {
        #[arg(long)]
        dist: PathBuf,
        #[arg(long)]
        grid: String,
        #[arg(long, default_value_t = hdir::mcde::DEFAULT_NODE_COUNT)]
        nodes: usize,
        #[arg(long, default_value_t = hdir::mcde::DEFAULT_MAX_ITERATIONS)]
        iterations: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Secret key length per scenario row from measured efficiencies.
    Keyrate {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        leak_from: PathBuf,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("reconcile: {e}");
            ExitCode::from(match e {
                Error::Io(_) => 3,
                Error::Protocol(_) => 1,
                _ => 2,
            })
        }
    }
}

fn dispatch(cmd: Command) -> hdir::Result<()> {
    match cmd {
        Command::Run { config, method, q, qber, frames, seed, out } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            let overrides = [
                ("method", method),
                ("q", q.map(|v| v.to_string())),
                ("qber", qber),
                ("frames", frames.map(|v| v.to_string())),
                ("seed", seed.map(|v| v.to_string())),
                ("out", out.map(|p| p.display().to_string())),
            ];
            for (key, value) in overrides {
                if let Some(v) = value {
                    cfg.set(key, &v)?;
                }
            }
            let rows = harness::run_experiment(&cfg)?;
            if cfg.out.is_none() {
                let mut w = csv_stdout();
                for r in &rows {
                    w.serialize(r).map_err(|e| Error::Io(e.into()))?;
                }
                w.flush()?;
            }
            Ok(())
        }
        Command::Mcde { dist, grid, nodes, iterations, seed } => {
            let dist = DegreeDistribution::load(&dist)?;
            let ctx = GfContext::new(dist.q)?;
            let (q, rate) = (dist.q, dist.design_rate);
            let sim = EnsembleSim {
                node_count: nodes,
                max_iterations: iterations,
                ..EnsembleSim::new(dist.clone(), harness::parse_grid(&grid)?)
            };
            let (threshold, records) = mcde_threshold(&sim, &ctx, seed)?;
            let mut out = std::io::stdout().lock();
            writeln!(out, "p,success,iterations,final_entropy")?;
            for r in &records {
                writeln!(out, "{},{},{},{:e}", r.p, r.success, r.iterations, r.entropy.last().copied().unwrap_or(f64::NAN))?;
            }
            match threshold.filter(|&t| t > 0.0) {
                Some(t) => {
                    let eeff = ensemble_efficiency(&dist, t, q)?;
                    writeln!(out, "# q={q} rate={rate} threshold={t} eeff={eeff:.4}")?;
                }
                None => writeln!(out, "# q={q} rate={rate} no grid point converged")?,
            }
            Ok(())
        }
        Command::Keyrate { scenario, leak_from } => {
            let scenario = Scenario::load(&scenario)?;
            let results = harness::read_csv(&leak_from)?;
            let rows = harness::keyrate_table(&scenario, &results)?;
            let mut w = csv_stdout();
            for r in &rows {
                w.serialize(r).map_err(|e| Error::Io(e.into()))?;
            }
            w.flush()?;
            Ok(())
        }
    }
}

fn csv_stdout() -> csv::Writer<std::io::Stdout> {
    csv::Writer::from_writer(std::io::stdout())
}
