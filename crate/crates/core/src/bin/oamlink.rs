use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use oamlink::cli::{self, Command};
use oamlink::config::RunConfig;

const DEFAULTS: &str = include_str!("../../configs/default.conf");

#[derive(Parser)]
#[command(name = "oamlink", version, about = "OAM link crosstalk and BER under pointing error")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args)]
struct Common {
    /// Configuration file layered over the built-in defaults.
    #[arg(short, long)]
    config: Vec<PathBuf>,
    /// `key=value` override, applied last.
    #[arg(short = 's', long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Output CSV; defaults to output.path or `<command>.csv`.
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Crosstalk against pointing offset for each method.
    CrosstalkCurve(Common),
    /// BER along one sweep axis.
    BerCurve {
        #[command(flatten)]
        common: Common,
        /// Add Monte Carlo estimates next to the analytic values.
        #[arg(long)]
        monte_carlo: bool,
    },
    /// Simulated BER with a 95% interval.
    MonteCarlo(Common),
    /// Waist that minimizes the averaged BER.
    Optimize(Common),
    /// Two-stream mode sets ordered by averaged BER.
    RankModes(Common),
    /// Single-worker timings of every method.
    Bench(Common),
}

fn load(common: &Common) -> oamlink::Result<RunConfig> {
    let mut cfg = RunConfig::parse(DEFAULTS)?;
    for path in &common.config {
        cfg.merge(&RunConfig::load(path)?);
    }
    for pair in &common.set {
        cfg.set_pair(pair)?;
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let args = Cli::parse();
    let (command, common) = match &args.command {
        Cmd::CrosstalkCurve(c) => (Command::CrosstalkCurve, c),
        Cmd::BerCurve { common, monte_carlo } => (Command::BerCurve { monte_carlo: *monte_carlo }, common),
        Cmd::MonteCarlo(c) => (Command::MonteCarlo, c),
        Cmd::Optimize(c) => (Command::Optimize, c),
        Cmd::RankModes(c) => (Command::RankModes, c),
        Cmd::Bench(c) => (Command::Bench, c),
    };
    let result = (|| {
        if let Some(n) = cli::workers_from_env()? {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| oamlink::Error::Config(format!("thread pool: {e}")))?;
        }
        let cfg = load(common)?;
        let out = common
            .out
            .clone()
            .or_else(|| cfg.raw("output.path").map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from(format!("{}.csv", command.name())));
        let code = cli::run(command, &cfg, &out)?;
        eprintln!("wrote {} (exit {code})", out.display());
        Ok::<_, oamlink::Error>(code)
    })();
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("oamlink: {e}");
            ExitCode::from(cli::exit_code_for(&e) as u8)
        }
    }
}
