use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser};
use otm::pipeline::{run_pipeline, RunConfig, Settings, Subcommand};

#[derive(Parser)]
#[command(name = "otm", version, about = "Order book replay and omniscient-trader profit bounds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Subcommand)]
enum Command {
    /// Generate a synthetic event feed and its quote feeds
    Gen(Flags),
    /// Rebuild the book event by event, with checksums and derived quotes
    Replay(Flags),
    /// Check feeds for integrity violations
    Validate(Flags),
    /// Full-book omniscient trader over every holding period
    Ot(Flags),
    /// Quote-level omniscient trader
    QuoteOt(Flags),
    /// Composite-to-primary profit ratios
    Ratio(Flags),
    /// Fit profit = a * quotes^b
    Fit(Flags),
    /// Extrapolate a fitted model over a universe of symbols
    Extrapolate(Flags),
    /// Aggregate result files into report tables
    Report(Flags),
}

#[derive(Args)]
struct Flags {
    /// `key = value` settings file; flags override it
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, num_args = 1..)]
    input: Vec<String>,
    #[arg(long, num_args = 1..)]
    composite: Vec<String>,
    #[arg(long)]
    model: Option<String>,
    /// Event feed path for `gen`; `-` for stdout
    #[arg(long)]
    output: Option<String>,
    #[arg(long)]
    out_dir: Option<String>,
    /// Comma-separated holding periods in ms
    #[arg(long)]
    holding_ms: Option<String>,
    #[arg(long)]
    grid_ms: Option<String>,
    /// Dollars per share per side
    #[arg(long)]
    fee: Option<String>,
    #[arg(long)]
    tick_size: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    duration_s: Option<String>,
    #[arg(long)]
    limit_hz: Option<String>,
    #[arg(long)]
    market_hz: Option<String>,
    #[arg(long)]
    cancel_hz: Option<String>,
    #[arg(long)]
    offset_p: Option<String>,
    #[arg(long)]
    mean_size: Option<String>,
    #[arg(long)]
    init_mid: Option<String>,
    #[arg(long)]
    symbol: Option<String>,
    #[arg(long)]
    composite_fraction: Option<String>,
    /// Comma-separated alternative holding periods in ms
    #[arg(long)]
    variable_holding: Option<String>,
    #[arg(long)]
    max_volume: Option<String>,
    #[arg(long)]
    multiplier: Option<String>,
    /// `event` or `quote`
    #[arg(long)]
    kind: Option<String>,
}

impl Flags {
    fn settings(&self) -> otm::Result<Settings> {
        let mut s = match &self.config {
            Some(path) => Settings::load(path)?,
            None => Settings::default(),
        };
        let mut flags = Settings::default();
        if !self.input.is_empty() {
            flags.set("input", self.input.join(","))?;
        }
        if !self.composite.is_empty() {
            flags.set("composite", self.composite.join(","))?;
        }
        let single = [
            ("model", &self.model),
            ("output", &self.output),
            ("out_dir", &self.out_dir),
            ("holding_ms", &self.holding_ms),
            ("grid_ms", &self.grid_ms),
            ("fee", &self.fee),
            ("tick_size", &self.tick_size),
            ("seed", &self.seed),
            ("duration_s", &self.duration_s),
            ("limit_hz", &self.limit_hz),
            ("market_hz", &self.market_hz),
            ("cancel_hz", &self.cancel_hz),
            ("offset_p", &self.offset_p),
            ("mean_size", &self.mean_size),
            ("init_mid", &self.init_mid),
            ("symbol", &self.symbol),
            ("composite_fraction", &self.composite_fraction),
            ("variable_holding", &self.variable_holding),
            ("max_volume", &self.max_volume),
            ("multiplier", &self.multiplier),
            ("kind", &self.kind),
        ];
        for (key, value) in single {
            if let Some(v) = value {
                flags.set(key, v.as_str())?;
            }
        }
        s.overlay(&flags);
        Ok(s)
    }
}

fn run(cli: Cli) -> otm::Result<Vec<PathBuf>> {
    let (sub, flags) = match cli.command {
        Command::Gen(f) => (Subcommand::Gen, f),
        Command::Replay(f) => (Subcommand::Replay, f),
        Command::Validate(f) => (Subcommand::Validate, f),
        Command::Ot(f) => (Subcommand::Ot, f),
        Command::QuoteOt(f) => (Subcommand::QuoteOt, f),
        Command::Ratio(f) => (Subcommand::Ratio, f),
        Command::Fit(f) => (Subcommand::Fit, f),
        Command::Extrapolate(f) => (Subcommand::Extrapolate, f),
        Command::Report(f) => (Subcommand::Report, f),
    };
    let config = RunConfig::from_settings(sub, &flags.settings()?)?;
    run_pipeline(&config)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(paths) => {
            for p in paths {
                eprintln!("wrote {}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("otm: {e}");
            ExitCode::FAILURE
        }
    }
}
