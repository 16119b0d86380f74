// Drive every stage through the pipeline API, as the `otm` binary does:
// generate two feeds, simulate, compare venues and aggregate a report.

use std::path::PathBuf;

use otm::pipeline::{run_pipeline, RunConfig, Subcommand};

type BoxResult<T> = Result<T, Box<dyn std::error::Error>>;

pub fn run_example() -> BoxResult<Vec<PathBuf>> {
    let dir = tempfile::tempdir()?;
    let out = dir.path().to_path_buf();
    let config = |sub| RunConfig {
        out_dir: out.clone(),
        holding_ms: vec![100, 1_000],
        ..RunConfig::new(sub)
    };

    let mut feeds = Vec::new();
    for seed in [1, 2] {
        let mut gen = config(Subcommand::Gen);
        gen.synth.seed = seed;
        gen.synth.duration_s = 20.0;
        gen.composite_fraction = Some(0.5);
        run_pipeline(&gen)?;
        feeds.push(seed);
    }
    let path = |seed: &u64, suffix: &str| out.join(format!("SYN{seed}.{suffix}"));

    let ot = RunConfig {
        inputs: feeds.iter().map(|s| path(s, "events.csv")).collect(),
        ..config(Subcommand::Ot)
    };
    let mut written = run_pipeline(&ot)?;

    let ratio = RunConfig {
        inputs: feeds.iter().map(|s| path(s, "quotes.primary.csv")).collect(),
        composite_inputs: feeds.iter().map(|s| path(s, "quotes.composite.csv")).collect(),
        ..config(Subcommand::Ratio)
    };
    written.extend(run_pipeline(&ratio)?);

    let report = RunConfig {
        inputs: vec![out.join("ot.json")],
        ..config(Subcommand::Report)
    };
    written.extend(run_pipeline(&report)?);

    print!("{}", std::fs::read_to_string(out.join("ratio.csv"))?);
    print!("{}", std::fs::read_to_string(out.join("report").join("holding.csv"))?);
    let names = written
        .iter()
        .map(|p| PathBuf::from(p.strip_prefix(&out).unwrap_or(p)))
        .collect();
    Ok(names)
}

#[allow(dead_code)]
fn main() -> BoxResult<()> {
    run_example().map(|_| ())
}
