// Write a feed as gzipped CSV, read it back and validate it, then show what
// validation reports for a damaged copy.

use otm::feed::{read_events, validate_feed, write_events};
use otm::synth::{generate_events, SynthConfig};
use otm::FeedKind;

type BoxResult<T> = Result<T, Box<dyn std::error::Error>>;

pub fn run_example() -> BoxResult<(usize, usize)> {
    let dir = tempfile::tempdir()?;
    let (meta, events) = generate_events(&SynthConfig {
        duration_s: 5.0,
        ..SynthConfig::default()
    })?;

    let path = dir.path().join("feed.csv.gz");
    write_events(&path, &meta, &events)?;
    let (back_meta, back) = read_events(&path)?;
    assert_eq!(back, events);
    println!("{} events for {} on {} survived the round trip", back.len(), back_meta.symbol, back_meta.date);

    let clean = validate_feed(&path, FeedKind::Event)?;
    println!("clean feed: {} records, {} violations", clean.records, clean.violations.len());

    let plain = dir.path().join("feed.csv");
    write_events(&plain, &meta, &events)?;
    let mut text = std::fs::read_to_string(&plain)?;
    text.push_str("1,C,999999,,,\n");
    std::fs::write(&plain, text)?;
    let damaged = validate_feed(&plain, FeedKind::Event)?;
    for v in &damaged.violations {
        println!("line {}: {} ({})", v.line, v.kind.label(), v.detail);
    }
    Ok((clean.violations.len(), damaged.violations.len()))
}

#[allow(dead_code)]
fn main() -> BoxResult<()> {
    run_example().map(|_| ())
}
