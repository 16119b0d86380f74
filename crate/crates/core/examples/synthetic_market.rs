// Generate a seeded Poisson order flow, derive the primary quote feed and a
// tighter composite copy of it.

use otm::synth::{derive_quotes, generate_events, tighten_composite, SynthConfig};
use otm::{EventAction, Venue};

type BoxResult<T> = Result<T, Box<dyn std::error::Error>>;

pub fn run_example() -> BoxResult<(usize, usize)> {
    let config = SynthConfig {
        seed: 42,
        duration_s: 30.0,
        ..SynthConfig::default()
    };
    let (meta, events) = generate_events(&config)?;
    let adds = events.iter().filter(|e| matches!(e.action, EventAction::Add { .. })).count();
    println!(
        "{}: {} events ({} adds) in {} s, expected about {:.0}",
        meta.symbol,
        events.len(),
        adds,
        config.duration_s,
        config.duration_s * config.total_rate()
    );

    let primary = derive_quotes(&events, meta.mode, &meta.symbol, Venue::Primary)?;
    let composite = tighten_composite(&primary, 0.5)?;
    let mean_spread = |q: &[otm::QuoteRecord]| {
        q.iter().map(|r| (r.ask.ticks() - r.bid.ticks()) as f64).sum::<f64>() / q.len() as f64
    };
    println!(
        "{} quotes; mean spread {:.2} ticks primary, {:.2} composite",
        primary.len(),
        mean_spread(&primary),
        mean_spread(&composite)
    );
    Ok((events.len(), primary.len()))
}

#[allow(dead_code)]
fn main() -> BoxResult<()> {
    run_example().map(|_| ())
}
