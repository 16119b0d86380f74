// The same session seen only through its quotes: the quote-level trader on
// the primary and composite feeds, and their profit ratio.

use otm::otm::{simulate, OtmConfig};
use otm::quote_otm::{composite_ratio, simulate_quotes, QuoteOtmConfig};
use otm::synth::{derive_quotes, generate_events, tighten_composite, SynthConfig};
use otm::Venue;

type BoxResult<T> = Result<T, Box<dyn std::error::Error>>;

pub fn run_example() -> BoxResult<f64> {
    let (meta, events) = generate_events(&SynthConfig {
        seed: 11,
        ..SynthConfig::default()
    })?;
    let primary = derive_quotes(&events, meta.mode, &meta.symbol, Venue::Primary)?;
    let composite = tighten_composite(&primary, 0.5)?;

    let h = 1_000;
    let full = simulate(&events, &meta, &OtmConfig::new(h))?;
    let p = simulate_quotes(&primary, &meta, &QuoteOtmConfig::new(h))?;
    let c = simulate_quotes(&composite, &meta, &QuoteOtmConfig::new(h))?;
    let ticks = meta.tick_size;
    println!("full book       ${}", ticks.format_dollars(full.totals.profit));
    println!("primary quotes  ${}", ticks.format_dollars(p.totals.profit));
    println!("composite       ${}", ticks.format_dollars(c.totals.profit));

    let report = composite_ratio(&[p], &[c])?;
    let row = &report.rows[0];
    println!("ratio {:?} ({:?})", row.ratio, row.status);
    Ok(row.ratio.unwrap_or(f64::NAN))
}

#[allow(dead_code)]
fn main() -> BoxResult<()> {
    run_example().map(|_| ())
}
