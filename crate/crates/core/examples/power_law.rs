// Fit profit against quote count across a handful of synthetic symbols and
// extrapolate the model to a wider universe.

use otm::powerlaw::{extrapolate_universe, fit_power_law};
use otm::quote_otm::{count_quotes, simulate_quotes, QuoteOtmConfig};
use otm::synth::{derive_quotes, generate_events, SynthConfig};
use otm::Venue;

type BoxResult<T> = Result<T, Box<dyn std::error::Error>>;

pub fn run_example() -> BoxResult<f64> {
    let mut points = Vec::new();
    for (seed, duration_s) in [(1, 5.0), (2, 10.0), (3, 20.0), (4, 40.0), (5, 80.0), (6, 160.0)] {
        let (meta, events) = generate_events(&SynthConfig {
            seed,
            duration_s,
            ..SynthConfig::default()
        })?;
        let quotes = derive_quotes(&events, meta.mode, &meta.symbol, Venue::Primary)?;
        let r = simulate_quotes(&quotes, &meta, &QuoteOtmConfig::new(1_000))?;
        let dollars = meta.tick_size.to_dollars(r.totals.profit);
        println!("{}: {} quotes, ${:.2}", meta.symbol, count_quotes(&quotes), dollars);
        points.push((count_quotes(&quotes) as f64, dollars));
    }

    let model = fit_power_law(&points)?;
    println!("profit = {:.4} * quotes^{:.3}  (R^2 {:.3})", model.a, model.b, model.r_squared);

    let universe: Vec<(String, u64)> = (0..50).map(|i| (format!("U{i:02}"), 100 * (i + 1) * (i + 1))).collect();
    let est = extrapolate_universe(&model, &universe, 1.0);
    println!("universe of {} symbols: ${:.2}", universe.len(), est.total);
    for bin in &est.histogram {
        println!("  [{}, {}): {} symbols, ${:.2}", bin.lower, bin.upper, bin.count, bin.total);
    }
    Ok(est.total)
}

#[allow(dead_code)]
fn main() -> BoxResult<()> {
    run_example().map(|_| ())
}
