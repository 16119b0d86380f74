// Upper bound on trading profit over a synthetic session for several holding
// periods, with and without fees, and with a variable exit.

use otm::otm::{simulate, simulate_variable_holding, OtmConfig};
use otm::synth::{generate_events, SynthConfig};

type BoxResult<T> = Result<T, Box<dyn std::error::Error>>;

pub fn run_example() -> BoxResult<Vec<i64>> {
    let (meta, events) = generate_events(&SynthConfig {
        seed: 7,
        ..SynthConfig::default()
    })?;
    let ticks = meta.tick_size;
    let mut profits = Vec::new();
    println!("holding_ms  trades   shares  profit   profit(1c fee)");
    for h in [10, 100, 1_000, 10_000] {
        let free = simulate(&events, &meta, &OtmConfig::new(h))?;
        let fee = simulate(&events, &meta, &OtmConfig::new(h).with_fee(1))?;
        println!(
            "{h:>10}  {:>6}  {:>7}  {:>7}  {:>7}",
            free.totals.trades,
            free.totals.shares,
            ticks.format_dollars(free.totals.profit),
            ticks.format_dollars(fee.totals.profit)
        );
        profits.push(free.totals.profit);
    }

    let fixed = simulate(&events, &meta, &OtmConfig::new(1_000))?;
    let variable = simulate_variable_holding(
        &events,
        &meta,
        &OtmConfig::new(1_000).with_holding_grid(vec![10, 100, 500]),
    )?;
    println!(
        "1 s fixed ${} vs best exit within 1 s ${}",
        ticks.format_dollars(fixed.totals.profit),
        ticks.format_dollars(variable.totals.profit)
    );
    Ok(profits)
}

#[allow(dead_code)]
fn main() -> BoxResult<()> {
    run_example().map(|_| ())
}
