mod common;

use common::*;
use otm::feed::{validate_feed, write_events};
use otm::otm::{optimal_trade, simulate, simulate_variable_holding, OtmConfig, NS_PER_MS};
use otm::powerlaw::{extrapolate_universe, fit_power_law};
use otm::quote_otm::{count_quotes, simulate_quotes, QuoteOtmConfig};
use otm::synth::{derive_quotes, generate_events, SynthConfig};
use otm::{FeedKind, FeedMeta, FeedMode, MarketEvent, OrderBook, QuoteRecord, Side, TickPrice, Venue};
use rand_core::RngCore;

const MS: i64 = NS_PER_MS;

#[test]
fn poisson_event_count_matches_rates() {
    let cfg = SynthConfig {
        duration_s: 60.0,
        ..SynthConfig::default()
    };
    let expected = cfg.duration_s * cfg.total_rate();
    let counts: Vec<f64> = (7..27)
        .map(|seed| generate_events(&SynthConfig { seed, ..cfg.clone() }).unwrap().1.len() as f64)
        .collect();
    let mean = counts.iter().sum::<f64>() / counts.len() as f64;
    assert!(
        (mean - expected).abs() <= 0.05 * expected,
        "mean {mean} vs expected {expected}"
    );
}

#[test]
fn worked_example_as_feed_records_new_inside() {
    let mut events = example_book_events();
    events.push(MarketEvent::add(34_200_001_000_000, 99, Side::Buy, 24_080, 2000));
    let quotes = derive_quotes(&events, FeedMode::Match, "EX", Venue::Primary).unwrap();
    let first = &quotes[0];
    assert_eq!((first.bid, first.ask), (TickPrice(24_062), TickPrice(24_069)));
    let last = quotes.last().unwrap();
    assert_eq!((last.bid, last.bid_size), (TickPrice(24_080), 300));
    assert_eq!((last.ask, last.ask_size), (TickPrice(24_090), 1_000));
    assert_eq!(quotes.len(), count_inside_changes(&events));
}

#[test]
fn seed_three_quote_count_matches_dual_replay() {
    let (meta, events) = generate_events(&SynthConfig {
        seed: 3,
        ..SynthConfig::default()
    })
    .unwrap();
    let quotes = derive_quotes(&events, meta.mode, &meta.symbol, Venue::Primary).unwrap();
    assert_eq!(quotes.len(), count_inside_changes(&events));
    assert_eq!(count_quotes(&quotes), quotes.len() as u64);
}

#[test]
fn worked_trade_examples_match_brute_force() {
    let entry = book_from(&[(1000, 100), (1002, 100)], &[(998, 100)]);
    let exit = book_from(&[(1005, 100)], &[(1003, 150), (1001, 50)]);
    for (fee, volume, profit) in [(0, 150, 350), (1, 100, 100)] {
        let t = optimal_trade(&entry, &exit, fee, None).unwrap();
        assert_eq!((t.direction, t.volume, t.profit), (Side::Buy, volume, profit));
        assert_eq!(brute_force_trade(&entry, &exit, fee, None), Some((Side::Buy, volume, profit)));
    }
}

fn naive_at(events: &[MarketEvent], t: i64) -> OrderBook {
    let mut n = NaiveBook::default();
    for ev in events.iter().take_while(|e| e.ts_ns <= t) {
        n.apply(ev).unwrap();
    }
    let flat = |side| -> Vec<(i64, u64)> {
        n.levels(side)
            .into_iter()
            .map(|(p, os)| (p, os.iter().map(|o| o.1).sum()))
            .collect()
    };
    book_from(&flat(Side::Sell), &flat(Side::Buy))
}

#[test]
fn three_instant_feed_equals_brute_force() {
    let events = vec![
        MarketEvent::add(0, 1, Side::Sell, 1002, 100),
        MarketEvent::add(0, 2, Side::Buy, 1000, 100),
        MarketEvent::add(20 * MS, 3, Side::Buy, 1001, 50),
        MarketEvent::cancel(40 * MS, 2),
        MarketEvent::add(40 * MS, 4, Side::Buy, 1005, 30),
        MarketEvent::cancel(70 * MS, 3),
        MarketEvent::add(70 * MS, 5, Side::Buy, 995, 10),
        MarketEvent::add(70 * MS, 6, Side::Sell, 999, 40),
        MarketEvent::add(100 * MS, 7, Side::Sell, 1010, 5),
    ];
    let h = 50;
    let r = simulate(&events, &FeedMeta::default(), &OtmConfig::new(h)).unwrap();
    assert_eq!(r.diagnostics.instants, 3);
    let mut expected = 0;
    for t in [0, 20 * MS, 40 * MS] {
        let entry = naive_at(&events, t);
        let exit = naive_at(&events, t + h as i64 * MS);
        expected += brute_force_trade(&entry, &exit, 0, None).map_or(0, |x| x.2);
    }
    assert!(expected > 0);
    assert_eq!(r.totals.profit, expected);
}

fn quote(ts_ms: i64, bid: i64, bid_size: u64, ask: i64, ask_size: u64) -> QuoteRecord {
    QuoteRecord {
        ts_ns: ts_ms * MS,
        symbol: "Q".into(),
        venue: Venue::Primary,
        bid: TickPrice(bid),
        bid_size,
        ask: TickPrice(ask),
        ask_size,
    }
}

#[test]
fn four_quote_feed_matches_hand_enumeration() {
    let quotes = vec![
        quote(0, 100, 10, 102, 20),
        quote(10, 103, 5, 104, 8),
        quote(20, 99, 7, 101, 9),
        quote(30, 99, 7, 100, 4),
    ];
    let r = simulate_quotes(&quotes, &FeedMeta::new("Q", "2008-10-01"), &QuoteOtmConfig::new(10)).unwrap();
    // t=0 buys 5 for +1 each, t=10 sells 5 for +2 each, t=20 has no edge.
    assert_eq!(r.diagnostics.instants, 3);
    assert_eq!((r.totals.profit, r.totals.trades, r.totals.shares), (15, 2, 10));
    assert_eq!(r.trades[1].direction, Side::Sell);
}

#[test]
fn variable_holding_catches_the_midway_peak() {
    let events = vec![
        MarketEvent::add(0, 1, Side::Sell, 1002, 100),
        MarketEvent::add(0, 2, Side::Buy, 1000, 100),
        MarketEvent::cancel(50 * MS, 1),
        MarketEvent::cancel(50 * MS, 2),
        MarketEvent::add(50 * MS, 3, Side::Sell, 1012, 100),
        MarketEvent::add(50 * MS, 4, Side::Buy, 1010, 100),
        MarketEvent::cancel(100 * MS, 3),
        MarketEvent::cancel(100 * MS, 4),
        MarketEvent::add(100 * MS, 5, Side::Sell, 1002, 100),
        MarketEvent::add(100 * MS, 6, Side::Buy, 1000, 100),
        MarketEvent::add(200 * MS, 7, Side::Sell, 1050, 1),
    ];
    let meta = FeedMeta::default();
    let fixed = simulate(&events, &meta, &OtmConfig::new(100)).unwrap();
    let var = simulate_variable_holding(&events, &meta, &OtmConfig::new(100).with_holding_grid(vec![50]))
        .unwrap();
    assert_eq!(fixed.totals.profit, 800);
    assert_eq!(var.totals.profit, 1600);
    assert_eq!(var.trades[0].holding_ms, 50);
}

#[test]
fn extrapolation_matches_direct_summation() {
    let mut r = rng(99);
    let universe: Vec<(String, u64)> = (0..100)
        .map(|i| (format!("S{i}"), 1 + r.next_u64() % 5_000_000))
        .collect();
    let pts: Vec<(f64, f64)> = universe
        .iter()
        .take(19)
        .map(|(_, q)| (*q as f64, 3.0 * (*q as f64).powf(0.9)))
        .collect();
    let m = fit_power_law(&pts).unwrap();
    let est = extrapolate_universe(&m, &universe, 2.0);
    let direct: f64 = universe.iter().map(|(_, q)| 2.0 * 3.0 * (*q as f64).powf(0.9)).sum();
    assert!((est.total - direct).abs() / direct < 1e-9);

    let in_sample: Vec<(String, u64)> = universe[..19].to_vec();
    let est = extrapolate_universe(&m, &in_sample, 1.0);
    let fitted: f64 = pts.iter().map(|p| p.1).sum();
    assert!((est.total - fitted).abs() / fitted < 1e-9);
}

#[test]
fn generated_feed_validates_clean() {
    let (meta, events) = generate_events(&SynthConfig::default()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("feed.csv.gz");
    write_events(&path, &meta, &events).unwrap();
    let report = validate_feed(&path, FeedKind::Event).unwrap();
    assert!(report.is_ok(), "{:?}", report.violations);
    assert_eq!(report.records, events.len() as u64);
}

#[test]
fn no_limit_flow_means_no_trades() {
    let (meta, events) = generate_events(&SynthConfig {
        limit_rate_hz: 0.0,
        ..SynthConfig::default()
    })
    .unwrap();
    let r = simulate(&events, &meta, &OtmConfig::new(1000)).unwrap();
    assert_eq!(r.totals.trades, 0);
}
