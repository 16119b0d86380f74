//! Omniscient trader restricted to inside quotes.
//!
//! With top-of-book data only, a round trip of `v` shares is allowed when `v`
//! fits both the size quoted at entry and the size quoted on the other side at
//! exit. All shares trade at the two quoted prices, so the optimum is either
//! the full volume cap or nothing.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::event::{QuoteRecord, QuoteTuple, Venue};
use crate::feed::{FeedMeta, QuoteFilter};
use crate::otm::{grid_instants, Diagnostics, SimulationResult, TradeRecord, NS_PER_MS};
use crate::price::{Cash, Side, TickPrice};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuoteOtmConfig {
    pub holding_ms: u64,
    pub grid_ms: u64,
    pub fee_per_share_per_side: Cash,
}

impl QuoteOtmConfig {
    pub fn new(holding_ms: u64) -> Self {
        QuoteOtmConfig {
            holding_ms,
            grid_ms: 10,
            fee_per_share_per_side: 0,
        }
    }

    pub fn with_fee(mut self, fee: Cash) -> Self {
        self.fee_per_share_per_side = fee;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.holding_ms == 0 || self.grid_ms == 0 {
            return Err(Error::Config("holding period and grid must be positive".into()));
        }
        if self.fee_per_share_per_side < 0 {
            return Err(Error::Config("fee must be non-negative".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuoteTradeRecord {
    pub t_ns: i64,
    pub direction: Side,
    pub volume: u64,
    pub entry_price: TickPrice,
    pub exit_price: TickPrice,
    pub profit: Cash,
    pub venue: Venue,
}

/// Best top-of-book round trip from `entry` to `exit`. Buying is capped by
/// the entry ask size and the exit bid size; selling by the entry bid size and
/// the exit ask size. Ties go to buying.
pub fn optimal_quote_trade(
    entry: &QuoteTuple,
    exit: &QuoteTuple,
    fee_per_share_per_side: Cash,
) -> Option<(Side, u64, TickPrice, TickPrice, Cash)> {
    let fee2 = 2 * fee_per_share_per_side;
    let buy_v = entry.ask_size.min(exit.bid_size);
    let buy = buy_v as i64 * (exit.bid.ticks() - entry.ask.ticks() - fee2);
    let sell_v = entry.bid_size.min(exit.ask_size);
    let sell = sell_v as i64 * (entry.bid.ticks() - exit.ask.ticks() - fee2);
    if buy >= sell && buy > 0 {
        Some((Side::Buy, buy_v, entry.ask, exit.bid, buy))
    } else if sell > 0 {
        Some((Side::Sell, sell_v, entry.bid, exit.ask, sell))
    } else {
        None
    }
}

/// Quote-record form of [`optimal_quote_trade`].
pub fn optimal_quote_record_trade(
    entry: &QuoteRecord,
    exit: &QuoteRecord,
    fee_per_share_per_side: Cash,
) -> Option<QuoteTradeRecord> {
    let (direction, volume, entry_price, exit_price, profit) =
        optimal_quote_trade(&entry.tuple(), &exit.tuple(), fee_per_share_per_side)?;
    Some(QuoteTradeRecord {
        t_ns: entry.ts_ns,
        direction,
        volume,
        entry_price,
        exit_price,
        profit,
        venue: entry.venue,
    })
}

/// Run the quote-level trader over one symbol's quotes from a single venue.
/// Decision instants follow the same grid rule as the full-book trader, with
/// every valid quote record counting as a change. The exit quote is the last
/// one at or before `t + h`.
pub fn simulate_quotes(
    quotes: &[QuoteRecord],
    meta: &FeedMeta,
    config: &QuoteOtmConfig,
) -> Result<SimulationResult> {
    config.validate()?;
    let venue = quotes.first().map_or(Venue::Primary, |q| q.venue);
    if let Some(q) = quotes.iter().find(|q| q.venue != venue || q.symbol != quotes[0].symbol) {
        return Err(Error::Config(format!(
            "quote feed mixes {} {} with {} {}",
            quotes[0].symbol, venue, q.symbol, q.venue
        )));
    }
    let timeline: Vec<(i64, QuoteTuple, bool)> = quotes
        .iter()
        .filter(|q| q.is_valid())
        .map(|q| (q.ts_ns, q.tuple(), true))
        .collect();
    let end_ns = timeline.last().map_or(0, |&(ts, _, _)| ts);
    let h_ns = config.holding_ms as i64 * NS_PER_MS;
    let instants = grid_instants(
        &timeline,
        |_| true,
        config.grid_ms as i64 * NS_PER_MS,
        h_ns,
        end_ns,
    );

    let mut exit_idx = 0usize;
    let mut diag = Diagnostics::default();
    let mut trades = Vec::new();
    let fee = config.fee_per_share_per_side;
    for (t_ns, entry) in instants {
        diag.instants += 1;
        while exit_idx + 1 < timeline.len() && timeline[exit_idx + 1].0 <= t_ns + h_ns {
            exit_idx += 1;
        }
        let exit = timeline[exit_idx].1;
        match optimal_quote_trade(&entry, &exit, fee) {
            Some((direction, volume, entry_price, exit_price, profit)) => {
                let entry_cash = entry_price.notional(volume);
                trades.push(TradeRecord {
                    t_ns,
                    holding_ms: config.holding_ms,
                    direction,
                    volume,
                    entry_cash,
                    exit_cash: exit_price.notional(volume),
                    fee_cash: 2 * fee * volume as i64,
                    profit,
                    ret: profit as f64 / entry_cash as f64,
                });
            }
            None => diag.no_trade += 1,
        }
    }
    let mut meta = meta.clone();
    if meta.symbol.is_empty() {
        if let Some(q) = quotes.first() {
            meta.symbol = q.symbol.clone();
        }
    }
    Ok(SimulationResult::from_trades(
        &meta,
        config.holding_ms,
        Some(venue),
        trades,
        diag,
    ))
}

/// Number of quotes that survive crossed/empty filtering.
pub fn count_quotes(quotes: &[QuoteRecord]) -> u64 {
    quotes.iter().filter(|q| q.is_valid()).count() as u64
}

/// Count quotes in a feed file without holding it in memory.
pub fn count_quotes_in_file(path: impl AsRef<Path>) -> Result<u64> {
    let mut n = 0;
    for q in crate::feed::open_quotes(path, QuoteFilter::DropInvalid)? {
        q?;
        n += 1;
    }
    Ok(n)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RatioStatus {
    Ok,
    /// Primary profit is zero; excluded from the mean.
    ZeroPrimary,
    /// Both profits zero.
    Undefined,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymbolRatio {
    pub symbol: String,
    pub holding_ms: u64,
    pub primary_profit: Cash,
    pub composite_profit: Cash,
    pub ratio: Option<f64>,
    pub status: RatioStatus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioReport {
    pub rows: Vec<SymbolRatio>,
    /// Mean over rows with a defined ratio.
    pub mean: Option<f64>,
}

/// Composite-to-primary profit ratio for every (symbol, holding period)
/// present in both result sets.
pub fn composite_ratio(
    primary: &[SimulationResult],
    composite: &[SimulationResult],
) -> Result<RatioReport> {
    let key = |r: &SimulationResult| (r.symbol.clone(), r.holding_ms);
    let mut prim: BTreeMap<(String, u64), Cash> = BTreeMap::new();
    for r in primary {
        *prim.entry(key(r)).or_default() += r.totals.profit;
    }
    let mut comp: BTreeMap<(String, u64), Cash> = BTreeMap::new();
    for r in composite {
        *comp.entry(key(r)).or_default() += r.totals.profit;
    }
    if prim.keys().ne(comp.keys()) {
        return Err(Error::Config(
            "primary and composite results cover different symbols or holding periods".into(),
        ));
    }
    let rows: Vec<SymbolRatio> = prim
        .into_iter()
        .map(|((symbol, holding_ms), p)| {
            let c = comp[&(symbol.clone(), holding_ms)];
            let (ratio, status) = match (p, c) {
                (0, 0) => (None, RatioStatus::Undefined),
                (0, _) => (None, RatioStatus::ZeroPrimary),
                _ => (Some(c as f64 / p as f64), RatioStatus::Ok),
            };
            SymbolRatio {
                symbol,
                holding_ms,
                primary_profit: p,
                composite_profit: c,
                ratio,
                status,
            }
        })
        .collect();
    let defined: Vec<f64> = rows.iter().filter_map(|r| r.ratio).collect();
    let mean = (!defined.is_empty()).then(|| defined.iter().sum::<f64>() / defined.len() as f64);
    Ok(RatioReport { rows, mean })
}

/// Pearson correlation between full-book and quote-level profits, paired on
/// (symbol, date, holding period). `None` with fewer than two pairs or when
/// either side has no variance.
pub fn profit_correlation(full: &[SimulationResult], quote: &[SimulationResult]) -> Option<f64> {
    let key = |r: &SimulationResult| (r.symbol.clone(), r.date.clone(), r.holding_ms);
    let full: BTreeMap<_, Cash> = full.iter().map(|r| (key(r), r.totals.profit)).collect();
    let pairs: Vec<(f64, f64)> = quote
        .iter()
        .filter_map(|r| full.get(&key(r)).map(|&f| (f as f64, r.totals.profit as f64)))
        .collect();
    if pairs.len() < 2 {
        return None;
    }
    let n = pairs.len() as f64;
    let mx = pairs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pairs.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in &pairs {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    (sxx > 0.0 && syy > 0.0).then(|| sxy / (sxx * syy).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tuple(bid: i64, bid_size: u64, ask: i64, ask_size: u64) -> QuoteTuple {
        QuoteTuple {
            bid: TickPrice(bid),
            bid_size,
            ask: TickPrice(ask),
            ask_size,
        }
    }

    #[test]
    fn buy_capped_by_exit_bid_size() {
        let entry = tuple(999, 10, 1000, 100);
        let exit = tuple(1005, 50, 1006, 10);
        let (dir, v, _, _, profit) = optimal_quote_trade(&entry, &exit, 0).unwrap();
        assert_eq!((dir, v, profit), (Side::Buy, 50, 250));
    }

    #[test]
    fn unchanged_quote_never_trades() {
        let q = tuple(999, 10, 1001, 10);
        assert_eq!(optimal_quote_trade(&q, &q, 0), None);
    }

    #[test]
    fn fee_must_be_beaten_per_share() {
        let entry = tuple(999, 10, 1000, 100);
        let exit = tuple(1002, 50, 1006, 10);
        assert!(optimal_quote_trade(&entry, &exit, 1).is_none());
        assert!(optimal_quote_trade(&entry, &exit, 0).is_some());
    }

    #[test]
    fn empty_feed() {
        let r = simulate_quotes(&[], &FeedMeta::default(), &QuoteOtmConfig::new(100)).unwrap();
        assert_eq!(r.totals.profit, 0);
        assert_eq!(count_quotes(&[]), 0);
    }

    #[test]
    fn ratio_flags_zero_primary() {
        let meta = |s: &str| FeedMeta::new(s, "2008-10-01");
        let mk = |s: &str, profit: Cash| {
            let trades = if profit > 0 {
                vec![TradeRecord {
                    t_ns: 0,
                    holding_ms: 10,
                    direction: Side::Buy,
                    volume: 1,
                    entry_cash: 100,
                    exit_cash: 100 + profit,
                    fee_cash: 0,
                    profit,
                    ret: profit as f64 / 100.0,
                }]
            } else {
                vec![]
            };
            SimulationResult::from_trades(&meta(s), 10, Some(Venue::Primary), trades, Diagnostics::default())
        };
        let report = composite_ratio(
            &[mk("A", 10), mk("B", 0), mk("C", 0)],
            &[mk("A", 25), mk("B", 5), mk("C", 0)],
        )
        .unwrap();
        assert_eq!(report.rows[0].ratio, Some(2.5));
        assert_eq!(report.rows[1].status, RatioStatus::ZeroPrimary);
        assert_eq!(report.rows[2].status, RatioStatus::Undefined);
        assert_eq!(report.mean, Some(2.5));
        assert!(composite_ratio(&[mk("A", 1)], &[mk("Z", 1)]).is_err());
    }

    fn result(symbol: &str, holding_ms: u64, profit: Cash) -> SimulationResult {
        let mut r = SimulationResult::from_trades(
            &FeedMeta::new(symbol, "2008-10-01"),
            holding_ms,
            None,
            Vec::new(),
            Diagnostics::default(),
        );
        r.totals.profit = profit;
        r
    }

    #[test]
    fn correlation_of_scaled_profits_is_one() {
        let full: Vec<_> = [(1, 100), (10, 400), (100, 900)].iter().map(|&(h, p)| result("A", h, p)).collect();
        let quote: Vec<_> = [(1, 30), (10, 120), (100, 270)].iter().map(|&(h, p)| result("A", h, p)).collect();
        assert!((profit_correlation(&full, &quote).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(profit_correlation(&full, &quote[..1]), None);
        let flat: Vec<_> = [1, 10, 100].iter().map(|&h| result("A", h, 5)).collect();
        assert_eq!(profit_correlation(&full, &flat), None);
    }
}
