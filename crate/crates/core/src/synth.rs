//! Seeded zero-intelligence market generator and quote derivation.
//!
//! Arrivals form one Poisson process at rate `limit + market + cancel`; each
//! arrival is assigned a type in proportion to its rate.
//!
//! * Limit orders pick a side with equal odds and rest `k >= 1` ticks behind
//!   the opposite best price, `k` geometric with parameter
//!   `offset_geometric_p`. They never cross.
//! * Market orders take a geometric number of shares from the opposite side,
//!   capped so at least one share rests there. They are emitted as adds priced
//!   at the deepest level they reach, so match mode fills them completely.
//! * Cancels pick a live order uniformly and remove it (three times in four)
//!   or halve it with a reduce. The last order on a side is never touched.
//!
//! Once both sides are populated the book therefore stays two-sided.
//!
//! Randomness comes from ChaCha8 keyed with the little-endian seed followed by
//! 24 zero bytes. Uniforms take the top 53 bits of each 64-bit output; the
//! exponential and geometric draws use inverse CDFs, so the stream is
//! reproducible by any ChaCha8 implementation.

use std::collections::HashMap;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::event::{EventAction, MarketEvent, QuoteRecord, Venue};
use crate::feed::FeedMeta;
use crate::lob::{FeedMode, InsideQuote, OrderBook};
use crate::price::{Side, TickPrice, TickSize};

/// 09:30:00 in nanoseconds after midnight.
pub const MARKET_OPEN_NS: i64 = 34_200_000_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub seed: u64,
    pub duration_s: f64,
    pub limit_rate_hz: f64,
    pub market_rate_hz: f64,
    pub cancel_rate_hz: f64,
    pub init_mid: TickPrice,
    pub offset_geometric_p: f64,
    pub mean_order_size: f64,
    pub tick_size: TickSize,
    pub start_ns: i64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            seed: 1,
            duration_s: 60.0,
            limit_rate_hz: 20.0,
            market_rate_hz: 5.0,
            cancel_rate_hz: 20.0,
            init_mid: TickPrice(10_000),
            offset_geometric_p: 0.2,
            mean_order_size: 100.0,
            tick_size: TickSize::CENT,
            start_ns: MARKET_OPEN_NS,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        let rates = [self.limit_rate_hz, self.market_rate_hz, self.cancel_rate_hz];
        if rates.iter().any(|r| !r.is_finite() || *r < 0.0) {
            return Err(Error::Config("rates must be finite and non-negative".into()));
        }
        if !(self.offset_geometric_p > 0.0 && self.offset_geometric_p <= 1.0) {
            return Err(Error::Config("offset_geometric_p must lie in (0, 1]".into()));
        }
        if !(self.duration_s.is_finite() && self.duration_s >= 0.0) {
            return Err(Error::Config("duration_s must be non-negative".into()));
        }
        if !(self.mean_order_size >= 1.0) {
            return Err(Error::Config("mean_order_size must be at least 1".into()));
        }
        if self.init_mid.ticks() <= 1 {
            return Err(Error::Config("init_mid must exceed one tick".into()));
        }
        Ok(())
    }

    pub fn total_rate(&self) -> f64 {
        self.limit_rate_hz + self.market_rate_hz + self.cancel_rate_hz
    }
}

struct Draws(ChaCha8Rng);

impl Draws {
    fn new(seed: u64) -> Self {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&seed.to_le_bytes());
        Draws(ChaCha8Rng::from_seed(key))
    }

    /// Uniform on [0, 1).
    fn uniform(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    fn exponential(&mut self, rate: f64) -> f64 {
        -(1.0 - self.uniform()).ln() / rate
    }

    /// Geometric on {1, 2, ...} with success probability `p`.
    fn geometric(&mut self, p: f64) -> u64 {
        let u = self.uniform();
        if p >= 1.0 {
            return 1;
        }
        1 + ((1.0 - u).ln() / (1.0 - p).ln()).floor() as u64
    }

    fn below(&mut self, n: usize) -> usize {
        ((self.uniform() * n as f64) as usize).min(n - 1)
    }
}

/// Live order ids in a stable, seed-determined order.
#[derive(Default)]
struct LiveSet {
    ids: Vec<u64>,
    pos: HashMap<u64, usize>,
}

impl LiveSet {
    fn insert(&mut self, id: u64) {
        self.pos.insert(id, self.ids.len());
        self.ids.push(id);
    }

    fn remove(&mut self, id: u64) {
        if let Some(i) = self.pos.remove(&id) {
            self.ids.swap_remove(i);
            if let Some(&moved) = self.ids.get(i) {
                self.pos.insert(moved, i);
            }
        }
    }
}

/// Generate a match-mode event feed. Identical configs give identical feeds.
pub fn generate_events(config: &SynthConfig) -> Result<(FeedMeta, Vec<MarketEvent>)> {
    config.validate()?;
    let mut rng = Draws::new(config.seed);
    let mut book = OrderBook::new();
    let mut live = LiveSet::default();
    let mut events = Vec::new();
    let mut next_id = 1u64;
    let total = config.total_rate();
    let size_p = 1.0 / config.mean_order_size;
    let mut t = 0.0f64;

    while total > 0.0 {
        t += rng.exponential(total);
        if t > config.duration_s {
            break;
        }
        let ts_ns = config.start_ns + (t * 1e9).round() as i64;
        let pick = rng.uniform() * total;
        let event = if pick < config.limit_rate_hz {
            limit_order(config, &mut rng, &book, ts_ns, next_id, size_p)
        } else if pick < config.limit_rate_hz + config.market_rate_hz {
            market_order(&mut rng, &book, ts_ns, next_id, size_p)
        } else {
            cancel(&mut rng, &book, &live, ts_ns)
        };
        let Some(event) = event else { continue };
        if let EventAction::Add { .. } = event.action {
            next_id += 1;
        }
        let fills = book
            .apply_event(&event, FeedMode::Match)
            .map_err(|source| Error::Integrity {
                index: events.len(),
                source,
            })?;
        for f in &fills {
            if !book.is_live(f.order_id) {
                live.remove(f.order_id);
            }
        }
        if !book.is_live(event.order_id) {
            live.remove(event.order_id);
        } else if matches!(event.action, EventAction::Add { .. }) {
            live.insert(event.order_id);
        }
        events.push(event);
    }

    let meta = FeedMeta {
        symbol: format!("SYN{}", config.seed),
        date: "2008-10-01".into(),
        tick_size: config.tick_size,
        mode: FeedMode::Match,
        record_count: events.len() as u64,
    };
    Ok((meta, events))
}

fn limit_order(
    config: &SynthConfig,
    rng: &mut Draws,
    book: &OrderBook,
    ts_ns: i64,
    id: u64,
    size_p: f64,
) -> Option<MarketEvent> {
    let buy = rng.uniform() < 0.5;
    let offset = rng.geometric(config.offset_geometric_p) as i64;
    let qty = rng.geometric(size_p);
    let q = book.inside_quote();
    let mid = config.init_mid.ticks();
    let bid_ref = q.bid.map(|p| p.ticks());
    let ask_ref = q.ask.map(|p| p.ticks());
    let (side, price) = if buy {
        let ask = ask_ref.or(bid_ref.map(|b| b + 1)).unwrap_or(mid + 1);
        (Side::Buy, ask - offset)
    } else {
        let bid = bid_ref.or(ask_ref.map(|a| a - 1)).unwrap_or(mid);
        (Side::Sell, bid + offset)
    };
    (price > 0).then(|| MarketEvent::add(ts_ns, id, side, price, qty))
}

fn market_order(
    rng: &mut Draws,
    book: &OrderBook,
    ts_ns: i64,
    id: u64,
    size_p: f64,
) -> Option<MarketEvent> {
    let side = if rng.uniform() < 0.5 { Side::Buy } else { Side::Sell };
    let wanted = rng.geometric(size_p);
    let cap = book.depth(side.opposite()).saturating_sub(1);
    let qty = wanted.min(cap);
    if qty == 0 {
        return None;
    }
    let mut left = qty;
    let mut limit = None;
    for level in book.levels(side.opposite()) {
        limit = Some(level.price);
        left = left.saturating_sub(level.volume());
        if left == 0 {
            break;
        }
    }
    Some(MarketEvent::add(ts_ns, id, side, limit?.ticks(), qty))
}

fn cancel(rng: &mut Draws, book: &OrderBook, live: &LiveSet, ts_ns: i64) -> Option<MarketEvent> {
    if live.ids.is_empty() {
        return None;
    }
    let id = live.ids[rng.below(live.ids.len())];
    let full = rng.uniform() < 0.75;
    let order = book.order(id)?;
    let side_orders: usize = book.levels(order.side).map(|l| l.order_count()).sum();
    if side_orders <= 1 {
        return None;
    }
    if full || order.qty < 2 {
        Some(MarketEvent::cancel(ts_ns, id))
    } else {
        Some(MarketEvent::reduce(ts_ns, id, order.qty / 2))
    }
}

/// Replay `events` and emit a quote each time the two-sided inside quote
/// (prices, depths and order counts) differs from its value before the event.
pub fn derive_quotes(
    events: &[MarketEvent],
    mode: FeedMode,
    symbol: &str,
    venue: Venue,
) -> Result<Vec<QuoteRecord>> {
    let mut book = OrderBook::new();
    let mut prev = InsideQuote::default();
    let mut quotes = Vec::new();
    for (index, ev) in events.iter().enumerate() {
        book.apply_event(ev, mode)
            .map_err(|source| Error::Integrity { index, source })?;
        let q = book.inside_quote();
        if q != prev {
            if let (Some(bid), Some(ask)) = (q.bid, q.ask) {
                quotes.push(QuoteRecord {
                    ts_ns: ev.ts_ns,
                    symbol: symbol.to_string(),
                    venue,
                    bid,
                    bid_size: q.bid_depth,
                    ask,
                    ask_size: q.ask_depth,
                });
            }
        }
        prev = q;
    }
    Ok(quotes)
}

/// Shrink every spread to `ceil(fraction * spread)` ticks (never below one),
/// splitting the reduction between the two sides with the bid moving up by
/// the smaller half. Sizes and timestamps are kept; the venue becomes
/// composite.
pub fn tighten_composite(quotes: &[QuoteRecord], fraction: f64) -> Result<Vec<QuoteRecord>> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::Config(format!(
            "spread fraction must lie in (0, 1], got {fraction}"
        )));
    }
    Ok(quotes
        .iter()
        .map(|q| {
            let spread = q.spread();
            let mut out = q.clone();
            out.venue = Venue::Composite;
            if spread > 1 {
                let target = ((fraction * spread as f64) - 1e-9).ceil() as i64;
                let target = target.clamp(1, spread);
                let shrink = spread - target;
                out.bid = TickPrice(q.bid.ticks() + shrink / 2);
                out.ask = TickPrice(q.ask.ticks() - (shrink - shrink / 2));
            }
            out
        })
        .collect())
}
