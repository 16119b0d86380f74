//! Price-time priority limit order book.
//!
//! Each side keeps its price levels in a `BTreeMap` keyed by tick price; a
//! level holds its orders in arrival order. A live-order index maps order ids
//! to their level so cancels, reduces and executes are direct lookups.

use std::collections::{BTreeMap, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, IntegrityError};
use crate::event::{EventAction, MarketEvent};
use crate::price::{Cash, Side, TickPrice};

/// How incoming events are interpreted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeedMode {
    /// The book matches marketable adds itself.
    #[default]
    Match,
    /// Executions arrive as explicit messages; adds never match.
    Log,
}

impl FeedMode {
    pub fn as_str(self) -> &'static str {
        match self {
            FeedMode::Match => "match",
            FeedMode::Log => "log",
        }
    }
}

impl std::str::FromStr for FeedMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "match" => Ok(FeedMode::Match),
            "log" => Ok(FeedMode::Log),
            other => Err(Error::Config(format!("unknown feed mode {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LimitOrder {
    pub order_id: u64,
    pub side: Side,
    pub price: TickPrice,
    pub qty: u64,
    pub arrival_seq: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PriceLevel {
    pub price: TickPrice,
    orders: VecDeque<LimitOrder>,
    volume: u64,
}

impl PriceLevel {
    fn new(price: TickPrice) -> Self {
        PriceLevel {
            price,
            orders: VecDeque::new(),
            volume: 0,
        }
    }

    pub fn volume(&self) -> u64 {
        self.volume
    }

    pub fn order_count(&self) -> usize {
        self.orders.len()
    }

    pub fn orders(&self) -> impl Iterator<Item = &LimitOrder> {
        self.orders.iter()
    }

    fn push(&mut self, order: LimitOrder) {
        self.volume += order.qty;
        self.orders.push_back(order);
    }

    fn position(&self, order_id: u64) -> Option<usize> {
        self.orders.iter().position(|o| o.order_id == order_id)
    }
}

/// A resting order touched by matching or by an explicit execute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fill {
    pub order_id: u64,
    pub price: TickPrice,
    pub qty: u64,
}

/// Top of book on both sides.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct InsideQuote {
    pub bid: Option<TickPrice>,
    pub bid_depth: u64,
    pub bid_order_count: u32,
    pub ask: Option<TickPrice>,
    pub ask_depth: u64,
    pub ask_order_count: u32,
}

impl InsideQuote {
    pub fn is_two_sided(&self) -> bool {
        self.bid.is_some() && self.ask.is_some()
    }

    pub fn spread(&self) -> Option<i64> {
        Some(self.ask?.ticks() - self.bid?.ticks())
    }
}

#[derive(Debug, Clone, Default)]
pub struct OrderBook {
    bids: BTreeMap<TickPrice, PriceLevel>,
    asks: BTreeMap<TickPrice, PriceLevel>,
    live: HashMap<u64, (Side, TickPrice)>,
    next_seq: u64,
    last_ts: Option<i64>,
}

impl OrderBook {
    pub fn new() -> Self {
        Self::default()
    }

    fn side_mut(&mut self, side: Side) -> &mut BTreeMap<TickPrice, PriceLevel> {
        match side {
            Side::Buy => &mut self.bids,
            Side::Sell => &mut self.asks,
        }
    }

    /// Price levels of one side, best price first.
    pub fn levels(&self, side: Side) -> Box<dyn Iterator<Item = &PriceLevel> + '_> {
        match side {
            Side::Buy => Box::new(self.bids.values().rev()),
            Side::Sell => Box::new(self.asks.values()),
        }
    }

    pub fn best(&self, side: Side) -> Option<&PriceLevel> {
        match side {
            Side::Buy => self.bids.values().next_back(),
            Side::Sell => self.asks.values().next(),
        }
    }

    pub fn depth(&self, side: Side) -> u64 {
        self.levels(side).map(PriceLevel::volume).sum()
    }

    pub fn live_orders(&self) -> usize {
        self.live.len()
    }

    pub fn is_live(&self, order_id: u64) -> bool {
        self.live.contains_key(&order_id)
    }

    pub fn order(&self, order_id: u64) -> Option<&LimitOrder> {
        let (side, price) = self.live.get(&order_id)?;
        let level = match side {
            Side::Buy => self.bids.get(price)?,
            Side::Sell => self.asks.get(price)?,
        };
        level.orders.iter().find(|o| o.order_id == order_id)
    }

    pub fn last_ts(&self) -> Option<i64> {
        self.last_ts
    }

    pub fn inside_quote(&self) -> InsideQuote {
        let mut q = InsideQuote::default();
        if let Some(level) = self.best(Side::Buy) {
            q.bid = Some(level.price);
            q.bid_depth = level.volume;
            q.bid_order_count = level.orders.len() as u32;
        }
        if let Some(level) = self.best(Side::Sell) {
            q.ask = Some(level.price);
            q.ask_depth = level.volume;
            q.ask_order_count = level.orders.len() as u32;
        }
        q
    }

    /// Apply one event. On error the book is left unchanged.
    pub fn apply_event(
        &mut self,
        event: &MarketEvent,
        mode: FeedMode,
    ) -> Result<Vec<Fill>, IntegrityError> {
        if let Some(prev) = self.last_ts {
            if event.ts_ns < prev {
                return Err(IntegrityError::TimestampRegression {
                    ts_ns: event.ts_ns,
                    prev_ns: prev,
                });
            }
        }
        let fills = match event.action {
            EventAction::Add { side, price, qty } => {
                self.add(event.order_id, side, price, qty, mode)?
            }
            EventAction::Cancel => {
                let remaining = self.remaining(event.order_id)?;
                self.take_from(event.order_id, remaining);
                Vec::new()
            }
            EventAction::Reduce { qty } => {
                self.check_decrement(event.order_id, qty)?;
                self.take_from(event.order_id, qty);
                Vec::new()
            }
            EventAction::Execute { qty } => {
                self.check_decrement(event.order_id, qty)?;
                let price = self.take_from(event.order_id, qty);
                vec![Fill {
                    order_id: event.order_id,
                    price,
                    qty,
                }]
            }
        };
        self.last_ts = Some(event.ts_ns);
        Ok(fills)
    }

    fn remaining(&self, order_id: u64) -> Result<u64, IntegrityError> {
        self.order(order_id)
            .map(|o| o.qty)
            .ok_or(IntegrityError::UnknownOrder(order_id))
    }

    fn check_decrement(&self, order_id: u64, qty: u64) -> Result<(), IntegrityError> {
        if qty == 0 {
            return Err(IntegrityError::ZeroQuantity);
        }
        let remaining = self.remaining(order_id)?;
        if qty > remaining {
            return Err(IntegrityError::QuantityExceedsRemaining {
                order_id,
                requested: qty,
                remaining,
            });
        }
        Ok(())
    }

    /// Remove `qty` shares from a live order, dropping the order and its level
    /// when they empty. Caller has validated the request.
    fn take_from(&mut self, order_id: u64, qty: u64) -> TickPrice {
        let (side, price) = self.live[&order_id];
        let book = self.side_mut(side);
        let level = book.get_mut(&price).expect("indexed level exists");
        let pos = level.position(order_id).expect("indexed order exists");
        level.volume -= qty;
        let order = &mut level.orders[pos];
        order.qty -= qty;
        if order.qty == 0 {
            level.orders.remove(pos);
            if level.orders.is_empty() {
                book.remove(&price);
            }
            self.live.remove(&order_id);
        }
        price
    }

    fn add(
        &mut self,
        order_id: u64,
        side: Side,
        price: TickPrice,
        qty: u64,
        mode: FeedMode,
    ) -> Result<Vec<Fill>, IntegrityError> {
        if qty == 0 {
            return Err(IntegrityError::ZeroQuantity);
        }
        if price.ticks() <= 0 {
            return Err(IntegrityError::NonPositivePrice(price.ticks()));
        }
        if self.live.contains_key(&order_id) {
            return Err(IntegrityError::DuplicateOrder(order_id));
        }
        let crosses = |best: TickPrice| match side {
            Side::Buy => price >= best,
            Side::Sell => price <= best,
        };
        let marketable = self
            .best(side.opposite())
            .is_some_and(|level| crosses(level.price));
        if marketable && mode == FeedMode::Log {
            return Err(IntegrityError::CrossingAdd(order_id));
        }

        let arrival_seq = self.next_seq;
        self.next_seq += 1;

        let mut remaining = qty;
        let mut fills = Vec::new();
        if marketable {
            let (book, live) = match side {
                Side::Buy => (&mut self.asks, &mut self.live),
                Side::Sell => (&mut self.bids, &mut self.live),
            };
            while remaining > 0 {
                let best = match side {
                    Side::Buy => book.keys().next(),
                    Side::Sell => book.keys().next_back(),
                };
                let Some(&level_price) = best else {
                    break;
                };
                if !crosses(level_price) {
                    break;
                }
                let level = book.get_mut(&level_price).expect("best level exists");
                while remaining > 0 {
                    let Some(front) = level.orders.front_mut() else {
                        break;
                    };
                    let take = remaining.min(front.qty);
                    front.qty -= take;
                    level.volume -= take;
                    remaining -= take;
                    fills.push(Fill {
                        order_id: front.order_id,
                        price: level_price,
                        qty: take,
                    });
                    if front.qty == 0 {
                        let done = level.orders.pop_front().expect("front exists");
                        live.remove(&done.order_id);
                    }
                }
                if level.orders.is_empty() {
                    book.remove(&level_price);
                }
            }
        }

        if remaining > 0 {
            self.side_mut(side)
                .entry(price)
                .or_insert_with(|| PriceLevel::new(price))
                .push(LimitOrder {
                    order_id,
                    side,
                    price,
                    qty: remaining,
                    arrival_seq,
                });
            self.live.insert(order_id, (side, price));
        }
        Ok(fills)
    }

    /// Cash to buy (`action = Buy`, walking asks) or proceeds from selling
    /// (`action = Sell`, walking bids) exactly `v` shares at resting prices.
    pub fn sweep(&self, action: Side, v: u64) -> Result<Cash, Error> {
        let mut left = v;
        let mut cash: Cash = 0;
        for level in self.levels(action.opposite()) {
            if left == 0 {
                break;
            }
            let take = left.min(level.volume);
            cash += level.price.notional(take);
            left -= take;
        }
        if left > 0 {
            return Err(Error::InsufficientDepth {
                requested: v,
                available: v - left,
            });
        }
        Ok(cash)
    }

    /// 64-bit FNV-1a over `side,price_ticks,qty,order_id;` for every resting
    /// order, best to worst, bids then asks.
    pub fn checksum(&self) -> u64 {
        let mut h = Fnv1a::new();
        for side in [Side::Buy, Side::Sell] {
            for level in self.levels(side) {
                for o in &level.orders {
                    h.write(
                        format!("{},{},{},{};", side.as_char(), o.price.ticks(), o.qty, o.order_id)
                            .as_bytes(),
                    );
                }
            }
        }
        h.finish()
    }
}

struct Fnv1a(u64);

impl Fnv1a {
    const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x0000_0100_0000_01b3;

    fn new() -> Self {
        Fnv1a(Self::OFFSET)
    }

    fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 ^= b as u64;
            self.0 = self.0.wrapping_mul(Self::PRIME);
        }
    }

    fn finish(&self) -> u64 {
        self.0
    }
}

/// Fold `events` into `book`, tagging any integrity failure with its index.
pub fn replay<'a>(
    book: &mut OrderBook,
    events: impl IntoIterator<Item = &'a MarketEvent>,
    mode: FeedMode,
) -> Result<(), Error> {
    for (index, ev) in events.into_iter().enumerate() {
        book.apply_event(ev, mode)
            .map_err(|source| Error::Integrity { index, source })?;
    }
    Ok(())
}

/// A book advanced monotonically through an event slice; `advance_to(t)`
/// leaves it at the state after the last event with `ts_ns <= t`.
#[derive(Debug, Clone)]
pub struct BookCursor<'a> {
    events: &'a [MarketEvent],
    next: usize,
    mode: FeedMode,
    book: OrderBook,
}

impl<'a> BookCursor<'a> {
    pub fn new(events: &'a [MarketEvent], mode: FeedMode) -> Self {
        BookCursor {
            events,
            next: 0,
            mode,
            book: OrderBook::new(),
        }
    }

    pub fn advance_to(&mut self, t_ns: i64) -> Result<&OrderBook, Error> {
        while let Some(ev) = self.events.get(self.next) {
            if ev.ts_ns > t_ns {
                break;
            }
            self.book
                .apply_event(ev, self.mode)
                .map_err(|source| Error::Integrity {
                    index: self.next,
                    source,
                })?;
            self.next += 1;
        }
        Ok(&self.book)
    }

    pub fn book(&self) -> &OrderBook {
        &self.book
    }

    /// Timestamp of the next unapplied event.
    pub fn next_ts(&self) -> Option<i64> {
        self.events.get(self.next).map(|e| e.ts_ns)
    }
}
