//! Feed record types: order-level market events and inside quotes.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::price::{Side, TickPrice};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EventAction {
    /// New limit order.
    Add {
        side: Side,
        price: TickPrice,
        qty: u64,
    },
    /// Remove the remaining quantity of a live order.
    Cancel,
    /// Partial cancel; keeps queue priority.
    Reduce { qty: u64 },
    /// Exchange-reported execution against a resting order.
    Execute { qty: u64 },
}

impl EventAction {
    pub fn code(&self) -> char {
        match self {
            EventAction::Add { .. } => 'A',
            EventAction::Cancel => 'X',
            EventAction::Reduce { .. } => 'R',
            EventAction::Execute { .. } => 'E',
        }
    }
}

/// One exchange message.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MarketEvent {
    /// Nanoseconds since local midnight.
    pub ts_ns: i64,
    pub order_id: u64,
    pub action: EventAction,
}

impl MarketEvent {
    pub fn add(ts_ns: i64, order_id: u64, side: Side, price: i64, qty: u64) -> Self {
        MarketEvent {
            ts_ns,
            order_id,
            action: EventAction::Add {
                side,
                price: TickPrice(price),
                qty,
            },
        }
    }

    pub fn cancel(ts_ns: i64, order_id: u64) -> Self {
        MarketEvent {
            ts_ns,
            order_id,
            action: EventAction::Cancel,
        }
    }

    pub fn reduce(ts_ns: i64, order_id: u64, qty: u64) -> Self {
        MarketEvent {
            ts_ns,
            order_id,
            action: EventAction::Reduce { qty },
        }
    }

    pub fn execute(ts_ns: i64, order_id: u64, qty: u64) -> Self {
        MarketEvent {
            ts_ns,
            order_id,
            action: EventAction::Execute { qty },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Venue {
    Primary,
    Composite,
}

impl Venue {
    pub fn code(self) -> &'static str {
        match self {
            Venue::Primary => "P",
            Venue::Composite => "C",
        }
    }

    pub fn from_code(code: &str) -> Option<Venue> {
        match code {
            "P" => Some(Venue::Primary),
            "C" => Some(Venue::Composite),
            _ => None,
        }
    }
}

impl fmt::Display for Venue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Venue::Primary => "primary",
            Venue::Composite => "composite",
        })
    }
}

/// Inside quote as published in trade-and-quote data: top of book only.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuoteRecord {
    pub ts_ns: i64,
    pub symbol: String,
    pub venue: Venue,
    pub bid: TickPrice,
    pub bid_size: u64,
    pub ask: TickPrice,
    pub ask_size: u64,
}

impl QuoteRecord {
    pub fn is_crossed(&self) -> bool {
        self.bid >= self.ask
    }

    /// Valid when uncrossed with positive sizes and a positive bid.
    pub fn is_valid(&self) -> bool {
        !self.is_crossed() && self.bid_size > 0 && self.ask_size > 0 && self.bid.ticks() > 0
    }

    pub fn spread(&self) -> i64 {
        self.ask.ticks() - self.bid.ticks()
    }

    /// The (bid, bid size, ask, ask size) tuple used for change detection.
    pub fn tuple(&self) -> QuoteTuple {
        QuoteTuple {
            bid: self.bid,
            bid_size: self.bid_size,
            ask: self.ask,
            ask_size: self.ask_size,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuoteTuple {
    pub bid: TickPrice,
    pub bid_size: u64,
    pub ask: TickPrice,
    pub ask_size: u64,
}
