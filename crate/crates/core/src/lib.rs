pub mod error;
pub mod event;
pub mod feed;
pub mod lob;
pub mod otm;
pub mod pipeline;
pub mod powerlaw;
pub mod price;
pub mod quote_otm;
pub mod report;
pub mod synth;

pub use error::{Error, IntegrityError, Result};
pub use event::{EventAction, MarketEvent, QuoteRecord, QuoteTuple, Venue};
pub use feed::{FeedKind, FeedMeta, QuoteFilter};
pub use lob::{BookCursor, FeedMode, Fill, InsideQuote, OrderBook};
pub use price::{Cash, Side, TickPrice, TickSize};
