//! Omniscient trader over full order books.
//!
//! At every decision instant `t` the trader looks at the book at `t` and the
//! book at `t + h`, picks the direction and share count that maximise the
//! round-trip profit of crossing the spread on entry and again on exit, and
//! records the trade only if that profit is positive. Its trades never touch
//! the books it reads.
//!
//! Because sweep prices worsen share by share on both legs, the marginal
//! profit of the `v`-th share is nonincreasing in `v`. The optimum is found by
//! pairing the cheapest remaining entry share with the best remaining exit
//! share and stopping at the first pair that does not pay.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::event::{MarketEvent, Venue};
use crate::feed::FeedMeta;
use crate::lob::{BookCursor, FeedMode, InsideQuote, OrderBook};
use crate::price::{Cash, Side, TickSize};

pub const NS_PER_MS: i64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OtmConfig {
    pub holding_ms: u64,
    /// Spacing of the decision grid.
    pub grid_ms: u64,
    /// Charged on each share for each leg.
    pub fee_per_share_per_side: Cash,
    pub max_volume: Option<u64>,
    /// Alternative holding periods, all at most `holding_ms`. When non-empty
    /// each trade uses whichever of these (or `holding_ms`) pays best.
    pub holding_grid: Vec<u64>,
}

impl OtmConfig {
    pub fn new(holding_ms: u64) -> Self {
        OtmConfig {
            holding_ms,
            grid_ms: 10,
            fee_per_share_per_side: 0,
            max_volume: None,
            holding_grid: Vec::new(),
        }
    }

    pub fn with_fee(mut self, fee: Cash) -> Self {
        self.fee_per_share_per_side = fee;
        self
    }

    pub fn with_grid_ms(mut self, grid_ms: u64) -> Self {
        self.grid_ms = grid_ms;
        self
    }

    pub fn with_max_volume(mut self, max_volume: u64) -> Self {
        self.max_volume = Some(max_volume);
        self
    }

    pub fn with_holding_grid(mut self, grid: Vec<u64>) -> Self {
        self.holding_grid = grid;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.holding_ms == 0 {
            return Err(Error::Config("holding period must be positive".into()));
        }
        if self.grid_ms == 0 {
            return Err(Error::Config("decision grid must be positive".into()));
        }
        if self.fee_per_share_per_side < 0 {
            return Err(Error::Config("fee must be non-negative".into()));
        }
        if let Some(&bad) = self
            .holding_grid
            .iter()
            .find(|&&h| h == 0 || h > self.holding_ms)
        {
            return Err(Error::Config(format!(
                "holding grid entry {bad} must lie in (0, {}]",
                self.holding_ms
            )));
        }
        Ok(())
    }

    /// Holding periods to evaluate at each instant, ascending.
    fn holdings(&self) -> Vec<u64> {
        let mut hs = self.holding_grid.clone();
        hs.push(self.holding_ms);
        hs.sort_unstable();
        hs.dedup();
        hs
    }
}

/// A grid time at which the trader may act, with the inside quote it saw.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecisionInstant {
    pub t_ns: i64,
    pub quote: InsideQuote,
}

/// Grid instants `k * grid_ns`, from the first timeline entry up to
/// `end_ns - holding_ns`, at which some entry flagged as a change arrived
/// since the previous grid point and the state is usable. `timeline` holds
/// the state after each update in time order, flagged when the update changed
/// it; the state at `t` is the last entry at or before `t`.
pub fn grid_instants<K: Copy>(
    timeline: &[(i64, K, bool)],
    usable: impl Fn(&K) -> bool,
    grid_ns: i64,
    holding_ns: i64,
    end_ns: i64,
) -> Vec<(i64, K)> {
    assert!(grid_ns > 0, "grid spacing must be positive");
    let Some(&(first_ts, _, _)) = timeline.first() else {
        return Vec::new();
    };
    let ceil_grid = |ts: i64| ts.div_euclid(grid_ns) * grid_ns + if ts.rem_euclid(grid_ns) > 0 { grid_ns } else { 0 };
    let mut out = Vec::new();
    let mut t = ceil_grid(first_ts);
    let mut idx = 0;
    let mut state: Option<K> = None;
    while t + holding_ns <= end_ns {
        let mut fresh = false;
        while let Some(&(ts, k, changed)) = timeline.get(idx) {
            if ts > t {
                break;
            }
            state = Some(k);
            fresh |= changed;
            idx += 1;
        }
        if let Some(s) = state {
            if fresh && usable(&s) {
                out.push((t, s));
            }
        }
        match timeline.get(idx) {
            Some(&(next_ts, _, _)) => t = (t + grid_ns).max(ceil_grid(next_ts)),
            None => break,
        }
    }
    out
}

/// Decision instants for a full-book feed. `timeline` has one entry per
/// event: its timestamp and the inside quote after it. An event counts as a
/// change when it alters the inside quote (prices, depths or order counts).
/// Only two-sided books qualify.
pub fn decision_instants(
    timeline: &[(i64, InsideQuote)],
    grid_ms: u64,
    holding_ms: u64,
) -> Vec<DecisionInstant> {
    let Some(&(end_ns, _)) = timeline.last() else {
        return Vec::new();
    };
    let mut prev = InsideQuote::default();
    let flagged: Vec<(i64, InsideQuote, bool)> = timeline
        .iter()
        .map(|&(ts, q)| {
            let changed = q != prev;
            prev = q;
            (ts, q, changed)
        })
        .collect();
    grid_instants(
        &flagged,
        InsideQuote::is_two_sided,
        grid_ms as i64 * NS_PER_MS,
        holding_ms as i64 * NS_PER_MS,
        end_ns,
    )
    .into_iter()
    .map(|(t_ns, quote)| DecisionInstant { t_ns, quote })
    .collect()
}

/// Inside quote after every event.
pub fn inside_timeline(events: &[MarketEvent], mode: FeedMode) -> Result<Vec<(i64, InsideQuote)>> {
    let mut book = OrderBook::new();
    let mut out = Vec::with_capacity(events.len());
    for (index, ev) in events.iter().enumerate() {
        book.apply_event(ev, mode)
            .map_err(|source| Error::Integrity { index, source })?;
        out.push((ev.ts_ns, book.inside_quote()));
    }
    Ok(out)
}

/// The best round trip between two book states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OptimalTrade {
    pub direction: Side,
    pub volume: u64,
    /// Cost of a buy entry or proceeds of a sell entry.
    pub entry_cash: Cash,
    /// Proceeds of a buy exit or cost of a sell exit.
    pub exit_cash: Cash,
    pub fee_cash: Cash,
    pub profit: Cash,
}

impl OptimalTrade {
    pub fn return_on_entry(&self) -> f64 {
        self.profit as f64 / self.entry_cash as f64
    }
}

/// Greedy pairing of the entry ladder (best first for the trader) against the
/// exit ladder. `gain(entry, exit)` is the per-share margin before fees.
fn pair_ladders(
    mut entry: impl Iterator<Item = (i64, u64)>,
    mut exit: impl Iterator<Item = (i64, u64)>,
    gain: impl Fn(i64, i64) -> i64,
    fee: Cash,
    max_volume: Option<u64>,
) -> (u64, Cash, Cash) {
    let mut cap = max_volume.unwrap_or(u64::MAX);
    let (mut v, mut entry_cash, mut exit_cash) = (0u64, 0 as Cash, 0 as Cash);
    let mut cur_entry = entry.next();
    let mut cur_exit = exit.next();
    while cap > 0 {
        let (Some((ep, eq)), Some((xp, xq))) = (cur_entry, cur_exit) else {
            break;
        };
        if gain(ep, xp) - 2 * fee <= 0 {
            break;
        }
        let take = eq.min(xq).min(cap);
        v += take;
        cap -= take;
        entry_cash += ep * take as i64;
        exit_cash += xp * take as i64;
        cur_entry = if eq == take { entry.next() } else { Some((ep, eq - take)) };
        cur_exit = if xq == take { exit.next() } else { Some((xp, xq - take)) };
    }
    (v, entry_cash, exit_cash)
}

fn ladder(book: &OrderBook, side: Side) -> impl Iterator<Item = (i64, u64)> + '_ {
    book.levels(side).map(|l| (l.price.ticks(), l.volume()))
}

/// Profit-maximising round trip entering on `entry` and exiting on `exit`,
/// or `None` when nothing pays. Ties go to the smaller volume and to buying.
pub fn optimal_trade(
    entry: &OrderBook,
    exit: &OrderBook,
    fee_per_share_per_side: Cash,
    max_volume: Option<u64>,
) -> Option<OptimalTrade> {
    let fee = fee_per_share_per_side;
    let (bv, b_in, b_out) = pair_ladders(
        ladder(entry, Side::Sell),
        ladder(exit, Side::Buy),
        |ask_in, bid_out| bid_out - ask_in,
        fee,
        max_volume,
    );
    let buy = OptimalTrade {
        direction: Side::Buy,
        volume: bv,
        entry_cash: b_in,
        exit_cash: b_out,
        fee_cash: 2 * fee * bv as i64,
        profit: b_out - b_in - 2 * fee * bv as i64,
    };
    let (sv, s_in, s_out) = pair_ladders(
        ladder(entry, Side::Buy),
        ladder(exit, Side::Sell),
        |bid_in, ask_out| bid_in - ask_out,
        fee,
        max_volume,
    );
    let sell = OptimalTrade {
        direction: Side::Sell,
        volume: sv,
        entry_cash: s_in,
        exit_cash: s_out,
        fee_cash: 2 * fee * sv as i64,
        profit: s_in - s_out - 2 * fee * sv as i64,
    };
    let best = if sell.profit > buy.profit { sell } else { buy };
    (best.profit > 0).then_some(best)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TradeRecord {
    pub t_ns: i64,
    pub holding_ms: u64,
    pub direction: Side,
    pub volume: u64,
    pub entry_cash: Cash,
    pub exit_cash: Cash,
    pub fee_cash: Cash,
    pub profit: Cash,
    /// `profit / entry_cash`.
    pub ret: f64,
}

impl TradeRecord {
    pub fn from_optimal(t_ns: i64, holding_ms: u64, trade: &OptimalTrade) -> Self {
        TradeRecord {
            t_ns,
            holding_ms,
            direction: trade.direction,
            volume: trade.volume,
            entry_cash: trade.entry_cash,
            exit_cash: trade.exit_cash,
            fee_cash: trade.fee_cash,
            profit: trade.profit,
            ret: trade.return_on_entry(),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Totals {
    pub profit: Cash,
    pub trades: u64,
    pub shares: u64,
}

impl Totals {
    pub fn add_trade(&mut self, t: &TradeRecord) {
        self.profit += t.profit;
        self.trades += 1;
        self.shares += t.volume;
    }

    pub fn merge(&mut self, other: &Totals) {
        self.profit += other.profit;
        self.trades += other.trades;
        self.shares += other.shares;
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// Eligible decision instants examined.
    pub instants: u64,
    /// Instants whose exit book lacked a side.
    pub skipped_one_sided_exit: u64,
    /// Instants where no round trip paid.
    pub no_trade: u64,
}

impl Diagnostics {
    pub fn merge(&mut self, other: &Diagnostics) {
        self.instants += other.instants;
        self.skipped_one_sided_exit += other.skipped_one_sided_exit;
        self.no_trade += other.no_trade;
    }
}

/// Outcome of one simulation: one symbol, one day (or a merge of days), one
/// holding period.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationResult {
    pub symbol: String,
    pub date: String,
    pub holding_ms: u64,
    pub tick_size: TickSize,
    /// Set for quote-level simulations.
    pub venue: Option<Venue>,
    pub totals: Totals,
    pub avg_shares: f64,
    pub avg_profit: f64,
    pub avg_return: f64,
    /// Totals keyed by `YYYY-MM`.
    pub monthly: BTreeMap<String, Totals>,
    pub diagnostics: Diagnostics,
    pub trades: Vec<TradeRecord>,
}

impl SimulationResult {
    pub fn from_trades(
        meta: &FeedMeta,
        holding_ms: u64,
        venue: Option<Venue>,
        trades: Vec<TradeRecord>,
        diagnostics: Diagnostics,
    ) -> Self {
        let mut r = SimulationResult {
            symbol: meta.symbol.clone(),
            date: meta.date.clone(),
            holding_ms,
            tick_size: meta.tick_size,
            venue,
            totals: Totals::default(),
            avg_shares: 0.0,
            avg_profit: 0.0,
            avg_return: 0.0,
            monthly: BTreeMap::new(),
            diagnostics,
            trades: Vec::new(),
        };
        let month = meta.month();
        let mut m = Totals::default();
        for t in &trades {
            r.totals.add_trade(t);
            m.add_trade(t);
        }
        if m.trades > 0 {
            r.monthly.insert(month, m);
        }
        r.trades = trades;
        r.refresh_averages();
        r
    }

    fn refresh_averages(&mut self) {
        let n = self.totals.trades;
        if n == 0 {
            self.avg_shares = 0.0;
            self.avg_profit = 0.0;
            self.avg_return = 0.0;
        } else {
            self.avg_shares = self.totals.shares as f64 / n as f64;
            self.avg_profit = self.totals.profit as f64 / n as f64;
            self.avg_return = self.trades.iter().map(|t| t.ret).sum::<f64>() / n as f64;
        }
    }

    /// Fold another day of the same symbol and holding period into this one.
    /// Trades are kept in (date, time) order so the result does not depend on
    /// merge order.
    pub fn merge(&mut self, other: &SimulationResult) -> Result<()> {
        if other.symbol != self.symbol || other.holding_ms != self.holding_ms {
            return Err(Error::Config(format!(
                "cannot merge {}@{}ms into {}@{}ms",
                other.symbol, other.holding_ms, self.symbol, self.holding_ms
            )));
        }
        self.totals.merge(&other.totals);
        self.diagnostics.merge(&other.diagnostics);
        for (month, t) in &other.monthly {
            self.monthly.entry(month.clone()).or_default().merge(t);
        }
        let mut dated: Vec<(String, TradeRecord)> = self
            .trades
            .drain(..)
            .map(|t| (self.date.clone(), t))
            .chain(other.trades.iter().map(|t| (other.date.clone(), t.clone())))
            .collect();
        dated.sort_by(|a, b| (&a.0, a.1.t_ns).cmp(&(&b.0, b.1.t_ns)));
        self.trades = dated.into_iter().map(|(_, t)| t).collect();
        self.date = self.date.clone().min(other.date.clone());
        self.refresh_averages();
        Ok(())
    }

    pub const CSV_HEADER: [&'static str; 9] = [
        "symbol",
        "date",
        "holding_ms",
        "profit_ticks_cash",
        "trades",
        "shares",
        "avg_shares",
        "avg_profit",
        "avg_return",
    ];

    /// One row of the result CSV; quote-level results append the venue.
    pub fn csv_row(&self) -> Vec<String> {
        let mut row = vec![
            self.symbol.clone(),
            self.date.clone(),
            self.holding_ms.to_string(),
            self.totals.profit.to_string(),
            self.totals.trades.to_string(),
            self.totals.shares.to_string(),
            self.avg_shares.to_string(),
            self.avg_profit.to_string(),
            self.avg_return.to_string(),
        ];
        if let Some(v) = self.venue {
            row.push(v.to_string());
        }
        row
    }
}

/// Run the omniscient trader over an event feed.
///
/// The books at `t` and at `t + h'` are both historical states; exits use the
/// book after the last event at or before `t + h'`. With a non-empty
/// `holding_grid` each instant takes the best of all listed holding periods.
pub fn simulate(events: &[MarketEvent], meta: &FeedMeta, config: &OtmConfig) -> Result<SimulationResult> {
    config.validate()?;
    let timeline = inside_timeline(events, meta.mode)?;
    let instants = decision_instants(&timeline, config.grid_ms, config.holding_ms);
    drop(timeline);

    let holdings = config.holdings();
    let mut entry = BookCursor::new(events, meta.mode);
    let mut exits: Vec<BookCursor> = holdings
        .iter()
        .map(|_| BookCursor::new(events, meta.mode))
        .collect();
    let mut diag = Diagnostics::default();
    let mut trades = Vec::new();

    for inst in &instants {
        diag.instants += 1;
        let entry_book = entry.advance_to(inst.t_ns)?;
        let mut best: Option<(u64, OptimalTrade)> = None;
        let mut any_exit = false;
        for (h, cursor) in holdings.iter().zip(exits.iter_mut()) {
            let exit_book = cursor.advance_to(inst.t_ns + *h as i64 * NS_PER_MS)?;
            if !exit_book.inside_quote().is_two_sided() {
                continue;
            }
            any_exit = true;
            if let Some(trade) = optimal_trade(
                entry_book,
                exit_book,
                config.fee_per_share_per_side,
                config.max_volume,
            ) {
                if best.is_none_or(|(_, b)| trade.profit > b.profit) {
                    best = Some((*h, trade));
                }
            }
        }
        match best {
            Some((h, trade)) => trades.push(TradeRecord::from_optimal(inst.t_ns, h, &trade)),
            None if !any_exit => diag.skipped_one_sided_exit += 1,
            None => diag.no_trade += 1,
        }
    }
    Ok(SimulationResult::from_trades(
        meta,
        config.holding_ms,
        None,
        trades,
        diag,
    ))
}

/// Variable holding: `config.holding_grid` must be non-empty.
pub fn simulate_variable_holding(
    events: &[MarketEvent],
    meta: &FeedMeta,
    config: &OtmConfig,
) -> Result<SimulationResult> {
    if config.holding_grid.is_empty() {
        return Err(Error::Config("variable holding needs a non-empty holding grid".into()));
    }
    simulate(events, meta, config)
}

/// Run several configurations over the same feed on separate threads.
/// Results come back in the order of `configs`.
pub fn simulate_many(
    events: &[MarketEvent],
    meta: &FeedMeta,
    configs: &[OtmConfig],
) -> Result<Vec<SimulationResult>> {
    std::thread::scope(|s| {
        let handles: Vec<_> = configs
            .iter()
            .map(|c| s.spawn(move || simulate(events, meta, c)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("simulation thread panicked"))
            .collect()
    })
}
