//! Independent reference implementations used as test oracles. None of them
//! share code with the library beyond its plain data types.

#![allow(dead_code)]

use otm::{EventAction, FeedMode, Fill, InsideQuote, MarketEvent, OrderBook, Side, TickPrice};
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

/// Flat list of resting orders matched by linear scans.
#[derive(Debug, Clone, Default)]
pub struct NaiveBook {
    orders: Vec<(u64, Side, i64, u64, u64)>,
    seq: u64,
}

impl NaiveBook {
    fn best_opposite(&self, side: Side, limit: i64) -> Option<usize> {
        let mut best: Option<usize> = None;
        for (i, o) in self.orders.iter().enumerate() {
            if o.1 == side {
                continue;
            }
            let crosses = match side {
                Side::Buy => o.2 <= limit,
                Side::Sell => o.2 >= limit,
            };
            if !crosses {
                continue;
            }
            best = match best {
                None => Some(i),
                Some(j) => {
                    let b = &self.orders[j];
                    let better = match side {
                        Side::Buy => o.2 < b.2,
                        Side::Sell => o.2 > b.2,
                    };
                    if better || (o.2 == b.2 && o.4 < b.4) {
                        Some(i)
                    } else {
                        Some(j)
                    }
                }
            };
        }
        best
    }

    fn find(&self, id: u64) -> Option<usize> {
        self.orders.iter().position(|o| o.0 == id)
    }

    fn take(&mut self, i: usize, qty: u64) -> i64 {
        let price = self.orders[i].2;
        self.orders[i].3 -= qty;
        if self.orders[i].3 == 0 {
            self.orders.remove(i);
        }
        price
    }

    /// Match-mode semantics; `None` on any integrity problem.
    pub fn apply(&mut self, ev: &MarketEvent) -> Option<Vec<Fill>> {
        match ev.action {
            EventAction::Add { side, price, qty } => {
                if qty == 0 || price.ticks() <= 0 || self.find(ev.order_id).is_some() {
                    return None;
                }
                let mut left = qty;
                let mut fills = Vec::new();
                while left > 0 {
                    let Some(i) = self.best_opposite(side, price.ticks()) else {
                        break;
                    };
                    let take = left.min(self.orders[i].3);
                    let id = self.orders[i].0;
                    let p = self.take(i, take);
                    fills.push(Fill {
                        order_id: id,
                        price: TickPrice(p),
                        qty: take,
                    });
                    left -= take;
                }
                if left > 0 {
                    self.seq += 1;
                    self.orders.push((ev.order_id, side, price.ticks(), left, self.seq));
                }
                Some(fills)
            }
            EventAction::Cancel => {
                let i = self.find(ev.order_id)?;
                self.orders.remove(i);
                Some(Vec::new())
            }
            EventAction::Reduce { qty } | EventAction::Execute { qty } => {
                let i = self.find(ev.order_id)?;
                if qty == 0 || qty > self.orders[i].3 {
                    return None;
                }
                let id = self.orders[i].0;
                let p = self.take(i, qty);
                Some(match ev.action {
                    EventAction::Execute { .. } => vec![Fill {
                        order_id: id,
                        price: TickPrice(p),
                        qty,
                    }],
                    _ => Vec::new(),
                })
            }
        }
    }

    /// `(price, [(order_id, qty)])` per level, best first, FIFO within level.
    pub fn levels(&self, side: Side) -> Vec<(i64, Vec<(u64, u64)>)> {
        let mut os: Vec<_> = self.orders.iter().filter(|o| o.1 == side).collect();
        os.sort_by_key(|o| {
            let key = match side {
                Side::Buy => -o.2,
                Side::Sell => o.2,
            };
            (key, o.4)
        });
        let mut out: Vec<(i64, Vec<(u64, u64)>)> = Vec::new();
        for o in os {
            match out.last_mut() {
                Some(l) if l.0 == o.2 => l.1.push((o.0, o.3)),
                _ => out.push((o.2, vec![(o.0, o.3)])),
            }
        }
        out
    }

    pub fn inside(&self) -> InsideQuote {
        let mut q = InsideQuote::default();
        if let Some((p, os)) = self.levels(Side::Buy).first() {
            q.bid = Some(TickPrice(*p));
            q.bid_depth = os.iter().map(|o| o.1).sum();
            q.bid_order_count = os.len() as u32;
        }
        if let Some((p, os)) = self.levels(Side::Sell).first() {
            q.ask = Some(TickPrice(*p));
            q.ask_depth = os.iter().map(|o| o.1).sum();
            q.ask_order_count = os.len() as u32;
        }
        q
    }

    pub fn live_ids(&self) -> Vec<u64> {
        self.orders.iter().map(|o| o.0).collect()
    }

    pub fn qty(&self, id: u64) -> Option<u64> {
        self.find(id).map(|i| self.orders[i].3)
    }
}

/// Levels of the library book in the same shape as [`NaiveBook::levels`].
pub fn book_levels(book: &OrderBook, side: Side) -> Vec<(i64, Vec<(u64, u64)>)> {
    book.levels(side)
        .map(|l| (l.price.ticks(), l.orders().map(|o| (o.order_id, o.qty)).collect()))
        .collect()
}

/// Random match-mode feed over a narrow price band so that adds cross often.
/// Every event is valid for the state it is applied to.
pub fn random_feed(rng: &mut ChaCha8Rng, n: usize) -> Vec<MarketEvent> {
    let mut naive = NaiveBook::default();
    let mut events = Vec::with_capacity(n);
    let mut next_id = 1u64;
    let mut ts = 0i64;
    for _ in 0..n {
        ts += (rng.next_u64() % 3) as i64 * 1_000_000;
        let live = naive.live_ids();
        let roll = rng.next_u64() % 10;
        let ev = if live.is_empty() || roll < 6 {
            let side = if rng.next_u64() % 2 == 0 { Side::Buy } else { Side::Sell };
            let price = 95 + (rng.next_u64() % 11) as i64;
            let qty = 1 + rng.next_u64() % 50;
            next_id += 1;
            MarketEvent::add(ts, next_id - 1, side, price, qty)
        } else {
            let id = live[(rng.next_u64() % live.len() as u64) as usize];
            let q = naive.qty(id).unwrap();
            match roll {
                6 | 7 => MarketEvent::cancel(ts, id),
                8 => MarketEvent::reduce(ts, id, 1 + rng.next_u64() % q),
                _ => MarketEvent::execute(ts, id, 1 + rng.next_u64() % q),
            }
        };
        naive.apply(&ev).expect("generated event is valid");
        events.push(ev);
    }
    events
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Per-share prices of the first `v` shares on a ladder.
fn expand(ladder: &[(i64, u64)]) -> Vec<i64> {
    ladder
        .iter()
        .flat_map(|&(p, q)| std::iter::repeat(p).take(q as usize))
        .collect()
}

/// Sum of the first `v` per-share prices; `None` if the ladder is too thin.
pub fn naive_sweep(ladder: &[(i64, u64)], v: u64) -> Option<i64> {
    let shares = expand(ladder);
    (v as usize <= shares.len()).then(|| shares[..v as usize].iter().sum())
}

pub fn ladder(book: &OrderBook, side: Side) -> Vec<(i64, u64)> {
    book.levels(side).map(|l| (l.price.ticks(), l.volume())).collect()
}

/// Exhaustive optimum over every volume and both directions: `(direction,
/// volume, profit)`, smallest volume and buying preferred on ties, `None`
/// when no volume pays.
pub fn brute_force_trade(
    entry: &OrderBook,
    exit: &OrderBook,
    fee: i64,
    max_volume: Option<u64>,
) -> Option<(Side, u64, i64)> {
    let mut best: Option<(Side, u64, i64)> = None;
    for dir in [Side::Buy, Side::Sell] {
        let (open, close) = match dir {
            Side::Buy => (ladder(entry, Side::Sell), ladder(exit, Side::Buy)),
            Side::Sell => (ladder(entry, Side::Buy), ladder(exit, Side::Sell)),
        };
        let cap = expand(&open).len().min(expand(&close).len()) as u64;
        let cap = max_volume.map_or(cap, |m| cap.min(m));
        for v in 1..=cap {
            let a = naive_sweep(&open, v).unwrap();
            let b = naive_sweep(&close, v).unwrap();
            let gross = match dir {
                Side::Buy => b - a,
                Side::Sell => a - b,
            };
            let profit = gross - 2 * fee * v as i64;
            if profit > 0 && best.is_none_or(|(_, _, p)| profit > p) {
                best = Some((dir, v, profit));
            }
        }
    }
    best
}

/// Book built from explicit ladders; asks and bids are `(price, qty)`.
pub fn book_from(asks: &[(i64, u64)], bids: &[(i64, u64)]) -> OrderBook {
    let mut b = OrderBook::new();
    let mut id = 1;
    for (side, l) in [(Side::Sell, asks), (Side::Buy, bids)] {
        for &(p, q) in l {
            b.apply_event(&MarketEvent::add(0, id, side, p, q), FeedMode::Match)
                .unwrap();
            id += 1;
        }
    }
    b
}

/// Random two-sided book with at most `max_levels` levels and `max_shares`
/// shares per side, centred near `mid`.
pub fn random_book(rng: &mut ChaCha8Rng, mid: i64, max_levels: u64, max_shares: u64) -> OrderBook {
    let side_ladder = |rng: &mut ChaCha8Rng, start: i64, step: i64| {
        let levels = 1 + rng.next_u64() % max_levels;
        let mut budget = max_shares;
        let mut price = start;
        let mut out = Vec::new();
        for _ in 0..levels {
            if budget == 0 {
                break;
            }
            let q = 1 + rng.next_u64() % budget.min(max_shares / levels.max(1) + 1).max(1);
            let q = q.min(budget);
            budget -= q;
            out.push((price, q));
            price += step * (1 + (rng.next_u64() % 3) as i64);
        }
        out
    };
    let bid = mid - (rng.next_u64() % 4) as i64;
    let ask = bid + 1 + (rng.next_u64() % 4) as i64;
    let bids = side_ladder(rng, bid, -1);
    let asks = side_ladder(rng, ask, 1);
    book_from(&asks, &bids)
}

/// Log-log least squares through the normal equations, solved by Cramer's
/// rule on raw sums: returns `(a, b, r_squared)`.
pub fn ols_oracle(points: &[(f64, f64)]) -> (f64, f64, f64) {
    let logs: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.0 > 0.0 && p.1 > 0.0)
        .map(|p| (p.0.ln(), p.1.ln()))
        .collect();
    let n = logs.len() as f64;
    let sx: f64 = logs.iter().map(|p| p.0).sum();
    let sy: f64 = logs.iter().map(|p| p.1).sum();
    let sxx: f64 = logs.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = logs.iter().map(|p| p.0 * p.1).sum();
    let det = n * sxx - sx * sx;
    let b = (n * sxy - sx * sy) / det;
    let c = (sxx * sy - sx * sxy) / det;
    let ybar = sy / n;
    let ss_tot: f64 = logs.iter().map(|p| (p.1 - ybar).powi(2)).sum();
    let ss_res: f64 = logs.iter().map(|p| (p.1 - c - b * p.0).powi(2)).sum();
    (c.exp(), b, 1.0 - ss_res / ss_tot)
}

/// Number of two-sided inside-quote changes seen by replaying `events`
/// through the naive book.
pub fn count_inside_changes(events: &[MarketEvent]) -> usize {
    let mut naive = NaiveBook::default();
    let mut prev = InsideQuote::default();
    let mut n = 0;
    for ev in events {
        naive.apply(ev).expect("valid feed");
        let q = naive.inside();
        if q != prev && q.bid.is_some() && q.ask.is_some() {
            n += 1;
        }
        prev = q;
    }
    n
}

/// Standard normal draw by Box-Muller.
pub fn normal(rng: &mut ChaCha8Rng) -> f64 {
    let u1 = ((rng.next_u64() >> 11) as f64 + 1.0) / (1u64 << 53) as f64;
    let u2 = (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

pub fn median(xs: &mut [i64]) -> f64 {
    xs.sort_unstable();
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2] as f64
    } else {
        (xs[n / 2 - 1] + xs[n / 2]) as f64 / 2.0
    }
}

/// The resting book of the worked example in millidollar ticks.
pub fn example_book_events() -> Vec<MarketEvent> {
    let asks = [
        (24_069, 500),
        (24_069, 500),
        (24_070, 500),
        (24_080, 200),
        (24_090, 1_000),
        (24_100, 800),
    ];
    let bids = [(24_062, 1_000), (24_060, 300), (24_050, 2_000), (24_040, 5_503)];
    let open = 34_200_000_000_000;
    let mut out = Vec::new();
    let mut id = 1;
    for (side, l) in [(Side::Sell, &asks[..]), (Side::Buy, &bids[..])] {
        for &(p, q) in l {
            out.push(MarketEvent::add(open + id as i64, id, side, p, q));
            id += 1;
        }
    }
    out
}
