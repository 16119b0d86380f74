// Rebuild a small sub-penny book, hit it with a marketable buy and price a
// sweep of the result.

use otm::{FeedMode, MarketEvent, OrderBook, Side, TickSize};

type BoxResult<T> = Result<T, Box<dyn std::error::Error>>;

pub fn run_example() -> BoxResult<(OrderBook, Vec<otm::Fill>)> {
    let ticks = TickSize::MILLI;
    let open = 34_200_000_000_000;
    let asks = [("24.069", 500), ("24.069", 500), ("24.070", 500), ("24.080", 200), ("24.090", 1_000)];
    let bids = [("24.062", 1_000), ("24.060", 300), ("24.050", 2_000)];

    let mut book = OrderBook::new();
    let mut id = 1;
    for (side, levels) in [(Side::Sell, &asks[..]), (Side::Buy, &bids[..])] {
        for (px, qty) in levels {
            let ev = MarketEvent::add(open + id as i64, id, side, ticks.parse_ticks(px)?, *qty);
            book.apply_event(&ev, FeedMode::Match)?;
            id += 1;
        }
    }

    let px = |p: Option<otm::TickPrice>| p.map_or("-".into(), |p| ticks.format_dollars(p.ticks()));
    let q = book.inside_quote();
    println!("inside before: {} x {}", px(q.bid), px(q.ask));
    println!("cost of buying 1200: ${}", ticks.format_dollars(book.sweep(Side::Buy, 1_200)?));

    let buy = MarketEvent::add(open + 1_000_000, id, Side::Buy, ticks.parse_ticks("24.080")?, 2_000);
    let fills = book.apply_event(&buy, FeedMode::Match)?;
    for f in &fills {
        println!("filled order {} for {} @ {}", f.order_id, f.qty, ticks.format_dollars(f.price.ticks()));
    }
    let q = book.inside_quote();
    println!(
        "inside after: {} x {} ({} / {}), checksum {:016x}",
        px(q.bid),
        px(q.ask),
        q.bid_depth,
        q.ask_depth,
        book.checksum()
    );
    Ok((book, fills))
}

#[allow(dead_code)]
fn main() -> BoxResult<()> {
    run_example().map(|_| ())
}
