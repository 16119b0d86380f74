//! Reading, writing and validating the two CSV feed formats.
//!
//! Event feed:
//!
//! ```text
//! #symbol=MSFT,date=2008-10-01,tick_size=0.001,mode=match
//! ts_ns,action,order_id,side,price_ticks,qty
//! 34200000000000,A,17,B,24062,500
//! 34200000100000,R,17,,,100
//! 34200000200000,X,17,,,
//! ```
//!
//! Quote feed:
//!
//! ```text
//! #symbol=MSFT,date=2008-10-01,tick_size=0.001,mode=match
//! ts_ns,symbol,venue,bid_ticks,bid_size,ask_ticks,ask_size
//! 34200000000000,MSFT,P,24062,1000,24069,1000
//! ```
//!
//! The `#` metadata line is optional on input and always written on output.
//! Files whose first two bytes are the gzip magic are decompressed on the fly;
//! output paths ending in `.gz` are compressed. The path `-` means stdin or
//! stdout.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use flate2::read::MultiGzDecoder;
use flate2::write::GzEncoder;
use flate2::Compression;
use serde::{Deserialize, Serialize};

use crate::error::{Error, IntegrityError, Result};
use crate::event::{EventAction, MarketEvent, QuoteRecord, Venue};
use crate::lob::{FeedMode, OrderBook};
use crate::price::{Side, TickPrice, TickSize};

pub const EVENT_HEADER: &str = "ts_ns,action,order_id,side,price_ticks,qty";
pub const QUOTE_HEADER: &str = "ts_ns,symbol,venue,bid_ticks,bid_size,ask_ticks,ask_size";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeedKind {
    Event,
    Quote,
}

impl FeedKind {
    pub fn header(self) -> &'static str {
        match self {
            FeedKind::Event => EVENT_HEADER,
            FeedKind::Quote => QUOTE_HEADER,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeedMeta {
    pub symbol: String,
    pub date: String,
    pub tick_size: TickSize,
    pub mode: FeedMode,
    pub record_count: u64,
}

impl Default for FeedMeta {
    fn default() -> Self {
        FeedMeta {
            symbol: String::new(),
            date: String::new(),
            tick_size: TickSize::default(),
            mode: FeedMode::Match,
            record_count: 0,
        }
    }
}

impl FeedMeta {
    pub fn new(symbol: impl Into<String>, date: impl Into<String>) -> Self {
        FeedMeta {
            symbol: symbol.into(),
            date: date.into(),
            ..Default::default()
        }
    }

    /// `YYYY-MM` prefix of the date, used for monthly partitions.
    pub fn month(&self) -> String {
        self.date.get(..7).unwrap_or(&self.date).to_string()
    }

    fn to_line(&self) -> String {
        format!(
            "#symbol={},date={},tick_size={},mode={}",
            self.symbol,
            self.date,
            self.tick_size,
            self.mode.as_str()
        )
    }

    fn parse_line(line: &str, line_no: u64) -> Result<FeedMeta> {
        let mut meta = FeedMeta::default();
        let body = line.trim_start_matches('#').trim();
        for pair in body.split(',').filter(|p| !p.is_empty()) {
            let Some((key, value)) = pair.split_once('=') else {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("metadata entry {pair:?} is not key=value"),
                });
            };
            let wrap = |e: Error| Error::Parse {
                line: line_no,
                message: e.to_string(),
            };
            match key.trim() {
                "symbol" => meta.symbol = value.trim().to_string(),
                "date" => meta.date = value.trim().to_string(),
                "tick_size" => meta.tick_size = value.trim().parse().map_err(wrap)?,
                "mode" => meta.mode = value.trim().parse().map_err(wrap)?,
                _ => {}
            }
        }
        Ok(meta)
    }
}

pub(crate) fn open_input(path: &Path) -> Result<Box<dyn BufRead>> {
    let raw: Box<dyn Read> = if path == Path::new("-") {
        Box::new(io::stdin())
    } else {
        Box::new(File::open(path).map_err(|e| Error::file(path, e))?)
    };
    let mut buf = BufReader::new(raw);
    let magic = buf.fill_buf().map_err(|e| Error::file(path, e))?;
    if magic.starts_with(&[0x1f, 0x8b]) {
        Ok(Box::new(BufReader::new(MultiGzDecoder::new(buf))))
    } else {
        Ok(Box::new(buf))
    }
}

pub(crate) fn open_output(path: &Path) -> Result<Box<dyn Write>> {
    if path == Path::new("-") {
        return Ok(Box::new(io::stdout().lock()));
    }
    let file = File::create(path).map_err(|e| Error::file(path, e))?;
    let w = BufWriter::new(file);
    if path.extension().is_some_and(|e| e == "gz") {
        Ok(Box::new(GzEncoder::new(w, Compression::default())))
    } else {
        Ok(Box::new(w))
    }
}

/// Consumes the optional metadata line and the mandatory header, returning
/// the metadata, a CSV reader over the remaining records, and the number of
/// lines consumed.
fn open_records<R: BufRead>(
    mut input: R,
    kind: FeedKind,
) -> Result<(FeedMeta, csv::Reader<R>, u64)> {
    let mut meta = FeedMeta::default();
    let mut consumed = 0u64;
    let mut line = String::new();
    loop {
        line.clear();
        if input.read_line(&mut line)? == 0 {
            return Err(Error::Parse {
                line: consumed + 1,
                message: format!("missing header, expected {:?}", kind.header()),
            });
        }
        consumed += 1;
        let text = line.trim_end_matches(['\n', '\r']);
        if text.starts_with('#') {
            meta = FeedMeta::parse_line(text, consumed)?;
            continue;
        }
        if text != kind.header() {
            return Err(Error::Parse {
                line: consumed,
                message: format!("header {text:?} does not match {:?}", kind.header()),
            });
        }
        break;
    }
    let reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(input);
    Ok((meta, reader, consumed))
}

fn field<'r>(rec: &'r csv::StringRecord, i: usize) -> &'r str {
    rec.get(i).unwrap_or("")
}

fn num<T: std::str::FromStr>(rec: &csv::StringRecord, i: usize, name: &str) -> Result<T, String> {
    let s = field(rec, i);
    if s.is_empty() || s.starts_with('+') {
        return Err(format!("invalid {name} {s:?}"));
    }
    s.parse().map_err(|_| format!("invalid {name} {s:?}"))
}

fn parse_event(rec: &csv::StringRecord) -> Result<MarketEvent, String> {
    if rec.len() != 6 {
        return Err(format!("expected 6 fields, found {}", rec.len()));
    }
    let ts_ns: i64 = num(rec, 0, "ts_ns")?;
    let order_id: u64 = num(rec, 2, "order_id")?;
    let empty = |idx: &[usize]| -> Result<(), String> {
        match idx.iter().find(|&&i| !field(rec, i).is_empty()) {
            Some(&i) => Err(format!("field {} must be empty for this action", i + 1)),
            None => Ok(()),
        }
    };
    let action = match field(rec, 1) {
        "A" => {
            let side = match field(rec, 3) {
                "B" => Side::Buy,
                "S" => Side::Sell,
                other => return Err(format!("invalid side {other:?}")),
            };
            EventAction::Add {
                side,
                price: TickPrice(num(rec, 4, "price_ticks")?),
                qty: num(rec, 5, "qty")?,
            }
        }
        "X" => {
            empty(&[3, 4, 5])?;
            EventAction::Cancel
        }
        "R" => {
            empty(&[3, 4])?;
            EventAction::Reduce {
                qty: num(rec, 5, "qty")?,
            }
        }
        "E" => {
            empty(&[3, 4])?;
            EventAction::Execute {
                qty: num(rec, 5, "qty")?,
            }
        }
        other => return Err(format!("invalid action {other:?}")),
    };
    Ok(MarketEvent {
        ts_ns,
        order_id,
        action,
    })
}

fn parse_quote(rec: &csv::StringRecord) -> Result<QuoteRecord, String> {
    if rec.len() != 7 {
        return Err(format!("expected 7 fields, found {}", rec.len()));
    }
    let venue = Venue::from_code(field(rec, 2))
        .ok_or_else(|| format!("invalid venue {:?}", field(rec, 2)))?;
    Ok(QuoteRecord {
        ts_ns: num(rec, 0, "ts_ns")?,
        symbol: field(rec, 1).to_string(),
        venue,
        bid: TickPrice(num(rec, 3, "bid_ticks")?),
        bid_size: num(rec, 4, "bid_size")?,
        ask: TickPrice(num(rec, 5, "ask_ticks")?),
        ask_size: num(rec, 6, "ask_size")?,
    })
}

fn event_fields(ev: &MarketEvent) -> [String; 6] {
    let ts = ev.ts_ns.to_string();
    let id = ev.order_id.to_string();
    let code = ev.action.code().to_string();
    match ev.action {
        EventAction::Add { side, price, qty } => [
            ts,
            code,
            id,
            side.as_char().to_string(),
            price.ticks().to_string(),
            qty.to_string(),
        ],
        EventAction::Cancel => [ts, code, id, String::new(), String::new(), String::new()],
        EventAction::Reduce { qty } | EventAction::Execute { qty } => {
            [ts, code, id, String::new(), String::new(), qty.to_string()]
        }
    }
}

/// Streaming reader over an event feed. Yields events in file order and stops
/// after the first error.
pub struct EventReader<R> {
    records: csv::StringRecordsIntoIter<R>,
    meta: FeedMeta,
    line_offset: u64,
    last_ts: Option<i64>,
    done: bool,
}

impl<R: BufRead> EventReader<R> {
    pub fn new(input: R) -> Result<Self> {
        let (meta, reader, line_offset) = open_records(input, FeedKind::Event)?;
        Ok(EventReader {
            records: reader.into_records(),
            meta,
            line_offset,
            last_ts: None,
            done: false,
        })
    }

    /// Metadata; `record_count` reflects the records read so far.
    pub fn meta(&self) -> &FeedMeta {
        &self.meta
    }
}

impl<R: BufRead> Iterator for EventReader<R> {
    type Item = Result<MarketEvent>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let result = match self.records.next()? {
            Err(e) => Err(Error::from(e)),
            Ok(rec) => {
                let line = self.line_offset + rec.position().map_or(0, |p| p.line());
                match parse_event(&rec) {
                    Err(message) => Err(Error::Parse { line, message }),
                    Ok(ev) => match self.last_ts {
                        Some(prev) if ev.ts_ns < prev => Err(Error::LineIntegrity {
                            line,
                            source: IntegrityError::TimestampRegression {
                                ts_ns: ev.ts_ns,
                                prev_ns: prev,
                            },
                        }),
                        _ => {
                            self.last_ts = Some(ev.ts_ns);
                            self.meta.record_count += 1;
                            Ok(ev)
                        }
                    },
                }
            }
        };
        self.done = result.is_err();
        Some(result)
    }
}

/// Whether quotes with `bid >= ask` or a zero size survive parsing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum QuoteFilter {
    #[default]
    DropInvalid,
    KeepAll,
}

/// Streaming reader over a quote feed.
pub struct QuoteReader<R> {
    records: csv::StringRecordsIntoIter<R>,
    meta: FeedMeta,
    line_offset: u64,
    last_ts: Option<i64>,
    filter: QuoteFilter,
    dropped: u64,
    done: bool,
}

impl<R: BufRead> QuoteReader<R> {
    pub fn new(input: R, filter: QuoteFilter) -> Result<Self> {
        let (meta, reader, line_offset) = open_records(input, FeedKind::Quote)?;
        Ok(QuoteReader {
            records: reader.into_records(),
            meta,
            line_offset,
            last_ts: None,
            filter,
            dropped: 0,
            done: false,
        })
    }

    pub fn meta(&self) -> &FeedMeta {
        &self.meta
    }

    /// Crossed or empty quotes skipped so far.
    pub fn dropped(&self) -> u64 {
        self.dropped
    }
}

impl<R: BufRead> Iterator for QuoteReader<R> {
    type Item = Result<QuoteRecord>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            if self.done {
                return None;
            }
            let rec = match self.records.next()? {
                Ok(rec) => rec,
                Err(e) => {
                    self.done = true;
                    return Some(Err(e.into()));
                }
            };
            let line = self.line_offset + rec.position().map_or(0, |p| p.line());
            let q = match parse_quote(&rec) {
                Ok(q) => q,
                Err(message) => {
                    self.done = true;
                    return Some(Err(Error::Parse { line, message }));
                }
            };
            if let Some(prev) = self.last_ts {
                if q.ts_ns < prev {
                    self.done = true;
                    return Some(Err(Error::LineIntegrity {
                        line,
                        source: IntegrityError::TimestampRegression {
                            ts_ns: q.ts_ns,
                            prev_ns: prev,
                        },
                    }));
                }
            }
            self.last_ts = Some(q.ts_ns);
            self.meta.record_count += 1;
            if self.filter == QuoteFilter::DropInvalid && !q.is_valid() {
                self.dropped += 1;
                continue;
            }
            return Some(Ok(q));
        }
    }
}

pub fn open_events(path: impl AsRef<Path>) -> Result<EventReader<Box<dyn BufRead>>> {
    EventReader::new(open_input(path.as_ref())?)
}

pub fn open_quotes(
    path: impl AsRef<Path>,
    filter: QuoteFilter,
) -> Result<QuoteReader<Box<dyn BufRead>>> {
    QuoteReader::new(open_input(path.as_ref())?, filter)
}

/// Read a whole event feed into memory.
pub fn read_events(path: impl AsRef<Path>) -> Result<(FeedMeta, Vec<MarketEvent>)> {
    let mut reader = open_events(path)?;
    let events = reader.by_ref().collect::<Result<Vec<_>>>()?;
    Ok((reader.meta().clone(), events))
}

/// A quote feed held in memory, with the number of records dropped by the filter.
#[derive(Debug, Clone)]
pub struct QuoteFeed {
    pub meta: FeedMeta,
    pub quotes: Vec<QuoteRecord>,
    pub dropped: u64,
}

pub fn read_quotes(path: impl AsRef<Path>, filter: QuoteFilter) -> Result<QuoteFeed> {
    let mut reader = open_quotes(path, filter)?;
    let quotes = reader.by_ref().collect::<Result<Vec<_>>>()?;
    Ok(QuoteFeed {
        meta: reader.meta().clone(),
        quotes,
        dropped: reader.dropped(),
    })
}

fn check_events(events: &[MarketEvent]) -> Result<()> {
    let mut prev = i64::MIN;
    for (i, ev) in events.iter().enumerate() {
        let bad = |msg: &str| Err(Error::InvalidRecord(format!("event {i}: {msg}")));
        if ev.ts_ns < prev {
            return bad("timestamp regression");
        }
        prev = ev.ts_ns;
        match ev.action {
            EventAction::Add { price, qty, .. } => {
                if qty == 0 {
                    return bad("zero quantity");
                }
                if price.ticks() <= 0 {
                    return bad("non-positive price");
                }
            }
            EventAction::Reduce { qty } | EventAction::Execute { qty } if qty == 0 => {
                return bad("zero quantity");
            }
            _ => {}
        }
    }
    Ok(())
}

fn check_quotes(quotes: &[QuoteRecord]) -> Result<()> {
    let mut prev = i64::MIN;
    for (i, q) in quotes.iter().enumerate() {
        if q.ts_ns < prev {
            return Err(Error::InvalidRecord(format!("quote {i}: timestamp regression")));
        }
        prev = q.ts_ns;
        if q.is_crossed() {
            return Err(Error::InvalidRecord(format!(
                "quote {i}: crossed (bid {} >= ask {})",
                q.bid, q.ask
            )));
        }
        if q.bid_size == 0 || q.ask_size == 0 {
            return Err(Error::InvalidRecord(format!("quote {i}: zero size")));
        }
    }
    Ok(())
}

pub fn write_events_to<W: Write>(out: W, meta: &FeedMeta, events: &[MarketEvent]) -> Result<FeedMeta> {
    check_events(events)?;
    let mut out = out;
    writeln!(out, "{}", meta.to_line())?;
    writeln!(out, "{EVENT_HEADER}")?;
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    for ev in events {
        w.write_record(event_fields(ev))?;
    }
    w.flush()?;
    Ok(FeedMeta {
        record_count: events.len() as u64,
        ..meta.clone()
    })
}

pub fn write_quotes_to<W: Write>(out: W, meta: &FeedMeta, quotes: &[QuoteRecord]) -> Result<FeedMeta> {
    check_quotes(quotes)?;
    let mut out = out;
    writeln!(out, "{}", meta.to_line())?;
    writeln!(out, "{QUOTE_HEADER}")?;
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    for q in quotes {
        w.write_record([
            q.ts_ns.to_string(),
            q.symbol.clone(),
            q.venue.code().to_string(),
            q.bid.ticks().to_string(),
            q.bid_size.to_string(),
            q.ask.ticks().to_string(),
            q.ask_size.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(FeedMeta {
        record_count: quotes.len() as u64,
        ..meta.clone()
    })
}

pub fn write_events(path: impl AsRef<Path>, meta: &FeedMeta, events: &[MarketEvent]) -> Result<FeedMeta> {
    check_events(events)?;
    let mut out = open_output(path.as_ref())?;
    let meta = write_events_to(&mut out, meta, events)?;
    out.flush()?;
    Ok(meta)
}

pub fn write_quotes(path: impl AsRef<Path>, meta: &FeedMeta, quotes: &[QuoteRecord]) -> Result<FeedMeta> {
    check_quotes(quotes)?;
    let mut out = open_output(path.as_ref())?;
    let meta = write_quotes_to(&mut out, meta, quotes)?;
    out.flush()?;
    Ok(meta)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    Malformed,
    TimestampRegression,
    DanglingReference,
    DuplicateOrderId,
    NonPositiveQuantity,
    NonPositivePrice,
    QuantityExceedsRemaining,
    CrossingAdd,
    CrossedQuote,
}

impl ViolationKind {
    pub fn label(self) -> &'static str {
        match self {
            ViolationKind::Malformed => "malformed line",
            ViolationKind::TimestampRegression => "timestamp regression",
            ViolationKind::DanglingReference => "dangling reference",
            ViolationKind::DuplicateOrderId => "duplicate order id",
            ViolationKind::NonPositiveQuantity => "non-positive quantity",
            ViolationKind::NonPositivePrice => "non-positive price",
            ViolationKind::QuantityExceedsRemaining => "quantity exceeds remaining",
            ViolationKind::CrossingAdd => "crossing add in log mode",
            ViolationKind::CrossedQuote => "crossed quote",
        }
    }
}

impl From<&IntegrityError> for ViolationKind {
    fn from(e: &IntegrityError) -> Self {
        match e {
            IntegrityError::UnknownOrder(_) => ViolationKind::DanglingReference,
            IntegrityError::DuplicateOrder(_) => ViolationKind::DuplicateOrderId,
            IntegrityError::QuantityExceedsRemaining { .. } => {
                ViolationKind::QuantityExceedsRemaining
            }
            IntegrityError::ZeroQuantity => ViolationKind::NonPositiveQuantity,
            IntegrityError::NonPositivePrice(_) => ViolationKind::NonPositivePrice,
            IntegrityError::TimestampRegression { .. } => ViolationKind::TimestampRegression,
            IntegrityError::CrossingAdd(_) | IntegrityError::IncompleteAdd(_) => {
                ViolationKind::CrossingAdd
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub line: u64,
    pub kind: ViolationKind,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub records: u64,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn count(&self, kind: ViolationKind) -> usize {
        self.violations.iter().filter(|v| v.kind == kind).count()
    }
}

/// Check a feed without failing on the first problem. Event feeds are
/// replayed through a scratch book in their declared mode so references to
/// orders consumed by matching are caught. Offending events are skipped.
pub fn validate_feed(path: impl AsRef<Path>, kind: FeedKind) -> Result<ValidationReport> {
    validate_reader(open_input(path.as_ref())?, kind)
}

pub fn validate_reader<R: BufRead>(input: R, kind: FeedKind) -> Result<ValidationReport> {
    let (meta, reader, offset) = open_records(input, kind)?;
    let mut report = ValidationReport::default();
    let mut book = OrderBook::new();
    let mut last_quote_ts: Option<i64> = None;
    for rec in reader.into_records() {
        let rec = rec?;
        report.records += 1;
        let line = offset + rec.position().map_or(0, |p| p.line());
        let mut flag = |kind: ViolationKind, detail: String| {
            report.violations.push(Violation { line, kind, detail });
        };
        match kind {
            FeedKind::Event => match parse_event(&rec) {
                Err(msg) => flag(ViolationKind::Malformed, msg),
                Ok(ev) => {
                    if let Err(e) = book.apply_event(&ev, meta.mode) {
                        flag(ViolationKind::from(&e), e.to_string());
                    }
                }
            },
            FeedKind::Quote => match parse_quote(&rec) {
                Err(msg) => flag(ViolationKind::Malformed, msg),
                Ok(q) => {
                    if let Some(prev) = last_quote_ts {
                        if q.ts_ns < prev {
                            flag(
                                ViolationKind::TimestampRegression,
                                format!("{} < {}", q.ts_ns, prev),
                            );
                        }
                    }
                    last_quote_ts = Some(last_quote_ts.map_or(q.ts_ns, |p| p.max(q.ts_ns)));
                    if q.bid_size == 0 || q.ask_size == 0 {
                        flag(ViolationKind::NonPositiveQuantity, "zero size".into());
                    }
                    if q.is_crossed() {
                        flag(
                            ViolationKind::CrossedQuote,
                            format!("bid {} >= ask {}", q.bid, q.ask),
                        );
                    }
                }
            },
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    fn events_from(text: &str) -> Result<Vec<MarketEvent>> {
        EventReader::new(Cursor::new(text.to_string()))?.collect()
    }

    #[test]
    fn parses_add_line() {
        let evs = events_from(&format!("{EVENT_HEADER}\n34200000000000,A,17,B,24062,500\n")).unwrap();
        assert_eq!(evs, vec![MarketEvent::add(34_200_000_000_000, 17, Side::Buy, 24_062, 500)]);
    }

    #[test]
    fn empty_feed_with_header() {
        let mut r = EventReader::new(Cursor::new(format!("{EVENT_HEADER}\n"))).unwrap();
        assert!(r.next().is_none());
        assert_eq!(r.meta().record_count, 0);
    }

    #[test]
    fn timestamp_regression_names_the_line() {
        let text = format!(
            "{EVENT_HEADER}\n1,A,1,B,100,1\n2,A,2,B,100,1\n3,A,3,B,100,1\n4,A,4,B,100,1\n5,A,5,B,100,1\n4,A,6,B,100,1\n"
        );
        let err = events_from(&text).unwrap_err();
        match err {
            Error::LineIntegrity { line, .. } => assert_eq!(line, 7),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let text = format!("#symbol=X\n{EVENT_HEADER}\n1,A,1,B,100,1\n2,Q,1,,,\n");
        match events_from(&text).unwrap_err() {
            Error::Parse { line, .. } => assert_eq!(line, 4),
            other => panic!("unexpected {other:?}"),
        }
        assert!(events_from("ts,action\n").is_err());
        assert!(events_from(&format!("{EVENT_HEADER}\n1,X,1,B,,\n")).is_err());
    }

    #[test]
    fn header_only_file_for_empty_records() {
        let mut buf = Vec::new();
        let meta = FeedMeta::new("MSFT", "2008-10-01");
        let written = write_events_to(&mut buf, &meta, &[]).unwrap();
        assert_eq!(written.record_count, 0);
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            format!("#symbol=MSFT,date=2008-10-01,tick_size=0.001,mode=match\n{EVENT_HEADER}\n")
        );
    }

    #[test]
    fn crossed_quote_rejected_before_write() {
        let q = QuoteRecord {
            ts_ns: 1,
            symbol: "X".into(),
            venue: Venue::Primary,
            bid: TickPrice(100),
            bid_size: 1,
            ask: TickPrice(100),
            ask_size: 1,
        };
        let mut buf = Vec::new();
        assert!(matches!(
            write_quotes_to(&mut buf, &FeedMeta::default(), &[q]),
            Err(Error::InvalidRecord(_))
        ));
        assert!(buf.is_empty());
    }

    #[test]
    fn validation_flags_dangling_reference() {
        let text = format!("{EVENT_HEADER}\n1,A,1,B,100,5\n2,E,9,,,1\n3,X,1,,,\n");
        let report = validate_reader(Cursor::new(text), FeedKind::Event).unwrap();
        assert_eq!(report.records, 3);
        assert_eq!(report.count(ViolationKind::DanglingReference), 1);
        assert_eq!(report.violations[0].line, 3);
        assert_eq!(report.violations[0].kind.label(), "dangling reference");
    }

    #[test]
    fn validation_counts_crossed_quotes_and_reader_drops_them() {
        let mut text = format!("{QUOTE_HEADER}\n");
        for i in 0..10 {
            let (bid, ask) = if i % 3 == 1 { (101, 100) } else { (100, 101) };
            text.push_str(&format!("{i},X,P,{bid},10,{ask},10\n"));
        }
        let report = validate_reader(Cursor::new(text.clone()), FeedKind::Quote).unwrap();
        assert_eq!(report.count(ViolationKind::CrossedQuote), 3);
        let mut reader = QuoteReader::new(Cursor::new(text.clone()), QuoteFilter::DropInvalid).unwrap();
        assert_eq!(reader.by_ref().count(), 7);
        assert_eq!(reader.dropped(), 3);
        assert_eq!(reader.meta().record_count, 10);
        let kept = QuoteReader::new(Cursor::new(text), QuoteFilter::KeepAll).unwrap();
        assert_eq!(kept.count(), 10);
    }

    #[test]
    fn gzip_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("feed.csv.gz");
        let evs = vec![
            MarketEvent::add(1, 1, Side::Sell, 105, 10),
            MarketEvent::reduce(2, 1, 3),
            MarketEvent::execute(3, 1, 2),
            MarketEvent::cancel(4, 1),
        ];
        write_events(&path, &FeedMeta::new("X", "2008-01-02"), &evs).unwrap();
        let (meta, back) = read_events(&path).unwrap();
        assert_eq!(back, evs);
        assert_eq!(meta.symbol, "X");
        assert_eq!(meta.record_count, 4);
    }
}
