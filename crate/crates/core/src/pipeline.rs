//! Subcommand driver: every command reads its inputs, writes its artifacts
//! into the output directory and returns the paths it wrote.
//!
//! Settings come from an optional `key = value` file overlaid by command-line
//! flags. Keys use `_` or `-` interchangeably.
//!
//! | key | meaning | default |
//! |---|---|---|
//! | `input` | input paths (comma-separated in files) | none |
//! | `composite` | composite quote feeds for `ratio` | none |
//! | `model` | fitted model JSON for `extrapolate` | none |
//! | `output` | event feed path for `gen`, `-` for stdout | `<out_dir>/<symbol>.events.csv` |
//! | `out_dir` | artifact directory | `$OTM_OUT_DIR`, else `otm-out` |
//! | `holding_ms` | holding periods | 10,100,500,1000,2000,3000,4000,5000,10000 |
//! | `grid_ms` | decision grid spacing | 10 |
//! | `fee` | dollars per share per side | 0 |
//! | `tick_size` | generator tick in dollars | 0.01 |
//! | `seed` | generator seed | 1 |
//! | `duration_s`, `limit_hz`, `market_hz`, `cancel_hz`, `offset_p`, `mean_size`, `init_mid` | generator parameters | see `SynthConfig` |
//! | `symbol` | generated symbol | `SYN<seed>` |
//! | `composite_fraction` | also write a tightened composite quote feed | off |
//! | `variable_holding` | alternative holding periods for `ot` | off |
//! | `max_volume` | per-trade share cap | none |
//! | `multiplier` | composite multiplier for `extrapolate` | 1 |
//! | `kind` | `event` or `quote`, for `validate` | `event` |

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::event::{QuoteRecord, Venue};
use crate::feed::{self, FeedKind, FeedMeta, QuoteFilter};
use crate::lob::OrderBook;
use crate::otm::{simulate_many, OtmConfig, SimulationResult};
use crate::powerlaw::{extrapolate_universe, fit_power_law, PowerLawModel};
use crate::price::{TickPrice, TickSize};
use crate::quote_otm::{composite_ratio, simulate_quotes, QuoteOtmConfig, RatioStatus};
use crate::report::{aggregate_report, write_report};
use crate::synth::{derive_quotes, generate_events, tighten_composite, SynthConfig};

pub const OUT_DIR_ENV: &str = "OTM_OUT_DIR";
pub const DEFAULT_OUT_DIR: &str = "otm-out";
pub const DEFAULT_HOLDINGS_MS: [u64; 9] = [10, 100, 500, 1000, 2000, 3000, 4000, 5000, 10000];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Subcommand {
    Gen,
    Replay,
    Validate,
    Ot,
    QuoteOt,
    Ratio,
    Fit,
    Extrapolate,
    Report,
}

impl Subcommand {
    pub const ALL: [Subcommand; 9] = [
        Subcommand::Gen,
        Subcommand::Replay,
        Subcommand::Validate,
        Subcommand::Ot,
        Subcommand::QuoteOt,
        Subcommand::Ratio,
        Subcommand::Fit,
        Subcommand::Extrapolate,
        Subcommand::Report,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Subcommand::Gen => "gen",
            Subcommand::Replay => "replay",
            Subcommand::Validate => "validate",
            Subcommand::Ot => "ot",
            Subcommand::QuoteOt => "quote-ot",
            Subcommand::Ratio => "ratio",
            Subcommand::Fit => "fit",
            Subcommand::Extrapolate => "extrapolate",
            Subcommand::Report => "report",
        }
    }
}

impl fmt::Display for Subcommand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Subcommand {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Subcommand::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown subcommand {s:?}")))
    }
}

const KEYS: [&str; 23] = [
    "input",
    "composite",
    "model",
    "output",
    "out_dir",
    "holding_ms",
    "grid_ms",
    "fee",
    "tick_size",
    "seed",
    "duration_s",
    "limit_hz",
    "market_hz",
    "cancel_hz",
    "offset_p",
    "mean_size",
    "init_mid",
    "symbol",
    "composite_fraction",
    "variable_holding",
    "max_volume",
    "multiplier",
    "kind",
];

/// Raw `key = value` settings before typing.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Settings(BTreeMap<String, String>);

impl Settings {
    pub fn parse(text: &str) -> Result<Self> {
        let mut s = Settings::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: i as u64 + 1,
                message: format!("expected `key = value`, got {line:?}"),
            })?;
            s.set(k.trim(), v.trim())?;
        }
        Ok(s)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        Settings::parse(&fs::read_to_string(path).map_err(|e| Error::file(path, e))?)
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>) -> Result<()> {
        let key = key.replace('-', "_");
        if !KEYS.contains(&key.as_str()) {
            return Err(Error::Config(format!("unknown setting {key:?}")));
        }
        self.0.insert(key, value.into());
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    /// Values from `other` replace ours.
    pub fn overlay(&mut self, other: &Settings) {
        for (k, v) in &other.0 {
            self.0.insert(k.clone(), v.clone());
        }
    }

    fn typed<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: fmt::Display,
    {
        self.get(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|e| Error::Config(format!("invalid {key} {v:?}: {e}")))
            })
            .transpose()
    }

    fn list<T: FromStr>(&self, key: &str) -> Result<Option<Vec<T>>>
    where
        T::Err: fmt::Display,
    {
        self.get(key)
            .map(|v| {
                v.split(',')
                    .map(str::trim)
                    .filter(|x| !x.is_empty())
                    .map(|x| {
                        x.parse::<T>()
                            .map_err(|e| Error::Config(format!("invalid {key} entry {x:?}: {e}")))
                    })
                    .collect()
            })
            .transpose()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub subcommand: Subcommand,
    pub inputs: Vec<PathBuf>,
    pub composite_inputs: Vec<PathBuf>,
    pub model: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub out_dir: PathBuf,
    pub holding_ms: Vec<u64>,
    pub grid_ms: u64,
    /// Dollars per share per side, as decimal text; converted with each
    /// feed's own tick size.
    pub fee: String,
    pub synth: SynthConfig,
    pub symbol: Option<String>,
    pub composite_fraction: Option<f64>,
    pub variable_holding: Vec<u64>,
    pub max_volume: Option<u64>,
    pub multiplier: f64,
    pub kind: FeedKind,
}

fn default_out_dir() -> PathBuf {
    std::env::var_os(OUT_DIR_ENV)
        .filter(|v| !v.is_empty())
        .map_or_else(|| PathBuf::from(DEFAULT_OUT_DIR), PathBuf::from)
}

impl RunConfig {
    pub fn new(subcommand: Subcommand) -> Self {
        RunConfig {
            subcommand,
            inputs: Vec::new(),
            composite_inputs: Vec::new(),
            model: None,
            output: None,
            out_dir: default_out_dir(),
            holding_ms: DEFAULT_HOLDINGS_MS.to_vec(),
            grid_ms: 10,
            fee: "0".into(),
            synth: SynthConfig::default(),
            symbol: None,
            composite_fraction: None,
            variable_holding: Vec::new(),
            max_volume: None,
            multiplier: 1.0,
            kind: FeedKind::Event,
        }
    }

    pub fn from_settings(subcommand: Subcommand, s: &Settings) -> Result<Self> {
        let mut c = RunConfig::new(subcommand);
        let paths = |key: &str| -> Result<Vec<PathBuf>> {
            Ok(s.list::<PathBuf>(key)?.unwrap_or_default())
        };
        c.inputs = paths("input")?;
        c.composite_inputs = paths("composite")?;
        c.model = s.typed("model")?;
        c.output = s.typed("output")?;
        if let Some(d) = s.typed("out_dir")? {
            c.out_dir = d;
        }
        if let Some(h) = s.list("holding_ms")? {
            c.holding_ms = h;
        }
        if let Some(g) = s.typed("grid_ms")? {
            c.grid_ms = g;
        }
        if let Some(f) = s.get("fee") {
            c.fee = f.to_string();
        }
        let y = &mut c.synth;
        if let Some(t) = s.typed("tick_size")? {
            y.tick_size = t;
        }
        if let Some(v) = s.typed("seed")? {
            y.seed = v;
        }
        if let Some(v) = s.typed("duration_s")? {
            y.duration_s = v;
        }
        if let Some(v) = s.typed("limit_hz")? {
            y.limit_rate_hz = v;
        }
        if let Some(v) = s.typed("market_hz")? {
            y.market_rate_hz = v;
        }
        if let Some(v) = s.typed("cancel_hz")? {
            y.cancel_rate_hz = v;
        }
        if let Some(v) = s.typed("offset_p")? {
            y.offset_geometric_p = v;
        }
        if let Some(v) = s.typed("mean_size")? {
            y.mean_order_size = v;
        }
        if let Some(v) = s.typed::<i64>("init_mid")? {
            y.init_mid = TickPrice(v);
        }
        c.symbol = s.typed("symbol")?;
        c.composite_fraction = s.typed("composite_fraction")?;
        c.variable_holding = s.list("variable_holding")?.unwrap_or_default();
        c.max_volume = s.typed("max_volume")?;
        if let Some(m) = s.typed("multiplier")? {
            c.multiplier = m;
        }
        if let Some(k) = s.get("kind") {
            c.kind = match k {
                "event" => FeedKind::Event,
                "quote" => FeedKind::Quote,
                _ => return Err(Error::Config(format!("invalid kind {k:?}"))),
            };
        }
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.holding_ms.is_empty() || self.holding_ms.contains(&0) {
            return Err(Error::Config("holding periods must be positive".into()));
        }
        if self.variable_holding.contains(&0) {
            return Err(Error::Config("variable holding periods must be positive".into()));
        }
        if self.grid_ms == 0 {
            return Err(Error::Config("grid_ms must be positive".into()));
        }
        if !(self.multiplier.is_finite() && self.multiplier >= 0.0) {
            return Err(Error::Config("multiplier must be non-negative".into()));
        }
        self.synth.validate()?;
        let needs_input = !matches!(self.subcommand, Subcommand::Gen);
        if needs_input && self.inputs.is_empty() {
            return Err(Error::Config(format!("{} needs at least one input", self.subcommand)));
        }
        Ok(())
    }

    fn fee_ticks(&self, tick: TickSize) -> Result<i64> {
        let fee = tick.parse_ticks(&self.fee)?;
        if fee < 0 {
            return Err(Error::Config("fee must be non-negative".into()));
        }
        Ok(fee)
    }
}

/// Run one subcommand and return the artifacts it wrote, in write order.
pub fn run_pipeline(config: &RunConfig) -> Result<Vec<PathBuf>> {
    config.validate()?;
    let dir = &config.out_dir;
    fs::create_dir_all(dir).map_err(|e| Error::file(dir, e))?;
    match config.subcommand {
        Subcommand::Gen => run_gen(config),
        Subcommand::Replay => run_replay(config),
        Subcommand::Validate => run_validate(config),
        Subcommand::Ot => run_ot(config),
        Subcommand::QuoteOt => run_quote_ot(config),
        Subcommand::Ratio => run_ratio(config),
        Subcommand::Fit => run_fit(config),
        Subcommand::Extrapolate => run_extrapolate(config),
        Subcommand::Report => run_report(config),
    }
}

/// File name of `path` without `.gz` and `.csv`; `stdin` for `-`.
fn stem(path: &Path) -> String {
    if path == Path::new("-") {
        return "stdin".into();
    }
    let mut name = path
        .file_name()
        .map_or_else(|| "input".into(), |n| n.to_string_lossy().into_owned());
    for ext in [".gz", ".csv"] {
        if let Some(s) = name.strip_suffix(ext) {
            name = s.to_string();
        }
    }
    name
}

fn csv_writer(path: &Path) -> Result<csv::Writer<Box<dyn Write>>> {
    Ok(csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(feed::open_output(path)?))
}

fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(value)? + "\n").map_err(|e| Error::file(path, e))
}

fn run_gen(c: &RunConfig) -> Result<Vec<PathBuf>> {
    let (mut meta, events) = generate_events(&c.synth)?;
    if let Some(s) = &c.symbol {
        meta.symbol = s.clone();
    }
    let mut written = Vec::new();
    let events_path = c
        .output
        .clone()
        .unwrap_or_else(|| c.out_dir.join(format!("{}.events.csv", meta.symbol)));
    feed::write_events(&events_path, &meta, &events)?;
    written.push(events_path);

    let quotes = derive_quotes(&events, meta.mode, &meta.symbol, Venue::Primary)?;
    let path = c.out_dir.join(format!("{}.quotes.primary.csv", meta.symbol));
    feed::write_quotes(&path, &meta, &quotes)?;
    written.push(path);
    if let Some(f) = c.composite_fraction {
        let comp = tighten_composite(&quotes, f)?;
        let path = c.out_dir.join(format!("{}.quotes.composite.csv", meta.symbol));
        feed::write_quotes(&path, &meta, &comp)?;
        written.push(path);
    }
    Ok(written)
}

fn run_replay(c: &RunConfig) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    for input in &c.inputs {
        let (meta, events) = feed::read_events(input)?;
        let path = c.out_dir.join(format!("{}.replay.csv", stem(input)));
        let mut w = csv_writer(&path)?;
        w.write_record([
            "index", "ts_ns", "action", "order_id", "fills", "filled_qty", "checksum",
            "bid_ticks", "bid_size", "ask_ticks", "ask_size",
        ])?;
        let mut book = OrderBook::new();
        let opt = |p: Option<TickPrice>| p.map_or(String::new(), |p| p.ticks().to_string());
        for (index, ev) in events.iter().enumerate() {
            let fills = book
                .apply_event(ev, meta.mode)
                .map_err(|source| Error::Integrity { index, source })?;
            let q = book.inside_quote();
            w.write_record([
                index.to_string(),
                ev.ts_ns.to_string(),
                ev.action.code().to_string(),
                ev.order_id.to_string(),
                fills.len().to_string(),
                fills.iter().map(|f| f.qty).sum::<u64>().to_string(),
                format!("{:016x}", book.checksum()),
                opt(q.bid),
                q.bid_depth.to_string(),
                opt(q.ask),
                q.ask_depth.to_string(),
            ])?;
        }
        w.flush()?;
        written.push(path);

        let quotes = derive_quotes(&events, meta.mode, &meta.symbol, Venue::Primary)?;
        let path = c.out_dir.join(format!("{}.quotes.csv", stem(input)));
        feed::write_quotes(&path, &meta, &quotes)?;
        written.push(path);
    }
    Ok(written)
}

#[derive(Serialize)]
struct ValidationOut<'a> {
    input: String,
    ok: bool,
    records: u64,
    violations: &'a [feed::Violation],
}

fn run_validate(c: &RunConfig) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    let mut bad = 0usize;
    for input in &c.inputs {
        let report = feed::validate_feed(input, c.kind)?;
        let path = c.out_dir.join(format!("{}.validation.json", stem(input)));
        write_json(
            &path,
            &ValidationOut {
                input: input
                    .file_name()
                    .map_or_else(|| "-".into(), |n| n.to_string_lossy().into_owned()),
                ok: report.is_ok(),
                records: report.records,
                violations: &report.violations,
            },
        )?;
        written.push(path);
        bad += report.violations.len();
    }
    if bad > 0 {
        return Err(Error::InvalidRecord(format!(
            "{bad} violation(s); see {}",
            c.out_dir.display()
        )));
    }
    Ok(written)
}

fn sort_results(results: &mut [SimulationResult]) {
    results.sort_by(|a, b| {
        (&a.symbol, &a.date, a.holding_ms, a.venue.map(Venue::code))
            .cmp(&(&b.symbol, &b.date, b.holding_ms, b.venue.map(Venue::code)))
    });
}

/// `<name>.csv` and `<name>.json` for a result set.
fn write_results(dir: &Path, name: &str, results: &[SimulationResult]) -> Result<Vec<PathBuf>> {
    let quote_level = results.iter().any(|r| r.venue.is_some());
    let csv_path = dir.join(format!("{name}.csv"));
    let mut w = csv_writer(&csv_path)?;
    let mut header: Vec<&str> = SimulationResult::CSV_HEADER.to_vec();
    header.push("profit_dollars");
    if quote_level {
        header.push("venue");
    }
    w.write_record(&header)?;
    for r in results {
        let mut row = r.csv_row();
        row.insert(
            SimulationResult::CSV_HEADER.len(),
            r.tick_size.format_dollars(r.totals.profit),
        );
        w.write_record(&row)?;
    }
    w.flush()?;
    let json_path = dir.join(format!("{name}.json"));
    write_json(&json_path, results)?;
    Ok(vec![csv_path, json_path])
}

fn run_ot(c: &RunConfig) -> Result<Vec<PathBuf>> {
    let mut fixed = Vec::new();
    let mut variable = Vec::new();
    for input in &c.inputs {
        let (meta, events) = feed::read_events(input)?;
        let fee = c.fee_ticks(meta.tick_size)?;
        let base = |h: u64| {
            let cfg = OtmConfig::new(h).with_grid_ms(c.grid_ms).with_fee(fee);
            match c.max_volume {
                Some(v) => cfg.with_max_volume(v),
                None => cfg,
            }
        };
        let configs: Vec<OtmConfig> = c.holding_ms.iter().map(|&h| base(h)).collect();
        fixed.extend(simulate_many(&events, &meta, &configs)?);
        if !c.variable_holding.is_empty() {
            let configs: Vec<OtmConfig> = c
                .holding_ms
                .iter()
                .map(|&h| {
                    let grid = c.variable_holding.iter().copied().filter(|&v| v <= h).collect();
                    base(h).with_holding_grid(grid)
                })
                .collect();
            variable.extend(simulate_many(&events, &meta, &configs)?);
        }
    }
    sort_results(&mut fixed);
    let mut written = write_results(&c.out_dir, "ot", &fixed)?;
    if !c.variable_holding.is_empty() {
        sort_results(&mut variable);
        written.extend(write_results(&c.out_dir, "ot_variable", &variable)?);
    }
    Ok(written)
}

/// Quotes of each (symbol, venue) in one feed, in feed order.
fn split_quotes(quotes: Vec<QuoteRecord>) -> BTreeMap<(String, &'static str), Vec<QuoteRecord>> {
    let mut groups: BTreeMap<(String, &'static str), Vec<QuoteRecord>> = BTreeMap::new();
    for q in quotes {
        groups.entry((q.symbol.clone(), q.venue.code())).or_default().push(q);
    }
    groups
}

fn quote_results(c: &RunConfig, inputs: &[PathBuf]) -> Result<(Vec<SimulationResult>, BTreeMap<String, u64>)> {
    let mut results = Vec::new();
    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    for input in inputs {
        let qf = feed::read_quotes(input, QuoteFilter::DropInvalid)?;
        let fee = c.fee_ticks(qf.meta.tick_size)?;
        for ((symbol, _), quotes) in split_quotes(qf.quotes) {
            let meta = FeedMeta {
                symbol: symbol.clone(),
                ..qf.meta.clone()
            };
            *counts.entry(symbol).or_default() += quotes.len() as u64;
            let sims: Vec<Result<SimulationResult>> = std::thread::scope(|s| {
                let handles: Vec<_> = c
                    .holding_ms
                    .iter()
                    .map(|&h| {
                        let cfg = QuoteOtmConfig {
                            holding_ms: h,
                            grid_ms: c.grid_ms,
                            fee_per_share_per_side: fee,
                        };
                        let (quotes, meta) = (&quotes, &meta);
                        s.spawn(move || simulate_quotes(quotes, meta, &cfg))
                    })
                    .collect();
                handles
                    .into_iter()
                    .map(|h| h.join().expect("simulation thread panicked"))
                    .collect()
            });
            for r in sims {
                results.push(r?);
            }
        }
    }
    sort_results(&mut results);
    Ok((results, counts))
}

fn write_counts(path: &Path, counts: &BTreeMap<String, u64>) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["symbol", "quotes"])?;
    for (s, n) in counts {
        w.write_record([s.clone(), n.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

fn run_quote_ot(c: &RunConfig) -> Result<Vec<PathBuf>> {
    let (results, counts) = quote_results(c, &c.inputs)?;
    let mut written = write_results(&c.out_dir, "quote_ot", &results)?;
    let path = c.out_dir.join("quote_counts.csv");
    write_counts(&path, &counts)?;
    written.push(path);
    Ok(written)
}

fn run_ratio(c: &RunConfig) -> Result<Vec<PathBuf>> {
    if c.composite_inputs.is_empty() {
        return Err(Error::Config("ratio needs composite inputs".into()));
    }
    let (primary, _) = quote_results(c, &c.inputs)?;
    let (composite, _) = quote_results(c, &c.composite_inputs)?;
    let report = composite_ratio(&primary, &composite)?;
    let path = c.out_dir.join("ratio.csv");
    let mut w = csv_writer(&path)?;
    w.write_record([
        "symbol",
        "holding_ms",
        "primary_profit_ticks_cash",
        "composite_profit_ticks_cash",
        "ratio",
        "status",
    ])?;
    for r in &report.rows {
        let status = match r.status {
            RatioStatus::Ok => "ok",
            RatioStatus::ZeroPrimary => "zero_primary",
            RatioStatus::Undefined => "undefined",
        };
        w.write_record([
            r.symbol.clone(),
            r.holding_ms.to_string(),
            r.primary_profit.to_string(),
            r.composite_profit.to_string(),
            r.ratio.map_or(String::new(), |x| x.to_string()),
            status.to_string(),
        ])?;
    }
    w.flush()?;
    let json = c.out_dir.join("ratio.json");
    write_json(&json, &report)?;
    Ok(vec![path, json])
}

fn read_table(path: &Path, required: &[&str]) -> Result<Vec<BTreeMap<String, String>>> {
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(feed::open_input(path)?);
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if let Some(missing) = required.iter().find(|k| !header.iter().any(|h| h == *k)) {
        return Err(Error::Parse {
            line: 1,
            message: format!("{}: missing column {missing:?}", path.display()),
        });
    }
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        rows.push(header.iter().cloned().zip(rec.iter().map(str::to_string)).collect());
    }
    Ok(rows)
}

fn field<T: FromStr>(row: &BTreeMap<String, String>, key: &str, line: usize) -> Result<T> {
    let v = &row[key];
    v.parse().map_err(|_| Error::Parse {
        line: line as u64 + 2,
        message: format!("invalid {key} {v:?}"),
    })
}

fn run_fit(c: &RunConfig) -> Result<Vec<PathBuf>> {
    let mut points = Vec::new();
    for input in &c.inputs {
        for (i, row) in read_table(input, &["quotes", "profit"])?.iter().enumerate() {
            points.push((field::<f64>(row, "quotes", i)?, field::<f64>(row, "profit", i)?));
        }
    }
    let model = fit_power_law(&points)?;
    let path = c.out_dir.join("fit.json");
    write_json(&path, &model)?;
    Ok(vec![path])
}

#[derive(Serialize)]
struct ExtrapolationOut<'a> {
    a: f64,
    b: f64,
    r_squared: f64,
    total: f64,
    composite_multiplier: f64,
    symbols: usize,
    histogram: &'a [crate::powerlaw::HistogramBin],
}

fn run_extrapolate(c: &RunConfig) -> Result<Vec<PathBuf>> {
    let model_path = c
        .model
        .as_ref()
        .ok_or_else(|| Error::Config("extrapolate needs a model".into()))?;
    let text = fs::read_to_string(model_path).map_err(|e| Error::file(model_path, e))?;
    let model: PowerLawModel = serde_json::from_str(&text)?;
    let mut universe = Vec::new();
    for input in &c.inputs {
        for (i, row) in read_table(input, &["symbol", "quotes"])?.iter().enumerate() {
            universe.push((row["symbol"].clone(), field::<u64>(row, "quotes", i)?));
        }
    }
    let est = extrapolate_universe(&model, &universe, c.multiplier);

    let pred = c.out_dir.join("predictions.csv");
    let mut w = csv_writer(&pred)?;
    w.write_record(["symbol", "predicted_profit"])?;
    for p in &est.predictions {
        w.write_record([p.symbol.clone(), p.predicted_profit.to_string()])?;
    }
    w.flush()?;

    let hist = c.out_dir.join("histogram.csv");
    let mut w = csv_writer(&hist)?;
    w.write_record(["decade", "lower", "upper", "count", "total"])?;
    for b in &est.histogram {
        w.write_record([
            b.decade.map_or("zero".into(), |d| d.to_string()),
            b.lower.to_string(),
            b.upper.to_string(),
            b.count.to_string(),
            b.total.to_string(),
        ])?;
    }
    w.flush()?;

    let json = c.out_dir.join("extrapolation.json");
    write_json(
        &json,
        &ExtrapolationOut {
            a: model.a,
            b: model.b,
            r_squared: model.r_squared,
            total: est.total,
            composite_multiplier: est.composite_multiplier,
            symbols: est.predictions.len(),
            histogram: &est.histogram,
        },
    )?;
    Ok(vec![pred, hist, json])
}

/// External reference figures kept next to the report for comparison only.
#[derive(Serialize)]
struct Annotation {
    key: &'static str,
    value: &'static str,
    note: &'static str,
}

const ANNOTATIONS: [Annotation; 7] = [
    Annotation {
        key: "profit_19_stocks_10s",
        value: "$3.4 billion",
        note: "real-market figure for 19 stocks at a 10 s holding period; not reproducible on synthetic data",
    },
    Annotation {
        key: "profit_19_stocks_10ms",
        value: "$21 million",
        note: "real-market figure at a 10 ms holding period",
    },
    Annotation {
        key: "universe_bound",
        value: "$21.3 billion",
        note: "real-market extrapolation to all listed stocks",
    },
    Annotation {
        key: "top5_profit_share",
        value: "73%",
        note: "share of profit earned by the five most profitable stocks",
    },
    Annotation {
        key: "composite_to_primary_factor",
        value: "2.1",
        note: "mean composite/primary quote-level profit ratio",
    },
    Annotation {
        key: "variable_holding_uplift",
        value: "< 50%",
        note: "profit increase from choosing the best holding period per trade",
    },
    Annotation {
        key: "full_vs_quote_correlation",
        value: "0.969",
        note: "correlation of full-book and quote-level profits on real data",
    },
];

fn run_report(c: &RunConfig) -> Result<Vec<PathBuf>> {
    let mut results: Vec<SimulationResult> = Vec::new();
    let mut seen = BTreeSet::new();
    for input in &c.inputs {
        let text = fs::read_to_string(input).map_err(|e| Error::file(input, e))?;
        for r in serde_json::from_str::<Vec<SimulationResult>>(&text)? {
            let key = (r.symbol.clone(), r.date.clone(), r.holding_ms, r.venue.map(Venue::code));
            if !seen.insert(key) {
                return Err(Error::Config(format!(
                    "duplicate result for {} {} {} ms",
                    r.symbol, r.date, r.holding_ms
                )));
            }
            results.push(r);
        }
    }
    let report = aggregate_report(&results)?;
    let dir = c.out_dir.join("report");
    let mut written = write_report(&report, &dir)?;
    let path = dir.join("annotations.json");
    write_json(&path, &ANNOTATIONS)?;
    written.push(path);
    Ok(written)
}
