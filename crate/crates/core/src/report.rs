//! Aggregate reports over many simulation results.
//!
//! Every table is built from integer tick-cash totals; dollar columns are
//! derived from them with the common tick size. Column formulas:
//!
//! | column | formula |
//! |---|---|
//! | `profit_ticks_cash` | sum of trade profits |
//! | `trades` | number of profitable round trips |
//! | `shares` | sum of trade volumes |
//! | `avg_shares` | `shares / trades` |
//! | `avg_profit` | `profit_ticks_cash / trades` |
//! | `avg_return` | mean over trades of `profit / entry_cash` |
//! | `cum_share` | running profit of the top-ranked symbols / holding total |

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::otm::{SimulationResult, Totals};
use crate::powerlaw::{decade_histogram, HistogramBin};
use crate::price::{Cash, TickSize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HoldingRow {
    pub holding_ms: u64,
    pub totals: Totals,
    pub avg_shares: f64,
    pub avg_profit: f64,
    pub avg_return: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymbolRow {
    pub holding_ms: u64,
    pub rank: usize,
    pub symbol: String,
    pub totals: Totals,
    pub avg_profit: f64,
    pub avg_return: f64,
    pub cum_share: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonthlyRow {
    pub holding_ms: u64,
    /// One cell per entry of `Report::months`.
    pub cells: Vec<Cash>,
    pub total: Cash,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramRow {
    pub holding_ms: u64,
    pub bin: HistogramBin,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tick_size: TickSize,
    pub holdings: Vec<HoldingRow>,
    pub symbols: Vec<SymbolRow>,
    pub months: Vec<String>,
    pub monthly: Vec<MonthlyRow>,
    /// Per-symbol profit in dollars, binned by decade.
    pub histogram: Vec<HistogramRow>,
}

fn averages(totals: &Totals, returns: impl Iterator<Item = f64>) -> (f64, f64, f64) {
    if totals.trades == 0 {
        return (0.0, 0.0, 0.0);
    }
    let n = totals.trades as f64;
    (
        totals.shares as f64 / n,
        totals.profit as f64 / n,
        returns.sum::<f64>() / n,
    )
}

/// Build every table. Results are merged in (holding, symbol, date) order so
/// the output does not depend on input order.
pub fn aggregate_report(results: &[SimulationResult]) -> Result<Report> {
    let Some(first) = results.first() else {
        return Err(Error::Config("report needs at least one simulation result".into()));
    };
    let tick_size = first.tick_size;
    if let Some(r) = results.iter().find(|r| r.tick_size != tick_size) {
        return Err(Error::Config(format!(
            "mixed tick sizes in report: {} and {}",
            tick_size, r.tick_size
        )));
    }
    let mut sorted: Vec<&SimulationResult> = results.iter().collect();
    sorted.sort_by(|a, b| {
        (a.holding_ms, &a.symbol, &a.date).cmp(&(b.holding_ms, &b.symbol, &b.date))
    });

    let mut by_holding: BTreeMap<u64, Vec<&SimulationResult>> = BTreeMap::new();
    for r in &sorted {
        by_holding.entry(r.holding_ms).or_default().push(r);
    }
    let months: Vec<String> = sorted
        .iter()
        .flat_map(|r| r.monthly.keys().cloned())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();

    let mut holdings = Vec::new();
    let mut symbols = Vec::new();
    let mut monthly = Vec::new();
    let mut histogram = Vec::new();
    for (&holding_ms, rs) in &by_holding {
        let mut totals = Totals::default();
        for r in rs {
            totals.merge(&r.totals);
        }
        let (avg_shares, avg_profit, avg_return) = averages(
            &totals,
            rs.iter().flat_map(|r| r.trades.iter().map(|t| t.ret)),
        );
        holdings.push(HoldingRow {
            holding_ms,
            totals,
            avg_shares,
            avg_profit,
            avg_return,
        });

        let mut per_symbol: BTreeMap<&str, Vec<&SimulationResult>> = BTreeMap::new();
        for r in rs {
            per_symbol.entry(r.symbol.as_str()).or_default().push(r);
        }
        let mut ranked: Vec<(String, Totals, f64, f64)> = per_symbol
            .into_iter()
            .map(|(sym, srs)| {
                let mut t = Totals::default();
                for r in &srs {
                    t.merge(&r.totals);
                }
                let (_, ap, ar) =
                    averages(&t, srs.iter().flat_map(|r| r.trades.iter().map(|x| x.ret)));
                (sym.to_string(), t, ap, ar)
            })
            .collect();
        ranked.sort_by(|a, b| b.1.profit.cmp(&a.1.profit).then_with(|| a.0.cmp(&b.0)));
        let mut cum: Cash = 0;
        for (i, (symbol, t, ap, ar)) in ranked.iter().enumerate() {
            cum += t.profit;
            symbols.push(SymbolRow {
                holding_ms,
                rank: i + 1,
                symbol: symbol.clone(),
                totals: *t,
                avg_profit: *ap,
                avg_return: *ar,
                cum_share: if totals.profit == 0 {
                    0.0
                } else {
                    cum as f64 / totals.profit as f64
                },
            });
        }
        for bin in decade_histogram(ranked.iter().map(|r| tick_size.to_dollars(r.1.profit))) {
            histogram.push(HistogramRow { holding_ms, bin });
        }

        let cells: Vec<Cash> = months
            .iter()
            .map(|m| {
                rs.iter()
                    .filter_map(|r| r.monthly.get(m))
                    .map(|t| t.profit)
                    .sum()
            })
            .collect();
        monthly.push(MonthlyRow {
            holding_ms,
            cells,
            total: totals.profit,
        });
    }

    Ok(Report {
        tick_size,
        holdings,
        symbols,
        months,
        monthly,
        histogram,
    })
}

fn write_csv(path: &Path, header: &[String], rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::file(path, io),
        other => Error::Config(format!("{}: {other:?}", path.display())),
    })?;
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush().map_err(|e| Error::file(path, e))?;
    Ok(())
}

fn strings(items: &[&str]) -> Vec<String> {
    items.iter().map(|s| s.to_string()).collect()
}

/// Write `holding.csv`, `symbols.csv`, `monthly.csv`, `histogram.csv` and
/// `report.json` into `dir`.
pub fn write_report(report: &Report, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::file(dir, e))?;
    let tick = report.tick_size;
    let mut written = Vec::new();

    let path = dir.join("holding.csv");
    let rows: Vec<Vec<String>> = report
        .holdings
        .iter()
        .map(|h| {
            vec![
                h.holding_ms.to_string(),
                h.totals.profit.to_string(),
                tick.format_dollars(h.totals.profit),
                h.totals.trades.to_string(),
                h.totals.shares.to_string(),
                h.avg_shares.to_string(),
                h.avg_profit.to_string(),
                h.avg_return.to_string(),
            ]
        })
        .collect();
    write_csv(
        &path,
        &strings(&[
            "holding_ms",
            "profit_ticks_cash",
            "profit_dollars",
            "trades",
            "shares",
            "avg_shares",
            "avg_profit",
            "avg_return",
        ]),
        &rows,
    )?;
    written.push(path);

    let path = dir.join("symbols.csv");
    let rows: Vec<Vec<String>> = report
        .symbols
        .iter()
        .map(|s| {
            vec![
                s.holding_ms.to_string(),
                s.rank.to_string(),
                s.symbol.clone(),
                s.totals.profit.to_string(),
                tick.format_dollars(s.totals.profit),
                s.totals.trades.to_string(),
                s.avg_profit.to_string(),
                s.avg_return.to_string(),
                s.cum_share.to_string(),
            ]
        })
        .collect();
    write_csv(
        &path,
        &strings(&[
            "holding_ms",
            "rank",
            "symbol",
            "profit_ticks_cash",
            "profit_dollars",
            "trades",
            "avg_profit",
            "avg_return",
            "cum_share",
        ]),
        &rows,
    )?;
    written.push(path);

    let path = dir.join("monthly.csv");
    let mut header = vec!["holding_ms".to_string()];
    header.extend(report.months.iter().cloned());
    header.push("total".into());
    let rows: Vec<Vec<String>> = report
        .monthly
        .iter()
        .map(|m| {
            let mut row = vec![m.holding_ms.to_string()];
            row.extend(m.cells.iter().map(|c| c.to_string()));
            row.push(m.total.to_string());
            row
        })
        .collect();
    write_csv(&path, &header, &rows)?;
    written.push(path);

    let path = dir.join("histogram.csv");
    let rows: Vec<Vec<String>> = report
        .histogram
        .iter()
        .map(|h| {
            vec![
                h.holding_ms.to_string(),
                h.bin.decade.map_or("zero".into(), |d| d.to_string()),
                h.bin.lower.to_string(),
                h.bin.upper.to_string(),
                h.bin.count.to_string(),
                h.bin.total.to_string(),
            ]
        })
        .collect();
    write_csv(
        &path,
        &strings(&["holding_ms", "decade", "lower", "upper", "count", "total_dollars"]),
        &rows,
    )?;
    written.push(path);

    let path = dir.join("report.json");
    fs::write(&path, serde_json::to_string_pretty(report)? + "\n")
        .map_err(|e| Error::file(&path, e))?;
    written.push(path);
    Ok(written)
}
