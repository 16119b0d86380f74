//! Integer price and cash units.
//!
//! Prices are whole multiples of a configured tick. Cash amounts are kept in
//! "tick-cash" (price ticks times shares), so every sum in the crate is exact.
//! Conversion to dollars only happens when formatting reports.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Cash in tick units: one unit is one share traded one tick apart.
pub type Cash = i64;

/// A price expressed as a count of ticks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TickPrice(pub i64);

impl TickPrice {
    pub const fn new(ticks: i64) -> Self {
        TickPrice(ticks)
    }

    pub const fn ticks(self) -> i64 {
        self.0
    }

    /// Cash value of `qty` shares at this price.
    pub fn notional(self, qty: u64) -> Cash {
        self.0 * qty as i64
    }
}

impl fmt::Display for TickPrice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Buy,
    Sell,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::Buy => Side::Sell,
            Side::Sell => Side::Buy,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Side::Buy => 'B',
            Side::Sell => 'S',
        }
    }
}

/// Size of one tick in millionths of a dollar.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct TickSize {
    micros: u64,
}

impl TickSize {
    /// $0.001, fine enough for sub-penny quotes such as 24.062.
    pub const MILLI: TickSize = TickSize { micros: 1_000 };
    /// $0.01, decimalized pricing.
    pub const CENT: TickSize = TickSize { micros: 10_000 };

    pub fn from_micros(micros: u64) -> Result<Self, Error> {
        if micros == 0 {
            return Err(Error::Config("tick size must be positive".into()));
        }
        Ok(TickSize { micros })
    }

    pub fn micros(self) -> u64 {
        self.micros
    }

    /// Decimal places needed to print a multiple of this tick exactly.
    pub fn decimals(self) -> usize {
        let mut d = 6;
        let mut m = self.micros;
        while d > 0 && m % 10 == 0 {
            m /= 10;
            d -= 1;
        }
        d
    }

    pub fn to_dollars(self, cash: Cash) -> f64 {
        cash as f64 * self.micros as f64 / 1e6
    }

    /// Exact decimal rendering of a tick-cash amount in dollars.
    pub fn format_dollars(self, cash: Cash) -> String {
        let micros = cash as i128 * self.micros as i128;
        let neg = micros < 0;
        let abs = micros.unsigned_abs();
        let whole = abs / 1_000_000;
        let frac = abs % 1_000_000;
        let decimals = self.decimals();
        let mut out = String::new();
        if neg {
            out.push('-');
        }
        out.push_str(&whole.to_string());
        if decimals > 0 {
            let frac = format!("{frac:06}");
            out.push('.');
            out.push_str(&frac[..decimals]);
        }
        out
    }

    /// Convert a dollar amount given as decimal text into whole ticks.
    pub fn parse_ticks(self, dollars: &str) -> Result<i64, Error> {
        let micros = parse_micros(dollars)?;
        if micros % self.micros as i128 != 0 {
            return Err(Error::Config(format!(
                "{dollars} is not a multiple of the tick size {self}"
            )));
        }
        Ok((micros / self.micros as i128) as i64)
    }
}

impl Default for TickSize {
    fn default() -> Self {
        TickSize::MILLI
    }
}

fn parse_micros(s: &str) -> Result<i128, Error> {
    let bad = || Error::Config(format!("invalid decimal amount {s:?}"));
    let s = s.trim();
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let (whole, frac) = body.split_once('.').unwrap_or((body, ""));
    if (whole.is_empty() && frac.is_empty()) || frac.len() > 6 {
        return Err(bad());
    }
    if !whole.bytes().chain(frac.bytes()).all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    let whole: i128 = if whole.is_empty() {
        0
    } else {
        whole.parse().map_err(|_| bad())?
    };
    let mut frac_micros: i128 = 0;
    for (i, b) in frac.bytes().enumerate() {
        frac_micros += (b - b'0') as i128 * 10i128.pow(5 - i as u32);
    }
    let v = whole * 1_000_000 + frac_micros;
    Ok(if neg { -v } else { v })
}

impl FromStr for TickSize {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let micros = parse_micros(s)?;
        if micros <= 0 || micros > u64::MAX as i128 {
            return Err(Error::Config(format!("tick size must be positive, got {s}")));
        }
        TickSize::from_micros(micros as u64)
    }
}

impl fmt::Display for TickSize {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.format_dollars(1))
    }
}

impl From<TickSize> for String {
    fn from(t: TickSize) -> String {
        t.to_string()
    }
}

impl TryFrom<String> for TickSize {
    type Error = Error;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}
