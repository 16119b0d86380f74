//! Power-law model `profit = a * quotes^b` and universe extrapolation.
//!
//! The fit is ordinary least squares of `ln(profit)` on `ln(quotes)`; R² is
//! reported in log space. Points with a non-positive coordinate cannot be
//! logged and are skipped.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLawModel {
    pub a: f64,
    pub b: f64,
    pub r_squared: f64,
    pub n_points: usize,
    /// Input points skipped because a coordinate was not positive.
    pub excluded: usize,
}

impl PowerLawModel {
    pub fn predict(&self, quotes: f64) -> f64 {
        if quotes <= 0.0 {
            0.0
        } else {
            self.a * quotes.powf(self.b)
        }
    }
}

/// Fit `(quotes, profit)` pairs.
pub fn fit_power_law(points: &[(f64, f64)]) -> Result<PowerLawModel> {
    let logs: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0 && x.is_finite() && y.is_finite())
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    let n = logs.len();
    if n < 2 {
        return Err(Error::TooFewPoints { usable: n });
    }
    let nf = n as f64;
    let mean_x = logs.iter().map(|p| p.0).sum::<f64>() / nf;
    let mean_y = logs.iter().map(|p| p.1).sum::<f64>() / nf;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for &(x, y) in &logs {
        let dx = x - mean_x;
        let dy = y - mean_y;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return Err(Error::DegenerateFit);
    }
    let b = sxy / sxx;
    let ln_a = mean_y - b * mean_x;
    let ss_res: f64 = logs
        .iter()
        .map(|&(x, y)| {
            let r = y - (ln_a + b * x);
            r * r
        })
        .sum();
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        (1.0 - ss_res / syy).clamp(0.0, 1.0)
    };
    Ok(PowerLawModel {
        a: ln_a.exp(),
        b,
        r_squared,
        n_points: n,
        excluded: points.len() - n,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymbolPrediction {
    pub symbol: String,
    pub quotes: u64,
    pub predicted_profit: f64,
}

/// One decade-wide histogram bin; `decade = None` collects zero predictions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub decade: Option<i32>,
    pub lower: f64,
    pub upper: f64,
    pub count: u64,
    pub total: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniverseEstimate {
    pub predictions: Vec<SymbolPrediction>,
    pub total: f64,
    pub composite_multiplier: f64,
    pub histogram: Vec<HistogramBin>,
}

/// Predict every symbol of `universe` (with the multiplier applied) and bin
/// the predictions by decade.
pub fn extrapolate_universe(
    model: &PowerLawModel,
    universe: &[(String, u64)],
    composite_multiplier: f64,
) -> UniverseEstimate {
    let predictions: Vec<SymbolPrediction> = universe
        .iter()
        .map(|(symbol, quotes)| SymbolPrediction {
            symbol: symbol.clone(),
            quotes: *quotes,
            predicted_profit: model.predict(*quotes as f64) * composite_multiplier,
        })
        .collect();
    let total = predictions.iter().map(|p| p.predicted_profit).sum();
    let histogram = decade_histogram(predictions.iter().map(|p| p.predicted_profit));
    UniverseEstimate {
        predictions,
        total,
        composite_multiplier,
        histogram,
    }
}

/// Bin values into `[10^k, 10^(k+1))`; values `<= 0` go to a separate bin.
pub fn decade_histogram(values: impl IntoIterator<Item = f64>) -> Vec<HistogramBin> {
    let mut bins: BTreeMap<Option<i32>, (u64, f64)> = BTreeMap::new();
    for v in values {
        let key = (v > 0.0).then(|| {
            let mut k = v.log10().floor() as i32;
            // guard log10 rounding at exact powers of ten
            if 10f64.powi(k) > v {
                k -= 1;
            } else if 10f64.powi(k + 1) <= v {
                k += 1;
            }
            k
        });
        let e = bins.entry(key).or_default();
        e.0 += 1;
        e.1 += v;
    }
    bins.into_iter()
        .map(|(decade, (count, total))| {
            let (lower, upper) = match decade {
                Some(k) => (10f64.powi(k), 10f64.powi(k + 1)),
                None => (0.0, 0.0),
            };
            HistogramBin {
                decade,
                lower,
                upper,
                count,
                total,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn noiseless_law_is_recovered() {
        let pts: Vec<(f64, f64)> = [10.0, 100.0, 1000.0]
            .iter()
            .map(|&x: &f64| (x, 2.0 * x.powf(1.5)))
            .collect();
        let m = fit_power_law(&pts).unwrap();
        assert!((m.a - 2.0).abs() / 2.0 < 1e-9);
        assert!((m.b - 1.5).abs() / 1.5 < 1e-9);
        assert!((m.r_squared - 1.0).abs() < 1e-9);
        assert_eq!(m.n_points, 3);
    }

    #[test]
    fn too_few_points() {
        assert!(matches!(
            fit_power_law(&[(10.0, 1.0), (0.0, 5.0), (20.0, -1.0)]),
            Err(Error::TooFewPoints { usable: 1 })
        ));
        assert!(matches!(
            fit_power_law(&[(10.0, 1.0), (10.0, 2.0)]),
            Err(Error::DegenerateFit)
        ));
    }

    #[test]
    fn excluded_points_are_counted() {
        let m = fit_power_law(&[(10.0, 1.0), (100.0, 10.0), (5.0, 0.0)]).unwrap();
        assert_eq!(m.excluded, 1);
    }

    #[test]
    fn zero_quotes_predict_zero() {
        let m = PowerLawModel {
            a: 3.0,
            b: 0.9,
            r_squared: 1.0,
            n_points: 2,
            excluded: 0,
        };
        let est = extrapolate_universe(&m, &[("Z".into(), 0)], 2.0);
        assert_eq!(est.total, 0.0);
        assert_eq!(est.histogram[0].decade, None);
    }

    #[test]
    fn histogram_edges() {
        let bins = decade_histogram([1.0, 9.99, 10.0, 1000.0, 0.0]);
        let keys: Vec<Option<i32>> = bins.iter().map(|b| b.decade).collect();
        assert_eq!(keys, vec![None, Some(0), Some(1), Some(3)]);
        assert_eq!(bins[1].count, 2);
    }
}
