use std::io::Write;

use serde::{Deserialize, Serialize};

use super::BoundsError;
use crate::walk::WalkSeries;

/// Ordinary least squares `y ≈ slope · x + intercept`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root mean square of the residuals.
    pub residual: f64,
}

pub fn linear_fit(x: &[f64], y: &[f64]) -> Option<LineFit> {
    assert_eq!(x.len(), y.len());
    let n = x.len() as f64;
    if x.len() < 2 {
        return None;
    }
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sq: f64 = x.iter().zip(y).map(|(a, b)| (b - slope * a - intercept).powi(2)).sum();
    Some(LineFit { slope, intercept, residual: (sq / n).sqrt() })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    pub slope: f64,
    pub intercept: f64,
    pub residual: f64,
    pub points_used: usize,
}

/// Fits `log(-log v_n) = slope · log n + intercept` on the points with
/// `0 < v < 1` and `v > 10 · stderr`.
pub fn fit_values(points: &[(usize, f64, f64)]) -> Result<ExponentFit, BoundsError> {
    let usable: Vec<(f64, f64)> = points
        .iter()
        .filter(|&&(n, v, se)| n > 0 && v > 0.0 && v < 1.0 && v > 10.0 * se)
        .map(|&(n, v, _)| ((n as f64).ln(), (-v.ln()).ln()))
        .collect();
    if usable.len() < 3 {
        return Err(BoundsError::InsufficientPoints { usable: usable.len(), needed: 3 });
    }
    let (x, y): (Vec<f64>, Vec<f64>) = usable.into_iter().unzip();
    let line = linear_fit(&x, &y).ok_or(BoundsError::InsufficientPoints { usable: 1, needed: 3 })?;
    Ok(ExponentFit { slope: line.slope, intercept: line.intercept, residual: line.residual, points_used: x.len() })
}

pub fn fit_exponent(series: &WalkSeries) -> Result<ExponentFit, BoundsError> {
    let points: Vec<_> = series.entries.iter().map(|e| (e.n, e.value, e.stderr)).collect();
    fit_values(&points)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundSide {
    Upper,
    Lower,
}

/// `exp(-constant · n^exponent)` with `exponent = d/(d+2)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundCurve {
    pub side: BoundSide,
    pub exponent: f64,
    pub constant: f64,
    pub points: Vec<(usize, f64)>,
}

impl BoundCurve {
    pub fn new(side: BoundSide, d: usize, constant: f64, ns: &[usize]) -> Self {
        let exponent = d as f64 / (d as f64 + 2.0);
        let points = ns.iter().map(|&n| (n, (-constant * (n as f64).powf(exponent)).exp())).collect();
        Self { side, exponent, constant, points }
    }

    /// The tightest constant for which the curve stays on `side` of every
    /// usable entry of `series`.
    pub fn envelope(series: &WalkSeries, side: BoundSide) -> Result<Self, BoundsError> {
        let exponent = series.d as f64 / (series.d as f64 + 2.0);
        let rates: Vec<f64> = series
            .entries
            .iter()
            .filter(|e| e.n > 0 && e.value > 0.0 && e.value < 1.0)
            .map(|e| -e.value.ln() / (e.n as f64).powf(exponent))
            .collect();
        if rates.is_empty() {
            return Err(BoundsError::InsufficientPoints { usable: 0, needed: 1 });
        }
        let constant = match side {
            BoundSide::Upper => rates.iter().copied().fold(f64::INFINITY, f64::min),
            BoundSide::Lower => rates.iter().copied().fold(0.0, f64::max),
        };
        let ns: Vec<usize> = series.entries.iter().map(|e| e.n).collect();
        Ok(Self::new(side, series.d, constant, &ns))
    }
}

pub fn write_curve_csv<W: Write>(curves: &[BoundCurve], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["n", "bound", "side", "constant", "exponent"])?;
    for c in curves {
        let side = match c.side {
            BoundSide::Upper => "upper",
            BoundSide::Lower => "lower",
        };
        for &(n, v) in &c.points {
            w.write_record([n.to_string(), v.to_string(), side.to_string(), c.constant.to_string(), c.exponent.to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::walk::{Method, WalkEntry};

    fn series(f: impl Fn(f64) -> f64) -> WalkSeries {
        WalkSeries {
            entries: (1..=8)
                .map(|i| {
                    let n = 10 * i;
                    WalkEntry { n, value: f(n as f64), stderr: 0.0, method: Method::Exact }
                })
                .collect(),
            alpha: 0.9,
            p: None,
            d: 2,
            seed: None,
        }
    }

    #[test]
    fn exact_on_power_laws() {
        let fit = fit_exponent(&series(|n| (-n.sqrt()).exp())).unwrap();
        assert!((fit.slope - 0.5).abs() < 1e-12);
        assert!(fit.intercept.abs() < 1e-12);
        assert!(fit.residual < 1e-12);
        assert_eq!(fit.points_used, 8);
        let fit = fit_exponent(&series(|n| (-2.0 * n.powf(0.6)).exp())).unwrap();
        assert!((fit.slope - 0.6).abs() < 1e-12);
        assert!((fit.intercept - 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn noise_floor_filters() {
        let pts = [(10, 0.5, 0.01), (20, 0.3, 0.05), (30, 0.1, 0.02), (40, 1.0, 0.0)];
        assert_eq!(fit_values(&pts), Err(BoundsError::InsufficientPoints { usable: 1, needed: 3 }));
    }

    #[test]
    fn envelopes_sandwich_the_series() {
        let s = series(|n| (-(0.3 + 0.1 * (n / 10.0).sin()) * n.sqrt()).exp());
        let up = BoundCurve::envelope(&s, BoundSide::Upper).unwrap();
        let lo = BoundCurve::envelope(&s, BoundSide::Lower).unwrap();
        for ((e, u), l) in s.entries.iter().zip(&up.points).zip(&lo.points) {
            assert!(u.1 >= e.value * (1.0 - 1e-12) && l.1 <= e.value * (1.0 + 1e-12));
        }
        let mut buf = Vec::new();
        write_curve_csv(&[up], &mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("n,bound,side,constant,exponent\n10,"));
    }
}
