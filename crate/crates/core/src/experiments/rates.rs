//! Log–log rate fits and convergence verdicts.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// Least-squares fit of log(value) against log(c).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RateFit {
    pub label: String,
    pub pairs: Vec<(f64, f64)>,
    pub slope: f64,
    pub intercept: f64,
    /// standard error of the slope
    pub stderr: f64,
    pub r2: f64,
}

pub fn fit_rate(label: impl Into<String>, pairs: &[(f64, f64)]) -> Result<RateFit> {
    let label = label.into();
    let kept: Vec<(f64, f64)> = pairs
        .iter()
        .copied()
        .filter(|&(c, v)| {
            let ok = c > 0.0 && v > 0.0 && v.is_finite();
            if !ok {
                log::warn!("{label}: dropping non-positive point (c = {c}, value = {v})");
            }
            ok
        })
        .collect();
    if kept.len() < 3 {
        return Err(Error::Fit(format!(
            "{label}: need at least 3 positive values, have {}",
            kept.len()
        )));
    }
    let n = kept.len() as f64;
    let xs: Vec<f64> = kept.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = kept.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::Fit(format!("{label}: all c values coincide")));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let r = y - (intercept + slope * x);
            r * r
        })
        .sum();
    let stderr = if kept.len() > 2 {
        (sse / (n - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    let r2 = if syy > 0.0 { 1.0 - sse / syy } else { 1.0 };
    Ok(RateFit {
        label,
        pairs: kept,
        slope,
        intercept,
        stderr,
        r2,
    })
}

/// Slopes within this distance of zero count as a plateau.
pub const VERDICT_THRESHOLD: f64 = 0.15;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Converge,
    Plateau,
    Diverge,
}

impl Verdict {
    pub fn from_slope(slope: f64) -> Self {
        if slope <= -VERDICT_THRESHOLD {
            Verdict::Converge
        } else if slope >= VERDICT_THRESHOLD {
            Verdict::Diverge
        } else {
            Verdict::Plateau
        }
    }

    /// Verdict implied by an exact exponent.
    pub fn from_exponent(q: f64) -> Self {
        if q.abs() < 1e-12 {
            Verdict::Plateau
        } else if q < 0.0 {
            Verdict::Converge
        } else {
            Verdict::Diverge
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Converge => "converge",
            Verdict::Plateau => "plateau",
            Verdict::Diverge => "diverge",
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law() {
        let pairs: Vec<(f64, f64)> = [4.0f64, 8.0, 16.0, 32.0].iter().map(|&c| (c, 3.0 * c.powf(-1.5))).collect();
        let f = fit_rate("p", &pairs).unwrap();
        assert!((f.slope + 1.5).abs() < 1e-12);
        assert!((f.intercept - 3f64.ln()).abs() < 1e-12);
        assert!((f.r2 - 1.0).abs() < 1e-12);
        assert!(f.stderr < 1e-12);
    }

    #[test]
    fn constant_values_have_zero_slope() {
        let pairs = [(2.0, 5.0), (4.0, 5.0), (8.0, 5.0)];
        assert!(fit_rate("c", &pairs).unwrap().slope.abs() < 1e-15);
    }

    #[test]
    fn too_few_positive_points() {
        let pairs = [(2.0, 1.0), (4.0, 0.0), (8.0, -1.0), (16.0, 2.0)];
        assert!(matches!(fit_rate("x", &pairs), Err(Error::Fit(_))));
    }

    #[test]
    fn verdict_bands() {
        assert_eq!(Verdict::from_slope(-0.15), Verdict::Converge);
        assert_eq!(Verdict::from_slope(-0.149), Verdict::Plateau);
        assert_eq!(Verdict::from_slope(0.2), Verdict::Diverge);
        assert_eq!(Verdict::from_exponent(0.0), Verdict::Plateau);
        assert_eq!(Verdict::from_exponent(-0.5), Verdict::Converge);
    }
}
