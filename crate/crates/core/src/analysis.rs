//! Order statistics over trial ensembles and the exponential fit of
//! coefficient errors against system size.

use serde::Serialize;
use thiserror::Error;

use crate::C64;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("need at least {need} points, got {got}")]
    TooFewPoints { need: usize, got: usize },
    #[error("exponential fit requires strictly positive error values")]
    NonPositiveValue,
    #[error("empty input")]
    Empty,
}

/// `ε_c = |c − c_est|`.
pub fn coefficient_error(exact: C64, estimate: C64) -> f64 {
    (exact - estimate).norm()
}

/// Least-squares fit of `ε̄(N) ≈ β·exp(−α·N)` on log-transformed points.
#[derive(Clone, Debug, Serialize)]
pub struct ExponentialFit {
    pub alpha: f64,
    pub beta: f64,
    pub r_squared: f64,
    pub points: Vec<(f64, f64)>,
}

/// Fit `(N, ε̄)` points, `ε̄ > 0`, by ordinary least squares on `(N, ln ε̄)`.
///
/// Callers normalize their medians (the `/ d^N` size normalization) before
/// fitting; this routine only sees the numbers it is given.
pub fn fit_exponential(points: &[(f64, f64)]) -> Result<ExponentialFit, AnalysisError> {
    if points.len() < 3 {
        return Err(AnalysisError::TooFewPoints { need: 3, got: points.len() });
    }
    if points.iter().any(|&(_, e)| !(e > 0.0)) {
        return Err(AnalysisError::NonPositiveValue);
    }
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mean_x = xs.iter().sum::<f64>() / n;
    let mean_y = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, y) in xs.iter().zip(&ys) {
        sxx += (x - mean_x) * (x - mean_x);
        sxy += (x - mean_x) * (y - mean_y);
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let mut ss_res = 0.0;
    let mut ss_tot = 0.0;
    for (x, y) in xs.iter().zip(&ys) {
        let fit = slope * x + intercept;
        ss_res += (y - fit) * (y - fit);
        ss_tot += (y - mean_y) * (y - mean_y);
    }
    // constant data is fit exactly by the zero-slope line
    let r_squared = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    Ok(ExponentialFit {
        alpha: -slope,
        beta: intercept.exp(),
        r_squared: r_squared.clamp(0.0, 1.0),
        points: points.to_vec(),
    })
}

/// Whisker-plot-ready five-number summary.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TrialAggregate {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    pub n: usize,
}

fn median_sorted(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

/// Order statistics of a trial ensemble. Quartiles are medians of the lower
/// and upper halves (median excluded for odd counts).
pub fn aggregate_trials(values: &[f64]) -> Result<TrialAggregate, AnalysisError> {
    if values.is_empty() {
        return Err(AnalysisError::Empty);
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("no NaNs in trial values"));
    let n = sorted.len();
    let median = median_sorted(&sorted);
    let (lower, upper) = if n == 1 {
        (&sorted[..], &sorted[..])
    } else {
        (&sorted[..n / 2], &sorted[(n + 1) / 2..])
    };
    Ok(TrialAggregate {
        min: sorted[0],
        q1: median_sorted(lower),
        median,
        q3: median_sorted(upper),
        max: sorted[n - 1],
        n,
    })
}

/// Median of a list of values (same averaging rule as [`aggregate_trials`]).
pub fn median(values: &[f64]) -> Result<f64, AnalysisError> {
    Ok(aggregate_trials(values)?.median)
}

/// Median of per-state medians, the robust two-level aggregation used for
/// coefficient-error ensembles.
pub fn median_of_medians(per_state_medians: &[f64]) -> Result<f64, AnalysisError> {
    median(per_state_medians)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coefficient_error_cases() {
        let c = C64::new(0.3, -0.4);
        assert_eq!(coefficient_error(c, c), 0.0);
        assert!((coefficient_error(C64::ONE, -C64::ONE) - 2.0).abs() < 1e-15);
        assert!((coefficient_error(C64::ONE, C64::I) - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn fit_recovers_synthetic_exponential() {
        let alpha = 0.7;
        let beta = 2.0;
        let pts: Vec<(f64, f64)> = (4..12).map(|n| (n as f64, beta * (-alpha * n as f64).exp())).collect();
        let fit = fit_exponential(&pts).unwrap();
        assert!((fit.alpha - alpha).abs() < 1e-10);
        assert!((fit.beta - beta).abs() < 1e-10);
        assert!(fit.r_squared > 1.0 - 1e-12);
    }

    #[test]
    fn fit_constant_points_gives_zero_alpha() {
        let pts = vec![(4.0, 0.25), (6.0, 0.25), (8.0, 0.25)];
        let fit = fit_exponential(&pts).unwrap();
        assert!(fit.alpha.abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fit_rejects_bad_input() {
        assert!(matches!(
            fit_exponential(&[(1.0, 0.5), (2.0, 0.4)]),
            Err(AnalysisError::TooFewPoints { .. })
        ));
        assert!(matches!(
            fit_exponential(&[(1.0, 0.5), (2.0, 0.0), (3.0, 0.4)]),
            Err(AnalysisError::NonPositiveValue)
        ));
    }

    #[test]
    fn fit_scale_and_shift_covariance() {
        let pts: Vec<(f64, f64)> = (3..9)
            .map(|n| (n as f64, 1.7 * (-0.31 * n as f64).exp() * (1.0 + 0.01 * (n as f64).sin())))
            .collect();
        let base = fit_exponential(&pts).unwrap();
        let scaled: Vec<(f64, f64)> = pts.iter().map(|&(x, y)| (x, 3.5 * y)).collect();
        let fs = fit_exponential(&scaled).unwrap();
        assert!((fs.alpha - base.alpha).abs() < 1e-12);
        assert!((fs.beta - 3.5 * base.beta).abs() < 1e-9);
        let shifted: Vec<(f64, f64)> = pts.iter().map(|&(x, y)| (x + 5.0, y)).collect();
        let fsh = fit_exponential(&shifted).unwrap();
        assert!((fsh.alpha - base.alpha).abs() < 1e-12);
    }

    #[test]
    fn aggregates_and_medians() {
        let agg = aggregate_trials(&[5.0]).unwrap();
        assert_eq!((agg.min, agg.q1, agg.median, agg.q3, agg.max), (5.0, 5.0, 5.0, 5.0, 5.0));

        let agg = aggregate_trials(&[4.0, 1.0, 3.0, 2.0]).unwrap();
        assert_eq!(agg.median, 2.5);
        assert_eq!(agg.q1, 1.5);
        assert_eq!(agg.q3, 3.5);
        assert!(agg.min <= agg.q1 && agg.q1 <= agg.median && agg.median <= agg.q3 && agg.q3 <= agg.max);

        // permutation invariance, bit-exact
        let a = aggregate_trials(&[0.1, 0.7, 0.3, 0.9, 0.5]).unwrap();
        let b = aggregate_trials(&[0.9, 0.1, 0.5, 0.3, 0.7]).unwrap();
        assert_eq!(a, b);

        assert_eq!(median_of_medians(&[3.0]).unwrap(), 3.0);
        assert_eq!(median_of_medians(&[1.0, 3.0, 100.0]).unwrap(), 3.0);
        assert!(matches!(aggregate_trials(&[]), Err(AnalysisError::Empty)));
    }
}
