//! Rescaled-range (R/S) analysis and Hurst-exponent estimation.
//!
//! For a series F(1..N): take the mean, accumulate deviations from it,
//! measure the spread R = max - min of the accumulated series, and rescale
//! by the population standard deviation S. Self-similar series follow
//! R/S = (N/2)^H; H is recovered by least squares of log(R/S) against
//! log(N/2) over growing prefixes.
//!
//! All operations are pure functions, generic over the float type.

use num_traits::Float;

use crate::error::{Error, Result};

/// Minimum number of curve points for a Hurst regression.
pub const MIN_REGRESSION_POINTS: usize = 5;

/// One point of an R/S curve: prefix length and its rescaled range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RsPoint<F> {
    pub n: usize,
    pub rs: F,
}

/// R/S evaluated on logarithmically spaced prefixes of a series.
#[derive(Debug, Clone, PartialEq)]
pub struct RsCurve<F> {
    /// Prefix lengths strictly increasing, rs > 0 for every retained point.
    pub points: Vec<RsPoint<F>>,
    /// Prefixes dropped because their standard deviation was zero.
    pub skipped: usize,
}

/// Result of the log-log regression.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HurstEstimate<F> {
    /// Slope: the Hurst exponent.
    pub h: F,
    /// Free intercept in log space; a pure power law R/S = (N/2)^H gives 0.
    pub intercept: F,
    pub r_squared: F,
    pub n_points: usize,
}

fn require_nonempty<F>(values: &[F]) -> Result<()> {
    if values.is_empty() {
        Err(Error::InvalidParameter {
            name: "series",
            reason: "must be non-empty".into(),
        })
    } else {
        Ok(())
    }
}

fn cast<F: Float>(n: usize) -> F {
    F::from(n).expect("usize fits in float")
}

/// Arithmetic mean of the series.
pub fn series_mean<F: Float>(values: &[F]) -> Result<F> {
    require_nonempty(values)?;
    let sum = values.iter().fold(F::zero(), |acc, &v| acc + v);
    Ok(sum / cast(values.len()))
}

/// Running sum of deviations from the full-series mean. The last element is
/// zero up to floating-point error.
pub fn cumulative_deviation<F: Float>(values: &[F]) -> Result<Vec<F>> {
    let mean = series_mean(values)?;
    let mut acc = F::zero();
    Ok(values
        .iter()
        .map(|&v| {
            acc = acc + (v - mean);
            acc
        })
        .collect())
}

/// Spread of the accumulated-deviation series: max minus min.
pub fn spread<F: Float>(values: &[F]) -> Result<F> {
    let cumulative = cumulative_deviation(values)?;
    let mut lo = cumulative[0];
    let mut hi = cumulative[0];
    for &x in &cumulative[1..] {
        lo = lo.min(x);
        hi = hi.max(x);
    }
    Ok(hi - lo)
}

fn population_std<F: Float>(values: &[F], mean: F) -> F {
    let ss = values
        .iter()
        .fold(F::zero(), |acc, &v| acc + (v - mean) * (v - mean));
    (ss / cast(values.len())).sqrt()
}

/// R/S of the series: spread divided by the population standard deviation.
///
/// A constant series has S = 0 and returns [`Error::DegenerateSeries`].
pub fn rescaled_range<F: Float>(values: &[F]) -> Result<F> {
    if values.len() < 2 {
        return Err(Error::InvalidParameter {
            name: "series",
            reason: format!("need at least 2 values, got {}", values.len()),
        });
    }
    let mean = series_mean(values)?;
    let s = population_std(values, mean);
    if s == F::zero() {
        return Err(Error::DegenerateSeries);
    }
    Ok(spread(values)? / s)
}

/// Prefix lengths logarithmically spaced between `min_n` and `len`,
/// `points_per_decade` per decade, rounded to distinct integers. The full
/// length is always included.
fn prefix_lengths(len: usize, min_n: usize, points_per_decade: usize) -> Vec<usize> {
    let mut lengths = Vec::new();
    let mut k = 0usize;
    loop {
        let n = ((min_n as f64) * 10f64.powf(k as f64 / points_per_decade as f64)).round() as usize;
        if n >= len {
            break;
        }
        if lengths.last() != Some(&n) {
            lengths.push(n);
        }
        k += 1;
    }
    if lengths.last() != Some(&len) {
        lengths.push(len);
    }
    lengths
}

/// Evaluates R/S on growing prefixes of the series.
///
/// Degenerate prefixes (zero standard deviation) are skipped and counted;
/// fewer than [`MIN_REGRESSION_POINTS`] surviving points is an error.
pub fn rs_curve<F: Float>(
    values: &[F],
    min_n: usize,
    points_per_decade: usize,
) -> Result<RsCurve<F>> {
    if min_n < 8 {
        return Err(Error::InvalidParameter {
            name: "min_n",
            reason: format!("must be >= 8, got {min_n}"),
        });
    }
    if points_per_decade == 0 {
        return Err(Error::InvalidParameter {
            name: "points_per_decade",
            reason: "must be >= 1".into(),
        });
    }
    if values.len() < min_n {
        return Err(Error::InsufficientData {
            got: values.len(),
            need: min_n,
        });
    }

    let mut points = Vec::new();
    let mut skipped = 0usize;
    for n in prefix_lengths(values.len(), min_n, points_per_decade) {
        match rescaled_range(&values[..n]) {
            Ok(rs) => points.push(RsPoint { n, rs }),
            Err(Error::DegenerateSeries) => skipped += 1,
            Err(e) => return Err(e),
        }
    }
    if points.len() < MIN_REGRESSION_POINTS {
        return Err(Error::InsufficientData {
            got: points.len(),
            need: MIN_REGRESSION_POINTS,
        });
    }
    Ok(RsCurve { points, skipped })
}

/// Ordinary least squares of log(R/S) against log(N/2). The slope is the
/// Hurst exponent; the intercept is kept as a power-law diagnostic.
pub fn estimate_hurst<F: Float>(curve: &RsCurve<F>) -> Result<HurstEstimate<F>> {
    let n_points = curve.points.len();
    if n_points < MIN_REGRESSION_POINTS {
        return Err(Error::InsufficientData {
            got: n_points,
            need: MIN_REGRESSION_POINTS,
        });
    }

    let two = cast::<F>(2);
    let xs: Vec<F> = curve
        .points
        .iter()
        .map(|p| (cast::<F>(p.n) / two).ln())
        .collect();
    let ys: Vec<F> = curve.points.iter().map(|p| p.rs.ln()).collect();
    let count = cast::<F>(n_points);
    let x_mean = xs.iter().fold(F::zero(), |a, &x| a + x) / count;
    let y_mean = ys.iter().fold(F::zero(), |a, &y| a + y) / count;

    let mut sxx = F::zero();
    let mut sxy = F::zero();
    let mut syy = F::zero();
    for (&x, &y) in xs.iter().zip(&ys) {
        let dx = x - x_mean;
        let dy = y - y_mean;
        sxx = sxx + dx * dx;
        sxy = sxy + dx * dy;
        syy = syy + dy * dy;
    }
    if sxx == F::zero() {
        return Err(Error::InvalidParameter {
            name: "curve",
            reason: "all prefix lengths identical".into(),
        });
    }

    let h = sxy / sxx;
    let intercept = y_mean - h * x_mean;
    let r_squared = if syy == F::zero() {
        F::one()
    } else {
        let ss_res = syy - sxy * sxy / sxx;
        F::one() - ss_res / syy
    };
    Ok(HurstEstimate {
        h,
        intercept,
        r_squared,
        n_points,
    })
}
