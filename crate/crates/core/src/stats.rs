//! Stylized-fact statistics of price series: log-returns, daily sampling,
//! autocorrelation, power-law decay fits, histograms with excess kurtosis and
//! semivariograms.
//!
//! Every function is pure over its input slice.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Log-returns at a fixed lag; `resolution` is the number of decision
/// rounds per sample (1 for raw rounds, 6 for simulated days).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReturnSeries {
    pub values: Vec<f64>,
    pub resolution: usize,
}

impl ReturnSeries {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn absolute(&self) -> Vec<f64> {
        self.values.iter().map(|r| r.abs()).collect()
    }
}

/// `values[i] = ln(prices[i + lag] / prices[i])`.
pub fn log_returns(prices: &[f64], lag: usize) -> Result<ReturnSeries> {
    if lag == 0 {
        return Err(Error::Data("return lag must be positive".into()));
    }
    if let Some(idx) = prices.iter().position(|p| !(*p > 0.0 && p.is_finite())) {
        return Err(Error::Data(format!(
            "price at index {idx} is not a positive number: {}",
            prices[idx]
        )));
    }
    if prices.len() <= lag {
        return Err(Error::Data(format!(
            "need more than {lag} prices for lag-{lag} returns, got {}",
            prices.len()
        )));
    }
    let values = prices
        .iter()
        .zip(&prices[lag..])
        .map(|(a, b)| (b / a).ln())
        .collect();
    Ok(ReturnSeries {
        values,
        resolution: 1,
    })
}

/// Keeps the last price of every complete block of `rounds_per_day` rounds.
pub fn aggregate_daily(round_prices: &[f64], rounds_per_day: usize) -> Result<Vec<f64>> {
    if round_prices.is_empty() {
        return Err(Error::Data("empty price series".into()));
    }
    if rounds_per_day == 0 {
        return Err(Error::Data("rounds_per_day must be positive".into()));
    }
    Ok(round_prices
        .chunks_exact(rounds_per_day)
        .map(|day| day[rounds_per_day - 1])
        .collect())
}

/// Least-squares power law `value = prefactor * lag^(-gamma)` in log-log space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub gamma: f64,
    pub prefactor: f64,
    /// Lag range actually fitted (inclusive).
    pub fit_min: usize,
    pub fit_max: usize,
    /// Lag range asked for.
    pub requested_min: usize,
    pub requested_max: usize,
    /// The range was cut at the first nonpositive autocorrelation.
    pub truncated: bool,
    /// Root-mean-square log-space residual.
    pub residual: f64,
    pub r_squared: f64,
}

impl PowerLawFit {
    pub const HEADER: &'static str =
        "gamma,prefactor,fit_min,fit_max,requested_min,requested_max,truncated,residual,r_squared";

    pub fn csv_row(&self) -> String {
        format!(
            "{:?},{:?},{},{},{},{},{},{:?},{:?}",
            self.gamma,
            self.prefactor,
            self.fit_min,
            self.fit_max,
            self.requested_min,
            self.requested_max,
            self.truncated,
            self.residual,
            self.r_squared
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcfReport {
    /// 0, 1, ..., max_lag.
    pub lags: Vec<usize>,
    pub values: Vec<f64>,
    pub mean: f64,
    pub variance: f64,
    pub fit: Option<PowerLawFit>,
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Normalized autocorrelation for lags `0..=max_lag`.
///
/// `C(lag)` is the average of `(r(t) - m)(r(t + lag) - m)` over the
/// `N - lag` available pairs divided by the variance, with the mean `m` and
/// the variance taken over the full sample. `C(0) = 1` exactly.
pub fn acf(values: &[f64], max_lag: usize) -> Result<AcfReport> {
    let n = values.len();
    if n < max_lag + 2 {
        return Err(Error::Stats(format!(
            "series of length {n} is too short for lag {max_lag}"
        )));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Stats("series contains non-finite values".into()));
    }
    let m = mean(values);
    let centred: Vec<f64> = values.iter().map(|v| v - m).collect();
    let covariance = |lag: usize| {
        let pairs = n - lag;
        centred
            .iter()
            .zip(&centred[lag..])
            .map(|(a, b)| a * b)
            .sum::<f64>()
            / pairs as f64
    };
    let variance = covariance(0);
    if variance <= 0.0 {
        return Err(Error::Stats("degenerate series: zero variance".into()));
    }
    let lags: Vec<usize> = (0..=max_lag).collect();
    let values = lags.iter().map(|&lag| covariance(lag) / variance).collect();
    Ok(AcfReport {
        lags,
        values,
        mean: m,
        variance,
        fit: None,
    })
}

/// Fits `value ~ lag^(-gamma)` over all given points; every value must be positive.
pub fn fit_power_law(lags: &[usize], values: &[f64]) -> Result<PowerLawFit> {
    if lags.len() != values.len() {
        return Err(Error::Stats("lags and values differ in length".into()));
    }
    if lags.len() < 2 {
        return Err(Error::Stats(
            "power-law fit needs at least two points".into(),
        ));
    }
    if lags.contains(&0) || values.iter().any(|&v| !(v > 0.0)) {
        return Err(Error::Stats(
            "power-law fit needs positive lags and values".into(),
        ));
    }
    let xs: Vec<f64> = lags.iter().map(|&l| (l as f64).ln()).collect();
    let ys: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let (mx, my) = (mean(&xs), mean(&ys));
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let r_squared = if syy > 0.0 { 1.0 - sse / syy } else { 1.0 };
    let (lo, hi) = (lags[0], lags[lags.len() - 1]);
    Ok(PowerLawFit {
        gamma: -slope,
        prefactor: intercept.exp(),
        fit_min: lo,
        fit_max: hi,
        requested_min: lo,
        requested_max: hi,
        truncated: false,
        residual: (sse / xs.len() as f64).sqrt(),
        r_squared,
    })
}

/// Autocorrelation of `|r|` with a power-law fit over `fit_min..=fit_max`.
///
/// When a nonpositive value occurs inside the range, the fit uses the
/// longest positive prefix of the range and flags the truncation.
pub fn abs_acf_power_fit(
    returns: &ReturnSeries,
    fit_min: usize,
    fit_max: usize,
) -> Result<AcfReport> {
    if fit_min == 0 || fit_max <= fit_min {
        return Err(Error::Stats(format!(
            "invalid fit range {fit_min}..={fit_max}"
        )));
    }
    let mut report = acf(&returns.absolute(), fit_max)?;
    let in_range = &report.values[fit_min..=fit_max];
    let positive = in_range.iter().take_while(|v| **v > 0.0).count();
    if positive < 2 {
        return Err(Error::Stats(format!(
            "absolute-return autocorrelation is not positive at lags {fit_min} and {}",
            fit_min + 1
        )));
    }
    let end = fit_min + positive;
    let mut fit = fit_power_law(&report.lags[fit_min..end], &report.values[fit_min..end])?;
    fit.requested_min = fit_min;
    fit.requested_max = fit_max;
    fit.truncated = end <= fit_max;
    report.fit = Some(fit);
    Ok(report)
}

/// Fourth standardized moment minus 3 (population moments).
pub fn excess_kurtosis(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::Stats("empty sample".into()));
    }
    let m = mean(values);
    let (mut m2, mut m4) = (0.0, 0.0);
    for v in values {
        let d2 = (v - m) * (v - m);
        m2 += d2;
        m4 += d2 * d2;
    }
    let n = values.len() as f64;
    let (m2, m4) = (m2 / n, m4 / n);
    if m2 <= 0.0 {
        return Err(Error::Stats("degenerate series: zero variance".into()));
    }
    Ok(m4 / (m2 * m2) - 3.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramReport {
    /// `counts.len() + 1` increasing edges.
    pub bin_edges: Vec<f64>,
    pub counts: Vec<u64>,
    /// Excess kurtosis of the sample; `None` for a constant sample.
    pub excess_kurtosis: Option<f64>,
    /// All values were equal and went into one zero-width bin.
    pub degenerate: bool,
}

impl HistogramReport {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Counts divided by sample size and bin width.
    pub fn density(&self) -> Vec<f64> {
        let total = self.total() as f64;
        self.counts
            .iter()
            .zip(self.bin_edges.windows(2))
            .map(|(c, e)| {
                let width = e[1] - e[0];
                if width > 0.0 {
                    *c as f64 / (total * width)
                } else {
                    0.0
                }
            })
            .collect()
    }
}

/// Equal-width histogram spanning `[min, max]`; the last bin is closed.
pub fn histogram(values: &[f64], bins: usize) -> Result<HistogramReport> {
    if bins < 2 {
        return Err(Error::Stats("histogram needs at least two bins".into()));
    }
    if values.is_empty() {
        return Err(Error::Stats("empty sample".into()));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Stats("sample contains non-finite values".into()));
    }
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if lo == hi {
        return Ok(HistogramReport {
            bin_edges: vec![lo, hi],
            counts: vec![values.len() as u64],
            excess_kurtosis: None,
            degenerate: true,
        });
    }
    let width = (hi - lo) / bins as f64;
    let mut bin_edges: Vec<f64> = (0..bins).map(|k| lo + k as f64 * width).collect();
    bin_edges.push(hi);
    let mut counts = vec![0u64; bins];
    for v in values {
        let idx = (((v - lo) / width) as usize).min(bins - 1);
        counts[idx] += 1;
    }
    Ok(HistogramReport {
        bin_edges,
        counts,
        excess_kurtosis: Some(excess_kurtosis(values)?),
        degenerate: false,
    })
}

/// `0.5 * mean((r(t + lag) - r(t))^2)` for lags `1..=max_lag`.
pub fn semivariogram(values: &[f64], max_lag: usize) -> Result<Vec<f64>> {
    if values.is_empty() {
        return Err(Error::Stats("empty series".into()));
    }
    let max_lag = max_lag.min(values.len() - 1);
    Ok((1..=max_lag)
        .map(|lag| {
            let pairs = values.len() - lag;
            0.5 * values
                .iter()
                .zip(&values[lag..])
                .map(|(a, b)| (b - a).powi(2))
                .sum::<f64>()
                / pairs as f64
        })
        .collect())
}

/// Return time course (the clustering plot) and its semivariogram.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariogramReport {
    pub time_course: Vec<f64>,
    /// Index `k` holds lag `k + 1`.
    pub semivariogram: Vec<f64>,
}

pub fn variogram(returns: &ReturnSeries, max_lag: usize) -> Result<VariogramReport> {
    Ok(VariogramReport {
        time_course: returns.values.clone(),
        semivariogram: semivariogram(&returns.values, max_lag)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn normals(seed: u64, n: usize) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
    }

    #[test]
    fn returns_of_simple_paths() {
        assert!(log_returns(&[2.0; 5], 1)
            .unwrap()
            .values
            .iter()
            .all(|r| *r == 0.0));
        let doubling: Vec<f64> = (0..6).map(|k| 2f64.powi(k)).collect();
        for r in log_returns(&doubling, 1).unwrap().values {
            assert_abs_diff_eq!(r, std::f64::consts::LN_2, epsilon = 1e-15);
        }
        let r = log_returns(&[1.0, 1.1, 0.99], 1).unwrap().values;
        // mpmath at 40 digits
        assert_abs_diff_eq!(r[0], 0.095_310_179_804_324_86, epsilon = 1e-15);
        assert_abs_diff_eq!(r[1], -0.105_360_515_657_826_3, epsilon = 1e-15);
    }

    #[test]
    fn returns_reject_bad_prices() {
        match log_returns(&[1.0, 0.0, 2.0], 1) {
            Err(Error::Data(msg)) => assert!(msg.contains("index 1")),
            other => panic!("{other:?}"),
        }
        assert!(log_returns(&[1.0], 1).is_err());
        assert!(log_returns(&[1.0, 2.0], 0).is_err());
    }

    #[test]
    fn daily_aggregation_lengths() {
        let prices: Vec<f64> = (1..=12).map(f64::from).collect();
        assert_eq!(aggregate_daily(&prices, 6).unwrap(), vec![6.0, 12.0]);
        assert_eq!(aggregate_daily(&prices, 1).unwrap(), prices);
        assert_eq!(
            aggregate_daily(&vec![1.0; 80_000], 6).unwrap().len(),
            13_333
        );
        assert!(aggregate_daily(&[], 6).is_err());
    }

    #[test]
    fn acf_lag_zero_and_alternating() {
        let r = acf(&normals(1, 500), 10).unwrap();
        assert_eq!(r.values[0], 1.0);
        let alternating: Vec<f64> = (0..1000)
            .map(|k| if k % 2 == 0 { 1.0 } else { -1.0 })
            .collect();
        let r = acf(&alternating, 3).unwrap();
        assert_eq!(r.values[1], -1.0);
        assert_eq!(r.values[2], 1.0);
    }

    #[test]
    fn acf_rejects_constant_and_short() {
        assert!(matches!(acf(&[3.0; 50], 5), Err(Error::Stats(_))));
        assert!(acf(&[1.0, 2.0, 3.0], 2).is_err());
    }

    #[test]
    fn acf_white_noise_band() {
        let n = 10_000;
        let band = 3.0 / (n as f64).sqrt();
        for seed in 1..=5 {
            let r = acf(&normals(seed, n), 20).unwrap();
            for lag in 1..=20 {
                assert!(
                    r.values[lag].abs() < band,
                    "seed {seed} lag {lag}: {}",
                    r.values[lag]
                );
            }
        }
    }

    #[test]
    fn exact_power_laws() {
        let lags: Vec<usize> = (1..=100).collect();
        for (c, gamma) in [(1.0, 0.5), (2.0, 0.546), (0.3, 0.503), (7.0, 0.576)] {
            let values: Vec<f64> = lags.iter().map(|&l| c * (l as f64).powf(-gamma)).collect();
            let fit = fit_power_law(&lags, &values).unwrap();
            assert_abs_diff_eq!(fit.gamma, gamma, epsilon = 1e-9);
            assert_abs_diff_eq!(fit.prefactor, c, epsilon = 1e-9);
            assert!(fit.r_squared > 1.0 - 1e-12);
        }
    }

    #[test]
    fn power_fit_rejects_bad_input() {
        assert!(fit_power_law(&[1], &[1.0]).is_err());
        assert!(fit_power_law(&[1, 2], &[1.0, 0.0]).is_err());
        assert!(fit_power_law(&[0, 2], &[1.0, 0.5]).is_err());
    }

    #[test]
    fn abs_fit_truncates_at_first_nonpositive_lag() {
        // i.i.d. |r| has no memory: its autocorrelation turns negative quickly
        let returns = ReturnSeries {
            values: normals(3, 2000),
            resolution: 1,
        };
        match abs_acf_power_fit(&returns, 1, 100) {
            Ok(report) => {
                let fit = report.fit.unwrap();
                assert!(fit.truncated);
                assert!(report.values[fit.fit_max + 1] <= 0.0);
                assert!(report.values[1..=fit.fit_max].iter().all(|v| *v > 0.0));
            }
            Err(Error::Stats(_)) => {}
            Err(e) => panic!("{e}"),
        }
    }

    #[test]
    fn kurtosis_closed_forms() {
        let two_point: Vec<f64> = (0..1000)
            .map(|k| if k % 2 == 0 { -1.0 } else { 1.0 })
            .collect();
        assert_abs_diff_eq!(excess_kurtosis(&two_point).unwrap(), -2.0, epsilon = 1e-12);
        let k = excess_kurtosis(&normals(11, 100_000)).unwrap();
        assert!(k.abs() < 0.1, "{k}");
        assert!(excess_kurtosis(&[1.0; 4]).is_err());
    }

    #[test]
    fn histogram_partition() {
        let sample = normals(2, 10_000);
        let h = histogram(&sample, 40).unwrap();
        assert_eq!(h.total(), 10_000);
        assert_eq!(h.bin_edges.len(), 41);
        assert!(h.bin_edges.windows(2).all(|w| w[0] < w[1]));
        let mass: f64 = h
            .density()
            .iter()
            .zip(h.bin_edges.windows(2))
            .map(|(d, e)| d * (e[1] - e[0]))
            .sum();
        assert_abs_diff_eq!(mass, 1.0, epsilon = 1e-9);

        let flat = histogram(&[0.5; 7], 10).unwrap();
        assert!(flat.degenerate);
        assert_eq!(flat.counts, vec![7]);
        assert!(histogram(&[], 10).is_err());
        assert!(histogram(&[1.0, 2.0], 1).is_err());
    }

    #[test]
    fn semivariogram_examples() {
        assert!(semivariogram(&[0.7; 30], 10)
            .unwrap()
            .iter()
            .all(|v| *v == 0.0));
        let sigma = 1.5;
        let sample: Vec<f64> = normals(4, 50_000).iter().map(|z| sigma * z).collect();
        for v in semivariogram(&sample, 10).unwrap() {
            assert!((v - sigma * sigma).abs() < 0.05 * sigma * sigma, "{v}");
        }
        let series = ReturnSeries {
            values: vec![0.1, -0.2, 0.3],
            resolution: 6,
        };
        assert_eq!(variogram(&series, 5).unwrap().time_course, series.values);
    }

    proptest! {
        #[test]
        fn returns_telescope(prices in proptest::collection::vec(0.01f64..100.0, 3..40), split in 1usize..100) {
            let n = prices.len();
            let cut = 1 + split % (n - 2);
            let whole = log_returns(&[prices[0], prices[n - 1]], 1).unwrap().values[0];
            let first = log_returns(&[prices[0], prices[cut]], 1).unwrap().values[0];
            let second = log_returns(&[prices[cut], prices[n - 1]], 1).unwrap().values[0];
            let steps: f64 = log_returns(&prices, 1).unwrap().values.iter().sum();
            prop_assert!((whole - first - second).abs() < 1e-12);
            prop_assert!((whole - steps).abs() < 1e-10);
        }

        #[test]
        fn acf_affine_invariant(seed in 0u64..1000, a in prop_oneof![-5.0f64..-0.1, 0.1f64..5.0], b in -10.0f64..10.0) {
            let x = normals(seed, 300);
            let y: Vec<f64> = x.iter().map(|v| a * v + b).collect();
            let cx = acf(&x, 10).unwrap();
            let cy = acf(&y, 10).unwrap();
            for (u, v) in cx.values.iter().zip(&cy.values) {
                prop_assert!((u - v).abs() < 1e-9);
            }
        }

        #[test]
        fn power_fit_scale_invariant(gamma in 0.05f64..2.0, c in 1e-3f64..1e3, noise_seed in 0u64..100) {
            let lags: Vec<usize> = (1..=50).collect();
            let jitter = normals(noise_seed, 50);
            let base: Vec<f64> = lags.iter().zip(&jitter).map(|(&l, z)| (l as f64).powf(-gamma) * (0.05 * z).exp()).collect();
            let scaled: Vec<f64> = base.iter().map(|v| c * v).collect();
            let g1 = fit_power_law(&lags, &base).unwrap().gamma;
            let g2 = fit_power_law(&lags, &scaled).unwrap().gamma;
            prop_assert!((g1 - g2).abs() < 1e-9);
        }

        #[test]
        fn histogram_permutation_invariant(mut sample in proptest::collection::vec(-1e3f64..1e3, 2..200), bins in 2usize..30) {
            let h1 = histogram(&sample, bins).unwrap();
            sample.reverse();
            let h2 = histogram(&sample, bins).unwrap();
            prop_assert_eq!(&h1.counts, &h2.counts);
            prop_assert_eq!(h1.total(), sample.len() as u64);
        }

        #[test]
        fn semivariogram_nonnegative(sample in proptest::collection::vec(-1e3f64..1e3, 1..100)) {
            prop_assert!(semivariogram(&sample, 20).unwrap().iter().all(|v| *v >= 0.0));
        }
    }
}
