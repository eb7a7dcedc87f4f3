//! Localization error statistics, CDF export and k-sweeps.

use rayon::prelude::*;
use serde::Serialize;

use crate::dataset::{FingerprintDataset, PowedConfig};
use crate::error::{Error, Result};
use crate::geo::haversine_distance;
use crate::positioning::{fit, PositioningModel};

/// Per-query errors in meters with summary statistics.
///
/// Quantiles interpolate linearly between closest ranks (type 7).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorReport {
    pub mean: f64,
    pub median: f64,
    pub p75: f64,
    pub errors: Vec<f64>,
}

impl ErrorReport {
    pub fn from_errors(errors: Vec<f64>) -> Result<Self> {
        if errors.is_empty() {
            return Err(Error::EmptyDataset);
        }
        if let Some(bad) = errors.iter().find(|e| !(**e >= 0.0 && e.is_finite())) {
            return Err(Error::InvalidParameter(format!(
                "invalid error value {bad}"
            )));
        }
        let mut sorted = errors.clone();
        sorted.sort_by(f64::total_cmp);
        Ok(ErrorReport {
            mean: errors.iter().sum::<f64>() / errors.len() as f64,
            median: quantile(&sorted, 0.5),
            p75: quantile(&sorted, 0.75),
            errors,
        })
    }

    pub fn len(&self) -> usize {
        self.errors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.errors.is_empty()
    }
}

/// Linear-interpolation quantile of an ascending, nonempty slice.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Errors between each query's prediction and its ground truth.
pub fn evaluate(model: &PositioningModel, queries: &FingerprintDataset) -> Result<ErrorReport> {
    let predictions = model.predict_batch(queries)?;
    let errors = predictions
        .iter()
        .zip(queries.iter())
        .map(|(p, q)| haversine_distance(*p, q.location))
        .collect();
    ErrorReport::from_errors(errors)
}

/// Empirical CDF: the i-th smallest error with probability `(i + 1) / n`.
pub fn cdf_points(report: &ErrorReport) -> Vec<(f64, f64)> {
    let mut sorted = report.errors.clone();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    sorted
        .into_iter()
        .enumerate()
        .map(|(i, e)| (e, (i + 1) as f64 / n))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KSweepRow {
    pub k: usize,
    pub mean: f64,
    pub median: f64,
}

/// Validation error summary for each `k`, from a single neighbor search per
/// query at the largest requested `k`.
pub fn k_sweep(
    train: &FingerprintDataset,
    validation: &FingerprintDataset,
    ks: &[usize],
    powed: PowedConfig,
) -> Result<Vec<KSweepRow>> {
    if ks.is_empty() {
        return Err(Error::InvalidParameter("no k values to sweep".into()));
    }
    if let Some(bad) = ks.iter().find(|&&k| k == 0 || k > train.len()) {
        return Err(Error::InvalidParameter(format!(
            "k = {bad} is outside 1..={}",
            train.len()
        )));
    }
    if validation.is_empty() {
        return Err(Error::EmptyDataset);
    }
    train.check_compatible(validation)?;
    let k_max = *ks.iter().max().expect("nonempty");
    let model = fit(train, k_max, powed)?;

    // errors[q][i] is the error of query q at ks[i]
    let per_query: Vec<Vec<f64>> = validation
        .fingerprints()
        .par_iter()
        .enumerate()
        .map(|(index, q)| {
            let neighbors = model.neighbors(q, k_max).map_err(|e| Error::Query {
                index,
                source: Box::new(e),
            })?;
            Ok(ks
                .iter()
                .map(|&k| {
                    let est = model.estimate(&neighbors[..k]).expect("k >= 1");
                    haversine_distance(est, q.location)
                })
                .collect())
        })
        .collect::<Result<_>>()?;

    ks.iter()
        .enumerate()
        .map(|(i, &k)| {
            let report = ErrorReport::from_errors(per_query.iter().map(|e| e[i]).collect())?;
            Ok(KSweepRow {
                k,
                mean: report.mean,
                median: report.median,
            })
        })
        .collect()
}

/// Relative improvement `(original - augmented) / original` in whole
/// percent; `None` where the original statistic is zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Improvement {
    pub mean: Option<i64>,
    pub median: Option<i64>,
    pub p75: Option<i64>,
}

pub fn compare(original: &ErrorReport, augmented: &ErrorReport) -> Improvement {
    let pct = |o: f64, a: f64| (o != 0.0).then(|| ((o - a) / o * 100.0).round() as i64);
    Improvement {
        mean: pct(original.mean, augmented.mean),
        median: pct(original.median, augmented.median),
        p75: pct(original.p75, augmented.p75),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::Fingerprint;
    use crate::geo::GeoPoint;
    use proptest::prelude::*;

    fn report(e: &[f64]) -> ErrorReport {
        ErrorReport::from_errors(e.to_vec()).unwrap()
    }

    fn summary(mean: f64, median: f64, p75: f64) -> ErrorReport {
        ErrorReport {
            mean,
            median,
            p75,
            errors: vec![],
        }
    }

    #[test]
    fn hand_statistics() {
        let r = report(&[4.0, 1.0, 3.0, 2.0]);
        assert_eq!((r.mean, r.median, r.p75), (2.5, 2.5, 3.25));
        assert_eq!(r.errors, vec![4.0, 1.0, 3.0, 2.0]);
        assert!(ErrorReport::from_errors(vec![]).is_err());
        assert!(ErrorReport::from_errors(vec![-1.0]).is_err());
    }

    #[test]
    fn cdf_examples() {
        assert_eq!(cdf_points(&report(&[5.0])), vec![(5.0, 1.0)]);
        assert_eq!(
            cdf_points(&report(&[2.0, 1.0])),
            vec![(1.0, 0.5), (2.0, 1.0)]
        );
    }

    #[test]
    fn improvement_examples() {
        let i = compare(&summary(298.0, 108.0, 319.0), &summary(280.0, 65.0, 300.0));
        assert_eq!(
            i,
            Improvement {
                mean: Some(6),
                median: Some(40),
                p75: Some(6)
            }
        );
        let v = compare(&summary(318.0, 123.0, 336.0), &summary(307.0, 80.0, 324.0));
        assert_eq!(
            v,
            Improvement {
                mean: Some(3),
                median: Some(35),
                p75: Some(4)
            }
        );
        let r = summary(1.0, 2.0, 3.0);
        assert_eq!(
            compare(&r, &r),
            Improvement {
                mean: Some(0),
                median: Some(0),
                p75: Some(0)
            }
        );
        assert_eq!(compare(&summary(0.0, 1.0, 1.0), &r).mean, None);
    }

    fn single(rssi: Vec<f64>, lat: f64) -> FingerprintDataset {
        FingerprintDataset::new(
            (0..rssi.len()).map(|i| format!("b{i}")).collect(),
            vec![Fingerprint::new(rssi, GeoPoint { lat, lon: 5.0 })],
            -200.0,
        )
        .unwrap()
    }

    #[test]
    fn perfect_model_has_zero_error() {
        let ds = single(vec![-100.0, -120.0], 50.0);
        let powed = PowedConfig::new(2.6, -157.0).unwrap();
        let r = evaluate(&fit(&ds, 1, powed).unwrap(), &ds).unwrap();
        assert_eq!((r.mean, r.median, r.p75), (0.0, 0.0, 0.0));
        let rows = k_sweep(&ds, &ds, &[1], powed).unwrap();
        assert_eq!(
            rows,
            vec![KSweepRow {
                k: 1,
                mean: 0.0,
                median: 0.0
            }]
        );
    }

    #[test]
    fn sweep_rejects_bad_k() {
        let ds = single(vec![-100.0], 50.0);
        let powed = PowedConfig::new(2.6, -157.0).unwrap();
        let err = k_sweep(&ds, &ds, &[1, 0], powed).unwrap_err().to_string();
        assert!(err.contains("k = 0"), "{err}");
        assert!(k_sweep(&ds, &ds, &[2], powed).is_err());
        assert!(k_sweep(&ds, &ds, &[], powed).is_err());
        assert!(matches!(
            k_sweep(&ds, &single(vec![-1.0, -2.0], 0.0), &[1], powed),
            Err(Error::SchemaMismatch { .. })
        ));
    }

    proptest! {
        #[test]
        fn summaries_match_independent_recomputation(
            errors in prop::collection::vec(0.0..5000.0f64, 1..300)
        ) {
            let r = report(&errors);
            // Kahan-summed mean and selection-based quantiles
            let (mut sum, mut c) = (0.0f64, 0.0f64);
            for &e in &errors {
                let y = e - c;
                let t = sum + y;
                c = (t - sum) - y;
                sum = t;
            }
            let mean = sum / errors.len() as f64;
            prop_assert!((r.mean - mean).abs() <= 1e-9 * mean.max(1e-300));
            for (q, got) in [(0.5, r.median), (0.75, r.p75)] {
                let h = (errors.len() - 1) as f64 * q;
                let nth = |i: usize| {
                    let mut v = errors.clone();
                    *v.select_nth_unstable_by(i, f64::total_cmp).1
                };
                let lo = nth(h.floor() as usize);
                let hi = nth(h.ceil() as usize);
                let want = lo + (h - h.floor()) * (hi - lo);
                prop_assert!((got - want).abs() <= 1e-9 * want.max(1.0));
            }
        }

        #[test]
        fn cdf_is_monotone_and_ends_at_one(
            errors in prop::collection::vec(0.0..5000.0f64, 1..300)
        ) {
            let cdf = cdf_points(&report(&errors));
            prop_assert_eq!(cdf.len(), errors.len());
            prop_assert!(cdf.windows(2).all(|w| w[0].0 <= w[1].0 && w[0].1 < w[1].1));
            prop_assert_eq!(cdf.last().unwrap().1, 1.0);
        }
    }
}
