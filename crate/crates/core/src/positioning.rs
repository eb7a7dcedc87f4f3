//! Bray-Curtis kNN fingerprint positioning over powed-transformed RSSI.

use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{Fingerprint, FingerprintDataset, PowedConfig};
use crate::error::{Error, Result};
use crate::geo::{weighted_coordinate_mean, GeoPoint};

/// `sum |u_i - v_i| / sum (u_i + v_i)`, defined as 0 when the denominator is 0.
pub fn bray_curtis(u: &[f64], v: &[f64]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::SchemaMismatch {
            expected: u.len(),
            found: v.len(),
        });
    }
    let (mut num, mut den) = (0.0, 0.0);
    for (&a, &b) in u.iter().zip(v) {
        num += (a - b).abs();
        den += a + b;
    }
    Ok(if den == 0.0 { 0.0 } else { num / den })
}

/// How neighbor locations are combined into an estimate.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Estimator {
    /// Arithmetic mean of the neighbors' coordinates.
    #[default]
    Mean,
    /// Coordinates weighted by inverse dissimilarity. Only used to probe the
    /// sensitivity of results to the aggregation rule.
    InverseDissimilarity,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Neighbor {
    pub index: usize,
    pub dissimilarity: f64,
}

#[derive(Debug)]
pub struct PositioningModel {
    /// Row-major, `locations.len() x dims`, values in [0, 1].
    matrix: Vec<f64>,
    row_sums: Vec<f64>,
    locations: Vec<GeoPoint>,
    dims: usize,
    k: usize,
    powed: PowedConfig,
    estimator: Estimator,
    train_clamped: u64,
    query_clamped: AtomicU64,
}

/// Powed-transforms the training rows and stores them with their locations.
pub fn fit(train: &FingerprintDataset, k: usize, powed: PowedConfig) -> Result<PositioningModel> {
    if train.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if k == 0 || k > train.len() {
        return Err(Error::InvalidParameter(format!(
            "k must be in 1..={}, got {k}",
            train.len()
        )));
    }
    let dims = train.basestation_count();
    let mut matrix = Vec::with_capacity(train.len() * dims);
    let mut row_sums = Vec::with_capacity(train.len());
    let mut clamped = 0;
    for fp in train.iter() {
        let start = matrix.len();
        for &v in &fp.rssi {
            let (t, c) = powed.apply(v);
            clamped += c as u64;
            matrix.push(t);
        }
        row_sums.push(matrix[start..].iter().sum());
    }
    Ok(PositioningModel {
        matrix,
        row_sums,
        locations: train.iter().map(|f| f.location).collect(),
        dims,
        k,
        powed,
        estimator: Estimator::Mean,
        train_clamped: clamped,
        query_clamped: AtomicU64::new(0),
    })
}

// Features scanned between early-exit checks.
const CHECK_EVERY: usize = 8;

impl PositioningModel {
    pub fn with_estimator(mut self, estimator: Estimator) -> Self {
        self.estimator = estimator;
        self
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.locations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.locations.is_empty()
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn powed(&self) -> &PowedConfig {
        &self.powed
    }

    pub fn estimator(&self) -> Estimator {
        self.estimator
    }

    pub fn row(&self, index: usize) -> &[f64] {
        &self.matrix[index * self.dims..(index + 1) * self.dims]
    }

    pub fn location(&self, index: usize) -> GeoPoint {
        self.locations[index]
    }

    /// Values clamped into [min_value, 0] while transforming training rows.
    pub fn train_clamped(&self) -> u64 {
        self.train_clamped
    }

    /// Values clamped while transforming queries so far.
    pub fn query_clamped(&self) -> u64 {
        self.query_clamped.load(Ordering::Relaxed)
    }

    pub fn transform_query(&self, query: &Fingerprint) -> Result<Vec<f64>> {
        if query.rssi.len() != self.dims {
            return Err(Error::SchemaMismatch {
                expected: self.dims,
                found: query.rssi.len(),
            });
        }
        let mut clamped = 0;
        let out = query
            .rssi
            .iter()
            .map(|&v| {
                let (t, c) = self.powed.apply(v);
                clamped += c as u64;
                t
            })
            .collect();
        if clamped > 0 {
            self.query_clamped.fetch_add(clamped, Ordering::Relaxed);
        }
        Ok(out)
    }

    /// The `k` training rows closest to an already-transformed query, sorted
    /// by (dissimilarity, index).
    ///
    /// Exact linear scan. A row is abandoned once its partial numerator
    /// provably exceeds the current k-th best dissimilarity; the surviving
    /// rows are scored exactly as [`bray_curtis`] would score them.
    pub fn nearest_transformed(&self, query: &[f64], k: usize) -> Vec<Neighbor> {
        debug_assert_eq!(query.len(), self.dims);
        let k = k.min(self.len());
        if k == 0 {
            return Vec::new();
        }
        let query_sum: f64 = query.iter().sum();
        let mut best: Vec<Neighbor> = Vec::with_capacity(k + 1);
        let mut bound = f64::INFINITY;

        'rows: for (index, row) in self.matrix.chunks_exact(self.dims).enumerate() {
            let cutoff = bound * (query_sum + self.row_sums[index]) * (1.0 + 1e-9);
            let (mut num, mut den) = (0.0, 0.0);
            for (qc, rc) in query.chunks(CHECK_EVERY).zip(row.chunks(CHECK_EVERY)) {
                for (&a, &b) in qc.iter().zip(rc) {
                    num += (a - b).abs();
                    den += a + b;
                }
                if num > cutoff {
                    continue 'rows;
                }
            }
            let d = if den == 0.0 { 0.0 } else { num / den };
            if best.len() == k && d >= bound {
                continue;
            }
            // insert after any equal dissimilarity so lower indices stay first
            let pos = best.partition_point(|n| n.dissimilarity <= d);
            best.insert(
                pos,
                Neighbor {
                    index,
                    dissimilarity: d,
                },
            );
            if best.len() > k {
                best.pop();
            }
            if best.len() == k {
                bound = best[k - 1].dissimilarity;
            }
        }
        best
    }

    pub fn neighbors(&self, query: &Fingerprint, k: usize) -> Result<Vec<Neighbor>> {
        let q = self.transform_query(query)?;
        Ok(self.nearest_transformed(&q, k))
    }

    /// Combines neighbor locations with the model's estimator.
    pub fn estimate(&self, neighbors: &[Neighbor]) -> Option<GeoPoint> {
        match self.estimator {
            Estimator::Mean => {
                weighted_coordinate_mean(neighbors.iter().map(|n| (self.locations[n.index], 1.0)))
            }
            Estimator::InverseDissimilarity => {
                if neighbors.iter().any(|n| n.dissimilarity == 0.0) {
                    weighted_coordinate_mean(
                        neighbors
                            .iter()
                            .filter(|n| n.dissimilarity == 0.0)
                            .map(|n| (self.locations[n.index], 1.0)),
                    )
                } else {
                    weighted_coordinate_mean(
                        neighbors
                            .iter()
                            .map(|n| (self.locations[n.index], 1.0 / n.dissimilarity)),
                    )
                }
            }
        }
    }

    pub fn predict(&self, query: &Fingerprint) -> Result<GeoPoint> {
        let neighbors = self.neighbors(query, self.k)?;
        self.estimate(&neighbors).ok_or(Error::EmptyDataset)
    }

    /// Parallel [`predict`](Self::predict) over every query, in query order.
    pub fn predict_batch(&self, queries: &FingerprintDataset) -> Result<Vec<GeoPoint>> {
        if queries.is_empty() {
            return Err(Error::EmptyDataset);
        }
        queries
            .fingerprints()
            .par_iter()
            .enumerate()
            .map(|(index, q)| {
                self.predict(q).map_err(|e| Error::Query {
                    index,
                    source: Box::new(e),
                })
            })
            .collect()
    }
}
