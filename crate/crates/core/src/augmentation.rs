//! Proximity-based fingerprint augmentation.
//!
//! Every training fingerprint anchors a cluster made of itself and up to
//! `s_max - 1` randomly chosen fingerprints within `range_m` meters. Each
//! pair of cluster members yields `n_crossovers` offspring through uniform
//! crossover followed by interval mutation; offspring are located at the
//! midpoint of their parents.
//!
//! Augmentation works on raw dBm values, so sentinels must already be
//! replaced by the training floor.

use rand::seq::index;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{Fingerprint, FingerprintDataset, Origin};
use crate::error::{Error, Result};
use crate::geo::{midpoint, GeoPoint};
use crate::grid::SpatialGrid;
use crate::rng::Substreams;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AugmentationParams {
    /// Proximity range in meters.
    pub range_m: f64,
    /// Maximum cluster size, reference included.
    pub s_max: usize,
    /// Offspring per parent pair.
    pub n_crossovers: usize,
    /// Per-feature mutation probability.
    pub p_mutation: f64,
    pub seed: u64,
}

impl Default for AugmentationParams {
    fn default() -> Self {
        AugmentationParams {
            range_m: 20.0,
            s_max: 2,
            n_crossovers: 8,
            p_mutation: 0.3,
            seed: 0,
        }
    }
}

impl AugmentationParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.range_m > 0.0 && self.range_m.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "range must be positive, got {}",
                self.range_m
            )));
        }
        if self.s_max < 2 {
            return Err(Error::InvalidParameter(format!(
                "maximum cluster size must be at least 2, got {}",
                self.s_max
            )));
        }
        if self.n_crossovers < 1 {
            return Err(Error::InvalidParameter(
                "crossovers per pair must be at least 1".into(),
            ));
        }
        if !(0.0..=1.0).contains(&self.p_mutation) {
            return Err(Error::InvalidParameter(format!(
                "mutation probability must be in [0, 1], got {}",
                self.p_mutation
            )));
        }
        Ok(())
    }
}

/// A reference fingerprint and the proximal fingerprints kept with it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cluster {
    pub reference: usize,
    /// Sorted member indices, reference included.
    pub members: Vec<usize>,
}

/// Counters describing one augmentation run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct AugmentationStats {
    pub clusters: usize,
    pub singleton_clusters: usize,
    pub pairs: usize,
    pub offspring: usize,
}

/// One cluster per training fingerprint, in dataset order.
pub fn form_clusters(
    train: &FingerprintDataset,
    params: &AugmentationParams,
) -> Result<Vec<Cluster>> {
    params.validate()?;
    if train.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let locations: Vec<GeoPoint> = train.iter().map(|f| f.location).collect();
    let grid = SpatialGrid::new(&locations, params.range_m);
    let streams = Substreams::new(params.seed);
    let keep = params.s_max - 1;

    Ok((0..locations.len())
        .into_par_iter()
        .map(|reference| {
            let neighbors = grid.neighbors_of(reference);
            let mut members = if neighbors.len() > keep {
                let mut rng = streams.cluster_rng(reference);
                index::sample(&mut rng, neighbors.len(), keep)
                    .into_iter()
                    .map(|i| neighbors[i])
                    .collect()
            } else {
                neighbors
            };
            members.push(reference);
            members.sort_unstable();
            Cluster { reference, members }
        })
        .collect())
}

/// All unordered member pairs, lexicographically sorted.
pub fn enumerate_pairs(cluster: &Cluster) -> Vec<(usize, usize)> {
    let mut members = cluster.members.clone();
    members.sort_unstable();
    let m = &members;
    (0..m.len())
        .flat_map(|i| (i + 1..m.len()).map(move |j| (m[i], m[j])))
        .collect()
}

/// Uniform crossover: each feature comes from `a` or `b` with probability 1/2.
pub fn crossover<R: Rng + ?Sized>(
    a: &Fingerprint,
    b: &Fingerprint,
    rng: &mut R,
) -> Result<Fingerprint> {
    if a.rssi.len() != b.rssi.len() {
        return Err(Error::SchemaMismatch {
            expected: a.rssi.len(),
            found: b.rssi.len(),
        });
    }
    let rssi = a
        .rssi
        .iter()
        .zip(&b.rssi)
        .map(|(&x, &y)| if rng.random_bool(0.5) { x } else { y })
        .collect();
    Ok(Fingerprint {
        rssi,
        location: midpoint(a.location, b.location)?,
        origin: Origin::Augmented,
    })
}

/// With probability `p_m` per feature, redraws the value uniformly between
/// the two parents' values for that feature.
pub fn mutate<R: Rng + ?Sized>(
    mut child: Fingerprint,
    a: &Fingerprint,
    b: &Fingerprint,
    p_m: f64,
    rng: &mut R,
) -> Fingerprint {
    for ((c, &x), &y) in child.rssi.iter_mut().zip(&a.rssi).zip(&b.rssi) {
        if rng.random_bool(p_m) && x != y {
            *c = rng.random_range(x.min(y)..=x.max(y));
        }
    }
    child
}

pub fn crossover_and_mutate<R: Rng + ?Sized>(
    a: &Fingerprint,
    b: &Fingerprint,
    p_m: f64,
    rng: &mut R,
) -> Result<Fingerprint> {
    let child = crossover(a, b, rng)?;
    Ok(mutate(child, a, b, p_m, rng))
}

/// Original fingerprints followed by all offspring in (reference, pair,
/// offspring) order. Deterministic for a given seed regardless of the
/// rayon pool size.
pub fn augment_dataset(
    train: &FingerprintDataset,
    params: &AugmentationParams,
) -> Result<FingerprintDataset> {
    augment_dataset_with_stats(train, params).map(|(ds, _)| ds)
}

pub fn augment_dataset_with_stats(
    train: &FingerprintDataset,
    params: &AugmentationParams,
) -> Result<(FingerprintDataset, AugmentationStats)> {
    let clusters = form_clusters(train, params)?;
    let streams = Substreams::new(params.seed);
    let fps = train.fingerprints();

    let per_cluster: Vec<Vec<Fingerprint>> = clusters
        .par_iter()
        .map(|cluster| {
            let pairs = enumerate_pairs(cluster);
            let mut rng = streams.offspring_rng(cluster.reference);
            let mut out = Vec::with_capacity(pairs.len() * params.n_crossovers);
            for (i, j) in pairs {
                for _ in 0..params.n_crossovers {
                    out.push(crossover_and_mutate(
                        &fps[i],
                        &fps[j],
                        params.p_mutation,
                        &mut rng,
                    )?);
                }
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;

    let offspring: usize = per_cluster.iter().map(Vec::len).sum();
    let stats = AugmentationStats {
        clusters: clusters.len(),
        singleton_clusters: clusters.iter().filter(|c| c.members.len() < 2).count(),
        pairs: clusters
            .iter()
            .map(|c| c.members.len() * (c.members.len() - 1) / 2)
            .sum(),
        offspring,
    };

    let mut all = Vec::with_capacity(fps.len() + offspring);
    all.extend_from_slice(fps);
    all.extend(per_cluster.into_iter().flatten());
    Ok((train.with_fingerprints(all), stats))
}

/// Largest possible augmented size: `m + m * C(s_max, 2) * n`.
pub fn size_upper_bound(m: u64, s_max: u64, n: u64) -> Result<u64> {
    if s_max < 2 || n < 1 {
        return Err(Error::InvalidParameter(format!(
            "size bound needs s_max >= 2 and n >= 1, got s_max={s_max}, n={n}"
        )));
    }
    let pairs = s_max
        .checked_mul(s_max - 1)
        .map(|p| p / 2)
        .ok_or_else(|| Error::InvalidParameter("size bound overflows u64".into()))?;
    m.checked_mul(pairs)
        .and_then(|x| x.checked_mul(n))
        .and_then(|x| x.checked_add(m))
        .ok_or_else(|| Error::InvalidParameter("size bound overflows u64".into()))
}
