#![allow(dead_code)]

use proxyfaug_core::{Fingerprint, FingerprintDataset, GeoPoint, EARTH_RADIUS_M};
use rand::Rng;

pub const FLOOR: f64 = -157.0;

/// Meters north/east of (lat0, lon0) converted to a point.
pub fn offset(lat0: f64, lon0: f64, north_m: f64, east_m: f64) -> GeoPoint {
    let lat = lat0 + (north_m / EARTH_RADIUS_M).to_degrees();
    let lon = lon0 + (east_m / (EARTH_RADIUS_M * lat0.to_radians().cos())).to_degrees();
    GeoPoint { lat, lon }
}

/// Sparse integer RSSI vector: most basestations at the floor, a few heard.
pub fn sparse_rssi<R: Rng>(rng: &mut R, dims: usize) -> Vec<f64> {
    (0..dims)
        .map(|_| {
            if rng.random_bool(0.15) {
                rng.random_range(-156..=-60) as f64
            } else {
                FLOOR
            }
        })
        .collect()
}

/// `m` fingerprints scattered uniformly over a square of side `extent_m`.
pub fn random_layout<R: Rng>(
    rng: &mut R,
    m: usize,
    dims: usize,
    extent_m: f64,
) -> FingerprintDataset {
    let lat0 = rng.random_range(-60.0..60.0);
    let lon0 = rng.random_range(-170.0..170.0);
    let fps = (0..m)
        .map(|_| {
            let loc = offset(
                lat0,
                lon0,
                rng.random_range(0.0..extent_m),
                rng.random_range(0.0..extent_m),
            );
            Fingerprint::new(sparse_rssi(rng, dims), loc)
        })
        .collect();
    FingerprintDataset::new((0..dims).map(|i| format!("BS{i}")).collect(), fps, -200.0).unwrap()
}
