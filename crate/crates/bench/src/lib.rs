//! Synthetic survey data for benchmarks: Sigfox-like sparse RSSI vectors
//! along a random walk, so proximity clusters actually form.

use proxyfaug_core::{Fingerprint, FingerprintDataset, GeoPoint, EARTH_RADIUS_M};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const BASESTATIONS: usize = 84;
pub const FLOOR: f64 = -157.0;

pub fn survey(points: usize, seed: u64) -> FingerprintDataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut north, mut east) = (0.0f64, 0.0f64);
    let fps = (0..points)
        .map(|_| {
            north += rng.random_range(-15.0..15.0);
            east += rng.random_range(-15.0..15.0);
            let lat = 51.2 + (north / EARTH_RADIUS_M).to_degrees();
            let lon = 4.4 + (east / (EARTH_RADIUS_M * 51.2f64.to_radians().cos())).to_degrees();
            let rssi = (0..BASESTATIONS)
                .map(|_| {
                    if rng.random_bool(0.1) {
                        rng.random_range(-156..=-70) as f64
                    } else {
                        FLOOR
                    }
                })
                .collect();
            Fingerprint::new(rssi, GeoPoint { lat, lon })
        })
        .collect();
    FingerprintDataset::new(
        (1..=BASESTATIONS).map(|i| format!("BS{i}")).collect(),
        fps,
        -200.0,
    )
    .expect("synthetic data is well formed")
}
