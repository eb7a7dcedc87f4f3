//! Spherical-earth geodesy: great-circle distance and pair midpoints.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Mean Earth radius in meters.
pub const EARTH_RADIUS_M: f64 = 6_371_000.0;

/// A location in decimal degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeoPoint {
    pub lat: f64,
    pub lon: f64,
}

impl GeoPoint {
    pub fn new(lat: f64, lon: f64) -> Result<Self> {
        let p = GeoPoint { lat, lon };
        if p.is_valid() {
            Ok(p)
        } else {
            Err(Error::InvalidCoordinate { lat, lon })
        }
    }

    pub fn is_valid(&self) -> bool {
        (-90.0..=90.0).contains(&self.lat) && (-180.0..=180.0).contains(&self.lon)
    }

    fn to_unit_vector(self) -> [f64; 3] {
        let (lat, lon) = (self.lat.to_radians(), self.lon.to_radians());
        [lat.cos() * lon.cos(), lat.cos() * lon.sin(), lat.sin()]
    }
}

/// Great-circle distance in meters (haversine formula).
pub fn haversine_distance(a: GeoPoint, b: GeoPoint) -> f64 {
    let lat1 = a.lat.to_radians();
    let lat2 = b.lat.to_radians();
    let dlat = (b.lat - a.lat).to_radians();
    let dlon = (b.lon - a.lon).to_radians();

    let h = (dlat / 2.0).sin().powi(2) + lat1.cos() * lat2.cos() * (dlon / 2.0).sin().powi(2);
    2.0 * EARTH_RADIUS_M * h.sqrt().min(1.0).asin()
}

/// Spherical midpoint of `a` and `b`, equidistant from both along the great circle.
///
/// Symmetric in its arguments and exact for `a == b`. Fails only for
/// (near-)antipodal points, where the midpoint is not unique.
pub fn midpoint(a: GeoPoint, b: GeoPoint) -> Result<GeoPoint> {
    if a == b {
        return Ok(a);
    }
    let u = a.to_unit_vector();
    let v = b.to_unit_vector();
    let s = [u[0] + v[0], u[1] + v[1], u[2] + v[2]];
    let norm = (s[0] * s[0] + s[1] * s[1] + s[2] * s[2]).sqrt();
    if norm < 1e-12 {
        return Err(Error::AntipodalPoints);
    }
    let lat = s[2].atan2((s[0] * s[0] + s[1] * s[1]).sqrt());
    let lon = s[1].atan2(s[0]);
    Ok(GeoPoint {
        lat: lat.to_degrees(),
        lon: lon.to_degrees(),
    })
}

/// Arithmetic mean of latitudes and longitudes.
///
/// Only meaningful for points spread over a small area away from the
/// antimeridian.
pub fn coordinate_mean(points: &[GeoPoint]) -> Option<GeoPoint> {
    weighted_coordinate_mean(points.iter().map(|&p| (p, 1.0)))
}

pub(crate) fn weighted_coordinate_mean(
    points: impl IntoIterator<Item = (GeoPoint, f64)>,
) -> Option<GeoPoint> {
    let (mut lat, mut lon, mut total) = (0.0, 0.0, 0.0);
    for (p, w) in points {
        lat += w * p.lat;
        lon += w * p.lon;
        total += w;
    }
    if total > 0.0 {
        Some(GeoPoint {
            lat: lat / total,
            lon: lon / total,
        })
    } else {
        None
    }
}
