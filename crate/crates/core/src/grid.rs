//! Uniform lat/lon grid for fixed-radius neighbor queries.
//!
//! Cell sizes come from lower bounds on the haversine distance, so every
//! point within `radius` of a query lies in the query's 3x3 cell
//! neighborhood. Longitude columns wrap around the antimeridian.

use std::collections::HashMap;

use crate::geo::{haversine_distance, GeoPoint, EARTH_RADIUS_M};

#[derive(Debug)]
pub struct SpatialGrid<'a> {
    points: &'a [GeoPoint],
    radius: f64,
    lat_step: f64,
    lon_step: f64,
    cols: i64,
    cells: HashMap<(i64, i64), Vec<usize>>,
}

impl<'a> SpatialGrid<'a> {
    pub fn new(points: &'a [GeoPoint], radius: f64) -> Self {
        let angle = radius / EARTH_RADIUS_M;
        // |dlat| <= d / R for any pair within d
        let lat_step = angle.to_degrees().max(1e-9);

        let max_abs_lat = points.iter().map(|p| p.lat.abs()).fold(0.0, f64::max);
        // haversine term >= cos^2(max_lat) sin^2(dlon / 2)
        let s =
            (angle / 2.0).min(std::f64::consts::FRAC_PI_2).sin() / max_abs_lat.to_radians().cos();
        let cols = if s >= 1.0 || !s.is_finite() {
            1
        } else {
            let min_width = (2.0 * s.asin()).to_degrees().max(1e-9);
            ((360.0 / min_width).floor() as i64).max(1)
        };
        let lon_step = 360.0 / cols as f64;

        let mut grid = SpatialGrid {
            points,
            radius,
            lat_step,
            lon_step,
            cols,
            cells: HashMap::new(),
        };
        for (i, p) in points.iter().enumerate() {
            let key = grid.cell_of(*p);
            grid.cells.entry(key).or_default().push(i);
        }
        grid
    }

    fn cell_of(&self, p: GeoPoint) -> (i64, i64) {
        let row = ((p.lat + 90.0) / self.lat_step).floor() as i64;
        let col = (((p.lon + 180.0) / self.lon_step).floor() as i64).rem_euclid(self.cols);
        (row, col)
    }

    /// Indices of all points within `radius` (inclusive) of point `index`,
    /// excluding `index` itself, in ascending order.
    pub fn neighbors_of(&self, index: usize) -> Vec<usize> {
        let center = self.points[index];
        let (row, col) = self.cell_of(center);
        let mut cols = [col - 1, col, col + 1].map(|c| c.rem_euclid(self.cols));
        cols.sort_unstable();
        let mut out = Vec::new();
        for r in row - 1..=row + 1 {
            for (ci, &c) in cols.iter().enumerate() {
                if ci > 0 && cols[ci - 1] == c {
                    continue;
                }
                if let Some(bucket) = self.cells.get(&(r, c)) {
                    out.extend(bucket.iter().copied().filter(|&j| {
                        j != index && haversine_distance(center, self.points[j]) <= self.radius
                    }));
                }
            }
        }
        out.sort_unstable();
        out
    }
}
