//! Fingerprint datasets: CSV ingestion, sentinel handling and the powed
//! RSSI transform.

use std::collections::HashSet;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::config::KeyValues;
use crate::error::{Error, Result};
use crate::geo::GeoPoint;

/// Placeholder RSSI for "basestation did not hear the transmission".
pub const DEFAULT_SENTINEL: f64 = -200.0;

const LAT_HEADER: &str = "lat";
const LON_HEADER: &str = "lon";
const ORIGIN_HEADER: &str = "origin";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Origin {
    Original,
    Augmented,
}

impl Origin {
    pub fn as_str(self) -> &'static str {
        match self {
            Origin::Original => "original",
            Origin::Augmented => "augmented",
        }
    }
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Origin {
    type Err = ();

    fn from_str(s: &str) -> std::result::Result<Self, ()> {
        match s.trim().to_ascii_lowercase().as_str() {
            "original" => Ok(Origin::Original),
            "augmented" => Ok(Origin::Augmented),
            _ => Err(()),
        }
    }
}

/// One RSSI vector (dBm, one entry per basestation) with its ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct Fingerprint {
    pub rssi: Vec<f64>,
    pub location: GeoPoint,
    pub origin: Origin,
}

impl Fingerprint {
    pub fn new(rssi: Vec<f64>, location: GeoPoint) -> Self {
        Fingerprint {
            rssi,
            location,
            origin: Origin::Original,
        }
    }
}

/// An ordered set of fingerprints sharing one basestation schema.
#[derive(Debug, Clone, PartialEq)]
pub struct FingerprintDataset {
    fingerprints: Vec<Fingerprint>,
    basestation_ids: Vec<String>,
    sentinel: f64,
    floor: Option<f64>,
}

impl FingerprintDataset {
    pub fn new(
        basestation_ids: Vec<String>,
        fingerprints: Vec<Fingerprint>,
        sentinel: f64,
    ) -> Result<Self> {
        let mut seen = HashSet::with_capacity(basestation_ids.len());
        for id in &basestation_ids {
            if !seen.insert(id.as_str()) {
                return Err(Error::Schema(format!("duplicate basestation id `{id}`")));
            }
        }
        for fp in &fingerprints {
            if fp.rssi.len() != basestation_ids.len() {
                return Err(Error::SchemaMismatch {
                    expected: basestation_ids.len(),
                    found: fp.rssi.len(),
                });
            }
            if !fp.location.is_valid() {
                return Err(Error::InvalidCoordinate {
                    lat: fp.location.lat,
                    lon: fp.location.lon,
                });
            }
        }
        Ok(FingerprintDataset {
            fingerprints,
            basestation_ids,
            sentinel,
            floor: None,
        })
    }

    /// Same schema and sentinel, different rows. Rows must already match the schema.
    pub(crate) fn with_fingerprints(&self, fingerprints: Vec<Fingerprint>) -> Self {
        debug_assert!(fingerprints
            .iter()
            .all(|f| f.rssi.len() == self.basestation_ids.len()));
        FingerprintDataset {
            fingerprints,
            basestation_ids: self.basestation_ids.clone(),
            sentinel: self.sentinel,
            floor: self.floor,
        }
    }

    pub fn fingerprints(&self) -> &[Fingerprint] {
        &self.fingerprints
    }

    pub fn into_fingerprints(self) -> Vec<Fingerprint> {
        self.fingerprints
    }

    pub fn basestation_ids(&self) -> &[String] {
        &self.basestation_ids
    }

    pub fn basestation_count(&self) -> usize {
        self.basestation_ids.len()
    }

    pub fn sentinel(&self) -> f64 {
        self.sentinel
    }

    /// The replacement value applied by [`replace_sentinels`], if any.
    pub fn floor(&self) -> Option<f64> {
        self.floor
    }

    pub fn len(&self) -> usize {
        self.fingerprints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fingerprints.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Fingerprint> {
        self.fingerprints.iter()
    }

    /// Fails unless `other` has the same basestation count.
    pub fn check_compatible(&self, other: &FingerprintDataset) -> Result<()> {
        if self.basestation_count() != other.basestation_count() {
            return Err(Error::SchemaMismatch {
                expected: self.basestation_count(),
                found: other.basestation_count(),
            });
        }
        Ok(())
    }
}

/// How CSV columns map onto basestations and coordinates.
///
/// Column references resolve against the header first; a reference that is
/// not a header name but parses as an integer is a 0-based column index.
/// `rssi_columns` also accepts half-open index ranges (`2..86`) and `auto`,
/// which selects every column that is not the latitude, longitude or
/// `origin` column.
#[derive(Debug, Clone, PartialEq)]
pub struct Schema {
    pub rssi_columns: Option<Vec<String>>,
    pub lat_column: String,
    pub lon_column: String,
    pub sentinel: f64,
}

impl Default for Schema {
    fn default() -> Self {
        Schema {
            rssi_columns: None,
            lat_column: LAT_HEADER.into(),
            lon_column: LON_HEADER.into(),
            sentinel: DEFAULT_SENTINEL,
        }
    }
}

impl Schema {
    pub fn from_key_values(kv: &KeyValues) -> Result<Self> {
        for key in kv.keys() {
            if !matches!(
                key,
                "rssi_columns" | "lat_column" | "lon_column" | "sentinel"
            ) {
                return Err(Error::Schema(format!("unknown schema key `{key}`")));
            }
        }
        let mut schema = Schema::default();
        if let Some(cols) = kv.get("rssi_columns") {
            if !cols.eq_ignore_ascii_case("auto") {
                let list: Vec<String> = cols
                    .split(',')
                    .map(|c| c.trim().to_string())
                    .filter(|c| !c.is_empty())
                    .collect();
                if list.is_empty() {
                    return Err(Error::Schema("`rssi_columns` is empty".into()));
                }
                schema.rssi_columns = Some(list);
            }
        }
        if let Some(c) = kv.get("lat_column") {
            schema.lat_column = c.to_string();
        }
        if let Some(c) = kv.get("lon_column") {
            schema.lon_column = c.to_string();
        }
        if let Some(s) = kv.parse_value("sentinel")? {
            schema.sentinel = s;
        }
        Ok(schema)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_key_values(&KeyValues::from_file(path)?)
    }

    fn resolve_one(&self, headers: &[String], name: &str) -> Result<usize> {
        if let Some(i) = headers.iter().position(|h| h == name) {
            return Ok(i);
        }
        match name.parse::<usize>() {
            Ok(i) if i < headers.len() => Ok(i),
            _ => Err(Error::MissingColumn {
                column: name.to_string(),
            }),
        }
    }

    fn resolve(&self, headers: &[String]) -> Result<ResolvedColumns> {
        let lat = self.resolve_one(headers, &self.lat_column)?;
        let lon = self.resolve_one(headers, &self.lon_column)?;
        let origin = headers.iter().position(|h| h == ORIGIN_HEADER);

        let rssi = match &self.rssi_columns {
            None => (0..headers.len())
                .filter(|&i| i != lat && i != lon && Some(i) != origin)
                .collect(),
            Some(list) => {
                let mut out = Vec::new();
                for entry in list {
                    if let Some((lo, hi)) = parse_range(entry) {
                        if hi > headers.len() || lo >= hi {
                            return Err(Error::Schema(format!(
                                "column range `{entry}` is outside the {} header columns",
                                headers.len()
                            )));
                        }
                        out.extend(lo..hi);
                    } else {
                        out.push(self.resolve_one(headers, entry)?);
                    }
                }
                out
            }
        };
        if rssi.is_empty() {
            return Err(Error::Schema("no RSSI columns selected".into()));
        }
        Ok(ResolvedColumns {
            rssi,
            lat,
            lon,
            origin,
        })
    }
}

fn parse_range(entry: &str) -> Option<(usize, usize)> {
    let (lo, hi) = entry.split_once("..")?;
    Some((lo.trim().parse().ok()?, hi.trim().parse().ok()?))
}

struct ResolvedColumns {
    rssi: Vec<usize>,
    lat: usize,
    lon: usize,
    origin: Option<usize>,
}

fn parse_cell(record: &csv::StringRecord, idx: usize, headers: &[String]) -> Result<f64> {
    let raw = record.get(idx).unwrap_or("");
    let row = record.position().map_or(0, |p| p.line());
    match raw.trim().parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(Error::Parse {
            row,
            column: headers[idx].clone(),
            value: raw.to_string(),
        }),
    }
}

/// Reads a fingerprint CSV with a header row.
///
/// Rows keep file order. A row's `origin` is read from an `origin` column
/// when one exists, otherwise it is [`Origin::Original`]. Parse error rows
/// are 1-based file line numbers (the header is line 1).
pub fn load_csv(path: impl AsRef<Path>, schema: &Schema) -> Result<FingerprintDataset> {
    let path = path.as_ref();
    let csv_err = |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    };
    let file = std::fs::File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(file);
    let headers: Vec<String> = reader
        .headers()
        .map_err(csv_err)?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    if headers.iter().all(String::is_empty) {
        return Err(Error::EmptyDataset);
    }
    let cols = schema.resolve(&headers)?;

    let mut fingerprints = Vec::new();
    for record in reader.records() {
        let record = record.map_err(csv_err)?;
        let rssi = cols
            .rssi
            .iter()
            .map(|&i| parse_cell(&record, i, &headers))
            .collect::<Result<Vec<_>>>()?;
        let lat = parse_cell(&record, cols.lat, &headers)?;
        let lon = parse_cell(&record, cols.lon, &headers)?;
        let location = GeoPoint::new(lat, lon)?;
        let origin = match cols.origin {
            None => Origin::Original,
            Some(i) => {
                let raw = record.get(i).unwrap_or("");
                raw.parse().map_err(|_| {
                    Error::Schema(format!(
                        "row {}: unknown origin `{raw}`",
                        record.position().map_or(0, |p| p.line())
                    ))
                })?
            }
        };
        fingerprints.push(Fingerprint {
            rssi,
            location,
            origin,
        });
    }
    if fingerprints.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let ids = cols.rssi.iter().map(|&i| headers[i].clone()).collect();
    FingerprintDataset::new(ids, fingerprints, schema.sentinel)
}

/// Writes `ds` as CSV: basestation columns, `lat`, `lon`, `origin`.
///
/// RSSI values carry 6 fractional digits and coordinates 8, so datasets
/// whose values are already at that precision round-trip exactly through
/// [`load_csv`] with the default schema.
pub fn write_csv(ds: &FingerprintDataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    if ds.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if let Some(clash) = ds
        .basestation_ids()
        .iter()
        .find(|id| matches!(id.as_str(), LAT_HEADER | LON_HEADER | ORIGIN_HEADER))
    {
        return Err(Error::Schema(format!(
            "basestation id `{clash}` collides with a reserved column"
        )));
    }
    let csv_err = |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    };
    let file = std::fs::File::create(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut writer = csv::Writer::from_writer(std::io::BufWriter::new(file));

    let mut header: Vec<&str> = ds.basestation_ids().iter().map(String::as_str).collect();
    header.extend([LAT_HEADER, LON_HEADER, ORIGIN_HEADER]);
    writer.write_record(&header).map_err(csv_err)?;

    let mut row: Vec<String> = Vec::with_capacity(header.len());
    for fp in ds.iter() {
        row.clear();
        row.extend(fp.rssi.iter().map(|v| format!("{v:.6}")));
        row.push(format!("{:.8}", fp.location.lat));
        row.push(format!("{:.8}", fp.location.lon));
        row.push(fp.origin.as_str().to_string());
        writer.write_record(&row).map_err(csv_err)?;
    }
    writer.flush().map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Minimum RSSI over all non-sentinel entries.
pub fn compute_floor(train: &FingerprintDataset) -> Result<f64> {
    let sentinel = train.sentinel();
    train
        .iter()
        .flat_map(|fp| fp.rssi.iter().copied())
        .filter(|&v| v != sentinel)
        .fold(None, |min: Option<f64>, v| {
            Some(min.map_or(v, |m| m.min(v)))
        })
        .ok_or(Error::NoSignal)
}

/// Replaces every sentinel entry with `floor`. Idempotent.
pub fn replace_sentinels(ds: &FingerprintDataset, floor: f64) -> Result<FingerprintDataset> {
    if floor.is_nan() || floor <= ds.sentinel() {
        return Err(Error::InvalidParameter(format!(
            "floor {floor} must be above the sentinel {}",
            ds.sentinel()
        )));
    }
    let sentinel = ds.sentinel();
    let fingerprints = ds
        .iter()
        .map(|fp| Fingerprint {
            rssi: fp
                .rssi
                .iter()
                .map(|&v| if v == sentinel { floor } else { v })
                .collect(),
            ..fp.clone()
        })
        .collect();
    let mut out = ds.with_fingerprints(fingerprints);
    out.floor = Some(floor);
    Ok(out)
}

/// Parameters of the powed transform `((v - min) / -min)^beta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowedConfig {
    beta: f64,
    min_value: f64,
}

impl PowedConfig {
    pub fn new(beta: f64, min_value: f64) -> Result<Self> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "beta must be positive, got {beta}"
            )));
        }
        if !(min_value < 0.0 && min_value.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "powed minimum must be negative, got {min_value}"
            )));
        }
        Ok(PowedConfig { beta, min_value })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn min_value(&self) -> f64 {
        self.min_value
    }

    /// Transformed value, plus whether `value` fell outside `[min_value, 0]`
    /// and was clamped.
    pub fn apply(&self, value: f64) -> (f64, bool) {
        if value <= self.min_value {
            (0.0, value < self.min_value)
        } else if value >= 0.0 {
            (1.0, value > 0.0)
        } else {
            (
                ((value - self.min_value) / -self.min_value).powf(self.beta),
                false,
            )
        }
    }
}

/// Maps a dBm value into `[0, 1]`; inputs outside `[min_value, 0]` are clamped.
pub fn powed_transform(value: f64, cfg: &PowedConfig) -> f64 {
    cfg.apply(value).0
}
