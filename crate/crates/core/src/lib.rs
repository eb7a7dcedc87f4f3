//! Proximity-based fingerprint augmentation for RF fingerprint positioning.
//!
//! The crate covers the whole experiment pipeline: loading fingerprint CSVs,
//! sentinel and powed preprocessing, crossover-and-mutate augmentation over
//! proximity clusters, Bray-Curtis kNN positioning and error reporting.

pub mod augmentation;
pub mod config;
pub mod dataset;
pub mod error;
pub mod evaluation;
pub mod geo;
pub mod grid;
pub mod pipeline;
pub mod positioning;
pub mod rng;

pub use augmentation::{
    augment_dataset, augment_dataset_with_stats, crossover, crossover_and_mutate, enumerate_pairs,
    form_clusters, mutate, size_upper_bound, AugmentationParams, AugmentationStats, Cluster,
};
pub use config::KeyValues;
pub use dataset::{
    compute_floor, load_csv, powed_transform, replace_sentinels, write_csv, Fingerprint,
    FingerprintDataset, Origin, PowedConfig, Schema, DEFAULT_SENTINEL,
};
pub use error::{Error, Result};
pub use evaluation::{cdf_points, compare, evaluate, k_sweep, ErrorReport, Improvement, KSweepRow};
pub use geo::{haversine_distance, midpoint, GeoPoint, EARTH_RADIUS_M};
pub use pipeline::Preprocessed;
pub use positioning::{bray_curtis, fit, Estimator, Neighbor, PositioningModel};
pub use rng::Substreams;
