use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use proxyfaug_core::{
    augment_dataset_with_stats, cdf_points, evaluate, fit, k_sweep, load_csv, size_upper_bound,
    write_csv, FingerprintDataset, Origin, Preprocessed,
};
use serde::Serialize;
use serde_json::json;

use crate::config::{parse_ks, EstimatorArg, RunConfig, Split};
use crate::error::CliError;

pub const AUGMENTED_CSV: &str = "augmented.csv";
pub const AUGMENT_MANIFEST: &str = "augment_manifest.json";
pub const REPORT_JSON: &str = "report.json";
pub const CDF_CSV: &str = "cdf.csv";
pub const SWEEP_CSV: &str = "k_sweep.csv";
pub const TUNE_MANIFEST: &str = "tune_manifest.json";

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |e| {
        CliError::Input(proxyfaug_core::Error::Io {
            path: path.to_path_buf(),
            source: e,
        })
    }
}

fn out_file(config: &RunConfig, name: &str) -> Result<PathBuf, CliError> {
    fs::create_dir_all(&config.out).map_err(io_err(&config.out))?;
    Ok(config.out.join(name))
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).map_err(io_err(path))
}

fn origin_counts(ds: &FingerprintDataset) -> serde_json::Value {
    let augmented = ds.iter().filter(|f| f.origin == Origin::Augmented).count();
    json!({ "total": ds.len(), "original": ds.len() - augmented, "augmented": augmented })
}

pub fn cmd_augment(config: &RunConfig) -> Result<(), CliError> {
    let started = Instant::now();
    let schema = config.schema()?;
    let train_path = config.require(&config.train, "train")?;
    let train = load_csv(train_path, &schema)?;
    let prep = Preprocessed::new(&train, &[], config.beta, config.floor)?;

    let (augmented, stats) = augment_dataset_with_stats(&prep.train, &config.augmentation)?;
    let csv_path = out_file(config, AUGMENTED_CSV)?;
    write_csv(&augmented, &csv_path)?;

    let p = &config.augmentation;
    let bound = size_upper_bound(train.len() as u64, p.s_max as u64, p.n_crossovers as u64)?;
    let manifest = json!({
        "config": config,
        "seed": p.seed,
        "params": p,
        "floor": prep.floor,
        "input_size": train.len(),
        "output_size": augmented.len(),
        "size_upper_bound": bound,
        "stats": stats,
        "output": csv_path,
        "wall_time_s": started.elapsed().as_secs_f64(),
    });
    write_json(&out_file(config, AUGMENT_MANIFEST)?, &manifest)?;
    println!(
        "augmented {} -> {} fingerprints (bound {bound}); wrote {}",
        train.len(),
        augmented.len(),
        csv_path.display()
    );
    Ok(())
}

fn default_split(config: &RunConfig) -> Split {
    if config.test.is_some() {
        Split::Test
    } else {
        Split::Validation
    }
}

pub fn cmd_evaluate(
    config: &RunConfig,
    split: Option<Split>,
    estimator: Option<EstimatorArg>,
) -> Result<(), CliError> {
    let split = match split {
        Some(s) => s,
        None => match config.file_value("split") {
            Some("train") => Split::Train,
            Some("validation") => Split::Validation,
            Some("test") => Split::Test,
            Some(other) => {
                return Err(CliError::Usage(format!(
                    "config file: unknown split `{other}`"
                )))
            }
            None => default_split(config),
        },
    };
    let estimator = match estimator {
        Some(e) => e,
        None => match config.file_value("estimator") {
            None | Some("mean") => EstimatorArg::Mean,
            Some("inverse_dissimilarity") => EstimatorArg::InverseDissimilarity,
            Some(other) => {
                return Err(CliError::Usage(format!(
                    "config file: unknown estimator `{other}`"
                )))
            }
        },
    };

    let schema = config.schema()?;
    let train_path = config.require(&config.train, "train")?;
    let train = load_csv(train_path, &schema)?;
    let queries = load_csv(config.split_path(split)?, &schema)?;
    let prep = Preprocessed::new(&train, &[queries], config.beta, config.floor)?;
    let queries = &prep.splits[0];

    let model = fit(&prep.train, config.k, prep.powed)?.with_estimator(estimator.into());
    let report = evaluate(&model, queries)?;

    let report_json = json!({
        "config": config,
        "params": {
            "k": config.k,
            "beta": config.beta,
            "floor": prep.floor,
            "estimator": estimator,
            "split": split,
        },
        "counts": { "train": origin_counts(&prep.train), "queries": queries.len() },
        "clamped_values": { "train": model.train_clamped(), "queries": model.query_clamped() },
        "mean": report.mean,
        "median": report.median,
        "p75": report.p75,
        "errors": report.errors,
    });
    write_json(&out_file(config, REPORT_JSON)?, &report_json)?;

    let cdf_path = out_file(config, CDF_CSV)?;
    let mut cdf = String::from("error_m,cum_prob\n");
    for (e, p) in cdf_points(&report) {
        cdf.push_str(&format!("{e},{p}\n"));
    }
    fs::write(&cdf_path, cdf).map_err(io_err(&cdf_path))?;

    println!(
        "{} queries: mean {:.1} m, median {:.1} m, p75 {:.1} m",
        report.len(),
        report.mean,
        report.median,
        report.p75
    );
    Ok(())
}

pub fn cmd_tune(config: &RunConfig, ks: Option<&str>) -> Result<(), CliError> {
    let ks = parse_ks(ks.or(config.file_value("ks")).unwrap_or("1..15"))?;
    let schema = config.schema()?;
    let train = load_csv(config.require(&config.train, "train")?, &schema)?;
    let validation = load_csv(config.require(&config.validation, "validation")?, &schema)?;
    let prep = Preprocessed::new(&train, &[validation], config.beta, config.floor)?;

    let rows = k_sweep(&prep.train, &prep.splits[0], &ks, prep.powed)?;

    let sweep_path = out_file(config, SWEEP_CSV)?;
    let mut file = fs::File::create(&sweep_path).map_err(io_err(&sweep_path))?;
    let mut text = String::from("k,mean_m,median_m\n");
    for r in &rows {
        text.push_str(&format!("{},{},{}\n", r.k, r.mean, r.median));
    }
    file.write_all(text.as_bytes())
        .map_err(io_err(&sweep_path))?;

    write_json(
        &out_file(config, TUNE_MANIFEST)?,
        &json!({
            "config": config,
            "ks": ks,
            "floor": prep.floor,
            "counts": { "train": origin_counts(&prep.train), "validation": prep.splits[0].len() },
            "rows": rows,
        }),
    )?;
    for r in &rows {
        println!(
            "k={:>3}  mean {:>8.1} m  median {:>8.1} m",
            r.k, r.mean, r.median
        );
    }
    Ok(())
}
