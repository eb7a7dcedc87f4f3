mod common;

use proxyfaug_core::{
    augment_dataset, bray_curtis, evaluate, fit, load_csv, powed_transform, write_csv,
    AugmentationParams, Fingerprint, FingerprintDataset, GeoPoint, Origin, PowedConfig,
    Preprocessed, Schema,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{random_layout, sparse_rssi, FLOOR};

fn powed() -> PowedConfig {
    PowedConfig::new(2.6, FLOOR).unwrap()
}

#[test]
fn predict_matches_brute_force_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let train = random_layout(&mut rng, 50, 20, 2000.0);
    let model = fit(&train, 6, powed()).unwrap();
    let rows: Vec<Vec<f64>> = train
        .iter()
        .map(|f| {
            f.rssi
                .iter()
                .map(|&v| powed_transform(v, &powed()))
                .collect()
        })
        .collect();

    for _ in 0..50 {
        let q = Fingerprint::new(sparse_rssi(&mut rng, 20), GeoPoint { lat: 0.0, lon: 0.0 });
        let tq: Vec<f64> = q
            .rssi
            .iter()
            .map(|&v| powed_transform(v, &powed()))
            .collect();
        let mut scored: Vec<(f64, usize)> = rows
            .iter()
            .enumerate()
            .map(|(i, r)| (bray_curtis(&tq, r).unwrap(), i))
            .collect();
        scored.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let (mut lat, mut lon) = (0.0, 0.0);
        for &(_, i) in &scored[..6] {
            lat += train.fingerprints()[i].location.lat;
            lon += train.fingerprints()[i].location.lon;
        }
        assert_eq!(
            model.predict(&q).unwrap(),
            GeoPoint {
                lat: lat / 6.0,
                lon: lon / 6.0
            }
        );
    }
}

#[test]
fn batch_prediction_equals_sequential() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let train = random_layout(&mut rng, 400, 84, 3000.0);
    let queries = random_layout(&mut rng, 500, 84, 3000.0);
    let model = fit(&train, 6, powed()).unwrap();
    let sequential: Vec<GeoPoint> = queries.iter().map(|q| model.predict(q).unwrap()).collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(4)
        .build()
        .unwrap();
    assert_eq!(
        pool.install(|| model.predict_batch(&queries)).unwrap(),
        sequential
    );

    let one = FingerprintDataset::new(
        queries.basestation_ids().to_vec(),
        vec![queries.fingerprints()[0].clone()],
        -200.0,
    )
    .unwrap();
    assert_eq!(model.predict_batch(&one).unwrap(), vec![sequential[0]]);
}

#[test]
fn augment_write_load_evaluate() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    // raw data with sentinels; floor must come from the training set
    let raw = |rng: &mut ChaCha8Rng, m| {
        let ds = random_layout(rng, m, 30, 300.0);
        let fps = ds
            .iter()
            .map(|f| Fingerprint {
                rssi: f
                    .rssi
                    .iter()
                    .map(|&v| if v == FLOOR { -200.0 } else { v })
                    .collect(),
                ..f.clone()
            })
            .collect();
        FingerprintDataset::new(ds.basestation_ids().to_vec(), fps, -200.0).unwrap()
    };
    let train = raw(&mut rng, 300);
    let test = raw(&mut rng, 60);

    let prep = Preprocessed::new(&train, &[test], 2.6, None).unwrap();
    assert!(prep.floor >= FLOOR);
    assert!(prep
        .train
        .iter()
        .all(|f| f.rssi.iter().all(|&v| v >= prep.floor)));

    let params = AugmentationParams {
        seed: 4,
        ..Default::default()
    };
    let aug = augment_dataset(&prep.train, &params).unwrap();
    assert_eq!(&aug.fingerprints()[..300], prep.train.fingerprints());
    assert!(aug.len() > 300);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("aug.csv");
    write_csv(&aug, &path).unwrap();
    let back = load_csv(&path, &Schema::default()).unwrap();
    assert_eq!(back.len(), aug.len());
    assert_eq!(
        back.iter()
            .filter(|f| f.origin == Origin::Augmented)
            .count(),
        aug.len() - 300
    );

    let base = evaluate(&fit(&prep.train, 6, prep.powed).unwrap(), &prep.splits[0]).unwrap();
    let augmented = evaluate(&fit(&back, 6, prep.powed).unwrap(), &prep.splits[0]).unwrap();
    assert_eq!(base.len(), 60);
    assert_eq!(augmented.len(), 60);
    assert!(base.mean.is_finite() && augmented.mean.is_finite());
}

#[test]
fn augmented_offspring_never_leave_parent_bounds_in_dbm() {
    // Fig. 1 style parents: shared, exclusive and differing basestations.
    let a = Fingerprint::new(
        vec![-80.0, -90.0, -100.0, FLOOR, -71.0, -95.0, FLOOR, FLOOR],
        GeoPoint {
            lat: 46.0,
            lon: 6.0,
        },
    );
    let b = Fingerprint::new(
        vec![-80.0, FLOOR, -100.0, -85.0, -78.0, -99.0, FLOOR, FLOOR],
        common::offset(46.0, 6.0, 8.0, 0.0),
    );
    let ds = FingerprintDataset::new(
        (1..=8).map(|i| format!("BS{i}")).collect(),
        vec![a.clone(), b.clone()],
        -200.0,
    )
    .unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..20 {
        let params = AugmentationParams {
            seed: rng.random(),
            ..Default::default()
        };
        let out = augment_dataset(&ds, &params).unwrap();
        assert_eq!(out.len(), 18);
        for g in &out.fingerprints()[2..] {
            for i in 0..8 {
                let (lo, hi) = (a.rssi[i].min(b.rssi[i]), a.rssi[i].max(b.rssi[i]));
                assert!((lo..=hi).contains(&g.rssi[i]));
            }
            assert_eq!(g.rssi[0], -80.0);
            assert_eq!(g.rssi[6], FLOOR);
        }
    }
}
