use std::path::PathBuf;

use cspa_core::data::{add_feature_noise, load_libsvm, normalize, parse_libsvm};
use cspa_core::Dataset;

fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

fn load(name: &str, k: usize) -> Option<Dataset> {
    let path = data_dir().join(name);
    if !path.exists() {
        eprintln!("skipping: {} not present", path.display());
        return None;
    }
    Some(load_libsvm(path, k).unwrap())
}

#[test]
fn pendigits_head() {
    let Some(ds) = load("pendigits", 10) else {
        return;
    };
    assert_eq!(ds.len(), 7494);
    assert_eq!(ds.dimension(), 16);
    assert_eq!(ds.name(), "pendigits");
    let text = std::fs::read_to_string(data_dir().join("pendigits")).unwrap();
    let head: String = text.lines().take(3).map(|l| format!("{l}\n")).collect();
    let first: Vec<usize> = head
        .lines()
        .map(|l| {
            l.split_whitespace()
                .next()
                .unwrap()
                .parse::<usize>()
                .unwrap()
        })
        .collect();
    let three = parse_libsvm::<f64>(&head, 10).unwrap();
    assert_eq!(three.len(), 3);
    for (inst, raw) in ds.instances().iter().zip(&first) {
        assert!(inst.label < 10);
        // pendigits labels are the digits 0..9
        assert_eq!(inst.label, *raw);
    }
    assert!(ds.label_counts().iter().all(|&c| c > 600));
}

#[test]
fn bundled_files_have_expected_shapes() {
    for (name, k, n, d) in [
        ("vehicle.scale", 4, 846, 18),
        ("segment.scale", 7, 2310, 19),
        ("vowel.scale", 11, 528, 10),
    ] {
        let Some(ds) = load(name, k) else { continue };
        assert_eq!((ds.len(), ds.dimension()), (n, d), "{name}");
        assert!(ds.label_counts().iter().all(|&c| c > 0), "{name}");
        let unit = normalize(&ds).unwrap();
        assert!(unit
            .instances()
            .iter()
            .all(|i| (i.norm() - 1.0).abs() < 1e-9));
    }
}

#[test]
fn noise_on_pendigits_has_folded_normal_mean() {
    let Some(ds) = load("pendigits", 10) else {
        return;
    };
    let noisy = add_feature_noise(&ds, 1.0, 4).unwrap();
    let mut total = 0.0;
    let mut count = 0usize;
    for (a, b) in ds.instances().iter().zip(noisy.instances()) {
        for (p, q) in a.features.iter().zip(&b.features) {
            total += (p - q).abs();
            count += 1;
        }
    }
    let mean = total / count as f64;
    assert!(
        (mean - (2.0 / std::f64::consts::PI).sqrt()).abs() < 0.02,
        "{mean}"
    );
}
