//! Labeled instance streams: LIBSVM I/O, synthetic generators and the
//! per-trial transforms (noise, normalization, shuffling).

use std::fmt::Write as _;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::norm_sq;
use crate::scalar::Scalar;

/// Smallest class count the learners accept.
pub const MIN_CLASSES: usize = 3;

/// Centers of the four-class synthetic problem.
pub const FOUR_CENTERS: [[f64; 2]; 4] = [[1.0, 1.0], [1.0, -1.0], [-1.0, 1.0], [-1.0, -1.0]];

/// One round of the online stream: a dense feature vector and its hidden label.
///
/// Labels are 0-based class indices.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance<T> {
    pub features: Vec<T>,
    pub label: usize,
}

impl<T: Scalar> Instance<T> {
    pub fn new(features: Vec<T>, label: usize) -> Self {
        Self { features, label }
    }

    pub fn norm(&self) -> T {
        norm_sq(&self.features).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset<T> {
    name: String,
    num_classes: usize,
    dimension: usize,
    instances: Vec<Instance<T>>,
}

impl<T: Scalar> Dataset<T> {
    /// Validates that every instance has `dimension` features and a label
    /// below `num_classes`, and that `num_classes >= 3`.
    pub fn new(
        name: impl Into<String>,
        num_classes: usize,
        dimension: usize,
        instances: Vec<Instance<T>>,
    ) -> Result<Self> {
        if num_classes < MIN_CLASSES {
            return Err(Error::TooFewClasses(num_classes));
        }
        for inst in &instances {
            if inst.features.len() != dimension {
                return Err(Error::DimensionMismatch {
                    expected: dimension,
                    found: inst.features.len(),
                });
            }
            if inst.label >= num_classes {
                return Err(Error::ClassOutOfRange {
                    class: inst.label,
                    num_classes,
                });
            }
        }
        Ok(Self {
            name: name.into(),
            num_classes,
            dimension,
            instances,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn instances(&self) -> &[Instance<T>] {
        &self.instances
    }

    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Keeps the first `n` instances.
    pub fn truncate(mut self, n: usize) -> Self {
        self.instances.truncate(n);
        self
    }

    /// Per-class instance counts, indexed by class.
    pub fn label_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.num_classes];
        for inst in &self.instances {
            counts[inst.label] += 1;
        }
        counts
    }

    /// Rebuilds the dataset from transformed instances, keeping name and class
    /// count; the dimension is taken from the new instances.
    pub fn map_instances<F>(&self, mut f: F) -> Result<Self>
    where
        F: FnMut(usize, &Instance<T>) -> Result<Instance<T>>,
    {
        let instances = self
            .instances
            .iter()
            .enumerate()
            .map(|(row, inst)| f(row, inst))
            .collect::<Result<Vec<_>>>()?;
        let dimension = instances
            .first()
            .map_or(self.dimension, |i| i.features.len());
        Dataset::new(self.name.clone(), self.num_classes, dimension, instances)
    }
}

/// Parses LIBSVM sparse text (`label idx:val idx:val ...`, 1-based indices).
///
/// The dense dimension is the largest index seen anywhere in the input.
/// Distinct raw labels are sorted numerically and mapped to `0..K`.
pub fn parse_libsvm<T: Scalar>(text: &str, num_classes: usize) -> Result<Dataset<T>> {
    if num_classes < MIN_CLASSES {
        return Err(Error::TooFewClasses(num_classes));
    }

    let mut raw_labels = Vec::new();
    let mut rows: Vec<Vec<(usize, T)>> = Vec::new();
    let mut dimension = 0;

    for (lineno, line) in text.lines().enumerate() {
        let line_no = lineno + 1;
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let label_tok = tokens.next().expect("non-empty line has a token");
        let label: f64 = label_tok.parse().map_err(|_| Error::Parse {
            line: line_no,
            msg: format!("bad label {label_tok:?}"),
        })?;
        if !label.is_finite() {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("bad label {label_tok:?}"),
            });
        }

        let mut row = Vec::new();
        for tok in tokens {
            let (idx, val) = tok.split_once(':').ok_or_else(|| Error::Parse {
                line: line_no,
                msg: format!("expected idx:val, got {tok:?}"),
            })?;
            let idx: i64 = idx.parse().map_err(|_| Error::Parse {
                line: line_no,
                msg: format!("bad feature index {idx:?}"),
            })?;
            if idx <= 0 {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("feature index must be positive, got {idx}"),
                });
            }
            let val: f64 = val.parse().map_err(|_| Error::Parse {
                line: line_no,
                msg: format!("bad feature value {val:?}"),
            })?;
            let idx = idx as usize;
            dimension = dimension.max(idx);
            row.push((idx - 1, T::lit(val)));
        }
        raw_labels.push(label);
        rows.push(row);
    }

    let mut distinct = raw_labels.clone();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() > num_classes {
        return Err(Error::LabelCardinality {
            found: distinct.len(),
            expected: num_classes,
        });
    }

    let instances = rows
        .into_iter()
        .zip(raw_labels)
        .map(|(row, raw)| {
            let mut features = vec![T::zero(); dimension];
            for (j, v) in row {
                features[j] = v;
            }
            let label = distinct
                .binary_search_by(|probe| probe.total_cmp(&raw))
                .expect("label present in distinct set");
            Instance::new(features, label)
        })
        .collect();

    Dataset::new("libsvm", num_classes, dimension, instances)
}

/// Reads a LIBSVM file; the dataset is named after the file.
pub fn load_libsvm<T: Scalar>(path: impl AsRef<Path>, num_classes: usize) -> Result<Dataset<T>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "libsvm".to_string());
    Ok(parse_libsvm(&text, num_classes)?.with_name(name))
}

/// Writes the dataset back as LIBSVM text, labels as `class + 1`, zeros omitted.
pub fn to_libsvm<T: Scalar>(ds: &Dataset<T>) -> String {
    let mut out = String::new();
    for inst in ds.instances() {
        write!(out, "{}", inst.label + 1).unwrap();
        for (j, v) in inst.features.iter().enumerate() {
            if !v.is_zero() {
                write!(out, " {}:{}", j + 1, v).unwrap();
            }
        }
        out.push('\n');
    }
    out
}

/// Scales every feature vector to unit Euclidean norm.
pub fn normalize<T: Scalar>(ds: &Dataset<T>) -> Result<Dataset<T>> {
    ds.map_instances(|row, inst| {
        let norm = inst.norm();
        if norm.is_zero() {
            return Err(Error::DegenerateInstance { row });
        }
        let features = inst.features.iter().map(|&v| v / norm).collect();
        Ok(Instance::new(features, inst.label))
    })
}

/// Isotropic Gaussian blobs: `n_per_class` samples around each center, with
/// per-axis standard deviation `sigma`. Instances come out grouped by class.
pub fn gen_gaussian_blobs<T: Scalar>(
    name: &str,
    centers: &[Vec<f64>],
    n_per_class: usize,
    sigma: f64,
    seed: u64,
) -> Result<Dataset<T>> {
    if !(sigma > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "sigma must be positive, got {sigma}"
        )));
    }
    let dimension = centers.first().map_or(0, Vec::len);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut instances = Vec::with_capacity(centers.len() * n_per_class);
    for (class, center) in centers.iter().enumerate() {
        if center.len() != dimension {
            return Err(Error::DimensionMismatch {
                expected: dimension,
                found: center.len(),
            });
        }
        for _ in 0..n_per_class {
            let features = center
                .iter()
                .map(|&c| {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    T::lit(c + sigma * z)
                })
                .collect();
            instances.push(Instance::new(features, class));
        }
    }
    Dataset::new(name, centers.len(), dimension, instances)
}

/// The four-class 2-d problem with centers (1,1), (1,-1), (-1,1), (-1,-1).
/// Not normalized.
pub fn gen_four_gaussians<T: Scalar>(
    n_per_class: usize,
    sigma: f64,
    seed: u64,
) -> Result<Dataset<T>> {
    let centers: Vec<Vec<f64>> = FOUR_CENTERS.iter().map(|c| c.to_vec()).collect();
    gen_gaussian_blobs("four-gaussians", &centers, n_per_class, sigma, seed)
}

/// Adds independent N(0, sigma^2) noise to every feature.
pub fn add_feature_noise<T: Scalar>(ds: &Dataset<T>, sigma: f64, seed: u64) -> Result<Dataset<T>> {
    if !(sigma >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "sigma must be nonnegative, got {sigma}"
        )));
    }
    if sigma == 0.0 {
        return Ok(ds.clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ds.map_instances(|_, inst| {
        let features = inst
            .features
            .iter()
            .map(|&v| {
                let z: f64 = StandardNormal.sample(&mut rng);
                v + T::lit(sigma * z)
            })
            .collect();
        Ok(Instance::new(features, inst.label))
    })
}

/// Deterministic permutation of the instances.
pub fn shuffle<T: Scalar>(ds: &Dataset<T>, seed: u64) -> Dataset<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = ds.clone();
    out.instances.shuffle(&mut rng);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ds(rows: &[(&[f64], usize)], k: usize) -> Dataset<f64> {
        let d = rows[0].0.len();
        let inst = rows
            .iter()
            .map(|(f, l)| Instance::new(f.to_vec(), *l))
            .collect();
        Dataset::new("t", k, d, inst).unwrap()
    }

    #[test]
    fn parse_rejects_binary_class_count() {
        let err = parse_libsvm::<f64>("1 1:0.5 3:0.5\n2 2:1.0", 2).unwrap_err();
        assert!(matches!(err, Error::TooFewClasses(2)));
    }

    #[test]
    fn parse_identity_remap() {
        let ds = parse_libsvm::<f64>("3 1:1.0\n1 2:1.0\n2 3:1.0", 3).unwrap();
        assert_eq!(ds.dimension(), 3);
        let labels: Vec<_> = ds.instances().iter().map(|i| i.label + 1).collect();
        assert_eq!(labels, vec![3, 1, 2]);
        assert_eq!(ds.instances()[1].features, vec![0.0, 1.0, 0.0]);
    }

    #[test]
    fn parse_remaps_sorted_raw_labels() {
        let ds = parse_libsvm::<f64>("10 1:1\n-1 1:2\n4 2:1\n10 1:3", 3).unwrap();
        let labels: Vec<_> = ds.instances().iter().map(|i| i.label).collect();
        assert_eq!(labels, vec![2, 0, 1, 2]);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        match parse_libsvm::<f64>("1 1:1\n2 0:1\n3 1:1", 3) {
            Err(Error::Parse { line: 2, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        match parse_libsvm::<f64>("1 1:1\n\n2 1:x", 3) {
            Err(Error::Parse { line: 3, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            parse_libsvm::<f64>("a 1:1", 3),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_libsvm::<f64>("1 1-1", 3),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn parse_rejects_too_many_labels() {
        let err = parse_libsvm::<f64>("1 1:1\n2 1:1\n3 1:1\n4 1:1", 3).unwrap_err();
        assert!(matches!(
            err,
            Error::LabelCardinality {
                found: 4,
                expected: 3
            }
        ));
    }

    #[test]
    fn normalize_examples() {
        let n = normalize(&ds(&[(&[3.0, 4.0], 0)], 3)).unwrap();
        assert_eq!(n.instances()[0].features, vec![0.6, 0.8]);

        let n = normalize(&ds(&[(&[1.0, 1.0, 1.0, 1.0], 0)], 3)).unwrap();
        assert_eq!(n.instances()[0].features, vec![0.5; 4]);

        let unit = ds(&[(&[0.6, 0.8], 1)], 3);
        let n = normalize(&unit).unwrap();
        for (a, b) in n.instances()[0]
            .features
            .iter()
            .zip(&unit.instances()[0].features)
        {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn normalize_names_the_zero_row() {
        let err = normalize(&ds(&[(&[1.0, 0.0], 0), (&[0.0, 0.0], 1)], 3)).unwrap_err();
        assert!(matches!(err, Error::DegenerateInstance { row: 1 }));
    }

    #[test]
    fn four_gaussians_degenerate_sigma() {
        let ds = gen_four_gaussians::<f64>(50, 1e-9, 3).unwrap();
        assert_eq!(ds.label_counts(), vec![50; 4]);
        for inst in ds.instances().iter().filter(|i| i.label == 0) {
            assert!((inst.features[0] - 1.0).abs() < 1e-6);
            assert!((inst.features[1] - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn four_gaussians_class_means() {
        let ds = gen_four_gaussians::<f64>(1000, 0.5, 11).unwrap();
        for (class, center) in FOUR_CENTERS.iter().enumerate() {
            let pts: Vec<_> = ds.instances().iter().filter(|i| i.label == class).collect();
            for axis in 0..2 {
                let mean = pts.iter().map(|i| i.features[axis]).sum::<f64>() / pts.len() as f64;
                assert!(
                    (mean - center[axis]).abs() < 0.1,
                    "class {class} axis {axis}: {mean}"
                );
            }
        }
    }

    #[test]
    fn generators_are_deterministic() {
        let a = gen_four_gaussians::<f64>(20, 0.3, 7).unwrap();
        let b = gen_four_gaussians::<f64>(20, 0.3, 7).unwrap();
        assert_eq!(a, b);
        assert_eq!(
            add_feature_noise(&a, 0.2, 5).unwrap(),
            add_feature_noise(&b, 0.2, 5).unwrap()
        );
        assert_eq!(shuffle(&a, 9), shuffle(&b, 9));
    }

    #[test]
    fn gen_rejects_nonpositive_sigma() {
        assert!(gen_four_gaussians::<f64>(10, 0.0, 1).is_err());
    }

    #[test]
    fn zero_noise_is_identity() {
        let a = gen_four_gaussians::<f64>(10, 0.3, 1).unwrap();
        assert_eq!(add_feature_noise(&a, 0.0, 42).unwrap(), a);
    }

    #[test]
    fn noise_magnitude_matches_folded_normal_mean() {
        let zeros = (0..7494)
            .map(|i| Instance::new(vec![0.0; 16], i % 10))
            .collect();
        let base = Dataset::new("zeros", 10, 16, zeros).unwrap();
        let noisy = add_feature_noise(&base, 1.0, 2024).unwrap();
        let total: f64 = noisy
            .instances()
            .iter()
            .flat_map(|i| i.features.iter().map(|v: &f64| v.abs()))
            .sum();
        let mean = total / (7494.0 * 16.0);
        let expected = (2.0 / std::f64::consts::PI).sqrt();
        assert!((mean - expected).abs() < 0.02, "{mean}");
    }

    #[test]
    fn shuffle_edge_cases() {
        let one = ds(&[(&[1.0, 2.0], 2)], 3);
        assert_eq!(shuffle(&one, 123), one);

        let many = gen_four_gaussians::<f64>(25, 0.5, 4).unwrap();
        let a = shuffle(&many, 1);
        let b = shuffle(&many, 2);
        // Equal orders for two seeds on 100 items would be a 1/100! event.
        assert_ne!(
            a, b,
            "seeds 1 and 2 produced the same permutation; rerun with other seeds"
        );
        assert_eq!(a.label_counts(), many.label_counts());
    }

    #[test]
    fn libsvm_round_trip() {
        let ds = gen_four_gaussians::<f64>(5, 0.4, 8).unwrap();
        let back = parse_libsvm::<f64>(&to_libsvm(&ds), 4).unwrap();
        assert_eq!(back.instances(), ds.instances());
    }
}
