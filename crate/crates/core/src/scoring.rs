//! Linear class scores, argmax prediction and the Gaussian-kernel feature map.

use crate::data::{Dataset, Instance};
use crate::error::{Error, Result};
use crate::linalg::{axpy, dot, norm_sq, sq_dist};
use crate::scalar::Scalar;

/// `K` weight vectors of dimension `d`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMatrix<T> {
    num_classes: usize,
    dimension: usize,
    data: Vec<T>,
}

impl<T: Scalar> WeightMatrix<T> {
    pub fn zeros(num_classes: usize, dimension: usize) -> Self {
        Self {
            num_classes,
            dimension,
            data: vec![T::zero(); num_classes * dimension],
        }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let dimension = rows.first().map_or(0, Vec::len);
        let num_classes = rows.len();
        let mut data = Vec::with_capacity(num_classes * dimension);
        for row in rows {
            if row.len() != dimension {
                return Err(Error::DimensionMismatch {
                    expected: dimension,
                    found: row.len(),
                });
            }
            data.extend(row);
        }
        Ok(Self {
            num_classes,
            dimension,
            data,
        })
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn row(&self, class: usize) -> &[T] {
        &self.data[class * self.dimension..(class + 1) * self.dimension]
    }

    pub fn row_mut(&mut self, class: usize) -> &mut [T] {
        &mut self.data[class * self.dimension..(class + 1) * self.dimension]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[T]> {
        self.data
            .chunks_exact(self.dimension.max(1))
            .take(self.num_classes)
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    /// `w_class += coef * x`
    pub fn add_scaled(&mut self, class: usize, coef: T, x: &[T]) {
        axpy(coef, x, self.row_mut(class));
    }

    /// `self += other`, entry-wise.
    pub fn add_assign(&mut self, other: &WeightMatrix<T>) -> Result<()> {
        self.check_shape(other)?;
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a = *a + b;
        }
        Ok(())
    }

    /// Sum of the `K` rows.
    pub fn row_sum(&self) -> Vec<T> {
        let mut sum = vec![T::zero(); self.dimension];
        for row in self.rows() {
            axpy(T::one(), row, &mut sum);
        }
        sum
    }

    /// `sum_i ||w_i||^2`
    pub fn frobenius_sq(&self) -> T {
        norm_sq(&self.data)
    }

    /// `sum_i ||w_i - v_i||^2`
    pub fn distance_sq(&self, other: &WeightMatrix<T>) -> Result<T> {
        self.check_shape(other)?;
        Ok(sq_dist(&self.data, &other.data))
    }

    pub fn scale(&self, factor: T) -> Self {
        Self {
            num_classes: self.num_classes,
            dimension: self.dimension,
            data: self.data.iter().map(|&v| v * factor).collect(),
        }
    }

    pub fn check_input(&self, x: &[T]) -> Result<()> {
        if x.len() != self.dimension {
            return Err(Error::DimensionMismatch {
                expected: self.dimension,
                found: x.len(),
            });
        }
        Ok(())
    }

    pub fn check_class(&self, class: usize) -> Result<()> {
        if class >= self.num_classes {
            return Err(Error::ClassOutOfRange {
                class,
                num_classes: self.num_classes,
            });
        }
        Ok(())
    }

    fn check_shape(&self, other: &WeightMatrix<T>) -> Result<()> {
        if self.num_classes != other.num_classes || self.dimension != other.dimension {
            return Err(Error::DimensionMismatch {
                expected: self.data.len(),
                found: other.data.len(),
            });
        }
        Ok(())
    }

    /// `w_i . x` for every class.
    pub fn scores(&self, x: &[T]) -> Result<Vec<T>> {
        self.check_input(x)?;
        Ok(self.rows().map(|row| dot(row, x)).collect())
    }

    /// Highest-scoring class; ties go to the lowest index.
    pub fn predict(&self, x: &[T]) -> Result<usize> {
        Ok(argmax(&self.scores(x)?))
    }
}

/// Index of the maximum, lowest index on ties. Empty input yields 0.
pub fn argmax<T: Scalar>(values: &[T]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// Explicit feature map over a fixed support set:
/// `x -> (exp(-||x - b_j||^2 / g))_j`, rescaled to unit norm.
#[derive(Debug, Clone)]
pub struct KernelExpander<T> {
    support: Vec<Vec<T>>,
    bandwidth: T,
}

impl<T: Scalar> KernelExpander<T> {
    pub fn new(support: Vec<Vec<T>>, bandwidth: T) -> Result<Self> {
        if support.is_empty() {
            return Err(Error::EmptySupportSet);
        }
        if !(bandwidth > T::zero()) || !bandwidth.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "kernel bandwidth must be positive, got {bandwidth}"
            )));
        }
        let d = support[0].len();
        if let Some(bad) = support.iter().find(|s| s.len() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: bad.len(),
            });
        }
        Ok(Self { support, bandwidth })
    }

    /// Uses the first `size` instances of `ds` (fewer if `ds` is shorter).
    pub fn from_prefix(ds: &Dataset<T>, size: usize, bandwidth: T) -> Result<Self> {
        let support = ds
            .instances()
            .iter()
            .take(size)
            .map(|inst| inst.features.clone())
            .collect();
        Self::new(support, bandwidth)
    }

    pub fn support_size(&self) -> usize {
        self.support.len()
    }

    pub fn bandwidth(&self) -> T {
        self.bandwidth
    }

    fn check_input(&self, x: &[T]) -> Result<()> {
        let d = self.support[0].len();
        if x.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: x.len(),
            });
        }
        Ok(())
    }

    /// Raw kernel evaluations `k(x, b_j)`, before any rescaling.
    pub fn kernel_values(&self, x: &[T]) -> Result<Vec<T>> {
        self.check_input(x)?;
        Ok(self
            .support
            .iter()
            .map(|b| (-sq_dist(x, b) / self.bandwidth).exp())
            .collect())
    }

    /// Unit-norm expanded vector of length `|B|`.
    pub fn expand(&self, x: &[T]) -> Result<Vec<T>> {
        self.check_input(x)?;
        let dists: Vec<T> = self.support.iter().map(|b| sq_dist(x, b)).collect();
        // Shifting by the nearest distance rescales every entry by the same
        // factor, which the renormalization removes; the largest entry is 1,
        // so nothing underflows to an all-zero vector.
        let nearest = dists.iter().copied().fold(T::infinity(), T::min);
        let mut out: Vec<T> = dists
            .iter()
            .map(|&d| (-(d - nearest) / self.bandwidth).exp())
            .collect();
        let norm = norm_sq(&out).sqrt();
        for v in &mut out {
            *v = *v / norm;
        }
        Ok(out)
    }

    pub fn expand_dataset(&self, ds: &Dataset<T>) -> Result<Dataset<T>> {
        ds.map_instances(|_, inst| Ok(Instance::new(self.expand(&inst.features)?, inst.label)))
    }
}
