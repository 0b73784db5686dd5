//! The partial-feedback protocol shared by every learner.
//!
//! Each round the learner sees a feature vector, proposes one class and is
//! told only whether that proposal was right. The true label never crosses
//! the [`Feedback`] boundary.

use crate::error::Result;
use crate::scalar::Scalar;
use crate::scoring::WeightMatrix;

/// Answers "is the proposed class correct?" for the current round.
pub trait Feedback {
    fn is_correct(&mut self, proposed: usize) -> bool;
}

/// Feedback backed by a known label, as used when replaying a labeled dataset.
#[derive(Debug, Clone, Copy)]
pub struct LabelOracle {
    label: usize,
}

impl LabelOracle {
    pub fn new(label: usize) -> Self {
        Self { label }
    }
}

impl Feedback for LabelOracle {
    fn is_correct(&mut self, proposed: usize) -> bool {
        proposed == self.label
    }
}

impl<F: FnMut(usize) -> bool> Feedback for F {
    fn is_correct(&mut self, proposed: usize) -> bool {
        self(proposed)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UpdateKind {
    /// Wrong proposal: the proposed class is treated as a complementary label.
    Complementary,
    /// Correct proposal with positive margin loss: support-class update.
    Spa,
    None,
}

/// Record of one round.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome<T> {
    pub predicted: usize,
    pub proposed: usize,
    pub correct: bool,
    pub loss: T,
    pub update_kind: UpdateKind,
    pub support_size: usize,
}

pub trait OnlineLearner<T: Scalar> {
    fn step(&mut self, x: &[T], feedback: &mut dyn Feedback) -> Result<StepOutcome<T>>;

    fn weights(&self) -> &WeightMatrix<T>;

    fn name(&self) -> &'static str;
}
