//! Banditron: an epsilon-greedy perceptron for bandit feedback, used as the
//! comparison baseline.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::learner::{Feedback, OnlineLearner, StepOutcome, UpdateKind};
use crate::linalg::norm_sq;
use crate::scalar::Scalar;
use crate::scoring::{argmax, WeightMatrix};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BanditronConfig<T> {
    gamma: T,
    num_classes: usize,
    seed: u64,
}

impl<T: Scalar> BanditronConfig<T> {
    /// `gamma` is the exploration rate, in `[0, 1)`.
    pub fn new(gamma: T, num_classes: usize, seed: u64) -> Result<Self> {
        if !(gamma >= T::zero() && gamma < T::one()) {
            return Err(Error::InvalidParameter(format!(
                "gamma must be in [0, 1), got {gamma}"
            )));
        }
        if num_classes < 2 {
            return Err(Error::InvalidParameter(format!(
                "need at least 2 classes, got {num_classes}"
            )));
        }
        Ok(Self {
            gamma,
            num_classes,
            seed,
        })
    }

    pub fn gamma(&self) -> T {
        self.gamma
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

/// `P(i) = (1 - gamma) [i == predicted] + gamma / K`
pub fn sampling_distribution<T: Scalar>(predicted: usize, gamma: T, num_classes: usize) -> Vec<T> {
    let floor = gamma / T::from_count(num_classes);
    (0..num_classes)
        .map(|i| {
            if i == predicted {
                T::one() - gamma + floor
            } else {
                floor
            }
        })
        .collect()
}

/// The update matrix for one round: row `r` is
/// `x * ([correct][r == proposed] / P(proposed) - [r == predicted])`.
pub fn banditron_update<T: Scalar>(
    x: &[T],
    predicted: usize,
    proposed: usize,
    correct: bool,
    probs: &[T],
) -> WeightMatrix<T> {
    let mut u = WeightMatrix::zeros(probs.len(), x.len());
    if correct {
        u.add_scaled(proposed, T::one() / probs[proposed], x);
    }
    u.add_scaled(predicted, -T::one(), x);
    u
}

#[derive(Debug, Clone)]
pub struct Banditron<T> {
    weights: WeightMatrix<T>,
    config: BanditronConfig<T>,
    rng: ChaCha8Rng,
}

impl<T: Scalar> Banditron<T> {
    pub fn new(config: BanditronConfig<T>, dimension: usize) -> Self {
        Self {
            weights: WeightMatrix::zeros(config.num_classes(), dimension),
            rng: ChaCha8Rng::seed_from_u64(config.seed()),
            config,
        }
    }

    pub fn config(&self) -> &BanditronConfig<T> {
        &self.config
    }

    fn sample(&mut self, probs: &[T]) -> usize {
        let u: f64 = self.rng.random();
        let mut acc = 0.0;
        for (i, p) in probs.iter().enumerate() {
            acc += p.to_f64().expect("finite probability");
            if u < acc {
                return i;
            }
        }
        probs.len() - 1
    }
}

impl<T: Scalar> OnlineLearner<T> for Banditron<T> {
    fn step(&mut self, x: &[T], feedback: &mut dyn Feedback) -> Result<StepOutcome<T>> {
        if norm_sq(x).is_zero() {
            return Err(Error::ZeroVector);
        }
        let predicted = argmax(&self.weights.scores(x)?);
        let probs =
            sampling_distribution(predicted, self.config.gamma(), self.config.num_classes());
        let proposed = self.sample(&probs);
        let correct = feedback.is_correct(proposed);

        if correct {
            self.weights
                .add_scaled(proposed, T::one() / probs[proposed], x);
        }
        self.weights.add_scaled(predicted, -T::one(), x);

        Ok(StepOutcome {
            predicted,
            proposed,
            correct,
            loss: T::zero(),
            update_kind: UpdateKind::None,
            support_size: 0,
        })
    }

    fn weights(&self) -> &WeightMatrix<T> {
        &self.weights
    }

    fn name(&self) -> &'static str {
        "banditron"
    }
}
