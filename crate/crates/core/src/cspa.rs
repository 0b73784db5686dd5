//! Complementary support-class passive-aggressive learner (CSPA).
//!
//! A deterministic learner for bandit feedback: it always proposes its
//! argmax prediction. A wrong proposal is a complementary label, and the
//! update pushes that class down by the minimal change that shrinks its
//! margin over the runner-up by a factor `1 - beta`, leaving every other
//! pairwise margin untouched. A correct proposal runs the support-class
//! passive-aggressive update against the remaining classes.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::learner::{Feedback, OnlineLearner, StepOutcome, UpdateKind};
use crate::linalg::norm_sq;
use crate::scalar::Scalar;
use crate::scoring::{argmax, WeightMatrix};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CspaConfig<T> {
    beta: T,
    num_classes: usize,
}

impl<T: Scalar> CspaConfig<T> {
    /// `beta` must lie in `(0, 1]`.
    pub fn new(beta: T, num_classes: usize) -> Result<Self> {
        if !(beta > T::zero() && beta <= T::one()) {
            return Err(Error::InvalidParameter(format!(
                "beta must be in (0, 1], got {beta}"
            )));
        }
        if num_classes < 2 {
            return Err(Error::InvalidParameter(format!(
                "need at least 2 classes, got {num_classes}"
            )));
        }
        Ok(Self { beta, num_classes })
    }

    /// The step size for which the cumulative loss bound holds against a
    /// comparator with score spread `alpha`: `(1 - alpha) / (K - 1)`.
    pub fn theory_beta(alpha: T, num_classes: usize) -> T {
        (T::one() - alpha) / T::from_count(num_classes - 1)
    }

    pub fn beta(&self) -> T {
        self.beta
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }
}

/// Minimum over `i != proposed` of `1 - w_i.x + w_proposed.x`.
pub fn complementary_loss<T: Scalar>(w: &WeightMatrix<T>, x: &[T], proposed: usize) -> Result<T> {
    w.check_class(proposed)?;
    if w.num_classes() < 2 {
        return Err(Error::InvalidParameter(
            "complementary loss needs K >= 2".into(),
        ));
    }
    let scores = w.scores(x)?;
    Ok(complementary_loss_from_scores(&scores, proposed))
}

fn complementary_loss_from_scores<T: Scalar>(scores: &[T], proposed: usize) -> T {
    let runner_up = scores
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != proposed)
        .map(|(_, &s)| s)
        .fold(T::neg_infinity(), T::max);
    // 1 + (s_p - s_max) is >= 1 exactly whenever proposed is the argmax.
    T::one() + (scores[proposed] - runner_up)
}

/// Closed-form complementary-label update. Every class other than `proposed`
/// moves by `+beta*l/(K ||x||^2) x`, the proposed class by
/// `-(K-1)*beta*l/(K ||x||^2) x`. Returns the pre-update loss `l`; no change
/// is made when `l <= 0`.
pub fn complementary_update<T: Scalar>(
    w: &mut WeightMatrix<T>,
    x: &[T],
    proposed: usize,
    beta: T,
) -> Result<T> {
    let loss = complementary_loss(w, x, proposed)?;
    apply_complementary(w, x, proposed, beta, loss)?;
    Ok(loss)
}

fn apply_complementary<T: Scalar>(
    w: &mut WeightMatrix<T>,
    x: &[T],
    proposed: usize,
    beta: T,
    loss: T,
) -> Result<()> {
    let xx = norm_sq(x);
    if xx.is_zero() {
        return Err(Error::ZeroVector);
    }
    if loss <= T::zero() {
        return Ok(());
    }
    let k = T::from_count(w.num_classes());
    let tau = beta * loss / (k * xx);
    let tau_proposed = -(k - T::one()) * tau;
    for class in 0..w.num_classes() {
        let coef = if class == proposed { tau_proposed } else { tau };
        w.add_scaled(class, coef, x);
    }
    Ok(())
}

/// Hinge losses of the competing classes against the correct class.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaLosses<T> {
    /// `(class, max(1 + w_class.x - w_correct.x, 0))` for every class except
    /// the correct one, in class order.
    pub per_class: Vec<(usize, T)>,
    /// Largest entry of `per_class`.
    pub max: T,
}

pub fn spa_losses<T: Scalar>(w: &WeightMatrix<T>, x: &[T], correct: usize) -> Result<SpaLosses<T>> {
    w.check_class(correct)?;
    let scores = w.scores(x)?;
    Ok(spa_losses_from_scores(&scores, correct))
}

fn spa_losses_from_scores<T: Scalar>(scores: &[T], correct: usize) -> SpaLosses<T> {
    let per_class: Vec<(usize, T)> = scores
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != correct)
        .map(|(i, &s)| (i, (T::one() + (s - scores[correct])).max(T::zero())))
        .collect();
    let max = per_class.iter().map(|&(_, l)| l).fold(T::zero(), T::max);
    SpaLosses { per_class, max }
}

/// Support classes: with losses sorted descending as `sigma(1), sigma(2), ...`
/// (ties by ascending class), `sigma(k)` belongs to the set iff
/// `sum_{j<k} l_sigma(j) < k * l_sigma(k)`.
///
/// The predicate fails for every later `k` once it fails, so the scan stops at
/// the first failure. Returned classes are in sorted order.
pub fn support_set<T: Scalar>(losses: &[(usize, T)]) -> Vec<usize> {
    let mut order: Vec<(usize, T)> = losses.to_vec();
    order.sort_by(|a, b| {
        b.1.partial_cmp(&a.1)
            .unwrap_or(Ordering::Equal)
            .then(a.0.cmp(&b.0))
    });

    let mut prefix = T::zero();
    let mut support = Vec::new();
    for (k, &(class, loss)) in order.iter().enumerate() {
        if prefix < T::from_count(k + 1) * loss {
            support.push(class);
            prefix = prefix + loss;
        } else {
            break;
        }
    }
    support
}

/// Summary of one support-class update.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpaStep<T> {
    pub loss: T,
    pub support_size: usize,
}

/// Support-class passive-aggressive update for a correctly labeled round.
///
/// With `A = sum_{j in S} l_j / (|S| + 1)`, the correct class moves by
/// `+A/||x||^2 x` and each support class by `-(l_i - A)/||x||^2 x`, which
/// zeroes every support-class hinge loss. No-op when all losses are zero.
pub fn spa_update<T: Scalar>(
    w: &mut WeightMatrix<T>,
    x: &[T],
    correct: usize,
) -> Result<SpaStep<T>> {
    let losses = spa_losses(w, x, correct)?;
    apply_spa(w, x, correct, &losses)
}

fn apply_spa<T: Scalar>(
    w: &mut WeightMatrix<T>,
    x: &[T],
    correct: usize,
    losses: &SpaLosses<T>,
) -> Result<SpaStep<T>> {
    let xx = norm_sq(x);
    if xx.is_zero() {
        return Err(Error::ZeroVector);
    }
    if losses.max <= T::zero() {
        return Ok(SpaStep {
            loss: T::zero(),
            support_size: 0,
        });
    }
    let support = support_set(&losses.per_class);
    let loss_of = |class: usize| {
        losses
            .per_class
            .iter()
            .find(|&&(c, _)| c == class)
            .map(|&(_, l)| l)
            .expect("support class has a loss")
    };
    let total: T = support.iter().map(|&c| loss_of(c)).sum();
    let shared = total / T::from_count(support.len() + 1);

    w.add_scaled(correct, shared / xx, x);
    for &class in &support {
        w.add_scaled(class, -(loss_of(class) - shared) / xx, x);
    }
    Ok(SpaStep {
        loss: losses.max,
        support_size: support.len(),
    })
}

/// One round: predict, propose the prediction, query the oracle, update.
pub fn step<T: Scalar>(
    w: &mut WeightMatrix<T>,
    x: &[T],
    feedback: &mut dyn Feedback,
    cfg: &CspaConfig<T>,
) -> Result<StepOutcome<T>> {
    if w.num_classes() != cfg.num_classes() {
        return Err(Error::InvalidParameter(format!(
            "weights have {} classes, config {}",
            w.num_classes(),
            cfg.num_classes()
        )));
    }
    let scores = w.scores(x)?;
    let predicted = argmax(&scores);
    let proposed = predicted;
    let correct = feedback.is_correct(proposed);

    if !correct {
        let loss = complementary_loss_from_scores(&scores, proposed);
        apply_complementary(w, x, proposed, cfg.beta(), loss)?;
        return Ok(StepOutcome {
            predicted,
            proposed,
            correct,
            loss,
            update_kind: UpdateKind::Complementary,
            support_size: 0,
        });
    }

    let losses = spa_losses_from_scores(&scores, proposed);
    let spa = apply_spa(w, x, proposed, &losses)?;
    Ok(StepOutcome {
        predicted,
        proposed,
        correct,
        loss: spa.loss,
        update_kind: if spa.support_size == 0 {
            UpdateKind::None
        } else {
            UpdateKind::Spa
        },
        support_size: spa.support_size,
    })
}

/// CSPA learner owning its weights, initialized to zero.
#[derive(Debug, Clone)]
pub struct Cspa<T> {
    weights: WeightMatrix<T>,
    config: CspaConfig<T>,
}

impl<T: Scalar> Cspa<T> {
    pub fn new(config: CspaConfig<T>, dimension: usize) -> Self {
        Self {
            weights: WeightMatrix::zeros(config.num_classes(), dimension),
            config,
        }
    }

    pub fn config(&self) -> &CspaConfig<T> {
        &self.config
    }

    pub fn into_weights(self) -> WeightMatrix<T> {
        self.weights
    }
}

impl<T: Scalar> OnlineLearner<T> for Cspa<T> {
    fn step(&mut self, x: &[T], feedback: &mut dyn Feedback) -> Result<StepOutcome<T>> {
        step(&mut self.weights, x, feedback, &self.config)
    }

    fn weights(&self) -> &WeightMatrix<T> {
        &self.weights
    }

    fn name(&self) -> &'static str {
        "cspa"
    }
}
