//! Cumulative square-loss bound for CSPA and tools to check it on real runs.
//!
//! Against a fixed comparator `u_1..u_K` whose non-true class scores stay
//! within a spread `alpha < 1`, running CSPA with `beta = (1 - alpha)/(K - 1)`
//! on unit-norm-`R` data guarantees
//!
//! ```text
//! sum_t l_t^2 <= ( K(K-1)/(1-alpha)^2 * sqrt(sum_t l*_t^2)
//!                  + R sqrt(K(K-1))/(1-alpha) * sqrt(sum_i ||u_i||^2) )^2
//! ```
//!
//! and, since every mistake has `l_t >= 1`, the same quantity bounds the
//! number of mistakes.

use std::fmt::Write as _;

use crate::cspa::{self, CspaConfig};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::learner::{LabelOracle, StepOutcome, UpdateKind};
use crate::linalg::norm_sq;
use crate::scalar::Scalar;
use crate::scoring::WeightMatrix;

/// A reference weight matrix together with its score spread on a dataset.
#[derive(Debug, Clone)]
pub struct Comparator<T> {
    weights: WeightMatrix<T>,
    alpha: T,
}

impl<T: Scalar> Comparator<T> {
    /// Computes `alpha` on `ds`; fails unless `0 <= alpha < 1`.
    pub fn new(weights: WeightMatrix<T>, ds: &Dataset<T>) -> Result<Self> {
        let alpha = alpha_of(&weights, ds)?;
        if !(alpha < T::one()) {
            return Err(Error::InvalidParameter(format!(
                "comparator spread alpha = {alpha} violates alpha < 1"
            )));
        }
        Ok(Self { weights, alpha })
    }

    pub fn weights(&self) -> &WeightMatrix<T> {
        &self.weights
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }
}

/// Smallest `s` such that `s * directions` has zero hinge loss on every
/// instance of `ds`, or `None` when some instance is not strictly separated
/// by `directions`.
pub fn separating_scale<T: Scalar>(
    directions: &WeightMatrix<T>,
    ds: &Dataset<T>,
) -> Result<Option<T>> {
    let mut scale = T::zero();
    for inst in ds.instances() {
        let s = directions.scores(&inst.features)?;
        for (i, &si) in s.iter().enumerate() {
            if i == inst.label {
                continue;
            }
            let gap = s[inst.label] - si;
            if gap <= T::zero() {
                return Ok(None);
            }
            scale = scale.max(T::one() / gap);
        }
    }
    // a few ulps up so the margins clear 1 after rounding
    Ok(Some(scale * (T::one() + T::lit(8.0) * T::epsilon())))
}

/// `max_t max_{y' != y_t} sum_{y'' not in {y_t, y'}} (u_{y''}.x_t - u_{y'}.x_t)`
pub fn alpha_of<T: Scalar>(u: &WeightMatrix<T>, ds: &Dataset<T>) -> Result<T> {
    let k = u.num_classes();
    let mut alpha = T::zero();
    for inst in ds.instances() {
        let s = u.scores(&inst.features)?;
        let others: T = s
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != inst.label)
            .map(|(_, &v)| v)
            .sum();
        for (yp, &syp) in s.iter().enumerate() {
            if yp == inst.label {
                continue;
            }
            // sum over the K-2 remaining classes of (s_y'' - s_y')
            let spread = (others - syp) - T::from_count(k - 2) * syp;
            alpha = alpha.max(spread);
        }
    }
    Ok(alpha)
}

/// Multiclass hinge loss of the comparator on one instance.
pub fn comparator_loss<T: Scalar>(u: &WeightMatrix<T>, x: &[T], label: usize) -> Result<T> {
    u.check_class(label)?;
    let s = u.scores(x)?;
    Ok(s.iter()
        .enumerate()
        .filter(|&(i, _)| i != label)
        .map(|(_, &si)| (T::one() + si - s[label]).max(T::zero()))
        .fold(T::zero(), T::max))
}

/// Right-hand side of the cumulative square-loss bound.
pub fn theorem_bound<T: Scalar>(
    u: &WeightMatrix<T>,
    alpha: T,
    comparator_losses: &[T],
    radius: T,
) -> Result<T> {
    let k = u.num_classes();
    if k < 3 {
        return Err(Error::TooFewClasses(k));
    }
    if !(alpha >= T::zero() && alpha < T::one()) {
        return Err(Error::InvalidParameter(format!(
            "alpha must be in [0, 1), got {alpha}"
        )));
    }
    let kk = T::from_count(k * (k - 1));
    let one_minus = T::one() - alpha;
    let l_star = comparator_losses.iter().map(|&l| l * l).sum::<T>().sqrt();
    let u_norm = u.frobenius_sq().sqrt();
    let root = kk / (one_minus * one_minus) * l_star + radius * kk.sqrt() / one_minus * u_norm;
    Ok(root * root)
}

fn beta_tolerance<T: Scalar>() -> T {
    T::lit(1e-12).max(T::epsilon() * T::lit(4.0))
}

/// Observed totals of a run next to the bound they are supposed to respect.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport<T> {
    pub rounds: usize,
    /// `sum_t l_t^2`
    pub sum_sq_loss: T,
    /// `sum_t [proposed_t != y_t]`
    pub mistakes: usize,
    /// `sum_t (l*_t)^2`
    pub comparator_loss: T,
    pub alpha: T,
    pub beta_used: T,
    /// `(1 - alpha)/(K - 1)`
    pub theory_beta: T,
    pub radius: T,
    /// `None` when `alpha >= 1`.
    pub bound_rhs: Option<T>,
    pub mistakes_within_loss: bool,
    /// `None` unless `alpha < 1` and `beta_used` equals `theory_beta`.
    pub bound_holds: Option<bool>,
}

impl<T: Scalar> BoundReport<T> {
    /// Flat `key=value` lines.
    pub fn to_kv(&self) -> String {
        let opt = |v: Option<String>| v.unwrap_or_else(|| "na".to_string());
        let mut out = String::new();
        writeln!(out, "rounds={}", self.rounds).unwrap();
        writeln!(out, "sum_sq_loss={}", self.sum_sq_loss).unwrap();
        writeln!(out, "mistakes={}", self.mistakes).unwrap();
        writeln!(out, "comparator_sq_loss={}", self.comparator_loss).unwrap();
        writeln!(out, "alpha={}", self.alpha).unwrap();
        writeln!(out, "beta_used={}", self.beta_used).unwrap();
        writeln!(out, "theory_beta={}", self.theory_beta).unwrap();
        writeln!(out, "radius={}", self.radius).unwrap();
        writeln!(
            out,
            "bound_rhs={}",
            opt(self.bound_rhs.map(|v| v.to_string()))
        )
        .unwrap();
        writeln!(out, "mistakes_within_loss={}", self.mistakes_within_loss).unwrap();
        writeln!(
            out,
            "bound_holds={}",
            opt(self.bound_holds.map(|v| v.to_string()))
        )
        .unwrap();
        out
    }
}

/// Compares a finished run against the bound for comparator `u`.
///
/// `outcomes[t]` must be the round on `ds.instances()[t]`.
pub fn verify_run<T: Scalar>(
    outcomes: &[StepOutcome<T>],
    u: &WeightMatrix<T>,
    ds: &Dataset<T>,
    beta: T,
) -> Result<BoundReport<T>> {
    if outcomes.len() != ds.len() {
        return Err(Error::LengthMismatch {
            outcomes: outcomes.len(),
            instances: ds.len(),
        });
    }
    let k = u.num_classes();
    if k < 3 {
        return Err(Error::TooFewClasses(k));
    }

    let sum_sq_loss: T = outcomes.iter().map(|o| o.loss * o.loss).sum();
    let mistakes = outcomes
        .iter()
        .zip(ds.instances())
        .filter(|(o, inst)| o.proposed != inst.label)
        .count();
    let comparator_losses = ds
        .instances()
        .iter()
        .map(|inst| comparator_loss(u, &inst.features, inst.label))
        .collect::<Result<Vec<T>>>()?;
    let comparator_sq: T = comparator_losses.iter().map(|&l| l * l).sum();
    // An empty stream is taken to have the unit radius of normalized data.
    let radius = if ds.is_empty() {
        T::one()
    } else {
        ds.instances()
            .iter()
            .map(|inst| inst.norm())
            .fold(T::zero(), T::max)
    };
    let alpha = alpha_of(u, ds)?;
    let theory_beta = CspaConfig::theory_beta(alpha, k);

    let bound_rhs = if alpha < T::one() {
        Some(theorem_bound(u, alpha, &comparator_losses, radius)?)
    } else {
        None
    };
    let applicable = (beta - theory_beta).abs() <= beta_tolerance();
    let bound_holds = bound_rhs
        .filter(|_| applicable)
        .map(|rhs| sum_sq_loss <= rhs);

    Ok(BoundReport {
        rounds: outcomes.len(),
        sum_sq_loss,
        mistakes,
        comparator_loss: comparator_sq,
        alpha,
        beta_used: beta,
        theory_beta,
        radius,
        bound_rhs,
        mistakes_within_loss: T::from_count(mistakes) <= sum_sq_loss,
        bound_holds,
    })
}

/// Per-round record of a CSPA replay against a comparator.
#[derive(Debug, Clone)]
pub struct RunAudit<T> {
    pub outcomes: Vec<StepOutcome<T>>,
    /// `Delta_t = sum_i ||w_{i,t} - u_i||^2 - ||w_{i,t+1} - u_i||^2`
    pub deltas: Vec<T>,
    pub final_weights: WeightMatrix<T>,
    /// `sum_i ||w_{i,1} - u_i||^2 - ||w_{i,T+1} - u_i||^2`
    pub telescoped: T,
    /// Mistake rounds where `Delta_t` fell below its complementary-update
    /// lower bound (beyond 1e-6). `None` when the bound's preconditions
    /// (`alpha < 1`, theory `beta`) do not hold.
    pub complementary_bound_violations: Option<usize>,
    /// Correct rounds where `Delta_t` fell below the support-class lower bound.
    pub spa_bound_violations: usize,
    /// `chi L^2 - psi L* L - sum_i ||u_i||^2`; nonpositive when the bound holds.
    /// `None` under the same conditions as `complementary_bound_violations`.
    pub quadratic_slack: Option<T>,
}

impl<T: Scalar> RunAudit<T> {
    pub fn delta_sum(&self) -> T {
        self.deltas.iter().copied().sum()
    }
}

/// Replays CSPA from zero weights over `ds`, tracking the potential
/// `sum_i ||w_i - u_i||^2` each round.
pub fn audit_cspa_run<T: Scalar>(
    ds: &Dataset<T>,
    u: &WeightMatrix<T>,
    cfg: &CspaConfig<T>,
) -> Result<RunAudit<T>> {
    let k = cfg.num_classes();
    let kt = T::from_count(k);
    let beta = cfg.beta();
    let alpha = alpha_of(u, ds)?;
    let applicable =
        alpha < T::one() && (beta - CspaConfig::theory_beta(alpha, k)).abs() <= beta_tolerance();
    // gamma > 0 is what makes the mistake-round bound useful
    let gamma = T::lit(2.0) * (T::one() - alpha) - T::from_count(k - 1) * beta;
    let tol = T::lit(1e-6);

    let mut w = WeightMatrix::zeros(k, ds.dimension());
    let start = w.distance_sq(u)?;
    let mut potential = start;
    let mut outcomes = Vec::with_capacity(ds.len());
    let mut deltas = Vec::with_capacity(ds.len());
    let mut comp_violations = 0;
    let mut spa_violations = 0;
    let mut cross = T::zero();
    let mut radius_sq = T::zero();

    for inst in ds.instances() {
        let x = &inst.features;
        let xx = norm_sq(x);
        radius_sq = radius_sq.max(xx);
        let l_star = comparator_loss(u, x, inst.label)?;
        let out = cspa::step(&mut w, x, &mut LabelOracle::new(inst.label), cfg)?;
        let next = w.distance_sq(u)?;
        let delta = potential - next;
        potential = next;

        let l = out.loss;
        cross = cross + l * l_star;
        match out.update_kind {
            UpdateKind::Complementary => {
                let lower =
                    beta * gamma / (kt * xx) * l * l - T::lit(2.0) * beta * l * l_star / (kt * xx);
                if delta < lower - tol {
                    comp_violations += 1;
                }
            }
            UpdateKind::Spa => {
                let s = T::from_count(out.support_size);
                let coef = (s + T::lit(3.0)) / (T::lit(4.0) * s + T::lit(4.0));
                let lower = (coef * l - l_star) * l / xx;
                if delta < lower - tol {
                    spa_violations += 1;
                }
            }
            UpdateKind::None => {}
        }
        outcomes.push(out);
        deltas.push(delta);
    }

    let quadratic_slack = if applicable {
        let r2 = radius_sq.max(T::min_positive_value());
        let spa_coef = (kt + T::lit(3.0)) / (T::lit(4.0) * (kt + T::one()));
        let chi = (beta * gamma / kt).min(spa_coef) / r2;
        let psi = (T::lit(2.0) * beta / kt).max(T::one()) / r2;
        let l = outcomes.iter().map(|o| o.loss * o.loss).sum::<T>().sqrt();
        let l_star = ds
            .instances()
            .iter()
            .map(|inst| comparator_loss(u, &inst.features, inst.label).map(|v| v * v))
            .sum::<Result<T>>()?
            .sqrt();
        debug_assert!(cross <= l * l_star + tol);
        Some(chi * l * l - psi * l_star * l - u.frobenius_sq())
    } else {
        None
    };

    Ok(RunAudit {
        telescoped: start - potential,
        outcomes,
        deltas,
        final_weights: w,
        complementary_bound_violations: applicable.then_some(comp_violations),
        spa_bound_violations: spa_violations,
        quadratic_slack,
    })
}
