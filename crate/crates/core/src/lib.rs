//! Online multiclass classification from bandit feedback.
//!
//! The learner proposes one class per round and only hears back whether the
//! proposal was correct. [`cspa`] implements the deterministic, margin-based
//! CSPA learner; [`banditron`] the epsilon-greedy Banditron baseline;
//! [`theory`] evaluates CSPA's cumulative square-loss bound on recorded runs.
//!
//! Everything numeric is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases at the crate root fix the scalar to `f64`, which is what the
//! experiment harness uses.

// `!(x > 0.0)` deliberately rejects NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod banditron;
pub mod cspa;
pub mod data;
mod error;
pub mod learner;
mod linalg;
mod scalar;
pub mod scoring;
pub mod theory;

pub use error::{Error, Result};
pub use learner::{Feedback, LabelOracle, OnlineLearner, StepOutcome, UpdateKind};
pub use scalar::Scalar;

pub type Instance = data::Instance<f64>;
pub type Dataset = data::Dataset<f64>;
pub type WeightMatrix = scoring::WeightMatrix<f64>;
pub type KernelExpander = scoring::KernelExpander<f64>;
pub type CspaConfig = cspa::CspaConfig<f64>;
pub type Cspa = cspa::Cspa<f64>;
pub type BanditronConfig = banditron::BanditronConfig<f64>;
pub type Banditron = banditron::Banditron<f64>;
pub type Comparator = theory::Comparator<f64>;
pub type BoundReport = theory::BoundReport<f64>;

pub type Dataset32 = data::Dataset<f32>;
pub type WeightMatrix32 = scoring::WeightMatrix<f32>;
pub type Cspa32 = cspa::Cspa<f32>;
