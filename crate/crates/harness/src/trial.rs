//! A single trial: shuffle, perturb, normalize, expand, then one online pass.

use cspa_core::data::{add_feature_noise, normalize, shuffle};
use cspa_core::{
    Banditron, BanditronConfig, Cspa, CspaConfig, Dataset, KernelExpander, LabelOracle,
    OnlineLearner,
};

use crate::error::Result;
use crate::experiment::{Algorithm, ExperimentSpec, Hyper};

const NOISE_SALT: u64 = 0x6e6f_6973_6500_0001;
const SAMPLER_SALT: u64 = 0x7361_6d70_6c65_0002;

/// Seed of the data permutation for a trial.
pub fn shuffle_seed(base_seed: u64, trial: usize) -> u64 {
    base_seed.wrapping_add(trial as u64)
}

pub fn noise_seed(base_seed: u64, trial: usize) -> u64 {
    shuffle_seed(base_seed, trial) ^ NOISE_SALT
}

pub fn sampler_seed(base_seed: u64, trial: usize) -> u64 {
    shuffle_seed(base_seed, trial) ^ SAMPLER_SALT
}

/// Proposal accuracy of one pass.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialMetrics {
    /// Rounds where the proposed class was the true label.
    pub cumulative_correct: usize,
    pub rounds: usize,
    pub window: usize,
    /// Correct proposals per window; the last window may be partial.
    pub window_correct: Vec<usize>,
    pub windowed: Vec<f64>,
    pub final_ratio: f64,
}

/// One CSV-ready point of a learning curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowPoint {
    /// Last round covered by the window, 1-based.
    pub round: usize,
    pub window_ratio: f64,
    pub cum_ratio: f64,
}

impl TrialMetrics {
    pub fn from_hits(hits: &[bool], window: usize) -> Self {
        assert!(window > 0, "window must be positive");
        let window_correct: Vec<usize> = hits
            .chunks(window)
            .map(|c| c.iter().filter(|&&h| h).count())
            .collect();
        let windowed = hits
            .chunks(window)
            .zip(&window_correct)
            .map(|(c, &n)| n as f64 / c.len() as f64)
            .collect();
        let cumulative_correct = window_correct.iter().sum();
        let rounds = hits.len();
        Self {
            cumulative_correct,
            rounds,
            window,
            window_correct,
            windowed,
            final_ratio: if rounds == 0 {
                0.0
            } else {
                cumulative_correct as f64 / rounds as f64
            },
        }
    }

    pub fn window_len(&self, i: usize) -> usize {
        self.window.min(self.rounds - i * self.window)
    }

    pub fn points(&self) -> Vec<WindowPoint> {
        let mut seen = 0;
        let mut correct = 0;
        self.window_correct
            .iter()
            .enumerate()
            .map(|(i, &n)| {
                seen += self.window_len(i);
                correct += n;
                WindowPoint {
                    round: seen,
                    window_ratio: self.windowed[i],
                    cum_ratio: correct as f64 / seen as f64,
                }
            })
            .collect()
    }
}

/// Shuffled, optionally noised, unit-norm copy of `base` for `trial`.
pub fn prepare_linear(base: &Dataset, spec: &ExperimentSpec, trial: usize) -> Result<Dataset> {
    let mut ds = shuffle(base, shuffle_seed(spec.base_seed, trial));
    if let Some(sigma) = spec.noise_sigma {
        ds = add_feature_noise(&ds, sigma, noise_seed(spec.base_seed, trial))?;
    }
    Ok(normalize(&ds)?)
}

/// Gaussian-kernel features against the first `support_size` instances.
pub fn expand(ds: &Dataset, support_size: usize, bandwidth: f64) -> Result<Dataset> {
    let expander = KernelExpander::from_prefix(ds, support_size, bandwidth)?;
    Ok(expander.expand_dataset(ds)?)
}

pub fn prepare(
    base: &Dataset,
    spec: &ExperimentSpec,
    trial: usize,
    bandwidth: Option<f64>,
) -> Result<Dataset> {
    let ds = prepare_linear(base, spec, trial)?;
    match (spec.support_size, bandwidth) {
        (Some(b), Some(g)) => expand(&ds, b, g),
        _ => Ok(ds),
    }
}

/// Streams `ds` once through a fresh learner.
pub fn run_stream(
    algorithm: Algorithm,
    value: f64,
    seed: u64,
    ds: &Dataset,
    window: usize,
) -> Result<TrialMetrics> {
    let k = ds.num_classes();
    let mut learner: Box<dyn OnlineLearner<f64>> = match algorithm {
        Algorithm::Cspa => Box::new(Cspa::new(CspaConfig::new(value, k)?, ds.dimension())),
        Algorithm::Banditron => Box::new(Banditron::new(
            BanditronConfig::new(value, k, seed)?,
            ds.dimension(),
        )),
    };
    let mut hits = Vec::with_capacity(ds.len());
    for inst in ds.instances() {
        let out = learner.step(&inst.features, &mut LabelOracle::new(inst.label))?;
        hits.push(out.proposed == inst.label);
    }
    Ok(TrialMetrics::from_hits(&hits, window))
}

/// One trial of `hyper` on an already loaded dataset.
pub fn run_trial_on(
    base: &Dataset,
    spec: &ExperimentSpec,
    hyper: Hyper,
    trial: usize,
) -> Result<TrialMetrics> {
    let ds = prepare(base, spec, trial, hyper.bandwidth)?;
    run_stream(
        spec.algorithm,
        hyper.value,
        sampler_seed(spec.base_seed, trial),
        &ds,
        spec.window,
    )
}

/// Trial `trial` of the first grid point.
pub fn run_trial(spec: &ExperimentSpec, trial: usize) -> Result<TrialMetrics> {
    spec.validate()?;
    let base = spec.source.load()?;
    run_trial_on(&base, spec, spec.grid[0], trial)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_last_window() {
        let hits: Vec<bool> = (0..250).map(|t| t % 2 == 0).collect();
        let m = TrialMetrics::from_hits(&hits, 100);
        assert_eq!(m.windowed.len(), 3);
        assert_eq!(m.window_len(2), 50);
        assert_eq!(m.cumulative_correct, 125);
        assert_eq!(m.final_ratio, 0.5);
        let pts = m.points();
        assert_eq!(
            pts.iter().map(|p| p.round).collect::<Vec<_>>(),
            [100, 200, 250]
        );
        assert_eq!(pts[2].cum_ratio, 0.5);
    }

    #[test]
    fn weighted_windows_average_to_final() {
        let hits: Vec<bool> = (0..537).map(|t| (t * 7919) % 5 < 3).collect();
        let m = TrialMetrics::from_hits(&hits, 100);
        let weighted: f64 = m
            .windowed
            .iter()
            .enumerate()
            .map(|(i, r)| r * m.window_len(i) as f64)
            .sum::<f64>()
            / m.rounds as f64;
        assert!((weighted - m.final_ratio).abs() < 1e-12);
        assert!(m.windowed.iter().all(|r| (0.0..=1.0).contains(r)));
    }

    #[test]
    fn empty_run() {
        let m = TrialMetrics::from_hits(&[], 100);
        assert_eq!(m.final_ratio, 0.0);
        assert!(m.points().is_empty());
    }
}
