//! What to run: learner, data source, grid and trial plan.

use std::fmt;
use std::path::PathBuf;

use cspa_core::data::{gen_four_gaussians, load_libsvm};
use cspa_core::Dataset;

use crate::error::{HarnessError, Result};

pub const DEFAULT_WINDOW: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Cspa,
    Banditron,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Cspa => "cspa",
            Algorithm::Banditron => "banditron",
        }
    }

    /// Name of the scalar hyperparameter: `beta` or `gamma`.
    pub fn param_name(self) -> &'static str {
        match self {
            Algorithm::Cspa => "beta",
            Algorithm::Banditron => "gamma",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    File {
        path: PathBuf,
        num_classes: usize,
    },
    /// Four 2-d Gaussian blobs at (+-1, +-1).
    FourGaussians {
        n_per_class: usize,
        sigma: f64,
        seed: u64,
    },
}

impl Source {
    pub fn load(&self) -> Result<Dataset> {
        Ok(match self {
            Source::File { path, num_classes } => load_libsvm(path, *num_classes)?,
            Source::FourGaussians {
                n_per_class,
                sigma,
                seed,
            } => gen_four_gaussians(*n_per_class, *sigma, *seed)?,
        })
    }
}

/// One grid point: the learner's step parameter and, for kernel runs, the
/// kernel bandwidth `g`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hyper {
    pub value: f64,
    pub bandwidth: Option<f64>,
}

impl Hyper {
    pub fn linear(value: f64) -> Self {
        Self {
            value,
            bandwidth: None,
        }
    }

    pub fn kernel(value: f64, bandwidth: f64) -> Self {
        Self {
            value,
            bandwidth: Some(bandwidth),
        }
    }

    /// `beta=0.3` or `beta=0.3|g=0.1`.
    pub fn label(&self, algo: Algorithm) -> String {
        match self.bandwidth {
            None => format!("{}={}", algo.param_name(), self.value),
            Some(g) => format!("{}={}|g={}", algo.param_name(), self.value, g),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub algorithm: Algorithm,
    pub source: Source,
    /// Kernel support size `|B|`; `None` for a linear run.
    pub support_size: Option<usize>,
    pub grid: Vec<Hyper>,
    pub trials: usize,
    pub base_seed: u64,
    /// Standard deviation of Gaussian noise added to raw features.
    pub noise_sigma: Option<f64>,
    pub window: usize,
}

impl ExperimentSpec {
    pub fn new(algorithm: Algorithm, source: Source, grid: Vec<Hyper>) -> Self {
        Self {
            algorithm,
            source,
            support_size: None,
            grid,
            trials: 1,
            base_seed: 0,
            noise_sigma: None,
            window: DEFAULT_WINDOW,
        }
    }

    pub fn with_kernel(mut self, support_size: usize) -> Self {
        self.support_size = Some(support_size);
        self
    }

    pub fn with_trials(mut self, trials: usize) -> Self {
        self.trials = trials;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.base_seed = seed;
        self
    }

    pub fn with_noise(mut self, sigma: f64) -> Self {
        self.noise_sigma = Some(sigma);
        self
    }

    pub fn with_window(mut self, window: usize) -> Self {
        self.window = window;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(HarnessError::Spec(msg));
        if self.grid.is_empty() {
            return bad("empty hyperparameter grid".into());
        }
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if self.window == 0 {
            return bad("window must be at least 1".into());
        }
        if self.support_size == Some(0) {
            return bad("kernel support size must be positive".into());
        }
        if let Some(s) = self.noise_sigma {
            if !(s >= 0.0) {
                return bad(format!("noise sigma must be nonnegative, got {s}"));
            }
        }
        for h in &self.grid {
            match (self.support_size, h.bandwidth) {
                (Some(_), None) => return bad(format!("kernel run needs a bandwidth at {h:?}")),
                (None, Some(_)) => {
                    return bad(format!("bandwidth given without --support-size at {h:?}"))
                }
                _ => {}
            }
        }
        Ok(())
    }
}

pub mod presets {
    //! Default grids for the linear and kernel experiments.
    use super::Hyper;

    pub const LINEAR_GAMMAS: [f64; 10] = [0.001, 0.01, 0.025, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6];
    pub const KERNEL_BANDWIDTHS: [f64; 5] = [0.01, 0.1, 1.0, 10.0, 100.0];
    pub const KERNEL_GAMMAS: [f64; 6] = [0.001, 0.025, 0.1, 0.3, 0.4, 0.6];
    pub const KERNEL_SUPPORT_SIZE: usize = 700;

    /// `1 / (2(K - 1))`, half the largest step size the bound allows.
    pub fn half_theory_beta(num_classes: usize) -> f64 {
        1.0 / (2.0 * (num_classes as f64 - 1.0))
    }

    /// `0.1, 0.2, ..., 0.9` and `1/(2(K-1))`.
    pub fn linear_betas(num_classes: usize) -> Vec<f64> {
        let mut v: Vec<f64> = (1..=9).map(|i| i as f64 / 10.0).collect();
        v.push(half_theory_beta(num_classes));
        v
    }

    pub fn kernel_betas(num_classes: usize) -> Vec<f64> {
        vec![0.1, 0.3, 0.5, 0.7, half_theory_beta(num_classes)]
    }

    pub fn linear(values: &[f64]) -> Vec<Hyper> {
        values.iter().map(|&v| Hyper::linear(v)).collect()
    }

    /// Cartesian product, bandwidth-major.
    pub fn kernel(values: &[f64], bandwidths: &[f64]) -> Vec<Hyper> {
        bandwidths
            .iter()
            .flat_map(|&g| values.iter().map(move |&v| Hyper::kernel(v, g)))
            .collect()
    }
}
