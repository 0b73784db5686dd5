//! Grid x trial sweeps and the noise-robustness study.

use rayon::prelude::*;

use cspa_core::Dataset;

use crate::csv_out::{fmt_sig, TrialRecord};
use crate::error::{HarnessError, Result};
use crate::experiment::{Algorithm, ExperimentSpec, Hyper};
use crate::trial::{prepare, run_stream, sampler_seed, TrialMetrics};

/// Mean and sample (n - 1) standard deviation; the deviation of a single
/// value is 0.
pub fn mean_stddev(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, var.sqrt())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub hyper: Hyper,
    /// Ordered by trial index.
    pub trials: Vec<TrialMetrics>,
    pub mean: f64,
    pub stddev: f64,
}

impl SweepRow {
    pub fn finals(&self) -> Vec<f64> {
        self.trials.iter().map(|t| t.final_ratio).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub algorithm: Algorithm,
    pub dataset: String,
    /// In grid order.
    pub rows: Vec<SweepRow>,
    /// Row with the highest mean; the earliest wins ties.
    pub best: usize,
}

impl SweepTable {
    pub fn best_row(&self) -> &SweepRow {
        &self.rows[self.best]
    }

    pub fn records(&self) -> Vec<TrialRecord> {
        self.rows
            .iter()
            .flat_map(|row| {
                row.trials.iter().enumerate().map(|(trial, m)| TrialRecord {
                    algo: self.algorithm.name().to_string(),
                    dataset: self.dataset.clone(),
                    param: row.hyper.label(self.algorithm),
                    trial,
                    metrics: m.clone(),
                })
            })
            .collect()
    }

    /// Human-readable summary, one line per grid point.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (i, row) in self.rows.iter().enumerate() {
            out.push_str(&format!(
                "{:<34} mean={:>7}% sd={:>6}{}\n",
                row.hyper.label(self.algorithm),
                fmt_sig(100.0 * row.mean, 4),
                fmt_sig(100.0 * row.stddev, 3),
                if i == self.best { "  best" } else { "" },
            ));
        }
        out
    }
}

pub fn sweep(spec: &ExperimentSpec) -> Result<SweepTable> {
    spec.validate()?;
    let base = spec.source.load()?;
    sweep_on(&base, spec)
}

/// Runs every grid point for every trial on a loaded dataset. Each
/// (bandwidth, trial) pair prepares its stream once; jobs run in parallel and
/// results are reassembled in (grid point, trial) order.
pub fn sweep_on(base: &Dataset, spec: &ExperimentSpec) -> Result<SweepTable> {
    spec.validate()?;
    let mut groups: Vec<(Option<f64>, Vec<usize>)> = Vec::new();
    for (i, h) in spec.grid.iter().enumerate() {
        let key = h.bandwidth.map(f64::to_bits);
        match groups.iter_mut().find(|(g, _)| g.map(f64::to_bits) == key) {
            Some((_, members)) => members.push(i),
            None => groups.push((h.bandwidth, vec![i])),
        }
    }
    let jobs: Vec<(usize, usize)> = (0..groups.len())
        .flat_map(|g| (0..spec.trials).map(move |t| (g, t)))
        .collect();

    let results: Vec<Vec<(usize, usize, TrialMetrics)>> = jobs
        .par_iter()
        .map(|&(g, trial)| {
            let (bandwidth, members) = &groups[g];
            let ds = prepare(base, spec, trial, *bandwidth)?;
            members
                .iter()
                .map(|&i| {
                    let m = run_stream(
                        spec.algorithm,
                        spec.grid[i].value,
                        sampler_seed(spec.base_seed, trial),
                        &ds,
                        spec.window,
                    )?;
                    Ok((i, trial, m))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;

    let mut slots: Vec<Vec<Option<TrialMetrics>>> = vec![vec![None; spec.trials]; spec.grid.len()];
    for (i, trial, m) in results.into_iter().flatten() {
        slots[i][trial] = Some(m);
    }
    let rows: Vec<SweepRow> = spec
        .grid
        .iter()
        .zip(slots)
        .map(|(&hyper, trials)| {
            let trials: Vec<TrialMetrics> = trials
                .into_iter()
                .map(|m| m.expect("every job ran"))
                .collect();
            let finals: Vec<f64> = trials.iter().map(|t| t.final_ratio).collect();
            let (mean, stddev) = mean_stddev(&finals);
            SweepRow {
                hyper,
                trials,
                mean,
                stddev,
            }
        })
        .collect();
    let best = rows.iter().enumerate().fold(
        0,
        |best, (i, r)| if r.mean > rows[best].mean { i } else { best },
    );

    Ok(SweepTable {
        algorithm: spec.algorithm,
        dataset: base.name().to_string(),
        rows,
        best,
    })
}

/// Mean accuracy of one (noise level, beta) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseCell {
    pub sigma: f64,
    pub beta: f64,
    pub mean: f64,
    pub stddev: f64,
    /// `beta < 1/(K-1)`, the range covered by the loss bound.
    pub guaranteed: bool,
}

/// CSPA accuracy over a sigma x beta grid. Noise is added to raw features
/// before normalization; sigma 0 leaves the data untouched. Kernel runs use
/// the bandwidth of the spec's first grid point.
pub fn noise_study(spec: &ExperimentSpec, sigmas: &[f64], betas: &[f64]) -> Result<Vec<NoiseCell>> {
    if spec.algorithm != Algorithm::Cspa {
        return Err(HarnessError::Spec("the noise study runs CSPA only".into()));
    }
    if sigmas.is_empty() || betas.is_empty() {
        return Err(HarnessError::Spec(
            "noise study needs at least one sigma and one beta".into(),
        ));
    }
    spec.validate()?;
    let base = spec.source.load()?;
    let limit = 1.0 / (base.num_classes() as f64 - 1.0);
    let bandwidth = spec.grid.first().and_then(|h| h.bandwidth);

    let mut cells = Vec::with_capacity(sigmas.len() * betas.len());
    for &sigma in sigmas {
        let mut s = spec.clone();
        s.noise_sigma = Some(sigma);
        s.grid = betas
            .iter()
            .map(|&b| Hyper {
                value: b,
                bandwidth,
            })
            .collect();
        let table = sweep_on(&base, &s)?;
        for row in table.rows {
            cells.push(NoiseCell {
                sigma,
                beta: row.hyper.value,
                mean: row.mean,
                stddev: row.stddev,
                guaranteed: row.hyper.value < limit,
            });
        }
    }
    Ok(cells)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sample_stddev() {
        let (m, s) = mean_stddev(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert!((s - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert_eq!(mean_stddev(&[0.7]), (0.7, 0.0));
    }
}
