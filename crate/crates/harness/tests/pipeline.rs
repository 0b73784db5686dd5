use cspa_harness::{
    emit_csv, mean_stddev, noise_study, parse_csv, presets, run_trial, run_trial_on, sweep,
    sweep_on, Algorithm, ExperimentSpec, Hyper, Source, TrialMetrics, TrialRecord,
};

fn gaussians(sigma: f64) -> Source {
    Source::FourGaussians {
        n_per_class: 1000,
        sigma,
        seed: 42,
    }
}

fn cspa(sigma: f64, betas: &[f64]) -> ExperimentSpec {
    ExperimentSpec::new(Algorithm::Cspa, gaussians(sigma), presets::linear(betas))
}

#[test]
fn near_separable_run() {
    let m = run_trial(&cspa(1e-3, &[1.0 / 6.0]), 0).unwrap();
    assert_eq!(m.rounds, 4000);
    assert!(m.final_ratio > 0.95);
    // seeded regression value
    assert_eq!(m.cumulative_correct, 3996);
}

#[test]
fn identical_seeds_identical_metrics() {
    let spec = cspa(0.7, &[0.3]).with_seed(9);
    assert_eq!(run_trial(&spec, 2).unwrap(), run_trial(&spec, 2).unwrap());
    let band = ExperimentSpec::new(
        Algorithm::Banditron,
        gaussians(0.7),
        presets::linear(&[0.2]),
    )
    .with_seed(9);
    assert_eq!(run_trial(&band, 1).unwrap(), run_trial(&band, 1).unwrap());
    assert_ne!(run_trial(&band, 1).unwrap(), run_trial(&band, 2).unwrap());
}

#[test]
fn one_point_sweep_is_trial_aggregation() {
    let spec = cspa(0.8, &[0.4]).with_trials(4).with_seed(3);
    let table = sweep(&spec).unwrap();
    assert_eq!(table.rows.len(), 1);
    assert_eq!(table.best, 0);
    let direct: Vec<f64> = (0..4)
        .map(|t| run_trial(&spec, t).unwrap().final_ratio)
        .collect();
    assert_eq!(table.rows[0].finals(), direct);
    let mean = direct.iter().sum::<f64>() / 4.0;
    let sd = (direct.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / 3.0).sqrt();
    assert!((table.rows[0].mean - mean).abs() < 1e-12);
    assert!((table.rows[0].stddev - sd).abs() < 1e-12);
}

#[test]
fn sweep_orders_rows_and_picks_best() {
    let spec = ExperimentSpec::new(
        Algorithm::Banditron,
        gaussians(0.6),
        presets::linear(&presets::LINEAR_GAMMAS),
    )
    .with_trials(3);
    let table = sweep(&spec).unwrap();
    let values: Vec<f64> = table.rows.iter().map(|r| r.hyper.value).collect();
    assert_eq!(values, presets::LINEAR_GAMMAS);
    for r in &table.rows {
        assert_eq!(r.trials.len(), 3);
        let (m, s) = mean_stddev(&r.finals());
        assert_eq!((m, s), (r.mean, r.stddev));
    }
    let best = table.best_row().mean;
    assert!(table.rows.iter().all(|r| r.mean <= best));
}

#[test]
fn fixed_permutation_gives_zero_variance() {
    let spec = cspa(0.9, &[0.5]);
    let base = spec.source.load().unwrap();
    let runs: Vec<TrialMetrics> = (0..5)
        .map(|t| {
            // base_seed + trial is held at 100 for every trial
            let mut s = spec.clone();
            s.base_seed = 100 - t as u64;
            run_trial_on(&base, &s, Hyper::linear(0.5), t).unwrap()
        })
        .collect();
    let (_, sd) = mean_stddev(&runs.iter().map(|m| m.final_ratio).collect::<Vec<_>>());
    assert_eq!(sd, 0.0);
}

#[test]
fn kernel_grid_matches_single_points() {
    let source = Source::FourGaussians {
        n_per_class: 60,
        sigma: 0.6,
        seed: 1,
    };
    let grid = presets::kernel(&[0.1, 0.5], &[0.1, 1.0]);
    let spec = ExperimentSpec::new(Algorithm::Cspa, source, grid.clone())
        .with_kernel(50)
        .with_trials(2);
    let base = spec.source.load().unwrap();
    let table = sweep_on(&base, &spec).unwrap();
    for (row, h) in table.rows.iter().zip(&grid) {
        assert_eq!(row.hyper, *h);
        for t in 0..2 {
            assert_eq!(row.trials[t], run_trial_on(&base, &spec, *h, t).unwrap());
        }
    }
}

#[test]
fn noise_free_row_matches_clean_sweep() {
    let betas = [0.1, 0.5, 0.9];
    let spec = cspa(0.4, &betas).with_trials(3);
    let cells = noise_study(&spec, &[0.0, 0.8], &betas).unwrap();
    let clean = sweep(&spec).unwrap();
    for (cell, row) in cells.iter().take(3).zip(&clean.rows) {
        assert_eq!(cell.sigma, 0.0);
        assert_eq!(cell.mean, row.mean);
    }
    assert_eq!(cells.len(), 6);
    assert!(cells.iter().all(|c| c.guaranteed == (c.beta < 1.0 / 3.0)));
}

#[test]
fn small_noise_is_near_bayes_rate() {
    // Quadrant classification is optimal and survives normalization, so the
    // Bayes accuracy is P(|z| < 1/sigma one-sided)^2 = Phi(1/sigma)^2.
    let bayes = 0.999_142;
    let betas = presets::linear_betas(4);
    let cells = noise_study(&cspa(0.3, &betas).with_trials(3), &[0.0], &betas).unwrap();
    for c in cells {
        assert!(c.mean > bayes - 0.01, "beta {}: {}", c.beta, c.mean);
    }
}

#[test]
fn noise_study_rejects_banditron() {
    let spec = ExperimentSpec::new(
        Algorithm::Banditron,
        gaussians(0.5),
        presets::linear(&[0.1]),
    );
    assert!(noise_study(&spec, &[0.0], &[0.1]).is_err());
}

#[test]
fn invalid_specs_are_rejected() {
    assert!(run_trial(&cspa(0.5, &[]), 0).is_err());
    assert!(run_trial(&cspa(0.5, &[0.3]).with_trials(0), 0).is_err());
    assert!(run_trial(&cspa(0.5, &[0.3]).with_kernel(10), 0).is_err());
    assert!(run_trial(&cspa(0.5, &[1.5]), 0).is_err());
    let two_class = Source::File {
        path: "missing.scale".into(),
        num_classes: 2,
    };
    assert!(run_trial(
        &ExperimentSpec::new(Algorithm::Cspa, two_class, presets::linear(&[0.3])),
        0
    )
    .is_err());
}

#[test]
fn csv_rows_and_round_trip() {
    let hits: Vec<bool> = (0..250).map(|t| t % 3 != 0).collect();
    let rec = TrialRecord {
        algo: "cspa".into(),
        dataset: "toy".into(),
        param: "beta=0.3".into(),
        trial: 0,
        metrics: TrialMetrics::from_hits(&hits, 100),
    };
    let text = emit_csv(std::slice::from_ref(&rec)).unwrap();
    let rows = parse_csv(&text).unwrap();
    assert_eq!(rows.len(), 3);
    assert_eq!(
        rows.iter().map(|r| r.round).collect::<Vec<_>>(),
        [100, 200, 250]
    );
    for (row, p) in rows.iter().zip(rec.metrics.points()) {
        assert!(
            (row.window_ratio - p.window_ratio).abs() <= 5e-7 * p.window_ratio.abs().max(1e-300)
        );
        assert!((row.cum_ratio - p.cum_ratio).abs() <= 5e-7 * p.cum_ratio);
    }
}

#[test]
fn sweep_csv_is_deterministic() {
    let spec = cspa(0.7, &[0.2, 0.6]).with_trials(2);
    let a = emit_csv(&sweep(&spec).unwrap().records()).unwrap();
    let b = emit_csv(&sweep(&spec).unwrap().records()).unwrap();
    assert_eq!(a, b);
    assert_eq!(parse_csv(&a).unwrap().len(), 2 * 2 * 40);
}
