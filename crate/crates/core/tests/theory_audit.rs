use cspa_core::data::{gen_four_gaussians, gen_gaussian_blobs, normalize, shuffle, FOUR_CENTERS};
use cspa_core::theory::{audit_cspa_run, separating_scale, verify_run};
use cspa_core::{Comparator, Cspa, CspaConfig, Dataset, LabelOracle, OnlineLearner, WeightMatrix};

fn triangle(sigma: f64, seed: u64) -> (Dataset, WeightMatrix) {
    let centers: Vec<Vec<f64>> = [90.0f64, 210.0, 330.0]
        .iter()
        .map(|a| vec![a.to_radians().cos(), a.to_radians().sin()])
        .collect();
    let ds = gen_gaussian_blobs("triangle", &centers, 400, sigma, seed).unwrap();
    let ds = normalize(&shuffle(&ds, seed + 1)).unwrap();
    let dirs = WeightMatrix::from_rows(centers).unwrap();
    let s = separating_scale(&dirs, &ds).unwrap().expect("separable");
    (ds, dirs.scale(s))
}

fn run(ds: &Dataset, beta: f64) -> Vec<cspa_core::StepOutcome<f64>> {
    let mut learner = Cspa::new(
        CspaConfig::new(beta, ds.num_classes()).unwrap(),
        ds.dimension(),
    );
    ds.instances()
        .iter()
        .map(|inst| {
            learner
                .step(&inst.features, &mut LabelOracle::new(inst.label))
                .unwrap()
        })
        .collect()
}

#[test]
fn bound_holds_on_separated_triangle() {
    let (ds, u) = triangle(0.05, 3);
    let cmp = Comparator::new(u.clone(), &ds).unwrap();
    assert!(cmp.alpha() < 0.5, "alpha {}", cmp.alpha());
    let beta = CspaConfig::theory_beta(cmp.alpha(), 3);
    let report = verify_run(&run(&ds, beta), &u, &ds, beta).unwrap();
    assert_eq!(report.comparator_loss, 0.0, "{}", report.to_kv());
    assert!(report.mistakes_within_loss);
    assert_eq!(report.bound_holds, Some(true), "{}", report.to_kv());
    assert!(report.sum_sq_loss > 0.0);
}

#[test]
fn audit_identities_on_triangle() {
    let (ds, u) = triangle(0.05, 5);
    let alpha = Comparator::new(u.clone(), &ds).unwrap().alpha();
    let cfg = CspaConfig::new(CspaConfig::theory_beta(alpha, 3), 3).unwrap();
    let audit = audit_cspa_run(&ds, &u, &cfg).unwrap();
    assert!((audit.delta_sum() - audit.telescoped).abs() < 1e-6);
    assert_eq!(audit.complementary_bound_violations, Some(0));
    assert_eq!(audit.spa_bound_violations, 0);
    assert!(
        audit.quadratic_slack.unwrap() <= 1e-9,
        "{:?}",
        audit.quadratic_slack
    );
}

#[test]
fn off_theory_beta_skips_bound_comparison() {
    let (ds, u) = triangle(0.05, 3);
    let report = verify_run(&run(&ds, 0.9), &u, &ds, 0.9).unwrap();
    assert!(report.bound_rhs.is_some());
    assert_eq!(report.bound_holds, None);
    assert!(report.mistakes_within_loss);
}

#[test]
fn four_corner_comparator_has_large_spread() {
    // Opposite corners share a sum with the true class, so alpha >= 2.
    let ds = normalize(&gen_four_gaussians::<f64>(200, 0.05, 1).unwrap()).unwrap();
    let dirs = WeightMatrix::from_rows(FOUR_CENTERS.iter().map(|c| c.to_vec()).collect()).unwrap();
    let s = separating_scale(&dirs, &ds).unwrap().unwrap();
    let u = dirs.scale(s);
    assert!(Comparator::new(u.clone(), &ds).is_err());
    let report = verify_run(&run(&ds, 1.0 / 6.0), &u, &ds, 1.0 / 6.0).unwrap();
    assert!(report.alpha >= 2.0);
    assert_eq!(report.bound_rhs, None);
    assert!(report.mistakes_within_loss);
}

#[test]
fn telescoping_holds_for_any_beta() {
    let ds = normalize(&shuffle(
        &gen_four_gaussians::<f64>(250, 0.5, 2).unwrap(),
        3,
    ))
    .unwrap();
    let u = WeightMatrix::from_rows(FOUR_CENTERS.iter().map(|c| c.to_vec()).collect()).unwrap();
    for beta in [0.1, 0.5, 1.0] {
        let audit = audit_cspa_run(&ds, &u, &CspaConfig::new(beta, 4).unwrap()).unwrap();
        assert!((audit.delta_sum() - audit.telescoped).abs() < 1e-6);
        assert_eq!(audit.complementary_bound_violations, None);
        assert_eq!(audit.spa_bound_violations, 0);
    }
}
