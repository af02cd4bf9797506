use std::time::Instant;

use qwl_core::cv::{
    analytic_pm_variance, cv_report, duan_simon_sum, logical_coherence_sum, mean_photon, pm_variance, tms_state,
    variance_grid, FockCutoff, Sign, SqueezingParameter,
};

fn sq(g: f64) -> SqueezingParameter {
    SqueezingParameter::new(g).unwrap()
}

#[test]
fn duan_simon_and_photon_number_at_default_cutoff() {
    let c = FockCutoff::default();
    let t = Instant::now();
    for g in [0.0, 0.25, 0.5, 0.75] {
        let ds = duan_simon_sum(sq(g), c).unwrap();
        assert!((ds.sum - 2.0 * (-2.0 * g).exp()).abs() < 1e-8, "g={g}: {}", ds.sum);
        assert!((ds.sum - ds.analytic).abs() < 1e-8);
        let s = tms_state(sq(g), c).unwrap().state;
        let n = mean_photon(&s, c).unwrap();
        assert!((n - 2.0 * g.sinh().powi(2)).abs() < 1e-8, "g={g}: {n}");
        if g > 0.0 {
            assert!(ds.sum < 2.0);
        } else {
            assert!((ds.sum - 2.0).abs() < 1e-14);
        }
    }
    println!("duan-simon sweep in {:?}", t.elapsed());
}

#[test]
fn reference_values() {
    let c = FockCutoff::default();
    let s = tms_state(sq(0.5), c).unwrap().state;
    assert!((mean_photon(&s, c).unwrap() - 0.543081).abs() < 1e-6);
    let v = pm_variance(&s, std::f64::consts::FRAC_PI_2, std::f64::consts::FRAC_PI_2, Sign::Plus, c).unwrap();
    assert!((v - 0.367879).abs() < 1e-6);
    assert!((duan_simon_sum(sq(0.5), c).unwrap().sum - 0.735759).abs() < 1e-6);
    assert!((duan_simon_sum(sq(0.75), c).unwrap().sum - 0.446260).abs() < 1e-6);
}

#[test]
fn variance_formula_over_angle_grid() {
    let c = FockCutoff::default();
    for g in [0.25, 0.75] {
        let grid = variance_grid(sq(g), c, 5).unwrap();
        assert_eq!(grid.len(), 50);
        for p in &grid {
            assert!(p.abs_error < 1e-8, "{p:?}");
            assert_eq!(p.analytic, analytic_pm_variance(sq(g), p.theta1, p.theta2, p.sign));
        }
    }
}

#[test]
fn logical_sum_equals_duan_simon() {
    let c = FockCutoff::default();
    let mut prev = f64::INFINITY;
    for k in 0..10 {
        let r = 0.75 * k as f64 / 9.0;
        let l = logical_coherence_sum(sq(r), c).unwrap();
        let ds = duan_simon_sum(sq(r), c).unwrap().sum;
        assert!((l - ds).abs() < 1e-10, "r={r}: {l} vs {ds}");
        assert!(l < prev);
        prev = l;
    }
}

#[test]
fn report_serializes_in_order() {
    let r = cv_report(sq(0.5), FockCutoff::default()).unwrap();
    assert!(r.below_separable_bound);
    assert!(r.truncation_weight_discarded < 1e-12);
    let json = serde_json::to_string(&r).unwrap();
    assert!(json.starts_with("{\"g\":0.5,\"n_max\":60,\"duan_simon_sum\""));
}
