use arw_core::experiments::{
    estimate_zeta_fe, fe_trial_threshold, hockey_curve, particles_for, point_source_run, sweep,
    FeParams, HockeyMode, HockeyParams, Method, SweepParams,
};
use arw_core::snapshot::Snapshot;
use arw_core::{stabilize, ArwError, Configuration, InstructionTape, Policy};

#[test]
fn fe_absorbs_at_low_density_only() {
    let p = FeParams::new(0.8, 128, 5).trials(21);
    let thresholds: Vec<u64> = (0..21).map(|t| fe_trial_threshold(&p, t).unwrap()).collect();
    let absorbed = |rho: f64| thresholds.iter().filter(|&&k| k >= particles_for(rho, 128)).count();
    assert_eq!(absorbed(0.5), 21);
    assert!(absorbed(0.5) > absorbed(0.97));
    assert_eq!(absorbed(1.1), 0);
}

#[test]
fn fe_estimate_is_reproducible() {
    let p = FeParams::new(0.8, 64, 9).trials(9);
    let a = estimate_zeta_fe(&p).unwrap();
    assert_eq!(a, estimate_zeta_fe(&p).unwrap());
    assert!(a.zeta_hat > 0.5 && a.zeta_hat < 1.0);
    assert_eq!(a.method, Method::FixedEnergyTorus);
}

#[test]
fn fe_even_split_is_inconclusive() {
    let mut found = false;
    for seed in 0..40 {
        match estimate_zeta_fe(&FeParams::new(0.8, 16, seed).trials(2)) {
            Err(ArwError::Inconclusive { .. }) => found = true,
            Ok(_) => {}
            Err(e) => panic!("{e}"),
        }
    }
    assert!(found);
}

#[test]
fn batch_and_incremental_profiles_agree() {
    let base = HockeyParams::new(100, 1.0, 1.25, 0.05, 17);
    let inc = hockey_curve(&base).unwrap();
    let batch = hockey_curve(&base.clone().mode(HockeyMode::Batch)).unwrap();
    assert_eq!(inc.rows.len(), batch.rows.len());
    for (a, b) in inc.rows.iter().zip(&batch.rows) {
        assert_eq!((a.sleeping, a.ejected_left, a.ejected_right), (b.sleeping, b.ejected_left, b.ejected_right));
    }
}

#[test]
fn profile_is_conservative() {
    let c = hockey_curve(&HockeyParams::new(80, 0.8, 1.2, 0.1, 2).mode(HockeyMode::Independent)).unwrap();
    for r in &c.rows {
        assert_eq!(r.sleeping + r.ejected_left + r.ejected_right, particles_for(r.rho, 80));
        assert!(r.density <= r.rho + 1e-12);
    }
}

#[test]
fn sweep_is_ordered_and_deterministic() {
    let mut p = SweepParams::new(vec![0.5, 2.0], vec![24, 40], 2, 3);
    p.grid_step = 0.1;
    let a = sweep(&p);
    assert_eq!(a.rows.len(), 8);
    assert_eq!(a.to_csv(), sweep(&p).to_csv());
    let first = &a.rows[0];
    assert_eq!((first.lambda, first.n, first.replica), (0.5, 24, 0));
}

#[test]
fn point_source_fills_a_segment() {
    let r = point_source_run(100, 0.8, 400, 1).unwrap();
    let (a, b) = r.segment.unwrap();
    assert!(a <= 0 && b >= 0);
    assert_eq!(r.run.sleeping_count, 100);
    assert!(r.density > 0.5 && r.density <= 1.0);
    assert!(matches!(point_source_run(100, 0.8, 3, 1), Err(ArwError::WindowTooSmall { .. })));
}

#[test]
fn snapshot_round_trip_after_stabilization() {
    let tape = InstructionTape::new(8, 0.8).unwrap();
    let r = stabilize(Configuration::from_active(vec![3, 0, 1, 2, 0]), &tape, Policy::Sweep, None).unwrap();
    let snap = Snapshot::new(r.final_config.clone(), "0.8", "8");
    let text = snap.to_text();
    let back = Snapshot::parse(&text).unwrap();
    assert_eq!(back.config, r.final_config);
    assert_eq!(back.to_text(), text);
}
