//! Statistical behaviour of the Monte-Carlo harness.

use std::path::Path;

use cal_core::adversaries::AdversarySpec;
use cal_core::arena::{estimate_regret, sweep, GameConfig, SweepAxis};
use cal_core::learners::LearnerSpec;
use cal_core::problem::Problem;

fn uniform8() -> Problem {
    Problem::load(
        &Path::new(env!("CARGO_MANIFEST_DIR")).join("../../problems/thresholds_uniform8.json"),
    )
    .unwrap()
}

fn noisy_hedge(horizon: usize) -> GameConfig {
    GameConfig::new(
        LearnerSpec::parse("hedge").unwrap(),
        AdversarySpec::parse("iid:f=3,noise=1/4").unwrap(),
        horizon,
    )
}

#[test]
fn standard_error_shrinks_with_the_square_root_of_reps() {
    let problem = uniform8();
    let mut cfg = noisy_hedge(64);
    cfg.seed = 11;
    cfg.reps = 100;
    let small = estimate_regret(&problem, &cfg).unwrap();
    cfg.reps = 400;
    let large = estimate_regret(&problem, &cfg).unwrap();
    let ratio = small.stderr / large.stderr;
    assert!((ratio / 2.0 - 1.0).abs() <= 0.2, "stderr ratio {ratio}");
    assert_eq!(large.reps, 400);
}

#[test]
fn normalized_regret_falls_with_the_horizon() {
    let problem = uniform8();
    let mut cfg = noisy_hedge(0);
    cfg.reps = 100;
    cfg.seed = 5;
    let rows = sweep(&problem, &cfg, &SweepAxis::Horizon(vec![16, 64, 256])).unwrap();
    assert_eq!(rows.len(), 3);
    for w in rows.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        let se = ((a.estimate.stderr / a.horizon as f64).powi(2)
            + (b.estimate.stderr / b.horizon as f64).powi(2))
        .sqrt();
        let drop = a.normalized_mean() - b.normalized_mean();
        assert!(
            drop > 2.0 * se,
            "T={} -> T={}: drop {drop} vs stderr {se}",
            a.horizon,
            b.horizon
        );
    }
}

#[test]
fn a_single_point_axis_gives_one_row() {
    let problem = uniform8();
    let mut cfg = noisy_hedge(0);
    cfg.reps = 3;
    let rows = sweep(&problem, &cfg, &SweepAxis::Horizon(vec![10])).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].axis, "10");
    let direct = estimate_regret(&problem, &GameConfig { horizon: 10, ..cfg }).unwrap();
    assert_eq!(rows[0].estimate, direct);
}

#[test]
fn estimates_do_not_depend_on_the_thread_count() {
    let problem = uniform8();
    let mut cfg = noisy_hedge(32);
    cfg.reps = 24;
    cfg.seed = 8;
    cfg.jobs = 1;
    let serial = estimate_regret(&problem, &cfg).unwrap();
    cfg.jobs = 4;
    assert_eq!(estimate_regret(&problem, &cfg).unwrap(), serial);
}
