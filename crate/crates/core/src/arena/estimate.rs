use rayon::prelude::*;

use super::comparator::{candidate_halfspaces, halfspace_losses};
use super::{run_finite_game, run_linear_game, GameConfig, RegretMode};
use crate::adversaries::Halfspace;
use crate::error::{Error, Result};
use crate::problem::Problem;
use crate::rng::{derive, streams};

#[derive(Clone, Debug, PartialEq)]
pub struct RegretEstimate {
    /// Estimated regret, summed over the horizon.
    pub mean: f64,
    pub stderr: f64,
    pub reps: usize,
    pub mode: RegretMode,
    pub mean_loss: f64,
    pub comparator_loss: f64,
    /// Set when the comparator is the best of a finite candidate grid (Euclidean games).
    pub approximate: bool,
}

/// Per-repetition seed.
pub fn rep_seed(master: u64, r: usize) -> u64 {
    derive(master, &[r as u64])
}

/// Mean and standard error of the mean, summed in index order.
fn mean_stderr(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    if v.len() < 2 {
        return (mean, 0.0);
    }
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn in_pool<T: Send>(jobs: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    if jobs == 0 {
        return Ok(f());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::input(format!("cannot start {jobs} worker threads: {e}")))?;
    Ok(pool.install(f))
}

/// `regret_r = loss_r − comparator_r`; the estimate is their mean.
fn summarize(
    mode: RegretMode,
    losses: &[f64],
    comparators: &[f64],
    approximate: bool,
) -> RegretEstimate {
    let diffs: Vec<f64> = losses.iter().zip(comparators).map(|(l, c)| l - c).collect();
    let (mean, stderr) = mean_stderr(&diffs);
    RegretEstimate {
        mean,
        stderr,
        reps: losses.len(),
        mode,
        mean_loss: mean_stderr(losses).0,
        comparator_loss: mean_stderr(comparators).0,
        approximate,
    }
}

/// Index of the smallest column mean; ties to the lowest index.
fn best_column(rows: &[Vec<u64>]) -> usize {
    let m = rows[0].len();
    (0..m)
        .min_by_key(|&f| (rows.iter().map(|r| r[f]).sum::<u64>(), f))
        .expect("at least one column")
}

/// `R` seeded repetitions run in parallel. Oblivious mode compares with the single
/// function of least mean loss; adaptive mode with each run's best function.
pub fn estimate_regret(problem: &Problem, cfg: &GameConfig) -> Result<RegretEstimate> {
    cfg.validate()?;
    if cfg.learner.is_linear() {
        return estimate_linear(problem, cfg);
    }
    let env = problem.require_finite()?;
    let runs: Vec<(u64, Vec<u64>)> = in_pool(cfg.jobs, || {
        (0..cfg.reps)
            .into_par_iter()
            .map(|r| {
                run_finite_game(env, cfg, rep_seed(cfg.seed, r))
                    .map(|t| (t.learner_loss(), t.hypothesis_losses))
            })
            .collect::<Result<Vec<_>>>()
    })??;
    let losses: Vec<f64> = runs.iter().map(|r| r.0 as f64).collect();
    let rows: Vec<Vec<u64>> = runs.into_iter().map(|r| r.1).collect();
    let comparators: Vec<f64> = match cfg.mode {
        RegretMode::Oblivious => {
            let f = best_column(&rows);
            rows.iter().map(|r| r[f] as f64).collect()
        }
        RegretMode::Adaptive => rows
            .iter()
            .map(|r| *r.iter().min().expect("nonempty class") as f64)
            .collect(),
    };
    Ok(summarize(cfg.mode, &losses, &comparators, false))
}

/// Euclidean games: candidates from repetition 0 and the stream's target form a shared
/// grid; adaptive mode also adds each run's own candidates, so its comparator is never
/// above the oblivious one.
fn estimate_linear(problem: &Problem, cfg: &GameConfig) -> Result<RegretEstimate> {
    let e = problem.require_euclidean()?;
    let transcripts = in_pool(cfg.jobs, || {
        (0..cfg.reps)
            .into_par_iter()
            .map(|r| run_linear_game(e, cfg, rep_seed(cfg.seed, r)))
            .collect::<Result<Vec<_>>>()
    })??;
    let data: Vec<Vec<(Vec<f64>, bool)>> = transcripts
        .iter()
        .map(|t| t.rounds.iter().map(|r| (r.x.clone(), r.y)).collect())
        .collect();
    let points = |r: usize| -> Vec<Vec<f64>> { data[r].iter().map(|p| p.0.clone()).collect() };
    let mut shared = candidate_halfspaces(&points(0), e.d, derive(cfg.seed, &[streams::DATA]));
    let target = &e.stream.target;
    shared.push(target.clone());
    shared.push(Halfspace {
        flip: true,
        ..target.clone()
    });
    let rows: Vec<Vec<u64>> = in_pool(cfg.jobs, || {
        data.par_iter()
            .map(|d| halfspace_losses(&shared, d))
            .collect()
    })?;
    let losses: Vec<f64> = transcripts
        .iter()
        .map(|t| t.learner_loss() as f64)
        .collect();
    let comparators: Vec<f64> = match cfg.mode {
        RegretMode::Oblivious => {
            let f = best_column(&rows);
            rows.iter().map(|r| r[f] as f64).collect()
        }
        RegretMode::Adaptive => in_pool(cfg.jobs, || {
            (0..cfg.reps)
                .into_par_iter()
                .map(|r| {
                    let own = candidate_halfspaces(
                        &points(r),
                        e.d,
                        derive(cfg.seed, &[streams::DATA, r as u64]),
                    );
                    let best_own = halfspace_losses(&own, &data[r])
                        .into_iter()
                        .min()
                        .unwrap_or(u64::MAX);
                    best_own.min(*rows[r].iter().min().expect("constants present")) as f64
                })
                .collect()
        })?,
    };
    Ok(summarize(cfg.mode, &losses, &comparators, true))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversaries::{AdversarySpec, Mode};
    use crate::env::FiniteEnv;
    use crate::learners::{EtaMode, LearnerSpec};
    use crate::model::{Distribution, DistributionClass, HypothesisClass};
    use crate::rational::{int, ratio};

    fn problem() -> Problem {
        let u = DistributionClass::list(vec![Distribution::uniform(8)]).unwrap();
        Problem {
            finite: Some(FiniteEnv::new(HypothesisClass::thresholds(8), u, None).unwrap()),
            euclidean: None,
        }
    }

    #[test]
    fn perfect_learner_scores_zero() {
        let mut cfg = GameConfig::new(
            LearnerSpec::Fixed(3),
            AdversarySpec::Iid {
                f: 3,
                noise: int(0),
                member: None,
            },
            20,
        );
        cfg.reps = 10;
        let est = estimate_regret(&problem(), &cfg).unwrap();
        assert_eq!((est.mean, est.stderr), (0.0, 0.0));
    }

    #[test]
    fn noisy_labels_follow_the_direct_formula() {
        let p = problem();
        let mut cfg = GameConfig::new(
            LearnerSpec::Hedge(EtaMode::Fixed),
            AdversarySpec::Iid {
                f: 0,
                noise: ratio(1, 2),
                member: None,
            },
            30,
        );
        cfg.reps = 40;
        cfg.seed = 3;
        let est = estimate_regret(&p, &cfg).unwrap();
        let env = p.require_finite().unwrap();
        let mut total = 0.0;
        for r in 0..cfg.reps {
            let t = run_finite_game(env, &cfg, rep_seed(cfg.seed, r)).unwrap();
            total += t.learner_loss() as f64 - *t.hypothesis_losses.iter().min().unwrap() as f64;
        }
        assert!((est.mean - total / cfg.reps as f64).abs() < 1e-12);
    }

    #[test]
    fn adaptive_comparator_is_below_oblivious() {
        let p = problem();
        let mut cfg = GameConfig::new(
            LearnerSpec::Level(ratio(1, 4)),
            AdversarySpec::Critical {
                mode: Mode::Agnostic,
                eps: ratio(1, 4),
            },
            24,
        );
        cfg.reps = 30;
        let ad = estimate_regret(&p, &cfg).unwrap();
        cfg.mode = RegretMode::Oblivious;
        let ob = estimate_regret(&p, &cfg).unwrap();
        assert!(ad.comparator_loss <= ob.comparator_loss);
        assert_eq!(ad.mean_loss, ob.mean_loss);
    }

    #[test]
    fn thread_count_does_not_change_results() {
        let p = problem();
        let mut cfg = GameConfig::new(
            LearnerSpec::Hedge(EtaMode::Adaptive),
            AdversarySpec::Iid {
                f: 5,
                noise: ratio(1, 8),
                member: None,
            },
            25,
        );
        cfg.reps = 12;
        cfg.jobs = 1;
        let a = estimate_regret(&p, &cfg).unwrap();
        cfg.jobs = 4;
        assert_eq!(a, estimate_regret(&p, &cfg).unwrap());
    }
}
