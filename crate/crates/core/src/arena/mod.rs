//! The game engine. One round: the adversary commits a law and a label rule from
//! `(x_s, ŷ_s)_{s<t}`, `x_t` is drawn, the learner predicts from its own view
//! `(x_s, y_s)_{s<t}, x_t`, then `y_t` is revealed.

mod comparator;
mod estimate;
mod sweep;

pub use comparator::{candidate_halfspaces, halfspace_losses, MAX_CANDIDATE_SUBSETS};
pub use estimate::{estimate_regret, rep_seed, RegretEstimate};
pub use sweep::{format_sig, sweep, write_csv, SweepAxis, SweepRow, CSV_HEADER};

use crate::adversaries::{
    build_euclidean_adversary, build_finite_adversary, Adversary, AdversarySpec, Instance,
};
use crate::env::FiniteEnv;
use crate::error::{Error, Result};
use crate::learners::{
    build_finite_learner, build_linear_learner, Learner, LearnerSpec, DEFAULT_EXPERT_CAP,
};
use crate::problem::{EuclideanProblem, Problem};
use crate::rng::{cell, derive, streams};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RegretMode {
    /// Best fixed function in expectation: mean loss minus `min_f` of mean `f`-loss.
    Oblivious,
    /// Best function in hindsight per run: mean of loss minus per-run `min_f` loss.
    Adaptive,
}

impl RegretMode {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "oblivious" => Ok(RegretMode::Oblivious),
            "adaptive" => Ok(RegretMode::Adaptive),
            other => Err(Error::input(format!("unknown regret mode {other:?}"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            RegretMode::Oblivious => "oblivious",
            RegretMode::Adaptive => "adaptive",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GameConfig {
    pub learner: LearnerSpec,
    pub adversary: AdversarySpec,
    pub horizon: usize,
    pub reps: usize,
    pub seed: u64,
    pub mode: RegretMode,
    pub expert_cap: u64,
    /// Worker threads for repetitions; 0 lets the pool decide.
    pub jobs: usize,
}

impl GameConfig {
    pub fn new(learner: LearnerSpec, adversary: AdversarySpec, horizon: usize) -> Self {
        GameConfig {
            learner,
            adversary,
            horizon,
            reps: 1,
            seed: 0,
            mode: RegretMode::Adaptive,
            expert_cap: DEFAULT_EXPERT_CAP,
            jobs: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.horizon == 0 {
            return Err(Error::input("T must be at least 1"));
        }
        if self.reps == 0 {
            return Err(Error::input("reps must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Round<X> {
    pub x: X,
    pub y_hat: bool,
    pub y: bool,
    /// Index of the realized member of the distribution class, when it has one.
    pub member: Option<usize>,
}

impl<X> Round<X> {
    pub fn loss(&self) -> u64 {
        (self.y_hat != self.y) as u64
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Transcript<X> {
    pub rounds: Vec<Round<X>>,
    /// Loss of every function of a finite class; empty for Euclidean games.
    pub hypothesis_losses: Vec<u64>,
    pub realizable: bool,
}

impl<X> Transcript<X> {
    pub fn learner_loss(&self) -> u64 {
        self.rounds.iter().map(Round::loss).sum()
    }
}

/// Plays `horizon` rounds. Points for round `t` come from `cell(point_seed, POINT, t)`.
pub fn play<X: Instance>(
    learner: &mut dyn Learner<X>,
    adversary: &mut dyn Adversary<X>,
    horizon: usize,
    point_seed: u64,
) -> Result<Vec<Round<X>>> {
    let mut history: Vec<(X, bool)> = Vec::with_capacity(horizon);
    let mut rounds = Vec::with_capacity(horizon);
    for t in 1..=horizon {
        let plan = adversary.next_round(t, &history)?;
        let x = X::draw(&plan.law, &mut cell(point_seed, streams::POINT, t as u64));
        let y_hat = learner.predict(&x)?;
        let y = X::apply(&plan.rule, &x);
        learner.observe(y)?;
        history.push((x.clone(), y_hat));
        rounds.push(Round {
            x,
            y_hat,
            y,
            member: plan.member,
        });
    }
    Ok(rounds)
}

/// Sub-seeds of one game.
fn game_seeds(seed: u64) -> (u64, u64, u64) {
    (derive(seed, &[1]), derive(seed, &[2]), derive(seed, &[3]))
}

pub fn run_finite_game(env: &FiniteEnv, cfg: &GameConfig, seed: u64) -> Result<Transcript<usize>> {
    cfg.validate()?;
    let (ls, adv_seed, ps) = game_seeds(seed);
    let mut learner = build_finite_learner(&cfg.learner, env, cfg.horizon, cfg.expert_cap, ls)?;
    let mut adversary = build_finite_adversary(&cfg.adversary, env, cfg.horizon, adv_seed)?;
    let rounds = play(learner.as_mut(), adversary.as_mut(), cfg.horizon, ps)?;
    let hypothesis_losses = (0..env.class.m())
        .map(|f| {
            rounds
                .iter()
                .filter(|r| env.class.label(f, r.x) != r.y)
                .count() as u64
        })
        .collect();
    Ok(Transcript {
        rounds,
        hypothesis_losses,
        realizable: adversary.realizable(),
    })
}

pub fn run_linear_game(
    e: &EuclideanProblem,
    cfg: &GameConfig,
    seed: u64,
) -> Result<Transcript<Vec<f64>>> {
    cfg.validate()?;
    let (ls, adv_seed, ps) = game_seeds(seed);
    let mut learner = build_linear_learner(&cfg.learner, e.d, cfg.horizon, cfg.expert_cap, ls)?;
    let mut adversary = build_euclidean_adversary(&cfg.adversary, &e.stream, adv_seed)?;
    let rounds = play(learner.as_mut(), adversary.as_mut(), cfg.horizon, ps)?;
    Ok(Transcript {
        rounds,
        hypothesis_losses: Vec::new(),
        realizable: adversary.realizable(),
    })
}

/// A transcript of either kind of game.
#[derive(Clone, Debug, PartialEq)]
pub enum GameTranscript {
    Finite(Transcript<usize>),
    Linear(Transcript<Vec<f64>>),
}

impl GameTranscript {
    pub fn learner_loss(&self) -> u64 {
        match self {
            GameTranscript::Finite(t) => t.learner_loss(),
            GameTranscript::Linear(t) => t.learner_loss(),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            GameTranscript::Finite(t) => t.rounds.len(),
            GameTranscript::Linear(t) => t.rounds.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// CSV with columns `t,x,y_hat,y,member,loss`; Euclidean points are `;`-joined.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,x,y_hat,y,member,loss\n");
        let mut line = |t: usize, x: String, y_hat: bool, y: bool, member: Option<usize>| {
            let member = member.map(|m| m.to_string()).unwrap_or_default();
            out.push_str(&format!(
                "{t},{x},{},{},{member},{}\n",
                y_hat as u8,
                y as u8,
                (y_hat != y) as u8
            ));
        };
        match self {
            GameTranscript::Finite(tr) => {
                for (i, r) in tr.rounds.iter().enumerate() {
                    line(i + 1, r.x.to_string(), r.y_hat, r.y, r.member);
                }
            }
            GameTranscript::Linear(tr) => {
                for (i, r) in tr.rounds.iter().enumerate() {
                    let x =
                        r.x.iter()
                            .map(|v| format_sig(*v))
                            .collect::<Vec<_>>()
                            .join(";");
                    line(i + 1, x, r.y_hat, r.y, r.member);
                }
            }
        }
        out
    }
}

/// Runs one game; linear learners play the problem's Euclidean stream.
pub fn run_game(problem: &Problem, cfg: &GameConfig, seed: u64) -> Result<GameTranscript> {
    if cfg.learner.is_linear() {
        Ok(GameTranscript::Linear(run_linear_game(
            problem.require_euclidean()?,
            cfg,
            seed,
        )?))
    } else {
        Ok(GameTranscript::Finite(run_finite_game(
            problem.require_finite()?,
            cfg,
            seed,
        )?))
    }
}
