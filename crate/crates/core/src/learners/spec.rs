use super::epoch::{make_epoch_oblivious, DEFAULT_C0};
use super::hedge::{make_hedge, EtaMode, FixedFunction};
use super::level::{make_agnostic_adaptive, make_level_learner};
use super::linear::{make_linear_agnostic, make_linear_learner};
use super::vc1::{make_vc1_learner, make_vc1_optimistic};
use super::Learner;
use crate::env::FiniteEnv;
use crate::error::{Error, Result};
use crate::rational::{to_f64, Rational};
use crate::spec::SpecString;

/// Parsed learner spec, e.g. `level:eps=1/8` or `vc1opt:KT=sqrt`.
#[derive(Clone, Debug, PartialEq)]
pub enum LearnerSpec {
    /// Hedge over every function of the class.
    Hedge(EtaMode),
    /// Always predicts with function `f`.
    Fixed(usize),
    Level(Rational),
    Epoch {
        eps: Rational,
        c0: f64,
    },
    Vc1,
    /// `None` means `K_T = ⌊√T⌋`.
    Vc1Opt(Option<usize>),
    Agnostic(Rational),
    Linear,
    LinearAgnostic(Option<Vec<f64>>),
}

impl LearnerSpec {
    pub fn parse(s: &str) -> Result<Self> {
        let spec = SpecString::parse(s)?;
        let out = match spec.name.as_str() {
            "hedge" => {
                spec.expect_keys(&["fixed", "adaptive"])?;
                LearnerSpec::Hedge(if spec.flag("adaptive") {
                    EtaMode::Adaptive
                } else {
                    EtaMode::Fixed
                })
            }
            "fixed" => {
                spec.expect_keys(&["f"])?;
                LearnerSpec::Fixed(
                    spec.integer("f")?
                        .ok_or_else(|| Error::input("fixed needs f=<index>"))?,
                )
            }
            "level" => {
                spec.expect_keys(&["eps"])?;
                LearnerSpec::Level(spec.required_rational("eps")?)
            }
            "epoch" => {
                spec.expect_keys(&["eps", "c0"])?;
                LearnerSpec::Epoch {
                    eps: spec.required_rational("eps")?,
                    c0: spec.float("c0")?.unwrap_or(DEFAULT_C0),
                }
            }
            "vc1" => {
                spec.expect_keys(&[])?;
                LearnerSpec::Vc1
            }
            "vc1opt" => {
                spec.expect_keys(&["KT"])?;
                match spec.value("KT") {
                    None | Some("sqrt") => LearnerSpec::Vc1Opt(None),
                    Some(_) => LearnerSpec::Vc1Opt(spec.integer("KT")?),
                }
            }
            "agnostic" => {
                spec.expect_keys(&["eps"])?;
                LearnerSpec::Agnostic(spec.required_rational("eps")?)
            }
            "linear" => {
                spec.expect_keys(&[])?;
                LearnerSpec::Linear
            }
            "linear-agnostic" => {
                spec.expect_keys(&["eps"])?;
                let list = spec
                    .value("eps")
                    .map(|v| {
                        v.split(';')
                            .map(|e| crate::rational::parse_rational(e).map(|r| to_f64(&r)))
                            .collect::<Result<Vec<f64>>>()
                    })
                    .transpose()?;
                LearnerSpec::LinearAgnostic(list)
            }
            other => return Err(Error::input(format!("unknown learner {other:?}"))),
        };
        Ok(out)
    }

    /// The same learner at another scale, when it has one.
    pub fn with_eps(&self, eps: &Rational) -> Option<Self> {
        match self {
            LearnerSpec::Level(_) => Some(LearnerSpec::Level(eps.clone())),
            LearnerSpec::Agnostic(_) => Some(LearnerSpec::Agnostic(eps.clone())),
            LearnerSpec::Epoch { c0, .. } => Some(LearnerSpec::Epoch {
                eps: eps.clone(),
                c0: *c0,
            }),
            _ => None,
        }
    }

    pub fn is_linear(&self) -> bool {
        matches!(self, LearnerSpec::Linear | LearnerSpec::LinearAgnostic(_))
    }
}

/// Builds a learner over a finite instance space.
pub fn build_finite_learner(
    spec: &LearnerSpec,
    env: &FiniteEnv,
    horizon: usize,
    cap: u64,
    seed: u64,
) -> Result<Box<dyn Learner<usize>>> {
    Ok(match spec {
        LearnerSpec::Hedge(mode) => {
            let experts: Vec<Box<dyn Learner<usize>>> = (0..env.class.m())
                .map(|f| Box::new(FixedFunction::new(&env.class, f)) as Box<dyn Learner<usize>>)
                .collect();
            Box::new(make_hedge(experts, *mode, horizon, seed)?)
        }
        LearnerSpec::Fixed(f) => {
            if *f >= env.class.m() {
                return Err(Error::input(format!("function {f} out of range")));
            }
            Box::new(FixedFunction::new(&env.class, *f))
        }
        LearnerSpec::Level(eps) => Box::new(make_level_learner(env.level_context(eps)?)),
        LearnerSpec::Epoch { eps, c0 } => Box::new(make_epoch_oblivious(
            env.class.clone(),
            env.u.clone(),
            eps.clone(),
            horizon,
            *c0,
            env.search,
            seed,
        )?),
        LearnerSpec::Vc1 => Box::new(make_vc1_learner(env.require_order()?)?),
        LearnerSpec::Vc1Opt(kt) => {
            let kt = kt.unwrap_or_else(|| ((horizon as f64).sqrt().floor() as usize).max(1));
            Box::new(make_vc1_optimistic(
                env.require_order()?,
                horizon,
                kt,
                cap,
                seed,
            )?)
        }
        LearnerSpec::Agnostic(eps) => Box::new(make_agnostic_adaptive(
            env.level_context(eps)?,
            horizon,
            cap,
            seed,
        )?),
        LearnerSpec::Linear | LearnerSpec::LinearAgnostic(_) => {
            return Err(Error::input("linear learners need a Euclidean stream"))
        }
    })
}

/// Builds a learner over `ℝ^d`.
pub fn build_linear_learner(
    spec: &LearnerSpec,
    d: usize,
    horizon: usize,
    cap: u64,
    seed: u64,
) -> Result<Box<dyn Learner<Vec<f64>>>> {
    Ok(match spec {
        LearnerSpec::Linear => Box::new(make_linear_learner(d)?),
        LearnerSpec::LinearAgnostic(list) => Box::new(make_linear_agnostic(
            d,
            horizon,
            list.as_deref(),
            cap,
            seed,
        )?),
        _ => {
            return Err(Error::input(
                "only linear learners run on Euclidean streams",
            ))
        }
    })
}
