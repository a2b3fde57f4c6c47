//! Stream generators. Each round an adversary commits to a law for `x_t` and a label
//! rule before `x_t` is drawn; adaptive adversaries see only `(x_s, ŷ_s)` for `s < t`.

mod critical;
mod euclid;
mod iid;
mod packing;
mod smoothed;
mod treewalk;

pub use critical::{make_critical_adversary, CriticalAdversary};
pub use euclid::{make_euclidean_iid, EuclideanIid, EuclideanLaw, EuclideanStreamSpec, Halfspace};
pub use iid::{make_iid, IidAdversary};
pub use packing::{make_packing_adversary, PackingAdversary};
pub use smoothed::{make_smoothed_adversarial, SmoothedAdversary};
pub use treewalk::{make_tree_walk_adversary, TreeWalkAdversary};

use std::fmt::Debug;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::dims::TreeKind;
use crate::env::FiniteEnv;
use crate::error::{Error, Result};
use crate::model::{Distribution, DistributionClass, PointSet};
use crate::rational::{int, to_f64, Rational};
use crate::rng::{cell, streams};
use crate::spec::SpecString;

/// A point type the engine can draw and label.
pub trait Instance: Clone + Debug + Send + Sync + 'static {
    type Law: Clone + Debug + Send + Sync;
    type Rule: Clone + Debug + Send + Sync;
    fn draw(law: &Self::Law, rng: &mut ChaCha8Rng) -> Self;
    fn apply(rule: &Self::Rule, x: &Self) -> bool;
}

/// Finite points: the law is a distribution, the rule is the set of points labeled 1.
impl Instance for usize {
    type Law = Distribution;
    type Rule = PointSet;

    fn draw(law: &Distribution, rng: &mut ChaCha8Rng) -> usize {
        law.sample(rng)
    }

    fn apply(rule: &PointSet, x: &usize) -> bool {
        rule.contains(*x)
    }
}

impl Instance for Vec<f64> {
    type Law = EuclideanLaw;
    type Rule = Halfspace;

    fn draw(law: &EuclideanLaw, rng: &mut ChaCha8Rng) -> Vec<f64> {
        law.draw(rng)
    }

    fn apply(rule: &Halfspace, x: &Vec<f64>) -> bool {
        rule.label(x)
    }
}

/// What the adversary commits to for one round.
#[derive(Clone, Debug)]
pub struct RoundPlan<X: Instance> {
    pub law: X::Law,
    pub rule: X::Rule,
    /// Index of the realized member of the distribution class, when it has one.
    pub member: Option<usize>,
}

pub trait Adversary<X: Instance>: Send {
    /// Plan for round `t` (1-based). `history` holds `(x_s, ŷ_s)` for every `s < t`.
    fn next_round(&mut self, t: usize, history: &[(X, bool)]) -> Result<RoundPlan<X>>;

    /// True when every transcript admits a zero-loss function of the class.
    fn realizable(&self) -> bool;
}

impl<X: Instance, A: Adversary<X> + ?Sized> Adversary<X> for Box<A> {
    fn next_round(&mut self, t: usize, history: &[(X, bool)]) -> Result<RoundPlan<X>> {
        (**self).next_round(t, history)
    }

    fn realizable(&self) -> bool {
        (**self).realizable()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Agnostic,
    Realizable,
}

/// Parsed adversary spec, e.g. `critical:realizable,eps=1/8`.
#[derive(Clone, Debug, PartialEq)]
pub enum AdversarySpec {
    Iid {
        f: usize,
        noise: Rational,
        member: Option<usize>,
    },
    Packing {
        eps: Rational,
    },
    TreeWalk {
        mode: Mode,
        eps: Rational,
    },
    Critical {
        mode: Mode,
        eps: Rational,
    },
    Smoothed {
        cap: Option<Rational>,
        eps: Rational,
    },
}

/// Level scale used by the smoothed adversary's halving labels when none is given.
pub const DEFAULT_SMOOTHED_EPS: (i64, i64) = (1, 4);

fn mode_of(spec: &SpecString) -> Result<Mode> {
    match (spec.flag("agnostic"), spec.flag("realizable")) {
        (true, true) => Err(Error::input(format!(
            "{} takes one of agnostic or realizable",
            spec.name
        ))),
        (_, true) => Ok(Mode::Realizable),
        _ => Ok(Mode::Agnostic),
    }
}

impl AdversarySpec {
    pub fn parse(s: &str) -> Result<Self> {
        let spec = SpecString::parse(s)?;
        let out = match spec.name.as_str() {
            "iid" => {
                spec.expect_keys(&["f", "noise", "member"])?;
                let noise = spec.rational("noise")?.unwrap_or_else(|| int(0));
                if noise < int(0) || noise > int(1) {
                    return Err(Error::input("noise must lie in [0, 1]"));
                }
                AdversarySpec::Iid {
                    f: spec.integer("f")?.unwrap_or(0),
                    noise,
                    member: spec.integer("member")?,
                }
            }
            "packing" => {
                spec.expect_keys(&["eps"])?;
                AdversarySpec::Packing {
                    eps: spec.required_rational("eps")?,
                }
            }
            "treewalk" => {
                spec.expect_keys(&["agnostic", "realizable", "eps"])?;
                AdversarySpec::TreeWalk {
                    mode: mode_of(&spec)?,
                    eps: spec.required_rational("eps")?,
                }
            }
            "critical" => {
                spec.expect_keys(&["agnostic", "realizable", "eps"])?;
                AdversarySpec::Critical {
                    mode: mode_of(&spec)?,
                    eps: spec.required_rational("eps")?,
                }
            }
            "smoothed" => {
                spec.expect_keys(&["cap", "eps"])?;
                let eps = spec.rational("eps")?.unwrap_or_else(|| {
                    Rational::new(DEFAULT_SMOOTHED_EPS.0.into(), DEFAULT_SMOOTHED_EPS.1.into())
                });
                AdversarySpec::Smoothed {
                    cap: spec.rational("cap")?,
                    eps,
                }
            }
            other => return Err(Error::input(format!("unknown adversary {other:?}"))),
        };
        Ok(out)
    }

    /// The same adversary at another scale, when it has one.
    pub fn with_eps(&self, eps: &Rational) -> Option<Self> {
        let eps = eps.clone();
        match self {
            AdversarySpec::Packing { .. } => Some(AdversarySpec::Packing { eps }),
            AdversarySpec::TreeWalk { mode, .. } => {
                Some(AdversarySpec::TreeWalk { mode: *mode, eps })
            }
            AdversarySpec::Critical { mode, .. } => {
                Some(AdversarySpec::Critical { mode: *mode, eps })
            }
            AdversarySpec::Smoothed { cap, .. } => Some(AdversarySpec::Smoothed {
                cap: cap.clone(),
                eps,
            }),
            AdversarySpec::Iid { .. } => None,
        }
    }

    pub fn mode(&self) -> Mode {
        match self {
            AdversarySpec::TreeWalk { mode, .. } | AdversarySpec::Critical { mode, .. } => *mode,
            AdversarySpec::Iid { noise, .. } if *noise > int(0) => Mode::Agnostic,
            AdversarySpec::Smoothed { .. }
            | AdversarySpec::Packing { .. }
            | AdversarySpec::Iid { .. } => Mode::Realizable,
        }
    }
}

/// Builds an adversary over a finite instance space.
pub fn build_finite_adversary(
    spec: &AdversarySpec,
    env: &FiniteEnv,
    horizon: usize,
    seed: u64,
) -> Result<Box<dyn Adversary<usize>>> {
    Ok(match spec {
        AdversarySpec::Iid { f, noise, member } => {
            let mu = match member {
                None => env.u.default_member(),
                Some(i) => nth_member(&env.u, *i)?,
            };
            Box::new(make_iid(&env.u, mu, &env.class, *f, to_f64(noise), seed)?)
        }
        AdversarySpec::Packing { eps } => {
            Box::new(make_packing_adversary(&env.class, &env.u, eps, seed)?)
        }
        AdversarySpec::TreeWalk { mode, eps } => {
            let kind = match mode {
                Mode::Agnostic => TreeKind::Plain(eps.clone()),
                Mode::Realizable => {
                    TreeKind::StrictEta(eps.clone(), eps / int(4 * horizon.max(1) as i64))
                }
            };
            let tree = env
                .shattered_tree(&kind)?
                .ok_or_else(|| Error::input("no shattered tree of depth 1 exists at this eps"))?;
            Box::new(make_tree_walk_adversary(
                &tree, &kind, &env.class, &env.u, horizon, *mode, seed,
            )?)
        }
        AdversarySpec::Critical { mode, eps } => Box::new(make_critical_adversary(
            env.level_context(eps)?,
            horizon,
            *mode,
            seed,
        )),
        AdversarySpec::Smoothed { cap, eps } => {
            let u = match (cap, env.u.as_ref().kind()) {
                (Some(cap), _) => DistributionClass::smoothed(env.u.default_member(), cap.clone())?,
                (None, crate::model::ClassKind::Smoothed { .. }) => env.u.as_ref().clone(),
                (None, _) => {
                    return Err(Error::input(
                        "smoothed adversary needs cap=<ratio> or a smoothed distribution class",
                    ))
                }
            };
            let ctx = crate::critical::LevelContext::shared(
                env.class.clone(),
                std::sync::Arc::new(u),
                eps.clone(),
            )?;
            Box::new(make_smoothed_adversarial(ctx, seed)?)
        }
    })
}

/// Builds an adversary over `ℝ^d` from the problem's stream description.
pub fn build_euclidean_adversary(
    spec: &AdversarySpec,
    stream: &EuclideanStreamSpec,
    seed: u64,
) -> Result<Box<dyn Adversary<Vec<f64>>>> {
    match spec {
        AdversarySpec::Iid { noise, .. } => {
            let mut stream = stream.clone();
            if *noise > int(0) {
                stream.noise = to_f64(noise);
            }
            Ok(Box::new(make_euclidean_iid(stream, seed)?))
        }
        _ => Err(Error::input(
            "only iid adversaries run on Euclidean streams",
        )),
    }
}

fn nth_member(u: &DistributionClass, i: usize) -> Result<Distribution> {
    match u.kind() {
        crate::model::ClassKind::List(list) => list
            .get(i)
            .cloned()
            .ok_or_else(|| Error::input(format!("member {i} out of range"))),
        crate::model::ClassKind::DiracAll if i < u.n() => Ok(Distribution::dirac(u.n(), i)),
        _ => Err(Error::input(
            "member=<i> needs a list or Dirac distribution class",
        )),
    }
}

/// A distribution of the closed mixture hull, realized each round by one member.
#[derive(Clone, Debug)]
pub(crate) struct Realizer {
    parts: Vec<Distribution>,
    indices: Vec<Option<usize>>,
}

impl Realizer {
    pub(crate) fn new(u: &DistributionClass, mu: &Distribution) -> Result<Self> {
        let parts = u
            .decompose(mu)
            .ok_or_else(|| Error::input("node distribution is not a mixture of class members"))?;
        let indices = parts.iter().map(|p| u.member_index(p)).collect();
        Ok(Realizer { parts, indices })
    }

    /// Uniform component for round `t`.
    pub(crate) fn realize(&self, seed: u64, t: usize) -> (Distribution, Option<usize>) {
        let j = if self.parts.len() == 1 {
            0
        } else {
            cell(seed, streams::MEMBER, t as u64).gen_range(0..self.parts.len())
        };
        (self.parts[j].clone(), self.indices[j])
    }
}

/// The rule labeling every point with `y`.
pub(crate) fn constant_rule(n: usize, y: bool) -> PointSet {
    let mut r = PointSet::with_capacity(n);
    if y {
        r.insert_range(..);
    }
    r
}

/// Entries of `history` not yet consumed; advances `seen`.
pub(crate) fn unseen<'a, X>(seen: &mut usize, history: &'a [(X, bool)]) -> Result<&'a [(X, bool)]> {
    if history.len() < *seen {
        return Err(Error::input("history shrank between rounds"));
    }
    let fresh = &history[*seen..];
    *seen = history.len();
    Ok(fresh)
}
