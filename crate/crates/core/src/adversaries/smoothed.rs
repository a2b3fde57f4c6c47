use rand::Rng;

use super::{unseen, Adversary, RoundPlan};
use crate::critical::LevelContext;
use crate::error::{Error, Result};
use crate::model::{ClassKind, PointSet, VersionMask};
use crate::rng::{cell, streams};

/// Adversarial stream inside a smoothed class: each round puts as much mass as the
/// density cap allows on the disagreement region of the current version space, and
/// labels each point with the label keeping the larger level. Ties go to a fresh fair
/// coin, so a learner cannot match the rule by sharing its tie-break.
pub struct SmoothedAdversary {
    ctx: LevelContext,
    v: VersionMask,
    seed: u64,
    seen: usize,
    rules: Vec<PointSet>,
}

pub fn make_smoothed_adversarial(ctx: LevelContext, seed: u64) -> Result<SmoothedAdversary> {
    if !matches!(ctx.distributions().kind(), ClassKind::Smoothed { .. }) {
        return Err(Error::input(
            "the smoothed adversary needs a smoothed distribution class",
        ));
    }
    let v = ctx.class().full_mask();
    Ok(SmoothedAdversary {
        ctx,
        v,
        seed,
        seen: 0,
        rules: Vec::new(),
    })
}

impl SmoothedAdversary {
    pub fn version_space(&self) -> &VersionMask {
        &self.v
    }
}

impl Adversary<usize> for SmoothedAdversary {
    fn next_round(&mut self, t: usize, history: &[(usize, bool)]) -> Result<RoundPlan<usize>> {
        let start = self.seen;
        for (i, (x, _)) in unseen(&mut self.seen, history)?.iter().enumerate() {
            let y = self.rules[start + i].contains(*x);
            self.v = self.ctx.class().restrict(&self.v, *x, y);
        }
        let class = self.ctx.class();
        let region = class.disagreement_region(&self.v);
        let law = self.ctx.distributions().witness(&region);
        let mut coins = cell(self.seed, streams::LABEL, t as u64);
        let n = class.n();
        let mut rule = PointSet::with_capacity(n);
        for x in 0..n {
            let l0 = self.ctx.level(&class.restrict(&self.v, x, false));
            let l1 = self.ctx.level(&class.restrict(&self.v, x, true));
            let coin: bool = coins.gen();
            rule.set(x, if l0 == l1 { coin } else { l1 > l0 });
        }
        self.rules.push(rule.clone());
        Ok(RoundPlan {
            law,
            rule,
            member: None,
        })
    }

    fn realizable(&self) -> bool {
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversaries::Instance;
    use crate::model::{Distribution, DistributionClass, HypothesisClass};
    use crate::rational::{int, ratio, Rational};
    use std::sync::Arc;

    fn ctx(n: usize, cap: i64) -> LevelContext {
        let u = DistributionClass::smoothed(Distribution::uniform(n), int(cap)).unwrap();
        LevelContext::shared(
            Arc::new(HypothesisClass::thresholds(n)),
            Arc::new(u),
            ratio(1, 4),
        )
        .unwrap()
    }

    fn run(
        c: LevelContext,
        horizon: usize,
        seed: u64,
        mut check: impl FnMut(&SmoothedAdversary, &Distribution),
    ) {
        let mut a = make_smoothed_adversarial(c, seed).unwrap();
        let mut history = Vec::new();
        for t in 1..=horizon {
            let plan = a.next_round(t, &history).unwrap();
            check(&a, &plan.law);
            let x = usize::draw(&plan.law, &mut cell(seed, streams::POINT, t as u64));
            history.push((x, false));
        }
    }

    #[test]
    fn cap_one_is_the_base() {
        let base = Distribution::uniform(8);
        run(ctx(8, 1), 10, 2, |_, mu| assert_eq!(mu, &base));
    }

    #[test]
    fn cap_is_placed_on_the_disagreement_region() {
        let c = ctx(16, 4);
        let base = Distribution::uniform(16);
        let class = c.class().clone();
        for seed in 0..5 {
            run(c.clone(), 30, seed, |a, mu| {
                let region = class.disagreement_region(a.version_space());
                let want = (int(4) * base.mass_of(&region)).min(Rational::from_integer(1.into()));
                assert_eq!(mu.mass_of(&region), want);
                assert!(!a.version_space().is_empty());
            });
        }
    }
}
