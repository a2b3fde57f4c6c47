use rand::Rng;

use super::{constant_rule, unseen, Adversary, Mode, Realizer, RoundPlan};
use crate::critical::{LevelContext, EMPTY_LEVEL};
use crate::error::Result;
use crate::model::{PointSet, VersionMask};
use crate::rng::{cell, streams};

/// Adaptive adversary driving the level of its dataset `D_t` down one critical hit at a
/// time. Each round with `k_t > 0` it plays the witness of `B_{k_t}(D_t)` and labels
/// critical points with a fresh fair coin.
///
/// Agnostic mode keeps `D_t` frozen off critical hits and labels every point with the
/// coin. Realizable mode appends every round and labels off-hit points with the halving
/// label, so `D_{T+1}` stays realizable.
pub struct CriticalAdversary {
    ctx: LevelContext,
    mode: Mode,
    cap: i64,
    v: VersionMask,
    seed: u64,
    seen: usize,
    /// `(k_t, B_{k_t}, rule)` of every planned round.
    rounds: Vec<(i64, PointSet, PointSet)>,
    hits: usize,
}

pub fn make_critical_adversary(
    ctx: LevelContext,
    horizon: usize,
    mode: Mode,
    seed: u64,
) -> CriticalAdversary {
    // k_t ranges over k ≤ T (agnostic) or k ≤ 2^T (realizable).
    let cap = match mode {
        Mode::Agnostic => horizon as i64,
        Mode::Realizable => 1i64.checked_shl(horizon.min(62) as u32).unwrap_or(i64::MAX),
    };
    let v = ctx.class().full_mask();
    CriticalAdversary {
        ctx,
        mode,
        cap,
        v,
        seed,
        seen: 0,
        rounds: Vec::new(),
        hits: 0,
    }
}

impl CriticalAdversary {
    /// `k_t` of every planned round.
    pub fn levels(&self) -> Vec<i64> {
        self.rounds.iter().map(|r| r.0).collect()
    }

    /// Version space of the current dataset `D_t`.
    pub fn version_space(&self) -> &VersionMask {
        &self.v
    }

    /// Rounds whose point fell in the critical region with `k_t > 0`.
    pub fn critical_hits(&self) -> usize {
        self.hits
    }

    fn absorb(&mut self, x: usize, round: usize) {
        let (k, region, rule) = &self.rounds[round];
        let hit = *k > 0 && region.contains(x);
        self.hits += hit as usize;
        if hit || self.mode == Mode::Realizable {
            self.v = self.ctx.class().restrict(&self.v, x, rule.contains(x));
        }
    }

    /// Label keeping the larger level; ties go to 1.
    fn halving_rule(&self, coin: bool, region: &PointSet) -> Result<PointSet> {
        let n = self.ctx.class().n();
        let mut rule = PointSet::with_capacity(n);
        for x in 0..n {
            let y = if region.contains(x) {
                coin
            } else {
                self.ctx.halving_label(&self.v, x)?
            };
            rule.set(x, y);
        }
        Ok(rule)
    }
}

impl Adversary<usize> for CriticalAdversary {
    fn next_round(&mut self, t: usize, history: &[(usize, bool)]) -> Result<RoundPlan<usize>> {
        let start = self.seen;
        for (i, (x, _)) in unseen(&mut self.seen, history)?.iter().enumerate() {
            self.absorb(*x, start + i);
        }
        let level = self.ctx.level(&self.v);
        assert!(
            level != EMPTY_LEVEL,
            "the adversary's dataset left the level sets"
        );
        let k = level.min(self.cap);
        let u = self.ctx.distributions();
        let n = self.ctx.class().n();
        let region = if k > 0 {
            self.ctx.critical_region(&self.v, k)
        } else {
            PointSet::with_capacity(n)
        };
        let mu = if k > 0 {
            u.witness(&region)
        } else {
            u.default_member()
        };
        let (law, member) = Realizer::new(u, &mu)?.realize(self.seed, t);
        let coin: bool = cell(self.seed, streams::LABEL, t as u64).gen();
        let rule = match self.mode {
            Mode::Agnostic => constant_rule(n, coin),
            Mode::Realizable => self.halving_rule(coin, &region)?,
        };
        self.rounds.push((k, region, rule.clone()));
        Ok(RoundPlan { law, rule, member })
    }

    fn realizable(&self) -> bool {
        self.mode == Mode::Realizable
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversaries::Instance;
    use crate::model::{Distribution, DistributionClass, HypothesisClass};
    use crate::rational::{int, ratio};

    fn ctx(eps: (i64, i64)) -> LevelContext {
        let u = DistributionClass::list(vec![Distribution::uniform(8)]).unwrap();
        LevelContext::new(HypothesisClass::thresholds(8), u, ratio(eps.0, eps.1)).unwrap()
    }

    /// Plays against a learner that always predicts 0 and returns the adversary.
    fn play(ctx: LevelContext, mode: Mode, horizon: usize, seed: u64) -> CriticalAdversary {
        let mut a = make_critical_adversary(ctx, horizon, mode, seed);
        let mut history = Vec::new();
        for t in 1..=horizon {
            let plan = a.next_round(t, &history).unwrap();
            let x = usize::draw(&plan.law, &mut cell(seed, streams::POINT, t as u64));
            history.push((x, false));
        }
        a.next_round(horizon + 1, &history).unwrap();
        a
    }

    #[test]
    fn realizable_mode_stays_realizable_and_halves_at_worst() {
        for seed in 0..20 {
            let a = play(ctx((1, 8)), Mode::Realizable, 24, seed);
            assert!(!a.version_space().is_empty());
            let ks = a.levels();
            for w in ks.windows(2) {
                assert!(w[1] >= w[0] / 2 && w[1] <= w[0]);
            }
        }
    }

    #[test]
    fn agnostic_mode_drops_by_one_per_hit() {
        for seed in 0..20 {
            let a = play(ctx((1, 8)), Mode::Agnostic, 24, seed);
            let ks = a.levels();
            for w in ks.windows(2) {
                assert!(w[1] == w[0] || w[1] == w[0] - 1);
            }
            assert!(ks[0] - ks[ks.len() - 1] <= a.critical_hits() as i64);
        }
    }

    #[test]
    fn witness_carries_half_eps_on_the_region() {
        let c = ctx((1, 4));
        let mut a = make_critical_adversary(c.clone(), 8, Mode::Agnostic, 1);
        let plan = a.next_round(1, &[]).unwrap();
        let k = a.levels()[0];
        assert!(k > 0);
        let region = c.critical_region(&c.class().full_mask(), k);
        assert!(plan.law.mass_of(&region) >= ratio(1, 8));
    }

    #[test]
    fn level_zero_plays_default_member() {
        let u = DistributionClass::list(vec![Distribution::dirac(4, 0)]).unwrap();
        let c = LevelContext::new(HypothesisClass::thresholds(4), u.clone(), int(2)).unwrap();
        let mut a = make_critical_adversary(c, 4, Mode::Realizable, 0);
        let plan = a.next_round(1, &[]).unwrap();
        assert_eq!(a.levels(), vec![0]);
        assert_eq!(plan.law, u.default_member());
    }
}
