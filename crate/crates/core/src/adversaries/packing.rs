use rand::Rng;

use super::{Adversary, Realizer, RoundPlan};
use crate::dims::packing_set;
use crate::error::{Error, Result};
use crate::model::{ClassKind, Distribution, DistributionClass, HypothesisClass, PointSet};
use crate::rational::Rational;
use crate::rng::{cell, streams};

/// Plays one function of an `ε`-packing, drawn once per game, under a fixed mixture of
/// the class realized by one member per round.
pub struct PackingAdversary {
    realizer: Realizer,
    packing: Vec<usize>,
    target: usize,
    rule: PointSet,
    seed: u64,
}

/// The mixture the packing is taken under: the uniform mixture of a list, the base of a
/// smoothed class, uniform over points for Diracs.
fn mixture(u: &DistributionClass) -> (Distribution, Realizer) {
    match u.kind() {
        ClassKind::List(list) => {
            let parts: Vec<&Distribution> = list.iter().collect();
            let mu = Distribution::mixture(&parts);
            let realizer = Realizer {
                parts: list.clone(),
                indices: (0..list.len()).map(Some).collect(),
            };
            (mu, realizer)
        }
        ClassKind::Smoothed { base, .. } => (
            base.clone(),
            Realizer {
                parts: vec![base.clone()],
                indices: vec![None],
            },
        ),
        ClassKind::DiracAll => {
            let n = u.n();
            let realizer = Realizer {
                parts: (0..n).map(|x| Distribution::dirac(n, x)).collect(),
                indices: (0..n).map(Some).collect(),
            };
            (Distribution::uniform(n), realizer)
        }
    }
}

pub fn make_packing_adversary(
    class: &HypothesisClass,
    u: &DistributionClass,
    eps: &Rational,
    seed: u64,
) -> Result<PackingAdversary> {
    let (mu, realizer) = mixture(u);
    let packing = packing_set(class, &mu, eps);
    if packing.len() < 2 {
        return Err(Error::input(format!(
            "the {eps}-packing has {} function(s); need at least 2",
            packing.len()
        )));
    }
    let target = packing[cell(seed, streams::SETUP, 0).gen_range(0..packing.len())];
    Ok(PackingAdversary {
        realizer,
        packing,
        target,
        rule: class.row(target).clone(),
        seed,
    })
}

impl PackingAdversary {
    pub fn packing(&self) -> &[usize] {
        &self.packing
    }

    pub fn target(&self) -> usize {
        self.target
    }
}

impl Adversary<usize> for PackingAdversary {
    fn next_round(&mut self, t: usize, _history: &[(usize, bool)]) -> Result<RoundPlan<usize>> {
        let (law, member) = self.realizer.realize(self.seed, t);
        Ok(RoundPlan {
            law,
            rule: self.rule.clone(),
            member,
        })
    }

    fn realizable(&self) -> bool {
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    #[test]
    fn eps_one_pair_disagrees_on_support() {
        let class = HypothesisClass::thresholds(4);
        let u = DistributionClass::list(vec![Distribution::uniform(4)]).unwrap();
        let a = make_packing_adversary(&class, &u, &int(1), 0).unwrap();
        assert_eq!(a.packing(), &[0, 4]);
        let d = class.pair_disagreement(0, 4);
        assert_eq!(d.count_ones(..), 4);
    }

    #[test]
    fn too_small_packing_is_an_error() {
        let class = HypothesisClass::thresholds(4);
        let u = DistributionClass::list(vec![Distribution::uniform(4)]).unwrap();
        assert!(make_packing_adversary(&class, &u, &ratio(3, 2), 0).is_err());
    }

    #[test]
    fn target_is_fixed_and_members_are_realized() {
        let class = HypothesisClass::thresholds(4);
        let u = DistributionClass::list(vec![Distribution::dirac(4, 0), Distribution::dirac(4, 3)])
            .unwrap();
        let mut a = make_packing_adversary(&class, &u, &ratio(1, 2), 5).unwrap();
        let b = make_packing_adversary(&class, &u, &ratio(1, 2), 5).unwrap();
        assert_eq!(a.target(), b.target());
        let mut seen = [false; 2];
        for t in 1..=40 {
            let plan = a.next_round(t, &[]).unwrap();
            assert!(u.contains(&plan.law));
            seen[plan.member.unwrap()] = true;
            assert_eq!(&plan.rule, class.row(a.target()));
        }
        assert_eq!(seen, [true, true]);
    }
}
