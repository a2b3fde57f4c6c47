use rand::Rng;

use super::{Adversary, RoundPlan};
use crate::error::{Error, Result};
use crate::model::{Distribution, DistributionClass, HypothesisClass, PointSet};
use crate::rng::{cell, streams};

/// Draws from one fixed member every round and labels by one function, each label
/// flipped independently with probability `noise`.
pub struct IidAdversary {
    mu: Distribution,
    member: Option<usize>,
    positive: PointSet,
    negative: PointSet,
    noise: f64,
    seed: u64,
}

pub fn make_iid(
    u: &DistributionClass,
    mu: Distribution,
    class: &HypothesisClass,
    f: usize,
    noise: f64,
    seed: u64,
) -> Result<IidAdversary> {
    if f >= class.m() {
        return Err(Error::input(format!("function {f} out of range")));
    }
    if !(0.0..=1.0).contains(&noise) {
        return Err(Error::input("noise must lie in [0, 1]"));
    }
    if !u.contains(&mu) {
        return Err(Error::input(
            "iid distribution is not a member of the class",
        ));
    }
    let positive = class.row(f).clone();
    let mut negative = positive.clone();
    negative.toggle_range(..);
    Ok(IidAdversary {
        member: u.member_index(&mu),
        mu,
        positive,
        negative,
        noise,
        seed,
    })
}

impl Adversary<usize> for IidAdversary {
    fn next_round(&mut self, t: usize, _history: &[(usize, bool)]) -> Result<RoundPlan<usize>> {
        let flip =
            self.noise > 0.0 && cell(self.seed, streams::NOISE, t as u64).gen::<f64>() < self.noise;
        let rule = if flip {
            self.negative.clone()
        } else {
            self.positive.clone()
        };
        Ok(RoundPlan {
            law: self.mu.clone(),
            rule,
            member: self.member,
        })
    }

    fn realizable(&self) -> bool {
        self.noise == 0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversaries::Instance;
    use crate::rng::cell;

    #[test]
    fn marginal_is_uniform() {
        let n = 8;
        let class = HypothesisClass::thresholds(n);
        let u = DistributionClass::list(vec![Distribution::uniform(n)]).unwrap();
        let mut a = make_iid(&u, Distribution::uniform(n), &class, 4, 0.0, 11).unwrap();
        let rounds = 8000;
        let mut counts = vec![0f64; n];
        for t in 1..=rounds {
            let plan = a.next_round(t, &[]).unwrap();
            let x = usize::draw(&plan.law, &mut cell(11, streams::POINT, t as u64));
            assert_eq!(usize::apply(&plan.rule, &x), x < 4);
            counts[x] += 1.0;
        }
        let expected = rounds as f64 / n as f64;
        let chi2: f64 = counts
            .iter()
            .map(|c| (c - expected).powi(2) / expected)
            .sum();
        // 7 degrees of freedom; the 0.999 quantile is about 24.3.
        assert!(chi2 < 24.3, "chi2 = {chi2}");
    }

    #[test]
    fn rejects_outsiders() {
        let class = HypothesisClass::thresholds(4);
        let u = DistributionClass::list(vec![Distribution::uniform(4)]).unwrap();
        assert!(make_iid(&u, Distribution::dirac(4, 0), &class, 0, 0.0, 0).is_err());
        assert!(make_iid(&u, Distribution::uniform(4), &class, 9, 0.0, 0).is_err());
    }
}
