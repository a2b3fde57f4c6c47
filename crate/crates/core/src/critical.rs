//! Critical regions `B_k(D; ε)`, dataset levels, `k(ε)`, the compressed recursion for
//! tree orders, and the halving label.
//!
//! Levels depend on a dataset only through its version space, so every query is
//! keyed on a [`VersionMask`].

use fixedbitset::FixedBitSet;
use num_traits::Signed;
use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use crate::error::{Error, Result};
use crate::model::{
    version_space, DistributionClass, HypothesisClass, InstanceSpace, LabeledDataset, PointSet,
    VersionMask,
};
use crate::rational::Rational;

/// Level of the empty version space.
pub const EMPTY_LEVEL: i64 = -1;

/// Memoized level oracle for one `(F, U, ε)`. Cloning shares the memo.
#[derive(Clone)]
pub struct LevelContext {
    class: Arc<HypothesisClass>,
    u: Arc<DistributionClass>,
    eps: Rational,
    memo: Arc<RwLock<HashMap<VersionMask, i64>>>,
}

impl LevelContext {
    pub fn new(class: HypothesisClass, u: DistributionClass, eps: Rational) -> Result<Self> {
        Self::shared(Arc::new(class), Arc::new(u), eps)
    }

    pub fn shared(
        class: Arc<HypothesisClass>,
        u: Arc<DistributionClass>,
        eps: Rational,
    ) -> Result<Self> {
        if !eps.is_positive() {
            return Err(Error::input("epsilon must be positive"));
        }
        if class.n() != u.n() {
            return Err(Error::input(
                "distribution class and hypothesis class have different point counts",
            ));
        }
        Ok(LevelContext {
            class,
            u,
            eps,
            memo: Arc::new(RwLock::new(HashMap::new())),
        })
    }

    pub fn class(&self) -> &HypothesisClass {
        &self.class
    }

    pub fn class_arc(&self) -> Arc<HypothesisClass> {
        self.class.clone()
    }

    pub fn distributions(&self) -> &DistributionClass {
        &self.u
    }

    pub fn eps(&self) -> &Rational {
        &self.eps
    }

    pub fn memo_len(&self) -> usize {
        self.memo.read().expect("memo lock").len()
    }

    /// Largest `k` with `sup_μ μ(B_k) ≥ ε`; 0 when no `k ≥ 1` qualifies, −1 for `∅`.
    pub fn level(&self, v: &VersionMask) -> i64 {
        if v.is_empty() {
            return EMPTY_LEVEL;
        }
        if v.len() == 1 {
            return 0;
        }
        if let Some(&l) = self.memo.read().expect("memo lock").get(v) {
            return l;
        }
        let splits = self.split_levels(v);
        let top = splits.iter().map(|&(_, c)| c).max().unwrap_or(EMPTY_LEVEL);
        let mut level = 0;
        for k in 1..=top + 1 {
            let region = region_from(self.class.n(), &splits, k);
            if self.u.sup_mass(&region) >= self.eps {
                level = k;
            } else {
                break;
            }
        }
        self.memo
            .write()
            .expect("memo lock")
            .insert(v.clone(), level);
        level
    }

    /// `(x, min(level(V|x→0), level(V|x→1)))` over the disagreement region of `V`.
    fn split_levels(&self, v: &VersionMask) -> Vec<(usize, i64)> {
        self.class
            .disagreement_region(v)
            .ones()
            .map(|x| {
                let l0 = self.level(&self.class.restrict(v, x, false));
                let l1 = self.level(&self.class.restrict(v, x, true));
                (x, l0.min(l1))
            })
            .collect()
    }

    /// `B_k`: points whose both one-point extensions keep level `≥ k−1`.
    pub fn critical_region(&self, v: &VersionMask, k: i64) -> PointSet {
        assert!(k >= 1, "critical regions start at k = 1");
        if v.len() < 2 {
            return FixedBitSet::with_capacity(self.class.n());
        }
        region_from(self.class.n(), &self.split_levels(v), k)
    }

    /// Whether `x ∈ B_k(V)`, without building the whole region.
    pub fn in_critical_region(&self, v: &VersionMask, x: usize, k: i64) -> bool {
        assert!(k >= 1, "critical regions start at k = 1");
        if v.len() < 2 {
            return false;
        }
        let l0 = self.level(&self.class.restrict(v, x, false));
        let l1 = self.level(&self.class.restrict(v, x, true));
        l0.min(l1) >= k - 1
    }

    pub fn level_of(&self, data: &LabeledDataset) -> Result<i64> {
        Ok(self.level(&version_space(&self.class, data)?))
    }

    pub fn critical_region_of(&self, data: &LabeledDataset, k: i64) -> Result<PointSet> {
        Ok(self.critical_region(&version_space(&self.class, data)?, k))
    }

    /// Label whose extension at `x` keeps the larger level, ties to 1.
    pub fn halving_label(&self, v: &VersionMask, x: usize) -> Result<bool> {
        let k = self.level(v);
        if k == EMPTY_LEVEL {
            return Err(Error::input("halving label needs a nonempty version space"));
        }
        let l0 = self.level(&self.class.restrict(v, x, false));
        let l1 = self.level(&self.class.restrict(v, x, true));
        let y = l1 >= l0;
        assert!(
            l0.max(l1) >= k / 2,
            "halving guarantee violated at level {k}"
        );
        Ok(y)
    }

    /// Label whose extension at `x` has the larger level, ties to 1; the rule of the
    /// level learner.
    pub fn argmax_label(&self, v: &VersionMask, x: usize) -> bool {
        self.level(&self.class.restrict(v, x, true))
            >= self.level(&self.class.restrict(v, x, false))
    }
}

fn region_from(n: usize, splits: &[(usize, i64)], k: i64) -> PointSet {
    let mut region = FixedBitSet::with_capacity(n);
    region.extend(splits.iter().filter(|&&(_, c)| c >= k - 1).map(|&(x, _)| x));
    region
}

/// `k(ε)`: the level of the empty dataset.
pub fn k_of_eps(class: &HypothesisClass, u: &DistributionClass, eps: &Rational) -> Result<i64> {
    let ctx = LevelContext::new(class.clone(), u.clone(), eps.clone())?;
    Ok(ctx.level(&class.full_mask()))
}

/// `L̃_0 = X`, `L̃_k = {x : sup_μ μ({x' : x ≺ x'} ∩ L̃_{k−1}) ≥ ε}`, stopping at the first
/// empty level or at `max_k`. The returned list starts with `L̃_0`.
pub fn tilde_levels(
    order: &InstanceSpace,
    u: &DistributionClass,
    eps: &Rational,
    max_k: usize,
) -> Result<Vec<PointSet>> {
    order.require_order()?;
    let n = order.n();
    let mut all = FixedBitSet::with_capacity(n);
    all.insert_range(..);
    let descendants: Vec<PointSet> = (0..n).map(|x| order.strict_descendants(x)).collect();
    let mut levels = vec![all];
    while levels.len() <= max_k {
        let prev = levels.last().expect("nonempty");
        if prev.is_clear() {
            break;
        }
        let mut next = FixedBitSet::with_capacity(n);
        for (x, d) in descendants.iter().enumerate().take(n) {
            let mut b = d.clone();
            b.intersect_with(prev);
            if &u.sup_mass(&b) >= eps {
                next.insert(x);
            }
        }
        levels.push(next);
    }
    Ok(levels)
}

/// Index of the last nonempty compressed level.
pub fn tilde_k(levels: &[PointSet]) -> usize {
    levels.iter().rposition(|l| !l.is_clear()).unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Distribution;
    use crate::rational::{int, ratio};

    #[test]
    fn dirac_all_level_is_littlestone() {
        let c = HypothesisClass::at_most_k(4, 1);
        assert_eq!(
            k_of_eps(&c, &DistributionClass::dirac_all(4), &ratio(1, 4)).unwrap(),
            1
        );
        let single = HypothesisClass::from_matrix(&[vec![true, false]]).unwrap();
        assert_eq!(
            k_of_eps(&single, &DistributionClass::dirac_all(2), &ratio(1, 4)).unwrap(),
            0
        );
    }

    #[test]
    fn contradictory_data_has_level_minus_one() {
        let c = HypothesisClass::thresholds(8);
        let ctx = LevelContext::new(c, DistributionClass::dirac_all(8), ratio(1, 2)).unwrap();
        let d = LabeledDataset {
            pairs: vec![(3, true), (3, false)],
        };
        assert_eq!(ctx.level_of(&d).unwrap(), -1);
        assert!(ctx.critical_region_of(&d, 1).unwrap().is_clear());
        assert!(ctx.halving_label(&VersionMask::empty(9), 0).is_err());
    }

    #[test]
    fn first_critical_region_is_disagreement() {
        let c = HypothesisClass::thresholds(8);
        let ctx =
            LevelContext::new(c.clone(), DistributionClass::dirac_all(8), ratio(1, 2)).unwrap();
        let v = version_space(
            &c,
            &LabeledDataset {
                pairs: vec![(2, true)],
            },
        )
        .unwrap();
        assert_eq!(ctx.critical_region(&v, 1), c.disagreement_region(&v));
    }

    #[test]
    fn compressed_levels_on_a_chain() {
        let o = InstanceSpace::chain(8);
        let u = DistributionClass::list(vec![Distribution::uniform(8)]).unwrap();
        let levels = tilde_levels(&o, &u, &ratio(1, 4), 10).unwrap();
        let sets: Vec<Vec<usize>> = levels.iter().map(|l| l.ones().collect()).collect();
        assert_eq!(sets[1], (0..6).collect::<Vec<_>>());
        assert_eq!(sets[2], (0..4).collect::<Vec<_>>());
        assert_eq!(sets[3], vec![0, 1]);
        assert!(sets[4].is_empty());
        assert_eq!(tilde_k(&levels), 3);
        let none = tilde_levels(&o, &u, &int(2), 10).unwrap();
        assert!(none[1].is_clear());
    }

    #[test]
    fn tie_prefers_one() {
        let c = HypothesisClass::from_matrix(&[vec![true], vec![false]]).unwrap();
        let ctx =
            LevelContext::new(c.clone(), DistributionClass::dirac_all(1), ratio(1, 2)).unwrap();
        assert!(ctx.halving_label(&c.full_mask(), 0).unwrap());
    }
}
