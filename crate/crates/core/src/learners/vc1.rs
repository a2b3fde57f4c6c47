use std::sync::Arc;

use super::experts::{GroupedHedge, MistakeState};
use super::Learner;
use crate::error::{Error, Result};
use crate::model::InstanceSpace;

/// Predicts `1[x ≼ x_max]`, where `x_max` is the largest positive seen so far.
pub struct Vc1Learner {
    order: Arc<InstanceSpace>,
    x_max: Option<usize>,
    x: Option<usize>,
    t: usize,
    flagged: Vec<usize>,
}

pub fn make_vc1_learner(order: Arc<InstanceSpace>) -> Result<Vc1Learner> {
    order.require_order()?;
    Ok(Vc1Learner {
        order,
        x_max: None,
        x: None,
        t: 0,
        flagged: Vec::new(),
    })
}

impl Vc1Learner {
    pub fn x_max(&self) -> Option<usize> {
        self.x_max
    }

    /// Rounds whose positive label was incomparable with `x_max`; `x_max` was kept.
    pub fn flagged_rounds(&self) -> &[usize] {
        &self.flagged
    }
}

fn below(order: &InstanceSpace, x: usize, anchor: Option<usize>) -> bool {
    anchor.is_some_and(|a| order.precedes_eq(x, a))
}

fn check_point(order: &InstanceSpace, x: usize) -> Result<()> {
    if x >= order.n() {
        return Err(Error::input(format!("point {x} out of range")));
    }
    Ok(())
}

impl Learner<usize> for Vc1Learner {
    fn predict(&mut self, x: &usize) -> Result<bool> {
        check_point(&self.order, *x)?;
        self.t += 1;
        self.x = Some(*x);
        Ok(below(&self.order, *x, self.x_max))
    }

    fn observe(&mut self, y: bool) -> Result<()> {
        let x = self
            .x
            .take()
            .ok_or_else(|| Error::input("observe called before predict"))?;
        if y {
            match self.x_max {
                None => self.x_max = Some(x),
                Some(m) if self.order.precedes_eq(m, x) => self.x_max = Some(x),
                Some(m) if self.order.precedes_eq(x, m) => {}
                Some(_) => self.flagged.push(self.t),
            }
        }
        Ok(())
    }
}

/// State of the anchor expert: predicts 0 before its first time, then `1[x ≼ x_{t_l}]`
/// for the latest time `t_l ∈ S` reached so far.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnchorState {
    pub anchor: Option<usize>,
}

impl MistakeState<usize> for AnchorState {
    type Ctx = Arc<InstanceSpace>;
    type Key = Option<usize>;

    fn branch(&self, order: &Arc<InstanceSpace>, x: &usize, in_s: bool) -> Result<(bool, Self)> {
        check_point(order, *x)?;
        if in_s {
            Ok((true, AnchorState { anchor: Some(*x) }))
        } else {
            Ok((below(order, *x, self.anchor), self.clone()))
        }
    }

    fn key(&self) -> Option<usize> {
        self.anchor
    }
}

/// Fixed-rate Hedge over the anchor experts `E(S)` with `|S| ≤ K_T`.
pub fn make_vc1_optimistic(
    order: Arc<InstanceSpace>,
    horizon: usize,
    k_t: usize,
    cap: u64,
    seed: u64,
) -> Result<GroupedHedge<usize, AnchorState>> {
    order.require_order()?;
    GroupedHedge::new(
        order,
        AnchorState { anchor: None },
        horizon,
        k_t,
        cap,
        seed,
        "use a smaller T or K_T",
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_history_predicts_zero() {
        let mut l = make_vc1_learner(Arc::new(InstanceSpace::chain(6))).unwrap();
        for x in 0..6 {
            assert!(!l.predict(&x).unwrap());
            l.observe(false).unwrap();
        }
    }

    #[test]
    fn chain_history() {
        let mut l = make_vc1_learner(Arc::new(InstanceSpace::chain(8))).unwrap();
        l.predict(&3).unwrap();
        l.observe(true).unwrap();
        l.predict(&5).unwrap();
        l.observe(false).unwrap();
        assert_eq!(l.x_max(), Some(3));
        assert!(l.predict(&2).unwrap());
        l.observe(true).unwrap();
        assert!(!l.predict(&4).unwrap());
    }

    #[test]
    fn incomparable_positive_is_flagged() {
        // 0 is the root with children 1 and 2.
        let order = Arc::new(InstanceSpace::with_order(vec![None, Some(0), Some(0)]).unwrap());
        let mut l = make_vc1_learner(order).unwrap();
        l.predict(&1).unwrap();
        l.observe(true).unwrap();
        l.predict(&2).unwrap();
        l.observe(true).unwrap();
        assert_eq!(l.x_max(), Some(1));
        assert_eq!(l.flagged_rounds(), &[2]);
    }

    #[test]
    fn anchor_expert_segments() {
        let order = Arc::new(InstanceSpace::chain(6));
        let s = AnchorState { anchor: None };
        let (p, s) = s.branch(&order, &4, false).unwrap();
        assert!(!p);
        let (p, s) = s.branch(&order, &2, true).unwrap();
        assert!(p);
        assert_eq!(s.anchor, Some(2));
        assert!(s.branch(&order, &1, false).unwrap().0);
        assert!(!s.branch(&order, &3, false).unwrap().0);
    }

    #[test]
    fn unordered_space_is_rejected() {
        assert!(make_vc1_learner(Arc::new(InstanceSpace::new(3).unwrap())).is_err());
    }
}
