use rand::Rng;

use super::{Adversary, Mode, Realizer, RoundPlan};
use crate::dims::{validate_tree_certificate, InteractionTree, TreeKind};
use crate::error::{Error, Result};
use crate::model::{DistributionClass, HypothesisClass, PointSet};
use crate::rational::{int, to_f64};
use crate::rng::{cell, streams};

/// One node on the sampled root-to-leaf path.
#[derive(Clone, Debug)]
struct Step {
    realizer: Realizer,
    /// Edge functions `f_{v,0}`, `f_{v,1}`.
    edges: [usize; 2],
    /// The branch taken below this node.
    branch: bool,
    /// Bias of `B_t` above 1/2 in agnostic mode.
    p: f64,
}

/// Walks a shattered tree along a path drawn once per game.
///
/// Agnostic mode: epochs of `n₀ = ⌊T/d⌋` rounds, one per depth; labels follow the
/// taken edge with probability `1/2 + p_k` where the edge functions disagree and are
/// fair coins elsewhere. Realizable mode: one round per depth, every label given by
/// the leaf function of the path.
pub struct TreeWalkAdversary {
    class: HypothesisClass,
    mode: Mode,
    path: Vec<Step>,
    epoch_len: usize,
    leaf_fn: usize,
    tail: Realizer,
    seed: u64,
}

pub fn make_tree_walk_adversary(
    tree: &InteractionTree,
    kind: &TreeKind,
    class: &HypothesisClass,
    u: &DistributionClass,
    horizon: usize,
    mode: Mode,
    seed: u64,
) -> Result<TreeWalkAdversary> {
    if horizon == 0 {
        return Err(Error::input("horizon must be at least 1"));
    }
    match (mode, kind) {
        (Mode::Agnostic, TreeKind::Plain(_)) => {}
        (Mode::Realizable, TreeKind::StrictEta(eps, eta))
            if eta * int(4 * horizon as i64) <= *eps => {}
        _ => return Err(Error::input(
            "agnostic walks need a plain tree, realizable walks a strict tree with eta ≤ eps/(4T)",
        )),
    }
    if !validate_tree_certificate(tree, class, kind)? {
        return Err(Error::input("tree certificate is invalid"));
    }
    if tree.depth == 0 {
        return Err(Error::input("tree has depth 0"));
    }
    let d = tree.depth.min(horizon);
    let epoch_len = match mode {
        Mode::Agnostic => horizon / d,
        Mode::Realizable => 1,
    };
    let mut setup = cell(seed, streams::SETUP, 0);
    let mut path = Vec::with_capacity(d);
    let mut v = 0;
    for _ in 0..d {
        let node = &tree.nodes[v];
        let mu = &tree.pool[node.mu];
        let edges = [node.f0, node.f1.expect("validated edge")];
        let branch: bool = setup.gen();
        let gap = to_f64(&mu.disagreement(class, edges[0], edges[1]));
        let p = to_f64(kind.eps()).min(1.0 / (epoch_len as f64).sqrt()) / (8.0 * gap);
        path.push(Step {
            realizer: Realizer::new(u, mu)?,
            edges,
            branch,
            p,
        });
        v = 2 * v + 1 + branch as usize;
    }
    let last = path.last().expect("depth ≥ 1");
    let leaf_fn = last.edges[last.branch as usize];
    Ok(TreeWalkAdversary {
        class: class.clone(),
        mode,
        path,
        epoch_len,
        leaf_fn,
        tail: Realizer::new(u, &u.default_member())?,
        seed,
    })
}

impl TreeWalkAdversary {
    /// The function on the last edge of the sampled path.
    pub fn leaf_function(&self) -> usize {
        self.leaf_fn
    }

    /// Branches taken, root first.
    pub fn path(&self) -> Vec<bool> {
        self.path.iter().map(|s| s.branch).collect()
    }

    /// Bias `p_k` of each epoch.
    pub fn biases(&self) -> Vec<f64> {
        self.path.iter().map(|s| s.p).collect()
    }

    /// Rounds covered by the walk; later rounds play the default member.
    pub fn walk_rounds(&self) -> usize {
        self.path.len() * self.epoch_len
    }

    fn agnostic_rule(&self, step: &Step, t: usize) -> PointSet {
        let mut rng = cell(self.seed, streams::LABEL, t as u64);
        let b = rng.gen::<f64>() < 0.5 + step.p;
        let c: bool = rng.gen();
        let taken = self.class.row(step.edges[step.branch as usize]);
        let other = self.class.row(step.edges[!step.branch as usize]);
        let follow = if b { taken } else { other };
        let n = self.class.n();
        let mut rule = PointSet::with_capacity(n);
        for x in 0..n {
            let y = if taken.contains(x) == other.contains(x) {
                c
            } else {
                follow.contains(x)
            };
            rule.set(x, y);
        }
        rule
    }
}

impl Adversary<usize> for TreeWalkAdversary {
    fn next_round(&mut self, t: usize, _history: &[(usize, bool)]) -> Result<RoundPlan<usize>> {
        let k = (t - 1) / self.epoch_len;
        let Some(step) = self.path.get(k) else {
            let (law, member) = self.tail.realize(self.seed, t);
            return Ok(RoundPlan {
                law,
                rule: self.class.row(self.leaf_fn).clone(),
                member,
            });
        };
        let (law, member) = step.realizer.realize(self.seed, t);
        let rule = match self.mode {
            Mode::Agnostic => self.agnostic_rule(step, t),
            Mode::Realizable => self.class.row(self.leaf_fn).clone(),
        };
        Ok(RoundPlan { law, rule, member })
    }

    fn realizable(&self) -> bool {
        self.mode == Mode::Realizable
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dims::{eps_dimension, SearchConfig, TreeNode};
    use crate::model::Distribution;
    use crate::rational::ratio;

    fn two_point() -> (HypothesisClass, DistributionClass) {
        // f0 = 00, f1 = 11, f2 = 10: f0 and f1 disagree everywhere.
        let class = HypothesisClass::from_matrix(&[
            vec![false, false],
            vec![true, true],
            vec![true, false],
        ])
        .unwrap();
        let u = DistributionClass::list(vec![Distribution::uniform(2)]).unwrap();
        (class, u)
    }

    #[test]
    fn bias_formula() {
        // Disagreement exactly ε = 1/4 under the node law, n₀ = 16.
        let class = HypothesisClass::thresholds(4);
        let u = DistributionClass::list(vec![Distribution::uniform(4)]).unwrap();
        let tree = InteractionTree {
            depth: 1,
            pool: vec![Distribution::uniform(4)],
            nodes: vec![TreeNode {
                mu: 0,
                f0: 1,
                f1: Some(2),
                region: None,
            }],
        };
        let kind = TreeKind::Plain(ratio(1, 4));
        let a = make_tree_walk_adversary(&tree, &kind, &class, &u, 16, Mode::Agnostic, 0).unwrap();
        assert_eq!(a.biases(), vec![0.125]);
        assert_eq!(a.walk_rounds(), 16);
    }

    #[test]
    fn depth_one_agnostic_labels() {
        let (class, u) = two_point();
        let tree = InteractionTree {
            depth: 1,
            pool: vec![Distribution::uniform(2)],
            nodes: vec![TreeNode {
                mu: 0,
                f0: 0,
                f1: Some(1),
                region: None,
            }],
        };
        let kind = TreeKind::Plain(int(1));
        let mut a =
            make_tree_walk_adversary(&tree, &kind, &class, &u, 400, Mode::Agnostic, 3).unwrap();
        let taken = a.leaf_function();
        let mut follows = 0;
        for t in 1..=400 {
            let plan = a.next_round(t, &[]).unwrap();
            // Both points lie in the disagreement region, so the rule is one edge function.
            assert!(plan.rule == *class.row(0) || plan.rule == *class.row(1));
            follows += (plan.rule == *class.row(taken)) as usize;
        }
        // p = min(1, 1/20)/8 = 1/160: the taken edge appears with probability 0.50625.
        assert!((follows as f64 / 400.0 - 0.50625).abs() < 0.1);
    }

    #[test]
    fn realizable_walk_is_consistent_with_its_leaf() {
        let class = HypothesisClass::thresholds(8);
        let u = DistributionClass::dirac_all(8);
        let horizon = 5;
        let kind = TreeKind::StrictEta(ratio(1, 2), ratio(1, 40));
        let report = eps_dimension(&class, &u, &kind, SearchConfig::default()).unwrap();
        let tree = report.certificate.unwrap();
        for seed in 0..8 {
            let mut a =
                make_tree_walk_adversary(&tree, &kind, &class, &u, horizon, Mode::Realizable, seed)
                    .unwrap();
            let leaf = a.leaf_function();
            for t in 1..=horizon {
                let plan = a.next_round(t, &[]).unwrap();
                assert!(u.contains(&plan.law));
                assert_eq!(&plan.rule, class.row(leaf));
            }
        }
    }

    #[test]
    fn kind_and_mode_must_match() {
        let (class, u) = two_point();
        let tree = InteractionTree {
            depth: 1,
            pool: vec![Distribution::uniform(2)],
            nodes: vec![TreeNode {
                mu: 0,
                f0: 0,
                f1: Some(1),
                region: None,
            }],
        };
        assert!(make_tree_walk_adversary(
            &tree,
            &TreeKind::Plain(int(1)),
            &class,
            &u,
            4,
            Mode::Realizable,
            0
        )
        .is_err());
        let bad = InteractionTree {
            depth: 1,
            pool: vec![Distribution::uniform(2)],
            nodes: vec![TreeNode {
                mu: 0,
                f0: 0,
                f1: Some(2),
                region: None,
            }],
        };
        assert!(make_tree_walk_adversary(
            &bad,
            &TreeKind::Plain(int(1)),
            &class,
            &u,
            4,
            Mode::Agnostic,
            0
        )
        .is_err());
    }
}
