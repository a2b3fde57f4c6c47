use fixedbitset::FixedBitSet;
use num_traits::Signed;
use std::collections::HashMap;

use super::tree::{InteractionTree, TreeKind, TreeNode};
use crate::error::{Error, Result};
use crate::model::{Distribution, DistributionClass, HypothesisClass};
use crate::rational::{int, Rational};

pub const DEFAULT_MAX_DEPTH: usize = 8;
pub const DEFAULT_BUDGET: u64 = 200_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchConfig {
    pub max_depth: usize,
    /// Maximum number of distinct search states expanded.
    pub budget: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            max_depth: DEFAULT_MAX_DEPTH,
            budget: DEFAULT_BUDGET,
        }
    }
}

#[derive(Clone, Debug)]
pub struct DimensionReport {
    pub value: usize,
    pub certificate: Option<InteractionTree>,
    /// False when the node pool may miss mixtures, the budget ran out, or the depth cap bound.
    pub exact: bool,
    pub budget_exhausted: bool,
    pub expansions: u64,
}

/// Pairwise distances under every pool distribution, thresholded into bitsets.
struct Geometry {
    pool: Vec<Distribution>,
    m: usize,
    dist: Vec<Vec<Rational>>,
    /// `near[p][f]`: functions within `ε/3` (`η` for strict trees) of `f` under pool entry `p`.
    near: Vec<Vec<FixedBitSet>>,
    /// `far[p][f]`: functions at distance `≥ ε` (plain) or `≥ 2ε/3` (relaxed).
    far: Vec<Vec<FixedBitSet>>,
}

impl Geometry {
    fn new(
        class: &HypothesisClass,
        pool: Vec<Distribution>,
        far_at: &Rational,
        near_at: &Rational,
    ) -> Self {
        let m = class.m();
        let disagreements: Vec<Vec<FixedBitSet>> = (0..m)
            .map(|f| (0..m).map(|g| class.pair_disagreement(f, g)).collect())
            .collect();
        let mut dist = Vec::with_capacity(pool.len());
        let mut near = Vec::with_capacity(pool.len());
        let mut far = Vec::with_capacity(pool.len());
        for mu in &pool {
            let mut dm = vec![Rational::from_integer(0.into()); m * m];
            let mut nr = vec![FixedBitSet::with_capacity(m); m];
            let mut fr = vec![FixedBitSet::with_capacity(m); m];
            for f in 0..m {
                for g in 0..m {
                    let d = if g < f {
                        dm[g * m + f].clone()
                    } else {
                        mu.mass_of(&disagreements[f][g])
                    };
                    if &d <= near_at {
                        nr[f].insert(g);
                    }
                    if &d >= far_at {
                        fr[f].insert(g);
                    }
                    dm[f * m + g] = d;
                }
            }
            dist.push(dm);
            near.push(nr);
            far.push(fr);
        }
        Geometry {
            pool,
            m,
            dist,
            near,
            far,
        }
    }

    fn d(&self, p: usize, f: usize, g: usize) -> &Rational {
        &self.dist[p][f * self.m + g]
    }
}

fn and(a: &FixedBitSet, b: &FixedBitSet) -> FixedBitSet {
    let mut c = a.clone();
    c.intersect_with(b);
    c
}

fn big_enough(c: &FixedBitSet, d: usize) -> bool {
    d < usize::BITS as usize - 1 && c.count_ones(..) >= 1usize << d
}

#[derive(Clone, Copy, Debug)]
struct Witness {
    mu: usize,
    f: usize,
    g: Option<usize>,
}

#[derive(Default)]
struct Entry {
    /// Largest depth known reachable, with its witness.
    ok: Option<(usize, Witness)>,
    /// Smallest depth known unreachable.
    fail: Option<usize>,
}

struct BudgetHit;

struct Search<'a> {
    geo: &'a Geometry,
    relaxed: bool,
    /// Node functions allowed in relaxed trees.
    allowed: FixedBitSet,
    memo: HashMap<FixedBitSet, Entry>,
    budget: u64,
    spent: u64,
}

impl<'a> Search<'a> {
    fn reach(&mut self, c: &FixedBitSet, d: usize) -> std::result::Result<bool, BudgetHit> {
        if d == 0 {
            return Ok(true);
        }
        if !big_enough(c, d) {
            return Ok(false);
        }
        if let Some(e) = self.memo.get(c) {
            if e.ok.is_some_and(|(k, _)| k >= d) {
                return Ok(true);
            }
            if e.fail.is_some_and(|k| k <= d) {
                return Ok(false);
            }
        }
        if self.spent >= self.budget {
            return Err(BudgetHit);
        }
        self.spent += 1;
        let found = if self.relaxed {
            self.expand_relaxed(c, d)?
        } else {
            self.expand_plain(c, d)?
        };
        let e = self.memo.entry(c.clone()).or_default();
        match found {
            Some(w) => {
                if e.ok.is_none_or(|(k, _)| k < d) {
                    e.ok = Some((d, w));
                }
            }
            None => e.fail = Some(e.fail.map_or(d, |k| k.min(d))),
        }
        Ok(found.is_some())
    }

    fn expand_plain(
        &mut self,
        c: &FixedBitSet,
        d: usize,
    ) -> std::result::Result<Option<Witness>, BudgetHit> {
        let geo = self.geo;
        let mut cands: Vec<(usize, usize, usize)> = Vec::new();
        for p in 0..geo.pool.len() {
            for f in c.ones() {
                for g in geo.far[p][f].intersection(c) {
                    if g > f {
                        cands.push((p, f, g));
                    }
                }
            }
        }
        // Widest separations first.
        cands.sort_by(|a, b| geo.d(b.0, b.1, b.2).cmp(geo.d(a.0, a.1, a.2)));
        for (p, f, g) in cands {
            let left = and(c, &geo.near[p][f]);
            let right = and(c, &geo.near[p][g]);
            if !big_enough(&left, d - 1) || !big_enough(&right, d - 1) {
                continue;
            }
            if self.reach(&left, d - 1)? && self.reach(&right, d - 1)? {
                return Ok(Some(Witness {
                    mu: p,
                    f,
                    g: Some(g),
                }));
            }
        }
        Ok(None)
    }

    fn expand_relaxed(
        &mut self,
        c: &FixedBitSet,
        d: usize,
    ) -> std::result::Result<Option<Witness>, BudgetHit> {
        let geo = self.geo;
        if d == 1 {
            for p in 0..geo.pool.len() {
                for f in c.ones() {
                    if let Some(g) = geo.far[p][f].intersection(c).next() {
                        return Ok(Some(Witness {
                            mu: p,
                            f,
                            g: Some(g),
                        }));
                    }
                }
            }
            return Ok(None);
        }
        for p in 0..geo.pool.len() {
            for f in self.allowed.clone().ones() {
                let left = and(c, &geo.near[p][f]);
                let right = and(c, &geo.far[p][f]);
                if !big_enough(&left, d - 1) || !big_enough(&right, d - 1) {
                    continue;
                }
                if self.reach(&left, d - 1)? && self.reach(&right, d - 1)? {
                    return Ok(Some(Witness { mu: p, f, g: None }));
                }
            }
        }
        Ok(None)
    }

    fn witness(&self, c: &FixedBitSet, d: usize) -> Witness {
        match self.memo.get(c).and_then(|e| e.ok) {
            Some((k, w)) if k >= d => w,
            _ => panic!("no witness recorded for a reachable state"),
        }
    }

    fn build(&self, c: &FixedBitSet, d: usize, i: usize, nodes: &mut Vec<Option<TreeNode>>) {
        if d == 0 {
            return;
        }
        let w = self.witness(c, d);
        let geo = self.geo;
        let (left, right) = if self.relaxed {
            if d == 1 {
                nodes[i] = Some(TreeNode {
                    mu: w.mu,
                    f0: w.f,
                    f1: w.g,
                    region: None,
                });
                return;
            }
            (and(c, &geo.near[w.mu][w.f]), and(c, &geo.far[w.mu][w.f]))
        } else {
            let g = w.g.expect("plain witness has two functions");
            (and(c, &geo.near[w.mu][w.f]), and(c, &geo.near[w.mu][g]))
        };
        let f1 = if self.relaxed { None } else { w.g };
        nodes[i] = Some(TreeNode {
            mu: w.mu,
            f0: w.f,
            f1,
            region: None,
        });
        self.build(&left, d - 1, 2 * i + 1, nodes);
        self.build(&right, d - 1, 2 * i + 2, nodes);
    }

    fn certificate(&self, c: &FixedBitSet, d: usize) -> InteractionTree {
        let mut slots = vec![None; (1usize << d) - 1];
        self.build(c, d, 0, &mut slots);
        let mut nodes: Vec<TreeNode> = slots
            .into_iter()
            .map(|n| n.expect("complete tree"))
            .collect();
        let mut used: Vec<usize> = nodes.iter().map(|n| n.mu).collect();
        used.sort_unstable();
        used.dedup();
        for n in &mut nodes {
            n.mu = used.binary_search(&n.mu).expect("used entry");
        }
        let pool = used.iter().map(|&p| self.geo.pool[p].clone()).collect();
        InteractionTree {
            depth: d,
            pool,
            nodes,
        }
    }
}

/// Largest depth of a plain, strict or relaxed shattered tree found within the budget, with
/// a certificate. Node distributions range over the class's node pool.
pub fn eps_dimension(
    class: &HypothesisClass,
    u: &DistributionClass,
    kind: &TreeKind,
    cfg: SearchConfig,
) -> Result<DimensionReport> {
    let eps = kind.eps();
    if !eps.is_positive() {
        return Err(Error::input("epsilon must be positive"));
    }
    if u.n() != class.n() {
        return Err(Error::input(
            "distribution class and hypothesis class have different point counts",
        ));
    }
    let third = eps / int(3);
    let (relaxed, far_at, near_at) = match kind {
        TreeKind::Plain(_) => (false, eps.clone(), third),
        TreeKind::StrictEta(_, eta) => {
            if !eta.is_positive() || eta * int(3) > *eps {
                return Err(Error::input("eta must lie in (0, eps/3]"));
            }
            (false, eps.clone(), eta.clone())
        }
        TreeKind::Relaxed(_) => (true, &third * int(2), third),
        TreeKind::Region(_) => {
            return Err(Error::input("tree search supports plain, strict_eta and relaxed trees; region trees are validate-only"))
        }
    };
    let pool = u.node_pool(class);
    let geo = Geometry::new(
        class,
        pool.entries.into_iter().map(|e| e.dist).collect(),
        &far_at,
        &near_at,
    );
    let full = class.full_mask().0;
    let mut search = Search {
        geo: &geo,
        relaxed,
        allowed: full.clone(),
        memo: HashMap::new(),
        budget: cfg.budget,
        spent: 0,
    };
    let mut value = 0;
    let mut decided = false;
    let mut exhausted = false;
    for d in 1..=cfg.max_depth + 1 {
        match search.reach(&full, d) {
            Ok(true) if d <= cfg.max_depth => value = d,
            Ok(true) => break,
            Ok(false) => {
                decided = true;
                break;
            }
            Err(BudgetHit) => {
                exhausted = true;
                break;
            }
        }
    }
    let certificate = (value > 0).then(|| search.certificate(&full, value));
    Ok(DimensionReport {
        value,
        certificate: certificate.or_else(|| Some(InteractionTree::empty())),
        exact: decided && pool.exact,
        budget_exhausted: exhausted,
        expansions: search.spent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dims::tree::validate_tree_certificate;
    use crate::dims::vc::littlestone_dimension;
    use crate::rational::ratio;

    #[test]
    fn dirac_all_matches_littlestone() {
        let class = HypothesisClass::thresholds(6);
        let u = DistributionClass::dirac_all(6);
        let kind = TreeKind::Plain(ratio(1, 2));
        let r = eps_dimension(&class, &u, &kind, SearchConfig::default()).unwrap();
        assert_eq!(r.value, littlestone_dimension(&class));
        assert!(r.exact);
        assert!(validate_tree_certificate(r.certificate.as_ref().unwrap(), &class, &kind).unwrap());
    }

    #[test]
    fn singleton_class_has_dimension_zero() {
        let class = HypothesisClass::from_matrix(&[vec![true, false, true]]).unwrap();
        let u = DistributionClass::dirac_all(3);
        for kind in [TreeKind::Plain(ratio(1, 8)), TreeKind::Relaxed(ratio(1, 8))] {
            assert_eq!(
                eps_dimension(&class, &u, &kind, SearchConfig::default())
                    .unwrap()
                    .value,
                0
            );
        }
    }

    #[test]
    fn relaxed_certificates_validate() {
        let class = HypothesisClass::thresholds(8);
        let u = DistributionClass::list(vec![Distribution::uniform(8)]).unwrap();
        let kind = TreeKind::Relaxed(ratio(1, 4));
        let r = eps_dimension(&class, &u, &kind, SearchConfig::default()).unwrap();
        assert!(r.value >= 1);
        assert!(validate_tree_certificate(r.certificate.as_ref().unwrap(), &class, &kind).unwrap());
    }

    #[test]
    fn tiny_budget_is_reported() {
        let class = HypothesisClass::thresholds(8);
        let u = DistributionClass::dirac_all(8);
        let r = eps_dimension(
            &class,
            &u,
            &TreeKind::Plain(ratio(1, 2)),
            SearchConfig {
                max_depth: 8,
                budget: 2,
            },
        )
        .unwrap();
        assert!(r.budget_exhausted);
        assert!(!r.exact);
    }
}
