use fixedbitset::FixedBitSet;
use itertools::Itertools;
use num_traits::{One, Signed, Zero};
use rand::Rng;

use super::class::{HypothesisClass, PointSet};
use crate::error::{Error, Result};
use crate::rational::{to_f64, Rational};

/// Probability vector over `0..n` with exact masses. A float cumulative table is
/// kept alongside for sampling.
#[derive(Clone, Debug)]
pub struct Distribution {
    mass: Vec<Rational>,
    cumulative: Vec<f64>,
}

impl PartialEq for Distribution {
    fn eq(&self, other: &Self) -> bool {
        self.mass == other.mass
    }
}

impl Eq for Distribution {}

impl Distribution {
    pub fn new(mass: Vec<Rational>) -> Result<Self> {
        if mass.is_empty() {
            return Err(Error::input("distribution over zero points"));
        }
        if mass.iter().any(|p| p.is_negative()) {
            return Err(Error::input("distribution has a negative mass"));
        }
        let total: Rational = mass.iter().sum();
        if !total.is_one() {
            return Err(Error::input(format!(
                "distribution masses sum to {total}, not 1"
            )));
        }
        Ok(Self::from_masses_unchecked(mass))
    }

    fn from_masses_unchecked(mass: Vec<Rational>) -> Self {
        let mut acc = 0.0;
        let cumulative = mass
            .iter()
            .map(|p| {
                acc += to_f64(p);
                acc
            })
            .collect();
        Distribution { mass, cumulative }
    }

    pub fn uniform(n: usize) -> Self {
        let p = Rational::new(1.into(), (n as i64).into());
        Self::from_masses_unchecked(vec![p; n])
    }

    /// Uniform over a nonempty set of points.
    pub fn uniform_on(n: usize, set: &PointSet) -> Result<Self> {
        let k = set.count_ones(..);
        if k == 0 {
            return Err(Error::input("uniform distribution over an empty set"));
        }
        let p = Rational::new(1.into(), (k as i64).into());
        let mass = (0..n)
            .map(|x| {
                if set.contains(x) {
                    p.clone()
                } else {
                    Rational::zero()
                }
            })
            .collect();
        Ok(Self::from_masses_unchecked(mass))
    }

    pub fn dirac(n: usize, x: usize) -> Self {
        let mass = (0..n)
            .map(|i| {
                if i == x {
                    Rational::one()
                } else {
                    Rational::zero()
                }
            })
            .collect();
        Self::from_masses_unchecked(mass)
    }

    /// Uniform mixture of the given components.
    pub fn mixture(parts: &[&Distribution]) -> Self {
        assert!(!parts.is_empty(), "mixture of nothing");
        let n = parts[0].n();
        let w = Rational::new(1.into(), (parts.len() as i64).into());
        let mass = (0..n)
            .map(|x| parts.iter().map(|d| &d.mass[x]).sum::<Rational>() * &w)
            .collect();
        Self::from_masses_unchecked(mass)
    }

    pub fn n(&self) -> usize {
        self.mass.len()
    }

    pub fn masses(&self) -> &[Rational] {
        &self.mass
    }

    pub fn mass(&self, x: usize) -> &Rational {
        &self.mass[x]
    }

    pub fn mass_of(&self, set: &PointSet) -> Rational {
        set.ones().map(|x| &self.mass[x]).sum()
    }

    /// `μ(f ≠ g)`.
    pub fn disagreement(&self, class: &HypothesisClass, f: usize, g: usize) -> Rational {
        self.mass_of(&class.pair_disagreement(f, g))
    }

    pub fn support(&self) -> PointSet {
        let mut s = FixedBitSet::with_capacity(self.n());
        s.extend((0..self.n()).filter(|&x| !self.mass[x].is_zero()));
        s
    }

    pub fn is_dirac(&self) -> bool {
        self.mass.iter().filter(|p| !p.is_zero()).count() == 1
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.gen::<f64>() * self.cumulative[self.n() - 1];
        let i = self.cumulative.partition_point(|&c| c <= u);
        if i < self.n() {
            i
        } else {
            self.support().ones().next_back().expect("nonempty support")
        }
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.mass.iter().map(to_f64).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ClassKind {
    List(Vec<Distribution>),
    /// Every `μ` with `μ ≤ cap · base` pointwise.
    Smoothed {
        base: Distribution,
        cap: Rational,
    },
    DiracAll,
}

/// A family of distributions with exact supremum-mass queries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistributionClass {
    n: usize,
    kind: ClassKind,
    mixture_cap: usize,
}

/// One node distribution available to interaction-tree search.
#[derive(Clone, Debug)]
pub struct PoolEntry {
    pub dist: Distribution,
    /// Indices into the class list for list mixtures; empty otherwise.
    pub components: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct NodePool {
    pub entries: Vec<PoolEntry>,
    /// False when the pool may miss distributions of the mixture hull.
    pub exact: bool,
}

pub const DEFAULT_MIXTURE_CAP: usize = 3;

impl DistributionClass {
    pub fn list(list: Vec<Distribution>) -> Result<Self> {
        let n = list
            .first()
            .ok_or_else(|| Error::input("distribution list is empty"))?
            .n();
        if list.iter().any(|d| d.n() != n) {
            return Err(Error::input(
                "distributions in the list have different sizes",
            ));
        }
        Ok(DistributionClass {
            n,
            kind: ClassKind::List(list),
            mixture_cap: DEFAULT_MIXTURE_CAP,
        })
    }

    pub fn smoothed(base: Distribution, cap: Rational) -> Result<Self> {
        if cap < Rational::one() {
            return Err(Error::input("smoothing ratio cap must be at least 1"));
        }
        Ok(DistributionClass {
            n: base.n(),
            kind: ClassKind::Smoothed { base, cap },
            mixture_cap: DEFAULT_MIXTURE_CAP,
        })
    }

    pub fn dirac_all(n: usize) -> Self {
        DistributionClass {
            n,
            kind: ClassKind::DiracAll,
            mixture_cap: DEFAULT_MIXTURE_CAP,
        }
    }

    pub fn with_mixture_cap(mut self, cap: usize) -> Result<Self> {
        if cap == 0 {
            return Err(Error::input("mixture support cap must be at least 1"));
        }
        self.mixture_cap = cap;
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> &ClassKind {
        &self.kind
    }

    pub fn mixture_cap(&self) -> usize {
        self.mixture_cap
    }

    /// `max_{μ ∈ U} μ(B)`.
    pub fn sup_mass(&self, b: &PointSet) -> Rational {
        match &self.kind {
            ClassKind::List(list) => list
                .iter()
                .map(|d| d.mass_of(b))
                .max()
                .expect("nonempty list"),
            ClassKind::Smoothed { base, cap } => (cap * base.mass_of(b)).min(Rational::one()),
            ClassKind::DiracAll => {
                if b.is_clear() {
                    Rational::zero()
                } else {
                    Rational::one()
                }
            }
        }
    }

    /// A member of the class attaining `sup_mass(b)`.
    pub fn witness(&self, b: &PointSet) -> Distribution {
        match &self.kind {
            ClassKind::List(list) => {
                let mut best = 0;
                let mut best_mass = list[0].mass_of(b);
                for (i, d) in list.iter().enumerate().skip(1) {
                    let m = d.mass_of(b);
                    if m > best_mass {
                        best = i;
                        best_mass = m;
                    }
                }
                list[best].clone()
            }
            ClassKind::Smoothed { base, cap } => {
                let inside = base.mass_of(b);
                let capped = cap * &inside;
                let mass = if capped >= Rational::one() {
                    (0..self.n)
                        .map(|x| {
                            if b.contains(x) {
                                base.mass(x) / &inside
                            } else {
                                Rational::zero()
                            }
                        })
                        .collect()
                } else {
                    let rest = Rational::one() - &capped;
                    let outside = Rational::one() - &inside;
                    (0..self.n)
                        .map(|x| {
                            if b.contains(x) {
                                cap * base.mass(x)
                            } else {
                                base.mass(x) * &rest / &outside
                            }
                        })
                        .collect()
                };
                Distribution::from_masses_unchecked(mass)
            }
            ClassKind::DiracAll => Distribution::dirac(self.n, b.ones().next().unwrap_or(0)),
        }
    }

    /// The fixed member used when a choice is arbitrary.
    pub fn default_member(&self) -> Distribution {
        match &self.kind {
            ClassKind::List(list) => list[0].clone(),
            ClassKind::Smoothed { base, .. } => base.clone(),
            ClassKind::DiracAll => Distribution::dirac(self.n, 0),
        }
    }

    pub fn contains(&self, mu: &Distribution) -> bool {
        if mu.n() != self.n {
            return false;
        }
        match &self.kind {
            ClassKind::List(list) => list.iter().any(|d| d == mu),
            ClassKind::Smoothed { base, cap } => {
                (0..self.n).all(|x| mu.mass(x) <= &(cap * base.mass(x)))
            }
            ClassKind::DiracAll => mu.is_dirac(),
        }
    }

    /// Members of the class whose uniform mixture is `mu`: `[mu]` itself for a member,
    /// otherwise a list combination of at most `mixture_cap` entries.
    pub fn decompose(&self, mu: &Distribution) -> Option<Vec<Distribution>> {
        if self.contains(mu) {
            return Some(vec![mu.clone()]);
        }
        let ClassKind::List(list) = &self.kind else {
            return None;
        };
        (2..=self.mixture_cap.min(list.len())).find_map(|size| {
            (0..list.len()).combinations(size).find_map(|combo| {
                let parts: Vec<&Distribution> = combo.iter().map(|&i| &list[i]).collect();
                (Distribution::mixture(&parts) == *mu).then(|| parts.into_iter().cloned().collect())
            })
        })
    }

    /// Index of a member: its list position, or its point for a Dirac class. Smoothed
    /// members have no index.
    pub fn member_index(&self, mu: &Distribution) -> Option<usize> {
        match &self.kind {
            ClassKind::List(list) => list.iter().position(|d| d == mu),
            ClassKind::DiracAll => mu.is_dirac().then(|| mu.support().ones().next()).flatten(),
            ClassKind::Smoothed { .. } => None,
        }
    }

    /// Candidate node distributions for interaction-tree search.
    pub fn node_pool(&self, class: &HypothesisClass) -> NodePool {
        match &self.kind {
            ClassKind::List(list) => {
                let mut entries: Vec<PoolEntry> = list
                    .iter()
                    .enumerate()
                    .map(|(i, d)| PoolEntry {
                        dist: d.clone(),
                        components: vec![i],
                    })
                    .collect();
                for size in 2..=self.mixture_cap.min(list.len()) {
                    for combo in (0..list.len()).combinations(size) {
                        let parts: Vec<&Distribution> = combo.iter().map(|&i| &list[i]).collect();
                        let dist = Distribution::mixture(&parts);
                        if entries.iter().all(|e| e.dist != dist) {
                            entries.push(PoolEntry {
                                dist,
                                components: combo,
                            });
                        }
                    }
                }
                NodePool {
                    entries,
                    exact: list.len() == 1,
                }
            }
            ClassKind::DiracAll => NodePool {
                entries: (0..self.n)
                    .map(|x| PoolEntry {
                        dist: Distribution::dirac(self.n, x),
                        components: vec![],
                    })
                    .collect(),
                exact: true,
            },
            ClassKind::Smoothed { base, .. } => {
                let mut entries = vec![PoolEntry {
                    dist: base.clone(),
                    components: vec![],
                }];
                for f in 0..class.m() {
                    for g in f + 1..class.m() {
                        let dist = self.witness(&class.pair_disagreement(f, g));
                        if entries.iter().all(|e| e.dist != dist) {
                            entries.push(PoolEntry {
                                dist,
                                components: vec![],
                            });
                        }
                    }
                }
                NodePool {
                    entries,
                    exact: false,
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn set(n: usize, xs: &[usize]) -> PointSet {
        let mut s = FixedBitSet::with_capacity(n);
        s.extend(xs.iter().copied());
        s
    }

    #[test]
    fn sup_mass_closed_forms() {
        let sm = DistributionClass::smoothed(Distribution::uniform(16), int(4)).unwrap();
        assert_eq!(sm.sup_mass(&set(16, &[0, 1])), ratio(1, 2));
        assert_eq!(sm.sup_mass(&set(16, &[])), ratio(0, 1));
        let l = DistributionClass::list(vec![Distribution::dirac(2, 0), Distribution::dirac(2, 1)])
            .unwrap();
        assert_eq!(l.sup_mass(&set(2, &[1])), ratio(1, 1));
        assert_eq!(
            DistributionClass::dirac_all(3).sup_mass(&set(3, &[])),
            ratio(0, 1)
        );
    }

    #[test]
    fn smoothed_witness_layout() {
        let sm = DistributionClass::smoothed(Distribution::uniform(16), int(4)).unwrap();
        let w = sm.witness(&set(16, &[0, 1]));
        assert_eq!(w.mass(0), &ratio(1, 4));
        assert_eq!(w.mass(1), &ratio(1, 4));
        for x in 2..16 {
            assert_eq!(w.mass(x), &ratio(1, 28));
        }
        assert!(sm.contains(&w));
    }

    #[test]
    fn list_and_dirac_witnesses() {
        let l = DistributionClass::list(vec![Distribution::dirac(4, 0), Distribution::uniform(4)])
            .unwrap();
        assert_eq!(l.witness(&set(4, &[1, 2])), Distribution::uniform(4));
        assert_eq!(
            DistributionClass::dirac_all(5).witness(&set(5, &[3])),
            Distribution::dirac(5, 3)
        );
    }

    #[test]
    fn rejects_bad_masses() {
        assert!(Distribution::new(vec![ratio(1, 2), ratio(1, 3)]).is_err());
        assert!(Distribution::new(vec![ratio(3, 2), ratio(-1, 2)]).is_err());
        assert!(DistributionClass::smoothed(Distribution::uniform(2), ratio(1, 2)).is_err());
    }
}
