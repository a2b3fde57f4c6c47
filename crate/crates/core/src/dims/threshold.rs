use num_traits::Signed;

use crate::error::{Error, Result};
use crate::model::{
    Distribution, DistributionClass, InstanceSpace, SmoothedToleranceSpec, ToleranceFunction,
};
use crate::rational::{int, ratio, Rational};

/// Longest chain `x₁ ≺ … ≺ x_k` whose initial segment `{x ≼ x₁}` and successive
/// intervals `(x_{l−1}, x_l]` each carry supremum mass `≥ ε`. Ties go to the
/// lexicographically smallest cut sequence.
pub fn threshold_chain(
    order: &InstanceSpace,
    u: &DistributionClass,
    eps: &Rational,
) -> Result<Vec<usize>> {
    order.require_order()?;
    if !eps.is_positive() {
        return Err(Error::input("epsilon must be positive"));
    }
    let n = order.n();
    let mut by_depth: Vec<usize> = (0..n).collect();
    by_depth.sort_by_key(|&x| (order.initial_segment(x).count_ones(..), x));
    // best[x]: lexicographically smallest longest valid chain ending at x.
    let mut best: Vec<Option<Vec<usize>>> = vec![None; n];
    for &x in &by_depth {
        let mut cand: Option<Vec<usize>> = None;
        if &u.sup_mass(order.initial_segment(x)) >= eps {
            cand = Some(vec![x]);
        }
        for a in order.root_path(x) {
            if a == x {
                break;
            }
            let Some(prev) = &best[a] else { continue };
            if &u.sup_mass(&order.interval(Some(a), x)) < eps {
                continue;
            }
            let mut seq = prev.clone();
            seq.push(x);
            let better = match &cand {
                None => true,
                Some(c) => seq.len() > c.len() || (seq.len() == c.len() && seq < *c),
            };
            if better {
                cand = Some(seq);
            }
        }
        best[x] = cand;
    }
    Ok(best.into_iter().flatten().fold(Vec::new(), |acc, s| {
        if s.len() > acc.len() || (s.len() == acc.len() && s < acc) {
            s
        } else {
            acc
        }
    }))
}

pub fn threshold_dimension(
    order: &InstanceSpace,
    u: &DistributionClass,
    eps: &Rational,
) -> Result<usize> {
    Ok(threshold_chain(order, u, eps)?.len())
}

/// Chain points listed bottom to top.
fn chain_points(order: &InstanceSpace) -> Result<Vec<usize>> {
    if !order.is_chain() {
        return Err(Error::input(
            "the witness measure is built for total orders only",
        ));
    }
    let mut pts: Vec<usize> = (0..order.n()).collect();
    pts.sort_by_key(|&x| order.initial_segment(x).count_ones(..));
    Ok(pts)
}

/// Greedy cuts along a chain: each cut is the first point at which the interval
/// since the previous cut reaches supremum mass `ε`.
pub fn greedy_cuts(
    order: &InstanceSpace,
    u: &DistributionClass,
    eps: &Rational,
) -> Result<Vec<usize>> {
    let pts = chain_points(order)?;
    let mut cuts = Vec::new();
    let mut prev: Option<usize> = None;
    for &x in &pts {
        if &u.sup_mass(&order.interval(prev, x)) >= eps {
            cuts.push(x);
            prev = Some(x);
        }
    }
    Ok(cuts)
}

/// Base measure and tolerance under which every member of `u` satisfies
/// `μ(I) ≤ ρ(μ₀(I))` on every order interval, for the grid `ε_j = 2^{-j}`, `j = 1..=levels`.
///
/// Level `j` contributes its greedy cuts with weight `2^{-j}/k_j` each, and the
/// total is normalized to 1. `ρ` is `4ε_j` from weight `w_j` upward and `2ε_N`
/// below the finest weight.
pub fn threshold_witness_measure(
    order: &InstanceSpace,
    u: &DistributionClass,
    levels: usize,
) -> Result<SmoothedToleranceSpec> {
    if levels == 0 {
        return Err(Error::input("the grid needs at least one level"));
    }
    if levels > 60 {
        return Err(Error::input("at most 60 grid levels are supported"));
    }
    let n = order.n();
    let mut raw = vec![Rational::from_integer(0.into()); n];
    let mut weights = Vec::with_capacity(levels);
    for j in 1..=levels {
        let eps_j = ratio(1, 1i64 << j);
        let cuts = greedy_cuts(order, u, &eps_j)?;
        if cuts.is_empty() {
            return Err(Error::input(format!("no cut reaches mass {eps_j}")));
        }
        let w = &eps_j / int(cuts.len() as i64);
        for &x in &cuts {
            raw[x] += &w;
        }
        weights.push(w);
    }
    let total: Rational = raw.iter().sum();
    let base = Distribution::new(raw.into_iter().map(|r| r / &total).collect())?;
    let finest = ratio(1, 1i64 << levels);
    let mut steps: Vec<(Rational, Rational)> = weights
        .iter()
        .enumerate()
        .map(|(i, w)| (w.clone(), ratio(4, 1i64 << (i + 1))))
        .collect();
    steps.reverse();
    let floor = finest * int(2);
    let rho = ToleranceFunction::new(floor, steps)?;
    Ok(SmoothedToleranceSpec { base, rho })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform_chain(n: usize) -> (InstanceSpace, DistributionClass) {
        (
            InstanceSpace::chain(n),
            DistributionClass::list(vec![Distribution::uniform(n)]).unwrap(),
        )
    }

    #[test]
    fn chain_of_eight() {
        let (o, u) = uniform_chain(8);
        assert_eq!(
            threshold_chain(&o, &u, &ratio(1, 4)).unwrap(),
            vec![1, 3, 5, 7]
        );
        assert_eq!(threshold_dimension(&o, &u, &int(2)).unwrap(), 0);
        assert_eq!(
            threshold_dimension(&o, &DistributionClass::dirac_all(8), &ratio(1, 2)).unwrap(),
            8
        );
    }

    #[test]
    fn missing_order_is_an_error() {
        let u = DistributionClass::dirac_all(3);
        assert!(threshold_dimension(&InstanceSpace::new(3).unwrap(), &u, &ratio(1, 2)).is_err());
    }

    #[test]
    fn dirac_base_sits_on_point_zero() {
        let o = InstanceSpace::chain(5);
        let u = DistributionClass::list(vec![Distribution::dirac(5, 0)]).unwrap();
        let spec = threshold_witness_measure(&o, &u, 3).unwrap();
        assert_eq!(spec.base, Distribution::dirac(5, 0));
    }
}
