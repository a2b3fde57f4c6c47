use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use crate::model::{Distribution, HypothesisClass};
use crate::rational::Rational;

pub const DEFAULT_EXACT_COVER_CAP: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoverMode {
    Exact { cap: usize },
    Greedy,
}

/// `ball[f]` holds every `g` with `μ(f ≠ g) ≤ ε`.
fn balls(class: &HypothesisClass, mu: &Distribution, eps: &Rational) -> Vec<FixedBitSet> {
    let m = class.m();
    let mut balls = vec![FixedBitSet::with_capacity(m); m];
    for f in 0..m {
        balls[f].insert(f);
        for g in f + 1..m {
            if &mu.disagreement(class, f, g) <= eps {
                balls[f].insert(g);
                balls[g].insert(f);
            }
        }
    }
    balls
}

/// Smallest number of functions whose `ε`-balls under `μ` cover the class.
pub fn covering_number(
    class: &HypothesisClass,
    mu: &Distribution,
    eps: &Rational,
    mode: CoverMode,
) -> Result<usize> {
    let m = class.m();
    let balls = balls(class, mu, eps);
    match mode {
        CoverMode::Greedy => Ok(greedy_cover(&balls, m).len()),
        CoverMode::Exact { cap } => {
            if m > cap {
                return Err(Error::Cap(format!(
                    "exact covering needs at most {cap} functions, class has {m}; use greedy mode"
                )));
            }
            let greedy = greedy_cover(&balls, m).len();
            let mut best = greedy;
            let uncovered = {
                let mut u = FixedBitSet::with_capacity(m);
                u.insert_range(..);
                u
            };
            branch(&balls, &uncovered, 0, &mut best);
            Ok(best)
        }
    }
}

fn greedy_cover(balls: &[FixedBitSet], m: usize) -> Vec<usize> {
    let mut uncovered = FixedBitSet::with_capacity(m);
    uncovered.insert_range(..);
    let mut chosen = Vec::new();
    while !uncovered.is_clear() {
        let f = (0..m)
            .max_by_key(|&f| {
                (
                    balls[f].intersection_count(&uncovered),
                    std::cmp::Reverse(f),
                )
            })
            .expect("nonempty class");
        uncovered.difference_with(&balls[f]);
        chosen.push(f);
    }
    chosen
}

/// Branches on the ball that covers the lowest uncovered function.
fn branch(balls: &[FixedBitSet], uncovered: &FixedBitSet, used: usize, best: &mut usize) {
    let Some(pivot) = uncovered.ones().next() else {
        *best = (*best).min(used);
        return;
    };
    if used + 1 >= *best {
        return;
    }
    let largest = balls
        .iter()
        .map(|b| b.intersection_count(uncovered))
        .max()
        .unwrap_or(1)
        .max(1);
    let remaining = uncovered.count_ones(..);
    if used + remaining.div_ceil(largest) >= *best {
        return;
    }
    let mut options: Vec<usize> = (0..balls.len())
        .filter(|&f| balls[f].contains(pivot))
        .collect();
    options.sort_by_key(|&f| std::cmp::Reverse(balls[f].intersection_count(uncovered)));
    for f in options {
        let mut next = uncovered.clone();
        next.difference_with(&balls[f]);
        branch(balls, &next, used + 1, best);
    }
}

/// Greedy maximal `ε`-packing in index order: pairwise `μ(f ≠ g) ≥ ε`.
pub fn packing_set(class: &HypothesisClass, mu: &Distribution, eps: &Rational) -> Vec<usize> {
    let mut chosen: Vec<usize> = Vec::new();
    for f in 0..class.m() {
        if chosen.iter().all(|&g| &mu.disagreement(class, f, g) >= eps) {
            chosen.push(f);
        }
    }
    chosen
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    #[test]
    fn trivial_covers() {
        let c = HypothesisClass::thresholds(8);
        let mu = Distribution::uniform(8);
        assert_eq!(
            covering_number(&c, &mu, &int(1), CoverMode::Exact { cap: 20 }).unwrap(),
            1
        );
        let two = HypothesisClass::from_matrix(&[vec![true, false], vec![false, false]]).unwrap();
        let mu2 = Distribution::uniform(2);
        assert_eq!(
            covering_number(&two, &mu2, &ratio(1, 4), CoverMode::Exact { cap: 20 }).unwrap(),
            2
        );
        assert!(covering_number(
            &HypothesisClass::powerset(5),
            &Distribution::uniform(5),
            &ratio(1, 4),
            CoverMode::Exact { cap: 20 }
        )
        .is_err());
    }

    #[test]
    fn packing_extremes() {
        let c = HypothesisClass::thresholds(8);
        let mu = Distribution::uniform(8);
        assert_eq!(packing_set(&c, &mu, &ratio(1, 40320)).len(), 9);
        assert_eq!(packing_set(&c, &mu, &ratio(3, 2)).len(), 1);
    }
}
