use itertools::Itertools;
use std::collections::{HashMap, HashSet};

use crate::model::{HypothesisClass, VersionMask};

/// Size of the largest point set on which `class` realizes every labeling.
pub fn vc_dimension(class: &HypothesisClass) -> usize {
    let n = class.n();
    let m = class.m();
    let mut best = 0;
    for size in 1..=n {
        if 1usize.checked_shl(size as u32).is_none_or(|need| need > m) {
            break;
        }
        let found = (0..n).combinations(size).any(|s| shatters(class, &s));
        if !found {
            break;
        }
        best = size;
    }
    best
}

pub(crate) fn shatters(class: &HypothesisClass, points: &[usize]) -> bool {
    let patterns: HashSet<u64> = (0..class.m())
        .map(|f| {
            points.iter().enumerate().fold(0u64, |acc, (i, &x)| {
                acc | (u64::from(class.label(f, x)) << i)
            })
        })
        .collect();
    patterns.len() == 1usize << points.len()
}

/// Littlestone dimension of the whole class.
pub fn littlestone_dimension(class: &HypothesisClass) -> usize {
    let mut memo = HashMap::new();
    ldim_mask(class, &class.full_mask(), &mut memo).max(0) as usize
}

/// Littlestone dimension of the functions in `v`; −1 when `v` is empty.
pub fn ldim_mask(
    class: &HypothesisClass,
    v: &VersionMask,
    memo: &mut HashMap<VersionMask, i64>,
) -> i64 {
    if v.is_empty() {
        return -1;
    }
    let size = v.len();
    if size == 1 {
        return 0;
    }
    if let Some(&d) = memo.get(v) {
        return d;
    }
    // A tree of depth d needs 2^d distinct functions.
    let cap = (usize::BITS - 1 - size.leading_zeros()) as i64;
    let mut best = 0;
    for x in class.disagreement_region(v).ones() {
        let v0 = class.restrict(v, x, false);
        let v1 = class.restrict(v, x, true);
        let lo = ldim_mask(class, &v0, memo).min(ldim_mask(class, &v1, memo));
        best = best.max(lo + 1);
        if best == cap {
            break;
        }
    }
    memo.insert(v.clone(), best);
    best
}
