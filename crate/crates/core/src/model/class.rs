use fixedbitset::FixedBitSet;
use std::collections::HashSet;

use crate::error::{Error, Result};

/// Set of point indices.
pub type PointSet = FixedBitSet;

/// Subset of hypothesis indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VersionMask(pub FixedBitSet);

impl VersionMask {
    pub fn empty(m: usize) -> Self {
        VersionMask(FixedBitSet::with_capacity(m))
    }

    pub fn full(m: usize) -> Self {
        let mut b = FixedBitSet::with_capacity(m);
        b.insert_range(..);
        VersionMask(b)
    }

    pub fn from_indices(m: usize, idx: impl IntoIterator<Item = usize>) -> Self {
        let mut b = FixedBitSet::with_capacity(m);
        b.extend(idx);
        VersionMask(b)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_clear()
    }

    pub fn len(&self) -> usize {
        self.0.count_ones(..)
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.contains(i)
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.ones()
    }

    pub fn first(&self) -> Option<usize> {
        self.0.ones().next()
    }

    pub fn intersection(&self, other: &FixedBitSet) -> VersionMask {
        let mut b = self.0.clone();
        b.intersect_with(other);
        VersionMask(b)
    }

    pub fn difference(&self, other: &FixedBitSet) -> VersionMask {
        let mut b = self.0.clone();
        b.difference_with(other);
        VersionMask(b)
    }
}

/// Finite class of binary functions over `0..n`, stored both by row and by column.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HypothesisClass {
    n: usize,
    rows: Vec<FixedBitSet>,
    /// `cols[x]` holds the functions with `f(x) = 1`.
    cols: Vec<FixedBitSet>,
}

impl HypothesisClass {
    /// Builds a class from rows of ones. Rows must be distinct and nonempty in number.
    pub fn from_rows(n: usize, rows: Vec<FixedBitSet>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::input("hypothesis class needs at least one function"));
        }
        let mut seen = HashSet::with_capacity(rows.len());
        for r in &rows {
            if r.len() != n {
                return Err(Error::input(
                    "row length does not match the number of points",
                ));
            }
            if !seen.insert(r.clone()) {
                return Err(Error::input("hypothesis rows must be pairwise distinct"));
            }
        }
        let m = rows.len();
        let mut cols = vec![FixedBitSet::with_capacity(m); n];
        for (i, r) in rows.iter().enumerate() {
            for x in r.ones() {
                cols[x].insert(i);
            }
        }
        Ok(HypothesisClass { n, rows, cols })
    }

    pub fn from_matrix(matrix: &[Vec<bool>]) -> Result<Self> {
        let n = matrix.first().map_or(0, Vec::len);
        let rows = matrix
            .iter()
            .map(|r| {
                let mut b = FixedBitSet::with_capacity(n);
                b.extend(r.iter().enumerate().filter(|(_, &v)| v).map(|(i, _)| i));
                b
            })
            .collect();
        Self::from_rows(n, rows)
    }

    /// Thresholds `x ↦ 1[x < θ]` for `θ = 0..=n`, in increasing `θ`.
    pub fn thresholds(n: usize) -> Self {
        let rows = (0..=n)
            .map(|theta| {
                let mut b = FixedBitSet::with_capacity(n);
                b.insert_range(..theta);
                b
            })
            .collect();
        Self::from_rows(n, rows).expect("thresholds are distinct")
    }

    /// All subsets of `0..n`, row `i` being the binary expansion of `i`.
    pub fn powerset(n: usize) -> Self {
        assert!(n < 24, "powerset class too large");
        let rows = (0..1usize << n)
            .map(|s| {
                let mut b = FixedBitSet::with_capacity(n);
                b.extend((0..n).filter(|x| s >> x & 1 == 1));
                b
            })
            .collect();
        Self::from_rows(n, rows).expect("subsets are distinct")
    }

    /// Indicators `1_S` with `|S| ≤ k`, by size then lexicographically.
    pub fn at_most_k(n: usize, k: usize) -> Self {
        use itertools::Itertools;
        let mut rows = Vec::new();
        for size in 0..=k.min(n) {
            for s in (0..n).combinations(size) {
                let mut b = FixedBitSet::with_capacity(n);
                b.extend(s);
                rows.push(b);
            }
        }
        Self::from_rows(n, rows).expect("subsets are distinct")
    }

    /// The empty function plus initial segments `x ↦ 1[x ≼ θ]` of a tree order.
    pub fn tree_segments(space: &super::InstanceSpace) -> Result<Self> {
        space.require_order()?;
        let n = space.n();
        let mut rows = vec![FixedBitSet::with_capacity(n)];
        rows.extend((0..n).map(|t| space.initial_segment(t).clone()));
        Self::from_rows(n, rows)
    }

    pub fn m(&self) -> usize {
        self.rows.len()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn label(&self, f: usize, x: usize) -> bool {
        self.rows[f].contains(x)
    }

    pub fn row(&self, f: usize) -> &FixedBitSet {
        &self.rows[f]
    }

    pub fn ones_at(&self, x: usize) -> &FixedBitSet {
        &self.cols[x]
    }

    pub fn full_mask(&self) -> VersionMask {
        VersionMask::full(self.m())
    }

    /// Functions of `v` that output `y` at `x`.
    pub fn restrict(&self, v: &VersionMask, x: usize, y: bool) -> VersionMask {
        if y {
            v.intersection(&self.cols[x])
        } else {
            v.difference(&self.cols[x])
        }
    }

    /// Points where two functions of `v` disagree.
    pub fn disagreement_region(&self, v: &VersionMask) -> PointSet {
        let mut set = FixedBitSet::with_capacity(self.n);
        if v.is_empty() {
            return set;
        }
        let total = v.len();
        for x in 0..self.n {
            let ones = v.0.intersection_count(&self.cols[x]);
            if ones > 0 && ones < total {
                set.insert(x);
            }
        }
        set
    }

    /// Points where `f` and `g` differ.
    pub fn pair_disagreement(&self, f: usize, g: usize) -> PointSet {
        let mut d = self.rows[f].clone();
        d.symmetric_difference_with(&self.rows[g]);
        d
    }

    pub fn to_matrix(&self) -> Vec<Vec<bool>> {
        self.rows
            .iter()
            .map(|r| (0..self.n).map(|x| r.contains(x)).collect())
            .collect()
    }

    /// The class restricted to the functions in `v`, keeping their order.
    pub fn subclass(&self, v: &VersionMask) -> HypothesisClass {
        let rows = v.ones().map(|f| self.rows[f].clone()).collect();
        Self::from_rows(self.n, rows).expect("subclass of a valid class")
    }
}

/// Deduplicates rows (keeping first occurrences) and, when `prune` is set, drops
/// columns on which every function agrees. Returns the kept original column indices
/// when pruning.
pub fn build_hypothesis_class(
    matrix: &[Vec<bool>],
    prune: bool,
) -> Result<(HypothesisClass, Option<Vec<usize>>)> {
    if matrix.is_empty() || matrix[0].is_empty() {
        return Err(Error::input("hypothesis matrix is empty"));
    }
    let n = matrix[0].len();
    if matrix.iter().any(|r| r.len() != n) {
        return Err(Error::input("hypothesis matrix rows have unequal lengths"));
    }
    let mut seen = HashSet::new();
    let rows: Vec<&Vec<bool>> = matrix.iter().filter(|r| seen.insert(r.to_vec())).collect();
    if !prune {
        let owned: Vec<Vec<bool>> = rows.into_iter().cloned().collect();
        return Ok((HypothesisClass::from_matrix(&owned)?, None));
    }
    let keep: Vec<usize> = (0..n)
        .filter(|&x| rows.iter().any(|r| r[x]) && rows.iter().any(|r| !r[x]))
        .collect();
    if keep.is_empty() {
        return Err(Error::input(
            "pruning removed every point: the class has no disagreement",
        ));
    }
    let mut seen = HashSet::new();
    let pruned: Vec<Vec<bool>> = rows
        .iter()
        .map(|r| keep.iter().map(|&x| r[x]).collect::<Vec<bool>>())
        .filter(|r| seen.insert(r.clone()))
        .collect();
    Ok((HypothesisClass::from_matrix(&pruned)?, Some(keep)))
}
