use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};

/// Points are the indices `0..n`. An optional parent array turns the space into a
/// forest whose root paths define the tree ordering `x ≼ y`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InstanceSpace {
    n: usize,
    parent: Option<Vec<Option<usize>>>,
    /// `below[y]` holds every `x` with `x ≼ y`, `y` included.
    below: Vec<FixedBitSet>,
}

impl InstanceSpace {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::input("instance space needs at least one point"));
        }
        Ok(InstanceSpace {
            n,
            parent: None,
            below: Vec::new(),
        })
    }

    pub fn with_order(parent: Vec<Option<usize>>) -> Result<Self> {
        let n = parent.len();
        if n == 0 {
            return Err(Error::input("instance space needs at least one point"));
        }
        let mut below = Vec::with_capacity(n);
        for start in 0..n {
            let mut set = FixedBitSet::with_capacity(n);
            let mut cur = Some(start);
            while let Some(x) = cur {
                if x >= n {
                    return Err(Error::input(format!("parent index {x} out of range")));
                }
                if set.contains(x) {
                    return Err(Error::input("parent array contains a cycle"));
                }
                set.insert(x);
                cur = parent[x];
            }
            below.push(set);
        }
        Ok(InstanceSpace {
            n,
            parent: Some(parent),
            below,
        })
    }

    /// Total order `0 ≺ 1 ≺ … ≺ n−1`.
    pub fn chain(n: usize) -> Self {
        let parent = (0..n).map(|i| i.checked_sub(1)).collect();
        Self::with_order(parent).expect("a chain is a valid order")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn parent(&self) -> Option<&[Option<usize>]> {
        self.parent.as_deref()
    }

    pub fn has_order(&self) -> bool {
        self.parent.is_some()
    }

    pub(crate) fn require_order(&self) -> Result<()> {
        if self.has_order() {
            Ok(())
        } else {
            Err(Error::input(
                "this operation needs a tree ordering (parent array)",
            ))
        }
    }

    /// `x ≼ y`. Panics when the space has no order.
    pub fn precedes_eq(&self, x: usize, y: usize) -> bool {
        self.below[y].contains(x)
    }

    pub fn precedes(&self, x: usize, y: usize) -> bool {
        x != y && self.precedes_eq(x, y)
    }

    pub fn comparable(&self, x: usize, y: usize) -> bool {
        self.precedes_eq(x, y) || self.precedes_eq(y, x)
    }

    /// `{x : x ≼ y}`.
    pub fn initial_segment(&self, y: usize) -> &FixedBitSet {
        &self.below[y]
    }

    /// Root path ending at `x`, root first.
    pub fn root_path(&self, x: usize) -> Vec<usize> {
        let parent = self.parent.as_ref().expect("ordered space");
        let mut path = vec![x];
        let mut cur = parent[x];
        while let Some(p) = cur {
            path.push(p);
            cur = parent[p];
        }
        path.reverse();
        path
    }

    /// `{y : x ≺ y}`.
    pub fn strict_descendants(&self, x: usize) -> FixedBitSet {
        let mut set = FixedBitSet::with_capacity(self.n);
        for y in 0..self.n {
            if y != x && self.precedes_eq(x, y) {
                set.insert(y);
            }
        }
        set
    }

    /// `{x : a ≺ x ≼ b}`; `a = None` stands for the virtual bottom element.
    pub fn interval(&self, a: Option<usize>, b: usize) -> FixedBitSet {
        let mut set = self.below[b].clone();
        if let Some(a) = a {
            set.difference_with(&self.below[a]);
        }
        set
    }

    /// True when the order is a single chain through all points.
    pub fn is_chain(&self) -> bool {
        self.has_order() && (0..self.n).all(|x| (0..self.n).all(|y| self.comparable(x, y)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chain_order() {
        let s = InstanceSpace::chain(4);
        assert!(s.precedes(0, 3));
        assert!(!s.precedes(3, 0));
        assert_eq!(s.root_path(2), vec![0, 1, 2]);
        assert_eq!(
            s.strict_descendants(1).ones().collect::<Vec<_>>(),
            vec![2, 3]
        );
        assert_eq!(
            s.interval(Some(0), 2).ones().collect::<Vec<_>>(),
            vec![1, 2]
        );
        assert!(s.is_chain());
    }

    #[test]
    fn rejects_cycles() {
        assert!(InstanceSpace::with_order(vec![Some(1), Some(0)]).is_err());
        assert!(InstanceSpace::with_order(vec![Some(5)]).is_err());
        assert!(InstanceSpace::new(0).is_err());
    }

    #[test]
    fn branches_are_incomparable() {
        let s = InstanceSpace::with_order(vec![None, Some(0), Some(0)]).unwrap();
        assert!(!s.comparable(1, 2));
        assert!(!s.is_chain());
    }
}
