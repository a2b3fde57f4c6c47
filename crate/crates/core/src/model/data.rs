use serde::{Deserialize, Serialize};

use super::class::{HypothesisClass, VersionMask};
use crate::error::{Error, Result};

/// Labeled points; order and duplicates do not affect the version space.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledDataset {
    pub pairs: Vec<(usize, bool)>,
}

impl LabeledDataset {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, x: usize, y: bool) {
        self.pairs.push((x, y));
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn union(&self, other: &LabeledDataset) -> LabeledDataset {
        let mut pairs = self.pairs.clone();
        pairs.extend_from_slice(&other.pairs);
        LabeledDataset { pairs }
    }
}

/// Functions of `class` consistent with every pair of `data`.
pub fn version_space(class: &HypothesisClass, data: &LabeledDataset) -> Result<VersionMask> {
    let mut v = class.full_mask();
    for &(x, y) in &data.pairs {
        if x >= class.n() {
            return Err(Error::input(format!(
                "point {x} out of range 0..{}",
                class.n()
            )));
        }
        v = class.restrict(&v, x, y);
    }
    Ok(v)
}

/// Labeled points in `ℝ^d`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EuclideanStream {
    pub d: usize,
    pub points: Vec<(Vec<f64>, bool)>,
}

impl EuclideanStream {
    pub fn new(d: usize) -> Self {
        EuclideanStream {
            d,
            points: Vec::new(),
        }
    }

    pub fn push(&mut self, x: Vec<f64>, y: bool) -> Result<()> {
        if x.len() != self.d {
            return Err(Error::input(format!(
                "point of dimension {} in a stream of dimension {}",
                x.len(),
                self.d
            )));
        }
        self.points.push((x, y));
        Ok(())
    }

    pub fn positives(&self) -> Vec<Vec<f64>> {
        self.points
            .iter()
            .filter(|p| p.1)
            .map(|p| p.0.clone())
            .collect()
    }

    pub fn negatives(&self) -> Vec<Vec<f64>> {
        self.points
            .iter()
            .filter(|p| !p.1)
            .map(|p| p.0.clone())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn data(pairs: &[(usize, bool)]) -> LabeledDataset {
        LabeledDataset {
            pairs: pairs.to_vec(),
        }
    }

    #[test]
    fn empty_data_keeps_everything() {
        let c = HypothesisClass::thresholds(8);
        assert_eq!(version_space(&c, &data(&[])).unwrap(), c.full_mask());
    }

    #[test]
    fn positive_label_keeps_high_thresholds() {
        let c = HypothesisClass::thresholds(8);
        let v = version_space(&c, &data(&[(3, true)])).unwrap();
        assert_eq!(v.ones().collect::<Vec<_>>(), vec![4, 5, 6, 7, 8]);
    }

    #[test]
    fn contradictory_labels_empty_the_mask() {
        let c = HypothesisClass::thresholds(8);
        assert!(version_space(&c, &data(&[(3, true), (3, false)]))
            .unwrap()
            .is_empty());
        assert!(version_space(&c, &data(&[(9, true)])).is_err());
    }
}
