//! Finite instance spaces, hypothesis classes, distribution classes, datasets and
//! version spaces, plus the Euclidean point streams used by the linear learners.

mod class;
mod data;
mod distribution;
mod space;
mod tolerance;

pub use class::{build_hypothesis_class, HypothesisClass, PointSet, VersionMask};
pub use data::{version_space, EuclideanStream, LabeledDataset};
pub use distribution::{
    ClassKind, Distribution, DistributionClass, NodePool, PoolEntry, DEFAULT_MIXTURE_CAP,
};
pub use space::InstanceSpace;
pub use tolerance::{rho_from_f_divergence, SmoothedToleranceSpec, ToleranceFunction};

/// Binary label; `true` is label 1.
pub type Label = bool;
