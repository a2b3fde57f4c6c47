//! Dimension quantities for oblivious adversaries: VC and Littlestone dimensions,
//! covering and packing, interaction-tree dimensions with certificates, and the
//! threshold dimension of tree orders.

mod cover;
mod search;
mod threshold;
mod tree;
mod vc;

pub use cover::{covering_number, packing_set, CoverMode, DEFAULT_EXACT_COVER_CAP};
pub use search::{eps_dimension, DimensionReport, SearchConfig, DEFAULT_BUDGET, DEFAULT_MAX_DEPTH};
pub use threshold::{greedy_cuts, threshold_chain, threshold_dimension, threshold_witness_measure};
pub use tree::{
    full_region, plain_to_relaxed, validate_tree_certificate, Certificate, InteractionTree,
    TreeKind, TreeNode,
};
pub use vc::{ldim_mask, littlestone_dimension, vc_dimension};
