//! Online learners. Every learner sees `x_t`, commits to `ŷ_t`, then receives `y_t`;
//! internal randomness comes only from the seed through [`crate::rng::cell`].

mod epoch;
mod experts;
mod hedge;
mod level;
mod linear;
mod spec;
mod vc1;

pub use epoch::{make_epoch_oblivious, EpochLearner, DEFAULT_C0};
pub use experts::{expert_count, GroupedHedge, MistakeState};
pub use hedge::{make_hedge, EtaMode, FixedFunction, Hedge, HedgeCore};
pub use level::{
    make_agnostic_adaptive, make_level_learner, make_mistake_expert, LevelLearner, LevelState,
    MistakeExpert,
};
pub use linear::{
    certainty_distance, certainty_membership, default_budgets, make_linear_agnostic,
    make_linear_learner, realizable, LinearAgnostic, LinearLearner, LinearState, ZERO_DISTANCE,
};
pub use spec::{build_finite_learner, build_linear_learner, LearnerSpec};
pub use vc1::{make_vc1_learner, make_vc1_optimistic, AnchorState, Vc1Learner};

use crate::error::Result;

/// Default bound on the number of experts a mistake-time construction may enumerate.
pub const DEFAULT_EXPERT_CAP: u64 = 50_000;

/// The learner side of the protocol. `predict` is called once per round before
/// `observe`; implementations may assume that alternation.
pub trait Learner<X>: Send {
    fn predict(&mut self, x: &X) -> Result<bool>;
    fn observe(&mut self, y: bool) -> Result<()>;
}

impl<X, L: Learner<X> + ?Sized> Learner<X> for Box<L> {
    fn predict(&mut self, x: &X) -> Result<bool> {
        (**self).predict(x)
    }

    fn observe(&mut self, y: bool) -> Result<()> {
        (**self).observe(y)
    }
}
