use std::collections::BTreeSet;

use super::experts::{GroupedHedge, MistakeState};
use super::Learner;
use crate::critical::{LevelContext, EMPTY_LEVEL};
use crate::error::{Error, Result};
use crate::model::{LabeledDataset, VersionMask};

/// Predicts the label whose one-point extension keeps the larger level.
pub struct LevelLearner {
    ctx: LevelContext,
    v: VersionMask,
    data: LabeledDataset,
    x: Option<usize>,
}

pub fn make_level_learner(ctx: LevelContext) -> LevelLearner {
    let v = ctx.class().full_mask();
    LevelLearner {
        ctx,
        v,
        data: LabeledDataset::new(),
        x: None,
    }
}

impl LevelLearner {
    pub fn data(&self) -> &LabeledDataset {
        &self.data
    }

    pub fn version_space(&self) -> &VersionMask {
        &self.v
    }
}

impl Learner<usize> for LevelLearner {
    fn predict(&mut self, x: &usize) -> Result<bool> {
        check_point(&self.ctx, *x)?;
        self.x = Some(*x);
        Ok(self.ctx.argmax_label(&self.v, *x))
    }

    fn observe(&mut self, y: bool) -> Result<()> {
        let x = self
            .x
            .take()
            .ok_or_else(|| Error::input("observe called before predict"))?;
        self.v = self.ctx.class().restrict(&self.v, x, y);
        self.data.push(x, y);
        Ok(())
    }
}

fn check_point(ctx: &LevelContext, x: usize) -> Result<()> {
    if x >= ctx.class().n() {
        return Err(Error::input(format!("point {x} out of range")));
    }
    Ok(())
}

/// State of one mistake-time expert: the version space of its private dataset `D_t(S)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelState {
    pub v: VersionMask,
}

impl MistakeState<usize> for LevelState {
    type Ctx = LevelContext;
    type Key = VersionMask;

    fn branch(&self, ctx: &LevelContext, x: &usize, in_s: bool) -> Result<(bool, Self)> {
        check_point(ctx, *x)?;
        let k = ctx.level(&self.v);
        if k == EMPTY_LEVEL || ctx.in_critical_region(&self.v, *x, k + 1) {
            return Ok((false, self.clone()));
        }
        let y = ctx.argmax_label(&self.v, *x);
        if in_s {
            Ok((
                y,
                LevelState {
                    v: ctx.class().restrict(&self.v, *x, !y),
                },
            ))
        } else {
            Ok((y, self.clone()))
        }
    }

    fn key(&self) -> VersionMask {
        self.v.clone()
    }
}

/// A single expert `E(S)`, run on its own.
pub struct MistakeExpert {
    ctx: LevelContext,
    times: BTreeSet<usize>,
    state: LevelState,
    next: Option<LevelState>,
    t: usize,
}

pub fn make_mistake_expert(
    ctx: LevelContext,
    times: BTreeSet<usize>,
    horizon: usize,
) -> Result<MistakeExpert> {
    if times.iter().any(|&t| t == 0 || t > horizon) {
        return Err(Error::input("mistake times must lie in 1..=T"));
    }
    let state = LevelState {
        v: ctx.class().full_mask(),
    };
    Ok(MistakeExpert {
        ctx,
        times,
        state,
        next: None,
        t: 0,
    })
}

impl MistakeExpert {
    pub fn state(&self) -> &LevelState {
        &self.state
    }
}

impl Learner<usize> for MistakeExpert {
    fn predict(&mut self, x: &usize) -> Result<bool> {
        self.t += 1;
        let (y, next) = self
            .state
            .branch(&self.ctx, x, self.times.contains(&self.t))?;
        self.next = Some(next);
        Ok(y)
    }

    fn observe(&mut self, _y: bool) -> Result<()> {
        self.state = self
            .next
            .take()
            .ok_or_else(|| Error::input("observe called before predict"))?;
        Ok(())
    }
}

/// Fixed-rate Hedge over every `E(S)` with `|S| ≤ min(k(ε), T)`.
pub fn make_agnostic_adaptive(
    ctx: LevelContext,
    horizon: usize,
    cap: u64,
    seed: u64,
) -> Result<GroupedHedge<usize, LevelState>> {
    let k = ctx.level(&ctx.class().full_mask()).max(0) as usize;
    let initial = LevelState {
        v: ctx.class().full_mask(),
    };
    GroupedHedge::new(
        ctx,
        initial,
        horizon,
        k.min(horizon),
        cap,
        seed,
        "use a smaller T or a larger eps",
    )
}
