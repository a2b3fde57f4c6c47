use std::sync::Arc;

use super::hedge::{sample_index, EtaMode, HedgeCore};
use super::Learner;
use crate::dims::{eps_dimension, vc_dimension, SearchConfig, TreeKind};
use crate::error::{Error, Result};
use crate::model::{version_space, DistributionClass, HypothesisClass, LabeledDataset};
use crate::rational::Rational;
use crate::rng::{cell, streams};

pub const DEFAULT_C0: f64 = 16.0;

/// Epoch learner for oblivious realizable streams. Each epoch rebuilds its experts
/// from a maximum-depth relaxed tree of the current version space and runs
/// adaptive-rate Hedge over them.
pub struct EpochLearner {
    class: Arc<HypothesisClass>,
    u: Arc<DistributionClass>,
    kind: TreeKind,
    eps: f64,
    cfg: SearchConfig,
    n_eps: f64,
    data: LabeledDataset,
    /// Rounds completed before the current epoch.
    epoch_start: usize,
    experts: Vec<usize>,
    depths: Vec<usize>,
    core: HedgeCore,
    seed: u64,
    t: usize,
    x: Option<usize>,
}

pub fn make_epoch_oblivious(
    class: Arc<HypothesisClass>,
    u: Arc<DistributionClass>,
    eps: Rational,
    horizon: usize,
    c0: f64,
    cfg: SearchConfig,
    seed: u64,
) -> Result<EpochLearner> {
    if horizon == 0 || c0.is_nan() || c0 <= 0.0 {
        return Err(Error::input("epoch learner needs T ≥ 1 and c0 > 0"));
    }
    let eps_f = crate::rational::to_f64(&eps);
    let d = vc_dimension(&class).max(1) as f64;
    let n_eps = c0 * d * (horizon as f64).ln() / eps_f;
    let mut l = EpochLearner {
        class,
        u,
        kind: TreeKind::Relaxed(eps),
        eps: eps_f,
        cfg,
        n_eps,
        data: LabeledDataset::new(),
        epoch_start: 0,
        experts: Vec::new(),
        depths: Vec::new(),
        core: HedgeCore::new(1, EtaMode::Adaptive, horizon)?,
        seed,
        t: 0,
        x: None,
    };
    l.start_epoch()?;
    Ok(l)
}

impl EpochLearner {
    /// Expert functions of the current epoch, as indices into the class.
    pub fn experts(&self) -> &[usize] {
        &self.experts
    }

    /// Tree depth found at the start of each epoch so far.
    pub fn epoch_depths(&self) -> &[usize] {
        &self.depths
    }

    pub fn n_eps(&self) -> f64 {
        self.n_eps
    }

    /// Whether round `t` still belongs to the current epoch.
    pub fn continues(&self, t: usize) -> bool {
        let len = (t - self.epoch_start) as f64;
        len <= self.n_eps || self.core.min_loss() <= 2.0 * self.eps * (len - 1.0)
    }

    fn start_epoch(&mut self) -> Result<()> {
        let mut v = version_space(&self.class, &self.data)?;
        if v.is_empty() {
            // Only non-realizable streams get here; fall back to the whole class.
            v = self.class.full_mask();
        }
        let index: Vec<usize> = v.ones().collect();
        let sub = self.class.subclass(&v);
        let report = eps_dimension(&sub, &self.u, &self.kind, self.cfg)?;
        let mut experts: Vec<usize> = match &report.certificate {
            Some(tree) if report.value > 0 => tree
                .last_layer()
                .flat_map(|i| tree.leaf_functions(i))
                .map(|f| index[f])
                .collect(),
            _ => vec![index[0]],
        };
        experts.sort_unstable();
        experts.dedup();
        self.depths.push(report.value);
        self.core = HedgeCore::new(experts.len(), EtaMode::Adaptive, 1)?;
        self.experts = experts;
        self.epoch_start = self.t;
        Ok(())
    }
}

impl Learner<usize> for EpochLearner {
    fn predict(&mut self, x: &usize) -> Result<bool> {
        if *x >= self.class.n() {
            return Err(Error::input(format!("point {x} out of range")));
        }
        self.t += 1;
        if !self.continues(self.t) {
            self.start_epoch()?;
        }
        self.x = Some(*x);
        let p = self.core.probabilities();
        let i = sample_index(&p, &mut cell(self.seed, streams::LEARNER, self.t as u64));
        Ok(self.class.label(self.experts[i], *x))
    }

    fn observe(&mut self, y: bool) -> Result<()> {
        let x = self
            .x
            .take()
            .ok_or_else(|| Error::input("observe called before predict"))?;
        let losses: Vec<f64> = self
            .experts
            .iter()
            .map(|&f| f64::from(u8::from(self.class.label(f, x) != y)))
            .collect();
        self.core.add_losses(&losses);
        self.data.push(x, y);
        Ok(())
    }
}
