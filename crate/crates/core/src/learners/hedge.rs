use rand::Rng;

use super::Learner;
use crate::error::{Error, Result};
use crate::model::HypothesisClass;
use crate::rng::{cell, streams};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EtaMode {
    /// `η = √(8 ln K / T)`.
    Fixed,
    /// `η_t = √(2 ln K / (1 + min_i L_{t,i}))`.
    Adaptive,
}

/// Exponential weights over `K` experts with cumulative losses.
#[derive(Clone, Debug)]
pub struct HedgeCore {
    losses: Vec<f64>,
    mode: EtaMode,
    horizon: usize,
}

impl HedgeCore {
    pub fn new(k: usize, mode: EtaMode, horizon: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::input("hedge needs at least one expert"));
        }
        if mode == EtaMode::Fixed && horizon == 0 {
            return Err(Error::input("fixed learning rate needs a positive horizon"));
        }
        Ok(HedgeCore {
            losses: vec![0.0; k],
            mode,
            horizon,
        })
    }

    pub fn k(&self) -> usize {
        self.losses.len()
    }

    pub fn losses(&self) -> &[f64] {
        &self.losses
    }

    pub fn min_loss(&self) -> f64 {
        self.losses.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn eta(&self) -> f64 {
        let ln_k = (self.k() as f64).ln();
        match self.mode {
            EtaMode::Fixed => (8.0 * ln_k / self.horizon as f64).sqrt(),
            EtaMode::Adaptive => (2.0 * ln_k / (1.0 + self.min_loss())).sqrt(),
        }
    }

    /// `p_i ∝ exp(−η (L_i − min L))`; every exponent is ≤ 0.
    pub fn probabilities(&self) -> Vec<f64> {
        let eta = self.eta();
        let min = self.min_loss();
        let w: Vec<f64> = self
            .losses
            .iter()
            .map(|l| (-eta * (l - min)).exp())
            .collect();
        let z: f64 = w.iter().sum();
        w.into_iter().map(|x| x / z).collect()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        sample_index(&self.probabilities(), rng)
    }

    pub fn add_losses(&mut self, losses: &[f64]) {
        assert_eq!(losses.len(), self.k(), "loss vector length");
        for (l, x) in self.losses.iter_mut().zip(losses) {
            *l += x;
        }
    }
}

pub(crate) fn sample_index<R: Rng + ?Sized>(p: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (i, &x) in p.iter().enumerate() {
        acc += x;
        if u < acc {
            return i;
        }
    }
    p.iter().rposition(|&x| x > 0.0).unwrap_or(0)
}

/// Follows a sampled expert each round.
pub struct Hedge<X> {
    core: HedgeCore,
    experts: Vec<Box<dyn Learner<X>>>,
    preds: Vec<bool>,
    seed: u64,
    t: u64,
    prob_one: f64,
}

pub fn make_hedge<X>(
    experts: Vec<Box<dyn Learner<X>>>,
    mode: EtaMode,
    horizon: usize,
    seed: u64,
) -> Result<Hedge<X>> {
    let core = HedgeCore::new(experts.len(), mode, horizon)?;
    Ok(Hedge {
        core,
        experts,
        preds: Vec::new(),
        seed,
        t: 0,
        prob_one: 0.0,
    })
}

impl<X> Hedge<X> {
    pub fn core(&self) -> &HedgeCore {
        &self.core
    }

    /// Probability that the last prediction was 1, over the expert draw.
    pub fn last_prob_one(&self) -> f64 {
        self.prob_one
    }
}

impl<X> Learner<X> for Hedge<X> {
    fn predict(&mut self, x: &X) -> Result<bool> {
        self.t += 1;
        self.preds = self
            .experts
            .iter_mut()
            .map(|e| e.predict(x))
            .collect::<Result<_>>()?;
        let p = self.core.probabilities();
        self.prob_one = p
            .iter()
            .zip(&self.preds)
            .filter(|(_, &y)| y)
            .map(|(q, _)| q)
            .sum();
        let i = sample_index(&p, &mut cell(self.seed, streams::LEARNER, self.t));
        Ok(self.preds[i])
    }

    fn observe(&mut self, y: bool) -> Result<()> {
        let losses: Vec<f64> = self
            .preds
            .iter()
            .map(|&p| f64::from(u8::from(p != y)))
            .collect();
        self.core.add_losses(&losses);
        for e in &mut self.experts {
            e.observe(y)?;
        }
        Ok(())
    }
}

/// Predicts with one fixed function of a finite class.
pub struct FixedFunction {
    labels: Vec<bool>,
}

impl FixedFunction {
    pub fn new(class: &HypothesisClass, f: usize) -> Self {
        FixedFunction {
            labels: (0..class.n()).map(|x| class.label(f, x)).collect(),
        }
    }
}

impl Learner<usize> for FixedFunction {
    fn predict(&mut self, x: &usize) -> Result<bool> {
        self.labels
            .get(*x)
            .copied()
            .ok_or_else(|| Error::input(format!("point {x} out of range")))
    }

    fn observe(&mut self, _y: bool) -> Result<()> {
        Ok(())
    }
}
