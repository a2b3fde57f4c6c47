//! Hedge over the mistake-time experts `E(S)`, `S ⊆ [T]`, `|S| ≤ b`.
//!
//! Experts whose times agree up to round `t−1` share their whole state, and two
//! experts with equal state, budget use and loss behave identically from then on.
//! The experts are therefore held as groups: a group stands for `count` distinct
//! prefixes, each of which has `M(used, t)` completions, and carries the weight of
//! all of them. The induced law of `ŷ_t` equals that of Hedge over the explicit set.

use std::collections::HashMap;
use std::hash::Hash;

use super::hedge::sample_index;
use super::Learner;
use crate::error::{Error, Result};
use crate::rng::{cell, streams};

/// Per-expert state of a mistake-time construction.
pub trait MistakeState<X>: Clone + Send {
    type Ctx: Send;
    type Key: Hash + Eq + Send;

    /// Prediction at `x` and the state for the next round, when the current round
    /// is outside `S` (`in_s = false`) or inside it.
    fn branch(&self, ctx: &Self::Ctx, x: &X, in_s: bool) -> Result<(bool, Self)>;

    /// Equal keys mean equal future behaviour.
    fn key(&self) -> Self::Key;
}

/// `Σ_{i ≤ min(b, T)} C(T, i)`, or `None` past `u64`.
pub fn expert_count(horizon: usize, budget: usize) -> Option<u64> {
    let mut total: u64 = 0;
    let mut c: u128 = 1;
    for i in 0..=budget.min(horizon) {
        if i > 0 {
            c = c * (horizon - i + 1) as u128 / i as u128;
        }
        total = total.checked_add(u64::try_from(c).ok()?)?;
    }
    Some(total)
}

pub(crate) fn check_cap(horizon: usize, budget: usize, cap: u64, hint: &str) -> Result<u64> {
    match expert_count(horizon, budget) {
        Some(k) if k <= cap => Ok(k),
        k => Err(Error::Cap(format!(
            "{} experts (T = {horizon}, |S| ≤ {budget}) exceed the cap of {cap}; {hint}",
            k.map_or_else(|| "more than 2^64".to_string(), |k| k.to_string())
        ))),
    }
}

/// `ln Σ_{i ≤ b} C(r, i)`.
fn ln_binomial_prefix(r: usize, b: usize) -> f64 {
    let mut terms = Vec::with_capacity(b.min(r) + 1);
    let mut lc = 0.0;
    terms.push(0.0);
    for i in 1..=b.min(r) {
        lc += ((r - i + 1) as f64).ln() - (i as f64).ln();
        terms.push(lc);
    }
    let m = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    m + terms.iter().map(|t| (t - m).exp()).sum::<f64>().ln()
}

#[derive(Clone)]
struct Group<S> {
    state: S,
    used: usize,
    count: f64,
    loss: u64,
}

pub struct GroupedHedge<X, S: MistakeState<X>> {
    ctx: S::Ctx,
    groups: Vec<Group<S>>,
    children: Vec<(Group<S>, bool)>,
    budget: usize,
    horizon: usize,
    eta: f64,
    seed: u64,
    t: usize,
    prob_one: f64,
}

impl<X, S: MistakeState<X>> GroupedHedge<X, S> {
    /// Fixed-rate Hedge over all `E(S)` with `|S| ≤ budget`, starting from `initial`.
    pub fn new(
        ctx: S::Ctx,
        initial: S,
        horizon: usize,
        budget: usize,
        cap: u64,
        seed: u64,
        hint: &str,
    ) -> Result<Self> {
        if horizon == 0 {
            return Err(Error::input("horizon must be positive"));
        }
        let k = check_cap(horizon, budget, cap, hint)?;
        let eta = (8.0 * (k as f64).ln() / horizon as f64).sqrt();
        let groups = vec![Group {
            state: initial,
            used: 0,
            count: 1.0,
            loss: 0,
        }];
        Ok(GroupedHedge {
            ctx,
            groups,
            children: Vec::new(),
            budget,
            horizon,
            eta,
            seed,
            t: 0,
            prob_one: 0.0,
        })
    }

    pub fn group_count(&self) -> usize {
        self.groups.len()
    }

    pub fn last_prob_one(&self) -> f64 {
        self.prob_one
    }

    pub fn ctx(&self) -> &S::Ctx {
        &self.ctx
    }
}

impl<X, S> Learner<X> for GroupedHedge<X, S>
where
    S: MistakeState<X>,
    X: Send,
    S::Ctx: Send,
{
    fn predict(&mut self, x: &X) -> Result<bool> {
        self.t += 1;
        let t = self.t;
        let open = t <= self.horizon;
        let mut children = Vec::with_capacity(self.groups.len() * 2);
        for g in &self.groups {
            let (p0, s0) = g.state.branch(&self.ctx, x, false)?;
            children.push((
                Group {
                    state: s0,
                    used: g.used,
                    count: g.count,
                    loss: g.loss,
                },
                p0,
            ));
            if open && g.used < self.budget {
                let (p1, s1) = g.state.branch(&self.ctx, x, true)?;
                children.push((
                    Group {
                        state: s1,
                        used: g.used + 1,
                        count: g.count,
                        loss: g.loss,
                    },
                    p1,
                ));
            }
        }
        // Completions of a prefix that has used `u` slots, over rounds t+1..=T.
        let remaining = self.horizon.saturating_sub(t);
        let ln_m: Vec<f64> = (0..=self.budget)
            .map(|u| ln_binomial_prefix(remaining, self.budget - u))
            .collect();
        let min_loss = children.iter().map(|(g, _)| g.loss).min().unwrap_or(0);
        let logw: Vec<f64> = children
            .iter()
            .map(|(g, _)| g.count.ln() + ln_m[g.used] - self.eta * (g.loss - min_loss) as f64)
            .collect();
        let top = logw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let w: Vec<f64> = logw.iter().map(|l| (l - top).exp()).collect();
        let z: f64 = w.iter().sum();
        let p: Vec<f64> = w.iter().map(|x| x / z).collect();
        self.prob_one = p
            .iter()
            .zip(&children)
            .filter(|(_, (_, y))| *y)
            .map(|(q, _)| q)
            .sum();
        let i = sample_index(&p, &mut cell(self.seed, streams::LEARNER, t as u64));
        let y = children[i].1;
        self.children = children;
        Ok(y)
    }

    fn observe(&mut self, y: bool) -> Result<()> {
        let mut index: HashMap<(S::Key, usize, u64), usize> = HashMap::new();
        let mut merged: Vec<Group<S>> = Vec::new();
        for (mut g, p) in self.children.drain(..) {
            g.loss += u64::from(p != y);
            match index.entry((g.state.key(), g.used, g.loss)) {
                std::collections::hash_map::Entry::Occupied(e) => merged[*e.get()].count += g.count,
                std::collections::hash_map::Entry::Vacant(e) => {
                    e.insert(merged.len());
                    merged.push(g);
                }
            }
        }
        self.groups = merged;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expert_counts() {
        assert_eq!(expert_count(10, 0), Some(1));
        assert_eq!(expert_count(10, 1), Some(11));
        assert_eq!(expert_count(64, 3), Some(1 + 64 + 2016 + 41664));
        assert_eq!(expert_count(5, 9), Some(32));
        assert!(check_cap(64, 4, 50_000, "").is_err());
    }

    #[test]
    fn completion_counts_follow_pascal() {
        for r in 0..12 {
            for b in 0..5 {
                let direct: f64 = (0..=b.min(r))
                    .map(|i| num_integer::binomial(r as u64, i as u64) as f64)
                    .sum();
                assert!((ln_binomial_prefix(r, b) - direct.ln()).abs() < 1e-12);
            }
        }
    }
}
