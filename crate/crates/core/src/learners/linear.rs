//! Certainty regions of halfspaces and the learners built on them.
//!
//! Convention: `f(x) = 1` iff `a·x + b ≥ 0`. With positives `P` and negatives `N`,
//! the points labeled 1 by every consistent halfspace form
//! `S(1) = conv(P) + cone{p − n}`, and symmetrically `S(0) = conv(N) + cone{n − p}`.

use microlp::{ComparisonOp, OptimizationDirection, Problem};
use nalgebra::{DMatrix, DVector};

use super::experts::{check_cap, GroupedHedge, MistakeState};
use super::hedge::{sample_index, EtaMode, HedgeCore};
use super::Learner;
use crate::error::{Error, Result};
use crate::rng::{cell, derive, streams};

const ITER_CAP: usize = 100_000;
/// Distances at or below this count as membership.
pub const ZERO_DISTANCE: f64 = 1e-7;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn check_dims(d: usize, sets: &[&[Vec<f64>]], x: &[f64]) -> Result<()> {
    if x.len() != d || sets.iter().any(|s| s.iter().any(|p| p.len() != d)) {
        return Err(Error::input("points have inconsistent dimensions"));
    }
    if x.iter()
        .chain(sets.iter().flat_map(|s| s.iter().flatten()))
        .any(|v| !v.is_finite())
    {
        return Err(Error::input("points must be finite"));
    }
    Ok(())
}

/// Feasibility of `a·p + b ≥ 0` on `P`, `a·n + b ≤ −1` on `N`, plus one extra row on `x`.
fn halfspace_feasible(
    pos: &[Vec<f64>],
    neg: &[Vec<f64>],
    extra: Option<(&[f64], bool)>,
) -> Result<bool> {
    let d = pos
        .first()
        .or(neg.first())
        .map_or_else(|| extra.map_or(0, |e| e.0.len()), Vec::len);
    let mut lp = Problem::new(OptimizationDirection::Minimize);
    let a: Vec<_> = (0..d)
        .map(|_| lp.add_var(0.0, (f64::NEG_INFINITY, f64::INFINITY)))
        .collect();
    let b = lp.add_var(0.0, (f64::NEG_INFINITY, f64::INFINITY));
    let row = |p: &[f64]| -> Vec<_> {
        a.iter()
            .zip(p)
            .map(|(&v, &c)| (v, c))
            .chain(std::iter::once((b, 1.0)))
            .collect()
    };
    for p in pos {
        lp.add_constraint(row(p), ComparisonOp::Ge, 0.0);
    }
    for n in neg {
        lp.add_constraint(row(n), ComparisonOp::Le, -1.0);
    }
    if let Some((x, as_positive)) = extra {
        if as_positive {
            lp.add_constraint(row(x), ComparisonOp::Ge, 0.0);
        } else {
            lp.add_constraint(row(x), ComparisonOp::Le, -1.0);
        }
    }
    match lp.solve() {
        Ok(_) => Ok(true),
        Err(microlp::Error::Infeasible) => Ok(false),
        Err(microlp::Error::Unbounded) => Err(Error::Solver(
            "feasibility program reported unbounded".into(),
        )),
        Err(e) => Err(Error::Solver(e.to_string())),
    }
}

/// Whether some halfspace labels every positive 1 and every negative 0.
pub fn realizable(pos: &[Vec<f64>], neg: &[Vec<f64>]) -> Result<bool> {
    halfspace_feasible(pos, neg, None)
}

/// `x ∈ S(y)`: no consistent halfspace gives `x` the label `1 − y`.
pub fn certainty_membership(
    pos: &[Vec<f64>],
    neg: &[Vec<f64>],
    x: &[f64],
    y: bool,
) -> Result<bool> {
    check_dims(x.len(), &[pos, neg], x)?;
    if !realizable(pos, neg)? {
        return Err(Error::DataDegenerate);
    }
    Ok(!halfspace_feasible(pos, neg, Some((x, !y)))?)
}

/// Euclidean distance from `x` to `S(y)`; `+∞` when `S(y)` has no generators.
pub fn certainty_distance(pos: &[Vec<f64>], neg: &[Vec<f64>], x: &[f64], y: bool) -> Result<f64> {
    check_dims(x.len(), &[pos, neg], x)?;
    let (own, other) = if y { (pos, neg) } else { (neg, pos) };
    if own.is_empty() {
        return Ok(f64::INFINITY);
    }
    min_norm(own, other, x)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Gen {
    Point(usize),
    Ray(usize, usize),
}

/// Minimum-norm point of `conv(U − x) + cone{u − w}` by a corral method: keep a small
/// set of generators, project onto their affine-plus-linear hull, and step back to
/// the feasible region whenever a coefficient goes negative.
fn min_norm(own: &[Vec<f64>], other: &[Vec<f64>], x: &[f64]) -> Result<f64> {
    let d = x.len();
    let vector = |g: Gen| -> DVector<f64> {
        match g {
            Gen::Point(i) => DVector::from_iterator(d, own[i].iter().zip(x).map(|(u, v)| u - v)),
            Gen::Ray(i, j) => {
                DVector::from_iterator(d, own[i].iter().zip(&other[j]).map(|(u, w)| u - w))
            }
        }
    };
    let scale = own
        .iter()
        .chain(other)
        .flatten()
        .chain(x)
        .fold(1.0f64, |m, v| m.max(v.abs()));
    let tol = 1e-12 * scale * scale;

    let start = (0..own.len())
        .min_by(|&i, &j| {
            vector(Gen::Point(i))
                .norm_squared()
                .total_cmp(&vector(Gen::Point(j)).norm_squared())
        })
        .expect("nonempty generator set");
    let mut corral: Vec<(Gen, DVector<f64>)> = vec![(Gen::Point(start), vector(Gen::Point(start)))];
    let mut w = vec![1.0];
    let mut y = corral[0].1.clone();

    for _ in 0..ITER_CAP {
        let yy = y.norm_squared();
        if yy <= tol {
            return Ok(0.0);
        }
        let ys = y.as_slice();
        let (pi, pv) = (0..own.len())
            .map(|i| (i, yy - (dot(&own[i], ys) - dot(x, ys))))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .expect("nonempty");
        let mut best = (Gen::Point(pi), pv);
        if !other.is_empty() {
            let (ui, umin) = (0..own.len())
                .map(|i| (i, dot(&own[i], ys)))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .expect("nonempty");
            let (wj, wmax) = (0..other.len())
                .map(|j| (j, dot(&other[j], ys)))
                .max_by(|a, b| a.1.total_cmp(&b.1))
                .expect("nonempty");
            let rv = wmax - umin;
            if rv > best.1 {
                best = (Gen::Ray(ui, wj), rv);
            }
        }
        if best.1 <= tol.max(1e-12 * yy) || corral.iter().any(|(g, _)| *g == best.0) {
            return Ok(yy.sqrt());
        }
        corral.push((best.0, vector(best.0)));
        w.push(0.0);

        loop {
            let z = affine_minimizer(&corral)?;
            if z.iter().all(|&c| c > 1e-14) {
                w = z;
                break;
            }
            let mut theta = 1.0f64;
            for (wi, zi) in w.iter().zip(&z) {
                if *zi <= 1e-14 && wi - zi > 0.0 {
                    theta = theta.min(wi / (wi - zi));
                }
            }
            for (wi, zi) in w.iter_mut().zip(&z) {
                *wi += theta * (zi - *wi);
            }
            let mut k = 0;
            while k < corral.len() {
                if w[k] <= 1e-14 && corral.len() > 1 {
                    corral.remove(k);
                    w.remove(k);
                } else {
                    k += 1;
                }
            }
            if !corral.iter().any(|(g, _)| matches!(g, Gen::Point(_))) {
                return Err(Error::Solver("projection lost its convex part".into()));
            }
        }
        y = corral
            .iter()
            .zip(&w)
            .fold(DVector::zeros(d), |acc, ((_, v), c)| acc + v * *c);
    }
    Err(Error::Solver("projection did not converge".into()))
}

/// Minimizer of `‖Σ z_i g_i‖` subject to the point coefficients summing to 1.
fn affine_minimizer(corral: &[(Gen, DVector<f64>)]) -> Result<Vec<f64>> {
    let m = corral.len();
    let mut kkt = DMatrix::zeros(m + 1, m + 1);
    for i in 0..m {
        for j in 0..m {
            kkt[(i, j)] = corral[i].1.dot(&corral[j].1);
        }
        let e = if matches!(corral[i].0, Gen::Point(_)) {
            1.0
        } else {
            0.0
        };
        kkt[(i, m)] = e;
        kkt[(m, i)] = e;
    }
    let mut rhs = DVector::zeros(m + 1);
    rhs[m] = 1.0;
    let sol = kkt
        .svd(true, true)
        .solve(&rhs, 1e-12)
        .map_err(|e| Error::Solver(e.to_string()))?;
    Ok(sol.iter().take(m).copied().collect())
}

/// Label with the nearer certainty region; ties, including two infinite distances, go to 0.
fn nearest_label(d0: f64, d1: f64) -> bool {
    d1 < d0
}

/// Nearest-certainty-region learner for streams in `ℝ^d`.
pub struct LinearLearner {
    state: LinearState,
    x: Option<Vec<f64>>,
    dists: (f64, f64),
}

pub fn make_linear_learner(d: usize) -> Result<LinearLearner> {
    if d == 0 {
        return Err(Error::input("dimension must be positive"));
    }
    Ok(LinearLearner {
        state: LinearState::new(d),
        x: None,
        dists: (0.0, 0.0),
    })
}

impl LinearLearner {
    pub fn is_degenerate(&self) -> bool {
        self.state.degenerate
    }

    pub fn positives(&self) -> &[Vec<f64>] {
        &self.state.pos
    }

    pub fn negatives(&self) -> &[Vec<f64>] {
        &self.state.neg
    }
}

impl Learner<Vec<f64>> for LinearLearner {
    fn predict(&mut self, x: &Vec<f64>) -> Result<bool> {
        let (y, d0, d1) = self.state.predict(x)?;
        self.dists = (d0, d1);
        self.x = Some(x.clone());
        Ok(y)
    }

    fn observe(&mut self, y: bool) -> Result<()> {
        let x = self
            .x
            .take()
            .ok_or_else(|| Error::input("observe called before predict"))?;
        self.state.push(x, y, self.dists);
        Ok(())
    }
}

/// Dataset of a linear learner. Once the data admits no consistent halfspace the
/// state is degenerate and predicts 0 from then on.
#[derive(Clone, Debug)]
pub struct LinearState {
    d: usize,
    pos: Vec<Vec<f64>>,
    neg: Vec<Vec<f64>>,
    labels: Vec<bool>,
    degenerate: bool,
}

impl LinearState {
    pub fn new(d: usize) -> Self {
        LinearState {
            d,
            pos: Vec::new(),
            neg: Vec::new(),
            labels: Vec::new(),
            degenerate: false,
        }
    }

    /// Prediction with the distances to `S(0)` and `S(1)`.
    fn predict(&self, x: &[f64]) -> Result<(bool, f64, f64)> {
        if x.len() != self.d {
            return Err(Error::input(format!(
                "expected a point in dimension {}",
                self.d
            )));
        }
        if self.degenerate {
            return Ok((false, 0.0, 0.0));
        }
        let d0 = certainty_distance(&self.pos, &self.neg, x, false)?;
        let d1 = certainty_distance(&self.pos, &self.neg, x, true)?;
        Ok((nearest_label(d0, d1), d0, d1))
    }

    /// Appends `(x, y)`; the data stays realizable iff `x ∉ S(1 − y)`.
    fn push(&mut self, x: Vec<f64>, y: bool, (d0, d1): (f64, f64)) {
        self.labels.push(y);
        if self.degenerate {
            return;
        }
        let opposite = if y { d0 } else { d1 };
        if opposite <= ZERO_DISTANCE {
            self.degenerate = true;
            self.pos.clear();
            self.neg.clear();
            return;
        }
        if y {
            self.pos.push(x);
        } else {
            self.neg.push(x);
        }
    }
}

impl MistakeState<Vec<f64>> for LinearState {
    type Ctx = ();
    type Key = Option<Vec<bool>>;

    fn branch(&self, _: &(), x: &Vec<f64>, in_s: bool) -> Result<(bool, Self)> {
        let (y, d0, d1) = self.predict(x)?;
        let mut next = self.clone();
        next.push(x.clone(), y ^ in_s, (d0, d1));
        Ok((y, next))
    }

    fn key(&self) -> Option<Vec<bool>> {
        (!self.degenerate).then(|| self.labels.clone())
    }
}

/// Restart-Hedge over inner learners `L(ε_i)`, each a Hedge over the linear
/// mistake-time experts with `|S| ≤ ⌊ε_i T⌋`. Epoch `k` spans rounds
/// `[k(k+1)/2, (k+1)(k+2)/2)` and uses the first `k` inner learners.
pub struct LinearAgnostic {
    inner: Vec<GroupedHedge<Vec<f64>, LinearState>>,
    budgets: Vec<usize>,
    epoch: usize,
    core: HedgeCore,
    preds: Vec<bool>,
    seed: u64,
    t: usize,
}

/// Inner budgets `⌊2^{-i} T⌋` for `i ≥ 1` whose expert sets fit under `cap`, down to
/// the first zero budget.
pub fn default_budgets(horizon: usize, cap: u64) -> Vec<usize> {
    let mut out = Vec::new();
    for i in 1..64 {
        let b = horizon >> i;
        if check_cap(horizon, b, cap, "").is_ok() {
            out.push(b);
        }
        if b == 0 {
            break;
        }
    }
    out
}

pub fn make_linear_agnostic(
    d: usize,
    horizon: usize,
    eps_list: Option<&[f64]>,
    cap: u64,
    seed: u64,
) -> Result<LinearAgnostic> {
    if d == 0 || horizon == 0 {
        return Err(Error::input("dimension and horizon must be positive"));
    }
    let budgets: Vec<usize> = match eps_list {
        Some(list) => {
            if list.is_empty() || list.iter().any(|e| !(*e > 0.0 && *e <= 1.0)) {
                return Err(Error::input(
                    "eps list must be nonempty with entries in (0, 1]",
                ));
            }
            let mut l = list.to_vec();
            l.sort_by(|a, b| b.total_cmp(a));
            l.iter()
                .map(|e| (e * horizon as f64).floor() as usize)
                .collect()
        }
        None => default_budgets(horizon, cap),
    };
    let inner = budgets
        .iter()
        .enumerate()
        .map(|(i, &b)| {
            GroupedHedge::new(
                (),
                LinearState::new(d),
                horizon,
                b,
                cap,
                derive(seed, &[i as u64 + 1]),
                "use a smaller T or smaller eps values",
            )
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LinearAgnostic {
        inner,
        budgets,
        epoch: 0,
        core: HedgeCore::new(1, EtaMode::Fixed, 1)?,
        preds: Vec::new(),
        seed,
        t: 0,
    })
}

impl LinearAgnostic {
    pub fn budgets(&self) -> &[usize] {
        &self.budgets
    }

    /// Epoch index of round `t`: the `k` with `k(k+1)/2 ≤ t < (k+1)(k+2)/2`.
    pub fn epoch_of(t: usize) -> usize {
        let mut k = 1;
        while (k + 1) * (k + 2) / 2 <= t {
            k += 1;
        }
        k
    }
}

impl Learner<Vec<f64>> for LinearAgnostic {
    fn predict(&mut self, x: &Vec<f64>) -> Result<bool> {
        self.t += 1;
        let k = Self::epoch_of(self.t);
        if k != self.epoch {
            self.epoch = k;
            self.core = HedgeCore::new(k.min(self.inner.len()), EtaMode::Fixed, k)?;
        }
        self.preds = self
            .inner
            .iter_mut()
            .map(|l| l.predict(x))
            .collect::<Result<_>>()?;
        let p = self.core.probabilities();
        let i = sample_index(
            &p,
            &mut cell(derive(self.seed, &[0]), streams::LEARNER, self.t as u64),
        );
        Ok(self.preds[i])
    }

    fn observe(&mut self, y: bool) -> Result<()> {
        let active = self.core.k();
        let losses: Vec<f64> = self.preds[..active]
            .iter()
            .map(|&p| f64::from(u8::from(p != y)))
            .collect();
        self.core.add_losses(&losses);
        for l in &mut self.inner {
            l.observe(y)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cone_data() -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
        (vec![vec![0.0, 0.0]], vec![vec![1.0, 1.0], vec![-1.0, 1.0]])
    }

    #[test]
    fn positives_are_certain() {
        let (p, n) = cone_data();
        assert!(certainty_membership(&p, &n, &[0.0, 0.0], true).unwrap());
        assert_eq!(certainty_distance(&p, &n, &[0.0, 0.0], true).unwrap(), 0.0);
        assert!(certainty_membership(&p, &n, &[1.0, 1.0], false).unwrap());
    }

    #[test]
    fn cone_membership() {
        let (p, n) = cone_data();
        assert!(certainty_membership(&p, &n, &[0.0, -5.0], true).unwrap());
        assert!(!certainty_membership(&p, &n, &[5.0, 5.0], true).unwrap());
        // a = (0, −1), b = 1/2 is consistent and labels (5, 5) as 0.
        let (a, b) = ([0.0, -1.0], 0.5);
        assert!(p.iter().all(|q| dot(&a, q) + b >= 0.0));
        assert!(n.iter().all(|q| dot(&a, q) + b < 0.0));
        assert!(dot(&a, &[5.0, 5.0]) + b < 0.0);
    }

    #[test]
    fn cone_distance() {
        let (p, n) = cone_data();
        let d = certainty_distance(&p, &n, &[0.0, 2.0], true).unwrap();
        assert!((d - 2.0).abs() < 1e-9, "{d}");
        // Nearest point of the cone b ≤ −|a| to (3, 0) is (1.5, −1.5).
        let d = certainty_distance(&p, &n, &[3.0, 0.0], true).unwrap();
        assert!((d - (4.5f64).sqrt()).abs() < 1e-9, "{d}");
    }

    #[test]
    fn empty_generators_are_infinitely_far() {
        let n = vec![vec![1.0, 1.0]];
        assert_eq!(
            certainty_distance(&[], &n, &[0.0, 0.0], true).unwrap(),
            f64::INFINITY
        );
        assert!(!certainty_membership(&[], &n, &[1.0, 1.0], true).unwrap());
    }

    #[test]
    fn non_realizable_data_is_degenerate() {
        let p = vec![vec![0.0], vec![2.0]];
        let n = vec![vec![1.0]];
        assert!(matches!(
            certainty_membership(&p, &n, &[0.5], true),
            Err(Error::DataDegenerate)
        ));
    }

    #[test]
    fn first_round_predicts_zero() {
        let mut l = make_linear_learner(2).unwrap();
        assert!(!l.predict(&vec![0.3, 0.1]).unwrap());
    }

    #[test]
    fn inside_positive_region_predicts_one() {
        let mut l = make_linear_learner(2).unwrap();
        for (x, y) in [
            (vec![0.0, 0.0], true),
            (vec![1.0, 1.0], false),
            (vec![-1.0, 1.0], false),
        ] {
            l.predict(&x).unwrap();
            l.observe(y).unwrap();
        }
        assert!(l.predict(&vec![0.0, -3.0]).unwrap());
    }

    #[test]
    fn epochs_follow_triangular_numbers() {
        let starts: Vec<usize> = (1..=10)
            .filter(|&t| t == 1 || LinearAgnostic::epoch_of(t) != LinearAgnostic::epoch_of(t - 1))
            .collect();
        assert_eq!(starts, vec![1, 3, 6, 10]);
    }

    /// With budget 0 the only expert is `E(∅)`, which trains on its own predictions.
    #[test]
    fn zero_budget_is_the_self_trained_learner() {
        let mut own = make_linear_learner(2).unwrap();
        let mut wrapped = make_linear_agnostic(2, 8, Some(&[0.01]), 100, 3).unwrap();
        assert_eq!(wrapped.budgets(), &[0]);
        let pts = [
            [0.2, 0.1],
            [-0.5, 0.3],
            [0.9, -0.4],
            [0.1, 0.8],
            [-0.7, -0.6],
            [0.4, 0.4],
            [0.0, -0.2],
            [0.6, 0.1],
        ];
        for p in pts {
            let x = p.to_vec();
            let y = x[0] + 0.5 * x[1] >= 0.0;
            let a = own.predict(&x).unwrap();
            assert_eq!(a, wrapped.predict(&x).unwrap());
            own.observe(a).unwrap();
            wrapped.observe(y).unwrap();
        }
    }
}
