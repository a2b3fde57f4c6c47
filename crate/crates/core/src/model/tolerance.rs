use num_traits::{Signed, Zero};

use super::class::PointSet;
use super::distribution::Distribution;
use crate::error::{Error, Result};
use crate::rational::{one, Rational};

/// Nondecreasing step function `ρ`: `ρ(x)` is the value of the last step whose
/// threshold is `≤ x`, or `floor` below every threshold.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ToleranceFunction {
    floor: Rational,
    steps: Vec<(Rational, Rational)>,
}

impl ToleranceFunction {
    pub fn new(floor: Rational, steps: Vec<(Rational, Rational)>) -> Result<Self> {
        if floor.is_negative() {
            return Err(Error::input("tolerance floor is negative"));
        }
        let mut prev_t: Option<&Rational> = None;
        let mut prev_v = &floor;
        for (t, v) in &steps {
            if prev_t.is_some_and(|p| t <= p) {
                return Err(Error::input(
                    "tolerance thresholds must be strictly increasing",
                ));
            }
            if v < prev_v {
                return Err(Error::input("tolerance values must be nondecreasing"));
            }
            prev_t = Some(t);
            prev_v = v;
        }
        Ok(ToleranceFunction { floor, steps })
    }

    pub fn floor(&self) -> &Rational {
        &self.floor
    }

    pub fn steps(&self) -> &[(Rational, Rational)] {
        &self.steps
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.steps
            .iter()
            .rev()
            .find(|(t, _)| t <= x)
            .map_or_else(|| self.floor.clone(), |(_, v)| v.clone())
    }

    /// `sup{δ ∈ (0,1] : ρ(δ) < ε}`, or 0 when the set is empty.
    pub fn inverse(&self, eps: &Rational) -> Rational {
        if &self.floor >= eps {
            return Rational::zero();
        }
        self.steps
            .iter()
            .find(|(_, v)| v >= eps)
            .map_or_else(one, |(t, _)| t.clone().min(one()))
    }
}

/// A base measure with a tolerance: admissible `μ` satisfy `μ(B) ≤ ρ(μ₀(B))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmoothedToleranceSpec {
    pub base: Distribution,
    pub rho: ToleranceFunction,
}

impl SmoothedToleranceSpec {
    /// Checks `μ(B) ≤ ρ(μ₀(B))` on every given set; returns the first violating set.
    pub fn first_violation<'a>(
        &self,
        mu: &Distribution,
        sets: impl IntoIterator<Item = &'a PointSet>,
    ) -> Option<&'a PointSet> {
        sets.into_iter()
            .find(|b| mu.mass_of(b) > self.rho.eval(&self.base.mass_of(b)))
    }
}

/// Tolerance `ρ(ε) = min_α αε + 1/(σ f′(α))` over a tabulated derivative, evaluated
/// on `grid`; `ρ` below the smallest grid point is `min_α 1/(σ f′(α))`.
pub fn rho_from_f_divergence(
    base: Distribution,
    fprime: &[(Rational, Rational)],
    sigma: &Rational,
    grid: &[Rational],
) -> Result<SmoothedToleranceSpec> {
    if !sigma.is_positive() {
        return Err(Error::input("sigma must be positive"));
    }
    if fprime.is_empty() {
        return Err(Error::input("derivative table is empty"));
    }
    for w in fprime.windows(2) {
        if w[1].0 <= w[0].0 {
            return Err(Error::input(
                "derivative table must have strictly increasing alpha",
            ));
        }
        if w[1].1 < w[0].1 {
            return Err(Error::input("derivative table is not monotone"));
        }
    }
    if fprime.iter().any(|(a, _)| !a.is_positive()) {
        return Err(Error::input("alpha values must be positive"));
    }
    let usable: Vec<(&Rational, Rational)> = fprime
        .iter()
        .filter(|(_, d)| d.is_positive())
        .map(|(a, d)| (a, one() / (sigma * d)))
        .collect();
    if usable.is_empty() {
        return Err(Error::input("derivative table has no positive entry"));
    }
    let floor = usable
        .iter()
        .map(|(_, inv)| inv.clone())
        .min()
        .expect("nonempty");
    let mut grid: Vec<Rational> = grid.to_vec();
    if grid.iter().any(|e| e.is_negative()) {
        return Err(Error::input("grid values must be nonnegative"));
    }
    grid.sort();
    grid.dedup();
    let steps = grid
        .into_iter()
        .map(|e| {
            let v = usable
                .iter()
                .map(|(a, inv)| *a * &e + inv)
                .min()
                .expect("nonempty");
            (e, v)
        })
        .collect();
    Ok(SmoothedToleranceSpec {
        base,
        rho: ToleranceFunction::new(floor, steps)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn slope_table() -> Vec<(Rational, Rational)> {
        (1..=16).map(|i| (ratio(i, 4), ratio(i, 4))).collect()
    }

    #[test]
    fn kl_like_slope_minimum() {
        let spec =
            rho_from_f_divergence(Distribution::uniform(2), &slope_table(), &int(1), &[int(1)])
                .unwrap();
        assert_eq!(spec.rho.eval(&int(1)), int(2));
    }

    #[test]
    fn zero_eps_uses_largest_alpha() {
        let spec =
            rho_from_f_divergence(Distribution::uniform(2), &slope_table(), &int(1), &[int(1)])
                .unwrap();
        assert_eq!(spec.rho.eval(&int(0)), ratio(1, 4));
    }

    #[test]
    fn non_monotone_table_rejected() {
        let t = vec![(int(1), int(2)), (int(2), int(1))];
        assert!(rho_from_f_divergence(Distribution::uniform(2), &t, &int(1), &[int(1)]).is_err());
    }

    #[test]
    fn inverse_of_steps() {
        let rho = ToleranceFunction::new(
            int(0),
            vec![(ratio(1, 4), ratio(1, 2)), (ratio(1, 2), int(1))],
        )
        .unwrap();
        assert_eq!(rho.inverse(&ratio(1, 2)), ratio(1, 4));
        assert_eq!(rho.inverse(&ratio(3, 4)), ratio(1, 2));
        assert_eq!(rho.inverse(&int(2)), int(1));
    }
}
