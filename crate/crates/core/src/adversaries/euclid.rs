use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{Adversary, RoundPlan};
use crate::error::{Error, Result};
use crate::rational::to_f64;
use crate::rng::{cell, streams};
use crate::spec::SpecString;

/// Law of a point in `ℝ^d`.
#[derive(Clone, Debug, PartialEq)]
pub enum EuclideanLaw {
    /// Uniform on `[-r, r]^d`.
    Box { d: usize, r: f64 },
    /// Isotropic normal with standard deviation `sigma`.
    Gaussian { d: usize, sigma: f64 },
}

impl EuclideanLaw {
    pub fn d(&self) -> usize {
        match self {
            EuclideanLaw::Box { d, .. } | EuclideanLaw::Gaussian { d, .. } => *d,
        }
    }

    pub fn draw(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        match self {
            EuclideanLaw::Box { d, r } => (0..*d).map(|_| rng.gen_range(-*r..=*r)).collect(),
            EuclideanLaw::Gaussian { d, sigma } => (0..*d)
                .map(|_| {
                    let z: f64 = rng.sample(StandardNormal);
                    sigma * z
                })
                .collect(),
        }
    }
}

/// `x ↦ 1[a·x + b ≥ 0]`, inverted when `flip` is set.
#[derive(Clone, Debug, PartialEq)]
pub struct Halfspace {
    pub a: Vec<f64>,
    pub b: f64,
    pub flip: bool,
}

impl Halfspace {
    pub fn label(&self, x: &[f64]) -> bool {
        let s: f64 = self.a.iter().zip(x).map(|(a, x)| a * x).sum::<f64>() + self.b;
        (s >= 0.0) != self.flip
    }
}

/// Stream description of a Euclidean problem, e.g. `gaussian:sigma=1,a=1;-1,b=0,noise=1/10`
/// or `box:r=1,a=0;1,b=-0.25`.
#[derive(Clone, Debug, PartialEq)]
pub struct EuclideanStreamSpec {
    pub law: EuclideanLaw,
    pub target: Halfspace,
    pub noise: f64,
}

fn numbers(v: &str) -> Result<Vec<f64>> {
    v.split(';')
        .map(|p| crate::rational::parse_rational(p).map(|r| to_f64(&r)))
        .collect()
}

impl EuclideanStreamSpec {
    pub fn parse(s: &str, d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::input("dimension must be at least 1"));
        }
        let spec = SpecString::parse(s)?;
        spec.expect_keys(&["r", "sigma", "a", "b", "noise"])?;
        let scalar = |key: &str, default: f64| -> Result<f64> {
            Ok(spec.rational(key)?.map(|r| to_f64(&r)).unwrap_or(default))
        };
        let law = match spec.name.as_str() {
            "box" => EuclideanLaw::Box {
                d,
                r: scalar("r", 1.0)?,
            },
            "gaussian" => EuclideanLaw::Gaussian {
                d,
                sigma: scalar("sigma", 1.0)?,
            },
            other => return Err(Error::input(format!("unknown Euclidean law {other:?}"))),
        };
        let scale = match &law {
            EuclideanLaw::Box { r, .. } => *r,
            EuclideanLaw::Gaussian { sigma, .. } => *sigma,
        };
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::input("the law's scale must be positive"));
        }
        let a = match spec.value("a") {
            Some(v) => numbers(v)?,
            None => {
                let mut a = vec![0.0; d];
                a[0] = 1.0;
                a
            }
        };
        if a.len() != d {
            return Err(Error::input(format!(
                "halfspace normal has {} entries, expected {d}",
                a.len()
            )));
        }
        let noise = scalar("noise", 0.0)?;
        if !(0.0..=1.0).contains(&noise) {
            return Err(Error::input("noise must lie in [0, 1]"));
        }
        Ok(EuclideanStreamSpec {
            law,
            target: Halfspace {
                a,
                b: scalar("b", 0.0)?,
                flip: false,
            },
            noise,
        })
    }
}

/// Iid points from the stream's law, labeled by its halfspace with independent flips.
pub struct EuclideanIid {
    stream: EuclideanStreamSpec,
    seed: u64,
}

pub fn make_euclidean_iid(stream: EuclideanStreamSpec, seed: u64) -> Result<EuclideanIid> {
    if stream.target.a.len() != stream.law.d() {
        return Err(Error::input("halfspace and law have different dimensions"));
    }
    Ok(EuclideanIid { stream, seed })
}

impl Adversary<Vec<f64>> for EuclideanIid {
    fn next_round(
        &mut self,
        t: usize,
        _history: &[(Vec<f64>, bool)],
    ) -> Result<RoundPlan<Vec<f64>>> {
        let noise = self.stream.noise;
        let flip = noise > 0.0 && cell(self.seed, streams::NOISE, t as u64).gen::<f64>() < noise;
        let mut rule = self.stream.target.clone();
        rule.flip = flip;
        Ok(RoundPlan {
            law: self.stream.law.clone(),
            rule,
            member: None,
        })
    }

    fn realizable(&self) -> bool {
        self.stream.noise == 0.0
    }
}
