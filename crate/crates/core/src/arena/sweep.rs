use std::io::Write;

use serde_json::{json, Value};

use super::{estimate_regret, GameConfig, RegretEstimate};
use crate::error::{Error, Result};
use crate::problem::Problem;
use crate::rational::{format_rational, Rational};

pub const CSV_HEADER: &str = "axis,mean_regret,stderr,normalized_mean,T,R,seed";

#[derive(Clone, Debug, PartialEq)]
pub enum SweepAxis {
    Horizon(Vec<usize>),
    Eps(Vec<Rational>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub axis: String,
    pub estimate: RegretEstimate,
    pub horizon: usize,
    pub reps: usize,
    pub seed: u64,
}

impl SweepRow {
    pub fn normalized_mean(&self) -> f64 {
        self.estimate.mean / self.horizon as f64
    }

    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.axis,
            format_sig(self.estimate.mean),
            format_sig(self.estimate.stderr),
            format_sig(self.normalized_mean()),
            self.horizon,
            self.reps,
            self.seed
        )
    }

    /// Numbers are rounded as in the CSV so both outputs agree.
    pub fn to_json(&self) -> Value {
        let num = |x: f64| {
            format_sig(x)
                .parse::<f64>()
                .map_or(Value::Null, |v| json!(v))
        };
        json!({
            "axis": self.axis,
            "mean_regret": num(self.estimate.mean),
            "stderr": num(self.estimate.stderr),
            "normalized_mean": num(self.normalized_mean()),
            "T": self.horizon,
            "R": self.reps,
            "seed": self.seed,
            "approximate": self.estimate.approximate,
        })
    }
}

/// Plain decimal with 12 significant digits and no trailing zeros.
pub fn format_sig(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x.is_finite() {
            "0".into()
        } else {
            x.to_string()
        };
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (11 - magnitude).max(0) as usize;
    let s = format!("{x:.decimals$}");
    let s = if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    };
    if s == "-0" {
        "0".into()
    } else {
        s
    }
}

/// One regret estimate per axis value, all with the template's master seed.
pub fn sweep(problem: &Problem, template: &GameConfig, axis: &SweepAxis) -> Result<Vec<SweepRow>> {
    let points: Vec<(String, GameConfig)> = match axis {
        SweepAxis::Horizon(ts) => ts
            .iter()
            .map(|&t| {
                (
                    t.to_string(),
                    GameConfig {
                        horizon: t,
                        ..template.clone()
                    },
                )
            })
            .collect(),
        SweepAxis::Eps(es) => es
            .iter()
            .map(|e| {
                let learner = template.learner.with_eps(e);
                let adversary = template.adversary.with_eps(e);
                if learner.is_none() && adversary.is_none() {
                    return Err(Error::input(
                        "an eps axis needs an eps-parameterized learner or adversary",
                    ));
                }
                let cfg = GameConfig {
                    learner: learner.unwrap_or_else(|| template.learner.clone()),
                    adversary: adversary.unwrap_or_else(|| template.adversary.clone()),
                    ..template.clone()
                };
                Ok((format_rational(e), cfg))
            })
            .collect::<Result<_>>()?,
    };
    if points.is_empty() {
        return Err(Error::input("sweep axis is empty"));
    }
    points
        .into_iter()
        .map(|(axis, cfg)| {
            let estimate = estimate_regret(problem, &cfg)?;
            Ok(SweepRow {
                axis,
                estimate,
                horizon: cfg.horizon,
                reps: cfg.reps,
                seed: cfg.seed,
            })
        })
        .collect()
}

pub fn write_csv<W: Write>(rows: &[SweepRow], mut out: W) -> Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(out, "{}", r.csv_line())?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(format_sig(0.0), "0");
        assert_eq!(format_sig(1.0), "1");
        assert_eq!(format_sig(1.0 / 3.0), "0.333333333333");
        assert_eq!(format_sig(-2.5), "-2.5");
        assert_eq!(format_sig(123456.7890123456), "123456.789012");
        assert_eq!(format_sig(1e-5 / 3.0), "0.00000333333333333");
        assert_eq!(format_sig(1e14), "100000000000000");
    }
}
