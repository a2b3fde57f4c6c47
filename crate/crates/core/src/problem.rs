//! Problem files: a JSON description of a finite game, a Euclidean stream, or both.
//!
//! ```json
//! {
//!   "n": 4,
//!   "parent": [null, 0, 1, 2],
//!   "functions": ["0000", "1000", "1100", "1110", "1111"],
//!   "distribution_class": {"kind": "list", "members": [["1/4", "1/4", "1/4", "1/4"]]},
//!   "euclidean": {"d": 2, "stream_spec": "box:r=1,a=1;-1"}
//! }
//! ```
//!
//! `functions` also accepts a generator name: `thresholds`, `powerset`,
//! `at_most_k:k=2` or `tree_segments` (which needs `parent`). Rows are bit strings,
//! bit `x` being the label of point `x`. Distribution classes are
//! `{"kind": "list", "members": [...], "mixture_cap"?}`,
//! `{"kind": "smoothed", "base": [...], "cap": "4"}` or `{"kind": "dirac_all"}`.

use serde_json::{json, Map, Value};

use crate::adversaries::EuclideanStreamSpec;
use crate::env::FiniteEnv;
use crate::error::{Error, Result};
use crate::model::{
    ClassKind, Distribution, DistributionClass, HypothesisClass, InstanceSpace, DEFAULT_MIXTURE_CAP,
};
use crate::rational::{format_rational, parse_rational, Rational};
use crate::spec::SpecString;

#[derive(Clone, Debug, PartialEq)]
pub struct EuclideanProblem {
    pub d: usize,
    pub stream_spec: String,
    pub stream: EuclideanStreamSpec,
}

/// A loaded, validated problem.
pub struct Problem {
    pub finite: Option<FiniteEnv>,
    pub euclidean: Option<EuclideanProblem>,
}

fn bad(msg: impl Into<String>) -> Error {
    Error::input(msg)
}

fn rational_value(v: &Value) -> Result<Rational> {
    match v {
        Value::String(s) => parse_rational(s),
        Value::Number(n) if n.is_i64() => {
            Ok(Rational::from_integer(n.as_i64().expect("checked").into()))
        }
        other => Err(bad(format!(
            "expected a rational string \"p/q\", got {other}"
        ))),
    }
}

fn distribution_value(v: &Value, n: usize) -> Result<Distribution> {
    let masses = v
        .as_array()
        .ok_or_else(|| bad("a distribution must be an array of masses"))?;
    if masses.len() != n {
        return Err(bad(format!(
            "distribution has {} masses, expected {n}",
            masses.len()
        )));
    }
    Distribution::new(masses.iter().map(rational_value).collect::<Result<_>>()?)
}

fn distribution_json(d: &Distribution) -> Value {
    Value::Array(
        d.masses()
            .iter()
            .map(|m| Value::String(format_rational(m)))
            .collect(),
    )
}

fn parse_functions(v: &Value, n: usize, order: Option<&InstanceSpace>) -> Result<HypothesisClass> {
    match v {
        Value::String(s) => {
            let spec = SpecString::parse(s)?;
            match spec.name.as_str() {
                "thresholds" => Ok(HypothesisClass::thresholds(n)),
                "powerset" => {
                    if n > 16 {
                        return Err(bad("powerset classes are limited to 16 points"));
                    }
                    Ok(HypothesisClass::powerset(n))
                }
                "at_most_k" => {
                    spec.expect_keys(&["k"])?;
                    Ok(HypothesisClass::at_most_k(
                        n,
                        spec.integer("k")?.ok_or_else(|| bad("at_most_k needs k"))?,
                    ))
                }
                "tree_segments" => HypothesisClass::tree_segments(
                    order.ok_or_else(|| bad("tree_segments needs \"parent\""))?,
                ),
                other => Err(bad(format!("unknown function generator {other:?}"))),
            }
        }
        Value::Array(rows) => {
            let matrix = rows
                .iter()
                .map(|r| {
                    let s = r
                        .as_str()
                        .ok_or_else(|| bad("function rows must be bit strings"))?;
                    if s.len() != n {
                        return Err(bad(format!(
                            "function row {s:?} has length {}, expected {n}",
                            s.len()
                        )));
                    }
                    s.chars()
                        .map(|c| match c {
                            '0' => Ok(false),
                            '1' => Ok(true),
                            _ => Err(bad(format!("function row {s:?} is not a bit string"))),
                        })
                        .collect::<Result<Vec<bool>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            HypothesisClass::from_matrix(&matrix)
        }
        _ => Err(bad(
            "\"functions\" must be a list of bit strings or a generator name",
        )),
    }
}

fn parse_distribution_class(v: &Value, n: usize) -> Result<DistributionClass> {
    let obj = v
        .as_object()
        .ok_or_else(|| bad("\"distribution_class\" must be an object"))?;
    let kind = obj
        .get("kind")
        .and_then(Value::as_str)
        .ok_or_else(|| bad("distribution_class needs \"kind\""))?;
    let allowed: &[&str] = match kind {
        "list" => &["kind", "members", "mixture_cap"],
        "smoothed" => &["kind", "base", "cap"],
        "dirac_all" => &["kind"],
        other => return Err(bad(format!("unknown distribution class kind {other:?}"))),
    };
    if let Some(k) = obj.keys().find(|k| !allowed.contains(&k.as_str())) {
        return Err(bad(format!(
            "unknown key {k:?} in a {kind} distribution class"
        )));
    }
    match kind {
        "list" => {
            let members = obj
                .get("members")
                .and_then(Value::as_array)
                .ok_or_else(|| bad("list needs \"members\""))?;
            let list = members
                .iter()
                .map(|m| distribution_value(m, n))
                .collect::<Result<Vec<_>>>()?;
            let u = DistributionClass::list(list)?;
            match obj.get("mixture_cap") {
                None => Ok(u),
                Some(c) => u.with_mixture_cap(
                    c.as_u64()
                        .ok_or_else(|| bad("mixture_cap must be an integer"))?
                        as usize,
                ),
            }
        }
        "smoothed" => {
            let base = distribution_value(
                obj.get("base")
                    .ok_or_else(|| bad("smoothed needs \"base\""))?,
                n,
            )?;
            DistributionClass::smoothed(
                base,
                rational_value(
                    obj.get("cap")
                        .ok_or_else(|| bad("smoothed needs \"cap\""))?,
                )?,
            )
        }
        _ => Ok(DistributionClass::dirac_all(n)),
    }
}

fn distribution_class_json(u: &DistributionClass) -> Value {
    match u.kind() {
        ClassKind::List(list) => {
            let mut m = Map::new();
            m.insert("kind".into(), json!("list"));
            m.insert(
                "members".into(),
                Value::Array(list.iter().map(distribution_json).collect()),
            );
            if u.mixture_cap() != DEFAULT_MIXTURE_CAP {
                m.insert("mixture_cap".into(), json!(u.mixture_cap()));
            }
            Value::Object(m)
        }
        ClassKind::Smoothed { base, cap } => {
            json!({"kind": "smoothed", "base": distribution_json(base), "cap": format_rational(cap)})
        }
        ClassKind::DiracAll => json!({"kind": "dirac_all"}),
    }
}

impl Problem {
    pub fn from_json(v: &Value) -> Result<Self> {
        let obj = v
            .as_object()
            .ok_or_else(|| bad("a problem must be a JSON object"))?;
        const KEYS: [&str; 5] = [
            "n",
            "parent",
            "functions",
            "distribution_class",
            "euclidean",
        ];
        if let Some(k) = obj.keys().find(|k| !KEYS.contains(&k.as_str())) {
            return Err(bad(format!("unknown problem key {k:?}")));
        }
        let euclidean = match obj.get("euclidean") {
            None => None,
            Some(e) => {
                let d = e
                    .get("d")
                    .and_then(Value::as_u64)
                    .ok_or_else(|| bad("euclidean needs an integer \"d\""))?
                    as usize;
                let spec = e
                    .get("stream_spec")
                    .and_then(Value::as_str)
                    .unwrap_or("box");
                Some(EuclideanProblem {
                    d,
                    stream_spec: spec.to_string(),
                    stream: EuclideanStreamSpec::parse(spec, d)?,
                })
            }
        };
        let finite = match obj.get("functions") {
            None => {
                if obj.contains_key("distribution_class") || obj.contains_key("parent") {
                    return Err(bad(
                        "\"distribution_class\" and \"parent\" need \"functions\"",
                    ));
                }
                None
            }
            Some(functions) => {
                let n = obj
                    .get("n")
                    .and_then(Value::as_u64)
                    .ok_or_else(|| bad("problem needs an integer \"n\""))?
                    as usize;
                if n == 0 {
                    return Err(bad("\"n\" must be at least 1"));
                }
                let order = match obj.get("parent") {
                    None | Some(Value::Null) => None,
                    Some(Value::Array(ps)) => {
                        let parent = ps
                            .iter()
                            .map(|p| match p {
                                Value::Null => Ok(None),
                                p => p
                                    .as_u64()
                                    .map(|i| Some(i as usize))
                                    .ok_or_else(|| bad("parent entries are indices or null")),
                            })
                            .collect::<Result<Vec<_>>>()?;
                        if parent.len() != n {
                            return Err(bad(format!(
                                "\"parent\" has {} entries, expected {n}",
                                parent.len()
                            )));
                        }
                        Some(InstanceSpace::with_order(parent)?)
                    }
                    Some(_) => return Err(bad("\"parent\" must be an array")),
                };
                let class = parse_functions(functions, n, order.as_ref())?;
                let u = parse_distribution_class(
                    obj.get("distribution_class")
                        .ok_or_else(|| bad("problem needs \"distribution_class\""))?,
                    n,
                )?;
                Some(FiniteEnv::new(class, u, order)?)
            }
        };
        if finite.is_none() && euclidean.is_none() {
            return Err(bad("a problem needs \"functions\" or \"euclidean\""));
        }
        Ok(Problem { finite, euclidean })
    }

    #[allow(clippy::should_implement_trait)]
    pub fn from_str(s: &str) -> Result<Self> {
        Self::from_json(&serde_json::from_str(s)?)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::input(format!("cannot read {}: {e}", path.display())))?;
        Self::from_str(&text)
    }

    /// Canonical form: sorted keys, explicit bit-string rows, reduced `"p/q"` rationals.
    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        if let Some(env) = &self.finite {
            m.insert("n".into(), json!(env.n()));
            if let Some(parent) = env.order.as_ref().and_then(|o| o.parent()) {
                m.insert("parent".into(), json!(parent));
            }
            let rows = (0..env.class.m())
                .map(|f| {
                    (0..env.n())
                        .map(|x| if env.class.label(f, x) { '1' } else { '0' })
                        .collect::<String>()
                })
                .collect::<Vec<_>>();
            m.insert("functions".into(), json!(rows));
            m.insert("distribution_class".into(), distribution_class_json(&env.u));
        }
        if let Some(e) = &self.euclidean {
            m.insert(
                "euclidean".into(),
                json!({"d": e.d, "stream_spec": e.stream_spec}),
            );
        }
        Value::Object(m)
    }

    pub fn to_canonical_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("serializable");
        s.push('\n');
        s
    }

    pub fn require_finite(&self) -> Result<&FiniteEnv> {
        self.finite
            .as_ref()
            .ok_or_else(|| bad("this command needs a finite problem (\"functions\")"))
    }

    pub fn require_euclidean(&self) -> Result<&EuclideanProblem> {
        self.euclidean
            .as_ref()
            .ok_or_else(|| bad("this command needs a Euclidean problem (\"euclidean\")"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_round_trip() {
        let text = r#"{"functions": "thresholds", "n": 3,
            "distribution_class": {"kind": "list", "members": [["2/6", 0.5, "1/6"]]}}"#;
        assert!(
            Problem::from_str(text).is_err(),
            "floats are not exact rationals"
        );
        let text = r#"{"functions": "thresholds", "n": 3,
            "distribution_class": {"kind": "list", "members": [["2/6", "1/2", "1/6"]]}}"#;
        let p = Problem::from_str(text).unwrap();
        let once = p.to_canonical_string();
        let twice = Problem::from_str(&once).unwrap().to_canonical_string();
        assert_eq!(once, twice);
        assert!(once.contains("\"1/3\""));
        assert!(once.contains("\"100\""));
    }

    #[test]
    fn validation_errors() {
        for text in [
            r#"{"n": 2}"#,
            r#"{"n": 2, "functions": ["01", "2x"], "distribution_class": {"kind": "dirac_all"}}"#,
            r#"{"n": 2, "functions": ["01"], "distribution_class": {"kind": "list", "members": [["1/2", "1/3"]]}}"#,
            r#"{"n": 2, "functions": "tree_segments", "distribution_class": {"kind": "dirac_all"}}"#,
            r#"{"n": 2, "functions": "thresholds", "distribution_class": {"kind": "dirac_all"}, "extra": 1}"#,
            r#"{"euclidean": {"d": 0}}"#,
        ] {
            assert!(Problem::from_str(text).is_err(), "{text}");
        }
        let p = Problem::from_str(r#"{"euclidean": {"d": 2, "stream_spec": "gaussian"}}"#).unwrap();
        assert!(p.finite.is_none());
        assert_eq!(p.require_euclidean().unwrap().d, 2);
    }
}
