//! Problem specifications read from JSON.
//!
//! ```json
//! {"d": 4, "profile": [1, 1, 2], "indices": [1, "2", {"re": "-3", "im": "0"}],
//!  "options": {"seed": 7, "backend": "auto"}}
//! ```
//!
//! JSON integers and strings (`"p"`, `"p/q"`, finite decimals) are exact.
//! Non-integral JSON numbers are floats; one float makes the whole spectrum
//! inexact.

use num_complex::Complex64;
use serde::Deserialize;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::index::{IndexSpectrum, MultiplicityProfile};
use crate::scalar::{gaussian, parse_rational, Gaussian, Scalar};
use crate::solver::{Backend, SolverConfig};

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemOptions {
    pub seed: Option<u64>,
    pub tol_dedup: Option<f64>,
    pub tol_coincide: Option<f64>,
    pub backend: Option<Backend>,
    pub threads: Option<usize>,
    pub retries: Option<usize>,
    pub output: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProblem {
    d: usize,
    profile: Vec<usize>,
    indices: Vec<Value>,
    #[serde(default)]
    options: ProblemOptions,
}

#[derive(Clone, Debug, PartialEq)]
pub enum IndexValue {
    Exact(Gaussian),
    Float(Complex64),
}

impl IndexValue {
    pub fn to_c64(&self) -> Complex64 {
        match self {
            IndexValue::Exact(g) => g.to_c64(),
            IndexValue::Float(z) => *z,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProblemSpec {
    pub profile: MultiplicityProfile,
    pub indices: Vec<IndexValue>,
    pub options: ProblemOptions,
}

enum Part {
    Exact(num_rational::BigRational),
    Float(f64),
}

fn parse_part(v: &Value) -> Result<Part> {
    match v {
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(Part::Exact(num_rational::BigRational::from_integer(i.into())))
            } else if let Some(u) = n.as_u64() {
                Ok(Part::Exact(num_rational::BigRational::from_integer(u.into())))
            } else {
                let f = n.as_f64().ok_or_else(|| Error::Parse(format!("unreadable number {n}")))?;
                Ok(Part::Float(f))
            }
        }
        Value::String(s) => parse_rational(s).map(Part::Exact),
        other => Err(Error::Parse(format!("expected a number or rational string, got {other}"))),
    }
}

pub fn parse_index(v: &Value) -> Result<IndexValue> {
    let (re, im) = match v {
        Value::Object(map) => {
            if let Some(k) = map.keys().find(|k| *k != "re" && *k != "im") {
                return Err(Error::Parse(format!("unexpected key {k:?} in complex index")));
            }
            let part = |key: &str| match map.get(key) {
                Some(v) => parse_part(v),
                None => Ok(Part::Exact(num_traits::Zero::zero())),
            };
            let (re, im) = (part("re")?, part("im")?);
            (re, im)
        }
        other => (parse_part(other)?, Part::Exact(num_traits::Zero::zero())),
    };
    Ok(match (re, im) {
        (Part::Exact(a), Part::Exact(b)) => IndexValue::Exact(gaussian(a, b)),
        (a, b) => {
            let f = |p: Part| match p {
                Part::Exact(q) => crate::scalar::rational_to_f64(&q),
                Part::Float(x) => x,
            };
            IndexValue::Float(Complex64::new(f(a), f(b)))
        }
    })
}

impl ProblemSpec {
    /// Parses and validates; with `complete_last` the input lists `l - 1`
    /// indices and the last is set to minus their sum.
    pub fn from_json(text: &str, complete_last: bool) -> Result<ProblemSpec> {
        let raw: RawProblem = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let profile = MultiplicityProfile::new(raw.profile)?;
        if profile.degree() != raw.d {
            return Err(Error::arg(format!(
                "profile {profile} has degree {}, but d = {}",
                profile.degree(),
                raw.d
            )));
        }
        let mut indices = raw.indices.iter().map(parse_index).collect::<Result<Vec<_>>>()?;
        let ell = profile.ell();
        if complete_last {
            if indices.len() + 1 != ell {
                return Err(Error::arg(format!(
                    "with --complete-last give {} indices, got {}",
                    ell - 1,
                    indices.len()
                )));
            }
            let all_exact = indices.iter().all(|v| matches!(v, IndexValue::Exact(_)));
            let last = if all_exact {
                let sum = indices.iter().fold(<Gaussian as num_traits::Zero>::zero(), |acc, v| match v {
                    IndexValue::Exact(g) => acc + g.clone(),
                    IndexValue::Float(_) => unreachable!(),
                });
                IndexValue::Exact(-sum)
            } else {
                IndexValue::Float(-indices.iter().map(IndexValue::to_c64).sum::<Complex64>())
            };
            indices.push(last);
        }
        if indices.len() != ell {
            return Err(Error::arg(format!("profile {profile} needs {ell} indices, got {}", indices.len())));
        }
        let spec = ProblemSpec {
            profile,
            indices,
            options: raw.options,
        };
        spec.spectrum()?;
        Ok(spec)
    }

    pub fn is_exact(&self) -> bool {
        self.indices.iter().all(|v| matches!(v, IndexValue::Exact(_)))
    }

    /// The validated spectrum (zero-sum checked exactly when exact).
    pub fn spectrum(&self) -> Result<IndexSpectrum> {
        if self.is_exact() {
            let values = self
                .indices
                .iter()
                .map(|v| match v {
                    IndexValue::Exact(g) => g.clone(),
                    IndexValue::Float(_) => unreachable!(),
                })
                .collect();
            IndexSpectrum::exact(self.profile.clone(), values)
        } else {
            IndexSpectrum::approximate(self.profile.clone(), self.indices.iter().map(IndexValue::to_c64).collect())
        }
    }

    /// Solver settings from the spec, with `base` supplying the defaults.
    pub fn solver_config(&self, base: &SolverConfig) -> SolverConfig {
        let o = &self.options;
        SolverConfig {
            seed: o.seed.unwrap_or(base.seed),
            tol_dedup: o.tol_dedup.unwrap_or(base.tol_dedup),
            tol_coincide: o.tol_coincide.unwrap_or(base.tol_coincide),
            backend: o.backend.unwrap_or(base.backend),
            threads: o.threads.or(base.threads),
            retries: o.retries.unwrap_or(base.retries),
        }
    }
}
