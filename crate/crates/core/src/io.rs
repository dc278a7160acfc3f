//! Manifold files and byte-stable JSON reports.

use std::fs;
use std::path::Path;
use std::str::FromStr;

use num::BigRational;
use num_complex::Complex64;
use serde::ser::{SerializeMap, SerializeSeq};
use serde::{Deserialize, Serialize, Serializer};
use serde_json::value::RawValue;

use crate::error::{Error, Result};
use crate::fields::PolyVectorField;
use crate::normal_form::{Eigenvalues, ExactEigenvalue, MonomialTerm, NormalFormMap};
use crate::poly::MultiIndex;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexJson {
    pub re: f64,
    pub im: f64,
}

impl From<ComplexJson> for Complex64 {
    fn from(c: ComplexJson) -> Self {
        Complex64::new(c.re, c.im)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermJson {
    /// 1-based.
    pub target: usize,
    pub exponents: Vec<u32>,
    pub coeff: ComplexJson,
}

/// Rational modulus and argument (in units of `π`), e.g. `"1/4"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExactJson {
    pub modulus: String,
    pub angle: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifoldFile {
    pub n: usize,
    pub mu: Vec<ComplexJson>,
    #[serde(default)]
    pub terms: Vec<TermJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu_exact: Option<Vec<ExactJson>>,
}

fn rational(s: &str) -> Result<BigRational> {
    BigRational::from_str(s.trim()).map_err(|_| Error::Parse(format!("not a rational number: {s:?}")))
}

impl ManifoldFile {
    pub fn to_map(&self) -> Result<NormalFormMap> {
        let (eigenvalues, terms) = self.to_parts()?;
        NormalFormMap::new(eigenvalues, terms)
    }

    /// Eigenvalues and 0-based terms, without the normal-form checks.
    pub fn to_parts(&self) -> Result<(Eigenvalues, Vec<MonomialTerm>)> {
        if self.mu.len() != self.n {
            return Err(Error::Parse(format!("n = {} but {} eigenvalues given", self.n, self.mu.len())));
        }
        let eigenvalues = match &self.mu_exact {
            None => Eigenvalues::new(self.mu.iter().map(|&c| c.into()).collect())?,
            Some(exact) => {
                if exact.len() != self.n {
                    return Err(Error::Parse(format!(
                        "n = {} but {} exact eigenvalues given",
                        self.n,
                        exact.len()
                    )));
                }
                let values = exact
                    .iter()
                    .map(|e| Ok(ExactEigenvalue::new(rational(&e.modulus)?, rational(&e.angle)?)))
                    .collect::<Result<Vec<_>>>()?;
                let ev = Eigenvalues::exact(values)?;
                for (i, (a, b)) in ev.as_slice().iter().zip(&self.mu).enumerate() {
                    let b: Complex64 = (*b).into();
                    if (a - b).norm() > 1e-12 * a.norm() {
                        return Err(Error::Parse(format!(
                            "mu[{}] disagrees with mu_exact[{}]",
                            i + 1,
                            i + 1
                        )));
                    }
                }
                ev
            }
        };
        let mut terms = Vec::with_capacity(self.terms.len());
        for (k, t) in self.terms.iter().enumerate() {
            if t.target == 0 || t.target > self.n {
                return Err(Error::Parse(format!("term {}: target {} outside 1..={}", k + 1, t.target, self.n)));
            }
            if t.exponents.len() != self.n {
                return Err(Error::Parse(format!(
                    "term {}: {} exponents for n = {}",
                    k + 1,
                    t.exponents.len(),
                    self.n
                )));
            }
            terms.push(MonomialTerm {
                target: t.target - 1,
                exponents: MultiIndex::new(t.exponents.clone()),
                coeff: t.coeff.into(),
            });
        }
        Ok((eigenvalues, terms))
    }

    pub fn from_map(map: &NormalFormMap) -> Self {
        let c = |z: Complex64| ComplexJson { re: z.re, im: z.im };
        ManifoldFile {
            n: map.dim(),
            mu: map.eigenvalues().as_slice().iter().map(|&z| c(z)).collect(),
            terms: map
                .terms()
                .iter()
                .map(|t| TermJson {
                    target: t.target + 1,
                    exponents: t.exponents.as_slice().to_vec(),
                    coeff: c(t.coeff),
                })
                .collect(),
            mu_exact: map.eigenvalues().exact_values().map(|v| {
                v.iter()
                    .map(|e| ExactJson {
                        modulus: e.modulus.to_string(),
                        angle: e.angle.to_string(),
                    })
                    .collect()
            }),
        }
    }

    pub fn to_json(&self) -> Json {
        let mut obj = Json::object()
            .with("n", Json::Int(self.n as i64))
            .with("mu", Json::Array(self.mu.iter().map(|c| Json::complex((*c).into())).collect()))
            .with(
                "terms",
                Json::Array(
                    self.terms
                        .iter()
                        .map(|t| {
                            Json::object()
                                .with("target", Json::Int(t.target as i64))
                                .with("exponents", Json::Array(t.exponents.iter().map(|&e| Json::Int(e as i64)).collect()))
                                .with("coeff", Json::complex(t.coeff.into()))
                        })
                        .collect(),
                ),
            );
        if let Some(exact) = &self.mu_exact {
            obj = obj.with(
                "mu_exact",
                Json::Array(
                    exact
                        .iter()
                        .map(|e| {
                            Json::object()
                                .with("modulus", Json::Str(e.modulus.clone()))
                                .with("angle", Json::Str(e.angle.clone()))
                        })
                        .collect(),
                ),
            );
        }
        obj
    }
}

pub fn parse_manifold_file(text: &str) -> Result<ManifoldFile> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

pub fn parse_manifold(text: &str) -> Result<NormalFormMap> {
    parse_manifold_file(text)?.to_map()
}

pub fn load_manifold(path: &Path) -> Result<NormalFormMap> {
    parse_manifold(&fs::read_to_string(path)?)
}

/// Parses a point given as `[{"re": …, "im": …}, …]`.
pub fn parse_point(text: &str) -> Result<Vec<Complex64>> {
    let pts: Vec<ComplexJson> = serde_json::from_str(text).map_err(|e| Error::Parse(format!("point: {e}")))?;
    Ok(pts.into_iter().map(Into::into).collect())
}

/// Ordered JSON tree whose floats print with 17 significant digits.
#[derive(Clone, Debug, PartialEq)]
pub enum Json {
    Null,
    Bool(bool),
    Int(i64),
    Real(f64),
    Str(String),
    Array(Vec<Json>),
    Object(Vec<(String, Json)>),
}

impl Json {
    pub fn object() -> Self {
        Json::Object(Vec::new())
    }

    pub fn with(mut self, key: &str, value: Json) -> Self {
        if let Json::Object(ref mut entries) = self {
            entries.push((key.to_string(), value));
        }
        self
    }

    pub fn complex(z: Complex64) -> Self {
        Json::object().with("re", Json::Real(z.re)).with("im", Json::Real(z.im))
    }

    pub fn reals(xs: &[f64]) -> Self {
        Json::Array(xs.iter().map(|&x| Json::Real(x)).collect())
    }

    pub fn complexes(zs: &[Complex64]) -> Self {
        Json::Array(zs.iter().map(|&z| Json::complex(z)).collect())
    }

    pub fn to_pretty(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("JSON tree serializes");
        s.push('\n');
        s
    }
}

fn format_real(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "null".to_string()
    }
}

impl Serialize for Json {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Json::Null => s.serialize_unit(),
            Json::Bool(b) => s.serialize_bool(*b),
            Json::Int(i) => s.serialize_i64(*i),
            Json::Real(x) => {
                let raw = RawValue::from_string(format_real(*x)).map_err(serde::ser::Error::custom)?;
                raw.serialize(s)
            }
            Json::Str(v) => s.serialize_str(v),
            Json::Array(items) => {
                let mut seq = s.serialize_seq(Some(items.len()))?;
                for item in items {
                    seq.serialize_element(item)?;
                }
                seq.end()
            }
            Json::Object(entries) => {
                let mut map = s.serialize_map(Some(entries.len()))?;
                for (k, v) in entries {
                    map.serialize_entry(k, v)?;
                }
                map.end()
            }
        }
    }
}

/// Terms of a field as `[{"target", "exponents", "coeff"}]`, targets 1-based.
pub fn field_json(v: &PolyVectorField) -> Json {
    Json::Array(
        v.terms()
            .into_iter()
            .map(|(s, m, coeff)| {
                Json::object()
                    .with("target", Json::Int(s as i64 + 1))
                    .with("exponents", Json::Array(m.as_slice().iter().map(|&e| Json::Int(e as i64)).collect()))
                    .with("coeff", Json::complex(coeff))
            })
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    const SURFACE: &str = r#"{"n": 2, "mu": [{"re": 0.25, "im": 0.0}, {"re": 0.5, "im": 0.0}],
        "terms": [{"target": 1, "exponents": [0, 2], "coeff": {"re": 1.0, "im": 0.0}}]}"#;

    #[test]
    fn parses_and_round_trips() {
        let map = parse_manifold(SURFACE).unwrap();
        assert_eq!(map.terms()[0].target, 0);
        let again = ManifoldFile::from_map(&map).to_json().to_pretty();
        assert_eq!(parse_manifold(&again).unwrap(), map);
    }

    #[test]
    fn rejects_bad_input() {
        let unit = r#"{"n": 2, "mu": [{"re": 0.5, "im": 0.0}, {"re": 1.0, "im": 0.0}], "terms": []}"#;
        let err = parse_manifold(unit).unwrap_err().to_string();
        assert!(err.contains("eigenvalue modulus not in (0,1)"), "{err}");

        let extra = r#"{"n": 2, "mu": [{"re": 0.5, "im": 0.0}, {"re": 0.5, "im": 0.0}], "terms": [], "x": 1}"#;
        assert!(matches!(parse_manifold(extra), Err(Error::Parse(_))));

        let target = SURFACE.replace("\"target\": 1", "\"target\": 3");
        assert!(matches!(parse_manifold(&target), Err(Error::Parse(_))));

        let nonres = SURFACE.replace("[0, 2]", "[1, 1]");
        assert!(matches!(parse_manifold(&nonres), Err(Error::Validation(_))));
    }

    #[test]
    fn exact_eigenvalues() {
        let text = r#"{"n": 2, "mu": [{"re": 0.25, "im": 0.0}, {"re": 0.5, "im": 0.0}],
            "terms": [{"target": 1, "exponents": [0, 2], "coeff": {"re": 1.0, "im": 0.0}}],
            "mu_exact": [{"modulus": "1/4", "angle": "0"}, {"modulus": "1/2", "angle": "0"}]}"#;
        let map = parse_manifold(text).unwrap();
        assert!(map.eigenvalues().exact_values().is_some());
        let mismatch = text.replace("\"1/4\"", "\"1/3\"");
        assert!(parse_manifold(&mismatch).is_err());
    }

    #[test]
    fn reals_have_17_digits() {
        let j = Json::object().with("x", Json::Real(0.1)).with("y", Json::Real(f64::NAN));
        let s = serde_json::to_string(&j).unwrap();
        assert_eq!(s, r#"{"x":1.0000000000000001e-1,"y":null}"#);
        let back: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["x"].as_f64(), Some(0.1));
    }
}
