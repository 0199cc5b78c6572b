//! The JSON algebra document.
//!
//! ```json
//! {"name": "C", "p_plus_1": 2, "q": 0,
//!  "gamma": [[[1, 0], [0, 1]], [[0, 1], [-1, 0]]]}
//! ```
//!
//! Entries may be JSON integers, `"num/den"` strings or floats. A document
//! whose entries are all integers or rational strings (or floats with an
//! integral value) is loaded exactly; any other float switches the whole
//! algebra to `f64`.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{A1Data, AlgebraSpec, Element};
use crate::error::{Error, Result};
use crate::scalar::{format_rational, parse_rational, Rational, Scalar};

/// A parsed algebra in whichever arithmetic its entries allow.
#[derive(Clone, Debug)]
pub enum ParsedAlgebra {
    Exact(AlgebraSpec<Rational>),
    Float(AlgebraSpec<f64>),
}

impl ParsedAlgebra {
    pub fn name(&self) -> &str {
        match self {
            ParsedAlgebra::Exact(a) => a.name(),
            ParsedAlgebra::Float(a) => a.name(),
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, ParsedAlgebra::Exact(_))
    }

    pub fn to_f64(&self) -> AlgebraSpec<f64> {
        match self {
            ParsedAlgebra::Exact(a) => a.to_f64(),
            ParsedAlgebra::Float(a) => a.clone(),
        }
    }
}

/// Serializable mirror of the document, used for writing algebras back out.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct AlgebraDocument {
    pub name: String,
    pub p_plus_1: usize,
    pub q: usize,
    pub gamma: Vec<Vec<Vec<Value>>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub a1: Option<A1Document>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct A1Document {
    pub s: Vec<usize>,
    pub a: Vec<Vec<Value>>,
}

impl AlgebraDocument {
    /// Dense document for an exact algebra; rationals become `"n/d"` strings
    /// and integers stay JSON integers.
    pub fn from_spec(alg: &AlgebraSpec<Rational>) -> Self {
        let dim = alg.dim();
        let gamma = (0..dim)
            .map(|i| {
                (0..dim)
                    .map(|j| (0..dim).map(|k| rational_value(&alg.gamma(i, j, k))).collect())
                    .collect()
            })
            .collect();
        let a1 = alg.a1().map(|w| A1Document {
            s: w.s_sequence(),
            a: w
                .multipliers()
                .iter()
                .map(|a| a.coeffs().iter().map(rational_value).collect())
                .collect(),
        });
        AlgebraDocument {
            name: alg.name().to_string(),
            p_plus_1: alg.p_plus_1(),
            q: alg.q(),
            gamma,
            a1,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("document serializes")
    }
}

fn rational_value(r: &Rational) -> Value {
    if r.is_integer() {
        if let Ok(v) = r.numer().to_string().parse::<i64>() {
            return Value::from(v);
        }
    }
    Value::from(format_rational(r))
}

enum Entry {
    Exact(Rational),
    Float(f64),
}

fn entry(v: &Value, location: &str) -> Result<Entry> {
    let schema = |message: String| Error::Schema {
        location: location.to_string(),
        message,
    };
    match v {
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(Entry::Exact(Rational::from_i64(i)))
            } else {
                let f = n.as_f64().ok_or_else(|| schema(format!("unrepresentable number {n}")))?;
                if f.fract() == 0.0 && f.abs() < 9.0e15 {
                    Ok(Entry::Exact(Rational::from_i64(f as i64)))
                } else {
                    Ok(Entry::Float(f))
                }
            }
        }
        Value::String(s) => parse_rational(s)
            .map(Entry::Exact)
            .map_err(|_| schema(format!("expected a rational \"num/den\", found {s:?}"))),
        other => Err(schema(format!("expected a number, found {other}"))),
    }
}

fn field<'a>(obj: &'a serde_json::Map<String, Value>, key: &str) -> Result<&'a Value> {
    obj.get(key).ok_or_else(|| Error::Schema {
        location: key.to_string(),
        message: "missing field".into(),
    })
}

fn count(v: &Value, location: &str) -> Result<usize> {
    v.as_u64().map(|n| n as usize).ok_or_else(|| Error::Schema {
        location: location.to_string(),
        message: format!("expected a non-negative integer, found {v}"),
    })
}

fn array<'a>(v: &'a Value, location: &str, len: usize, what: &'static str) -> Result<&'a [Value]> {
    let arr = v.as_array().ok_or_else(|| Error::Schema {
        location: location.to_string(),
        message: format!("expected an array, found {v}"),
    })?;
    if arr.len() != len {
        return Err(Error::DimensionMismatch {
            what,
            expected: len,
            found: arr.len(),
        });
    }
    Ok(arr)
}

/// Parses an algebra document, checking shapes and the unit axiom.
pub fn parse_algebra(text: &str) -> Result<ParsedAlgebra> {
    let root: Value = serde_json::from_str(text)
        .map_err(|e| Error::Parse(format!("line {}, column {}: {e}", e.line(), e.column())))?;
    let obj = root.as_object().ok_or_else(|| Error::Schema {
        location: "$".into(),
        message: "expected a JSON object".into(),
    })?;
    let name = match obj.get("name") {
        Some(Value::String(s)) => s.clone(),
        Some(other) => {
            return Err(Error::Schema {
                location: "name".into(),
                message: format!("expected a string, found {other}"),
            })
        }
        None => "unnamed".to_string(),
    };
    let p1 = count(field(obj, "p_plus_1")?, "p_plus_1")?;
    let q = count(field(obj, "q")?, "q")?;
    let dim = p1 + q;

    let mut entries = Vec::with_capacity(dim * dim * dim);
    let gamma = array(field(obj, "gamma")?, "gamma", dim, "gamma rows")?;
    for (i, row) in gamma.iter().enumerate() {
        let row = array(row, &format!("gamma[{i}]"), dim, "gamma columns")?;
        for (j, col) in row.iter().enumerate() {
            let col = array(col, &format!("gamma[{i}][{j}]"), dim, "gamma entries")?;
            for (k, v) in col.iter().enumerate() {
                entries.push(entry(v, &format!("gamma[{i}][{j}][{k}]"))?);
            }
        }
    }

    let mut a1_entries = None;
    if let Some(a1) = obj.get("a1").filter(|v| !v.is_null()) {
        let a1 = a1.as_object().ok_or_else(|| Error::Schema {
            location: "a1".into(),
            message: "expected an object".into(),
        })?;
        let s = field(a1, "s")?
            .as_array()
            .ok_or_else(|| Error::Schema {
                location: "a1.s".into(),
                message: "expected an array".into(),
            })?
            .iter()
            .enumerate()
            .map(|(i, v)| count(v, &format!("a1.s[{i}]")))
            .collect::<Result<Vec<_>>>()?;
        let a = array(field(a1, "a")?, "a1.a", q, "(A1) multipliers")?;
        let mut rows = Vec::with_capacity(q);
        for (j, row) in a.iter().enumerate() {
            let loc = format!("a1.a[{j}]");
            let arr = row.as_array().ok_or_else(|| Error::Schema {
                location: loc.clone(),
                message: "expected an array".into(),
            })?;
            if arr.len() != p1 && arr.len() != dim {
                return Err(Error::Schema {
                    location: loc,
                    message: format!("expected {p1} or {dim} coefficients, found {}", arr.len()),
                });
            }
            let row = arr
                .iter()
                .enumerate()
                .map(|(k, v)| entry(v, &format!("{loc}[{k}]")))
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        a1_entries = Some((s, rows));
    }

    let exact = entries.iter().all(|e| matches!(e, Entry::Exact(_)))
        && a1_entries
            .iter()
            .flat_map(|(_, rows)| rows.iter().flatten())
            .all(|e| matches!(e, Entry::Exact(_)));
    if exact {
        build::<Rational>(name, p1, q, &entries, a1_entries).map(ParsedAlgebra::Exact)
    } else {
        build::<f64>(name, p1, q, &entries, a1_entries).map(ParsedAlgebra::Float)
    }
}

fn convert<S: Scalar>(e: &Entry) -> S {
    match e {
        Entry::Exact(r) => S::from_rational(r),
        Entry::Float(f) => S::from_rational(
            &Rational::from_float(*f).expect("finite JSON number"),
        ),
    }
}

fn build<S: Scalar>(
    name: String,
    p1: usize,
    q: usize,
    entries: &[Entry],
    a1: Option<(Vec<usize>, Vec<Vec<Entry>>)>,
) -> Result<AlgebraSpec<S>> {
    let dim = p1 + q;
    let gamma: Vec<S> = entries.iter().map(convert).collect();
    let alg = AlgebraSpec::from_dense(name, p1, q, &gamma)?;
    let Some((s, rows)) = a1 else { return Ok(alg) };
    let a = rows
        .iter()
        .map(|row| {
            let mut coeffs: Vec<S> = row.iter().map(convert).collect();
            coeffs.resize(dim, S::zero());
            Element::from_coeffs(coeffs)
        })
        .collect();
    alg.with_a1(A1Data::new(&s, a, q)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{complex, example4};

    const COMPLEX: &str = r#"{"name": "C", "p_plus_1": 2, "q": 0,
        "gamma": [[[1, 0], [0, 1]], [[0, 1], [-1, 0]]]}"#;

    #[test]
    fn complex_document() {
        let ParsedAlgebra::Exact(alg) = parse_algebra(COMPLEX).unwrap() else {
            panic!("expected exact arithmetic")
        };
        assert_eq!(alg.name(), "C");
        let e1 = alg.basis(1);
        assert_eq!(alg.mul(&e1, &e1), -alg.one());
    }

    #[test]
    fn broken_unit_is_reported_with_indices() {
        let doc = r#"{"name": "bad", "p_plus_1": 2, "q": 0,
            "gamma": [[[1, 0], [0, 0]], [[0, 1], [-1, 0]]]}"#;
        let err = parse_algebra(doc).unwrap_err();
        assert_eq!(err.to_string(), "unit axiom violated at (0,1)");
    }

    #[test]
    fn shape_and_syntax_errors() {
        let short = r#"{"p_plus_1": 2, "q": 0, "gamma": [[[1, 0], [0, 1]]]}"#;
        assert!(matches!(parse_algebra(short), Err(Error::DimensionMismatch { .. })));
        let bad = r#"{"p_plus_1": 2, "q": 0, "gamma": [[[1, 0], [0, 1]], [[0, 1], ["x", 0]]]}"#;
        let err = parse_algebra(bad).unwrap_err();
        assert!(err.to_string().contains("gamma[1][1][0]"), "{err}");
        assert!(matches!(parse_algebra("{"), Err(Error::Parse(_))));
    }

    #[test]
    fn fractional_floats_switch_to_f64() {
        let doc = r#"{"p_plus_1": 2, "q": 0,
            "gamma": [[[1, 0], [0, 1]], [[0, 1], [-0.5, 0]]]}"#;
        assert!(matches!(parse_algebra(doc).unwrap(), ParsedAlgebra::Float(_)));
        let doc = r#"{"p_plus_1": 2, "q": 0,
            "gamma": [[[1, 0], [0, 1]], [[0, 1], ["-1/2", 0.0]]]}"#;
        assert!(parse_algebra(doc).unwrap().is_exact());
    }

    #[test]
    fn round_trip_of_builtins() {
        for alg in [complex(), example4()] {
            let json = AlgebraDocument::from_spec(&alg).to_json();
            let ParsedAlgebra::Exact(back) = parse_algebra(&json).unwrap() else {
                panic!("exact round trip expected")
            };
            assert_eq!(back.dim(), alg.dim());
            for i in 0..alg.dim() {
                for j in 0..alg.dim() {
                    assert_eq!(back.products(i, j), alg.products(i, j));
                }
            }
            assert_eq!(back.a1(), alg.a1());
        }
    }

    #[test]
    fn short_a1_vectors_are_padded() {
        let mut doc = AlgebraDocument::from_spec(&example4());
        for row in doc.a1.as_mut().unwrap().a.iter_mut() {
            row.truncate(6);
        }
        let ParsedAlgebra::Exact(alg) = parse_algebra(&doc.to_json()).unwrap() else {
            panic!()
        };
        assert_eq!(alg.a1(), example4().a1());
    }
}
