//! JSON form of truncated linear maps.
//!
//! ```json
//! { "field": "Q" | {"quadratic": d} | {"prime": p},
//!   "degree_bound": n,
//!   "columns": [ ["num/den", ...], ... ] }
//! ```
//!
//! Column `i` lists the coefficients (degree 0 first) of the image of the
//! `i`-th basis vector. Over `Q` and `F_p` the basis is `X^0, …, X^n`; over
//! `Q(√d)` it is `X^0, √d·X^0, X^1, √d·X^1, …`, so there are `2(n+1)` columns.
//! Quadratic entries are `["u", "v"]` for `u + v√d`, prime entries are
//! residues in `0..p` written as decimal strings.

use serde_json::{json, Value};

use kfree_core::field::{fmt_rational, parse_rational, QuadElem};
use kfree_core::preserver::TruncatedLinearMap;
use kfree_core::{Error, Field, FieldSpec, Polynomial, PrimeField, QuadraticField, RationalField, Result};

/// Fields whose elements have a map-file encoding.
pub trait MapField: Field {
    fn elem_from_json(&self, v: &Value) -> std::result::Result<Self::Elem, String>;
    fn elem_to_json(&self, e: &Self::Elem) -> Value;
}

fn rational_from_json(v: &Value) -> std::result::Result<kfree_core::Rational, String> {
    let s = v.as_str().ok_or_else(|| format!("expected a \"num/den\" string, got {v}"))?;
    parse_rational(s).ok_or_else(|| format!("malformed rational {s:?}"))
}

impl MapField for RationalField {
    fn elem_from_json(&self, v: &Value) -> std::result::Result<kfree_core::Rational, String> {
        rational_from_json(v)
    }
    fn elem_to_json(&self, e: &kfree_core::Rational) -> Value {
        Value::String(fmt_rational(e))
    }
}

impl MapField for QuadraticField {
    fn elem_from_json(&self, v: &Value) -> std::result::Result<QuadElem, String> {
        match v.as_array().map(Vec::as_slice) {
            Some([u, w]) => Ok(QuadElem::new(rational_from_json(u)?, rational_from_json(w)?)),
            _ => Err(format!("expected [\"u\", \"v\"], got {v}")),
        }
    }
    fn elem_to_json(&self, e: &QuadElem) -> Value {
        json!([fmt_rational(&e.u), fmt_rational(&e.v)])
    }
}

impl MapField for PrimeField {
    fn elem_from_json(&self, v: &Value) -> std::result::Result<u64, String> {
        let s = v.as_str().ok_or_else(|| format!("expected a decimal residue string, got {v}"))?;
        if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
            return Err(format!("malformed residue {s:?}"));
        }
        match s.parse::<u64>() {
            Ok(r) if r < self.modulus() => Ok(r),
            _ => Err(format!("residue {s} is not in 0..{}", self.modulus())),
        }
    }
    fn elem_to_json(&self, e: &u64) -> Value {
        Value::String(e.to_string())
    }
}

/// A map read from a file, over whichever field the file declares.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AnyMap {
    Rational(TruncatedLinearMap<RationalField>),
    Quadratic(TruncatedLinearMap<QuadraticField>),
    Prime(TruncatedLinearMap<PrimeField>),
}

impl AnyMap {
    pub fn spec(&self) -> FieldSpec {
        match self {
            AnyMap::Rational(m) => m.field().spec(),
            AnyMap::Quadratic(m) => m.field().spec(),
            AnyMap::Prime(m) => m.field().spec(),
        }
    }
}

fn bad(msg: impl Into<String>) -> Error {
    Error::MapFormat(msg.into())
}

fn field_from_json(v: &Value) -> Result<FieldSpec> {
    if v.as_str() == Some("Q") {
        return Ok(FieldSpec::Rational);
    }
    let obj = v.as_object().filter(|o| o.len() == 1);
    let entry = obj.and_then(|o| o.iter().next());
    match entry {
        Some((key, n)) if key == "quadratic" => n
            .as_i64()
            .map(FieldSpec::Quadratic)
            .ok_or_else(|| bad(format!("field: quadratic parameter must be an integer, got {n}"))),
        Some((key, n)) if key == "prime" => n
            .as_u64()
            .map(FieldSpec::Prime)
            .ok_or_else(|| bad(format!("field: prime must be a positive integer, got {n}"))),
        _ => Err(bad(format!(
            "field: expected \"Q\", {{\"quadratic\": d}} or {{\"prime\": p}}, got {v}"
        ))),
    }
}

fn columns_from_json<F: MapField>(field: F, n: usize, cols: &[Value]) -> Result<TruncatedLinearMap<F>> {
    let expected = field.base_basis().len() * (n + 1);
    if cols.len() != expected {
        return Err(bad(format!(
            "expected {expected} columns for degree bound {n} over {}, got {}",
            field.spec(),
            cols.len()
        )));
    }
    let mut polys = Vec::with_capacity(expected);
    for (c, col) in cols.iter().enumerate() {
        let entries = col
            .as_array()
            .ok_or_else(|| bad(format!("column {c}: expected an array")))?;
        if entries.len() != n + 1 {
            return Err(bad(format!(
                "column {c}: expected {} entries, got {}",
                n + 1,
                entries.len()
            )));
        }
        let coeffs = entries
            .iter()
            .enumerate()
            .map(|(r, e)| field.elem_from_json(e).map_err(|m| bad(format!("column {c}, row {r}: {m}"))))
            .collect::<Result<Vec<_>>>()?;
        polys.push(Polynomial::new(field.clone(), coeffs));
    }
    TruncatedLinearMap::from_columns(field, n, polys)
}

/// Parses and validates a map file.
pub fn parse_map(text: &str) -> Result<AnyMap> {
    let doc: Value = serde_json::from_str(text).map_err(|e| bad(format!("invalid JSON: {e}")))?;
    let obj = doc.as_object().ok_or_else(|| bad("top level must be an object"))?;
    for key in obj.keys() {
        if !matches!(key.as_str(), "field" | "degree_bound" | "columns") {
            return Err(bad(format!("unknown key {key:?}")));
        }
    }
    let spec = field_from_json(obj.get("field").ok_or_else(|| bad("missing \"field\""))?)?;
    let n = obj
        .get("degree_bound")
        .ok_or_else(|| bad("missing \"degree_bound\""))?
        .as_u64()
        .ok_or_else(|| bad("degree_bound must be a nonnegative integer"))? as usize;
    let cols = obj
        .get("columns")
        .ok_or_else(|| bad("missing \"columns\""))?
        .as_array()
        .ok_or_else(|| bad("columns must be an array"))?;
    Ok(match spec {
        FieldSpec::Rational => AnyMap::Rational(columns_from_json(RationalField, n, cols)?),
        FieldSpec::Quadratic(d) => AnyMap::Quadratic(columns_from_json(QuadraticField::new(d)?, n, cols)?),
        FieldSpec::Prime(p) => AnyMap::Prime(columns_from_json(PrimeField::new(p)?, n, cols)?),
    })
}

fn field_to_json(spec: FieldSpec) -> Value {
    match spec {
        FieldSpec::Rational => json!("Q"),
        FieldSpec::Quadratic(d) => json!({ "quadratic": d }),
        FieldSpec::Prime(p) => json!({ "prime": p }),
    }
}

/// Writes a map file, one column per line.
pub fn emit_map<F: MapField>(map: &TruncatedLinearMap<F>) -> String {
    let f = map.field();
    let n = map.degree_bound();
    let rows: Vec<String> = map
        .columns()
        .iter()
        .map(|c| {
            let entries: Vec<Value> = (0..=n).map(|i| f.elem_to_json(&c.coeff(i))).collect();
            format!("    {}", Value::Array(entries))
        })
        .collect();
    format!(
        "{{\n  \"field\": {},\n  \"degree_bound\": {n},\n  \"columns\": [\n{}\n  ]\n}}\n",
        field_to_json(f.spec()),
        rows.join(",\n")
    )
}
