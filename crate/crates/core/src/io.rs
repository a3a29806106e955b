//! JSON forms of sets, spectra, matrices and tiling certificates.
//!
//! * set: `{"set": [0, 1, 4, 5]}`
//! * spectrum: `{"spectrum": ["0", "1/8", "1/2", "5/8"]}`, plus `"raw": true`
//!   when the representatives are not reduced into `[0, 1)`
//! * matrix: `{"n": N, "entries": [[re, im], …]}` row-major; exact matrices
//!   add `"order": Q`, `"coeffs"` (one coefficient list over `ζ_Q^0 … ζ_Q^{Q−1}`
//!   per entry) and either `"scale": "p/q"` (the multiplier) or
//!   `"scale_sq": "p/q"` (its square, when the multiplier is irrational).
//! * certificate: `{"A": […], "T": […], "d": 8, "verified": true}`

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::numeric::{
    format_rational, parse_rational, AnyMatrix, ComplexMatrix, Cyclotomic, RootTable,
};
use crate::spectra::{IntSet, Spectrum};
use crate::tiling::{verify_tiling, TilingCertificate};

fn bad(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

pub fn set_to_json(a: &IntSet) -> Value {
    json!({ "set": a.elements() })
}

pub fn spectrum_strings(g: &Spectrum) -> Vec<String> {
    g.elements().iter().map(format_rational).collect()
}

/// Non-canonical representatives are flagged with `"raw": true`.
pub fn spectrum_to_json(g: &Spectrum) -> Value {
    if g.is_canonical() {
        json!({ "spectrum": spectrum_strings(g) })
    } else {
        json!({ "spectrum": spectrum_strings(g), "raw": true })
    }
}

/// Reads `{"set": [...]}` or a bare array of integers.
pub fn set_from_json(v: &Value) -> Result<IntSet> {
    let arr = v.get("set").unwrap_or(v);
    let items = arr
        .as_array()
        .ok_or_else(|| Error::InvalidSet("expected an array".into()))?;
    let xs = items
        .iter()
        .map(|x| {
            x.as_i64()
                .ok_or_else(|| Error::InvalidSet(format!("{x} is not an integer")))
        })
        .collect::<Result<Vec<_>>>()?;
    IntSet::new(xs)
}

/// Reads `{"spectrum": [...]}` or a bare array; elements are `"p/q"`
/// strings or integers. Representatives are reduced modulo 1 unless
/// `"raw": true` is present.
pub fn spectrum_from_json(v: &Value) -> Result<Spectrum> {
    let raw = v.get("raw").and_then(Value::as_bool).unwrap_or(false);
    let arr = v.get("spectrum").unwrap_or(v);
    let items = arr
        .as_array()
        .ok_or_else(|| Error::InvalidSpectrum("expected an array".into()))?;
    let qs = items
        .iter()
        .map(|x| match x {
            Value::String(s) => parse_rational(s),
            Value::Number(n) => n
                .as_i64()
                .map(crate::numeric::Rational::from_integer)
                .ok_or_else(|| Error::InvalidSpectrum(format!("{n} is not an integer"))),
            other => Err(Error::InvalidSpectrum(format!("{other} is not a rational"))),
        })
        .collect::<Result<Vec<_>>>()?;
    if raw {
        Spectrum::raw(qs)
    } else {
        Spectrum::new(qs)
    }
}

fn entries_json(m: &ComplexMatrix) -> Vec<Value> {
    m.row_major().iter().map(|z| json!([z.re, z.im])).collect()
}

fn big_to_json(x: &BigInt) -> Value {
    match x.to_i64() {
        Some(v) => json!(v),
        None => json!(x.to_string()),
    }
}

fn format_big_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

fn parse_big_rational(s: &str) -> Result<BigRational> {
    let err = || bad(format!("cannot parse rational {s:?}"));
    let (n, d) = match s.trim().split_once('/') {
        Some((n, d)) => (
            n.trim().parse::<BigInt>().map_err(|_| err())?,
            d.trim().parse::<BigInt>().map_err(|_| err())?,
        ),
        None => (
            s.trim().parse::<BigInt>().map_err(|_| err())?,
            BigInt::from(1),
        ),
    };
    if d == BigInt::from(0) {
        return Err(err());
    }
    Ok(BigRational::new(n, d))
}

pub fn complex_matrix_to_json(m: &ComplexMatrix) -> Value {
    json!({ "n": m.rows(), "entries": entries_json(m) })
}

pub fn root_table_to_json(t: &RootTable) -> Value {
    let t = t.normalized();
    let mut v = complex_matrix_to_json(&t.to_complex());
    let coeffs: Vec<Value> = t
        .entries()
        .iter()
        .map(|e| Value::Array(e.coefficients().iter().map(big_to_json).collect()))
        .collect();
    v["order"] = json!(t.order());
    match t.rational_scale() {
        Some(s) => v["scale"] = json!(format_big_rational(&s)),
        None => v["scale_sq"] = json!(format_big_rational(t.scale_sq())),
    }
    v["coeffs"] = Value::Array(coeffs);
    v
}

pub fn any_matrix_to_json(m: &AnyMatrix) -> Value {
    match m {
        AnyMatrix::Exact(t) => root_table_to_json(t),
        AnyMatrix::Float(f) => complex_matrix_to_json(f),
    }
}

/// Reads a matrix. The exact form is used when `"coeffs"` is present, and
/// its float entries must then agree with the coefficients.
pub fn matrix_from_json(v: &Value) -> Result<AnyMatrix> {
    let n = v
        .get("n")
        .and_then(Value::as_u64)
        .ok_or_else(|| bad("matrix needs a positive integer \"n\""))? as usize;
    if n == 0 {
        return Err(bad("matrix size must be positive"));
    }
    let entries = v
        .get("entries")
        .and_then(Value::as_array)
        .ok_or_else(|| bad("matrix needs an \"entries\" array"))?;
    if entries.len() != n * n {
        return Err(Error::DimensionMismatch(format!(
            "{} entries for a {n}x{n} matrix",
            entries.len()
        )));
    }
    let values = entries
        .iter()
        .map(|e| match e.as_array().map(|p| p.as_slice()) {
            Some([re, im]) => match (re.as_f64(), im.as_f64()) {
                (Some(re), Some(im)) => Ok(Complex64::new(re, im)),
                _ => Err(bad(format!("entry {e} is not a pair of numbers"))),
            },
            _ => Err(bad(format!("entry {e} is not a [re, im] pair"))),
        })
        .collect::<Result<Vec<_>>>()?;
    let float = ComplexMatrix::from_row_major(n, n, values)?;
    let Some(coeffs) = v.get("coeffs") else {
        return Ok(AnyMatrix::Float(float));
    };
    let order = v
        .get("order")
        .and_then(Value::as_u64)
        .filter(|&q| q >= 1)
        .ok_or_else(|| bad("exact matrix needs a positive \"order\""))?;
    let scale_sq = match (
        v.get("scale").and_then(Value::as_str),
        v.get("scale_sq").and_then(Value::as_str),
    ) {
        (Some(s), None) => {
            let s = parse_big_rational(s)?;
            &s * &s
        }
        (None, Some(s)) => parse_big_rational(s)?,
        (None, None) => BigRational::from_integer(BigInt::from(1)),
        (Some(_), Some(_)) => return Err(bad("give either \"scale\" or \"scale_sq\", not both")),
    };
    let rows = coeffs
        .as_array()
        .filter(|c| c.len() == n * n)
        .ok_or_else(|| bad("\"coeffs\" must hold one list per entry"))?;
    let cyclo = rows
        .iter()
        .map(|row| {
            let items = row
                .as_array()
                .ok_or_else(|| bad("coefficient list expected"))?;
            let big = items
                .iter()
                .map(|c| match c {
                    Value::Number(x) => x
                        .as_i64()
                        .map(BigInt::from)
                        .ok_or_else(|| bad(format!("{x} is not an integer"))),
                    Value::String(s) => s
                        .parse::<BigInt>()
                        .map_err(|_| bad(format!("{s:?} is not an integer"))),
                    other => Err(bad(format!("{other} is not an integer"))),
                })
                .collect::<Result<Vec<_>>>()?;
            Cyclotomic::from_coefficients(order, big)
        })
        .collect::<Result<Vec<_>>>()?;
    let table = RootTable::with_scale_sq(n, n, order, cyclo, scale_sq)?;
    if table.to_complex().max_abs_diff(&float) > 1e-9 {
        return Err(bad("float entries disagree with the exact coefficients"));
    }
    Ok(AnyMatrix::Exact(table))
}

pub fn certificate_to_json(cert: &TilingCertificate) -> Value {
    json!({
        "A": cert.a.elements(),
        "T": cert.t.elements(),
        "d": cert.d,
        "verified": verify_tiling(cert),
    })
}

pub fn certificate_from_json(v: &Value) -> Result<TilingCertificate> {
    let a = set_from_json(v.get("A").ok_or_else(|| bad("certificate needs \"A\""))?)?;
    let t = set_from_json(v.get("T").ok_or_else(|| bad("certificate needs \"T\""))?)?;
    let d = v
        .get("d")
        .and_then(Value::as_u64)
        .filter(|&d| d >= 1)
        .ok_or_else(|| bad("certificate needs a positive \"d\""))?;
    Ok(TilingCertificate { a, t, d })
}
