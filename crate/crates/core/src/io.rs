//! JSON input and output.
//!
//! Complex entries are `[re, im]` pairs of decimal or rational strings
//! (plain JSON numbers and a bare string for a real value are accepted
//! too). Matrices are nested row-major arrays, or flat row-major arrays
//! when the enclosing object gives `dim`. A germ is an array of entries,
//! constant term first.

use serde_json::{json, Value};

use crate::blanchfield::Xi;
use crate::error::{Error, Result};
use crate::family::HermitianFamily;
use crate::germ::{Germ, GermMat, LaurentGerm};
use crate::linkform::{Parity, TorsionForm};
use crate::localsys::{GermComplex, MonodromyDeformation};
use crate::matrix::Mat;
use crate::scalar::{Scalar, Tol};

/// Parses JSON text, reporting syntax errors with their position.
pub fn parse_json(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| Error::Parse { line: e.line(), column: e.column(), message: e.to_string() })
}

fn bad(path: &str, what: &str) -> Error {
    Error::Input(format!("{path}: {what}"))
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| bad(key, "missing field"))
}

fn as_usize(v: &Value, path: &str) -> Result<usize> {
    v.as_u64().map(|x| x as usize).ok_or_else(|| bad(path, "expected a non-negative integer"))
}

fn number_text(v: &Value, path: &str) -> Result<String> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) => Ok(n.to_string()),
        _ => Err(bad(path, "expected a number or a numeric string")),
    }
}

pub fn scalar_from_json<F: Scalar>(v: &Value, path: &str) -> Result<F> {
    match v {
        Value::Array(a) if a.len() == 2 => {
            F::parse_pair(&number_text(&a[0], path)?, &number_text(&a[1], path)?).map_err(|e| bad(path, &e.to_string()))
        }
        Value::String(_) | Value::Number(_) => F::parse_pair(&number_text(v, path)?, "0").map_err(|e| bad(path, &e.to_string())),
        _ => Err(bad(path, "expected [re, im]")),
    }
}

pub fn scalar_to_json<F: Scalar>(x: &F) -> Value {
    let (re, im) = x.to_pair();
    json!([re, im])
}

fn is_entry(v: &Value) -> bool {
    match v {
        Value::Array(a) => a.len() == 2 && a.iter().all(|x| x.is_string() || x.is_number()),
        Value::String(_) | Value::Number(_) => true,
        _ => false,
    }
}

/// A matrix of arbitrary entries, nested or flat (`dims` required if flat).
fn matrix_of<T: Clone>(
    v: &Value,
    path: &str,
    dims: Option<(usize, usize)>,
    leaf: &dyn Fn(&Value) -> bool,
    entry: &dyn Fn(&Value, &str) -> Result<T>,
) -> Result<Mat<T>> {
    let rows = v.as_array().ok_or_else(|| bad(path, "expected an array"))?;
    let nested = rows.first().is_some_and(|r| r.is_array() && !leaf(r))
        || dims.is_some_and(|(r, c)| rows.len() == r && r * c != r && rows.iter().all(Value::is_array));
    let (r, c, data) = if nested {
        let c = rows[0].as_array().map_or(0, |x| x.len());
        let mut data = Vec::new();
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_array().ok_or_else(|| bad(path, "ragged matrix"))?;
            if row.len() != c {
                return Err(bad(path, &format!("row {i} has {} entries, expected {c}", row.len())));
            }
            for (j, x) in row.iter().enumerate() {
                data.push(entry(x, &format!("{path}[{i}][{j}]"))?);
            }
        }
        (rows.len(), c, data)
    } else {
        let (r, c) = match dims {
            Some(d) => d,
            None if rows.is_empty() => (0, 0),
            None => return Err(bad(path, "flat matrix needs a dimension")),
        };
        if rows.len() != r * c {
            return Err(bad(path, &format!("{} entries, expected {}", rows.len(), r * c)));
        }
        let data = rows.iter().enumerate().map(|(k, x)| entry(x, &format!("{path}[{k}]"))).collect::<Result<_>>()?;
        (r, c, data)
    };
    if let Some((er, ec)) = dims {
        if (r, c) != (er, ec) && !(r == 0 && er == 0) {
            return Err(Error::Dimension(format!("{path}: matrix is {r}x{c}, expected {er}x{ec}")));
        }
    }
    Ok(Mat::from_vec(r, c, data))
}

pub fn matrix_from_json<F: Scalar>(v: &Value, path: &str, dims: Option<(usize, usize)>) -> Result<Mat<F>> {
    matrix_of(v, path, dims, &is_entry, &|x, p| scalar_from_json::<F>(x, p))
}

pub fn matrix_to_json<F: Scalar>(m: &Mat<F>) -> Value {
    Value::Array((0..m.rows()).map(|r| Value::Array(m.row(r).iter().map(scalar_to_json).collect())).collect())
}

pub fn germ_from_json<F: Scalar>(v: &Value, path: &str, order: Option<usize>) -> Result<Germ<F>> {
    let a = v.as_array().ok_or_else(|| bad(path, "a germ is an array of coefficients"))?;
    let c: Vec<F> = a.iter().enumerate().map(|(k, x)| scalar_from_json(x, &format!("{path}[{k}]"))).collect::<Result<_>>()?;
    let order = order.unwrap_or(c.len().saturating_sub(1));
    Ok(Germ::from_coeffs(&c, order))
}

pub fn germ_to_json<F: Scalar>(g: &Germ<F>) -> Value {
    Value::Array(g.coeffs().iter().map(scalar_to_json).collect())
}

pub fn laurent_to_json<F: Scalar>(g: &LaurentGerm<F>) -> Value {
    json!({"valuation": g.valuation(), "coeffs": g.coeffs().iter().map(scalar_to_json).collect::<Vec<_>>()})
}

fn is_germ(v: &Value) -> bool {
    v.as_array().is_some_and(|a| a.iter().all(is_entry)) && !is_entry(v)
}

/// A germ matrix; every entry is padded or truncated to `order`.
pub fn germ_matrix_from_json<F: Scalar>(
    v: &Value,
    path: &str,
    dims: Option<(usize, usize)>,
    order: usize,
) -> Result<GermMat<F>> {
    matrix_of(v, path, dims, &is_germ, &|x, p| germ_from_json::<F>(x, p, Some(order)))
}

pub fn germ_matrix_to_json<F: Scalar>(m: &GermMat<F>) -> Value {
    Value::Array((0..m.rows()).map(|r| Value::Array(m.row(r).iter().map(germ_to_json).collect())).collect())
}

pub fn parity_from_json(v: &Value) -> Result<Parity> {
    serde_json::from_value(v.clone()).map_err(|_| bad("parity", "expected \"hermitian\" or \"skew-hermitian\""))
}

/// `{"dim", "parity", "J", "G"}`.
pub fn form_from_json<F: Scalar>(v: &Value, tol: Tol) -> Result<TorsionForm<F>> {
    let dim = v.get("dim").map(|d| as_usize(d, "dim")).transpose()?;
    let dims = dim.map(|n| (n, n));
    let parity = v.get("parity").map(parity_from_json).transpose()?.unwrap_or(Parity::Hermitian);
    let j = matrix_from_json(field(v, "J")?, "J", dims)?;
    let g = matrix_from_json(field(v, "G")?, "G", dims)?;
    TorsionForm::new(j, g, parity, tol)
}

pub fn form_to_json<F: Scalar>(f: &TorsionForm<F>) -> Value {
    json!({
        "dim": f.dim(),
        "parity": f.parity(),
        "J": matrix_to_json(f.j()),
        "G": matrix_to_json(f.g()),
    })
}

/// `{"dim", "degree", "coefficients": [D_0, ...], "truncated": bool}`.
pub fn family_from_json<F: Scalar>(v: &Value, tol: Tol) -> Result<HermitianFamily<F>> {
    let dim = v.get("dim").map(|d| as_usize(d, "dim")).transpose()?;
    let dims = dim.map(|n| (n, n));
    let coeffs = field(v, "coefficients")?.as_array().ok_or_else(|| bad("coefficients", "expected an array"))?;
    if let Some(d) = v.get("degree") {
        let d = as_usize(d, "degree")?;
        if coeffs.len() != d + 1 {
            return Err(bad("coefficients", &format!("{} matrices for degree {d}", coeffs.len())));
        }
    }
    let mats = coeffs
        .iter()
        .enumerate()
        .map(|(k, m)| matrix_from_json(m, &format!("coefficients[{k}]"), dims))
        .collect::<Result<Vec<_>>>()?;
    if v.get("truncated").and_then(Value::as_bool).unwrap_or(false) {
        HermitianFamily::truncated(mats, tol)
    } else {
        HermitianFamily::new(mats, tol)
    }
}

pub fn family_to_json<F: Scalar>(f: &HermitianFamily<F>) -> Value {
    let mut v = json!({
        "dim": f.dim(),
        "degree": f.degree(),
        "coefficients": f.coeffs().iter().map(matrix_to_json).collect::<Vec<_>>(),
    });
    if f.truncation().is_some() {
        v["truncated"] = json!(true);
    }
    v
}

fn truncation_of(v: &Value, default: usize) -> Result<usize> {
    v.get("truncation").map(|t| as_usize(t, "truncation")).transpose().map(|t| t.unwrap_or(default))
}

/// `{"rank", "generators": [germ-matrix, ...], "truncation"}`.
pub fn monodromy_from_json<F: Scalar>(v: &Value, default_order: usize, tol: Tol) -> Result<MonodromyDeformation<F>> {
    let order = truncation_of(v, default_order)?;
    let gens = field(v, "generators")?.as_array().ok_or_else(|| bad("generators", "expected an array"))?;
    let gens = gens
        .iter()
        .enumerate()
        .map(|(k, g)| germ_matrix_from_json(g, &format!("generators[{k}]"), None, order))
        .collect::<Result<Vec<_>>>()?;
    if let Some(r) = v.get("rank") {
        let r = as_usize(r, "rank")?;
        if gens.iter().any(|g| g.rows() != r) {
            return Err(Error::Dimension(format!("generators do not have rank {r}")));
        }
    }
    MonodromyDeformation::new(gens, tol)
}

/// `{"degrees", "coboundaries", "duality": germ-matrix | "standard",
/// "middle", "truncation"}`.
pub fn complex_from_json<F: Scalar>(v: &Value, default_order: usize, tol: Tol) -> Result<GermComplex<F>> {
    let order = truncation_of(v, default_order)?;
    let dims: Vec<usize> = field(v, "degrees")?
        .as_array()
        .ok_or_else(|| bad("degrees", "expected an array of ranks"))?
        .iter()
        .map(|d| as_usize(d, "degrees"))
        .collect::<Result<_>>()?;
    let cobs = field(v, "coboundaries")?.as_array().ok_or_else(|| bad("coboundaries", "expected an array"))?;
    let cobs = cobs
        .iter()
        .enumerate()
        .map(|(k, m)| {
            let shape = dims.get(k + 1).map(|&r| (r, dims[k]));
            if shape.is_some_and(|(r, c)| r * c == 0) {
                return Ok(Mat::from_fn(shape.unwrap().0, shape.unwrap().1, |_, _| Germ::zero(order)));
            }
            germ_matrix_from_json(m, &format!("coboundaries[{k}]"), shape, order)
        })
        .collect::<Result<Vec<_>>>()?;
    let middle = v.get("middle").map(|m| as_usize(m, "middle")).transpose()?.or(Some(1)).filter(|&l| l < dims.len());
    let duality = match v.get("duality") {
        None | Some(Value::Null) => None,
        Some(Value::String(s)) if s == "standard" => {
            let l = middle.ok_or_else(|| bad("duality", "standard duality needs a middle degree"))?;
            if dims[l] != dims[l - 1] {
                return Err(bad("duality", "standard duality needs equal ranks around the middle degree"));
            }
            Some(crate::germ::germ_mat_identity(dims[l], order))
        }
        Some(m) => Some(germ_matrix_from_json(m, "duality", None, order)?),
    };
    GermComplex::new(dims, cobs, duality, middle, tol)
}

/// `{"V": integer matrix}`.
pub fn seifert_from_json(v: &Value) -> Result<Mat<i64>> {
    let rows = field(v, "V")?.as_array().ok_or_else(|| bad("V", "expected a matrix"))?;
    let n = rows.len();
    let mut data = Vec::with_capacity(n * n);
    for (i, row) in rows.iter().enumerate() {
        let row = row.as_array().ok_or_else(|| bad("V", "expected nested rows"))?;
        if row.len() != n {
            return Err(Error::NotSeifert(format!("row {i} has {} entries, expected {n}", row.len())));
        }
        for x in row {
            data.push(x.as_i64().ok_or_else(|| bad("V", "entries must be integers"))?);
        }
    }
    Ok(Mat::from_vec(n, n, data))
}

/// `{"root_of_unity": [p, q]}`, `{"angle": radians}`, or the text `p/q`.
pub fn xi_from_json(v: &Value) -> Result<Xi> {
    if let Some(s) = v.as_str() {
        return xi_from_str(s);
    }
    if let Some(r) = v.get("root_of_unity") {
        let a = r.as_array().filter(|a| a.len() == 2).ok_or_else(|| bad("root_of_unity", "expected [p, q]"))?;
        let p = a[0].as_i64().ok_or_else(|| bad("root_of_unity", "p must be an integer"))?;
        let q = a[1].as_u64().filter(|&q| q > 0).ok_or_else(|| bad("root_of_unity", "q must be a positive integer"))?;
        return Ok(Xi::root_of_unity(p, q));
    }
    if let Some(a) = v.get("angle") {
        return a.as_f64().map(Xi::Angle).ok_or_else(|| bad("angle", "expected a number"));
    }
    Err(bad("xi", "expected root_of_unity or angle"))
}

/// `p/q` (root of unity `exp(2 pi i p/q)`) or `angle:<radians>`.
pub fn xi_from_str(s: &str) -> Result<Xi> {
    let s = s.trim();
    if let Some(a) = s.strip_prefix("angle:") {
        return a.trim().parse().map(Xi::Angle).map_err(|_| bad("xi", "bad angle"));
    }
    let (p, q) = s.split_once('/').unwrap_or((s, "1"));
    let p: i64 = p.trim().parse().map_err(|_| bad("xi", "expected p/q"))?;
    let q: u64 = q.trim().parse().ok().filter(|&q| q > 0).ok_or_else(|| bad("xi", "expected p/q with q > 0"))?;
    Ok(Xi::root_of_unity(p, q))
}
