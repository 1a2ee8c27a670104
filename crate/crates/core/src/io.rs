//! JSON model and family files, and builtin model names.
//!
//! A scalar is a quadruple `[re_num, re_den, im_num, im_den]`; integers that
//! do not fit in `i64` are written as decimal strings and accepted as such.
//! Schema errors carry a JSON-pointer location, syntax errors a line and
//! column.

use std::fs;
use std::path::Path;

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde_json::{json, Map, Value};

use crate::algebra::{real, AlgElem, LinearMap, Scalar};
use crate::circular::{
    induced_cumulant_family, make_dt_discretized, make_nofreepolar, make_scalar_circular, CircularModel,
};
use crate::cumulants::{cumulants_from_moments, moment_family, FamilyKind, MapFamily};
use crate::error::{Error, Result};
use crate::rdiag::RDiagModel;
use crate::tensor::Tensor;

fn parse_err(location: &str, message: impl Into<String>) -> Error {
    Error::Parse {
        location: if location.is_empty() { "/".into() } else { location.into() },
        message: message.into(),
    }
}

/// Parses JSON text; syntax errors report `line L, column C`.
pub fn parse_json(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| parse_err(&format!("line {}, column {}", e.line(), e.column()), e.to_string()))
}

pub fn read_json_file(path: &Path) -> Result<Value> {
    let text = fs::read_to_string(path).map_err(|e| parse_err(&path.display().to_string(), e.to_string()))?;
    parse_json(&text).map_err(|e| match e {
        Error::Parse { location, message } => parse_err(&format!("{}: {location}", path.display()), message),
        other => other,
    })
}

fn int_to_json(n: &BigInt) -> Value {
    match n.to_i64() {
        Some(v) => json!(v),
        None => json!(n.to_string()),
    }
}

fn int_from_json(v: &Value, at: &str) -> Result<BigInt> {
    match v {
        Value::Number(n) => n
            .as_i64()
            .map(BigInt::from)
            .ok_or_else(|| parse_err(at, "expected an integer")),
        Value::String(s) => s.parse().map_err(|_| parse_err(at, "expected a decimal integer string")),
        _ => Err(parse_err(at, "expected an integer")),
    }
}

fn ratio(num: BigInt, den: BigInt, at: &str) -> Result<BigRational> {
    if den.is_zero() {
        return Err(parse_err(at, "zero denominator"));
    }
    Ok(BigRational::new(num, den))
}

pub fn scalar_to_json(s: &Scalar) -> Value {
    json!([int_to_json(s.re.numer()), int_to_json(s.re.denom()), int_to_json(s.im.numer()), int_to_json(s.im.denom())])
}

pub fn scalar_from_json(v: &Value, at: &str) -> Result<Scalar> {
    let q = v
        .as_array()
        .filter(|a| a.len() == 4)
        .ok_or_else(|| parse_err(at, "expected a quadruple [re_num, re_den, im_num, im_den]"))?;
    let n = |i: usize| int_from_json(&q[i], &format!("{at}/{i}"));
    Ok(Complex::new(ratio(n(0)?, n(1)?, at)?, ratio(n(2)?, n(3)?, at)?))
}

fn array<'a>(v: &'a Value, at: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| parse_err(at, "expected an array"))
}

fn field<'a>(obj: &'a Value, key: &str, at: &str) -> Result<&'a Value> {
    obj.get(key).ok_or_else(|| parse_err(at, format!("missing field `{key}`")))
}

fn scalars_from_json(v: &Value, at: &str) -> Result<Vec<Scalar>> {
    array(v, at)?
        .iter()
        .enumerate()
        .map(|(i, x)| scalar_from_json(x, &format!("{at}/{i}")))
        .collect()
}

pub fn elem_to_json(b: &AlgElem) -> Value {
    Value::Array(b.coords().iter().map(scalar_to_json).collect())
}

pub fn elem_from_json(v: &Value, dim: usize, at: &str) -> Result<AlgElem> {
    let c = scalars_from_json(v, at)?;
    if c.len() != dim {
        return Err(parse_err(at, format!("expected {dim} coordinates, found {}", c.len())));
    }
    Ok(AlgElem::new(c))
}

pub fn linear_map_to_json(m: &LinearMap) -> Value {
    Value::Array(m.rows().iter().map(|r| Value::Array(r.iter().map(scalar_to_json).collect())).collect())
}

pub fn linear_map_from_json(v: &Value, dim: usize, at: &str) -> Result<LinearMap> {
    let rows = array(v, at)?;
    if rows.len() != dim {
        return Err(parse_err(at, format!("expected {dim} rows, found {}", rows.len())));
    }
    let rows = rows
        .iter()
        .enumerate()
        .map(|(i, r)| elem_from_json(r, dim, &format!("{at}/{i}")).map(AlgElem::into_coords))
        .collect::<Result<Vec<_>>>()?;
    LinearMap::new(rows).map_err(|e| parse_err(at, e.to_string()))
}

/// Flat entry list, output index first, then row-major over the arguments.
pub fn tensor_to_json(t: &Tensor) -> Value {
    Value::Array(t.data().iter().map(scalar_to_json).collect())
}

pub fn tensor_from_json(v: &Value, dim: usize, arity: usize, at: &str) -> Result<Tensor> {
    let data = scalars_from_json(v, at)?;
    let expected = dim.pow(arity as u32 + 1);
    if data.len() != expected {
        return Err(parse_err(at, format!("expected {expected} entries for arity {arity}, found {}", data.len())));
    }
    Tensor::from_data(dim, arity, data).map_err(|e| parse_err(at, e.to_string()))
}

fn algebra_dim(doc: &Value, at: &str) -> Result<usize> {
    let alg = field(doc, "algebra", at)?;
    let d = field(alg, "dimension", &format!("{at}/algebra"))?
        .as_u64()
        .filter(|d| *d >= 1)
        .ok_or_else(|| parse_err(&format!("{at}/algebra/dimension"), "expected a positive integer"))?;
    Ok(d as usize)
}

fn labels_of(doc: &Value, at: &str) -> Result<Vec<String>> {
    match doc.get("labels") {
        None => Ok(vec!["a".into(), "a_star".into()]),
        Some(v) => array(v, &format!("{at}/labels"))?
            .iter()
            .enumerate()
            .map(|(i, l)| {
                l.as_str()
                    .map(str::to_owned)
                    .ok_or_else(|| parse_err(&format!("{at}/labels/{i}"), "expected a string"))
            })
            .collect(),
    }
}

fn algebra_json(dim: usize) -> Value {
    json!({ "dimension": dim })
}

pub fn family_to_json(f: &MapFamily) -> Value {
    let maps: Vec<Value> = f
        .stored()
        .map(|(w, t)| {
            json!({
                "word": w.iter().map(|&l| f.labels()[l].clone()).collect::<Vec<_>>(),
                "tensor": tensor_to_json(t),
            })
        })
        .collect();
    json!({
        "algebra": algebra_json(f.dim()),
        "labels": f.labels(),
        "kind": f.kind().name(),
        "max_order": f.max_order(),
        "sparse": f.is_sparse(),
        "maps": maps,
    })
}

/// Reads a family document. `algebra` and `labels` fall back to `parent`
/// when absent, so a family can be nested in a model file.
pub fn family_from_json(doc: &Value, parent: Option<&Value>, kind: Option<FamilyKind>, at: &str) -> Result<MapFamily> {
    let lookup = |k: &str| doc.get(k).or_else(|| parent.and_then(|p| p.get(k)));
    let holder = |k: &str| if doc.get(k).is_some() { doc } else { parent.unwrap_or(doc) };
    let dim = algebra_dim(holder("algebra"), if doc.get("algebra").is_some() { at } else { "" })?;
    let labels = labels_of(holder("labels"), at)?;
    let kind = match (kind, lookup("kind")) {
        (Some(k), _) => k,
        (None, Some(Value::String(s))) if s == "moments" => FamilyKind::Moments,
        (None, Some(Value::String(s))) if s == "cumulants" => FamilyKind::Cumulants,
        _ => return Err(parse_err(&format!("{at}/kind"), "expected \"moments\" or \"cumulants\"")),
    };
    let maps = array(field(doc, "maps", at)?, &format!("{at}/maps"))?;
    let mut words = Vec::with_capacity(maps.len());
    for (i, m) in maps.iter().enumerate() {
        let here = format!("{at}/maps/{i}");
        let word = array(field(m, "word", &here)?, &format!("{here}/word"))?
            .iter()
            .enumerate()
            .map(|(j, l)| {
                let loc = format!("{here}/word/{j}");
                let name = l.as_str().ok_or_else(|| parse_err(&loc, "expected a label"))?;
                labels
                    .iter()
                    .position(|x| x == name)
                    .ok_or_else(|| parse_err(&loc, format!("unknown label `{name}`")))
            })
            .collect::<Result<Vec<usize>>>()?;
        if word.is_empty() {
            return Err(parse_err(&format!("{here}/word"), "empty word"));
        }
        let t = tensor_from_json(field(m, "tensor", &here)?, dim, word.len() - 1, &format!("{here}/tensor"))?;
        words.push((word, t));
    }
    let longest = words.iter().map(|(w, _)| w.len()).max().unwrap_or(0);
    let max_order = match lookup("max_order") {
        None => longest.max(1),
        Some(v) => v
            .as_u64()
            .map(|n| n as usize)
            .ok_or_else(|| parse_err(&format!("{at}/max_order"), "expected a nonnegative integer"))?,
    };
    let sparse = match lookup("sparse") {
        None => true,
        Some(v) => v.as_bool().ok_or_else(|| parse_err(&format!("{at}/sparse"), "expected a boolean"))?,
    };
    let mut f = MapFamily::new(dim, labels, kind, max_order, sparse).map_err(|e| parse_err(at, e.to_string()))?;
    for (i, (w, t)) in words.into_iter().enumerate() {
        f.insert(w, t).map_err(|e| parse_err(&format!("{at}/maps/{i}"), e.to_string()))?;
    }
    Ok(f)
}

/// A model given by covariances, by alternating cumulants, or by a family.
#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Circular(CircularModel),
    RDiag(RDiagModel),
    Family(MapFamily),
}

impl Model {
    pub fn dim(&self) -> usize {
        match self {
            Model::Circular(m) => m.dim(),
            Model::RDiag(m) => m.dim(),
            Model::Family(f) => f.dim(),
        }
    }

    pub fn circular(&self) -> Option<&CircularModel> {
        match self {
            Model::Circular(m) => Some(m),
            _ => None,
        }
    }

    /// `*`-cumulant family over `{a, a*}` up to `max_order`.
    pub fn cumulants(&self, max_order: usize) -> Result<MapFamily> {
        match self {
            Model::Circular(m) => induced_cumulant_family(m, max_order),
            Model::RDiag(m) => m.to_family(max_order),
            Model::Family(f) => match f.kind() {
                FamilyKind::Cumulants => truncated(f, max_order),
                FamilyKind::Moments => cumulants_from_moments(f, max_order),
            },
        }
    }

    /// `*`-moment family over `{a, a*}` up to `max_order`.
    pub fn moments(&self, max_order: usize) -> Result<MapFamily> {
        match self {
            Model::Family(f) if f.kind() == FamilyKind::Moments => truncated(f, max_order),
            _ => moment_family(&self.cumulants(max_order)?, max_order),
        }
    }

    /// Alternating cumulants `β_k^{(i)}` for `k ≤ max_k`.
    pub fn rdiag(&self, max_k: usize) -> Result<RDiagModel> {
        match self {
            Model::Circular(m) => Ok(RDiagModel::from_circular(m, max_k)),
            Model::RDiag(m) => Ok(m.clone()),
            Model::Family(_) => RDiagModel::from_family(&self.cumulants(2 * max_k)?, max_k),
        }
    }
}

fn truncated(f: &MapFamily, max_order: usize) -> Result<MapFamily> {
    if max_order > f.max_order() {
        return Err(Error::OrderExceeded {
            len: max_order,
            max: f.max_order(),
        });
    }
    let mut g = f.clone();
    let drop: Vec<_> = g.stored().map(|(w, _)| w.clone()).filter(|w| w.len() > max_order).collect();
    for w in drop {
        g.remove(&w);
    }
    g.set_max_order(max_order);
    Ok(g)
}

fn optional_tensors(v: &Value, dim: usize, at: &str) -> Result<Vec<Option<Tensor>>> {
    array(v, at)?
        .iter()
        .enumerate()
        .map(|(i, t)| {
            if t.is_null() {
                Ok(None)
            } else {
                tensor_from_json(t, dim, 2 * i + 1, &format!("{at}/{i}")).map(Some)
            }
        })
        .collect()
}

pub fn model_from_json(doc: &Value) -> Result<Model> {
    let dim = algebra_dim(doc, "")?;
    let labels = labels_of(doc, "")?;
    if labels.len() != 2 {
        return Err(parse_err("/labels", "a model needs exactly the labels of a and a*"));
    }
    if let Some(c) = doc.get("circular") {
        let eta1 = linear_map_from_json(field(c, "eta1", "/circular")?, dim, "/circular/eta1")?;
        let eta2 = linear_map_from_json(field(c, "eta2", "/circular")?, dim, "/circular/eta2")?;
        return CircularModel::new(eta1, eta2).map(Model::Circular).map_err(|e| parse_err("/circular", e.to_string()));
    }
    if let Some(r) = doc.get("rdiag") {
        let b1 = optional_tensors(field(r, "beta1", "/rdiag")?, dim, "/rdiag/beta1")?;
        let b2 = optional_tensors(field(r, "beta2", "/rdiag")?, dim, "/rdiag/beta2")?;
        return RDiagModel::new(dim, b1, b2).map(Model::RDiag).map_err(|e| parse_err("/rdiag", e.to_string()));
    }
    for (key, kind) in [("moments", FamilyKind::Moments), ("cumulants", FamilyKind::Cumulants)] {
        if let Some(f) = doc.get(key) {
            return family_from_json(f, Some(doc), Some(kind), &format!("/{key}")).map(Model::Family);
        }
    }
    if doc.get("maps").is_some() {
        return family_from_json(doc, None, None, "").map(Model::Family);
    }
    Err(parse_err("/", "expected one of `circular`, `rdiag`, `moments`, `cumulants`"))
}

pub fn model_to_json(model: &Model) -> Value {
    let mut doc = Map::new();
    doc.insert("algebra".into(), algebra_json(model.dim()));
    doc.insert("labels".into(), json!(["a", "a_star"]));
    match model {
        Model::Circular(m) => {
            doc.insert(
                "circular".into(),
                json!({ "eta1": linear_map_to_json(m.eta1()), "eta2": linear_map_to_json(m.eta2()) }),
            );
        }
        Model::RDiag(m) => {
            let side = |i: usize| -> Value {
                Value::Array((1..=m.max_k()).map(|k| m.beta(i, k).map_or(Value::Null, tensor_to_json)).collect())
            };
            doc.insert("rdiag".into(), json!({ "beta1": side(1), "beta2": side(2) }));
        }
        Model::Family(f) => {
            doc.insert(f.kind().name().into(), family_to_json(f));
        }
    }
    Value::Object(doc)
}

/// Parses `p`, `p/q`, or a decimal such as `0.25` into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || parse_err(s, "expected a rational such as 3, -1/2 or 0.25");
    if let Ok(q) = s.parse::<BigRational>() {
        return Ok(q);
    }
    let (neg, body) = s.strip_prefix('-').map_or((false, s), |b| (true, b));
    let (int, frac) = body.split_once('.').ok_or_else(bad)?;
    if int.is_empty() && frac.is_empty() || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits: BigInt = format!("0{int}{frac}").parse().map_err(|_| bad())?;
    let q = BigRational::new(digits, BigInt::from(10).pow(frac.len() as u32));
    Ok(if neg { -q } else { q })
}

/// Builtin names, with an optional `builtin:` prefix: `nofreepolar`,
/// `dt:<d>`, `scalar-circular:<c>`.
pub fn builtin_model(name: &str) -> Option<Result<Model>> {
    let name = name.strip_prefix("builtin:").unwrap_or(name);
    if name == "nofreepolar" {
        return Some(Ok(Model::Circular(make_nofreepolar())));
    }
    if let Some(d) = name.strip_prefix("dt:") {
        return Some(
            d.parse::<usize>()
                .map_err(|_| parse_err(name, "expected dt:<positive integer>"))
                .and_then(make_dt_discretized)
                .map(Model::Circular),
        );
    }
    if let Some(c) = name.strip_prefix("scalar-circular:") {
        return Some(parse_rational(c).map(|c| Model::Circular(make_scalar_circular(real(c)))));
    }
    None
}

/// A builtin name, or else a path to a JSON model file.
pub fn resolve_model(spec: &str) -> Result<Model> {
    match builtin_model(spec) {
        Some(m) => m,
        None if spec.starts_with("builtin:") => Err(parse_err(spec, "unknown builtin model")),
        None => model_from_json(&read_json_file(Path::new(spec))?),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::sq;

    #[test]
    fn scalar_roundtrip_and_big_integers() {
        let s = sq(-3, 4);
        assert_eq!(scalar_to_json(&s), json!([-3, 4, 0, 1]));
        assert_eq!(scalar_from_json(&scalar_to_json(&s), "").unwrap(), s);
        let big = real(BigRational::new(BigInt::from(10).pow(30), BigInt::from(7)));
        let v = scalar_to_json(&big);
        assert!(v[0].is_string());
        assert_eq!(scalar_from_json(&v, "").unwrap(), big);
    }

    #[test]
    fn zero_denominator_is_located() {
        let doc = parse_json(r#"{"algebra":{"dimension":1},"circular":{"eta1":[[[1,0,0,1]]],"eta2":[[[1,1,0,1]]]}}"#)
            .unwrap();
        match model_from_json(&doc) {
            Err(Error::Parse { location, message }) => {
                assert_eq!(location, "/circular/eta1/0/0");
                assert!(message.contains("zero denominator"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn syntax_error_has_line_and_column() {
        match parse_json("{\n  \"algebra\": }") {
            Err(Error::Parse { location, .. }) => assert!(location.starts_with("line 2"), "{location}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn models_roundtrip() {
        for name in ["nofreepolar", "builtin:dt:3", "scalar-circular:1/2"] {
            let m = resolve_model(name).unwrap();
            let back = model_from_json(&model_to_json(&m)).unwrap();
            assert_eq!(back, m);
            let fam = m.cumulants(4).unwrap();
            let f2 = family_from_json(&family_to_json(&fam), None, None, "").unwrap();
            assert_eq!(f2, fam);
        }
        let rd = Model::RDiag(resolve_model("nofreepolar").unwrap().rdiag(2).unwrap());
        assert_eq!(model_from_json(&model_to_json(&rd)).unwrap(), rd);
    }

    #[test]
    fn rationals() {
        assert_eq!(parse_rational("-1/2").unwrap(), BigRational::new((-1).into(), 2.into()));
        assert_eq!(parse_rational("0.25").unwrap(), BigRational::new(1.into(), 4.into()));
        assert_eq!(parse_rational("-.5").unwrap(), BigRational::new((-1).into(), 2.into()));
        assert!(parse_rational("x").is_err());
        assert!(resolve_model("builtin:nothing").is_err());
    }
}
