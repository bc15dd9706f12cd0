//! JSON wire formats. Complex numbers are `[re, im]`; matrices are row-major
//! nested arrays of complex numbers.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::atheta::{AElem, DivisorXtau, FrVectObj};
use crate::bqtau::{BqObject, K0ClassB, K0Key, Morphism, NormalForm, RepZ2};
use crate::error::{Error, Result};
use crate::laurent::{LaurentParams, PolyMat};
use crate::numkit::{CMat, Tolerances, Transversal, C64};

pub type Cx = [f64; 2];
pub type MatJson = Vec<Vec<Cx>>;

pub fn cx(z: C64) -> Cx {
    [z.re, z.im]
}

pub fn from_cx(c: Cx) -> C64 {
    C64::new(c[0], c[1])
}

pub fn mat_to_json(m: &CMat) -> MatJson {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| cx(m[(i, j)])).collect())
        .collect()
}

pub fn mat_from_json(rows: &MatJson) -> Result<CMat> {
    let r = rows.len();
    let c = rows.first().map_or(0, |row| row.len());
    if rows.iter().any(|row| row.len() != c) {
        return Err(Error::Parse("matrix rows have different lengths".into()));
    }
    let m = CMat::from_fn(r, c, |i, j| from_cx(rows[i][j]));
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    Ok(m)
}

/// Parses JSON text, reporting the line and column of syntax errors.
pub fn parse_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| {
        Error::Parse(format!("{e} (line {}, column {})", e.line(), e.column()))
    })
}

fn from_value<T: for<'de> Deserialize<'de>>(v: &Value) -> Result<T> {
    T::deserialize(v).map_err(|e| Error::Parse(e.to_string()))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TermJson {
    pub pow: i32,
    pub coef: MatJson,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolyMatJson {
    pub dim: usize,
    pub terms: Vec<TermJson>,
}

pub fn polymat_to_json(p: &PolyMat) -> PolyMatJson {
    PolyMatJson {
        dim: p.dim(),
        terms: p
            .terms()
            .map(|(k, c)| TermJson {
                pow: k,
                coef: mat_to_json(c),
            })
            .collect(),
    }
}

pub fn polymat_from_json(j: &PolyMatJson, params: LaurentParams) -> Result<PolyMat> {
    let terms = j
        .terms
        .iter()
        .map(|t| Ok((t.pow, mat_from_json(&t.coef)?)))
        .collect::<Result<Vec<_>>>()?;
    PolyMat::from_terms(j.dim, terms, params)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BqObjectJson {
    pub tau: Cx,
    pub theta: f64,
    pub dim: usize,
    #[serde(rename = "A")]
    pub a: PolyMatJson,
    #[serde(rename = "B")]
    pub b: PolyMatJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transversal_offset: Option<f64>,
}

pub fn object_to_json(obj: &BqObject) -> BqObjectJson {
    BqObjectJson {
        tau: cx(obj.tau()),
        theta: obj.theta,
        dim: obj.dim(),
        a: polymat_to_json(&obj.a),
        b: polymat_to_json(&obj.b),
        transversal_offset: obj.transversal.map(|t| t.offset),
    }
}

pub fn object_from_json(j: &BqObjectJson) -> Result<BqObject> {
    let params = LaurentParams::from_theta(from_cx(j.tau), j.theta)?;
    let a = polymat_from_json(&j.a, params)?;
    let b = polymat_from_json(&j.b, params)?;
    if a.dim() != j.dim || b.dim() != j.dim {
        return Err(Error::DimensionMismatch(format!("declared dim {} does not match A and B", j.dim)));
    }
    let obj = BqObject::new(a, b, j.theta)?;
    Ok(match j.transversal_offset {
        Some(a) => obj.with_transversal(Transversal::new(from_cx(j.tau), a)?),
        None => obj,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NormalFormJson {
    pub tau: Cx,
    pub theta: f64,
    pub dim: usize,
    #[serde(rename = "A0")]
    pub a0: MatJson,
    #[serde(rename = "B0")]
    pub b0: MatJson,
    pub transversal_offset: f64,
}

pub fn normal_form_to_json(nf: &NormalForm) -> NormalFormJson {
    NormalFormJson {
        tau: cx(nf.tau()),
        theta: nf.theta,
        dim: nf.dim(),
        a0: mat_to_json(&nf.a0),
        b0: mat_to_json(&nf.b0),
        transversal_offset: nf.transversal.offset,
    }
}

pub fn normal_form_from_json(j: &NormalFormJson, tol: &Tolerances) -> Result<NormalForm> {
    let t = Transversal::new(from_cx(j.tau), j.transversal_offset)?;
    let nf = NormalForm::from_matrices(mat_from_json(&j.a0)?, mat_from_json(&j.b0)?, t, j.theta, tol)?;
    if nf.dim() != j.dim {
        return Err(Error::DimensionMismatch(format!("declared dim {} does not match A0", j.dim)));
    }
    Ok(nf)
}

/// An input that is either a general object or already a normal form. Normal
/// forms are recognized by their `A0` field; reports carrying a
/// `normal_form` field are unwrapped first.
#[derive(Debug, Clone)]
pub enum ObjectInput {
    Object(BqObject),
    Normal(NormalForm),
}

pub fn object_input_from_value(v: &Value, tol: &Tolerances) -> Result<ObjectInput> {
    let v = unwrap_report(v, "normal_form");
    if v.get("A0").is_some() {
        Ok(ObjectInput::Normal(normal_form_from_json(&from_value(v)?, tol)?))
    } else if v.get("A").is_some() {
        Ok(ObjectInput::Object(object_from_json(&from_value(v)?)?))
    } else {
        Err(Error::Parse("expected an object (with \"A\", \"B\") or a normal form (with \"A0\", \"B0\")".into()))
    }
}

/// Reports nest their payload under `result`; accept them as inputs.
pub fn unwrap_report<'a>(v: &'a Value, field: &str) -> &'a Value {
    let inner = v.get("result").unwrap_or(v);
    inner.get(field).unwrap_or(inner)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RepJson {
    #[serde(rename = "M1")]
    pub m1: MatJson,
    #[serde(rename = "M2")]
    pub m2: MatJson,
}

pub fn rep_to_json(r: &RepZ2) -> RepJson {
    RepJson {
        m1: mat_to_json(&r.m1),
        m2: mat_to_json(&r.m2),
    }
}

pub fn rep_from_value(v: &Value, tol: &Tolerances) -> Result<RepZ2> {
    let j: RepJson = from_value(unwrap_report(v, "rep"))?;
    RepZ2::new(mat_from_json(&j.m1)?, mat_from_json(&j.m2)?, tol)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MorphismJson {
    pub source: Value,
    pub target: Value,
    pub phi: MatJson,
}

pub fn morphism_to_json(m: &Morphism) -> Value {
    serde_json::json!({
        "source": normal_form_to_json(&m.source),
        "target": normal_form_to_json(&m.target),
        "phi": mat_to_json(&m.phi),
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoeffJson {
    pub n1: i64,
    pub n2: i64,
    pub c: Cx,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AElemJson {
    pub theta: f64,
    pub coeffs: Vec<CoeffJson>,
}

pub fn aelem_to_json(x: &AElem) -> AElemJson {
    AElemJson {
        theta: x.theta(),
        coeffs: x
            .coeffs()
            .map(|((n1, n2), c)| CoeffJson { n1, n2, c: cx(c) })
            .collect(),
    }
}

pub fn aelem_from_json(j: &AElemJson) -> AElem {
    AElem::from_coeffs(j.theta, j.coeffs.iter().map(|c| ((c.n1, c.n2), from_cx(c.c))))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FrVectJson {
    pub theta: f64,
    pub tau: Cx,
    pub dim: usize,
    pub conn: Vec<Vec<AElemJson>>,
}

pub fn frvect_to_json(e: &FrVectObj) -> FrVectJson {
    FrVectJson {
        theta: e.theta,
        tau: cx(e.tau),
        dim: e.dim(),
        conn: e
            .conn()
            .iter()
            .map(|row| row.iter().map(aelem_to_json).collect())
            .collect(),
    }
}

pub fn frvect_from_json(j: &FrVectJson) -> Result<FrVectObj> {
    let conn = j
        .conn
        .iter()
        .map(|row| row.iter().map(aelem_from_json).collect())
        .collect();
    let e = FrVectObj::new(j.theta, from_cx(j.tau), conn)?;
    if e.dim() != j.dim {
        return Err(Error::DimensionMismatch(format!("declared dim {} does not match conn", j.dim)));
    }
    Ok(e)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PointJson {
    pub p: Cx,
    pub mult: i64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DivisorJson {
    pub tau: Cx,
    pub points: Vec<PointJson>,
}

pub fn divisor_to_json(d: &DivisorXtau) -> DivisorJson {
    DivisorJson {
        tau: cx(d.tau),
        points: d
            .points()
            .iter()
            .map(|(p, m)| PointJson { p: cx(*p), mult: *m })
            .collect(),
    }
}

pub fn divisor_from_value(v: &Value, eps_key: f64) -> Result<DivisorXtau> {
    let j: DivisorJson = from_value(unwrap_report(v, "divisor"))?;
    DivisorXtau::from_points(from_cx(j.tau), eps_key, j.points.iter().map(|p| (from_cx(p.p), p.mult)))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct K0TermJson {
    pub b: Cx,
    pub zprime: Cx,
    pub mult: i64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct K0Json {
    pub tau: Cx,
    pub transversal_offset: f64,
    pub terms: Vec<K0TermJson>,
}

pub fn k0_to_json(k: &K0ClassB) -> K0Json {
    K0Json {
        tau: cx(k.transversal.tau),
        transversal_offset: k.transversal.offset,
        terms: k
            .terms()
            .iter()
            .map(|(key, m)| K0TermJson {
                b: cx(key.b),
                zprime: cx(key.zprime),
                mult: *m,
            })
            .collect(),
    }
}

pub fn k0_from_value(v: &Value, eps_key: f64) -> Result<K0ClassB> {
    let j: K0Json = from_value(unwrap_report(v, "class"))?;
    let t = Transversal::new(from_cx(j.tau), j.transversal_offset)?;
    let mut k = K0ClassB::new(t, eps_key);
    for term in &j.terms {
        k.insert(
            K0Key {
                b: from_cx(term.b),
                zprime: from_cx(term.zprime),
            },
            term.mult,
        );
    }
    Ok(k)
}
