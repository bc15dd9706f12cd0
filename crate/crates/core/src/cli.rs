//! Command dispatch behind the `bqtau` binary. Every command maps one
//! operation of the library; reports are JSON documents that later commands
//! accept as inputs.

use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::atheta::{
    build_extension, check_intertwine, divisor_equivalent, is_nori_finite, kmap, omega_action, phase,
    ps_k_swap, psi_star, sigma_apply, sigma_inverse_word, stability_z, std_bundle_data, AElem, Gen, Omega,
};
use crate::bqtau::{
    cokernel, decompose, dual, fiber_omega, find_isomorphism, functor_f, h0_dim, hom_basis, k0_class, kernel,
    normalize, tensor, triangle_identities, validate, Morphism, NormalForm,
};
use crate::error::{Error, Result};
use crate::io::{self, cx, from_cx, mat_to_json, Cx, ObjectInput};
use crate::numkit::{
    commutator, find_small_width, kron, reduce_mod_transversal, reduce_to_transversal, wd, Tolerances,
    Transversal, C64,
};

pub const COMMANDS: [&str; 21] = [
    "validate",
    "normalize",
    "rh-to-rep",
    "rh-from-rep",
    "tensor",
    "dual",
    "hom",
    "kernel",
    "cokernel",
    "decompose",
    "k0",
    "kmap",
    "divisor-eq",
    "psi-star",
    "extension",
    "std-bundle",
    "phase",
    "nori",
    "atheta-check",
    "wd",
    "reduce-tau",
];

pub const DEFAULT_TAU: Cx = [1.0, -1.0];
pub const DEFAULT_THETA: f64 = 0.618_033_988_749_894_9;
pub const DEFAULT_TRUNCATION: usize = 16;
pub const DEFAULT_D_MAX: u64 = 64;

/// Per-job options; unset fields take the defaults above (or, in batch mode,
/// the values given on the command line).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobOptions {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<Cx>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transversal_offset: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol_spec: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol_res: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol_key: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d_max: Option<u64>,
}

impl JobOptions {
    /// Fills unset fields from `defaults`.
    pub fn or(&self, defaults: &JobOptions) -> JobOptions {
        JobOptions {
            tau: self.tau.or(defaults.tau),
            theta: self.theta.or(defaults.theta),
            transversal_offset: self.transversal_offset.or(defaults.transversal_offset),
            truncation: self.truncation.or(defaults.truncation),
            tol_spec: self.tol_spec.or(defaults.tol_spec),
            tol_res: self.tol_res.or(defaults.tol_res),
            tol_key: self.tol_key.or(defaults.tol_key),
            seed: self.seed.or(defaults.seed),
            d_max: self.d_max.or(defaults.d_max),
        }
    }
}

/// One invocation: a command, its inputs (file paths, inline JSON or plain
/// scalar arguments) and options.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JobSpec {
    pub command: String,
    #[serde(default)]
    pub inputs: Vec<String>,
    #[serde(flatten)]
    pub options: JobOptions,
}

/// Exit code and report of a job.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub exit_code: i32,
    pub report: Value,
}

pub fn exit_code(e: &Error) -> i32 {
    if e.is_validation() {
        2
    } else {
        1
    }
}

fn error_kind(e: &Error) -> String {
    let dbg = format!("{e:?}");
    dbg.split(|c: char| !c.is_alphanumeric()).next().unwrap_or("Error").to_string()
}

struct Input {
    source: String,
    text: String,
}

impl Input {
    fn load(raw: &str, base: Option<&Path>) -> Result<Input> {
        let trimmed = raw.trim_start();
        if trimmed.starts_with('{') || trimmed.starts_with('[') {
            return Ok(Input {
                source: "inline".into(),
                text: raw.to_string(),
            });
        }
        let path = match base {
            Some(b) if Path::new(raw).is_relative() => b.join(raw),
            _ => PathBuf::from(raw),
        };
        let text = std::fs::read_to_string(&path)
            .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
        Ok(Input {
            source: raw.to_string(),
            text,
        })
    }

    fn scalar(raw: &str) -> Input {
        Input {
            source: "argument".into(),
            text: raw.to_string(),
        }
    }

    fn json(&self) -> Result<Value> {
        io::parse_json(&self.text)
    }

    fn digest(&self) -> String {
        hex(&Sha256::digest(self.text.as_bytes()))
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

struct Ctx {
    tau: C64,
    theta: f64,
    offset: Option<f64>,
    truncation: usize,
    tol: Tolerances,
    seed: u64,
    d_max: u64,
}

impl Ctx {
    fn new(o: &JobOptions) -> Result<Ctx> {
        let d = Tolerances::default();
        let tol = Tolerances::new(
            o.tol_spec.unwrap_or(d.eps_spec),
            o.tol_res.unwrap_or(d.eps_res),
            o.tol_key.unwrap_or(d.eps_key),
        )?;
        let theta = o.theta.unwrap_or(DEFAULT_THETA);
        if !(theta > 0.0 && theta < 1.0) {
            return Err(Error::InvalidInput(format!("theta = {theta} must lie in (0, 1)")));
        }
        Ok(Ctx {
            tau: from_cx(o.tau.unwrap_or(DEFAULT_TAU)),
            theta,
            offset: o.transversal_offset,
            truncation: o.truncation.unwrap_or(DEFAULT_TRUNCATION),
            tol,
            seed: o.seed.unwrap_or(0),
            d_max: o.d_max.unwrap_or(DEFAULT_D_MAX),
        })
    }

    fn transversal(&self) -> Result<Transversal> {
        Transversal::new(self.tau, self.offset.unwrap_or(0.0))
    }

    /// Reads an object or normal form, normalizing general objects. The
    /// strip is the `--transversal-offset` flag, else the object's own
    /// offset, else 0.
    fn normal_form(&self, v: &Value, res: &mut Map<String, Value>) -> Result<NormalForm> {
        match io::object_input_from_value(v, &self.tol)? {
            ObjectInput::Normal(nf) => match self.offset {
                Some(a) if a != nf.transversal.offset => {
                    let t = Transversal::new(nf.tau(), a)?;
                    normalize(&nf.to_object()?, &t, self.truncation, &self.tol)
                }
                _ => Ok(nf),
            },
            ObjectInput::Object(obj) => {
                let offset = self.offset.or(obj.transversal.map(|t| t.offset)).unwrap_or(0.0);
                let t = Transversal::new(obj.tau(), offset)?;
                let nf = normalize(&obj, &t, self.truncation, &self.tol)?;
                res.insert("normalize_a_residual".into(), json!(nf.diagnostics.a_residual));
                res.insert("normalize_b_residual".into(), json!(nf.diagnostics.b_residual));
                res.insert("normalize_truncation_tail".into(), json!(nf.diagnostics.truncation_tail));
                Ok(nf)
            }
        }
    }
}

fn cxs(zs: &[C64]) -> Vec<Cx> {
    zs.iter().map(|z| cx(*z)).collect()
}

fn nf_report(nf: &NormalForm, tol: &Tolerances) -> Result<Value> {
    let eig = crate::numkit::eigenvalues(&nf.a0)?;
    let strip: Vec<Value> = eig
        .iter()
        .map(|z| {
            json!({
                "lambda": cx(*z),
                "coordinate": nf.transversal.coordinate(*z),
                "boundary_distance": nf.transversal.boundary_distance(*z),
            })
        })
        .collect();
    let d = &nf.diagnostics;
    Ok(json!({
        "normal_form": io::normal_form_to_json(nf),
        "eigenvalues_in_strip": strip,
        "edge_radius": tol.edge_radius(nf.a0.norm()),
        "diagnostics": {
            "commutator": d.commutator,
            "a_residual": d.a_residual,
            "b_residual": d.b_residual,
            "truncation_tail": d.truncation_tail,
            "shear_passes": d.shear_passes,
            "near_boundary": cxs(&d.near_boundary),
            "warnings": d.warnings,
        },
    }))
}

fn morphism_report(m: &Morphism, tol: &Tolerances, key: &str) -> Result<Value> {
    let nf = if key == "inclusion" { &m.source } else { &m.target };
    let mut v = nf_report(nf, tol)?;
    v[key] = io::morphism_to_json(m);
    v["intertwining_residual"] = json!(m.intertwining_residual());
    Ok(v)
}

fn morphism_from_value(v: &Value, ctx: &Ctx, res: &mut Map<String, Value>) -> Result<Morphism> {
    let inner = v.get("result").unwrap_or(v);
    let inner = match inner.get("morphisms") {
        Some(Value::Array(list)) => list
            .first()
            .ok_or_else(|| Error::InvalidInput("the hom report has an empty basis".into()))?,
        _ => inner,
    };
    let j: io::MorphismJson = serde_json::from_value(inner.clone()).map_err(|e| Error::Parse(e.to_string()))?;
    let source = ctx.normal_form(&j.source, res)?;
    let target = ctx.normal_form(&j.target, res)?;
    Morphism::new(source, target, io::mat_from_json(&j.phi)?, &ctx.tol)
}

fn parse_int(s: &str, what: &str) -> Result<i64> {
    s.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("{what}: expected an integer, got {s:?}")))
}

/// `re,im` or a JSON `[re, im]`.
pub fn parse_complex(s: &str) -> Result<C64> {
    let t = s.trim();
    if t.starts_with('[') {
        let c: Cx = io::parse_json(t)?;
        return Ok(from_cx(c));
    }
    let parts: Vec<&str> = t.split(',').collect();
    let num = |p: &str| {
        p.trim()
            .parse::<f64>()
            .map_err(|_| Error::Parse(format!("expected a complex number re,im, got {s:?}")))
    };
    match parts.as_slice() {
        [re] => Ok(C64::new(num(re)?, 0.0)),
        [re, im] => Ok(C64::new(num(re)?, num(im)?)),
        _ => Err(Error::Parse(format!("expected a complex number re,im, got {s:?}"))),
    }
}

fn parse_gen(s: &str) -> Result<Gen> {
    match s.trim() {
        "g1" => Ok(Gen::G1),
        "g2" => Ok(Gen::G2),
        "g1_inv" => Ok(Gen::G1Inv),
        "g2_inv" => Ok(Gen::G2Inv),
        other => Err(Error::Parse(format!("unknown generator {other:?} (expected g1, g2, g1_inv, g2_inv)"))),
    }
}

fn gen_name(g: Gen) -> &'static str {
    match g {
        Gen::G1 => "g1",
        Gen::G2 => "g2",
        Gen::G1Inv => "g1_inv",
        Gen::G2Inv => "g2_inv",
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AthetaCheckJson {
    #[serde(default)]
    word: Vec<String>,
    #[serde(default)]
    omega: Option<[Cx; 2]>,
    #[serde(default)]
    bound: Option<i64>,
    #[serde(default)]
    x: Option<io::AElemJson>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ExtensionJson {
    zprime: Cx,
    row: Vec<io::AElemJson>,
    sub: Value,
}

fn random_aelem(rng: &mut ChaCha8Rng, theta: f64, support: usize) -> AElem {
    AElem::from_coeffs(
        theta,
        (0..support).map(|_| {
            (
                (rng.gen_range(-3..=3), rng.gen_range(-3..=3)),
                C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
            )
        }),
    )
}

fn need(inputs: &[String], n: usize, usage: &str) -> Result<()> {
    if inputs.len() != n {
        return Err(Error::InvalidInput(format!(
            "expected {n} input(s), got {}; usage: {usage}",
            inputs.len()
        )));
    }
    Ok(())
}

/// Executes the command; returns the result object and fills `res` with
/// residual diagnostics and `loaded` with the inputs read.
fn dispatch(
    job: &JobSpec,
    ctx: &Ctx,
    base: Option<&Path>,
    loaded: &mut Vec<Input>,
    res: &mut Map<String, Value>,
) -> Result<Value> {
    let tol = &ctx.tol;
    let ins = &job.inputs;
    let mut load = |i: usize| -> Result<Value> {
        let input = Input::load(&ins[i], base)?;
        let v = input.json();
        loaded.push(input);
        v
    };
    match job.command.as_str() {
        "validate" => {
            need(ins, 1, "validate OBJECT")?;
            let v = load(0)?;
            match io::object_input_from_value(&v, tol)? {
                ObjectInput::Object(obj) => {
                    let d = validate(&obj, tol)?;
                    res.insert("equivariance_residual".into(), json!(d.equivariance_residual));
                    res.insert("equivariance_bound".into(), json!(d.equivariance_bound));
                    res.insert("b_sigma_min".into(), json!(d.b_sigma_min));
                    Ok(json!({"valid": true, "kind": "object", "dim": obj.dim()}))
                }
                ObjectInput::Normal(nf) => {
                    res.insert("commutator".into(), json!(nf.diagnostics.commutator));
                    Ok(json!({"valid": true, "kind": "normal_form", "dim": nf.dim()}))
                }
            }
        }
        "normalize" => {
            need(ins, 1, "normalize OBJECT")?;
            let v = load(0)?;
            let nf = ctx.normal_form(&v, res)?;
            res.insert("commutator".into(), json!(nf.diagnostics.commutator));
            nf_report(&nf, tol)
        }
        "rh-to-rep" => {
            need(ins, 1, "rh-to-rep NORMAL_FORM")?;
            let v = load(0)?;
            let nf = ctx.normal_form(&v, res)?;
            let rep = fiber_omega(&nf, tol)?;
            res.insert("commutator".into(), json!(commutator(&rep.m1, &rep.m2).norm()));
            Ok(json!({"rep": io::rep_to_json(&rep)}))
        }
        "rh-from-rep" => {
            need(ins, 1, "rh-from-rep REP")?;
            let v = load(0)?;
            let rep = io::rep_from_value(&v, tol)?;
            let nf = functor_f(&rep, &ctx.transversal()?, ctx.theta, tol)?;
            let back = fiber_omega(&nf, tol)?;
            let err = (&back.m1 - &rep.m1).norm() + (&back.m2 - &rep.m2).norm();
            res.insert("round_trip".into(), json!(err));
            res.insert("round_trip_bound".into(), json!(1e-8 * (rep.m1.norm() + rep.m2.norm())));
            res.insert("commutator".into(), json!(nf.diagnostics.commutator));
            nf_report(&nf, tol)
        }
        "tensor" => {
            need(ins, 2, "tensor X Y")?;
            let (vx, vy) = (load(0)?, load(1)?);
            let x = ctx.normal_form(&vx, res)?;
            let y = ctx.normal_form(&vy, res)?;
            let t = tensor(&x, &y, tol)?;
            let (ox, oy, ot) = (fiber_omega(&x, tol)?, fiber_omega(&y, tol)?, fiber_omega(&t, tol)?);
            res.insert("monodromy_m1".into(), json!((&ot.m1 - kron(&ox.m1, &oy.m1)).norm()));
            res.insert("monodromy_m2".into(), json!((&ot.m2 - kron(&ox.m2, &oy.m2)).norm()));
            nf_report(&t, tol)
        }
        "dual" => {
            need(ins, 1, "dual X")?;
            let v = load(0)?;
            let x = ctx.normal_form(&v, res)?;
            let d = dual(&x, tol)?;
            if x.dim() > 0 {
                let tr = triangle_identities(&x, tol)?;
                res.insert("triangle_left".into(), json!(tr.left));
                res.insert("triangle_right".into(), json!(tr.right));
                res.insert("evaluation".into(), json!(tr.evaluation_residual));
                res.insert("coevaluation".into(), json!(tr.coevaluation_residual));
            }
            nf_report(&d, tol)
        }
        "hom" => {
            need(ins, 2, "hom X Y")?;
            let (vx, vy) = (load(0)?, load(1)?);
            let x = ctx.normal_form(&vx, res)?;
            let y = ctx.normal_form(&vy, res)?;
            let basis = hom_basis(&x, &y, tol)?;
            let worst = basis.iter().map(Morphism::intertwining_residual).fold(0.0, f64::max);
            res.insert("intertwining".into(), json!(worst));
            let iso = find_isomorphism(&x, &y, ctx.seed, tol)?;
            Ok(json!({
                "dim": basis.len(),
                "basis": basis.iter().map(|m| mat_to_json(&m.phi)).collect::<Vec<_>>(),
                "morphisms": basis.iter().map(io::morphism_to_json).collect::<Vec<_>>(),
                "isomorphism": iso.map(|m| mat_to_json(&m.phi)),
            }))
        }
        "kernel" | "cokernel" => {
            need(ins, 1, "kernel|cokernel MORPHISM")?;
            let v = load(0)?;
            let m = morphism_from_value(&v, ctx, res)?;
            res.insert("input_intertwining".into(), json!(m.intertwining_residual()));
            if job.command == "kernel" {
                let k = kernel(&m, tol)?;
                res.insert("composite".into(), json!((&m.phi * &k.phi).norm()));
                morphism_report(&k, tol, "inclusion")
            } else {
                let c = cokernel(&m, tol)?;
                res.insert("composite".into(), json!((&c.phi * &m.phi).norm()));
                morphism_report(&c, tol, "projection")
            }
        }
        "decompose" => {
            need(ins, 1, "decompose X")?;
            let v = load(0)?;
            let nf = ctx.normal_form(&v, res)?;
            let factors = decompose(&nf, tol)?;
            Ok(json!({
                "factors": factors.iter().map(|(l, b)| json!({"lambda": cx(*l), "b": cx(*b)})).collect::<Vec<_>>(),
            }))
        }
        "k0" => {
            need(ins, 1, "k0 X")?;
            let v = load(0)?;
            let nf = ctx.normal_form(&v, res)?;
            let class = k0_class(&nf, tol)?;
            Ok(json!({
                "class": io::k0_to_json(&class),
                "rank": class.rank(),
                "h0_dim": h0_dim(&nf, tol)?,
            }))
        }
        "kmap" => {
            need(ins, 1, "kmap K0_CLASS")?;
            let v = load(0)?;
            let inner = io::unwrap_report(&v, "class");
            let class = if inner.get("terms").is_some() {
                io::k0_from_value(inner, tol.eps_key)?
            } else {
                k0_class(&ctx.normal_form(&v, res)?, tol)?
            };
            let d = kmap(&class)?;
            Ok(json!({
                "divisor": io::divisor_to_json(&d),
                "degree": d.degree(),
                "note": "the theta Z-orbit labels b are forgotten",
            }))
        }
        "divisor-eq" => {
            need(ins, 2, "divisor-eq D1 D2")?;
            let (v1, v2) = (load(0)?, load(1)?);
            let d1 = io::divisor_from_value(&v1, tol.eps_key)?;
            let d2 = io::divisor_from_value(&v2, tol.eps_key)?;
            let eq = divisor_equivalent(&d1, &d2)?;
            res.insert("lattice_distance".into(), json!(d1.lattice_distance(d1.sum() - d2.sum())));
            Ok(json!({"equivalent": eq, "degree_difference": d1.degree() - d2.degree()}))
        }
        "psi-star" => {
            need(ins, 1, "psi-star X")?;
            let v = load(0)?;
            let nf = ctx.normal_form(&v, res)?;
            let e = psi_star(&nf)?;
            Ok(json!({"frvect": io::frvect_to_json(&e), "note": "B0 is forgotten"}))
        }
        "extension" => {
            need(ins, 1, "extension {\"zprime\", \"row\", \"sub\"}")?;
            let v = load(0)?;
            let j: ExtensionJson = serde_json::from_value(v).map_err(|e| Error::Parse(e.to_string()))?;
            let sub_json: io::FrVectJson = serde_json::from_value(io::unwrap_report(&j.sub, "frvect").clone())
                .map_err(|e| Error::Parse(e.to_string()))?;
            let sub = io::frvect_from_json(&sub_json)?;
            let row: Vec<AElem> = j.row.iter().map(io::aelem_from_json).collect();
            let ext = build_extension(from_cx(j.zprime), &row, &sub)?;
            res.insert("iota".into(), json!(ext.iota_residual));
            res.insert("pi".into(), json!(ext.pi_residual));
            Ok(json!({"frvect": io::frvect_to_json(&ext.object)}))
        }
        "std-bundle" => {
            need(ins, 2, "std-bundle M N")?;
            loaded.extend(ins.iter().map(|s| Input::scalar(s)));
            let (m, n) = (parse_int(&ins[0], "m")?, parse_int(&ins[1], "n")?);
            let d = std_bundle_data(m, n, ctx.theta)?;
            let s = ps_k_swap(m, n);
            Ok(json!({
                "deg": d.deg,
                "rk": d.rk,
                "slope": d.slope,
                "swap": {
                    "rank": s.rank,
                    "degree": {"theta": s.degree_theta, "const": s.degree_const},
                    "torsion": s.torsion,
                },
            }))
        }
        "phase" => {
            need(ins, 2, "phase M N")?;
            loaded.extend(ins.iter().map(|s| Input::scalar(s)));
            let (m, n) = (parse_int(&ins[0], "m")?, parse_int(&ins[1], "n")?);
            let z = stability_z(m, n, ctx.theta)?;
            Ok(json!({"z": cx(z), "phase": phase(m, n, ctx.theta)?}))
        }
        "nori" => {
            need(ins, 1, "nori REP|MATRIX")?;
            let v = load(0)?;
            let inner = io::unwrap_report(&v, "rep");
            let mats = if inner.get("M1").is_some() {
                let r = io::rep_from_value(inner, tol)?;
                vec![r.m1, r.m2]
            } else if inner.is_array() {
                let m: io::MatJson = serde_json::from_value(inner.clone()).map_err(|e| Error::Parse(e.to_string()))?;
                vec![io::mat_from_json(&m)?]
            } else {
                return Err(Error::Parse("expected a representation {\"M1\", \"M2\"} or a matrix".into()));
            };
            let r = is_nori_finite(&mats, ctx.d_max, tol)?;
            Ok(json!({"finite": r.finite, "order": r.order, "d_max": r.d_max, "reason": r.reason}))
        }
        "atheta-check" => atheta_check(ins, ctx, base, loaded, res),
        "wd" => {
            need(ins, 0, "wd --tau RE,IM")?;
            let w = wd(ctx.tau)?;
            let s = find_small_width(ctx.tau)?;
            res.insert(
                "width_identity".into(),
                json!((s.wd * (ctx.tau.re + s.n as f64) - 1.0).abs()),
            );
            Ok(json!({
                "wd": w,
                "g": {"N": s.n, "matrix": [[s.g.a, s.g.b], [s.g.c, s.g.d]]},
                "gtau": cx(s.gtau),
                "wd_g": s.wd,
            }))
        }
        "reduce-tau" => {
            need(ins, 1, "reduce-tau LAMBDA|MATRIX")?;
            let t = ctx.transversal()?;
            let raw = ins[0].trim();
            if raw.starts_with("[[") {
                let input = Input::load(raw, base)?;
                let m: io::MatJson = io::parse_json(&input.text)?;
                loaded.push(input);
                let r = reduce_to_transversal(&io::mat_from_json(&m)?, &t, tol)?;
                Ok(json!({
                    "matrix": mat_to_json(&r.matrix),
                    "shifts": r.shifts.iter().map(|(z, k)| json!({"cluster": cx(*z), "shift": k})).collect::<Vec<_>>(),
                    "near_boundary": cxs(&r.near_boundary),
                    "warnings": r.warnings,
                }))
            } else {
                loaded.push(Input::scalar(raw));
                let lambda = parse_complex(raw)?;
                let (rep, k) = reduce_mod_transversal(lambda, &t);
                res.insert("reconstruction".into(), json!((rep + t.tau * k as f64 - lambda).norm()));
                Ok(json!({
                    "representative": cx(rep),
                    "shift": k,
                    "coordinate": t.coordinate(rep),
                }))
            }
        }
        other => Err(Error::Parse(format!(
            "unknown command {other:?}; expected one of {}",
            COMMANDS.join(", ")
        ))),
    }
}

fn atheta_check(
    ins: &[String],
    ctx: &Ctx,
    base: Option<&Path>,
    loaded: &mut Vec<Input>,
    res: &mut Map<String, Value>,
) -> Result<Value> {
    let theta = ctx.theta;
    let spec = match ins {
        [] => AthetaCheckJson {
            word: Vec::new(),
            omega: None,
            bound: None,
            x: None,
        },
        [one] => {
            let input = Input::load(one, base)?;
            let v = input.json()?;
            loaded.push(input);
            serde_json::from_value(v).map_err(|e| Error::Parse(e.to_string()))?
        }
        _ => return Err(Error::InvalidInput("atheta-check takes at most one input".into())),
    };
    let omega = match spec.omega {
        Some([a, b]) => Omega::new(from_cx(a), from_cx(b))?,
        None => Omega::tau(ctx.tau),
    };
    let bound = spec.bound.unwrap_or(3);
    if !(0..=20).contains(&bound) {
        return Err(Error::InvalidInput(format!("bound {bound} must lie in 0..=20")));
    }
    let words: Vec<Vec<Gen>> = if spec.word.is_empty() {
        [Gen::G1, Gen::G2, Gen::G1Inv, Gen::G2Inv].iter().map(|g| vec![*g]).collect()
    } else {
        vec![spec.word.iter().map(|s| parse_gen(s)).collect::<Result<_>>()?]
    };
    let mut checks = Vec::new();
    let mut worst: f64 = 0.0;
    for w in &words {
        let r = check_intertwine(w, &omega, bound, theta)?;
        worst = worst.max(r);
        let gw = omega_action(w, &omega);
        checks.push(json!({
            "word": w.iter().map(|g| gen_name(*g)).collect::<Vec<_>>(),
            "residual": r,
            "g_omega": [cx(gw.w1), cx(gw.w2)],
        }));
    }
    res.insert("intertwine".into(), json!(worst));

    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    let mut mult: f64 = 0.0;
    for _ in 0..20 {
        let (x, y) = (random_aelem(&mut rng, theta, 4), random_aelem(&mut rng, theta, 4));
        for w in &words {
            let lhs = sigma_apply(w, &x.mul(&y)?)?;
            let rhs = sigma_apply(w, &x)?.mul(&sigma_apply(w, &y)?)?;
            mult = mult.max(lhs.sub(&rhs)?.norm());
        }
    }
    res.insert("multiplicativity".into(), json!(mult));

    let image = match spec.x {
        Some(xj) => {
            let x = io::aelem_from_json(&xj);
            let w = &words[0];
            let sx = sigma_apply(w, &x)?;
            let back = sigma_apply(&sigma_inverse_word(w), &sx)?;
            res.insert("inverse".into(), json!(back.sub(&x)?.norm()));
            Some(io::aelem_to_json(&sx))
        }
        None => None,
    };
    Ok(json!({
        "omega": [cx(omega.w1), cx(omega.w2)],
        "bound": bound,
        "checks": checks,
        "image": image,
    }))
}

fn tolerances_json(o: &JobOptions) -> Value {
    let d = Tolerances::default();
    json!({
        "eps_spec": o.tol_spec.unwrap_or(d.eps_spec),
        "eps_res": o.tol_res.unwrap_or(d.eps_res),
        "eps_key": o.tol_key.unwrap_or(d.eps_key),
    })
}

/// Runs one job; relative input paths resolve against `base` when given.
pub fn run_in(job: &JobSpec, base: Option<&Path>) -> Outcome {
    let mut loaded = Vec::new();
    let mut residuals = Map::new();
    let result = Ctx::new(&job.options).and_then(|ctx| {
        let r = dispatch(job, &ctx, base, &mut loaded, &mut residuals)?;
        Ok((r, ctx))
    });
    let o = &job.options;
    let mut combined = Sha256::new();
    for i in &loaded {
        combined.update((i.text.len() as u64).to_le_bytes());
        combined.update(i.text.as_bytes());
    }
    let mut report = json!({
        "command": job.command,
        "inputs": loaded.iter().map(|i| json!({"source": i.source, "sha256": i.digest()})).collect::<Vec<_>>(),
        "input_sha256": hex(&combined.finalize()),
        "tolerances": tolerances_json(o),
        "seed": o.seed.unwrap_or(0),
        "parameters": {
            "tau": o.tau.unwrap_or(DEFAULT_TAU),
            "theta": o.theta.unwrap_or(DEFAULT_THETA),
            "transversal_offset": o.transversal_offset,
            "truncation": o.truncation.unwrap_or(DEFAULT_TRUNCATION),
            "d_max": o.d_max.unwrap_or(DEFAULT_D_MAX),
        },
        "residuals": Value::Object(residuals),
    });
    let exit_code = match result {
        Ok((r, _)) => {
            report["status"] = json!("ok");
            report["result"] = r;
            0
        }
        Err(e) => {
            let code = exit_code(&e);
            report["status"] = json!(if code == 2 { "validation_error" } else { "numeric_error" });
            report["error"] = json!({"kind": error_kind(&e), "message": e.to_string()});
            code
        }
    };
    report["exit_code"] = json!(exit_code);
    Outcome { exit_code, report }
}

pub fn run(job: &JobSpec) -> Outcome {
    run_in(job, None)
}

/// Reads a manifest (a list of jobs, or `{"jobs": [...]}`) and runs the jobs
/// in parallel. Options missing from a job come from `defaults`; reports are
/// returned in manifest order and the exit code is the most severe one
/// (2 before 1 before 0).
pub fn run_batch(manifest: &Path, defaults: &JobOptions) -> Result<(i32, Vec<Outcome>)> {
    let text = std::fs::read_to_string(manifest)
        .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", manifest.display())))?;
    let v: Value = io::parse_json(&text)?;
    let list = v.get("jobs").unwrap_or(&v);
    let jobs: Vec<JobSpec> = serde_json::from_value(list.clone()).map_err(|e| Error::Parse(e.to_string()))?;
    let base = manifest.parent().map(Path::to_path_buf);
    let outcomes: Vec<Outcome> = jobs
        .par_iter()
        .map(|j| {
            let job = JobSpec {
                command: j.command.clone(),
                inputs: j.inputs.clone(),
                options: j.options.or(defaults),
            };
            run_in(&job, base.as_deref())
        })
        .collect();
    let code = outcomes
        .iter()
        .map(|o| o.exit_code)
        .max_by_key(|c| match c {
            2 => 2,
            1 => 1,
            _ => 0,
        })
        .unwrap_or(0);
    Ok((code, outcomes))
}

/// Human-readable rendering: a header and one line per result and
/// residual entry.
pub fn render_text(report: &Value) -> String {
    let mut out = String::new();
    let s = |k: &str| report.get(k).map(|v| v.to_string()).unwrap_or_default();
    out.push_str(&format!("command: {}\nstatus: {}\n", s("command"), s("status")));
    out.push_str(&format!("input sha256: {}\n", report["input_sha256"].as_str().unwrap_or("")));
    out.push_str(&format!("tolerances: {}\nseed: {}\n", s("tolerances"), s("seed")));
    if let Some(err) = report.get("error") {
        out.push_str(&format!("error [{}]: {}\n", err["kind"].as_str().unwrap_or(""), err["message"].as_str().unwrap_or("")));
    }
    for section in ["result", "residuals"] {
        if let Some(Value::Object(m)) = report.get(section) {
            out.push_str(&format!("{section}:\n"));
            for (k, v) in m {
                out.push_str(&format!("  {k}: {v}\n"));
            }
        }
    }
    out
}

/// Renders reports for output; JSON is pretty-printed with sorted keys.
pub fn render(reports: &[&Value], as_json: bool, batch: bool) -> String {
    if as_json {
        let v = if batch {
            Value::Array(reports.iter().map(|r| (*r).clone()).collect())
        } else {
            reports[0].clone()
        };
        let mut s = serde_json::to_string_pretty(&v).expect("reports serialize");
        s.push('\n');
        s
    } else {
        reports.iter().map(|r| render_text(r)).collect::<Vec<_>>().join("\n")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn job(cmd: &str, inputs: &[&str]) -> JobSpec {
        JobSpec {
            command: cmd.into(),
            inputs: inputs.iter().map(|s| s.to_string()).collect(),
            options: JobOptions::default(),
        }
    }

    #[test]
    fn wd_example() {
        let mut j = job("wd", &[]);
        j.options.tau = Some([1.0, -1.0]);
        let o = run(&j);
        assert_eq!(o.exit_code, 0);
        let r = &o.report["result"];
        assert_eq!(r["wd"], json!(2.0));
        assert_eq!(r["g"]["N"], json!(1));
        assert!((r["wd_g"].as_f64().unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn reduce_examples() {
        let o = run(&job("reduce-tau", &["1.3,-1.3"]));
        assert_eq!(o.exit_code, 0);
        assert_eq!(o.report["result"]["shift"], json!(1));
        let o = run(&job("reduce-tau", &["[[[1.3,-1.3]]]"]));
        assert_eq!(o.exit_code, 0);
        assert_eq!(o.report["result"]["shifts"][0]["shift"], json!(1));
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run(&job("frobnicate", &[])).exit_code, 2);
        let o = run(&job("normalize", &["{\"tau\": [1,"]));
        assert_eq!(o.exit_code, 2);
        assert!(o.report["error"]["message"].as_str().unwrap().contains("line"));
        assert_eq!(run(&job("std-bundle", &["2", "4"])).exit_code, 2);
        assert_eq!(run(&job("phase", &["0", "1"])).report["result"]["phase"], json!(0.5));
        assert_eq!(exit_code(&Error::NoConvergence { iterations: 1 }), 1);
        assert_eq!(exit_code(&Error::CommonEigenvector { residual: 1.0 }), 1);
        assert_eq!(exit_code(&Error::Invariant("x".into())), 2);
    }

    #[test]
    fn digests_and_determinism() {
        let j = job("rh-from-rep", &[r#"{"M1": [[[0,1]]], "M2": [[[2,0]]]}"#]);
        let (a, b) = (run(&j), run(&j));
        assert_eq!(a.exit_code, 0, "{}", a.report);
        assert_eq!(serde_json::to_string(&a.report).unwrap(), serde_json::to_string(&b.report).unwrap());
        assert_eq!(a.report["inputs"][0]["sha256"].as_str().unwrap().len(), 64);
        let back = run(&job("rh-to-rep", &[&a.report.to_string()]));
        assert_eq!(back.exit_code, 0, "{}", back.report);
        let m1 = &back.report["result"]["rep"]["M1"][0][0];
        assert!((m1[0].as_f64().unwrap()).abs() < 1e-12);
        assert!((m1[1].as_f64().unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn atheta_defaults() {
        let o = run(&job("atheta-check", &[]));
        assert_eq!(o.exit_code, 0, "{}", o.report);
        assert!(o.report["residuals"]["intertwine"].as_f64().unwrap() < 1e-12);
        assert!(o.report["residuals"]["multiplicativity"].as_f64().unwrap() < 1e-12);
    }
}
