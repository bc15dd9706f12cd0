//! Drives the `bqtau` binary end to end.

use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bqtau"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli");
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}\nstderr: {}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn mat(v: &Value) -> Vec<Vec<(f64, f64)>> {
    v.as_array()
        .unwrap()
        .iter()
        .map(|row| {
            row.as_array()
                .unwrap()
                .iter()
                .map(|z| (z[0].as_f64().unwrap(), z[1].as_f64().unwrap()))
                .collect()
        })
        .collect()
}

fn dist(a: &Value, b: &Value) -> f64 {
    let (a, b) = (mat(a), mat(b));
    let mut s = 0.0;
    for (ra, rb) in a.iter().zip(&b) {
        for (x, y) in ra.iter().zip(rb) {
            s += (x.0 - y.0).powi(2) + (x.1 - y.1).powi(2);
        }
    }
    s.sqrt()
}

// M2 = M1 + 2 I commutes with M1
const REP: &str = r#"{"M1": [[[0.5, 1.2], [0.3, 0.0]], [[0.0, 0.0], [-1.1, 0.4]]],
                      "M2": [[[2.5, 1.2], [0.3, 0.0]], [[0.0, 0.0], [0.9, 0.4]]]}"#;

#[test]
fn riemann_hilbert_round_trip_through_files() {
    let rep = scratch("rep.json");
    let nf = scratch("nf.json");
    std::fs::write(&rep, REP).unwrap();
    let out = run(&["rh-from-rep", rep.to_str().unwrap(), "--json", "--output", nf.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&nf).unwrap()).unwrap();
    let bound = report["residuals"]["round_trip_bound"].as_f64().unwrap();

    let out = run(&["rh-to-rep", nf.to_str().unwrap(), "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let back = json_of(&out);
    let input: Value = serde_json::from_str(REP).unwrap();
    let err = dist(&back["result"]["rep"]["M1"], &input["M1"]) + dist(&back["result"]["rep"]["M2"], &input["M2"]);
    assert!(err < bound, "round trip error {err:e} above reported bound {bound:e}");
    assert_eq!(back["inputs"][0]["sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn identical_jobs_give_identical_bytes() {
    let args = ["hom", REP, REP, "--json", "--seed", "7"];
    // a representation is not an object; use normal forms built from it instead
    let nf = json_of(&run(&["rh-from-rep", REP, "--json"]));
    let nf = nf.to_string();
    let args2 = ["hom", nf.as_str(), nf.as_str(), "--json", "--seed", "7"];
    let (a, b) = (run(&args2), run(&args2));
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stdout));
    assert_eq!(a.stdout, b.stdout);
    let hom = json_of(&a);
    assert_eq!(hom["seed"], 7);
    assert!(hom["result"]["dim"].as_u64().unwrap() >= 1);
    assert!(!hom["result"]["isomorphism"].is_null());
    // the invalid variant fails validation
    assert_eq!(run(&args).status.code(), Some(2));
}

#[test]
fn width_example() {
    let out = run(&["wd", "--tau", "1,-1", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let r = &json_of(&out)["result"];
    assert_eq!(r["wd"], 2.0);
    assert_eq!(r["g"]["N"], 1);
    assert!((r["wd_g"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    let text = String::from_utf8(run(&["wd", "--tau", "-1,-1"]).stdout).unwrap();
    assert!(text.contains("input sha256"));
    assert!(text.contains("status: \"ok\""));
}

#[test]
fn exit_codes() {
    let out = run(&["normalize", "{\"tau\": [1,\n -1", "--json"]);
    assert_eq!(out.status.code(), Some(2));
    let msg = json_of(&out)["error"]["message"].as_str().unwrap().to_string();
    assert!(msg.contains("line 2"), "{msg}");
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(run(&["std-bundle", "2", "4"]).status.code(), Some(2));
    assert_eq!(run(&["phase", "0", "0"]).status.code(), Some(2));
    assert_eq!(run(&["normalize", "/nonexistent/file.json"]).status.code(), Some(2));
    // delta B != [B, A]: the equivariance invariant is violated
    let obj = r#"{"tau": [1, -1], "theta": 0.6180339887498949, "dim": 1,
        "A": {"dim": 1, "terms": [{"pow": 0, "coef": [[[0.3, 0.1]]]}]},
        "B": {"dim": 1, "terms": [{"pow": 0, "coef": [[[1, 0]]]}, {"pow": 1, "coef": [[[1, 0]]]}]}}"#;
    let out = run(&["normalize", obj, "--json"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json_of(&out)["error"]["kind"], "EquivarianceViolation");
}

#[test]
fn normalize_lists_strip_eigenvalues_and_pipes_into_k0() {
    let obj = r#"{"tau": [1, -1], "theta": 0.6180339887498949, "dim": 1,
        "A": {"dim": 1, "terms": [{"pow": 0, "coef": [[[3.3, -3.3]]]}]},
        "B": {"dim": 1, "terms": [{"pow": 0, "coef": [[[2, 0]]]}]}, "transversal_offset": 0}"#;
    let out = run(&["normalize", obj, "--json", "--truncation", "8"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let report = json_of(&out);
    let strip = &report["result"]["eigenvalues_in_strip"][0];
    assert!((strip["coordinate"].as_f64().unwrap() - 0.3).abs() < 1e-12);
    assert_eq!(report["parameters"]["truncation"], 8);

    let k0 = run(&["k0", &report.to_string(), "--json"]);
    assert_eq!(k0.status.code(), Some(0));
    let k0 = json_of(&k0);
    assert_eq!(k0["result"]["rank"], 1);
    let kmap = run(&["kmap", &k0.to_string(), "--json"]);
    assert_eq!(json_of(&kmap)["result"]["degree"], 1);
}

#[test]
fn batch_preserves_manifest_order() {
    let manifest = scratch("manifest.json");
    let rep = scratch("batch_rep.json");
    std::fs::write(&rep, REP).unwrap();
    let jobs = serde_json::json!({"jobs": [
        {"command": "wd", "tau": [2.5, 1.0]},
        {"command": "phase", "inputs": ["0", "3"]},
        {"command": "rh-from-rep", "inputs": ["batch_rep.json"], "seed": 3},
        {"command": "std-bundle", "inputs": ["1", "0"], "theta": 0.25},
        {"command": "wd", "tau": [1.0, -1.0]},
    ]});
    std::fs::write(&manifest, jobs.to_string()).unwrap();
    let out = run(&["--batch", manifest.to_str().unwrap(), "--json", "--seed", "11"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let reports = json_of(&out);
    let cmds: Vec<&str> = reports.as_array().unwrap().iter().map(|r| r["command"].as_str().unwrap()).collect();
    assert_eq!(cmds, ["wd", "phase", "rh-from-rep", "std-bundle", "wd"]);
    assert_eq!(reports[4]["result"]["wd"], 2.0);
    assert_eq!(reports[2]["seed"], 3);
    assert_eq!(reports[0]["seed"], 11);
    assert_eq!(reports[3]["result"]["rk"], 0.25);

    let bad = scratch("bad_manifest.json");
    std::fs::write(&bad, r#"[{"command": "wd"}, {"command": "phase", "inputs": ["0", "0"]}]"#).unwrap();
    assert_eq!(run(&["--batch", bad.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn kernel_of_a_hom_report() {
    // x = simple(2, 0.3 tau) (+) simple(5, 0.6 tau); Hom(x, x) contains projections
    let t = |s: f64| [s, -s];
    let nf = serde_json::json!({
        "tau": [1, -1], "theta": 0.6180339887498949, "dim": 2, "transversal_offset": 0,
        "A0": [[t(0.3), [0, 0]], [[0, 0], t(0.6)]],
        "B0": [[[2, 0], [0, 0]], [[0, 0], [5, 0]]],
    })
    .to_string();
    let hom = run(&["hom", &nf, &nf, "--json"]);
    assert_eq!(hom.status.code(), Some(0));
    let hom = json_of(&hom);
    assert_eq!(hom["result"]["dim"], 2);
    let ker = run(&["kernel", &hom.to_string(), "--json"]);
    assert_eq!(ker.status.code(), Some(0), "{}", String::from_utf8_lossy(&ker.stdout));
    assert_eq!(json_of(&ker)["result"]["normal_form"]["dim"], 1);
}

#[test]
fn atheta_and_nori_commands() {
    let out = run(&["atheta-check", r#"{"word": ["g1", "g2_inv"], "bound": 3, "x": {"theta": 0.3, "coeffs": [{"n1": 1, "n2": 0, "c": [1, 0]}]}}"#, "--theta", "0.3", "--json"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let r = json_of(&out);
    assert!(r["residuals"]["intertwine"].as_f64().unwrap() < 1e-12);
    assert!(r["residuals"]["inverse"].as_f64().unwrap() < 1e-12);
    let out = run(&["nori", r#"[[[0, 1], [0, 0]], [[0, 0], [-1, 0]]]"#, "--json", "--d-max", "8"]);
    let r = json_of(&out);
    assert_eq!(r["result"]["finite"], true);
    assert_eq!(r["result"]["order"], 4);
}
