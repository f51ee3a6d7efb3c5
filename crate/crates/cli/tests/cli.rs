use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const Z2: &str = r#"{"type":"finite","elements":["e","t"],"table":[["e","t"],["t","e"]]}"#;
const Z3: &str = r#"{"type":"finite","elements":["0","1","2"],"table":[[0,1,2],[1,2,0],[2,0,1]]}"#;
const S3: &str = r#"{"type":"perm","degree":3,"generators":[[1,0,2],[1,2,0]]}"#;
const BROKEN: &str = r#"{"type":"finite","elements":["e","t"],"table":[["e","t"],["t","t"]]}"#;

struct Dir {
    dir: tempfile::TempDir,
}

impl Dir {
    fn new() -> Self {
        let d = Dir {
            dir: tempfile::tempdir().unwrap(),
        };
        d.write("z2.grp", Z2);
        d.write("z3.grp", Z3);
        d.write("s3.grp", S3);
        d
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn write(&self, name: &str, text: &str) -> PathBuf {
        let p = self.path(name);
        fs::write(&p, text).unwrap();
        p
    }

    fn run(&self, args: &[&str]) -> Output {
        Command::new(env!("CARGO_BIN_EXE_l1bar"))
            .current_dir(self.dir.path())
            .args(args)
            .env_remove("L1BAR_SIZE_CAP")
            .output()
            .unwrap()
    }
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn homology_of_z3() {
    let d = Dir::new();
    let o = d.run(&["homology", "--group", "z3.grp", "--degree", "1"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(stdout(&o).trim(), "H_1 rank: 0");
}

#[test]
fn kappa_of_z2() {
    let d = Dir::new();
    let o = d.run(&["kappa", "--group", "z2.grp", "--degree", "1"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(stdout(&o).trim(), "kappa = 1 (exact, vertex-enumeration)");
}

#[test]
fn group_check() {
    let d = Dir::new();
    let o = d.run(&["group", "check", "--group", "s3.grp"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("order 6"));
    d.write("bad.grp", BROKEN);
    let o = d.run(&["group", "check", "--group", "bad.grp"]);
    assert_eq!(code(&o), 1, "{}", stdout(&o));
}

#[test]
fn input_errors_exit_two() {
    let d = Dir::new();
    assert_eq!(code(&d.run(&["frobnicate"])), 2);
    let o = d.run(&["homology", "--group", "missing.grp", "--degree", "1"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("missing.grp"));
    d.write("junk.grp", "{\"type\": \"finite\", ");
    let o = d.run(&["homology", "--group", "junk.grp", "--degree", "1"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("line"), "{}", stderr(&o));
    d.write("c.json", r#"[{"coeff":"1","tuple":["x"]}]"#);
    let o = d.run(&["boundary", "--group", "z2.grp", "--chain", "c.json"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("record 0"), "{}", stderr(&o));
}

#[test]
fn size_cap_from_the_environment() {
    let d = Dir::new();
    let o = Command::new(env!("CARGO_BIN_EXE_l1bar"))
        .current_dir(d.dir.path())
        .args(["homology", "--group", "s3.grp", "--degree", "3"])
        .env("L1BAR_SIZE_CAP", "100")
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("cap 100"), "{}", stderr(&o));
}

#[test]
fn boundary_and_matrix() {
    let d = Dir::new();
    d.write("c.json", r#"[{"coeff":"1","tuple":["t","t"]}]"#);
    let o = d.run(&["boundary", "--group", "z2.grp", "--chain", "c.json", "--json"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let recs = v["result"]["chain"].as_array().unwrap();
    // ∂(t,t) = (t) - (e) + (t) = 2(t) - (e)
    assert_eq!(recs.len(), 2);
    let o = d.run(&["boundary", "--group", "z2.grp", "--degree", "2", "--matrix"]);
    assert!(stdout(&o).starts_with("2 4 "), "{}", stdout(&o));
}

#[test]
fn fill_verify_and_tamper() {
    let d = Dir::new();
    d.write("z.json", r#"[{"coeff":"2","tuple":["t"]},{"coeff":"-1","tuple":["e"]}]"#);
    let o = d.run(&["fill", "--group", "z2.grp", "--chain", "z.json", "--out", "cert.fill"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("ratio = 1/3"));
    let o = d.run(&["verify", "cert.fill"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));

    let text = fs::read_to_string(d.path("cert.fill")).unwrap();
    let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
    v["c"][0]["coeff"] = "2".into();
    d.write("bad.fill", &serde_json::to_string(&v).unwrap());
    let o = d.run(&["verify", "bad.fill"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("boundary mismatch"), "{}", stderr(&o));

    let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
    v["ratio"] = "333333/1000000".into();
    d.write("low.fill", &serde_json::to_string(&v).unwrap());
    assert_eq!(code(&d.run(&["verify", "low.fill"])), 1);

    d.write("garbage.fill", "not json");
    assert_eq!(code(&d.run(&["verify", "garbage.fill"])), 2);
}

#[test]
fn fill_of_a_non_boundary_is_a_mathematical_failure() {
    let d = Dir::new();
    d.write("z.json", r#"[{"coeff":"1","tuple":["e","t"]}]"#);
    let o = d.run(&["fill", "--group", "z2.grp", "--chain", "z.json"]);
    assert_eq!(code(&o), 1, "{}", stdout(&o));
}

#[test]
fn certificates_are_deterministic() {
    let d = Dir::new();
    d.write("z.json", r#"[{"coeff":"1","tuple":["1","1","1"]},{"coeff":"-2","tuple":["0","2","1"]}]"#);
    let o = d.run(&["boundary", "--group", "z3.grp", "--chain", "z.json", "--out", "dz.json", "--json"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(d.path("dz.json")).unwrap()).unwrap();
    d.write("b.json", &v["result"]["chain"].to_string());
    d.run(&["fill", "--group", "z3.grp", "--chain", "b.json", "--out", "a.fill"]);
    d.run(&["fill", "--group", "z3.grp", "--chain", "b.json", "--out", "b.fill"]);
    let a = fs::read(d.path("a.fill")).unwrap();
    assert!(!a.is_empty());
    assert_eq!(a, fs::read(d.path("b.fill")).unwrap());
    assert_eq!(code(&d.run(&["verify", "a.fill"])), 0);
}

#[test]
fn cross_and_cup() {
    let d = Dir::new();
    d.write("a.json", r#"[{"coeff":"1","tuple":["t"]}]"#);
    d.write("b.json", r#"[{"coeff":"1","tuple":["1"]}]"#);
    let o = d.run(&[
        "cross", "--left-group", "z2.grp", "--left", "a.json", "--right-group", "z3.grp", "--right", "b.json", "--json",
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let recs = v["result"]["chain"].as_array().unwrap();
    assert_eq!(recs.len(), 2);
    assert!(recs.iter().any(|r| r["coeff"] == "-1" && r["tuple"][0] == "(e,1)"), "{recs:?}");

    d.write("f.json", r#"[{"value":"2","tuple":["t"]}]"#);
    d.write("g.json", r#"[{"value":"3","tuple":["t"]}]"#);
    let o = d.run(&["cup", "--group", "z2.grp", "--left", "f.json", "--right", "g.json", "--json"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    // (-1)^{1·1} f(t) g(t) = -6
    assert_eq!(v["result"]["cochain"][0]["value"], "-6");
}

#[test]
fn pairing_compatibility() {
    let d = Dir::new();
    d.write("f.json", r#"[{"value":"2","tuple":[]}]"#);
    d.write("g.json", r#"[{"value":"-1","tuple":[]}]"#);
    d.write("c.json", r#"[{"coeff":"3","tuple":[]}]"#);
    d.write("dd.json", r#"[{"coeff":"1/2","tuple":[]}]"#);
    let o = d.run(&[
        "pair", "--left-group", "z2.grp", "--right-group", "z3.grp", "--f", "f.json", "--g", "g.json", "--c", "c.json",
        "--d", "dd.json",
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("= -3, ±⟨f,c⟩⟨g,d⟩ = -3"), "{}", stdout(&o));
}

#[test]
fn mitosis_build_verify_pipeline() {
    let d = Dir::new();
    let o = d.run(&["mitosis", "build-abelian", "--group", "z2.grp", "--out", "m.json"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("order 24"));
    let o = d.run(&["mitosis", "verify", "--mitosis", "m.json"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("axiom 3"));

    let mut m: serde_json::Value = serde_json::from_str(&fs::read_to_string(d.path("m.json")).unwrap()).unwrap();
    m["d"] = m["s"].clone();
    d.write("bad.json", &m.to_string());
    let o = d.run(&["mitosis", "verify", "--mitosis", "bad.json"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("FAILS"));

    let o = d.run(&["mitosis", "build-abelian", "--group", "s3.grp"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("do not commute"));

    d.write(
        "p.json",
        r#"{"degree": 2, "h": "z2.grp", "h_prime": "z2.grp", "k": "z2.grp", "g": "z2.grp",
            "phi": {"type": "identity"}, "phi_prime": {"type": "identity"}, "psi": {"type": "identity"},
            "mitosis": "m.json", "samples": 5, "seed": 4}"#,
    );
    let o = d.run(&["pipeline", "--config", "p.json", "--out", "p.cert"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).starts_with("5 runs"));
    let o = d.run(&["verify", "p.cert"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("5 runs"));
}

#[test]
fn tower_table_and_certificate() {
    let d = Dir::new();
    let o = d.run(&["tower", "--q-max", "3", "--xi", "1/2", "--out", "t.cert"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let lines: Vec<String> = stdout(&o).lines().map(str::to_string).collect();
    assert_eq!(lines.len(), 4);
    assert!(lines[1].starts_with("1  4  0  1/2  0  5/2"), "{}", lines[1]);
    assert_eq!(code(&d.run(&["verify", "t.cert"])), 0);
    let text = fs::read_to_string(d.path("t.cert")).unwrap();
    let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
    v["rows"][1]["kappa"] = "3".into();
    d.write("bad.cert", &v.to_string());
    assert_eq!(code(&d.run(&["verify", "bad.cert"])), 1);
    assert!(Path::new(&d.path("t.cert")).exists());
}
