use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

fn stabkit(args: &[&str]) -> Output {
    stabkit_env(args, &[])
}

fn stabkit_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_stabkit"));
    cmd.current_dir(golden_dir()).args(args);
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

/// Compares against `<name>.out`; `UPDATE_GOLDEN=1` rewrites the file.
fn golden(name: &str, args: &[&str]) {
    let o = stabkit(args);
    assert!(o.status.success(), "{name}: {}", stderr(&o));
    let path = golden_dir().join(format!("{name}.out"));
    let got = stdout(&o);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, &got).unwrap();
        return;
    }
    let want = std::fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing golden file {}", path.display()));
    assert_eq!(got, want, "{name} differs from its golden file");
}

fn json(args: &[&str]) -> Value {
    let mut all = args.to_vec();
    all.extend(["--output", "json"]);
    let o = stabkit(&all);
    assert!(o.status.success(), "{}", stderr(&o));
    serde_json::from_slice(&o.stdout).unwrap()
}

fn dim(table: &Value, deg: &str) -> u64 {
    table["dims"].get(deg).and_then(Value::as_u64).unwrap_or(0)
}

#[test]
fn golden_outputs() {
    golden("rational_model.cdga", &["cdga", "--input", "rational_model.json", "--box", "n=9"]);
    golden("exterior_y1.cotor", &["cotor", "--input", "exterior_y1.json", "--box", "n=8"]);
    golden("truncated_x4.cotor", &["cotor", "--input", "truncated_x4.json", "--box", "n=8,dmin=0,dmax=8"]);
    golden("red_blue.free_ek", &["free-ek", "--input", "red_blue.json", "--box", "n=8,dmin=0,dmax=8", "--elements", "r,b"]);
    golden("sigma_tower.free_ek", &["free-ek", "--input", "sigma_tower.json", "--box", "n=16,dmin=0,dmax=15"]);
    golden(
        "mod3_filtered.ss",
        &["ss", "--input", "mod3_filtered.json", "--box", "n=6,dmin=0,dmax=4", "--page", "1", "--elements", "x"],
    );
    golden("nodal.smith_toda", &["smith-toda", "--input", "nodal.json", "--box", "n=5,dmin=0,dmax=2", "--elements", "r,b"]);
    golden("plane.localize", &["localize", "--input", "plane.json", "--box", "n=6", "--ideal", "r,b"]);
    golden("nodal.telescope", &["localize", "--input", "nodal.json", "--box", "n=4", "--ideal", "r", "--method", "telescope"]);
    golden("rational_model.vanish", &["vanish", "--input", "rational_model.json", "--box", "n=9,dmin=0,dmax=9"]);
    golden("theta_surjective.bounds", &["bounds", "--input", "theta_surjective.json"]);
    golden("adams_b.bounds", &["bounds", "--input", "adams_b.json", "--output", "json"]);
}

#[test]
fn rational_model_has_seven_classes() {
    let doc = json(&["cdga", "--input", "rational_model.json", "--box", "n=9"]);
    let t = &doc["table"];
    let classes = ["(0,0)", "(1,0)", "(2,1)", "(4,2)", "(5,3)", "(7,4)", "(8,5)"];
    assert_eq!(t["dims"].as_object().unwrap().len(), 7);
    for c in classes {
        assert_eq!(dim(t, c), 1, "{c}");
    }
}

#[test]
fn red_blue_quotient_and_line() {
    let doc = json(&["free-ek", "--input", "red_blue.json", "--box", "n=8,dmin=0,dmax=8", "--elements", "r,b"]);
    for n in 0..=8 {
        assert_eq!(dim(&doc["table"], &format!("({n},0)")), n + 1);
        assert_eq!(dim(&doc["quotient"], &format!("({n},0)")), u64::from(n == 0));
    }
    assert_eq!(doc["vanishing_line"]["lambda"], "1/2");
    assert_eq!(doc["vanishing_line"]["kappa"], 0);
}

#[test]
fn mod3_spectral_sequence_fates() {
    let doc = json(&["ss", "--input", "mod3_filtered.json", "--box", "n=12,dmin=0,dmax=8", "--page", "1", "--elements", "x,x^3"]);
    let traces = doc["traces"].as_array().unwrap();
    assert_eq!(traces[0]["fate"]["status"], "dies_at");
    assert_eq!(traces[0]["fate"]["image"], "sigma*z");
    assert_eq!(traces[1]["fate"]["status"], "permanent");
}

#[test]
fn malformed_degree_reports_pointer() {
    let o = stabkit(&["cdga", "--input", "bad_degree.json", "--box", "n=3"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("/gens/0/degree"), "{}", stderr(&o));

    let o = stabkit(&["validate", "--input", "bad_degree.json", "--output", "json"]);
    assert_eq!(o.status.code(), Some(1));
    let doc: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["diagnostics"][0]["path"], "/gens/0/degree");
}

#[test]
fn validate_reports_semantic_errors() {
    let o = stabkit(&["validate", "--input", "rational_model.json"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "ok\n");

    let o = stabkit(&["validate", "--input", "bad_dy.json"]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains("/differential/y") && err.contains("degree error"), "{err}");

    let o = stabkit(&["validate", "--input", "broken_coproduct.json"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("/hopf/coproduct/1: coassociativity fails"), "{}", stderr(&o));
}

#[test]
fn generator_pointers_follow_input_order() {
    let dir = tempdir();
    let path = dir.join("odd_poly.json");
    std::fs::write(
        &path,
        r#"{"field":{"kind":"prime","p":3},"kind":"cdga","gens":[
            {"name":"z","n":2,"d":0},{"name":"a","n":1,"d":1,"parity":"polynomial"}]}"#,
    )
    .unwrap();
    let o = stabkit(&["validate", "--input", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("/gens/1:"), "{}", stderr(&o));
}

fn tempdir() -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join("cli-inputs");
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn resource_limit_exits_two_with_partial_table() {
    let o = stabkit(&["cdga", "--input", "rational_model.json", "--box", "n=9", "--max-dim", "1", "--output", "json"]);
    assert_eq!(o.status.code(), Some(2));
    let doc: Value = serde_json::from_slice(&o.stdout).unwrap();
    let completed = &doc["partial"]["completed"];
    assert!(completed["n_max"].as_i64().unwrap() < 9);
    assert_eq!(dim(&doc["table"], "(0,0)"), 1);
}

#[test]
fn output_is_deterministic_across_thread_counts() {
    let args = ["localize", "--input", "plane.json", "--box", "n=5", "--ideal", "r,b", "--output", "json"];
    let a = stabkit_env(&args, &[("STABKIT_THREADS", "1")]);
    let b = stabkit_env(&args, &[("STABKIT_THREADS", "4")]);
    let c = stabkit(&args);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
}

/// Reads the grid back from table output: `(n, d) -> dim`.
fn parse_grid(text: &str) -> Vec<((i64, i64), u64)> {
    let lines: Vec<&str> = text.lines().collect();
    let axis = lines.iter().position(|l| l.trim_start().starts_with('+')).unwrap();
    let ns: Vec<i64> = lines[axis + 1].split_whitespace().map(|x| x.parse().unwrap()).collect();
    let mut out = Vec::new();
    for l in &lines[1..axis] {
        let (d, cells) = l.split_once('|').unwrap();
        let d: i64 = d.trim().parse().unwrap();
        for (n, c) in ns.iter().zip(cells.split_whitespace()) {
            if c != "." {
                out.push(((*n, d), c.parse().unwrap()));
            }
        }
    }
    out
}

#[test]
fn table_and_json_agree() {
    let cases: [&[&str]; 3] = [
        &["cdga", "--input", "rational_model.json", "--box", "n=9"],
        &["cotor", "--input", "truncated_x4.json", "--box", "n=8"],
        &["localize", "--input", "plane.json", "--box", "n=4", "--ideal", "r,b"],
    ];
    for args in cases {
        let doc = json(args);
        let text = stdout(&stabkit(args));
        let mut from_json: Vec<((i64, i64), u64)> = doc["table"]["dims"]
            .as_object()
            .unwrap()
            .iter()
            .map(|(k, v)| {
                let inner = k.trim_matches(|c| c == '(' || c == ')');
                let (n, d) = inner.split_once(',').unwrap();
                ((n.parse().unwrap(), d.parse().unwrap()), v.as_u64().unwrap())
            })
            .collect();
        let mut from_text = parse_grid(&text);
        from_json.sort();
        from_text.sort();
        assert_eq!(from_json, from_text, "{args:?}");
    }
}

#[test]
fn emitted_json_round_trips() {
    let dir = tempdir();
    for (name, args) in [
        ("cdga_out.json", vec!["cdga", "--input", "rational_model.json", "--box", "n=6"]),
        ("cotor_out.json", vec!["cotor", "--input", "exterior_y1.json", "--box", "n=6"]),
        ("local_out.json", vec!["localize", "--input", "plane.json", "--box", "n=4", "--ideal", "r,b"]),
    ] {
        let doc = json(&args);
        let path = dir.join(name);
        std::fs::write(&path, serde_json::to_string(&doc).unwrap()).unwrap();
        let o = stabkit(&["validate", "--input", path.to_str().unwrap()]);
        assert!(o.status.success(), "{name}: {}", stderr(&o));
        let table: stabkit::chain::BoxTable = serde_json::from_value(doc["table"].clone()).unwrap();
        assert!(table.check().is_ok());
        let again = stabkit(&["vanish", "--input", path.to_str().unwrap(), "--output", "json"]);
        assert!(again.status.success(), "{}", stderr(&again));
        let v: Value = serde_json::from_slice(&again.stdout).unwrap();
        assert_eq!(v["table"], doc["table"]);
    }
}

#[test]
fn non_tabulable_localization_fails_cleanly() {
    let o = stabkit(&["localize", "--input", "plane.json", "--box", "n=4", "--ideal", "r", "--method", "telescope"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("does not stabilize"));
}

#[test]
fn seeded_quantization_check() {
    let doc = json(&["bounds", "--seed", "11"]);
    assert_eq!(doc["samples"].as_array().unwrap().len(), 200);
    assert_eq!(json(&["bounds", "--seed", "11"]), doc);
}
