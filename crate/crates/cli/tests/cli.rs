use std::process::{Command, Output};

use serde_json::Value;

fn leech24(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_leech24"))
        .args(args)
        .env_remove("LEECH24_ORDER")
        .env_remove("LEECH24_FAULT_INJECT")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

/// Removes the fields that legitimately differ between runs.
fn strip_volatile(v: &mut Value) {
    match v {
        Value::Object(map) => {
            map.remove("timestamp");
            map.remove("wall_ms");
            map.values_mut().for_each(strip_volatile);
        }
        Value::Array(items) => items.iter_mut().for_each(strip_volatile),
        _ => {}
    }
}

#[test]
fn expand_goldens() {
    let o = leech24(&["expand", "phi", "--order", "3"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), "phi = -3657830400·q - 314573414400·q^2 - 13716864000000·q^3 + O(q^4)");
    let o = leech24(&["expand", "delta", "--order", "q3"]);
    assert_eq!(stdout(&o).trim(), "Delta = q - 24·q^2 + 252·q^3 + O(q^4)");
    let o = leech24(&["expand", "Phi1", "--order", "q^1"]);
    assert_eq!(stdout(&o).trim(), "Phi1 = i·π^-1·(725760·q^(-1) + 113218560 + 19691320320·q + O(q^2))");
}

#[test]
fn expand_formats() {
    let o = leech24(&["expand", "th00", "--order", "1", "--format", "csv"]);
    assert_eq!(stdout(&o), "exponent,coefficient\n0,1\n1/2,8\n1,24\n3/2,32\n");
    let o = leech24(&["expand", "E4", "--order", "2", "--format", "json"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["form"], "E4");
}

#[test]
fn expand_rejects_unknown_forms_and_bad_orders() {
    let o = leech24(&["expand", "nosuchform"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown form"));
    assert_eq!(code(&leech24(&["expand", "phi", "--order", "q0"])), 2);
    assert_eq!(code(&leech24(&["expand", "phi", "--order", "x"])), 2);
}

#[test]
fn order_comes_from_the_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_leech24"))
        .args(["expand", "delta"])
        .env("LEECH24_ORDER", "q2")
        .output()
        .unwrap();
    assert_eq!(stdout(&o).trim(), "Delta = q - 24·q^2 + O(q^3)");
}

#[test]
fn certify_below_q10_is_a_usage_error() {
    assert_eq!(code(&leech24(&["certify", "--order", "q8"])), 2);
}

#[test]
fn certify_at_q20_fails_on_the_tail() {
    let o = leech24(&["certify", "--order", "q20"]);
    assert_eq!(code(&o), 1);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["status"], "failed");
    assert_eq!(v["tail"]["status"], "failed");
    assert!(v["identities"].as_array().unwrap().iter().all(|c| c["status"] == "ok"));
    assert_eq!(v["lemmas"].as_array().unwrap().len(), 4);
    assert!(String::from_utf8_lossy(&o.stderr).contains("tail"));

    let text = leech24(&["certify", "--order", "q20", "--format", "text"]);
    assert_eq!(code(&text), 1);
    assert!(stdout(&text).starts_with("certificate at order q20: failed"));
}

#[test]
fn certify_reports_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let mut reports = Vec::new();
    for name in ["one.json", "two.json"] {
        let path = dir.path().join(name);
        let o = leech24(&["certify", "--order", "q20", "--out", path.to_str().unwrap(), "--jobs", "2"]);
        assert_eq!(code(&o), 1);
        let mut v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        strip_volatile(&mut v);
        reports.push(serde_json::to_string(&v).unwrap());
    }
    assert_eq!(reports[0], reports[1]);
}

#[test]
fn fault_injection_flips_the_exit_code() {
    let o = Command::new(env!("CARGO_BIN_EXE_leech24"))
        .args(["certify", "--order", "q12"])
        .env("LEECH24_FAULT_INJECT", "psiS:3")
        .output()
        .unwrap();
    assert_eq!(code(&o), 1);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["fault_injection"], "psiS:3");
    assert!(v["lemmas"].as_array().unwrap().iter().all(|l| l["status"] == "skipped"));
    let failing: Vec<&str> = v["identities"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["status"] == "failed")
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert!(failing.contains(&"psi_sum"), "{failing:?}");
}

#[test]
fn certify_at_the_default_order_passes() {
    let o = leech24(&["certify", "--jobs", "3"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["status"], "ok", "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(code(&o), 0);
    assert_eq!(v["order"], "q60");
    assert_eq!(v["catalog_sha256"].as_object().unwrap().len(), 13);
    assert_eq!(v["density_bound"]["value"], "π^12/479001600");
    for lemma in v["lemmas"].as_array().unwrap() {
        assert_eq!(lemma["status"], "ok");
    }
}

#[test]
fn eval_f_at_zero() {
    let o = leech24(&["eval", "f", "--r", "0"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("r,f,f_radius,rigor"));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    let value: f64 = row[1].parse().unwrap();
    assert!((value - 1.0).abs() < 1e-25);
}

#[test]
fn eval_b_near_root_two() {
    let o = leech24(&["eval", "b", "--r", "1.4142135624", "--format", "json"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let mid: f64 = v[0]["b"]["mid"].as_str().unwrap().parse().unwrap();
    assert!(mid.abs() < 1e-5, "{mid}");
    let exact = leech24(&["eval", "b", "--r", "sqrt(2)", "--format", "json"]);
    let v: Value = serde_json::from_str(&stdout(&exact)).unwrap();
    let mid: f64 = v[0]["b"]["mid"].as_str().unwrap().parse().unwrap();
    assert!(mid.abs() < 1e-25, "{mid}");
}

#[test]
fn eval_grid_is_nonpositive_beyond_two() {
    let o = leech24(&["eval", "f", "--grid", "2:12:41"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    let rows: Vec<&str> = out.lines().skip(1).collect();
    assert_eq!(rows.len(), 41);
    for row in rows {
        let cols: Vec<&str> = row.split(',').collect();
        let (mid, radius): (f64, f64) = (cols[1].parse().unwrap(), cols[2].parse().unwrap());
        assert!(mid <= radius, "{row}");
        assert_eq!(cols[3], "heuristic");
    }
}

#[test]
fn eval_usage_errors() {
    assert_eq!(code(&leech24(&["eval", "f", "--r", "-1"])), 2);
    assert_eq!(code(&leech24(&["eval", "f", "--grid", "3:1:5"])), 2);
    assert_eq!(code(&leech24(&["eval", "f", "--grid", "0:1"])), 2);
    assert_eq!(code(&leech24(&["eval", "f"])), 2);
    assert_eq!(code(&leech24(&["eval", "g", "--r", "1"])), 2);
    assert_eq!(code(&leech24(&["eval", "f", "--r", "1", "--digits", "5"])), 2);
}

#[test]
fn values_table_rows() {
    let o = leech24(&["values"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    let row = |name: &str| out.lines().find(|l| l.starts_with(&format!("{name} "))).unwrap().to_string();
    assert!(row("f'(2)").contains("-1/16380 (exact)"));
    assert!(row("a(0)").contains("113218560·i/π (exact)"));
    let density = row("density bound (r0 = 2)");
    assert!(density.contains("π^12/479001600 (exact)"));
    assert!(density.contains("1.9295743"));

    let csv = leech24(&["values", "--format", "csv"]);
    assert!(stdout(&csv).starts_with("name,value,provenance,numeric\n"));
}
