use std::process::{Command, Output};

use serde_json::Value;

fn cgsieve(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cgsieve"))
        .args(args)
        .env_remove("CGSIEVE_N")
        .env_remove("CGSIEVE_SEED")
        .env_remove("CGSIEVE_TRIALS")
        .env_remove("CGSIEVE_JOBS")
        .output()
        .expect("binary runs")
}

fn lines(out: &Output) -> Vec<Value> {
    String::from_utf8(out.stdout.clone())
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).expect("each line is JSON"))
        .collect()
}

fn schema() -> Value {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/schema/run-report.schema.json");
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn required(schema: &Value, def: &str) -> Vec<String> {
    schema["$defs"][def]["required"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap().to_owned())
        .collect()
}

#[test]
fn run_is_byte_identical_across_job_counts() {
    let a = cgsieve(&["run", "--n", "5", "--trials", "6", "--seed", "11", "--jobs", "1"]);
    let b = cgsieve(&["run", "--n", "5", "--trials", "6", "--seed", "11", "--jobs", "4"]);
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
    let c = cgsieve(&["run", "--n", "5", "--trials", "6", "--seed", "12"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn run_lines_carry_schema_keys() {
    let out = cgsieve(&["run", "--n", "4", "--trials", "3", "--seed", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let schema = schema();
    let rows = lines(&out);
    assert_eq!(rows.len(), 4);
    for (i, row) in rows[..3].iter().enumerate() {
        assert_eq!(row["type"], "trial");
        assert_eq!(row["trial"], i as u64);
        for key in required(&schema, "trial") {
            assert!(row.get(&key).is_some(), "trial line missing {key}");
        }
        for stage in ["stage_a", "stage_b", "stage_c"] {
            for key in required(&schema, "stage") {
                assert!(row["stages"][stage].get(&key).is_some());
            }
        }
        assert!(row.get("wall_time_ms").is_none());
        assert_eq!(row["planted"], row["recovered"]);
    }
    let summary = &rows[3];
    assert_eq!(summary["type"], "summary");
    for key in required(&schema, "summary") {
        assert!(summary.get(&key).is_some(), "summary missing {key}");
    }
    assert_eq!(summary["successes"], 3);
}

#[test]
fn timing_flag_adds_wall_time() {
    let out = cgsieve(&["run", "--n", "2", "--trials", "1", "--timing"]);
    assert!(out.status.success());
    assert!(lines(&out)[0]["wall_time_ms"].as_f64().unwrap() >= 0.0);
}

#[test]
fn plant_n1_is_a_valid_label() {
    let out = cgsieve(&["plant", "--n", "1", "--seed", "3"]);
    assert!(out.status.success());
    let label = &lines(&out)[0];
    assert_eq!(label["n"], 1);
    assert_eq!(label["t"], serde_json::json!([1]));
    assert!(label["l"][0].as_u64().unwrap() < 4);
}

#[test]
fn out_flag_writes_file() {
    let dir = std::env::temp_dir().join(format!("cgsieve-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("run.jsonl");
    let out = cgsieve(&["run", "--n", "3", "--trials", "2", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(&path).unwrap().lines().count(), 3);
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn exit_codes() {
    assert_eq!(cgsieve(&["run", "--n", "0"]).status.code(), Some(2));
    assert_eq!(cgsieve(&["plant", "--n", "0"]).status.code(), Some(2));
    assert_eq!(cgsieve(&["run", "--n", "3", "--trials", "0"]).status.code(), Some(2));
    assert_eq!(cgsieve(&["run", "--n", "3", "--stage-c-k", "0"]).status.code(), Some(2));
    assert_eq!(cgsieve(&["cross-check", "--n", "3"]).status.code(), Some(2));
    assert_eq!(cgsieve(&["frobnicate"]).status.code(), Some(2));
    let bad = cgsieve(&["run", "--n", "3", "--out", "/nonexistent-dir/x.jsonl"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stderr).starts_with("error:"));
}

#[test]
fn env_overrides_flags_defaults() {
    let out = Command::new(env!("CARGO_BIN_EXE_cgsieve"))
        .args(["plant"])
        .env("CGSIEVE_N", "6")
        .env("CGSIEVE_SEED", "9")
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(lines(&out)[0]["n"], 6);
}

#[test]
fn verify_reps_and_cross_check_pass() {
    let reps = cgsieve(&["verify-reps"]);
    assert_eq!(reps.status.code(), Some(0));
    assert_eq!(lines(&reps)[0]["passed"], true);
    let n1 = cgsieve(&["cross-check", "--n", "1"]);
    assert_eq!(n1.status.code(), Some(0));
    assert_eq!(lines(&n1)[0]["labels"], 4);
    let n2 = cgsieve(&["cross-check", "--n", "2", "--cases", "3", "--seed", "5"]);
    assert_eq!(n2.status.code(), Some(0));
    assert_eq!(lines(&n2)[0]["passed"], true);
}

#[test]
fn bench_emits_points_and_fit() {
    let out = cgsieve(&["bench", "--ns", "2,4", "--trials", "3", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = lines(&out);
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[0]["n"], 2);
    assert_eq!(rows[2]["type"], "fit");
    assert!(rows[2]["slope"].as_f64().unwrap().is_finite());
}
