use std::process::{Command, Output};

fn zonolimit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zonolimit"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn field(text: &str, name: &str) -> String {
    text.lines()
        .find_map(|l| {
            let (k, v) = l.split_once('=')?;
            (k.trim() == name).then(|| v.trim().to_string())
        })
        .unwrap_or_default()
}

#[test]
fn cap_of_the_quadrant() {
    let o = zonolimit(&["cap", "--cone", "orthant2", "--a", "1,1"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert_eq!(field(&s, "u_exact"), "(1/2, 1/2)");
    let q: f64 = field(&s, "q").parse().unwrap();
    assert!((q - 1.650964).abs() < 1e-6);
}

#[test]
fn cap_reads_a_cone_file() {
    let dir = std::env::temp_dir().join(format!("zonolimit-cone-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("orthant2.json");
    std::fs::write(&path, r#"{"d": 2, "generators": [[1, 0], [0, 1]]}"#).unwrap();
    let o = zonolimit(&["cap", "--cone", path.to_str().unwrap(), "--a", "1,1"]);
    assert!(o.status.success());
    assert_eq!(field(&stdout(&o), "u1"), "0.5");
}

#[test]
fn count_of_two_two() {
    let o = zonolimit(&["count", "--cone", "orthant2", "--k", "2,2"]);
    assert!(o.status.success());
    assert_eq!(field(&stdout(&o), "count"), "5");
    let o = zonolimit(&["count", "--k", "2,2", "--non-strict"]);
    assert_eq!(field(&stdout(&o), "count"), "9");
}

#[test]
fn unknown_subcommand_exits_with_usage() {
    let o = zonolimit(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));
}

#[test]
fn config_and_budget_errors_have_distinct_codes() {
    let o = zonolimit(&["cap", "--a", "1,0"]);
    assert_eq!(o.status.code(), Some(2));
    let o = zonolimit(&["gibbs", "uniform", "--nk", "9,9", "--accepted", "1", "--max-attempts", "2"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn csv_is_reproducible_and_self_describing() {
    let dir = std::env::temp_dir().join(format!("zonolimit-csv-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("moments.csv");
    let p = path.to_str().unwrap();
    let args = ["gibbs", "sample", "--k", "1,1", "--n", "200", "--replicas", "300", "--seed", "7", "--csv", p];
    assert!(zonolimit(&args).status.success());
    let first = std::fs::read(&path).unwrap();
    assert!(zonolimit(&args).status.success());
    let second = std::fs::read(&path).unwrap();
    assert_eq!(first, second);
    let text = String::from_utf8(first).unwrap();
    let mut lines = text.lines();
    let comment = lines.next().unwrap();
    assert!(comment.starts_with('#') && comment.contains("gibbs sample") && comment.contains("--seed 7"));
    assert_eq!(lines.next().unwrap(), "quantity,i,j,estimate,se,reference,exact_truncated");
}

#[test]
fn json_mirrors_columns() {
    let o = zonolimit(&["--format", "json", "count", "--k", "1,1", "--n-max", "3"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[1]["count"], 5);
    assert!(v["invocation"].as_str().unwrap().contains("--n-max 3"));
}

#[test]
fn faces_of_a_generator_file() {
    let dir = std::env::temp_dir().join(format!("zonolimit-faces-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("w.json");
    std::fs::write(&path, r#"{"d": 3, "generators": [[1,0,0],[0,1,0],[0,0,1],[1,1,1]]}"#).unwrap();
    let o = zonolimit(&["faces", "count", "--generators", path.to_str().unwrap()]);
    let s = stdout(&o);
    assert_eq!(field(&s, "f0"), "14");
    assert_eq!(field(&s, "hull_agrees"), "true");
}

#[test]
fn verify_runs_selected_criteria() {
    let o = zonolimit(&["verify", "--only", "1,3"]);
    assert!(o.status.success());
    let err = String::from_utf8_lossy(&o.stderr);
    assert_eq!(err.lines().filter(|l| l.starts_with("PASS")).count(), 2);
}
