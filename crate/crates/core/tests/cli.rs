use std::path::Path;
use std::process::{Command, Output};

use mulrk::report::Table;
use mulrk::tableau::classical_mrk4;

fn mulrk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mulrk"))
        .args(args)
        .env("MULRK_THREADS", "1")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn table(o: &Output) -> Table {
    assert_eq!(o.status.code(), Some(0), "stderr: {}", stderr(o));
    Table::from_csv(&stdout(o)).unwrap()
}

fn nums(t: &Table, name: &str) -> Vec<f64> {
    t.column(name)
        .unwrap()
        .into_iter()
        .map(|c| c.as_f64().unwrap())
        .collect()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn solve_sqrt_defaults() {
    let t = table(&mulrk(&["solve", "--problem", "sqrt"]));
    assert_eq!(
        t.columns,
        ["x", "re", "im", "exact_re", "exact_im", "rel_error", "method_tag"]
    );
    assert_eq!(t.rows.len(), 11);
    let last = *nums(&t, "re").last().unwrap();
    assert!((last - 2.0).abs() < 5e-6, "{last}");
    assert!(nums(&t, "rel_error").iter().all(|e| *e <= 1e-5));
}

#[test]
fn csv_is_lf_terminated_and_byte_stable() {
    let a = mulrk(&["solve", "--problem", "baranyi", "--h", "1"]);
    let b = mulrk(&["solve", "--problem", "baranyi", "--h", "1"]);
    assert_eq!(a.stdout, b.stdout);
    let s = stdout(&a);
    assert!(!s.contains('\r'));
    assert!(s.ends_with('\n'));
}

#[test]
fn solve_expression_matches_registry() {
    let reg = table(&mulrk(&["solve", "--problem", "sqrt"]));
    let expr = table(&mulrk(&[
        "solve", "--mrhs", "exp(1/(2*y^2))", "--x0", "0", "--y0", "1", "--h", "0.3", "--x-end", "3",
    ]));
    for (a, b) in nums(&reg, "re").iter().zip(nums(&expr, "re")) {
        assert!((a - b).abs() <= 1e-14 * a.abs());
    }
}

#[test]
fn param_override_changes_initial_value() {
    let t = table(&mulrk(&["solve", "--problem", "sqrt", "--param", "y0=2"]));
    assert_eq!(nums(&t, "re")[0], 2.0);
}

#[test]
fn unknown_param_is_a_config_error() {
    let o = mulrk(&["solve", "--problem", "sqrt", "--param", "nope=1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).starts_with("error:"));
}

#[test]
fn missing_problem_source_is_a_usage_error() {
    let o = mulrk(&["solve", "--h", "0.1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn root_without_hybrid_exits_3_with_hint() {
    let o = mulrk(&["solve", "--problem", "root_cross"]);
    assert_eq!(o.status.code(), Some(3));
    let err = stderr(&o);
    assert!(err.contains("x = 1.025"), "{err}");
    assert!(err.contains("--hybrid"), "{err}");
}

#[test]
fn hybrid_crosses_the_root() {
    let t = table(&mulrk(&["solve", "--problem", "root_cross", "--hybrid"]));
    let tags: Vec<String> = t
        .rows
        .iter()
        .map(|r| r[t.column_index("method_tag").unwrap()].to_string())
        .collect();
    assert!(tags.iter().any(|m| m == "rk4"));
    assert_eq!(tags.last().unwrap(), "mrk4");
    let last = *nums(&t, "re").last().unwrap();
    assert!((last + 1.0).abs() < 1e-4, "{last}");
}

#[test]
fn hybrid_flags_require_hybrid() {
    let o = mulrk(&["solve", "--problem", "root_cross", "--eps", "0.2"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn compare_second_order() {
    let t = table(&mulrk(&["compare", "--problem", "second_order"]));
    assert!((nums(&t, "rk4_re")[1] - 7.618_231_31).abs() < 1e-6);
    assert!(nums(&t, "mrk4_rel_error").iter().all(|e| *e < 1e-12));
}

#[test]
fn convergence_reports_order() {
    let o = mulrk(&[
        "convergence", "--problem", "sqrt", "--h", "0.2", "--levels", "3", "--format", "json",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let order = v["manifest"]["order"].as_f64().unwrap();
    assert!((3.8..=4.2).contains(&order), "{order}");
    assert_eq!(v["rows"].as_array().unwrap().len(), 3);
    assert!(stderr(&o).contains("estimated order"));
}

#[test]
fn bench_round_trips_through_from_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("bench.csv");
    let args = [
        "bench", "--problem", "sqrt", "--h-list", "0.3,0.15", "--repeats", "3",
    ];
    let mut write = args.to_vec();
    write.extend(["-o", path_str(&out)]);
    assert_eq!(mulrk(&write).status.code(), Some(0));
    let t = Table::from_csv(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(
        t.columns,
        ["problem", "method", "h", "steps", "wall_time_s", "final_rel_error"]
    );
    assert_eq!(t.rows.len(), 4);

    let mut check = args.to_vec();
    check.extend(["--from-csv", path_str(&out)]);
    let o = mulrk(&check);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
}

#[test]
fn from_csv_mismatch_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("solve.csv");
    assert_eq!(
        mulrk(&["solve", "--problem", "sqrt", "-o", path_str(&out)]).status.code(),
        Some(0)
    );
    let o = mulrk(&["solve", "--problem", "sqrt", "--h", "0.15", "--from-csv", path_str(&out)]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn list_problems_names_every_entry() {
    let t = table(&mulrk(&["list-problems"]));
    let names: Vec<String> = t.rows.iter().map(|r| r[0].to_string()).collect();
    assert_eq!(names, ["sqrt", "baranyi", "second_order", "root_cross"]);
}

#[test]
fn validate_tableau_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.json");
    std::fs::write(&good, classical_mrk4().to_json()).unwrap();
    let o = mulrk(&["validate-tableau", "--tableau", path_str(&good)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));

    let mut c = classical_mrk4().coefficients();
    let last = c.len() - 1;
    c[last] += 1e-3;
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, classical_mrk4().with_coefficients(&c).unwrap().to_json()).unwrap();
    let o = mulrk(&["validate-tableau", "--tableau", path_str(&bad)]);
    assert_eq!(o.status.code(), Some(1));
    let t = Table::from_csv(&stdout(&o)).unwrap();
    assert!(!t.rows.is_empty());
}

#[test]
fn solve_with_custom_tableau() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("t.json");
    std::fs::write(&f, classical_mrk4().to_json()).unwrap();
    let a = mulrk(&["solve", "--problem", "sqrt"]);
    let b = mulrk(&["solve", "--problem", "sqrt", "--tableau", path_str(&f)]);
    assert_eq!(a.stdout, b.stdout);
}
