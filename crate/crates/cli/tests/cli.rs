use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_quadcurl")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn exactness_on_one_combination_exits_zero() {
    let o = run(&["--check", "exactness", "--family", "new", "--shape", "rect", "--k", "2", "--n", "1,2"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.matches("verdict: exact").count(), 3, "{text}");
}

#[test]
fn exactness_records_are_key_value() {
    let o = run(&["--check", "exactness", "--shape", "tri", "--n", "1", "--out", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.lines().all(|l| l.split_whitespace().all(|f| f.contains('='))), "{text}");
    assert!(text.contains("level=global"));
}

#[test]
fn commuting_check_passes() {
    let o = run(&["--check", "commuting", "--family", "high", "--shape", "tri", "--k", "3", "--n", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn appendix_check_reports_triangle_mismatch() {
    let o = run(&["--check", "appendix"]);
    let text = stdout(&o);
    assert!(text.contains("reference rect: 8 of 8"), "{text}");
    assert!(text.contains("reference tri: 0 of 6"), "{text}");
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn unsupported_degree_is_a_usage_error() {
    let o = run(&["--study", "--shape", "rect", "--k", "4", "--n", "2"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["--check", "unisolvence", "--shape", "tri", "--k", "1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn oversized_exact_mesh_is_a_usage_error() {
    let o = run(&["--check", "exactness", "--n", "5"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn mode_is_required() {
    assert_eq!(run(&[]).status.code(), Some(2));
}

#[test]
fn study_writes_csv() {
    let dir = std::env::temp_dir().join(format!("quadcurl-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("study.csv");
    let o = run(&["--study", "--family", "new", "--shape", "rect", "--k", "2", "--n", "4,8", "--path", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<_> = csv.lines().collect();
    assert!(lines[0].starts_with("h,l2,l2_rate,curl,curl_rate,curl2,curl2_rate"));
    assert_eq!(lines.len(), 3);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn study_markdown_has_table_rows() {
    let o = run(&["--study", "--shape", "tri", "--n", "2,4", "--out", "md"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().filter(|l| l.starts_with('|')).count() >= 4);
}
