use std::path::PathBuf;
use std::process::{Command, Output};

fn tmlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tmlab")).args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn program_file(name: &str, text: &str) -> PathBuf {
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn classify_json(name: &str, text: &str) -> serde_json::Value {
    let path = program_file(name, text);
    serde_json::from_str(&stdout(&tmlab(&["classify", path.to_str().unwrap()]))).unwrap()
}

#[test]
fn classify_halter() {
    let v = classify_json("halter.tm", "tm n=1 a=2\nq1 0 -> H 0 R\nq1 1 -> H 0 R\n");
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["classification"]["verdict"], "HaltsBeforeRepeat");
    assert_eq!(v["halting_on_b"], "Halts");
    assert_eq!(v["in_b"], true);
    assert_eq!(v["budgeted"]["verdict"]["verdict"], "Halts");
}

#[test]
fn classify_faller() {
    let v = classify_json("faller.tm", "tm n=1 a=2\nq1 0 -> q1 1 L\nq1 1 -> H 0 R\n");
    assert_eq!(v["classification"]["verdict"], "FallsOffBeforeRepeat");
    assert_eq!(v["halting_on_b"], "DoesNotHalt");
}

#[test]
fn classify_reads_sampled_json() {
    let json = stdout(&tmlab(&[
        "sample", "--n", "7", "--a", "3", "--seed", "0xbeef", "--json",
    ]));
    let text = stdout(&tmlab(&["sample", "--n", "7", "--a", "3", "--seed", "0xbeef"]));
    let from_json = classify_json("sampled.json", &json);
    let from_text = classify_json("sampled.tm", &text);
    assert_eq!(from_json, from_text);
    assert_eq!(from_json["n"], 7);
}

#[test]
fn malformed_file_names_the_line() {
    let path = program_file("bad.tm", "tm n=1 a=2\nq1 0 -> q1 1 X\n");
    let out = tmlab(&["classify", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn exact_enumeration_reports() {
    let text = stdout(&tmlab(&["enumerate", "--n", "1", "--event", "in-b"]));
    let row = text.lines().last().unwrap();
    assert!(row.starts_with("in-b,one-way,2,1,64,48,3,4,0.75"), "{row}");
    let text = stdout(&tmlab(&["enumerate", "--n", "2", "--event", "no-halt-transition"]));
    assert!(text.lines().last().unwrap().contains(",20736,4096,16,81,"));
}

#[test]
fn density_rows_follow_the_grid() {
    let text = stdout(&tmlab(&[
        "density",
        "--event",
        "in-b",
        "--n",
        "10,100,1000",
        "--seed",
        "7",
    ]));
    let p: Vec<f64> = text
        .lines()
        .skip(3)
        .map(|l| l.split(',').nth(6).unwrap().parse().unwrap())
        .collect();
    assert_eq!(p.len(), 3);
    assert!(p[0] < p[1] && p[1] < p[2], "{p:?}");
}

#[test]
fn walk_exact_column() {
    let text = stdout(&tmlab(&["walk", "--k", "1,3,5", "--trials", "1000"]));
    let exact: Vec<&str> = text.lines().skip(3).map(|l| l.split(',').nth(1).unwrap()).collect();
    assert_eq!(exact, ["0.5", "0.625", "0.6875"]);
}

#[test]
fn domain_errors_exit_with_two() {
    let cases: [&[&str]; 6] = [
        &["enumerate", "--n", "4"],
        &["walk", "--dim", "3", "--k", "5"],
        &["density", "--event", "falls-off", "--model", "twoway", "--n", "5"],
        &["density", "--event", "in-b", "--n", "5,3"],
        &["density", "--event", "no-such-event", "--n", "5"],
        &["no-such-command"],
    ];
    for args in cases {
        let out = tmlab(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
    let over = tmlab(&["enumerate", "--n", "4"]);
    assert!(String::from_utf8_lossy(&over.stderr).contains("25600000000"));
}

#[test]
fn output_flag_writes_the_report() {
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("walk.json");
    let out = tmlab(&[
        "walk",
        "--k",
        "3",
        "--trials",
        "100",
        "--format",
        "json",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert!(stdout(&out).is_empty());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["rows"][0]["exact_cdf"], 0.625);
}
