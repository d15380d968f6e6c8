use std::path::Path;
use std::process::{Command, Output};

fn harmonica(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_harmonica"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap()
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap()
}

#[test]
fn dirichlet_on_path5_writes_ruin_probabilities() {
    let dir = tempfile::tempdir().unwrap();
    let out = harmonica(&["dirichlet", "--space", "path5", "--g", "0:0,4:1"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let csv = read(dir.path(), "dirichlet.csv");
    let values: Vec<f64> = csv.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    for (x, v) in values.iter().enumerate() {
        assert!((v - x as f64 / 4.0).abs() < 1e-12, "{csv}");
    }
    let summary: toml::Table = toml::from_str(&read(dir.path(), "summary.toml")).unwrap();
    assert_eq!(summary["run"]["threads"].as_integer(), Some(1));
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(harmonica(&["bogus"], dir.path()).status.code(), Some(2));
    assert_eq!(
        harmonica(&["dirichlet", "--space", "/no/such/space.toml", "--g", "0:0"], dir.path()).status.code(),
        Some(2)
    );
}

#[test]
fn schema_errors_report_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("bad.toml");
    std::fs::write(
        &file,
        "base_point = \"a\"\nabsorbing = [\"b\"]\nvertices = [{ id = \"a\" }, { id = \"b\" }]\nedges = [\n  { from = \"a\", to = \"b\", weight = -1.0 },\n]\n",
    )
    .unwrap();
    let out = harmonica(&["green", "--space", file.to_str().unwrap()], &dir.path().join("out"));
    assert_ne!(out.status.code(), Some(0));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 5") && err.contains("\"a\" -> \"b\""), "{err}");
}

#[test]
fn generated_space_files_load_back() {
    let dir = tempfile::tempdir().unwrap();
    let gen = dir.path().join("gen");
    assert_eq!(harmonica(&["gen", "--space", "grid2d:4"], &gen).status.code(), Some(0));
    let file = gen.join("space.toml");
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    assert_eq!(harmonica(&["green", "--space", "grid2d:4"], &a).status.code(), Some(0));
    assert_eq!(harmonica(&["green", "--space", file.to_str().unwrap()], &b).status.code(), Some(0));
    assert_eq!(read(&a, "green.csv"), read(&b, "green.csv"));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["mc", "--space", "path5", "--x", "2", "--y", "2", "--samples", "2000", "--seed", "9"];
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert_eq!(harmonica(&args, &a).status.code(), Some(0));
    assert_eq!(harmonica(&args, &b).status.code(), Some(0));
    for name in ["mc_measure.csv", "summary.toml"] {
        assert_eq!(read(&a, name), read(&b, name));
    }
}

#[test]
fn quick_verify_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = harmonica(&["verify", "--quick"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let csv = read(dir.path(), "verify.csv");
    assert!(csv.lines().skip(1).all(|l| l.split(',').nth(1) == Some("true")), "{csv}");
}
