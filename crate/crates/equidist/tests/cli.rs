use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use equidist::curve_file::{read_curve, to_json};
use equidist_core::fixtures;
use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(format!("{name}.json"))
}

fn run(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_equidist"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("EQUIDIST_LAMBDA")
        .env_remove("EQUIDIST_FORMAT")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json(path: PathBuf) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn fixture_files_match_builders() {
    for f in fixtures::all() {
        let path = fixture(f.name);
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text, to_json(&f.curve), "{}", f.name);
        assert_eq!(read_curve(&path).unwrap(), f.curve, "{}", f.name);
    }
}

#[test]
fn circle_is_rejected_as_non_generic() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["compute", "--lambda", "0.5", fixture("circle").to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn c2_wigner_caustic_has_two_branches() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["compute", "--lambda", "0.5", fixture("c2").to_str().unwrap()], dir.path());
    assert!(o.status.success());
    let s = json(dir.path().join("c2_summary.json"));
    assert_eq!(s["lambdas"][0]["branch_count"], 2);
    assert!(stdout(&o).contains("2 branch(es)"));
}

#[test]
fn perturbed_ellipse_cusp_parities() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["compute", "--lambda", "0.3,0.5", fixture("perturbed-ellipse").to_str().unwrap()], dir.path());
    assert!(o.status.success());
    for l in ["0.3", "0.5"] {
        assert!(dir.path().join(format!("perturbed-ellipse_l{l}.svg")).exists());
    }
    let s = json(dir.path().join("perturbed-ellipse_summary.json"));
    let cusps: Vec<u64> = s["lambdas"].as_array().unwrap().iter().map(|l| l["cusps"].as_u64().unwrap()).collect();
    assert_eq!(cusps[0] % 2, 0);
    assert_eq!(cusps[1] % 2, 1);
    let csv = std::fs::read_to_string(dir.path().join("perturbed-ellipse_l0.5_b0.csv")).unwrap();
    assert!(csv.starts_with("s,t,x,y,kappa_E,is_cusp,is_inflexion\n"));
    let flagged = csv.lines().skip(1).filter(|l| l.split(',').nth(5) == Some("1")).count();
    assert_eq!(flagged as u64, 2 * cusps[1]);
}

#[test]
fn outputs_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let w1 = fixture("w1");
    let args = ["compute", "--lambda", "0.3,0.5", w1.to_str().unwrap()];
    assert!(run(&args, dir.path()).status.success());
    let mut first: Vec<(String, Vec<u8>)> = Vec::new();
    for e in std::fs::read_dir(dir.path()).unwrap() {
        let p = e.unwrap().path();
        first.push((p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()));
    }
    first.sort();
    assert!(run(&args, dir.path()).status.success());
    for (name, bytes) in &first {
        assert_eq!(&std::fs::read(dir.path().join(name)).unwrap(), bytes, "{name}");
    }
    assert_eq!(first.len(), 1 + 2 + 2 + 2);
}

#[test]
fn branches_in_two_row_notation() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["branches", "--lambda", "0.5", fixture("perturbed-ellipse").to_str().unwrap()], dir.path());
    assert!(stdout(&o).contains("p0-p1 / p1-p0"));
    let o = run(&["branches", "--lambda", "0.3", fixture("c2").to_str().unwrap()], dir.path());
    assert!(stdout(&o).contains("GENERIC (3 scheme(s))"), "{}", stdout(&o));
}

#[test]
fn verify_a_rosette() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["verify", "--fixture", "c3"], dir.path());
    assert!(o.status.success(), "{}", stdout(&o));
    let r = json(dir.path().join("report.json"));
    let names: Vec<&str> = r["checks"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    assert!(names.contains(&"c3.rosette.half.branches"));
}

#[test]
fn verify_a_curve_file() {
    let dir = tempfile::tempdir().unwrap();
    let w1 = fixture("w1");
    let o = run(&["verify", w1.to_str().unwrap()], dir.path());
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).contains("PASS w1.wn.half.on_shell"));
}

#[test]
fn css_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["css", fixture("ellipse").to_str().unwrap()], dir.path());
    assert!(o.status.success());
    assert!(stdout(&o).contains("single point"));
    let o = run(&["css", fixture("perturbed-ellipse").to_str().unwrap()], dir.path());
    assert!(o.status.success());
    let s = json(dir.path().join("perturbed-ellipse_css_summary.json"));
    assert_eq!(s["cusps"].as_u64().unwrap() % 2, 1);
    let o = run(&["css", fixture("w1").to_str().unwrap()], dir.path());
    assert!(o.status.success());
    let s = json(dir.path().join("w1_css_summary.json"));
    assert!(s["branches"].as_array().unwrap().iter().any(|b| !b["endpoints"].is_null()));
}

#[test]
fn invalid_input_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let c2_path = fixture("c2");
    let c2 = c2_path.to_str().unwrap();
    let missing = dir.path().join("missing.json");
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"xc\": [0, 1], \"xs\": [], \"yc\": [], \"ys\": [0, 1], \"extra\": 1}").unwrap();
    for args in [
        vec!["compute", "--lambda", "0", c2],
        vec!["compute", "--lambda", "0.5", "--samples", "1000", c2],
        vec!["compute", "--lambda", "0.5", "--tol", "nonsense=1", c2],
        vec!["compute", "--lambda", "0.5", missing.to_str().unwrap()],
        vec!["compute", "--lambda", "0.5", bad.to_str().unwrap()],
        vec!["compute", c2],
        vec!["verify", "--fixture", "nope"],
    ] {
        assert_eq!(run(&args, dir.path()).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn environment_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_equidist"))
        .args(["compute", fixture("c3").to_str().unwrap()])
        .env("EQUIDIST_LAMBDA", "0.4")
        .env("EQUIDIST_FORMAT", "json")
        .env("EQUIDIST_OUT", dir.path())
        .output()
        .unwrap();
    assert!(o.status.success());
    let s = json(dir.path().join("c3_summary.json"));
    assert_eq!(s["lambdas"][0]["branch_count"], 5);
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
}

#[test]
fn fixtures_command_writes_curve_files() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["fixtures", "--write"], dir.path());
    assert!(o.status.success());
    for f in fixtures::all() {
        let written = std::fs::read_to_string(dir.path().join(format!("{}.json", f.name))).unwrap();
        assert_eq!(written, std::fs::read_to_string(fixture(f.name)).unwrap());
    }
}
