use std::path::PathBuf;
use std::process::{Command, Output};

use amalgam_cli::Report;

fn spec(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("specs").join(name)
}

fn amalgam(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_amalgam")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn invariants_text() {
    let o = amalgam(&["invariants", spec("s4s4.spec").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("K0 = Z ⊕ Z/4"), "{text}");
    assert!(text.contains("K1 = Z\n"));
    assert!(text.contains("simple: yes"));
}

#[test]
fn sl2z_invariants_machine() {
    let o = amalgam(&["invariants", spec("sl2z.spec").to_str().unwrap(), "--format", "machine"]);
    assert_eq!(o.status.code(), Some(0));
    let r = Report::from_machine(&stdout(&o)).unwrap();
    assert_eq!(r.data["k0"], "0");
    assert_eq!(r.data["ideals"]["count"], 4);
    assert_eq!(r.data["simple"], false);
}

#[test]
fn machine_reports_round_trip_and_repeat() {
    let path = spec("sl2z.spec");
    let args = ["simulate", path.to_str().unwrap(), "--trials", "3000", "--seed", "11", "--format", "machine"];
    let first = stdout(&amalgam(&args));
    let second = stdout(&amalgam(&args));
    assert_eq!(first, second);
    let parsed = Report::from_machine(&first).unwrap();
    assert_eq!(parsed.to_machine(), first);
    let kms = stdout(&amalgam(&["kms", path.to_str().unwrap(), "--format", "machine"]));
    assert_eq!(Report::from_machine(&kms).unwrap().to_machine(), kms);
}

#[test]
fn kms_homogeneous_three_factors() {
    let o = amalgam(&["kms", spec("z2z2z2.spec").to_str().unwrap(), "--format", "machine"]);
    assert_eq!(o.status.code(), Some(0));
    let r = Report::from_machine(&stdout(&o)).unwrap();
    assert_eq!(r.data["factor_type"], "1/2");
    assert!((r.data["decay"][0].as_f64().unwrap() - 0.5).abs() < 1e-12);
}

#[test]
fn verify_and_tree() {
    let o = amalgam(&["verify", spec("sl2z.spec").to_str().unwrap(), "--length", "5"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let o = amalgam(&["verify", spec("f2.spec").to_str().unwrap(), "--length", "3", "--free-group-example"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("1 0 1 1"));
    let o = amalgam(&["tree", spec("s4s4.spec").to_str().unwrap(), "--radius", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("[PASS] acyclic and connected"));
}

#[test]
fn exit_codes() {
    let dir = std::env::temp_dir().join(format!("amalgam-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let empty = dir.join("empty.spec");
    std::fs::write(&empty, "subgroup = \"cyclic(2)\"\n").unwrap();
    let o = amalgam(&["invariants", empty.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("factor"));

    let broken = dir.join("broken.spec");
    std::fs::write(&broken, "subgroup = [\n").unwrap();
    assert_eq!(amalgam(&["invariants", broken.to_str().unwrap()]).status.code(), Some(2));

    let big = amalgam(&["verify", spec("s4s4.spec").to_str().unwrap(), "--ball-budget", "50"]);
    assert_eq!(big.status.code(), Some(3));
    let order = amalgam(&["invariants", spec("s4s4.spec").to_str().unwrap(), "--max-order", "12"]);
    assert_eq!(order.status.code(), Some(3));

    // an impossible tolerance turns a check red
    let strict = dir.join("strict.spec");
    let text = std::fs::read_to_string(spec("sl2z.spec")).unwrap().replace("radius = 4", "radius = 4\ntolerance = 0.0");
    std::fs::write(&strict, text).unwrap();
    let o = amalgam(&["kms", strict.to_str().unwrap(), "--omega", "1,3"]);
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
    std::fs::remove_dir_all(&dir).unwrap();
}
