use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use circle_ergodic::exact::CirclePoint;
use circle_ergodic::io::{load_json, save_json, RunManifest};
use circle_ergodic::measure::{CircleMeasure, CylinderSpec};
use circle_ergodic::partition::ConsistentFamily;
use circle_ergodic::pl::PLCircleMap;
use circle_ergodic::shred::TrappingReport;
use circle_ergodic::q;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_circle-ergodic"))
}

fn run(out: &Path, args: &[&str]) -> Output {
    bin().arg("--out-dir").arg(out).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write<T: serde::Serialize>(dir: &Path, name: &str, value: &T) -> PathBuf {
    let p = dir.join(name);
    save_json(&p, value).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn rotation_of_two_fifths() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "rot.json", &PLCircleMap::rotation(&q!(2, 5)));
    let out = dir.path().join("out");
    let o = run(&out, &["rotation", s(&m)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("rotation 2/5 period 5"), "{}", stdout(&o));
    let manifest: RunManifest = load_json(&out.join("manifest.json")).unwrap();
    assert_eq!(manifest.command, "rotation");
    assert_eq!(manifest.outputs, vec!["rotation.json", "manifest.json"]);
}

#[test]
fn lebesgue_is_invariant_under_doubling() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "e2.json", &PLCircleMap::expanding(2).unwrap());
    let mu = write(dir.path(), "leb.json", &CircleMeasure::lebesgue());
    let out = dir.path().join("out");
    let o = run(&out, &["pushforward", s(&m), s(&mu), "--iters", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("equals input true"));
    let back: CircleMeasure = load_json(&out.join("measure.json")).unwrap();
    assert_eq!(back, CircleMeasure::lebesgue());
}

#[test]
fn demo_has_eight_regions() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = run(&out, &["demo", "--figure3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("trapping regions 8"));
    let report: TrappingReport = load_json(&out.join("report.json")).unwrap();
    assert_eq!(report.regions.len(), 8);
    assert!(report.verification.as_ref().unwrap().all_passed());

    // the written map and report verify again from disk
    let o = run(&dir.path().join("v"), &["verify", s(&out.join("shredded.json")), s(&out.join("report.json"))]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn verify_fails_against_the_wrong_map() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    assert_eq!(run(&out, &["demo", "--figure3"]).status.code(), Some(0));
    let id = write(dir.path(), "id.json", &PLCircleMap::identity());
    let o = run(&dir.path().join("v"), &["verify", s(&id), s(&out.join("report.json"))]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn wicked_outputs_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let h = write(dir.path(), "id.json", &PLCircleMap::identity());
    let out = dir.path().join("out");
    let o = run(&out, &["wicked", s(&h), "--preset", "bernoulli:1/3,2/3", "--p", "2", "--eps", "1/3", "--n", "8"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let fam: ConsistentFamily = load_json(&out.join("family.json")).unwrap();
    assert!(fam.consistency_check().is_ok());
    let target: CylinderSpec = load_json(&out.join("target.json")).unwrap();
    assert_eq!(target, CylinderSpec::bernoulli(&[q!(1, 3), q!(2, 3)], 2).unwrap());
    let hp: PLCircleMap = load_json(&out.join("conjugator.json")).unwrap();
    assert!(hp.is_orientation_preserving_homeo());

    // the family file feeds classify
    let o = run(&dir.path().join("c"), &["classify", "--conjugate", s(&out.join("family.json")), "--grid", "20", "--horizons", "50,200"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        assert_eq!(run(out, &["--seed", "7", "demo", "--random"]).status.code(), Some(0));
    }
    let mut names: Vec<_> = fs::read_dir(&a).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert!(names.len() >= 5);
    for name in names {
        assert_eq!(fs::read(a.join(&name)).unwrap(), fs::read(b.join(&name)).unwrap(), "{name:?}");
    }
}

#[test]
fn classify_identity() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "id.json", &PLCircleMap::identity());
    let out = dir.path().join("out");
    let o = run(&out, &["classify", s(&m), "--grid", "32", "--horizons", "10,100"]);
    assert_eq!(o.status.code(), Some(0));
    let text = fs::read_to_string(out.join("verdicts.csv")).unwrap();
    assert!(text.lines().any(|l| l.starts_with("wholesome,witnessed")), "{text}");
    assert!(text.lines().any(|l| l.starts_with("wonderful,refuted")), "{text}");
    assert_eq!(fs::read_to_string(out.join("gaps.csv")).unwrap().lines().count(), 33);
}

#[test]
fn bad_input_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let junk = dir.path().join("junk.json");
    fs::write(&junk, "{ not json").unwrap();
    let out = dir.path().join("out");
    assert_eq!(run(&out, &["rotation", s(&junk)]).status.code(), Some(2));
    assert_eq!(run(&out, &["rotation", s(&dir.path().join("missing.json"))]).status.code(), Some(2));
    let m = write(dir.path(), "e2.json", &PLCircleMap::expanding(2).unwrap());
    assert_eq!(run(&out, &["rotation", s(&m)]).status.code(), Some(2));
    assert_eq!(run(&out, &["shred", s(&m), "--eps", "x/y"]).status.code(), Some(2));
}

#[test]
fn resource_cap_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "e3.json", &PLCircleMap::expanding(3).unwrap());
    let mu = write(dir.path(), "dirac.json", &CircleMeasure::dirac(CirclePoint::from_lift(&q!(1, 7))));
    let out = dir.path().join("out");
    let o = run(&out, &["--max-breakpoints", "1", "pushforward", s(&m), s(&mu)]);
    assert_eq!(o.status.code(), Some(0));
    let h = PLCircleMap::new(vec![q!(0), q!(1, 2), q!(1)], vec![q!(0), q!(3, 4), q!(1)]).unwrap();
    let m = write(dir.path(), "h.json", &h);
    let leb = write(dir.path(), "leb.json", &CircleMeasure::lebesgue());
    let o = run(&out, &["--max-breakpoints", "3", "pushforward", s(&m), s(&leb), "--iters", "6"]);
    assert_eq!(o.status.code(), Some(3), "{}", stdout(&o));

    let id = write(dir.path(), "id.json", &PLCircleMap::identity());
    let o = run(&out, &["wicked", s(&id), "--preset", "lebesgue", "--eps", "1/2", "--n", "40"]);
    assert_eq!(o.status.code(), Some(3));
}
