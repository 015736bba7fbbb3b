mod common;

use std::path::Path;
use std::process::{Command, Output};

use reidemeister::codec::{parse_certificate, serialize_certificate};

fn cli(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_reidemeister"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

#[test]
fn theorem_for_one_basis_writes_seven_certificates() {
    let tmp = tempfile::tempdir().unwrap();
    let out = cli(&["theorem", "--basis", "A"], tmp.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let dir = tmp.path().join("out/theorem/A");
    let mut names: Vec<String> = std::fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    assert_eq!(names, ["B.cert", "C.cert", "D.cert", "a.cert", "b.cert", "c.cert", "d.cert"]);
    for n in &names {
        let out = cli(&["verify", &format!("out/theorem/A/{n}")], tmp.path());
        assert_eq!(out.status.code(), Some(0));
    }
}

#[test]
fn tampered_certificate_fails_at_its_step() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(cli(&["theorem", "--basis", "A"], tmp.path()).status.code(), Some(0));
    let path = tmp.path().join("out/bridge/A_to_c.cert");
    let ok = cli(&["verify", "out/bridge/A_to_c.cert"], tmp.path());
    assert_eq!(ok.status.code(), Some(0));

    let mut cert = parse_certificate(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let d = &cert.steps[1].result;
    let c = d.crossings()[0];
    cert.steps[1].result = common::flip_crossing(d, c);
    std::fs::write(&path, serialize_certificate(&cert)).unwrap();
    let bad = cli(&["verify", "out/bridge/A_to_c.cert"], tmp.path());
    assert_eq!(bad.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("step 2"));
}

#[test]
fn derive_exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let found = cli(&["derive", "--from", "a↑", "--to", "a↑*", "--basis", "R2,d"], tmp.path());
    assert_eq!(found.status.code(), Some(0));
    let cert = parse_certificate(&String::from_utf8(found.stdout).unwrap()).unwrap();
    assert_eq!(cert.len(), 3);

    let exhausted = cli(&["derive", "--from", "a^", "--to", "a^*", "--basis", "r3-b-dn,r3-b-up"], tmp.path());
    assert_eq!(exhausted.status.code(), Some(2));
    let bounded = cli(
        &["derive", "--from", "a^", "--to", "a^*", "--basis", "R2,b", "--max-depth", "1"],
        tmp.path(),
    );
    assert_eq!(bounded.status.code(), Some(3));
    let usage = cli(&["derive", "--from", "a^"], tmp.path());
    assert_eq!(usage.status.code(), Some(1));
}

#[test]
fn mirror_and_thetas() {
    let tmp = tempfile::tempdir().unwrap();
    let thetas = cli(&["thetas"], tmp.path());
    assert_eq!(thetas.status.code(), Some(0));
    let text = std::fs::read_to_string(tmp.path().join("out/thetas.txt")).unwrap();
    assert_eq!(text.lines().count(), 16);

    assert_eq!(cli(&["lemma", "--pair", "a", "b"], tmp.path()).status.code(), Some(0));
    assert_eq!(cli(&["lemma", "--pair", "a", "C"], tmp.path()).status.code(), Some(1));
    let m = cli(&["mirror", "out/lemma/a_b.cert", "-o", "m.cert"], tmp.path());
    assert_eq!(m.status.code(), Some(0));
    let mirrored = parse_certificate(&std::fs::read_to_string(tmp.path().join("m.cert")).unwrap()).unwrap();
    // Mirror of (a, b): A is derived with B moves.
    assert_eq!(mirrored.r3_letters().iter().map(|l| l.as_char()).collect::<String>(), "B");
    assert_eq!(cli(&["verify", "m.cert"], tmp.path()).status.code(), Some(0));
}
