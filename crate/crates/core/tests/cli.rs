use std::path::PathBuf;
use std::process::Command;

use isr_workbench::cli::{run, Outcome};
use isr_workbench::lattice::{make_lattice, parse_value};
use isr_workbench::predim::worked_example;
use isr_workbench::records::{config_from_record, read_file, LatticeRecord};
use isr_workbench::reports::{CertificateRecord, CountRecord, IsogenyRecord, VerifyRecord};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name).display().to_string()
}

fn isrwb(args: &[&str]) -> Outcome {
    run(std::iter::once("isrwb").chain(args.iter().copied()))
}

/// Parses a `--format record` output and checks nothing is lost on the way back.
fn round_trip<T: Serialize + DeserializeOwned>(out: &Outcome) -> T {
    assert_eq!(out.code, 0, "{}", out.stderr);
    let rec: T = serde_json::from_str(&out.stdout).unwrap();
    let printed: Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(serde_json::to_value(&rec).unwrap(), printed);
    rec
}

#[test]
fn binary_output_is_byte_identical() {
    let bin = env!("CARGO_BIN_EXE_isrwb");
    let cases: [&[&str]; 3] = [
        &["wp", "verify", "--tau", "1/3+5/4i:-1", "--identity", "addition", "--samples", "5"],
        &["--format", "record", "lattice", "isr", "--tau1", "1/4+1i:-1", "--tau2", "-1/4+1i:-1"],
        &["count", "--heights", "3,6"],
    ];
    for args in cases {
        let runs: Vec<_> = (0..2).map(|_| Command::new(bin).args(args).output().unwrap()).collect();
        assert!(runs[0].status.success(), "{args:?}: {}", String::from_utf8_lossy(&runs[0].stderr));
        assert_eq!(runs[0].stdout, runs[1].stdout, "{args:?}");
        assert_eq!(runs[0].stderr, runs[1].stderr);
    }
}

#[test]
fn seed_changes_samples() {
    let args = |seed: &'static str| {
        isrwb(&["--seed", seed, "--format", "record", "wp", "verify", "--tau", "i", "--identity", "ode", "--samples", "3"])
    };
    let (a, b) = (args("1"), args("2"));
    assert_eq!(a.code, 0);
    assert_ne!(a.stdout, b.stdout);
    assert_eq!(a, args("1"));
}

#[test]
fn records_parse_back() {
    let l: LatticeRecord = round_trip(&isrwb(&["--format", "record", "lattice", "normalize", "--w1", "2+1i:-1", "--w2", "1+3i:-1"]));
    let want = make_lattice(parse_value("2+1i:-1", 128).unwrap(), parse_value("1+3i:-1", 128).unwrap()).unwrap();
    assert_eq!(l.to_lattice().unwrap(), want);

    let v: VerifyRecord = round_trip(&isrwb(&[
        "--format", "record", "wp", "verify", "--tau", "0.31+1.13i", "--identity", "schwarz", "--samples", "4",
    ]));
    assert_eq!((v.passed, v.failed, v.samples), (4, 0, 4));

    let i: IsogenyRecord =
        round_trip(&isrwb(&["--format", "record", "lattice", "isogenous", "--tau1", "0+1i:-1", "--tau2", "0+2i:-1"]));
    assert_eq!(i.verdict, "isogenous");

    let c: CountRecord = round_trip(&isrwb(&["--format", "record", "count", "--target", "identity", "--heights", "2,10"]));
    let confirmed: Vec<u64> = c.rows.iter().map(|r| r.confirmed).collect();
    assert_eq!(confirmed, [3, 63]);
}

#[test]
fn exit_codes() {
    let tau = |a: &str, b: &str| isrwb(&["lattice", "isr", "--tau1", a, "--tau2", b]).code;
    assert_eq!(tau("0+1i:-1", "1/2+1i:-1"), 0);
    assert_eq!(tau("0+1i:-1", "0+1i:-2"), 1);
    // two transcendental-looking values, no witness up to the bound
    assert_eq!(isrwb(&["--bound", "3", "lattice", "isogenous", "--tau1", "0.1234+1.1i", "--tau2", "0.3+1.7i"]).code, 2);

    assert_eq!(isrwb(&["predim", "strong", "--config", &data("cm_relation.json"), "--set", ""]).code, 0);
    assert_eq!(isrwb(&["lattice", "cm", "--tau", "0.1234+1.1i"]).code, 1);

    let unknown = isrwb(&["lattice", "reduce", "--tau", "i", "--bogus"]);
    assert_eq!(unknown.code, 2);
    assert!(unknown.stderr.contains("--bogus"));
    assert_eq!(isrwb(&["frobnicate"]).code, 2);
    assert_eq!(isrwb(&["--help"]).code, 0);
}

#[test]
fn errors_name_the_field() {
    let bad_slot = isrwb(&["predim", "strong", "--config", &data("cm_relation.json"), "--set", "", "--slots", "0,7"]);
    assert_eq!(bad_slot.code, 2);
    assert!(bad_slot.stderr.contains("slots"), "{}", bad_slot.stderr);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.json");
    std::fs::write(&path, r#"{"coordinates": ["x", "px"], "slots": [{"kind": "wp_cm"}], "points": []}"#).unwrap();
    let out = isrwb(&["predim", "hull", "--config", path.to_str().unwrap(), "--set", ""]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("slots[0].d"), "{}", out.stderr);

    let eps = isrwb(&["count", "--eps", "2^-x"]);
    assert!(eps.code == 2 && eps.stderr.contains("eps"), "{}", eps.stderr);
    let boundary = isrwb(&["deriv", "extend", "--presentation", &data("generic_exp.json"), "--boundary", "a"]);
    assert!(boundary.code == 2 && boundary.stderr.contains("boundary"), "{}", boundary.stderr);
    let missing = isrwb(&["predim", "hull", "--config", "/nonexistent/cfg.json", "--set", ""]);
    assert!(missing.code == 2 && missing.stderr.contains("/nonexistent/cfg.json"));
}

#[test]
fn worked_example_file_matches_the_library() {
    let from_file = config_from_record(&read_file(data("worked_example.json").as_ref()).unwrap()).unwrap();
    assert_eq!(from_file, worked_example().cfg);
    let cert: CertificateRecord = round_trip(&isrwb(&[
        "--format", "record", "predim", "certificate", "--config", &data("worked_example.json"),
        "--f1", "0", "--f2", "1", "--a", "a", "--fa", "fa",
    ]));
    assert!(cert.certified);
    assert_eq!(cert.d, [1, 1, 1, 1]);
}

#[test]
fn every_subcommand_runs() {
    let cm = data("cm_relation.json");
    let worked = data("worked_example.json");
    let cases: Vec<Vec<&str>> = vec![
        vec!["lattice", "reduce", "--tau", "3/2+1/3i:-1"],
        vec!["lattice", "cm", "--w1", "1", "--w2", "1/2+1/2i:-3"],
        vec!["wp", "invariants", "--tau", "i"],
        vec!["wp", "eval", "--tau", "i", "--z", "1/3+1/7i:-1"],
        vec!["predim", "report", "--config", &cm, "--set", "x,px"],
        vec!["predim", "hull", "--config", &cm, "--set", "x"],
        vec!["predim", "dim", "--config", &cm, "--set", "x,px"],
        vec!["predim", "chain", "--config", &cm, "--from", "", "--to", "b,e,x,px,y,py"],
        vec!["predim", "lemma7", "--config", &worked, "--a", "a,u", "--b", "fa,v,pv"],
        vec!["deriv", "extend", "--presentation", "PRES", "--boundary", "a=1"],
        vec!["deriv", "hcl", "--presentation", "PRES", "--generator", "eb"],
        vec!["selftest"],
    ];
    let pres = data("generic_exp.json");
    for case in cases {
        let args: Vec<&str> = case.iter().map(|a| if *a == "PRES" { pres.as_str() } else { a }).collect();
        let out = isrwb(&args);
        assert_eq!(out.code, 0, "{args:?}: {}{}", out.stdout, out.stderr);
        assert!(!out.stdout.is_empty());
    }
}
