use std::fs;
use std::path::PathBuf;

use telechan_core::protocol::{execute, parse_protocol, sample_params, serialize_protocol, ClaimReading, ProtocolError, Step};
use telechan_core::scenarios::{self, builtin};
use telechan_core::tol;
use telechan_core::verify::{leaf_maps, ledger, no_signaling_check, verify_scenario};

fn protocols_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../protocols")
}

#[test]
fn shipped_documents_match_builtins() {
    let mut found = Vec::new();
    for entry in fs::read_dir(protocols_dir()).unwrap() {
        let path = entry.unwrap().path();
        let text = fs::read_to_string(&path).unwrap();
        let p = parse_protocol(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert_eq!(path.file_stem().unwrap().to_str().unwrap(), p.name);
        assert_eq!(p, builtin(&p.name).unwrap().protocol, "{}", p.name);
        assert_eq!(serialize_protocol(&p), text, "{} is in canonical form", p.name);
        found.push(p.name);
    }
    found.sort();
    assert_eq!(found, scenarios::names());
}

#[test]
fn w1q_document_round_trips() {
    let text = fs::read_to_string(protocols_dir().join("w-1q.json")).unwrap();
    let first = parse_protocol(&text).unwrap();
    let second = parse_protocol(&serialize_protocol(&first)).unwrap();
    assert_eq!(first, second);
}

const TWO_BELL_MEASUREMENTS: &str = r#"{
  "name": "two-bell",
  "resource": "p1",
  "alice": [3, 4, 5],
  "bob": [6],
  "input": { "family": "single", "labels": [1] },
  "steps": [
    { "op": "cnot", "control": 1, "target": 5 },
    { "op": "cnot", "control": 3, "target": 4 },
    { "op": "measure", "labels": [1, 3], "basis": "bell" },
    { "op": "measure", "labels": [4, 5], "basis": "bell" },
    { "op": "send", "bits": 1 }
  ]
}"#;

#[test]
fn two_bell_measurements_give_sixteen_leaves() {
    let p = parse_protocol(TWO_BELL_MEASUREMENTS).unwrap();
    for x in sample_params(p.input.family, 2, 3) {
        let tree = execute(&p, &x).unwrap();
        assert_eq!(tree.leaves.len(), 16);
        assert!((tree.total_probability() - 1.0).abs() < tol::PROBABILITY_SUM);
    }
}

#[test]
fn reuse_of_measured_label_names_the_step() {
    let text = TWO_BELL_MEASUREMENTS.replace(r#"{ "op": "send", "bits": 1 }"#, r#"{ "op": "h", "label": 3 }"#);
    match parse_protocol(&text) {
        Err(ProtocolError::Semantic { step: Some(step), message }) => {
            assert_eq!(step, "4");
            assert!(message.contains('3'), "{message}");
        }
        other => panic!("expected a semantic error, got {other:?}"),
    }
}

#[test]
fn corrupted_protocol_signals() {
    // an input-controlled gate on Bob's qubit makes his marginal depend on α
    let mut p = builtin("w-1q").unwrap().protocol;
    p.steps.insert(0, Step::Cnot { control: 1, target: 4 });
    let params = sample_params(p.input.family, 4, 1);
    let distances = no_signaling_check(&p, &params).unwrap();
    assert!(distances[1..].iter().all(|d| *d > 1e-3), "{distances:?}");
    assert!(distances[0] < tol::NO_SIGNALING);

    let honest = builtin("w-1q").unwrap().protocol;
    assert!(no_signaling_check(&honest, &params).unwrap().iter().all(|d| *d < tol::NO_SIGNALING));
}

#[test]
fn leaf_states_are_linear_in_the_input() {
    for name in ["w-2q", "p1-2q", "p2-2q", "p4-1q"] {
        let p = builtin(name).unwrap().protocol;
        let (maps, _) = leaf_maps(&p).unwrap();
        for x in sample_params(p.input.family, 3, 9) {
            let tree = execute(&p, &x).unwrap();
            for (leaf, map) in tree.leaves.iter().zip(&maps) {
                let (Some(map), Some(s)) = (map, &leaf.state) else { continue };
                let predicted = map.apply(&x);
                for (a, b) in s.amplitudes().iter().zip(&predicted) {
                    assert!((a * leaf.probability.sqrt() - b).norm() < 1e-12, "{name} {}", leaf.key());
                }
            }
        }
    }
}

#[test]
fn ledger_rows() {
    let reports: Vec<_> = scenarios::all().iter().map(|d| verify_scenario(&d.protocol, 4, 2).unwrap()).collect();
    let rows = ledger(&reports);
    let row = |s: &str| rows.iter().find(|r| r.scenario == s).unwrap();

    let bell = row("bell-1q");
    assert_eq!((bell.claimed, bell.status), (Some(1.0), "match"));
    assert!((bell.computed_mean - 1.0).abs() < 1e-9);

    let w = row("w-1q");
    assert_eq!((w.claimed, w.status), (Some(0.5), "MISMATCH"));
    assert!((w.computed_mean - 2.0 / 3.0).abs() < 1e-9);

    let p1 = row("p1-1q");
    assert_eq!((p1.claimed, p1.status), (Some(0.5), "match"));

    let regain = row("p1-2q/regain");
    assert_eq!(regain.reading, Some(ClaimReading::Unconditional));
    assert!((regain.computed_mean - 0.25).abs() < 1e-9);
    assert!((regain.conditional_mean.unwrap() - 1.0 / 3.0).abs() < 1e-9);

    assert!(row("p2-1q").claimed.is_none());
    let names: Vec<&str> = rows.iter().map(|r| r.scenario.as_str()).collect();
    let mut sorted = names.clone();
    sorted.sort();
    assert_eq!(names, sorted);
}

#[test]
fn bell_states_two_bits() {
    let p = builtin("bell-1q").unwrap().protocol;
    let r = verify_scenario(&p, 2, 0).unwrap();
    assert_eq!((r.cbits.stated, r.cbits.minimum), (2, 2));
}
