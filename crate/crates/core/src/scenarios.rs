//! The built-in teleportation scenarios.

use num_complex::Complex64;
use thiserror::Error;

use crate::channels::{make, ChannelName, ResourceState};
use crate::protocol::{Case, Claim, ClaimReading, FamilyKind, InputSpec, Params, Protocol, ProtocolError, Regain, Step};
use crate::statevec::{BasisKind, Label, PureState};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    #[error("unknown scenario `{0}`")]
    Unknown(String),
}

/// One printed table row: a measurement outcome and the state written next to it.
#[derive(Clone, Debug, PartialEq)]
pub struct ReferenceRow {
    /// The outcome as printed.
    pub printed: &'static str,
    /// Key of the leaf the row describes.
    pub key: &'static str,
    /// Whether the row describes a regain leaf.
    pub regain: bool,
    /// `(bits, parameter index or None for a constant, coefficient)`.
    pub terms: Vec<(&'static str, Option<usize>, f64)>,
}

impl ReferenceRow {
    /// The printed state at `params`, normalised, on `labels`.
    pub fn state(&self, labels: &[Label], params: &Params) -> Result<PureState, ProtocolError> {
        let dim = 1usize << labels.len();
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        for (bits, k, c) in &self.terms {
            let idx = usize::from_str_radix(bits, 2).expect("reference bits");
            amps[idx] += k.map_or(Complex64::new(1.0, 0.0), |k| params.0[k]) * c;
        }
        Ok(PureState::normalized(labels.to_vec(), amps)?)
    }

    /// E.g. `α|00⟩ − β|01⟩ − β|10⟩`.
    pub fn render(&self, family: FamilyKind) -> String {
        let names = family.param_names();
        let mut out = String::new();
        for (i, (bits, k, c)) in self.terms.iter().enumerate() {
            let sign = if *c < 0.0 { "−" } else { "+" };
            match (i, sign) {
                (0, "−") => out.push('−'),
                (0, _) => {}
                _ => out.push_str(&format!(" {sign} ")),
            }
            if let Some(k) = k {
                out.push_str(names[*k]);
            }
            out.push_str(&format!("|{bits}⟩"));
        }
        out
    }
}

/// A built-in protocol with the outcome sets and table rows it is checked against.
#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioDef {
    pub protocol: Protocol,
    pub description: &'static str,
    /// Leaf keys the reference marks as teleporting, when it lists them.
    pub expected_success: Option<Vec<String>>,
    /// Regain leaf keys the reference marks as recovering the input.
    pub expected_regain_success: Option<Vec<String>>,
    pub reference: Vec<ReferenceRow>,
}

pub const NAMES: [&str; 12] = [
    "bell-1q",
    "ghz-1q",
    "p1-1q",
    "p1-2q",
    "p2-1q",
    "p2-2q",
    "p3-1q",
    "p3-1q-bob4",
    "p4-1q",
    "w-1q",
    "w-2q",
    "w-variant-2q",
];

/// Builtin names in alphabetical order.
pub fn names() -> Vec<&'static str> {
    let mut n = NAMES.to_vec();
    n.sort_unstable();
    n
}

pub fn all() -> Vec<ScenarioDef> {
    names().into_iter().map(|n| builtin(n).expect("listed name")).collect()
}

fn cnot(control: Label, target: Label) -> Step {
    Step::Cnot { control, target }
}

fn h(label: Label) -> Step {
    Step::H { label }
}

fn measure(labels: &[Label]) -> Step {
    Step::Measure { labels: labels.to_vec(), basis: BasisKind::Computational }
}

fn measure_in(labels: &[Label], basis: BasisKind) -> Step {
    Step::Measure { labels: labels.to_vec(), basis }
}

fn send(bits: u32) -> Step {
    Step::Send { bits }
}

fn abort_on(outcome: &str) -> Step {
    Step::AbortOn { outcome: outcome.into(), regain: None }
}

fn abort_with_regain(outcome: &str, steps: Vec<Step>, claim: Option<Claim>) -> Step {
    Step::AbortOn { outcome: outcome.into(), regain: Some(Regain { steps, claim }) }
}

fn claim(probability: f64, citation: &str) -> Option<Claim> {
    Some(Claim { probability, citation: citation.into(), reading: None })
}

fn regain_claim(probability: f64, citation: &str, reading: ClaimReading) -> Option<Claim> {
    Some(Claim { probability, citation: citation.into(), reading: Some(reading) })
}

fn resource(name: ChannelName, labels: Option<&[Label]>, alice: &[Label], bob: &[Label]) -> ResourceState {
    let r = make(name);
    let r = match labels {
        Some(l) => r.relabel(l).expect("catalog relabel"),
        None => r,
    };
    r.assign_parties(alice.to_vec(), bob.to_vec()).expect("catalog partition")
}

fn protocol(name: &str, resource: ResourceState, family: FamilyKind, input: &[Label], steps: Vec<Step>, claim: Option<Claim>) -> Protocol {
    Protocol { name: name.into(), resource, input: InputSpec { family, labels: input.to_vec(), params: None }, steps, claim }
}

fn keys(ks: &[&str]) -> Option<Vec<String>> {
    Some(ks.iter().map(|k| k.to_string()).collect())
}

fn row(printed: &'static str, key: &'static str, regain: bool, terms: &[(&'static str, Option<usize>, f64)]) -> ReferenceRow {
    ReferenceRow { printed, key, regain, terms: terms.to_vec() }
}

/// Nonmax family rows `α|00⟩ ± β(|01⟩ + |10⟩)` and the constant `|00⟩`.
fn nonmax_row(printed: &'static str, key: &'static str, regain: bool, alpha: f64, beta: f64) -> ReferenceRow {
    row(printed, key, regain, &[("00", Some(0), alpha), ("01", Some(1), beta), ("10", Some(1), beta)])
}

fn w2q_steps(with_regain: bool) -> Vec<Step> {
    let first_abort = if with_regain {
        abort_with_regain(
            "0",
            vec![h(5), measure(&[4, 5]), send(1)],
            regain_claim(0.5, "W channel, two-qubit input: recovery after failure", ClaimReading::Conditional),
        )
    } else {
        abort_with_regain("0", vec![h(5), measure(&[4, 5]), send(1)], None)
    };
    vec![cnot(2, 3), cnot(1, 3), measure(&[3]), first_abort, h(1), measure(&[2]), abort_on("1"), measure(&[1]), send(1)]
}

pub fn builtin(name: &str) -> Result<ScenarioDef, ScenarioError> {
    use FamilyKind::*;
    let def = match name {
        "bell-1q" => ScenarioDef {
            protocol: protocol(
                name,
                resource(ChannelName::Bell, None, &[2], &[3]),
                Single,
                &[1],
                vec![cnot(1, 2), h(1), measure(&[1, 2]), send(2)],
                claim(1.0, "Bell channel illustration: deterministic"),
            ),
            description: "single qubit through a Bell pair",
            expected_success: keys(&["00", "01", "10", "11"]),
            expected_regain_success: None,
            reference: Vec::new(),
        },
        "ghz-1q" => ScenarioDef {
            protocol: protocol(
                name,
                resource(ChannelName::Ghz3, None, &[2, 3], &[4]),
                Single,
                &[1],
                vec![cnot(1, 2), h(3), h(1), measure(&[1, 2, 3]), send(3)],
                claim(1.0, "GHZ channel remark: deterministic"),
            ),
            description: "single qubit through a three-qubit GHZ state",
            expected_success: None,
            expected_regain_success: None,
            reference: Vec::new(),
        },
        "w-1q" => ScenarioDef {
            protocol: protocol(
                name,
                resource(ChannelName::W3, None, &[2, 3], &[4]),
                Single,
                &[1],
                vec![cnot(1, 2), h(1), measure(&[1, 2, 3]), send(3)],
                claim(0.5, "W channel, single-qubit input"),
            ),
            description: "single qubit through a three-qubit W state",
            expected_success: keys(&["000", "010", "100", "110"]),
            expected_regain_success: None,
            reference: Vec::new(),
        },
        "w-2q" => ScenarioDef {
            protocol: protocol(
                name,
                resource(ChannelName::W3, Some(&[3, 4, 5]), &[3], &[4, 5]),
                TwoQubitNonmax,
                &[1, 2],
                w2q_steps(true),
                claim(0.25, "W channel, two-qubit non-maximally entangled input"),
            ),
            description: "two-qubit non-maximally entangled state through a W state, with regain",
            expected_success: keys(&["1/0/0", "1/0/1"]),
            expected_regain_success: keys(&["00", "01"]),
            reference: vec![
                nonmax_row("|0⟩", "1/0/0", false, 1.0, 1.0),
                nonmax_row("|1⟩", "1/0/1", false, 1.0, -1.0),
                nonmax_row("|00⟩", "00", true, 1.0, 1.0),
                nonmax_row("|01⟩", "01", true, -1.0, 1.0),
                row("|11⟩", "11", true, &[("00", None, 1.0)]),
                row("|10⟩", "10", true, &[("00", None, 1.0)]),
            ],
        },
        "w-variant-2q" => ScenarioDef {
            protocol: protocol(
                name,
                resource(ChannelName::W3Variant, Some(&[3, 4, 5]), &[3], &[4, 5]),
                TwoQubitNonmaxVariant,
                &[1, 2],
                w2q_steps(false),
                None,
            ),
            description: "variant W state with the matching two-qubit input, same steps as w-2q",
            expected_success: None,
            expected_regain_success: None,
            reference: Vec::new(),
        },
        "p1-1q" => ScenarioDef {
            protocol: protocol(
                name,
                resource(ChannelName::P1, None, &[3, 4, 5], &[6]),
                Single,
                &[1],
                vec![
                    cnot(1, 5),
                    cnot(3, 4),
                    measure_in(&[1, 3], BasisKind::Bell),
                    measure_in(&[4, 5], BasisKind::Bell),
                    send(1),
                ],
                claim(0.5, "P1 channel, single-qubit input"),
            ),
            description: "single qubit through P1 with two Bell measurements",
            expected_success: keys(&["Φ+/Φ+", "Φ+/Φ-", "Φ-/Φ+", "Φ-/Φ-", "Ψ+/Ψ+", "Ψ+/Ψ-", "Ψ-/Ψ+", "Ψ-/Ψ-"]),
            expected_regain_success: None,
            reference: Vec::new(),
        },
        "p1-2q" => ScenarioDef {
            protocol: protocol(
                name,
                resource(ChannelName::P1, None, &[3, 4], &[5, 6]),
                TwoQubitNonmax,
                &[1, 2],
                vec![
                    cnot(1, 4),
                    cnot(2, 4),
                    cnot(3, 4),
                    measure(&[4]),
                    abort_with_regain(
                        "0",
                        vec![measure(&[3]), abort_on("1"), send(1), h(6), measure(&[5, 6]), send(1)],
                        regain_claim(0.25, "P1 channel, two-qubit input: recovery after failure", ClaimReading::Unconditional),
                    ),
                    h(2),
                    measure(&[1, 2, 3]),
                    send(3),
                ],
                None,
            ),
            description: "two-qubit non-maximally entangled state through P1, with regain",
            expected_success: keys(&["1/000", "1/010"]),
            expected_regain_success: keys(&["0/00", "0/01"]),
            reference: vec![
                nonmax_row("|000⟩", "1/000", false, 1.0, 1.0),
                nonmax_row("|010⟩", "1/010", false, 1.0, -1.0),
                nonmax_row("|00⟩", "0/00", true, 1.0, 1.0),
                nonmax_row("|01⟩", "0/01", true, -1.0, 1.0),
                row("|00⟩", "0/11", true, &[("00", None, 1.0)]),
                row("|00⟩", "0/10", true, &[("00", None, 1.0)]),
            ],
        },
        "p2-1q" => ScenarioDef {
            protocol: protocol(
                name,
                resource(ChannelName::P2, None, &[3, 4, 5], &[6]),
                Single,
                &[1],
                vec![cnot(1, 4), h(1), measure(&[3]), abort_on("1"), measure(&[4]), measure(&[1, 5]), send(2)],
                None,
            ),
            description: "single qubit through P2",
            expected_success: None,
            expected_regain_success: None,
            reference: Vec::new(),
        },
        "p2-2q" => {
            let sym = |printed, key, a00: f64, a11: f64, g01: f64, g10: f64| {
                row(printed, key, false, &[("00", Some(0), a00), ("11", Some(0), a11), ("01", Some(1), g01), ("10", Some(1), g10)])
            };
            ScenarioDef {
                protocol: protocol(
                    name,
                    resource(ChannelName::P2, None, &[3, 4], &[5, 6]),
                    TwoQubitSymmetric,
                    &[1, 2],
                    vec![
                        cnot(1, 4),
                        cnot(2, 4),
                        measure(&[4]),
                        measure(&[3]),
                        abort_on("1"),
                        Step::When {
                            cases: vec![
                                Case { outcomes: vec!["0".into(), "0".into()], steps: vec![measure_in(&[1, 2], BasisKind::PlusMinus), send(2)] },
                                Case { outcomes: vec!["1".into(), "0".into()], steps: vec![h(2), measure(&[1, 2]), send(2)] },
                            ],
                            otherwise: Vec::new(),
                        },
                    ],
                    None,
                ),
                description: "symmetric two-qubit state through P2 with outcome-dependent continuation",
                expected_success: None,
                expected_regain_success: None,
                reference: vec![
                    sym("Φ1", "0/0/++", 1.0, 1.0, 1.0, 1.0),
                    sym("Φ2", "0/0/-+", 1.0, -1.0, 1.0, -1.0),
                    sym("Φ3", "0/0/--", 1.0, 1.0, -1.0, -1.0),
                    sym("Φ4", "0/0/+-", 1.0, -1.0, -1.0, 1.0),
                ],
            }
        }
        "p3-1q" => ScenarioDef {
            protocol: protocol(
                name,
                resource(ChannelName::P3, None, &[3, 4, 5], &[6]),
                Single,
                &[1],
                vec![cnot(1, 3), cnot(1, 4), h(1), measure(&[1, 3, 4, 5]), send(4)],
                claim(1.0 / 3.0, "P3 channel, single-qubit input"),
            ),
            description: "single qubit through P3, Bob holding qubit 6",
            expected_success: keys(&["0000", "1000", "0011", "1011"]),
            expected_regain_success: None,
            reference: Vec::new(),
        },
        "p3-1q-bob4" => ScenarioDef {
            protocol: protocol(
                name,
                resource(ChannelName::P3, None, &[3, 5, 6], &[4]),
                Single,
                &[1],
                vec![cnot(1, 3), cnot(1, 6), h(1), measure(&[1, 3, 5, 6]), send(4)],
                claim(1.0 / 3.0, "P3 channel, single-qubit input"),
            ),
            description: "single qubit through P3, Bob holding qubit 4",
            expected_success: None,
            expected_regain_success: None,
            reference: Vec::new(),
        },
        "p4-1q" => ScenarioDef {
            protocol: protocol(
                name,
                resource(ChannelName::P4, None, &[3, 4, 5], &[6]),
                Single,
                &[1],
                vec![cnot(1, 5), h(1), measure(&[1]), abort_on("0"), measure(&[3, 4, 5]), send(3)],
                None,
            ),
            description: "single qubit through P4",
            expected_success: None,
            expected_regain_success: None,
            reference: Vec::new(),
        },
        other => return Err(ScenarioError::Unknown(other.to_string())),
    };
    Ok(def)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::execute;
    use crate::protocol::sample_params;

    #[test]
    fn all_builtins_validate() {
        let defs = all();
        assert_eq!(defs.len(), 12);
        for d in &defs {
            d.protocol.validate().unwrap_or_else(|e| panic!("{}: {e}", d.protocol.name));
        }
        let listed: Vec<&str> = defs.iter().map(|d| d.protocol.name.as_str()).collect();
        let mut sorted = listed.clone();
        sorted.sort_unstable();
        assert_eq!(listed, sorted);
        assert!(builtin("w-3q").is_err());
    }

    #[test]
    fn leaf_counts() {
        let x = &sample_params(FamilyKind::Single, 0, 0)[4];
        assert_eq!(execute(&builtin("w-1q").unwrap().protocol, x).unwrap().leaves.len(), 8);
        assert_eq!(execute(&builtin("p1-1q").unwrap().protocol, x).unwrap().leaves.len(), 16);
        assert_eq!(builtin("bell-1q").unwrap().protocol.stated_cbits(), 2);
    }

    #[test]
    fn reference_rows_render() {
        let d = builtin("w-2q").unwrap();
        assert_eq!(d.reference[1].render(FamilyKind::TwoQubitNonmax), "α|00⟩ − β|01⟩ − β|10⟩");
        assert_eq!(d.reference[4].render(FamilyKind::TwoQubitNonmax), "|00⟩");
    }
}
