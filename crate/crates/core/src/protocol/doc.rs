//! The JSON protocol-description format.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{Case, Claim, ClaimReading, FamilyKind, InputSpec, Params, Protocol, ProtocolError, Regain, Step};
use crate::channels::{make, ChannelName, ResourceState};
use crate::statevec::{BasisKind, Label, NamedGate, PureState};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProtocolDoc {
    name: String,
    resource: ResourceDoc,
    alice: Vec<Label>,
    bob: Vec<Label>,
    input: InputDoc,
    steps: Vec<StepDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    claim: Option<ClaimDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ResourceDoc {
    Catalog(String),
    Relabelled(RelabelledDoc),
    Explicit(ExplicitDoc),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RelabelledDoc {
    channel: String,
    labels: Vec<Label>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExplicitDoc {
    labels: Vec<Label>,
    amplitudes: Vec<[f64; 2]>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InputDoc {
    family: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    params: Option<Vec<[f64; 2]>>,
    labels: Vec<Label>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ClaimDoc {
    probability: f64,
    citation: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    reading: Option<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RegainDoc {
    steps: Vec<StepDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    claim: Option<ClaimDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CaseDoc {
    outcomes: Vec<String>,
    steps: Vec<StepDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "kebab-case", deny_unknown_fields)]
enum StepDoc {
    Cnot {
        control: Label,
        target: Label,
    },
    H {
        label: Label,
    },
    Gate {
        label: Label,
        gate: String,
    },
    Measure {
        labels: Vec<Label>,
        basis: String,
    },
    Send {
        bits: u32,
    },
    AbortOn {
        outcome: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        regain: Option<RegainDoc>,
    },
    When {
        cases: Vec<CaseDoc>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        otherwise: Vec<StepDoc>,
    },
}

fn to_pairs(zs: &[Complex64]) -> Vec<[f64; 2]> {
    zs.iter().map(|z| [z.re, z.im]).collect()
}

fn from_pairs(ps: &[[f64; 2]]) -> Vec<Complex64> {
    ps.iter().map(|[re, im]| Complex64::new(*re, *im)).collect()
}

fn claim_to_doc(c: &Claim) -> ClaimDoc {
    ClaimDoc { probability: c.probability, citation: c.citation.clone(), reading: c.reading.map(|r| r.as_str().to_string()) }
}

fn claim_from_doc(c: ClaimDoc) -> Result<Claim, ProtocolError> {
    let reading = match c.reading.as_deref() {
        None => None,
        Some("unconditional") => Some(ClaimReading::Unconditional),
        Some("conditional") => Some(ClaimReading::Conditional),
        Some(other) => return Err(ProtocolError::semantic(None, format!("unknown claim reading `{other}`"))),
    };
    if !(0.0..=1.0).contains(&c.probability) {
        return Err(ProtocolError::semantic(None, format!("claimed probability {} outside [0, 1]", c.probability)));
    }
    Ok(Claim { probability: c.probability, citation: c.citation, reading })
}

fn steps_to_doc(steps: &[Step]) -> Vec<StepDoc> {
    steps
        .iter()
        .map(|s| match s {
            Step::Cnot { control, target } => StepDoc::Cnot { control: *control, target: *target },
            Step::H { label } => StepDoc::H { label: *label },
            Step::Gate { label, gate } => StepDoc::Gate { label: *label, gate: gate.name().to_string() },
            Step::Measure { labels, basis } => StepDoc::Measure { labels: labels.clone(), basis: basis.name().to_string() },
            Step::Send { bits } => StepDoc::Send { bits: *bits },
            Step::AbortOn { outcome, regain } => StepDoc::AbortOn {
                outcome: outcome.clone(),
                regain: regain.as_ref().map(|r| RegainDoc { steps: steps_to_doc(&r.steps), claim: r.claim.as_ref().map(claim_to_doc) }),
            },
            Step::When { cases, otherwise } => StepDoc::When {
                cases: cases.iter().map(|c| CaseDoc { outcomes: c.outcomes.clone(), steps: steps_to_doc(&c.steps) }).collect(),
                otherwise: steps_to_doc(otherwise),
            },
        })
        .collect()
}

fn steps_from_doc(steps: Vec<StepDoc>, base: &str) -> Result<Vec<Step>, ProtocolError> {
    let at = |i: usize, e: ProtocolError| match e {
        ProtocolError::Semantic { step: None, message } => ProtocolError::Semantic { step: Some(format!("{base}{i}")), message },
        ProtocolError::State(e) => ProtocolError::Semantic { step: Some(format!("{base}{i}")), message: e.to_string() },
        other => other,
    };
    steps
        .into_iter()
        .enumerate()
        .map(|(i, s)| {
            let step = match s {
                StepDoc::Cnot { control, target } => Step::Cnot { control, target },
                StepDoc::H { label } => Step::H { label },
                StepDoc::Gate { label, gate } => {
                    let gate = NamedGate::from_name(&gate)
                        .ok_or_else(|| at(i, ProtocolError::semantic(None, format!("unknown gate `{gate}`"))))?;
                    Step::Gate { label, gate }
                }
                StepDoc::Measure { labels, basis } => {
                    Step::Measure { labels, basis: basis.parse::<BasisKind>().map_err(|e| at(i, e.into()))? }
                }
                StepDoc::Send { bits } => Step::Send { bits },
                StepDoc::AbortOn { outcome, regain } => {
                    let regain = match regain {
                        Some(r) => Some(Regain {
                            steps: steps_from_doc(r.steps, &format!("{base}{i}.regain."))?,
                            claim: r.claim.map(claim_from_doc).transpose().map_err(|e| at(i, e))?,
                        }),
                        None => None,
                    };
                    Step::AbortOn { outcome, regain }
                }
                StepDoc::When { cases, otherwise } => Step::When {
                    cases: cases
                        .into_iter()
                        .enumerate()
                        .map(|(k, c)| {
                            Ok(Case { outcomes: c.outcomes, steps: steps_from_doc(c.steps, &format!("{base}{i}.case{k}."))? })
                        })
                        .collect::<Result<_, ProtocolError>>()?,
                    otherwise: steps_from_doc(otherwise, &format!("{base}{i}.otherwise."))?,
                },
            };
            Ok(step)
        })
        .collect()
}

fn resource_to_doc(r: &ResourceState) -> ResourceDoc {
    match r.catalog_name() {
        Some(name) if r.state.labels() == name.default_labels() => ResourceDoc::Catalog(name.as_str().to_string()),
        Some(name) => ResourceDoc::Relabelled(RelabelledDoc { channel: name.as_str().to_string(), labels: r.state.labels().to_vec() }),
        None => ResourceDoc::Explicit(ExplicitDoc { labels: r.state.labels().to_vec(), amplitudes: to_pairs(r.state.amplitudes()) }),
    }
}

fn resource_from_doc(doc: ResourceDoc, alice: Vec<Label>, bob: Vec<Label>) -> Result<ResourceState, ProtocolError> {
    let r = match doc {
        ResourceDoc::Catalog(name) => make(name.parse::<ChannelName>()?),
        ResourceDoc::Relabelled(d) => make(d.channel.parse::<ChannelName>()?).relabel(&d.labels)?,
        ResourceDoc::Explicit(d) => {
            let state = PureState::normalized(d.labels, from_pairs(&d.amplitudes))?;
            return Ok(ResourceState::new("explicit", state, alice, bob)?);
        }
    };
    Ok(r.assign_parties(alice, bob)?)
}

/// Parses and validates a protocol document.
pub fn parse_protocol(text: &str) -> Result<Protocol, ProtocolError> {
    let doc: ProtocolDoc = serde_json::from_str(text).map_err(|e| ProtocolError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let resource = resource_from_doc(doc.resource, doc.alice, doc.bob)?;
    let family: FamilyKind = doc.input.family.parse()?;
    let input = InputSpec { family, labels: doc.input.labels, params: doc.input.params.map(|p| Params(from_pairs(&p))) };
    let protocol = Protocol {
        name: doc.name,
        resource,
        input,
        steps: steps_from_doc(doc.steps, "")?,
        claim: doc.claim.map(claim_from_doc).transpose()?,
    };
    protocol.validate()?;
    Ok(protocol)
}

/// Renders a protocol as a pretty-printed document that [`parse_protocol`] accepts.
pub fn serialize_protocol(p: &Protocol) -> String {
    let doc = ProtocolDoc {
        name: p.name.clone(),
        resource: resource_to_doc(&p.resource),
        alice: p.resource.alice.clone(),
        bob: p.resource.bob.clone(),
        input: InputDoc {
            family: p.input.family.name().to_string(),
            params: p.input.params.as_ref().map(|ps| to_pairs(&ps.0)),
            labels: p.input.labels.clone(),
        },
        steps: steps_to_doc(&p.steps),
        claim: p.claim.as_ref().map(claim_to_doc),
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("protocol documents always serialize");
    text.push('\n');
    text
}
