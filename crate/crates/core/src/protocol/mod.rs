//! Teleportation protocols as ordered step lists, and their branch-by-branch execution.

mod doc;
mod execute;
mod family;

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

pub use doc::{parse_protocol, serialize_protocol};
pub use execute::{execute, execute_input, BranchTree, ExecOptions, Leaf, LeafStatus, OutcomeRecord};
pub use family::{sample_params, FamilyKind, Params};
pub(crate) use execute::record_key;

use crate::channels::{ChannelError, ResourceState};
use crate::statevec::{BasisKind, Label, NamedGate, PureState, StateError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProtocolError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("{}", match step { Some(s) => format!("step {s}: {message}"), None => message.clone() })]
    Semantic { step: Option<String>, message: String },
    #[error("parameters violate the {family} constraint (residual {residual:e})")]
    Constraint { family: String, residual: f64 },
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
}

impl ProtocolError {
    pub(crate) fn semantic(step: Option<String>, message: impl Into<String>) -> Self {
        ProtocolError::Semantic { step, message: message.into() }
    }
}

/// A stated success probability with its source.
#[derive(Clone, Debug, PartialEq)]
pub struct Claim {
    pub probability: f64,
    pub citation: String,
    /// For regain claims: whether the number is read relative to the aborted branch.
    pub reading: Option<ClaimReading>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClaimReading {
    /// Probability over all runs of the protocol.
    Unconditional,
    /// Probability given that the main protocol did not teleport.
    Conditional,
}

impl ClaimReading {
    pub fn as_str(self) -> &'static str {
        match self {
            ClaimReading::Unconditional => "unconditional",
            ClaimReading::Conditional => "conditional",
        }
    }
}

/// Steps run on an aborted leaf to recover the input state onto its original labels.
#[derive(Clone, Debug, PartialEq)]
pub struct Regain {
    pub steps: Vec<Step>,
    pub claim: Option<Claim>,
}

/// One arm of a `when` step: taken when the most recent outcomes equal `outcomes` (oldest first).
#[derive(Clone, Debug, PartialEq)]
pub struct Case {
    pub outcomes: Vec<String>,
    pub steps: Vec<Step>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Step {
    Cnot { control: Label, target: Label },
    H { label: Label },
    Gate { label: Label, gate: NamedGate },
    Measure { labels: Vec<Label>, basis: BasisKind },
    Send { bits: u32 },
    /// Stops the branch when the latest outcome equals `outcome`.
    AbortOn { outcome: String, regain: Option<Regain> },
    /// Continues with the first matching case, or `otherwise`.
    When { cases: Vec<Case>, otherwise: Vec<Step> },
}

impl Step {
    fn contains_send(&self) -> bool {
        match self {
            Step::Send { .. } => true,
            Step::When { cases, otherwise } => {
                cases.iter().flat_map(|c| &c.steps).chain(otherwise).any(Step::contains_send)
            }
            _ => false,
        }
    }
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |ls: &[Label]| ls.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(",");
        match self {
            Step::Cnot { control, target } => write!(f, "cnot({control}→{target})"),
            Step::H { label } => write!(f, "h({label})"),
            Step::Gate { label, gate } => write!(f, "{}({label})", gate.name().to_lowercase()),
            Step::Measure { labels, basis } => write!(f, "measure(({}), {basis})", join(labels)),
            Step::Send { bits } => write!(f, "send({bits})"),
            Step::AbortOn { outcome, regain } => {
                write!(f, "abort-on \"{outcome}\"")?;
                if regain.is_some() {
                    f.write_str(" [regain]")?;
                }
                Ok(())
            }
            Step::When { cases, otherwise } => {
                let arms: Vec<String> = cases.iter().map(|c| format!("({})", c.outcomes.join(","))).collect();
                write!(f, "when {}", arms.join(" | "))?;
                if !otherwise.is_empty() {
                    f.write_str(" | otherwise")?;
                }
                Ok(())
            }
        }
    }
}

/// Which unknown state is attached, and where.
#[derive(Clone, Debug, PartialEq)]
pub struct InputSpec {
    pub family: FamilyKind,
    pub labels: Vec<Label>,
    /// A default parameter point carried by a document.
    pub params: Option<Params>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Protocol {
    pub name: String,
    pub resource: ResourceState,
    pub input: InputSpec,
    pub steps: Vec<Step>,
    pub claim: Option<Claim>,
}

impl Protocol {
    pub fn bob(&self) -> &[Label] {
        &self.resource.bob
    }

    pub fn alice(&self) -> &[Label] {
        &self.resource.alice
    }

    /// The input state re-expressed on Bob's labels.
    pub fn target(&self, params: &Params) -> Result<PureState, ProtocolError> {
        self.input.family.state(self.bob(), params)
    }

    /// The input state on its original labels (what a regain must recover).
    pub fn regain_target(&self, params: &Params) -> Result<PureState, ProtocolError> {
        self.input.family.state(&self.input.labels, params)
    }

    /// Input ⊗ resource at `params`.
    pub fn initial_state(&self, params: &Params) -> Result<PureState, ProtocolError> {
        let input = self.input.family.state(&self.input.labels, params)?;
        Ok(input.tensor(&self.resource.state)?)
    }

    /// The same protocol cut after the first `len` top-level steps.
    pub fn prefix(&self, len: usize) -> Protocol {
        Protocol { steps: self.steps[..len].to_vec(), claim: None, ..self.clone() }
    }

    /// Number of top-level steps before the first classical send.
    pub fn pre_send_len(&self) -> usize {
        self.steps.iter().position(Step::contains_send).unwrap_or(self.steps.len())
    }

    /// Bits announced by send steps along the main path (maximum over `when` arms).
    pub fn stated_cbits(&self) -> u32 {
        stated_bits(&self.steps)
    }

    pub fn regains(&self) -> Vec<&Regain> {
        let mut out = Vec::new();
        collect_regains(&self.steps, &mut out);
        out
    }

    /// Structural checks: label existence and ownership, measured-label reuse,
    /// basis arity, and that abort/when outcomes name real outcomes.
    pub fn validate(&self) -> Result<(), ProtocolError> {
        let family = self.input.family;
        if self.input.labels.len() != family.arity() {
            return Err(ProtocolError::semantic(
                None,
                format!("input family {family} needs {} labels, got {:?}", family.arity(), self.input.labels),
            ));
        }
        if let Some(p) = &self.input.params {
            family.check(p)?;
        }
        let resource: BTreeSet<Label> = self.resource.state.labels().iter().copied().collect();
        let input: BTreeSet<Label> = self.input.labels.iter().copied().collect();
        if input.len() != self.input.labels.len() || !input.is_disjoint(&resource) {
            return Err(StateError::LabelConflict(self.input.labels.clone()).into());
        }
        if self.bob().len() != family.arity() {
            return Err(ProtocolError::semantic(
                None,
                format!("Bob holds {:?} but the {family} state needs {} qubits", self.bob(), family.arity()),
            ));
        }
        let live: BTreeSet<Label> = input.union(&resource).copied().collect();
        let alice: BTreeSet<Label> = self.alice().iter().copied().chain(input.iter().copied()).collect();
        let ctx = Checker { alice, holder: input, in_regain: false };
        ctx.walk(&[(&self.steps, 0, String::new())], live, Vec::new())
    }
}

fn stated_bits(steps: &[Step]) -> u32 {
    steps
        .iter()
        .map(|s| match s {
            Step::Send { bits } => *bits,
            Step::When { cases, otherwise } => {
                cases.iter().map(|c| stated_bits(&c.steps)).chain([stated_bits(otherwise)]).max().unwrap_or(0)
            }
            _ => 0,
        })
        .sum()
}

fn collect_regains<'a>(steps: &'a [Step], out: &mut Vec<&'a Regain>) {
    for s in steps {
        match s {
            Step::AbortOn { regain: Some(r), .. } => out.push(r),
            Step::When { cases, otherwise } => {
                for c in cases {
                    collect_regains(&c.steps, out);
                }
                collect_regains(otherwise, out);
            }
            _ => {}
        }
    }
}

struct Checker {
    alice: BTreeSet<Label>,
    holder: BTreeSet<Label>,
    in_regain: bool,
}

impl Checker {
    fn allowed(&self, label: Label) -> bool {
        if self.in_regain {
            !self.holder.contains(&label)
        } else {
            self.alice.contains(&label)
        }
    }

    fn use_label(&self, path: &str, label: Label, live: &BTreeSet<Label>) -> Result<(), ProtocolError> {
        if !live.contains(&label) {
            return Err(ProtocolError::semantic(Some(path.into()), format!("label {label} is not available (unknown or already measured)")));
        }
        if !self.allowed(label) {
            let who = if self.in_regain { "the regain holder" } else { "Bob" };
            return Err(ProtocolError::semantic(Some(path.into()), format!("label {label} belongs to {who}")));
        }
        Ok(())
    }

    /// `program` is a stack of (steps, first index, path prefix) frames, innermost last.
    /// `history` holds the outcome names of every measurement on this path.
    fn walk(&self, program: &[Frame<'_>], mut live: BTreeSet<Label>, mut history: Vec<Vec<String>>) -> Result<(), ProtocolError> {
        let Some(((steps, start, base), outer)) = program.split_last() else { return Ok(()) };
        for (i, step) in steps.iter().enumerate().skip(*start) {
            let path = format!("{base}{i}");
            match step {
                Step::Cnot { control, target } => {
                    if control == target {
                        return Err(ProtocolError::semantic(Some(path), "control and target coincide"));
                    }
                    self.use_label(&path, *control, &live)?;
                    self.use_label(&path, *target, &live)?;
                }
                Step::H { label } | Step::Gate { label, .. } => self.use_label(&path, *label, &live)?,
                Step::Measure { labels, basis } => {
                    let distinct: BTreeSet<Label> = labels.iter().copied().collect();
                    if labels.is_empty() || distinct.len() != labels.len() {
                        return Err(ProtocolError::semantic(Some(path), "measured labels must be non-empty and distinct"));
                    }
                    for l in labels {
                        self.use_label(&path, *l, &live)?;
                    }
                    if let Some(required) = basis.fixed_arity() {
                        if required != labels.len() {
                            return Err(ProtocolError::semantic(Some(path), format!("{basis} basis needs {required} labels")));
                        }
                    }
                    for l in labels {
                        live.remove(l);
                    }
                    history.push(basis.outcome_names(labels.len()));
                }
                Step::Send { .. } => {}
                Step::AbortOn { outcome, regain } => {
                    let Some(last) = history.last() else {
                        return Err(ProtocolError::semantic(Some(path), "abort-on before any measurement"));
                    };
                    if !last.contains(outcome) {
                        return Err(ProtocolError::semantic(Some(path), format!("`{outcome}` is not an outcome of the preceding measurement")));
                    }
                    if let Some(r) = regain {
                        if self.in_regain {
                            return Err(ProtocolError::semantic(Some(path), "nested regain"));
                        }
                        if !self.holder.iter().all(|l| live.contains(l)) {
                            return Err(ProtocolError::semantic(Some(path), "regain needs the input labels unmeasured"));
                        }
                        let sub = Checker { alice: self.alice.clone(), holder: self.holder.clone(), in_regain: true };
                        sub.walk(&[(&r.steps, 0, format!("{path}.regain."))], live.clone(), Vec::new())?;
                    }
                }
                Step::When { cases, otherwise } => {
                    let mut rest: Vec<Frame<'_>> = outer.to_vec();
                    rest.push((steps, i + 1, base.clone()));
                    for (k, case) in cases.iter().enumerate() {
                        let path = format!("{path}.case{k}");
                        if case.outcomes.is_empty() || case.outcomes.len() > history.len() {
                            return Err(ProtocolError::semantic(Some(path), "a case must match between one and all prior measurements"));
                        }
                        let recent = &history[history.len() - case.outcomes.len()..];
                        for (o, names) in case.outcomes.iter().zip(recent) {
                            if !names.contains(o) {
                                return Err(ProtocolError::semantic(Some(path), format!("`{o}` is not a possible outcome")));
                            }
                        }
                        let mut stack = rest.clone();
                        stack.push((&case.steps, 0, format!("{path}.")));
                        self.walk(&stack, live.clone(), history.clone())?;
                    }
                    let mut stack = rest;
                    stack.push((otherwise, 0, format!("{path}.otherwise.")));
                    return self.walk(&stack, live, history);
                }
            }
        }
        self.walk(outer, live, history)
    }
}

type Frame<'a> = (&'a [Step], usize, String);
