use std::fmt;

use super::{Params, Protocol, ProtocolError, Step};
use crate::statevec::{BasisKind, Label, PureState};

/// One measurement result along a branch.
#[derive(Clone, Debug, PartialEq)]
pub struct OutcomeRecord {
    pub labels: Vec<Label>,
    pub basis: BasisKind,
    pub outcome: String,
}

impl fmt::Display for OutcomeRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels: Vec<String> = self.labels.iter().map(|l| l.to_string()).collect();
        write!(f, "{}@{}", self.outcome, labels.join(","))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LeafStatus {
    /// Ran to the end of the step list.
    Completed,
    /// Stopped by an abort-on step.
    Aborted,
}

/// A fully expanded branch.
#[derive(Clone, Debug, PartialEq)]
pub struct Leaf {
    pub record: Vec<OutcomeRecord>,
    /// Unconditional probability of this branch.
    pub probability: f64,
    /// Bob's state (completed leaves) or the residual register (aborted leaves).
    /// `None` when the branch has zero probability at this parameter point.
    pub state: Option<PureState>,
    pub cbits: u32,
    pub status: LeafStatus,
    /// Leaves of the regain sub-protocol, when one ran on this aborted leaf.
    pub regain: Vec<Leaf>,
}

impl Leaf {
    /// Outcomes joined with `/`, e.g. `1/0/1`.
    pub fn key(&self) -> String {
        record_key(&self.record)
    }
}

pub(crate) fn record_key(record: &[OutcomeRecord]) -> String {
    record.iter().map(|r| r.outcome.as_str()).collect::<Vec<_>>().join("/")
}

/// Every branch of one execution, in basis order at each measurement.
#[derive(Clone, Debug, PartialEq)]
pub struct BranchTree {
    pub leaves: Vec<Leaf>,
}

impl BranchTree {
    pub fn total_probability(&self) -> f64 {
        self.leaves.iter().map(|l| l.probability).sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExecOptions {
    /// Run regain sub-protocols on aborted leaves.
    pub run_regain: bool,
    /// Measure leftover Alice labels and reduce completed leaves to Bob's labels.
    pub finalize: bool,
}

impl Default for ExecOptions {
    fn default() -> Self {
        ExecOptions { run_regain: true, finalize: true }
    }
}

/// Runs `p` on its input family at `params`.
pub fn execute(p: &Protocol, params: &Params) -> Result<BranchTree, ProtocolError> {
    let initial = p.initial_state(params)?;
    execute_input(p, &initial, ExecOptions::default())
}

/// Runs the steps of `p` starting from an explicit register state.
pub fn execute_input(p: &Protocol, initial: &PureState, opts: ExecOptions) -> Result<BranchTree, ProtocolError> {
    let runner = Runner { bob: p.bob(), holder: &p.input.labels, opts };
    let node = Node { state: Some(initial.clone()), labels: initial.labels().to_vec(), probability: 1.0, record: Vec::new(), cbits: 0 };
    let mut leaves = Vec::new();
    runner.run(vec![(&p.steps, 0)], node, false, &mut leaves)?;
    Ok(BranchTree { leaves })
}

#[derive(Clone)]
struct Node {
    state: Option<PureState>,
    labels: Vec<Label>,
    probability: f64,
    record: Vec<OutcomeRecord>,
    cbits: u32,
}

impl Node {
    /// Children for every basis outcome, vanished ones included.
    fn branch(&self, labels: &[Label], basis: BasisKind) -> Result<Vec<Node>, ProtocolError> {
        let mb = basis.build(labels.len())?;
        let remaining: Vec<Label> = self.labels.iter().copied().filter(|l| !labels.contains(l)).collect();
        let mut children = Vec::with_capacity(mb.len());
        for k in 0..mb.len() {
            let (probability, state) = match &self.state {
                Some(s) => {
                    let proj = s.project(labels, &mb, k)?;
                    match proj.state {
                        Some(post) => (self.probability * proj.probability, Some(post)),
                        None => (0.0, None),
                    }
                }
                None => (0.0, None),
            };
            let mut record = self.record.clone();
            record.push(OutcomeRecord { labels: labels.to_vec(), basis, outcome: mb.outcome(k).to_string() });
            children.push(Node { state, labels: remaining.clone(), probability, record, cbits: self.cbits });
        }
        Ok(children)
    }
}

struct Runner<'a> {
    bob: &'a [Label],
    holder: &'a [Label],
    opts: ExecOptions,
}

impl<'a> Runner<'a> {
    fn run(&self, mut program: Vec<(&'a [Step], usize)>, mut node: Node, in_regain: bool, out: &mut Vec<Leaf>) -> Result<(), ProtocolError> {
        while let Some((steps, start)) = program.pop() {
            for (i, step) in steps.iter().enumerate().skip(start) {
                match step {
                    Step::Cnot { control, target } => {
                        if let Some(s) = &node.state {
                            node.state = Some(s.apply_cnot(*control, *target)?);
                        }
                    }
                    Step::H { label } => {
                        if let Some(s) = &node.state {
                            node.state = Some(s.apply_gate(*label, crate::statevec::NamedGate::H)?);
                        }
                    }
                    Step::Gate { label, gate } => {
                        if let Some(s) = &node.state {
                            node.state = Some(s.apply_gate(*label, *gate)?);
                        }
                    }
                    Step::Measure { labels, basis } => {
                        for child in node.branch(labels, *basis)? {
                            let mut rest = program.clone();
                            rest.push((steps, i + 1));
                            self.run(rest, child, in_regain, out)?;
                        }
                        return Ok(());
                    }
                    Step::Send { bits } => node.cbits += bits,
                    Step::AbortOn { outcome, regain } => {
                        if node.record.last().is_some_and(|r| &r.outcome == outcome) {
                            let mut regain_leaves = Vec::new();
                            if let (Some(r), false, true) = (regain, in_regain, self.opts.run_regain) {
                                let sub = Node { record: Vec::new(), cbits: 0, ..node.clone() };
                                self.run(vec![(&r.steps, 0)], sub, true, &mut regain_leaves)?;
                            }
                            out.push(Leaf {
                                record: node.record,
                                probability: node.probability,
                                state: node.state,
                                cbits: node.cbits,
                                status: LeafStatus::Aborted,
                                regain: regain_leaves,
                            });
                            return Ok(());
                        }
                    }
                    Step::When { cases, otherwise } => {
                        let n = node.record.len();
                        let chosen = cases
                            .iter()
                            .find(|c| {
                                c.outcomes.len() <= n
                                    && node.record[n - c.outcomes.len()..].iter().zip(&c.outcomes).all(|(r, o)| &r.outcome == o)
                            })
                            .map_or(otherwise.as_slice(), |c| c.steps.as_slice());
                        program.push((steps, i + 1));
                        program.push((chosen, 0));
                        return self.run(program, node, in_regain, out);
                    }
                }
            }
        }
        self.finish(node, in_regain, out)
    }

    fn finish(&self, node: Node, in_regain: bool, out: &mut Vec<Leaf>) -> Result<(), ProtocolError> {
        if !self.opts.finalize {
            out.push(leaf(node, None)?);
            return Ok(());
        }
        let keep = if in_regain { self.holder } else { self.bob };
        let leftover: Vec<Label> = node.labels.iter().copied().filter(|l| !keep.contains(l)).collect();
        if leftover.is_empty() {
            out.push(leaf(node, Some(keep))?);
        } else {
            for child in node.branch(&leftover, BasisKind::Computational)? {
                out.push(leaf(child, Some(keep))?);
            }
        }
        Ok(())
    }
}

fn leaf(node: Node, keep: Option<&[Label]>) -> Result<Leaf, ProtocolError> {
    let state = match (node.state, keep) {
        (Some(s), Some(order)) => Some(s.reordered(order)?),
        (s, _) => s,
    };
    Ok(Leaf { record: node.record, probability: node.probability, state, cbits: node.cbits, status: LeafStatus::Completed, regain: Vec::new() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{make, ChannelName};
    use crate::protocol::{Case, FamilyKind, InputSpec, Regain};
    use num_complex::Complex64;

    fn single(a: f64, b: f64) -> Params {
        Params(vec![Complex64::new(a, 0.0), Complex64::new(b, 0.0)])
    }

    fn bell_1q() -> Protocol {
        Protocol {
            name: "bell".into(),
            resource: make(ChannelName::Bell),
            input: InputSpec { family: FamilyKind::Single, labels: vec![1], params: None },
            steps: vec![
                Step::Cnot { control: 1, target: 2 },
                Step::H { label: 1 },
                Step::Measure { labels: vec![1, 2], basis: BasisKind::Computational },
                Step::Send { bits: 2 },
            ],
            claim: None,
        }
    }

    #[test]
    fn bell_teleport_leaves() {
        let tree = execute(&bell_1q(), &single(0.6, 0.8)).unwrap();
        assert_eq!(tree.leaves.len(), 4);
        let want = [(0.6, 0.8), (0.8, 0.6), (0.6, -0.8), (-0.8, 0.6)];
        for (leaf, (a, b)) in tree.leaves.iter().zip(want) {
            assert!((leaf.probability - 0.25).abs() < 1e-12);
            assert_eq!(leaf.cbits, 2);
            let s = leaf.state.as_ref().unwrap();
            assert_eq!(s.labels(), &[3]);
            assert!((s.amplitudes()[0] - Complex64::new(a, 0.0)).norm() < 1e-12, "{}", leaf.key());
            assert!((s.amplitudes()[1] - Complex64::new(b, 0.0)).norm() < 1e-12, "{}", leaf.key());
        }
    }

    #[test]
    fn vanished_branches_are_kept() {
        let tree = execute(&bell_1q(), &single(1.0, 0.0)).unwrap();
        assert_eq!(tree.leaves.len(), 4);
        assert!((tree.total_probability() - 1.0).abs() < 1e-12);
        assert!(tree.leaves.iter().all(|l| l.state.is_some()));
    }

    #[test]
    fn leftover_alice_labels_are_measured() {
        let mut p = bell_1q();
        p.steps = vec![Step::Cnot { control: 1, target: 2 }];
        let tree = execute(&p, &single(0.6, 0.8)).unwrap();
        assert_eq!(tree.leaves.len(), 4);
        assert!(tree.leaves.iter().all(|l| l.state.as_ref().is_none_or(|s| s.labels() == [3])));
    }

    #[test]
    fn abort_and_regain() {
        let mut p = bell_1q();
        p.steps = vec![
            Step::Measure { labels: vec![2], basis: BasisKind::Computational },
            Step::AbortOn { outcome: "1".into(), regain: Some(Regain { steps: vec![Step::Measure { labels: vec![3], basis: BasisKind::Computational }], claim: None }) },
        ];
        let tree = execute(&p, &single(0.6, 0.8)).unwrap();
        assert_eq!(tree.leaves.len(), 3);
        let aborted = &tree.leaves[2];
        assert_eq!(aborted.status, LeafStatus::Aborted);
        assert_eq!(aborted.regain.len(), 2);
        let held = aborted.regain[1].state.as_ref().unwrap();
        assert_eq!(held.labels(), &[1]);
        assert!((aborted.regain.iter().map(|l| l.probability).sum::<f64>() - 0.5).abs() < 1e-12);
        let no_regain = execute_input(&p, &p.initial_state(&single(0.6, 0.8)).unwrap(), ExecOptions { run_regain: false, finalize: true }).unwrap();
        assert!(no_regain.leaves[2].regain.is_empty());
    }

    #[test]
    fn when_selects_case() {
        let mut p = bell_1q();
        p.steps = vec![
            Step::Measure { labels: vec![2], basis: BasisKind::Computational },
            Step::When {
                cases: vec![Case { outcomes: vec!["0".into()], steps: vec![Step::Send { bits: 1 }] }],
                otherwise: vec![Step::Send { bits: 3 }],
            },
            Step::Measure { labels: vec![1], basis: BasisKind::Computational },
        ];
        let tree = execute(&p, &single(0.6, 0.8)).unwrap();
        let bits: Vec<u32> = tree.leaves.iter().map(|l| l.cbits).collect();
        assert_eq!(bits, vec![1, 1, 3, 3]);
        assert_eq!(tree.leaves[2].key(), "1/0");
    }
}
