//! Leaf classification, aggregate success probabilities and claim auditing.

mod correction;
mod symbolic;

use thiserror::Error;

pub use correction::{best_min_fidelity, min_fidelity, solve_correction, CorrectionOp, Pauli, Phase};
pub use symbolic::{leaf_maps, LeafMaps, LinearMap};

use crate::protocol::{
    execute, execute_input, sample_params, BranchTree, Claim, ClaimReading, ExecOptions, FamilyKind, Leaf, LeafStatus, OutcomeRecord, Params, Protocol,
    ProtocolError,
};
use crate::statevec::{DensityMatrix, Label, PureState, StateError};
use crate::tol;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error(transparent)]
    State(#[from] StateError),
    #[error("need at least {0} parameter points")]
    TooFewPoints(usize),
    #[error("branch tree shape changed between parameter points at leaf {0}")]
    ShapeMismatch(usize),
}

/// Verdict for one leaf, judged jointly over all parameter points.
#[derive(Clone, Debug, PartialEq)]
pub struct LeafVerdict {
    pub key: String,
    pub record: Vec<OutcomeRecord>,
    pub status: LeafStatus,
    pub correction: Option<CorrectionOp>,
    pub success: bool,
    /// Worst fidelity under the chosen correction, or the best any Pauli string reaches
    /// for a failed leaf. `None` for aborted leaves and leaves absent at every point.
    pub min_fidelity: Option<f64>,
    pub probabilities: Vec<f64>,
    pub cbits: u32,
    /// The leaf state in terms of the input parameters.
    pub symbolic: Option<String>,
    /// Bob's (or the regain holder's) state at each point.
    pub states: Vec<Option<PureState>>,
}

impl LeafVerdict {
    pub fn mean_probability(&self) -> f64 {
        mean(&self.probabilities)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Aggregate {
    pub per_param: Vec<f64>,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

impl Aggregate {
    pub fn new(per_param: Vec<f64>) -> Self {
        let min = per_param.iter().copied().fold(f64::INFINITY, f64::min);
        let max = per_param.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Aggregate { mean: mean(&per_param), min, max, per_param }
    }

    /// Largest deviation from `value` over the parameter points.
    pub fn delta(&self, value: f64) -> f64 {
        self.per_param.iter().map(|p| (p - value).abs()).fold(0.0, f64::max)
    }
}

fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        0.0
    } else {
        xs.iter().sum::<f64>() / xs.len() as f64
    }
}

/// A claim set against the computed aggregate.
#[derive(Clone, Debug, PartialEq)]
pub struct ClaimCheck {
    pub claim: Option<Claim>,
    /// `max |computed − claimed|`, when a claim exists.
    pub delta: Option<f64>,
    pub tolerance: f64,
}

impl ClaimCheck {
    fn new(claim: Option<&Claim>, computed: &Aggregate, tolerance: f64) -> Self {
        ClaimCheck { claim: claim.cloned(), delta: claim.map(|c| computed.delta(c.probability)), tolerance }
    }

    pub fn mismatch(&self) -> bool {
        self.delta.is_some_and(|d| d > self.tolerance)
    }

    pub fn status(&self) -> &'static str {
        match self.delta {
            None => "none stated",
            Some(_) if self.mismatch() => "MISMATCH",
            Some(_) => "match",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CbitReport {
    /// Bits announced by the protocol's send steps.
    pub stated: u32,
    /// `⌈log₂ n⌉` for n distinct Pauli strings among success leaves.
    pub minimum: u32,
}

fn min_bits(corrections: &[&CorrectionOp]) -> u32 {
    let mut distinct: Vec<String> = corrections.iter().map(|c| c.string()).collect();
    distinct.sort();
    distinct.dedup();
    let n = distinct.len();
    if n <= 1 {
        0
    } else {
        usize::BITS - (n - 1).leading_zeros()
    }
}

/// Outcome of the regain sub-protocols run on aborted leaves.
#[derive(Clone, Debug, PartialEq)]
pub struct RegainReport {
    /// Key of the aborted leaf each verdict hangs off, aligned with `leaves`.
    pub parents: Vec<String>,
    pub leaves: Vec<LeafVerdict>,
    /// Success probability over all runs.
    pub unconditional: Aggregate,
    /// Success probability given the main protocol did not teleport.
    pub conditional: Aggregate,
    pub claim: ClaimCheck,
    pub cbits: CbitReport,
}

#[derive(Clone, Debug, PartialEq)]
pub struct InvariantReport {
    /// `max |Σ leaf p − 1|` over points (regain leaves against their parent).
    pub probability_sum_error: f64,
    /// `max |‖state‖ − 1|` over leaf states.
    pub norm_error: f64,
    /// Maximum Bob-side trace distance over pre-communication prefixes.
    pub no_signaling: f64,
    /// Largest deviation of a leaf from the linear map built from family components.
    pub linearity_error: f64,
    /// Worst post-correction fidelity over success leaves (1 when there are none).
    pub success_fidelity: f64,
}

impl InvariantReport {
    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        if self.probability_sum_error > tol::PROBABILITY_SUM {
            v.push(format!("leaf probabilities off by {:e}", self.probability_sum_error));
        }
        if self.norm_error > tol::NORM {
            v.push(format!("leaf norm off by {:e}", self.norm_error));
        }
        if self.no_signaling >= tol::NO_SIGNALING {
            v.push(format!("Bob's reduced state depends on the input (trace distance {:e})", self.no_signaling));
        }
        if self.linearity_error > tol::FIDELITY {
            v.push(format!("leaf map not linear in the input (error {:e})", self.linearity_error));
        }
        if self.success_fidelity < 1.0 - tol::FIDELITY {
            v.push(format!("success leaf fidelity {}", self.success_fidelity));
        }
        v
    }

    pub fn ok(&self) -> bool {
        self.violations().is_empty()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerificationReport {
    pub scenario: String,
    pub family: FamilyKind,
    pub bob: Vec<Label>,
    pub params: Vec<Params>,
    pub leaves: Vec<LeafVerdict>,
    pub aggregate: Aggregate,
    pub claim: ClaimCheck,
    pub cbits: CbitReport,
    pub regain: Option<RegainReport>,
    pub invariants: InvariantReport,
}

impl VerificationReport {
    pub fn success_keys(&self) -> Vec<&str> {
        self.leaves.iter().filter(|l| l.success).map(|l| l.key.as_str()).collect()
    }
}

/// Verifies at the family's fixed points plus `samples` seeded random points.
pub fn verify_scenario(p: &Protocol, samples: usize, seed: u64) -> Result<VerificationReport, VerifyError> {
    verify_protocol(p, &sample_params(p.input.family, samples, seed), tol::CLAIM)
}

fn verdict(
    leaf: &Leaf,
    states: Vec<Option<PureState>>,
    probabilities: Vec<f64>,
    targets: &[PureState],
    map: Option<&LinearMap>,
    family: FamilyKind,
) -> Result<LeafVerdict, VerifyError> {
    let key = crate::protocol::record_key(&leaf.record);
    let (correction, min_fid) = if leaf.status == LeafStatus::Completed {
        match solve_correction(&states, targets)? {
            Some(op) => {
                let f = min_fidelity(&op, &states, targets)?;
                (Some(op), f)
            }
            None => (None, best_min_fidelity(&states, targets)?),
        }
    } else {
        (None, None)
    };
    Ok(LeafVerdict {
        key,
        record: leaf.record.clone(),
        status: leaf.status,
        success: correction.is_some(),
        correction,
        min_fidelity: min_fid,
        probabilities,
        cbits: leaf.cbits,
        symbolic: map.map(|m| m.render(family)),
        states,
    })
}

fn norm_error(states: &[Option<PureState>]) -> f64 {
    states.iter().flatten().map(|s| (s.norm() - 1.0).abs()).fold(0.0, f64::max)
}

fn linearity_error(map: &LinearMap, states: &[Option<PureState>], probs: &[f64], params: &[Params]) -> f64 {
    let mut worst: f64 = 0.0;
    for ((s, p), x) in states.iter().zip(probs).zip(params) {
        let predicted = map.apply(x);
        let actual: Vec<_> = match s {
            Some(s) => s.amplitudes().iter().map(|a| a * p.sqrt()).collect(),
            None => vec![Default::default(); predicted.len()],
        };
        for (a, b) in actual.iter().zip(&predicted) {
            worst = worst.max((a - b).norm());
        }
    }
    worst
}

/// Executes `p` at every point, classifies every leaf, and audits the claims.
pub fn verify_protocol(p: &Protocol, params: &[Params], tolerance: f64) -> Result<VerificationReport, VerifyError> {
    if params.is_empty() {
        return Err(VerifyError::TooFewPoints(1));
    }
    let family = p.input.family;
    let trees: Vec<BranchTree> = params.iter().map(|x| execute(p, x)).collect::<Result<_, _>>()?;
    let n = trees[0].leaves.len();
    for t in &trees {
        if t.leaves.len() != n {
            return Err(VerifyError::ShapeMismatch(t.leaves.len().min(n)));
        }
        for (j, (a, b)) in t.leaves.iter().zip(&trees[0].leaves).enumerate() {
            if a.record != b.record || a.regain.len() != b.regain.len() {
                return Err(VerifyError::ShapeMismatch(j));
            }
        }
    }
    let targets: Vec<PureState> = params.iter().map(|x| p.target(x)).collect::<Result<_, _>>()?;
    let regain_targets: Vec<PureState> = params.iter().map(|x| p.regain_target(x)).collect::<Result<_, _>>()?;
    let (maps, regain_maps) = leaf_maps(p)?;

    let mut leaves = Vec::with_capacity(n);
    let mut regain_leaves = Vec::new();
    let mut parents = Vec::new();
    let mut norm_err: f64 = 0.0;
    let mut lin_err: f64 = 0.0;
    let mut regain_sum_err: f64 = 0.0;
    for j in 0..n {
        let first = &trees[0].leaves[j];
        let states: Vec<Option<PureState>> = trees.iter().map(|t| t.leaves[j].state.clone()).collect();
        let probs: Vec<f64> = trees.iter().map(|t| t.leaves[j].probability).collect();
        norm_err = norm_err.max(norm_error(&states));
        if let Some(m) = &maps[j] {
            lin_err = lin_err.max(linearity_error(m, &states, &probs, params));
        }
        let v = verdict(first, states, probs.clone(), &targets, maps[j].as_ref(), family)?;
        for (i, r) in first.regain.iter().enumerate() {
            let states: Vec<Option<PureState>> = trees.iter().map(|t| t.leaves[j].regain[i].state.clone()).collect();
            let rprobs: Vec<f64> = trees.iter().map(|t| t.leaves[j].regain[i].probability).collect();
            norm_err = norm_err.max(norm_error(&states));
            if let Some(m) = &regain_maps[j][i] {
                lin_err = lin_err.max(linearity_error(m, &states, &rprobs, params));
            }
            regain_leaves.push(verdict(r, states, rprobs, &regain_targets, regain_maps[j][i].as_ref(), family)?);
            parents.push(v.key.clone());
        }
        if !first.regain.is_empty() {
            for (t, pj) in trees.iter().zip(&probs) {
                let s: f64 = t.leaves[j].regain.iter().map(|l| l.probability).sum();
                regain_sum_err = regain_sum_err.max((s - pj).abs());
            }
        }
        leaves.push(v);
    }

    let per_param: Vec<f64> =
        (0..params.len()).map(|k| leaves.iter().filter(|l| l.success).map(|l| l.probabilities[k]).fold(0.0, |a, b| a + b)).collect();
    let aggregate = Aggregate::new(per_param);
    let corrections: Vec<&CorrectionOp> = leaves.iter().filter_map(|l| l.correction.as_ref()).collect();
    let cbits = CbitReport { stated: p.stated_cbits(), minimum: min_bits(&corrections) };

    let regain = if regain_leaves.is_empty() {
        None
    } else {
        let uncond: Vec<f64> =
            (0..params.len()).map(|k| regain_leaves.iter().filter(|l| l.success).map(|l| l.probabilities[k]).fold(0.0, |a, b| a + b)).collect();
        let cond: Vec<f64> = uncond
            .iter()
            .zip(&aggregate.per_param)
            .map(|(u, s)| if 1.0 - s > 1e-12 { u / (1.0 - s) } else { 0.0 })
            .collect();
        let unconditional = Aggregate::new(uncond);
        let conditional = Aggregate::new(cond);
        let claim = p.regains().into_iter().find_map(|r| r.claim.as_ref());
        let check = match claim.and_then(|c| c.reading) {
            Some(ClaimReading::Conditional) => ClaimCheck::new(claim, &conditional, tolerance),
            _ => ClaimCheck::new(claim, &unconditional, tolerance),
        };
        let regain_corrections: Vec<&CorrectionOp> = regain_leaves.iter().filter_map(|l| l.correction.as_ref()).collect();
        let stated = regain_leaves.iter().map(|l| l.cbits).max().unwrap_or(0);
        Some(RegainReport {
            parents,
            unconditional,
            conditional,
            claim: check,
            cbits: CbitReport { stated, minimum: min_bits(&regain_corrections) },
            leaves: regain_leaves,
        })
    };

    let prob_err = trees.iter().map(|t| (t.total_probability() - 1.0).abs()).fold(regain_sum_err, f64::max);
    let no_signaling = if params.len() >= 2 { no_signaling_check(p, params)?.into_iter().fold(0.0, f64::max) } else { 0.0 };
    let success_fidelity = leaves
        .iter()
        .chain(regain.iter().flat_map(|r| &r.leaves))
        .filter(|l| l.success)
        .filter_map(|l| l.min_fidelity)
        .fold(1.0, f64::min);

    Ok(VerificationReport {
        scenario: p.name.clone(),
        family,
        bob: p.bob().to_vec(),
        params: params.to_vec(),
        claim: ClaimCheck::new(p.claim.as_ref(), &aggregate, tolerance),
        aggregate,
        cbits,
        regain,
        invariants: InvariantReport { probability_sum_error: prob_err, norm_error: norm_err, no_signaling, linearity_error: lin_err, success_fidelity },
        leaves,
    })
}

/// Bob's averaged state after running `p` without finalisation.
fn bob_state(p: &Protocol, params: &Params) -> Result<DensityMatrix, VerifyError> {
    let initial = p.initial_state(params)?;
    let tree = execute_input(p, &initial, ExecOptions { run_regain: false, finalize: false })?;
    let parts: Vec<(f64, DensityMatrix)> = tree
        .leaves
        .iter()
        .filter_map(|l| l.state.as_ref().map(|s| (l.probability, s)))
        .map(|(w, s)| Ok((w, s.reduce(p.bob())?)))
        .collect::<Result<_, StateError>>()?;
    Ok(DensityMatrix::mixture(p.bob(), parts.iter().map(|(w, r)| (*w, r)))?)
}

/// For each step prefix before the first classical send (the empty prefix included),
/// the largest trace distance between Bob's reduced states at any two points.
pub fn no_signaling_check(p: &Protocol, params: &[Params]) -> Result<Vec<f64>, VerifyError> {
    if params.len() < 2 {
        return Err(VerifyError::TooFewPoints(2));
    }
    (0..=p.pre_send_len())
        .map(|len| {
            let prefix = p.prefix(len);
            let rhos: Vec<DensityMatrix> = params.iter().map(|x| bob_state(&prefix, x)).collect::<Result<_, _>>()?;
            let mut worst: f64 = 0.0;
            for (i, a) in rhos.iter().enumerate() {
                for b in &rhos[i + 1..] {
                    worst = worst.max(a.trace_distance(b)?);
                }
            }
            Ok(worst)
        })
        .collect()
}

/// One line of the claim ledger.
#[derive(Clone, Debug, PartialEq)]
pub struct LedgerRow {
    /// Scenario name, with `/regain` appended for regain rows.
    pub scenario: String,
    pub claimed: Option<f64>,
    pub reading: Option<ClaimReading>,
    pub computed_mean: f64,
    /// Conditional reading of a regain probability.
    pub conditional_mean: Option<f64>,
    pub delta: Option<f64>,
    pub status: &'static str,
    pub citation: Option<String>,
}

/// Claim-versus-computation rows for every report, ordered by scenario name.
pub fn ledger(reports: &[VerificationReport]) -> Vec<LedgerRow> {
    let mut rows = Vec::new();
    for r in reports {
        rows.push(LedgerRow {
            scenario: r.scenario.clone(),
            claimed: r.claim.claim.as_ref().map(|c| c.probability),
            reading: None,
            computed_mean: r.aggregate.mean,
            conditional_mean: None,
            delta: r.claim.delta,
            status: r.claim.status(),
            citation: r.claim.claim.as_ref().map(|c| c.citation.clone()),
        });
        if let Some(g) = &r.regain {
            let claim = g.claim.claim.as_ref();
            rows.push(LedgerRow {
                scenario: format!("{}/regain", r.scenario),
                claimed: claim.map(|c| c.probability),
                reading: claim.and_then(|c| c.reading),
                computed_mean: g.unconditional.mean,
                conditional_mean: Some(g.conditional.mean),
                delta: g.claim.delta,
                status: g.claim.status(),
                citation: claim.map(|c| c.citation.clone()),
            });
        }
    }
    rows.sort_by(|a, b| a.scenario.cmp(&b.scenario));
    rows
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bit_minimum() {
        let op = |s: &[Pauli]| CorrectionOp { paulis: s.to_vec(), phase: Phase::One };
        let ops = [op(&[Pauli::I]), op(&[Pauli::X]), op(&[Pauli::Z])];
        assert_eq!(min_bits(&ops.iter().collect::<Vec<_>>()), 2);
        assert_eq!(min_bits(&ops[..1].iter().collect::<Vec<_>>()), 0);
        assert_eq!(min_bits(&ops[..2].iter().collect::<Vec<_>>()), 1);
        let same = [op(&[Pauli::Y]), CorrectionOp { paulis: vec![Pauli::Y], phase: Phase::MinusOne }];
        assert_eq!(min_bits(&same.iter().collect::<Vec<_>>()), 0);
    }

    #[test]
    fn aggregate_stats() {
        let a = Aggregate::new(vec![0.25, 0.5, 0.75]);
        assert_eq!((a.min, a.max), (0.25, 0.75));
        assert!((a.mean - 0.5).abs() < 1e-15);
        assert!((a.delta(0.5) - 0.25).abs() < 1e-15);
    }
}
