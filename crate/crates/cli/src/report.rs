//! Serializable report documents.

use serde::{Deserialize, Serialize};
use telechan_core::protocol::{sample_params, LeafStatus, Params, Protocol};
use telechan_core::verify::{
    ledger, verify_protocol, Aggregate, CbitReport, ClaimCheck, InvariantReport, LeafVerdict, LedgerRow, VerificationReport, VerifyError,
};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Measurement {
    pub labels: Vec<u8>,
    pub basis: String,
    pub outcome: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LeafDoc {
    pub outcome: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parent: Option<String>,
    pub record: Vec<Measurement>,
    pub status: String,
    pub probability: Vec<f64>,
    pub success: bool,
    pub correction: Option<String>,
    pub min_fidelity: Option<f64>,
    pub state: Option<String>,
    pub cbits: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AggregateDoc {
    pub per_param: Vec<f64>,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClaimDoc {
    pub value: Option<f64>,
    pub citation: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reading: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiscrepancyDoc {
    pub flag: bool,
    pub delta: Option<f64>,
    pub tolerance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CbitsDoc {
    pub stated: u32,
    pub minimum: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegainDoc {
    pub leaves: Vec<LeafDoc>,
    pub unconditional: AggregateDoc,
    pub conditional: AggregateDoc,
    pub claim: ClaimDoc,
    pub discrepancy: DiscrepancyDoc,
    pub cbits: CbitsDoc,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InvariantsDoc {
    pub probability_sum_error: f64,
    pub norm_error: f64,
    pub no_signaling: f64,
    pub linearity_error: f64,
    pub success_fidelity: f64,
    pub violations: Vec<String>,
}

/// Full result of running one protocol.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunReport {
    pub scenario: String,
    pub family: String,
    pub resource: String,
    pub input: Vec<u8>,
    pub bob: Vec<u8>,
    pub params: Vec<Vec<[f64; 2]>>,
    pub leaves: Vec<LeafDoc>,
    pub aggregate: AggregateDoc,
    pub claim: ClaimDoc,
    pub discrepancy: DiscrepancyDoc,
    pub cbits: CbitsDoc,
    pub regain: Option<RegainDoc>,
    pub invariants: InvariantsDoc,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LedgerDoc {
    pub scenario: String,
    pub claimed: Option<f64>,
    pub reading: Option<String>,
    pub computed_mean: f64,
    pub conditional_mean: Option<f64>,
    pub delta: Option<f64>,
    pub status: String,
    pub citation: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyReport {
    pub seed: u64,
    pub samples: usize,
    pub tolerance: f64,
    pub ledger: Vec<LedgerDoc>,
    pub reports: Vec<RunReport>,
}

pub fn params_doc(params: &[Params]) -> Vec<Vec<[f64; 2]>> {
    params.iter().map(|p| p.0.iter().map(|c| [c.re, c.im]).collect()).collect()
}

fn leaf_doc(v: &LeafVerdict, parent: Option<&str>) -> LeafDoc {
    LeafDoc {
        outcome: v.key.clone(),
        parent: parent.map(str::to_string),
        record: v
            .record
            .iter()
            .map(|r| Measurement { labels: r.labels.clone(), basis: r.basis.name().to_string(), outcome: r.outcome.clone() })
            .collect(),
        status: match v.status {
            LeafStatus::Completed => "completed",
            LeafStatus::Aborted => "aborted",
        }
        .to_string(),
        probability: v.probabilities.clone(),
        success: v.success,
        correction: v.correction.as_ref().map(|c| c.to_string()),
        min_fidelity: v.min_fidelity,
        state: v.symbolic.clone(),
        cbits: v.cbits,
    }
}

fn aggregate_doc(a: &Aggregate) -> AggregateDoc {
    AggregateDoc { per_param: a.per_param.clone(), mean: a.mean, min: a.min, max: a.max }
}

fn claim_doc(c: &ClaimCheck) -> ClaimDoc {
    let claim = c.claim.as_ref();
    ClaimDoc {
        value: claim.map(|c| c.probability),
        citation: claim.map(|c| c.citation.clone()),
        reading: claim.and_then(|c| c.reading).map(|r| r.as_str().to_string()),
    }
}

fn discrepancy_doc(c: &ClaimCheck) -> DiscrepancyDoc {
    DiscrepancyDoc { flag: c.mismatch(), delta: c.delta, tolerance: c.tolerance }
}

fn cbits_doc(c: &CbitReport) -> CbitsDoc {
    CbitsDoc { stated: c.stated, minimum: c.minimum }
}

fn invariants_doc(i: &InvariantReport) -> InvariantsDoc {
    InvariantsDoc {
        probability_sum_error: i.probability_sum_error,
        norm_error: i.norm_error,
        no_signaling: i.no_signaling,
        linearity_error: i.linearity_error,
        success_fidelity: i.success_fidelity,
        violations: i.violations(),
    }
}

pub fn run_report(p: &Protocol, r: &VerificationReport) -> RunReport {
    RunReport {
        scenario: r.scenario.clone(),
        family: r.family.name().to_string(),
        resource: p.resource.name.clone(),
        input: p.input.labels.clone(),
        bob: r.bob.clone(),
        params: params_doc(&r.params),
        leaves: r.leaves.iter().map(|l| leaf_doc(l, None)).collect(),
        aggregate: aggregate_doc(&r.aggregate),
        claim: claim_doc(&r.claim),
        discrepancy: discrepancy_doc(&r.claim),
        cbits: cbits_doc(&r.cbits),
        regain: r.regain.as_ref().map(|g| RegainDoc {
            leaves: g.leaves.iter().zip(&g.parents).map(|(l, p)| leaf_doc(l, Some(p))).collect(),
            unconditional: aggregate_doc(&g.unconditional),
            conditional: aggregate_doc(&g.conditional),
            claim: claim_doc(&g.claim),
            discrepancy: discrepancy_doc(&g.claim),
            cbits: cbits_doc(&g.cbits),
        }),
        invariants: invariants_doc(&r.invariants),
    }
}

pub fn ledger_doc(row: &LedgerRow) -> LedgerDoc {
    LedgerDoc {
        scenario: row.scenario.clone(),
        claimed: row.claimed,
        reading: row.reading.map(|r| r.as_str().to_string()),
        computed_mean: row.computed_mean,
        conditional_mean: row.conditional_mean,
        delta: row.delta,
        status: row.status.to_string(),
        citation: row.citation.clone(),
    }
}

/// Verifies each protocol at the family's fixed points plus `samples` seeded points,
/// or at the protocol's own parameter point when it carries one.
pub fn verify_each(protocols: &[Protocol], samples: usize, seed: u64, tolerance: f64) -> Result<Vec<VerificationReport>, VerifyError> {
    protocols
        .iter()
        .map(|p| {
            let points = match &p.input.params {
                Some(x) => vec![x.clone()],
                None => sample_params(p.input.family, samples, seed),
            };
            verify_protocol(p, &points, tolerance)
        })
        .collect()
}

/// The `verify` JSON document: the claim ledger followed by every full report.
pub fn verify_document(protocols: &[Protocol], reports: &[VerificationReport], samples: usize, seed: u64, tolerance: f64) -> VerifyReport {
    VerifyReport {
        seed,
        samples,
        tolerance,
        ledger: ledger(reports).iter().map(ledger_doc).collect(),
        reports: protocols.iter().zip(reports).map(|(p, r)| run_report(p, r)).collect(),
    }
}
