//! Table, CSV and JSON renderings.

use std::io;

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};
use telechan_core::protocol::{LeafStatus, Protocol};
use telechan_core::scenarios::{ReferenceRow, ScenarioDef};
use telechan_core::statevec::fidelity;
use telechan_core::tol;
use telechan_core::verify::{LeafVerdict, LedgerRow, VerificationReport};

/// Pretty JSON with every float written to 17 significant digits.
struct FixedFloats(PrettyFormatter<'static>);

impl Formatter for FixedFloats {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            write!(writer, "{value:.16e}")
        } else {
            writer.write_all(b"null")
        }
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_array(writer)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_array(writer)
    }

    fn begin_array_value<W: ?Sized + io::Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(writer, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_array_value(writer)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_object(writer)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_object(writer)
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(writer, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_object_value(writer)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_object_value(writer)
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FixedFloats(PrettyFormatter::new()));
    value.serialize(&mut ser).expect("report serializes");
    buf.push(b'\n');
    String::from_utf8(buf).expect("utf-8 json")
}

fn width(s: &str) -> usize {
    s.chars().count()
}

/// Left-aligned columns separated by two spaces.
pub fn grid(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| width(h)).collect();
    for r in rows {
        for (w, c) in widths.iter_mut().zip(r) {
            *w = (*w).max(width(c));
        }
    }
    let line = |cells: Vec<&str>| {
        let mut s = String::new();
        for (i, (c, w)) in cells.iter().zip(&widths).enumerate() {
            if i + 1 == cells.len() {
                s.push_str(c);
            } else {
                s.push_str(c);
                s.push_str(&" ".repeat(w - width(c) + 2));
            }
        }
        s.trim_end().to_string() + "\n"
    };
    let mut out = line(header.to_vec());
    out.push_str(&line(widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>().iter().map(String::as_str).collect()));
    for r in rows {
        out.push_str(&line(r.iter().map(String::as_str).collect()));
    }
    out
}

fn num(x: f64) -> String {
    format!("{x:.6}")
}

fn opt_num(x: Option<f64>) -> String {
    x.map_or_else(|| "-".to_string(), num)
}

fn measured(v: &LeafVerdict) -> String {
    v.record.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(" ")
}

fn verdict_word(v: &LeafVerdict) -> &'static str {
    match (v.status, v.success) {
        (LeafStatus::Aborted, _) => "aborted",
        (_, true) => "success",
        _ if v.probabilities.iter().all(|p| *p == 0.0) => "vanished",
        _ => "failure",
    }
}

fn fid(v: &LeafVerdict) -> String {
    match v.min_fidelity {
        Some(f) => format!("{:.3e}", 1.0 - f),
        None => "-".to_string(),
    }
}

fn leaf_rows(leaves: &[LeafVerdict], parents: Option<&[String]>) -> Vec<Vec<String>> {
    leaves
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let mut row = Vec::new();
            if let Some(ps) = parents {
                row.push(ps[i].clone());
            }
            let p_min = v.probabilities.iter().copied().fold(f64::INFINITY, f64::min);
            let p_max = v.probabilities.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            row.extend([
                v.key.clone(),
                measured(v),
                num(v.mean_probability()),
                format!("{}..{}", num(p_min), num(p_max)),
                v.symbolic.clone().unwrap_or_else(|| "-".to_string()),
                v.correction.as_ref().map_or_else(|| "-".to_string(), |c| c.to_string()),
                fid(v),
                verdict_word(v).to_string(),
            ]);
            row
        })
        .collect()
}

const LEAF_HEADER: [&str; 8] = ["outcome", "measured", "p mean", "p range", "Bob's state", "correction", "1-fidelity", "verdict"];

/// Whether a reference row's state matches the computed leaf up to global phase at every point.
pub fn reference_status(row: &ReferenceRow, p: &Protocol, r: &VerificationReport) -> &'static str {
    let leaf = if row.regain {
        r.regain.as_ref().and_then(|g| g.leaves.iter().zip(&g.parents).find(|(l, parent)| format!("{parent}/{}", l.key) == row.key || l.key == row.key))
            .map(|(l, _)| l)
    } else {
        r.leaves.iter().find(|l| l.key == row.key)
    };
    let Some(leaf) = leaf else { return "no such leaf" };
    let labels = if row.regain { &p.input.labels } else { p.bob() };
    let mut seen = false;
    for (s, x) in leaf.states.iter().zip(&r.params) {
        let Some(s) = s else { continue };
        seen = true;
        let agrees = row.state(labels, x).ok().and_then(|t| fidelity(s, &t).ok()).is_some_and(|f| f >= 1.0 - tol::FIDELITY);
        if !agrees {
            return "differs";
        }
    }
    if seen {
        "agrees"
    } else {
        "vanished"
    }
}

pub fn run_table(p: &Protocol, r: &VerificationReport, def: Option<&ScenarioDef>) -> String {
    let labels = |ls: &[u8]| ls.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(",");
    let mut out = format!(
        "{}: {} input on {} through {}, Bob holds {}\n{} parameter points\n\n",
        r.scenario,
        r.family,
        labels(&p.input.labels),
        p.resource.name,
        labels(&r.bob),
        r.params.len()
    );
    out.push_str(&grid(&LEAF_HEADER, &leaf_rows(&r.leaves, None)));
    out.push_str(&format!(
        "\nsuccess probability: mean {} min {} max {}\n",
        num(r.aggregate.mean),
        num(r.aggregate.min),
        num(r.aggregate.max)
    ));
    match &r.claim.claim {
        Some(c) => out.push_str(&format!("claim: {} ({}), delta {}, {}\n", c.probability, c.citation, opt_num(r.claim.delta), r.claim.status())),
        None => out.push_str("claim: none stated\n"),
    }
    out.push_str(&format!("classical bits: stated {}, minimum {}\n", r.cbits.stated, r.cbits.minimum));
    if let Some(g) = &r.regain {
        out.push_str("\nregain\n");
        let mut header = vec!["after"];
        header.extend(LEAF_HEADER);
        out.push_str(&grid(&header, &leaf_rows(&g.leaves, Some(&g.parents))));
        out.push_str(&format!(
            "\nregain probability: unconditional {} conditional {}\n",
            num(g.unconditional.mean),
            num(g.conditional.mean)
        ));
        match &g.claim.claim {
            Some(c) => out.push_str(&format!(
                "regain claim: {} {} ({}), delta {}, {}\n",
                c.probability,
                c.reading.map_or("unconditional", |r| r.as_str()),
                c.citation,
                opt_num(g.claim.delta),
                g.claim.status()
            )),
            None => out.push_str("regain claim: none stated\n"),
        }
        out.push_str(&format!("regain classical bits: stated {}, minimum {}\n", g.cbits.stated, g.cbits.minimum));
    }
    if let Some(def) = def.filter(|d| !d.reference.is_empty()) {
        out.push_str("\nreference rows\n");
        let rows: Vec<Vec<String>> = def
            .reference
            .iter()
            .map(|row| {
                vec![
                    row.printed.to_string(),
                    row.key.to_string(),
                    row.render(r.family),
                    reference_status(row, p, r).to_string(),
                ]
            })
            .collect();
        out.push_str(&grid(&["printed", "leaf", "printed state", "computed"], &rows));
    }
    let violations = r.invariants.violations();
    if violations.is_empty() {
        out.push_str("\ninvariants: ok\n");
    } else {
        out.push_str("\ninvariant violations:\n");
        for v in violations {
            out.push_str(&format!("  {v}\n"));
        }
    }
    out
}

pub fn ledger_table(rows: &[LedgerRow], reports: &[VerificationReport]) -> String {
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.scenario.clone(),
                opt_num(r.claimed),
                r.reading.map_or("-", |x| x.as_str()).to_string(),
                num(r.computed_mean),
                opt_num(r.conditional_mean),
                opt_num(r.delta),
                r.status.to_string(),
                r.citation.clone().unwrap_or_else(|| "-".to_string()),
            ]
        })
        .collect();
    let mut out = grid(&["scenario", "claimed", "reading", "computed", "conditional", "delta", "status", "citation"], &body);
    for r in reports {
        for v in r.invariants.violations() {
            out.push_str(&format!("{}: invariant violation: {v}\n", r.scenario));
        }
    }
    out
}

#[derive(Serialize)]
struct CsvRow<'a> {
    scenario: &'a str,
    part: &'a str,
    parent: &'a str,
    outcome: &'a str,
    measured: String,
    status: &'a str,
    success: bool,
    correction: String,
    min_fidelity: Option<f64>,
    p_mean: f64,
    p_min: f64,
    p_max: f64,
    state: String,
    cbits: u32,
}

fn csv_row<'a>(scenario: &'a str, part: &'a str, parent: &'a str, v: &'a LeafVerdict) -> CsvRow<'a> {
    CsvRow {
        scenario,
        part,
        parent,
        outcome: &v.key,
        measured: measured(v),
        status: verdict_word(v),
        success: v.success,
        correction: v.correction.as_ref().map(|c| c.to_string()).unwrap_or_default(),
        min_fidelity: v.min_fidelity,
        p_mean: v.mean_probability(),
        p_min: v.probabilities.iter().copied().fold(f64::INFINITY, f64::min),
        p_max: v.probabilities.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        state: v.symbolic.clone().unwrap_or_default(),
        cbits: v.cbits,
    }
}

/// One leaf per row, regain leaves after the main ones.
pub fn leaves_csv(reports: &[VerificationReport]) -> Result<String, csv::Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in reports {
        for v in &r.leaves {
            w.serialize(csv_row(&r.scenario, "main", "", v))?;
        }
        if let Some(g) = &r.regain {
            for (v, parent) in g.leaves.iter().zip(&g.parents) {
                w.serialize(csv_row(&r.scenario, "regain", parent, v))?;
            }
        }
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("utf-8 csv"))
}

pub fn ledger_csv(rows: &[LedgerRow]) -> Result<String, csv::Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["scenario", "claimed", "reading", "computed_mean", "conditional_mean", "delta", "status", "citation"])?;
    let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
    for r in rows {
        w.write_record([
            r.scenario.clone(),
            opt(r.claimed),
            r.reading.map(|x| x.as_str().to_string()).unwrap_or_default(),
            r.computed_mean.to_string(),
            opt(r.conditional_mean),
            opt(r.delta),
            r.status.to_string(),
            r.citation.clone().unwrap_or_default(),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("utf-8 csv"))
}
