//! Leaf states written in terms of the input parameters.
//!
//! Every leaf maps the input linearly onto Bob's register, so running the protocol
//! once per family component recovers that map exactly.

use num_complex::Complex64;

use crate::protocol::{execute_input, BranchTree, ExecOptions, FamilyKind, Leaf, LeafStatus, Params, Protocol, ProtocolError};
use crate::statevec::{bit_string, Label};

const EPS: f64 = 1e-9;

/// `coeffs[b][k]`: amplitude on basis state `b` contributed by parameter `k`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearMap {
    pub labels: Vec<Label>,
    pub coeffs: Vec<Vec<Complex64>>,
}

impl LinearMap {
    /// The unnormalised leaf vector `√p · state` at `params`.
    pub fn apply(&self, params: &Params) -> Vec<Complex64> {
        self.coeffs.iter().map(|row| row.iter().zip(&params.0).map(|(m, c)| m * c).sum()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().flatten().all(|c| c.norm() < EPS)
    }

    /// E.g. `α|00⟩ − β|01⟩ − β|10⟩`, scaled so the largest coefficient has modulus 1.
    pub fn render(&self, family: FamilyKind) -> String {
        let scale = self.coeffs.iter().flatten().map(|c| c.norm()).fold(0.0, f64::max);
        if scale < EPS {
            return "0".to_string();
        }
        let names = family.param_names();
        let mut terms: Vec<(bool, String)> = Vec::new();
        for (b, row) in self.coeffs.iter().enumerate() {
            let ket = format!("|{}⟩", bit_string(b, self.labels.len()));
            let parts: Vec<(bool, String)> = row
                .iter()
                .zip(names)
                .filter(|(c, _)| c.norm() >= EPS * scale)
                .map(|(c, n)| {
                    let (neg, mag) = coefficient(c / scale);
                    (neg, format!("{mag}{n}"))
                })
                .collect();
            match parts.len() {
                0 => {}
                1 => terms.push((parts[0].0, format!("{}{ket}", parts[0].1))),
                _ => terms.push((false, format!("({}){ket}", join(&parts)))),
            }
        }
        join(&terms)
    }
}

fn join(terms: &[(bool, String)]) -> String {
    let mut out = String::new();
    for (i, (neg, t)) in terms.iter().enumerate() {
        match (i, neg) {
            (0, true) => out.push('−'),
            (0, false) => {}
            (_, true) => out.push_str(" − "),
            (_, false) => out.push_str(" + "),
        }
        out.push_str(t);
    }
    out
}

fn trim(x: f64) -> String {
    let s = format!("{x:.4}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

/// Sign and magnitude text of a coefficient; unit magnitudes print as nothing or `i`.
fn coefficient(c: Complex64) -> (bool, String) {
    if c.im.abs() < EPS {
        let mag = if (c.re.abs() - 1.0).abs() < EPS { String::new() } else { trim(c.re.abs()) };
        (c.re < 0.0, mag)
    } else if c.re.abs() < EPS {
        let mag = if (c.im.abs() - 1.0).abs() < EPS { "i".to_string() } else { format!("{}i", trim(c.im.abs())) };
        (c.im < 0.0, mag)
    } else {
        (false, format!("({}{}{}i)", trim(c.re), if c.im < 0.0 { "−" } else { "+" }, trim(c.im.abs())))
    }
}

/// Runs the protocol on each normalised family component.
fn component_trees(p: &Protocol) -> Result<Vec<BranchTree>, ProtocolError> {
    let family = p.input.family;
    (0..family.param_count())
        .map(|k| {
            let input = family.component_state(k, &p.input.labels)?;
            let initial = input.tensor(&p.resource.state)?;
            execute_input(p, &initial, ExecOptions::default())
        })
        .collect()
}

fn leaf_map(family: FamilyKind, leaves: &[&Leaf], labels: &[Label]) -> LinearMap {
    let dim = 1usize << labels.len();
    let mut coeffs = vec![vec![Complex64::new(0.0, 0.0); leaves.len()]; dim];
    for (k, leaf) in leaves.iter().enumerate() {
        if let Some(s) = &leaf.state {
            let w = family.component_norm(k) * leaf.probability.sqrt();
            for (b, a) in s.amplitudes().iter().enumerate() {
                coeffs[b][k] = a * w;
            }
        }
    }
    LinearMap { labels: labels.to_vec(), coeffs }
}

pub type LeafMaps = (Vec<Option<LinearMap>>, Vec<Vec<Option<LinearMap>>>);

/// Linear maps for every main leaf and for every regain leaf under each main leaf
/// (`None` for aborted leaves).
pub fn leaf_maps(p: &Protocol) -> Result<LeafMaps, ProtocolError> {
    let trees = component_trees(p)?;
    let family = p.input.family;
    let n = trees[0].leaves.len();
    let mut main = Vec::with_capacity(n);
    let mut regain = Vec::with_capacity(n);
    for j in 0..n {
        let leaves: Vec<&Leaf> = trees.iter().map(|t| &t.leaves[j]).collect();
        main.push((leaves[0].status == LeafStatus::Completed).then(|| leaf_map(family, &leaves, p.bob())));
        let r = leaves[0].regain.len();
        regain.push(
            (0..r)
                .map(|i| {
                    let sub: Vec<&Leaf> = trees.iter().map(|t| &t.leaves[j].regain[i]).collect();
                    (sub[0].status == LeafStatus::Completed).then(|| leaf_map(family, &sub, &p.input.labels))
                })
                .collect(),
        );
    }
    Ok((main, regain))
}
