//! Pure states over small labelled qubit registers.
//!
//! Every [`PureState`] carries its qubit labels next to the amplitude vector;
//! the first label is the most significant bit of the basis index, so
//! `|0100⟩` over labels `(1, 2, 3, 4)` puts qubit 2 in state one. Operations
//! never mutate their inputs.

mod basis;
mod density;
mod gates;

pub use basis::{BasisKind, MeasurementBasis};
pub(crate) use basis::bit_string;
pub use density::DensityMatrix;
pub use gates::{Mat2, NamedGate};

use std::collections::BTreeSet;
use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

use crate::tol;

/// Qubit label, matching the particle numbers used when writing kets.
pub type Label = u8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StateError {
    #[error("label {0} appears more than once")]
    DuplicateLabel(Label),
    #[error("registers share labels {0:?}")]
    LabelConflict(Vec<Label>),
    #[error("label {0} is not in the register")]
    UnknownLabel(Label),
    #[error("amplitude vector has length {got}, expected {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("state contains a non-finite amplitude")]
    NonFinite,
    #[error("state norm is {0}, expected 1")]
    NotNormalized(f64),
    #[error("state has zero norm")]
    ZeroNorm,
    #[error("matrix is not unitary (deviation {0:e})")]
    NonUnitary(f64),
    #[error("control and target are both label {0}")]
    SameQubit(Label),
    #[error("basis `{basis}` acts on {expected} qubits, got {got}")]
    ArityMismatch { basis: String, expected: usize, got: usize },
    #[error("basis `{name}` is invalid: {reason}")]
    BadBasis { name: String, reason: String },
    #[error("unknown basis `{0}`")]
    UnknownBasis(String),
    #[error("label sets differ: {left:?} vs {right:?}")]
    LabelSetMismatch { left: Vec<Label>, right: Vec<Label> },
}

/// A normalised state vector over an ordered list of distinct qubit labels.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    labels: Vec<Label>,
    amps: Vec<Complex64>,
}

/// Result of projecting onto one basis vector.
#[derive(Clone, Debug, PartialEq)]
pub struct Projection {
    pub probability: f64,
    /// Renormalised post-measurement state; `None` when the probability is below the pruning threshold.
    pub state: Option<PureState>,
}

/// One surviving outcome of a measurement.
#[derive(Clone, Debug, PartialEq)]
pub struct Branch {
    pub outcome: String,
    pub probability: f64,
    pub post_state: PureState,
}

fn check_labels(labels: &[Label]) -> Result<(), StateError> {
    let mut seen = BTreeSet::new();
    for &l in labels {
        if !seen.insert(l) {
            return Err(StateError::DuplicateLabel(l));
        }
    }
    Ok(())
}

fn norm_sqr(amps: &[Complex64]) -> f64 {
    amps.iter().map(|a| a.norm_sqr()).sum()
}

type IndexPair = (usize, usize);

impl PureState {
    /// Wraps an amplitude vector that must already have unit norm.
    pub fn new(labels: Vec<Label>, amps: Vec<Complex64>) -> Result<Self, StateError> {
        let state = PureState::unchecked(labels, amps)?;
        let norm = state.norm();
        if (norm - 1.0).abs() > tol::NORM {
            return Err(StateError::NotNormalized(norm));
        }
        Ok(state)
    }

    /// Rescales `amps` to unit norm. Vectors already within tolerance are kept as given.
    pub fn normalized(labels: Vec<Label>, mut amps: Vec<Complex64>) -> Result<Self, StateError> {
        let mut state = PureState::unchecked(labels, std::mem::take(&mut amps))?;
        let norm = state.norm();
        if norm <= tol::PRUNE.sqrt() {
            return Err(StateError::ZeroNorm);
        }
        if (norm - 1.0).abs() > tol::NORM {
            state.amps.iter_mut().for_each(|a| *a /= norm);
        }
        Ok(state)
    }

    fn unchecked(labels: Vec<Label>, amps: Vec<Complex64>) -> Result<Self, StateError> {
        check_labels(&labels)?;
        let expected = 1usize << labels.len();
        if amps.len() != expected {
            return Err(StateError::LengthMismatch { expected, got: amps.len() });
        }
        if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(StateError::NonFinite);
        }
        Ok(PureState { labels, amps })
    }

    /// Computational basis state given as a bit string such as `"0100"`.
    pub fn basis_state(labels: Vec<Label>, bits: &str) -> Result<Self, StateError> {
        let n = labels.len();
        if bits.len() != n || !bits.chars().all(|c| c == '0' || c == '1') {
            return Err(StateError::LengthMismatch { expected: n, got: bits.len() });
        }
        let index = usize::from_str_radix(bits, 2).unwrap_or(0);
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[index] = Complex64::new(1.0, 0.0);
        PureState::new(labels, amps)
    }

    /// Normalised superposition of bit strings with the given coefficients.
    pub fn from_terms(labels: Vec<Label>, terms: &[(&str, Complex64)]) -> Result<Self, StateError> {
        let n = labels.len();
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        for (bits, c) in terms {
            if bits.len() != n {
                return Err(StateError::LengthMismatch { expected: n, got: bits.len() });
            }
            let index = usize::from_str_radix(bits, 2).map_err(|_| StateError::NonFinite)?;
            amps[index] += c;
        }
        PureState::normalized(labels, amps)
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn num_qubits(&self) -> usize {
        self.labels.len()
    }

    pub fn norm(&self) -> f64 {
        norm_sqr(&self.amps).sqrt()
    }

    /// Amplitude of a computational basis state written in this register's label order.
    pub fn amplitude(&self, bits: &str) -> Option<Complex64> {
        if bits.len() != self.labels.len() {
            return None;
        }
        usize::from_str_radix(bits, 2).ok().map(|i| self.amps[i])
    }

    pub fn position(&self, label: Label) -> Result<usize, StateError> {
        self.labels.iter().position(|&l| l == label).ok_or(StateError::UnknownLabel(label))
    }

    fn shift(&self, label: Label) -> Result<usize, StateError> {
        Ok(self.labels.len() - 1 - self.position(label)?)
    }

    fn ensure_normalized(self) -> Result<Self, StateError> {
        let norm = self.norm();
        if (norm - 1.0).abs() > tol::NORM {
            return Err(StateError::NotNormalized(norm));
        }
        Ok(self)
    }

    /// Kronecker product; labels of `other` follow those of `self`.
    pub fn tensor(&self, other: &PureState) -> Result<PureState, StateError> {
        let shared: Vec<Label> = self.labels.iter().copied().filter(|l| other.labels.contains(l)).collect();
        if !shared.is_empty() {
            return Err(StateError::LabelConflict(shared));
        }
        let mut labels = self.labels.clone();
        labels.extend_from_slice(&other.labels);
        let amps = self.amps.iter().flat_map(|a| other.amps.iter().map(move |b| a * b)).collect();
        PureState { labels, amps }.ensure_normalized()
    }

    /// Applies a single-qubit unitary to `label`.
    pub fn apply_1q(&self, label: Label, u: &Mat2) -> Result<PureState, StateError> {
        if !u.is_unitary() {
            return Err(StateError::NonUnitary(u.unitarity_error()));
        }
        let bit = 1usize << self.shift(label)?;
        let m = &u.0;
        let mut amps = self.amps.clone();
        for i in (0..amps.len()).filter(|i| i & bit == 0) {
            let (a0, a1) = (self.amps[i], self.amps[i | bit]);
            amps[i] = m[0][0] * a0 + m[0][1] * a1;
            amps[i | bit] = m[1][0] * a0 + m[1][1] * a1;
        }
        PureState { labels: self.labels.clone(), amps }.ensure_normalized()
    }

    pub fn apply_gate(&self, label: Label, gate: NamedGate) -> Result<PureState, StateError> {
        self.apply_1q(label, &gate.matrix())
    }

    pub fn apply_cnot(&self, control: Label, target: Label) -> Result<PureState, StateError> {
        if control == target {
            return Err(StateError::SameQubit(control));
        }
        let c = 1usize << self.shift(control)?;
        let t = 1usize << self.shift(target)?;
        let mut amps = self.amps.clone();
        for i in (0..amps.len()).filter(|i| i & c != 0 && i & t == 0) {
            amps.swap(i, i | t);
        }
        Ok(PureState { labels: self.labels.clone(), amps })
    }

    /// The same state with its register permuted into `order`.
    pub fn reordered(&self, order: &[Label]) -> Result<PureState, StateError> {
        let same_set = order.len() == self.labels.len() && order.iter().all(|l| self.labels.contains(l));
        if !same_set {
            return Err(StateError::LabelSetMismatch { left: self.labels.clone(), right: order.to_vec() });
        }
        check_labels(order)?;
        if order == self.labels.as_slice() {
            return Ok(self.clone());
        }
        let n = order.len();
        let shifts: Vec<usize> = order.iter().map(|&l| self.shift(l)).collect::<Result<_, _>>()?;
        let amps = (0..1usize << n)
            .map(|new_index| {
                let old = (0..n).fold(0usize, |acc, k| {
                    let bit = (new_index >> (n - 1 - k)) & 1;
                    acc | (bit << shifts[k])
                });
                self.amps[old]
            })
            .collect();
        Ok(PureState { labels: order.to_vec(), amps })
    }

    /// Splits every basis index into (measured part, remaining part).
    fn split_indices(&self, measured: &[Label]) -> Result<(Vec<Label>, Vec<IndexPair>), StateError> {
        check_labels(measured)?;
        let m_shifts: Vec<usize> = measured.iter().map(|&l| self.shift(l)).collect::<Result<_, _>>()?;
        let rest: Vec<Label> = self.labels.iter().copied().filter(|l| !measured.contains(l)).collect();
        let r_shifts: Vec<usize> = rest.iter().map(|&l| self.shift(l)).collect::<Result<_, _>>()?;
        let gather = |i: usize, shifts: &[usize]| shifts.iter().fold(0usize, |acc, &s| (acc << 1) | ((i >> s) & 1));
        let parts = (0..self.amps.len()).map(|i| (gather(i, &m_shifts), gather(i, &r_shifts))).collect();
        Ok((rest, parts))
    }

    /// Projects `labels` onto the `index`-th vector of `basis` and drops them from the register.
    pub fn project(&self, labels: &[Label], basis: &MeasurementBasis, index: usize) -> Result<Projection, StateError> {
        if basis.arity() != labels.len() {
            return Err(StateError::ArityMismatch {
                basis: basis.name().to_string(),
                expected: basis.arity(),
                got: labels.len(),
            });
        }
        let (rest, parts) = self.split_indices(labels)?;
        Ok(self.project_split(&rest, &parts, &basis.vectors()[index].1))
    }

    fn project_split(&self, rest: &[Label], parts: &[(usize, usize)], vector: &[Complex64]) -> Projection {
        let mut post = vec![Complex64::new(0.0, 0.0); 1usize << rest.len()];
        for (amp, &(m, r)) in self.amps.iter().zip(parts) {
            post[r] += vector[m].conj() * amp;
        }
        let probability = norm_sqr(&post);
        if probability < tol::PRUNE {
            return Projection { probability: 0.0, state: None };
        }
        let norm = probability.sqrt();
        post.iter_mut().for_each(|a| *a /= norm);
        Projection { probability, state: Some(PureState { labels: rest.to_vec(), amps: post }) }
    }

    /// Projective measurement of `labels` (first label = most significant bit of the basis index).
    ///
    /// Returns one branch per basis vector with non-negligible probability, in basis order.
    pub fn measure(&self, labels: &[Label], basis: &MeasurementBasis) -> Result<Vec<Branch>, StateError> {
        if basis.arity() != labels.len() {
            return Err(StateError::ArityMismatch {
                basis: basis.name().to_string(),
                expected: basis.arity(),
                got: labels.len(),
            });
        }
        let (rest, parts) = self.split_indices(labels)?;
        Ok(basis
            .vectors()
            .iter()
            .filter_map(|(name, v)| {
                let p = self.project_split(&rest, &parts, v);
                p.state.map(|post_state| Branch { outcome: name.clone(), probability: p.probability, post_state })
            })
            .collect())
    }

    /// ⟨self|other⟩ after bringing `other` into this register's label order.
    pub fn inner(&self, other: &PureState) -> Result<Complex64, StateError> {
        let other = other.reordered(&self.labels)?;
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    /// Reduced density matrix over `keep`, in the order given.
    pub fn reduce(&self, keep: &[Label]) -> Result<DensityMatrix, StateError> {
        let (traced, parts) = self.split_indices(keep)?;
        let dim = 1usize << keep.len();
        let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
        // group amplitudes by traced-out index
        let mut by_env: Vec<Vec<(usize, Complex64)>> = vec![Vec::new(); 1usize << traced.len()];
        for (amp, &(k, env)) in self.amps.iter().zip(&parts) {
            if amp.norm_sqr() > 0.0 {
                by_env[env].push((k, *amp));
            }
        }
        for group in &by_env {
            for &(i, a) in group {
                for &(j, b) in group {
                    entries[i * dim + j] += a * b.conj();
                }
            }
        }
        Ok(DensityMatrix::from_entries(keep.to_vec(), entries))
    }
}

/// |⟨a|b⟩|², invariant under global phase of either argument.
pub fn fidelity(a: &PureState, b: &PureState) -> Result<f64, StateError> {
    Ok(a.inner(b)?.norm_sqr())
}

fn fmt_complex(z: Complex64) -> String {
    if z.im.abs() < 1e-12 {
        format!("{:.6}", z.re)
    } else if z.re.abs() < 1e-12 {
        format!("{:.6}i", z.im)
    } else {
        format!("({:.6}{:+.6}i)", z.re, z.im)
    }
}

impl fmt::Display for PureState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.labels.len();
        let subscript: String = self.labels.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(",");
        let mut first = true;
        for (i, a) in self.amps.iter().enumerate() {
            if a.norm() < 1e-12 {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            write!(f, "{}|{}⟩", fmt_complex(*a), bit_string(i, n))?;
        }
        if first {
            f.write_str("0")?;
        }
        write!(f, " [{subscript}]")
    }
}
