use std::fmt;

use num_complex::Complex64;

use crate::statevec::{fidelity, NamedGate, PureState, StateError};
use crate::tol;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn gate(self) -> NamedGate {
        match self {
            Pauli::I => NamedGate::I,
            Pauli::X => NamedGate::X,
            Pauli::Y => NamedGate::Y,
            Pauli::Z => NamedGate::Z,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// Global phase of a correction, in search order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Phase {
    One,
    I,
    MinusOne,
    MinusI,
}

impl Phase {
    pub const ALL: [Phase; 4] = [Phase::One, Phase::I, Phase::MinusOne, Phase::MinusI];

    pub fn value(self) -> Complex64 {
        match self {
            Phase::One => Complex64::new(1.0, 0.0),
            Phase::I => Complex64::new(0.0, 1.0),
            Phase::MinusOne => Complex64::new(-1.0, 0.0),
            Phase::MinusI => Complex64::new(0.0, -1.0),
        }
    }

    pub fn prefix(self) -> &'static str {
        match self {
            Phase::One => "",
            Phase::I => "i",
            Phase::MinusOne => "-",
            Phase::MinusI => "-i",
        }
    }
}

/// A signed Pauli string Bob applies to his labels, in label order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CorrectionOp {
    pub paulis: Vec<Pauli>,
    pub phase: Phase,
}

impl CorrectionOp {
    pub fn identity(len: usize) -> Self {
        CorrectionOp { paulis: vec![Pauli::I; len], phase: Phase::One }
    }

    /// The Pauli string without its phase, e.g. `Z⊗Z`.
    pub fn string(&self) -> String {
        self.paulis.iter().map(|p| p.symbol().to_string()).collect::<Vec<_>>().join("⊗")
    }

    /// Applies the correction to a state whose labels are Bob's, in order.
    pub fn apply(&self, state: &PureState) -> Result<PureState, StateError> {
        if state.num_qubits() != self.paulis.len() {
            return Err(StateError::LengthMismatch { expected: self.paulis.len(), got: state.num_qubits() });
        }
        let mut out = state.clone();
        for (label, p) in state.labels().iter().zip(&self.paulis) {
            if *p != Pauli::I {
                out = out.apply_gate(*label, p.gate())?;
            }
        }
        let phase = self.phase.value();
        PureState::new(out.labels().to_vec(), out.amplitudes().iter().map(|a| a * phase).collect())
    }
}

impl fmt::Display for CorrectionOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.phase.prefix(), self.string())
    }
}

fn pauli_strings(len: usize) -> impl Iterator<Item = Vec<Pauli>> {
    (0..4usize.pow(len as u32)).map(move |idx| (0..len).map(|k| Pauli::ALL[(idx >> (2 * (len - 1 - k))) & 3]).collect())
}

fn check_aligned(states: &[Option<PureState>], targets: &[PureState]) -> Result<(), StateError> {
    if states.len() != targets.len() {
        return Err(StateError::LengthMismatch { expected: targets.len(), got: states.len() });
    }
    for (s, t) in states.iter().zip(targets) {
        if let Some(s) = s {
            if s.labels() != t.labels() {
                return Err(StateError::LabelSetMismatch { left: s.labels().to_vec(), right: t.labels().to_vec() });
            }
        }
    }
    Ok(())
}

/// Minimum fidelity of `op · state` against the target over the points where the state exists.
pub fn min_fidelity(op: &CorrectionOp, states: &[Option<PureState>], targets: &[PureState]) -> Result<Option<f64>, StateError> {
    check_aligned(states, targets)?;
    let mut worst: Option<f64> = None;
    for (s, t) in states.iter().zip(targets) {
        if let Some(s) = s {
            let f = fidelity(&op.apply(s)?, t)?;
            worst = Some(worst.map_or(f, |w| w.min(f)));
        }
    }
    Ok(worst)
}

/// First signed Pauli string mapping every present leaf state onto its target.
///
/// `states[k]` is `None` where the leaf has zero probability; such points are skipped,
/// and a leaf absent at every point has no correction. Among the phases, the first whose
/// overlap `Re⟨target|op·state⟩` reaches one at every point is chosen; otherwise the phase is 1.
pub fn solve_correction(states: &[Option<PureState>], targets: &[PureState]) -> Result<Option<CorrectionOp>, StateError> {
    check_aligned(states, targets)?;
    let Some(first) = targets.first() else { return Ok(None) };
    if states.iter().all(Option::is_none) {
        return Ok(None);
    }
    for paulis in pauli_strings(first.num_qubits()) {
        let op = CorrectionOp { paulis, phase: Phase::One };
        if min_fidelity(&op, states, targets)?.is_some_and(|f| f >= 1.0 - tol::FIDELITY) {
            let mut overlaps = Vec::new();
            for (s, t) in states.iter().zip(targets) {
                if let Some(s) = s {
                    overlaps.push(t.inner(&op.apply(s)?)?);
                }
            }
            let phase = Phase::ALL
                .into_iter()
                .find(|ph| overlaps.iter().all(|o| (ph.value() * o).re >= 1.0 - tol::FIDELITY))
                .unwrap_or(Phase::One);
            return Ok(Some(CorrectionOp { phase, ..op }));
        }
    }
    Ok(None)
}

/// Best worst-case fidelity any Pauli string reaches (diagnostic for failed leaves).
pub fn best_min_fidelity(states: &[Option<PureState>], targets: &[PureState]) -> Result<Option<f64>, StateError> {
    let Some(first) = targets.first() else { return Ok(None) };
    let mut best: Option<f64> = None;
    for paulis in pauli_strings(first.num_qubits()) {
        let op = CorrectionOp { paulis, phase: Phase::One };
        if let Some(f) = min_fidelity(&op, states, targets)? {
            best = Some(best.map_or(f, |b| b.max(f)));
        }
    }
    Ok(best)
}
