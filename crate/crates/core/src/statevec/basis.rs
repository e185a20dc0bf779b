use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use super::StateError;
use crate::tol;

/// The measurement bases a protocol can name.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BasisKind {
    /// Computational basis over any number of qubits.
    Computational,
    /// Bell basis on a qubit pair, ordered Φ+, Φ-, Ψ+, Ψ-.
    Bell,
    /// Products of |±⟩ on a qubit pair, ordered ++, -+, --, +-.
    PlusMinus,
}

impl BasisKind {
    pub fn name(self) -> &'static str {
        match self {
            BasisKind::Computational => "computational",
            BasisKind::Bell => "bell",
            BasisKind::PlusMinus => "pm",
        }
    }

    /// Required qubit count, or `None` when any arity is accepted.
    pub fn fixed_arity(self) -> Option<usize> {
        match self {
            BasisKind::Computational => None,
            BasisKind::Bell | BasisKind::PlusMinus => Some(2),
        }
    }

    pub fn build(self, arity: usize) -> Result<MeasurementBasis, StateError> {
        if let Some(required) = self.fixed_arity() {
            if arity != required {
                return Err(StateError::ArityMismatch { basis: self.name().into(), expected: required, got: arity });
            }
        }
        match self {
            BasisKind::Computational => Ok(MeasurementBasis::computational(arity)),
            BasisKind::Bell => Ok(MeasurementBasis::bell()),
            BasisKind::PlusMinus => Ok(MeasurementBasis::plus_minus()),
        }
    }

    /// Outcome names in basis order, without building the vectors.
    pub fn outcome_names(self, arity: usize) -> Vec<String> {
        match self {
            BasisKind::Computational => (0..1usize << arity).map(|i| bit_string(i, arity)).collect(),
            BasisKind::Bell => BELL_NAMES.iter().map(|s| s.to_string()).collect(),
            BasisKind::PlusMinus => PM_NAMES.iter().map(|s| s.to_string()).collect(),
        }
    }
}

impl fmt::Display for BasisKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BasisKind {
    type Err = StateError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "computational" => Ok(BasisKind::Computational),
            "bell" => Ok(BasisKind::Bell),
            "pm" => Ok(BasisKind::PlusMinus),
            other => Err(StateError::UnknownBasis(other.to_string())),
        }
    }
}

const BELL_NAMES: [&str; 4] = ["Φ+", "Φ-", "Ψ+", "Ψ-"];
const PM_NAMES: [&str; 4] = ["++", "-+", "--", "+-"];

pub(crate) fn bit_string(index: usize, width: usize) -> String {
    (0..width).map(|k| if index >> (width - 1 - k) & 1 == 1 { '1' } else { '0' }).collect()
}

/// An orthonormal basis of `2^arity` labelled vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementBasis {
    name: String,
    arity: usize,
    vectors: Vec<(String, Vec<Complex64>)>,
}

impl MeasurementBasis {
    /// Builds a basis, checking that the vectors are orthonormal and complete.
    pub fn new(name: impl Into<String>, arity: usize, vectors: Vec<(String, Vec<Complex64>)>) -> Result<Self, StateError> {
        let name = name.into();
        let dim = 1usize << arity;
        if vectors.len() != dim || vectors.iter().any(|(_, v)| v.len() != dim) {
            return Err(StateError::BadBasis { name, reason: format!("need {dim} vectors of dimension {dim}") });
        }
        for (i, (_, a)) in vectors.iter().enumerate() {
            for (j, (_, b)) in vectors.iter().enumerate() {
                let ip: Complex64 = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                if (ip - want).norm() > tol::UNITARY {
                    return Err(StateError::BadBasis {
                        name,
                        reason: format!("⟨v{i}|v{j}⟩ = {ip}, expected {want}"),
                    });
                }
            }
        }
        Ok(MeasurementBasis { name, arity, vectors })
    }

    pub fn computational(arity: usize) -> Self {
        let dim = 1usize << arity;
        let vectors = (0..dim)
            .map(|i| {
                let mut v = vec![Complex64::new(0.0, 0.0); dim];
                v[i] = Complex64::new(1.0, 0.0);
                (bit_string(i, arity), v)
            })
            .collect();
        MeasurementBasis { name: "computational".into(), arity, vectors }
    }

    pub fn bell() -> Self {
        let h = FRAC_1_SQRT_2;
        let real = |v: [f64; 4]| v.iter().map(|&x| Complex64::new(x, 0.0)).collect::<Vec<_>>();
        let vectors = vec![
            (BELL_NAMES[0].to_string(), real([h, 0.0, 0.0, h])),
            (BELL_NAMES[1].to_string(), real([h, 0.0, 0.0, -h])),
            (BELL_NAMES[2].to_string(), real([0.0, h, h, 0.0])),
            (BELL_NAMES[3].to_string(), real([0.0, h, -h, 0.0])),
        ];
        MeasurementBasis::new("bell", 2, vectors).expect("Bell basis is orthonormal")
    }

    /// |±⟩ = (|0⟩ ± |1⟩)/√2 products in the order ++, -+, --, +-.
    pub fn plus_minus() -> Self {
        let h = FRAC_1_SQRT_2;
        let plus = [h, h];
        let minus = [h, -h];
        let prod = |a: [f64; 2], b: [f64; 2]| {
            vec![
                Complex64::new(a[0] * b[0], 0.0),
                Complex64::new(a[0] * b[1], 0.0),
                Complex64::new(a[1] * b[0], 0.0),
                Complex64::new(a[1] * b[1], 0.0),
            ]
        };
        let vectors = vec![
            (PM_NAMES[0].to_string(), prod(plus, plus)),
            (PM_NAMES[1].to_string(), prod(minus, plus)),
            (PM_NAMES[2].to_string(), prod(minus, minus)),
            (PM_NAMES[3].to_string(), prod(plus, minus)),
        ];
        MeasurementBasis::new("pm", 2, vectors).expect("|±⟩ product basis is orthonormal")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[(String, Vec<Complex64>)] {
        &self.vectors
    }

    pub fn outcome(&self, index: usize) -> &str {
        &self.vectors[index].0
    }
}
