use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{Label, StateError};
use crate::tol;

/// Density matrix over an ordered set of labels, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    labels: Vec<Label>,
    dim: usize,
    entries: Vec<Complex64>,
}

impl DensityMatrix {
    pub(crate) fn from_entries(labels: Vec<Label>, entries: Vec<Complex64>) -> Self {
        let dim = 1usize << labels.len();
        debug_assert_eq!(entries.len(), dim * dim);
        DensityMatrix { labels, dim, entries }
    }

    /// Convex combination `Σ w_k ρ_k`; all inputs must share one label order.
    pub fn mixture<'a>(labels: &[Label], parts: impl IntoIterator<Item = (f64, &'a DensityMatrix)>) -> Result<Self, StateError> {
        let dim = 1usize << labels.len();
        let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
        for (w, rho) in parts {
            if rho.labels != labels {
                return Err(StateError::LabelSetMismatch { left: labels.to_vec(), right: rho.labels.clone() });
            }
            for (e, x) in entries.iter_mut().zip(&rho.entries) {
                *e += x * w;
            }
        }
        Ok(DensityMatrix { labels: labels.to_vec(), dim, entries })
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.entry(i, i)).sum()
    }

    pub fn hermiticity_error(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for r in 0..self.dim {
            for c in 0..self.dim {
                worst = worst.max((self.entry(r, c) - self.entry(c, r).conj()).norm());
            }
        }
        worst
    }

    fn as_matrix(&self) -> DMatrix<Complex64> {
        DMatrix::from_row_slice(self.dim, self.dim, &self.entries)
    }

    /// Eigenvalues in ascending order (the matrix is treated as Hermitian).
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self.as_matrix().symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// Checks Hermiticity, unit trace and positivity within the crate tolerances.
    pub fn is_valid(&self) -> bool {
        self.hermiticity_error() <= tol::NORM
            && (self.trace() - Complex64::new(1.0, 0.0)).norm() <= tol::NORM
            && self.eigenvalues().first().is_none_or(|&e| e >= tol::EIGENVALUE)
    }

    /// Trace distance ½‖ρ − σ‖₁.
    pub fn trace_distance(&self, other: &DensityMatrix) -> Result<f64, StateError> {
        if self.labels != other.labels {
            return Err(StateError::LabelSetMismatch { left: self.labels.clone(), right: other.labels.clone() });
        }
        let diff = self.as_matrix() - other.as_matrix();
        Ok(0.5 * diff.symmetric_eigenvalues().iter().map(|e| e.abs()).sum::<f64>())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statevec::PureState;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn pure_state_reduction_is_valid() {
        let s = PureState::normalized(vec![1, 2], vec![c(0.3), Complex64::new(0.1, 0.4), c(-0.2), c(0.5)]).unwrap();
        let rho = s.reduce(&[2]).unwrap();
        assert!(rho.is_valid());
        let full = s.reduce(&[1, 2]).unwrap();
        let ev = full.eigenvalues();
        assert!((ev[3] - 1.0).abs() < 1e-12);
        assert!(ev[..3].iter().all(|e| e.abs() < 1e-12));
    }

    #[test]
    fn trace_distance_of_orthogonal_states() {
        let zero = PureState::basis_state(vec![1], "0").unwrap().reduce(&[1]).unwrap();
        let one = PureState::basis_state(vec![1], "1").unwrap().reduce(&[1]).unwrap();
        assert!((zero.trace_distance(&one).unwrap() - 1.0).abs() < 1e-14);
        assert!(zero.trace_distance(&zero).unwrap() < 1e-15);
        let mixed = DensityMatrix::mixture(&[1], [(0.5, &zero), (0.5, &one)]).unwrap();
        assert!((mixed.trace_distance(&zero).unwrap() - 0.5).abs() < 1e-14);
    }

    #[test]
    fn mismatched_labels_rejected() {
        let a = PureState::basis_state(vec![1], "0").unwrap().reduce(&[1]).unwrap();
        let b = PureState::basis_state(vec![2], "0").unwrap().reduce(&[2]).unwrap();
        assert!(a.trace_distance(&b).is_err());
    }
}
