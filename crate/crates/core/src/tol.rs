//! Numerical tolerances shared across the crate.

/// Maximum deviation of a stored state's L2 norm from one.
pub const NORM: f64 = 1e-12;

/// Branches with smaller probability are treated as vanished.
pub const PRUNE: f64 = 1e-14;

/// Unitarity tolerance for user-supplied 2x2 matrices and basis orthonormality.
pub const UNITARY: f64 = 1e-12;

/// A corrected leaf counts as teleporting when its fidelity is at least `1 - FIDELITY`.
pub const FIDELITY: f64 = 1e-9;

/// Sibling / leaf probabilities must sum to one within this bound.
pub const PROBABILITY_SUM: f64 = 1e-10;

/// Maximum admissible trace distance between Bob's reduced states before communication.
pub const NO_SIGNALING: f64 = 1e-9;

/// Smallest admissible eigenvalue of a density matrix.
pub const EIGENVALUE: f64 = -1e-10;

/// Default tolerance when comparing a computed probability with a stated claim.
pub const CLAIM: f64 = 1e-6;
