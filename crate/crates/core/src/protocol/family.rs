use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::ProtocolError;
use crate::statevec::{Label, PureState};
use crate::tol;

/// The unknown-state families a protocol can teleport.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FamilyKind {
    /// α|0⟩ + β|1⟩
    Single,
    /// α|00⟩ + β(|01⟩ + |10⟩)
    TwoQubitNonmax,
    /// α|11⟩ + β(|01⟩ + |10⟩)
    TwoQubitNonmaxVariant,
    /// α(|00⟩ + |11⟩) + γ(|01⟩ + |10⟩)
    TwoQubitSymmetric,
    /// α|00⟩ + β|11⟩ + γ|01⟩ + δ|10⟩
    GeneralTwo,
}

type Component = &'static [&'static str];

impl FamilyKind {
    pub const ALL: [FamilyKind; 5] = [
        FamilyKind::Single,
        FamilyKind::TwoQubitNonmax,
        FamilyKind::TwoQubitNonmaxVariant,
        FamilyKind::TwoQubitSymmetric,
        FamilyKind::GeneralTwo,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FamilyKind::Single => "single",
            FamilyKind::TwoQubitNonmax => "twoqubit-nonmax",
            FamilyKind::TwoQubitNonmaxVariant => "twoqubit-nonmax-variant",
            FamilyKind::TwoQubitSymmetric => "twoqubit-symmetric",
            FamilyKind::GeneralTwo => "general-two",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            FamilyKind::Single => 1,
            _ => 2,
        }
    }

    /// Greek names of the parameters, in parameter order.
    pub fn param_names(self) -> &'static [&'static str] {
        match self {
            FamilyKind::Single | FamilyKind::TwoQubitNonmax | FamilyKind::TwoQubitNonmaxVariant => &["α", "β"],
            FamilyKind::TwoQubitSymmetric => &["α", "γ"],
            FamilyKind::GeneralTwo => &["α", "β", "γ", "δ"],
        }
    }

    /// The (unnormalised) ket each parameter multiplies, as a sum of bit strings.
    fn components(self) -> &'static [Component] {
        match self {
            FamilyKind::Single => &[&["0"], &["1"]],
            FamilyKind::TwoQubitNonmax => &[&["00"], &["01", "10"]],
            FamilyKind::TwoQubitNonmaxVariant => &[&["11"], &["01", "10"]],
            FamilyKind::TwoQubitSymmetric => &[&["00", "11"], &["01", "10"]],
            FamilyKind::GeneralTwo => &[&["00"], &["11"], &["01"], &["10"]],
        }
    }

    pub fn param_count(self) -> usize {
        self.components().len()
    }

    /// Norm of the ket multiplied by parameter `k`.
    pub fn component_norm(self, k: usize) -> f64 {
        (self.components()[k].len() as f64).sqrt()
    }

    /// Normalised ket multiplied by parameter `k`, on `labels`.
    pub fn component_state(self, k: usize, labels: &[Label]) -> Result<PureState, ProtocolError> {
        let one = Complex64::new(1.0, 0.0);
        let terms: Vec<(&str, Complex64)> = self.components()[k].iter().map(|b| (*b, one)).collect();
        Ok(PureState::from_terms(labels.to_vec(), &terms)?)
    }

    /// `|Σ_k |p_k|² ‖ket_k‖² − 1|`, or infinity for a wrong parameter count or non-finite values.
    pub fn constraint_residual(self, params: &Params) -> f64 {
        if params.0.len() != self.param_count() || params.0.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return f64::INFINITY;
        }
        let total: f64 = params.0.iter().zip(self.components()).map(|(p, c)| p.norm_sqr() * c.len() as f64).sum();
        (total - 1.0).abs()
    }

    pub fn check(self, params: &Params) -> Result<(), ProtocolError> {
        let residual = self.constraint_residual(params);
        if residual > tol::NORM {
            return Err(ProtocolError::Constraint { family: self.name().to_string(), residual });
        }
        Ok(())
    }

    /// The family member at `params`, placed on `labels`.
    pub fn state(self, labels: &[Label], params: &Params) -> Result<PureState, ProtocolError> {
        self.check(params)?;
        if labels.len() != self.arity() {
            return Err(ProtocolError::semantic(None, format!("family {} needs {} labels", self.name(), self.arity())));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << self.arity()];
        for (p, component) in params.0.iter().zip(self.components()) {
            for bits in component.iter() {
                amps[usize::from_str_radix(bits, 2).expect("component bits")] += p;
            }
        }
        Ok(PureState::new(labels.to_vec(), amps)?)
    }

    /// Edge and generic points every sample set starts with.
    pub fn fixed_points(self) -> Vec<Params> {
        let h = FRAC_1_SQRT_2;
        let r3 = 1.0 / 3f64.sqrt();
        let p = |v: &[(f64, f64)]| Params(v.iter().map(|&(re, im)| Complex64::new(re, im)).collect());
        match self {
            FamilyKind::Single => vec![
                p(&[(1.0, 0.0), (0.0, 0.0)]),
                p(&[(0.0, 0.0), (1.0, 0.0)]),
                p(&[(h, 0.0), (h, 0.0)]),
                p(&[(h, 0.0), (0.0, h)]),
                p(&[(0.6, 0.0), (0.8, 0.0)]),
            ],
            FamilyKind::TwoQubitNonmax | FamilyKind::TwoQubitNonmaxVariant => vec![
                p(&[(1.0, 0.0), (0.0, 0.0)]),
                p(&[(0.0, 0.0), (h, 0.0)]),
                p(&[(r3, 0.0), (r3, 0.0)]),
                p(&[(r3, 0.0), (0.0, r3)]),
                p(&[(0.6, 0.0), (0.8 * h, 0.0)]),
            ],
            FamilyKind::TwoQubitSymmetric => vec![
                p(&[(h, 0.0), (0.0, 0.0)]),
                p(&[(0.0, 0.0), (h, 0.0)]),
                p(&[(0.5, 0.0), (0.5, 0.0)]),
                p(&[(0.5, 0.0), (0.0, 0.5)]),
                p(&[(0.6 * h, 0.0), (0.8 * h, 0.0)]),
            ],
            FamilyKind::GeneralTwo => {
                let n = (0.01f64 + 0.09 + 0.25 + 0.49).sqrt();
                vec![
                    p(&[(1.0, 0.0), (0.0, 0.0), (0.0, 0.0), (0.0, 0.0)]),
                    p(&[(0.0, 0.0), (0.0, 0.0), (1.0, 0.0), (0.0, 0.0)]),
                    p(&[(0.5, 0.0), (0.5, 0.0), (0.5, 0.0), (0.5, 0.0)]),
                    p(&[(0.5, 0.0), (0.0, 0.5), (0.5, 0.0), (0.0, -0.5)]),
                    p(&[(0.1 / n, 0.0), (0.3 / n, 0.0), (0.5 / n, 0.0), (0.7 / n, 0.0)]),
                ]
            }
        }
    }
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FamilyKind {
    type Err = ProtocolError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        FamilyKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| ProtocolError::semantic(None, format!("unknown input family `{s}`")))
    }
}

/// One concrete parameter point of an input family.
#[derive(Clone, Debug, PartialEq)]
pub struct Params(pub Vec<Complex64>);

impl fmt::Display for Params {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|z| format!("{:.4}{:+.4}i", z.re, z.im)).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// The fixed points of `family` followed by `n` seeded random points.
///
/// Random points draw each parameter from a complex normal distribution and
/// rescale onto the family's constraint surface.
pub fn sample_params(family: FamilyKind, n: usize, seed: u64) -> Vec<Params> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = family.fixed_points();
    while points.len() < family.fixed_points().len() + n {
        let raw: Vec<Complex64> = (0..family.param_count())
            .map(|_| Complex64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng)))
            .collect();
        let weight: f64 = raw.iter().enumerate().map(|(k, z)| z.norm_sqr() * family.component_norm(k).powi(2)).sum();
        if weight < 1e-6 {
            continue;
        }
        let scale = weight.sqrt();
        points.push(Params(raw.into_iter().map(|z| z / scale).collect()));
    }
    points
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sampling_is_deterministic() {
        for family in FamilyKind::ALL {
            assert_eq!(sample_params(family, 3, 11), sample_params(family, 3, 11));
            assert_ne!(sample_params(family, 3, 11), sample_params(family, 3, 12));
        }
    }

    #[test]
    fn sampled_points_satisfy_constraint() {
        for family in FamilyKind::ALL {
            let points = sample_params(family, 20, 5);
            assert_eq!(points.len(), family.fixed_points().len() + 20);
            for p in &points {
                assert!(family.constraint_residual(p) <= 1e-12, "{family} {p}");
                assert!(family.state(&[1, 2][..family.arity()], p).is_ok());
            }
        }
    }

    #[test]
    fn single_fixed_points_come_first() {
        let pts = sample_params(FamilyKind::Single, 1, 0);
        assert_eq!(pts[0], Params(vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]));
        assert_eq!(pts[4], Params(vec![Complex64::new(0.6, 0.0), Complex64::new(0.8, 0.0)]));
    }

    #[test]
    fn nonmax_includes_alpha_one() {
        let pts = sample_params(FamilyKind::TwoQubitNonmax, 2, 99);
        assert!(pts.contains(&Params(vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)])));
    }

    #[test]
    fn constraint_violation_rejected() {
        let bad = Params(vec![Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)]);
        assert!(matches!(FamilyKind::Single.state(&[1], &bad), Err(ProtocolError::Constraint { .. })));
        let short = Params(vec![Complex64::new(1.0, 0.0)]);
        assert!(FamilyKind::Single.check(&short).is_err());
    }

    #[test]
    fn nonmax_state_layout() {
        let h = FRAC_1_SQRT_2;
        let p = Params(vec![Complex64::new(0.6, 0.0), Complex64::new(0.8 * h, 0.0)]);
        let s = FamilyKind::TwoQubitNonmax.state(&[1, 2], &p).unwrap();
        assert_eq!(s.amplitude("00"), Some(Complex64::new(0.6, 0.0)));
        assert_eq!(s.amplitude("01"), Some(Complex64::new(0.8 * h, 0.0)));
        assert_eq!(s.amplitude("10"), Some(Complex64::new(0.8 * h, 0.0)));
        assert_eq!(s.amplitude("11"), Some(Complex64::new(0.0, 0.0)));
    }
}
