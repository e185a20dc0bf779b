use num_complex::Complex64;
use proptest::prelude::*;
use telechan_core::protocol::{sample_params, FamilyKind};
use telechan_core::scenarios;
use telechan_core::statevec::{fidelity, BasisKind, NamedGate, PureState};
use telechan_core::tol;
use telechan_core::verify::{verify_protocol, verify_scenario};

fn state(n: usize) -> impl Strategy<Value = PureState> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1 << n)
        .prop_filter("non-zero", |v| v.iter().map(|(a, b)| a * a + b * b).sum::<f64>() > 1e-3)
        .prop_map(move |v| {
            let amps = v.into_iter().map(|(re, im)| Complex64::new(re, im)).collect();
            PureState::normalized((1..=n as u8).collect(), amps).unwrap()
        })
}

fn any_state() -> impl Strategy<Value = PureState> {
    (1usize..=5).prop_flat_map(state)
}

#[derive(Clone, Debug)]
enum Op {
    Gate(usize, NamedGate),
    Cnot(usize, usize),
}

fn ops() -> impl Strategy<Value = Vec<Op>> {
    let op = prop_oneof![
        (0usize..5, prop::sample::select(NamedGate::ALL.to_vec())).prop_map(|(q, g)| Op::Gate(q, g)),
        (0usize..5, 0usize..5).prop_map(|(c, t)| Op::Cnot(c, t)),
    ];
    prop::collection::vec(op, 1..20)
}

fn run(s: &PureState, ops: &[Op]) -> PureState {
    let n = s.num_qubits();
    let label = |q: usize| (q % n) as u8 + 1;
    let mut s = s.clone();
    for op in ops {
        s = match *op {
            Op::Gate(q, g) => s.apply_gate(label(q), g).unwrap(),
            Op::Cnot(c, t) if label(c) != label(t) => s.apply_cnot(label(c), label(t)).unwrap(),
            Op::Cnot(..) => s,
        };
    }
    s
}

fn max_diff(a: &PureState, b: &PureState) -> f64 {
    a.amplitudes().iter().zip(b.amplitudes()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn gates_preserve_norm(s in any_state(), ops in ops()) {
        let out = run(&s, &ops);
        prop_assert!((out.norm() - 1.0).abs() < tol::NORM);
    }

    #[test]
    fn hadamard_and_cnot_are_involutions(s in (2usize..=5).prop_flat_map(state), q in 0usize..5, t in 0usize..5) {
        let n = s.num_qubits() as u8;
        let (a, b) = ((q as u8 % n) + 1, (t as u8 % n) + 1);
        let hh = s.apply_gate(a, NamedGate::H).unwrap().apply_gate(a, NamedGate::H).unwrap();
        prop_assert!(max_diff(&hh, &s) < 1e-12);
        if a != b {
            let cc = s.apply_cnot(a, b).unwrap().apply_cnot(a, b).unwrap();
            prop_assert!(max_diff(&cc, &s) < 1e-12);
        }
    }

    #[test]
    fn tensor_is_normalised(a in any_state(), b in (1usize..=2).prop_flat_map(state)) {
        let b = PureState::new(b.labels().iter().map(|l| l + 10).collect(), b.amplitudes().to_vec()).unwrap();
        prop_assert!((a.tensor(&b).unwrap().norm() - 1.0).abs() < tol::NORM);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn measurement_is_complete_and_reconstructs(s in (2usize..=5).prop_flat_map(state), pick in 0usize..3, first in 0usize..5) {
        let n = s.num_qubits();
        let kind = [BasisKind::Computational, BasisKind::Bell, BasisKind::PlusMinus][pick];
        let arity = kind.fixed_arity().unwrap_or(1 + first % (n - 1));
        let labels: Vec<u8> = (0..arity).map(|k| ((first + k) % n) as u8 + 1).collect();
        let basis = kind.build(arity).unwrap();
        let branches = s.measure(&labels, &basis).unwrap();
        let total: f64 = branches.iter().map(|b| b.probability).sum();
        prop_assert!((total - 1.0).abs() < tol::PROBABILITY_SUM);

        // Σ √p |b⟩ ⊗ |post⟩ rebuilds the measured state
        let mut rebuilt = vec![Complex64::new(0.0, 0.0); 1 << n];
        for b in &branches {
            let v = &basis.vectors().iter().find(|(name, _)| *name == b.outcome).unwrap().1;
            let ket = PureState::new(labels.clone(), v.clone()).unwrap();
            let piece = ket.tensor(&b.post_state).unwrap().reordered(s.labels()).unwrap();
            for (r, a) in rebuilt.iter_mut().zip(piece.amplitudes()) {
                *r += a * b.probability.sqrt();
            }
        }
        let diff = rebuilt.iter().zip(s.amplitudes()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        prop_assert!(diff < 1e-6, "reconstruction off by {diff}");
        for b in &branches {
            prop_assert!((b.post_state.norm() - 1.0).abs() < tol::NORM);
        }
    }

    #[test]
    fn fidelity_is_symmetric_bounded_and_phase_blind(a in state(3), b in state(3), theta in 0.0f64..6.3) {
        let fab = fidelity(&a, &b).unwrap();
        let fba = fidelity(&b, &a).unwrap();
        prop_assert!((fab - fba).abs() < 1e-12);
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&fab));
        let phase = Complex64::from_polar(1.0, theta);
        let rotated = PureState::new(a.labels().to_vec(), a.amplitudes().iter().map(|x| x * phase).collect()).unwrap();
        prop_assert!((fidelity(&a, &rotated).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn reduced_states_are_valid(s in (2usize..=5).prop_flat_map(state), mask in 1u32..31) {
        let n = s.num_qubits();
        let keep: Vec<u8> = (0..n).filter(|k| mask >> k & 1 == 1).map(|k| k as u8 + 1).collect();
        prop_assume!(!keep.is_empty());
        let rho = s.reduce(&keep).unwrap();
        prop_assert!(rho.is_valid());
        prop_assert!((rho.trace().re - 1.0).abs() < 1e-12);
        prop_assert!(rho.trace_distance(&rho).unwrap() < 1e-12);
    }

    #[test]
    fn sampled_points_lie_on_the_constraint(seed in any::<u64>(), pick in 0usize..5) {
        let family = FamilyKind::ALL[pick];
        for p in sample_params(family, 4, seed) {
            prop_assert!(family.constraint_residual(&p) < 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn scenario_invariants_hold_at_random_points(seed in any::<u64>()) {
        let reference = scenarios::all();
        for def in &reference {
            let p = &def.protocol;
            let r = verify_scenario(p, 3, seed).unwrap();
            prop_assert!(r.params.len() >= 6);
            prop_assert!(r.invariants.ok(), "{}: {:?}", p.name, r.invariants.violations());
            // which leaves teleport does not depend on where the family is sampled
            let random_only = &r.params[r.params.len() - 3..];
            let again = verify_protocol(p, random_only, tol::CLAIM).unwrap();
            prop_assert_eq!(again.success_keys(), r.success_keys(), "{}", &p.name);
        }
    }
}
