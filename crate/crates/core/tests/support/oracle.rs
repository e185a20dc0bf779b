//! A dense brute-force reference simulator that shares no code with the crate.
//!
//! States are plain amplitude vectors over an explicit label list (first label most
//! significant). Gates are applied by index arithmetic and outcomes are enumerated by
//! projecting every measured label onto a definite bit.
#![allow(dead_code)]

use num_complex::Complex64 as C;

pub fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

#[derive(Clone, Debug)]
pub struct Reg {
    pub labels: Vec<u8>,
    pub amps: Vec<C>,
}

impl Reg {
    /// Equal-weight superposition of the given bit strings, normalised.
    pub fn uniform(labels: &[u8], terms: &[&str]) -> Reg {
        let mut amps = vec![c(0.0, 0.0); 1 << labels.len()];
        let w = 1.0 / (terms.len() as f64).sqrt();
        for t in terms {
            amps[usize::from_str_radix(t, 2).unwrap()] += c(w, 0.0);
        }
        Reg { labels: labels.to_vec(), amps }
    }

    pub fn from_amps(labels: &[u8], amps: Vec<C>) -> Reg {
        assert_eq!(amps.len(), 1 << labels.len());
        Reg { labels: labels.to_vec(), amps }
    }

    pub fn kron(&self, other: &Reg) -> Reg {
        let mut labels = self.labels.clone();
        labels.extend(&other.labels);
        let mut amps = Vec::with_capacity(self.amps.len() * other.amps.len());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        Reg { labels, amps }
    }

    fn mask(&self, label: u8) -> usize {
        let pos = self.labels.iter().position(|&l| l == label).expect("label present");
        1 << (self.labels.len() - 1 - pos)
    }

    pub fn cnot(&mut self, control: u8, target: u8) {
        let (mc, mt) = (self.mask(control), self.mask(target));
        for i in 0..self.amps.len() {
            if i & mc != 0 && i & mt == 0 {
                self.amps.swap(i, i | mt);
            }
        }
    }

    pub fn h(&mut self, label: u8) {
        let m = self.mask(label);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        for i in 0..self.amps.len() {
            if i & m == 0 {
                let (a, b) = (self.amps[i], self.amps[i | m]);
                self.amps[i] = (a + b) * r;
                self.amps[i | m] = (a - b) * r;
            }
        }
    }

    /// Maps the Bell basis onto computational outcomes `Φ+ 00, Ψ+ 01, Φ− 10, Ψ− 11`.
    pub fn bell_rotate(&mut self, a: u8, b: u8) {
        self.cnot(a, b);
        self.h(a);
    }

    /// Amplitudes of `keep` (in that order) after projecting `fixed` labels onto the
    /// given bits; every label must appear in exactly one of the two lists. Unnormalised.
    pub fn slice(&self, fixed: &[(u8, u8)], keep: &[u8]) -> Vec<C> {
        assert_eq!(fixed.len() + keep.len(), self.labels.len());
        let base: usize = fixed.iter().filter(|(_, b)| *b == 1).map(|(l, _)| self.mask(*l)).sum();
        (0..1usize << keep.len())
            .map(|k| {
                let mut idx = base;
                for (j, l) in keep.iter().enumerate() {
                    if k >> (keep.len() - 1 - j) & 1 == 1 {
                        idx |= self.mask(*l);
                    }
                }
                self.amps[idx]
            })
            .collect()
    }

    /// Unnormalised state after projecting `fixed` labels, on the remaining labels.
    pub fn project(&self, fixed: &[(u8, u8)]) -> Reg {
        let keep: Vec<u8> = self.labels.iter().copied().filter(|l| fixed.iter().all(|(f, _)| f != l)).collect();
        Reg { amps: self.slice(fixed, &keep), labels: keep }
    }
}

pub fn norm2(v: &[C]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum()
}

/// All assignments of bits to `labels`, in counting order (first label most significant).
pub fn assignments(labels: &[u8]) -> Vec<Vec<(u8, u8)>> {
    (0..1usize << labels.len())
        .map(|k| labels.iter().enumerate().map(|(j, &l)| (l, (k >> (labels.len() - 1 - j) & 1) as u8)).collect())
        .collect()
}

pub fn bits(a: &[(u8, u8)]) -> String {
    a.iter().map(|(_, b)| char::from(b'0' + b)).collect()
}

const PAULI: [[[C; 2]; 2]; 4] = [
    [[C::new(1.0, 0.0), C::new(0.0, 0.0)], [C::new(0.0, 0.0), C::new(1.0, 0.0)]],
    [[C::new(0.0, 0.0), C::new(1.0, 0.0)], [C::new(1.0, 0.0), C::new(0.0, 0.0)]],
    [[C::new(0.0, 0.0), C::new(0.0, -1.0)], [C::new(0.0, 1.0), C::new(0.0, 0.0)]],
    [[C::new(1.0, 0.0), C::new(0.0, 0.0)], [C::new(0.0, 0.0), C::new(-1.0, 0.0)]],
];

/// Applies `P_{k_0} ⊗ P_{k_1} ⊗ …` to a vector over `n` qubits.
pub fn pauli_apply(ks: &[usize], v: &[C]) -> Vec<C> {
    let n = ks.len();
    let mut out = v.to_vec();
    for (q, &k) in ks.iter().enumerate() {
        let m = 1 << (n - 1 - q);
        let p = PAULI[k];
        let mut next = vec![c(0.0, 0.0); out.len()];
        for (i, a) in out.iter().enumerate() {
            let bit = usize::from(i & m != 0);
            for (row, entries) in p.iter().enumerate() {
                let j = if row == 1 { i | m } else { i & !m };
                next[j] += entries[bit] * a;
            }
        }
        out = next;
    }
    out
}

/// `|⟨t|v⟩|² / (‖t‖² ‖v‖²)`.
pub fn overlap(t: &[C], v: &[C]) -> f64 {
    let ip: C = t.iter().zip(v).map(|(a, b)| a.conj() * b).sum();
    ip.norm_sqr() / (norm2(t) * norm2(v))
}

/// Whether one Pauli string maps every non-vanishing `states[k]` onto `targets[k]`
/// up to a global phase. A branch that vanishes everywhere does not teleport.
pub fn teleports(states: &[Vec<C>], targets: &[Vec<C>]) -> bool {
    let present: Vec<usize> = (0..states.len()).filter(|&k| norm2(&states[k]) > 1e-14).collect();
    if present.is_empty() {
        return false;
    }
    let n = (states[0].len() as f64).log2().round() as usize;
    (0..4usize.pow(n as u32)).any(|code| {
        let ks: Vec<usize> = (0..n).map(|q| code >> (2 * (n - 1 - q)) & 3).collect();
        present.iter().all(|&k| overlap(&targets[k], &pauli_apply(&ks, &states[k])) >= 1.0 - 1e-9)
    })
}

/// Sampled parameter points for a one-qubit input `α|0⟩ + β|1⟩`.
pub fn single_points() -> Vec<[C; 2]> {
    vec![
        [c(0.6, 0.0), c(0.8, 0.0)],
        [c(0.28, 0.0), c(0.0, 0.96)],
        [c(0.5, 0.5), c(-0.5, 0.5)],
        [c(0.1, -0.3), c(0.9, 0.3)],
        [c(0.8, 0.0), c(-0.36, 0.48)],
        [c(0.0, 0.6), c(0.64, 0.48)],
    ]
    .into_iter()
    .map(|[a, b]| {
        let n = (a.norm_sqr() + b.norm_sqr()).sqrt();
        [a / n, b / n]
    })
    .collect()
}

/// Branch of a one-qubit teleportation: the bit string of `measured` and Bob's states
/// at every point.
pub struct Outcome {
    pub bits: String,
    pub probabilities: Vec<f64>,
    pub teleports: bool,
}

/// Enumerates every assignment of `measured` after `prepare` has acted on the
/// input ⊗ channel register, judging Bob's state on `bob` against the input.
pub fn enumerate_single(
    channel: &Reg,
    input_label: u8,
    measured: &[u8],
    bob: u8,
    prepare: impl Fn(&mut Reg),
) -> Vec<Outcome> {
    let points = single_points();
    let regs: Vec<Reg> = points
        .iter()
        .map(|[a, b]| {
            let mut r = Reg::from_amps(&[input_label], vec![*a, *b]).kron(channel);
            prepare(&mut r);
            r
        })
        .collect();
    assignments(measured)
        .into_iter()
        .map(|fixed| {
            let states: Vec<Vec<C>> = regs.iter().map(|r| r.slice(&fixed, &[bob])).collect();
            let targets: Vec<Vec<C>> = points.iter().map(|p| p.to_vec()).collect();
            Outcome {
                bits: bits(&fixed),
                probabilities: states.iter().map(|s| norm2(s)).collect(),
                teleports: teleports(&states, &targets),
            }
        })
        .collect()
}

/// Per-point success probability over the teleporting outcomes.
pub fn success_probability(outcomes: &[Outcome]) -> Vec<f64> {
    let n = outcomes[0].probabilities.len();
    (0..n).map(|k| outcomes.iter().filter(|o| o.teleports).map(|o| o.probabilities[k]).sum()).collect()
}

pub fn success_set(outcomes: &[Outcome]) -> Vec<String> {
    let mut s: Vec<String> = outcomes.iter().filter(|o| o.teleports).map(|o| o.bits.clone()).collect();
    s.sort();
    s
}

pub fn bell_name(bits: &str) -> &'static str {
    match bits {
        "00" => "Φ+",
        "01" => "Ψ+",
        "10" => "Φ-",
        "11" => "Ψ-",
        _ => unreachable!(),
    }
}

pub fn w3(labels: &[u8]) -> Reg {
    Reg::uniform(labels, &["100", "010", "001"])
}

pub fn ghz3(labels: &[u8]) -> Reg {
    Reg::uniform(labels, &["000", "111"])
}

pub fn bell(labels: &[u8]) -> Reg {
    Reg::uniform(labels, &["00", "11"])
}

pub fn p1(labels: &[u8]) -> Reg {
    Reg::uniform(labels, &["0001", "0010", "0100", "1000"])
}

pub fn p2(labels: &[u8]) -> Reg {
    Reg::uniform(labels, &["0000", "1111", "0011", "0101", "0110"])
}

pub fn p3(labels: &[u8]) -> Reg {
    Reg::uniform(labels, &["0000", "0101", "1000", "1110"])
}

pub fn p4(labels: &[u8]) -> Reg {
    Reg::uniform(labels, &["0000", "1011", "1101", "1110"])
}
