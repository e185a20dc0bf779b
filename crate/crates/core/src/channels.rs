//! Catalog of the entangled resource states shared between Alice and Bob.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use thiserror::Error;

use crate::statevec::{Label, PureState, StateError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChannelError {
    #[error("unknown channel `{0}`")]
    UnknownChannel(String),
    #[error("party assignment alice={alice:?} bob={bob:?} does not partition labels {labels:?}")]
    InvalidPartition { alice: Vec<Label>, bob: Vec<Label>, labels: Vec<Label> },
    #[error(transparent)]
    State(#[from] StateError),
}

/// Names of the catalogued channels.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ChannelName {
    Bell,
    Ghz3,
    W3,
    W3Variant,
    P1,
    P2,
    P3,
    P4,
}

impl ChannelName {
    pub const ALL: [ChannelName; 8] = [
        ChannelName::Bell,
        ChannelName::Ghz3,
        ChannelName::W3,
        ChannelName::W3Variant,
        ChannelName::P1,
        ChannelName::P2,
        ChannelName::P3,
        ChannelName::P4,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ChannelName::Bell => "bell",
            ChannelName::Ghz3 => "ghz3",
            ChannelName::W3 => "w3",
            ChannelName::W3Variant => "w3-variant",
            ChannelName::P1 => "p1",
            ChannelName::P2 => "p2",
            ChannelName::P3 => "p3",
            ChannelName::P4 => "p4",
        }
    }

    /// Superposed bit strings (equal weights) over the default labels.
    fn terms(self) -> &'static [&'static str] {
        match self {
            ChannelName::Bell => &["00", "11"],
            ChannelName::Ghz3 => &["000", "111"],
            ChannelName::W3 => &["100", "010", "001"],
            ChannelName::W3Variant => &["101", "110", "011"],
            ChannelName::P1 => &["0001", "0010", "0100", "1000"],
            ChannelName::P2 => &["0000", "1111", "0011", "0101", "0110"],
            ChannelName::P3 => &["0000", "0101", "1000", "1110"],
            ChannelName::P4 => &["0000", "1011", "1101", "1110"],
        }
    }

    /// Default labels and Bob's share of them.
    fn default_parties(self) -> (&'static [Label], &'static [Label]) {
        match self {
            ChannelName::Bell => (&[2, 3], &[3]),
            ChannelName::Ghz3 | ChannelName::W3 | ChannelName::W3Variant => (&[2, 3, 4], &[4]),
            ChannelName::P1 | ChannelName::P2 | ChannelName::P3 | ChannelName::P4 => (&[3, 4, 5, 6], &[6]),
        }
    }

    pub fn default_labels(self) -> Vec<Label> {
        self.default_parties().0.to_vec()
    }
}

impl fmt::Display for ChannelName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ChannelName {
    type Err = ChannelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ChannelName::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| ChannelError::UnknownChannel(s.to_string()))
    }
}

/// An entangled channel together with the labels each party holds.
#[derive(Clone, Debug, PartialEq)]
pub struct ResourceState {
    pub name: String,
    pub state: PureState,
    pub alice: Vec<Label>,
    pub bob: Vec<Label>,
}

/// Builds a catalogued channel on its default labels with its default party split.
pub fn make(name: ChannelName) -> ResourceState {
    let (labels, bob) = name.default_parties();
    let one = Complex64::new(1.0, 0.0);
    let terms: Vec<(&str, Complex64)> = name.terms().iter().map(|t| (*t, one)).collect();
    let state = PureState::from_terms(labels.to_vec(), &terms).expect("catalog terms are well-formed");
    let alice = labels.iter().copied().filter(|l| !bob.contains(l)).collect();
    ResourceState { name: name.as_str().to_string(), state, alice, bob: bob.to_vec() }
}

/// Looks a channel up by its catalog name.
pub fn make_named(name: &str) -> Result<ResourceState, ChannelError> {
    Ok(make(name.parse()?))
}

impl ResourceState {
    /// Wraps an arbitrary state; the party split is validated.
    pub fn new(name: impl Into<String>, state: PureState, alice: Vec<Label>, bob: Vec<Label>) -> Result<Self, ChannelError> {
        ResourceState { name: name.into(), state: state.clone(), alice: Vec::new(), bob: Vec::new() }.assign_parties(alice, bob)
    }

    /// Same state, new party split. `alice ∪ bob` must partition the state's labels.
    pub fn assign_parties(&self, alice: Vec<Label>, bob: Vec<Label>) -> Result<Self, ChannelError> {
        let labels: BTreeSet<Label> = self.state.labels().iter().copied().collect();
        let a: BTreeSet<Label> = alice.iter().copied().collect();
        let b: BTreeSet<Label> = bob.iter().copied().collect();
        let valid = a.len() == alice.len()
            && b.len() == bob.len()
            && a.is_disjoint(&b)
            && a.union(&b).copied().collect::<BTreeSet<_>>() == labels;
        if !valid {
            return Err(ChannelError::InvalidPartition { alice, bob, labels: self.state.labels().to_vec() });
        }
        Ok(ResourceState { name: self.name.clone(), state: self.state.clone(), alice, bob })
    }

    /// Renames the channel's qubits positionally, carrying the party split along.
    pub fn relabel(&self, labels: &[Label]) -> Result<Self, ChannelError> {
        let old = self.state.labels();
        if labels.len() != old.len() {
            return Err(StateError::LengthMismatch { expected: old.len(), got: labels.len() }.into());
        }
        let map = |l: &Label| labels[old.iter().position(|o| o == l).expect("party label in register")];
        let state = PureState::new(labels.to_vec(), self.state.amplitudes().to_vec())?;
        let alice = self.alice.iter().map(map).collect();
        let bob = self.bob.iter().map(map).collect();
        ResourceState { name: self.name.clone(), state, alice: Vec::new(), bob: Vec::new() }.assign_parties(alice, bob)
    }

    /// Whether this is the named catalog state on some relabelling of its default register.
    pub fn catalog_name(&self) -> Option<ChannelName> {
        let name: ChannelName = self.name.parse().ok()?;
        let reference = make(name);
        (reference.state.amplitudes() == self.state.amplitudes()).then_some(name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_terms(state: &PureState, terms: &[&str], weight: f64) {
        let mut seen = 0;
        for (i, a) in state.amplitudes().iter().enumerate() {
            let bits = crate::statevec::bit_string(i, state.num_qubits());
            if terms.contains(&bits.as_str()) {
                assert!((a - Complex64::new(weight, 0.0)).norm() < 1e-15, "{bits}: {a}");
                seen += 1;
            } else {
                assert_eq!(*a, Complex64::new(0.0, 0.0), "{bits}");
            }
        }
        assert_eq!(seen, terms.len());
    }

    #[test]
    fn w3_on_default_labels() {
        let w = make(ChannelName::W3);
        assert_eq!(w.state.labels(), &[2, 3, 4]);
        assert_eq!(w.alice, vec![2, 3]);
        assert_eq!(w.bob, vec![4]);
        assert_terms(&w.state, &["100", "010", "001"], 1.0 / 3f64.sqrt());
    }

    #[test]
    fn p2_amplitudes() {
        let p2 = make(ChannelName::P2);
        assert_eq!(p2.state.labels(), &[3, 4, 5, 6]);
        assert_terms(&p2.state, &["0000", "1111", "0011", "0101", "0110"], 1.0 / 5f64.sqrt());
    }

    #[test]
    fn catalog_matches_hand_built_vectors() {
        let half = 0.5;
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert_terms(&make(ChannelName::Bell).state, &["00", "11"], h);
        assert_terms(&make(ChannelName::Ghz3).state, &["000", "111"], h);
        assert_terms(&make(ChannelName::W3Variant).state, &["101", "110", "011"], 1.0 / 3f64.sqrt());
        assert_terms(&make(ChannelName::P1).state, &["0001", "0010", "0100", "1000"], half);
        assert_terms(&make(ChannelName::P3).state, &["0000", "0101", "1000", "1110"], half);
        assert_terms(&make(ChannelName::P4).state, &["0000", "1011", "1101", "1110"], half);
    }

    #[test]
    fn every_catalog_state_is_normalised() {
        for name in ChannelName::ALL {
            let r = make(name);
            assert!((r.state.norm() - 1.0).abs() < 1e-12, "{name}");
            assert_eq!(make_named(name.as_str()).unwrap(), r);
            assert_eq!(r.catalog_name(), Some(name));
        }
        assert!(matches!(make_named("ghz4"), Err(ChannelError::UnknownChannel(_))));
    }

    #[test]
    fn reassign_w3_for_two_qubit_input() {
        let w = make(ChannelName::W3).relabel(&[3, 4, 5]).unwrap();
        let w = w.assign_parties(vec![3], vec![4, 5]).unwrap();
        assert_eq!(w.state.labels(), &[3, 4, 5]);
        assert_eq!((w.alice.as_slice(), w.bob.as_slice()), (&[3][..], &[4, 5][..]));
    }

    #[test]
    fn reassign_p1_halves() {
        let p1 = make(ChannelName::P1).assign_parties(vec![3, 4], vec![5, 6]).unwrap();
        assert_eq!(p1.bob, vec![5, 6]);
    }

    #[test]
    fn degenerate_and_invalid_partitions() {
        let p1 = make(ChannelName::P1);
        assert!(p1.assign_parties(vec![3, 4, 5, 6], vec![]).is_ok());
        assert!(p1.assign_parties(vec![3, 4], vec![4, 5, 6]).is_err());
        assert!(p1.assign_parties(vec![3, 4], vec![5]).is_err());
        assert!(p1.assign_parties(vec![3, 4, 7], vec![5, 6]).is_err());
    }
}
