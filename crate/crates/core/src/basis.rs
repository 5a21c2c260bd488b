//! Truncated Hilbert spaces for the single-node and cascaded schemes.
//!
//! Every space is the closure of the initial fragment states under all
//! Hamiltonian couplings and collapse channels, restricted to at most one
//! photon across all modes. States are ordered fragment-major, photon-minor:
//! levels follow the per-scheme level order, and within one level the
//! photon-carrying states come first (by mode index) followed by vacuum.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::BasisError;

/// Internal fragment level labels.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Level {
    G1,
    G2,
    E1,
    E2,
    E,
    F,
    L,
    Sink,
}

impl Level {
    pub fn label(&self) -> &'static str {
        match self {
            Level::G1 => "g1",
            Level::G2 => "g2",
            Level::E1 => "e1",
            Level::E2 => "e2",
            Level::E => "e",
            Level::F => "f",
            Level::L => "l",
            Level::Sink => "sink",
        }
    }

    pub fn parse(s: &str) -> Option<Level> {
        Some(match s {
            "g1" => Level::G1,
            "g2" => Level::G2,
            "e1" => Level::E1,
            "e2" => Level::E2,
            "e" => Level::E,
            "f" => Level::F,
            "l" => Level::L,
            "sink" => Level::Sink,
            _ => return None,
        })
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Scheme {
    TwoModeSingleNode,
    OneModeSingleNode,
    Cascaded,
}

impl Scheme {
    pub fn name(&self) -> &'static str {
        match self {
            Scheme::TwoModeSingleNode => "two_mode_single_node",
            Scheme::OneModeSingleNode => "one_mode_single_node",
            Scheme::Cascaded => "cascaded",
        }
    }

    pub fn parse(s: &str) -> Option<Scheme> {
        match s {
            "two_mode_single_node" => Some(Scheme::TwoModeSingleNode),
            "one_mode_single_node" => Some(Scheme::OneModeSingleNode),
            "cascaded" => Some(Scheme::Cascaded),
            _ => None,
        }
    }

    pub fn node_count(&self) -> usize {
        match self {
            Scheme::Cascaded => 2,
            _ => 1,
        }
    }

    /// Level order used for enumeration (one node).
    pub fn level_order(&self) -> &'static [Level] {
        match self {
            Scheme::TwoModeSingleNode => {
                &[Level::G1, Level::G2, Level::E1, Level::E2, Level::F, Level::L, Level::Sink]
            }
            Scheme::OneModeSingleNode | Scheme::Cascaded => {
                &[Level::G2, Level::E, Level::G1, Level::Sink]
            }
        }
    }

    /// Labels of the cavity modes, in mode-index order.
    pub fn mode_labels(&self) -> &'static [&'static str] {
        match self {
            Scheme::TwoModeSingleNode => &["w1", "w2"],
            Scheme::OneModeSingleNode => &["w2"],
            Scheme::Cascaded => &["a", "a'"],
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Node {
    Sender,
    Receiver,
}

/// One internal level of a fragment together with its energy and decay.
#[derive(Clone, Debug, PartialEq)]
pub struct FragmentLevel {
    pub label: Level,
    /// rad/us relative to a declared zero.
    pub energy: f64,
    /// rad/us (population decay rate).
    pub decay_rate: f64,
    pub decay_target: Option<Level>,
}

impl FragmentLevel {
    pub fn stable(label: Level, energy: f64) -> Self {
        FragmentLevel { label, energy, decay_rate: 0.0, decay_target: None }
    }

    pub fn decaying(label: Level, energy: f64, rate: f64, target: Level) -> Result<Self, BasisError> {
        let level = FragmentLevel { label, energy, decay_rate: rate, decay_target: Some(target) };
        level.validate()?;
        Ok(level)
    }

    pub fn validate(&self) -> Result<(), BasisError> {
        if !(self.decay_rate >= 0.0) || !self.decay_rate.is_finite() {
            return Err(BasisError::InvalidLevel(format!(
                "{}: decay rate must be finite and >= 0, got {}",
                self.label, self.decay_rate
            )));
        }
        // A zero rate with a target is allowed: the channel exists but is switched off.
        if self.decay_rate > 0.0 && self.decay_target.is_none() {
            return Err(BasisError::InvalidLevel(format!(
                "{}: positive decay rate without a decay target",
                self.label
            )));
        }
        Ok(())
    }
}

/// A cavity mode with frequency (rad/us) and field decay rate kappa (rad/us).
#[derive(Clone, Debug, PartialEq)]
pub struct CavityMode {
    pub frequency: f64,
    pub kappa: f64,
    pub node: Node,
}

impl CavityMode {
    pub fn validate_cavity(modes: &[CavityMode]) -> Result<(), BasisError> {
        if modes.len() > 2 {
            return Err(BasisError::InvalidMode(format!("{} modes in one cavity", modes.len())));
        }
        for m in modes {
            if !(m.kappa >= 0.0) {
                return Err(BasisError::InvalidMode(format!("negative kappa {}", m.kappa)));
            }
        }
        if modes.len() == 2 && modes[0].frequency == modes[1].frequency {
            return Err(BasisError::InvalidMode("degenerate mode frequencies".into()));
        }
        Ok(())
    }
}

/// A product state: one level per node and at most one photon in total.
///
/// `photon` holds the index of the occupied mode (see [`Scheme::mode_labels`]).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BasisState {
    pub levels: Vec<Level>,
    pub photon: Option<usize>,
}

impl BasisState {
    pub fn single(level: Level, photon: Option<usize>) -> Self {
        BasisState { levels: vec![level], photon }
    }

    pub fn pair(sender: Level, receiver: Level, photon: Option<usize>) -> Self {
        BasisState { levels: vec![sender, receiver], photon }
    }

    pub fn occupation(&self, mode: usize) -> u8 {
        u8::from(self.photon == Some(mode))
    }

    pub fn photon_number(&self) -> u8 {
        u8::from(self.photon.is_some())
    }

    /// Label such as `g1,w1` or `g1|e,0`.
    pub fn label(&self, scheme: Scheme) -> String {
        let levels: Vec<&str> = self.levels.iter().map(|l| l.label()).collect();
        let photon = match self.photon {
            Some(m) => scheme.mode_labels().get(m).copied().unwrap_or("?"),
            None => "0",
        };
        format!("{},{}", levels.join("|"), photon)
    }
}

/// Enumerated basis with a stable dense index.
#[derive(Clone, Debug)]
pub struct StateSpace {
    scheme: Scheme,
    states: Vec<BasisState>,
    index: HashMap<BasisState, usize>,
}

impl StateSpace {
    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[BasisState] {
        &self.states
    }

    pub fn state_at(&self, i: usize) -> Option<&BasisState> {
        self.states.get(i)
    }

    pub fn index_of(&self, state: &BasisState) -> Result<usize, BasisError> {
        self.index
            .get(state)
            .copied()
            .ok_or_else(|| BasisError::UnknownState(state.label(self.scheme)))
    }

    pub fn labels(&self) -> Vec<String> {
        self.states.iter().map(|s| s.label(self.scheme)).collect()
    }

    /// Indices of every state whose `node` level equals `level`.
    pub fn indices_with_level(&self, node: usize, level: Level) -> Vec<usize> {
        self.states
            .iter()
            .enumerate()
            .filter(|(_, s)| s.levels.get(node) == Some(&level))
            .map(|(i, _)| i)
            .collect()
    }

    /// Indices of every state holding the photon in `mode`.
    pub fn indices_with_photon(&self, mode: usize) -> Vec<usize> {
        self.states
            .iter()
            .enumerate()
            .filter(|(_, s)| s.photon == Some(mode))
            .map(|(i, _)| i)
            .collect()
    }

    fn from_set(scheme: Scheme, set: BTreeSet<BasisState>) -> Self {
        let mut states: Vec<BasisState> = set.into_iter().collect();
        states.sort_by_key(|s| ordering_key(scheme, s));
        let index = states.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
        StateSpace { scheme, states, index }
    }
}

fn ordering_key(scheme: Scheme, s: &BasisState) -> (Vec<usize>, usize) {
    let order = scheme.level_order();
    let levels = s
        .levels
        .iter()
        .map(|l| order.iter().position(|x| x == l).unwrap_or(usize::MAX))
        .collect();
    let n_modes = scheme.mode_labels().len();
    (levels, s.photon.unwrap_or(n_modes))
}

/// Initial (photonless) states the closure starts from.
pub fn seed_states(scheme: Scheme) -> Vec<BasisState> {
    match scheme {
        Scheme::TwoModeSingleNode => vec![
            BasisState::single(Level::G1, None),
            BasisState::single(Level::G2, None),
        ],
        Scheme::OneModeSingleNode => vec![
            BasisState::single(Level::G2, None),
            BasisState::single(Level::G1, None),
        ],
        Scheme::Cascaded => vec![
            BasisState::pair(Level::G2, Level::G1, None),
            BasisState::pair(Level::G1, Level::G1, None),
        ],
    }
}

/// Coherent couplings of one node as `(lower, upper, absorbed_mode)`.
///
/// `absorbed_mode` is `None` for the classical pump and the cavity mode index
/// for the vacuum coupling `|upper><lower| a`. The Hermitian partner is implied.
pub(crate) fn node_couplings(scheme: Scheme, node: usize) -> Vec<(Level, Level, Option<usize>)> {
    match scheme {
        Scheme::TwoModeSingleNode => vec![
            // pump |e_i><g_i|
            (Level::G1, Level::E1, None),
            (Level::G2, Level::E2, None),
            // cavity |e_i><f| a_i
            (Level::F, Level::E1, Some(0)),
            (Level::F, Level::E2, Some(1)),
        ],
        Scheme::OneModeSingleNode | Scheme::Cascaded => {
            let mode = if scheme == Scheme::Cascaded { node } else { 0 };
            vec![
                (Level::G2, Level::E, None),
                (Level::G1, Level::E, Some(mode)),
            ]
        }
    }
}

pub(crate) fn node_decays(scheme: Scheme) -> Vec<(Level, Level)> {
    match scheme {
        Scheme::TwoModeSingleNode => vec![
            (Level::E1, Level::Sink),
            (Level::E2, Level::Sink),
            (Level::F, Level::L),
        ],
        Scheme::OneModeSingleNode | Scheme::Cascaded => vec![(Level::E, Level::Sink)],
    }
}

/// All states one coupling, decay, photon loss or cascade hop away from `s`.
pub(crate) fn neighbours(scheme: Scheme, s: &BasisState) -> Vec<BasisState> {
    let mut out = Vec::new();
    for node in 0..s.levels.len() {
        for (from, to, absorbed) in node_couplings(scheme, node) {
            match absorbed {
                // classical pump: level change only
                None => {
                    if s.levels[node] == from || s.levels[node] == to {
                        let mut t = s.clone();
                        t.levels[node] = if s.levels[node] == from { to } else { from };
                        out.push(t);
                    }
                }
                // cavity: from + photon(mode) <-> to + vacuum
                Some(mode) => {
                    if s.levels[node] == from && s.photon == Some(mode) {
                        let mut t = s.clone();
                        t.levels[node] = to;
                        t.photon = None;
                        out.push(t);
                    }
                    if s.levels[node] == to && s.photon.is_none() {
                        let mut t = s.clone();
                        t.levels[node] = from;
                        t.photon = Some(mode);
                        out.push(t);
                    }
                }
            }
        }
        for (from, to) in node_decays(scheme) {
            if s.levels[node] == from {
                let mut t = s.clone();
                t.levels[node] = to;
                out.push(t);
            }
        }
    }
    if s.photon.is_some() {
        // cavity leakage a_i
        out.push(BasisState { levels: s.levels.clone(), photon: None });
    }
    if scheme == Scheme::Cascaded {
        // a'^dag a and its adjoint
        match s.photon {
            Some(0) => out.push(BasisState { levels: s.levels.clone(), photon: Some(1) }),
            Some(1) => out.push(BasisState { levels: s.levels.clone(), photon: Some(0) }),
            _ => {}
        }
    }
    out
}

/// Build the closed single-excitation space for `scheme`.
pub fn build_space(scheme: Scheme, node_count: usize) -> Result<StateSpace, BasisError> {
    if node_count != scheme.node_count() {
        return Err(BasisError::Unsupported { scheme: scheme.name().into(), node_count });
    }
    let mut seen: BTreeSet<BasisState> = BTreeSet::new();
    let mut frontier = seed_states(scheme);
    while let Some(s) = frontier.pop() {
        if !seen.insert(s.clone()) {
            continue;
        }
        for t in neighbours(scheme, &s) {
            if !seen.contains(&t) {
                frontier.push(t);
            }
        }
    }
    debug_assert!(seen.iter().all(|s| s.photon_number() <= 1));
    Ok(StateSpace::from_set(scheme, seen))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(space: &StateSpace) -> Vec<String> {
        space.labels()
    }

    #[test]
    fn two_mode_ordering() {
        let space = build_space(Scheme::TwoModeSingleNode, 1).unwrap();
        assert_eq!(
            labels(&space),
            vec![
                "g1,0", "g2,0", "e1,0", "e2,0", "f,w1", "f,w2", "f,0", "l,w1", "l,w2", "l,0",
                "sink,0"
            ]
        );
        assert_eq!(space.index_of(&BasisState::single(Level::G1, None)).unwrap(), 0);
    }

    #[test]
    fn one_mode_ordering() {
        let space = build_space(Scheme::OneModeSingleNode, 1).unwrap();
        assert_eq!(labels(&space), vec!["g2,0", "e,0", "g1,w2", "g1,0", "sink,0"]);
    }

    #[test]
    fn cascaded_space() {
        let space = build_space(Scheme::Cascaded, 2).unwrap();
        assert_eq!(
            labels(&space),
            vec![
                "g2|g1,0", "e|g1,0", "g1|g2,0", "g1|e,0", "g1|g1,a", "g1|g1,a'", "g1|g1,0",
                "g1|sink,0", "sink|g1,0"
            ]
        );
    }

    #[test]
    fn rejects_bad_node_count() {
        assert!(build_space(Scheme::Cascaded, 1).is_err());
        assert!(build_space(Scheme::TwoModeSingleNode, 2).is_err());
    }

    #[test]
    fn unknown_state() {
        let space = build_space(Scheme::OneModeSingleNode, 1).unwrap();
        let err = space.index_of(&BasisState::single(Level::E, Some(0))).unwrap_err();
        assert!(matches!(err, BasisError::UnknownState(_)));
    }

    #[test]
    fn index_round_trip() {
        for scheme in [Scheme::TwoModeSingleNode, Scheme::OneModeSingleNode, Scheme::Cascaded] {
            let space = build_space(scheme, scheme.node_count()).unwrap();
            for (i, s) in space.states().iter().enumerate() {
                assert_eq!(space.index_of(s).unwrap(), i);
                assert_eq!(space.state_at(i).unwrap(), s);
            }
        }
    }

    #[test]
    fn level_validation() {
        assert!(FragmentLevel::decaying(Level::E, 0.0, -1.0, Level::Sink).is_err());
        let mut lvl = FragmentLevel::stable(Level::F, 0.0);
        lvl.decay_rate = 1.0;
        assert!(lvl.validate().is_err());
        assert!(FragmentLevel::decaying(Level::F, 0.0, 25.0, Level::L).is_ok());
    }

    #[test]
    fn mode_validation() {
        let m = |f: f64, k: f64| CavityMode { frequency: f, kappa: k, node: Node::Sender };
        assert!(CavityMode::validate_cavity(&[m(1.0, 1.0), m(2.0, 1.0)]).is_ok());
        assert!(CavityMode::validate_cavity(&[m(1.0, 1.0), m(1.0, 1.0)]).is_err());
        assert!(CavityMode::validate_cavity(&[m(1.0, -1.0)]).is_err());
        assert!(CavityMode::validate_cavity(&[m(1.0, 1.0), m(2.0, 1.0), m(3.0, 1.0)]).is_err());
    }
}
