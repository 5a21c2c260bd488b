//! Rotating-frame Hamiltonians, collapse channels and the cascaded link for
//! the single-node and two-node schemes.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::basis::{build_space, node_couplings, node_decays, BasisState, Level, Scheme, StateSpace};
use crate::error::ModelError;
use crate::pulse::{self, PulseConfig, PulseOrder};

/// Speed of light in um/us.
pub const SPEED_OF_LIGHT: f64 = 2.997_924_58e8;

/// Largest accepted two-photon detuning, rad/us.
pub const RAMAN_TOLERANCE: f64 = 1e-3;

/// Fragment label: `A` takes the upper Doppler sign, `B` the lower one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FragmentSign {
    A,
    B,
}

impl FragmentSign {
    pub fn sign(&self) -> f64 {
        match self {
            FragmentSign::A => 1.0,
            FragmentSign::B => -1.0,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            FragmentSign::A => "A",
            FragmentSign::B => "B",
        }
    }

    pub fn parse(s: &str) -> Option<FragmentSign> {
        match s {
            "A" | "a" | "L" | "l" => Some(FragmentSign::A),
            "B" | "b" | "R" | "r" => Some(FragmentSign::B),
            _ => None,
        }
    }
}

/// Physical parameters of one node (fragment, cavity and pump).
///
/// Frequencies and rates are angular (rad/us); `v_x` in um/us.
#[derive(Clone, Debug, PartialEq)]
pub struct NodeConfig {
    pub sign: FragmentSign,
    pub v_x: f64,
    pub levels: Vec<crate::basis::FragmentLevel>,
    /// Laboratory pump frequencies, one per pumped transition.
    pub pump_frequencies: Vec<f64>,
    /// Cavity mode frequencies, one per mode of this node.
    pub mode_frequencies: Vec<f64>,
    /// Field decay rate of every mode in this cavity.
    pub kappa: f64,
    pub pulse: PulseConfig,
}

impl NodeConfig {
    pub fn level(&self, label: Level) -> Option<&crate::basis::FragmentLevel> {
        self.levels.iter().find(|l| l.label == label)
    }

    fn energy(&self, label: Level) -> Result<f64, ModelError> {
        match label {
            Level::Sink | Level::L => Ok(self.level(label).map_or(0.0, |l| l.energy)),
            _ => self
                .level(label)
                .map(|l| l.energy)
                .ok_or_else(|| ModelError::Inconsistent(format!("missing level {label}"))),
        }
    }

    pub fn pump_wavenumber(&self, pump: usize) -> f64 {
        self.pump_frequencies.get(pump).copied().unwrap_or(0.0) / SPEED_OF_LIGHT
    }

    /// Doppler shift `k_p v_x` of pump `pump` (unsigned).
    pub fn doppler_shift(&self, pump: usize) -> f64 {
        self.pump_wavenumber(pump) * self.v_x
    }

    /// Pump frequency in the fragment's rest frame.
    pub fn pump_seen(&self, pump: usize) -> f64 {
        self.pump_frequencies.get(pump).copied().unwrap_or(0.0)
            - self.sign.sign() * self.doppler_shift(pump)
    }

    /// Mode frequencies that make every Raman transition two-photon resonant.
    pub fn resonant_mode_frequencies(&self, scheme: Scheme) -> Result<Vec<f64>, ModelError> {
        match scheme {
            Scheme::TwoModeSingleNode => {
                let f = self.energy(Level::F)?;
                Ok(vec![
                    self.pump_seen(0) - (f - self.energy(Level::G1)?),
                    self.pump_seen(1) - (f - self.energy(Level::G2)?),
                ])
            }
            Scheme::OneModeSingleNode | Scheme::Cascaded => {
                Ok(vec![self.pump_seen(0) - (self.energy(Level::G1)? - self.energy(Level::G2)?)])
            }
        }
    }

    fn validate(&self, scheme: Scheme) -> Result<(), ModelError> {
        self.pulse.validate()?;
        for level in &self.levels {
            level.validate()?;
        }
        let (pumps, modes) = match scheme {
            Scheme::TwoModeSingleNode => (2, 2),
            _ => (1, 1),
        };
        if self.pump_frequencies.len() != pumps {
            return Err(ModelError::Inconsistent(format!(
                "{scheme} needs {pumps} pump frequencies, got {}",
                self.pump_frequencies.len()
            )));
        }
        if self.mode_frequencies.len() != modes {
            return Err(ModelError::ModeMismatch(format!(
                "{scheme} needs {modes} mode frequencies, got {}",
                self.mode_frequencies.len()
            )));
        }
        if self.pulse.eta0.len() != modes {
            return Err(ModelError::ModeMismatch(format!(
                "{scheme} needs {modes} peak couplings, got {}",
                self.pulse.eta0.len()
            )));
        }
        let cavity: Vec<crate::basis::CavityMode> = self
            .mode_frequencies
            .iter()
            .map(|&frequency| crate::basis::CavityMode {
                frequency,
                kappa: self.kappa,
                node: crate::basis::Node::Sender,
            })
            .collect();
        crate::basis::CavityMode::validate_cavity(&cavity)?;
        if !self.v_x.is_finite() {
            return Err(ModelError::Inconsistent("v_x must be finite".into()));
        }
        for (from, to) in node_decays(scheme) {
            if let Some(level) = self.level(from) {
                if level.decay_rate > 0.0 && level.decay_target != Some(to) {
                    return Err(ModelError::Inconsistent(format!(
                        "level {from} must decay to {to}"
                    )));
                }
            }
        }
        Ok(())
    }

    fn decay_rate(&self, label: Level) -> f64 {
        self.level(label).map_or(0.0, |l| l.decay_rate)
    }
}

/// Time dependence of a coherent drive.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Envelope {
    Constant(f64),
    /// Vacuum Rabi frequency of a node's local cavity mode.
    Cavity { node: usize, mode: usize },
    /// Pump Rabi frequency of a node.
    Pump { node: usize },
}

/// Coupling `envelope(t) * amplitude * (|upper><lower| + h.c.)` summed over pairs.
#[derive(Clone, Debug, PartialEq)]
pub struct Drive {
    pub envelope: Envelope,
    /// `(upper, lower, amplitude)` index pairs.
    pub couplings: Vec<(usize, usize, f64)>,
}

/// Collapse operator `sum amplitude |to><from|` with amplitude `sqrt(rate)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CollapseChannel {
    pub name: String,
    /// Population decay rate carried by the channel.
    pub rate: f64,
    /// `(to, from)` index pairs.
    pub jumps: Vec<(usize, usize)>,
}

impl CollapseChannel {
    pub fn amplitude(&self) -> f64 {
        self.rate.sqrt()
    }

    pub fn to_dense(&self, dim: usize) -> DMatrix<Complex64> {
        let mut m = DMatrix::zeros(dim, dim);
        let amp = Complex64::new(self.amplitude(), 0.0);
        for &(to, from) in &self.jumps {
            m[(to, from)] += amp;
        }
        m
    }
}

/// Unidirectional link: the source mode's output drives the target mode.
#[derive(Clone, Debug, PartialEq)]
pub struct CascadeLink {
    pub source_mode: usize,
    pub target_mode: usize,
    /// Coefficient of the cascade term (2 kappa for equal cavities).
    pub strength: f64,
    /// `(vacuum, photon)` pairs of the source annihilation operator.
    pub source_lowering: Vec<(usize, usize)>,
    /// `(vacuum, photon)` pairs of the target annihilation operator.
    pub target_lowering: Vec<(usize, usize)>,
}

/// Per-mode bookkeeping used by the emission observables.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ModeInfo {
    pub label: String,
    pub node: usize,
    /// `2 kappa` of the mode's output coupler.
    pub output_rate: f64,
    pub photon_states: Vec<usize>,
}

/// Two endpoints of one STIRAP branch, used for the dark-state overlap.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DarkPair {
    pub node: usize,
    pub local_mode: usize,
    /// Index of the state weighted by the cavity coupling.
    pub initial: usize,
    /// Index of the state weighted by the pump coupling.
    pub target: usize,
}

#[derive(Clone, Debug)]
pub struct OpenSystemModel {
    space: StateSpace,
    pulses: Vec<PulseConfig>,
    diagonal: Vec<f64>,
    drives: Vec<Drive>,
    channels: Vec<CollapseChannel>,
    cascade: Option<CascadeLink>,
    modes: Vec<ModeInfo>,
    dark_pairs: Vec<DarkPair>,
    window: (f64, f64),
}

/// Raw ingredients for a hand-built model.
#[derive(Clone, Debug)]
pub struct ModelParts {
    pub space: StateSpace,
    pub pulses: Vec<PulseConfig>,
    pub diagonal: Vec<f64>,
    pub drives: Vec<Drive>,
    pub channels: Vec<CollapseChannel>,
    pub cascade: Option<CascadeLink>,
    pub modes: Vec<ModeInfo>,
    pub dark_pairs: Vec<DarkPair>,
    pub window: (f64, f64),
}

impl OpenSystemModel {
    pub fn from_parts(parts: ModelParts) -> Result<Self, ModelError> {
        let dim = parts.space.dim();
        if parts.diagonal.len() != dim {
            return Err(ModelError::Inconsistent(format!(
                "diagonal has {} entries for dimension {dim}",
                parts.diagonal.len()
            )));
        }
        let in_range = |i: usize| i < dim;
        let drives_ok = parts
            .drives
            .iter()
            .flat_map(|d| d.couplings.iter())
            .all(|&(u, l, _)| in_range(u) && in_range(l) && u != l);
        let channels_ok = parts
            .channels
            .iter()
            .all(|c| c.rate >= 0.0 && c.jumps.iter().all(|&(a, b)| in_range(a) && in_range(b)));
        if !drives_ok || !channels_ok {
            return Err(ModelError::Inconsistent("operator index outside the space".into()));
        }
        for d in &parts.drives {
            match d.envelope {
                Envelope::Cavity { node, .. } | Envelope::Pump { node } if node >= parts.pulses.len() => {
                    return Err(ModelError::Inconsistent(format!("drive refers to missing node {node}")));
                }
                _ => {}
            }
        }
        if let Some(link) = &parts.cascade {
            let pairs_ok = link
                .source_lowering
                .iter()
                .chain(&link.target_lowering)
                .all(|&(a, b)| in_range(a) && in_range(b));
            if !pairs_ok || link.source_mode == link.target_mode {
                return Err(ModelError::ModeMismatch("invalid cascade link".into()));
            }
        }
        if !(parts.window.0 < parts.window.1) {
            return Err(ModelError::Inconsistent("empty integration window".into()));
        }
        Ok(OpenSystemModel {
            space: parts.space,
            pulses: parts.pulses,
            diagonal: parts.diagonal,
            drives: parts.drives,
            channels: parts.channels,
            cascade: parts.cascade,
            modes: parts.modes,
            dark_pairs: parts.dark_pairs,
            window: parts.window,
        })
    }

    pub fn space(&self) -> &StateSpace {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn pulses(&self) -> &[PulseConfig] {
        &self.pulses
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diagonal
    }

    pub fn drives(&self) -> &[Drive] {
        &self.drives
    }

    pub fn channels(&self) -> &[CollapseChannel] {
        &self.channels
    }

    pub fn cascade(&self) -> Option<&CascadeLink> {
        self.cascade.as_ref()
    }

    pub fn modes(&self) -> &[ModeInfo] {
        &self.modes
    }

    pub fn dark_pairs(&self) -> &[DarkPair] {
        &self.dark_pairs
    }

    pub fn window(&self) -> (f64, f64) {
        self.window
    }

    /// True when no channel and no cascade term can remove or route probability.
    pub fn is_lossless(&self) -> bool {
        self.channels.iter().all(|c| c.rate == 0.0 || c.jumps.is_empty())
            && self.cascade.as_ref().is_none_or(|c| c.strength == 0.0)
    }

    pub fn envelope(&self, envelope: Envelope, t: f64) -> f64 {
        match envelope {
            Envelope::Constant(x) => x,
            Envelope::Cavity { node, mode } => pulse::eta(&self.pulses[node], mode, t),
            Envelope::Pump { node } => pulse::omega_p(&self.pulses[node], t),
        }
    }

    /// Write the real symmetric Hamiltonian at time `t` into `out`.
    pub fn hamiltonian_real_into(&self, t: f64, out: &mut DMatrix<f64>) {
        let n = self.dim();
        if out.nrows() != n || out.ncols() != n {
            *out = DMatrix::zeros(n, n);
        } else {
            out.fill(0.0);
        }
        for (i, &d) in self.diagonal.iter().enumerate() {
            out[(i, i)] = d;
        }
        for drive in &self.drives {
            let f = self.envelope(drive.envelope, t);
            if f == 0.0 {
                continue;
            }
            for &(u, l, amp) in &drive.couplings {
                out[(u, l)] += f * amp;
                out[(l, u)] += f * amp;
            }
        }
    }

    pub fn hamiltonian(&self, t: f64) -> DMatrix<Complex64> {
        let mut real = DMatrix::zeros(self.dim(), self.dim());
        self.hamiltonian_real_into(t, &mut real);
        real.map(|x| Complex64::new(x, 0.0))
    }

    /// `max |H - H^dag|` relative to the max-norm of `H`.
    pub fn hermiticity_residual(&self, t: f64) -> f64 {
        let h = self.hamiltonian(t);
        let norm = h.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let diff = (&h - h.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if norm == 0.0 {
            diff
        } else {
            diff / norm
        }
    }

    /// Copy of the model with every dissipative term removed.
    pub fn without_dissipation(&self) -> OpenSystemModel {
        let mut m = self.clone();
        m.channels.clear();
        m.cascade = None;
        m
    }
}

/// Parameters of the link between two cascaded nodes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinkConfig {
    /// Extra field loss rate of the propagating photon (rad/us).
    pub kappa_loss: f64,
    /// Use `sqrt(2 kappa_s 2 kappa_r)` instead of `2 kappa_s`.
    pub unequal_kappa: bool,
}

impl Default for LinkConfig {
    fn default() -> Self {
        LinkConfig { kappa_loss: 0.0, unequal_kappa: false }
    }
}

pub fn build_two_mode_model(config: &NodeConfig) -> Result<OpenSystemModel, ModelError> {
    assemble(Scheme::TwoModeSingleNode, &[config], None)
}

pub fn build_one_mode_model(config: &NodeConfig) -> Result<OpenSystemModel, ModelError> {
    assemble(Scheme::OneModeSingleNode, &[config], None)
}

pub fn build_cascaded_model(
    sender: &NodeConfig,
    receiver: &NodeConfig,
    link: LinkConfig,
) -> Result<OpenSystemModel, ModelError> {
    if receiver.pulse.order != PulseOrder::PumpFirst {
        return Err(ModelError::Inconsistent("receiver pulses must be pump_first".into()));
    }
    if !(link.kappa_loss >= 0.0) {
        return Err(ModelError::Inconsistent(format!("kappa_loss must be >= 0, got {}", link.kappa_loss)));
    }
    assemble(Scheme::Cascaded, &[sender, receiver], Some(link))
}

fn pump_index(scheme: Scheme, lower: Level) -> usize {
    match (scheme, lower) {
        (Scheme::TwoModeSingleNode, Level::G2) => 1,
        _ => 0,
    }
}

fn local_mode(scheme: Scheme, mode: usize) -> usize {
    match scheme {
        Scheme::Cascaded => 0,
        _ => mode,
    }
}

fn is_excited(level: Level) -> bool {
    matches!(level, Level::E | Level::E1 | Level::E2)
}

/// Edge of the coherent coupling graph with the frame-frequency change
/// from `lower` to `upper`.
struct Edge {
    upper: usize,
    lower: usize,
    frame_shift: f64,
}

fn assemble(
    scheme: Scheme,
    nodes: &[&NodeConfig],
    link: Option<LinkConfig>,
) -> Result<OpenSystemModel, ModelError> {
    for node in nodes {
        node.validate(scheme)?;
    }
    let space = build_space(scheme, nodes.len())?;
    let dim = space.dim();
    let states: Vec<BasisState> = space.states().to_vec();

    let mode_node = |mode: usize| if scheme == Scheme::Cascaded { mode } else { 0 };
    let mode_frequency =
        |mode: usize| nodes[mode_node(mode)].mode_frequencies[local_mode(scheme, mode)];

    let total_energy = |s: &BasisState| -> Result<f64, ModelError> {
        let mut e = 0.0;
        for (n, &level) in s.levels.iter().enumerate() {
            e += nodes[n].energy(level)?;
        }
        if let Some(m) = s.photon {
            e += mode_frequency(m);
        }
        Ok(e)
    };

    let mut drives = Vec::new();
    let mut edges = Vec::new();
    for (n, node) in nodes.iter().enumerate() {
        for (lower, upper, absorbed) in node_couplings(scheme, n) {
            let mut couplings = Vec::new();
            let frame_shift = match absorbed {
                None => node.pump_seen(pump_index(scheme, lower)),
                Some(_) => 0.0,
            };
            for (i, s) in states.iter().enumerate() {
                if s.levels[n] != lower || (absorbed.is_some() && s.photon != absorbed) {
                    continue;
                }
                let mut t = s.clone();
                t.levels[n] = upper;
                if absorbed.is_some() {
                    t.photon = None;
                }
                let j = space.index_of(&t)?;
                let amp = if absorbed.is_some() { 1.0 } else { -1.0 };
                couplings.push((j, i, amp));
                edges.push(Edge { upper: j, lower: i, frame_shift });
            }
            let envelope = match absorbed {
                None => Envelope::Pump { node: n },
                Some(m) => Envelope::Cavity { node: n, mode: local_mode(scheme, m) },
            };
            if !couplings.is_empty() {
                drives.push(Drive { envelope, couplings });
            }
        }
    }
    if scheme == Scheme::Cascaded {
        for (i, s) in states.iter().enumerate() {
            if s.photon == Some(0) {
                let mut t = s.clone();
                t.photon = Some(1);
                if let Ok(j) = space.index_of(&t) {
                    edges.push(Edge { upper: j, lower: i, frame_shift: 0.0 });
                }
            }
        }
    }

    // Rotating frame: propagate frame frequencies from the seeds along coherent edges.
    let mut frame: Vec<Option<f64>> = vec![None; dim];
    let mut stack = Vec::new();
    for seed in crate::basis::seed_states(scheme) {
        let i = space.index_of(&seed)?;
        frame[i] = Some(total_energy(&seed)?);
        stack.push(i);
    }
    while let Some(i) = stack.pop() {
        let fi = frame[i].expect("visited states carry a frame");
        for e in &edges {
            let (other, f_other) = if e.lower == i {
                (e.upper, fi + e.frame_shift)
            } else if e.upper == i {
                (e.lower, fi - e.frame_shift)
            } else {
                continue;
            };
            if frame[other].is_none() {
                frame[other] = Some(f_other);
                stack.push(other);
            }
        }
    }
    let mut diagonal = vec![0.0; dim];
    for (i, s) in states.iter().enumerate() {
        if let Some(f) = frame[i] {
            diagonal[i] = total_energy(s)? - f;
            if !s.levels.iter().any(|&l| is_excited(l)) && diagonal[i].abs() > RAMAN_TOLERANCE {
                return Err(ModelError::RamanDetuning {
                    branch: s.label(scheme),
                    detuning: diagonal[i],
                    tolerance: RAMAN_TOLERANCE,
                });
            }
        }
    }

    let mut channels = Vec::new();
    for (n, node) in nodes.iter().enumerate() {
        for (from, to) in node_decays(scheme) {
            let rate = node.decay_rate(from);
            let jumps = level_jumps(&space, n, from, to)?;
            let prefix = if nodes.len() > 1 { format!("node{n}:") } else { String::new() };
            channels.push(CollapseChannel { name: format!("{prefix}{from}->{to}"), rate, jumps });
        }
    }
    let mut modes = Vec::new();
    for (m, label) in scheme.mode_labels().iter().enumerate() {
        let node = mode_node(m);
        let output_rate = 2.0 * nodes[node].kappa;
        channels.push(CollapseChannel {
            name: format!("leak:{label}"),
            rate: output_rate,
            jumps: lowering_pairs(&space, m)?,
        });
        modes.push(ModeInfo {
            label: label.to_string(),
            node,
            output_rate,
            photon_states: space.indices_with_photon(m),
        });
    }

    let mut cascade = None;
    if let Some(link) = link {
        if link.kappa_loss > 0.0 {
            channels.push(CollapseChannel {
                name: "link_loss".into(),
                rate: 2.0 * link.kappa_loss,
                jumps: lowering_pairs(&space, 0)?,
            });
        }
        let (ks, kr) = (nodes[0].kappa, nodes[1].kappa);
        let strength = if link.unequal_kappa { (2.0 * ks * 2.0 * kr).sqrt() } else { 2.0 * ks };
        cascade = Some(CascadeLink {
            source_mode: 0,
            target_mode: 1,
            strength,
            source_lowering: lowering_pairs(&space, 0)?,
            target_lowering: lowering_pairs(&space, 1)?,
        });
    }

    let dark_pairs = match scheme {
        Scheme::TwoModeSingleNode => vec![
            dark_pair(&space, Level::G1, Level::F, 0)?,
            dark_pair(&space, Level::G2, Level::F, 1)?,
        ],
        Scheme::OneModeSingleNode => vec![dark_pair(&space, Level::G2, Level::G1, 0)?],
        Scheme::Cascaded => Vec::new(),
    };

    let window = pulse::union_window(nodes.iter().map(|n| pulse::integration_window(&n.pulse)))
        .expect("at least one node");
    OpenSystemModel::from_parts(ModelParts {
        space,
        pulses: nodes.iter().map(|n| n.pulse.clone()).collect(),
        diagonal,
        drives,
        channels,
        cascade,
        modes,
        dark_pairs,
        window,
    })
}

fn dark_pair(space: &StateSpace, initial: Level, target: Level, mode: usize) -> Result<DarkPair, ModelError> {
    Ok(DarkPair {
        node: 0,
        local_mode: mode,
        initial: space.index_of(&BasisState::single(initial, None))?,
        target: space.index_of(&BasisState::single(target, Some(mode)))?,
    })
}

fn level_jumps(space: &StateSpace, node: usize, from: Level, to: Level) -> Result<Vec<(usize, usize)>, ModelError> {
    let mut jumps = Vec::new();
    for (i, s) in space.states().iter().enumerate() {
        if s.levels[node] == from {
            let mut t = s.clone();
            t.levels[node] = to;
            jumps.push((space.index_of(&t)?, i));
        }
    }
    Ok(jumps)
}

/// `(vacuum, photon)` pairs of the annihilation operator of `mode`.
fn lowering_pairs(space: &StateSpace, mode: usize) -> Result<Vec<(usize, usize)>, ModelError> {
    let mut pairs = Vec::new();
    for i in space.indices_with_photon(mode) {
        let mut t = space.states()[i].clone();
        t.photon = None;
        pairs.push((space.index_of(&t)?, i));
    }
    Ok(pairs)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::basis::FragmentLevel;
    use std::f64::consts::TAU;

    /// Two-mode node with round numbers (not a physical preset).
    pub(crate) fn toy_two_mode(sign: FragmentSign) -> NodeConfig {
        let e1 = TAU * 4.0e8;
        let mut node = NodeConfig {
            sign,
            v_x: 5.0,
            levels: vec![
                FragmentLevel::stable(Level::G1, 0.0),
                FragmentLevel::stable(Level::G2, TAU * 1700.0),
                FragmentLevel::decaying(Level::E1, e1, 10.0, Level::Sink).unwrap(),
                FragmentLevel::decaying(Level::E2, e1 + TAU * 1.0e5, 10.0, Level::Sink).unwrap(),
                FragmentLevel::decaying(Level::F, TAU * 3.0e8, 25.0, Level::L).unwrap(),
                FragmentLevel::stable(Level::L, 0.0),
            ],
            pump_frequencies: vec![e1, e1 + TAU * 1.0e5 - TAU * 1700.0],
            mode_frequencies: vec![],
            kappa: TAU * 5.0,
            pulse: PulseConfig {
                eta0: vec![TAU * 38.0, TAU * 54.0],
                omega0: TAU * 30.0,
                w_c: 10.0,
                w_p: 10.0,
                d: 10.0,
                v: 11.18,
                order: PulseOrder::CavityFirst,
                t_offset: 0.0,
            },
        };
        node.mode_frequencies = node.resonant_mode_frequencies(Scheme::TwoModeSingleNode).unwrap();
        node
    }

    #[allow(clippy::approx_constant)]
    pub(crate) fn toy_one_mode(order: PulseOrder) -> NodeConfig {
        let e = TAU * 5.0e8;
        let mut node = NodeConfig {
            sign: FragmentSign::A,
            v_x: 5.0,
            levels: vec![
                FragmentLevel::stable(Level::G1, 0.0),
                FragmentLevel::stable(Level::G2, TAU * 1771.0),
                FragmentLevel::decaying(Level::E, e, 6.28, Level::Sink).unwrap(),
            ],
            pump_frequencies: vec![e - TAU * 1771.0],
            mode_frequencies: vec![],
            kappa: TAU * 5.0,
            pulse: PulseConfig {
                eta0: vec![TAU * 22.0],
                omega0: TAU * 30.0,
                w_c: 10.0,
                w_p: 10.0,
                d: 10.0,
                v: 11.18,
                order,
                t_offset: 0.0,
            },
        };
        node.mode_frequencies = node.resonant_mode_frequencies(Scheme::OneModeSingleNode).unwrap();
        node
    }

    fn idx(m: &OpenSystemModel, s: BasisState) -> usize {
        m.space().index_of(&s).unwrap()
    }

    #[test]
    fn two_mode_structure() {
        let node = toy_two_mode(FragmentSign::A);
        let m = build_two_mode_model(&node).unwrap();
        assert_eq!(m.dim(), 11);
        let h = m.hamiltonian(0.0);
        let e1 = idx(&m, BasisState::single(Level::E1, None));
        let g1 = idx(&m, BasisState::single(Level::G1, None));
        let fw1 = idx(&m, BasisState::single(Level::F, Some(0)));
        let pulse = &node.pulse;
        assert!((h[(e1, fw1)].re - pulse::eta(pulse, 0, 0.0)).abs() < 1e-12);
        assert!((h[(e1, g1)].re + pulse::omega_p(pulse, 0.0)).abs() < 1e-12);
        // Doppler detuning on the excited level, two-photon resonance on f
        assert!((m.diagonal()[e1] - node.doppler_shift(0)).abs() < 1e-6);
        assert!(m.diagonal()[fw1].abs() < RAMAN_TOLERANCE);
        let mb = build_two_mode_model(&toy_two_mode(FragmentSign::B)).unwrap();
        assert!((mb.diagonal()[e1] + node.doppler_shift(0)).abs() < 1e-6);
        assert_eq!(m.modes().len(), 2);
        assert_eq!(m.modes()[0].photon_states.len(), 2);
        assert!((m.modes()[0].output_rate - TAU * 10.0).abs() < 1e-12);
    }

    #[test]
    fn hermitian_at_many_times() {
        let m = build_two_mode_model(&toy_two_mode(FragmentSign::A)).unwrap();
        let (a, b) = m.window();
        for k in 0..1000 {
            let t = a + (b - a) * k as f64 / 999.0;
            assert!(m.hermiticity_residual(t) < 1e-12);
        }
    }

    #[test]
    fn tails_are_negligible() {
        let node = toy_two_mode(FragmentSign::A);
        let m = build_two_mode_model(&node).unwrap();
        let h = m.hamiltonian(m.window().0);
        let bound = 1e-10 * (node.pulse.eta0[1] + node.pulse.omega0);
        for i in 0..m.dim() {
            for j in 0..m.dim() {
                if i != j {
                    assert!(h[(i, j)].norm() <= bound);
                }
            }
        }
    }

    #[test]
    fn detuned_mode_rejected() {
        let mut node = toy_two_mode(FragmentSign::A);
        node.mode_frequencies[1] += 1.0;
        let err = build_two_mode_model(&node).unwrap_err();
        assert!(matches!(err, ModelError::RamanDetuning { .. }));
        // resonant for A is not resonant for B
        let mut b = toy_two_mode(FragmentSign::B);
        b.mode_frequencies = node.resonant_mode_frequencies(Scheme::TwoModeSingleNode).unwrap();
        assert!(build_two_mode_model(&b).is_err());
    }

    #[test]
    fn one_mode_structure() {
        let m = build_one_mode_model(&toy_one_mode(PulseOrder::CavityFirst)).unwrap();
        assert_eq!(m.dim(), 5);
        let g1 = idx(&m, BasisState::single(Level::G1, None));
        let h = m.hamiltonian(0.0);
        for j in 0..m.dim() {
            if j != g1 {
                assert_eq!(h[(g1, j)].norm(), 0.0);
            }
        }
        assert_eq!(m.channels().len(), 2);
    }

    #[test]
    fn cascaded_structure() {
        let s = toy_one_mode(PulseOrder::CavityFirst);
        let mut r = toy_one_mode(PulseOrder::PumpFirst);
        r.pulse.t_offset = 2.0;
        let m = build_cascaded_model(&s, &r, LinkConfig { kappa_loss: 1.0, unequal_kappa: false }).unwrap();
        assert_eq!(m.dim(), 9);
        let link = m.cascade().unwrap();
        assert!((link.strength - 2.0 * s.kappa).abs() < 1e-12);
        assert_eq!(link.source_lowering.len(), 1);
        assert!(m.channels().iter().any(|c| c.name == "link_loss" && (c.rate - 2.0).abs() < 1e-12));
        assert!(m.window().1 > pulse::integration_window(&s.pulse).1);
        assert!(build_cascaded_model(&s, &s, LinkConfig::default()).is_err());
        let mut r2 = r.clone();
        r2.kappa = 2.0 * s.kappa;
        let m2 = build_cascaded_model(&s, &r2, LinkConfig { kappa_loss: 0.0, unequal_kappa: true }).unwrap();
        assert!((m2.cascade().unwrap().strength - 2.0 * s.kappa * 2.0f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn missing_level_is_reported() {
        let mut node = toy_one_mode(PulseOrder::CavityFirst);
        node.levels.retain(|l| l.label != Level::E);
        assert!(build_one_mode_model(&node).is_err());
    }

    #[test]
    fn wrong_decay_target_rejected() {
        let mut node = toy_two_mode(FragmentSign::A);
        node.levels[4].decay_target = Some(Level::Sink);
        assert!(matches!(build_two_mode_model(&node), Err(ModelError::Inconsistent(_))));
    }
}
