//! Closed-form validity conditions, repetition rate and recoil estimate.

use serde::Serialize;

use crate::basis::Level;
use crate::error::FeasibilityError;
use crate::model::NodeConfig;

/// Default margin required for a "much greater than" condition.
pub const DEFAULT_THRESHOLD: f64 = 10.0;

/// Default size of the dissociation region, um.
pub const DEFAULT_REGION: f64 = 10.0;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConditionReport {
    pub condition: String,
    /// Term with the smallest margin.
    pub limiting_term: String,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub threshold: f64,
    pub pass: bool,
}

fn report(condition: &str, threshold: f64, terms: Vec<(String, f64, f64)>) -> ConditionReport {
    let ratio_of = |lhs: f64, rhs: f64| if rhs == 0.0 { if lhs > 0.0 { f64::INFINITY } else { 0.0 } } else { lhs / rhs };
    let (limiting_term, lhs, rhs) = terms
        .into_iter()
        .min_by(|a, b| ratio_of(a.1, a.2).total_cmp(&ratio_of(b.1, b.2)))
        .unwrap_or_else(|| ("none".into(), f64::INFINITY, 1.0));
    let ratio = ratio_of(lhs, rhs);
    ConditionReport {
        condition: condition.into(),
        limiting_term,
        lhs,
        rhs,
        ratio,
        threshold,
        pass: ratio >= threshold,
    }
}

fn excited_level(node: &NodeConfig, mode: usize) -> Level {
    match (node.mode_frequencies.len(), mode) {
        (2, 0) => Level::E1,
        (2, _) => Level::E2,
        _ => Level::E,
    }
}

/// Level that carries the photon after the Raman transition.
fn final_level(node: &NodeConfig) -> Level {
    if node.mode_frequencies.len() == 2 {
        Level::F
    } else {
        Level::G1
    }
}

fn decay(node: &NodeConfig, level: Level) -> f64 {
    node.level(level).map_or(0.0, |l| l.decay_rate)
}

fn modes(node: &NodeConfig) -> std::ops::Range<usize> {
    0..node.pulse.eta0.len()
}

/// Adiabatic following: `eta0 w_c / v` and `Omega0 w_p / v` against
/// `sqrt(1 + |Delta| w / v)`.
pub fn check_adiabatic(node: &NodeConfig, threshold: f64) -> ConditionReport {
    let p = &node.pulse;
    let mut terms = Vec::new();
    for i in modes(node) {
        let delta = node.doppler_shift(i.min(node.pump_frequencies.len().saturating_sub(1)));
        terms.push((
            format!("eta0[{i}] w_c / v"),
            p.eta0[i].abs() * p.w_c / p.v,
            (1.0 + delta.abs() * p.w_c / p.v).sqrt(),
        ));
        terms.push((
            format!("Omega0 w_p / v (pump {i})"),
            p.omega0.abs() * p.w_p / p.v,
            (1.0 + delta.abs() * p.w_p / p.v).sqrt(),
        ));
    }
    report("adiabatic", threshold, terms)
}

/// Closed-form `int eta_i(t) Omega_p(t) dt` for the Gaussian envelopes.
pub fn pulse_overlap_integral(node: &NodeConfig, mode: usize) -> f64 {
    let p = &node.pulse;
    let s2 = p.w_c * p.w_c + p.w_p * p.w_p;
    p.eta0[mode] * p.omega0 * std::f64::consts::PI.sqrt() * (p.w_c * p.w_p / s2.sqrt()) / p.v
        * (-p.d * p.d / s2).exp()
}

/// Pulse overlap against `sqrt(gamma_e^2 + Delta^2)`.
pub fn check_overlap(node: &NodeConfig, threshold: f64) -> ConditionReport {
    let terms = modes(node)
        .map(|i| {
            let gamma = decay(node, excited_level(node, i));
            let delta = node.doppler_shift(i.min(node.pump_frequencies.len().saturating_sub(1)));
            (format!("overlap[{i}]"), pulse_overlap_integral(node, i).abs(), gamma.hypot(delta))
        })
        .collect();
    report("overlap", threshold, terms)
}

/// `|eta0_i|` against the final-state loss `gamma_f + 2 kappa`.
pub fn check_strong_coupling(node: &NodeConfig, threshold: f64) -> ConditionReport {
    let loss = decay(node, final_level(node)) + 2.0 * node.kappa;
    let terms = modes(node).map(|i| (format!("eta0[{i}]"), node.pulse.eta0[i].abs(), loss)).collect();
    report("strong_coupling", threshold, terms)
}

/// Mode spacing against both the couplings and the final-state loss.
pub fn check_mode_spacing(node: &NodeConfig, threshold: f64) -> Result<ConditionReport, FeasibilityError> {
    if node.mode_frequencies.len() != 2 {
        return Err(FeasibilityError::InvalidInput("mode spacing needs a two-mode cavity".into()));
    }
    let spacing = (node.mode_frequencies[1] - node.mode_frequencies[0]).abs();
    let loss = decay(node, final_level(node)) + 2.0 * node.kappa;
    let mut terms: Vec<(String, f64, f64)> =
        modes(node).map(|i| (format!("spacing / eta0[{i}]"), spacing, node.pulse.eta0[i].abs())).collect();
    terms.push(("spacing / (gamma_f + 2 kappa)".into(), spacing, loss));
    Ok(report("mode_spacing", threshold, terms))
}

pub fn all_conditions(node: &NodeConfig, threshold: f64) -> Vec<ConditionReport> {
    let mut out = vec![
        check_adiabatic(node, threshold),
        check_overlap(node, threshold),
        check_strong_coupling(node, threshold),
    ];
    if let Ok(r) = check_mode_spacing(node, threshold) {
        out.push(r);
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RepetitionRate {
    /// Minimum interval between photon pairs, us.
    pub period_us: f64,
    /// Maximum pair repetition rate `1 / (2 T)`, kHz.
    pub max_rate_khz: f64,
}

/// `T = max[(w_c + w_p) / v, 1 / (2 kappa)]`, `W = 1 / (2 T)`.
pub fn repetition_rate(node: &NodeConfig) -> Result<RepetitionRate, FeasibilityError> {
    let p = &node.pulse;
    if !(p.v > 0.0) {
        return Err(FeasibilityError::InvalidInput("speed must be > 0".into()));
    }
    let transit = (p.w_c + p.w_p) / p.v;
    let leak = if node.kappa > 0.0 { 1.0 / (2.0 * node.kappa) } else { f64::INFINITY };
    let period_us = transit.max(leak);
    Ok(RepetitionRate { period_us, max_rate_khz: 1e3 / (2.0 * period_us) })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RecoilReport {
    pub region_um: f64,
    pub wavenumber_difference: f64,
    pub ratio: f64,
    /// Set when the pump wavenumbers coincide.
    pub infinite: bool,
}

/// Momentum spread `hbar / D_x` over the recoil difference `hbar |k_p2 - k_p1|`.
pub fn recoil_distinguishability(node: &NodeConfig, region_um: f64) -> Result<RecoilReport, FeasibilityError> {
    if !(region_um > 0.0 && region_um.is_finite()) {
        return Err(FeasibilityError::InvalidInput(format!("D_x must be > 0, got {region_um}")));
    }
    if node.pump_frequencies.len() != 2 {
        return Err(FeasibilityError::InvalidInput("recoil estimate needs two pump frequencies".into()));
    }
    let dk = (node.pump_wavenumber(1) - node.pump_wavenumber(0)).abs();
    let infinite = dk == 0.0;
    let ratio = if infinite { f64::INFINITY } else { 1.0 / (region_um * dk) };
    Ok(RecoilReport { region_um, wavenumber_difference: dk, ratio, infinite })
}
