//! Gaussian cavity-vacuum and pump envelopes seen by a fragment crossing
//! both beams at constant speed.
//!
//! Units: time in us, lengths in um, speed in um/us (numerically m/s),
//! Rabi frequencies in rad/us.

use serde::{Deserialize, Serialize};

use crate::error::ModelError;

/// Number of waists kept on either side of the envelope peaks.
pub const WINDOW_WAISTS: f64 = 5.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PulseOrder {
    /// Cavity field first, pump displaced downstream by `d` (counterintuitive for emission).
    CavityFirst,
    /// Pump first, cavity field downstream (absorption at the receiver).
    PumpFirst,
}

impl PulseOrder {
    pub fn name(&self) -> &'static str {
        match self {
            PulseOrder::CavityFirst => "cavity_first",
            PulseOrder::PumpFirst => "pump_first",
        }
    }

    pub fn parse(s: &str) -> Option<PulseOrder> {
        match s {
            "cavity_first" => Some(PulseOrder::CavityFirst),
            "pump_first" => Some(PulseOrder::PumpFirst),
            _ => None,
        }
    }

    fn sign(&self) -> f64 {
        match self {
            PulseOrder::CavityFirst => 1.0,
            PulseOrder::PumpFirst => -1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PulseConfig {
    /// Peak vacuum Rabi frequency per cavity mode.
    pub eta0: Vec<f64>,
    /// Peak pump Rabi frequency.
    pub omega0: f64,
    pub w_c: f64,
    pub w_p: f64,
    /// Pump offset distance along the flight path (>= 0; direction set by `order`).
    pub d: f64,
    pub v: f64,
    pub order: PulseOrder,
    /// Time at which the fragment crosses the cavity axis.
    pub t_offset: f64,
}

impl PulseConfig {
    pub fn validate(&self) -> Result<(), ModelError> {
        let positive = [("w_c", self.w_c), ("w_p", self.w_p), ("v", self.v)];
        for (name, x) in positive {
            if !(x.is_finite() && x > 0.0) {
                return Err(ModelError::Pulse(format!("{name} must be finite and > 0, got {x}")));
            }
        }
        if !(self.d.is_finite() && self.d >= 0.0) {
            return Err(ModelError::Pulse(format!("d must be finite and >= 0, got {}", self.d)));
        }
        if !self.t_offset.is_finite() {
            return Err(ModelError::Pulse("t_offset must be finite".into()));
        }
        if !self.omega0.is_finite() || self.eta0.iter().any(|e| !e.is_finite()) {
            return Err(ModelError::Pulse("peak Rabi frequencies must be finite".into()));
        }
        Ok(())
    }

    /// Signed pump displacement: positive when the pump is downstream.
    pub fn signed_offset(&self) -> f64 {
        self.order.sign() * self.d
    }

    /// Time of the pump envelope peak.
    pub fn pump_peak_time(&self) -> f64 {
        self.t_offset + self.signed_offset() / self.v
    }
}

/// Vacuum Rabi frequency of `mode` at time `t`.
pub fn eta(config: &PulseConfig, mode: usize, t: f64) -> f64 {
    let peak = config.eta0.get(mode).copied().unwrap_or(0.0);
    let x = config.v * (t - config.t_offset) / config.w_c;
    peak * (-x * x).exp()
}

/// Pump Rabi frequency at time `t`.
pub fn omega_p(config: &PulseConfig, t: f64) -> f64 {
    let x = (config.v * (t - config.t_offset) - config.signed_offset()) / config.w_p;
    config.omega0 * (-x * x).exp()
}

/// Natural logarithm of [`eta`], finite even where the envelope underflows.
pub fn ln_eta(config: &PulseConfig, mode: usize, t: f64) -> f64 {
    let peak = config.eta0.get(mode).copied().unwrap_or(0.0);
    let x = config.v * (t - config.t_offset) / config.w_c;
    peak.abs().ln() - x * x
}

/// Natural logarithm of [`omega_p`].
pub fn ln_omega_p(config: &PulseConfig, t: f64) -> f64 {
    let x = (config.v * (t - config.t_offset) - config.signed_offset()) / config.w_p;
    config.omega0.abs().ln() - x * x
}

/// Window extending five waists beyond both envelope peaks.
pub fn integration_window(config: &PulseConfig) -> (f64, f64) {
    let shift = config.signed_offset() / config.v;
    let margin = WINDOW_WAISTS * config.w_c.max(config.w_p) / config.v;
    (
        config.t_offset + shift.min(0.0) - margin,
        config.t_offset + shift.max(0.0) + margin,
    )
}

/// Smallest window containing every given window.
pub fn union_window(windows: impl IntoIterator<Item = (f64, f64)>) -> Option<(f64, f64)> {
    windows.into_iter().reduce(|a, b| (a.0.min(b.0), a.1.max(b.1)))
}
