//! Flat `key = value unit` scenario files, named presets and conversion to
//! model inputs.
//!
//! Grammar: one `key = value [unit]` per line, `#` starts a comment, blank
//! lines are ignored. Dimensional keys require a unit suffix:
//! frequencies `Hz kHz MHz GHz THz`, lengths `nm um mm m`, speeds `m_per_s`
//! (or `m/s`), times `ps ns us ms s`. Values are stored in MHz, um, m_per_s
//! and us.
//!
//! Couplings, energies and pump/mode frequencies are ordinary frequencies
//! (`value / 2 pi` of the angular quantity). Decay rates follow
//! `gamma_convention` / `kappa_convention`: `ordinary` multiplies the quoted
//! value by 2 pi, `angular` takes it as rad/us directly.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use crate::basis::{FragmentLevel, Level, Scheme};
use crate::error::ConfigError;
use crate::model::{FragmentSign, LinkConfig, NodeConfig};
use crate::propagator::EvolveOptions;
use crate::pulse::{PulseConfig, PulseOrder};

const TWO: u8 = 1;
const ONE: u8 = 2;
const CAS: u8 = 4;
const ALL: u8 = TWO | ONE | CAS;
const SINGLE: u8 = TWO | ONE;
const ONE_MODE: u8 = ONE | CAS;

#[derive(Clone, Copy, Debug, PartialEq)]
enum Kind {
    Frequency,
    Length,
    Speed,
    Time,
    Scalar,
    Count,
    Flag,
    Choice(&'static [&'static str]),
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Check {
    Finite,
    NonNegative,
    Positive,
}

struct KeySpec {
    name: &'static str,
    kind: Kind,
    schemes: u8,
    required: bool,
    check: Check,
}

const fn key(name: &'static str, kind: Kind, schemes: u8, required: bool, check: Check) -> KeySpec {
    KeySpec { name, kind, schemes, required, check }
}

const SCHEMES: &[&str] = &["two_mode_single_node", "one_mode_single_node", "cascaded"];
const CONVENTIONS: &[&str] = &["ordinary", "angular"];
const ORDERS: &[&str] = &["cavity_first", "pump_first"];
const FRAGMENTS: &[&str] = &["A", "B"];

use Check::{Finite, NonNegative, Positive};
use Kind::{Choice, Count, Flag, Frequency, Length, Scalar, Speed, Text, Time};

static KEYS: &[KeySpec] = &[
    key("scheme", Choice(SCHEMES), ALL, true, Finite),
    key("preset", Text, ALL, false, Finite),
    key("incomplete", Flag, ALL, false, Finite),
    key("description", Text, ALL, false, Finite),
    key("gamma_convention", Choice(CONVENTIONS), ALL, false, Finite),
    key("kappa_convention", Choice(CONVENTIONS), ALL, false, Finite),
    key("energy_g1", Frequency, ALL, true, Finite),
    key("energy_g2", Frequency, ALL, true, Finite),
    key("energy_e1", Frequency, TWO, true, Finite),
    key("energy_e2", Frequency, TWO, true, Finite),
    key("energy_e", Frequency, ONE_MODE, true, Finite),
    key("energy_f", Frequency, TWO, true, Finite),
    key("energy_l", Frequency, TWO, false, Finite),
    key("gamma_e1", Frequency, TWO, true, NonNegative),
    key("gamma_e2", Frequency, TWO, true, NonNegative),
    key("gamma_e", Frequency, ONE_MODE, true, NonNegative),
    key("gamma_f", Frequency, TWO, true, NonNegative),
    key("pump_frequency_1", Frequency, TWO, true, Positive),
    key("pump_frequency_2", Frequency, TWO, true, Positive),
    key("pump_frequency", Frequency, ONE_MODE, true, Positive),
    key("mode_frequency_1", Frequency, TWO, false, Positive),
    key("mode_frequency_2", Frequency, TWO, false, Positive),
    key("mode_frequency", Frequency, ONE_MODE, false, Positive),
    key("kappa", Frequency, ALL, true, NonNegative),
    key("receiver_kappa", Frequency, CAS, false, NonNegative),
    key("kappa_loss", Frequency, CAS, false, NonNegative),
    key("v_x", Speed, ALL, true, Finite),
    key("v_y", Speed, ALL, true, Finite),
    key("fragment", Choice(FRAGMENTS), ONE_MODE, false, Finite),
    key("eta0_1", Frequency, TWO, true, NonNegative),
    key("eta0_2", Frequency, TWO, true, NonNegative),
    key("eta0", Frequency, ONE_MODE, true, NonNegative),
    key("eta_scale", Scalar, ALL, false, NonNegative),
    key("omega0", Frequency, ALL, false, NonNegative),
    key("w_c", Length, ALL, true, Positive),
    key("w_p", Length, ALL, false, Positive),
    key("d", Length, ALL, false, NonNegative),
    key("order", Choice(ORDERS), SINGLE, false, Finite),
    key("sync_offset", Time, CAS, false, Finite),
    key("rel_tol", Scalar, ALL, false, Positive),
    key("abs_tol", Scalar, ALL, false, Positive),
    key("n_output", Count, ALL, false, Positive),
    key("resymmetrize", Flag, ALL, false, Finite),
    key("threshold", Scalar, ALL, false, Positive),
    key("region", Length, ALL, false, Positive),
    key("calib_d_min", Length, ALL, false, NonNegative),
    key("calib_d_max", Length, ALL, false, NonNegative),
    key("calib_omega0_min", Frequency, ALL, false, NonNegative),
    key("calib_omega0_max", Frequency, ALL, false, NonNegative),
    key("calib_sync_min", Time, CAS, false, Finite),
    key("calib_sync_max", Time, CAS, false, Finite),
    key("calib_params", Text, ALL, false, Finite),
    key("sweep_parameter", Text, ALL, false, Finite),
    key("sweep_values", Text, ALL, false, Finite),
    key("sweep_calibrate", Flag, ALL, false, Finite),
    key("dissociation_wavelength", Length, ALL, false, Positive),
    key("fragment_1_state", Text, ALL, false, Finite),
    key("fragment_2_state", Text, ALL, false, Finite),
    key("excited_manifold", Text, ALL, false, Finite),
];

fn spec(name: &str) -> Option<&'static KeySpec> {
    KEYS.iter().find(|k| k.name == name)
}

fn scheme_bit(scheme: Scheme) -> u8 {
    match scheme {
        Scheme::TwoModeSingleNode => TWO,
        Scheme::OneModeSingleNode => ONE,
        Scheme::Cascaded => CAS,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Value {
    Number(f64),
    Text(String),
}

fn unit_factor(kind: Kind, unit: &str) -> Option<f64> {
    let table: &[(&str, f64)] = match kind {
        Frequency => &[("Hz", 1e-6), ("kHz", 1e-3), ("MHz", 1.0), ("GHz", 1e3), ("THz", 1e6)],
        Length => &[("nm", 1e-3), ("um", 1.0), ("mm", 1e3), ("m", 1e6)],
        Speed => &[("m_per_s", 1.0), ("m/s", 1.0)],
        Time => &[("ps", 1e-6), ("ns", 1e-3), ("us", 1.0), ("ms", 1e3), ("s", 1e6)],
        _ => &[],
    };
    table.iter().find(|(u, _)| *u == unit).map(|(_, f)| *f)
}

fn canonical_unit(kind: Kind) -> Option<&'static str> {
    match kind {
        Frequency => Some("MHz"),
        Length => Some("um"),
        Speed => Some("m_per_s"),
        Time => Some("us"),
        _ => None,
    }
}

fn parse_value(spec: &KeySpec, raw: &str) -> Result<Value, String> {
    let raw = raw.trim();
    match spec.kind {
        Text => Ok(Value::Text(raw.to_string())),
        Choice(options) => {
            if options.contains(&raw) {
                Ok(Value::Text(raw.to_string()))
            } else {
                Err(format!("expected one of {}, got `{raw}`", options.join(", ")))
            }
        }
        Flag => match raw {
            "true" => Ok(Value::Number(1.0)),
            "false" => Ok(Value::Number(0.0)),
            _ => Err(format!("expected true or false, got `{raw}`")),
        },
        Scalar | Count => {
            let x: f64 = raw.parse().map_err(|_| format!("`{raw}` is not a number"))?;
            if spec.kind == Count && (x.fract() != 0.0 || x < 0.0) {
                return Err(format!("`{raw}` is not a non-negative integer"));
            }
            Ok(Value::Number(x))
        }
        Frequency | Length | Speed | Time => {
            let mut parts = raw.split_whitespace();
            let number = parts.next().ok_or("missing value")?;
            let unit = parts.next().ok_or_else(|| {
                format!("missing unit (expected {})", canonical_unit(spec.kind).unwrap_or(""))
            })?;
            if parts.next().is_some() {
                return Err(format!("trailing text after `{number} {unit}`"));
            }
            let x: f64 = number.parse().map_err(|_| format!("`{number}` is not a number"))?;
            let factor = unit_factor(spec.kind, unit).ok_or_else(|| format!("unknown unit `{unit}`"))?;
            Ok(Value::Number(x * factor))
        }
    }
}

fn check_value(spec: &KeySpec, value: &Value) -> Result<(), ConfigError> {
    if let Value::Number(x) = value {
        let ok = match spec.check {
            Finite => x.is_finite(),
            NonNegative => x.is_finite() && *x >= 0.0,
            Positive => x.is_finite() && *x > 0.0,
        };
        if !ok {
            let rule = match spec.check {
                Finite => "finite",
                NonNegative => "finite and >= 0",
                Positive => "finite and > 0",
            };
            return Err(ConfigError::Validation { key: spec.name.into(), message: format!("must be {rule}, got {x}") });
        }
    }
    Ok(())
}

fn format_value(spec: &KeySpec, value: &Value) -> String {
    match (value, spec.kind) {
        (Value::Number(x), Flag) => (if *x != 0.0 { "true" } else { "false" }).to_string(),
        (Value::Number(x), kind) => match canonical_unit(kind) {
            Some(u) => format!("{x:?} {u}"),
            None => format!("{x:?}"),
        },
        (Value::Text(s), _) => s.clone(),
    }
}

/// Parsed `key = value` lines with their line numbers.
fn parse_lines(text: &str) -> Result<Vec<(usize, String, String)>, ConfigError> {
    let mut out: Vec<(usize, String, String)> = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line_no = n + 1;
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (k, v) = content.split_once('=').ok_or_else(|| ConfigError::Parse {
            line: line_no,
            message: format!("expected `key = value`, got `{content}`"),
        })?;
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() || v.is_empty() {
            return Err(ConfigError::Parse { line: line_no, message: "empty key or value".into() });
        }
        if out.iter().any(|(_, existing, _)| existing == k) {
            return Err(ConfigError::Parse { line: line_no, message: format!("duplicate key `{k}`") });
        }
        out.push((line_no, k.to_string(), v.to_string()));
    }
    Ok(out)
}

/// Fully resolved scenario: every value in canonical file units.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScenarioConfig {
    values: BTreeMap<String, Value>,
    /// Keys whose values were filled from defaults.
    defaulted: Vec<String>,
}

/// Free parameters available to calibration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CalibParam {
    D,
    Omega0,
    SyncOffset,
}

impl CalibParam {
    pub fn key(&self) -> &'static str {
        match self {
            CalibParam::D => "d",
            CalibParam::Omega0 => "omega0",
            CalibParam::SyncOffset => "sync_offset",
        }
    }

    pub fn parse(s: &str) -> Option<CalibParam> {
        match s {
            "d" => Some(CalibParam::D),
            "omega0" => Some(CalibParam::Omega0),
            "sync_offset" => Some(CalibParam::SyncOffset),
            _ => None,
        }
    }
}

/// Node-level inputs for the model builders.
#[derive(Clone, Debug, PartialEq)]
pub enum ModelInputs {
    TwoMode { a: NodeConfig, b: NodeConfig },
    OneMode(NodeConfig),
    Cascaded { sender: NodeConfig, receiver: NodeConfig, link: LinkConfig },
}

impl ScenarioConfig {
    /// Parse a scenario document, optionally layered on a preset, then apply
    /// `KEY=VALUE` overrides.
    pub fn load_str(text: &str, preset: Option<&str>, overrides: &[(String, String)]) -> Result<Self, ConfigError> {
        let lines = parse_lines(text)?;
        let file_preset = lines.iter().find(|(_, k, _)| k == "preset").map(|(_, _, v)| v.clone());
        let preset_name = preset.map(str::to_string).or(file_preset);
        let mut values = match &preset_name {
            Some(name) => preset_values(name)?,
            None => BTreeMap::new(),
        };
        let mut entries: Vec<(usize, String, String)> = lines;
        entries.extend(overrides.iter().map(|(k, v)| (0, k.clone(), v.clone())));
        // scheme first, so applicability can be checked
        if let Some((line, _, raw)) = entries.iter().find(|(_, k, _)| k == "scheme") {
            let v = parse_value(spec("scheme").expect("scheme key"), raw)
                .map_err(|message| ConfigError::Parse { line: *line, message })?;
            if let (Some(name), Some(Value::Text(old))) = (&preset_name, values.get("scheme")) {
                if Value::Text(old.clone()) != v {
                    return Err(ConfigError::Validation {
                        key: "scheme".into(),
                        message: format!("preset {name} is {old}, file says {raw}"),
                    });
                }
            }
            values.insert("scheme".into(), v);
        }
        let scheme = match values.get("scheme") {
            Some(Value::Text(s)) => Scheme::parse(s).expect("validated choice"),
            _ => return Err(ConfigError::MissingKey("scheme".into())),
        };
        for (line, k, raw) in &entries {
            let spec = spec(k).ok_or_else(|| ConfigError::UnknownKey(k.clone()))?;
            if spec.schemes & scheme_bit(scheme) == 0 {
                return Err(ConfigError::Validation {
                    key: k.clone(),
                    message: format!("not applicable to scheme {scheme}"),
                });
            }
            let v = parse_value(spec, raw).map_err(|message| match line {
                0 => ConfigError::Validation { key: k.clone(), message },
                _ => ConfigError::Parse { line: *line, message: format!("{k}: {message}") },
            })?;
            values.insert(k.clone(), v);
        }
        if let Some(name) = &preset_name {
            values.insert("preset".into(), Value::Text(name.clone()));
        }
        let mut config = ScenarioConfig { values, defaulted: Vec::new() };
        config.fill_defaults();
        config.validate()?;
        Ok(config)
    }

    pub fn scheme(&self) -> Scheme {
        match self.values.get("scheme") {
            Some(Value::Text(s)) => Scheme::parse(s).expect("validated"),
            _ => unreachable!("scheme is required"),
        }
    }

    pub fn number(&self, key: &str) -> Option<f64> {
        match self.values.get(key) {
            Some(Value::Number(x)) => Some(*x),
            _ => None,
        }
    }

    pub fn text(&self, key: &str) -> Option<&str> {
        match self.values.get(key) {
            Some(Value::Text(s)) => Some(s),
            _ => None,
        }
    }

    pub fn values(&self) -> &BTreeMap<String, Value> {
        &self.values
    }

    pub fn defaulted(&self) -> &[String] {
        &self.defaulted
    }

    pub fn is_incomplete(&self) -> bool {
        self.number("incomplete").unwrap_or(0.0) != 0.0
    }

    pub fn preset_name(&self) -> Option<&str> {
        self.text("preset")
    }

    /// Set `key` from its textual form (same grammar as the file).
    pub fn set(&mut self, key: &str, raw: &str) -> Result<(), ConfigError> {
        let spec = spec(key).ok_or_else(|| ConfigError::UnknownKey(key.into()))?;
        if spec.schemes & scheme_bit(self.scheme()) == 0 {
            return Err(ConfigError::Validation { key: key.into(), message: "not applicable to this scheme".into() });
        }
        if key == "scheme" {
            return Err(ConfigError::Validation { key: key.into(), message: "scheme cannot be overridden".into() });
        }
        let v = parse_value(spec, raw).map_err(|message| ConfigError::Validation { key: key.into(), message })?;
        check_value(spec, &v)?;
        self.values.insert(key.into(), v);
        self.defaulted.retain(|k| k != key);
        Ok(())
    }

    /// Set a numeric key in canonical units.
    pub fn set_number(&mut self, key: &str, value: f64) -> Result<(), ConfigError> {
        let spec = spec(key).ok_or_else(|| ConfigError::UnknownKey(key.into()))?;
        if matches!(spec.kind, Text | Choice(_)) || spec.schemes & scheme_bit(self.scheme()) == 0 {
            return Err(ConfigError::Validation { key: key.into(), message: "not a numeric key of this scheme".into() });
        }
        let v = Value::Number(value);
        check_value(spec, &v)?;
        self.values.insert(key.into(), v);
        self.defaulted.retain(|k| k != key);
        Ok(())
    }

    fn fill_defaults(&mut self) {
        let scheme = self.scheme();
        let w_c = self.number("w_c");
        let speed = self.speed();
        let mut defaults: Vec<(&str, Value)> = vec![
            ("gamma_convention", Value::Text("ordinary".into())),
            ("kappa_convention", Value::Text("ordinary".into())),
            ("eta_scale", Value::Number(1.0)),
            ("omega0", Value::Number(30.0)),
            ("rel_tol", Value::Number(1e-9)),
            ("abs_tol", Value::Number(1e-12)),
            ("n_output", Value::Number(2000.0)),
            ("resymmetrize", Value::Number(1.0)),
            ("threshold", Value::Number(crate::feasibility::DEFAULT_THRESHOLD)),
            ("region", Value::Number(crate::feasibility::DEFAULT_REGION)),
            ("calib_omega0_min", Value::Number(10.0)),
            ("calib_omega0_max", Value::Number(60.0)),
        ];
        if let Some(w) = w_c {
            defaults.push(("w_p", Value::Number(w)));
            defaults.push(("d", Value::Number(w)));
            defaults.push(("calib_d_min", Value::Number(0.5 * w)));
            defaults.push(("calib_d_max", Value::Number(2.0 * w)));
        }
        match scheme {
            Scheme::Cascaded => {
                defaults.push(("fragment", Value::Text("A".into())));
                defaults.push(("kappa_loss", Value::Number(0.0)));
                defaults.push(("sync_offset", Value::Number(0.0)));
                defaults.push(("calib_params", Value::Text("sync_offset,d,omega0".into())));
                if let (Some(w), Some(v)) = (w_c, speed) {
                    defaults.push(("calib_sync_min", Value::Number(-4.0 * w / v)));
                    defaults.push(("calib_sync_max", Value::Number(4.0 * w / v)));
                }
            }
            Scheme::OneModeSingleNode => {
                defaults.push(("fragment", Value::Text("A".into())));
                defaults.push(("order", Value::Text("cavity_first".into())));
                defaults.push(("calib_params", Value::Text("d,omega0".into())));
            }
            Scheme::TwoModeSingleNode => {
                defaults.push(("order", Value::Text("cavity_first".into())));
                defaults.push(("calib_params", Value::Text("d,omega0".into())));
            }
        }
        for (k, v) in defaults {
            if !self.values.contains_key(k) {
                self.values.insert(k.into(), v);
                self.defaulted.push(k.into());
            }
        }
    }

    fn speed(&self) -> Option<f64> {
        Some(self.number("v_x")?.hypot(self.number("v_y")?))
    }

    /// Required keys absent from the document.
    pub fn missing_keys(&self) -> Vec<&'static str> {
        let bit = scheme_bit(self.scheme());
        KEYS.iter()
            .filter(|k| k.required && k.schemes & bit != 0 && !self.values.contains_key(k.name))
            .map(|k| k.name)
            .collect()
    }

    fn validate(&self) -> Result<(), ConfigError> {
        for (k, v) in &self.values {
            check_value(spec(k).expect("only known keys stored"), v)?;
        }
        if !self.is_incomplete() {
            if let Some(k) = self.missing_keys().first() {
                return Err(ConfigError::MissingKey((*k).into()));
            }
            if self.speed().is_none_or(|v| v.is_nan() || v <= 0.0) {
                return Err(ConfigError::Validation { key: "v_y".into(), message: "fragment speed must be > 0".into() });
            }
        }
        if self.number("n_output").is_some_and(|n| n < 2.0) {
            return Err(ConfigError::Validation { key: "n_output".into(), message: "must be >= 2".into() });
        }
        for (lo, hi) in [("calib_d_min", "calib_d_max"), ("calib_omega0_min", "calib_omega0_max"), ("calib_sync_min", "calib_sync_max")] {
            if let (Some(a), Some(b)) = (self.number(lo), self.number(hi)) {
                if a > b {
                    return Err(ConfigError::Validation { key: lo.into(), message: format!("{lo} > {hi}") });
                }
            }
        }
        self.calib_params()?;
        Ok(())
    }

    pub fn calib_params(&self) -> Result<Vec<CalibParam>, ConfigError> {
        let raw = self.text("calib_params").unwrap_or("");
        let mut out = Vec::new();
        for token in raw.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let p = CalibParam::parse(token).ok_or_else(|| ConfigError::Validation {
                key: "calib_params".into(),
                message: format!("unknown calibration parameter `{token}`"),
            })?;
            if p == CalibParam::SyncOffset && self.scheme() != Scheme::Cascaded {
                return Err(ConfigError::Validation {
                    key: "calib_params".into(),
                    message: "sync_offset applies to the cascaded scheme only".into(),
                });
            }
            out.push(p);
        }
        Ok(out)
    }

    /// `(min, max)` calibration bounds of `param`, canonical units.
    pub fn calib_bounds(&self, param: CalibParam) -> Option<(f64, f64)> {
        let (lo, hi) = match param {
            CalibParam::D => ("calib_d_min", "calib_d_max"),
            CalibParam::Omega0 => ("calib_omega0_min", "calib_omega0_max"),
            CalibParam::SyncOffset => ("calib_sync_min", "calib_sync_max"),
        };
        Some((self.number(lo)?, self.number(hi)?))
    }

    /// Serialize to the file grammar; `load_str` of the result reproduces `self`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for spec in KEYS {
            if let Some(v) = self.values.get(spec.name) {
                let _ = writeln!(out, "{} = {}", spec.name, format_value(spec, v));
            }
        }
        out
    }

    pub fn evolve_options(&self) -> EvolveOptions {
        EvolveOptions {
            rel_tol: self.number("rel_tol").unwrap_or(1e-9),
            abs_tol: self.number("abs_tol").unwrap_or(1e-12),
            n_output: self.number("n_output").unwrap_or(2000.0) as usize,
            resymmetrize: self.number("resymmetrize").unwrap_or(1.0) != 0.0,
            ..Default::default()
        }
    }

    fn require(&self, key: &str) -> Result<f64, ConfigError> {
        if self.is_incomplete() {
            if let Some(missing) = self.missing_keys().first() {
                return Err(ConfigError::InsufficientParameters {
                    preset: self.preset_name().unwrap_or("(file)").into(),
                    missing: format!("{missing} (and {} more)", self.missing_keys().len() - 1),
                });
            }
        }
        self.number(key).ok_or_else(|| ConfigError::MissingKey(key.into()))
    }

    fn convention_factor(&self, key: &str) -> f64 {
        match self.text(key) {
            Some("angular") => 1.0,
            _ => TAU,
        }
    }

    /// Angular frequency (rad/us) of an ordinary-frequency key.
    fn angular(&self, key: &str) -> Result<f64, ConfigError> {
        Ok(TAU * self.require(key)?)
    }

    fn rate(&self, key: &str, convention: &str) -> Result<f64, ConfigError> {
        Ok(self.convention_factor(convention) * self.require(key)?)
    }

    fn pulse(&self, order: PulseOrder, t_offset: f64) -> Result<PulseConfig, ConfigError> {
        let scale = self.number("eta_scale").unwrap_or(1.0);
        let eta0 = match self.scheme() {
            Scheme::TwoModeSingleNode => vec![self.angular("eta0_1")? * scale, self.angular("eta0_2")? * scale],
            _ => vec![self.angular("eta0")? * scale],
        };
        let w_c = self.require("w_c")?;
        Ok(PulseConfig {
            eta0,
            omega0: self.angular("omega0")?,
            w_c,
            w_p: self.number("w_p").unwrap_or(w_c),
            d: self.number("d").unwrap_or(w_c),
            v: self.speed().ok_or_else(|| ConfigError::MissingKey("v_y".into()))?,
            order,
            t_offset,
        })
    }

    fn order(&self) -> PulseOrder {
        self.text("order").and_then(PulseOrder::parse).unwrap_or(PulseOrder::CavityFirst)
    }

    fn node(&self, sign: FragmentSign, order: PulseOrder, t_offset: f64) -> Result<NodeConfig, ConfigError> {
        let scheme = self.scheme();
        let gamma = |k: &str| self.rate(k, "gamma_convention");
        let (levels, pumps) = match scheme {
            Scheme::TwoModeSingleNode => {
                let decaying = |label, e: &str, g: &str, to| -> Result<FragmentLevel, ConfigError> {
                    FragmentLevel::decaying(label, self.angular(e)?, gamma(g)?, to)
                        .map_err(|err| ConfigError::Validation { key: g.into(), message: err.to_string() })
                };
                let levels = vec![
                    FragmentLevel::stable(Level::G1, self.angular("energy_g1")?),
                    FragmentLevel::stable(Level::G2, self.angular("energy_g2")?),
                    decaying(Level::E1, "energy_e1", "gamma_e1", Level::Sink)?,
                    decaying(Level::E2, "energy_e2", "gamma_e2", Level::Sink)?,
                    decaying(Level::F, "energy_f", "gamma_f", Level::L)?,
                    FragmentLevel::stable(Level::L, TAU * self.number("energy_l").unwrap_or(0.0)),
                ];
                (levels, vec![self.angular("pump_frequency_1")?, self.angular("pump_frequency_2")?])
            }
            _ => {
                let e = FragmentLevel::decaying(Level::E, self.angular("energy_e")?, gamma("gamma_e")?, Level::Sink)
                    .map_err(|err| ConfigError::Validation { key: "gamma_e".into(), message: err.to_string() })?;
                let levels = vec![
                    FragmentLevel::stable(Level::G1, self.angular("energy_g1")?),
                    FragmentLevel::stable(Level::G2, self.angular("energy_g2")?),
                    e,
                ];
                (levels, vec![self.angular("pump_frequency")?])
            }
        };
        let mut node = NodeConfig {
            sign,
            v_x: self.require("v_x")?,
            levels,
            pump_frequencies: pumps,
            mode_frequencies: Vec::new(),
            kappa: self.rate("kappa", "kappa_convention")?,
            pulse: self.pulse(order, t_offset)?,
        };
        let resonant = node
            .resonant_mode_frequencies(scheme)
            .map_err(|e| ConfigError::Validation { key: "energy".into(), message: e.to_string() })?;
        let keys: &[&str] = match scheme {
            Scheme::TwoModeSingleNode => &["mode_frequency_1", "mode_frequency_2"],
            _ => &["mode_frequency"],
        };
        node.mode_frequencies = keys
            .iter()
            .zip(resonant)
            .map(|(k, r)| self.number(k).map_or(r, |x| TAU * x))
            .collect();
        Ok(node)
    }

    /// Convert to the node configurations consumed by the model builders.
    pub fn model_inputs(&self) -> Result<ModelInputs, ConfigError> {
        if self.is_incomplete() {
            let missing = self.missing_keys();
            return Err(ConfigError::InsufficientParameters {
                preset: self.preset_name().unwrap_or("(file)").into(),
                missing: if missing.is_empty() { "marked incomplete".into() } else { missing.join(", ") },
            });
        }
        let sign = self.text("fragment").and_then(FragmentSign::parse).unwrap_or(FragmentSign::A);
        match self.scheme() {
            Scheme::TwoModeSingleNode => Ok(ModelInputs::TwoMode {
                a: self.node(FragmentSign::A, self.order(), 0.0)?,
                b: self.node(FragmentSign::B, self.order(), 0.0)?,
            }),
            Scheme::OneModeSingleNode => Ok(ModelInputs::OneMode(self.node(sign, self.order(), 0.0)?)),
            Scheme::Cascaded => {
                let sender = self.node(sign, PulseOrder::CavityFirst, 0.0)?;
                let mut receiver = self.node(sign, PulseOrder::PumpFirst, self.number("sync_offset").unwrap_or(0.0))?;
                let receiver_kappa = self.number("receiver_kappa");
                if let Some(k) = receiver_kappa {
                    receiver.kappa = self.convention_factor("kappa_convention") * k;
                }
                let link = LinkConfig {
                    kappa_loss: self.rate("kappa_loss", "kappa_convention")?,
                    unequal_kappa: receiver_kappa.is_some(),
                };
                Ok(ModelInputs::Cascaded { sender, receiver, link })
            }
        }
    }
}

pub fn load_config(path: &Path) -> Result<ScenarioConfig, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError::Io { path: path.display().to_string(), message: e.to_string() })?;
    ScenarioConfig::load_str(&text, None, &[])
}

pub const PRESET_NAMES: &[&str] = &["fig2_sodium_two_mode", "fig3_sodium_cascade", "cyanogen_sketch"];

/// Short description of each preset.
pub fn preset_summary(name: &str) -> Option<&'static str> {
    match name {
        "fig2_sodium_two_mode" => Some("Na fragment, two-mode cavity, photon emission for both initial ground states"),
        "fig3_sodium_cascade" => Some("Na fragments, one-mode cavities, cascaded sender-receiver transfer of g2"),
        "cyanogen_sketch" => Some("CN fragments from 193 nm cyanogen photolysis; level data unavailable, runs refused"),
        _ => None,
    }
}

const FIG2: &str = "
scheme = two_mode_single_node
description = Na: g1 = 3S1/2 F=1, g2 = 3S1/2 F=2, e1 = 4P1/2, e2 = 4P3/2, f = 4S1/2 F=2
gamma_convention = angular
kappa_convention = angular
energy_g1 = 0 MHz
energy_g2 = 1771.626 MHz
energy_e1 = 907380 GHz
energy_e2 = 907548.9 GHz
energy_f = 771665.787 GHz
gamma_e1 = 9.6 MHz
gamma_e2 = 9.6 MHz
gamma_f = 25 MHz
pump_frequency_1 = 907380 GHz
pump_frequency_2 = 907547.128374 GHz
kappa = 5 MHz
v_x = 5 m_per_s
v_y = 10 m_per_s
eta0_1 = 38 MHz
eta0_2 = 54 MHz
omega0 = 30 MHz
w_c = 10 um
w_p = 10 um
d = 10 um
";

const FIG3: &str = "
scheme = cascaded
description = Na: g1 = 3S1/2 F=1, g2 = 3S1/2 F=2, e = 3P, one cavity mode per node
gamma_convention = angular
kappa_convention = angular
energy_g1 = 0 MHz
energy_g2 = 1771.626 MHz
energy_e = 508301.771626 GHz
gamma_e = 6.28 MHz
pump_frequency = 508300 GHz
kappa = 5 MHz
kappa_loss = 0 MHz
v_x = 5 m_per_s
v_y = 10 m_per_s
eta0 = 22 MHz
omega0 = 30 MHz
w_c = 10 um
w_p = 10 um
d = 10 um
calib_params = sync_offset
";

const CYANOGEN: &str = "
scheme = two_mode_single_node
incomplete = true
description = C2N2 + photon -> CN(v=0) + CN(v=1); g1, g2, f from the CN ground manifold, e1, e2 from B2Sigma+
dissociation_wavelength = 193 nm
fragment_1_state = CN(X2Sigma+, v=0, N<=45)
fragment_2_state = CN(X2Sigma+, v=1, N<=31)
excited_manifold = CN(B2Sigma+)
";

fn preset_values(name: &str) -> Result<BTreeMap<String, Value>, ConfigError> {
    let text = match name {
        "fig2_sodium_two_mode" => FIG2,
        "fig3_sodium_cascade" => FIG3,
        "cyanogen_sketch" => CYANOGEN,
        other => return Err(ConfigError::UnknownPreset(other.into())),
    };
    let mut values = BTreeMap::new();
    for (line, k, raw) in parse_lines(text)? {
        let spec = spec(&k).ok_or_else(|| ConfigError::UnknownKey(k.clone()))?;
        let v = parse_value(spec, &raw).map_err(|message| ConfigError::Parse { line, message })?;
        values.insert(k, v);
    }
    Ok(values)
}

/// Named preset with defaults filled.
pub fn preset(name: &str) -> Result<ScenarioConfig, ConfigError> {
    ScenarioConfig::load_str("", Some(name), &[])
}
