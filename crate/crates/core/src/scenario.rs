//! Scenario driver: runs, parameter sweeps, calibration and feasibility
//! reports built from a [`ScenarioConfig`].

use std::cell::Cell;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use argmin::core::{CostFunction, Executor, State};
use argmin::solver::neldermead::NelderMead;
use rayon::prelude::*;
use serde::Serialize;

use crate::basis::{BasisState, Level, Scheme};
use crate::config::{CalibParam, ModelInputs, ScenarioConfig, Value};
use crate::error::{ConfigError, ScenarioError};
use crate::feasibility::{self, ConditionReport, RecoilReport, RepetitionRate};
use crate::model::{self, NodeConfig, OpenSystemModel};
use crate::observables::{self, BranchEfficiencies, JointFidelity, ProbabilityBudget};
use crate::propagator::{self, DensityMatrix, IntegratorStats, Trajectory};

/// Trace drift above which a run is flagged.
pub const TRACE_WARNING: f64 = 1e-6;

/// One propagated initial condition.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CaseResult {
    pub name: String,
    pub fragment: String,
    pub initial_state: String,
    /// Mode whose emission counts as success for this case, if any.
    pub target_mode: Option<String>,
    pub mode_labels: Vec<String>,
    pub emission_probabilities: Vec<f64>,
    pub peak_times_us: Vec<Option<f64>>,
    pub symmetry: Vec<Option<f64>>,
    pub efficiency: Option<f64>,
    pub transfer_fidelity: Option<f64>,
    pub min_dark_overlap: Option<f64>,
    pub budget: ProbabilityBudget,
    pub final_trace: f64,
    pub window_us: (f64, f64),
    pub stats: IntegratorStats,
}

/// Propagated case with its model and trajectory kept for further analysis.
pub struct CaseRun {
    pub model: OpenSystemModel,
    pub trajectory: Trajectory,
    pub result: CaseResult,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NodeFeasibility {
    pub node: String,
    pub conditions: Vec<ConditionReport>,
    pub repetition: RepetitionRate,
    pub recoil: Option<RecoilReport>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunSummary {
    pub scheme: String,
    pub preset: Option<String>,
    pub config: BTreeMap<String, Value>,
    pub defaulted: Vec<String>,
    pub cases: Vec<CaseResult>,
    pub joint: Option<JointFidelity>,
    pub feasibility: Vec<NodeFeasibility>,
    pub warnings: Vec<String>,
}

impl RunSummary {
    /// Scalar figure of merit: joint fidelity, single-photon efficiency or
    /// transfer fidelity, depending on the scheme.
    pub fn objective(&self) -> Option<f64> {
        match self.scheme.as_str() {
            "two_mode_single_node" => self.joint.as_ref().map(|j| j.joint),
            "cascaded" => self.cases.first().and_then(|c| c.transfer_fidelity),
            _ => self.cases.first().and_then(|c| c.efficiency),
        }
    }

    /// Named scalar results, one entry per case metric.
    pub fn headline(&self) -> Vec<(String, f64)> {
        let mut out = Vec::new();
        for c in &self.cases {
            for (label, p) in c.mode_labels.iter().zip(&c.emission_probabilities) {
                out.push((format!("{}:P_{label}", c.name), *p));
            }
            if let Some(f) = c.transfer_fidelity {
                out.push((format!("{}:fidelity", c.name), f));
            }
            out.push((format!("{}:budget", c.name), c.budget.total));
        }
        if let Some(j) = &self.joint {
            for (k, p) in j.branch_products.iter().enumerate() {
                out.push((format!("branch{}", k + 1), *p));
            }
            out.push(("joint".into(), j.joint));
        }
        out
    }
}

struct CaseSpec {
    name: String,
    fragment: String,
    initial: BasisState,
    target_mode: Option<usize>,
}

fn case_specs(config: &ScenarioConfig, inputs: &ModelInputs) -> Vec<(CaseSpec, usize)> {
    let single = |level: Level| BasisState::single(level, None);
    match inputs {
        ModelInputs::TwoMode { .. } => [("A", 0usize), ("B", 1usize)]
            .into_iter()
            .flat_map(|(frag, node)| {
                [(Level::G1, 0usize), (Level::G2, 1usize)].into_iter().map(move |(level, mode)| {
                    (
                        CaseSpec {
                            name: format!("{frag}_{}", level.label()),
                            fragment: frag.into(),
                            initial: single(level),
                            target_mode: Some(mode),
                        },
                        node,
                    )
                })
            })
            .collect(),
        ModelInputs::OneMode(_) => {
            let frag = config.text("fragment").unwrap_or("A").to_string();
            vec![
                (CaseSpec { name: format!("{frag}_g2"), fragment: frag.clone(), initial: single(Level::G2), target_mode: Some(0) }, 0),
                (CaseSpec { name: format!("{frag}_g1"), fragment: frag, initial: single(Level::G1), target_mode: None }, 0),
            ]
        }
        ModelInputs::Cascaded { .. } => {
            let frag = config.text("fragment").unwrap_or("A").to_string();
            vec![(
                CaseSpec {
                    name: "transfer".into(),
                    fragment: frag,
                    initial: BasisState::pair(Level::G2, Level::G1, None),
                    target_mode: None,
                },
                0,
            )]
        }
    }
}

fn build_models(inputs: &ModelInputs) -> Result<Vec<OpenSystemModel>, ScenarioError> {
    Ok(match inputs {
        ModelInputs::TwoMode { a, b } => vec![model::build_two_mode_model(a)?, model::build_two_mode_model(b)?],
        ModelInputs::OneMode(node) => vec![model::build_one_mode_model(node)?],
        ModelInputs::Cascaded { sender, receiver, link } => vec![model::build_cascaded_model(sender, receiver, *link)?],
    })
}

fn propagate(config: &ScenarioConfig, model: OpenSystemModel, spec: &CaseSpec) -> Result<CaseRun, ScenarioError> {
    let scheme = model.space().scheme();
    let start = model.space().index_of(&spec.initial).map_err(crate::error::ModelError::from)?;
    let rho0 = DensityMatrix::basis(model.dim(), start);
    let window = model.window();
    let traj = propagator::evolve(&model, &rho0, window, &config.evolve_options())?;
    let mut record = observables::emission_record(&model, &traj)?;
    let mut mode_labels: Vec<String> = model.modes().iter().map(|m| m.label.clone()).collect();
    if scheme == Scheme::Cascaded {
        // the two cavities radiate into one field: report the combined output
        let rate = observables::cascaded_output_rate(&model, &traj)?;
        record = observables::EmissionRecord {
            probabilities: vec![observables::emission_probability(&traj.times, &rate)],
            peak_times: vec![observables::peak_time(&traj.times, &rate)],
            symmetry: vec![observables::time_symmetry(&traj.times, &rate).ok()],
            rates: vec![rate],
        };
        mode_labels = vec!["out".into()];
    }
    let transfer_fidelity = match scheme {
        Scheme::Cascaded => Some(observables::transfer_fidelity(&model, &traj)?),
        _ => None,
    };
    let min_dark_overlap = match scheme {
        Scheme::Cascaded => None,
        _ => observables::dark_state_overlap(&model, &traj)?.into_iter().reduce(f64::min),
    };
    let budget = observables::probability_budget(&model, &traj)?;
    let final_trace = traj.last().map_or(f64::NAN, |r| r.trace().re);
    let result = CaseResult {
        name: spec.name.clone(),
        fragment: spec.fragment.clone(),
        initial_state: spec.initial.label(scheme),
        target_mode: spec.target_mode.map(|m| mode_labels[m].clone()),
        efficiency: spec.target_mode.map(|m| record.probabilities[m]),
        emission_probabilities: record.probabilities,
        peak_times_us: record.peak_times,
        symmetry: record.symmetry,
        mode_labels,
        transfer_fidelity,
        min_dark_overlap,
        budget,
        final_trace,
        window_us: window,
        stats: traj.stats.clone(),
    };
    Ok(CaseRun { model, trajectory: traj, result })
}

fn node_feasibility(config: &ScenarioConfig, label: &str, node: &NodeConfig) -> Result<NodeFeasibility, ScenarioError> {
    let threshold = config.number("threshold").unwrap_or(feasibility::DEFAULT_THRESHOLD);
    let region = config.number("region").unwrap_or(feasibility::DEFAULT_REGION);
    let recoil = match node.pump_frequencies.len() {
        2 => Some(feasibility::recoil_distinguishability(node, region)?),
        _ => None,
    };
    Ok(NodeFeasibility {
        node: label.into(),
        conditions: feasibility::all_conditions(node, threshold),
        repetition: feasibility::repetition_rate(node)?,
        recoil,
    })
}

/// Feasibility conditions, repetition rate and recoil estimate of every node.
pub fn check(config: &ScenarioConfig) -> Result<Vec<NodeFeasibility>, ScenarioError> {
    match config.model_inputs()? {
        ModelInputs::TwoMode { a, b } => Ok(vec![node_feasibility(config, "A", &a)?, node_feasibility(config, "B", &b)?]),
        ModelInputs::OneMode(n) => Ok(vec![node_feasibility(config, n.sign.name(), &n)?]),
        ModelInputs::Cascaded { sender, receiver, .. } => Ok(vec![
            node_feasibility(config, "sender", &sender)?,
            node_feasibility(config, "receiver", &receiver)?,
        ]),
    }
}

/// Propagate every case of the scenario, keeping trajectories.
pub fn simulate(config: &ScenarioConfig) -> Result<(Vec<CaseRun>, RunSummary), ScenarioError> {
    let inputs = config.model_inputs()?;
    let models = build_models(&inputs)?;
    let specs = case_specs(config, &inputs);
    let runs: Vec<CaseRun> = specs
        .par_iter()
        .map(|(spec, node)| propagate(config, models[*node].clone(), spec))
        .collect::<Result<_, _>>()?;
    let joint = match inputs {
        ModelInputs::TwoMode { .. } => {
            let eff = |name: &str| runs.iter().find(|r| r.result.name == name).and_then(|r| r.result.efficiency).unwrap_or(0.0);
            let branches = [
                BranchEfficiencies { first: eff("A_g1"), second: eff("B_g2") },
                BranchEfficiencies { first: eff("A_g2"), second: eff("B_g1") },
            ];
            Some(observables::joint_branch_fidelity(&branches)?)
        }
        _ => None,
    };
    let feasibility = check(config)?;
    let mut warnings = Vec::new();
    for r in &runs {
        let s = &r.result.stats;
        if s.max_trace_drift > TRACE_WARNING {
            warnings.push(format!("{}: trace drift {:.2e}", r.result.name, s.max_trace_drift));
        }
        if s.positivity_warnings > 0 {
            warnings.push(format!("{}: min eigenvalue {:.2e}", r.result.name, s.min_eigenvalue));
        }
    }
    for node in &feasibility {
        for c in node.conditions.iter().filter(|c| !c.pass) {
            warnings.push(format!("{}: {} ratio {:.2} below threshold {}", node.node, c.condition, c.ratio, c.threshold));
        }
    }
    for w in &warnings {
        log::warn!("{w}");
    }
    let summary = RunSummary {
        scheme: config.scheme().name().into(),
        preset: config.preset_name().map(str::to_string),
        config: config.values().clone(),
        defaulted: config.defaulted().to_vec(),
        cases: runs.iter().map(|r| r.result.clone()).collect(),
        joint,
        feasibility,
        warnings,
    };
    Ok((runs, summary))
}

fn case_csv(run: &CaseRun) -> Result<String, ScenarioError> {
    let model = &run.model;
    let traj = &run.trajectory;
    let scheme = model.space().scheme();
    let labels = model.space().labels();
    let rates: Vec<Vec<f64>> = (0..model.modes().len())
        .map(|m| observables::emission_rate(model, traj, m))
        .collect::<Result<_, _>>()?;
    let output = match scheme {
        Scheme::Cascaded => Some(observables::cascaded_output_rate(model, traj)?),
        _ => None,
    };
    let overlap = match scheme {
        Scheme::Cascaded => None,
        _ => Some(observables::dark_state_overlap(model, traj)?),
    };
    let mut out = String::from("t_us");
    for l in &labels {
        let _ = write!(out, ",P[{l}]");
    }
    for m in model.modes() {
        let _ = write!(out, ",R_emit[{}]", m.label);
    }
    if output.is_some() {
        out.push_str(",R_out");
    }
    out.push_str(",trace");
    if overlap.is_some() {
        out.push_str(",dark_overlap");
    }
    out.push('\n');
    for (k, (t, rho)) in traj.times.iter().zip(&traj.states).enumerate() {
        let _ = write!(out, "{t:.9e}");
        for p in rho.populations() {
            let _ = write!(out, ",{p:.9e}");
        }
        for r in &rates {
            let _ = write!(out, ",{:.9e}", r[k]);
        }
        if let Some(o) = &output {
            let _ = write!(out, ",{:.9e}", o[k]);
        }
        let _ = write!(out, ",{:.12e}", rho.trace().re);
        if let Some(o) = &overlap {
            let _ = write!(out, ",{:.9e}", o[k]);
        }
        out.push('\n');
    }
    Ok(out)
}

/// Run the scenario and write one CSV per case plus `summary.json` to `out_dir`.
pub fn run(config: &ScenarioConfig, out_dir: &Path) -> Result<RunSummary, ScenarioError> {
    let (runs, summary) = simulate(config)?;
    fs::create_dir_all(out_dir)?;
    for r in &runs {
        fs::write(out_dir.join(format!("{}.csv", r.result.name)), case_csv(r)?)?;
    }
    fs::write(out_dir.join("summary.json"), serde_json::to_string_pretty(&summary)?)?;
    fs::write(out_dir.join("scenario.cfg"), config.to_text())?;
    Ok(summary)
}

/// Sweep settings resolved from the config or built-in defaults.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepPlan {
    pub parameter: String,
    /// Raw values in the file grammar.
    pub values: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub value: String,
    pub metrics: Vec<(String, f64)>,
}

/// Built-in coupling-strength sweep multipliers.
pub const ETA_SCALE_VALUES: [f64; 4] = [1.0, 0.5, 0.25, 0.125];
/// Built-in link-loss sweep, as multiples of the cavity decay rate.
pub const KAPPA_PRIME_VALUES: [f64; 5] = [0.0, 0.25, 0.5, 1.0, 2.0];

pub fn sweep_plan(config: &ScenarioConfig) -> Result<SweepPlan, ScenarioError> {
    let parameter = config.text("sweep_parameter").unwrap_or("eta_scale").to_string();
    let listed: Option<Vec<String>> = config
        .text("sweep_values")
        .map(|s| s.split(',').map(str::trim).filter(|v| !v.is_empty()).map(str::to_string).collect());
    let values = match (parameter.as_str(), listed) {
        (_, Some(v)) => v,
        ("eta_scale", None) => ETA_SCALE_VALUES.iter().map(|v| v.to_string()).collect(),
        ("kappa_prime", None) => KAPPA_PRIME_VALUES.iter().map(|v| v.to_string()).collect(),
        (p, None) => {
            return Err(ConfigError::Validation { key: "sweep_values".into(), message: format!("required to sweep `{p}`") }.into())
        }
    };
    Ok(SweepPlan { parameter, values })
}

fn apply_sweep_value(config: &ScenarioConfig, parameter: &str, raw: &str) -> Result<ScenarioConfig, ScenarioError> {
    let mut c = config.clone();
    if parameter == "kappa_prime" {
        let factor: f64 = raw.parse().map_err(|_| ConfigError::Validation {
            key: "sweep_values".into(),
            message: format!("kappa_prime multiplier `{raw}` is not a number"),
        })?;
        let kappa = c.number("kappa").ok_or_else(|| ConfigError::MissingKey("kappa".into()))?;
        c.set_number("kappa_loss", factor * kappa)?;
    } else {
        c.set(parameter, raw)?;
    }
    Ok(c)
}

/// Run the sweep in parallel on `jobs` threads; rows keep the input order.
/// With `sweep_calibrate = true` every point is calibrated before it is
/// measured.
pub fn sweep(config: &ScenarioConfig, jobs: Option<usize>) -> Result<Vec<SweepRow>, ScenarioError> {
    let plan = sweep_plan(config)?;
    let configs: Vec<ScenarioConfig> =
        plan.values.iter().map(|v| apply_sweep_value(config, &plan.parameter, v)).collect::<Result<_, _>>()?;
    let work = || -> Result<Vec<SweepRow>, ScenarioError> {
        configs
            .par_iter()
            .zip(&plan.values)
            .map(|(c, v)| {
                let c = match c.number("sweep_calibrate") {
                    Some(flag) if flag != 0.0 => calibrate(c)?.config,
                    _ => c.clone(),
                };
                Ok(SweepRow { value: v.clone(), metrics: simulate(&c)?.1.headline() })
            })
            .collect()
    };
    match jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| ScenarioError::Calibration(format!("thread pool: {e}")))?
            .install(work),
        None => work(),
    }
}

pub fn sweep_csv(parameter: &str, rows: &[SweepRow]) -> String {
    let mut out = String::from(parameter);
    if let Some(first) = rows.first() {
        for (name, _) in &first.metrics {
            let _ = write!(out, ",{name}");
        }
    }
    out.push('\n');
    for row in rows {
        out.push_str(&row.value);
        for (_, v) in &row.metrics {
            let _ = write!(out, ",{v:.9e}");
        }
        out.push('\n');
    }
    out
}

/// Sweep and write `sweep.csv` to `out_dir`.
pub fn sweep_to_dir(config: &ScenarioConfig, jobs: Option<usize>, out_dir: &Path) -> Result<Vec<SweepRow>, ScenarioError> {
    let plan = sweep_plan(config)?;
    let rows = sweep(config, jobs)?;
    fs::create_dir_all(out_dir)?;
    fs::write(out_dir.join("sweep.csv"), sweep_csv(&plan.parameter, &rows))?;
    Ok(rows)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CalibratedParam {
    pub name: String,
    pub bounds: (f64, f64),
    pub start: f64,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CalibrationReport {
    pub params: Vec<CalibratedParam>,
    pub objective_start: f64,
    pub objective: f64,
    pub evaluations: usize,
    #[serde(skip)]
    pub config: ScenarioConfig,
}

/// Coarse grid points per coordinate before the golden-section refinement.
pub const CALIBRATION_GRID: usize = 13;
const GOLDEN_ITERATIONS: usize = 10;
const CALIBRATION_PASSES: usize = 2;
/// Iteration cap of the final simplex polish.
const SIMPLEX_ITERATIONS: u64 = 80;
/// Initial simplex edge, as a fraction of each parameter's bound interval.
const SIMPLEX_EDGE: f64 = 0.04;

fn with_param(config: &ScenarioConfig, p: CalibParam, x: f64) -> Result<ScenarioConfig, ScenarioError> {
    let mut c = config.clone();
    c.set_number(p.key(), x)?;
    Ok(c)
}

fn figure_of_merit(config: &ScenarioConfig) -> Result<f64, ScenarioError> {
    simulate(config)?
        .1
        .objective()
        .ok_or_else(|| ScenarioError::Calibration("scenario has no figure of merit".into()))
}

/// Negated figure of merit over the unit box spanned by the bounds.
struct Landscape<'a> {
    base: &'a ScenarioConfig,
    params: &'a [CalibParam],
    bounds: Vec<(f64, f64)>,
    evaluations: &'a Cell<usize>,
}

impl Landscape<'_> {
    fn point(&self, unit: &[f64]) -> Vec<f64> {
        unit.iter().zip(&self.bounds).map(|(u, (lo, hi))| lo + u * (hi - lo)).collect()
    }

    fn config_at(&self, unit: &[f64]) -> Result<ScenarioConfig, ScenarioError> {
        let mut c = self.base.clone();
        for (p, x) in self.params.iter().zip(self.point(unit)) {
            c.set_number(p.key(), x)?;
        }
        Ok(c)
    }
}

impl CostFunction for Landscape<'_> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, unit: &Self::Param) -> Result<f64, argmin::core::Error> {
        let outside: f64 = unit.iter().map(|u| (-u).max(u - 1.0).max(0.0)).sum();
        if outside > 0.0 {
            return Ok(1.0 + outside);
        }
        self.evaluations.set(self.evaluations.get() + 1);
        let c = self.config_at(unit).map_err(|e| argmin::core::Error::msg(e.to_string()))?;
        figure_of_merit(&c).map(|f| -f).map_err(|e| argmin::core::Error::msg(e.to_string()))
    }
}

/// Maximise the scenario's figure of merit over the free parameters inside
/// their calibration bounds: coordinate passes (grid plus golden section)
/// followed by a Nelder-Mead polish.
pub fn calibrate(config: &ScenarioConfig) -> Result<CalibrationReport, ScenarioError> {
    let params = config.calib_params()?;
    if params.is_empty() {
        return Err(ScenarioError::Calibration("no free parameters".into()));
    }
    let mut entries = Vec::new();
    for p in &params {
        let (lo, hi) = config
            .calib_bounds(*p)
            .ok_or_else(|| ScenarioError::Calibration(format!("no bounds for {}", p.key())))?;
        let start = config.number(p.key()).ok_or_else(|| ConfigError::MissingKey(p.key().into()))?;
        if !(lo..=hi).contains(&start) {
            return Err(ScenarioError::Calibration(format!(
                "starting {} = {start} lies outside the bounds [{lo}, {hi}]",
                p.key()
            )));
        }
        entries.push(CalibratedParam { name: p.key().into(), bounds: (lo, hi), start, value: start });
    }
    let mut evaluations = 1;
    let mut current = config.clone();
    let objective_start = figure_of_merit(&current)?;
    let mut best = objective_start;
    let eval = |c: &ScenarioConfig, n: &mut usize| {
        *n += 1;
        figure_of_merit(c)
    };
    for _ in 0..CALIBRATION_PASSES {
        let pass_start = best;
        for (p, entry) in params.iter().zip(entries.iter_mut()) {
            let (lo, hi) = entry.bounds;
            let step = (hi - lo) / (CALIBRATION_GRID - 1) as f64;
            let grid: Vec<f64> = (0..CALIBRATION_GRID).map(|k| lo + step * k as f64).collect();
            let scores: Vec<f64> = grid
                .par_iter()
                .map(|&x| figure_of_merit(&with_param(&current, *p, x)?))
                .collect::<Result<_, _>>()?;
            evaluations += grid.len();
            let k = scores
                .iter()
                .enumerate()
                .fold(0, |best_k, (k, s)| if *s > scores[best_k] { k } else { best_k });
            let (mut a, mut b) = (grid[k.saturating_sub(1)], grid[(k + 1).min(grid.len() - 1)]);
            let ratio = (5f64.sqrt() - 1.0) / 2.0;
            let mut x1 = b - ratio * (b - a);
            let mut x2 = a + ratio * (b - a);
            let mut f1 = eval(&with_param(&current, *p, x1)?, &mut evaluations)?;
            let mut f2 = eval(&with_param(&current, *p, x2)?, &mut evaluations)?;
            for _ in 0..GOLDEN_ITERATIONS {
                if f1 > f2 {
                    b = x2;
                    x2 = x1;
                    f2 = f1;
                    x1 = b - ratio * (b - a);
                    f1 = eval(&with_param(&current, *p, x1)?, &mut evaluations)?;
                } else {
                    a = x1;
                    x1 = x2;
                    f1 = f2;
                    x2 = a + ratio * (b - a);
                    f2 = eval(&with_param(&current, *p, x2)?, &mut evaluations)?;
                }
            }
            let candidates = [(scores[k], grid[k]), (f1, x1), (f2, x2), (best, entry.value)];
            let (score, x) =
                candidates.into_iter().fold((f64::NEG_INFINITY, entry.value), |acc, c| if c.0 > acc.0 { c } else { acc });
            entry.value = x;
            best = score;
            current = with_param(&current, *p, x)?;
        }
        if best - pass_start < 1e-4 {
            break;
        }
    }

    let polish_evaluations = Cell::new(0);
    let base = current.clone();
    let landscape = Landscape {
        base: &base,
        params: &params,
        bounds: entries.iter().map(|e| e.bounds).collect(),
        evaluations: &polish_evaluations,
    };
    let centre: Vec<f64> = entries.iter().map(|e| (e.value - e.bounds.0) / (e.bounds.1 - e.bounds.0)).collect();
    let simplex: Vec<Vec<f64>> = std::iter::once(centre.clone())
        .chain((0..centre.len()).map(|i| {
            let mut v = centre.clone();
            v[i] += if v[i] + SIMPLEX_EDGE <= 1.0 { SIMPLEX_EDGE } else { -SIMPLEX_EDGE };
            v
        }))
        .collect();
    let solver = NelderMead::new(simplex)
        .with_sd_tolerance(1e-6)
        .map_err(|e| ScenarioError::Calibration(e.to_string()))?;
    let result = Executor::new(
        Landscape { base: &base, params: &params, bounds: landscape.bounds.clone(), evaluations: &polish_evaluations },
        solver,
    )
        .configure(|state| state.max_iters(SIMPLEX_ITERATIONS))
        .run()
        .map_err(|e| ScenarioError::Calibration(e.to_string()))?;
    evaluations += polish_evaluations.get();
    if let Some(unit) = result.state().get_best_param() {
        let polished = -result.state().get_best_cost();
        if polished > best {
            best = polished;
            for (entry, x) in entries.iter_mut().zip(landscape.point(unit)) {
                entry.value = x;
            }
            current = landscape.config_at(unit)?;
        }
    }
    Ok(CalibrationReport { params: entries, objective_start, objective: best, evaluations, config: current })
}

/// Calibrate and write `calibration.json` and `calibrated.cfg` to `out_dir`.
pub fn calibrate_to_dir(config: &ScenarioConfig, out_dir: &Path) -> Result<CalibrationReport, ScenarioError> {
    let report = calibrate(config)?;
    fs::create_dir_all(out_dir)?;
    fs::write(out_dir.join("calibration.json"), serde_json::to_string_pretty(&report)?)?;
    fs::write(out_dir.join("calibrated.cfg"), report.config.to_text())?;
    Ok(report)
}
