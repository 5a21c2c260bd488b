//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary so the report is always printed. The process fails
//! when a criterion's outcome differs from `EXPECTED_RED`, in either
//! direction.

use std::time::Instant;

use nalgebra::DVector;
use num_complex::Complex64;

use stirap_link::basis::{BasisState, Level};
use stirap_link::config::{preset, ModelInputs, ScenarioConfig};
use stirap_link::feasibility;
use stirap_link::model;
use stirap_link::observables::{self, linear_fit};
use stirap_link::oracle;
use stirap_link::propagator::{self, DensityMatrix, EvolveOptions};
use stirap_link::scenario::{self, CaseResult, RunSummary};

/// Criteria that cannot be met with the preset parameters; analysed in
/// the README.
const EXPECTED_RED: &[usize] = &[2, 5];

struct Outcome {
    id: usize,
    name: &'static str,
    pass: bool,
    detail: String,
}

#[derive(Default)]
struct Invariants {
    runs: usize,
    trace: f64,
    hermiticity: f64,
    min_eigenvalue: f64,
    budget: f64,
}

impl Invariants {
    fn record_case(&mut self, c: &CaseResult) {
        self.runs += 1;
        self.trace = self.trace.max(c.stats.max_trace_drift);
        self.hermiticity = self.hermiticity.max(c.stats.max_hermiticity_drift);
        self.min_eigenvalue = self.min_eigenvalue.min(c.stats.min_eigenvalue);
        self.budget = self.budget.max((c.budget.total - 1.0).abs());
    }

    fn record(&mut self, s: &RunSummary) {
        s.cases.iter().for_each(|c| self.record_case(c));
    }
}

fn run(config: &ScenarioConfig, inv: &mut Invariants) -> (RunSummary, f64) {
    let start = Instant::now();
    let (_, summary) = scenario::simulate(config).expect("scenario runs");
    let seconds = start.elapsed().as_secs_f64();
    inv.record(&summary);
    (summary, seconds)
}

fn efficiencies(s: &RunSummary) -> Vec<(String, f64)> {
    s.cases.iter().filter_map(|c| Some((c.name.clone(), c.efficiency?))).collect()
}

fn criterion_1(fig2: &ScenarioConfig, inv: &mut Invariants) -> Outcome {
    let (summary, seconds) = run(fig2, inv);
    let eff = efficiencies(&summary);
    let worst = eff.iter().map(|(_, p)| *p).fold(f64::INFINITY, f64::min);
    let listed: Vec<String> = eff.iter().map(|(n, p)| format!("{n}={p:.4}")).collect();
    Outcome {
        id: 1,
        name: "two-mode emission efficiency",
        pass: worst >= 0.98 && seconds < 60.0,
        detail: format!(
            "min P_i = {worst:.4} (>= 0.98) [{}], d = {:.3} um, omega0/2pi = {:.3} MHz, run {seconds:.2} s",
            listed.join(" "),
            fig2.number("d").unwrap(),
            fig2.number("omega0").unwrap()
        ),
    }
}

fn criterion_2(fig2: &ScenarioConfig, inv: &mut Invariants) -> Outcome {
    let mut c = fig2.clone();
    c.set("eta_scale", "0.25").unwrap();
    let (summary, _) = run(&c, inv);
    let joint = summary.joint.as_ref().expect("two-mode joint fidelity");
    let eff = efficiencies(&summary);
    let listed: Vec<String> = eff.iter().map(|(n, p)| format!("{n}={p:.4}")).collect();
    Outcome {
        id: 2,
        name: "coupling reduction eta/4",
        pass: (0.87..=0.93).contains(&joint.joint),
        detail: format!("joint P = {:.4} (window [0.87, 0.93]) [{}]", joint.joint, listed.join(" ")),
    }
}

fn criterion_3(fig3: &ScenarioConfig, inv: &mut Invariants) -> Outcome {
    let (summary, _) = run(fig3, inv);
    let f = summary.objective().unwrap();
    Outcome {
        id: 3,
        name: "cascaded transfer",
        pass: (0.95..=0.99).contains(&f),
        detail: format!(
            "fidelity = {f:.4} (window [0.95, 0.99]), sync_offset = {:.4} us",
            fig3.number("sync_offset").unwrap()
        ),
    }
}

fn criterion_4(fig3: &ScenarioConfig, inv: &mut Invariants) -> Outcome {
    let kappa = fig3.number("kappa").unwrap();
    let x: Vec<f64> = scenario::KAPPA_PRIME_VALUES.iter().map(|f| 1.0 / (1.0 + f)).collect();
    let mut fixed = Vec::new();
    let mut resynced = Vec::new();
    for factor in scenario::KAPPA_PRIME_VALUES {
        let mut c = fig3.clone();
        c.set_number("kappa_loss", factor * kappa).unwrap();
        fixed.push(run(&c, inv).0.objective().unwrap());
        let tuned = scenario::calibrate(&c).expect("sync calibration").config;
        resynced.push(run(&tuned, inv).0.objective().unwrap());
    }
    let fit = linear_fit(&x, &resynced).unwrap();
    let fixed_fit = linear_fit(&x, &fixed).unwrap();
    let points: Vec<String> = x.iter().zip(&resynced).map(|(a, b)| format!("{a:.3}:{b:.4}")).collect();
    Outcome {
        id: 4,
        name: "link-loss law",
        pass: fit.r_squared >= 0.98 && fit.intercept.abs() <= 0.03,
        detail: format!(
            "R^2 = {:.5} (>= 0.98), intercept = {:.4} (|b| <= 0.03), slope = {:.4}, sync re-calibrated per point [{}]; \
             sync held at the kappa'=0 optimum: R^2 = {:.5}, intercept = {:.4}",
            fit.r_squared,
            fit.intercept,
            fit.slope,
            points.join(" "),
            fixed_fit.r_squared,
            fixed_fit.intercept
        ),
    }
}

fn fig2_node(config: &ScenarioConfig) -> model::NodeConfig {
    match config.model_inputs().unwrap() {
        ModelInputs::TwoMode { a, .. } => a,
        _ => unreachable!(),
    }
}

fn criterion_5(fig2: &ScenarioConfig) -> Outcome {
    let rate = feasibility::repetition_rate(&fig2_node(fig2)).unwrap();
    Outcome {
        id: 5,
        name: "repetition rate",
        pass: (rate.max_rate_khz - 200.0).abs() <= 20.0,
        detail: format!("W = {:.1} kHz (200 +- 20), T = {:.4} us", rate.max_rate_khz, rate.period_us),
    }
}

fn criterion_6(fig2: &ScenarioConfig) -> Outcome {
    let r = feasibility::recoil_distinguishability(&fig2_node(fig2), 10.0).unwrap();
    Outcome {
        id: 6,
        name: "recoil distinguishability",
        pass: (r.ratio - 30.0).abs() <= 3.0,
        detail: format!("ratio = {:.2} (30 +- 3) at D_x = 10 um", r.ratio),
    }
}

fn criterion_7(fig2: &ScenarioConfig) -> Outcome {
    let lossless = model::build_two_mode_model(&fig2_node(fig2)).unwrap().without_dissipation();
    let opts = EvolveOptions { rel_tol: 1e-11, abs_tol: 1e-13, n_output: 400, ..fig2.evolve_options() };
    let dim = lossless.dim();
    let start = |level| lossless.space().index_of(&BasisState::single(level, None)).unwrap();
    let mut superposition = DVector::zeros(dim);
    superposition[start(Level::G1)] = Complex64::new(0.6, 0.0);
    superposition[start(Level::G2)] = Complex64::new(0.0, 0.8);
    let inputs = [
        DVector::from_fn(dim, |i, _| if i == start(Level::G1) { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) }),
        DVector::from_fn(dim, |i, _| if i == start(Level::G2) { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) }),
        superposition,
    ];
    let worst = inputs
        .iter()
        .map(|psi| oracle::compare_with_master_equation(&lossless, psi, &opts, 1e-11).unwrap())
        .fold(0.0, f64::max);
    Outcome {
        id: 7,
        name: "oracle equivalence",
        pass: worst <= 1e-6,
        detail: format!("max |population difference| = {worst:.2e} (<= 1e-6) over g1, g2 and a superposition"),
    }
}

fn criterion_9(fig2: &ScenarioConfig) -> Outcome {
    let lossless = model::build_two_mode_model(&fig2_node(fig2)).unwrap().without_dissipation();
    let mut worst = f64::INFINITY;
    for level in [Level::G1, Level::G2] {
        let i = lossless.space().index_of(&BasisState::single(level, None)).unwrap();
        let traj = propagator::evolve(&lossless, &DensityMatrix::basis(lossless.dim(), i), lossless.window(), &fig2.evolve_options())
            .unwrap();
        let overlap = observables::dark_state_overlap(&lossless, &traj).unwrap();
        worst = overlap.into_iter().fold(worst, f64::min);
    }
    Outcome {
        id: 9,
        name: "dark-state pinning",
        pass: worst >= 0.99,
        detail: format!("min overlap = {worst:.5} (>= 0.99), lossless two-mode node, both initial states"),
    }
}

const ONE_MODE: &str = "
scheme = one_mode_single_node
gamma_convention = angular
kappa_convention = angular
energy_g1 = 0 MHz
energy_g2 = 1771.626 MHz
energy_e = 508301.771626 GHz
gamma_e = 6.28 MHz
pump_frequency = 508300 GHz
kappa = 5 MHz
v_x = 5 m_per_s
v_y = 10 m_per_s
eta0 = 22 MHz
w_c = 10 um
";

fn criterion_10(inv: &mut Invariants) -> Outcome {
    let config = ScenarioConfig::load_str(ONE_MODE, None, &[]).unwrap();
    let (runs, _) = scenario::simulate(&config).unwrap();
    let idle = runs.iter().find(|r| r.result.initial_state == "g1,0").unwrap();
    inv.record_case(&idle.result);
    let mut drift: f64 = 0.0;
    let first = idle.trajectory.states[0].matrix().clone();
    for rho in &idle.trajectory.states {
        drift = drift.max((rho.matrix() - &first).iter().map(|z| z.norm()).fold(0.0, f64::max));
    }
    let emitted = idle.result.emission_probabilities[0];
    let emitting = runs.iter().find(|r| r.result.initial_state == "g2,0").unwrap();
    inv.record_case(&emitting.result);
    Outcome {
        id: 10,
        name: "uncoupled-state idleness",
        pass: drift <= 1e-8 && emitted <= 1e-8,
        detail: format!(
            "max |rho(t) - rho(0)| = {drift:.2e}, emitted = {emitted:.2e} (<= 1e-8); g2 control emits {:.4}",
            emitting.result.emission_probabilities[0]
        ),
    }
}

fn criterion_8(inv: &Invariants) -> Outcome {
    Outcome {
        id: 8,
        name: "invariant suite",
        pass: inv.trace < 1e-7 && inv.hermiticity < 1e-9 && inv.min_eigenvalue >= -1e-8 && inv.budget <= 1e-4,
        detail: format!(
            "{} runs: trace drift {:.1e} (< 1e-7), hermiticity {:.1e} (< 1e-9), min eigenvalue {:.1e} (>= -1e-8), budget {:.1e} (<= 1e-4)",
            inv.runs, inv.trace, inv.hermiticity, inv.min_eigenvalue, inv.budget
        ),
    }
}

fn main() {
    let started = Instant::now();
    let mut inv = Invariants::default();

    let fig2_report = scenario::calibrate(&preset("fig2_sodium_two_mode").unwrap()).expect("fig2 calibration");
    let fig2 = fig2_report.config.clone();
    let fig3_report = scenario::calibrate(&preset("fig3_sodium_cascade").unwrap()).expect("fig3 calibration");
    let fig3 = fig3_report.config.clone();

    let mut outcomes = vec![
        criterion_1(&fig2, &mut inv),
        criterion_2(&fig2, &mut inv),
        criterion_3(&fig3, &mut inv),
        criterion_4(&fig3, &mut inv),
        criterion_5(&fig2),
        criterion_6(&fig2),
        criterion_7(&fig2),
        criterion_9(&fig2),
        criterion_10(&mut inv),
    ];
    outcomes.push(criterion_8(&inv));
    outcomes.sort_by_key(|o| o.id);

    println!("acceptance: {} criteria", outcomes.len());
    let mut unexpected = Vec::new();
    for o in &outcomes {
        let expected_red = EXPECTED_RED.contains(&o.id);
        let tag = match (o.pass, expected_red) {
            (true, _) => "PASS",
            (false, true) => "FAIL (known)",
            (false, false) => "FAIL",
        };
        println!("criterion {:>2} {:<13} {}: {}", o.id, tag, o.name, o.detail);
        if o.pass == expected_red {
            unexpected.push(o.id);
        }
    }
    println!("acceptance finished in {:.1} s", started.elapsed().as_secs_f64());
    if !unexpected.is_empty() {
        eprintln!("unexpected outcome for criteria {unexpected:?}");
        std::process::exit(1);
    }
}
