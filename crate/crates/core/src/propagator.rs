//! Lindblad master-equation integration with an embedded Dormand-Prince
//! 5(4) Runge-Kutta pair.

use log::{debug, warn};
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::PropagationError;
use crate::model::OpenSystemModel;


/// Minimum eigenvalue below which a positivity warning is emitted.
pub const POSITIVITY_WARNING: f64 = -1e-6;

/// Hermitian, unit-trace state over a model's basis.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix(DMatrix<Complex64>);

impl DensityMatrix {
    pub fn from_matrix(m: DMatrix<Complex64>) -> Result<Self, PropagationError> {
        if m.nrows() != m.ncols() {
            return Err(PropagationError::Dimension { expected: m.nrows(), got: m.ncols() });
        }
        Ok(DensityMatrix(m))
    }

    /// Pure basis state `|i><i|`.
    pub fn basis(dim: usize, i: usize) -> Self {
        let mut m = DMatrix::zeros(dim, dim);
        m[(i, i)] = Complex64::new(1.0, 0.0);
        DensityMatrix(m)
    }

    pub fn pure(psi: &[Complex64]) -> Self {
        let n = psi.len();
        DensityMatrix(DMatrix::from_fn(n, n, |i, j| psi[i] * psi[j].conj()))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        DensityMatrix(DMatrix::from_diagonal_element(dim, dim, Complex64::new(1.0 / dim as f64, 0.0)))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.0
    }

    pub fn population(&self, i: usize) -> f64 {
        self.0[(i, i)].re
    }

    pub fn populations(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.population(i)).collect()
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    /// `max |rho - rho^dag|` over all entries.
    pub fn hermiticity_residual(&self) -> f64 {
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.0[(i, j)] - self.0[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn symmetrize(&mut self) {
        let adj = self.0.adjoint();
        self.0 = (&self.0 + adj) * Complex64::new(0.5, 0.0);
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> f64 {
        let h = (&self.0 + self.0.adjoint()) * Complex64::new(0.5, 0.0);
        h.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Precomputed pieces of the generator for one model.
pub struct Generator<'a> {
    model: &'a OpenSystemModel,
    /// `1/2 sum C^dag C`.
    damping: DMatrix<f64>,
    jumps: Vec<(f64, &'a [(usize, usize)])>,
    cascade: Option<CascadeTerm>,
    h: DMatrix<f64>,
}

struct CascadeTerm {
    strength: f64,
    /// `a'^dag a` as `(row, col)` unit entries.
    hop: Vec<(usize, usize)>,
    source: Vec<(usize, usize)>,
    target: Vec<(usize, usize)>,
}

impl<'a> Generator<'a> {
    pub fn new(model: &'a OpenSystemModel) -> Self {
        let n = model.dim();
        let mut damping = DMatrix::zeros(n, n);
        let mut jumps = Vec::new();
        for c in model.channels() {
            if c.rate == 0.0 || c.jumps.is_empty() {
                continue;
            }
            for &(t1, f1) in &c.jumps {
                for &(t2, f2) in &c.jumps {
                    if t1 == t2 {
                        damping[(f1, f2)] += 0.5 * c.rate;
                    }
                }
            }
            jumps.push((c.rate, c.jumps.as_slice()));
        }
        let cascade = model.cascade().filter(|c| c.strength != 0.0).map(|c| {
            let mut hop = Vec::new();
            for &(vt, pt) in &c.target_lowering {
                for &(vs, ps) in &c.source_lowering {
                    if vt == vs {
                        hop.push((pt, ps));
                    }
                }
            }
            CascadeTerm {
                strength: c.strength,
                hop,
                source: c.source_lowering.clone(),
                target: c.target_lowering.clone(),
            }
        });
        Generator { model, damping, jumps, cascade, h: DMatrix::zeros(n, n) }
    }

    /// Evaluate `d rho / dt` into `out`.
    pub fn apply(&mut self, t: f64, rho: &DMatrix<Complex64>, out: &mut DMatrix<Complex64>) {
        let n = rho.nrows();
        self.model.hamiltonian_real_into(t, &mut self.h);
        // -i (K rho - rho K^dag) with K = H - i G, both real matrices
        for i in 0..n {
            for j in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..n {
                    let hik = self.h[(i, k)];
                    let gik = self.damping[(i, k)];
                    let hkj = self.h[(k, j)];
                    let gkj = self.damping[(k, j)];
                    let a = rho[(k, j)];
                    let b = rho[(i, k)];
                    if hik != 0.0 || gik != 0.0 {
                        acc += Complex64::new(gik, hik) * a;
                    }
                    if hkj != 0.0 || gkj != 0.0 {
                        acc += Complex64::new(gkj, -hkj) * b;
                    }
                }
                out[(i, j)] = -acc;
            }
        }
        for &(rate, pairs) in &self.jumps {
            for &(t1, f1) in pairs {
                for &(t2, f2) in pairs {
                    out[(t1, t2)] += rho[(f1, f2)] * rate;
                }
            }
        }
        if let Some(c) = &self.cascade {
            // -s (X + X^dag), X = a'^dag a rho - a rho a'^dag
            let mut x = DMatrix::<Complex64>::zeros(n, n);
            for &(r, col) in &c.hop {
                for j in 0..n {
                    x[(r, j)] += rho[(col, j)];
                }
            }
            for &(vs, ps) in &c.source {
                for &(vt, pt) in &c.target {
                    x[(vs, vt)] -= rho[(ps, pt)];
                }
            }
            for i in 0..n {
                for j in 0..n {
                    out[(i, j)] -= (x[(i, j)] + x[(j, i)].conj()) * c.strength;
                }
            }
        }
    }
}

/// Right-hand side of the master equation at time `t`.
pub fn rhs(model: &OpenSystemModel, t: f64, rho: &DensityMatrix) -> Result<DMatrix<Complex64>, PropagationError> {
    if rho.dim() != model.dim() {
        return Err(PropagationError::Dimension { expected: model.dim(), got: rho.dim() });
    }
    let mut out = DMatrix::zeros(model.dim(), model.dim());
    Generator::new(model).apply(t, rho.matrix(), &mut out);
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EvolveOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub n_output: usize,
    /// Replace rho by its Hermitian part at each output sample.
    pub resymmetrize: bool,
    pub max_steps: usize,
    /// Upper bound on the internal step (us).
    pub max_step: f64,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        EvolveOptions { rel_tol: 1e-9, abs_tol: 1e-12, n_output: 2000, resymmetrize: true, max_steps: 5_000_000, max_step: f64::INFINITY }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct IntegratorStats {
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    pub rhs_evaluations: usize,
    pub max_trace_drift: f64,
    /// Largest anti-Hermitian residual seen at an output sample before any re-projection.
    pub max_hermiticity_drift: f64,
    pub min_eigenvalue: f64,
    pub positivity_warnings: usize,
    pub resymmetrized: bool,
}

/// Density matrices sampled on a uniform output grid.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
    pub stats: IntegratorStats,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> Option<&DensityMatrix> {
        self.states.last()
    }

    pub fn population_series(&self, i: usize) -> Vec<f64> {
        self.states.iter().map(|r| r.population(i)).collect()
    }
}

// Dormand-Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
/// Fifth-order weights minus embedded fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

fn output_grid(window: (f64, f64), n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![window.0],
        _ => {
            let step = (window.1 - window.0) / (n - 1) as f64;
            let mut grid: Vec<f64> = (0..n).map(|k| window.0 + step * k as f64).collect();
            grid[n - 1] = window.1;
            grid
        }
    }
}

/// Integrate the master equation over `window`, sampling `n_output` points.
pub fn evolve(
    model: &OpenSystemModel,
    rho0: &DensityMatrix,
    window: (f64, f64),
    options: &EvolveOptions,
) -> Result<Trajectory, PropagationError> {
    let n = model.dim();
    if rho0.dim() != n {
        return Err(PropagationError::Dimension { expected: n, got: rho0.dim() });
    }
    if !(window.0.is_finite() && window.1.is_finite() && window.0 <= window.1) {
        return Err(PropagationError::InvalidRequest(format!("bad window {window:?}")));
    }
    if !(options.rel_tol > 0.0 && options.abs_tol > 0.0) {
        return Err(PropagationError::InvalidRequest("tolerances must be > 0".into()));
    }
    if !(options.max_step > 0.0) {
        return Err(PropagationError::InvalidRequest("max_step must be > 0".into()));
    }
    if options.n_output < 2 {
        return Err(PropagationError::InvalidRequest("n_output must be >= 2".into()));
    }
    let grid = output_grid(window, options.n_output);
    let mut gen = Generator::new(model);
    let mut stats = IntegratorStats {
        min_eigenvalue: f64::INFINITY,
        resymmetrized: options.resymmetrize,
        ..Default::default()
    };
    let initial_trace = rho0.trace().re;

    let mut y = rho0.matrix().clone();
    let mut k: Vec<DMatrix<Complex64>> = (0..7).map(|_| DMatrix::zeros(n, n)).collect();
    let mut stage = DMatrix::zeros(n, n);
    let mut y_new = DMatrix::zeros(n, n);
    let mut t = window.0;
    gen.apply(t, &y, &mut k[0]);
    stats.rhs_evaluations += 1;

    let scale = k[0].iter().map(|z| z.norm()).fold(0.0, f64::max).max(1.0);
    let span = window.1 - window.0;
    let mut h = (0.01 / scale).min(span.max(f64::MIN_POSITIVE));

    let mut times = Vec::with_capacity(grid.len());
    let mut states = Vec::with_capacity(grid.len());
    let mut record = |t: f64, y: &mut DMatrix<Complex64>, stats: &mut IntegratorStats| {
        let mut rho = DensityMatrix(y.clone());
        stats.max_hermiticity_drift = stats.max_hermiticity_drift.max(rho.hermiticity_residual());
        if options.resymmetrize {
            rho.symmetrize();
            *y = rho.0.clone();
        }
        stats.max_trace_drift = stats.max_trace_drift.max((rho.trace().re - initial_trace).abs());
        let min_eig = rho.min_eigenvalue();
        if min_eig < POSITIVITY_WARNING {
            stats.positivity_warnings += 1;
            warn!("negative eigenvalue {min_eig:.3e} at t = {t:.6} us");
        }
        stats.min_eigenvalue = stats.min_eigenvalue.min(min_eig);
        times.push(t);
        states.push(rho);
    };
    record(t, &mut y, &mut stats);

    for &target in &grid[1..] {
        while t < target {
            if stats.accepted_steps + stats.rejected_steps >= options.max_steps {
                return Err(PropagationError::StepUnderflow { t, h });
            }
            h = h.min(options.max_step);
            let remaining = target - t;
            let last = h >= remaining;
            let step = if last { remaining } else { h };
            if step < 1e-14 * t.abs().max(1.0) && !last {
                return Err(PropagationError::StepUnderflow { t, h: step });
            }
            for s in 1..7 {
                stage.copy_from(&y);
                for (j, &a) in A[s].iter().enumerate().take(s) {
                    if a != 0.0 {
                        let w = step * a;
                        stage.zip_apply(&k[j], |x, kj| *x += kj * w);
                    }
                }
                gen.apply(t + C[s] * step, &stage, &mut k[s]);
                stats.rhs_evaluations += 1;
                if s == 6 {
                    y_new.copy_from(&stage);
                }
            }
            let mut err_sq = 0.0;
            for idx in 0..n * n {
                let mut e = Complex64::new(0.0, 0.0);
                for (s, &w) in E.iter().enumerate() {
                    if w != 0.0 {
                        e += k[s][idx] * w;
                    }
                }
                e *= step;
                let sc_re = options.abs_tol + options.rel_tol * y[idx].re.abs().max(y_new[idx].re.abs());
                let sc_im = options.abs_tol + options.rel_tol * y[idx].im.abs().max(y_new[idx].im.abs());
                err_sq += (e.re / sc_re).powi(2) + (e.im / sc_im).powi(2);
            }
            let err = (err_sq / (2 * n * n) as f64).sqrt();
            if !err.is_finite() {
                return Err(PropagationError::NonFinite { t });
            }
            let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            if err <= 1.0 {
                t = if last { target } else { t + step };
                std::mem::swap(&mut y, &mut y_new);
                k.swap(0, 6);
                stats.accepted_steps += 1;
                if !last || factor < 1.0 {
                    h = step * factor;
                }
            } else {
                stats.rejected_steps += 1;
                h = step * factor.min(1.0);
            }
        }
        record(target, &mut y, &mut stats);
        // re-projection changes y, so the stored derivative is stale
        if options.resymmetrize {
            gen.apply(t, &y, &mut k[0]);
            stats.rhs_evaluations += 1;
        }
    }
    debug!(
        "evolve: {} accepted, {} rejected, {} rhs evaluations",
        stats.accepted_steps, stats.rejected_steps, stats.rhs_evaluations
    );
    Ok(Trajectory { times, states, stats })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{BasisState, Level, Scheme};
    use crate::model::tests::{toy_one_mode, toy_two_mode};
    use crate::model::{build_cascaded_model, build_one_mode_model, build_two_mode_model, FragmentSign, LinkConfig};
    use crate::pulse::PulseOrder;
    use proptest::prelude::*;

    fn random_hermitian(n: usize, seed: &[f64]) -> DMatrix<Complex64> {
        let mut m = DMatrix::from_fn(n, n, |i, j| {
            let k = (i * n + j) % seed.len();
            Complex64::new(seed[k], seed[(k + 7) % seed.len()] * (i as f64 - j as f64))
        });
        m = &m + m.adjoint();
        m
    }

    fn sealed_two_mode() -> OpenSystemModel {
        let mut node = toy_two_mode(FragmentSign::A);
        node.pulse.eta0 = vec![0.0, 0.0];
        node.pulse.omega0 = 0.0;
        node.levels.iter_mut().for_each(|l| l.decay_rate = 0.0);
        node.kappa = 0.0;
        build_two_mode_model(&node).unwrap()
    }

    #[test]
    fn stationary_mixed_state() {
        let m = sealed_two_mode();
        let d = rhs(&m, 0.3, &DensityMatrix::maximally_mixed(m.dim())).unwrap();
        assert!(d.iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn photon_decay_rate() {
        let mut node = toy_two_mode(FragmentSign::A);
        node.pulse.eta0 = vec![0.0, 0.0];
        node.pulse.omega0 = 0.0;
        let m = build_two_mode_model(&node).unwrap();
        let i = m.space().index_of(&BasisState::single(Level::F, Some(0))).unwrap();
        let d = rhs(&m, 0.0, &DensityMatrix::basis(m.dim(), i)).unwrap();
        // photon leakage plus the fragment decay f -> l
        let expected = -2.0 * node.kappa - node.level(Level::F).unwrap().decay_rate;
        assert!((d[(i, i)].re - expected).abs() < 1e-12);
    }

    #[test]
    fn dimension_mismatch() {
        let m = sealed_two_mode();
        assert!(rhs(&m, 0.0, &DensityMatrix::basis(3, 0)).is_err());
    }

    proptest! {
        #[test]
        fn rhs_is_traceless_and_hermitian(seed in proptest::collection::vec(-1.0f64..1.0, 16), t in -3.0f64..3.0) {
            let s = toy_one_mode(PulseOrder::CavityFirst);
            let mut r = toy_one_mode(PulseOrder::PumpFirst);
            r.pulse.t_offset = 0.5;
            let models = [
                build_two_mode_model(&toy_two_mode(FragmentSign::B)).unwrap(),
                build_cascaded_model(&s, &r, LinkConfig { kappa_loss: 3.0, unequal_kappa: false }).unwrap(),
            ];
            for m in &models {
                let rho = DensityMatrix::from_matrix(random_hermitian(m.dim(), &seed)).unwrap();
                let d = rhs(m, t, &rho).unwrap();
                let norm = rho.matrix().iter().map(|z| z.norm()).fold(0.0, f64::max);
                prop_assert!(d.trace().norm() < 1e-12 * norm.max(1.0) * 1e3);
                let herm = (&d - d.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
                prop_assert!(herm < 1e-10 * norm.max(1.0));
            }
        }
    }

    #[test]
    fn identity_flow() {
        let m = sealed_two_mode();
        let rho0 = DensityMatrix::maximally_mixed(m.dim());
        let traj = evolve(&m, &rho0, (0.0, 1.0), &EvolveOptions { n_output: 11, ..Default::default() }).unwrap();
        assert_eq!(traj.len(), 11);
        assert!(traj.states.iter().all(|r| r == &rho0));
        assert_eq!(traj.times[0], 0.0);
        assert_eq!(*traj.times.last().unwrap(), 1.0);
    }

    fn pure_decay_model() -> (OpenSystemModel, usize, f64) {
        let mut node = toy_one_mode(PulseOrder::CavityFirst);
        node.pulse.eta0 = vec![0.0];
        node.pulse.omega0 = 0.0;
        let m = build_one_mode_model(&node).unwrap();
        let i = m.space().index_of(&BasisState::single(Level::G1, Some(0))).unwrap();
        (m, i, 2.0 * node.kappa)
    }

    #[test]
    fn pure_cavity_decay_matches_closed_form() {
        let (m, i, rate) = pure_decay_model();
        let opts = EvolveOptions { n_output: 101, ..Default::default() };
        let traj = evolve(&m, &DensityMatrix::basis(m.dim(), i), (0.0, 0.2), &opts).unwrap();
        for (t, r) in traj.times.iter().zip(&traj.states) {
            let exact = (-rate * t).exp();
            assert!((r.population(i) - exact).abs() <= 1e-8 * exact.max(1e-3));
        }
        assert!(traj.stats.max_trace_drift < 1e-12);
    }

    #[test]
    fn fixed_step_convergence_order() {
        let (m, i, rate) = pure_decay_model();
        let rho0 = DensityMatrix::basis(m.dim(), i);
        let end = 0.1;
        let err = |h: f64| {
            let opts = EvolveOptions {
                rel_tol: 1e6,
                abs_tol: 1e6,
                n_output: 2,
                resymmetrize: false,
                max_steps: 1_000_000,
                max_step: h,
            };
            let traj = evolve(&m, &rho0, (0.0, end), &opts).unwrap();
            (traj.last().unwrap().population(i) - (-rate * end).exp()).abs()
        };
        let (e1, e2) = (err(end / 40.0), err(end / 80.0));
        let order = (e1 / e2).log2();
        assert!((order - 5.0).abs() < 0.35, "observed order {order}");
    }

    #[test]
    fn cascade_moves_photon_to_receiver() {
        let mut s = toy_one_mode(PulseOrder::CavityFirst);
        s.pulse.eta0 = vec![0.0];
        s.pulse.omega0 = 0.0;
        let mut r = toy_one_mode(PulseOrder::PumpFirst);
        r.pulse.eta0 = vec![0.0];
        r.pulse.omega0 = 0.0;
        let m = build_cascaded_model(&s, &r, LinkConfig::default()).unwrap();
        let a = m.space().index_of(&BasisState::pair(Level::G1, Level::G1, Some(0))).unwrap();
        let b = m.space().index_of(&BasisState::pair(Level::G1, Level::G1, Some(1))).unwrap();
        let k = s.kappa;
        let opts = EvolveOptions { n_output: 201, ..Default::default() };
        let traj = evolve(&m, &DensityMatrix::basis(m.dim(), a), (0.0, 4.0 / (2.0 * k)), &opts).unwrap();
        // identical cavities: receiver occupation 4 k^2 t^2 exp(-2 k t)
        for (t, rho) in traj.times.iter().zip(&traj.states) {
            let exact = 4.0 * k * k * t * t * (-2.0 * k * t).exp();
            assert!((rho.population(b) - exact).abs() < 1e-8);
        }
        let peak = traj.population_series(b).into_iter().fold(0.0, f64::max);
        assert!((peak - 4.0 / std::f64::consts::E.powi(2)).abs() < 1e-4);
        assert_eq!(m.space().scheme(), Scheme::Cascaded);
    }

    #[test]
    fn density_matrix_helpers() {
        let psi = [Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)];
        let rho = DensityMatrix::pure(&psi);
        assert!((rho.trace().re - 1.0).abs() < 1e-15);
        assert!(rho.hermiticity_residual() < 1e-15);
        assert!(rho.min_eigenvalue().abs() < 1e-12);
        let mut bad = DensityMatrix::from_matrix(DMatrix::from_row_slice(
            2,
            2,
            &[Complex64::new(1.0, 0.0), Complex64::new(0.1, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)],
        ))
        .unwrap();
        assert!((bad.hermiticity_residual() - 0.1).abs() < 1e-15);
        bad.symmetrize();
        assert_eq!(bad.hermiticity_residual(), 0.0);
        assert!(DensityMatrix::from_matrix(DMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn rejects_bad_requests() {
        let m = sealed_two_mode();
        let rho = DensityMatrix::basis(m.dim(), 0);
        assert!(evolve(&m, &rho, (1.0, 0.0), &EvolveOptions::default()).is_err());
        assert!(evolve(&m, &rho, (0.0, 1.0), &EvolveOptions { n_output: 1, ..Default::default() }).is_err());
        assert!(evolve(&m, &DensityMatrix::basis(2, 0), (0.0, 1.0), &EvolveOptions::default()).is_err());
    }
}
