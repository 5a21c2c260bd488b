//! Lossless reference propagation of state vectors with a fourth-order
//! Magnus integrator and exact matrix exponentials.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::OracleError;
use crate::model::OpenSystemModel;
use crate::propagator::{evolve, DensityMatrix, EvolveOptions};

#[derive(Clone, Debug)]
pub struct StateTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<DVector<Complex64>>,
    pub max_norm_drift: f64,
    pub steps: usize,
}

impl StateTrajectory {
    pub fn populations(&self, k: usize) -> Vec<f64> {
        self.states[k].iter().map(|z| z.norm_sqr()).collect()
    }
}

/// `exp(-i K)` for Hermitian `K`.
fn unitary_from_hermitian(k: DMatrix<Complex64>) -> DMatrix<Complex64> {
    let eig = k.symmetric_eigen();
    let phases = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| Complex64::new(0.0, -l).exp()));
    &eig.eigenvectors * phases * eig.eigenvectors.adjoint()
}

/// One Magnus-4 step from `t` to `t + h`.
fn magnus_step(model: &OpenSystemModel, t: f64, h: f64, psi: &DVector<Complex64>) -> DVector<Complex64> {
    let offset = 3f64.sqrt() / 6.0;
    let h1 = model.hamiltonian(t + (0.5 - offset) * h);
    let h2 = model.hamiltonian(t + (0.5 + offset) * h);
    let commutator = &h2 * &h1 - &h1 * &h2;
    let k = (&h1 + &h2) * Complex64::new(0.5 * h, 0.0)
        - commutator * Complex64::new(0.0, 3f64.sqrt() / 12.0 * h * h);
    unitary_from_hermitian(k) * psi
}

/// Propagate `psi0` under the model's Hamiltonian, sampling `n_output` points.
///
/// Step size is controlled by comparing one full step with two half steps.
pub fn schrodinger_evolve(
    model: &OpenSystemModel,
    psi0: &DVector<Complex64>,
    window: (f64, f64),
    tol: f64,
    n_output: usize,
) -> Result<StateTrajectory, OracleError> {
    if !model.is_lossless() {
        return Err(OracleError::Dissipative("model has nonzero decay channels or a cascade link".into()));
    }
    if psi0.len() != model.dim() {
        return Err(OracleError::InvalidRequest(format!(
            "state has {} entries for dimension {}",
            psi0.len(),
            model.dim()
        )));
    }
    if !(tol > 0.0) || n_output < 2 || !(window.0 < window.1) {
        return Err(OracleError::InvalidRequest("need tol > 0, n_output >= 2 and a non-empty window".into()));
    }
    let norm0 = psi0.norm();
    let span = window.1 - window.0;
    let grid: Vec<f64> = (0..n_output)
        .map(|k| if k + 1 == n_output { window.1 } else { window.0 + span * k as f64 / (n_output - 1) as f64 })
        .collect();
    let mut psi = psi0.clone();
    let mut t = window.0;
    let mut h = span / n_output as f64;
    let mut times = vec![t];
    let mut states = vec![psi.clone()];
    let mut max_norm_drift: f64 = 0.0;
    let mut steps = 0;
    for &target in &grid[1..] {
        while t < target {
            let remaining = target - t;
            let last = h >= remaining;
            let step = if last { remaining } else { h };
            if step < 1e-14 * t.abs().max(1.0) && !last {
                return Err(OracleError::InvalidRequest(format!("step size underflow at t = {t}")));
            }
            let full = magnus_step(model, t, step, &psi);
            let half = magnus_step(model, t, 0.5 * step, &psi);
            let fine = magnus_step(model, t + 0.5 * step, 0.5 * step, &half);
            let err = (&full - &fine).norm();
            let factor = if err == 0.0 { 2.0 } else { (0.9 * (tol / err).powf(0.2)).clamp(0.2, 2.0) };
            if err <= tol {
                psi = fine;
                t = if last { target } else { t + step };
                steps += 1;
                if !last || factor < 1.0 {
                    h = step * factor;
                }
            } else {
                h = step * factor.min(0.9);
            }
        }
        max_norm_drift = max_norm_drift.max((psi.norm() - norm0).abs());
        times.push(target);
        states.push(psi.clone());
    }
    Ok(StateTrajectory { times, states, max_norm_drift, steps })
}

/// Largest difference, over samples and basis states, between master-equation
/// populations and the oracle's `|psi_s|^2` for the pure initial state `psi0`.
pub fn compare_with_master_equation(
    model: &OpenSystemModel,
    psi0: &DVector<Complex64>,
    options: &EvolveOptions,
    oracle_tol: f64,
) -> Result<f64, OracleError> {
    let reference = schrodinger_evolve(model, psi0, model.window(), oracle_tol, options.n_output)?;
    let rho0 = DensityMatrix::pure(psi0.as_slice());
    let traj = evolve(model, &rho0, model.window(), options)?;
    let mut worst: f64 = 0.0;
    for (rho, psi) in traj.states.iter().zip(&reference.states) {
        for (i, z) in psi.iter().enumerate() {
            worst = worst.max((rho.population(i) - z.norm_sqr()).abs());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{BasisState, Level};
    use crate::model::tests::toy_one_mode;
    use crate::model::{build_one_mode_model, Drive, Envelope, ModelParts};
    use crate::pulse::PulseOrder;

    fn basis_vector(dim: usize, i: usize) -> DVector<Complex64> {
        let mut v = DVector::zeros(dim);
        v[i] = Complex64::new(1.0, 0.0);
        v
    }

    /// One-mode space with only a constant g2 <-> e coupling.
    fn rabi_model(rabi: f64) -> (OpenSystemModel, usize, usize) {
        let base = build_one_mode_model(&toy_one_mode(PulseOrder::CavityFirst)).unwrap();
        let space = base.space().clone();
        let g = space.index_of(&BasisState::single(Level::G2, None)).unwrap();
        let e = space.index_of(&BasisState::single(Level::E, None)).unwrap();
        let model = OpenSystemModel::from_parts(ModelParts {
            diagonal: vec![0.0; space.dim()],
            space,
            pulses: base.pulses().to_vec(),
            drives: vec![Drive { envelope: Envelope::Constant(rabi), couplings: vec![(e, g, 1.0)] }],
            channels: Vec::new(),
            cascade: None,
            modes: Vec::new(),
            dark_pairs: Vec::new(),
            window: (0.0, 1.0),
        })
        .unwrap();
        (model, g, e)
    }

    #[test]
    fn free_evolution_is_identity() {
        let (model, g, _) = rabi_model(0.0);
        let psi0 = basis_vector(model.dim(), g);
        let traj = schrodinger_evolve(&model, &psi0, (0.0, 1.0), 1e-10, 5).unwrap();
        assert!(traj.states.iter().all(|s| (s - &psi0).norm() < 1e-15));
    }

    #[test]
    fn resonant_rabi_oscillation() {
        let rabi = 7.3;
        let (model, g, e) = rabi_model(rabi);
        let traj = schrodinger_evolve(&model, &basis_vector(model.dim(), g), (0.0, 1.0), 1e-11, 101).unwrap();
        for (k, &t) in traj.times.iter().enumerate() {
            let pe = traj.states[k][e].norm_sqr();
            assert!((pe - (rabi * t).sin().powi(2)).abs() < 1e-9);
        }
        assert!(traj.max_norm_drift < 1e-9);
    }

    #[test]
    fn global_phase_does_not_matter() {
        let model = build_one_mode_model(&{
            let mut n = toy_one_mode(PulseOrder::CavityFirst);
            n.kappa = 0.0;
            n.levels.iter_mut().for_each(|l| l.decay_rate = 0.0);
            n
        })
        .unwrap();
        let psi0 = basis_vector(model.dim(), 0);
        let phased = &psi0 * Complex64::from_polar(1.0, 1.234);
        let a = schrodinger_evolve(&model, &psi0, model.window(), 1e-10, 50).unwrap();
        let b = schrodinger_evolve(&model, &phased, model.window(), 1e-10, 50).unwrap();
        for k in 0..a.times.len() {
            for (x, y) in a.populations(k).iter().zip(b.populations(k)) {
                assert!((x - y).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn dissipative_models_rejected() {
        let model = build_one_mode_model(&toy_one_mode(PulseOrder::CavityFirst)).unwrap();
        let psi0 = basis_vector(model.dim(), 0);
        assert!(matches!(
            schrodinger_evolve(&model, &psi0, model.window(), 1e-9, 10),
            Err(OracleError::Dissipative(_))
        ));
        assert!(compare_with_master_equation(&model, &psi0, &EvolveOptions::default(), 1e-9).is_err());
        let lossless = model.without_dissipation();
        assert!(schrodinger_evolve(&lossless, &basis_vector(3, 0), lossless.window(), 1e-9, 10).is_err());
    }

    #[test]
    fn zero_hamiltonian_comparison() {
        let (model, g, _) = rabi_model(0.0);
        let d = compare_with_master_equation(&model, &basis_vector(model.dim(), g), &EvolveOptions::default(), 1e-10)
            .unwrap();
        assert_eq!(d, 0.0);
    }
}
