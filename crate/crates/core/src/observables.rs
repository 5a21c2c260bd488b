//! Populations, emission rates, dark-state overlap, transfer fidelities and
//! wavepacket symmetry computed from trajectories.

use serde::Serialize;

use crate::basis::{BasisState, Level, Scheme};
use crate::error::ObservableError;
use crate::model::OpenSystemModel;
use crate::propagator::Trajectory;
use crate::pulse;

pub fn population(traj: &Trajectory, index: usize) -> Vec<f64> {
    traj.population_series(index)
}

pub fn state_population(
    model: &OpenSystemModel,
    traj: &Trajectory,
    state: &BasisState,
) -> Result<Vec<f64>, ObservableError> {
    Ok(population(traj, model.space().index_of(state)?))
}

/// Summed population of every state with `level` on `node`.
pub fn level_population(model: &OpenSystemModel, traj: &Trajectory, node: usize, level: Level) -> Vec<f64> {
    let idx = model.space().indices_with_level(node, level);
    traj.states.iter().map(|r| idx.iter().map(|&i| r.population(i)).sum()).collect()
}

/// `R_i(t) = 2 kappa` times the photon-carrying population of `mode`.
pub fn emission_rate(model: &OpenSystemModel, traj: &Trajectory, mode: usize) -> Result<Vec<f64>, ObservableError> {
    let info = model.modes().get(mode).ok_or(ObservableError::UnknownMode(mode))?;
    Ok(traj
        .states
        .iter()
        .map(|r| info.output_rate * info.photon_states.iter().map(|&i| r.population(i)).sum::<f64>())
        .collect())
}

/// Trapezoidal integral of `values` sampled at `times`.
pub fn trapezoid(times: &[f64], values: &[f64]) -> f64 {
    times
        .windows(2)
        .zip(values.windows(2))
        .map(|(t, v)| 0.5 * (t[1] - t[0]) * (v[0] + v[1]))
        .sum()
}

pub fn emission_probability(times: &[f64], rate: &[f64]) -> f64 {
    trapezoid(times, rate)
}

/// Rate of the field leaving a cascaded receiver, `<c^dag c>` with
/// `c = sqrt(2 kappa_s) a + sqrt(2 kappa_r) a'`.
pub fn cascaded_output_rate(model: &OpenSystemModel, traj: &Trajectory) -> Result<Vec<f64>, ObservableError> {
    let link = model.cascade().ok_or_else(|| wrong_scheme(model, Scheme::Cascaded))?;
    let src = &model.modes()[link.source_mode];
    let dst = &model.modes()[link.target_mode];
    Ok(traj
        .states
        .iter()
        .map(|r| {
            let mut total = 0.0;
            for &i in &src.photon_states {
                total += src.output_rate * r.population(i);
            }
            for &i in &dst.photon_states {
                total += dst.output_rate * r.population(i);
            }
            for &(vs, ps) in &link.source_lowering {
                for &(vt, pt) in &link.target_lowering {
                    if vs == vt {
                        total += 2.0 * link.strength * r.matrix()[(ps, pt)].re;
                    }
                }
            }
            total
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EmissionRecord {
    pub rates: Vec<Vec<f64>>,
    pub probabilities: Vec<f64>,
    pub peak_times: Vec<Option<f64>>,
    pub symmetry: Vec<Option<f64>>,
}

pub fn emission_record(model: &OpenSystemModel, traj: &Trajectory) -> Result<EmissionRecord, ObservableError> {
    let mut record = EmissionRecord {
        rates: Vec::new(),
        probabilities: Vec::new(),
        peak_times: Vec::new(),
        symmetry: Vec::new(),
    };
    for mode in 0..model.modes().len() {
        let rate = emission_rate(model, traj, mode)?;
        record.probabilities.push(emission_probability(&traj.times, &rate));
        record.peak_times.push(peak_time(&traj.times, &rate));
        record.symmetry.push(time_symmetry(&traj.times, &rate).ok());
        record.rates.push(rate);
    }
    Ok(record)
}

fn wrong_scheme(model: &OpenSystemModel, expected: Scheme) -> ObservableError {
    ObservableError::WrongScheme { expected: expected.name().into(), got: model.space().scheme().name().into() }
}

/// `<u0(t)|rho(t)|u0(t)>` summed over the model's STIRAP branches, with
/// `u0 ~ eta |initial> + Omega |target>`.
pub fn dark_state_overlap(model: &OpenSystemModel, traj: &Trajectory) -> Result<Vec<f64>, ObservableError> {
    if model.space().scheme() == Scheme::Cascaded || model.dark_pairs().is_empty() {
        return Err(wrong_scheme(model, Scheme::TwoModeSingleNode));
    }
    let mut weights = Vec::with_capacity(model.dark_pairs().len());
    for pair in model.dark_pairs() {
        let cfg = &model.pulses()[pair.node];
        let eta0 = cfg.eta0.get(pair.local_mode).copied().unwrap_or(0.0);
        if eta0 == 0.0 && cfg.omega0 == 0.0 {
            return Err(ObservableError::DarkStateUndefined("both peak couplings vanish".into()));
        }
        weights.push((pair, cfg, eta0));
    }
    Ok(traj
        .times
        .iter()
        .zip(&traj.states)
        .map(|(&t, rho)| {
            weights
                .iter()
                .map(|&(pair, cfg, eta0)| {
                    let (c, s) = if eta0 == 0.0 {
                        (0.0, cfg.omega0.signum())
                    } else if cfg.omega0 == 0.0 {
                        (eta0.signum(), 0.0)
                    } else {
                        // angle from the log-ratio so vanishing tails stay well defined
                        let log_ratio = pulse::ln_omega_p(cfg, t) - pulse::ln_eta(cfg, pair.local_mode, t);
                        let theta = if log_ratio > 700.0 {
                            std::f64::consts::FRAC_PI_2
                        } else {
                            log_ratio.exp().atan()
                        };
                        (eta0.signum() * theta.cos(), cfg.omega0.signum() * theta.sin())
                    };
                    let m = rho.matrix();
                    c * c * m[(pair.initial, pair.initial)].re
                        + s * s * m[(pair.target, pair.target)].re
                        + 2.0 * c * s * m[(pair.initial, pair.target)].re
                })
                .sum()
        })
        .collect())
}

/// Final receiver population in `g2` of a cascaded run.
pub fn transfer_fidelity(model: &OpenSystemModel, traj: &Trajectory) -> Result<f64, ObservableError> {
    if model.space().scheme() != Scheme::Cascaded {
        return Err(wrong_scheme(model, Scheme::Cascaded));
    }
    let series = level_population(model, traj, 1, Level::G2);
    series.last().copied().ok_or_else(|| ObservableError::Mismatch("empty trajectory".into()))
}

/// Emission efficiencies of the two fragments within one branch.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BranchEfficiencies {
    pub first: f64,
    pub second: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct JointFidelity {
    /// Product of the two fragment efficiencies, per branch.
    pub branch_products: Vec<f64>,
    /// Smallest single-fragment efficiency.
    pub min_efficiency: f64,
    /// Worst branch product.
    pub joint: f64,
}

/// Compose single-fragment efficiencies into the joint two-photon fidelity
/// under factorized node dynamics.
pub fn joint_branch_fidelity(branches: &[BranchEfficiencies]) -> Result<JointFidelity, ObservableError> {
    if branches.is_empty() {
        return Err(ObservableError::Mismatch("no branches supplied".into()));
    }
    let valid = |p: f64| (0.0..=1.0 + 1e-9).contains(&p);
    if branches.iter().any(|b| !valid(b.first) || !valid(b.second)) {
        return Err(ObservableError::Mismatch("efficiencies must lie in [0, 1]".into()));
    }
    let branch_products: Vec<f64> = branches.iter().map(|b| b.first * b.second).collect();
    let min_efficiency = branches.iter().flat_map(|b| [b.first, b.second]).fold(f64::INFINITY, f64::min);
    let joint = branch_products.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(JointFidelity { branch_products, min_efficiency, joint })
}

/// Argmax of `values` refined by a three-point parabola; earliest index wins ties.
pub fn peak_time(times: &[f64], values: &[f64]) -> Option<f64> {
    let (k, &vmax) = values
        .iter()
        .enumerate()
        .fold(None, |best: Option<(usize, &f64)>, (i, v)| match best {
            Some((_, b)) if *v <= *b => best,
            _ => Some((i, v)),
        })?;
    if !(vmax > 0.0) {
        return None;
    }
    if k == 0 || k + 1 >= values.len() {
        return Some(times[k]);
    }
    let (y0, y1, y2) = (values[k - 1], values[k], values[k + 1]);
    let denom = y0 - 2.0 * y1 + y2;
    let h = times[k + 1] - times[k];
    if denom >= 0.0 || h <= 0.0 {
        return Some(times[k]);
    }
    let offset = 0.5 * (y0 - y2) / denom;
    Some(times[k] + offset.clamp(-0.5, 0.5) * h)
}

fn interpolate(times: &[f64], values: &[f64], t: f64) -> f64 {
    let n = times.len();
    if n == 0 || t < times[0] || t > times[n - 1] {
        return 0.0;
    }
    let j = times.partition_point(|&x| x <= t);
    if j == 0 {
        return values[0];
    }
    if j >= n {
        return values[n - 1];
    }
    let (t0, t1) = (times[j - 1], times[j]);
    let w = if t1 > t0 { (t - t0) / (t1 - t0) } else { 0.0 };
    values[j - 1] * (1.0 - w) + values[j] * w
}

/// `1 - int |R(tp + s) - R(tp - s)| ds / (2 int R dt)` with `s` over the
/// whole real line and `R` taken as zero outside the grid.
pub fn time_symmetry(times: &[f64], rate: &[f64]) -> Result<f64, ObservableError> {
    if times.len() != rate.len() || times.len() < 2 {
        return Err(ObservableError::Mismatch("time and rate series differ in length".into()));
    }
    let total = trapezoid(times, rate);
    if !(total > 0.0) {
        return Err(ObservableError::ZeroEmission);
    }
    let tp = peak_time(times, rate).ok_or(ObservableError::ZeroEmission)?;
    let dt = (times[times.len() - 1] - times[0]) / (times.len() - 1) as f64;
    let reach = (tp - times[0]).max(times[times.len() - 1] - tp);
    let steps = (reach / dt).ceil() as usize + 1;
    let shifts: Vec<f64> = (0..=steps).map(|k| k as f64 * dt).collect();
    let diffs: Vec<f64> = shifts
        .iter()
        .map(|&s| (interpolate(times, rate, tp + s) - interpolate(times, rate, tp - s)).abs())
        .collect();
    let deficit = 2.0 * trapezoid(&shifts, &diffs);
    Ok((1.0 - deficit / (2.0 * total)).clamp(0.0, 1.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Ordinary least squares `y = slope x + intercept`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<LinearFit, ObservableError> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(ObservableError::Mismatch("need at least two paired samples".into()));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(ObservableError::Mismatch("abscissae are all equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Ok(LinearFit { slope, intercept, r_squared })
}

/// Where the probability went by the end of a run.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ProbabilityBudget {
    /// Integrated photon output (leaving the last cavity, plus link loss).
    pub emitted: f64,
    /// Final population in decay sinks and other non-emission exits.
    pub retained: f64,
    /// Population already in post-emission states at the start.
    pub initial_post_emission: f64,
    pub total: f64,
}

/// Close the books: integrated output flux plus every population that did
/// not arrive through photon leakage must add up to one.
pub fn probability_budget(model: &OpenSystemModel, traj: &Trajectory) -> Result<ProbabilityBudget, ObservableError> {
    let first = traj.states.first().ok_or_else(|| ObservableError::Mismatch("empty trajectory".into()))?;
    let last = traj.last().expect("non-empty");
    let mut post = vec![false; model.dim()];
    for c in model.channels() {
        if c.name.starts_with("leak:") || c.name == "link_loss" {
            for &(to, _) in &c.jumps {
                post[to] = true;
            }
        }
    }
    let emitted = match model.cascade() {
        Some(_) => {
            let mut rate = cascaded_output_rate(model, traj)?;
            if let Some(loss) = model.channels().iter().find(|c| c.name == "link_loss") {
                for (r, rho) in rate.iter_mut().zip(&traj.states) {
                    *r += loss.rate * loss.jumps.iter().map(|&(_, from)| rho.population(from)).sum::<f64>();
                }
            }
            trapezoid(&traj.times, &rate)
        }
        None => {
            let mut sum = 0.0;
            for mode in 0..model.modes().len() {
                sum += emission_probability(&traj.times, &emission_rate(model, traj, mode)?);
            }
            sum
        }
    };
    let retained: f64 = (0..model.dim()).filter(|&i| !post[i]).map(|i| last.population(i)).sum();
    let initial_post: f64 = (0..model.dim()).filter(|&i| post[i]).map(|i| first.population(i)).sum();
    Ok(ProbabilityBudget {
        emitted,
        retained,
        initial_post_emission: initial_post,
        total: emitted + retained + initial_post,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::BasisState;
    use crate::model::tests::{toy_one_mode, toy_two_mode};
    use crate::model::{build_cascaded_model, build_one_mode_model, build_two_mode_model, FragmentSign, LinkConfig};
    use crate::propagator::{evolve, DensityMatrix, EvolveOptions};
    use crate::pulse::PulseOrder;

    fn grid(a: f64, b: f64, n: usize) -> Vec<f64> {
        (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()
    }

    #[test]
    fn trapezoid_is_exact_for_lines() {
        let t = grid(0.0, 2.0, 11);
        let v: Vec<f64> = t.iter().map(|x| 3.0 * x + 1.0).collect();
        assert!((trapezoid(&t, &v) - 8.0).abs() < 1e-12);
    }

    #[test]
    fn symmetric_gaussian_scores_one() {
        let t = grid(-5.0, 5.0, 2001);
        let r: Vec<f64> = t.iter().map(|x| (-(x - 0.3).powi(2)).exp()).collect();
        let score = time_symmetry(&t, &r).unwrap();
        assert!((score - 1.0).abs() < 1e-3, "{score}");
        assert!((peak_time(&t, &r).unwrap() - 0.3).abs() < 1e-4);
    }

    #[test]
    fn one_sided_exponential() {
        // R = exp(-t) for t >= 0: the mirror image never overlaps, deficit = total
        let t = grid(0.0, 40.0, 40001);
        let r: Vec<f64> = t.iter().map(|x| (-x).exp()).collect();
        let score = time_symmetry(&t, &r).unwrap();
        assert!(score.abs() < 2e-3, "{score}");
        // two-sided exp(-|t|) with weight w on the left: overlap fraction is 2w/(1+w)
        let t = grid(-40.0, 40.0, 80001);
        let w = 0.25;
        let r: Vec<f64> = t.iter().map(|&x| if x < 0.0 { w * x.exp() } else { (-x).exp() }).collect();
        let score = time_symmetry(&t, &r).unwrap();
        assert!((score - 2.0 * w / (1.0 + w)).abs() < 2e-3, "{score}");
    }

    #[test]
    fn zero_emission_is_an_error() {
        let t = grid(0.0, 1.0, 5);
        assert_eq!(time_symmetry(&t, &[0.0; 5]), Err(ObservableError::ZeroEmission));
    }

    #[test]
    fn fit_recovers_line() {
        let x = [0.0, 0.25, 0.5, 1.0];
        let y: Vec<f64> = x.iter().map(|v| 0.9 * v + 0.01).collect();
        let fit = linear_fit(&x, &y).unwrap();
        assert!((fit.slope - 0.9).abs() < 1e-12 && (fit.intercept - 0.01).abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
        assert!(linear_fit(&[1.0, 1.0], &[0.0, 1.0]).is_err());
    }

    #[test]
    fn joint_fidelity_composition() {
        let j = joint_branch_fidelity(&[BranchEfficiencies { first: 1.0, second: 1.0 }]).unwrap();
        assert_eq!(j.joint, 1.0);
        let j = joint_branch_fidelity(&[
            BranchEfficiencies { first: 0.99, second: 0.99 },
            BranchEfficiencies { first: 0.995, second: 0.999 },
        ])
        .unwrap();
        assert!((j.branch_products[0] - 0.9801).abs() < 1e-12);
        assert!((j.joint - 0.9801).abs() < 1e-12);
        assert_eq!(j.min_efficiency, 0.99);
        assert!(joint_branch_fidelity(&[]).is_err());
        assert!(joint_branch_fidelity(&[BranchEfficiencies { first: 1.5, second: 0.5 }]).is_err());
    }

    #[test]
    fn sealed_cavity_never_emits() {
        let mut node = toy_two_mode(FragmentSign::A);
        node.kappa = 0.0;
        let m = build_two_mode_model(&node).unwrap();
        let opts = EvolveOptions { n_output: 200, ..Default::default() };
        let traj = evolve(&m, &DensityMatrix::basis(m.dim(), 0), m.window(), &opts).unwrap();
        let rec = emission_record(&m, &traj).unwrap();
        assert!(rec.probabilities.iter().all(|&p| p == 0.0));
        assert!(rec.symmetry.iter().all(Option::is_none));
    }

    #[test]
    fn single_node_budget_closes() {
        let m = build_two_mode_model(&toy_two_mode(FragmentSign::A)).unwrap();
        let traj = evolve(&m, &DensityMatrix::basis(m.dim(), 0), m.window(), &EvolveOptions::default()).unwrap();
        let b = probability_budget(&m, &traj).unwrap();
        assert!((b.total - 1.0).abs() < 1e-4, "{b:?}");
        let p = emission_record(&m, &traj).unwrap().probabilities;
        assert!(p[0] > 0.9 && p[1] < 1e-12);
        let g1 = population(&traj, 0);
        assert_eq!(g1[0], 1.0);
        let ov = dark_state_overlap(&m, &traj).unwrap();
        assert!((ov[0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn cascaded_budget_and_fidelity() {
        let s = toy_one_mode(PulseOrder::CavityFirst);
        let mut r = toy_one_mode(PulseOrder::PumpFirst);
        r.pulse.t_offset = -0.3;
        let m = build_cascaded_model(&s, &r, LinkConfig { kappa_loss: 5.0, unequal_kappa: false }).unwrap();
        let i0 = m.space().index_of(&BasisState::pair(Level::G2, Level::G1, None)).unwrap();
        let traj = evolve(&m, &DensityMatrix::basis(m.dim(), i0), m.window(), &EvolveOptions::default()).unwrap();
        let b = probability_budget(&m, &traj).unwrap();
        assert!((b.total - 1.0).abs() < 1e-4, "{b:?}");
        let f = transfer_fidelity(&m, &traj).unwrap();
        assert!(f > 0.1 && f < 1.0);
        assert!(dark_state_overlap(&m, &traj).is_err());
        let single = build_one_mode_model(&s).unwrap();
        let t1 = evolve(&single, &DensityMatrix::basis(5, 0), single.window(), &EvolveOptions::default()).unwrap();
        assert!(transfer_fidelity(&single, &t1).is_err());
        assert!(cascaded_output_rate(&single, &t1).is_err());
    }
}
