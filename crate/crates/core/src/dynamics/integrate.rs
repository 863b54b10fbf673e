use nalgebra::DVector;
use num_complex::Complex64;

use super::hamiltonian::HamiltonianSpec;
use crate::error::{Error, Result};
use crate::exec::Execution;

/// Step count used when a caller does not choose one.
pub const DEFAULT_STEPS: usize = 4000;
/// Fewer steps than this cannot resolve a cubic-derived pulse.
pub const MIN_STEPS: usize = 100;
/// Norm drift that aborts an integration.
pub const MAX_NORM_DRIFT: f64 = 1e-6;

const NORMALIZATION_TOLERANCE: f64 = 1e-10;

/// States sampled at every integrator step.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DVector<Complex64>>,
    pub norms: Vec<f64>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn dimension(&self) -> usize {
        self.states.first().map_or(0, |s| s.len())
    }

    pub fn final_state(&self) -> &DVector<Complex64> {
        self.states
            .last()
            .expect("trajectory has at least one sample")
    }

    /// `P_n = |<n|psi(t)>|^2` per sample.
    pub fn populations(&self) -> Vec<Vec<f64>> {
        self.states
            .iter()
            .map(|s| s.iter().map(|z| z.norm_sqr()).collect())
            .collect()
    }

    pub fn final_populations(&self) -> Vec<f64> {
        self.final_state().iter().map(|z| z.norm_sqr()).collect()
    }

    /// Complex overlaps `F_n = <n|psi(t)>`, which are just the amplitudes.
    pub fn fidelities(&self) -> &[DVector<Complex64>] {
        &self.states
    }

    pub fn max_norm_drift(&self) -> f64 {
        self.norms.iter().fold(0.0, |m, n| m.max((n - 1.0).abs()))
    }

    /// `|<target|psi(tf)>|^2`.
    pub fn final_fidelity(&self, target: &DVector<Complex64>) -> f64 {
        target.dotc(self.final_state()).norm_sqr()
    }
}

fn derivative(h: &HamiltonianSpec, t: f64, psi: &DVector<Complex64>) -> DVector<Complex64> {
    (h.evaluate(t) * psi) * Complex64::new(0.0, -1.0)
}

/// Classical fixed-step RK4 for `i d/dt psi = H(t) psi`.
///
/// The state is never renormalized; its norm is recorded at every step and
/// the run fails if it drifts by more than [`MAX_NORM_DRIFT`].
pub fn evolve(
    spec: &HamiltonianSpec,
    psi0: &DVector<Complex64>,
    t0: f64,
    tf: f64,
    steps: usize,
) -> Result<Trajectory> {
    if psi0.len() != spec.dimension() {
        return Err(Error::DimensionMismatch {
            expected: spec.dimension(),
            found: psi0.len(),
        });
    }
    if !t0.is_finite() || !tf.is_finite() || tf <= t0 {
        return Err(Error::InvalidInterval { t0, tf });
    }
    if steps < MIN_STEPS {
        return Err(Error::InvalidInput(format!(
            "need at least {MIN_STEPS} steps, got {steps}"
        )));
    }
    let residual = (psi0.norm() - 1.0).abs();
    if residual > NORMALIZATION_TOLERANCE {
        return Err(Error::Unnormalized { residual });
    }

    let dt = (tf - t0) / steps as f64;
    let half = Complex64::new(dt / 2.0, 0.0);
    let full = Complex64::new(dt, 0.0);
    let sixth = Complex64::new(dt / 6.0, 0.0);
    let two = Complex64::new(2.0, 0.0);

    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    let mut norms = Vec::with_capacity(steps + 1);
    let mut psi = psi0.clone();
    times.push(t0);
    norms.push(psi.norm());
    states.push(psi.clone());

    for k in 0..steps {
        let t = t0 + k as f64 * dt;
        let k1 = derivative(spec, t, &psi);
        let k2 = derivative(spec, t + dt / 2.0, &(&psi + &k1 * half));
        let k3 = derivative(spec, t + dt / 2.0, &(&psi + &k2 * half));
        let k4 = derivative(spec, t + dt, &(&psi + &k3 * full));
        psi += (k1 + k2 * two + k3 * two + k4) * sixth;

        let t_next = if k + 1 == steps {
            tf
        } else {
            t0 + (k + 1) as f64 * dt
        };
        let norm = psi.norm();
        if (norm - 1.0).abs() > MAX_NORM_DRIFT {
            return Err(Error::IntegrationAccuracy {
                drift: (norm - 1.0).abs(),
                time: t_next,
                steps,
            });
        }
        times.push(t_next);
        norms.push(norm);
        states.push(psi.clone());
    }
    Ok(Trajectory {
        times,
        states,
        norms,
    })
}

/// One integration request for [`evolve_batch`].
#[derive(Debug, Clone, PartialEq)]
pub struct EvolveJob {
    pub spec: HamiltonianSpec,
    pub psi0: DVector<Complex64>,
    pub t0: f64,
    pub tf: f64,
    pub steps: usize,
}

/// Integrates independent jobs, in parallel when `exec` allows it.
pub fn evolve_batch(jobs: &[EvolveJob], exec: Execution) -> Vec<Result<Trajectory>> {
    exec.map(jobs, |job| {
        evolve(&job.spec, &job.psi0, job.t0, job.tf, job.steps)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{build_three_real_basis, AngleFn, AngleSchedule};
    use crate::dynamics::hamiltonian::{hamiltonian_from_basis, three_level_lambda};
    use crate::polyshape::{fit_cubic, CubicBoundary};
    use crate::protocols::PulseSet;

    fn basis_state(n: usize, dim: usize) -> DVector<Complex64> {
        let mut v = DVector::zeros(dim);
        v[n] = Complex64::new(1.0, 0.0);
        v
    }

    fn rotating_schedule() -> AngleSchedule {
        let theta = fit_cubic(&CubicBoundary::rest_to_rest(0.0, 1.0, 1.2, -0.4)).unwrap();
        let phi = fit_cubic(&CubicBoundary::rest_to_rest(0.0, 1.0, 0.3, 2.1)).unwrap();
        AngleSchedule::real(AngleFn::Cubic(theta), AngleFn::Cubic(phi))
    }

    #[test]
    fn zero_hamiltonian_is_free() {
        let spec = three_level_lambda(PulseSet::zero(0.0, 1.0));
        let psi0 = DVector::from_vec(vec![
            Complex64::new(0.6, 0.0),
            Complex64::new(0.0, 0.8),
            Complex64::new(0.0, 0.0),
        ]);
        let traj = evolve(&spec, &psi0, 0.0, 1.0, 100).unwrap();
        assert_eq!(traj.len(), 101);
        assert!(traj.states.iter().all(|s| s == &psi0));
    }

    #[test]
    fn rejects_bad_requests() {
        let spec = three_level_lambda(PulseSet::zero(0.0, 1.0));
        let psi0 = basis_state(0, 3);
        assert!(matches!(
            evolve(&spec, &psi0, 0.0, 1.0, 99),
            Err(Error::InvalidInput(_))
        ));
        assert!(matches!(
            evolve(&spec, &psi0, 1.0, 1.0, 100),
            Err(Error::InvalidInterval { .. })
        ));
        assert!(matches!(
            evolve(&spec, &basis_state(0, 4), 0.0, 1.0, 100),
            Err(Error::DimensionMismatch { .. })
        ));
        let unnormalized = &psi0 * Complex64::new(1.1, 0.0);
        assert!(matches!(
            evolve(&spec, &unnormalized, 0.0, 1.0, 100),
            Err(Error::Unnormalized { .. })
        ));
    }

    #[test]
    fn coarse_steps_on_a_violent_pulse_report_accuracy_loss() {
        // theta sweeps 400 rad in unit time; 100 steps cannot follow it
        let theta = fit_cubic(&CubicBoundary::rest_to_rest(0.0, 1.0, 0.0, 400.0)).unwrap();
        let schedule = AngleSchedule::real(AngleFn::Cubic(theta), AngleFn::Constant(0.0));
        let spec = three_level_lambda(PulseSet::from_real_schedule(&schedule, 0.0, 1.0));
        let err = evolve(&spec, &basis_state(0, 3), 0.0, 1.0, 100).unwrap_err();
        assert!(matches!(err, Error::IntegrationAccuracy { .. }));
    }

    #[test]
    fn every_mode_is_transported_along_itself() {
        let basis = build_three_real_basis(rotating_schedule()).unwrap();
        let spec = hamiltonian_from_basis(basis);
        for n in 1..=3 {
            let traj = evolve(&spec, &basis.mode(n, 0.0), 0.0, 1.0, DEFAULT_STEPS).unwrap();
            for (t, psi) in traj.times.iter().zip(&traj.states) {
                // U(t) = sum |phi_n(t)><phi_n(0)| carries no phase
                let overlap = basis.mode(n, *t).dotc(psi);
                assert!((overlap - Complex64::new(1.0, 0.0)).norm() < 1e-8);
            }
            assert!(traj.max_norm_drift() < 1e-8);
        }
    }

    #[test]
    fn populations_are_squared_fidelities() {
        let basis = build_three_real_basis(rotating_schedule()).unwrap();
        let traj = evolve(
            &hamiltonian_from_basis(basis),
            &basis_state(0, 3),
            0.0,
            1.0,
            200,
        )
        .unwrap();
        for (pops, amps) in traj.populations().iter().zip(traj.fidelities()) {
            for (p, a) in pops.iter().zip(amps.iter()) {
                assert_eq!(*p, a.norm_sqr());
            }
            let total: f64 = pops.iter().sum();
            assert!((total - amps.norm().powi(2)).abs() < 1e-10);
        }
    }

    #[test]
    fn fourth_order_convergence() {
        let spec = three_level_lambda(PulseSet::from_real_schedule(&rotating_schedule(), 0.0, 1.0));
        let psi0 = basis_state(0, 3);
        let run = |steps| {
            evolve(&spec, &psi0, 0.0, 1.0, steps)
                .unwrap()
                .final_state()
                .clone()
        };
        let (fine, finer) = (run(3200), run(6400));
        let reference = (&finer * Complex64::new(16.0, 0.0) - &fine) / Complex64::new(15.0, 0.0);
        let err = |steps| (run(steps) - &reference).norm();
        let (e1, e2, e3) = (err(100), err(200), err(400));
        for ratio in [e1 / e2, e2 / e3] {
            assert!(
                (ratio - 16.0).abs() <= 4.0,
                "ratio {ratio} ({e1:e}, {e2:e}, {e3:e})"
            );
        }
    }

    #[test]
    fn batch_matches_individual_runs() {
        let basis = build_three_real_basis(rotating_schedule()).unwrap();
        let spec = hamiltonian_from_basis(basis);
        let jobs: Vec<EvolveJob> = (0..3)
            .map(|n| EvolveJob {
                spec,
                psi0: basis_state(n, 3),
                t0: 0.0,
                tf: 1.0,
                steps: 200,
            })
            .collect();
        let seq = evolve_batch(&jobs, Execution::Sequential);
        let par = evolve_batch(&jobs, Execution::Parallel);
        for (a, b) in seq.iter().zip(&par) {
            assert_eq!(a.as_ref().unwrap(), b.as_ref().unwrap());
        }
    }
}
