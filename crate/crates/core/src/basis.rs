//! Orthonormal moving-state families and the angle schedules that drive them.
//!
//! Every family is built from closed-form functions of the schedule, so the
//! states and their time derivatives can be evaluated at any time an
//! integrator asks for.
//!
//! Sign convention for the real three-level family:
//!
//! ```text
//! |phi_1> = cos(theta)|1> + sin(theta)|3>
//! |phi_2> = sin(theta)cos(phi)|1> + sin(phi)|2> - cos(theta)cos(phi)|3>
//! |phi_3> = sin(theta)sin(phi)|1> - cos(phi)|2> - cos(theta)sin(phi)|3>
//! ```
//!
//! This is what the general form `cos(a)cos(b)|1> + sin(b)|2> + sin(a)cos(b)|3>`
//! gives for `a = (theta, theta - pi/2, theta - pi/2)`,
//! `b = (0, phi, phi - pi/2)`. An equally valid variant flips the overall sign
//! of `|phi_2>` and `|phi_3>`; the Hamiltonian is the same for both, only the
//! meaning of the boundary angles changes.

use std::f64::consts::FRAC_PI_2;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polyshape::CubicPolynomial;

/// Off-diagonal overlap tolerance for accepting a set of mode angles.
pub const ORTHOGONALITY_TOLERANCE: f64 = 1e-12;

/// A real angle as a function of time, together with its exact derivative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum AngleFn {
    Constant(f64),
    /// `value + rate * (t - origin)`
    Linear {
        origin: f64,
        value: f64,
        rate: f64,
    },
    Cubic(CubicPolynomial),
}

impl AngleFn {
    pub fn value(&self, t: f64) -> f64 {
        match self {
            AngleFn::Constant(c) => *c,
            AngleFn::Linear {
                origin,
                value,
                rate,
            } => value + rate * (t - origin),
            AngleFn::Cubic(p) => p.value(t),
        }
    }

    pub fn rate(&self, t: f64) -> f64 {
        match self {
            AngleFn::Constant(_) => 0.0,
            AngleFn::Linear { rate, .. } => *rate,
            AngleFn::Cubic(p) => p.derivative(t),
        }
    }

    pub fn is_identically_zero(&self) -> bool {
        match self {
            AngleFn::Constant(c) => *c == 0.0,
            AngleFn::Linear { value, rate, .. } => *value == 0.0 && *rate == 0.0,
            AngleFn::Cubic(p) => p.coefficients.iter().all(|&a| a == 0.0),
        }
    }

    pub fn is_stationary(&self) -> bool {
        match self {
            AngleFn::Constant(_) => true,
            AngleFn::Linear { rate, .. } => *rate == 0.0,
            AngleFn::Cubic(p) => p.is_constant(),
        }
    }
}

impl Default for AngleFn {
    fn default() -> Self {
        AngleFn::Constant(0.0)
    }
}

/// Snapshot of all four angles and their rates at one instant.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AngleSample {
    pub theta: f64,
    pub phi: f64,
    pub gamma: f64,
    pub kappa: f64,
    pub dtheta: f64,
    pub dphi: f64,
    pub dgamma: f64,
    pub dkappa: f64,
}

/// The mixing angles `theta`, `phi` and the phases `gamma` (on `|2>`) and
/// `kappa` (on `|3>`).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct AngleSchedule {
    pub theta: AngleFn,
    pub phi: AngleFn,
    pub gamma: AngleFn,
    pub kappa: AngleFn,
}

impl AngleSchedule {
    /// Phase-free schedule.
    pub fn real(theta: AngleFn, phi: AngleFn) -> Self {
        Self {
            theta,
            phi,
            ..Self::default()
        }
    }

    pub fn with_phases(mut self, gamma: AngleFn, kappa: AngleFn) -> Self {
        self.gamma = gamma;
        self.kappa = kappa;
        self
    }

    pub fn has_phases(&self) -> bool {
        !(self.gamma.is_identically_zero() && self.kappa.is_identically_zero())
    }

    pub fn at(&self, t: f64) -> AngleSample {
        AngleSample {
            theta: self.theta.value(t),
            phi: self.phi.value(t),
            gamma: self.gamma.value(t),
            kappa: self.kappa.value(t),
            dtheta: self.theta.rate(t),
            dphi: self.phi.rate(t),
            dgamma: self.gamma.rate(t),
            dkappa: self.kappa.rate(t),
        }
    }

    fn angles(&self) -> [&AngleFn; 4] {
        [&self.theta, &self.phi, &self.gamma, &self.kappa]
    }

    /// Worst disagreement between each stored rate and a central difference
    /// of its angle over the interior of a `samples`-point grid.
    ///
    /// The error is measured relative to `max(|rate|, rate_scale)` where
    /// `rate_scale` is the largest stored rate on the grid, so zero crossings
    /// do not inflate it.
    pub fn derivative_mismatch(&self, t0: f64, tf: f64, samples: usize) -> f64 {
        let samples = samples.max(3);
        let dt = (tf - t0) / (samples - 1) as f64;
        let h = dt * 1e-3;
        let mut worst = 0.0_f64;
        for angle in self.angles() {
            let scale = (0..samples)
                .map(|i| angle.rate(t0 + i as f64 * dt).abs())
                .fold(0.0, f64::max)
                .max(f64::MIN_POSITIVE);
            for i in 1..samples - 1 {
                let t = t0 + i as f64 * dt;
                let fd = (angle.value(t + h) - angle.value(t - h)) / (2.0 * h);
                let exact = angle.rate(t);
                worst = worst.max((fd - exact).abs() / exact.abs().max(scale));
            }
        }
        worst
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BasisFamily {
    ThreeReal,
    ThreePhased,
    FourLevel,
}

impl BasisFamily {
    pub fn dimension(self) -> usize {
        match self {
            BasisFamily::ThreeReal | BasisFamily::ThreePhased => 3,
            BasisFamily::FourLevel => 4,
        }
    }
}

/// Mode angles `(alpha_n, beta_n)` at one instant, for checking the pairwise
/// orthogonality condition of a general family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneralAngles {
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
}

impl GeneralAngles {
    /// The simplest orthogonal assignment in terms of `theta` and `phi`:
    /// three levels use `a = (th, th - pi/2, th - pi/2)`, `b = (0, ph, ph - pi/2)`;
    /// four levels use `a = (th, th - pi/2, th, th - pi/2)`,
    /// `b = (ph, ph, ph - pi/2, ph - pi/2)`.
    pub fn simplest(family: BasisFamily, theta: f64, phi: f64) -> Result<Self> {
        let q = FRAC_PI_2;
        match family {
            BasisFamily::ThreeReal => Ok(Self {
                alpha: vec![theta, theta - q, theta - q],
                beta: vec![0.0, phi, phi - q],
            }),
            BasisFamily::FourLevel => Ok(Self {
                alpha: vec![theta, theta - q, theta, theta - q],
                beta: vec![phi, phi, phi - q, phi - q],
            }),
            BasisFamily::ThreePhased => Err(Error::WrongFamily(
                "the phased family has no (alpha, beta) form".into(),
            )),
        }
    }
}

/// One state of the general `(alpha, beta)` family: three levels give
/// `cos a cos b|1> + sin b|2> + sin a cos b|3>`, four levels the product
/// form `(cos a, sin a) (x) (cos b, sin b)`.
pub fn general_mode_vector(family: BasisFamily, alpha: f64, beta: f64) -> Result<DVector<f64>> {
    let (sa, ca) = alpha.sin_cos();
    let (sb, cb) = beta.sin_cos();
    match family {
        BasisFamily::ThreeReal => Ok(DVector::from_vec(vec![ca * cb, sb, sa * cb])),
        BasisFamily::FourLevel => Ok(DVector::from_vec(vec![ca * cb, ca * sb, sa * cb, sa * sb])),
        BasisFamily::ThreePhased => Err(Error::WrongFamily(
            "the phased family has no (alpha, beta) form".into(),
        )),
    }
}

/// Pairwise orthogonality residuals, `r[n][m]` for `n != m`. Diagonal
/// entries are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthogonalityResiduals(pub DMatrix<f64>);

impl OrthogonalityResiduals {
    pub fn max_off_diagonal(&self) -> f64 {
        self.0.iter().fold(0.0, |m, r| m.max(r.abs()))
    }

    pub fn is_orthogonal(&self) -> bool {
        self.max_off_diagonal() <= ORTHOGONALITY_TOLERANCE
    }
}

/// Evaluates the closed-form orthogonality condition for every mode pair.
pub fn check_orthogonality_condition(
    angles: &GeneralAngles,
    family: BasisFamily,
) -> Result<OrthogonalityResiduals> {
    let dim = family.dimension();
    if angles.alpha.len() != angles.beta.len() {
        return Err(Error::DimensionMismatch {
            expected: angles.alpha.len(),
            found: angles.beta.len(),
        });
    }
    if angles.alpha.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: angles.alpha.len(),
        });
    }
    let (a, b) = (&angles.alpha, &angles.beta);
    let pair: fn(f64, f64, f64, f64) -> f64 = match family {
        BasisFamily::ThreeReal => {
            |an, am, bn, bm| (an - am).cos() * bn.cos() * bm.cos() + bn.sin() * bm.sin()
        }
        BasisFamily::FourLevel => |an, am, bn, bm| (an - am).cos() * (bn - bm).cos(),
        BasisFamily::ThreePhased => {
            return Err(Error::WrongFamily(
                "the phased family has no (alpha, beta) form".into(),
            ))
        }
    };
    let residuals = DMatrix::from_fn(dim, dim, |n, m| {
        if n == m {
            0.0
        } else {
            pair(a[n], a[m], b[n], b[m])
        }
    });
    Ok(OrthogonalityResiduals(residuals))
}

/// A time-dependent orthonormal basis. Modes are numbered from 1 as in the
/// physics literature; [`MovingBasis::vectors`] returns them in that order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MovingBasis {
    family: BasisFamily,
    schedule: AngleSchedule,
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn cvec(values: &[Complex64]) -> DVector<Complex64> {
    DVector::from_column_slice(values)
}

fn kron2(a: [f64; 2], b: [f64; 2]) -> [f64; 4] {
    [a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]]
}

impl MovingBasis {
    pub fn family(&self) -> BasisFamily {
        self.family
    }

    pub fn schedule(&self) -> &AngleSchedule {
        &self.schedule
    }

    pub fn dimension(&self) -> usize {
        self.family.dimension()
    }

    /// Mode `n` (1-based) at time `t`.
    ///
    /// # Panics
    /// If `n` is 0 or exceeds the dimension.
    pub fn mode(&self, n: usize, t: f64) -> DVector<Complex64> {
        assert!(
            n >= 1 && n <= self.dimension(),
            "mode index {n} out of range"
        );
        self.vectors(t).swap_remove(n - 1)
    }

    pub fn vectors(&self, t: f64) -> Vec<DVector<Complex64>> {
        let s = self.schedule.at(t);
        let (st, ct) = s.theta.sin_cos();
        let (sp, cp) = s.phi.sin_cos();
        match self.family {
            BasisFamily::ThreeReal => vec![
                cvec(&[c(ct), c(0.0), c(st)]),
                cvec(&[c(st * cp), c(sp), c(-ct * cp)]),
                cvec(&[c(st * sp), c(-cp), c(-ct * sp)]),
            ],
            BasisFamily::ThreePhased => {
                let g = Complex64::from_polar(1.0, s.gamma);
                let k = Complex64::from_polar(1.0, s.kappa);
                vec![
                    cvec(&[c(st * cp), g * sp, k * (ct * cp)]),
                    cvec(&[c(st * sp), -g * cp, k * (ct * sp)]),
                    cvec(&[c(ct), c(0.0), -k * st]),
                ]
            }
            BasisFamily::FourLevel => {
                let (u, u_perp) = ([ct, st], [st, -ct]);
                let (v, v_perp) = ([cp, sp], [sp, -cp]);
                [
                    kron2(u, v),
                    kron2(u_perp, v),
                    kron2(u, v_perp),
                    kron2(u_perp, v_perp),
                ]
                .iter()
                .map(|x| cvec(&x.map(c)))
                .collect()
            }
        }
    }

    /// Exact time derivatives of [`MovingBasis::vectors`] by the chain rule.
    pub fn derivatives(&self, t: f64) -> Vec<DVector<Complex64>> {
        let s = self.schedule.at(t);
        let (st, ct) = s.theta.sin_cos();
        let (sp, cp) = s.phi.sin_cos();
        let (dt, dp) = (s.dtheta, s.dphi);
        match self.family {
            BasisFamily::ThreeReal => vec![
                cvec(&[c(-dt * st), c(0.0), c(dt * ct)]),
                cvec(&[
                    c(dt * ct * cp - dp * st * sp),
                    c(dp * cp),
                    c(dt * st * cp + dp * ct * sp),
                ]),
                cvec(&[
                    c(dt * ct * sp + dp * st * cp),
                    c(dp * sp),
                    c(dt * st * sp - dp * ct * cp),
                ]),
            ],
            BasisFamily::ThreePhased => {
                let i = Complex64::i();
                let g = Complex64::from_polar(1.0, s.gamma);
                let k = Complex64::from_polar(1.0, s.kappa);
                let (dg, dk) = (s.dgamma, s.dkappa);
                vec![
                    cvec(&[
                        c(dt * ct * cp - dp * st * sp),
                        g * (i * dg * sp + dp * cp),
                        k * (i * dk * ct * cp - dt * st * cp - dp * ct * sp),
                    ]),
                    cvec(&[
                        c(dt * ct * sp + dp * st * cp),
                        -g * (i * dg * cp - dp * sp),
                        k * (i * dk * ct * sp - dt * st * sp + dp * ct * cp),
                    ]),
                    cvec(&[c(-dt * st), c(0.0), -k * (i * dk * st + dt * ct)]),
                ]
            }
            BasisFamily::FourLevel => {
                let (u, u_perp) = ([ct, st], [st, -ct]);
                let (du, du_perp) = ([-dt * st, dt * ct], [dt * ct, dt * st]);
                let (v, v_perp) = ([cp, sp], [sp, -cp]);
                let (dv, dv_perp) = ([-dp * sp, dp * cp], [dp * cp, dp * sp]);
                let product = |a: [f64; 2], da: [f64; 2], b: [f64; 2], db: [f64; 2]| {
                    let (x, y) = (kron2(da, b), kron2(a, db));
                    cvec(&[0, 1, 2, 3].map(|j| c(x[j] + y[j])))
                };
                vec![
                    product(u, du, v, dv),
                    product(u_perp, du_perp, v, dv),
                    product(u, du, v_perp, dv_perp),
                    product(u_perp, du_perp, v_perp, dv_perp),
                ]
            }
        }
    }

    /// Columns are the modes, so this matrix maps mode amplitudes to bare
    /// amplitudes.
    pub fn basis_matrix(&self, t: f64) -> DMatrix<Complex64> {
        DMatrix::from_columns(&self.vectors(t))
    }

    /// `G[n][m] = <phi_n|phi_m>`.
    pub fn gram(&self, t: f64) -> DMatrix<Complex64> {
        let u = self.basis_matrix(t);
        u.adjoint() * u
    }

    /// `sum_n |phi_n><phi_n|`, which is the identity for a complete basis.
    pub fn completeness(&self, t: f64) -> DMatrix<Complex64> {
        let u = self.basis_matrix(t);
        &u * u.adjoint()
    }

    /// Mode amplitudes `<phi_n(t)|psi>`.
    pub fn project(&self, t: f64, psi: &DVector<Complex64>) -> Vec<Complex64> {
        self.vectors(t).iter().map(|v| v.dotc(psi)).collect()
    }
}

fn require_phase_free(schedule: &AngleSchedule, family: &str) -> Result<()> {
    if schedule.has_phases() {
        return Err(Error::WrongFamily(format!(
            "the {family} family needs gamma and kappa identically zero"
        )));
    }
    Ok(())
}

pub fn build_three_real_basis(schedule: AngleSchedule) -> Result<MovingBasis> {
    require_phase_free(&schedule, "real three-level")?;
    Ok(MovingBasis {
        family: BasisFamily::ThreeReal,
        schedule,
    })
}

pub fn build_phased_basis(schedule: AngleSchedule) -> MovingBasis {
    MovingBasis {
        family: BasisFamily::ThreePhased,
        schedule,
    }
}

/// Product basis `{|u>, |u_perp>} (x) {|v>, |v_perp>}` over four levels with
/// `u = (cos theta, sin theta)`, `v = (cos phi, sin phi)`.
///
/// Written out with a `1/sqrt 2` prefactor the four states each have norm
/// `1/sqrt 2`; the states here are the unit-norm versions.
pub fn build_four_level_basis(schedule: AngleSchedule) -> Result<MovingBasis> {
    require_phase_free(&schedule, "four-level")?;
    Ok(MovingBasis {
        family: BasisFamily::FourLevel,
        schedule,
    })
}

/// Largest entry of `|m - I|`.
pub fn identity_deviation(m: &DMatrix<Complex64>) -> f64 {
    let mut worst = 0.0_f64;
    for r in 0..m.nrows() {
        for col in 0..m.ncols() {
            let target = if r == col { 1.0 } else { 0.0 };
            worst = worst.max((m[(r, col)] - target).norm());
        }
    }
    worst
}
