use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{
    bare_state, real_vector, require_nonnegative, require_phase_free, sweep, BoundaryValues,
    Design, Protocol, ProtocolRequest, TargetState, Tracking,
};
use crate::basis::{AngleFn, AngleSchedule, BasisFamily};
use crate::error::{Error, Result};
use crate::protocols::PulseSet;

/// Largest accepted mismatch between the reconstructed and requested final
/// amplitudes.
pub const MULTIMODE_RESIDUAL_TOLERANCE: f64 = 1e-10;

/// Boundary angles and mode weights reaching `mu|1> + eta|2> + nu|3>` from
/// `|1>` with `theta` held fixed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MultiModeSolution {
    pub theta0: f64,
    pub theta_f: f64,
    pub phi0: f64,
    /// Also the total sweep `zeta`, since `phi0 = 0`.
    pub phi_f: f64,
    /// Weights of `phi_1`, `phi_2`, `phi_3`; constant along the evolution.
    pub coefficients: [f64; 3],
    /// Largest amplitude mismatch at `tf`.
    pub residual: f64,
}

impl MultiModeSolution {
    /// `sum_n c_n phi_n(theta0, phi)`.
    pub fn state_at(&self, phi: f64) -> [f64; 3] {
        let (st, ct) = self.theta0.sin_cos();
        let (sp, cp) = phi.sin_cos();
        let [c1, c2, c3] = self.coefficients;
        [
            c1 * ct + c2 * st * cp + c3 * st * sp,
            c2 * sp - c3 * cp,
            c1 * st - c2 * ct * cp - c3 * ct * sp,
        ]
    }

    pub fn is_identity(&self) -> bool {
        self.theta0 == 0.0 && self.phi_f == 0.0
    }
}

/// Solves the multi-mode boundary problem for a nonnegative real target.
///
/// `theta0 = arctan((1 - mu) / nu)` (`pi/2` when `nu = 0`) and
/// `phi_f = atan2(eta, mu sin(theta0) - nu cos(theta0))`, with weights
/// `(cos theta0, sin theta0, 0)`. `mu = 1` needs no evolution at all.
pub fn solve_multimode_boundary(target: &TargetState) -> Result<MultiModeSolution> {
    target.validate()?;
    let TargetState { mu, eta, nu, .. } = *target;
    if mu < 0.0 || eta < 0.0 || nu < 0.0 {
        return Err(Error::UnsupportedBranch(
            "multi-mode transfer needs nonnegative amplitudes".into(),
        ));
    }
    let theta0 = if nu == 0.0 && eta == 0.0 {
        0.0
    } else if nu == 0.0 {
        std::f64::consts::FRAC_PI_2
    } else {
        ((1.0 - mu) / nu).atan()
    };
    let phi_f = if theta0 == 0.0 {
        0.0
    } else {
        eta.atan2(mu * theta0.sin() - nu * theta0.cos())
    };
    let mut solution = MultiModeSolution {
        theta0,
        theta_f: theta0,
        phi0: 0.0,
        phi_f,
        coefficients: [theta0.cos(), theta0.sin(), 0.0],
        residual: 0.0,
    };
    let reached = solution.state_at(phi_f);
    solution.residual = reached
        .iter()
        .zip([mu, eta, nu])
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    if solution.residual > MULTIMODE_RESIDUAL_TOLERANCE {
        return Err(Error::InvalidInput(format!(
            "multi-mode boundary residual {:e} exceeds {MULTIMODE_RESIDUAL_TOLERANCE:e}",
            solution.residual
        )));
    }
    Ok(solution)
}

/// `|1> -> mu|1> + eta|2> + nu|3>` through a fixed superposition of the
/// moving modes. Only `phi` moves, so the microwave stays off and the design
/// also runs on the cavity platform.
pub fn design_multimode(request: &ProtocolRequest) -> Result<Design> {
    if request.protocol != Protocol::MultiMode {
        return Err(Error::ProtocolMismatch(format!(
            "request is for {}, not {}",
            request.protocol,
            Protocol::MultiMode
        )));
    }
    request.validate()?;
    require_phase_free(request)?;
    require_nonnegative(request)?;
    let solution = solve_multimode_boundary(&request.target)?;
    let schedule = AngleSchedule::real(
        AngleFn::Constant(solution.theta0),
        sweep(request.t0, request.tf, solution.phi0, solution.phi_f)?,
    );
    let t = &request.target;
    Ok(Design {
        protocol: request.protocol,
        platform: request.platform,
        family: BasisFamily::ThreeReal,
        schedule,
        pulses: PulseSet::from_real_schedule(&schedule, request.t0, request.tf),
        boundary: BoundaryValues {
            theta0: solution.theta0,
            theta_f: solution.theta_f,
            phi0: solution.phi0,
            phi_f: solution.phi_f,
            zeta: Some(solution.phi_f - solution.phi0),
            ..Default::default()
        },
        tracking: Tracking::MultiMode(
            solution
                .coefficients
                .iter()
                .map(|&c| Complex64::new(c, 0.0))
                .collect(),
        ),
        initial_state: bare_state(1, 3),
        target_state: real_vector([t.mu, t.eta, t.nu]),
        t0: request.t0,
        tf: request.tf,
    })
}
