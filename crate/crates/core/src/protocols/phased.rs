use std::f64::consts::PI;

use nalgebra::DVector;
use num_complex::Complex64;

use super::{
    bare_state, sweep, BoundaryValues, Design, Protocol, ProtocolRequest, Tracking,
    NORMALIZATION_TOLERANCE,
};
use crate::basis::{AngleFn, AngleSchedule, BasisFamily};
use crate::error::{Error, Result};
use crate::protocols::PulseSet;

/// `|3> -> |mu||1> + e^{i kappa(T)} |nu||3>` along the phased `phi_1` with
/// `phi = 0`, `theta` from `0` to `arcsin|mu|`, and a linearly wound phase
/// `kappa(t) = lambda pi (t - t0)`.
///
/// `lambda` comes from the request; failing that, from the target's `kappa`
/// as `kappa / (pi T)`; failing that, `1 / (2T)`, one quarter turn.
pub fn design_phased(request: &ProtocolRequest) -> Result<Design> {
    if request.protocol != Protocol::Phased {
        return Err(Error::ProtocolMismatch(format!(
            "request is for {}, not {}",
            request.protocol,
            Protocol::Phased
        )));
    }
    request.validate()?;
    let t = &request.target;
    if t.eta.abs() > NORMALIZATION_TOLERANCE {
        return Err(Error::UnsupportedBranch(
            "the phased design keeps phi = 0 and cannot populate |2>".into(),
        ));
    }
    let duration = request.duration();
    let lambda = match request.lambda_rate {
        Some(l) if l.is_finite() => l,
        Some(l) => {
            return Err(Error::InvalidInput(format!(
                "lambda must be finite, got {l}"
            )))
        }
        None if t.kappa != 0.0 => t.kappa / (PI * duration),
        None => 0.5 / duration,
    };
    let theta_f = t.mu.abs().min(1.0).asin();
    let kappa = AngleFn::Linear {
        origin: request.t0,
        value: 0.0,
        rate: lambda * PI,
    };
    let schedule = AngleSchedule::real(
        sweep(request.t0, request.tf, 0.0, theta_f)?,
        AngleFn::Constant(0.0),
    )
    .with_phases(AngleFn::Constant(0.0), kappa);
    let target_state = DVector::from_vec(vec![
        Complex64::new(theta_f.sin(), 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::from_polar(theta_f.cos(), kappa.value(request.tf)),
    ]);
    Ok(Design {
        protocol: request.protocol,
        platform: request.platform,
        family: BasisFamily::ThreePhased,
        schedule,
        pulses: PulseSet::from_phased_schedule(&schedule, request.t0, request.tf),
        boundary: BoundaryValues {
            theta_f,
            lambda_rate: Some(lambda),
            ..Default::default()
        },
        tracking: Tracking::SingleMode(1),
        initial_state: bare_state(3, 3),
        target_state,
        t0: request.t0,
        tf: request.tf,
    })
}
