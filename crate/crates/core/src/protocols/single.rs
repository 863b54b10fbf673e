use std::f64::consts::{FRAC_PI_2, PI};

use super::{
    bare_state, real_vector, require_nonnegative, require_phase_free, sweep, BoundaryValues,
    Branch, Design, Protocol, ProtocolRequest, Tracking, NORMALIZATION_TOLERANCE,
};
use crate::basis::{AngleFn, AngleSchedule, BasisFamily};
use crate::error::{Error, Result};
use crate::protocols::PulseSet;

/// Final mixing angle for `|1> -> mu|1> + nu|3>` on the chosen branch.
///
/// The transfer reaches `cos(theta)|1> + sin(theta)|3>`. `LeastEnergy` matches
/// the target up to a global sign with the smallest `|theta|`; the other
/// branches fix the signs of both amplitudes independently of the target's.
pub fn select_branch(mu: f64, nu: f64, branch: Branch) -> Result<f64> {
    if !(mu.is_finite() && nu.is_finite()) {
        return Err(Error::InvalidInput("amplitudes must be finite".into()));
    }
    let residual = (mu * mu + nu * nu - 1.0).abs();
    if residual > NORMALIZATION_TOLERANCE {
        return Err(Error::Unnormalized { residual });
    }
    let clamp = |x: f64| x.clamp(-1.0, 1.0);
    Ok(match branch {
        Branch::LeastEnergy if mu >= 0.0 => clamp(nu).asin(),
        Branch::LeastEnergy => clamp(-nu).asin(),
        Branch::ArccosPlus => PI + clamp(mu.abs()).acos(),
        Branch::ArccosMinus => PI - clamp(mu.abs()).acos(),
        Branch::ArcsinPlus => PI + clamp(nu.abs()).asin(),
        Branch::ArcsinMinus => -clamp(nu.abs()).asin(),
    })
}

fn finish(
    request: &ProtocolRequest,
    schedule: AngleSchedule,
    boundary: BoundaryValues,
    mode: usize,
    target: [f64; 3],
) -> Design {
    Design {
        protocol: request.protocol,
        platform: request.platform,
        family: BasisFamily::ThreeReal,
        schedule,
        pulses: PulseSet::from_real_schedule(&schedule, request.t0, request.tf),
        boundary,
        tracking: Tracking::SingleMode(mode),
        initial_state: bare_state(request.protocol.initial_level(), 3),
        target_state: real_vector(target),
        t0: request.t0,
        tf: request.tf,
    }
}

fn require_protocol(request: &ProtocolRequest, protocol: Protocol) -> Result<()> {
    if request.protocol != protocol {
        return Err(Error::ProtocolMismatch(format!(
            "request is for {}, not {protocol}",
            request.protocol
        )));
    }
    request.validate()
}

/// Two-ground-state transfer `|1> -> mu|1> + nu|3>` driven by the microwave
/// alone: `phi = 0` and `theta` sweeps from `0` to the branch angle.
pub fn design_protocol_i(request: &ProtocolRequest) -> Result<Design> {
    require_protocol(request, Protocol::SingleModeI)?;
    require_phase_free(request)?;
    let t = &request.target;
    if t.eta.abs() > NORMALIZATION_TOLERANCE {
        return Err(Error::ProtocolMismatch(
            "single-I cannot populate |2>; eta must be 0".into(),
        ));
    }
    let theta_f = select_branch(t.mu, t.nu, request.branch)?;
    let schedule = AngleSchedule::real(
        sweep(request.t0, request.tf, 0.0, theta_f)?,
        AngleFn::Constant(0.0),
    );
    let boundary = BoundaryValues {
        theta_f,
        branch: Some(request.branch),
        ..Default::default()
    };
    Ok(finish(
        request,
        schedule,
        boundary,
        1,
        [theta_f.cos(), 0.0, theta_f.sin()],
    ))
}

/// `arctan(mu / nu)`, with the `nu = 0` limit `pi / 2`.
fn chi(mu: f64, nu: f64) -> f64 {
    if nu == 0.0 {
        FRAC_PI_2
    } else {
        (mu / nu).atan()
    }
}

/// Three-level transfer `|1> -> mu|1> + eta|2> - nu|3>` along `phi_2`:
/// `theta` goes from `pi/2` to `chi` while `phi` goes from `0` to
/// `arcsin(eta)`.
pub fn design_protocol_ii(request: &ProtocolRequest) -> Result<Design> {
    require_protocol(request, Protocol::SingleModeII)?;
    require_phase_free(request)?;
    require_nonnegative(request)?;
    let t = &request.target;
    let chi = chi(t.mu, t.nu);
    let phi_f = t.eta.min(1.0).asin();
    let schedule = AngleSchedule::real(
        sweep(request.t0, request.tf, FRAC_PI_2, chi)?,
        sweep(request.t0, request.tf, 0.0, phi_f)?,
    );
    let boundary = BoundaryValues {
        theta0: FRAC_PI_2,
        theta_f: chi,
        phi_f,
        chi: Some(chi),
        ..Default::default()
    };
    Ok(finish(request, schedule, boundary, 2, [t.mu, t.eta, -t.nu]))
}

/// `|2> -> mu|1> + eta|2> - nu|3>` with `theta` held at `chi`, so the
/// microwave stays off; `phi` goes from `pi/2` to `arcsin(eta)`.
pub fn design_protocol_ii_no_microwave(request: &ProtocolRequest) -> Result<Design> {
    require_protocol(request, Protocol::SingleModeIINoMicrowave)?;
    require_phase_free(request)?;
    require_nonnegative(request)?;
    let t = &request.target;
    let chi = chi(t.mu, t.nu);
    let phi_f = t.eta.min(1.0).asin();
    let schedule = AngleSchedule::real(
        AngleFn::Constant(chi),
        sweep(request.t0, request.tf, FRAC_PI_2, phi_f)?,
    );
    let boundary = BoundaryValues {
        theta0: chi,
        theta_f: chi,
        phi0: FRAC_PI_2,
        phi_f,
        chi: Some(chi),
        ..Default::default()
    };
    Ok(finish(request, schedule, boundary, 2, [t.mu, t.eta, -t.nu]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocols::{design, TargetState};
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

    const STEPS: usize = 4000;

    fn request(protocol: Protocol, mu: f64, eta: f64, nu: f64, duration: f64) -> ProtocolRequest {
        ProtocolRequest::new(protocol, TargetState::new(mu, eta, nu).unwrap(), duration)
    }

    fn reach(design: &Design) -> f64 {
        design
            .evolve(STEPS)
            .unwrap()
            .final_fidelity(&design.target_state)
    }

    #[test]
    fn branch_angles() {
        let h = FRAC_1_SQRT_2;
        let expect = [
            (Branch::LeastEnergy, FRAC_PI_4),
            (Branch::ArccosPlus, 5.0 * FRAC_PI_4),
            (Branch::ArccosMinus, 3.0 * FRAC_PI_4),
            (Branch::ArcsinPlus, 5.0 * FRAC_PI_4),
            (Branch::ArcsinMinus, -FRAC_PI_4),
        ];
        for (branch, angle) in expect {
            assert!(
                (select_branch(h, h, branch).unwrap() - angle).abs() < 1e-15,
                "{branch}"
            );
        }
        assert!((select_branch(-h, h, Branch::LeastEnergy).unwrap() + FRAC_PI_4).abs() < 1e-15);
        assert!(matches!(
            select_branch(0.5, 0.5, Branch::LeastEnergy),
            Err(Error::Unnormalized { .. })
        ));
    }

    #[test]
    fn branch_signs_of_the_final_amplitudes() {
        let h = FRAC_1_SQRT_2;
        let signs = [
            (Branch::LeastEnergy, 1.0, 1.0),
            (Branch::ArccosMinus, -1.0, 1.0),
            (Branch::ArccosPlus, -1.0, -1.0),
            (Branch::ArcsinMinus, 1.0, -1.0),
        ];
        for (branch, s1, s3) in signs {
            let d = design(&request(Protocol::SingleModeI, h, 0.0, h, 1.0).with_branch(branch))
                .unwrap();
            let psi = d.evolve(STEPS).unwrap().final_state().clone();
            assert!((psi[0].re - s1 * h).abs() < 1e-8, "{branch}: {psi}");
            assert!((psi[2].re - s3 * h).abs() < 1e-8, "{branch}: {psi}");
            assert!(psi[1].norm() < 1e-12);
        }
    }

    #[test]
    fn least_energy_reaches_every_sign_pattern_up_to_phase() {
        for (mu, nu) in [
            (0.6, 0.8),
            (-0.6, 0.8),
            (0.6, -0.8),
            (-0.6, -0.8),
            (1.0, 0.0),
            (0.0, 1.0),
        ] {
            let d = design(&request(Protocol::SingleModeI, mu, 0.0, nu, 1.0)).unwrap();
            let target = TargetState::new(mu, 0.0, nu).unwrap().vector();
            let fidelity = d.evolve(STEPS).unwrap().final_fidelity(&target);
            assert!((fidelity - 1.0).abs() < 1e-10, "({mu}, {nu}): {fidelity}");
            assert!(d.boundary.theta_f.abs() <= FRAC_PI_2 + 1e-15);
        }
    }

    #[test]
    fn protocol_i_uses_only_the_microwave() {
        let d = design(&request(Protocol::SingleModeI, 0.6, 0.0, 0.8, 1.0)).unwrap();
        for i in 0..=20 {
            let (p, s, _) = d.pulses.at(i as f64 / 20.0);
            assert_eq!((p, s), (0.0, 0.0));
        }
        let eta = request(Protocol::SingleModeI, 0.6, 0.8, 0.0, 1.0);
        assert!(matches!(design(&eta), Err(Error::ProtocolMismatch(_))));
    }

    #[test]
    fn protocol_ii_reaches_the_sign_flipped_target() {
        let third = 1.0 / 3f64.sqrt();
        for (mu, eta, nu) in [
            (third, third, third),
            (0.6, 0.0, 0.8),
            (0.0, 1.0, 0.0),
            (0.6, 0.8, 0.0),
            (0.0, 0.6, 0.8),
        ] {
            let d = design(&request(Protocol::SingleModeII, mu, eta, nu, 1.0)).unwrap();
            assert_eq!(d.target_state, real_vector([mu, eta, -nu]));
            assert!((reach(&d) - 1.0).abs() < 1e-10, "({mu}, {eta}, {nu})");
        }
    }

    #[test]
    fn protocol_ii_rejects_negative_amplitudes_and_phases() {
        let neg = request(Protocol::SingleModeII, -0.6, 0.0, 0.8, 1.0);
        assert!(matches!(design(&neg), Err(Error::UnsupportedBranch(_))));
        let phased = ProtocolRequest::new(
            Protocol::SingleModeII,
            TargetState::new(0.6, 0.0, 0.8)
                .unwrap()
                .with_phases(0.0, 0.3),
            1.0,
        );
        assert!(matches!(design(&phased), Err(Error::ProtocolMismatch(_))));
    }

    #[test]
    fn no_microwave_variant() {
        let third = 1.0 / 3f64.sqrt();
        for (mu, eta, nu) in [
            (third, third, third),
            (FRAC_1_SQRT_2, 0.0, FRAC_1_SQRT_2),
            (0.0, 1.0, 0.0),
        ] {
            let d = design(&request(
                Protocol::SingleModeIINoMicrowave,
                mu,
                eta,
                nu,
                2.0,
            ))
            .unwrap();
            assert!(!d.pulses.uses_microwave());
            assert!(d.pulses.sample(101).omega_a.iter().all(|&a| a == 0.0));
            assert_eq!(d.initial_state, bare_state(2, 3));
            assert!((reach(&d) - 1.0).abs() < 1e-10, "({mu}, {eta}, {nu})");
        }
    }

    #[test]
    fn pulses_scale_inversely_with_duration() {
        let third = 1.0 / 3f64.sqrt();
        let one = design(&request(Protocol::SingleModeII, third, third, third, 1.0)).unwrap();
        let five = design(&request(Protocol::SingleModeII, third, third, third, 5.0)).unwrap();
        for i in 0..=50 {
            let x = i as f64 / 50.0;
            let (p1, s1, a1) = one.pulses.at(x);
            let (p5, s5, a5) = five.pulses.at(5.0 * x);
            for (a, b) in [(p1, p5), (s1, s5), (a1, a5)] {
                assert!((a - 5.0 * b).abs() < 1e-12);
            }
        }
        let f1 = one.evolve(STEPS).unwrap().final_populations();
        let f5 = five.evolve(STEPS).unwrap().final_populations();
        for (a, b) in f1.iter().zip(&f5) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn shifted_interval_matches_origin_interval() {
        let base = request(Protocol::SingleModeII, 0.6, 0.0, 0.8, 1.0);
        let shifted = base.clone().with_interval(3.0, 4.0);
        let (a, b) = (design(&base).unwrap(), design(&shifted).unwrap());
        for i in 0..=10 {
            let x = i as f64 / 10.0;
            let (pa, sa, wa) = a.pulses.at(x);
            let (pb, sb, wb) = b.pulses.at(3.0 + x);
            assert!((pa - pb).abs() < 1e-12 && (sa - sb).abs() < 1e-12 && (wa - wb).abs() < 1e-12);
        }
    }
}
