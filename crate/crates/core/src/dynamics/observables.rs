use std::f64::consts::{PI, TAU};

use super::integrate::Trajectory;
use crate::error::{Error, Result};

/// `|<3|psi>|` below this leaves the phase on `|3>` undefined.
pub const PHASE_GAP_THRESHOLD: f64 = 1e-12;
/// Largest `|<2|psi>|` still treated as a two-state trajectory.
pub const LEAKAGE_THRESHOLD: f64 = 1e-10;

/// Mixing angle and `|3>` phase read back from a trajectory.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PhaseExtraction {
    /// `arcsin |<1|psi>|`, in `[0, pi/2]`.
    pub theta_prime: Vec<f64>,
    /// `arg <3|psi>`, unwrapped so consecutive defined samples differ by less
    /// than `pi`. `None` where the `|3>` amplitude vanishes.
    pub kappa_prime: Vec<Option<f64>>,
}

fn require_three_levels(traj: &Trajectory) -> Result<()> {
    if traj.dimension() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            found: traj.dimension(),
        });
    }
    Ok(())
}

/// Recovers `theta` and `kappa` of a `phi = 0` phased trajectory, where
/// `psi = sin(theta)|1> + e^{i kappa} cos(theta)|3>`.
///
/// The first defined phase is the principal value in `(-pi, pi]`; later ones
/// are shifted by multiples of `2 pi` to stay continuous.
pub fn extract_theta_kappa(traj: &Trajectory) -> Result<PhaseExtraction> {
    require_three_levels(traj)?;
    let mut out = PhaseExtraction::default();
    let mut previous: Option<f64> = None;
    for psi in &traj.states {
        let p1 = psi[0].norm_sqr();
        out.theta_prime.push(p1.sqrt().min(1.0).asin());

        let a3 = psi[2];
        if a3.norm() < PHASE_GAP_THRESHOLD {
            out.kappa_prime.push(None);
            continue;
        }
        let principal = a3.arg();
        let value = match previous {
            None => principal,
            Some(last) => principal + TAU * ((last - principal) / TAU).round(),
        };
        debug_assert!(previous.is_none_or(|last| (value - last).abs() <= PI));
        previous = Some(value);
        out.kappa_prime.push(Some(value));
    }
    Ok(out)
}

/// Bloch vectors of the `{|1>, |3>}` qubit with `|1>` at the north pole:
/// `x + i y = 2 a1* a3`, `z = |a1|^2 - |a3|^2`, scaled to the unit sphere.
pub fn bloch_coordinates(traj: &Trajectory) -> Result<Vec<[f64; 3]>> {
    require_three_levels(traj)?;
    traj.states
        .iter()
        .zip(&traj.times)
        .map(|(psi, t)| {
            let leak = psi[1].norm();
            if leak > LEAKAGE_THRESHOLD {
                return Err(Error::Regime(format!("|<2|psi>| = {leak:e} at t = {t}")));
            }
            let (a1, a3) = (psi[0], psi[2]);
            let weight = a1.norm_sqr() + a3.norm_sqr();
            let coherence = a1.conj() * a3 * 2.0;
            Ok([
                coherence.re / weight,
                coherence.im / weight,
                (a1.norm_sqr() - a3.norm_sqr()) / weight,
            ])
        })
        .collect()
}
