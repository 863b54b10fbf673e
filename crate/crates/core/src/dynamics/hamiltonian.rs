use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::basis::{AngleSchedule, MovingBasis};
use crate::error::{Error, Result};
use crate::protocols::PulseSet;

/// Where a Hamiltonian's matrix elements come from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HamiltonianSource {
    /// `i sum_n |d/dt phi_n><phi_n|` assembled numerically from the basis.
    FromBasis(MovingBasis),
    /// Real three-level Lambda couplings with zero diagonal.
    ThreeLevelLambda(PulseSet),
    /// Closed-form phased three-level matrix with `-gamma'`, `-kappa'` on the
    /// diagonal.
    Phased(AngleSchedule),
    /// Closed-form four-level product-basis matrix.
    FourLevel(AngleSchedule),
    /// Two atoms in a cavity, one-excitation subspace
    /// `{|e,g>|0>, |g,g>|1>, |g,e>|0>}`.
    CavityQed(PulseSet),
}

/// A time-dependent Hermitian matrix (`hbar = 1`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HamiltonianSpec {
    dimension: usize,
    source: HamiltonianSource,
}

const I: Complex64 = Complex64::new(0.0, 1.0);

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

impl HamiltonianSpec {
    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn source(&self) -> &HamiltonianSource {
        &self.source
    }

    pub fn evaluate(&self, t: f64) -> DMatrix<Complex64> {
        match &self.source {
            HamiltonianSource::FromBasis(basis) => {
                let (states, rates) = (basis.vectors(t), basis.derivatives(t));
                let mut h = DMatrix::zeros(self.dimension, self.dimension);
                for (phi, dphi) in states.iter().zip(&rates) {
                    h += dphi * phi.adjoint();
                }
                h * I
            }
            HamiltonianSource::ThreeLevelLambda(p) => {
                let (op, os, oa) = p.at(t);
                DMatrix::from_row_slice(
                    3,
                    3,
                    &[
                        re(0.0),
                        -I * op,
                        I * oa,
                        I * op,
                        re(0.0),
                        -I * os,
                        -I * oa,
                        I * os,
                        re(0.0),
                    ],
                )
            }
            HamiltonianSource::Phased(schedule) => {
                let s = schedule.at(t);
                let (st, ct) = s.theta.sin_cos();
                let eg = Complex64::from_polar(1.0, s.gamma);
                let ek = Complex64::from_polar(1.0, s.kappa);
                let ekg = Complex64::from_polar(1.0, s.kappa - s.gamma);
                DMatrix::from_row_slice(
                    3,
                    3,
                    &[
                        re(0.0),
                        -I * eg.conj() * (s.dphi * st),
                        I * ek.conj() * s.dtheta,
                        I * eg * (s.dphi * st),
                        re(-s.dgamma),
                        I * ekg.conj() * (s.dphi * ct),
                        -I * ek * s.dtheta,
                        -I * ekg * (s.dphi * ct),
                        re(-s.dkappa),
                    ],
                )
            }
            HamiltonianSource::FourLevel(schedule) => {
                let s = schedule.at(t);
                let (p, q) = (I * s.dphi, I * s.dtheta);
                let z = re(0.0);
                DMatrix::from_row_slice(4, 4, &[z, -p, -q, z, p, z, z, -q, q, z, z, -p, z, q, p, z])
            }
            HamiltonianSource::CavityQed(pulses) => {
                let (op, os, _) = pulses.at(t);
                let g1 = -I * op;
                let g2 = I * os;
                let z = re(0.0);
                DMatrix::from_row_slice(3, 3, &[z, g1, z, g1.conj(), z, g2.conj(), z, g2, z])
            }
        }
    }
}

/// Counterdiabatic Hamiltonian that transports every mode of `basis` along
/// itself.
pub fn hamiltonian_from_basis(basis: MovingBasis) -> HamiltonianSpec {
    HamiltonianSpec {
        dimension: basis.dimension(),
        source: HamiltonianSource::FromBasis(basis),
    }
}

pub fn three_level_lambda(pulses: PulseSet) -> HamiltonianSpec {
    HamiltonianSpec {
        dimension: 3,
        source: HamiltonianSource::ThreeLevelLambda(pulses),
    }
}

pub fn phased_hamiltonian(schedule: AngleSchedule) -> HamiltonianSpec {
    HamiltonianSpec {
        dimension: 3,
        source: HamiltonianSource::Phased(schedule),
    }
}

/// Couplings `g1 = -i omega_p` and `g2 = i omega_s`; the matrix is
/// `[[0, g1, 0], [g1*, 0, g2*], [0, g2, 0]]`, which makes it identical to the
/// Lambda Hamiltonian without microwave.
pub fn cavity_qed_hamiltonian(pulses: PulseSet) -> Result<HamiltonianSpec> {
    if pulses.uses_microwave() {
        return Err(Error::MappingUnsupported(
            "the cavity has no direct |e,g> <-> |g,e> coupling; omega_a must vanish".into(),
        ));
    }
    Ok(HamiltonianSpec {
        dimension: 3,
        source: HamiltonianSource::CavityQed(pulses),
    })
}

pub fn four_level_hamiltonian(schedule: AngleSchedule) -> Result<HamiltonianSpec> {
    if schedule.has_phases() {
        return Err(Error::WrongFamily(
            "the four-level family needs gamma and kappa identically zero".into(),
        ));
    }
    Ok(HamiltonianSpec {
        dimension: 4,
        source: HamiltonianSource::FourLevel(schedule),
    })
}

/// Largest entry of `|H - H^dagger|`.
pub fn hermiticity_residual(h: &DMatrix<Complex64>) -> f64 {
    let diff = h - h.adjoint();
    diff.iter().fold(0.0, |m, z| m.max(z.norm()))
}
