//! Turning a target state and a duration into angle schedules and pulses.
//!
//! Five designs are available, all built on rest-to-rest cubics so every
//! pulse starts and ends at zero:
//!
//! | protocol | initial | tracked mode | microwave |
//! |---|---|---|---|
//! | [`Protocol::SingleModeI`] | `|1>` | `phi_1`, two ground states only | yes |
//! | [`Protocol::SingleModeII`] | `|1>` | `phi_2` | yes |
//! | [`Protocol::SingleModeIINoMicrowave`] | `|2>` | `phi_2`, constant `theta` | no |
//! | [`Protocol::MultiMode`] | `|1>` | fixed mix of `phi_1`, `phi_2` | no |
//! | [`Protocol::Phased`] | `|3>` | phased `phi_1` | yes |

mod multimode;
mod phased;
mod presets;
mod pulses;
mod single;

use std::fmt;
use std::str::FromStr;

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::basis::{
    build_phased_basis, build_three_real_basis, AngleFn, AngleSchedule, BasisFamily, MovingBasis,
};
use crate::dynamics::{self, HamiltonianSpec, Trajectory};
use crate::error::{Error, Result};
use crate::polyshape::{fit_cubic, CubicBoundary};

pub use multimode::{design_multimode, solve_multimode_boundary, MultiModeSolution};
pub use phased::design_phased;
pub use presets::{preset_targets, Preset};
pub use pulses::{PulseSamples, PulseSet};
pub use single::{
    design_protocol_i, design_protocol_ii, design_protocol_ii_no_microwave, select_branch,
};

/// Tolerance on `mu^2 + eta^2 + nu^2 = 1`.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-12;

/// Target `mu|1> + eta e^{i gamma}|2> + nu e^{i kappa}|3>` with real
/// amplitudes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TargetState {
    pub mu: f64,
    pub eta: f64,
    pub nu: f64,
    /// Phase on `|2>`.
    pub gamma: f64,
    /// Phase on `|3>`.
    pub kappa: f64,
}

impl TargetState {
    pub fn new(mu: f64, eta: f64, nu: f64) -> Result<Self> {
        let target = Self {
            mu,
            eta,
            nu,
            gamma: 0.0,
            kappa: 0.0,
        };
        target.validate()?;
        Ok(target)
    }

    /// Rescales the amplitudes to unit norm.
    pub fn normalized(mu: f64, eta: f64, nu: f64) -> Result<Self> {
        let norm = (mu * mu + eta * eta + nu * nu).sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::InvalidInput(
                "target amplitudes must not all vanish".into(),
            ));
        }
        Self::new(mu / norm, eta / norm, nu / norm)
    }

    pub fn with_phases(mut self, gamma: f64, kappa: f64) -> Self {
        self.gamma = gamma;
        self.kappa = kappa;
        self
    }

    pub fn norm_residual(&self) -> f64 {
        (self.mu * self.mu + self.eta * self.eta + self.nu * self.nu - 1.0).abs()
    }

    pub fn validate(&self) -> Result<()> {
        let values = [self.mu, self.eta, self.nu, self.gamma, self.kappa];
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(
                "target amplitudes and phases must be finite".into(),
            ));
        }
        let residual = self.norm_residual();
        if residual > NORMALIZATION_TOLERANCE {
            return Err(Error::Unnormalized { residual });
        }
        Ok(())
    }

    pub fn has_phases(&self) -> bool {
        self.gamma != 0.0 || self.kappa != 0.0
    }

    pub fn vector(&self) -> DVector<Complex64> {
        DVector::from_vec(vec![
            Complex64::new(self.mu, 0.0),
            Complex64::from_polar(self.eta, self.gamma),
            Complex64::from_polar(self.nu, self.kappa),
        ])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Protocol {
    SingleModeI,
    SingleModeII,
    SingleModeIINoMicrowave,
    MultiMode,
    Phased,
}

impl Protocol {
    pub const ALL: [Protocol; 5] = [
        Protocol::SingleModeI,
        Protocol::SingleModeII,
        Protocol::SingleModeIINoMicrowave,
        Protocol::MultiMode,
        Protocol::Phased,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Protocol::SingleModeI => "single-I",
            Protocol::SingleModeII => "single-II",
            Protocol::SingleModeIINoMicrowave => "single-II-nomw",
            Protocol::MultiMode => "multi",
            Protocol::Phased => "phased",
        }
    }

    /// Bare level (1-based) the protocol starts from.
    pub fn initial_level(self) -> usize {
        match self {
            Protocol::SingleModeIINoMicrowave => 2,
            Protocol::Phased => 3,
            _ => 1,
        }
    }
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Protocol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Protocol::ALL
            .into_iter()
            .find(|p| p.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidInput(format!("unknown protocol `{s}`")))
    }
}

/// Which solution of the final-angle equation to use for the two-ground-state
/// transfer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum Branch {
    /// Smallest `|theta(T)|` reaching the target up to a global phase.
    #[default]
    LeastEnergy,
    /// `pi + arccos|mu|`
    ArccosPlus,
    /// `pi - arccos|mu|`
    ArccosMinus,
    /// `pi + arcsin|nu|`
    ArcsinPlus,
    /// `-arcsin|nu|`
    ArcsinMinus,
}

impl Branch {
    pub const ALL: [Branch; 5] = [
        Branch::LeastEnergy,
        Branch::ArccosPlus,
        Branch::ArccosMinus,
        Branch::ArcsinPlus,
        Branch::ArcsinMinus,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Branch::LeastEnergy => "least-energy",
            Branch::ArccosPlus => "arccos-plus",
            Branch::ArccosMinus => "arccos-minus",
            Branch::ArcsinPlus => "arcsin-plus",
            Branch::ArcsinMinus => "arcsin-minus",
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Branch {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Branch::ALL
            .into_iter()
            .find(|b| b.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidInput(format!("unknown branch `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum InitialState {
    /// Bare level, 1-based.
    Level(usize),
    Vector(Vec<Complex64>),
}

impl InitialState {
    pub fn to_vector(&self, dimension: usize) -> Result<DVector<Complex64>> {
        match self {
            InitialState::Level(n) if (1..=dimension).contains(n) => Ok(bare_state(*n, dimension)),
            InitialState::Level(n) => Err(Error::InvalidInput(format!(
                "level {n} is not in 1..={dimension}"
            ))),
            InitialState::Vector(v) if v.len() == dimension => Ok(DVector::from_column_slice(v)),
            InitialState::Vector(v) => Err(Error::DimensionMismatch {
                expected: dimension,
                found: v.len(),
            }),
        }
    }
}

/// Which physical system the three levels describe.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum Platform {
    /// Lambda atom with pump, Stokes and microwave couplings.
    #[default]
    LambdaAtom,
    /// Two atoms sharing one cavity mode, one excitation.
    CavityQed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolRequest {
    pub protocol: Protocol,
    pub target: TargetState,
    /// Defaults to the protocol's own starting level.
    pub initial: Option<InitialState>,
    pub t0: f64,
    pub tf: f64,
    pub branch: Branch,
    /// Phase-winding rate for [`Protocol::Phased`]; see [`design_phased`].
    pub lambda_rate: Option<f64>,
    pub platform: Platform,
}

impl ProtocolRequest {
    pub fn new(protocol: Protocol, target: TargetState, duration: f64) -> Self {
        Self {
            protocol,
            target,
            initial: None,
            t0: 0.0,
            tf: duration,
            branch: Branch::default(),
            lambda_rate: None,
            platform: Platform::default(),
        }
    }

    pub fn with_branch(mut self, branch: Branch) -> Self {
        self.branch = branch;
        self
    }

    pub fn with_lambda(mut self, lambda_rate: f64) -> Self {
        self.lambda_rate = Some(lambda_rate);
        self
    }

    pub fn with_interval(mut self, t0: f64, tf: f64) -> Self {
        self.t0 = t0;
        self.tf = tf;
        self
    }

    pub fn with_initial(mut self, initial: InitialState) -> Self {
        self.initial = Some(initial);
        self
    }

    pub fn duration(&self) -> f64 {
        self.tf - self.t0
    }

    /// Checks the interval, the target, and that any explicit initial state
    /// is the protocol's starting level up to a global phase.
    pub fn validate(&self) -> Result<()> {
        if !self.t0.is_finite() || !self.tf.is_finite() || self.tf <= self.t0 {
            return Err(Error::InvalidInterval {
                t0: self.t0,
                tf: self.tf,
            });
        }
        self.target.validate()?;
        if let Some(initial) = &self.initial {
            let psi = initial.to_vector(3)?;
            let residual = (psi.norm() - 1.0).abs();
            if residual > 1e-10 {
                return Err(Error::Unnormalized { residual });
            }
            let level = self.protocol.initial_level();
            if (psi[level - 1].norm() - 1.0).abs() > 1e-10 {
                return Err(Error::ProtocolMismatch(format!(
                    "{} starts from |{level}>, not from the given initial state",
                    self.protocol
                )));
            }
        }
        Ok(())
    }
}

/// Boundary angles chosen by a design.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct BoundaryValues {
    pub theta0: f64,
    pub theta_f: f64,
    pub phi0: f64,
    pub phi_f: f64,
    /// Total `phi` sweep of the multi-mode design.
    pub zeta: Option<f64>,
    /// `arctan(mu / nu)` of the three-pulse designs.
    pub chi: Option<f64>,
    pub branch: Option<Branch>,
    pub lambda_rate: Option<f64>,
}

/// How the designed state sits in the moving basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Tracking {
    /// The state is mode `n` (1-based) at all times.
    SingleMode(usize),
    /// The state is `sum_n c_n |phi_n(t)>` with constant `c_n`.
    MultiMode(Vec<Complex64>),
}

/// A finished design: schedule, pulses, and what the evolution should do.
#[derive(Debug, Clone, PartialEq)]
pub struct Design {
    pub protocol: Protocol,
    pub platform: Platform,
    pub family: BasisFamily,
    pub schedule: AngleSchedule,
    pub pulses: PulseSet,
    pub boundary: BoundaryValues,
    pub tracking: Tracking,
    pub initial_state: DVector<Complex64>,
    /// State the design reaches at `tf`, with the protocol's sign convention.
    pub target_state: DVector<Complex64>,
    pub t0: f64,
    pub tf: f64,
}

impl Design {
    pub fn duration(&self) -> f64 {
        self.tf - self.t0
    }

    pub fn moving_basis(&self) -> MovingBasis {
        match self.family {
            BasisFamily::ThreePhased => build_phased_basis(self.schedule),
            _ => build_three_real_basis(self.schedule).expect("real designs carry no phases"),
        }
    }

    pub fn hamiltonian(&self) -> HamiltonianSpec {
        match (self.family, self.platform) {
            (BasisFamily::ThreePhased, _) => dynamics::phased_hamiltonian(self.schedule),
            (_, Platform::CavityQed) => dynamics::cavity_qed_hamiltonian(self.pulses)
                .expect("cavity designs carry no microwave"),
            _ => dynamics::three_level_lambda(self.pulses),
        }
    }

    pub fn evolve(&self, steps: usize) -> Result<Trajectory> {
        dynamics::evolve(
            &self.hamiltonian(),
            &self.initial_state,
            self.t0,
            self.tf,
            steps,
        )
    }

    /// The ideal state at time `t` according to the moving basis.
    pub fn ideal_state(&self, t: f64) -> DVector<Complex64> {
        let basis = self.moving_basis();
        match &self.tracking {
            Tracking::SingleMode(n) => basis.mode(*n, t),
            Tracking::MultiMode(c) => basis
                .vectors(t)
                .iter()
                .zip(c)
                .fold(DVector::zeros(3), |acc, (v, cn)| acc + v * *cn),
        }
    }
}

/// Runs the design selected by `request.protocol`.
pub fn design(request: &ProtocolRequest) -> Result<Design> {
    match request.protocol {
        Protocol::SingleModeI => design_protocol_i(request),
        Protocol::SingleModeII => design_protocol_ii(request),
        Protocol::SingleModeIINoMicrowave => design_protocol_ii_no_microwave(request),
        Protocol::MultiMode => design_multimode(request),
        Protocol::Phased => design_phased(request),
    }
}

/// Rest-to-rest cubic from `from` to `to`, or a constant when they agree.
pub(crate) fn sweep(t0: f64, tf: f64, from: f64, to: f64) -> Result<AngleFn> {
    if from == to {
        return Ok(AngleFn::Constant(from));
    }
    Ok(AngleFn::Cubic(fit_cubic(&CubicBoundary::rest_to_rest(
        t0, tf, from, to,
    ))?))
}

pub(crate) fn bare_state(level: usize, dimension: usize) -> DVector<Complex64> {
    let mut v = DVector::zeros(dimension);
    v[level - 1] = Complex64::new(1.0, 0.0);
    v
}

pub(crate) fn real_vector(values: [f64; 3]) -> DVector<Complex64> {
    DVector::from_iterator(3, values.into_iter().map(|x| Complex64::new(x, 0.0)))
}

pub(crate) fn require_phase_free(request: &ProtocolRequest) -> Result<()> {
    if request.target.has_phases() {
        return Err(Error::ProtocolMismatch(format!(
            "{} reaches real targets only; use the phased protocol for gamma/kappa",
            request.protocol
        )));
    }
    Ok(())
}

pub(crate) fn require_nonnegative(request: &ProtocolRequest) -> Result<()> {
    let t = &request.target;
    if t.mu < 0.0 || t.eta < 0.0 || t.nu < 0.0 {
        return Err(Error::UnsupportedBranch(format!(
            "{} is derived for nonnegative amplitudes; flip signs through a global phase \
             or the single-mode branch choices instead",
            request.protocol
        )));
    }
    Ok(())
}
