//! Drive cost functionals and the single-mode versus multi-mode comparison.
//!
//! `omega_bar = (1/T) int sqrt(omega_p^2 + omega_s^2) dt` and
//! `energy_bar = int (omega_p^2 + omega_s^2) dt`. The energy carries no `1/T`;
//! ratios between designs of equal duration do not depend on it.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::protocols::{
    design, solve_multimode_boundary, Protocol, ProtocolRequest, PulseSet, TargetState,
};
use crate::table::Table;

pub const MIN_QUAD_POINTS: usize = 64;
/// Relative change between successive doublings that ends the quadrature.
pub const QUADRATURE_TOLERANCE: f64 = 1e-8;
pub const MIN_RESOLUTION: usize = 10;
/// Points with `mu^2 + eta^2` above `1` by more than this are masked.
pub const MASK_TOLERANCE: f64 = 1e-12;

const MAX_QUAD_POINTS: usize = 1 << 22;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriveMetrics {
    pub omega_bar: f64,
    pub energy_bar: f64,
    pub duration: f64,
    /// Largest `sqrt(omega_p^2 + omega_s^2)` at the quadrature nodes.
    pub peak: f64,
    /// Intervals used by the accepted quadrature.
    pub quad_points: usize,
    /// Relative change of the last doubling, the larger of the two integrals.
    pub quad_error: f64,
}

/// Composite Simpson over `n` (even) intervals of both integrands at once.
fn simpson(pulses: &PulseSet, t0: f64, tf: f64, n: usize) -> (f64, f64, f64) {
    let h = (tf - t0) / n as f64;
    let (mut length, mut energy, mut peak) = (0.0, 0.0, 0.0f64);
    for i in 0..=n {
        let t = if i == n { tf } else { t0 + i as f64 * h };
        let (p, s, _) = pulses.at(t);
        let w = if i == 0 || i == n {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        let amplitude = p.hypot(s);
        peak = peak.max(amplitude);
        length += w * amplitude;
        energy += w * (p * p + s * s);
    }
    (length * h / 3.0, energy * h / 3.0, peak)
}

fn relative_change(coarse: f64, fine: f64) -> f64 {
    if fine == coarse {
        0.0
    } else {
        (fine - coarse).abs() / fine.abs().max(coarse.abs())
    }
}

/// Integrates the pump/Stokes cost on `[t0, tf]`, doubling the node count
/// from `quad_points` (at least [`MIN_QUAD_POINTS`]) until both integrals
/// change by less than [`QUADRATURE_TOLERANCE`].
pub fn drive_metrics(pulses: &PulseSet, t0: f64, tf: f64, quad_points: usize) -> DriveMetrics {
    let mut n = quad_points.max(MIN_QUAD_POINTS);
    n += n % 2;
    let (mut length, mut energy, mut peak) = simpson(pulses, t0, tf, n);
    let mut error;
    loop {
        let (l2, e2, p2) = simpson(pulses, t0, tf, 2 * n);
        error = relative_change(length, l2).max(relative_change(energy, e2));
        (length, energy, peak, n) = (l2, e2, peak.max(p2), 2 * n);
        if error <= QUADRATURE_TOLERANCE || n >= MAX_QUAD_POINTS {
            break;
        }
    }
    let duration = tf - t0;
    DriveMetrics {
        omega_bar: length / duration,
        energy_bar: energy,
        duration,
        peak,
        quad_points: n,
        quad_error: error,
    }
}

/// Closed-form comparison at one target.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeRatio {
    pub omega_ratio: f64,
    pub energy_ratio: f64,
    /// `phi` sweep of the no-microwave single-mode design, `|arcsin eta - pi/2|`.
    pub single_sweep: f64,
    /// `phi` sweep of the multi-mode design, `arccos(mu - nu cot theta0)`.
    pub multi_sweep: f64,
    pub masked: bool,
}

impl ModeRatio {
    fn masked() -> Self {
        Self {
            omega_ratio: 0.0,
            energy_ratio: 0.0,
            single_sweep: 0.0,
            multi_sweep: 0.0,
            masked: true,
        }
    }
}

/// `omega_bar_o / omega_bar_m` and `energy_bar_o / energy_bar_m` for equal
/// durations, where `o` is the no-microwave single-mode design and `m` the
/// multi-mode one.
///
/// Both designs move only `phi`, so each time-averaged frequency is the sweep
/// over `T` and each energy is `6/5` sweep squared over `T`; the ratios are
/// the sweep ratio and its square. Points with `mu^2 + eta^2 > 1` are masked
/// to zero. At `mu = 1` the multi-mode design is the identity and the ratio
/// takes its `eta = 0` value `1/2`.
pub fn mode_comparison_ratio(mu: f64, eta: f64, nu: f64) -> Result<ModeRatio> {
    if mu * mu + eta * eta > 1.0 + MASK_TOLERANCE {
        return Ok(ModeRatio::masked());
    }
    let target = TargetState::new(mu, eta, nu)?;
    let solution = solve_multimode_boundary(&target)?;
    let single_sweep = (eta.min(1.0).asin() - FRAC_PI_2).abs();
    if solution.is_identity() {
        return Ok(ModeRatio {
            omega_ratio: 0.5,
            energy_ratio: 0.25,
            single_sweep,
            multi_sweep: 0.0,
            masked: false,
        });
    }
    let (st, ct) = solution.theta0.sin_cos();
    // arccos(mu - nu cot theta0), with the sine eta / sin theta0 fixing it
    // accurately near the ends of [0, pi]
    let multi_sweep = (eta / st).atan2(mu - nu * ct / st);
    let omega_ratio = single_sweep / multi_sweep;
    Ok(ModeRatio {
        omega_ratio,
        energy_ratio: omega_ratio * omega_ratio,
        single_sweep,
        multi_sweep,
        masked: false,
    })
}

/// The same comparison from quadrature over the two designed pulse sets.
pub fn numeric_mode_ratio(
    target: &TargetState,
    duration: f64,
    quad_points: usize,
) -> Result<(DriveMetrics, DriveMetrics)> {
    let run = |protocol| -> Result<DriveMetrics> {
        let d = design(&ProtocolRequest::new(protocol, *target, duration))?;
        Ok(drive_metrics(&d.pulses, d.t0, d.tf, quad_points))
    };
    Ok((
        run(Protocol::SingleModeIINoMicrowave)?,
        run(Protocol::MultiMode)?,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioPoint {
    pub mu: f64,
    pub eta: f64,
    pub omega_ratio: f64,
    pub energy_ratio: f64,
    pub masked: bool,
}

/// Comparison ratios on the uniform grid `mu, eta = i / (resolution - 1)`,
/// `mu` varying slowest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioSurface {
    pub resolution: usize,
    pub points: Vec<RatioPoint>,
}

pub const RATIO_HEADER: [&str; 4] = ["mu", "eta", "omega_ratio", "energy_ratio"];

impl RatioSurface {
    pub fn unmasked(&self) -> impl Iterator<Item = &RatioPoint> {
        self.points.iter().filter(|p| !p.masked)
    }

    pub fn at(&self, i: usize, j: usize) -> &RatioPoint {
        &self.points[i * self.resolution + j]
    }

    pub fn to_table(&self) -> Table {
        let mut t = Table::new(RATIO_HEADER);
        for p in &self.points {
            t.push(vec![p.mu, p.eta, p.omega_ratio, p.energy_ratio]);
        }
        t
    }

    pub fn to_csv(&self) -> String {
        self.to_table().to_csv()
    }
}

pub fn ratio_surface(resolution: usize) -> Result<RatioSurface> {
    ratio_surface_with(resolution, Execution::default())
}

pub fn ratio_surface_with(resolution: usize, exec: Execution) -> Result<RatioSurface> {
    if resolution < MIN_RESOLUTION {
        return Err(Error::InvalidInput(format!(
            "resolution must be at least {MIN_RESOLUTION}, got {resolution}"
        )));
    }
    let last = (resolution - 1) as f64;
    let grid: Vec<(f64, f64)> = (0..resolution)
        .flat_map(|i| (0..resolution).map(move |j| (i as f64 / last, j as f64 / last)))
        .collect();
    let points = exec
        .map(&grid, |&(mu, eta)| {
            let nu = (1.0 - mu * mu - eta * eta).max(0.0).sqrt();
            // grid points on the unit circle may miss the norm by an ulp
            let r = if mu * mu + eta * eta > 1.0 + MASK_TOLERANCE {
                ModeRatio::masked()
            } else {
                let t = TargetState::normalized(mu, eta, nu)?;
                mode_comparison_ratio(t.mu, t.eta, t.nu)?
            };
            Ok(RatioPoint {
                mu,
                eta,
                omega_ratio: r.omega_ratio,
                energy_ratio: r.energy_ratio,
                masked: r.masked,
            })
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok(RatioSurface { resolution, points })
}
