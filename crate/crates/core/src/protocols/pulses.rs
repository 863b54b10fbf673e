use serde::{Deserialize, Serialize};

use crate::basis::{AngleFn, AngleSchedule};

/// Pump, Stokes and microwave Rabi frequencies of a design, in closed form.
///
/// All three derive from the mixing angles: `omega_p = phi' sin(theta)`,
/// `omega_s = phi' cos(theta)` and `omega_a = -theta'` for the real
/// three-level family. The phased family reports `omega_a = +theta'`, which
/// keeps the `|1><3|` coupling equal to `i omega_a e^{-i kappa}` in both.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulseSet {
    theta: AngleFn,
    phi: AngleFn,
    microwave_sign: f64,
    t0: f64,
    tf: f64,
}

/// Pulses evaluated on a uniform grid.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PulseSamples {
    pub times: Vec<f64>,
    pub omega_p: Vec<f64>,
    pub omega_s: Vec<f64>,
    pub omega_a: Vec<f64>,
}

impl PulseSet {
    pub fn from_real_schedule(schedule: &AngleSchedule, t0: f64, tf: f64) -> Self {
        Self {
            theta: schedule.theta,
            phi: schedule.phi,
            microwave_sign: -1.0,
            t0,
            tf,
        }
    }

    pub fn from_phased_schedule(schedule: &AngleSchedule, t0: f64, tf: f64) -> Self {
        Self {
            theta: schedule.theta,
            phi: schedule.phi,
            microwave_sign: 1.0,
            t0,
            tf,
        }
    }

    /// All three fields identically zero.
    pub fn zero(t0: f64, tf: f64) -> Self {
        Self::from_real_schedule(&AngleSchedule::default(), t0, tf)
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn tf(&self) -> f64 {
        self.tf
    }

    pub fn omega_p(&self, t: f64) -> f64 {
        self.phi.rate(t) * self.theta.value(t).sin()
    }

    pub fn omega_s(&self, t: f64) -> f64 {
        self.phi.rate(t) * self.theta.value(t).cos()
    }

    pub fn omega_a(&self, t: f64) -> f64 {
        self.microwave_sign * self.theta.rate(t)
    }

    /// `(omega_p, omega_s, omega_a)` at `t`.
    pub fn at(&self, t: f64) -> (f64, f64, f64) {
        let (st, ct) = self.theta.value(t).sin_cos();
        let dphi = self.phi.rate(t);
        (
            dphi * st,
            dphi * ct,
            self.microwave_sign * self.theta.rate(t),
        )
    }

    pub fn uses_microwave(&self) -> bool {
        !self.theta.is_stationary()
    }

    /// Samples on `points` evenly spaced times covering `[t0, tf]`.
    pub fn sample(&self, points: usize) -> PulseSamples {
        let points = points.max(2);
        let dt = (self.tf - self.t0) / (points - 1) as f64;
        let mut out = PulseSamples::default();
        for i in 0..points {
            let t = if i + 1 == points {
                self.tf
            } else {
                self.t0 + i as f64 * dt
            };
            let (p, s, a) = self.at(t);
            out.times.push(t);
            out.omega_p.push(p);
            out.omega_s.push(s);
            out.omega_a.push(a);
        }
        out
    }

    /// Largest `sqrt(omega_p^2 + omega_s^2)` on a dense grid.
    pub fn peak_two_photon(&self, points: usize) -> f64 {
        let s = self.sample(points);
        s.omega_p
            .iter()
            .zip(&s.omega_s)
            .map(|(p, q)| p.hypot(*q))
            .fold(0.0, f64::max)
    }
}
