//! Cubic boundary-value interpolation for angle schedules, plus the
//! bump-shaped pulse profile those cubics produce.
//!
//! A cubic matching a value and a slope at each end of `[t0, tf]` is the
//! simplest smooth schedule that starts and stops with zero drive whenever
//! both end slopes vanish. Its derivative is then a multiple of
//! [`shape_factor`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Endpoint constraints for a cubic schedule on `[t0, tf]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CubicBoundary {
    pub t0: f64,
    pub tf: f64,
    /// Value at `t0` (radians).
    pub f0: f64,
    /// Value at `tf` (radians).
    pub ff: f64,
    /// Slope at `t0` (radians per unit time).
    pub df0: f64,
    /// Slope at `tf` (radians per unit time).
    pub dff: f64,
}

impl CubicBoundary {
    /// Boundary with vanishing end slopes, the only kind the protocols use.
    pub fn rest_to_rest(t0: f64, tf: f64, f0: f64, ff: f64) -> Self {
        Self {
            t0,
            tf,
            f0,
            ff,
            df0: 0.0,
            dff: 0.0,
        }
    }

    fn validate(&self) -> Result<()> {
        let all = [self.t0, self.tf, self.f0, self.ff, self.df0, self.dff];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(
                "cubic boundary values must be finite".into(),
            ));
        }
        if self.tf <= self.t0 {
            return Err(Error::InvalidInterval {
                t0: self.t0,
                tf: self.tf,
            });
        }
        Ok(())
    }
}

/// `a0 + a1 s + a2 s^2 + a3 s^3` with `s = t - t0`.
///
/// Coefficients are stored in the shifted variable; for `t0 = 0` they are the
/// plain power-series coefficients in `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CubicPolynomial {
    pub coefficients: [f64; 4],
    pub t0: f64,
    pub tf: f64,
}

impl CubicPolynomial {
    pub fn constant(value: f64, t0: f64, tf: f64) -> Self {
        Self {
            coefficients: [value, 0.0, 0.0, 0.0],
            t0,
            tf,
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        let s = t - self.t0;
        let [a0, a1, a2, a3] = self.coefficients;
        a0 + s * (a1 + s * (a2 + s * a3))
    }

    pub fn derivative(&self, t: f64) -> f64 {
        let s = t - self.t0;
        let [_, a1, a2, a3] = self.coefficients;
        a1 + s * (2.0 * a2 + s * 3.0 * a3)
    }

    pub fn second_derivative(&self, t: f64) -> f64 {
        let s = t - self.t0;
        2.0 * self.coefficients[2] + 6.0 * self.coefficients[3] * s
    }

    pub fn duration(&self) -> f64 {
        self.tf - self.t0
    }

    pub fn is_constant(&self) -> bool {
        self.coefficients[1..].iter().all(|&a| a == 0.0)
    }

    /// Largest of the four endpoint residuals against `boundary`.
    pub fn boundary_residual(&self, boundary: &CubicBoundary) -> f64 {
        [
            self.value(boundary.t0) - boundary.f0,
            self.value(boundary.tf) - boundary.ff,
            self.derivative(boundary.t0) - boundary.df0,
            self.derivative(boundary.tf) - boundary.dff,
        ]
        .iter()
        .fold(0.0_f64, |m, r| m.max(r.abs()))
    }
}

/// Solves the four endpoint constraints in closed form.
pub fn fit_cubic(boundary: &CubicBoundary) -> Result<CubicPolynomial> {
    boundary.validate()?;
    let span = boundary.tf - boundary.t0;
    let rise = boundary.ff - boundary.f0;
    let a0 = boundary.f0;
    let a1 = boundary.df0;
    let a2 = (3.0 * rise - (2.0 * boundary.df0 + boundary.dff) * span) / (span * span);
    let a3 = (-2.0 * rise + (boundary.df0 + boundary.dff) * span) / (span * span * span);
    Ok(CubicPolynomial {
        coefficients: [a0, a1, a2, a3],
        t0: boundary.t0,
        tf: boundary.tf,
    })
}

/// The bump `(t-t0)/T^2 - (t-t0)^2/T^3` with `T = tf - t0`.
///
/// A rest-to-rest cubic rising by `delta` has derivative `6 * delta * shape_factor`.
pub fn shape_factor(t: f64, t0: f64, tf: f64) -> Result<f64> {
    if tf <= t0 {
        return Err(Error::InvalidInterval { t0, tf });
    }
    let span = tf - t0;
    // allow last-ulp overshoot from accumulated grid arithmetic
    let slack = 1e-12 * span;
    if !(t >= t0 - slack && t <= tf + slack) {
        return Err(Error::Domain { t, t0, tf });
    }
    let s = (t - t0).clamp(0.0, span);
    Ok(s / (span * span) - s * s / (span * span * span))
}

/// Reference profile for [`profile_deviation`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Profile {
    /// `sin(pi x)`
    Sine,
    /// `4 x (1 - x)`, the normalized cubic-derived bump.
    Bump,
}

impl Profile {
    fn at(self, x: f64) -> f64 {
        match self {
            Profile::Sine => (std::f64::consts::PI * x).sin(),
            Profile::Bump => 4.0 * x * (1.0 - x),
        }
    }
}

/// Sup-norm distance between a sampled pulse, normalized to unit peak, and
/// a reference profile on `x = (t - t0) / (tf - t0)`.
///
/// The pulse is divided by its sample of largest magnitude, so negative bumps
/// compare like positive ones. An identically zero pulse reports 0.
pub fn profile_deviation(samples: &[(f64, f64)], t0: f64, tf: f64, reference: Profile) -> f64 {
    let peak = samples
        .iter()
        .map(|&(_, v)| v)
        .fold(0.0_f64, |p, v| if v.abs() > p.abs() { v } else { p });
    if peak == 0.0 {
        return 0.0;
    }
    let span = tf - t0;
    samples
        .iter()
        .map(|&(t, v)| (v / peak - reference.at((t - t0) / span)).abs())
        .fold(0.0, f64::max)
}

/// How far a sampled pulse is from a pure `sin(pi x)` shape.
pub fn sine_fit_deviation(samples: &[(f64, f64)], t0: f64, tf: f64) -> f64 {
    profile_deviation(samples, t0, tf, Profile::Sine)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    /// Gaussian elimination with partial pivoting on the raw 4x4 system in `t`.
    fn solve_by_elimination(b: &CubicBoundary) -> [f64; 4] {
        let row_value = |t: f64| [1.0, t, t * t, t * t * t];
        let row_slope = |t: f64| [0.0, 1.0, 2.0 * t, 3.0 * t * t];
        let mut m = [
            (row_value(b.t0), b.f0),
            (row_value(b.tf), b.ff),
            (row_slope(b.t0), b.df0),
            (row_slope(b.tf), b.dff),
        ];
        for col in 0..4 {
            let pivot = (col..4)
                .max_by(|&i, &j| m[i].0[col].abs().total_cmp(&m[j].0[col].abs()))
                .unwrap();
            m.swap(col, pivot);
            for r in 0..4 {
                if r != col {
                    let factor = m[r].0[col] / m[col].0[col];
                    for c in 0..4 {
                        m[r].0[c] -= factor * m[col].0[c];
                    }
                    m[r].1 -= factor * m[col].1;
                }
            }
        }
        [0, 1, 2, 3].map(|i| m[i].1 / m[i].0[i])
    }

    /// Re-expand shifted coefficients into powers of absolute `t`.
    fn unshift(p: &CubicPolynomial) -> [f64; 4] {
        let [a0, a1, a2, a3] = p.coefficients;
        let c = p.t0;
        [
            a0 - a1 * c + a2 * c * c - a3 * c * c * c,
            a1 - 2.0 * a2 * c + 3.0 * a3 * c * c,
            a2 - 3.0 * a3 * c,
            a3,
        ]
    }

    #[test]
    fn arcsin_boundary_gives_published_coefficients() {
        let nu = 0.3_f64;
        let t = 2.5;
        let p = fit_cubic(&CubicBoundary::rest_to_rest(0.0, t, 0.0, nu.asin())).unwrap();
        let [a0, a1, a2, a3] = p.coefficients;
        assert_eq!(a0, 0.0);
        assert_eq!(a1, 0.0);
        assert!((a2 - 3.0 * nu.asin() / (t * t)).abs() < 1e-15);
        assert!((a3 + 2.0 * nu.asin() / (t * t * t)).abs() < 1e-15);
    }

    #[test]
    fn equal_endpoints_give_constant() {
        let p = fit_cubic(&CubicBoundary::rest_to_rest(-1.0, 3.0, 0.7, 0.7)).unwrap();
        assert!(p.is_constant());
        assert_eq!(p.value(1.3), 0.7);
    }

    #[test]
    fn half_pi_to_chi_matches_elimination() {
        // the expanded theta(t) for the three-pulse design, not the misprinted a2
        let chi = 0.4_f64;
        let t = 1.7;
        let p = fit_cubic(&CubicBoundary::rest_to_rest(0.0, t, PI / 2.0, chi)).unwrap();
        let oracle = solve_by_elimination(&CubicBoundary::rest_to_rest(0.0, t, PI / 2.0, chi));
        for (a, b) in p.coefficients.iter().zip(oracle) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
        assert!((p.coefficients[2] - (6.0 * chi - 3.0 * PI) / (2.0 * t * t)).abs() < 1e-12);
        assert!((p.coefficients[3] + (6.0 * chi - 3.0 * PI) / (3.0 * t * t * t)).abs() < 1e-12);
        assert!((p.value(t) - chi).abs() < 1e-14);
    }

    #[test]
    fn general_boundary_matches_elimination_with_offset_origin() {
        let b = CubicBoundary {
            t0: 0.5,
            tf: 2.0,
            f0: -0.3,
            ff: 1.1,
            df0: 0.4,
            dff: -0.9,
        };
        let p = fit_cubic(&b).unwrap();
        let oracle = solve_by_elimination(&b);
        for (a, o) in unshift(&p).iter().zip(oracle) {
            assert!((a - o).abs() < 1e-11, "{a} vs {o}");
        }
    }

    #[test]
    fn rejects_empty_interval() {
        let err = fit_cubic(&CubicBoundary::rest_to_rest(1.0, 1.0, 0.0, 1.0)).unwrap_err();
        assert!(matches!(err, Error::InvalidInterval { .. }));
        assert!(fit_cubic(&CubicBoundary::rest_to_rest(0.0, 1.0, f64::NAN, 1.0)).is_err());
    }

    #[test]
    fn shape_factor_endpoints_and_peak() {
        assert_eq!(shape_factor(0.0, 0.0, 1.0).unwrap(), 0.0);
        assert_eq!(shape_factor(1.0, 0.0, 1.0).unwrap(), 0.0);
        assert!((shape_factor(0.5, 0.0, 1.0).unwrap() - 0.25).abs() < 1e-15);
        // peak is 1/(4T)
        assert!((shape_factor(4.0, 1.0, 7.0).unwrap() - 1.0 / 24.0).abs() < 1e-15);
        assert!(matches!(
            shape_factor(1.5, 0.0, 1.0),
            Err(Error::Domain { .. })
        ));
    }

    #[test]
    fn shape_factor_integrates_to_one_sixth() {
        // Simpson is exact for the quadratic bump
        let n = 64;
        let h = 1.0 / n as f64;
        let sum: f64 = (0..=n)
            .map(|i| {
                let w = if i == 0 || i == n {
                    1.0
                } else if i % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                w * shape_factor(i as f64 * h, 0.0, 1.0).unwrap()
            })
            .sum();
        assert!((sum * h / 3.0 - 1.0 / 6.0).abs() < 1e-15);
    }

    fn dense_max_gap() -> f64 {
        (0..=200_000)
            .map(|i| {
                let x = i as f64 / 200_000.0;
                (4.0 * x * (1.0 - x) - (PI * x).sin()).abs()
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn bump_versus_sine_deviation() {
        let oracle = dense_max_gap();
        assert!((oracle - 0.056).abs() < 5e-4, "oracle {oracle}");
        let samples: Vec<(f64, f64)> = (0..=4000)
            .map(|i| {
                let t = 3.0 * i as f64 / 4000.0;
                (t, -2.7 * shape_factor(t, 0.0, 3.0).unwrap())
            })
            .collect();
        let dev = sine_fit_deviation(&samples, 0.0, 3.0);
        assert!((dev - oracle).abs() < 1e-6, "{dev} vs {oracle}");

        let sine: Vec<(f64, f64)> = (0..=4000)
            .map(|i| (i as f64 / 4000.0, 5.0 * (PI * i as f64 / 4000.0).sin()))
            .collect();
        assert!(sine_fit_deviation(&sine, 0.0, 1.0) < 1e-12);
        let against_bump = profile_deviation(&sine, 0.0, 1.0, Profile::Bump);
        assert!((against_bump - oracle).abs() < 1e-6);
    }

    #[test]
    fn zero_pulse_deviation_is_zero() {
        let zeros: Vec<(f64, f64)> = (0..10).map(|i| (i as f64, 0.0)).collect();
        assert_eq!(sine_fit_deviation(&zeros, 0.0, 9.0), 0.0);
    }
}
