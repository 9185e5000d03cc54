//! Model parameters and initial data.
//!
//! The equation under study is
//!
//! ```text
//! u_t + alpha (6 u^2 u_x + u_xxx)
//!     + beta (30 u^4 u_x + 10 u_x^3 + 40 u u_x u_xx + 10 u^2 u_xxx + u_xxxxx) = 0
//! ```
//!
//! with third-order dispersion coefficient `alpha >= 0` and fifth-order
//! coefficient `beta > 0`. `alpha = 0` selects the reduced fifth-order
//! equation treated by the Painlevé sector.

use crate::error::{Error, Result};
use crate::numerics::spline::CubicSpline;
use serde::{Deserialize, Serialize};

/// Dispersion coefficients of the evolution equation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub alpha: f64,
    pub beta: f64,
}

impl ModelParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha >= 0.0) || !alpha.is_finite() {
            return Err(Error::Config(format!("alpha must be finite and >= 0, got {alpha}")));
        }
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(Error::Config(format!("beta must be finite and > 0, got {beta}")));
        }
        Ok(ModelParams { alpha, beta })
    }

    /// Left edge of the two-stationary-point window, `-9 alpha^2 / (20 beta)`.
    pub fn xi_left_edge(&self) -> f64 {
        -9.0 * self.alpha * self.alpha / (20.0 * self.beta)
    }
}

/// Shape of the initial datum.
#[derive(Debug, Clone)]
pub enum ProfileKind {
    /// `amplitude * sech(x / width)`
    Sech { amplitude: f64, width: f64 },
    /// `amplitude * exp(-(x / width)^2)`
    Gaussian { amplitude: f64, width: f64 },
    /// Sampled datum, interpolated by a natural cubic spline and zero outside
    /// the sample hull.
    Tabulated { x: Vec<f64>, u: Vec<f64> },
}

/// A real, rapidly decaying initial datum truncated to `[-support_radius, support_radius]`.
#[derive(Debug, Clone)]
pub struct InitialProfile {
    kind: ProfileKind,
    support_radius: f64,
    decay_tol: f64,
    spline: Option<CubicSpline>,
}

pub const DEFAULT_DECAY_TOL: f64 = 1e-12;

impl InitialProfile {
    /// Build a profile, choosing the truncation radius automatically so that
    /// `|u(+-X)| < decay_tol`.
    pub fn new(kind: ProfileKind) -> Result<Self> {
        Self::with_decay_tol(kind, DEFAULT_DECAY_TOL)
    }

    pub fn with_decay_tol(kind: ProfileKind, decay_tol: f64) -> Result<Self> {
        if !(decay_tol > 0.0) {
            return Err(Error::Config(format!("decay_tol must be > 0, got {decay_tol}")));
        }
        let radius = match &kind {
            ProfileKind::Sech { amplitude, width } => {
                auto_radius(amplitude.abs(), width.abs(), decay_tol, |r| 2.0 * (-r).exp())
            }
            ProfileKind::Gaussian { amplitude, width } => {
                auto_radius(amplitude.abs(), width.abs(), decay_tol, |r| (-r * r).exp())
            }
            ProfileKind::Tabulated { x, .. } => {
                if x.len() < 4 {
                    return Err(Error::Config("tabulated datum needs at least 4 samples".into()));
                }
                x.last().unwrap().abs().max(x[0].abs())
            }
        };
        Self::with_support(kind, radius, decay_tol)
    }

    /// Build with an explicit truncation radius; verifies the decay condition
    /// `|u(+-X)| < decay_tol` at construction.
    pub fn with_support(kind: ProfileKind, support_radius: f64, decay_tol: f64) -> Result<Self> {
        if !(support_radius > 0.0) || !support_radius.is_finite() {
            return Err(Error::Config(format!(
                "support_radius must be finite and > 0, got {support_radius}"
            )));
        }
        let spline = match &kind {
            ProfileKind::Tabulated { x, u } => {
                if u.iter().any(|v| !v.is_finite()) {
                    return Err(Error::Config("tabulated datum contains non-finite values".into()));
                }
                Some(CubicSpline::new(x.clone(), u.clone()).map_err(Error::Config)?)
            }
            _ => None,
        };
        let profile = InitialProfile {
            kind,
            support_radius,
            decay_tol,
            spline,
        };
        for x in [-support_radius, support_radius] {
            let v = profile.eval(x).abs();
            if v >= decay_tol {
                return Err(Error::NonDecayingDatum {
                    x,
                    value: v,
                    tol: decay_tol,
                });
            }
        }
        Ok(profile)
    }

    /// u0(x); identically zero outside the truncation interval.
    pub fn eval(&self, x: f64) -> f64 {
        if x.abs() > self.support_radius {
            return 0.0;
        }
        match &self.kind {
            ProfileKind::Sech { amplitude, width } => {
                let r = x / width;
                amplitude / r.cosh()
            }
            ProfileKind::Gaussian { amplitude, width } => {
                let r = x / width;
                amplitude * (-r * r).exp()
            }
            ProfileKind::Tabulated { .. } => {
                let s = self.spline.as_ref().unwrap();
                if x < s.x_min() || x > s.x_max() {
                    0.0
                } else {
                    s.eval(x)
                }
            }
        }
    }

    pub fn support_radius(&self) -> f64 {
        self.support_radius
    }

    pub fn decay_tol(&self) -> f64 {
        self.decay_tol
    }

    pub fn is_zero(&self) -> bool {
        match &self.kind {
            ProfileKind::Sech { amplitude, .. } | ProfileKind::Gaussian { amplitude, .. } => *amplitude == 0.0,
            ProfileKind::Tabulated { u, .. } => u.iter().all(|v| *v == 0.0),
        }
    }
}

fn auto_radius(amplitude: f64, width: f64, decay_tol: f64, tail: impl Fn(f64) -> f64) -> f64 {
    if amplitude == 0.0 {
        return 1.0;
    }
    let w = if width > 0.0 { width } else { 1.0 };
    // Invert the tail envelope, then pad until the strict inequality holds.
    let mut r: f64 = 1.0;
    while amplitude * tail(r) >= decay_tol && r < 1e4 {
        r += 0.5;
    }
    w * (r + 0.5)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params_validate() {
        assert!(ModelParams::new(1.0, 1.0).is_ok());
        assert!(ModelParams::new(0.0, 2.0).is_ok());
        assert!(ModelParams::new(-1.0, 1.0).is_err());
        assert!(ModelParams::new(1.0, 0.0).is_err());
    }

    #[test]
    fn xi_edge() {
        let p = ModelParams::new(1.0, 1.0).unwrap();
        assert!((p.xi_left_edge() + 0.45).abs() < 1e-15);
    }

    #[test]
    fn sech_profile_decays_at_support() {
        let p = InitialProfile::new(ProfileKind::Sech {
            amplitude: 0.3,
            width: 1.0,
        })
        .unwrap();
        assert!(p.eval(p.support_radius()).abs() < DEFAULT_DECAY_TOL);
        assert!((p.eval(0.0) - 0.3).abs() < 1e-15);
    }

    #[test]
    fn explicit_support_too_small_is_rejected() {
        let err = InitialProfile::with_support(
            ProfileKind::Sech {
                amplitude: 0.3,
                width: 1.0,
            },
            5.0,
            1e-12,
        );
        assert!(matches!(err, Err(Error::NonDecayingDatum { .. })));
    }

    #[test]
    fn tabulated_profile_interpolates() {
        let xs: Vec<f64> = (0..200).map(|i| -10.0 + 0.1 * i as f64).collect();
        let us: Vec<f64> = xs.iter().map(|&x| 0.1 * (-x * x).exp()).collect();
        let p = InitialProfile::new(ProfileKind::Tabulated { x: xs, u: us }).unwrap();
        assert!((p.eval(0.05) - 0.1 * (-0.05f64 * 0.05).exp()).abs() < 1e-6);
        assert_eq!(p.eval(50.0), 0.0);
    }
}
