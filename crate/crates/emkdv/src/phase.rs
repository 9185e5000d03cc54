//! Phase function geometry: stationary points, region classification, and the
//! sign table of Re Phi over the complex plane.
//!
//! The phase attached to the oscillatory factors is
//!
//! ```text
//! Phi(k) = 2i (-k xi + 16 beta k^5 - 4 alpha k^3),   xi = x / t,
//! ```
//!
//! purely imaginary on the real axis. Its real critical points organize the
//! long-time behavior: for `-9 alpha^2/(20 beta) < xi < 0` there are four,
//! `+-k1` and `+-k2`, merging at the left edge and disappearing beyond it.

use crate::model::ModelParams;
use num_complex::Complex64;
use serde::Serialize;

type C64 = Complex64;

/// Guard band half-width around region boundaries in xi.
pub const BOUNDARY_GUARD: f64 = 1e-9;

/// Phi(k) for complex k.
pub fn phase(k: C64, xi: f64, p: &ModelParams) -> C64 {
    let k2 = k * k;
    let k3 = k2 * k;
    let k5 = k3 * k2;
    C64::new(0.0, 2.0) * (-k * xi + 16.0 * p.beta * k5 - 4.0 * p.alpha * k3)
}

/// d Phi / dk.
pub fn phase_derivative(k: C64, xi: f64, p: &ModelParams) -> C64 {
    let k2 = k * k;
    C64::new(0.0, 2.0) * (-xi + 80.0 * p.beta * k2 * k2 - 12.0 * p.alpha * k2)
}

/// Asymptotic region tags.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    /// Four real stationary points; the two-cosine formula applies.
    Oscillatory,
    /// xi at the left edge, k1 = k2.
    Merged,
    /// No real stationary points; solution decays rapidly.
    FastDecay,
    /// xi > 0 (two real stationary points; classification only).
    PositiveXi,
    /// alpha = 0 and 0 < x <= M t^{1/5}, t >= 3.
    PainleveSector,
}

impl Region {
    pub fn as_str(&self) -> &'static str {
        match self {
            Region::Oscillatory => "oscillatory",
            Region::Merged => "merged",
            Region::FastDecay => "fast_decay",
            Region::PositiveXi => "positive_xi",
            Region::PainleveSector => "painleve_sector",
        }
    }
}

/// Real critical points for a given xi.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct StationaryPointSet {
    pub region: Region,
    /// Inner positive stationary point (oscillatory/merged).
    pub k1: Option<f64>,
    /// Outer positive stationary point (oscillatory/merged).
    pub k2: Option<f64>,
    /// Positive stationary point for xi > 0.
    pub k0: Option<f64>,
    pub xi: f64,
}

/// Solve Phi'(k) = 0 analytically and tag the region.
///
/// Queries within `BOUNDARY_GUARD` of a boundary deterministically return the
/// boundary tag (`Merged` at the left edge, `PositiveXi` at xi = 0).
pub fn stationary_points(xi: f64, p: &ModelParams) -> StationaryPointSet {
    let base = StationaryPointSet {
        region: Region::FastDecay,
        k1: None,
        k2: None,
        k0: None,
        xi,
    };
    if p.alpha == 0.0 {
        // Phi'/2i = 80 beta k^4 - xi
        if xi > BOUNDARY_GUARD {
            let k0 = (xi / (80.0 * p.beta)).powf(0.25);
            return StationaryPointSet {
                region: Region::PositiveXi,
                k0: Some(k0),
                ..base
            };
        }
        return base;
    }
    let edge = p.xi_left_edge();
    if xi < edge - BOUNDARY_GUARD {
        return base;
    }
    if (xi - edge).abs() <= BOUNDARY_GUARD {
        let km = (3.0 * p.alpha / (40.0 * p.beta)).sqrt();
        return StationaryPointSet {
            region: Region::Merged,
            k1: Some(km),
            k2: Some(km),
            ..base
        };
    }
    if xi >= -BOUNDARY_GUARD {
        // xi > 0: single pair of real stationary points
        let disc = (1.0 + 20.0 * p.beta * xi.max(0.0) / (9.0 * p.alpha * p.alpha)).sqrt();
        let k0 = (3.0 * p.alpha / (40.0 * p.beta) * (1.0 + disc)).sqrt();
        return StationaryPointSet {
            region: Region::PositiveXi,
            k0: Some(k0),
            ..base
        };
    }
    let disc = (1.0 + 20.0 * p.beta * xi / (9.0 * p.alpha * p.alpha)).sqrt();
    let scale = 3.0 * p.alpha / (40.0 * p.beta);
    StationaryPointSet {
        region: Region::Oscillatory,
        k1: Some((scale * (1.0 - disc)).sqrt()),
        k2: Some((scale * (1.0 + disc)).sqrt()),
        ..base
    }
}

/// Classify a spacetime point. The Painlevé sector takes precedence when
/// alpha = 0 and `0 < x <= M t^{1/5}` with `t >= 3`.
pub fn classify_region(x: f64, t: f64, p: &ModelParams, m_const: f64) -> Region {
    assert!(t > 0.0, "classification requires t > 0");
    if p.alpha == 0.0 && t >= 3.0 && x > 0.0 && x <= m_const * t.powf(0.2) {
        return Region::PainleveSector;
    }
    stationary_points(x / t, p).region
}

/// Rectangular window in the complex plane.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Window {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

/// One signed sample of the signature table.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SignSample {
    pub re_k: f64,
    pub im_k: f64,
    pub sign: i8,
}

/// Zero band for the signature table (the real axis registers as 0 despite
/// rounding).
pub const SIGN_ZERO_BAND: f64 = 1e-12;

/// Sign of Re Phi on an n x n grid over the window.
pub fn signature_table(xi: f64, p: &ModelParams, window: &Window, n: usize) -> Vec<SignSample> {
    assert!(n >= 2, "signature table needs n >= 2 per axis");
    let mut out = Vec::with_capacity(n * n);
    for iy in 0..n {
        let im = window.im_min + (window.im_max - window.im_min) * iy as f64 / (n - 1) as f64;
        for ix in 0..n {
            let re = window.re_min + (window.re_max - window.re_min) * ix as f64 / (n - 1) as f64;
            let v = phase(C64::new(re, im), xi, p).re;
            let sign = if v.abs() < SIGN_ZERO_BAND {
                0
            } else if v > 0.0 {
                1
            } else {
                -1
            };
            out.push(SignSample { re_k: re, im_k: im, sign });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p11() -> ModelParams {
        ModelParams::new(1.0, 1.0).unwrap()
    }

    #[test]
    fn phase_arithmetic_examples() {
        let p = p11();
        assert_eq!(phase(C64::new(0.0, 0.0), -0.3, &p), C64::new(0.0, 0.0));
        // 2i(0.1 + 16/32 - 4/8) = 0.2i
        let v = phase(C64::new(0.5, 0.0), -0.2, &p);
        assert!((v - C64::new(0.0, 0.2)).norm() < 1e-15, "{v}");
        // purely imaginary on the real axis
        for k in [-2.0, -0.3, 0.7, 3.1] {
            assert_eq!(phase(C64::new(k, 0.0), -0.2, &p).re, 0.0);
        }
    }

    #[test]
    fn merged_point_closed_form() {
        let p = p11();
        let sp = stationary_points(-0.45, &p);
        assert_eq!(sp.region, Region::Merged);
        let km = 0.075f64.sqrt();
        assert!((sp.k1.unwrap() - km).abs() < 1e-15);
        assert!((sp.k2.unwrap() - km).abs() < 1e-15);
        assert!((km - 0.273_861_278_752_583_05).abs() < 1e-12);
    }

    #[test]
    fn oscillatory_roots_match_bisection_oracle() {
        let p = p11();
        let xi = -0.2;
        let sp = stationary_points(xi, &p);
        assert_eq!(sp.region, Region::Oscillatory);
        // Oracle: bisection on g(k) = 80 k^4 - 12 k^2 - xi over brackets
        let g = |k: f64| 80.0 * k.powi(4) - 12.0 * k * k - xi;
        let bisect = |mut lo: f64, mut hi: f64| {
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if g(lo) * g(mid) <= 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            0.5 * (lo + hi)
        };
        let km = (3.0f64 / 40.0).sqrt();
        let r1 = bisect(1e-6, km);
        let r2 = bisect(km, 1.0);
        assert!((sp.k1.unwrap() - r1).abs() < 1e-12, "{} vs {}", sp.k1.unwrap(), r1);
        assert!((sp.k2.unwrap() - r2).abs() < 1e-12);
        assert!((sp.k1.unwrap() - 0.138_196_601_125_010_5).abs() < 1e-9);
        assert!((sp.k2.unwrap() - 0.361_803_398_874_989_5).abs() < 1e-9);
    }

    #[test]
    fn stationary_residuals_at_machine_precision() {
        let p = p11();
        for i in 0..50 {
            let xi = -0.449 + 0.447 * i as f64 / 49.0;
            let sp = stationary_points(xi, &p);
            for k in [sp.k1.unwrap(), sp.k2.unwrap(), -sp.k1.unwrap(), -sp.k2.unwrap()] {
                let res = phase_derivative(C64::new(k, 0.0), xi, &p).norm();
                assert!(res < 1e-12, "xi={xi} k={k}: residual {res}");
            }
        }
    }

    #[test]
    fn k0_inverts_exactly() {
        let p = ModelParams::new(0.0, 1.0).unwrap();
        let sp = stationary_points(80.0, &p);
        assert_eq!(sp.region, Region::PositiveXi);
        assert!((sp.k0.unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn classification_examples() {
        let p = p11();
        assert_eq!(classify_region(-20.0, 100.0, &p, 2.0), Region::Oscillatory);
        assert_eq!(classify_region(-100.0, 100.0, &p, 2.0), Region::FastDecay);
        let p0 = ModelParams::new(0.0, 1.0).unwrap();
        // 1 <= 2 * 100^{1/5} ~ 5.02
        assert_eq!(classify_region(1.0, 100.0, &p0, 2.0), Region::PainleveSector);
        assert_eq!(classify_region(20.0, 100.0, &p0, 2.0), Region::PositiveXi);
        assert_eq!(classify_region(-5.0, 100.0, &p0, 2.0), Region::FastDecay);
    }

    #[test]
    fn signature_table_real_axis_and_adjacency() {
        let p = p11();
        let w = Window {
            re_min: -0.6,
            re_max: 0.6,
            im_min: -0.3,
            im_max: 0.3,
        };
        let table = signature_table(-0.2, &p, &w, 13);
        for s in table.iter().filter(|s| s.im_k == 0.0) {
            assert_eq!(s.sign, 0, "real axis at {}", s.re_k);
        }
        // frozen direct evaluation: Re Phi(k2 + 0.1i) > 0
        let k2 = 0.361_803_398_874_989_5;
        let v = phase(C64::new(k2, 0.1), -0.2, &p).re;
        assert!(v > 0.0, "{v}");
        assert!((v - 0.033_568_2).abs() < 1e-6, "{v}");
    }

    #[test]
    fn conjugation_flips_re_phi() {
        let p = p11();
        for &(re, im) in &[(0.3, 0.2), (-0.5, 0.7), (0.05, -0.4)] {
            let a = phase(C64::new(re, im), -0.2, &p).re;
            let b = phase(C64::new(re, -im), -0.2, &p).re;
            assert!((a + b).abs() < 1e-14);
        }
    }

    #[test]
    fn odd_symmetry_of_phase() {
        let p = ModelParams::new(0.7, 1.3).unwrap();
        for &(re, im) in &[(0.3, 0.2), (-1.1, 0.6), (2.0, -0.8)] {
            let k = C64::new(re, im);
            let a = phase(k, -0.11, &p);
            let b = phase(-k, -0.11, &p);
            assert!((a + b).norm() < 1e-13 * (1.0 + a.norm()));
        }
    }

    #[test]
    fn theta_equals_phase_at_alpha_zero() {
        // theta(k) = 2i(16 beta k^5 - k xi) is the alpha = 0 phase
        let p0 = ModelParams::new(0.0, 2.0).unwrap();
        let k = C64::new(0.4, 0.1);
        let xi = 0.3;
        let theta = C64::new(0.0, 2.0) * (16.0 * 2.0 * k.powi(5) - k * xi);
        assert!((phase(k, xi, &p0) - theta).norm() < 1e-15);
    }

    #[test]
    fn continuity_toward_merge() {
        let p = p11();
        let edge = p.xi_left_edge();
        let sp1 = stationary_points(edge + 1e-6, &p);
        let km = (3.0f64 / 40.0).sqrt();
        assert!((sp1.k1.unwrap() - km).abs() < 1e-3);
        assert!((sp1.k2.unwrap() - km).abs() < 1e-3);
    }
}
