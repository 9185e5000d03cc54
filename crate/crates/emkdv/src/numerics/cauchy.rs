//! Cauchy transforms of Legendre-expanded densities on a segment.
//!
//! A density that is analytic up to the segment endpoints (nonzero values
//! allowed) is expanded in plain Legendre polynomials; by Neumann's formula
//! its Cauchy transform is a Legendre function of the second kind,
//!
//! ```text
//! (1/(2 pi i)) \int_{-1}^{1} P_n(x) / (x - z) dx = (i/pi) Q_n(z),
//! ```
//!
//! so the transform is available in closed form everywhere off the segment.
//! `Q_n` satisfies the same three-term recurrence as `P_n`; forward recurrence
//! is stable near the segment (|J(z)| close to 1, J the inverse Joukowski
//! map) and is swapped for Gauss-Legendre quadrature of the Neumann integral
//! once z is well separated (|J| < threshold), where the integrand is smooth.
//! Affine maps leave Cauchy transforms invariant, so one standard-segment
//! kernel serves every oriented panel.

use crate::numerics::gauss::gauss_legendre;
use num_complex::Complex64;

type C64 = Complex64;

/// sqrt(z^2 - 1) with branch cut exactly on [-1, 1] and ~ z at infinity.
pub fn sqrt_z2m1(z: C64) -> C64 {
    (z - 1.0).sqrt() * (z + 1.0).sqrt()
}

/// Inverse Joukowski map, |J(z)| <= 1 for z off the cut.
pub fn joukowski_inv(z: C64) -> C64 {
    z - sqrt_z2m1(z)
}

/// P_n(x) for n = 0..n_modes.
pub fn legendre_p_row(n_modes: usize, x: f64) -> Vec<f64> {
    let mut row = Vec::with_capacity(n_modes);
    let mut p0 = 1.0;
    let mut p1 = x;
    for n in 0..n_modes {
        row.push(match n {
            0 => 1.0,
            1 => x,
            _ => {
                let nf = (n - 1) as f64;
                let p2 = ((2.0 * nf + 1.0) * x * p1 - nf * p0) / (nf + 1.0);
                p0 = p1;
                p1 = p2;
                p1
            }
        });
    }
    row
}

/// Forward-recurrence / quadrature switch: above this |J| the Q-recurrence is
/// used (error amplification <= (1/J)^n stays near roundoff), below it the
/// Neumann integrand is smooth enough for the 64-point rule.
const RECURRENCE_J_THRESHOLD: f64 = 0.8;

/// Precomputed standard-segment kernel.
#[derive(Debug, Clone)]
pub struct CauchyKernel {
    quad_x: Vec<f64>,
    quad_w: Vec<f64>,
    /// p_table[m][n] = P_n(quad_x[m])
    p_table: Vec<Vec<f64>>,
    n_modes: usize,
}

impl CauchyKernel {
    pub fn new(n_modes: usize) -> Self {
        let (quad_x, quad_w) = gauss_legendre(64);
        let p_table = quad_x.iter().map(|&x| legendre_p_row(n_modes, x)).collect();
        CauchyKernel {
            quad_x,
            quad_w,
            p_table,
            n_modes,
        }
    }

    /// Row of Cauchy-transform values (1/(2 pi i)) \int P_n(x)/(x - z) dx for
    /// n = 0..n_modes, z strictly off [-1, 1].
    pub fn row(&self, z: C64) -> Vec<C64> {
        let n = self.n_modes;
        let mut out = Vec::with_capacity(n);
        if joukowski_inv(z).norm() >= RECURRENCE_J_THRESHOLD {
            // Q-recurrence; principal log has its cut exactly on the segment
            let q0 = 0.5 * ((z + 1.0) / (z - 1.0)).ln();
            let i_over_pi = C64::new(0.0, std::f64::consts::FRAC_1_PI);
            let mut qm = q0;
            let mut qp = z * q0 - 1.0;
            for k in 0..n {
                let q = match k {
                    0 => q0,
                    1 => qp,
                    _ => {
                        let kf = (k - 1) as f64;
                        let q2 = ((2.0 * kf + 1.0) * z * qp - kf * qm) / (kf + 1.0);
                        qm = qp;
                        qp = q2;
                        q2
                    }
                };
                out.push(i_over_pi * q);
            }
        } else {
            let minus_i_over_2pi = C64::new(0.0, -1.0 / (2.0 * std::f64::consts::PI));
            for k in 0..n {
                let mut acc = C64::new(0.0, 0.0);
                for (m, &x) in self.quad_x.iter().enumerate() {
                    acc += self.quad_w[m] * self.p_table[m][k] / (C64::new(x, 0.0) - z);
                }
                out.push(minus_i_over_2pi * acc);
            }
        }
        out
    }
}
