//! Adaptive Dormand–Prince 5(4) integration for small complex systems.
//!
//! The scattering integrations are non-stiff but oscillatory; an embedded
//! explicit pair with PI step control is the right tool. States are fixed-size
//! arrays of complex numbers so the hot loop stays allocation-free.

use num_complex::Complex64;

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions {
            rtol: 1e-12,
            atol: 1e-12,
            max_steps: 2_000_000,
        }
    }
}

#[derive(Debug)]
pub enum OdeError {
    StepUnderflow { x: f64 },
    MaxSteps { x: f64 },
}

// Dormand–Prince 5(4) tableau
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
// y1 - yhat1 (error estimator)
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Integrate y' = f(x, y) from `x0` to `x1` (x1 > x0).
pub fn integrate<const N: usize, F>(
    f: F,
    x0: f64,
    x1: f64,
    y0: [Complex64; N],
    opts: &OdeOptions,
) -> Result<[Complex64; N], OdeError>
where
    F: Fn(f64, &[Complex64; N]) -> [Complex64; N],
{
    let mut x = x0;
    let mut y = y0;
    let span = x1 - x0;
    assert!(span > 0.0);
    let mut h = (span / 100.0).clamp(1e-8, 0.1);
    let mut k: [[Complex64; N]; 7] = [[Complex64::new(0.0, 0.0); N]; 7];
    k[0] = f(x, &y);
    let mut err_prev: f64 = 1.0;

    for _step in 0..opts.max_steps {
        if x >= x1 {
            return Ok(y);
        }
        if h > x1 - x {
            h = x1 - x;
        }
        if h < 1e-14 * span.max(1.0) {
            return Err(OdeError::StepUnderflow { x });
        }

        for s in 1..7 {
            let mut ys = y;
            for (j, kj) in k.iter().enumerate().take(s) {
                let a = A[s - 1][j];
                if a != 0.0 {
                    for i in 0..N {
                        ys[i] += h * a * kj[i];
                    }
                }
            }
            k[s] = f(x + C[s] * h, &ys);
        }
        // 5th-order solution is stage 7's state (FSAL): y + h * A[5] dot k
        let mut y_new = y;
        for (j, kj) in k.iter().enumerate().take(6) {
            let a = A[5][j];
            if a != 0.0 {
                for i in 0..N {
                    y_new[i] += h * a * kj[i];
                }
            }
        }

        let mut err_sq = 0.0;
        for i in 0..N {
            let mut e = Complex64::new(0.0, 0.0);
            for (j, kj) in k.iter().enumerate() {
                if E[j] != 0.0 {
                    e += E[j] * kj[i];
                }
            }
            let scale = opts.atol + opts.rtol * y[i].norm().max(y_new[i].norm());
            let r = h * e.norm() / scale;
            err_sq += r * r;
        }
        let err = (err_sq / N as f64).sqrt().max(1e-30);

        if err <= 1.0 {
            x += h;
            y = y_new;
            k[0] = k[6]; // FSAL
            // PI controller (Gustafsson)
            let fac = 0.9 * err.powf(-0.7 / 5.0) * err_prev.powf(0.4 / 5.0);
            h *= fac.clamp(0.2, 5.0);
            err_prev = err;
        } else {
            h *= (0.9 * err.powf(-0.2)).clamp(0.2, 1.0);
            k[0] = f(x, &y);
        }
    }
    Err(OdeError::MaxSteps { x })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oscillator_phase_accuracy() {
        // y' = i w y, exact y = exp(i w x)
        let w = 7.3;
        let opts = OdeOptions {
            rtol: 1e-12,
            atol: 1e-12,
            max_steps: 1_000_000,
        };
        let y = integrate(
            |_x, y: &[Complex64; 1]| [Complex64::new(0.0, w) * y[0]],
            0.0,
            20.0,
            [Complex64::new(1.0, 0.0)],
            &opts,
        )
        .unwrap();
        let exact = Complex64::new(0.0, w * 20.0).exp();
        assert!((y[0] - exact).norm() < 1e-9, "err {}", (y[0] - exact).norm());
    }

    #[test]
    fn coupled_system_norm_preservation() {
        // skew-Hermitian right-hand side preserves the 2-norm
        let opts = OdeOptions::default();
        let y = integrate(
            |x: f64, y: &[Complex64; 2]| {
                let u = Complex64::new((2.0 * x).sin(), 0.0);
                [u * y[1], -u * y[0]]
            },
            0.0,
            10.0,
            [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
            &opts,
        )
        .unwrap();
        let n = (y[0].norm_sqr() + y[1].norm_sqr()).sqrt();
        assert!((n - 1.0).abs() < 1e-11);
    }
}
