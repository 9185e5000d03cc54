//! Fourth-order Painlevé II via a model Riemann–Hilbert problem.
//!
//! The problem lives on four rays through the origin at arguments
//! pi/6, 5pi/6, -5pi/6, -pi/6. The two upper rays carry the jump
//! `[[1, 0], [w, 1]]` and the two lower rays `[[1, wbar], [0, 1]]` with
//!
//! ```text
//! w(z) = s exp(2i (4/5 z^5 + y z)),   wbar(z) = conj(s) exp(-2i (4/5 z^5 + y z)),
//! ```
//!
//! both decaying like `exp(-0.8 |z|^5)` along their rays, so a modest
//! truncation radius suffices. Orientation: the right-hand rays point outward
//! and the left-hand rays point inward, which makes the cyclic product of the
//! jumps at the origin the identity.
//!
//! The solution is represented as `N = I + C[rho]` with an additive density
//! rho on the truncated rays, expanded per panel in Legendre modes (the
//! densities are analytic up to panel endpoints, with nonzero junction
//! values, so an unweighted polynomial basis is the convergent choice).
//! Because the jumps are triangular, the
//! density has a single nonzero column per ray family and the collocation
//! equations couple a column on the upper rays only to a column on the lower
//! rays; evaluation points never sit on a source panel, so the closed-form
//! Cauchy transforms (Legendre functions of the second kind, by Neumann's
//! formula) apply without any principal values. The expansion coefficient of
//! `1/z` at infinity is read off from zeroth Legendre moments of the solved
//! density:
//!
//! ```text
//! N(z) = I + N1/z + O(1/z^2),   N1 = -(1/(2 pi i)) \oint rho(zeta) d zeta,
//! ```
//!
//! and `u_p(y) = -i (N1)_{12}` solves
//!
//! ```text
//! u'''' + 40 u^2 u'' + 40 u (u')^2 + 96 u^5 + 4 y u = 0.
//! ```

use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::numerics::cauchy::{legendre_p_row, CauchyKernel};
use crate::numerics::gauss::gauss_legendre;
use crate::numerics::fd::central_weights;
use crate::phase::{classify_region, Region};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

type C64 = Complex64;

/// Decay demanded of the jump matrix at the truncation radius.
pub const TRUNCATION_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Family {
    Upper,
    Lower,
}

#[derive(Debug, Clone)]
struct Segment {
    family: Family,
    /// Affine map z = mid + d * x, x in [-1, 1]; d encodes orientation.
    mid: C64,
    d: C64,
    znodes: Vec<C64>,
}

/// Truncated, panelized discretization of the four-ray contour.
#[derive(Debug, Clone)]
pub struct RhContour {
    radius: f64,
    panel_breaks: Vec<f64>,
    nodes_per_panel: usize,
    segments: Vec<Segment>,
    p_rows: Vec<Vec<f64>>,
    kernel: CauchyKernel,
}

impl RhContour {
    /// `radius` is the truncation radius, `panels` the number of panels per
    /// ray, `nodes_per_panel` the Legendre modes per panel.
    pub fn new(radius: f64, panels: usize, nodes_per_panel: usize) -> Result<Self> {
        if !(radius > 0.0) || panels < 2 || nodes_per_panel < 4 {
            return Err(Error::Config(
                "contour needs radius > 0, >= 2 panels, >= 4 nodes per panel".into(),
            ));
        }
        // The ray densities oscillate like exp(i 1.386 r^5) under an
        // exp(-0.8 r^5) envelope, so panels are spaced uniformly in r^5 over
        // the outer zone (constant phase turns per panel) with one extra
        // break at 0.35 R isolating the origin junction.
        let mut breaks = vec![0.0, 0.35 * radius];
        for j in 1..panels {
            breaks.push(radius * (j as f64 / (panels - 1) as f64).powf(0.2));
        }
        breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
        breaks.dedup_by(|a, b| (*a - *b).abs() < 1e-12);

        let (xnodes, _) = gauss_legendre(nodes_per_panel);
        let p_rows: Vec<Vec<f64>> = xnodes
            .iter()
            .map(|&x| legendre_p_row(nodes_per_panel, x))
            .collect();
        let kernel = CauchyKernel::new(nodes_per_panel);

        // orientation: right rays outward (0 -> L e^{i th}), left rays inward
        let dirs = [
            (std::f64::consts::FRAC_PI_6, false, Family::Upper), // pi/6 outward
            (5.0 * std::f64::consts::FRAC_PI_6, true, Family::Upper), // 5pi/6 inward
            (-5.0 * std::f64::consts::FRAC_PI_6, true, Family::Lower), // -5pi/6 inward
            (-std::f64::consts::FRAC_PI_6, false, Family::Lower), // -pi/6 outward
        ];
        let mut segments = Vec::new();
        for &(angle, inward, family) in &dirs {
            let e = C64::from_polar(1.0, angle);
            for p in 0..panels {
                let (r0, r1) = (breaks[p], breaks[p + 1]);
                let (z_start, z_end) = if inward { (e * r1, e * r0) } else { (e * r0, e * r1) };
                let mid = 0.5 * (z_start + z_end);
                let d = 0.5 * (z_end - z_start);
                let znodes = xnodes.iter().map(|&x| mid + d * x).collect();
                segments.push(Segment {
                    family,
                    mid,
                    d,
                    znodes,
                });
            }
        }
        Ok(RhContour {
            radius,
            panel_breaks: breaks,
            nodes_per_panel,
            segments,
            p_rows,
            kernel,
        })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }
    pub fn nodes_per_panel(&self) -> usize {
        self.nodes_per_panel
    }
    pub fn panels(&self) -> usize {
        self.panel_breaks.len() - 1
    }

    /// Jump-matrix defect at the truncation radius for given (s, y).
    pub fn truncation_defect(&self, s: C64, y: f64) -> f64 {
        let mut worst: f64 = 0.0;
        for &angle in &[
            std::f64::consts::FRAC_PI_6,
            5.0 * std::f64::consts::FRAC_PI_6,
            -5.0 * std::f64::consts::FRAC_PI_6,
            -std::f64::consts::FRAC_PI_6,
        ] {
            let z = C64::from_polar(self.radius, angle);
            let ex = exponent(z, y);
            let mag = if angle > 0.0 {
                (s * ex.exp()).norm()
            } else {
                (s.conj() * (-ex).exp()).norm()
            };
            worst = worst.max(mag);
        }
        worst
    }

    fn unknowns(&self) -> usize {
        self.segments.len() * self.nodes_per_panel
    }
}

fn exponent(z: C64, y: f64) -> C64 {
    C64::new(0.0, 2.0) * (0.8 * z * z * z * z * z + y * z)
}

/// Leading 1/z coefficient of the solved problem.
#[derive(Debug, Clone, Copy)]
pub struct N1Coefficient {
    pub m: [[C64; 2]; 2],
    /// Deviation from the symmetry structure [[p1, p2], [p2, -p1]], p_j purely
    /// imaginary — a solver-quality diagnostic.
    pub structure_defect: f64,
}

/// Solve the Riemann–Hilbert problem for Stokes datum `s` at argument `y` and
/// return the z^{-1} coefficient.
pub fn solve_rh_painleve(s: C64, y: f64, contour: &RhContour) -> Result<N1Coefficient> {
    let defect = contour.truncation_defect(s, y);
    if defect > TRUNCATION_TOL {
        return Err(Error::TruncationTooSmall {
            defect,
            radius: contour.radius(),
            tol: TRUNCATION_TOL,
        });
    }
    if s.norm() == 0.0 {
        return Ok(N1Coefficient {
            m: [[C64::new(0.0, 0.0); 2]; 2],
            structure_defect: 0.0,
        });
    }
    let n = contour.nodes_per_panel;
    let u = contour.unknowns();
    let segs = &contour.segments;

    // jump factor at every node: w on upper rays, wbar on lower rays
    let jumps: Vec<Vec<C64>> = segs
        .iter()
        .map(|seg| {
            seg.znodes
                .iter()
                .map(|&z| match seg.family {
                    Family::Upper => s * exponent(z, y).exp(),
                    Family::Lower => s.conj() * (-exponent(z, y)).exp(),
                })
                .collect()
        })
        .collect();

    // Two decoupled systems:
    //   A: rho11 on upper rays, rho12 on lower rays  ->  (N1)_11, (N1)_12
    //   B: rho21 on upper rays, rho22 on lower rays  ->  (N1)_21, (N1)_22
    // Row for node i on segment sig (family F, jump v_i), scaled by
    // sqrt(1 - x_i^2):
    //   self expansion  -  v_i * sum over opposite-family segments of the
    //   closed-form Cauchy row; rhs is v_i when the identity column of the
    //   opposite family feeds the equation (A: lower rows; B: upper rows).
    let mut mat_a = DMatrix::<C64>::zeros(u, u);
    let mut mat_b = DMatrix::<C64>::zeros(u, u);
    let mut rhs_a = nalgebra::DVector::<C64>::zeros(u);
    let mut rhs_b = nalgebra::DVector::<C64>::zeros(u);

    for (si, seg) in segs.iter().enumerate() {
        for (mi, &z) in seg.znodes.iter().enumerate() {
            let row = si * n + mi;
            let v = jumps[si][mi];
            // self block: the density's own Legendre expansion at this node
            for (mode, pval) in contour.p_rows[mi].iter().enumerate() {
                let col = si * n + mode;
                mat_a[(row, col)] = C64::new(*pval, 0.0);
                mat_b[(row, col)] = C64::new(*pval, 0.0);
            }
            // coupling to the opposite family
            for (sj, src) in segs.iter().enumerate() {
                if src.family == seg.family {
                    continue;
                }
                let w = (z - src.mid) / src.d;
                let crow = contour.kernel.row(w);
                for (mode, c) in crow.iter().enumerate() {
                    let col = sj * n + mode;
                    mat_a[(row, col)] -= v * c;
                    mat_b[(row, col)] -= v * c;
                }
            }
            match seg.family {
                Family::Upper => rhs_b[row] = v, // rho21 = w (1 + C rho22)
                Family::Lower => rhs_a[row] = v, // rho12 = wbar (1 + C rho11)
            }
        }
    }

    let lu_a = mat_a.lu();
    let sol_a = lu_a.solve(&rhs_a).ok_or_else(|| Error::SingularSystem {
        reason: "system A not solvable; refine the contour".into(),
    })?;
    let lu_b = mat_b.lu();
    let sol_b = lu_b.solve(&rhs_b).ok_or_else(|| Error::SingularSystem {
        reason: "system B not solvable; refine the contour".into(),
    })?;

    // N1 = -(1/(2 pi i)) sum over segments of 2 d c0  =  (i/pi) sum d c0
    let i_over_pi = C64::new(0.0, std::f64::consts::FRAC_1_PI);
    let mut n11 = C64::new(0.0, 0.0);
    let mut n12 = C64::new(0.0, 0.0);
    let mut n21 = C64::new(0.0, 0.0);
    let mut n22 = C64::new(0.0, 0.0);
    for (si, seg) in segs.iter().enumerate() {
        let c0a = sol_a[si * n];
        let c0b = sol_b[si * n];
        match seg.family {
            Family::Upper => {
                n11 += i_over_pi * seg.d * c0a;
                n21 += i_over_pi * seg.d * c0b;
            }
            Family::Lower => {
                n12 += i_over_pi * seg.d * c0a;
                n22 += i_over_pi * seg.d * c0b;
            }
        }
    }

    let structure_defect = (n11 + n22)
        .norm()
        .max((n12 - n21).norm())
        .max(n11.re.abs())
        .max(n12.re.abs());
    Ok(N1Coefficient {
        m: [[n11, n12], [n21, n22]],
        structure_defect,
    })
}

/// u_p(y) = -i (N1)_{12}; real for real s.
pub fn u_p(s: f64, y: f64, contour: &RhContour) -> Result<f64> {
    let n1 = solve_rh_painleve(C64::new(s, 0.0), y, contour)?;
    let v = C64::new(0.0, -1.0) * n1.m[0][1];
    Ok(v.re)
}

/// u_p sampled on a y-grid, with solver diagnostics.
#[derive(Debug, Clone, Serialize)]
pub struct PainleveSolution {
    pub s: f64,
    pub y_grid: Vec<f64>,
    pub u_p: Vec<f64>,
    /// -i (N1)_{12} before taking the real part (imaginary part is a defect).
    #[serde(skip)]
    pub n1_offdiag: Vec<C64>,
    /// (N1)_{11} per y (purely imaginary in exact arithmetic).
    #[serde(skip)]
    pub n1_diag: Vec<C64>,
    pub max_imag_defect: f64,
    pub max_structure_defect: f64,
}

/// Solve on every y in the grid (parallel; each y is independent).
pub fn solve_grid(s: f64, y_grid: &[f64], contour: &RhContour) -> Result<PainleveSolution> {
    let results: Vec<Result<N1Coefficient>> = y_grid
        .par_iter()
        .map(|&y| solve_rh_painleve(C64::new(s, 0.0), y, contour))
        .collect();
    let mut u_vals = Vec::with_capacity(y_grid.len());
    let mut offdiag = Vec::with_capacity(y_grid.len());
    let mut diag = Vec::with_capacity(y_grid.len());
    let mut imag_defect = 0.0f64;
    let mut structure = 0.0f64;
    for r in results {
        let n1 = r?;
        let v = C64::new(0.0, -1.0) * n1.m[0][1];
        u_vals.push(v.re);
        offdiag.push(v);
        diag.push(n1.m[0][0]);
        imag_defect = imag_defect.max(v.im.abs());
        structure = structure.max(n1.structure_defect);
    }
    Ok(PainleveSolution {
        s,
        y_grid: y_grid.to_vec(),
        u_p: u_vals,
        n1_offdiag: offdiag,
        n1_diag: diag,
        max_imag_defect: imag_defect,
        max_structure_defect: structure,
    })
}

/// Max residual of the fourth-order ODE over interior grid points, using
/// central finite differences of stencil half-width `half_width` (2 gives the
/// minimal five-point O(h^2) stencil; 4 gives the nine-point O(h^6) one).
pub fn ode_residual(sol: &PainleveSolution, half_width: usize) -> Result<f64> {
    residual_profile(&sol.y_grid, &sol.u_p, half_width).map(|r| {
        r.into_iter()
            .map(|(_, v)| v.abs())
            .fold(0.0f64, f64::max)
    })
}

/// Pointwise ODE residual at the interior nodes.
pub fn residual_profile(y_grid: &[f64], u: &[f64], half_width: usize) -> Result<Vec<(f64, f64)>> {
    let n = y_grid.len();
    let r = half_width;
    if r < 2 {
        return Err(Error::GridTooCoarse {
            reason: "stencil half-width must be >= 2 for a fourth derivative".into(),
        });
    }
    if n < 2 * r + 5 {
        return Err(Error::GridTooCoarse {
            reason: format!("need at least {} samples, got {n}", 2 * r + 5),
        });
    }
    let h = y_grid[1] - y_grid[0];
    for w in y_grid.windows(2) {
        if ((w[1] - w[0]) - h).abs() > 1e-9 * h.abs() {
            return Err(Error::GridTooCoarse {
                reason: "y-grid must be uniform".into(),
            });
        }
    }
    let w1 = central_weights(r, h, 1);
    let w2 = central_weights(r, h, 2);
    let w4 = central_weights(r, h, 4);
    let mut out = Vec::with_capacity(n - 2 * r);
    for i in r..n - r {
        let mut d1 = 0.0;
        let mut d2 = 0.0;
        let mut d4 = 0.0;
        for j in 0..=2 * r {
            let uj = u[i + j - r];
            d1 += w1[j] * uj;
            d2 += w2[j] * uj;
            d4 += w4[j] * uj;
        }
        let ui = u[i];
        let res = d4 + 40.0 * ui * ui * d2 + 40.0 * ui * d1 * d1 + 96.0 * ui.powi(5) + 4.0 * y_grid[i] * ui;
        out.push((y_grid[i], res));
    }
    Ok(out)
}

/// Transition-sector prediction: `(8/(5 beta t))^{1/5} u_p(-x / (20 beta t)^{1/5})`.
///
/// Requires alpha = 0 and (x, t) inside the sector `0 < x <= M t^{1/5}`, t >= 3.
pub fn painleve_asymptote(
    x: f64,
    t: f64,
    s: f64,
    p: &ModelParams,
    m_const: f64,
    contour: &RhContour,
) -> Result<f64> {
    if p.alpha != 0.0 {
        return Err(Error::Config(format!(
            "painleve sector requires alpha = 0, got alpha = {}",
            p.alpha
        )));
    }
    let region = classify_region(x, t, p, m_const);
    if region != Region::PainleveSector {
        return Err(Error::WrongRegion {
            x,
            t,
            actual: region.as_str().into(),
            expected: "painleve_sector".into(),
        });
    }
    let y = -x / (20.0 * p.beta * t).powf(0.2);
    let amp = (8.0 / (5.0 * p.beta * t)).powf(0.2);
    Ok(amp * u_p(s, y, contour)?)
}
