//! Fourier pseudospectral reference integrator, fourth order in time and
//! exactly conservative for the L^2 invariant.
//!
//! The equation is integrated on a large periodic domain `[-L, L)`. In
//! Fourier variables the linear part is diagonal with the purely imaginary
//! symbol `i (alpha k^3 - beta k^5)` (extremely stiff through the quintic
//! term); the nonlinearity
//!
//! ```text
//! N(u) = -alpha 6 u^2 u_x
//!        - beta (30 u^4 u_x + 10 u_x^3 + 40 u u_x u_xx + 10 u^2 u_xxx)
//! ```
//!
//! is itself quasilinear (third derivatives with solution-dependent
//! coefficients), so fully explicit stages are useless here. Each substep is
//! an implicit midpoint step,
//!
//! ```text
//! (1 - h L / 2) m = u_n + (h/2) N(m),      u_{n+1} = 2 m - u_n,
//! ```
//!
//! solved by fixed-point iteration; the diagonal resolvent damps the
//! high-wavenumber part of `N` by |lambda_N / lambda_L|, which keeps the
//! iteration contractive at practical step sizes. Midpoint is A-stable with
//! |R(iy)| = 1 and conserves every quadratic invariant of the semidiscrete
//! flow exactly, so the energy ledger tracks only dealiasing residue and
//! iteration noise. A Yoshida triple jump (substeps gamma1 h, gamma2 h,
//! gamma1 h) lifts the composition to fourth order while keeping the exact
//! conservation; exponential multistage alternatives were measured to lose
//! energy at 1e-6..1e-7 per run through stiff order reduction, orders of
//! magnitude above the ledger tolerance.
//!
//! Products are dealiased by the 2/3 rule; residual aliasing from the quintic
//! terms is controlled a posteriori by the conservation and step-halving
//! checks.

use crate::error::{Error, Result};
use crate::model::{InitialProfile, ModelParams};
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::Serialize;
use std::sync::Arc;

type C64 = Complex64;

/// Periodic spectral grid on `[-l_domain, l_domain)` with `n` points.
#[derive(Debug, Clone)]
pub struct SpectralGrid {
    pub l_domain: f64,
    pub n: usize,
    x: Vec<f64>,
    k: Vec<f64>,
    dealias: Vec<bool>,
}

impl SpectralGrid {
    pub fn new(l_domain: f64, n: usize) -> Result<Self> {
        if n < 256 || !n.is_power_of_two() {
            return Err(Error::Config(format!(
                "spectral grid needs a power-of-two mode count >= 256, got {n}"
            )));
        }
        if !(l_domain > 0.0) {
            return Err(Error::Config("l_domain must be positive".into()));
        }
        let dx = 2.0 * l_domain / n as f64;
        let x: Vec<f64> = (0..n).map(|m| -l_domain + m as f64 * dx).collect();
        let k: Vec<f64> = (0..n)
            .map(|j| {
                let jj = if j <= n / 2 { j as i64 } else { j as i64 - n as i64 };
                std::f64::consts::PI / l_domain * jj as f64
            })
            .collect();
        let k_cut = std::f64::consts::PI / dx * (2.0 / 3.0);
        let dealias: Vec<bool> = k.iter().map(|kj| kj.abs() <= k_cut).collect();
        Ok(SpectralGrid {
            l_domain,
            n,
            x,
            k,
            dealias,
        })
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }
    pub fn wavenumbers(&self) -> &[f64] {
        &self.k
    }
    pub fn dx(&self) -> f64 {
        2.0 * self.l_domain / self.n as f64
    }
}

/// Fourier symbol of the linear flow, `i (alpha k^3 - beta k^5)`.
pub fn linear_symbol(k: f64, p: &ModelParams) -> C64 {
    C64::new(0.0, p.alpha * k.powi(3) - p.beta * k.powi(5))
}

/// Field sampled at one output time.
#[derive(Debug, Clone, Serialize)]
pub struct FieldSnapshot {
    pub t: f64,
    pub x: Vec<f64>,
    pub u: Vec<f64>,
    /// |u| at the periodic seam x = -L; wrap-around indicator.
    pub boundary_amplitude: f64,
    pub contaminated: bool,
    #[serde(skip)]
    spectrum: Vec<C64>,
    #[serde(skip)]
    l_domain: f64,
}

impl FieldSnapshot {
    /// Trigonometric (spectral) interpolation of the snapshot at `x0`.
    pub fn eval_at(&self, x0: f64) -> f64 {
        let n = self.spectrum.len();
        let l = self.l_domain;
        let shift = x0 + l;
        let mut acc = 0.0;
        for (j, c) in self.spectrum.iter().enumerate() {
            if c.norm_sqr() == 0.0 {
                continue;
            }
            let jj = if j <= n / 2 { j as i64 } else { j as i64 - n as i64 };
            let kj = std::f64::consts::PI / l * jj as f64;
            let ph = kj * shift;
            acc += c.re * ph.cos() - c.im * ph.sin();
        }
        acc / n as f64
    }
}

/// (mass, energy) = (integral of u, integral of u^2) by the periodic rectangle
/// rule (spectrally accurate).
pub fn conserved_quantities(snap: &FieldSnapshot) -> (f64, f64) {
    let dx = 2.0 * snap.l_domain / snap.u.len() as f64;
    let mass: f64 = snap.u.iter().sum::<f64>() * dx;
    let energy: f64 = snap.u.iter().map(|v| v * v).sum::<f64>() * dx;
    (mass, energy)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ConservationSample {
    pub t: f64,
    pub mass: f64,
    pub energy: f64,
}

/// Result of a reference run: snapshots plus the conservation ledger.
#[derive(Debug, Clone, Serialize)]
pub struct EvolveOutcome {
    pub snapshots: Vec<FieldSnapshot>,
    pub conservation: Vec<ConservationSample>,
    /// Maximum relative drift of the energy over the run.
    pub energy_drift: f64,
    /// Absolute drift of the mass over the run.
    pub mass_drift: f64,
    pub dt_effective: Vec<f64>,
}

struct Workspace {
    grid: SpectralGrid,
    p: ModelParams,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    scratch: Vec<C64>,
}

impl Workspace {
    fn new(grid: SpectralGrid, p: ModelParams) -> Self {
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(grid.n);
        let inv = planner.plan_fft_inverse(grid.n);
        let scratch_len = fwd.get_inplace_scratch_len().max(inv.get_inplace_scratch_len());
        Workspace {
            grid,
            p,
            fwd,
            inv,
            scratch: vec![C64::new(0.0, 0.0); scratch_len],
        }
    }

    fn dealias(&self, v: &mut [C64]) {
        for (c, keep) in v.iter_mut().zip(&self.grid.dealias) {
            if !keep {
                *c = C64::new(0.0, 0.0);
            }
        }
    }

    /// Spectrum of N(u) from the spectrum of u. Derivative pairs are packed
    /// two-per-transform: ifft(A + iB) = a + i b for real fields a, b.
    fn nonlinear(&mut self, u_hat: &[C64], out: &mut Vec<C64>) {
        let n = self.grid.n;
        let inv_n = 1.0 / n as f64;
        let mut p01: Vec<C64> = Vec::with_capacity(n);
        let mut p23: Vec<C64> = Vec::with_capacity(n);
        for j in 0..n {
            let k = self.grid.k[j];
            let ik = C64::new(0.0, k);
            let d1 = ik * u_hat[j];
            let d2 = ik * d1;
            let d3 = ik * d2;
            // u + i u_x and u_xx + i u_xxx
            p01.push(u_hat[j] + C64::new(0.0, 1.0) * d1);
            p23.push(d2 + C64::new(0.0, 1.0) * d3);
        }
        self.inv.process_with_scratch(&mut p01, &mut self.scratch);
        self.inv.process_with_scratch(&mut p23, &mut self.scratch);
        out.clear();
        let (alpha, beta) = (self.p.alpha, self.p.beta);
        for j in 0..n {
            let u = p01[j].re * inv_n;
            let ux = p01[j].im * inv_n;
            let uxx = p23[j].re * inv_n;
            let uxxx = p23[j].im * inv_n;
            let nval = -alpha * 6.0 * u * u * ux
                - beta * (30.0 * u.powi(4) * ux + 10.0 * ux.powi(3) + 40.0 * u * ux * uxx + 10.0 * u * u * uxxx);
            out.push(C64::new(nval, 0.0));
        }
        self.fwd.process_with_scratch(out, &mut self.scratch);
        self.dealias(out);
    }

    fn physical_field(&mut self, u_hat: &[C64]) -> Vec<f64> {
        let mut buf = u_hat.to_vec();
        self.inv.process_with_scratch(&mut buf, &mut self.scratch);
        let inv_n = 1.0 / self.grid.n as f64;
        buf.iter().map(|c| c.re * inv_n).collect()
    }
}

/// Yoshida composition weights for the fourth-order triple jump.
const YOSHIDA_GAMMA1: f64 = 1.351_207_191_959_657_8;
const YOSHIDA_GAMMA2: f64 = 1.0 - 2.0 * YOSHIDA_GAMMA1;

/// Relative fixed-point stopping tolerance (kept near roundoff so that
/// iteration noise stays far below the conservation ledger tolerance).
const MIDPOINT_TOL: f64 = 3e-15;
const MIDPOINT_MAX_ITERS: usize = 60;

/// Resolvent tables 1/(1 - h lambda / 2) for one substep size.
fn resolvent(symbol: &[C64], h: f64) -> Vec<C64> {
    symbol.iter().map(|&lam| (C64::new(1.0, 0.0) - 0.5 * h * lam).inv()).collect()
}

struct MidpointScratch {
    m: Vec<C64>,
    m_next: Vec<C64>,
    n_hat: Vec<C64>,
}

/// One implicit-midpoint substep of size `h` (h may be negative).
fn midpoint_substep(
    ws: &mut Workspace,
    u_hat: &mut [C64],
    res: &[C64],
    h: f64,
    t_now: f64,
    scratch: &mut MidpointScratch,
) -> Result<()> {
    let n = u_hat.len();
    scratch.m.clear();
    scratch.m.extend_from_slice(u_hat);
    let norm0: f64 = u_hat.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt().max(1e-300);
    let mut converged = false;
    for _ in 0..MIDPOINT_MAX_ITERS {
        ws.nonlinear(&scratch.m, &mut scratch.n_hat);
        scratch.m_next.clear();
        let mut delta_sq = 0.0;
        for j in 0..n {
            let next = res[j] * (u_hat[j] + 0.5 * h * scratch.n_hat[j]);
            delta_sq += (next - scratch.m[j]).norm_sqr();
            scratch.m_next.push(next);
        }
        std::mem::swap(&mut scratch.m, &mut scratch.m_next);
        if delta_sq.sqrt() <= MIDPOINT_TOL * norm0 {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::IntegratorFailure {
            x: t_now,
            reason: "midpoint fixed-point iteration stalled; reduce dt".into(),
        });
    }
    for j in 0..n {
        u_hat[j] = 2.0 * scratch.m[j] - u_hat[j];
    }
    Ok(())
}

/// Settings for a reference run.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PdeSettings {
    pub l_domain: f64,
    pub n: usize,
    pub dt: f64,
    pub boundary_tol: f64,
}

impl Default for PdeSettings {
    fn default() -> Self {
        PdeSettings {
            l_domain: 400.0,
            n: 8192,
            dt: 1e-2,
            boundary_tol: 1e-2,
        }
    }
}

/// Pointwise N(u) on the grid, with spectral derivatives and dealiased
/// products (exposed for oracle checks).
pub fn nonlinear_term(u: &[f64], p: &ModelParams, grid: &SpectralGrid) -> Vec<f64> {
    let mut ws = Workspace::new(grid.clone(), *p);
    let mut u_hat: Vec<C64> = u.iter().map(|&v| C64::new(v, 0.0)).collect();
    let scratch = &mut ws.scratch.clone();
    ws.fwd.process_with_scratch(&mut u_hat, scratch);
    ws.dealias(&mut u_hat);
    let mut out = Vec::new();
    ws.nonlinear(&u_hat, &mut out);
    ws.inv.process_with_scratch(&mut out, scratch);
    let inv_n = 1.0 / grid.n as f64;
    out.iter().map(|c| c.re * inv_n).collect()
}

/// Integrate from the initial profile and emit snapshots at `t_out`
/// (strictly increasing, all > 0).
pub fn evolve(
    u0: &InitialProfile,
    p: &ModelParams,
    grid: &SpectralGrid,
    settings: &PdeSettings,
    t_out: &[f64],
) -> Result<EvolveOutcome> {
    if t_out.is_empty() || t_out.windows(2).any(|w| w[1] <= w[0]) || t_out[0] <= 0.0 {
        return Err(Error::Config("t_out must be strictly increasing and positive".into()));
    }
    if !(settings.dt > 0.0) {
        return Err(Error::Config("dt must be positive".into()));
    }
    if u0.support_radius() > grid.l_domain {
        return Err(Error::Config(format!(
            "datum support radius {} exceeds l_domain {}",
            u0.support_radius(),
            grid.l_domain
        )));
    }
    let mut ws = Workspace::new(grid.clone(), *p);
    let n = grid.n;
    let symbol: Vec<C64> = grid.k.iter().map(|&k| linear_symbol(k, p)).collect();

    let mut u_hat: Vec<C64> = grid.x.iter().map(|&x| C64::new(u0.eval(x), 0.0)).collect();
    {
        let mut scratch = ws.scratch.clone();
        ws.fwd.process_with_scratch(&mut u_hat, &mut scratch);
    }
    ws.dealias(&mut u_hat);

    let mut snapshots = Vec::with_capacity(t_out.len());
    let mut conservation = Vec::with_capacity(t_out.len() + 1);
    let mut dts = Vec::with_capacity(t_out.len());

    let u_phys0 = ws.physical_field(&u_hat);
    let snap0 = make_snapshot(0.0, &ws.grid, u_phys0, u_hat.clone());
    let (m0, e0) = conserved_quantities(&snap0);
    conservation.push(ConservationSample {
        t: 0.0,
        mass: m0,
        energy: e0,
    });

    let mut scratch = MidpointScratch {
        m: Vec::with_capacity(n),
        m_next: Vec::with_capacity(n),
        n_hat: Vec::with_capacity(n),
    };

    let mut t_prev = 0.0;
    let mut tables: Option<(f64, Vec<C64>, Vec<C64>)> = None;
    for &t_target in t_out {
        let span = t_target - t_prev;
        let steps = (span / settings.dt).round().max(1.0) as usize;
        let dt = span / steps as f64;
        dts.push(dt);
        let fresh = match &tables {
            Some((cached_dt, _, _)) => (cached_dt - dt).abs() > 1e-15,
            None => true,
        };
        if fresh {
            let r1 = resolvent(&symbol, YOSHIDA_GAMMA1 * dt);
            let r2 = resolvent(&symbol, YOSHIDA_GAMMA2 * dt);
            tables = Some((dt, r1, r2));
        }
        let (_, r1, r2) = tables.as_ref().unwrap();

        for step in 0..steps {
            let t_now = t_prev + step as f64 * dt;
            midpoint_substep(&mut ws, &mut u_hat, r1, YOSHIDA_GAMMA1 * dt, t_now, &mut scratch)?;
            midpoint_substep(&mut ws, &mut u_hat, r2, YOSHIDA_GAMMA2 * dt, t_now, &mut scratch)?;
            midpoint_substep(&mut ws, &mut u_hat, r1, YOSHIDA_GAMMA1 * dt, t_now, &mut scratch)?;
        }
        t_prev = t_target;

        let u_phys = ws.physical_field(&u_hat);
        if u_phys.iter().any(|v| !v.is_finite()) {
            return Err(Error::BlowUp { t: t_target });
        }
        let snap = make_snapshot(t_target, &ws.grid, u_phys, u_hat.clone());
        if snap.boundary_amplitude > settings.boundary_tol {
            return Err(Error::BoundaryContamination {
                t: t_target,
                boundary_value: snap.boundary_amplitude,
                tol: settings.boundary_tol,
            });
        }
        let (m, e) = conserved_quantities(&snap);
        conservation.push(ConservationSample {
            t: t_target,
            mass: m,
            energy: e,
        });
        snapshots.push(snap);
    }

    let e_ref = conservation[0].energy;
    let energy_drift = if e_ref.abs() > 0.0 {
        conservation
            .iter()
            .map(|s| (s.energy - e_ref).abs() / e_ref.abs())
            .fold(0.0f64, f64::max)
    } else {
        conservation.iter().map(|s| s.energy.abs()).fold(0.0f64, f64::max)
    };
    let mass_drift = conservation
        .iter()
        .map(|s| (s.mass - conservation[0].mass).abs())
        .fold(0.0f64, f64::max);

    Ok(EvolveOutcome {
        snapshots,
        conservation,
        energy_drift,
        mass_drift,
        dt_effective: dts,
    })
}

fn make_snapshot(t: f64, grid: &SpectralGrid, u: Vec<f64>, spectrum: Vec<C64>) -> FieldSnapshot {
    let boundary_amplitude = u[0].abs();
    FieldSnapshot {
        t,
        x: grid.x.clone(),
        u,
        boundary_amplitude,
        contaminated: false,
        spectrum,
        l_domain: grid.l_domain,
    }
}
