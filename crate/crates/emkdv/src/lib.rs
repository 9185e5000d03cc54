//! Numerical laboratory for an extended fifth-order modified KdV equation.
//!
//! The crate provides, as independently usable modules:
//!
//! * [`scattering`] — forward scattering transform of an initial datum
//!   (spectral functions a, b, reflection coefficient r) plus an
//!   argument-principle certificate that the discrete spectrum is empty;
//! * [`phase`] — stationary-point geometry of the oscillatory phase and
//!   classification of (x, t) queries into asymptotic regions;
//! * [`asymptotics`] — the explicit two-cosine leading-order evaluator in the
//!   oscillatory region;
//! * [`painleve`] — a collocation solver for the fourth-order Painlevé II
//!   Riemann–Hilbert problem and the transition-sector evaluator;
//! * [`pde`] — a dealiased Fourier pseudospectral reference integrator with
//!   exponential time differencing, used as the ground truth;
//! * [`pipeline`] — configuration, orchestration, and deterministic export.

pub mod asymptotics;
pub mod error;
pub mod model;
pub mod numerics;
pub mod painleve;
pub mod pde;
pub mod phase;
pub mod pipeline;
pub mod scattering;

pub use error::{Error, Result};
pub use model::{InitialProfile, ModelParams, ProfileKind};
