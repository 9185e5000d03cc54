//! Shared numerical kernels: quadrature, special functions, ODE stepping,
//! interpolation, finite differences, and Cauchy-transform bases.

pub mod cauchy;
pub mod fd;
pub mod gamma;
pub mod gauss;
pub mod ode;
pub mod spline;
