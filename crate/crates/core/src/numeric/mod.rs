//! Small self-contained numerical kernels: an adaptive Runge–Kutta integrator
//! and adaptive Gauss–Kronrod quadrature.

pub mod ode;
pub mod quad;
