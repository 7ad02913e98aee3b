//! Spectral toolkit for the incompressible porous media (IPM) equation with
//! fractional dissipation on the periodic box `[0, 2π)^d`:
//!
//! ```text
//! ∂ₜθ + u·∇θ + ν(−Δ)^{α/2} θ = 0,   u = Darcy velocity of θ.
//! ```
//!
//! Modules:
//! - [`grid`], [`field`], [`spectral`], [`multiplier`], [`velocity`]: fields and Fourier multipliers.
//! - [`lp`]: Littlewood–Paley blocks, Besov and Chemin–Lerner norms, paraproducts.
//! - [`solver`]: integrating-factor RK4 for the nonlinear and linear transport-diffusion problems.
//! - [`diagnostics`]: blow-up integrals, smoothing trackers, a priori ratios, empirical moduli.
//! - [`moc`]: the explicit modulus of continuity and its breakthrough margin.
//! - [`kernel`]: a real-space principal-value check of the velocity law.

pub mod corpus;
pub mod diagnostics;
pub mod error;
pub mod field;
pub mod grid;
pub mod kernel;
pub mod lp;
pub mod moc;
pub mod multiplier;
pub mod quadrature;
pub mod solver;
pub mod spectral;
pub mod trajectory;
pub mod velocity;

pub use error::{Error, Result};
pub use field::{Exponent, Field, VectorField};
pub use grid::Grid;
pub use spectral::{inverse, transform, SpectralField};
pub use trajectory::{DiagnosticRecord, Trajectory, Truncation};
pub use velocity::velocity_from_theta;
