//! Modulus-of-continuity machinery for the critical dissipative case:
//! the explicit modulus `ω`, the Riesz and double-Riesz moduli `Ω₁`, `Ω`,
//! the dissipation integral `J`, and the breakthrough margin
//! `Cmult·(ω + Ω)·ω′ + J`, whose strict negativity rules out a first
//! touching point.

mod cases;
mod integrals;
mod margin;
mod modulus;

pub use cases::{default_case_samples, verify_case_bounds, BoundCheck, CaseReport};
pub use integrals::{
    dissipation_j, dissipation_parts, double_riesz_modulus_omega, iterated_omega1,
    riesz_modulus_omega1, Dissipation, DEFAULT_TOL,
};
pub use margin::{
    breakthrough_margin, case2_margin_bound, case2_product_term, gamma_crossing, generic_margin,
    log_space, margin_report, scan_negativity, xi_grid, MarginReport, ScanResult,
};
pub use modulus::{omega_eval, omega_knv_doublelog, GenericModulus, ModulusKNV};

use crate::error::{Error, Result};

/// Scale `λ = ω⁻¹(3‖θ₀‖_∞) / (2‖θ₀‖_∞) · ‖∇θ(T₁)‖_∞`, reading the norm in
/// the numerator and denominator as the sup norm of the initial data.
pub fn lambda_from_data(m: &ModulusKNV, theta0_sup: f64, grad_sup_t1: f64) -> Result<f64> {
    if !(theta0_sup > 0.0) {
        return Err(Error::OutOfRange {
            name: "theta0 sup norm",
            value: theta0_sup,
            range: "(0, inf)",
        });
    }
    Ok(m.inverse(3.0 * theta0_sup)? / (2.0 * theta0_sup) * grad_sup_t1)
}
