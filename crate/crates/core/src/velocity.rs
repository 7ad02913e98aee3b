//! Darcy velocity law.
//!
//! With `u = -(∇p + θ e_d)` and `div u = 0` the pressure solves
//! `Δp = -∂_d θ`, so `p̂ = i k_d θ̂ / |k|²` and
//!
//! ```text
//! 3D:  û = (k1 k3, k2 k3, -(k1² + k2²)) θ̂ / |k|²
//! 2D:  û = (k1 k2, -k1²) θ̂ / |k|²
//! ```
//!
//! Modes on a Nyquist plane carry no velocity: their `-k` partner aliases
//! onto the same plane and the symbol cannot be kept both real-valued and
//! divergence free there.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{Field, VectorField};
use crate::grid::Grid;
use crate::spectral::{inverse, transform, SpectralField};

/// Velocity symbol `m(k)`; zero at `k = 0`.
pub fn velocity_symbol(dim: usize, k: [f64; 3]) -> [f64; 3] {
    let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
    if k2 == 0.0 {
        return [0.0; 3];
    }
    match dim {
        2 => [k[0] * k[1] / k2, -k[0] * k[0] / k2, 0.0],
        _ => [
            k[0] * k[2] / k2,
            k[1] * k[2] / k2,
            -(k[0] * k[0] + k[1] * k[1]) / k2,
        ],
    }
}

/// Velocity symbol at a flat spectral index, including the Nyquist rule.
pub fn velocity_symbol_at(grid: &Grid, idx: usize) -> [f64; 3] {
    if grid.on_nyquist(idx) {
        return [0.0; 3];
    }
    velocity_symbol(grid.dim(), grid.wavevector(idx))
}

/// Spectral velocity components from the spectrum of `θ`.
pub fn velocity_spectral(theta: &SpectralField) -> Vec<SpectralField> {
    let grid = *theta.grid();
    let mut out: Vec<SpectralField> = (0..grid.dim())
        .map(|_| SpectralField::zeros(grid))
        .collect();
    for (i, c) in theta.coeffs().iter().enumerate() {
        let m = velocity_symbol_at(&grid, i);
        for (a, comp) in out.iter_mut().enumerate() {
            comp.coeffs_mut()[i] = c * m[a];
        }
    }
    out
}

/// Darcy velocity `u(θ)` on the torus.
pub fn velocity_from_theta(theta: &Field) -> Result<VectorField> {
    let sf = transform(theta)?;
    VectorField::new(velocity_spectral(&sf).iter().map(inverse).collect())
}

/// Velocity of a 3D field; rejects other dimensions.
pub fn velocity_from_theta_3d(theta: &Field) -> Result<VectorField> {
    if theta.grid().dim() != 3 {
        return Err(Error::DimMismatch {
            expected: 3,
            got: theta.grid().dim(),
        });
    }
    velocity_from_theta(theta)
}

/// Pressure reconstructed from `p̂ = i k_d θ̂ / |k|²` (inspection only).
pub fn pressure_from_theta(theta: &Field) -> Result<Field> {
    let grid = *theta.grid();
    let mut sf = transform(theta)?;
    let d = grid.dim() - 1;
    for (i, c) in sf.coeffs_mut().iter_mut().enumerate() {
        let k = grid.wavevector(i);
        let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        *c = if k2 == 0.0 || grid.on_nyquist(i) {
            Complex64::new(0.0, 0.0)
        } else {
            *c * Complex64::new(0.0, k[d] / k2)
        };
    }
    Ok(inverse(&sf))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multiplier::{div, grad};
    use crate::{corpus, Grid};

    fn g3(n: usize) -> Grid {
        Grid::periodic(3, n).unwrap()
    }

    #[test]
    fn stratified_temperature_is_at_rest() {
        let g = g3(16);
        let u = velocity_from_theta(&Field::from_fn(g, |x| x[2].sin())).unwrap();
        assert!(u.max_magnitude() < 1e-15);
    }

    #[test]
    fn horizontal_mode_sinks() {
        let g = g3(16);
        let theta = Field::from_fn(g, |x| x[0].sin());
        let u = velocity_from_theta(&theta).unwrap();
        assert!(u.component(0).max_abs() < 1e-15);
        assert!(u.component(1).max_abs() < 1e-15);
        assert!(u.component(2).max_diff(&theta.scale(-1.0)).unwrap() < 1e-14);
    }

    #[test]
    fn oblique_mode() {
        let g = g3(16);
        let theta = Field::from_fn(g, |x| (x[0] + x[2]).sin());
        let u = velocity_from_theta(&theta).unwrap();
        assert!(u.component(0).max_diff(&theta.scale(0.5)).unwrap() < 1e-14);
        assert!(u.component(1).max_abs() < 1e-15);
        assert!(u.component(2).max_diff(&theta.scale(-0.5)).unwrap() < 1e-14);
        assert!(div(&u).unwrap().max_abs() < 1e-14);
    }

    #[test]
    fn symbol_orthogonal_to_wavevector() {
        for dim in [2, 3] {
            let g = Grid::periodic(dim, 8).unwrap();
            for i in 0..g.len() {
                let k = g.wavevector(i);
                let m = velocity_symbol_at(&g, i);
                let dot = k[0] * m[0] + k[1] * m[1] + k[2] * m[2];
                assert!(dot.abs() <= 1e-15 * (1.0 + k[0].abs() + k[1].abs() + k[2].abs()));
            }
        }
    }

    #[test]
    fn darcy_law_holds_with_reconstructed_pressure() {
        let g = g3(16);
        let theta = corpus::random_smooth(g, 5.0, 1.0, 4);
        let u = velocity_from_theta(&theta).unwrap();
        let gp = grad(&pressure_from_theta(&theta).unwrap()).unwrap();
        // u = -(∇p + θ e3) up to the mean of θ
        let th = theta.mean_removed();
        for a in 0..3 {
            let mut rhs = gp.component(a).scale(-1.0);
            if a == 2 {
                rhs = rhs.sub(&th).unwrap();
            }
            assert!(u.component(a).max_diff(&rhs).unwrap() < 1e-13);
        }
    }

    #[test]
    fn rejects_2d_for_3d_law() {
        let g = Grid::periodic(2, 8).unwrap();
        assert!(matches!(
            velocity_from_theta_3d(&Field::zeros(g)),
            Err(Error::DimMismatch { .. })
        ));
    }
}
