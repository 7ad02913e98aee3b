//! Deterministic test fields: random band-limited data, dyadic-shell data,
//! localized bumps and divergence-free velocities.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::field::{Field, VectorField};
use crate::grid::Grid;
use crate::lp::CutoffFamily;
use crate::spectral::{inverse, transform, SpectralField};

fn norm3(k: [f64; 3]) -> f64 {
    (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]).sqrt()
}

fn random_spectrum(grid: Grid, seed: u64, weight: impl Fn(f64) -> f64) -> SpectralField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sf = SpectralField::zeros(grid);
    for (i, c) in sf.coeffs_mut().iter_mut().enumerate() {
        let re: f64 = rng.gen_range(-1.0..1.0);
        let im: f64 = rng.gen_range(-1.0..1.0);
        let w = if i == 0 || grid.on_nyquist(i) {
            0.0
        } else {
            weight(norm3(grid.wavevector(i)))
        };
        *c = Complex64::new(re, im) * w;
    }
    sf.project_hermitian();
    sf
}

/// Random mean-free field with modes `0 < |k| <= kmax`, spectrum decaying like
/// `(1 + |k|²)^{-1}`, scaled so that `max |f| = amplitude`.
pub fn random_smooth(grid: Grid, kmax: f64, amplitude: f64, seed: u64) -> Field {
    let sf = random_spectrum(grid, seed, |k| {
        if k <= kmax {
            1.0 / (1.0 + k * k)
        } else {
            0.0
        }
    });
    let f = inverse(&sf);
    let m = f.max_abs();
    if m == 0.0 {
        f
    } else {
        f.scale(amplitude / m)
    }
}

/// Random field spectrally supported in the dyadic shell of block `j`
/// (the block `Δ_j` of a random field with flat spectrum).
pub fn random_shell(grid: Grid, j: i32, seed: u64) -> Result<Field> {
    let cf = CutoffFamily::for_grid(&grid);
    let sf = random_spectrum(grid, seed, |_| 1.0);
    let mut out = sf.clone();
    for (i, c) in out.coeffs_mut().iter_mut().enumerate() {
        *c *= cf.phi_hat_j(j, norm3(grid.wavevector(i)));
    }
    let f = inverse(&out);
    let m = f.max_abs();
    Ok(if m == 0.0 { f } else { f.scale(1.0 / m) })
}

/// Minimum-image displacement from `c` to `x` on the torus.
pub fn periodic_offset(grid: &Grid, x: [f64; 3], c: [f64; 3]) -> [f64; 3] {
    let p = grid.period();
    let mut d = [0.0; 3];
    for a in 0..grid.dim() {
        let mut v = (x[a] - c[a]) % p;
        if v >= 0.5 * p {
            v -= p;
        } else if v < -0.5 * p {
            v += p;
        }
        d[a] = v;
    }
    d
}

/// Periodized Gaussian `exp(-|x - c|²/(2σ²))` using the minimum image.
pub fn gaussian_bump(grid: Grid, center: [f64; 3], sigma: f64) -> Field {
    Field::from_fn(grid, |x| {
        let d = periodic_offset(&grid, x, center);
        (-(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]) / (2.0 * sigma * sigma)).exp()
    })
}

/// Zero-mass radial bump `(3 - r²/σ²) exp(-r²/(2σ²))` in ℝ³ (proportional to
/// `-ΔG` for a Gaussian `G`). Its Newtonian far field vanishes identically.
pub fn mexican_hat(x: [f64; 3], center: [f64; 3], sigma: f64) -> f64 {
    let r2 = (0..3).map(|a| (x[a] - center[a]).powi(2)).sum::<f64>() / (sigma * sigma);
    (3.0 - r2) * (-0.5 * r2).exp()
}

pub fn mexican_hat_field(grid: Grid, center: [f64; 3], sigma: f64) -> Field {
    Field::from_fn(grid, |x| {
        let d = periodic_offset(&grid, x, center);
        mexican_hat(d, [0.0; 3], sigma)
    })
}

/// Random divergence-free field with modes `|k| <= kmax` (Leray projection of
/// a random vector field), scaled so that `max |v| = amplitude`.
pub fn random_solenoidal(grid: Grid, kmax: f64, amplitude: f64, seed: u64) -> Result<VectorField> {
    let dim = grid.dim();
    let raw: Vec<SpectralField> = (0..dim)
        .map(|a| {
            transform(&random_smooth(
                grid,
                kmax,
                1.0,
                seed.wrapping_mul(31).wrapping_add(a as u64),
            ))
        })
        .collect::<Result<_>>()?;
    let mut proj: Vec<SpectralField> = (0..dim).map(|_| SpectralField::zeros(grid)).collect();
    for i in 1..grid.len() {
        let k = grid.wavevector(i);
        let k2: f64 = k.iter().map(|v| v * v).sum();
        for a in 0..dim {
            let mut acc = raw[a].coeffs()[i];
            for b in 0..dim {
                acc -= raw[b].coeffs()[i] * (k[a] * k[b] / k2);
            }
            proj[a].coeffs_mut()[i] = acc;
        }
    }
    let v = VectorField::new(proj.iter().map(inverse).collect())?;
    let m = v.max_magnitude();
    Ok(if m == 0.0 { v } else { v.scale(amplitude / m) })
}
