use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::multiplier::dealias_keeps;
use crate::spectral::fft_nd;
use crate::velocity::velocity_symbol_at;

/// Precomputed symbols for one grid and dissipation law.
#[derive(Debug, Clone)]
pub struct SpectralOps {
    grid: Grid,
    kvec: Vec<[f64; 3]>,
    /// `|k|^α`, zero at the mean mode.
    lap: Vec<f64>,
    vel: Vec<[f64; 3]>,
    keep: Vec<bool>,
    /// Per axis: derivative is zeroed on that axis' Nyquist plane.
    nyq: Vec<[bool; 3]>,
}

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

impl SpectralOps {
    pub fn new(grid: Grid, alpha: f64) -> Self {
        let len = grid.len();
        let mut kvec = Vec::with_capacity(len);
        let mut lap = Vec::with_capacity(len);
        let mut vel = Vec::with_capacity(len);
        let mut keep = Vec::with_capacity(len);
        let mut nyq = Vec::with_capacity(len);
        for i in 0..len {
            let k = grid.wavevector(i);
            kvec.push(k);
            let r = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]).sqrt();
            lap.push(if i == 0 { 0.0 } else { r.powf(alpha) });
            vel.push(velocity_symbol_at(&grid, i));
            keep.push(dealias_keeps(&grid, i));
            let ijk = grid.unravel(i);
            let mut flags = [false; 3];
            for (a, f) in flags.iter_mut().enumerate().take(grid.dim()) {
                *f = ijk[a] == grid.n() / 2;
            }
            nyq.push(flags);
        }
        Self {
            grid,
            kvec,
            lap,
            vel,
            keep,
            nyq,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// `exp(-ν |k|^α τ)` for every mode.
    pub fn decay(&self, nu: f64, tau: f64) -> Vec<f64> {
        self.lap.iter().map(|l| (-nu * l * tau).exp()).collect()
    }

    pub fn dealias_in_place(&self, c: &mut [Complex64]) {
        for (v, k) in c.iter_mut().zip(&self.keep) {
            if !k {
                *v = zero();
            }
        }
    }

    fn to_physical(&self, c: Vec<Complex64>) -> Vec<f64> {
        let mut c = c;
        fft_nd(&mut c, &self.grid, true);
        c.into_iter().map(|z| z.re).collect()
    }

    pub(crate) fn to_spectral(&self, f: &[f64]) -> Vec<Complex64> {
        let mut c: Vec<Complex64> = f.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        fft_nd(&mut c, &self.grid, false);
        let s = 1.0 / self.grid.len() as f64;
        for v in c.iter_mut() {
            *v *= s;
        }
        c
    }

    /// Physical velocity components of `θ̂`.
    pub fn velocity(&self, theta: &[Complex64]) -> Vec<Vec<f64>> {
        (0..self.grid.dim())
            .map(|a| {
                let c = theta.iter().zip(&self.vel).map(|(t, m)| t * m[a]).collect();
                self.to_physical(c)
            })
            .collect()
    }

    /// Physical gradient components of `θ̂`.
    pub fn gradient(&self, theta: &[Complex64]) -> Vec<Vec<f64>> {
        (0..self.grid.dim())
            .map(|a| {
                let c = theta
                    .iter()
                    .zip(self.kvec.iter().zip(&self.nyq))
                    .map(|(t, (k, ny))| {
                        if ny[a] {
                            zero()
                        } else {
                            t * Complex64::new(0.0, k[a])
                        }
                    })
                    .collect();
                self.to_physical(c)
            })
            .collect()
    }

    /// `-FFT(v · ∇θ)` with optional 2/3 dealiasing of input and output.
    /// The mean mode is zeroed: for divergence-free `v` the term is a
    /// divergence.
    pub fn advection(
        &self,
        theta: &[Complex64],
        velocity: &[Vec<f64>],
        dealias: bool,
    ) -> Vec<Complex64> {
        let filtered;
        let theta = if dealias {
            let mut t = theta.to_vec();
            self.dealias_in_place(&mut t);
            filtered = t;
            &filtered
        } else {
            theta
        };
        let grad = self.gradient(theta);
        let mut prod = vec![0.0; self.grid.len()];
        for (v, g) in velocity.iter().zip(&grad) {
            for ((p, a), b) in prod.iter_mut().zip(v).zip(g) {
                *p -= a * b;
            }
        }
        let mut out = self.to_spectral(&prod);
        if dealias {
            self.dealias_in_place(&mut out);
        }
        out[0] = zero();
        out
    }

    /// Self-advection term of the porous-media equation.
    pub fn nonlinear(&self, theta: &[Complex64], dealias: bool) -> (Vec<Complex64>, f64) {
        let mut t = theta.to_vec();
        if dealias {
            self.dealias_in_place(&mut t);
        }
        let u = self.velocity(&t);
        let umax = max_speed(&u);
        (self.advection(&t, &u, dealias), umax)
    }

    pub fn physical(&self, theta: &[Complex64]) -> Vec<f64> {
        self.to_physical(theta.to_vec())
    }
}

pub(crate) fn max_speed(u: &[Vec<f64>]) -> f64 {
    let len = u.first().map_or(0, |c| c.len());
    (0..len)
        .map(|i| u.iter().map(|c| c[i] * c[i]).sum::<f64>().sqrt())
        .fold(0.0, f64::max)
}

/// One integrating-factor RK4 step of `v' = -ν Λ^α v + N(v, t)`.
///
/// With `E = exp(-ν|k|^α dt/2)`:
///
/// ```text
/// a = N(v, t)
/// b = N(E(v + dt/2 a), t + dt/2)
/// c = N(E v + dt/2 b, t + dt/2)
/// d = N(E² v + dt E c, t + dt)
/// v⁺ = E² v + dt/6 (E² a + 2E(b + c) + d)
/// ```
pub(crate) fn if_rk4_step<F>(
    v: &[Complex64],
    t: f64,
    dt: f64,
    half: &[f64],
    mut rhs: F,
) -> Result<Vec<Complex64>>
where
    F: FnMut(&[Complex64], f64) -> Result<Vec<Complex64>>,
{
    let n = v.len();
    let a = rhs(v, t)?;
    let s1: Vec<Complex64> = (0..n).map(|i| half[i] * (v[i] + 0.5 * dt * a[i])).collect();
    let b = rhs(&s1, t + 0.5 * dt)?;
    let s2: Vec<Complex64> = (0..n).map(|i| half[i] * v[i] + 0.5 * dt * b[i]).collect();
    let c = rhs(&s2, t + 0.5 * dt)?;
    let s3: Vec<Complex64> = (0..n)
        .map(|i| half[i] * half[i] * v[i] + dt * half[i] * c[i])
        .collect();
    let d = rhs(&s3, t + dt)?;
    let out: Vec<Complex64> = (0..n)
        .map(|i| {
            let e = half[i];
            e * e * v[i] + dt / 6.0 * (e * e * a[i] + 2.0 * e * (b[i] + c[i]) + d[i])
        })
        .collect();
    if let Some(i) = out
        .iter()
        .position(|z| !(z.re.is_finite() && z.im.is_finite()))
    {
        return Err(Error::BlowUp {
            t: t + dt,
            reason: format!("non-finite Fourier coefficient at index {i}"),
        });
    }
    Ok(out)
}
