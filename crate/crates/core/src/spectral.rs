//! Fourier representation of periodic fields.
//!
//! Coefficients follow the Fourier-series normalization
//!
//! ```text
//! c_k = N^{-1} Σ_x f(x) e^{-i k·x},      f(x) = Σ_k c_k e^{i k·x},
//! ```
//!
//! with `N = n^dim`. Parseval then reads `mean |f|² = Σ |c_k|²`, and a pure
//! mode `cos(k·x)` has the coefficient pair `c_{±k} = 1/2`.

use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::field::Field;
use crate::grid::Grid;

thread_local! {
    static PLANS: RefCell<(FftPlanner<f64>, HashMap<(usize, bool), Arc<dyn Fft<f64>>>)> =
        RefCell::new((FftPlanner::new(), HashMap::new()));
}

fn plan(n: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    PLANS.with(|cell| {
        let mut guard = cell.borrow_mut();
        let (planner, cache) = &mut *guard;
        cache
            .entry((n, inverse))
            .or_insert_with(|| {
                if inverse {
                    planner.plan_fft_inverse(n)
                } else {
                    planner.plan_fft_forward(n)
                }
            })
            .clone()
    })
}

/// Unnormalized in-place FFT over every axis of a row-major cube.
pub(crate) fn fft_nd(data: &mut [Complex64], grid: &Grid, inverse: bool) {
    let n = grid.n();
    let fft = plan(n, inverse);
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];

    // Last axis is contiguous: one batched call.
    fft.process_with_scratch(data, &mut scratch);

    let mut lines = vec![Complex64::new(0.0, 0.0); data.len()];
    for axis in (0..grid.dim() - 1).rev() {
        let stride = n.pow((grid.dim() - 1 - axis) as u32);
        let block = n * stride;
        let outer = data.len() / block;
        let mut w = 0;
        for o in 0..outer {
            for inner in 0..stride {
                let base = o * block + inner;
                for i in 0..n {
                    lines[w] = data[base + i * stride];
                    w += 1;
                }
            }
        }
        fft.process_with_scratch(&mut lines, &mut scratch);
        let mut r = 0;
        for o in 0..outer {
            for inner in 0..stride {
                let base = o * block + inner;
                for i in 0..n {
                    data[base + i * stride] = lines[r];
                    r += 1;
                }
            }
        }
    }
}

/// Fourier coefficients of a real periodic field.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: Grid,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn new(grid: Grid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::InvalidArgument(format!(
                "expected {} coefficients, got {}",
                grid.len(),
                coeffs.len()
            )));
        }
        Ok(Self { grid, coeffs })
    }

    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            coeffs: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    /// Coefficient of the integer mode `k` (axes beyond `dim` ignored).
    pub fn coeff(&self, k: [i64; 3]) -> Complex64 {
        let n = self.grid.n() as i64;
        let mut ijk = [0usize; 3];
        for a in 0..self.grid.dim() {
            ijk[a] = k[a].rem_euclid(n) as usize;
        }
        self.coeffs[self.grid.ravel(ijk)]
    }

    pub fn mean(&self) -> f64 {
        self.coeffs[0].re
    }

    /// `max_k |c(k) - conj(c(-k))|`.
    pub fn hermitian_defect(&self) -> f64 {
        (0..self.coeffs.len())
            .map(|i| (self.coeffs[i] - self.coeffs[self.grid.reflect(i)].conj()).norm())
            .fold(0.0, f64::max)
    }

    /// Projects onto Hermitian-symmetric coefficients, `(c(k) + conj c(-k)) / 2`.
    ///
    /// On Nyquist planes `-k` aliases onto a mode with the Nyquist component
    /// unchanged, so odd parts of a symbol along that axis are annihilated.
    pub fn project_hermitian(&mut self) {
        let orig = self.coeffs.clone();
        for (i, c) in self.coeffs.iter_mut().enumerate() {
            *c = 0.5 * (orig[i] + orig[self.grid.reflect(i)].conj());
        }
    }

    /// Parseval sum `Σ |c_k|²`.
    pub fn energy(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn scale(&self, s: f64) -> SpectralField {
        SpectralField {
            grid: self.grid,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    /// Removes the mean mode.
    pub fn without_mean(mut self) -> SpectralField {
        self.coeffs[0] = Complex64::new(0.0, 0.0);
        self
    }

    pub fn add(&self, other: &SpectralField) -> Result<SpectralField> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(SpectralField {
            grid: self.grid,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    /// Largest `|k|` with a coefficient above `threshold`, and the smallest
    /// nonzero one. `None` when the non-mean spectrum is empty.
    pub fn spectral_extent(&self, threshold: f64) -> Option<(f64, f64)> {
        let mut lo = f64::INFINITY;
        let mut hi: f64 = 0.0;
        for (i, c) in self.coeffs.iter().enumerate().skip(1) {
            if c.norm() > threshold {
                let k = self.grid.wavevector(i);
                let r = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]).sqrt();
                lo = lo.min(r);
                hi = hi.max(r);
            }
        }
        (hi > 0.0).then_some((lo, hi))
    }
}

/// Forward transform; rejects non-finite samples.
pub fn transform(field: &Field) -> Result<SpectralField> {
    field.check_finite()?;
    let grid = *field.grid();
    let mut data: Vec<Complex64> = field
        .samples()
        .iter()
        .map(|&v| Complex64::new(v, 0.0))
        .collect();
    fft_nd(&mut data, &grid, false);
    let inv_n = 1.0 / grid.len() as f64;
    for c in data.iter_mut() {
        *c *= inv_n;
    }
    Ok(SpectralField { grid, coeffs: data })
}

/// Inverse transform. The imaginary residue of Hermitian input is rounding
/// and is discarded.
pub fn inverse(sf: &SpectralField) -> Field {
    let mut data = sf.coeffs.clone();
    fft_nd(&mut data, &sf.grid, true);
    Field::from_vec_unchecked(sf.grid, data.into_iter().map(|c| c.re).collect())
}
