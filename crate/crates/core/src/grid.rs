use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Uniform periodic grid on the torus `[0, period)^dim`.
///
/// Samples are stored row-major with axis 0 slowest, so in 3D the flat index
/// of `(i0, i1, i2)` is `(i0 * n + i1) * n + i2`. Axis `a` carries the
/// coordinate `x_{a+1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    dim: usize,
    n: usize,
    period: f64,
}

impl Grid {
    pub fn new(dim: usize, n: usize, period: f64) -> Result<Self> {
        if dim != 2 && dim != 3 {
            return Err(Error::InvalidGrid(format!("dim must be 2 or 3, got {dim}")));
        }
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "n must be a power of two >= 8, got {n}"
            )));
        }
        if !(period.is_finite() && period > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "period must be positive, got {period}"
            )));
        }
        Ok(Self { dim, n, period })
    }

    /// Grid on `[0, 2π)^dim`.
    pub fn periodic(dim: usize, n: usize) -> Result<Self> {
        Self::new(dim, n, 2.0 * PI)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        self.period / self.n as f64
    }

    /// Factor converting integer mode numbers to physical wavenumbers.
    pub fn wavenumber_scale(&self) -> f64 {
        2.0 * PI / self.period
    }

    pub fn nyquist(&self) -> usize {
        self.n / 2
    }

    /// Per-axis integer indices of a flat index. Unused trailing axes are 0.
    pub fn unravel(&self, idx: usize) -> [usize; 3] {
        let n = self.n;
        match self.dim {
            2 => [idx / n, idx % n, 0],
            _ => [idx / (n * n), (idx / n) % n, idx % n],
        }
    }

    pub fn ravel(&self, ijk: [usize; 3]) -> usize {
        let n = self.n;
        match self.dim {
            2 => (ijk[0] % n) * n + ijk[1] % n,
            _ => ((ijk[0] % n) * n + ijk[1] % n) * n + ijk[2] % n,
        }
    }

    /// Physical coordinates of a flat index.
    pub fn coords(&self, idx: usize) -> [f64; 3] {
        let h = self.spacing();
        let ijk = self.unravel(idx);
        let mut x = [0.0; 3];
        for a in 0..self.dim {
            x[a] = ijk[a] as f64 * h;
        }
        x
    }

    /// Signed integer mode along one axis; the Nyquist index maps to `-n/2`.
    pub fn signed_mode(&self, i: usize) -> i64 {
        let n = self.n as i64;
        let i = i as i64;
        if i < n / 2 {
            i
        } else {
            i - n
        }
    }

    pub fn mode(&self, idx: usize) -> [i64; 3] {
        let ijk = self.unravel(idx);
        let mut m = [0i64; 3];
        for a in 0..self.dim {
            m[a] = self.signed_mode(ijk[a]);
        }
        m
    }

    /// Physical wavevector of a flat spectral index.
    pub fn wavevector(&self, idx: usize) -> [f64; 3] {
        let m = self.mode(idx);
        let s = self.wavenumber_scale();
        [m[0] as f64 * s, m[1] as f64 * s, m[2] as f64 * s]
    }

    /// True when any component of the mode sits on the Nyquist plane.
    pub fn on_nyquist(&self, idx: usize) -> bool {
        let ijk = self.unravel(idx);
        (0..self.dim).any(|a| ijk[a] == self.n / 2)
    }

    /// Flat index of the mode `-k`.
    pub fn reflect(&self, idx: usize) -> usize {
        let n = self.n;
        let ijk = self.unravel(idx);
        let mut r = [0usize; 3];
        for a in 0..self.dim {
            r[a] = (n - ijk[a]) % n;
        }
        self.ravel(r)
    }

    /// Largest `|k|` represented on the grid (corner mode).
    pub fn max_wavenumber(&self) -> f64 {
        (self.dim as f64).sqrt() * self.nyquist() as f64 * self.wavenumber_scale()
    }

    /// Same grid refined by an integer power of two.
    pub fn refined(&self, factor: usize) -> Result<Self> {
        Self::new(self.dim, self.n * factor, self.period)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_sizes() {
        assert!(Grid::periodic(3, 6).is_err());
        assert!(Grid::periodic(3, 4).is_err());
        assert!(Grid::periodic(4, 16).is_err());
        assert!(Grid::new(2, 16, -1.0).is_err());
        assert!(Grid::periodic(2, 8).is_ok());
    }

    #[test]
    fn ravel_roundtrip_and_reflection() {
        let g = Grid::periodic(3, 8).unwrap();
        for idx in 0..g.len() {
            assert_eq!(g.ravel(g.unravel(idx)), idx);
            let r = g.reflect(idx);
            assert_eq!(g.reflect(r), idx);
            if !g.on_nyquist(idx) {
                let (a, b) = (g.mode(idx), g.mode(r));
                assert_eq!([a[0], a[1], a[2]], [-b[0], -b[1], -b[2]]);
            }
        }
    }

    #[test]
    fn nyquist_is_negative() {
        let g = Grid::periodic(2, 16).unwrap();
        assert_eq!(g.signed_mode(8), -8);
        assert_eq!(g.signed_mode(7), 7);
        assert_eq!(g.signed_mode(15), -1);
    }
}
