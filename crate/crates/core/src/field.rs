use crate::error::{Error, Result};
use crate::grid::Grid;

/// Exponent of an `L^p` norm, `1 <= p <= ∞`.
///
/// Norms on the torus use the normalized measure, so `‖cos‖_∞ = 1` and
/// `‖cos‖_2 = 1/√2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exponent(f64);

impl Exponent {
    pub const INFINITY: Exponent = Exponent(f64::INFINITY);

    pub fn new(p: f64) -> Result<Self> {
        if p.is_nan() || p < 1.0 {
            return Err(Error::OutOfRange {
                name: "exponent",
                value: p,
                range: "[1, inf]",
            });
        }
        Ok(Self(p))
    }

    pub fn finite(p: u32) -> Self {
        Self::new(p as f64).expect("integer exponent >= 1")
    }

    pub fn value(&self) -> f64 {
        self.0
    }

    pub fn is_infinite(&self) -> bool {
        self.0.is_infinite()
    }

    /// `1/p`, zero for `p = ∞`.
    pub fn reciprocal(&self) -> f64 {
        if self.is_infinite() {
            0.0
        } else {
            1.0 / self.0
        }
    }
}

impl std::fmt::Display for Exponent {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_infinite() {
            write!(f, "inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

/// Normalized `L^p` norm of a sample slice.
pub fn lp_norm(samples: &[f64], p: Exponent) -> f64 {
    if samples.is_empty() {
        return 0.0;
    }
    if p.is_infinite() {
        return samples.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    }
    let pv = p.value();
    let len = samples.len() as f64;
    if pv == 2.0 {
        return (samples.iter().map(|v| v * v).sum::<f64>() / len).sqrt();
    }
    if pv == 1.0 {
        return samples.iter().map(|v| v.abs()).sum::<f64>() / len;
    }
    (samples.iter().map(|v| v.abs().powf(pv)).sum::<f64>() / len).powf(1.0 / pv)
}

/// Real scalar field sampled on a periodic grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: Grid,
    data: Vec<f64>,
}

impl Field {
    pub fn new(grid: Grid, data: Vec<f64>) -> Result<Self> {
        if data.len() != grid.len() {
            return Err(Error::InvalidArgument(format!(
                "expected {} samples, got {}",
                grid.len(),
                data.len()
            )));
        }
        if let Some(index) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { grid, data })
    }

    /// Builds a field without the finiteness scan. Callers guarantee the
    /// invariant (internal solver paths check once per step instead).
    pub(crate) fn from_vec_unchecked(grid: Grid, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), grid.len());
        Self { grid, data }
    }

    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            data: vec![0.0; grid.len()],
        }
    }

    pub fn constant(grid: Grid, value: f64) -> Self {
        Self {
            grid,
            data: vec![value; grid.len()],
        }
    }

    pub fn from_fn(grid: Grid, f: impl Fn([f64; 3]) -> f64) -> Self {
        let data = (0..grid.len()).map(|i| f(grid.coords(i))).collect();
        Self { grid, data }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn samples(&self) -> &[f64] {
        &self.data
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.data
    }

    pub fn mean(&self) -> f64 {
        self.data.iter().sum::<f64>() / self.data.len() as f64
    }

    pub fn max(&self) -> f64 {
        self.data.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.data.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn max_abs(&self) -> f64 {
        lp_norm(&self.data, Exponent::INFINITY)
    }

    pub fn norm(&self, p: Exponent) -> f64 {
        lp_norm(&self.data, p)
    }

    /// Field with its mean subtracted.
    pub fn mean_removed(&self) -> Field {
        let m = self.mean();
        self.map(|v| v - m)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Field {
        Field {
            grid: self.grid,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_with(&self, other: &Field, f: impl Fn(f64, f64) -> f64) -> Result<Field> {
        self.check_grid(other)?;
        Ok(Field {
            grid: self.grid,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn add(&self, other: &Field) -> Result<Field> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Field) -> Result<Field> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &Field) -> Result<Field> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn scale(&self, s: f64) -> Field {
        self.map(|v| v * s)
    }

    /// `max |self - other|`.
    pub fn max_diff(&self, other: &Field) -> Result<f64> {
        self.check_grid(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs())))
    }

    pub fn check_grid(&self, other: &Field) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }

    pub fn check_finite(&self) -> Result<()> {
        match self.data.iter().position(|v| !v.is_finite()) {
            Some(index) => Err(Error::NonFinite { index }),
            None => Ok(()),
        }
    }
}

/// Vector field with one [`Field`] per spatial component.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    components: Vec<Field>,
}

impl VectorField {
    pub fn new(components: Vec<Field>) -> Result<Self> {
        let first = components
            .first()
            .ok_or_else(|| Error::InvalidArgument("vector field needs components".into()))?;
        let grid = *first.grid();
        if components.len() != grid.dim() {
            return Err(Error::DimMismatch {
                expected: grid.dim(),
                got: components.len(),
            });
        }
        if components.iter().any(|c| *c.grid() != grid) {
            return Err(Error::GridMismatch);
        }
        Ok(Self { components })
    }

    pub fn zeros(grid: Grid) -> Self {
        Self {
            components: (0..grid.dim()).map(|_| Field::zeros(grid)).collect(),
        }
    }

    /// Spatially uniform vector field.
    pub fn uniform(grid: Grid, value: &[f64]) -> Result<Self> {
        if value.len() != grid.dim() {
            return Err(Error::DimMismatch {
                expected: grid.dim(),
                got: value.len(),
            });
        }
        Ok(Self {
            components: value.iter().map(|&v| Field::constant(grid, v)).collect(),
        })
    }

    pub fn grid(&self) -> &Grid {
        self.components[0].grid()
    }

    pub fn components(&self) -> &[Field] {
        &self.components
    }

    pub fn component(&self, a: usize) -> &Field {
        &self.components[a]
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    /// Pointwise Euclidean magnitude.
    pub fn magnitude(&self) -> Field {
        let grid = *self.grid();
        let data = (0..grid.len())
            .map(|i| {
                self.components
                    .iter()
                    .map(|c| c.samples()[i].powi(2))
                    .sum::<f64>()
                    .sqrt()
            })
            .collect();
        Field::from_vec_unchecked(grid, data)
    }

    /// `sup_x |v(x)|` with the Euclidean norm of the vector.
    pub fn max_magnitude(&self) -> f64 {
        self.magnitude().max_abs()
    }

    /// Normalized `L²` norm `(mean Σ_a v_a²)^{1/2}`.
    pub fn l2_norm(&self) -> f64 {
        self.components
            .iter()
            .map(|c| c.norm(Exponent::finite(2)).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    pub fn sub(&self, other: &VectorField) -> Result<VectorField> {
        if self.dim() != other.dim() {
            return Err(Error::DimMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        let components = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.sub(b))
            .collect::<Result<Vec<_>>>()?;
        Ok(VectorField { components })
    }

    pub fn scale(&self, s: f64) -> VectorField {
        VectorField {
            components: self.components.iter().map(|c| c.scale(s)).collect(),
        }
    }

    /// `(1 - w) * self + w * other`.
    pub fn lerp(&self, other: &VectorField, w: f64) -> Result<VectorField> {
        let components = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.zip_with(b, |x, y| (1.0 - w) * x + w * y))
            .collect::<Result<Vec<_>>>()?;
        Ok(VectorField { components })
    }

    /// Pointwise `v · w` where `w` is a gradient-like vector field.
    pub fn dot(&self, other: &VectorField) -> Result<Field> {
        let grid = *self.grid();
        if other.grid() != &grid {
            return Err(Error::GridMismatch);
        }
        let mut out = vec![0.0; grid.len()];
        for (a, b) in self.components.iter().zip(&other.components) {
            for ((o, x), y) in out.iter_mut().zip(a.samples()).zip(b.samples()) {
                *o += x * y;
            }
        }
        Ok(Field::from_vec_unchecked(grid, out))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalized_norms_of_cosine() {
        let g = Grid::periodic(2, 64).unwrap();
        let f = Field::from_fn(g, |x| (3.0 * x[0]).cos());
        assert!((f.norm(Exponent::INFINITY) - 1.0).abs() < 1e-15);
        assert!((f.norm(Exponent::finite(2)) - 0.5f64.sqrt()).abs() < 1e-14);
        assert!((f.norm(Exponent::finite(1)) - 2.0 / std::f64::consts::PI).abs() < 1e-3);
    }

    #[test]
    fn rejects_non_finite() {
        let g = Grid::periodic(2, 8).unwrap();
        let mut v = vec![0.0; 64];
        v[5] = f64::NAN;
        assert_eq!(Field::new(g, v), Err(Error::NonFinite { index: 5 }));
    }

    #[test]
    fn exponent_range() {
        assert!(Exponent::new(0.5).is_err());
        assert_eq!(Exponent::INFINITY.reciprocal(), 0.0);
        assert_eq!(Exponent::finite(4).reciprocal(), 0.25);
    }
}
