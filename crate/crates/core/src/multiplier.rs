//! Fourier multipliers: derivatives, Riesz transforms, the fractional
//! Laplacian `Λ^α` and the 2/3 dealiasing filter.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{Field, VectorField};
use crate::grid::Grid;
use crate::spectral::{inverse, transform, SpectralField};

type Symbol<'a> = Box<dyn Fn([f64; 3]) -> Complex64 + Send + Sync + 'a>;

/// Scalar Fourier multiplier `k ↦ m(k)` with an explicit value at `k = 0`.
pub struct Multiplier<'a> {
    symbol: Symbol<'a>,
    value_at_zero: Complex64,
}

impl<'a> Multiplier<'a> {
    /// Multiplier vanishing at the mean mode.
    pub fn new(symbol: impl Fn([f64; 3]) -> Complex64 + Send + Sync + 'a) -> Self {
        Self {
            symbol: Box::new(symbol),
            value_at_zero: Complex64::new(0.0, 0.0),
        }
    }

    pub fn real(symbol: impl Fn([f64; 3]) -> f64 + Send + Sync + 'a) -> Self {
        Self::new(move |k| Complex64::new(symbol(k), 0.0))
    }

    pub fn with_value_at_zero(mut self, v: Complex64) -> Self {
        self.value_at_zero = v;
        self
    }

    pub fn identity() -> Multiplier<'static> {
        Multiplier::real(|_| 1.0).with_value_at_zero(Complex64::new(1.0, 0.0))
    }

    /// `i k_a`.
    pub fn derivative(axis: usize) -> Multiplier<'static> {
        Multiplier::new(move |k| Complex64::new(0.0, k[axis]))
    }

    /// Riesz transform `R_a = -i k_a / |k|`.
    pub fn riesz(axis: usize) -> Multiplier<'static> {
        Multiplier::new(move |k| Complex64::new(0.0, -k[axis] / norm(k)))
    }

    /// `|k|^α`.
    pub fn fractional_laplacian(alpha: f64) -> Multiplier<'static> {
        Multiplier::real(move |k| norm(k).powf(alpha))
    }

    pub fn eval(&self, k: [f64; 3]) -> Complex64 {
        if k == [0.0; 3] {
            self.value_at_zero
        } else {
            (self.symbol)(k)
        }
    }
}

pub(crate) fn norm(k: [f64; 3]) -> f64 {
    (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]).sqrt()
}

/// `out(k) = m(k) sf(k)`, followed by a Hermitian projection so that the
/// inverse transform is real.
pub fn apply_multiplier(sf: &SpectralField, m: &Multiplier) -> Result<SpectralField> {
    let grid = *sf.grid();
    let mut out = SpectralField::zeros(grid);
    for (i, (o, c)) in out.coeffs_mut().iter_mut().zip(sf.coeffs()).enumerate() {
        let k = grid.wavevector(i);
        let s = m.eval(k);
        if !(s.re.is_finite() && s.im.is_finite()) {
            return Err(Error::NonFiniteSymbol { k });
        }
        *o = s * c;
    }
    out.project_hermitian();
    Ok(out)
}

/// Applies one multiplier per output component.
pub fn apply_vector_multiplier(
    sf: &SpectralField,
    ms: &[Multiplier],
) -> Result<Vec<SpectralField>> {
    ms.iter().map(|m| apply_multiplier(sf, m)).collect()
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(0.0..=2.0).contains(&alpha) {
        return Err(Error::OutOfRange {
            name: "alpha",
            value: alpha,
            range: "[0, 2]",
        });
    }
    Ok(())
}

/// `Λ^α f`, annihilating the mean mode.
pub fn fractional_laplacian(f: &Field, alpha: f64) -> Result<Field> {
    check_alpha(alpha)?;
    let sf = transform(f)?;
    Ok(inverse(&apply_multiplier(
        &sf,
        &Multiplier::fractional_laplacian(alpha),
    )?))
}

/// Spectral gradient.
pub fn grad(f: &Field) -> Result<VectorField> {
    let sf = transform(f)?;
    grad_spectral(&sf)
}

pub fn grad_spectral(sf: &SpectralField) -> Result<VectorField> {
    let comps = (0..sf.grid().dim())
        .map(|a| apply_multiplier(sf, &Multiplier::derivative(a)).map(|s| inverse(&s)))
        .collect::<Result<Vec<_>>>()?;
    VectorField::new(comps)
}

/// Spectral divergence.
pub fn div(v: &VectorField) -> Result<Field> {
    let grid = *v.grid();
    let mut acc = SpectralField::zeros(grid);
    for (a, c) in v.components().iter().enumerate() {
        let d = apply_multiplier(&transform(c)?, &Multiplier::derivative(a))?;
        acc = acc.add(&d)?;
    }
    Ok(inverse(&acc))
}

/// `sup_x |∇f(x)|` (Euclidean norm of the gradient).
pub fn grad_linf(f: &Field) -> Result<f64> {
    Ok(grad(f)?.max_magnitude())
}

/// True when the mode survives the 2/3 rule (`|k_a| <= n/3` on every axis).
pub fn dealias_keeps(grid: &Grid, idx: usize) -> bool {
    let cut = grid.n() as f64 / 3.0;
    let m = grid.mode(idx);
    (0..grid.dim()).all(|a| (m[a].unsigned_abs() as f64) <= cut)
}

/// 2/3-rule filter: zero every mode with some `|k_a| > n/3`.
pub fn dealias(sf: &SpectralField) -> SpectralField {
    let grid = *sf.grid();
    let mut out = sf.clone();
    for (i, c) in out.coeffs_mut().iter_mut().enumerate() {
        if !dealias_keeps(&grid, i) {
            *c = Complex64::new(0.0, 0.0);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    fn g2(n: usize) -> Grid {
        Grid::periodic(2, n).unwrap()
    }

    #[test]
    fn identity_and_derivative() {
        let g = g2(32);
        let f = Field::from_fn(g, |x| (3.0 * x[0]).cos());
        let sf = transform(&f).unwrap();
        let id = inverse(&apply_multiplier(&sf, &Multiplier::identity()).unwrap());
        assert!(id.max_diff(&f).unwrap() < 1e-14);
        let d = inverse(&apply_multiplier(&sf, &Multiplier::derivative(0)).unwrap());
        let expect = Field::from_fn(g, |x| -3.0 * (3.0 * x[0]).sin());
        assert!(d.max_diff(&expect).unwrap() < 1e-13);
    }

    #[test]
    fn riesz_pair_composes_to_second_order_symbol() {
        let g = Grid::periodic(3, 16).unwrap();
        let f = corpus::random_smooth(g, 5.0, 1.0, 3);
        let sf = transform(&f).unwrap();
        let twice = apply_multiplier(
            &apply_multiplier(&sf, &Multiplier::riesz(0)).unwrap(),
            &Multiplier::riesz(2),
        )
        .unwrap();
        let direct = apply_multiplier(
            &sf,
            &Multiplier::real(|k| -k[0] * k[2] / (norm(k) * norm(k))),
        )
        .unwrap();
        let diff = inverse(&twice).max_diff(&inverse(&direct)).unwrap();
        assert!(diff < 1e-14, "{diff}");
    }

    #[test]
    fn fractional_laplacian_pure_modes() {
        let g = g2(64);
        let cases: [(fn([f64; 3]) -> f64, f64, f64); 3] = [
            (|x| x[0].cos(), 1.0, 1.0),
            (|x| (3.0 * x[0] + 4.0 * x[1]).cos(), 1.0, 5.0),
            (|x| (5.0 * x[0]).cos(), 2.0, 25.0),
        ];
        for (f, alpha, factor) in cases {
            let field = Field::from_fn(g, f);
            let out = fractional_laplacian(&field, alpha).unwrap();
            let diff = out.max_diff(&field.scale(factor)).unwrap();
            assert!(diff <= 1e-12 * factor, "alpha {alpha}: {diff}");
        }
    }

    #[test]
    fn alpha_two_is_minus_laplacian() {
        let g = g2(32);
        let f = corpus::random_smooth(g, 6.0, 1.0, 5);
        let lap = fractional_laplacian(&f, 2.0).unwrap();
        let gr = grad(&f).unwrap();
        let minus_div_grad = div(&gr).unwrap().scale(-1.0);
        assert!(lap.max_diff(&minus_div_grad).unwrap() < 1e-11);
    }

    #[test]
    fn alpha_out_of_range() {
        let f = Field::zeros(g2(8));
        assert!(matches!(
            fractional_laplacian(&f, 2.5),
            Err(Error::OutOfRange { .. })
        ));
        assert!(matches!(
            fractional_laplacian(&f, -0.1),
            Err(Error::OutOfRange { .. })
        ));
    }

    #[test]
    fn non_finite_symbol_is_rejected() {
        let sf = SpectralField::zeros(g2(8));
        let bad = Multiplier::real(|k| 1.0 / (k[0] - 1.0));
        assert!(matches!(
            apply_multiplier(&sf, &bad),
            Err(Error::NonFiniteSymbol { .. })
        ));
    }

    #[test]
    fn gradient_examples() {
        let g = Grid::periodic(3, 16).unwrap();
        let f = Field::from_fn(g, |x| (3.0 * x[0]).cos());
        let gr = grad(&f).unwrap();
        let expect = Field::from_fn(g, |x| -3.0 * (3.0 * x[0]).sin());
        assert!(gr.component(0).max_diff(&expect).unwrap() < 1e-13);
        assert!(gr.component(1).max_abs() < 1e-15 && gr.component(2).max_abs() < 1e-15);
        let c = grad(&Field::constant(g, 4.2)).unwrap();
        assert!(c.max_magnitude() < 1e-14);
    }

    #[test]
    fn dealias_rule() {
        let g = g2(64);
        let keep = |m: i64| dealias_keeps(&g, g.ravel([m.rem_euclid(64) as usize, 0, 0]));
        assert!(!keep(22));
        assert!(keep(21));
        assert!(!keep(-22));
        let f = corpus::random_smooth(g, 40.0, 1.0, 9);
        let sf = transform(&f).unwrap();
        let once = dealias(&sf);
        assert_eq!(dealias(&once), once);
    }

    #[test]
    fn laplacian_composition() {
        let g = Grid::periodic(3, 16).unwrap();
        let f = corpus::random_smooth(g, 6.0, 1.0, 8);
        let a = fractional_laplacian(&fractional_laplacian(&f, 0.7).unwrap(), 0.9).unwrap();
        let b = fractional_laplacian(&f, 1.6).unwrap();
        assert!(a.max_diff(&b).unwrap() <= 1e-10 * b.max_abs());
    }
}
