use crate::error::Result;
use crate::field::Field;
use crate::lp::{decompose, CutoffFamily};

/// Bony decomposition `f g = T_g f + T_f g + R(f, g)` of mean-free fields.
#[derive(Debug, Clone)]
pub struct Paraproduct {
    /// `T_g f = Σ_j S_{j-1} g Δ_j f`
    pub low_g_high_f: Field,
    /// `T_f g = Σ_j S_{j-1} f Δ_j g`
    pub low_f_high_g: Field,
    /// `R(f, g) = Σ_{|i-j| <= 1} Δ_i g Δ_j f`
    pub resonant: Field,
}

impl Paraproduct {
    pub fn sum(&self) -> Field {
        self.low_g_high_f
            .add(&self.low_f_high_g)
            .and_then(|s| s.add(&self.resonant))
            .expect("terms share a grid")
    }
}

fn accumulate(acc: &mut [f64], a: &Field, b: &Field) {
    for ((o, x), y) in acc.iter_mut().zip(a.samples()).zip(b.samples()) {
        *o += x * y;
    }
}

/// Bony paraproduct of `f` and `g`. The means of the inputs are dropped, so
/// the terms add up to `(f - f̄)(g - ḡ)`. Products are pointwise on the grid.
pub fn paraproduct(f: &Field, g: &Field, cf: &CutoffFamily) -> Result<Paraproduct> {
    f.check_grid(g)?;
    let grid = *f.grid();
    let df = decompose(f, cf)?;
    let dg = decompose(g, cf)?;
    let mut tgf = vec![0.0; grid.len()];
    let mut tfg = vec![0.0; grid.len()];
    let mut res = vec![0.0; grid.len()];
    for j in cf.indices() {
        let fj = df.block(j);
        let gj = dg.block(j);
        accumulate(&mut tgf, &dg.low_pass(j - 1), &fj);
        accumulate(&mut tfg, &df.low_pass(j - 1), &gj);
        for i in (j - 1)..=(j + 1) {
            if i >= cf.j_min && i <= cf.j_max {
                accumulate(&mut res, &dg.block(i), &fj);
            }
        }
    }
    Ok(Paraproduct {
        low_g_high_f: Field::new(grid, tgf)?,
        low_f_high_g: Field::new(grid, tfg)?,
        resonant: Field::new(grid, res)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::grid::Grid;

    #[test]
    fn separated_blocks() {
        let g = Grid::periodic(2, 128).unwrap();
        let cf = CutoffFamily::for_grid(&g);
        let f = Field::from_fn(g, |x| (3.0 * x[0]).cos());
        let h = Field::from_fn(g, |x| (48.0 * x[0]).cos());
        let p = paraproduct(&f, &h, &cf).unwrap();
        let fh = f.mul(&h).unwrap();
        assert!(p.low_g_high_f.max_abs() < 1e-13);
        assert!(p.resonant.max_abs() < 1e-13);
        assert!(p.low_f_high_g.max_diff(&fh).unwrap() < 1e-13);
    }

    #[test]
    fn same_block_is_resonant() {
        let g = Grid::periodic(2, 64).unwrap();
        let cf = CutoffFamily::for_grid(&g);
        let f = Field::from_fn(g, |x| (3.0 * x[0]).cos());
        let p = paraproduct(&f, &f, &cf).unwrap();
        assert!(p.low_g_high_f.max_abs() < 1e-14);
        assert!(p.low_f_high_g.max_abs() < 1e-14);
        assert!(p.resonant.max_diff(&f.mul(&f).unwrap()).unwrap() < 1e-14);
    }

    #[test]
    fn telescopes_to_the_product() {
        let g = Grid::periodic(3, 16).unwrap();
        let cf = CutoffFamily::for_grid(&g);
        let f = corpus::random_smooth(g, 8.0, 1.0, 1);
        let h = corpus::random_smooth(g, 8.0, 1.0, 2);
        let p = paraproduct(&f, &h, &cf).unwrap();
        let prod = f.mul(&h).unwrap();
        assert!(p.sum().max_diff(&prod).unwrap() <= 1e-10 * prod.max_abs());
    }

    #[test]
    fn grid_mismatch() {
        let a = Field::zeros(Grid::periodic(2, 8).unwrap());
        let b = Field::zeros(Grid::periodic(2, 16).unwrap());
        let cf = CutoffFamily::new(-1, 4);
        assert!(paraproduct(&a, &b, &cf).is_err());
    }
}
