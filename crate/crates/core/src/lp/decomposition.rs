use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::grid::Grid;
use crate::lp::CutoffFamily;
use crate::multiplier::norm;
use crate::spectral::{inverse, transform, SpectralField};

/// Spectral threshold below which a coefficient counts as absent when
/// checking that the dyadic range covers a field.
const COVER_THRESHOLD: f64 = 1e-13;

/// Homogeneous Littlewood–Paley blocks `Δ_j f` of a field, plus its mean.
///
/// `f = mean + Σ_j Δ_j f`. The low-frequency cut-off is
/// `S_j f = Σ_{j' <= j-1} Δ_{j'} f`.
#[derive(Debug, Clone)]
pub struct LpDecomposition {
    grid: Grid,
    cutoff: CutoffFamily,
    mean: f64,
    blocks: BTreeMap<i32, Field>,
}

fn block_spectrum(sf: &SpectralField, cf: &CutoffFamily, j: i32) -> SpectralField {
    let grid = *sf.grid();
    let mut out = sf.clone();
    for (i, c) in out.coeffs_mut().iter_mut().enumerate() {
        *c *= if i == 0 {
            0.0
        } else {
            cf.phi_hat_j(j, norm(grid.wavevector(i)))
        };
    }
    out
}

/// Decomposes `f` into dyadic blocks; fails when `cf` misses part of the
/// spectrum of `f`.
pub fn decompose(f: &Field, cf: &CutoffFamily) -> Result<LpDecomposition> {
    let sf = transform(f)?;
    decompose_spectral(&sf, cf)
}

pub fn decompose_spectral(sf: &SpectralField, cf: &CutoffFamily) -> Result<LpDecomposition> {
    let grid = *sf.grid();
    let scale = sf.coeffs().iter().map(|c| c.norm()).fold(0.0, f64::max);
    if let Some((lo, hi)) = sf.spectral_extent(COVER_THRESHOLD * scale.max(f64::MIN_POSITIVE)) {
        let (need_min, need_max) = CutoffFamily::required_range(lo, hi);
        if need_min < cf.j_min || need_max > cf.j_max {
            return Err(Error::DyadicRange {
                j_min: cf.j_min,
                j_max: cf.j_max,
                need_min,
                need_max,
            });
        }
    }
    let blocks = cf
        .indices()
        .map(|j| (j, inverse(&block_spectrum(sf, cf, j))))
        .collect();
    Ok(LpDecomposition {
        grid,
        cutoff: *cf,
        mean: sf.mean(),
        blocks,
    })
}

impl LpDecomposition {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn cutoff(&self) -> &CutoffFamily {
        &self.cutoff
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// `Δ_j f`; zero outside the stored range.
    pub fn block(&self, j: i32) -> Field {
        self.blocks
            .get(&j)
            .cloned()
            .unwrap_or_else(|| Field::zeros(self.grid))
    }

    pub fn blocks(&self) -> impl Iterator<Item = (i32, &Field)> {
        self.blocks.iter().map(|(j, f)| (*j, f))
    }

    /// `S_j f = Σ_{j' <= j-1} Δ_{j'} f` (mean excluded).
    pub fn low_pass(&self, j: i32) -> Field {
        let mut acc = vec![0.0; self.grid.len()];
        for (_, b) in self.blocks.range(..j) {
            for (a, v) in acc.iter_mut().zip(b.samples()) {
                *a += v;
            }
        }
        Field::from_vec_unchecked(self.grid, acc)
    }

    /// `mean + Σ_j Δ_j f`.
    pub fn reconstruct(&self) -> Field {
        let last = self.cutoff.j_max + 1;
        self.low_pass(last).map(|v| v + self.mean)
    }

    /// Indices of blocks whose sup norm exceeds `tol`.
    pub fn active(&self, tol: f64) -> Vec<i32> {
        self.blocks
            .iter()
            .filter(|(_, b)| b.max_abs() > tol)
            .map(|(j, _)| *j)
            .collect()
    }
}

/// `Δ_j f` for a single block.
pub fn block(f: &Field, cf: &CutoffFamily, j: i32) -> Result<Field> {
    let sf = transform(f)?;
    Ok(inverse(&block_spectrum(&sf, cf, j)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn single_mode_lives_in_one_block() {
        let g = Grid::periodic(2, 64).unwrap();
        let f = Field::from_fn(g, |x| (3.0 * x[0]).cos());
        let d = decompose(&f, &CutoffFamily::for_grid(&g)).unwrap();
        assert_eq!(d.active(1e-14), vec![1]);
        assert!(d.block(1).max_diff(&f).unwrap() < 1e-14);
    }

    #[test]
    fn two_modes_two_blocks() {
        let g = Grid::periodic(2, 128).unwrap();
        let f = Field::from_fn(g, |x| (3.0 * x[0]).cos() + (48.0 * x[0]).cos());
        let d = decompose(&f, &CutoffFamily::for_grid(&g)).unwrap();
        assert_eq!(d.active(1e-13), vec![1, 5]);
    }

    #[test]
    fn reconstruction() {
        for dim in [2, 3] {
            let g = Grid::periodic(dim, 32).unwrap();
            let f = corpus::random_smooth(g, 14.0, 1.0, 21).map(|v| v + 0.3);
            let d = decompose(&f, &CutoffFamily::for_grid(&g)).unwrap();
            assert!(d.reconstruct().max_diff(&f).unwrap() <= 1e-11 * f.max_abs());
        }
    }

    #[test]
    fn narrow_range_is_rejected_with_required_range() {
        let g = Grid::periodic(2, 64).unwrap();
        let f = Field::from_fn(g, |x| (3.0 * x[0]).cos() + (20.0 * x[1]).cos());
        match decompose(&f, &CutoffFamily::new(0, 2)) {
            Err(Error::DyadicRange {
                need_min, need_max, ..
            }) => {
                assert_eq!((need_min, need_max), (1, 4));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn blocks_have_shell_support() {
        let g = Grid::periodic(2, 64).unwrap();
        let f = corpus::random_smooth(g, 30.0, 1.0, 2);
        let cf = CutoffFamily::for_grid(&g);
        let d = decompose(&f, &cf).unwrap();
        for (j, b) in d.blocks() {
            let sf = transform(b).unwrap();
            if let Some((lo, hi)) = sf.spectral_extent(1e-15) {
                let s = 2f64.powi(j);
                assert!(
                    lo >= 0.75 * s - 1e-12 && hi <= 8.0 / 3.0 * s + 1e-12,
                    "j={j} [{lo},{hi}]"
                );
            }
        }
    }
}
