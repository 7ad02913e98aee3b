use crate::grid::Grid;

/// Smooth step `η(t) = ψ(t) / (ψ(t) + ψ(1 - t))` with `ψ(t) = exp(-1/t)`.
fn smooth_step(t: f64) -> f64 {
    let psi = |t: f64| if t > 0.0 { (-1.0 / t).exp() } else { 0.0 };
    let a = psi(t);
    let b = psi(1.0 - t);
    if a + b == 0.0 {
        0.0
    } else {
        a / (a + b)
    }
}

/// Radial Littlewood–Paley cutoffs.
///
/// `χ` equals 1 on `[0, 3/4]`, 0 on `[4/3, ∞)` and interpolates with a
/// `C^∞` monotone step in between. Blocks use `φ̂(r) = χ(r/2) - χ(r)` and
/// `φ̂_j(r) = φ̂(r / 2^j)`, supported in `[3/4·2^j, 8/3·2^j]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutoffFamily {
    pub j_min: i32,
    pub j_max: i32,
}

impl CutoffFamily {
    pub fn new(j_min: i32, j_max: i32) -> Self {
        assert!(j_min <= j_max, "empty dyadic range");
        Self { j_min, j_max }
    }

    /// Range covering every nonzero mode of the grid: `j_min = -1` holds
    /// `|k| = 1`, `j_max` is the last block reaching the corner mode.
    pub fn for_grid(grid: &Grid) -> Self {
        let kmin = grid.wavenumber_scale();
        let kmax = grid.max_wavenumber();
        let (lo, _) = Self::required_range(kmin, kmin);
        let (_, hi) = Self::required_range(kmax, kmax);
        Self::new(lo, hi)
    }

    pub fn chi(r: f64) -> f64 {
        if r <= 0.75 {
            1.0
        } else if r >= 4.0 / 3.0 {
            0.0
        } else {
            smooth_step((4.0 / 3.0 - r) / (7.0 / 12.0))
        }
    }

    pub fn phi_hat(r: f64) -> f64 {
        Self::chi(0.5 * r) - Self::chi(r)
    }

    pub fn phi_hat_j(&self, j: i32, r: f64) -> f64 {
        Self::phi_hat(r * 2f64.powi(-j))
    }

    /// Smallest and largest `j` whose block touches some `r ∈ [kmin, kmax]`.
    pub fn required_range(kmin: f64, kmax: f64) -> (i32, i32) {
        let lo = (3.0 * kmin / 8.0).log2().floor() as i32 + 1;
        let hi = (4.0 * kmax / 3.0).log2().ceil() as i32 - 1;
        (lo, hi)
    }

    pub fn indices(&self) -> impl Iterator<Item = i32> {
        self.j_min..=self.j_max
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chi_profile() {
        assert_eq!(CutoffFamily::chi(0.0), 1.0);
        assert_eq!(CutoffFamily::chi(0.75), 1.0);
        assert_eq!(CutoffFamily::chi(4.0 / 3.0), 0.0);
        assert_eq!(CutoffFamily::chi(10.0), 0.0);
        let mut last = 1.0;
        for i in 0..=1000 {
            let r = 0.7 + 0.7 * i as f64 / 1000.0;
            let c = CutoffFamily::chi(r);
            assert!(c <= last && (0.0..=1.0).contains(&c));
            last = c;
        }
    }

    #[test]
    fn phi_hat_support() {
        for i in 0..=4000 {
            let r = 4.0 * i as f64 / 4000.0;
            let v = CutoffFamily::phi_hat(r);
            if !(0.75..=8.0 / 3.0).contains(&r) {
                assert_eq!(v, 0.0, "r = {r}");
            }
            assert!(v >= 0.0);
        }
    }

    #[test]
    fn partition_of_unity_on_log_grid() {
        let cf = CutoffFamily::new(-8, 14);
        for i in 0..=2000 {
            let r = 2f64.powf(-6.0 + 18.0 * i as f64 / 2000.0);
            let s: f64 = cf.indices().map(|j| cf.phi_hat_j(j, r)).sum();
            assert!((s - 1.0).abs() <= 1e-12, "r = {r}, sum = {s}");
        }
    }

    #[test]
    fn block_of_three_is_one() {
        let cf = CutoffFamily::new(-1, 6);
        assert_eq!(cf.phi_hat_j(1, 3.0), 1.0);
        assert_eq!(cf.phi_hat_j(0, 3.0), 0.0);
        assert_eq!(cf.phi_hat_j(2, 3.0), 0.0);
        assert_eq!(cf.phi_hat_j(5, 48.0), 1.0);
    }

    #[test]
    fn grid_range() {
        let g = Grid::periodic(3, 64).unwrap();
        let cf = CutoffFamily::for_grid(&g);
        assert_eq!(cf.j_min, -1);
        // corner |k| = 32√3 ≈ 55.4 lies in block 6
        assert_eq!(cf.j_max, 6);
        assert_eq!(CutoffFamily::required_range(3.0, 3.0), (1, 1));
    }
}
