//! Globally adaptive Gauss–Kronrod (G7/K15) quadrature.

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

/// Stopping rule for [`integrate`].
#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_intervals: usize,
}

impl Tolerance {
    pub fn relative(rel: f64) -> Self {
        Self {
            abs: 0.0,
            rel,
            max_intervals: 2000,
        }
    }

    pub fn with_abs(mut self, abs: f64) -> Self {
        self.abs = abs;
        self
    }

    pub fn with_max_intervals(mut self, m: usize) -> Self {
        self.max_intervals = m;
        self
    }

    fn target(&self, value: f64) -> f64 {
        self.abs.max(self.rel * value.abs())
    }
}

#[derive(Debug, Clone, Copy)]
struct Piece<const N: usize> {
    a: f64,
    b: f64,
    value: [f64; N],
    error: f64,
}

fn kronrod<const N: usize, F: Fn(f64) -> [f64; N]>(f: &F, a: f64, b: f64) -> ([f64; N], f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut fv = [[0.0; N]; 15];
    fv[7] = f(c);
    for j in 0..7 {
        let x = h * XGK[j];
        fv[j] = f(c - x);
        fv[14 - j] = f(c + x);
    }
    let mut value = [0.0; N];
    let mut worst = 0.0f64;
    for n in 0..N {
        let mut k = fv[7][n] * WGK[7];
        let mut g = fv[7][n] * WG[3];
        for j in 0..7 {
            let pair = fv[j][n] + fv[14 - j][n];
            k += WGK[j] * pair;
            if j % 2 == 1 {
                g += WG[j / 2] * pair;
            }
        }
        let mean = 0.5 * k;
        let mut asc = WGK[7] * (fv[7][n] - mean).abs();
        for j in 0..7 {
            asc += WGK[j] * ((fv[j][n] - mean).abs() + (fv[14 - j][n] - mean).abs());
        }
        asc *= h.abs();
        let mut err = ((k - g) * h).abs();
        if asc != 0.0 && err != 0.0 {
            err = asc * (200.0 * err / asc).powf(1.5).min(1.0);
        }
        value[n] = k * h;
        worst = worst.max(err.max(50.0 * f64::EPSILON * value[n].abs()));
    }
    (value, worst)
}

fn magnitude<const N: usize>(v: &[f64; N]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

/// Integrates `f` over `[a, b]`, splitting first at `breaks` (points inside
/// the interval where `f` is not smooth). Endpoints are never evaluated.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    tol: Tolerance,
) -> Result<Integral> {
    let (value, error, evaluations) = adapt(|x| [f(x)], a, b, breaks, tol)?;
    Ok(Integral {
        value: value[0],
        error,
        evaluations,
    })
}

/// Vector-valued version of [`integrate`]; the error of a piece is the
/// largest component error and the tolerance applies to the largest
/// component of the total.
pub fn integrate_vec<const N: usize, F: Fn(f64) -> [f64; N]>(
    f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    tol: Tolerance,
) -> Result<([f64; N], f64)> {
    let (value, error, _) = adapt(f, a, b, breaks, tol)?;
    Ok((value, error))
}

fn adapt<const N: usize, F: Fn(f64) -> [f64; N]>(
    f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    tol: Tolerance,
) -> Result<([f64; N], f64, usize)> {
    if a == b {
        return Ok(([0.0; N], 0.0, 0));
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let mut cuts: Vec<f64> = breaks
        .iter()
        .cloned()
        .filter(|&x| x > lo && x < hi)
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut edges = vec![lo];
    edges.extend(cuts);
    edges.push(hi);

    let mut pieces: Vec<Piece<N>> = edges
        .windows(2)
        .map(|w| {
            let (value, error) = kronrod(&f, w[0], w[1]);
            Piece {
                a: w[0],
                b: w[1],
                value,
                error,
            }
        })
        .collect();
    let mut evaluations = 15 * pieces.len();

    loop {
        let mut value = [0.0; N];
        for p in &pieces {
            for n in 0..N {
                value[n] += p.value[n];
            }
        }
        let error: f64 = pieces.iter().map(|p| p.error).sum();
        let size = magnitude(&value);
        // requests below the rounding level of the piece sums are met at that level
        let floor = 100.0 * f64::EPSILON * pieces.iter().map(|p| magnitude(&p.value)).sum::<f64>();
        if !size.is_finite() {
            return Err(Error::Quadrature {
                estimate: f64::INFINITY,
                tol: tol.target(0.0),
            });
        }
        if error <= tol.target(size).max(floor) {
            for v in value.iter_mut() {
                *v *= sign;
            }
            return Ok((value, error, evaluations));
        }
        if pieces.len() >= tol.max_intervals {
            return Err(Error::Quadrature {
                estimate: error,
                tol: tol.target(size),
            });
        }
        let (worst, _) = pieces
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .expect("non-empty");
        let p = pieces.swap_remove(worst);
        let mid = 0.5 * (p.a + p.b);
        if mid <= p.a || mid >= p.b {
            // interval below floating-point resolution
            return Err(Error::Quadrature {
                estimate: error,
                tol: tol.target(size),
            });
        }
        for (a, b) in [(p.a, mid), (mid, p.b)] {
            let (value, error) = kronrod(&f, a, b);
            pieces.push(Piece { a, b, value, error });
        }
        evaluations += 30;
    }
}

/// Fixed Gauss–Legendre rule of `m` nodes on `[-1, 1]` (Newton on `P_m`).
pub fn gauss_legendre(m: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(m);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=m {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = m as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact() {
        let r = integrate(
            |x| x.powi(5) - 3.0 * x * x,
            0.0,
            2.0,
            &[],
            Tolerance::relative(1e-14),
        )
        .unwrap();
        assert!((r.value - (64.0 / 6.0 - 8.0)).abs() < 1e-13);
    }

    #[test]
    fn endpoint_singularity() {
        // ∫_0^1 ln(x) dx = -1
        let r = integrate(|x| x.ln(), 0.0, 1.0, &[], Tolerance::relative(1e-11)).unwrap();
        assert!((r.value + 1.0).abs() < 1e-10, "{r:?}");
        // ∫_0^1 x^{-1/2} dx = 2
        let r = integrate(|x| x.powf(-0.5), 0.0, 1.0, &[], Tolerance::relative(1e-10)).unwrap();
        assert!((r.value - 2.0).abs() < 1e-9, "{r:?}");
    }

    #[test]
    fn kink_with_break() {
        let r = integrate(
            |x: f64| x.min(1.0),
            0.0,
            3.0,
            &[1.0],
            Tolerance::relative(1e-14),
        )
        .unwrap();
        assert!((r.value - 2.5).abs() < 1e-14);
        assert!(r.evaluations <= 30);
    }

    #[test]
    fn reversed_limits() {
        let r = integrate(|x| x.exp(), 1.0, 0.0, &[], Tolerance::relative(1e-13)).unwrap();
        assert!((r.value + (1f64.exp() - 1.0)).abs() < 1e-13);
    }

    #[test]
    fn divergent_integral_reports_failure() {
        let r = integrate(
            |x| 1.0 / x,
            0.0,
            1.0,
            &[],
            Tolerance::relative(1e-10).with_max_intervals(200),
        );
        assert!(matches!(r, Err(Error::Quadrature { .. })));
    }

    #[test]
    fn gauss_legendre_weights() {
        for m in [4, 9, 16] {
            let rule = gauss_legendre(m);
            let total: f64 = rule.iter().map(|p| p.1).sum();
            assert!((total - 2.0).abs() < 1e-13);
            let x4: f64 = rule.iter().map(|(x, w)| w * x.powi(4)).sum();
            assert!((x4 - 0.4).abs() < 1e-13);
        }
    }
}
