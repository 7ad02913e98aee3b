//! Real-space check of the Darcy velocity law in 3D:
//!
//! ```text
//! u(x) = −(2/3) θ(x) e₃ − (1/4π) P.V.∫ K(x − y) θ(y) dy,
//! K(x) = (3x₁x₃, 3x₂x₃, 2x₃² − x₁² − x₂²) / |x|⁵
//! ```
//!
//! The principal value is taken over spheres centred at `x`: with
//! `A(r) = ∫_{S²} K(ω)(θ(x − rω) − θ(x)) dω` the singular part becomes
//! `∫₀^R A(r)/r dr`, and `A(r) = O(r²)` because `K` has zero mean on the
//! sphere and is even. Each layer uses adaptive Gauss–Kronrod in the radius
//! and polar angle and the trapezoid rule in the azimuth.

use std::f64::consts::PI;

use crate::corpus::{mexican_hat, mexican_hat_field, periodic_offset};
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::quadrature::{integrate_vec, Tolerance};
use crate::velocity::velocity_from_theta_3d;

/// `K(ω)` for a unit vector `ω` (`K(x) = K(x/|x|)/|x|³`).
pub fn kernel_unit(w: [f64; 3]) -> [f64; 3] {
    [
        3.0 * w[0] * w[2],
        3.0 * w[1] * w[2],
        2.0 * w[2] * w[2] - w[0] * w[0] - w[1] * w[1],
    ]
}

/// Radial integration plan for one target.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialPlan {
    /// Truncation radius `R`.
    pub radius: f64,
    /// Radii where the integrand changes character.
    pub breaks: Vec<f64>,
    /// Direction toward the bulk of the source, used as the polar axis.
    pub pole: [f64; 3],
    /// Polar angles where the integrand changes character, as functions of r:
    /// `width / r` for each entry.
    pub polar_widths: Vec<f64>,
    pub azimuth_points: usize,
}

impl RadialPlan {
    pub fn new(radius: f64) -> Self {
        Self {
            radius,
            breaks: Vec::new(),
            pole: [0.0, 0.0, 1.0],
            polar_widths: Vec::new(),
            azimuth_points: 24,
        }
    }
}

fn normalize(v: [f64; 3]) -> Option<[f64; 3]> {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    (n > 0.0).then(|| [v[0] / n, v[1] / n, v[2] / n])
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn frame(pole: [f64; 3]) -> [[f64; 3]; 3] {
    let p = normalize(pole).unwrap_or([0.0, 0.0, 1.0]);
    let helper = if p[0].abs() < 0.9 {
        [1.0, 0.0, 0.0]
    } else {
        [0.0, 1.0, 0.0]
    };
    let e1 = normalize(cross(p, helper)).expect("independent");
    let e2 = cross(p, e1);
    [p, e1, e2]
}

/// `∫_{S²} K(ω) g(ω) dω` with `g(ω) = θ(x − rω) − θ(x)`.
fn sphere_layer<F: Fn([f64; 3]) -> f64>(
    theta: &F,
    x: [f64; 3],
    center_value: f64,
    r: f64,
    plan: &RadialPlan,
    axes: &[[f64; 3]; 3],
    tol: Tolerance,
) -> Result<[f64; 3]> {
    let m = plan.azimuth_points.max(4);
    let dphi = 2.0 * PI / m as f64;
    let [p, e1, e2] = *axes;
    let polar = |psi: f64| -> [f64; 3] {
        let (s, c) = psi.sin_cos();
        let mut acc = [0.0; 3];
        for k in 0..m {
            let (sp, cp) = (k as f64 * dphi).sin_cos();
            let mut w = [0.0; 3];
            for a in 0..3 {
                w[a] = c * p[a] + s * (cp * e1[a] + sp * e2[a]);
            }
            let y = [x[0] - r * w[0], x[1] - r * w[1], x[2] - r * w[2]];
            let g = theta(y) - center_value;
            let kv = kernel_unit(w);
            for a in 0..3 {
                acc[a] += kv[a] * g;
            }
        }
        [acc[0] * s * dphi, acc[1] * s * dphi, acc[2] * s * dphi]
    };
    let breaks: Vec<f64> = plan
        .polar_widths
        .iter()
        .map(|w| w / r)
        .filter(|&b| b < PI)
        .collect();
    Ok(integrate_vec(polar, 0.0, PI, &breaks, tol)?.0)
}

/// Velocity at `x` from a source given on all of ℝ³.
pub fn pv_velocity_at<F: Fn([f64; 3]) -> f64>(
    theta: &F,
    x: [f64; 3],
    plan: &RadialPlan,
    tol: f64,
) -> Result<[f64; 3]> {
    let t0 = theta(x);
    let axes = frame(plan.pole);
    let scale = plan
        .breaks
        .iter()
        .map(|&r| {
            theta([
                x[0] - r * axes[0][0],
                x[1] - r * axes[0][1],
                x[2] - r * axes[0][2],
            ])
            .abs()
        })
        .fold(t0.abs(), f64::max)
        .max(f64::MIN_POSITIVE);
    let inner = Tolerance::relative(0.0)
        .with_abs(0.01 * tol * scale)
        .with_max_intervals(400);
    let outer = Tolerance::relative(tol)
        .with_abs(tol * scale)
        .with_max_intervals(400);
    let failure = std::cell::Cell::new(None);
    let radial = |r: f64| -> [f64; 3] {
        match sphere_layer(theta, x, t0, r, plan, &axes, inner) {
            Ok(a) => [a[0] / r, a[1] / r, a[2] / r],
            Err(e) => {
                failure.set(Some(e));
                [f64::NAN; 3]
            }
        }
    };
    let result = integrate_vec(radial, 0.0, plan.radius, &plan.breaks, outer);
    if let Some(e) = failure.take() {
        return Err(e);
    }
    let (pv, _) = result?;
    let c = -1.0 / (4.0 * PI);
    Ok([c * pv[0], c * pv[1], c * pv[2] - 2.0 / 3.0 * t0])
}

/// Oracle velocity versus the multiplier velocity for a periodized
/// zero-mass bump.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelCheck {
    pub targets: Vec<usize>,
    pub oracle: Vec<[f64; 3]>,
    pub multiplier: Vec<[f64; 3]>,
    /// `‖u_oracle − u_multiplier‖₂ / ‖u_multiplier‖₂` over the targets.
    pub relative_l2: f64,
}

/// Compares both routes for `(3 − r²/σ²) e^{−r²/2σ²}` centred at `center`,
/// on every `stride`-th grid point per axis.
///
/// The bump has zero mass and is radial, so its Newtonian potential vanishes
/// outside its (numerical) support: periodic images do not interact and the
/// ℝ³ integral of the nearest image equals the periodic velocity.
pub fn bump_kernel_check(
    grid: &Grid,
    center: [f64; 3],
    sigma: f64,
    stride: usize,
    tol: f64,
) -> Result<KernelCheck> {
    if grid.dim() != 3 {
        return Err(Error::DimMismatch {
            expected: 3,
            got: grid.dim(),
        });
    }
    if stride == 0 {
        return Err(Error::InvalidArgument("stride must be positive".into()));
    }
    if 12.0 * sigma > grid.period() {
        return Err(Error::InvalidArgument(
            "bump is not localized within one period".into(),
        ));
    }
    let field = mexican_hat_field(*grid, center, sigma);
    let u = velocity_from_theta_3d(&field)?;
    let source = |y: [f64; 3]| mexican_hat(y, [0.0; 3], sigma);
    let n = grid.n();
    let mut targets = Vec::new();
    for i in (0..n).step_by(stride) {
        for j in (0..n).step_by(stride) {
            for k in (0..n).step_by(stride) {
                targets.push(grid.ravel([i, j, k]));
            }
        }
    }
    let mut oracle = Vec::with_capacity(targets.len());
    let mut multiplier = Vec::with_capacity(targets.len());
    let (mut num, mut den) = (0.0, 0.0);
    for &idx in &targets {
        // Source centred at the origin; the target is the nearest image.
        let x = periodic_offset(grid, grid.coords(idx), center);
        let d = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
        let mut plan = RadialPlan::new(d + 10.0 * sigma);
        plan.pole = if d > 0.0 { x } else { [0.0, 0.0, 1.0] };
        plan.breaks = [-4.0, -2.0, -1.0, 0.0, 1.0, 2.0, 4.0]
            .iter()
            .map(|k| d + k * sigma)
            .filter(|&r| r > 0.0)
            .collect();
        plan.polar_widths = vec![sigma, 3.0 * sigma];
        let uo = pv_velocity_at(&source, x, &plan, tol)?;
        let um = [
            u.component(0).samples()[idx],
            u.component(1).samples()[idx],
            u.component(2).samples()[idx],
        ];
        for a in 0..3 {
            num += (uo[a] - um[a]).powi(2);
            den += um[a] * um[a];
        }
        oracle.push(uo);
        multiplier.push(um);
    }
    let relative_l2 = if den == 0.0 {
        num.sqrt()
    } else {
        (num / den).sqrt()
    };
    Ok(KernelCheck {
        targets,
        oracle,
        multiplier,
        relative_l2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::gauss_legendre;

    #[test]
    fn kernel_has_zero_sphere_mean() {
        let rule = gauss_legendre(24);
        let m = 48;
        let mut acc = [0.0; 3];
        for &(c, w) in &rule {
            let s = (1.0 - c * c).sqrt();
            for k in 0..m {
                let phi = 2.0 * PI * k as f64 / m as f64;
                let kv = kernel_unit([s * phi.cos(), s * phi.sin(), c]);
                for a in 0..3 {
                    acc[a] += kv[a] * w * 2.0 * PI / m as f64;
                }
            }
        }
        for v in acc {
            assert!(v.abs() < 1e-13, "{v}");
        }
    }

    #[test]
    fn stratified_gives_zero() {
        let theta = |y: [f64; 3]| y[2].sin();
        let mut plan = RadialPlan::new(40.0 * PI);
        plan.breaks = (1..40).map(|k| k as f64 * PI).collect();
        plan.azimuth_points = 8;
        let u = pv_velocity_at(&theta, [0.3, -0.2, 0.7], &plan, 1e-6).unwrap();
        for v in u {
            assert!(v.abs() < 5e-3, "{u:?}");
        }
    }

    #[test]
    fn single_target_matches_multiplier() {
        let g = Grid::periodic(3, 32).unwrap();
        let check = bump_kernel_check(&g, [PI, PI, PI], 0.45, 16, 1e-7).unwrap();
        assert_eq!(check.targets.len(), 8);
        assert!(check.relative_l2 < 1e-2, "{}", check.relative_l2);
    }
}
