use std::f64::consts::PI;

use super::modulus::GenericModulus;
use crate::error::{Error, Result};
use crate::quadrature::{integrate, Tolerance};

/// Default relative quadrature tolerance for the modulus integrals.
pub const DEFAULT_TOL: f64 = 1e-10;

fn tolerance(tol: f64) -> Tolerance {
    Tolerance::relative(tol).with_max_intervals(4000)
}

/// Decade points strictly inside `(a, b)` plus the given extras.
fn breaks(a: f64, b: f64, extra: impl IntoIterator<Item = f64>) -> Vec<f64> {
    let mut out: Vec<f64> = extra.into_iter().filter(|&x| x > a && x < b).collect();
    if a > 0.0 {
        let mut x = 10f64.powf(a.log10().ceil());
        while x < b {
            if x > a {
                out.push(x);
            }
            x *= 10.0;
        }
    } else {
        // Geometric refinement toward an integrable endpoint singularity at 0.
        let mut x = b;
        for _ in 0..12 {
            x *= 0.1;
            out.push(x);
        }
    }
    out
}

fn check_xi(xi: f64) -> Result<()> {
    if !(xi > 0.0 && xi.is_finite()) {
        return Err(Error::OutOfRange {
            name: "xi",
            value: xi,
            range: "(0, inf)",
        });
    }
    Ok(())
}

/// `∫₀^ξ ω(s)/s · w(s) ds`.
fn head(omega: &GenericModulus, xi: f64, tol: f64, weight: impl Fn(f64) -> f64) -> Result<f64> {
    let f = |s: f64| omega.value(s) / s * weight(s);
    let b = breaks(0.0, xi, omega.kinks().iter().cloned());
    Ok(integrate(f, 0.0, xi, &b, tolerance(tol))?.value)
}

/// `ξ∫_ξ^∞ ω(s)/s² · w(s) ds = ∫₀¹ ω(ξ/u) w(ξ/u) du`.
fn tail(omega: &GenericModulus, xi: f64, tol: f64, weight: impl Fn(f64) -> f64) -> Result<f64> {
    omega.check_sublinear(xi)?;
    let f = |u: f64| {
        let s = xi / u;
        omega.value(s) * weight(s)
    };
    let kinks = omega.kinks().iter().filter(|&&k| k > xi).map(|k| xi / k);
    let b = breaks(0.0, 1.0, kinks);
    Ok(integrate(f, 0.0, 1.0, &b, tolerance(tol))?.value)
}

/// `ξ∫_a^b ω(s)/s² · w(s) ds` for finite `ξ ≤ a < b ≤ ∞`.
pub(crate) fn tail_between(
    omega: &GenericModulus,
    xi: f64,
    a: f64,
    b: f64,
    tol: f64,
    weight: impl Fn(f64) -> f64,
) -> Result<f64> {
    let (ua, ub) = (xi / b, xi / a);
    let f = |u: f64| {
        let s = xi / u;
        omega.value(s) * weight(s)
    };
    let kinks = omega
        .kinks()
        .iter()
        .filter(|&&k| k > a && k < b)
        .map(|k| xi / k);
    let brk = breaks(ua.max(0.0), ub, kinks);
    Ok(integrate(f, ua, ub, &brk, tolerance(tol))?.value)
}

pub(crate) fn head_between(
    omega: &GenericModulus,
    a: f64,
    b: f64,
    tol: f64,
    weight: impl Fn(f64) -> f64,
) -> Result<f64> {
    let f = |s: f64| omega.value(s) / s * weight(s);
    let brk = breaks(a, b, omega.kinks().iter().cloned());
    Ok(integrate(f, a, b, &brk, tolerance(tol))?.value)
}

/// `Ω₁(ξ) = ∫₀^ξ ω(s)/s ds + ξ∫_ξ^∞ ω(s)/s² ds` (constant `A = 1`).
pub fn riesz_modulus_omega1(omega: &GenericModulus, xi: f64, tol: f64) -> Result<f64> {
    check_xi(xi)?;
    Ok(head(omega, xi, tol, |_| 1.0)? + tail(omega, xi, tol, |_| 1.0)?)
}

/// `Ω(ξ) = ∫₀^ξ ω(s)/s log(eξ/s) ds + ξ∫_ξ^∞ ω(s)/s² log(es/ξ) ds`
/// (constant `C = 1`).
pub fn double_riesz_modulus_omega(omega: &GenericModulus, xi: f64, tol: f64) -> Result<f64> {
    check_xi(xi)?;
    let h = head(omega, xi, tol, |s| 1.0 + (xi / s).ln())?;
    let t = tail(omega, xi, tol, |s| 1.0 + (s / xi).ln())?;
    Ok(h + t)
}

/// Applies the `Ω₁` kernel to `η ↦ Ω₁(η)`.
///
/// Composing the kernel `min(1, ξ/s)/s` with itself gives
/// `(2 + |log(ξ/s)|)·min(1, ξ/s)/s`, so the result equals `Ω(ξ) + Ω₁(ξ)`.
pub fn iterated_omega1(omega: &GenericModulus, xi: f64, tol: f64) -> Result<f64> {
    check_xi(xi)?;
    let inner_tol = tol * 1e-2;
    let inner = |eta: f64| riesz_modulus_omega1(omega, eta, inner_tol).unwrap_or(f64::NAN);
    let kinks: Vec<f64> = omega.kinks().to_vec();
    let h = integrate(
        |s: f64| inner(s) / s,
        0.0,
        xi,
        &breaks(0.0, xi, kinks.iter().cloned()),
        tolerance(tol),
    )?
    .value;
    let tk = kinks.iter().filter(|&&k| k > xi).map(|k| xi / k);
    let t = integrate(
        |u: f64| inner(xi / u),
        0.0,
        1.0,
        &breaks(0.0, 1.0, tk),
        tolerance(tol),
    )?
    .value;
    let out = h + t;
    if !out.is_finite() {
        return Err(Error::Quadrature { estimate: out, tol });
    }
    Ok(out)
}

/// The two parts of the dissipation integral, each without the `ν/π` factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dissipation {
    /// `∫₀^{ξ/2} (ω(ξ+2s) + ω(ξ−2s) − 2ω(ξ))/s² ds`.
    pub near: f64,
    /// `∫_{ξ/2}^∞ (ω(2s+ξ) − ω(2s−ξ) − 2ω(ξ))/s² ds`.
    pub far: f64,
}

impl Dissipation {
    pub fn total(&self, nu: f64) -> f64 {
        nu / PI * (self.near + self.far)
    }
}

fn at_kink(omega: &GenericModulus, xi: f64) -> bool {
    omega.kinks().iter().any(|&k| (k - xi).abs() <= 1e-14 * xi)
}

/// Both dissipation integrals. A concave kink exactly at `ξ` makes the
/// near integral diverge to `−∞`.
pub fn dissipation_parts(omega: &GenericModulus, xi: f64, tol: f64) -> Result<Dissipation> {
    check_xi(xi)?;
    omega.check_concave(xi * 1e-3, xi * 1e3, 97)?;
    let w = |s: f64| omega.value(s);
    let dw = |s: f64| omega.derivative(s);
    let scale = w(xi) / xi;
    let tl = tolerance(tol).with_abs(tol * scale * 1e-2);

    // Integrating by parts removes the second-difference cancellation at s → 0:
    // ∫ D/s² = −D(ξ/2)·2/ξ + ∫ D′(s)/s ds with D(s) = ω(ξ+2s) + ω(ξ−2s) − 2ω(ξ).
    let near = if at_kink(omega, xi) {
        f64::NEG_INFINITY
    } else {
        let boundary = -(w(2.0 * xi) - 2.0 * w(xi)) * 2.0 / xi;
        let kinks = omega.kinks().iter().map(|&k| (k - xi).abs() / 2.0);
        let brk = breaks(0.0, xi / 2.0, kinks);
        let f = |s: f64| 2.0 * (dw(xi + 2.0 * s) - dw(xi - 2.0 * s)) / s;
        boundary + integrate(f, 0.0, xi / 2.0, &brk, tl)?.value
    };

    // s = ξ/(2u) maps (ξ/2, ∞) onto (0, 1).
    let n = |s: f64| w(2.0 * s + xi) - w(2.0 * s - xi) - 2.0 * w(xi);
    let kinks = omega
        .kinks()
        .iter()
        .flat_map(|&k| [(k - xi) / 2.0, (k + xi) / 2.0])
        .filter(|&s| s > xi / 2.0)
        .map(|s| xi / (2.0 * s));
    let brk = breaks(0.0, 1.0, kinks);
    let far = 2.0 / xi * integrate(|u: f64| n(xi / (2.0 * u)), 0.0, 1.0, &brk, tl)?.value;
    Ok(Dissipation { near, far })
}

/// `J(ξ) = (ν/π)[near + far]`.
pub fn dissipation_j(omega: &GenericModulus, xi: f64, nu: f64, tol: f64) -> Result<f64> {
    if !(nu > 0.0) {
        return Err(Error::OutOfRange {
            name: "nu",
            value: nu,
            range: "(0, inf)",
        });
    }
    Ok(dissipation_parts(omega, xi, tol)?.total(nu))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moc::ModulusKNV;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn omega1_closed_forms() {
        let w = GenericModulus::min_linear(1.0);
        assert!(rel(riesz_modulus_omega1(&w, 1.0, DEFAULT_TOL).unwrap(), 2.0) < 1e-8);
        let expect = 0.1 * (2.0 + 10f64.ln());
        assert!(rel(riesz_modulus_omega1(&w, 0.1, DEFAULT_TOL).unwrap(), expect) < 1e-8);
    }

    #[test]
    fn omega_closed_form() {
        let w = GenericModulus::min_linear(1.0);
        assert!(
            rel(
                double_riesz_modulus_omega(&w, 1.0, DEFAULT_TOL).unwrap(),
                4.0
            ) < 1e-8
        );
    }

    #[test]
    fn linear_tail_rejected() {
        let w = GenericModulus::linear();
        assert!(riesz_modulus_omega1(&w, 1.0, DEFAULT_TOL).is_err());
    }

    #[test]
    fn linear_has_zero_dissipation() {
        let w = GenericModulus::linear();
        for &xi in &[1e-3, 1.0, 50.0] {
            assert!(dissipation_j(&w, xi, 1.0, DEFAULT_TOL).unwrap().abs() < 1e-14);
        }
    }

    #[test]
    fn kink_diverges() {
        let m = ModulusKNV::new(0.01, 1e-3).unwrap().generic();
        assert_eq!(
            dissipation_j(&m, 0.01, 1.0, DEFAULT_TOL).unwrap(),
            f64::NEG_INFINITY
        );
    }

    #[test]
    fn convex_rejected() {
        let w = GenericModulus::new(|s| s * s, |s| 2.0 * s);
        assert!(matches!(
            dissipation_j(&w, 1.0, 1.0, DEFAULT_TOL),
            Err(Error::NotConcave { .. })
        ));
    }

    #[test]
    fn near_integral_direct_comparison() {
        // Direct quadrature of the second-difference form on [s0, ξ/2]; below
        // s0 the integrand is 4ω″(ξ) up to O(s²).
        let knv = ModulusKNV::new(0.01, 1e-3).unwrap();
        let m = knv.generic();
        let xi = 0.3;
        let p = dissipation_parts(&m, xi, DEFAULT_TOL).unwrap();
        let d =
            |s: f64| (m.value(xi + 2.0 * s) + m.value(xi - 2.0 * s) - 2.0 * m.value(xi)) / (s * s);
        let kink = (xi - 0.01) / 2.0;
        let s0 = 1e-3;
        let body = integrate(d, s0, xi / 2.0, &[kink, 1e-2], Tolerance::relative(1e-10))
            .unwrap()
            .value;
        let direct = body + 4.0 * knv.second_derivative(xi) * s0;
        assert!(rel(p.near, direct) < 1e-6, "{} vs {}", p.near, direct);
    }
}
