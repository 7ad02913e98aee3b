use super::integrals::{dissipation_j, double_riesz_modulus_omega, DEFAULT_TOL};
use super::modulus::{GenericModulus, ModulusKNV};
use crate::error::{Error, Result};

/// `n` log-spaced points on `[a, b]`.
pub fn log_space(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n)
            .map(|i| a * (b / a).powf(i as f64 / (n - 1) as f64))
            .collect(),
    }
}

/// Standard scan grid `[1e-6·δ, 1e6·δ]`.
pub fn xi_grid(delta: f64, points: usize) -> Vec<f64> {
    log_space(1e-6 * delta, 1e6 * delta, points)
}

fn margin_with(m: &ModulusKNV, xi: f64, nu: f64, cmult: f64, derivative: f64) -> Result<f64> {
    let g = m.generic();
    let w = m.value(xi);
    let big = double_riesz_modulus_omega(&g, xi, DEFAULT_TOL)?;
    let j = dissipation_j(&g, xi, nu, DEFAULT_TOL)?;
    Ok(cmult * (w + big) * derivative + j)
}

/// Margin `Cmult·(ω + Ω)·ω′ + J` for an arbitrary modulus.
pub fn generic_margin(omega: &GenericModulus, xi: f64, nu: f64, cmult: f64) -> Result<f64> {
    let big = double_riesz_modulus_omega(omega, xi, DEFAULT_TOL)?;
    let j = dissipation_j(omega, xi, nu, DEFAULT_TOL)?;
    Ok(cmult * (omega.value(xi) + big) * omega.derivative(xi) + j)
}

/// `Cmult·(ω + Ω)·ω′ + J` at `ξ`. At `ξ = δ` both one-sided derivatives
/// are used and the larger margin is returned.
pub fn breakthrough_margin(m: &ModulusKNV, xi: f64, nu: f64, cmult: f64) -> Result<f64> {
    if !(cmult > 0.0) {
        return Err(Error::OutOfRange {
            name: "Cmult",
            value: cmult,
            range: "(0, inf)",
        });
    }
    if xi == m.delta() {
        let l = margin_with(m, xi, nu, cmult, m.left_derivative(xi))?;
        let r = margin_with(m, xi, nu, cmult, m.right_derivative(xi))?;
        return Ok(l.max(r));
    }
    margin_with(m, xi, nu, cmult, m.derivative(xi))
}

/// Upper bound `Cmult·γ·ω(ξ)/ξ + J(ξ)` used for `ξ ≥ δ`.
pub fn case2_margin_bound(m: &ModulusKNV, xi: f64, nu: f64, cmult: f64) -> Result<f64> {
    let j = dissipation_j(&m.generic(), xi, nu, DEFAULT_TOL)?;
    Ok(case2_product_term(m, xi, cmult) + j)
}

/// Nonlinear part `Cmult·γ·ω(ξ)/ξ` of [`case2_margin_bound`]. It grows with
/// `γ`; the full bound does not, since `J` gets more negative as `γ` grows.
pub fn case2_product_term(m: &ModulusKNV, xi: f64, cmult: f64) -> f64 {
    cmult * m.gamma() * m.value(xi) / xi
}

#[derive(Debug, Clone, PartialEq)]
pub struct MarginReport {
    pub delta: f64,
    pub gamma: f64,
    pub nu: f64,
    pub cmult: f64,
    pub xi: Vec<f64>,
    pub margin: Vec<f64>,
    pub max_margin: f64,
    pub argmax: f64,
    pub admissible: bool,
}

pub fn margin_report(m: &ModulusKNV, nu: f64, cmult: f64, xi: &[f64]) -> Result<MarginReport> {
    let margin = xi
        .iter()
        .map(|&x| breakthrough_margin(m, x, nu, cmult))
        .collect::<Result<Vec<_>>>()?;
    let (mut max_margin, mut argmax) = (f64::NEG_INFINITY, f64::NAN);
    for (&x, &v) in xi.iter().zip(&margin) {
        if v > max_margin {
            max_margin = v;
            argmax = x;
        }
    }
    Ok(MarginReport {
        delta: m.delta(),
        gamma: m.gamma(),
        nu,
        cmult,
        xi: xi.to_vec(),
        margin,
        max_margin,
        argmax,
        admissible: max_margin < 0.0,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanResult {
    /// Sorted by `(δ, γ)`.
    pub reports: Vec<MarginReport>,
    pub admissible: Vec<(f64, f64)>,
    /// `(δ, γ, max margin)` with the most negative max margin.
    pub best: Option<(f64, f64, f64)>,
}

/// Max margin for every valid pair `γ < δ` of the two grids.
pub fn scan_negativity(
    nu: f64,
    cmult: f64,
    deltas: &[f64],
    gammas: &[f64],
    points: usize,
) -> Result<ScanResult> {
    let mut ds = deltas.to_vec();
    let mut gs = gammas.to_vec();
    ds.sort_by(f64::total_cmp);
    gs.sort_by(f64::total_cmp);
    let mut reports = Vec::new();
    for &d in &ds {
        for &g in gs.iter().filter(|&&g| g < d) {
            let m = ModulusKNV::new(d, g)?;
            reports.push(margin_report(&m, nu, cmult, &xi_grid(d, points))?);
        }
    }
    let admissible: Vec<(f64, f64)> = reports
        .iter()
        .filter(|r| r.admissible)
        .map(|r| (r.delta, r.gamma))
        .collect();
    let best = reports
        .iter()
        .filter(|r| r.admissible)
        .min_by(|a, b| a.max_margin.total_cmp(&b.max_margin))
        .map(|r| (r.delta, r.gamma, r.max_margin));
    Ok(ScanResult {
        reports,
        admissible,
        best,
    })
}

/// Bisection in `γ ∈ (lo, hi)` for the sign change of the max margin at
/// fixed `δ`. `None` when both ends have the same sign.
pub fn gamma_crossing(
    delta: f64,
    nu: f64,
    cmult: f64,
    lo: f64,
    hi: f64,
    points: usize,
    rtol: f64,
) -> Result<Option<f64>> {
    let xi = xi_grid(delta, points);
    let max_at = |g: f64| -> Result<f64> {
        Ok(margin_report(&ModulusKNV::new(delta, g)?, nu, cmult, &xi)?.max_margin)
    };
    let (mut a, mut b) = (lo, hi);
    let (fa, fb) = (max_at(a)?, max_at(b)?);
    if (fa < 0.0) == (fb < 0.0) {
        return Ok(None);
    }
    let neg_at_a = fa < 0.0;
    while (b - a) > rtol * b {
        let m = (a * b).sqrt();
        if (max_at(m)? < 0.0) == neg_at_a {
            a = m;
        } else {
            b = m;
        }
    }
    Ok(Some((a * b).sqrt()))
}
