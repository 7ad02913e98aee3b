use std::f64::consts::{E, PI};

use super::integrals::{
    dissipation_parts, double_riesz_modulus_omega, head_between, tail_between, DEFAULT_TOL,
};
use super::margin::breakthrough_margin;
use super::modulus::ModulusKNV;
use crate::error::{Error, Result};

/// One inequality `lhs ≤ rhs` at one sample.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundCheck {
    pub name: &'static str,
    /// 1 for `ξ ≤ δ`, 2 for `ξ ≥ δ`.
    pub case: u8,
    pub xi: f64,
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs − lhs`.
    pub slack: f64,
    pub holds: bool,
    /// Both sides vanish identically (empty integration range).
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CaseReport {
    pub delta: f64,
    pub gamma: f64,
    pub nu: f64,
    pub cmult: f64,
    pub checks: Vec<BoundCheck>,
}

impl CaseReport {
    pub fn violations(&self) -> Vec<&BoundCheck> {
        self.checks.iter().filter(|c| !c.holds).collect()
    }

    /// Holds with strictly positive slack wherever non-degenerate.
    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }

    pub fn names(&self) -> Vec<&'static str> {
        let mut out: Vec<&'static str> = Vec::new();
        for c in &self.checks {
            if !out.contains(&c.name) {
                out.push(c.name);
            }
        }
        out
    }

    /// `(min slack, ξ at min, violation count)` for one inequality.
    pub fn summary(&self, name: &str) -> Option<(f64, f64, usize)> {
        let rows: Vec<&BoundCheck> = self
            .checks
            .iter()
            .filter(|c| c.name == name && !c.degenerate)
            .collect();
        let worst = rows.iter().min_by(|a, b| a.slack.total_cmp(&b.slack))?;
        Some((
            worst.slack,
            worst.xi,
            rows.iter().filter(|c| !c.holds).count(),
        ))
    }
}

fn check(name: &'static str, case: u8, xi: f64, lhs: f64, rhs: f64) -> BoundCheck {
    let slack = rhs - lhs;
    BoundCheck {
        name,
        case,
        xi,
        lhs,
        rhs,
        slack,
        holds: slack > 0.0,
        degenerate: false,
    }
}

fn degenerate(name: &'static str, case: u8, xi: f64) -> BoundCheck {
    BoundCheck {
        name,
        case,
        xi,
        lhs: 0.0,
        rhs: 0.0,
        slack: 0.0,
        holds: true,
        degenerate: true,
    }
}

/// Evaluates every intermediate inequality of the two-case negativity
/// argument at the given samples. Samples `ξ ≤ δ` get the Case-1 family,
/// samples `ξ ≥ δ` the Case-2 family; `ξ = δ` gets both.
pub fn verify_case_bounds(
    m: &ModulusKNV,
    nu: f64,
    cmult: f64,
    xi_samples: &[f64],
) -> Result<CaseReport> {
    if !(nu > 0.0) {
        return Err(Error::OutOfRange {
            name: "nu",
            value: nu,
            range: "(0, inf)",
        });
    }
    let (d, g) = (m.delta(), m.gamma());
    let w = m.generic();
    let tol = DEFAULT_TOL;
    let sixteen = 16.0 * nu / (9.0 * PI);
    let mut checks = Vec::new();
    for &xi in xi_samples {
        if !(xi > 0.0) {
            return Err(Error::OutOfRange {
                name: "xi",
                value: xi,
                range: "(0, inf)",
            });
        }
        let om = m.value(xi);
        let head = head_between(&w, 0.0, xi, tol, |s| (E * xi / s).ln())?;
        let parts = dissipation_parts(&w, xi, tol)?;
        if xi <= d {
            let l = (d / xi).ln();
            checks.push(check("case1_head", 1, xi, head, 2.0 * xi));
            if xi < d {
                let mid = tail_between(&w, xi, xi, d, tol, |s| (E * s / xi).ln())?;
                checks.push(check("case1_middle", 1, xi, mid, 0.5 * xi * l * (2.0 + l)));
            } else {
                checks.push(degenerate("case1_middle", 1, xi));
            }
            let tail = tail_between(&w, xi, d, f64::INFINITY, tol, |s| (E * s / xi).ln())?;
            let rhs = xi * (1.0 + (E * d / xi).ln()) * (1.0 + g / (2.0 * d));
            checks.push(check("case1_tail", 1, xi, tail, rhs));
            let big = double_riesz_modulus_omega(&w, xi, tol)?;
            checks.push(check(
                "case1_sum",
                1,
                xi,
                om + big,
                3.0 * xi + xi * (2.0 + l).powi(2),
            ));
            let near = nu / PI * parts.near;
            checks.push(check(
                "case1_dissipation",
                1,
                xi,
                near,
                -0.75 * nu / PI * xi.sqrt(),
            ));
        }
        if xi >= d {
            let l = (xi / d).ln();
            checks.push(check(
                "case2_head",
                2,
                xi,
                head,
                om * (1.0 + (1.0 + l).powi(2)),
            ));
            let tail = tail_between(&w, xi, xi, f64::INFINITY, tol, |s| (E * s / xi).ln())?;
            checks.push(check("case2_tail", 2, xi, tail, 2.0 * om + 3.0 * g));
            checks.push(check(
                "case2_tail_absorb",
                2,
                xi,
                2.0 * om + 3.0 * g,
                5.0 * om,
            ));
            let big = head + tail;
            let product = cmult * (om + big) * m.right_derivative(xi);
            checks.push(check("case2_product", 2, xi, product, cmult * g * om / xi));
            checks.push(check("doubling", 2, xi, m.value(2.0 * xi), 10.0 / 9.0 * om));
            let far = nu / PI * parts.far;
            checks.push(check("case2_dissipation", 2, xi, far, -sixteen * om / xi));
            let margin = breakthrough_margin(m, xi, nu, cmult)?;
            checks.push(check(
                "final_bound",
                2,
                xi,
                margin,
                om / xi * (cmult * g - sixteen),
            ));
            checks.push(check("final_sign", 2, xi, cmult * g, sixteen));
        }
    }
    Ok(CaseReport {
        delta: d,
        gamma: g,
        nu,
        cmult,
        checks,
    })
}

/// Default samples: 40 log points on each side of `δ` plus `δ` itself.
pub fn default_case_samples(delta: f64) -> Vec<f64> {
    let mut xs = super::margin::log_space(1e-6 * delta, delta, 41);
    xs.pop();
    xs.push(delta);
    xs.extend(
        super::margin::log_space(delta, 1e6 * delta, 41)
            .into_iter()
            .skip(1),
    );
    xs
}
