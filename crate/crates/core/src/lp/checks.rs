//! Numerical checks of the classical Littlewood–Paley inequalities:
//! Bernstein, the transport commutator, product laws, embeddings and the
//! logarithmic Sobolev bound. Each returns the observed ratio so that the
//! implicit constants can be fitted and reported.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{Exponent, Field, VectorField};
use crate::lp::{besov_norm, decompose, BesovIndex, CutoffFamily};
use crate::multiplier::{apply_multiplier, grad, Multiplier};
use crate::spectral::{inverse, transform};

/// Multi-indices `β` with `|β| = order` in `dim` variables.
fn multi_indices(dim: usize, order: u32) -> Vec<[u32; 3]> {
    let mut out = Vec::new();
    for a in 0..=order {
        for b in 0..=(order - a) {
            let c = order - a - b;
            if dim == 2 && c != 0 {
                continue;
            }
            out.push([a, b, c]);
        }
    }
    out
}

/// `∂^β f` by spectral differentiation.
pub fn partial(f: &Field, beta: [u32; 3]) -> Result<Field> {
    let sf = transform(f)?;
    let m = Multiplier::new(move |k| {
        let mut z = Complex64::new(1.0, 0.0);
        for a in 0..3 {
            z *= Complex64::new(0.0, k[a]).powu(beta[a]);
        }
        z
    })
    .with_value_at_zero(Complex64::new(
        if beta == [0, 0, 0] { 1.0 } else { 0.0 },
        0.0,
    ));
    Ok(inverse(&apply_multiplier(&sf, &m)?))
}

#[derive(Debug, Clone, PartialEq)]
pub struct BernsteinReport {
    /// `sup_{|β|=k} ‖∂^β f‖_p / (2^{jk} ‖f‖_p)` per sample.
    pub derivative_ratios: Vec<f64>,
    /// `‖f‖_q / (2^{j d (1/p - 1/q)} ‖f‖_p)` per sample.
    pub integrability_ratios: Vec<f64>,
    pub skipped: usize,
}

impl BernsteinReport {
    pub fn min_derivative_ratio(&self) -> f64 {
        self.derivative_ratios
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min)
    }

    pub fn max_derivative_ratio(&self) -> f64 {
        self.derivative_ratios.iter().cloned().fold(0.0, f64::max)
    }

    pub fn max_integrability_ratio(&self) -> f64 {
        self.integrability_ratios
            .iter()
            .cloned()
            .fold(0.0, f64::max)
    }
}

/// Bernstein ratios for fields spectrally supported in shell `j`.
pub fn bernstein_check(
    j: i32,
    p: Exponent,
    q: Exponent,
    order: u32,
    samples: &[Field],
) -> Result<BernsteinReport> {
    if q.value() < p.value() {
        return Err(Error::InvalidArgument(format!(
            "need q >= p, got p = {p}, q = {q}"
        )));
    }
    let mut report = BernsteinReport {
        derivative_ratios: Vec::new(),
        integrability_ratios: Vec::new(),
        skipped: 0,
    };
    let lambda = 2f64.powi(j);
    for f in samples {
        let base = f.norm(p);
        if base == 0.0 {
            report.skipped += 1;
            continue;
        }
        let dim = f.grid().dim();
        let mut sup = 0.0f64;
        for beta in multi_indices(dim, order) {
            sup = sup.max(partial(f, beta)?.norm(p));
        }
        report
            .derivative_ratios
            .push(sup / (lambda.powi(order as i32) * base));
        let gain = lambda.powf(dim as f64 * (p.reciprocal() - q.reciprocal()));
        report.integrability_ratios.push(f.norm(q) / (gain * base));
    }
    Ok(report)
}

#[derive(Debug, Clone)]
pub struct CommutatorReport {
    pub remainder: Field,
    pub remainder_norm: f64,
    /// `2^{js} ‖R_j‖_p / (‖∇v‖_mix ‖u‖_{Ḃ^s_{p,q}})`; zero when the
    /// denominator vanishes.
    pub ratio: f64,
}

/// Transport commutator
/// `R_j = (S_{j-1}v · ∇) Δ_j u - Δ_j((v · ∇) u)`.
///
/// The low-pass `S_{j-1} v` keeps the mean of `v`, so uniform advection
/// commutes exactly. `‖∇v‖_mix` is `max_{a,b} ‖∂_b v_a‖_{Ḃ^{d/p₁}_{p₁,∞}} +
/// max_{a,b} ‖∂_b v_a‖_∞`.
pub fn commutator(
    v: &VectorField,
    u: &Field,
    j: i32,
    idx: BesovIndex,
    p1: Exponent,
    cf: &CutoffFamily,
) -> Result<CommutatorReport> {
    let grid = *u.grid();
    if v.grid() != &grid {
        return Err(Error::GridMismatch);
    }
    let du = decompose(u, cf)?;
    let grad_block = grad(&du.block(j))?;
    let grad_u = grad(u)?;

    let mut low_adv = vec![0.0; grid.len()];
    let mut full_adv = vec![0.0; grid.len()];
    for a in 0..grid.dim() {
        let dv = decompose(v.component(a), cf)?;
        let low = dv.low_pass(j - 1).map(|x| x + dv.mean());
        for i in 0..grid.len() {
            low_adv[i] += low.samples()[i] * grad_block.component(a).samples()[i];
            full_adv[i] += v.component(a).samples()[i] * grad_u.component(a).samples()[i];
        }
    }
    let low_adv = Field::new(grid, low_adv)?;
    let full_block = crate::lp::block(&Field::new(grid, full_adv)?, cf, j)?;
    let remainder = low_adv.sub(&full_block)?;
    let remainder_norm = remainder.norm(idx.p);

    let besov_grad = BesovIndex::new(grid.dim() as f64 * p1.reciprocal(), p1, Exponent::INFINITY);
    let mut grad_besov = 0.0f64;
    let mut grad_sup = 0.0f64;
    for comp in v.components() {
        let gv = grad(comp)?;
        for c in gv.components() {
            grad_sup = grad_sup.max(c.max_abs());
            grad_besov = grad_besov.max(besov_norm(c, besov_grad, cf)?);
        }
    }
    let denom = (grad_besov + grad_sup) * besov_norm(u, idx, cf)?;
    let ratio = if denom > 0.0 {
        2f64.powf(j as f64 * idx.s) * remainder_norm / denom
    } else {
        0.0
    };
    Ok(CommutatorReport {
        remainder,
        remainder_norm,
        ratio,
    })
}

/// `‖f g‖_{Ḃ^s_{p,q}} / (‖f‖_{Ḃ^s_{p,q}} ‖g‖_∞ + ‖f‖_∞ ‖g‖_{Ḃ^s_{p,q}})`.
pub fn product_law_ratio(f: &Field, g: &Field, idx: BesovIndex, cf: &CutoffFamily) -> Result<f64> {
    let fg = f.mul(g)?;
    let num = besov_norm(&fg, idx, cf)?;
    let den = besov_norm(f, idx, cf)? * g.max_abs() + f.max_abs() * besov_norm(g, idx, cf)?;
    Ok(if den > 0.0 { num / den } else { 0.0 })
}

/// `‖f‖_{Ḃ^{s - d(1/p₁ - 1/p₂)}_{p₂,q}} / ‖f‖_{Ḃ^s_{p₁,q}}` for `p₁ <= p₂`.
pub fn embedding_ratio(f: &Field, idx: BesovIndex, p2: Exponent, cf: &CutoffFamily) -> Result<f64> {
    if p2.value() < idx.p.value() {
        return Err(Error::InvalidArgument("embedding needs p2 >= p1".into()));
    }
    let d = f.grid().dim() as f64;
    let target = BesovIndex::new(
        idx.s - d * (idx.p.reciprocal() - p2.reciprocal()),
        p2,
        idx.q,
    );
    let den = besov_norm(f, idx, cf)?;
    Ok(if den > 0.0 {
        besov_norm(f, target, cf)? / den
    } else {
        0.0
    })
}

/// `(Σ_k |k|^{2s} |f̂(k)|²)^{1/2}`.
pub fn sobolev_norm(f: &Field, s: f64) -> Result<f64> {
    let grid = *f.grid();
    let sf = transform(f)?;
    Ok(sf
        .coeffs()
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| {
            let k = grid.wavevector(i);
            (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]).powf(s) * c.norm_sqr()
        })
        .sum::<f64>()
        .sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogSobolevReport {
    pub sup: f64,
    pub besov_zero: f64,
    pub sobolev: f64,
    /// `‖f‖_∞ / (1 + ‖f‖_{Ḃ⁰_{∞,∞}} log(e + ‖f‖_{H^s}))`
    pub ratio: f64,
}

pub fn log_sobolev_check(f: &Field, s: f64, cf: &CutoffFamily) -> Result<LogSobolevReport> {
    let d = f.grid().dim() as f64;
    if s <= d / 2.0 {
        return Err(Error::OutOfRange {
            name: "s",
            value: s,
            range: "(dim/2, inf)",
        });
    }
    let f = f.mean_removed();
    let sup = f.max_abs();
    let besov_zero = besov_norm(
        &f,
        BesovIndex::new(0.0, Exponent::INFINITY, Exponent::INFINITY),
        cf,
    )?;
    let sobolev = sobolev_norm(&f, s)?;
    let ratio = sup / (1.0 + besov_zero * (std::f64::consts::E + sobolev).ln());
    Ok(LogSobolevReport {
        sup,
        besov_zero,
        sobolev,
        ratio,
    })
}
