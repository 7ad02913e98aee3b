//! Functionals evaluated on trajectories: the blow-up integral, the
//! refined dyadic indicator, smoothing and a priori ratios, and the
//! empirical modulus of continuity.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::field::{Exponent, Field};
use crate::grid::Grid;
use crate::lp::{
    besov_norm, besov_norm_of, block_history, block_norms, decompose, spacetime_norm_of, time_norm,
    BesovIndex, CutoffFamily,
};
use crate::moc::ModulusKNV;
use crate::multiplier::grad_linf;
use crate::solver::{FieldSeries, VelocitySeries};
use crate::trajectory::{DiagnosticRecord, Trajectory};

/// Diagnostics of one state.
pub fn record(
    state: &Field,
    t: f64,
    besov: &[BesovIndex],
    cf: &CutoffFamily,
) -> Result<DiagnosticRecord> {
    let d = decompose(state, cf)?;
    Ok(DiagnosticRecord {
        t,
        linf_grad: grad_linf(state)?,
        besov: besov
            .iter()
            .map(|&idx| (idx, besov_norm_of(&d, idx)))
            .collect(),
        lp_blocks: block_norms(&d, Exponent::INFINITY),
        energy: state.norm(Exponent::finite(2)),
        max: state.max(),
        min: state.min(),
    })
}

fn records(traj: &Trajectory) -> Result<&[DiagnosticRecord]> {
    if traj.records.is_empty() {
        return Err(Error::EmptyTrajectory);
    }
    Ok(&traj.records)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlowupIntegral {
    pub value: f64,
    /// The run stopped early; the integral only covers `[0, t_stop]`.
    pub truncated: bool,
}

/// Trapezoid integral of `‖∇θ(t)‖_∞` over the recorded times.
pub fn blowup_integral(traj: &Trajectory) -> Result<BlowupIntegral> {
    let cum = blowup_cumulative(traj)?;
    Ok(BlowupIntegral {
        value: *cum.last().expect("non-empty"),
        truncated: traj.truncated.is_some(),
    })
}

/// Running trapezoid integral, aligned with the records.
pub fn blowup_cumulative(traj: &Trajectory) -> Result<Vec<f64>> {
    let recs = records(traj)?;
    let mut out = Vec::with_capacity(recs.len());
    let mut acc = 0.0;
    out.push(0.0);
    for w in recs.windows(2) {
        acc += 0.5 * (w[1].t - w[0].t) * (w[0].linf_grad + w[1].linf_grad);
        out.push(acc);
    }
    Ok(out)
}

/// `Σ_j (1 − e^{−C(T−τ)2^j})^{1/2} · b_j` for block sup norms `b_j`.
pub fn indicator_from_blocks(
    blocks: &BTreeMap<i32, f64>,
    tau: f64,
    t_final: f64,
    c: f64,
) -> Result<f64> {
    if !(tau < t_final) {
        return Err(Error::TimeOutOfRange {
            t: tau,
            start: f64::NEG_INFINITY,
            end: t_final,
        });
    }
    Ok(blocks
        .iter()
        .map(|(&j, &b)| (-(-c * (t_final - tau) * 2f64.powi(j)).exp_m1()).sqrt() * b)
        .sum())
}

/// Refined indicator at every recorded `τ < T`; records at `τ ≥ T` are an error.
pub fn refined_indicator(traj: &Trajectory, t_final: f64, c: f64) -> Result<Vec<(f64, f64)>> {
    records(traj)?
        .iter()
        .map(|r| Ok((r.t, indicator_from_blocks(&r.lp_blocks, r.t, t_final, c)?)))
        .collect()
}

/// `(T − τ)·‖∇θ(τ)‖_∞` at every recorded `τ`, reported next to the indicator.
pub fn gradient_product(traj: &Trajectory, t_final: f64) -> Result<Vec<(f64, f64)>> {
    Ok(records(traj)?
        .iter()
        .map(|r| (r.t, (t_final - r.t) * r.linf_grad))
        .collect())
}

/// `sup_t t^β ‖θ(t)‖_{Ḃ^{s+β}_{p,q}}` over the stored states.
pub fn smoothing_tracker(traj: &Trajectory, beta: f64, idx: BesovIndex) -> Result<f64> {
    if !(beta >= 0.0) {
        return Err(Error::OutOfRange {
            name: "beta",
            value: beta,
            range: "[0, inf)",
        });
    }
    let states = traj.states()?;
    let cf = CutoffFamily::for_grid(&traj.grid);
    let shifted = idx.with_s(idx.s + beta);
    let mut sup = 0.0f64;
    for (&t, s) in traj.times.iter().zip(states) {
        let w = if beta == 0.0 { 1.0 } else { t.powf(beta) };
        if w == 0.0 {
            continue;
        }
        sup = sup.max(w * besov_norm(s, shifted, &cf)?);
    }
    Ok(sup)
}

/// Both sides of the transport-diffusion a priori estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AprioriReport {
    /// `ν^{1/r} ‖θ‖_{L̃^r_T Ḃ^{s+α/r}_{p,q}}`.
    pub lhs: f64,
    /// `∫₀^T ‖∇v‖_∞ dt`.
    pub z: f64,
    pub data: f64,
    pub forcing: f64,
    /// `lhs / (e^Z (data + forcing))`; zero when the denominator is zero.
    pub ratio: f64,
}

/// Inputs of [`apriori_ratio`] besides the trajectory.
#[derive(Debug, Clone, Copy)]
pub struct AprioriSpec {
    pub nu: f64,
    pub alpha: f64,
    pub r: Exponent,
    pub r1: Exponent,
    pub index: BesovIndex,
}

/// A priori ratio for a trajectory of `∂_t θ + v·∇θ + νΛ^α θ = f`.
pub fn apriori_ratio(
    traj: &Trajectory,
    v: &VelocitySeries,
    f: Option<&FieldSeries>,
    spec: &AprioriSpec,
) -> Result<AprioriReport> {
    let states = traj.states()?;
    let times = &traj.times;
    let cf = CutoffFamily::for_grid(&traj.grid);
    let AprioriSpec {
        nu,
        alpha,
        r,
        r1,
        index,
    } = *spec;

    let lhs_idx = index.with_s(index.s + alpha * r.reciprocal());
    let hist = block_history(states, index.p, &cf)?;
    let lhs = nu.powf(r.reciprocal()) * spacetime_norm_of(times, &hist, r, lhs_idx, true);

    let grads = times
        .iter()
        .map(|&t| {
            let vt = v.at(t)?;
            let mut sup = 0.0f64;
            for c in vt.components() {
                sup = sup.max(grad_linf(c)?);
            }
            Ok(sup)
        })
        .collect::<Result<Vec<f64>>>()?;
    let z = time_norm(times, &grads, Exponent::finite(1));

    let data = besov_norm(&states[0], index, &cf)?;
    let forcing = match f {
        None => 0.0,
        Some(f) => {
            let samples = times
                .iter()
                .map(|&t| f.at(t))
                .collect::<Result<Vec<Field>>>()?;
            let f_idx = index.with_s(index.s - alpha + alpha * r1.reciprocal());
            let fh = block_history(&samples, index.p, &cf)?;
            nu.powf(r1.reciprocal() - 1.0) * spacetime_norm_of(times, &fh, r1, f_idx, true)
        }
    };
    let denom = z.exp() * (data + forcing);
    let ratio = if denom == 0.0 { 0.0 } else { lhs / denom };
    Ok(AprioriReport {
        lhs,
        z,
        data,
        forcing,
        ratio,
    })
}

fn shift_pairs(dim: usize) -> Vec<[i64; 3]> {
    let mut dirs = Vec::new();
    for a in 0..dim {
        let mut e = [0; 3];
        e[a] = 1;
        dirs.push(e);
    }
    for a in 0..dim {
        for b in a + 1..dim {
            let mut p = [0; 3];
            p[a] = 1;
            p[b] = 1;
            dirs.push(p);
            let mut m = [0; 3];
            m[a] = 1;
            m[b] = -1;
            dirs.push(m);
        }
    }
    dirs
}

fn max_shift_difference(f: &Field, dir: [i64; 3], steps: i64) -> f64 {
    let g: Grid = *f.grid();
    let n = g.n() as i64;
    let data = f.samples();
    let mut out = 0.0f64;
    for (i, &v) in data.iter().enumerate() {
        let ijk = g.unravel(i);
        let mut t = [0usize; 3];
        for a in 0..g.dim() {
            t[a] = (ijk[a] as i64 + dir[a] * steps).rem_euclid(n) as usize;
        }
        out = out.max((data[g.ravel(t)] - v).abs());
    }
    out
}

/// Empirical modulus `r ↦ max |f(x) − f(y)|` over axis and face-diagonal
/// separations closest to `r`, followed by the running maximum in `r`.
pub fn empirical_modulus(f: &Field, radii: &[f64]) -> Result<Vec<(f64, f64)>> {
    let g = *f.grid();
    let h = g.spacing();
    let mut order: Vec<usize> = (0..radii.len()).collect();
    order.sort_by(|&a, &b| radii[a].total_cmp(&radii[b]));
    let dirs = shift_pairs(g.dim());
    let mut raw = vec![0.0; radii.len()];
    for &k in &order {
        let r = radii[k];
        if !(r >= h * (1.0 - 1e-12)) {
            return Err(Error::OutOfRange {
                name: "radius",
                value: r,
                range: "[grid spacing, inf)",
            });
        }
        let mut best = 0.0f64;
        for d in &dirs {
            let len = ((d[0] * d[0] + d[1] * d[1] + d[2] * d[2]) as f64).sqrt() * h;
            // largest separation not exceeding r, so ω_emp(r) never overstates the modulus
            let steps = (r / len * (1.0 + 1e-12)).floor() as i64;
            if steps >= 1 {
                best = best.max(max_shift_difference(f, *d, steps));
            }
        }
        raw[k] = best;
    }
    let mut envelope = 0.0f64;
    let mut out = vec![(0.0, 0.0); radii.len()];
    for &k in &order {
        envelope = envelope.max(raw[k]);
        out[k] = (radii[k], envelope);
    }
    Ok(out)
}

/// Radii `h, 2h, …` up to half the period.
pub fn default_radii(grid: &Grid) -> Vec<f64> {
    (1..=grid.n() / 2)
        .map(|m| m as f64 * grid.spacing())
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct MocCheck {
    pub t: f64,
    /// `ω_emp(r) < ω(λ r)` on every radius.
    pub preserved: bool,
    /// `‖∇θ‖_∞ ≤ λ ω′(0)`.
    pub gradient_ok: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MocVerdict {
    pub checks: Vec<MocCheck>,
    pub first_violation: Option<f64>,
}

impl MocVerdict {
    pub fn preserved(&self) -> bool {
        self.first_violation.is_none()
    }
}

/// Checks the scaled modulus `ω(λ·)` against every stored state.
pub fn moc_preservation(traj: &Trajectory, omega: &ModulusKNV, lambda: f64) -> Result<MocVerdict> {
    if !(lambda > 0.0) {
        return Err(Error::OutOfRange {
            name: "lambda",
            value: lambda,
            range: "(0, inf)",
        });
    }
    let states = traj.states()?;
    let radii = default_radii(&traj.grid);
    let mut checks = Vec::with_capacity(states.len());
    let mut first = None;
    for (&t, s) in traj.times.iter().zip(states) {
        let emp = empirical_modulus(s, &radii)?;
        let preserved = emp.iter().all(|&(r, w)| w < omega.value(lambda * r));
        let gradient_ok = grad_linf(s)? <= lambda * omega.derivative(0.0);
        if !(preserved && gradient_ok) && first.is_none() {
            first = Some(t);
        }
        checks.push(MocCheck {
            t,
            preserved,
            gradient_ok,
        });
    }
    Ok(MocVerdict {
        checks,
        first_violation: first,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::solver::{simulate, SolverConfig};

    fn stratified(t_end: f64) -> Trajectory {
        let g = Grid::periodic(3, 16).unwrap();
        let th = Field::from_fn(g, |x| x[2].sin());
        simulate(&th, &SolverConfig::new(1.0, 1.0, t_end).with_dt(1e-3)).unwrap()
    }

    #[test]
    fn blowup_integral_stratified() {
        let b = blowup_integral(&stratified(1.0)).unwrap();
        assert!(
            (b.value - (1.0 - (-1f64).exp())).abs() < 1e-6,
            "{}",
            b.value
        );
        assert!(!b.truncated);
    }

    #[test]
    fn blowup_integral_additive() {
        let traj = stratified(0.2);
        let cum = blowup_cumulative(&traj).unwrap();
        let k = traj.records.len() / 2;
        let mut a = traj.clone();
        a.records.truncate(k + 1);
        let mut b = traj.clone();
        b.records.drain(..k);
        let total = blowup_integral(&a).unwrap().value + blowup_integral(&b).unwrap().value;
        assert!((total - cum.last().unwrap()).abs() <= 1e-12);
    }

    #[test]
    fn indicator_single_block() {
        let g = Grid::periodic(2, 32).unwrap();
        let th = Field::from_fn(g, |x| (3.0 * x[0]).cos());
        let cf = CutoffFamily::for_grid(&g);
        let rec = record(&th, 0.0, &[], &cf).unwrap();
        let total: f64 = rec.lp_blocks.values().sum();
        assert!((total - 1.0).abs() < 1e-12);
        let val = indicator_from_blocks(&rec.lp_blocks, 0.25, 1.0, 1.0).unwrap();
        let expect = (1.0 - (-2.0f64 * 0.75).exp()).sqrt();
        assert!((val - expect).abs() < 1e-12, "{val} {expect}");
        assert!(indicator_from_blocks(&rec.lp_blocks, 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn empirical_sine() {
        let g = Grid::periodic(2, 64).unwrap();
        let f = Field::from_fn(g, |x| x[0].sin());
        let radii: Vec<f64> = (1..20).map(|m| m as f64 * 0.15 + g.spacing()).collect();
        let tol = 2.0 * g.spacing();
        for (r, w) in empirical_modulus(&f, &radii).unwrap() {
            assert!((w - 2.0 * (r / 2.0).sin()).abs() <= tol, "{r} {w}");
        }
        assert!(empirical_modulus(&f, &[0.5 * g.spacing()]).is_err());
        let c = Field::constant(g, 2.0);
        assert!(empirical_modulus(&c, &radii)
            .unwrap()
            .iter()
            .all(|&(_, w)| w == 0.0));
    }

    #[test]
    fn empirical_gradient_bound() {
        let g = Grid::periodic(2, 64).unwrap();
        let f = corpus::random_smooth(g, 6.0, 1.0, 9);
        let gl = grad_linf(&f).unwrap();
        let radii = default_radii(&g);
        let emp = empirical_modulus(&f, &radii).unwrap();
        for &(r, w) in &emp {
            assert!(w <= r * gl * (1.0 + 1e-9), "{r} {w} {gl}");
        }
        for k in 0..emp.len() / 2 {
            let (r, w) = emp[k];
            let w2 = emp[2 * k + 1].1;
            assert!((emp[2 * k + 1].0 - 2.0 * r).abs() < 1e-12);
            assert!(w2 <= 2.0 * w + 2.0 * g.spacing() * gl);
        }
    }

    #[test]
    fn moc_lambda_extremes() {
        let traj = stratified(0.05);
        let m = ModulusKNV::new(0.01, 1e-3).unwrap();
        assert_eq!(
            moc_preservation(&traj, &m, 1e-9).unwrap().first_violation,
            Some(0.0)
        );
    }
}
