use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::field::{Exponent, Field};
use crate::lp::{decompose, CutoffFamily, LpDecomposition};

/// Index `(s, p, q)` of the homogeneous Besov space `Ḃ^s_{p,q}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesovIndex {
    pub s: f64,
    pub p: Exponent,
    pub q: Exponent,
}

impl BesovIndex {
    pub fn new(s: f64, p: Exponent, q: Exponent) -> Self {
        Self { s, p, q }
    }

    /// Critical index `Ḃ^{d/p}_{p,1}` shifted by `extra` derivatives.
    pub fn critical(dim: usize, p: Exponent, extra: f64) -> Self {
        Self::new(dim as f64 * p.reciprocal() + extra, p, Exponent::finite(1))
    }

    pub fn with_s(self, s: f64) -> Self {
        Self { s, ..self }
    }

    /// Column label used in exported tables, e.g. `besov_1.5_2_1`.
    pub fn label(&self) -> String {
        format!("besov_{}_{}_{}", self.s, self.p, self.q)
    }
}

/// `ℓ^q` combination `(Σ_j (2^{js} a_j)^q)^{1/q}` (sup for `q = ∞`).
pub fn weighted_lq<I: IntoIterator<Item = (i32, f64)>>(terms: I, s: f64, q: Exponent) -> f64 {
    let weighted = terms.into_iter().map(|(j, a)| 2f64.powf(j as f64 * s) * a);
    if q.is_infinite() {
        weighted.fold(0.0, f64::max)
    } else {
        let qv = q.value();
        let total: f64 = weighted.map(|w| w.powf(qv)).sum();
        total.powf(1.0 / qv)
    }
}

/// `‖Δ_j f‖_p` for every block of a decomposition.
pub fn block_norms(d: &LpDecomposition, p: Exponent) -> BTreeMap<i32, f64> {
    d.blocks().map(|(j, b)| (j, b.norm(p))).collect()
}

pub fn besov_norm_of(d: &LpDecomposition, idx: BesovIndex) -> f64 {
    weighted_lq(block_norms(d, idx.p), idx.s, idx.q)
}

/// Homogeneous Besov norm of `f` (the mean is ignored).
pub fn besov_norm(f: &Field, idx: BesovIndex, cf: &CutoffFamily) -> Result<f64> {
    Ok(besov_norm_of(&decompose(f, cf)?, idx))
}

/// Trapezoid `L^r` norm in time of samples `g(t_i)` (sup for `r = ∞`).
pub fn time_norm(times: &[f64], values: &[f64], r: Exponent) -> f64 {
    if r.is_infinite() {
        return values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    }
    let rv = r.value();
    let integral: f64 = times
        .windows(2)
        .zip(values.windows(2))
        .map(|(t, v)| 0.5 * (t[1] - t[0]) * (v[0].abs().powf(rv) + v[1].abs().powf(rv)))
        .sum();
    integral.powf(1.0 / rv)
}

/// Block norms `‖Δ_j u(t_i)‖_p` of a sampled trajectory, indexed `[j][i]`.
pub fn block_history(
    states: &[Field],
    p: Exponent,
    cf: &CutoffFamily,
) -> Result<BTreeMap<i32, Vec<f64>>> {
    let mut out: BTreeMap<i32, Vec<f64>> = BTreeMap::new();
    for u in states {
        let d = decompose(u, cf)?;
        for (j, b) in d.blocks() {
            out.entry(j).or_default().push(b.norm(p));
        }
    }
    Ok(out)
}

/// Chemin–Lerner (`tilde`) or plain space-time Besov norm of sampled states:
///
/// * tilde: `(Σ_j 2^{jsq} ‖Δ_j u‖^q_{L^r_T L^p})^{1/q}`
/// * plain: `‖(Σ_j 2^{jsq} ‖Δ_j u(t)‖^q_{L^p})^{1/q}‖_{L^r_T}`
pub fn spacetime_norm_of(
    times: &[f64],
    history: &BTreeMap<i32, Vec<f64>>,
    r: Exponent,
    idx: BesovIndex,
    tilde: bool,
) -> f64 {
    if tilde {
        weighted_lq(
            history.iter().map(|(j, v)| (*j, time_norm(times, v, r))),
            idx.s,
            idx.q,
        )
    } else {
        let per_time: Vec<f64> = (0..times.len())
            .map(|i| weighted_lq(history.iter().map(|(j, v)| (*j, v[i])), idx.s, idx.q))
            .collect();
        time_norm(times, &per_time, r)
    }
}

pub fn spacetime_norm(
    times: &[f64],
    states: &[Field],
    r: Exponent,
    idx: BesovIndex,
    tilde: bool,
    cf: &CutoffFamily,
) -> Result<f64> {
    if states.is_empty() || times.len() != states.len() {
        return Err(Error::EmptyTrajectory);
    }
    let history = block_history(states, idx.p, cf)?;
    Ok(spacetime_norm_of(times, &history, r, idx, tilde))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::grid::Grid;

    const INF: Exponent = Exponent::INFINITY;

    fn one() -> Exponent {
        Exponent::finite(1)
    }

    #[test]
    fn single_block_norms() {
        let g = Grid::periodic(2, 64).unwrap();
        let cf = CutoffFamily::for_grid(&g);
        let f = Field::from_fn(g, |x| (3.0 * x[0]).cos());
        let a = besov_norm(&f, BesovIndex::new(1.5, INF, one()), &cf).unwrap();
        assert!((a - 2f64.powf(1.5)).abs() < 1e-12, "{a}");
        let b = besov_norm(&f, BesovIndex::new(0.0, Exponent::finite(2), one()), &cf).unwrap();
        assert!((b - 0.5f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn two_block_norm() {
        let g = Grid::periodic(2, 128).unwrap();
        let cf = CutoffFamily::for_grid(&g);
        let f = Field::from_fn(g, |x| (3.0 * x[0]).cos() + (48.0 * x[0]).cos());
        let v = besov_norm(&f, BesovIndex::new(1.0, INF, one()), &cf).unwrap();
        assert!((v - 34.0).abs() < 1e-11, "{v}");
    }

    #[test]
    fn zero_field_has_zero_norm() {
        let g = Grid::periodic(3, 8).unwrap();
        let cf = CutoffFamily::for_grid(&g);
        assert_eq!(
            besov_norm(&Field::zeros(g), BesovIndex::new(1.0, INF, one()), &cf).unwrap(),
            0.0
        );
    }

    #[test]
    fn monotone_in_s_for_single_shell() {
        let g = Grid::periodic(2, 64).unwrap();
        let cf = CutoffFamily::for_grid(&g);
        let f = Field::from_fn(g, |x| (12.0 * x[1]).sin());
        let mut last = 0.0;
        for s in [0.0, 0.5, 1.0, 2.0] {
            let v = besov_norm(&f, BesovIndex::new(s, INF, one()), &cf).unwrap();
            assert!(v > last);
            last = v;
        }
    }

    #[test]
    fn closed_form_time_integral() {
        let g = Grid::periodic(2, 16).unwrap();
        let cf = CutoffFamily::for_grid(&g);
        let base = Field::from_fn(g, |x| (3.0 * x[0]).cos());
        let times: Vec<f64> = (0..=1000).map(|i| i as f64 * 1e-3).collect();
        let states: Vec<Field> = times.iter().map(|t| base.scale((-t).exp())).collect();
        let idx = BesovIndex::new(0.0, INF, one());
        let v = spacetime_norm(&times, &states, one(), idx, true, &cf).unwrap();
        assert!((v - (1.0 - (-1f64).exp())).abs() < 1e-6);
        let constant = vec![base.clone(); 3];
        let tv = [0.0, 0.5, 1.0];
        let s = spacetime_norm(
            &tv,
            &constant,
            INF,
            BesovIndex::new(1.0, INF, one()),
            true,
            &cf,
        )
        .unwrap();
        assert!(
            (s - besov_norm(&base, BesovIndex::new(1.0, INF, one()), &cf).unwrap()).abs() < 1e-14
        );
    }

    #[test]
    fn minkowski_ordering() {
        let g = Grid::periodic(2, 32).unwrap();
        let cf = CutoffFamily::for_grid(&g);
        let f = corpus::random_smooth(g, 12.0, 1.0, 4);
        let times: Vec<f64> = (0..=20).map(|i| i as f64 * 0.05).collect();
        let states: Vec<Field> = times
            .iter()
            .map(|&t| crate::solver::heat_semigroup(&f, t, 1.0, 1.0).unwrap())
            .collect();
        let idx_inf = BesovIndex::new(0.5, Exponent::finite(2), INF);
        let tilde = spacetime_norm(&times, &states, one(), idx_inf, true, &cf).unwrap();
        let plain = spacetime_norm(&times, &states, one(), idx_inf, false, &cf).unwrap();
        assert!(tilde <= plain * (1.0 + 1e-14), "r <= q: {tilde} > {plain}");
        let idx_one = BesovIndex::new(0.5, Exponent::finite(2), one());
        let tilde = spacetime_norm(&times, &states, INF, idx_one, true, &cf).unwrap();
        let plain = spacetime_norm(&times, &states, INF, idx_one, false, &cf).unwrap();
        assert!(plain <= tilde * (1.0 + 1e-14), "q <= r: {plain} > {tilde}");
    }

    #[test]
    fn empty_trajectory_rejected() {
        let g = Grid::periodic(2, 8).unwrap();
        let cf = CutoffFamily::for_grid(&g);
        let r = spacetime_norm(&[], &[], one(), BesovIndex::new(0.0, INF, one()), true, &cf);
        assert_eq!(r, Err(Error::EmptyTrajectory));
    }
}
