use super::linear::{linear_td_solve, VelocitySeries};
use super::{critical_l2_index, heat_semigroup, SolverConfig, TimeStep, VELOCITY_FLOOR};
use crate::diagnostics::record;
use crate::error::{Error, Result};
use crate::field::{Field, VectorField};
use crate::lp::{besov_norm, BesovIndex, CutoffFamily};
use crate::trajectory::Trajectory;
use crate::velocity::velocity_from_theta;

#[derive(Debug, Clone, PartialEq)]
pub struct PicardConfig {
    /// Number of linear solves after the heat iterate `θ⁰`.
    pub iterations: usize,
    /// Norm of the differences; `None` means `Ḃ^{d/2}_{2,1}`.
    pub index: Option<BesovIndex>,
    /// Maximum number of times `t_end` is halved.
    pub max_shrinks: usize,
    /// A run counts as contracting when every ratio is at most this.
    pub contraction: f64,
}

impl PicardConfig {
    pub fn new(iterations: usize) -> Self {
        Self {
            iterations,
            index: None,
            max_shrinks: 8,
            contraction: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PicardReport {
    pub t_end: f64,
    pub dt: f64,
    pub index: BesovIndex,
    /// `d_k = sup_t ‖θ^{k+1}(t) − θ^k(t)‖`, k = 0..K-1.
    pub differences: Vec<f64>,
    /// `d_{k+1} / d_k`; zero when `d_k` is at round-off level.
    pub ratios: Vec<f64>,
    pub shrinks: usize,
    pub contracted: bool,
}

fn ratios(d: &[f64], floor: f64) -> Vec<f64> {
    d.windows(2)
        .map(|w| if w[0] <= floor { 0.0 } else { w[1] / w[0] })
        .collect()
}

fn sup_difference(
    a: &Trajectory,
    b: &Trajectory,
    idx: BesovIndex,
    cf: &CutoffFamily,
) -> Result<f64> {
    let (sa, sb) = (a.states()?, b.states()?);
    let mut sup = 0.0f64;
    for (x, y) in sa.iter().zip(sb) {
        sup = sup.max(besov_norm(&x.sub(y)?, idx, cf)?);
    }
    Ok(sup)
}

fn heat_trajectory(theta0: &Field, times: &[f64], cfg: &SolverConfig) -> Result<Trajectory> {
    let states = times
        .iter()
        .map(|&t| heat_semigroup(theta0, t, cfg.nu, cfg.alpha))
        .collect::<Result<Vec<_>>>()?;
    let mut traj = Trajectory::from_states(times.to_vec(), states)?;
    let cf = CutoffFamily::for_grid(&traj.grid);
    traj.records = traj
        .times
        .iter()
        .zip(&traj.states)
        .map(|(&t, s)| record(s, t, &cfg.besov, &cf))
        .collect::<Result<_>>()?;
    Ok(traj)
}

fn velocity_series(traj: &Trajectory) -> Result<VelocitySeries> {
    let v = traj
        .states()?
        .iter()
        .map(velocity_from_theta)
        .collect::<Result<Vec<VectorField>>>()?;
    VelocitySeries::new(traj.times.clone(), v)
}

/// Uniform step shared by every iterate; the frozen velocities are then
/// sampled exactly on the solver grid.
fn uniform_step(theta0: &Field, cfg: &SolverConfig, t_end: f64) -> Result<(f64, usize)> {
    let dt = match cfg.dt {
        TimeStep::Fixed(dt) => dt,
        TimeStep::Auto => {
            let u = velocity_from_theta(theta0)?.max_magnitude();
            // Iterates may be faster than θ₀; keep a factor two of headroom.
            let limit = 0.5 * cfg.cfl * theta0.grid().spacing() / u.max(VELOCITY_FLOOR);
            limit.min(cfg.dt_max.unwrap_or(t_end / 64.0))
        }
    };
    let steps = (t_end / dt - 1e-9).ceil().max(1.0) as usize;
    Ok((t_end / steps as f64, steps))
}

fn run(
    theta0: &Field,
    k: usize,
    cfg: &SolverConfig,
    idx: BesovIndex,
) -> Result<(Vec<Trajectory>, Vec<f64>, f64)> {
    let (dt, steps) = uniform_step(theta0, cfg, cfg.t_end)?;
    let times: Vec<f64> = (0..=steps)
        .map(|i| cfg.t_end * i as f64 / steps as f64)
        .collect();
    let mut lin = cfg.clone();
    lin.dt = TimeStep::Fixed(dt);
    lin.record_every = 1;
    lin.store_states = true;
    // Guard against a velocity a bit above the CFL estimate of θ₀.
    lin.cfl = 1.0;
    let cf = CutoffFamily::for_grid(theta0.grid());
    let mut iterates = vec![heat_trajectory(theta0, &times, cfg)?];
    let mut diffs = Vec::with_capacity(k);
    for _ in 0..k {
        let prev = iterates.last().expect("non-empty");
        let v = velocity_series(prev)?;
        let mut next = linear_td_solve(&v, theta0, None, &lin)?;
        if next.truncated.is_some() || next.times.len() != times.len() {
            return Err(Error::BlowUp {
                t: next.final_time().unwrap_or(0.0),
                reason: "Picard iterate did not reach the final time".into(),
            });
        }
        // Snap to the shared grid to keep interpolation exact.
        next.times.clone_from(&times);
        for (r, &t) in next.records.iter_mut().zip(&times) {
            r.t = t;
        }
        diffs.push(sup_difference(&next, prev, idx, &cf)?);
        iterates.push(next);
    }
    Ok((iterates, diffs, dt))
}

/// Picard scheme `θ^{k+1} = linear_td_solve(u(θ^k), θ₀, 0)` from the heat
/// iterate `θ⁰(t) = e^{-νtΛ^α}θ₀`.
///
/// When some ratio `d_{k+1}/d_k` exceeds `pc.contraction` the horizon is
/// halved and the scheme restarted, at most `pc.max_shrinks` times. A run
/// that never contracts is returned with `contracted = false`.
pub fn picard_iterate(
    theta0: &Field,
    pc: &PicardConfig,
    cfg: &SolverConfig,
) -> Result<(Vec<Trajectory>, PicardReport)> {
    if pc.iterations == 0 {
        return Err(Error::InvalidArgument(
            "Picard needs at least one iteration".into(),
        ));
    }
    cfg.validate()?;
    theta0.check_finite()?;
    let idx = pc
        .index
        .unwrap_or_else(|| critical_l2_index(theta0.grid().dim()));
    let cf = CutoffFamily::for_grid(theta0.grid());
    let floor = 1e-13 * besov_norm(theta0, idx, &cf)?.max(f64::MIN_POSITIVE);
    let mut cfg = cfg.clone();
    let mut shrinks = 0;
    loop {
        let (iterates, diffs, dt) = run(theta0, pc.iterations, &cfg, idx)?;
        let r = ratios(&diffs, floor);
        let contracted = r.iter().all(|&x| x <= pc.contraction);
        if contracted || shrinks >= pc.max_shrinks {
            let report = PicardReport {
                t_end: cfg.t_end,
                dt,
                index: idx,
                differences: diffs,
                ratios: r,
                shrinks,
                contracted,
            };
            return Ok((iterates, report));
        }
        cfg.t_end *= 0.5;
        if let Some(m) = cfg.dt_max.as_mut() {
            *m = m.min(cfg.t_end / 64.0);
        }
        shrinks += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;

    #[test]
    fn stratified_fixed_point() {
        let g = Grid::periodic(3, 16).unwrap();
        let th = Field::from_fn(g, |x| 0.1 * x[2].sin());
        let cfg = SolverConfig::new(1.0, 1.0, 0.5);
        let (its, rep) = picard_iterate(&th, &PicardConfig::new(3), &cfg).unwrap();
        assert_eq!(its.len(), 4);
        assert!(rep.contracted);
        for d in &rep.differences {
            assert!(*d < 1e-10, "{d}");
        }
    }

    #[test]
    fn zero_iterations_rejected() {
        let g = Grid::periodic(2, 8).unwrap();
        let cfg = SolverConfig::new(1.0, 1.0, 0.5);
        assert!(picard_iterate(&Field::zeros(g), &PicardConfig::new(0), &cfg).is_err());
    }
}
