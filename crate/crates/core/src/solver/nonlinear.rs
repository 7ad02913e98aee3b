use num_complex::Complex64;

use super::ops::{if_rk4_step, SpectralOps};
use super::{SolverConfig, TimeStep, VELOCITY_FLOOR};
use crate::diagnostics::record;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::grid::Grid;
use crate::lp::CutoffFamily;
use crate::trajectory::{Trajectory, Truncation};

/// How the step size is chosen; `speed` reports `‖v‖_∞` for the current state.
pub(crate) struct StepRule<S> {
    fixed: Option<f64>,
    cfl: f64,
    dx: f64,
    cap: f64,
    speed: S,
}

impl<S> StepRule<S>
where
    S: FnMut(&[Complex64]) -> Result<f64>,
{
    pub(crate) fn from_config(cfg: &SolverConfig, grid: &Grid, speed: S) -> Self {
        Self {
            fixed: match cfg.dt {
                TimeStep::Fixed(dt) => Some(dt),
                TimeStep::Auto => None,
            },
            cfl: cfg.cfl,
            dx: grid.spacing(),
            cap: cfg.auto_cap(),
            speed,
        }
    }

    fn next(&mut self, state: &[Complex64]) -> Result<f64> {
        let u = (self.speed)(state)?;
        let limit = self.cfl * self.dx / u.max(VELOCITY_FLOOR);
        match self.fixed {
            Some(dt) if dt > limit => Err(Error::Cfl {
                dt,
                limit,
                cfl: self.cfl,
            }),
            Some(dt) => Ok(dt),
            None => Ok(limit.min(self.cap)),
        }
    }
}

fn grad_max(ops: &SpectralOps, v: &[Complex64]) -> f64 {
    let g = ops.gradient(v);
    super::ops::max_speed(&g)
}

/// Shared driver: records at t=0, every `record_every` steps and at the end.
pub(crate) fn advance<S, R>(
    ops: &SpectralOps,
    theta0: &Field,
    cfg: &SolverConfig,
    mut rule: StepRule<S>,
    mut rhs: R,
) -> Result<Trajectory>
where
    S: FnMut(&[Complex64]) -> Result<f64>,
    R: FnMut(&[Complex64], f64) -> Result<Vec<Complex64>>,
{
    let grid = *ops.grid();
    let cf = CutoffFamily::for_grid(&grid);
    let mut traj = Trajectory::new(grid);
    let mut v = ops.to_spectral(theta0.samples());
    let g0 = grad_max(ops, &v);
    let guard = cfg.blowup_factor * g0.max(f64::MIN_POSITIVE);

    let push = |traj: &mut Trajectory, t: f64, state: Field| -> Result<()> {
        let rec = record(&state, t, &cfg.besov, &cf)?;
        let s = cfg.store_states.then_some(state);
        traj.push(t, s, Some(rec));
        Ok(())
    };
    push(&mut traj, 0.0, theta0.clone())?;

    let mut t = 0.0;
    let mut steps = 0usize;
    let eps = 1e-12 * cfg.t_end;
    while cfg.t_end - t > eps {
        let dt_rule = rule.next(&v)?;
        let remaining = cfg.t_end - t;
        let dt = if dt_rule >= remaining * (1.0 - 1e-9) {
            remaining
        } else {
            dt_rule
        };
        let half = ops.decay(cfg.nu, 0.5 * dt);
        let next = match if_rk4_step(&v, t, dt, &half, &mut rhs) {
            Ok(n) => n,
            Err(Error::BlowUp { t: tb, reason }) => {
                traj.truncated = Some(Truncation { t: tb, reason });
                break;
            }
            Err(e) => return Err(e),
        };
        v = next;
        steps += 1;
        t = if dt == remaining { cfg.t_end } else { t + dt };

        let g = grad_max(ops, &v);
        if !g.is_finite() || g > guard {
            traj.truncated = Some(Truncation {
                t,
                reason: format!("gradient sup norm {g:e} exceeds guard {guard:e}"),
            });
            break;
        }
        let done = cfg.t_end - t <= eps;
        if steps % cfg.record_every == 0 || done {
            let state = Field::from_vec_unchecked(grid, ops.physical(&v));
            push(&mut traj, t, state)?;
        }
    }
    traj.steps = steps;
    Ok(traj)
}

/// Nonlinear right-hand side `-u(θ)·∇θ` in Fourier variables.
fn ipm_rhs<'a>(
    ops: &'a SpectralOps,
    dealias: bool,
) -> impl FnMut(&[Complex64], f64) -> Result<Vec<Complex64>> + 'a {
    move |w: &[Complex64], _t: f64| Ok(ops.nonlinear(w, dealias).0)
}

fn ipm_speed<'a>(ops: &'a SpectralOps) -> impl FnMut(&[Complex64]) -> Result<f64> + 'a {
    move |w: &[Complex64]| Ok(super::ops::max_speed(&ops.velocity(w)))
}

/// One step of the nonlinear equation. The step is `cfg.dt` when fixed,
/// otherwise the CFL step capped by `dt_max` and `t_end`.
pub fn step_nonlinear(theta: &Field, cfg: &SolverConfig) -> Result<Field> {
    cfg.validate()?;
    theta.check_finite()?;
    let grid = *theta.grid();
    let ops = SpectralOps::new(grid, cfg.alpha);
    let v = ops.to_spectral(theta.samples());
    let mut rule = StepRule::from_config(cfg, &grid, ipm_speed(&ops));
    let dt = rule.next(&v)?.min(cfg.t_end);
    let half = ops.decay(cfg.nu, 0.5 * dt);
    let out = if_rk4_step(&v, 0.0, dt, &half, ipm_rhs(&ops, cfg.dealias))?;
    let f = Field::from_vec_unchecked(grid, ops.physical(&out));
    if let Err(Error::NonFinite { index }) = f.check_finite() {
        return Err(Error::BlowUp {
            t: dt,
            reason: format!("non-finite sample at index {index}"),
        });
    }
    Ok(f)
}

/// Runs the nonlinear equation from `theta0` to `cfg.t_end`.
///
/// Blow-up (non-finite values or the gradient guard) ends the run early and
/// sets `truncated`; the states up to that point are kept.
pub fn simulate(theta0: &Field, cfg: &SolverConfig) -> Result<Trajectory> {
    cfg.validate()?;
    theta0.check_finite()?;
    let grid = *theta0.grid();
    let ops = SpectralOps::new(grid, cfg.alpha);
    let rule = StepRule::from_config(cfg, &grid, ipm_speed(&ops));
    advance(&ops, theta0, cfg, rule, ipm_rhs(&ops, cfg.dealias))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::field::Exponent;
    use crate::solver::heat_semigroup;

    #[test]
    fn stratified_step_is_heat() {
        let g = Grid::periodic(3, 16).unwrap();
        let th = Field::from_fn(g, |x| x[2].sin());
        let cfg = SolverConfig::new(1.0, 1.0, 1.0).with_dt(1e-3);
        let out = step_nonlinear(&th, &cfg).unwrap();
        let exact = heat_semigroup(&th, 1e-3, 1.0, 1.0).unwrap();
        assert!(out.max_diff(&exact).unwrap() <= 1e-10);
    }

    #[test]
    fn zero_stays_zero() {
        let g = Grid::periodic(2, 16).unwrap();
        let cfg = SolverConfig::new(1.0, 1.0, 1.0).with_dt(1e-2);
        let out = step_nonlinear(&Field::zeros(g), &cfg).unwrap();
        assert_eq!(out.max_abs(), 0.0);
    }

    #[test]
    fn stratified_run_matches_closed_form() {
        let g = Grid::periodic(3, 16).unwrap();
        let th = Field::from_fn(g, |x| x[2].sin());
        let cfg = SolverConfig::new(1.0, 1.0, 1.0)
            .with_dt(1e-3)
            .with_record_every(100)
            .with_store_states(true);
        let traj = simulate(&th, &cfg).unwrap();
        assert!(traj.truncated.is_none());
        assert_eq!(traj.steps, 1000);
        let exact = th.scale((-1f64).exp());
        assert!(traj.final_state().unwrap().max_diff(&exact).unwrap() <= 1e-8);
        assert_eq!(traj.times.len(), 11);
    }

    #[test]
    fn energy_and_mean() {
        let g = Grid::periodic(2, 32).unwrap();
        let th = corpus::random_smooth(g, 5.0, 1.0, 21).map(|x| x + 0.3);
        let cfg = SolverConfig::new(1.0, 1.0, 0.5).with_dt(5e-3);
        let traj = simulate(&th, &cfg).unwrap();
        let e: Vec<f64> = traj
            .states
            .iter()
            .map(|s| {
                s.sub(&Field::constant(g, 0.3))
                    .unwrap()
                    .norm(Exponent::finite(2))
            })
            .collect();
        assert!(e.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12)));
        for s in &traj.states {
            assert!((s.mean() - th.mean()).abs() < 1e-13);
        }
    }

    #[test]
    fn fixed_dt_cfl_violation() {
        let g = Grid::periodic(2, 32).unwrap();
        let th = corpus::random_smooth(g, 5.0, 50.0, 4);
        let cfg = SolverConfig::new(1.0, 1.0, 1.0).with_dt(0.5);
        assert!(matches!(simulate(&th, &cfg), Err(Error::Cfl { .. })));
    }
}
