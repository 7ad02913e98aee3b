use num_complex::Complex64;

use super::nonlinear::{advance, StepRule};
use super::ops::SpectralOps;
use super::SolverConfig;
use crate::error::{Error, Result};
use crate::field::{Field, VectorField};
use crate::grid::Grid;
use crate::trajectory::Trajectory;

fn locate(times: &[f64], t: f64) -> Result<(usize, f64)> {
    let (start, end) = (times[0], times[times.len() - 1]);
    let slack = 1e-12 * (1.0 + end.abs());
    if t < start - slack || t > end + slack {
        return Err(Error::TimeOutOfRange { t, start, end });
    }
    if times.len() == 1 {
        return Ok((0, 0.0));
    }
    let hi = times.partition_point(|&s| s < t).clamp(1, times.len() - 1);
    let lo = hi - 1;
    let w = ((t - times[lo]) / (times[hi] - times[lo])).clamp(0.0, 1.0);
    Ok((lo, w))
}

fn check_times(times: &[f64], len: usize) -> Result<()> {
    if times.is_empty() {
        return Err(Error::EmptyTrajectory);
    }
    if times.len() != len {
        return Err(Error::InvalidArgument(
            "times and samples differ in length".into(),
        ));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument(
            "times must increase strictly".into(),
        ));
    }
    Ok(())
}

/// Velocity samples in time, linearly interpolated in between.
/// A single sample is treated as constant in time.
#[derive(Debug, Clone)]
pub struct VelocitySeries {
    times: Vec<f64>,
    fields: Vec<VectorField>,
}

impl VelocitySeries {
    pub fn new(times: Vec<f64>, fields: Vec<VectorField>) -> Result<Self> {
        check_times(&times, fields.len())?;
        let g = *fields[0].grid();
        if fields.iter().any(|f| *f.grid() != g) {
            return Err(Error::GridMismatch);
        }
        Ok(Self { times, fields })
    }

    pub fn constant(v: VectorField) -> Self {
        Self {
            times: vec![0.0],
            fields: vec![v],
        }
    }

    pub fn zero(grid: Grid) -> Self {
        Self::constant(VectorField::zeros(grid))
    }

    pub fn grid(&self) -> &Grid {
        self.fields[0].grid()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn samples(&self) -> &[VectorField] {
        &self.fields
    }

    pub fn is_constant(&self) -> bool {
        self.times.len() == 1
    }

    pub fn at(&self, t: f64) -> Result<VectorField> {
        if self.is_constant() {
            return Ok(self.fields[0].clone());
        }
        let (lo, w) = locate(&self.times, t)?;
        if w == 0.0 {
            return Ok(self.fields[lo].clone());
        }
        self.fields[lo].lerp(&self.fields[lo + 1], w)
    }

    /// `‖v(t)‖_∞` at every sample.
    pub fn max_speed(&self) -> f64 {
        self.fields
            .iter()
            .map(|v| v.max_magnitude())
            .fold(0.0, f64::max)
    }
}

/// Scalar samples in time (forcing), linearly interpolated in between.
#[derive(Debug, Clone)]
pub struct FieldSeries {
    times: Vec<f64>,
    fields: Vec<Field>,
}

impl FieldSeries {
    pub fn new(times: Vec<f64>, fields: Vec<Field>) -> Result<Self> {
        check_times(&times, fields.len())?;
        let g = *fields[0].grid();
        if fields.iter().any(|f| *f.grid() != g) {
            return Err(Error::GridMismatch);
        }
        Ok(Self { times, fields })
    }

    pub fn constant(f: Field) -> Self {
        Self {
            times: vec![0.0],
            fields: vec![f],
        }
    }

    pub fn grid(&self) -> &Grid {
        self.fields[0].grid()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn samples(&self) -> &[Field] {
        &self.fields
    }

    pub fn at(&self, t: f64) -> Result<Field> {
        if self.times.len() == 1 {
            return Ok(self.fields[0].clone());
        }
        let (lo, w) = locate(&self.times, t)?;
        if w == 0.0 {
            return Ok(self.fields[lo].clone());
        }
        let (a, b) = (&self.fields[lo], &self.fields[lo + 1]);
        a.zip_with(b, |x, y| (1.0 - w) * x + w * y)
    }

    fn covers(&self, t_end: f64) -> Result<()> {
        if self.times.len() > 1 {
            locate(&self.times, 0.0)?;
            locate(&self.times, t_end)?;
        }
        Ok(())
    }
}

/// Solves `∂_t θ + v·∇θ + νΛ^α θ = f` with prescribed `v` and `f`.
pub fn linear_td_solve(
    v: &VelocitySeries,
    theta0: &Field,
    f: Option<&FieldSeries>,
    cfg: &SolverConfig,
) -> Result<Trajectory> {
    cfg.validate()?;
    theta0.check_finite()?;
    let grid = *theta0.grid();
    if *v.grid() != grid {
        return Err(Error::GridMismatch);
    }
    if v.samples()[0].dim() != grid.dim() {
        return Err(Error::DimMismatch {
            expected: grid.dim(),
            got: v.samples()[0].dim(),
        });
    }
    if !v.is_constant() {
        locate(v.times(), 0.0)?;
        locate(v.times(), cfg.t_end)?;
    }
    if let Some(f) = f {
        if *f.grid() != grid {
            return Err(Error::GridMismatch);
        }
        f.covers(cfg.t_end)?;
    }
    let ops = SpectralOps::new(grid, cfg.alpha);
    let forcing: Option<Vec<(f64, Vec<Complex64>)>> = f.map(|f| {
        f.times()
            .iter()
            .zip(f.samples())
            .map(|(&t, s)| (t, ops.to_spectral(s.samples())))
            .collect()
    });
    let rhs = |w: &[Complex64], t: f64| -> Result<Vec<Complex64>> {
        let vel = v.at(t)?;
        let comps: Vec<Vec<f64>> = vel
            .components()
            .iter()
            .map(|c| c.samples().to_vec())
            .collect();
        let mut out = ops.advection(w, &comps, cfg.dealias);
        if let Some(fs) = &forcing {
            let fh = interpolate_spectral(fs, t)?;
            for (o, g) in out.iter_mut().zip(fh) {
                *o += g;
            }
        }
        Ok(out)
    };
    let speed = v.max_speed();
    let rule = StepRule::from_config(cfg, &grid, move |_w: &[Complex64]| Ok(speed));
    advance(&ops, theta0, cfg, rule, rhs)
}

fn interpolate_spectral(fs: &[(f64, Vec<Complex64>)], t: f64) -> Result<Vec<Complex64>> {
    if fs.len() == 1 {
        return Ok(fs[0].1.clone());
    }
    let times: Vec<f64> = fs.iter().map(|(t, _)| *t).collect();
    let (lo, w) = locate(&times, t)?;
    if w == 0.0 {
        return Ok(fs[lo].1.clone());
    }
    Ok(fs[lo]
        .1
        .iter()
        .zip(&fs[lo + 1].1)
        .map(|(a, b)| a * (1.0 - w) + b * w)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::solver::heat_semigroup;

    #[test]
    fn interpolation() {
        let g = Grid::periodic(2, 8).unwrap();
        let a = VectorField::uniform(g, &[1.0, 0.0]).unwrap();
        let b = VectorField::uniform(g, &[3.0, 2.0]).unwrap();
        let s = VelocitySeries::new(vec![0.0, 1.0], vec![a, b]).unwrap();
        let m = s.at(0.25).unwrap();
        assert!((m.component(0).samples()[5] - 1.5).abs() < 1e-15);
        assert!((m.component(1).samples()[5] - 0.5).abs() < 1e-15);
        assert!(matches!(s.at(1.5), Err(Error::TimeOutOfRange { .. })));
    }

    #[test]
    fn zero_velocity_is_heat() {
        let g = Grid::periodic(2, 32).unwrap();
        let th = corpus::random_smooth(g, 6.0, 1.0, 3);
        let cfg = SolverConfig::new(1.0, 1.0, 0.5).with_dt(1e-2);
        let traj = linear_td_solve(&VelocitySeries::zero(g), &th, None, &cfg).unwrap();
        let exact = heat_semigroup(&th, 0.5, 1.0, 1.0).unwrap();
        assert!((traj.final_time().unwrap() - 0.5).abs() < 1e-14);
        assert!(traj.final_state().unwrap().max_diff(&exact).unwrap() < 1e-10);
    }

    #[test]
    fn uniform_translation() {
        let g = Grid::periodic(2, 32).unwrap();
        let th = Field::from_fn(g, |x| (x[0]).sin() + 0.5 * (2.0 * x[1]).cos());
        let u = [0.7, -0.4];
        let cfg = SolverConfig::new(0.5, 1.0, 1.0).with_dt(1e-3);
        let v = VelocitySeries::constant(VectorField::uniform(g, &u).unwrap());
        let traj = linear_td_solve(&v, &th, None, &cfg).unwrap();
        let exact = Field::from_fn(g, |x| {
            (-0.5f64).exp() * (x[0] - u[0]).sin()
                + 0.5 * (-1.0f64).exp() * (2.0 * (x[1] - u[1])).cos()
        });
        assert!(traj.final_state().unwrap().max_diff(&exact).unwrap() < 1e-6);
    }

    #[test]
    fn out_of_range_velocity_rejected() {
        let g = Grid::periodic(2, 8).unwrap();
        let a = VectorField::zeros(g);
        let s = VelocitySeries::new(vec![0.0, 0.5], vec![a.clone(), a]).unwrap();
        let cfg = SolverConfig::new(1.0, 1.0, 1.0).with_dt(0.1);
        assert!(matches!(
            linear_td_solve(&s, &Field::zeros(g), None, &cfg),
            Err(Error::TimeOutOfRange { .. })
        ));
    }
}
