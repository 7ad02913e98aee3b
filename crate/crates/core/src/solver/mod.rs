//! Time integration of the dissipative porous-media equation
//!
//! ```text
//! ∂_t θ + u·∇θ + ν Λ^α θ = 0,    u = u(θ) (Darcy law)
//! ```
//!
//! plus the linear transport-diffusion equation with prescribed velocity,
//! the fractional heat semigroup and the Picard scheme built from them.
//! Diffusion is integrated exactly in Fourier space (integrating factor);
//! advection and forcing use classical RK4 on the transformed variable.

mod linear;
mod nonlinear;
mod ops;
mod picard;

pub use linear::{linear_td_solve, FieldSeries, VelocitySeries};
pub use nonlinear::{simulate, step_nonlinear};
pub use ops::SpectralOps;
pub use picard::{picard_iterate, PicardConfig, PicardReport};

use crate::error::{Error, Result};
use crate::field::{Exponent, Field};
use crate::lp::BesovIndex;
use crate::spectral::{inverse, transform};

/// Floor on the velocity magnitude in the automatic step rule.
pub const VELOCITY_FLOOR: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimeStep {
    /// `dt = cfl · Δx / max(‖u‖_∞, 1e-8)`, capped by `dt_max`.
    Auto,
    Fixed(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub nu: f64,
    pub alpha: f64,
    pub dt: TimeStep,
    /// Upper bound on automatic steps; `None` means `t_end / 64`.
    pub dt_max: Option<f64>,
    pub t_end: f64,
    pub cfl: f64,
    pub dealias: bool,
    pub record_every: usize,
    pub store_states: bool,
    /// Besov norms recorded with every diagnostic row.
    pub besov: Vec<BesovIndex>,
    /// Abort when `‖∇θ‖_∞` exceeds this multiple of its initial value.
    pub blowup_factor: f64,
}

impl SolverConfig {
    pub fn new(nu: f64, alpha: f64, t_end: f64) -> Self {
        Self {
            nu,
            alpha,
            dt: TimeStep::Auto,
            dt_max: None,
            t_end,
            cfl: 0.5,
            dealias: true,
            record_every: 1,
            store_states: true,
            besov: Vec::new(),
            blowup_factor: 1e6,
        }
    }

    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt = TimeStep::Fixed(dt);
        self
    }

    pub fn with_record_every(mut self, every: usize) -> Self {
        self.record_every = every;
        self
    }

    pub fn with_store_states(mut self, store: bool) -> Self {
        self.store_states = store;
        self
    }

    pub fn with_besov(mut self, idx: BesovIndex) -> Self {
        self.besov.push(idx);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.nu.is_finite() && self.nu > 0.0) {
            return Err(Error::OutOfRange {
                name: "nu",
                value: self.nu,
                range: "(0, inf)",
            });
        }
        if !(self.alpha > 0.0 && self.alpha <= 2.0) {
            return Err(Error::OutOfRange {
                name: "alpha",
                value: self.alpha,
                range: "(0, 2]",
            });
        }
        if !(self.t_end.is_finite() && self.t_end > 0.0) {
            return Err(Error::OutOfRange {
                name: "t_end",
                value: self.t_end,
                range: "(0, inf)",
            });
        }
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(Error::OutOfRange {
                name: "cfl",
                value: self.cfl,
                range: "(0, 1]",
            });
        }
        if let TimeStep::Fixed(dt) = self.dt {
            if !(dt.is_finite() && dt > 0.0) {
                return Err(Error::OutOfRange {
                    name: "dt",
                    value: dt,
                    range: "(0, inf)",
                });
            }
        }
        if self.record_every == 0 {
            return Err(Error::InvalidArgument("record_every must be >= 1".into()));
        }
        Ok(())
    }

    pub(crate) fn auto_cap(&self) -> f64 {
        self.dt_max.unwrap_or(self.t_end / 64.0)
    }
}

/// `e^{-ν t Λ^α} f`, exact per Fourier coefficient.
pub fn heat_semigroup(f: &Field, t: f64, nu: f64, alpha: f64) -> Result<Field> {
    if !(t >= 0.0) {
        return Err(Error::OutOfRange {
            name: "t",
            value: t,
            range: "[0, inf)",
        });
    }
    if !(0.0..=2.0).contains(&alpha) {
        return Err(Error::OutOfRange {
            name: "alpha",
            value: alpha,
            range: "[0, 2]",
        });
    }
    let grid = *f.grid();
    let mut sf = transform(f)?;
    for (i, c) in sf.coeffs_mut().iter_mut().enumerate().skip(1) {
        let k = grid.wavevector(i);
        let r = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]).sqrt();
        *c *= (-nu * t * r.powf(alpha)).exp();
    }
    Ok(inverse(&sf))
}

/// Default Besov index for Picard differences and smoothing: `Ḃ^{d/2}_{2,1}`.
pub fn critical_l2_index(dim: usize) -> BesovIndex {
    BesovIndex::critical(dim, Exponent::finite(2), 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::grid::Grid;

    #[test]
    fn heat_examples() {
        let g = Grid::periodic(2, 32).unwrap();
        let f = Field::from_fn(g, |x| (3.0 * x[0]).cos());
        let out = heat_semigroup(&f, 1.0, 1.0, 1.0).unwrap();
        assert!(out.max_diff(&f.scale((-3f64).exp())).unwrap() < 1e-15);
        assert_eq!(
            heat_semigroup(&f, 0.0, 1.0, 1.0)
                .unwrap()
                .max_diff(&f)
                .unwrap()
                < 1e-15,
            true
        );
        assert!(heat_semigroup(&f, -0.1, 1.0, 1.0).is_err());
    }

    #[test]
    fn semigroup_law() {
        let g = Grid::periodic(3, 16).unwrap();
        let f = corpus::random_smooth(g, 7.0, 1.0, 13);
        let two =
            heat_semigroup(&heat_semigroup(&f, 0.3, 1.0, 1.0).unwrap(), 0.7, 1.0, 1.0).unwrap();
        let one = heat_semigroup(&f, 1.0, 1.0, 1.0).unwrap();
        assert!(two.max_diff(&one).unwrap() <= 1e-13);
    }

    #[test]
    fn config_validation() {
        assert!(SolverConfig::new(1.0, 1.0, 1.0).validate().is_ok());
        assert!(SolverConfig::new(0.0, 1.0, 1.0).validate().is_err());
        assert!(SolverConfig::new(1.0, 2.5, 1.0).validate().is_err());
        assert!(SolverConfig::new(1.0, 1.0, 1.0)
            .with_dt(-1.0)
            .validate()
            .is_err());
        assert!(SolverConfig::new(1.0, 1.0, 1.0)
            .with_record_every(0)
            .validate()
            .is_err());
    }
}
