//! Browser demo: a 2D porous-media run drawn on a canvas, its
//! Littlewood–Paley block norms, and the breakthrough margin curve of the
//! explicit modulus. Build with
//! `wasm-pack build crates/demo --target web --out-dir www/pkg` and serve
//! `crates/demo/www`.
//!
//! Every export is a thin wrapper over a plain function so the logic is
//! tested natively.

use ipm_core::corpus::random_smooth;
use ipm_core::lp::{block_norms, decompose, CutoffFamily};
use ipm_core::moc::{margin_report, xi_grid, ModulusKNV};
use ipm_core::multiplier::grad_linf;
use ipm_core::solver::{simulate, SolverConfig};
use ipm_core::{Exponent, Field, Grid};
use wasm_bindgen::prelude::*;

fn js(e: ipm_core::Error) -> JsError {
    JsError::new(&e.to_string())
}

/// `(ξ, margin)` on the log grid `[1e-6 δ, 1e6 δ]`.
pub fn margin_points(
    delta: f64,
    gamma: f64,
    nu: f64,
    cmult: f64,
    points: usize,
) -> ipm_core::Result<Vec<(f64, f64)>> {
    let m = ModulusKNV::new(delta, gamma)?;
    let r = margin_report(&m, nu, cmult, &xi_grid(delta, points))?;
    Ok(r.xi.into_iter().zip(r.margin).collect())
}

/// Margin curve flattened as `[ξ₀, m₀, ξ₁, m₁, ...]`.
#[wasm_bindgen]
pub fn margin_curve(
    delta: f64,
    gamma: f64,
    nu: f64,
    cmult: f64,
    points: usize,
) -> Result<Vec<f64>, JsError> {
    let pts = margin_points(delta, gamma, nu, cmult, points).map_err(js)?;
    Ok(pts.into_iter().flat_map(|(x, m)| [x, m]).collect())
}

/// Nonlinear 2D run with critical dissipation, advanced on demand.
#[wasm_bindgen]
pub struct Simulation {
    theta: Field,
    t: f64,
    nu: f64,
}

impl Simulation {
    pub fn try_new(n: usize, seed: u32, amplitude: f64, nu: f64) -> ipm_core::Result<Self> {
        let grid = Grid::periodic(2, n)?;
        Ok(Self {
            theta: random_smooth(grid, 6.0, amplitude, seed as u64),
            t: 0.0,
            nu,
        })
    }

    pub fn try_advance(&mut self, duration: f64) -> ipm_core::Result<()> {
        let mut cfg = SolverConfig::new(self.nu, 1.0, duration).with_record_every(usize::MAX);
        cfg.dt_max = Some(duration.min(0.05));
        let traj = simulate(&self.theta, &cfg)?;
        if let Some(tr) = &traj.truncated {
            return Err(ipm_core::Error::BlowUp {
                t: self.t + tr.t,
                reason: tr.reason.clone(),
            });
        }
        self.theta = traj.final_state().expect("states are stored").clone();
        self.t += duration;
        Ok(())
    }

    pub fn block_pairs(&self) -> ipm_core::Result<Vec<(i32, f64)>> {
        let cf = CutoffFamily::for_grid(self.theta.grid());
        let d = decompose(&self.theta, &cf)?;
        Ok(block_norms(&d, Exponent::INFINITY).into_iter().collect())
    }

    pub fn state(&self) -> &Field {
        &self.theta
    }
}

#[wasm_bindgen]
impl Simulation {
    #[wasm_bindgen(constructor)]
    pub fn new(n: usize, seed: u32, amplitude: f64, nu: f64) -> Result<Simulation, JsError> {
        Self::try_new(n, seed, amplitude, nu).map_err(js)
    }

    pub fn advance(&mut self, duration: f64) -> Result<(), JsError> {
        self.try_advance(duration).map_err(js)
    }

    /// Row-major samples, `n × n`.
    pub fn field(&self) -> Vec<f64> {
        self.theta.samples().to_vec()
    }

    pub fn n(&self) -> usize {
        self.theta.grid().n()
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn grad_linf(&self) -> Result<f64, JsError> {
        grad_linf(&self.theta).map_err(js)
    }

    /// `[j, ‖Δ_j θ‖_∞, ...]` over the block range of the grid.
    pub fn block_norms(&self) -> Result<Vec<f64>, JsError> {
        let pairs = self.block_pairs().map_err(js)?;
        Ok(pairs.into_iter().flat_map(|(j, v)| [j as f64, v]).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn margin_is_negative_for_a_certified_pair() {
        let pts = margin_points(1e-2, 1e-3, 1.0, 1.0, 40).unwrap();
        assert_eq!(pts.len(), 40);
        assert!(pts.iter().all(|&(_, m)| m < 0.0));
        assert!(pts.windows(2).all(|w| w[0].0 < w[1].0));
    }

    #[test]
    fn bad_modulus_is_an_error() {
        assert!(margin_points(1e-2, 2e-2, 1.0, 1.0, 10).is_err());
    }

    #[test]
    fn simulation_decays_and_keeps_mean() {
        let mut s = Simulation::try_new(32, 3, 1.0, 1.0).unwrap();
        let e0 = s.state().norm(Exponent::finite(2));
        s.try_advance(0.1).unwrap();
        s.try_advance(0.1).unwrap();
        assert!((s.time() - 0.2).abs() < 1e-15);
        assert!(s.state().norm(Exponent::finite(2)) < e0);
        assert!(s.state().mean().abs() < 1e-14);
        assert_eq!(s.field().len(), 32 * 32);
    }

    #[test]
    fn block_norms_cover_the_field() {
        let s = Simulation::try_new(32, 5, 1.0, 1.0).unwrap();
        let pairs = s.block_pairs().unwrap();
        let sum: f64 = pairs.iter().map(|(_, v)| v).sum();
        assert!(sum >= s.state().max_abs() * (1.0 - 1e-12));
        // modes stop at |k| = 6, so blocks beyond 3 are empty
        assert!(pairs
            .iter()
            .filter(|(j, _)| *j > 3)
            .all(|(_, v)| *v < 1e-12));
    }
}
