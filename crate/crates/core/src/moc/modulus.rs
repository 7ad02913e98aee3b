use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// The explicit bounded modulus
///
/// ```text
/// ω(x) = x − x^{3/2}                                          x ≤ δ
/// ω(x) = δ − δ^{3/2} + (γ/3)·arctan((1 + log(x/δ))/3) − (γ/3)·arctan(1/3)   x ≥ δ
/// ```
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModulusKNV {
    delta: f64,
    gamma: f64,
}

impl ModulusKNV {
    pub fn new(delta: f64, gamma: f64) -> Result<Self> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::OutOfRange {
                name: "delta",
                value: delta,
                range: "(0, 1)",
            });
        }
        if !(gamma > 0.0 && gamma < delta) {
            return Err(Error::OutOfRange {
                name: "gamma",
                value: gamma,
                range: "(0, delta)",
            });
        }
        // ω′ may only fall across the seam, otherwise ω is convex there
        let (left, right) = (1.0 - 1.5 * delta.sqrt(), gamma / (10.0 * delta));
        if left < right {
            return Err(Error::InvalidArgument(format!(
                "delta = {delta}: slope {left} left of the seam is below {right} right of it, so omega is not concave"
            )));
        }
        Ok(Self { delta, gamma })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    fn seam(&self) -> f64 {
        self.delta - self.delta.powf(1.5)
    }

    /// `ω(x)`; panics-free for `x ≥ 0`, NaN for negative input.
    pub fn value(&self, x: f64) -> f64 {
        if x <= self.delta {
            x - x.powf(1.5)
        } else {
            let l = 1.0 + (x / self.delta).ln();
            self.seam() + self.gamma / 3.0 * ((l / 3.0).atan() - (1.0f64 / 3.0).atan())
        }
    }

    /// `ω′(x)`; at `x = δ` this is the right derivative.
    pub fn derivative(&self, x: f64) -> f64 {
        if x < self.delta {
            1.0 - 1.5 * x.sqrt()
        } else {
            self.right_derivative(x)
        }
    }

    pub fn left_derivative(&self, x: f64) -> f64 {
        if x <= self.delta {
            1.0 - 1.5 * x.sqrt()
        } else {
            self.right_derivative(x)
        }
    }

    pub fn right_derivative(&self, x: f64) -> f64 {
        if x < self.delta {
            return 1.0 - 1.5 * x.sqrt();
        }
        let l = 1.0 + (x / self.delta).ln();
        self.gamma / (x * (9.0 + l * l))
    }

    /// `ω″(x)` away from the kink.
    pub fn second_derivative(&self, x: f64) -> f64 {
        if x < self.delta {
            -0.75 / x.sqrt()
        } else {
            let l = 1.0 + (x / self.delta).ln();
            let q = 9.0 + l * l;
            -self.gamma * (q + 2.0 * l) / (x * x * q * q)
        }
    }

    /// `ω(∞) = δ − δ^{3/2} + (γ/3)(π/2 − arctan(1/3))`.
    pub fn sup(&self) -> f64 {
        self.seam() + self.gamma / 3.0 * (FRAC_PI_2 - (1.0f64 / 3.0).atan())
    }

    /// Inverse of `ω` on `[0, ω(∞))`.
    pub fn inverse(&self, y: f64) -> Result<f64> {
        let sup = self.sup();
        if !(y >= 0.0 && y < sup) {
            return Err(Error::OutOfRange {
                name: "omega value",
                value: y,
                range: "[0, omega(inf))",
            });
        }
        if y <= self.seam() {
            // x − x^{3/2} is increasing on [0, δ] for δ < 4/9; bisection is enough.
            return Ok(bisect(|x| self.value(x) - y, 0.0, self.delta));
        }
        let t = 3.0 * (y - self.seam()) / self.gamma + (1.0f64 / 3.0).atan();
        Ok(self.delta * (3.0 * t.tan() - 1.0).exp())
    }

    pub fn generic(&self) -> GenericModulus {
        let m = *self;
        GenericModulus::new(move |x| m.value(x), move |x| m.derivative(x))
            .with_kinks(vec![self.delta])
            .with_sup(self.sup())
            .with_name(format!("knv(delta={}, gamma={})", self.delta, self.gamma))
    }
}

fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if f(m) > 0.0 {
            b = m;
        } else {
            a = m;
        }
        if b - a <= 1e-16 * b {
            break;
        }
    }
    0.5 * (a + b)
}

/// `(ω(ξ), ω′(ξ))`, with the right derivative at the kink.
pub fn omega_eval(m: &ModulusKNV, xi: f64) -> Result<(f64, f64)> {
    if !(xi >= 0.0) {
        return Err(Error::OutOfRange {
            name: "xi",
            value: xi,
            range: "[0, inf)",
        });
    }
    Ok((m.value(xi), m.derivative(xi)))
}

/// Unbounded double-log comparison modulus `δ − δ^{3/2} + γ log(1 + ¼ log(x/δ))`
/// beyond `δ`.
pub fn omega_knv_doublelog(delta: f64, gamma: f64, xi: f64) -> Result<f64> {
    ModulusKNV::new(delta, gamma)?;
    if !(xi >= 0.0) {
        return Err(Error::OutOfRange {
            name: "xi",
            value: xi,
            range: "[0, inf)",
        });
    }
    if xi <= delta {
        Ok(xi - xi.powf(1.5))
    } else {
        Ok(delta - delta.powf(1.5) + gamma * (1.0 + 0.25 * (xi / delta).ln()).ln())
    }
}

type Scalar = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A modulus of continuity given by evaluators.
///
/// `kinks` are points where `ω′` may jump; they are passed to quadrature
/// as breakpoints. `sup` is a known bound `ω ≤ ω(∞)` when finite.
#[derive(Clone)]
pub struct GenericModulus {
    value: Scalar,
    derivative: Scalar,
    kinks: Vec<f64>,
    sup: Option<f64>,
    name: String,
}

impl fmt::Debug for GenericModulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GenericModulus")
            .field("name", &self.name)
            .field("kinks", &self.kinks)
            .field("sup", &self.sup)
            .finish()
    }
}

impl GenericModulus {
    pub fn new(
        value: impl Fn(f64) -> f64 + Send + Sync + 'static,
        derivative: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            value: Arc::new(value),
            derivative: Arc::new(derivative),
            kinks: Vec::new(),
            sup: None,
            name: "custom".into(),
        }
    }

    pub fn with_kinks(mut self, kinks: Vec<f64>) -> Self {
        self.kinks = kinks;
        self
    }

    pub fn with_sup(mut self, sup: f64) -> Self {
        self.sup = Some(sup);
        self
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// `ω(s) = s`.
    pub fn linear() -> Self {
        Self::new(|s| s, |_| 1.0).with_name("linear")
    }

    /// `ω(s) = min(s, c)`.
    pub fn min_linear(c: f64) -> Self {
        Self::new(move |s| s.min(c), move |s| if s < c { 1.0 } else { 0.0 })
            .with_kinks(vec![c])
            .with_sup(c)
            .with_name(format!("min(s, {c})"))
    }

    /// `s ↦ ω(λ s)`.
    pub fn scaled(&self, lambda: f64) -> Self {
        let (v, d) = (self.value.clone(), self.derivative.clone());
        Self {
            value: Arc::new(move |s| v(lambda * s)),
            derivative: Arc::new(move |s| lambda * d(lambda * s)),
            kinks: self.kinks.iter().map(|k| k / lambda).collect(),
            sup: self.sup,
            name: format!("{}(λ={lambda})", self.name),
        }
    }

    pub fn value(&self, s: f64) -> f64 {
        (self.value)(s)
    }

    pub fn derivative(&self, s: f64) -> f64 {
        (self.derivative)(s)
    }

    pub fn kinks(&self) -> &[f64] {
        &self.kinks
    }

    pub fn sup(&self) -> Option<f64> {
        self.sup
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Checks concavity through slopes of consecutive chords on a log grid
    /// over `[lo, hi]`: slope increases beyond `tol·|slope|` are rejected.
    pub fn check_concave(&self, lo: f64, hi: f64, points: usize) -> Result<()> {
        let points = points.max(3);
        let xs: Vec<f64> = (0..points)
            .map(|i| lo * (hi / lo).powf(i as f64 / (points - 1) as f64))
            .collect();
        let mut grid = vec![0.0];
        grid.extend(xs);
        let ys: Vec<f64> = grid.iter().map(|&x| self.value(x)).collect();
        let slopes: Vec<f64> = grid
            .windows(2)
            .zip(ys.windows(2))
            .map(|(x, y)| (y[1] - y[0]) / (x[1] - x[0]))
            .collect();
        for (i, w) in slopes.windows(2).enumerate() {
            let jump = w[1] - w[0];
            if jump > 1e-9 * w[0].abs().max(w[1].abs()) + 1e-300 {
                return Err(Error::NotConcave {
                    at: grid[i + 1],
                    second_difference: jump,
                });
            }
        }
        Ok(())
    }

    /// Diagnosis for the improper tails: `ω(s)/s` must decay.
    pub(crate) fn check_sublinear(&self, xi: f64) -> Result<()> {
        if self.sup.is_some() {
            return Ok(());
        }
        let far = xi * 1e12;
        let ratio = (self.value(far) / far) / (self.value(xi) / xi);
        if !(ratio < 1e-3) {
            return Err(Error::InvalidArgument(format!(
                "modulus {} is not sublinear (omega(s)/s ratio {ratio:e} over twelve decades); tail integral diverges",
                self.name
            )));
        }
        Ok(())
    }
}
