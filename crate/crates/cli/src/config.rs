//! JSON run configuration. Unknown keys are rejected and every error
//! carries the path of the offending key.

use std::f64::consts::PI;

use ipm_core::lp::BesovIndex;
use ipm_core::moc::ModulusKNV;
use ipm_core::solver::{SolverConfig, TimeStep};
use ipm_core::{Exponent, Grid};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Simulate,
    Picard,
    MocScan,
    MocVerify,
    Besov,
    KernelCheck,
    Apriori,
}

/// `p` or `q`: a number `>= 1` or the string `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ExponentSpec {
    Finite(f64),
    Named(InfTag),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InfTag {
    Inf,
}

impl ExponentSpec {
    pub fn to_exponent(self, path: &str) -> CliResult<Exponent> {
        match self {
            ExponentSpec::Named(InfTag::Inf) => Ok(Exponent::INFINITY),
            ExponentSpec::Finite(p) => Exponent::new(p)
                .map_err(|_| CliError::Config(format!("{path}: {p} is outside [1, inf]"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BesovSpec {
    pub s: f64,
    pub p: ExponentSpec,
    pub q: ExponentSpec,
}

impl BesovSpec {
    pub fn to_index(&self, path: &str) -> CliResult<BesovIndex> {
        Ok(BesovIndex::new(
            self.s,
            self.p.to_exponent(&format!("{path}.p"))?,
            self.q.to_exponent(&format!("{path}.q"))?,
        ))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    #[serde(default = "default_dim")]
    pub dim: usize,
    pub n: usize,
    #[serde(default = "default_period")]
    pub period: f64,
}

fn default_dim() -> usize {
    3
}

fn default_period() -> f64 {
    2.0 * PI
}

/// Initial data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InitialSpec {
    /// `amplitude · sin(x_dim)`.
    Stratified {
        amplitude: f64,
    },
    RandomSmooth {
        kmax: f64,
        amplitude: f64,
        seed: u64,
    },
    GaussianBump {
        sigma: f64,
        amplitude: f64,
    },
    Snapshot {
        path: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DtSpec {
    Fixed(f64),
    Named(AutoTag),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AutoTag {
    Auto,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSpec {
    pub nu: f64,
    #[serde(default = "one")]
    pub alpha: f64,
    pub t_end: f64,
    #[serde(default = "auto")]
    pub dt: DtSpec,
    #[serde(default)]
    pub dt_max: Option<f64>,
    #[serde(default = "half")]
    pub cfl: f64,
    #[serde(default = "yes")]
    pub dealias: bool,
    #[serde(default = "one_usize")]
    pub record_every: usize,
    #[serde(default = "guard")]
    pub blowup_factor: f64,
}

fn one() -> f64 {
    1.0
}
fn half() -> f64 {
    0.5
}
fn yes() -> bool {
    true
}
fn one_usize() -> usize {
    1
}
fn guard() -> f64 {
    1e6
}
fn auto() -> DtSpec {
    DtSpec::Named(AutoTag::Auto)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PicardSpec {
    #[serde(default = "six")]
    pub iterations: usize,
    #[serde(default = "eight")]
    pub max_shrinks: usize,
    #[serde(default = "one")]
    pub contraction: f64,
    #[serde(default)]
    pub index: Option<BesovSpec>,
}

fn six() -> usize {
    6
}
fn eight() -> usize {
    8
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MocSpec {
    #[serde(default = "one")]
    pub nu: f64,
    #[serde(default = "one")]
    pub cmult: f64,
    /// Single pair for `moc-verify`.
    #[serde(default)]
    pub delta: Option<f64>,
    #[serde(default)]
    pub gamma: Option<f64>,
    /// Grids for `moc-scan`.
    #[serde(default)]
    pub deltas: Vec<f64>,
    #[serde(default)]
    pub gammas: Vec<f64>,
    #[serde(default = "two_hundred")]
    pub points: usize,
}

fn two_hundred() -> usize {
    200
}

/// Frozen velocity for `apriori` runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum VelocitySpec {
    Zero,
    Uniform {
        value: Vec<f64>,
    },
    RandomSolenoidal {
        kmax: f64,
        amplitude: f64,
        seed: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AprioriSpecJson {
    pub velocity: VelocitySpec,
    pub r: ExponentSpec,
    #[serde(default = "r1_default")]
    pub r1: ExponentSpec,
    pub index: BesovSpec,
}

fn r1_default() -> ExponentSpec {
    ExponentSpec::Finite(1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelSpec {
    #[serde(default = "kernel_n")]
    pub n: usize,
    #[serde(default = "kernel_tol")]
    pub tol: f64,
    #[serde(default = "four")]
    pub stride: usize,
    #[serde(default = "sigma")]
    pub sigma: f64,
}

fn kernel_n() -> usize {
    64
}
fn kernel_tol() -> f64 {
    1e-6
}
fn four() -> usize {
    4
}
fn sigma() -> f64 {
    0.4
}

impl Default for KernelSpec {
    fn default() -> Self {
        Self {
            n: kernel_n(),
            tol: kernel_tol(),
            stride: four(),
            sigma: sigma(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub mode: Mode,
    #[serde(default)]
    pub grid: Option<GridSpec>,
    #[serde(default)]
    pub initial: Option<InitialSpec>,
    #[serde(default)]
    pub solver: Option<SolverSpec>,
    /// Besov norms recorded in the time series.
    #[serde(default)]
    pub besov: Vec<BesovSpec>,
    #[serde(default)]
    pub picard: Option<PicardSpec>,
    #[serde(default)]
    pub moc: Option<MocSpec>,
    #[serde(default)]
    pub apriori: Option<AprioriSpecJson>,
    #[serde(default)]
    pub kernel: Option<KernelSpec>,
}

fn missing(key: &str) -> CliError {
    CliError::Config(format!("{key}: required for this mode"))
}

fn range(path: &str, value: f64, ok: bool, want: &str) -> CliResult<()> {
    if ok {
        Ok(())
    } else {
        Err(CliError::Config(format!(
            "{path}: {value} is outside {want}"
        )))
    }
}

/// Parses and validates a JSON config.
pub fn parse_config(text: &str) -> CliResult<RunConfig> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let cfg: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        CliError::Config(format!("{path}: {}", e.inner()))
    })?;
    cfg.validate()?;
    Ok(cfg)
}

impl RunConfig {
    pub fn validate(&self) -> CliResult<()> {
        if let Some(g) = &self.grid {
            self.grid_from(g)?;
        }
        if let Some(s) = &self.solver {
            range(
                "solver.nu",
                s.nu,
                s.nu.is_finite() && s.nu > 0.0,
                "(0, inf)",
            )?;
            range(
                "solver.alpha",
                s.alpha,
                s.alpha > 0.0 && s.alpha <= 2.0,
                "[0, 2] (alpha = 0 excluded)",
            )?;
            range(
                "solver.t_end",
                s.t_end,
                s.t_end.is_finite() && s.t_end > 0.0,
                "(0, inf)",
            )?;
            range("solver.cfl", s.cfl, s.cfl > 0.0 && s.cfl <= 1.0, "(0, 1]")?;
            if let DtSpec::Fixed(dt) = s.dt {
                range("solver.dt", dt, dt.is_finite() && dt > 0.0, "(0, inf)")?;
            }
            if s.record_every == 0 {
                return Err(CliError::Config("solver.record_every: must be >= 1".into()));
            }
        }
        for (i, b) in self.besov.iter().enumerate() {
            b.to_index(&format!("besov[{i}]"))?;
        }
        if let Some(m) = &self.moc {
            range("moc.nu", m.nu, m.nu > 0.0, "(0, inf)")?;
            range("moc.cmult", m.cmult, m.cmult > 0.0, "(0, inf)")?;
            if let (Some(d), Some(g)) = (m.delta, m.gamma) {
                ModulusKNV::new(d, g).map_err(|e| {
                    let key = match &e {
                        ipm_core::Error::OutOfRange { name, .. } => *name,
                        _ => "delta",
                    };
                    CliError::Config(format!("moc.{key}: {e}"))
                })?;
            }
            if m.points < 2 {
                return Err(CliError::Config("moc.points: need at least 2".into()));
            }
        }
        if let Some(k) = &self.kernel {
            range("kernel.tol", k.tol, k.tol > 0.0, "(0, inf)")?;
            if k.stride == 0 {
                return Err(CliError::Config("kernel.stride: must be >= 1".into()));
            }
        }
        match self.mode {
            Mode::Simulate | Mode::Picard | Mode::Apriori => {
                self.grid.as_ref().ok_or_else(|| missing("grid"))?;
                self.initial.as_ref().ok_or_else(|| missing("initial"))?;
                self.solver.as_ref().ok_or_else(|| missing("solver"))?;
                if self.mode == Mode::Apriori {
                    self.apriori.as_ref().ok_or_else(|| missing("apriori"))?;
                }
            }
            Mode::MocScan => {
                let m = self.moc.as_ref().ok_or_else(|| missing("moc"))?;
                if m.deltas.is_empty() || m.gammas.is_empty() {
                    return Err(missing("moc.deltas and moc.gammas"));
                }
            }
            Mode::MocVerify => {
                let m = self.moc.as_ref().ok_or_else(|| missing("moc"))?;
                m.delta.ok_or_else(|| missing("moc.delta"))?;
                m.gamma.ok_or_else(|| missing("moc.gamma"))?;
            }
            Mode::Besov => {
                if self.besov.is_empty() {
                    return Err(missing("besov"));
                }
                match &self.initial {
                    Some(InitialSpec::Snapshot { .. }) => {}
                    _ => return Err(missing("initial (kind = snapshot)")),
                }
            }
            Mode::KernelCheck => {}
        }
        Ok(())
    }

    pub fn grid_from(&self, g: &GridSpec) -> CliResult<Grid> {
        Grid::new(g.dim, g.n, g.period).map_err(|e| CliError::Config(format!("grid: {e}")))
    }

    pub fn grid(&self) -> CliResult<Grid> {
        self.grid_from(self.grid.as_ref().ok_or_else(|| missing("grid"))?)
    }

    pub fn besov_indices(&self) -> CliResult<Vec<BesovIndex>> {
        self.besov
            .iter()
            .enumerate()
            .map(|(i, b)| b.to_index(&format!("besov[{i}]")))
            .collect()
    }

    pub fn solver_config(&self) -> CliResult<SolverConfig> {
        let s = self.solver.as_ref().ok_or_else(|| missing("solver"))?;
        let mut c = SolverConfig::new(s.nu, s.alpha, s.t_end);
        if let DtSpec::Fixed(dt) = s.dt {
            c.dt = TimeStep::Fixed(dt);
        }
        c.dt_max = s.dt_max;
        c.cfl = s.cfl;
        c.dealias = s.dealias;
        c.record_every = s.record_every;
        c.blowup_factor = s.blowup_factor;
        c.besov = self.besov_indices()?;
        c.validate()
            .map_err(|e| CliError::Config(format!("solver: {e}")))?;
        Ok(c)
    }

    /// Canonical JSON (defaults filled in), the input of the config hash.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }
}
