//! Runs one configured mode, writes its tables and a manifest.

use std::path::{Path, PathBuf};
use std::time::Instant;

use ipm_core::corpus;
use ipm_core::diagnostics::{apriori_ratio, blowup_integral, AprioriSpec};
use ipm_core::kernel::bump_kernel_check;
use ipm_core::lp::{besov_norm, CutoffFamily};
use ipm_core::moc::{
    default_case_samples, margin_report, scan_negativity, verify_case_bounds, xi_grid, ModulusKNV,
};
use ipm_core::solver::{linear_td_solve, picard_iterate, simulate, PicardConfig, VelocitySeries};
use ipm_core::{Field, Grid, VectorField};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::{InitialSpec, Mode, RunConfig, VelocitySpec};
use crate::error::{CliError, CliResult};
use crate::export::{
    blocks_csv, bounds_csv, margin_csv, picard_csv, real, scan_csv, timeseries_csv, write_atomic,
};
use crate::snapshot::{load_snapshot, save_snapshot, SnapshotMeta};

/// Relative L² agreement required of the kernel check.
pub const KERNEL_ACCEPT: f64 = 1e-2;

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub mode: Mode,
    pub config_hash: String,
    pub code_version: String,
    pub wall_time_s: f64,
    pub status: String,
    pub summary: String,
    pub outputs: Vec<String>,
    pub paper_anchors: Vec<String>,
}

/// What a successful or certified-failing run produced.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub outputs: Vec<PathBuf>,
    pub summary: String,
}

struct Run<'a> {
    out: &'a Path,
    outputs: Vec<PathBuf>,
}

impl Run<'_> {
    fn write(&mut self, name: &str, contents: &[u8]) -> CliResult<()> {
        let path = self.out.join(name);
        write_atomic(&path, contents)?;
        self.outputs.push(path);
        Ok(())
    }
}

pub fn config_hash(cfg: &RunConfig) -> String {
    let digest = Sha256::digest(cfg.canonical_json().as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

fn anchors(mode: Mode) -> Vec<String> {
    let a: &[&str] = match mode {
        Mode::Simulate => &[
            "IPM equation with fractional dissipation: θ_t + u·∇θ + νΛ^αθ = 0",
            "blow-up criterion: ∫‖∇θ(t)‖_{L^∞} dt < ∞",
        ],
        Mode::Picard => &[
            "Picard scheme: u^k·∇θ^{k+1} + νΛθ^{k+1} = 0 with θ⁰ = e^{−νtΛ}θ₀",
            "contraction of successive differences: ε^{m+1}‖θ₀‖",
        ],
        Mode::MocScan => &["breakthrough margin: Cλ[(ω+Ω)ω′+J](λξ) < 0, scanned over (δ, γ)"],
        Mode::MocVerify => &[
            "breakthrough margin: Cλ[(ω+Ω)ω′+J](λξ) < 0",
            "two-case bounds for ξ ≤ δ and ξ ≥ δ, up to Cγ − 16ν/9π < 0",
        ],
        Mode::Besov => &["homogeneous Besov norm: (Σ_j 2^{jsq}‖Δ_j f‖_p^q)^{1/q}"],
        Mode::KernelCheck => {
            &["Darcy velocity law: u = −(2/3)θe₃ − (1/4π) P.V.∫K(x−y)θ(y)dy, K₁ = 3x₁x₃/|x|⁵"]
        }
        Mode::Apriori => &["transport-diffusion a priori estimate with Z(T) = ∫‖∇v(t)‖_∞ dt"],
    };
    a.iter().map(|s| s.to_string()).collect()
}

/// Runs `cfg`, writing outputs and `manifest.json` into `out`. The manifest
/// is written for certification and numerical failures too.
pub fn dispatch(cfg: &RunConfig, out: &Path) -> CliResult<Outcome> {
    cfg.validate()?;
    let start = Instant::now();
    let mut run = Run {
        out,
        outputs: Vec::new(),
    };
    let result = match cfg.mode {
        Mode::Simulate => run_simulate(cfg, &mut run),
        Mode::Picard => run_picard(cfg, &mut run),
        Mode::MocScan => run_moc_scan(cfg, &mut run),
        Mode::MocVerify => run_moc_verify(cfg, &mut run),
        Mode::Besov => run_besov(cfg, &mut run),
        Mode::KernelCheck => run_kernel(cfg, &mut run),
        Mode::Apriori => run_apriori(cfg, &mut run),
    };
    let (status, summary) = match &result {
        Ok(s) => ("ok".to_string(), s.clone()),
        Err(e) => (
            match e {
                CliError::Config(_) => "config error",
                CliError::Numerical(_) => "numerical failure",
                CliError::Certification(_) => "certification failure",
                CliError::Io(_) => "io failure",
            }
            .to_string(),
            e.to_string(),
        ),
    };
    let result = match result {
        Err(e @ (CliError::Config(_) | CliError::Io(_))) => return Err(e),
        other => other,
    };
    let outputs: Vec<String> = run
        .outputs
        .iter()
        .map(|p| {
            p.file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_default()
        })
        .collect();
    let manifest = Manifest {
        mode: cfg.mode,
        config_hash: config_hash(cfg),
        code_version: env!("CARGO_PKG_VERSION").to_string(),
        wall_time_s: start.elapsed().as_secs_f64(),
        status,
        summary: summary.clone(),
        outputs,
        paper_anchors: anchors(cfg.mode),
    };
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    let mpath = out.join("manifest.json");
    write_atomic(&mpath, json.as_bytes())?;
    result?;
    let mut outputs = run.outputs;
    outputs.push(mpath);
    Ok(Outcome { outputs, summary })
}

pub fn initial_field(spec: &InitialSpec, grid: Grid) -> CliResult<Field> {
    match spec {
        InitialSpec::Stratified { amplitude } => {
            let a = grid.dim() - 1;
            Ok(Field::from_fn(grid, |x| amplitude * x[a].sin()))
        }
        InitialSpec::RandomSmooth {
            kmax,
            amplitude,
            seed,
        } => Ok(corpus::random_smooth(grid, *kmax, *amplitude, *seed)),
        InitialSpec::GaussianBump { sigma, amplitude } => {
            let c = [0.5 * grid.period(); 3];
            Ok(corpus::gaussian_bump(grid, c, *sigma).scale(*amplitude))
        }
        InitialSpec::Snapshot { path } => {
            let (f, _) = read_snapshot(Path::new(path))?;
            if *f.grid() != grid {
                return Err(CliError::Config(format!(
                    "initial.path: snapshot grid (dim {}, n {}) differs from grid",
                    f.grid().dim(),
                    f.grid().n()
                )));
            }
            Ok(f)
        }
    }
}

pub fn read_snapshot(path: &Path) -> CliResult<(Field, SnapshotMeta)> {
    let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
    load_snapshot(&bytes).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn initial(cfg: &RunConfig) -> CliResult<Field> {
    let spec = cfg.initial.as_ref().expect("validated");
    match spec {
        InitialSpec::Snapshot { path } if cfg.grid.is_none() => {
            Ok(read_snapshot(Path::new(path))?.0)
        }
        _ => initial_field(spec, cfg.grid()?),
    }
}

fn run_simulate(cfg: &RunConfig, run: &mut Run) -> CliResult<String> {
    let sc = cfg.solver_config()?;
    let theta0 = initial(cfg)?;
    let traj = simulate(&theta0, &sc)?;
    run.write(
        "timeseries.csv",
        timeseries_csv(&traj, &sc.besov).as_bytes(),
    )?;
    run.write("blocks.csv", blocks_csv(&traj).as_bytes())?;
    if let (Some(f), Some(t)) = (traj.final_state(), traj.final_time()) {
        let meta = SnapshotMeta {
            t,
            nu: sc.nu,
            alpha: sc.alpha,
        };
        run.write("final.ipms", &save_snapshot(f, meta))?;
    }
    let bi = blowup_integral(&traj)?;
    if let Some(tr) = &traj.truncated {
        return Err(CliError::Numerical(ipm_core::Error::BlowUp {
            t: tr.t,
            reason: tr.reason.clone(),
        }));
    }
    Ok(format!(
        "{} steps to t = {}, blow-up integral {}",
        traj.steps,
        real(traj.final_time().unwrap_or(0.0)),
        real(bi.value)
    ))
}

fn run_picard(cfg: &RunConfig, run: &mut Run) -> CliResult<String> {
    let sc = cfg.solver_config()?;
    let theta0 = initial(cfg)?;
    let ps = cfg.picard.clone().unwrap_or(crate::config::PicardSpec {
        iterations: 6,
        max_shrinks: 8,
        contraction: 1.0,
        index: None,
    });
    let mut pc = PicardConfig::new(ps.iterations);
    pc.max_shrinks = ps.max_shrinks;
    pc.contraction = ps.contraction;
    if let Some(i) = &ps.index {
        pc.index = Some(i.to_index("picard.index")?);
    }
    let (_, report) = picard_iterate(&theta0, &pc, &sc)?;
    run.write("picard.csv", picard_csv(&report).as_bytes())?;
    if !report.contracted {
        return Err(CliError::Certification(format!(
            "non-contraction after {} shrinks (t_end = {}), ratios {:?}",
            report.shrinks, report.t_end, report.ratios
        )));
    }
    Ok(format!(
        "contracted on t_end = {} after {} shrinks; max ratio {}",
        real(report.t_end),
        report.shrinks,
        real(report.ratios.iter().cloned().fold(0.0, f64::max))
    ))
}

fn run_moc_scan(cfg: &RunConfig, run: &mut Run) -> CliResult<String> {
    let m = cfg.moc.as_ref().expect("validated");
    let scan = scan_negativity(m.nu, m.cmult, &m.deltas, &m.gammas, m.points)?;
    run.write("margin.csv", margin_csv(&scan.reports).as_bytes())?;
    run.write("scan.csv", scan_csv(&scan.reports).as_bytes())?;
    match scan.best {
        None => Err(CliError::Certification(format!(
            "empty admissible set over {} pairs",
            scan.reports.len()
        ))),
        Some((d, g, v)) => Ok(format!(
            "{} of {} pairs admissible; most robust (delta, gamma) = ({}, {}) with max margin {}",
            scan.admissible.len(),
            scan.reports.len(),
            real(d),
            real(g),
            real(v)
        )),
    }
}

fn run_moc_verify(cfg: &RunConfig, run: &mut Run) -> CliResult<String> {
    let m = cfg.moc.as_ref().expect("validated");
    let (d, g) = (m.delta.expect("validated"), m.gamma.expect("validated"));
    let modulus = ModulusKNV::new(d, g).map_err(|e| CliError::Config(format!("moc: {e}")))?;
    let report = margin_report(&modulus, m.nu, m.cmult, &xi_grid(d, m.points))?;
    let bounds = verify_case_bounds(&modulus, m.nu, m.cmult, &default_case_samples(d))?;
    run.write(
        "margin.csv",
        margin_csv(std::slice::from_ref(&report)).as_bytes(),
    )?;
    run.write("bounds.csv", bounds_csv(&bounds).as_bytes())?;
    let violations = bounds.violations();
    if !report.admissible || !violations.is_empty() {
        let mut names: Vec<&str> = violations.iter().map(|c| c.name).collect();
        names.dedup();
        return Err(CliError::Certification(format!(
            "max margin {} at xi = {}; {} violated bound samples ({})",
            real(report.max_margin),
            real(report.argmax),
            violations.len(),
            names.join(", ")
        )));
    }
    Ok(format!(
        "max margin {}; all bounds hold",
        real(report.max_margin)
    ))
}

fn run_besov(cfg: &RunConfig, run: &mut Run) -> CliResult<String> {
    let f = initial(cfg)?;
    let cf = CutoffFamily::for_grid(f.grid());
    let mut csv = String::from("s,p,q,norm\n");
    let mut parts = Vec::new();
    for idx in cfg.besov_indices()? {
        let v = besov_norm(&f, idx, &cf)?;
        csv.push_str(&format!(
            "{},{},{},{}\n",
            real(idx.s),
            idx.p,
            idx.q,
            real(v)
        ));
        parts.push(format!("{} = {}", idx.label(), real(v)));
    }
    run.write("besov.csv", csv.as_bytes())?;
    Ok(parts.join("; "))
}

fn run_kernel(cfg: &RunConfig, run: &mut Run) -> CliResult<String> {
    let k = cfg.kernel.clone().unwrap_or_default();
    let grid = Grid::periodic(3, k.n).map_err(|e| CliError::Config(format!("kernel.n: {e}")))?;
    let h = grid.spacing();
    // off-lattice centre so that no target sits on a symmetry plane
    let c = [
        0.5 * grid.period() + 0.25 * h,
        0.5 * grid.period() - 0.5 * h,
        0.5 * grid.period() + 0.375 * h,
    ];
    let check = bump_kernel_check(&grid, c, k.sigma, k.stride, k.tol)?;
    let mut csv = String::from(
        "index,u1_oracle,u2_oracle,u3_oracle,u1_multiplier,u2_multiplier,u3_multiplier\n",
    );
    for ((i, o), m) in check
        .targets
        .iter()
        .zip(&check.oracle)
        .zip(&check.multiplier)
    {
        csv.push_str(&format!(
            "{i},{},{},{},{},{},{}\n",
            real(o[0]),
            real(o[1]),
            real(o[2]),
            real(m[0]),
            real(m[1]),
            real(m[2])
        ));
    }
    run.write("kernel.csv", csv.as_bytes())?;
    let summary = format!(
        "relative L2 difference {} over {} targets (n = {}, tol = {})",
        real(check.relative_l2),
        check.targets.len(),
        k.n,
        k.tol
    );
    if check.relative_l2 > KERNEL_ACCEPT {
        return Err(CliError::Certification(summary));
    }
    Ok(summary)
}

fn velocity(spec: &VelocitySpec, grid: Grid) -> CliResult<VectorField> {
    Ok(match spec {
        VelocitySpec::Zero => VectorField::zeros(grid),
        VelocitySpec::Uniform { value } => {
            if value.len() != grid.dim() {
                return Err(CliError::Config(format!(
                    "apriori.velocity.value: {} components for a {}D grid",
                    value.len(),
                    grid.dim()
                )));
            }
            VectorField::uniform(grid, value)?
        }
        VelocitySpec::RandomSolenoidal {
            kmax,
            amplitude,
            seed,
        } => corpus::random_solenoidal(grid, *kmax, *amplitude, *seed)?,
    })
}

fn run_apriori(cfg: &RunConfig, run: &mut Run) -> CliResult<String> {
    let sc = cfg.solver_config()?;
    let theta0 = initial(cfg)?;
    let a = cfg.apriori.as_ref().expect("validated");
    let v = VelocitySeries::constant(velocity(&a.velocity, *theta0.grid())?);
    let traj = linear_td_solve(&v, &theta0, None, &sc)?;
    let spec = AprioriSpec {
        nu: sc.nu,
        alpha: sc.alpha,
        r: a.r.to_exponent("apriori.r")?,
        r1: a.r1.to_exponent("apriori.r1")?,
        index: a.index.to_index("apriori.index")?,
    };
    let rep = apriori_ratio(&traj, &v, None, &spec)?;
    let csv = format!(
        "lhs,z,data,forcing,ratio\n{},{},{},{},{}\n",
        real(rep.lhs),
        real(rep.z),
        real(rep.data),
        real(rep.forcing),
        real(rep.ratio)
    );
    run.write("apriori.csv", csv.as_bytes())?;
    run.write(
        "timeseries.csv",
        timeseries_csv(&traj, &sc.besov).as_bytes(),
    )?;
    Ok(format!("a priori ratio {}", real(rep.ratio)))
}
