use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ipm_cli::config::{BesovSpec, ExponentSpec, InfTag, InitialSpec, KernelSpec, MocSpec};
use ipm_cli::{dispatch, parse_config, CliError, CliResult, Mode, RunConfig};

#[derive(Parser)]
#[command(
    name = "ipm",
    version,
    about = "Dissipative IPM solver and verification runs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct OutDir {
    /// Output directory
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Nonlinear run from a JSON config
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        out: OutDir,
    },
    /// Picard iteration from a JSON config
    Picard {
        #[arg(long)]
        config: PathBuf,
        /// Number of iterates (overrides the config)
        #[arg(long)]
        iters: Option<usize>,
        #[command(flatten)]
        out: OutDir,
    },
    /// Modulus-of-continuity margin scan and bound verification
    Moc {
        #[command(subcommand)]
        action: MocAction,
    },
    /// Besov norm of a snapshot
    Besov {
        #[arg(long)]
        snapshot: PathBuf,
        #[arg(long)]
        s: f64,
        /// Integrability exponent, a number >= 1 or "inf"
        #[arg(long)]
        p: String,
        /// Summability exponent, a number >= 1 or "inf"
        #[arg(long)]
        q: String,
        #[command(flatten)]
        out: OutDir,
    },
    /// Real-space kernel quadrature against the Fourier velocity
    KernelCheck {
        #[arg(long, default_value_t = 64)]
        n: usize,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        /// Use every stride-th grid point per axis as a target
        #[arg(long, default_value_t = 4)]
        stride: usize,
        #[arg(long, default_value_t = 0.4)]
        sigma: f64,
        #[command(flatten)]
        out: OutDir,
    },
    /// Transport-diffusion a priori ratio from a JSON config
    Apriori {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        out: OutDir,
    },
}

#[derive(Args)]
struct MocCommon {
    #[arg(long, default_value_t = 1.0)]
    nu: f64,
    #[arg(long, default_value_t = 1.0)]
    cmult: f64,
    /// Log-spaced xi samples on [1e-6 delta, 1e6 delta]
    #[arg(long, default_value_t = 200)]
    points: usize,
}

#[derive(Subcommand)]
enum MocAction {
    /// Max margin for every pair gamma < delta of the two grids
    Scan {
        #[command(flatten)]
        common: MocCommon,
        #[arg(long, value_delimiter = ',', default_values_t = [1e-4, 1e-3, 1e-2, 1e-1])]
        delta: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_values_t = [1e-6, 1e-5, 1e-4, 1e-3, 1e-2])]
        gamma: Vec<f64>,
        #[command(flatten)]
        out: OutDir,
    },
    /// Margin and every intermediate bound for one pair
    Verify {
        #[command(flatten)]
        common: MocCommon,
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        gamma: f64,
        #[command(flatten)]
        out: OutDir,
    },
}

fn exponent(s: &str) -> CliResult<ExponentSpec> {
    if s.eq_ignore_ascii_case("inf") {
        return Ok(ExponentSpec::Named(InfTag::Inf));
    }
    s.parse()
        .map(ExponentSpec::Finite)
        .map_err(|_| CliError::Config(format!("exponent {s:?}: expected a number or \"inf\"")))
}

fn read_config(path: &Path) -> CliResult<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_config(&text)
}

fn empty(mode: Mode) -> RunConfig {
    RunConfig {
        mode,
        grid: None,
        initial: None,
        solver: None,
        besov: Vec::new(),
        picard: None,
        moc: None,
        apriori: None,
        kernel: None,
    }
}

fn moc(common: &MocCommon) -> MocSpec {
    MocSpec {
        nu: common.nu,
        cmult: common.cmult,
        delta: None,
        gamma: None,
        deltas: Vec::new(),
        gammas: Vec::new(),
        points: common.points,
    }
}

fn expect_mode(cfg: &RunConfig, mode: Mode) -> CliResult<()> {
    if cfg.mode == mode {
        Ok(())
    } else {
        Err(CliError::Config(format!(
            "mode: config says {:?}, command is {:?}",
            cfg.mode, mode
        )))
    }
}

fn build(command: Command) -> CliResult<(RunConfig, PathBuf)> {
    Ok(match command {
        Command::Simulate { config, out } => {
            let cfg = read_config(&config)?;
            expect_mode(&cfg, Mode::Simulate)?;
            (cfg, out.out)
        }
        Command::Picard { config, iters, out } => {
            let mut cfg = read_config(&config)?;
            expect_mode(&cfg, Mode::Picard)?;
            if let Some(k) = iters {
                let mut p = cfg.picard.clone().unwrap_or(ipm_cli::config::PicardSpec {
                    iterations: k,
                    max_shrinks: 8,
                    contraction: 1.0,
                    index: None,
                });
                p.iterations = k;
                cfg.picard = Some(p);
            }
            (cfg, out.out)
        }
        Command::Apriori { config, out } => {
            let cfg = read_config(&config)?;
            expect_mode(&cfg, Mode::Apriori)?;
            (cfg, out.out)
        }
        Command::Moc { action } => match action {
            MocAction::Scan {
                common,
                delta,
                gamma,
                out,
            } => {
                let mut cfg = empty(Mode::MocScan);
                let mut m = moc(&common);
                m.deltas = delta;
                m.gammas = gamma;
                cfg.moc = Some(m);
                (cfg, out.out)
            }
            MocAction::Verify {
                common,
                delta,
                gamma,
                out,
            } => {
                let mut cfg = empty(Mode::MocVerify);
                let mut m = moc(&common);
                m.delta = Some(delta);
                m.gamma = Some(gamma);
                cfg.moc = Some(m);
                (cfg, out.out)
            }
        },
        Command::Besov {
            snapshot,
            s,
            p,
            q,
            out,
        } => {
            let mut cfg = empty(Mode::Besov);
            cfg.initial = Some(InitialSpec::Snapshot {
                path: snapshot.to_string_lossy().into_owned(),
            });
            cfg.besov = vec![BesovSpec {
                s,
                p: exponent(&p)?,
                q: exponent(&q)?,
            }];
            (cfg, out.out)
        }
        Command::KernelCheck {
            n,
            tol,
            stride,
            sigma,
            out,
        } => {
            let mut cfg = empty(Mode::KernelCheck);
            cfg.kernel = Some(KernelSpec {
                n,
                tol,
                stride,
                sigma,
            });
            (cfg, out.out)
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = build(cli.command).and_then(|(cfg, out)| dispatch(&cfg, &out));
    match result {
        Ok(outcome) => {
            println!("{}", outcome.summary);
            for p in &outcome.outputs {
                println!("wrote {}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
