use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand as ClapSubcommand, ValueEnum};
use liouville_ep::AtomParams;
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::grid::GridSpec;

pub const JOBS_ENV: &str = "LIOUVILLE_EP_JOBS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Analytic,
    Numeric,
    Both,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Analytic => "analytic",
            Method::Numeric => "numeric",
            Method::Both => "both",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Subcommand {
    EpLocate,
    Eigenvalues,
    SteadyState,
    Dynamics,
    G1,
    G2,
    Spectrum,
}

impl Subcommand {
    pub fn name(self) -> &'static str {
        match self {
            Subcommand::EpLocate => "ep-locate",
            Subcommand::Eigenvalues => "eigenvalues",
            Subcommand::SteadyState => "steady-state",
            Subcommand::Dynamics => "dynamics",
            Subcommand::G1 => "g1",
            Subcommand::G2 => "g2",
            Subcommand::Spectrum => "spectrum",
        }
    }

    /// Subcommands whose analytic branch only exists at zero detuning.
    fn resonant_only_analytic(self) -> bool {
        matches!(
            self,
            Subcommand::Dynamics | Subcommand::G1 | Subcommand::G2 | Subcommand::Spectrum
        )
    }
}

/// Sweeps over the driven two-level atom. All inputs are in units of gamma.
#[derive(Debug, Parser)]
#[command(name = "liouville-ep", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[arg(long, global = true, value_enum, default_value = "csv")]
    pub format: Format,

    /// Output file (default: stdout).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Worker threads (default: logical cores). LIOUVILLE_EP_JOBS takes precedence.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Args)]
pub struct FixedDrive {
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub delta: f64,
    #[arg(long, default_value_t = 1.0)]
    pub gamma: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub theta: f64,
}

#[derive(Debug, Args)]
pub struct FullDrive {
    #[command(flatten)]
    pub fixed: FixedDrive,
    #[arg(long)]
    pub omega: f64,
}

#[derive(Debug, ClapSubcommand)]
pub enum Command {
    /// Exceptional-point drive amplitudes along a detuning sweep.
    EpLocate {
        #[arg(long, default_value_t = 1.0)]
        gamma: f64,
        #[arg(long, default_value = "0:0.12:121", allow_hyphen_values = true)]
        delta_grid: GridSpec,
    },
    /// Nontrivial Liouvillian eigenvalues along a drive sweep (i lambda unless --raw-lambda).
    Eigenvalues {
        #[command(flatten)]
        drive: FixedDrive,
        #[arg(long, default_value = "0:0.5:501")]
        omega_grid: GridSpec,
        #[arg(long, value_enum, default_value = "analytic")]
        method: Method,
        #[arg(long)]
        raw_lambda: bool,
    },
    /// Steady-state density matrix along a drive sweep.
    SteadyState {
        #[command(flatten)]
        drive: FixedDrive,
        #[arg(long, default_value = "log:1e-3:10:401")]
        omega_grid: GridSpec,
        #[arg(long, value_enum, default_value = "analytic")]
        method: Method,
    },
    /// Excited-state population from the excited state.
    Dynamics {
        #[command(flatten)]
        drive: FullDrive,
        #[arg(long, default_value = "0:20:401")]
        t_grid: GridSpec,
        /// Default: analytic on resonance, numeric otherwise.
        #[arg(long, value_enum)]
        method: Option<Method>,
    },
    /// First-order coherence. Default delays: 0 plus log:1e-3:20:400.
    G1 {
        #[command(flatten)]
        drive: FullDrive,
        #[arg(long)]
        tau_grid: Option<GridSpec>,
        #[arg(long, value_enum)]
        method: Option<Method>,
    },
    /// Second-order coherence. Default delays: 0 plus log:1e-3:20:400.
    G2 {
        #[command(flatten)]
        drive: FullDrive,
        #[arg(long)]
        tau_grid: Option<GridSpec>,
        #[arg(long, value_enum)]
        method: Option<Method>,
    },
    /// Inelastic fluorescence spectrum and elastic weight.
    Spectrum {
        #[command(flatten)]
        drive: FullDrive,
        #[arg(long, default_value = "-10:10:4001", allow_hyphen_values = true)]
        freq_grid: GridSpec,
        #[arg(long, value_enum)]
        method: Option<Method>,
    },
}

/// Sweep axis: swept variable and its sampling. `spec` is `None` for the
/// default correlator delay grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub variable: String,
    pub spec: Option<GridSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub subcommand: Subcommand,
    /// For sweeps over the drive, `params.omega()` is unused.
    pub params: AtomParams,
    pub grid: Axis,
    pub method: Method,
    pub output: Format,
    pub out_path: Option<PathBuf>,
    pub raw_lambda: bool,
}

fn atom(fixed: &FixedDrive, omega: f64) -> Result<AtomParams, CliError> {
    Ok(AtomParams::new(
        fixed.delta,
        omega,
        fixed.gamma,
        fixed.theta,
    )?)
}

impl SweepConfig {
    pub fn from_cli(cli: &Cli) -> Result<Self, CliError> {
        let axis = |variable: &str, spec: Option<GridSpec>| Axis {
            variable: variable.into(),
            spec,
        };
        let (subcommand, params, grid, method, raw_lambda) = match &cli.command {
            Command::EpLocate { gamma, delta_grid } => (
                Subcommand::EpLocate,
                AtomParams::new(0.0, 0.0, *gamma, 0.0)?,
                axis("delta", Some(*delta_grid)),
                Method::Analytic,
                false,
            ),
            Command::Eigenvalues {
                drive,
                omega_grid,
                method,
                raw_lambda,
            } => (
                Subcommand::Eigenvalues,
                atom(drive, 0.0)?,
                axis("omega", Some(*omega_grid)),
                *method,
                *raw_lambda,
            ),
            Command::SteadyState {
                drive,
                omega_grid,
                method,
            } => (
                Subcommand::SteadyState,
                atom(drive, 0.0)?,
                axis("omega", Some(*omega_grid)),
                *method,
                false,
            ),
            Command::Dynamics {
                drive,
                t_grid,
                method,
            } => {
                let p = atom(&drive.fixed, drive.omega)?;
                (
                    Subcommand::Dynamics,
                    p,
                    axis("t", Some(*t_grid)),
                    default_method(*method, &p),
                    false,
                )
            }
            Command::G1 {
                drive,
                tau_grid,
                method,
            } => {
                let p = atom(&drive.fixed, drive.omega)?;
                (
                    Subcommand::G1,
                    p,
                    axis("tau", *tau_grid),
                    default_method(*method, &p),
                    false,
                )
            }
            Command::G2 {
                drive,
                tau_grid,
                method,
            } => {
                let p = atom(&drive.fixed, drive.omega)?;
                (
                    Subcommand::G2,
                    p,
                    axis("tau", *tau_grid),
                    default_method(*method, &p),
                    false,
                )
            }
            Command::Spectrum {
                drive,
                freq_grid,
                method,
            } => {
                let p = atom(&drive.fixed, drive.omega)?;
                (
                    Subcommand::Spectrum,
                    p,
                    axis("freq", Some(*freq_grid)),
                    default_method(*method, &p),
                    false,
                )
            }
        };
        let config = SweepConfig {
            subcommand,
            params,
            grid,
            method,
            output: cli.format,
            out_path: cli.out.clone(),
            raw_lambda,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.subcommand.resonant_only_analytic()
            && self.method != Method::Numeric
            && !self.params.is_resonant()
        {
            return Err(CliError::Usage(format!(
                "method={} needs delta = 0 for {}; use --method numeric",
                self.method.name(),
                self.subcommand.name()
            )));
        }
        if let Some(spec) = &self.grid.spec {
            if matches!(
                self.subcommand,
                Subcommand::Dynamics | Subcommand::G1 | Subcommand::G2
            ) && spec.min < 0.0
            {
                return Err(CliError::Usage(format!(
                    "{} grid must be non-negative",
                    self.grid.variable
                )));
            }
            if matches!(
                self.subcommand,
                Subcommand::Eigenvalues | Subcommand::SteadyState
            ) && spec.min < 0.0
            {
                return Err(CliError::Usage("omega grid must be non-negative".into()));
            }
        }
        Ok(())
    }

    /// Sample points of the sweep axis.
    pub fn points(&self) -> Vec<f64> {
        match &self.grid.spec {
            Some(spec) => spec.points(),
            None => liouville_ep::model::default_tau_grid(self.params.gamma()),
        }
    }

    /// Everything that determines the output, as printed in the CSV header.
    /// Thread count and output path are deliberately absent.
    pub fn describe(&self) -> BTreeMap<String, String> {
        let p = &self.params;
        let mut m = BTreeMap::new();
        m.insert("gamma".into(), p.gamma().to_string());
        if self.subcommand != Subcommand::EpLocate {
            m.insert("delta".into(), p.delta().to_string());
            m.insert("theta".into(), p.theta().to_string());
            m.insert("method".into(), self.method.name().into());
        }
        if !matches!(
            self.subcommand,
            Subcommand::EpLocate | Subcommand::Eigenvalues | Subcommand::SteadyState
        ) {
            m.insert("omega".into(), p.omega().to_string());
        }
        if self.subcommand == Subcommand::Eigenvalues {
            m.insert("raw_lambda".into(), self.raw_lambda.to_string());
        }
        let spec = self
            .grid
            .spec
            .map_or_else(|| "default".to_string(), |s| s.to_string());
        m.insert(format!("{}_grid", self.grid.variable), spec);
        m.insert(
            "format".into(),
            match self.output {
                Format::Csv => "csv".into(),
                Format::Json => "json".into(),
            },
        );
        m
    }
}

fn default_method(requested: Option<Method>, p: &AtomParams) -> Method {
    requested.unwrap_or(if p.is_resonant() {
        Method::Analytic
    } else {
        Method::Numeric
    })
}

/// Thread count: `LIOUVILLE_EP_JOBS` if set, else `--jobs`, else logical cores.
/// Zero means logical cores.
pub fn resolve_jobs(flag: Option<usize>, env: Option<&str>) -> Result<usize, CliError> {
    let requested = match env {
        Some(v) => Some(v.trim().parse::<usize>().map_err(|_| {
            CliError::Usage(format!("{JOBS_ENV}='{v}' is not a non-negative integer"))
        })?),
        None => flag,
    };
    Ok(match requested {
        Some(n) if n > 0 => n,
        _ => std::thread::available_parallelism().map_or(1, |n| n.get()),
    })
}
