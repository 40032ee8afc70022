//! Command-line definitions.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use sped::{Method, RateModel, SelectionConfig};

use crate::error::CliResult;

#[derive(Debug, Parser)]
#[command(
    name = "sped",
    version,
    about = "Smoothness-penalized deconvolution with small-n penalty selection"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Deconvolve a sample and write the density estimate on an x grid.
    Estimate(EstimateArgs),
    /// Choose the penalty for a sample.
    Select(SelectArgs),
    /// Monte Carlo comparison of selectors on a benchmark density.
    Simulate(SimulateArgs),
    /// Summarise simulation records.
    Report(ReportArgs),
    /// Estimated and true risk curves for several simulated samples.
    Riskcurves(RiskCurvesArgs),
}

fn positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() && v > 0.0 => Ok(v),
        Ok(_) => Err("must be positive and finite".into()),
        Err(e) => Err(e.to_string()),
    }
}

fn open_unit(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v < 1.0 => Ok(v),
        Ok(_) => Err("must lie strictly between 0 and 1".into()),
        Err(e) => Err(e.to_string()),
    }
}

fn at_least(min: usize) -> impl Fn(&str) -> Result<usize, String> + Clone {
    move |s: &str| match s.parse::<usize>() {
        Ok(v) if v >= min => Ok(v),
        Ok(_) => Err(format!("must be at least {min}")),
        Err(e) => Err(e.to_string()),
    }
}

fn density_index(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(v) if (1..=8).contains(&v) => Ok(v),
        Ok(_) => Err("density index must be between 1 and 8".into()),
        Err(e) => Err(e.to_string()),
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct XGrid {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl XGrid {
    pub fn points(&self) -> Vec<f64> {
        let h = (self.max - self.min) / (self.count - 1) as f64;
        (0..self.count).map(|i| self.min + i as f64 * h).collect()
    }
}

fn xgrid(s: &str) -> Result<XGrid, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err("expected min,max,count".into());
    }
    let min: f64 = parts[0].parse().map_err(|e| format!("min: {e}"))?;
    let max: f64 = parts[1].parse().map_err(|e| format!("max: {e}"))?;
    let count: usize = parts[2].parse().map_err(|e| format!("count: {e}"))?;
    if !(min.is_finite() && max.is_finite() && min < max) {
        return Err("need finite min < max".into());
    }
    if count < 2 {
        return Err("count must be at least 2".into());
    }
    Ok(XGrid { min, max, count })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Selector {
    SmallN,
    Cv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodArg {
    SmallN,
    Cv,
    Oracle,
}

impl MethodArg {
    pub fn method(self) -> Method {
        match self {
            MethodArg::SmallN => Method::SmallN,
            MethodArg::Cv => Method::CrossValidation,
            MethodArg::Oracle => Method::Oracle,
        }
    }
}

/// Search grid and quadrature settings shared by the selecting commands.
#[derive(Debug, Clone, Args, Serialize)]
pub struct SelectionArgs {
    /// Order of the penalised derivative.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    pub m: u32,
    /// Smoothness index in the penalty scale (k ln n)^k / n.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    pub k: u32,
    /// Lower search-grid factor.
    #[arg(long, default_value_t = 1e-3, value_parser = positive)]
    pub iota: f64,
    /// Upper search-grid factor.
    #[arg(long, default_value_t = 1e3, value_parser = positive)]
    pub lambda: f64,
    /// Number of log-spaced penalties in the search grid.
    #[arg(long = "gridsize", default_value_t = 100, value_parser = at_least(2))]
    pub grid_size: usize,
    /// Frequency-domain quadrature tolerance.
    #[arg(long = "quad-tol", default_value_t = 1e-10, value_parser = positive)]
    pub quad_tol: f64,
}

impl SelectionArgs {
    pub fn config(&self) -> CliResult<SelectionConfig> {
        let cfg = SelectionConfig {
            rate: RateModel::new(self.k)?,
            iota: self.iota,
            lambda: self.lambda,
            grid_size: self.grid_size,
            m: self.m,
            quad_tolerance: self.quad_tol,
            ..Default::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Args, Serialize)]
pub struct EstimateArgs {
    /// Observations, one per line; `#` starts a comment.
    #[arg(long)]
    pub input: PathBuf,
    /// Standard deviation of the Gaussian measurement error.
    #[arg(long = "noise-sd", value_parser = positive)]
    pub noise_sd: f64,
    /// Fixed penalty.
    #[arg(
        long,
        conflicts_with = "select",
        required_unless_present = "select",
        allow_negative_numbers = true
    )]
    pub alpha: Option<f64>,
    /// Choose the penalty from the data instead.
    #[arg(long, value_enum)]
    pub select: Option<Selector>,
    #[command(flatten)]
    pub selection: SelectionArgs,
    /// Evaluation grid `min,max,count`; defaults to the data range padded by
    /// a quarter of its width plus three noise sd.
    #[arg(long, value_parser = xgrid, allow_hyphen_values = true)]
    pub xgrid: Option<XGrid>,
    /// CSV output `x,f_hat`.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct SelectArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long = "noise-sd", value_parser = positive)]
    pub noise_sd: f64,
    #[arg(long, value_enum)]
    pub method: Selector,
    #[command(flatten)]
    pub selection: SelectionArgs,
    /// CSV output `alpha,criterion`.
    #[arg(long = "curve-out")]
    pub curve_out: Option<PathBuf>,
    /// CSV output `alpha,b_hat,v_over_n1,criterion` for the small-n criterion.
    #[arg(long = "decomposition-out")]
    pub decomposition_out: Option<PathBuf>,
    /// Base path for the run manifest; defaults to the curve output or the input.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Use the full sample size as n1.
    #[arg(long = "n1-equals-n", hide = true)]
    pub n1_equals_n: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct SimulateArgs {
    #[arg(long, value_parser = density_index)]
    pub density: usize,
    #[arg(long, value_parser = at_least(4))]
    pub n: usize,
    /// Error share of the observed variance.
    #[arg(long, value_parser = open_unit)]
    pub p: f64,
    #[arg(long, value_parser = at_least(1))]
    pub nsim: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(
        long,
        value_enum,
        value_delimiter = ',',
        default_value = "small-n,cv,oracle"
    )]
    pub methods: Vec<MethodArg>,
    /// CSV output `replicate,method,alpha_hat,ise,ise_oracle,loss_ratio`.
    #[arg(long)]
    pub out: PathBuf,
    /// Worker threads; results do not depend on this.
    #[arg(long, value_parser = at_least(1))]
    pub threads: Option<usize>,
    #[command(flatten)]
    pub selection: SelectionArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Metric {
    Catastrophic,
    Q99,
    MeanRatio,
    MiseRatio,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    Md,
}

#[derive(Debug, Args, Serialize)]
pub struct ReportArgs {
    /// Record files written by `simulate`, each with its manifest alongside.
    #[arg(long = "in", required = true, num_args = 1..)]
    pub inputs: Vec<PathBuf>,
    #[arg(
        long,
        value_enum,
        value_delimiter = ',',
        default_value = "catastrophic,q99,mean-ratio,mise-ratio"
    )]
    pub metrics: Vec<Metric>,
    #[arg(long, value_enum, default_value = "md")]
    pub format: Format,
    /// Loss ratio above which a replicate counts as catastrophic.
    #[arg(long, default_value_t = 10.0, value_parser = positive)]
    pub threshold: f64,
    /// Numerator of the MISE ratio.
    #[arg(long, value_enum, default_value = "small-n")]
    pub baseline: MethodArg,
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct RiskCurvesArgs {
    #[arg(long, value_parser = density_index)]
    pub density: usize,
    #[arg(long, value_parser = at_least(4))]
    pub n: usize,
    #[arg(long, value_parser = open_unit)]
    pub p: f64,
    #[arg(long)]
    pub realizations: usize,
    #[arg(long)]
    pub seed: u64,
    /// CSV output `realization,n1_kind,alpha,value`.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub svg: Option<PathBuf>,
    #[command(flatten)]
    pub selection: SelectionArgs,
}
