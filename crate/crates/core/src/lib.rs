//! Smoothness-penalized deconvolution (SPeD) of a density observed under
//! known Gaussian measurement error, with data-driven choice of the penalty
//! parameter by estimating the risk at a smaller sample size.

pub mod error;
pub mod estimator;
pub mod grid;
pub mod kernel;
pub mod metrics;
pub mod noise;
pub mod power_tail;
pub mod risk;
pub mod selection;
pub mod sim;
pub mod targets;
pub mod ustat;

pub use error::{Result, SpedError};
pub use estimator::{empirical_char_fn, estimate_density, Sample};
pub use grid::FrequencyGrid;
pub use kernel::PenaltyKernel;
pub use metrics::{metric_catastrophic, metric_mean_ratio, metric_mise_ratio, metric_quantile};
pub use noise::{calibrate_noise_sd, ErrorKind, ErrorModel};
pub use risk::{
    cv_criterion, decompose_risk_estimate, estimated_risk_curve, h_squared_hat, true_bias_var,
    true_loss_ise, true_risk, CurveKind, RiskCurve, RiskDecomposition, SampleSpectrum,
    TargetSpectrum, TrueRiskModel,
};
pub use selection::{
    argmin_on_grid, ceil_sqrt, make_alpha_grid, rate_b, select_cv, select_oracle, select_small_n,
    Method, N1Rule, RateModel, SelectionConfig, SelectionResult,
};
pub use sim::{
    run_replicate, run_simulation, run_simulation_with_threads, SimPlan, SimRecord, SimSetting,
};
pub use targets::{marron_wand, Component, NormalMixture};
pub use ustat::{estimated_risk_ustat, ThetaKernel};
