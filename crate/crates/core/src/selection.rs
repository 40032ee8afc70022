//! Penalty selection over log-spaced grids: the small-n rule (minimise the
//! estimated risk at `n1 = ceil(sqrt n)` and rescale by `b_n / b_n1`),
//! cross-validation, and the oracle minimiser of the true risk.

use std::fmt;
use std::str::FromStr;

use crate::error::{Result, SpedError};
use crate::estimator::Sample;
use crate::grid::FrequencyGrid;
use crate::noise::ErrorModel;
use crate::risk::{
    check_alphas, spectrum_curve, spectrum_cv_curve, RiskCurve, SampleSpectrum, TrueRiskModel,
};
use crate::targets::NormalMixture;

/// Smoothness index `k` behind the penalty scale `b_n = (k ln n)^k / n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RateModel {
    k: u32,
}

impl RateModel {
    pub fn new(k: u32) -> Result<Self> {
        if k < 1 {
            return Err(SpedError::domain("rate index k must be >= 1"));
        }
        Ok(Self { k })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn b(&self, n: usize) -> Result<f64> {
        rate_b(n, self.k)
    }

    /// Risk rate `r_n = (ln n)^(-k)`.
    pub fn r(&self, n: usize) -> Result<f64> {
        if n < 2 {
            return Err(SpedError::domain(format!("rate needs n >= 2, got {n}")));
        }
        Ok((n as f64).ln().powi(-(self.k as i32)))
    }
}

impl Default for RateModel {
    fn default() -> Self {
        Self { k: 1 }
    }
}

/// `b_n = (k ln n)^k / n`.
pub fn rate_b(n: usize, k: u32) -> Result<f64> {
    if n < 2 {
        return Err(SpedError::domain(format!("rate needs n >= 2, got {n}")));
    }
    if k < 1 {
        return Err(SpedError::domain("rate index k must be >= 1"));
    }
    let n = n as f64;
    Ok((k as f64 * n.ln()).powi(k as i32) / n)
}

/// How the smaller risk sample size is derived from `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum N1Rule {
    #[default]
    SqrtN,
}

impl N1Rule {
    pub fn apply(&self, n: usize) -> usize {
        match self {
            N1Rule::SqrtN => ceil_sqrt(n),
        }
    }
}

/// Exact `ceil(sqrt(n))`.
pub fn ceil_sqrt(n: usize) -> usize {
    let mut r = (n as f64).sqrt() as usize;
    while r * r < n {
        r += 1;
    }
    while r > 0 && (r - 1) * (r - 1) >= n {
        r -= 1;
    }
    r
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectionConfig {
    pub rate: RateModel,
    /// Lower grid factor: the grid starts at `iota * b`.
    pub iota: f64,
    /// Upper grid factor: the grid ends at `lambda * b`.
    pub lambda: f64,
    pub grid_size: usize,
    pub n1_rule: N1Rule,
    /// Order of the penalised derivative.
    pub m: u32,
    pub quad_tolerance: f64,
}

impl Default for SelectionConfig {
    fn default() -> Self {
        Self {
            rate: RateModel::default(),
            iota: 1e-3,
            lambda: 1e3,
            grid_size: 100,
            n1_rule: N1Rule::SqrtN,
            m: 1,
            quad_tolerance: 1e-10,
        }
    }
}

impl SelectionConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = |x: f64| x.is_finite() && x > 0.0;
        if !(positive(self.iota) && positive(self.lambda) && self.iota < self.lambda) {
            return Err(SpedError::domain(format!(
                "grid factors need 0 < iota < lambda, got iota = {}, lambda = {}",
                self.iota, self.lambda
            )));
        }
        if self.grid_size < 2 {
            return Err(SpedError::domain("grid size must be >= 2"));
        }
        if self.m < 1 {
            return Err(SpedError::domain(
                "penalised derivative order m must be >= 1",
            ));
        }
        if !positive(self.quad_tolerance) {
            return Err(SpedError::domain("quadrature tolerance must be positive"));
        }
        Ok(())
    }

    /// `[iota * b_n, lambda * b_n]`.
    pub fn alpha_range(&self, n_ref: usize) -> Result<(f64, f64)> {
        self.validate()?;
        let b = self.rate.b(n_ref)?;
        Ok((self.iota * b, self.lambda * b))
    }
}

/// `grid_size` log-spaced penalties spanning `[iota b, lambda b]` at `n_ref`.
pub fn make_alpha_grid(n_ref: usize, config: &SelectionConfig) -> Result<Vec<f64>> {
    let (lo, hi) = config.alpha_range(n_ref)?;
    let last = config.grid_size - 1;
    let (llo, lhi) = (lo.ln(), hi.ln());
    let mut grid: Vec<f64> = (0..=last)
        .map(|i| (llo + (lhi - llo) * i as f64 / last as f64).exp())
        .collect();
    grid[0] = lo;
    grid[last] = hi;
    check_alphas(&grid)?;
    Ok(grid)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Method {
    SmallN,
    CrossValidation,
    Oracle,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::SmallN, Method::CrossValidation, Method::Oracle];

    pub fn as_str(&self) -> &'static str {
        match self {
            Method::SmallN => "small-n",
            Method::CrossValidation => "cv",
            Method::Oracle => "oracle",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = SpedError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "small-n" => Ok(Method::SmallN),
            "cv" => Ok(Method::CrossValidation),
            "oracle" => Ok(Method::Oracle),
            other => Err(SpedError::domain(format!(
                "unknown method {other:?} (expected small-n, cv or oracle)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectionResult {
    /// Penalty for the full sample size.
    pub alpha_hat: f64,
    /// Minimiser on the search grid before rescaling.
    pub alpha_prime: f64,
    pub curve: RiskCurve,
    pub method: Method,
}

/// Minimising penalty; exact ties go to the largest penalty.
pub fn argmin_on_grid(curve: &RiskCurve) -> Result<f64> {
    argmin_index(curve).map(|i| curve.alphas[i])
}

pub(crate) fn argmin_index(curve: &RiskCurve) -> Result<usize> {
    if curve.values.is_empty() {
        return Err(SpedError::domain("cannot minimise an empty curve"));
    }
    let mut best = 0;
    for (i, v) in curve.values.iter().enumerate() {
        if !v.is_finite() {
            return Err(SpedError::Data(format!(
                "criterion is not finite at alpha = {}",
                curve.alphas[i]
            )));
        }
        if *v <= curve.values[best] {
            best = i;
        }
    }
    Ok(best)
}

/// Frequency grid valid for every penalty in `[lo, hi]`, with a little slack
/// so rescaled choices on the boundary stay covered.
pub fn search_frequency_grid(
    lo: f64,
    hi: f64,
    error: &ErrorModel,
    config: &SelectionConfig,
    oscillation_scale: f64,
) -> Result<FrequencyGrid> {
    FrequencyGrid::for_alpha_range(
        lo * (1.0 - 1e-9),
        hi * (1.0 + 1e-9),
        config.m,
        error,
        config.quad_tolerance,
        oscillation_scale,
    )
}

fn small_n_sample_size(n: usize, n1: usize) -> Result<()> {
    if n < 4 {
        return Err(SpedError::precondition(format!(
            "sample too small for n1 rule: need n >= 4, got {n}"
        )));
    }
    if n1 < 2 || n1 > n {
        return Err(SpedError::domain(format!(
            "n1 must lie in [2, n], got {n1}"
        )));
    }
    Ok(())
}

pub(crate) fn small_n_on(
    spectrum: &SampleSpectrum,
    config: &SelectionConfig,
    n1: usize,
) -> Result<SelectionResult> {
    let n = spectrum.n();
    small_n_sample_size(n, n1)?;
    let alphas = make_alpha_grid(n1, config)?;
    let curve = spectrum_curve(spectrum, &alphas, n1)?;
    let alpha_prime = argmin_on_grid(&curve)?;
    let alpha_hat = if n1 == n {
        alpha_prime
    } else {
        alpha_prime * config.rate.b(n)? / config.rate.b(n1)?
    };
    Ok(SelectionResult {
        alpha_hat,
        alpha_prime,
        curve,
        method: Method::SmallN,
    })
}

pub(crate) fn cv_on(
    spectrum: &SampleSpectrum,
    config: &SelectionConfig,
) -> Result<SelectionResult> {
    let alphas = make_alpha_grid(spectrum.n(), config)?;
    let curve = spectrum_cv_curve(spectrum, &alphas)?;
    let alpha_hat = argmin_on_grid(&curve)?;
    Ok(SelectionResult {
        alpha_hat,
        alpha_prime: alpha_hat,
        curve,
        method: Method::CrossValidation,
    })
}

/// Small-n selection with `n1` from the configured rule.
pub fn select_small_n(
    sample: &Sample,
    error: &ErrorModel,
    config: &SelectionConfig,
) -> Result<SelectionResult> {
    let n1 = config.n1_rule.apply(sample.len());
    select_small_n_with_n1(sample, error, config, n1)
}

/// Small-n selection with an explicit `n1`; `n1 = n` reproduces
/// cross-validation on the `b_n` scale.
#[doc(hidden)]
pub fn select_small_n_with_n1(
    sample: &Sample,
    error: &ErrorModel,
    config: &SelectionConfig,
    n1: usize,
) -> Result<SelectionResult> {
    config.validate()?;
    small_n_sample_size(sample.len(), n1)?;
    let (lo, hi) = config.alpha_range(n1)?;
    let grid = search_frequency_grid(lo, hi, error, config, sample.max_abs())?;
    let spectrum = SampleSpectrum::new(sample, &grid, error, config.m)?;
    small_n_on(&spectrum, config, n1)
}

/// Cross-validation over the grid on the `b_n` scale.
pub fn select_cv(
    sample: &Sample,
    error: &ErrorModel,
    config: &SelectionConfig,
) -> Result<SelectionResult> {
    config.validate()?;
    sample.require_len(2, "cross-validation")?;
    let (lo, hi) = config.alpha_range(sample.len())?;
    let grid = search_frequency_grid(lo, hi, error, config, sample.max_abs())?;
    let spectrum = SampleSpectrum::new(sample, &grid, error, config.m)?;
    cv_on(&spectrum, config)
}

/// Minimiser of the true risk `R(., n)` over the grid on the `b_n` scale.
pub fn select_oracle(
    target: &NormalMixture,
    error: &ErrorModel,
    n: usize,
    config: &SelectionConfig,
) -> Result<SelectionResult> {
    config.validate()?;
    let alphas = make_alpha_grid(n, config)?;
    let grid = search_frequency_grid(alphas[0], alphas[alphas.len() - 1], error, config, 0.0)?;
    let model = TrueRiskModel::new(target, error, config.m, &grid)?;
    let curve = model.curve(&alphas, n)?;
    let alpha_hat = argmin_on_grid(&curve)?;
    Ok(SelectionResult {
        alpha_hat,
        alpha_prime: alpha_hat,
        curve,
        method: Method::Oracle,
    })
}
