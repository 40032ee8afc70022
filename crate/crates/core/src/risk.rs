//! Loss and risk functionals on the surrogate scale `2 pi (risk - ||f||^2)`:
//! the true risk and its bias/variance split, the realised loss, the
//! unbiased estimate `H~_n` of `|h~|^2`, the small-n risk criterion, the
//! cross-validation criterion and the bias/variance diagnostic.
//!
//! Every criterion for one sample is evaluated from a [`SampleSpectrum`]: the
//! empirical characteristic function and the power-tail pair sum are computed
//! once, after which each penalty costs one pass over the grid.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Result, SpedError};
use crate::estimator::{empirical_char_fn, Sample};
use crate::grid::FrequencyGrid;
use crate::kernel::PenaltyKernel;
use crate::noise::ErrorModel;
use crate::power_tail::PowerTail;
use crate::targets::NormalMixture;

/// Which functional a [`RiskCurve`] holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveKind {
    TrueRisk,
    EstimatedRisk,
    CrossValidation,
    TrueLoss,
}

/// Criterion values over an ascending penalty grid.
#[derive(Debug, Clone, PartialEq)]
pub struct RiskCurve {
    pub alphas: Vec<f64>,
    pub values: Vec<f64>,
    /// Sample size the risk refers to.
    pub n1: usize,
    pub kind: CurveKind,
}

impl RiskCurve {
    pub fn new(alphas: Vec<f64>, values: Vec<f64>, n1: usize, kind: CurveKind) -> Result<Self> {
        check_alphas(&alphas)?;
        if alphas.len() != values.len() {
            return Err(SpedError::domain(
                "curve alphas and values differ in length",
            ));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(SpedError::Data(format!(
                "criterion is not finite at alpha = {}",
                alphas[i]
            )));
        }
        Ok(Self {
            alphas,
            values,
            n1,
            kind,
        })
    }
}

/// `R^(alpha, n1) = b_hat + v_over_n1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiskDecomposition {
    /// Estimated squared-bias part `B^(alpha, n1)`.
    pub b_hat: f64,
    /// `V(alpha) / n1` with `V(alpha) = int |phi~_alpha|^2`.
    pub v_over_n1: f64,
}

impl RiskDecomposition {
    pub fn total(&self) -> f64 {
        self.b_hat + self.v_over_n1
    }
}

pub(crate) fn check_alphas(alphas: &[f64]) -> Result<()> {
    if alphas.is_empty() {
        return Err(SpedError::domain("penalty grid is empty"));
    }
    if alphas.iter().any(|a| !(a.is_finite() && *a > 0.0)) {
        return Err(SpedError::domain("penalties must be positive and finite"));
    }
    if alphas.windows(2).any(|w| w[1] <= w[0]) {
        return Err(SpedError::domain("penalties must be strictly increasing"));
    }
    Ok(())
}

fn check_n1(n1: usize) -> Result<()> {
    if n1 < 2 {
        return Err(SpedError::domain(format!(
            "risk sample size n1 must be >= 2, got {n1}"
        )));
    }
    Ok(())
}

/// Penalty-independent quantities at each grid node.
#[derive(Debug, Clone)]
pub(crate) struct FilterTable {
    m: u32,
    error: ErrorModel,
    weights: Vec<f64>,
    g_sq: Vec<f64>,
    t_pow: Vec<f64>,
    q: Vec<f64>,
    deficit: Vec<f64>,
    tail: PowerTail,
}

/// Filter quantities at one node for one penalty.
struct NodeFilter {
    phi_sq: f64,
    gain: f64,
    remainder: f64,
}

impl FilterTable {
    pub(crate) fn new(grid: &FrequencyGrid, error: &ErrorModel, m: u32) -> Result<Self> {
        if m < 1 {
            return Err(SpedError::domain(
                "penalised derivative order m must be >= 1",
            ));
        }
        let tail = PowerTail::new(m, error.sd());
        let nodes = grid.nodes();
        Ok(Self {
            m,
            error: *error,
            weights: grid.weights().to_vec(),
            g_sq: nodes.iter().map(|&t| error.char_fn_sq(t)).collect(),
            t_pow: nodes.iter().map(|&t| t.powi(2 * m as i32)).collect(),
            q: nodes.iter().map(|&t| tail.eval(t)).collect(),
            deficit: nodes
                .iter()
                .map(|&t| if t == 0.0 { 0.0 } else { tail.deficit(t) })
                .collect(),
            tail,
        })
    }

    fn kernel(&self, alpha: f64) -> Result<PenaltyKernel> {
        PenaltyKernel::new(alpha, self.m, self.error)
    }

    #[inline]
    fn at(&self, k: usize, alpha: f64) -> NodeFilter {
        let g2 = self.g_sq[k];
        let pen = alpha * self.t_pow[k];
        let den = g2 + pen;
        let remainder = if pen > g2 {
            self.deficit[k] / alpha - g2 / (pen * den)
        } else {
            1.0 / den - self.q[k] / alpha
        };
        NodeFilter {
            phi_sq: g2 / (den * den),
            gain: g2 / den,
            remainder,
        }
    }

    /// `V(alpha) = int |phi~_alpha|^2`.
    fn variance_integral(&self, alpha: f64) -> f64 {
        (0..self.weights.len())
            .map(|k| self.weights[k] * self.at(k, alpha).phi_sq)
            .sum()
    }
}

/// `H~_n(t) = (n |P~_n(t)|^2 - 1) / (n - 1)`, equal to
/// `n/(n-1) (|P~_n|^2 - 1/n)` and exactly 1 at `t = 0`.
pub fn h_squared_hat(sample: &Sample, grid: &FrequencyGrid) -> Result<Vec<f64>> {
    sample.require_len(2, "the |h~|^2 estimator")?;
    let ecf = empirical_char_fn(sample, grid);
    Ok(h_sq_from_ecf(&ecf, sample.len()))
}

fn h_sq_from_ecf(ecf: &[Complex64], n: usize) -> Vec<f64> {
    let n = n as f64;
    ecf.iter()
        .map(|p| (n * p.norm_sqr() - 1.0) / (n - 1.0))
        .collect()
}

/// Mean over ordered pairs `j != k` of `W_m(Y_j - Y_k)`.
fn pair_transform_mean(values: &[f64], tail: &PowerTail) -> f64 {
    let n = values.len();
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let reach = tail.transform_cutoff();
    let partial: Vec<f64> = (0..n)
        .into_par_iter()
        .with_min_len(32)
        .map(|i| {
            let yi = sorted[i];
            sorted[i + 1..]
                .iter()
                .take_while(|&&yj| yj - yi <= reach)
                .map(|&yj| tail.transform(yj - yi))
                .sum::<f64>()
        })
        .collect();
    2.0 * partial.iter().sum::<f64>() / (n as f64 * (n as f64 - 1.0))
}

/// Spectral summary of one sample on one grid, reused across penalties.
#[derive(Debug, Clone)]
pub struct SampleSpectrum {
    n: usize,
    table: FilterTable,
    ecf: Vec<Complex64>,
    ecf_sq: Vec<f64>,
    h_sq: Vec<f64>,
    pair_tail: f64,
}

impl SampleSpectrum {
    /// Requires `n >= 2`.
    pub fn new(sample: &Sample, grid: &FrequencyGrid, error: &ErrorModel, m: u32) -> Result<Self> {
        sample.require_len(2, "risk estimation")?;
        let table = FilterTable::new(grid, error, m)?;
        let ecf = empirical_char_fn(sample, grid);
        let ecf_sq: Vec<f64> = ecf.iter().map(|p| p.norm_sqr()).collect();
        let h_sq = h_sq_from_ecf(&ecf, sample.len());
        let pair_tail = pair_transform_mean(sample.values(), &table.tail);
        Ok(Self {
            n: sample.len(),
            table,
            ecf,
            ecf_sq,
            h_sq,
            pair_tail,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h_sq_hat(&self) -> &[f64] {
        &self.h_sq
    }

    pub fn ecf(&self) -> &[Complex64] {
        &self.ecf
    }

    /// `V(alpha) = int |phi~_alpha|^2`.
    pub fn variance_integral(&self, alpha: f64) -> Result<f64> {
        self.table.kernel(alpha)?;
        Ok(self.table.variance_integral(alpha))
    }

    /// `int |phi~|^2 H~_n`, `int phi~/conj(g~) H~_n` and `V(alpha)`.
    fn pieces(&self, alpha: f64) -> Result<(f64, f64, f64)> {
        self.table.kernel(alpha)?;
        let (mut bias_part, mut cross, mut v) = (0.0, 0.0, 0.0);
        for k in 0..self.h_sq.len() {
            let w = self.table.weights[k];
            let f = self.table.at(k, alpha);
            bias_part += w * f.phi_sq * self.h_sq[k];
            cross += w * f.remainder * self.h_sq[k];
            v += w * f.phi_sq;
        }
        cross += self.pair_tail / alpha;
        Ok((bias_part, cross, v))
    }

    /// `int phi~_alpha / conj(g~) H~_n`, including the closed-form power tail.
    pub fn cross_term(&self, alpha: f64) -> Result<f64> {
        Ok(self.pieces(alpha)?.1)
    }

    /// Small-n risk criterion `R^(alpha, n1)`.
    pub fn estimated_risk(&self, alpha: f64, n1: usize) -> Result<f64> {
        Ok(self.decompose(alpha, n1)?.total())
    }

    pub fn decompose(&self, alpha: f64, n1: usize) -> Result<RiskDecomposition> {
        check_n1(n1)?;
        let (bias_part, cross, v) = self.pieces(alpha)?;
        let n1 = n1 as f64;
        Ok(RiskDecomposition {
            b_hat: (n1 - 1.0) / n1 * bias_part - 2.0 * cross,
            v_over_n1: v / n1,
        })
    }

    /// Cross-validation criterion `L^(alpha) = ||f~_n^alpha||^2 - 2 int phi~/conj(g~) H~_n`.
    pub fn cross_validation(&self, alpha: f64) -> Result<f64> {
        self.table.kernel(alpha)?;
        let norm: f64 = (0..self.ecf_sq.len())
            .map(|k| self.table.weights[k] * self.table.at(k, alpha).phi_sq * self.ecf_sq[k])
            .sum();
        Ok(norm - 2.0 * self.cross_term(alpha)?)
    }

    /// Realised integrated squared error `int (f_n^alpha - f)^2`.
    pub fn loss_ise(&self, alpha: f64, target: &TargetSpectrum) -> Result<f64> {
        let kernel = self.table.kernel(alpha)?;
        let grid_nodes = &target.nodes;
        if grid_nodes.len() != self.ecf.len() {
            return Err(SpedError::precondition(
                "target spectrum built on a different grid",
            ));
        }
        let mut acc = 0.0;
        for k in 0..self.ecf.len() {
            let w = self.table.weights[k];
            let phi = kernel.phi(grid_nodes[k]);
            let est = self.ecf[k] * phi;
            acc += w * (est.norm_sqr() - 2.0 * (est * target.cf[k].conj()).re);
        }
        Ok(acc / (2.0 * PI) + target.l2_norm_sq)
    }
}

/// Target characteristic function tabulated on a grid.
#[derive(Debug, Clone)]
pub struct TargetSpectrum {
    nodes: Vec<f64>,
    cf: Vec<Complex64>,
    l2_norm_sq: f64,
}

impl TargetSpectrum {
    pub fn new(target: &NormalMixture, grid: &FrequencyGrid) -> Self {
        Self {
            nodes: grid.nodes().to_vec(),
            cf: grid.nodes().iter().map(|&t| target.char_fn(t)).collect(),
            l2_norm_sq: target.l2_norm_sq(),
        }
    }
}

/// True risk functionals for a known target.
#[derive(Debug, Clone)]
pub struct TrueRiskModel {
    table: FilterTable,
    f_sq: Vec<f64>,
    l2_norm_sq: f64,
}

impl TrueRiskModel {
    pub fn new(
        target: &NormalMixture,
        error: &ErrorModel,
        m: u32,
        grid: &FrequencyGrid,
    ) -> Result<Self> {
        Ok(Self {
            table: FilterTable::new(grid, error, m)?,
            f_sq: grid
                .nodes()
                .iter()
                .map(|&t| target.char_fn(t).norm_sqr())
                .collect(),
            l2_norm_sq: target.l2_norm_sq(),
        })
    }

    /// `(int (phi~ g~)^2 |f~|^2, int phi~ g~ |f~|^2, V)`.
    fn pieces(&self, alpha: f64) -> Result<(f64, f64, f64)> {
        self.table.kernel(alpha)?;
        let (mut gain_sq, mut gain, mut v) = (0.0, 0.0, 0.0);
        for k in 0..self.f_sq.len() {
            let w = self.table.weights[k];
            let f = self.table.at(k, alpha);
            gain_sq += w * f.gain * f.gain * self.f_sq[k];
            gain += w * f.gain * self.f_sq[k];
            v += w * f.phi_sq;
        }
        Ok((gain_sq, gain, v))
    }

    /// `R(alpha, n) = (n-1)/n int |phi~|^2|h~|^2 - 2 int phi~/conj(g~) |h~|^2 + V/n`.
    pub fn risk(&self, alpha: f64, n: usize) -> Result<f64> {
        if n < 1 {
            return Err(SpedError::domain("sample size must be >= 1"));
        }
        let (gain_sq, gain, v) = self.pieces(alpha)?;
        let n = n as f64;
        // |phi~|^2 |h~|^2 = (phi~ g~)^2 |f~|^2 and phi~/conj(g~) |h~|^2 = phi~ g~ |f~|^2
        Ok((n - 1.0) / n * gain_sq - 2.0 * gain + v / n)
    }

    /// Integrated squared bias and integrated variance.
    pub fn bias_var(&self, alpha: f64, n: usize) -> Result<(f64, f64)> {
        if n < 1 {
            return Err(SpedError::domain("sample size must be >= 1"));
        }
        let (gain_sq, gain, v) = self.pieces(alpha)?;
        let bias_sq = self.l2_norm_sq + (gain_sq - 2.0 * gain) / (2.0 * PI);
        let int_var = (v - gain_sq) / (2.0 * PI * n as f64);
        Ok((bias_sq, int_var))
    }

    /// Expectation of `B^(alpha, n1)`.
    pub fn expected_b(&self, alpha: f64, n1: usize) -> Result<f64> {
        check_n1(n1)?;
        let (gain_sq, gain, _) = self.pieces(alpha)?;
        let n1 = n1 as f64;
        Ok((n1 - 1.0) / n1 * gain_sq - 2.0 * gain)
    }

    pub fn variance_integral(&self, alpha: f64) -> Result<f64> {
        self.table.kernel(alpha)?;
        Ok(self.table.variance_integral(alpha))
    }

    pub fn l2_norm_sq(&self) -> f64 {
        self.l2_norm_sq
    }

    pub fn curve(&self, alphas: &[f64], n: usize) -> Result<RiskCurve> {
        check_alphas(alphas)?;
        let values = alphas
            .iter()
            .map(|&a| self.risk(a, n))
            .collect::<Result<Vec<_>>>()?;
        RiskCurve::new(alphas.to_vec(), values, n, CurveKind::TrueRisk)
    }
}

/// True surrogate risk `R(alpha, n)`.
pub fn true_risk(
    alpha: f64,
    n: usize,
    target: &NormalMixture,
    error: &ErrorModel,
    m: u32,
    grid: &FrequencyGrid,
) -> Result<f64> {
    TrueRiskModel::new(target, error, m, grid)?.risk(alpha, n)
}

/// `(int (E f_n^alpha - f)^2, int Var f_n^alpha)`.
pub fn true_bias_var(
    alpha: f64,
    target: &NormalMixture,
    error: &ErrorModel,
    m: u32,
    n: usize,
    grid: &FrequencyGrid,
) -> Result<(f64, f64)> {
    TrueRiskModel::new(target, error, m, grid)?.bias_var(alpha, n)
}

/// Realised loss `int (f_n^alpha - f)^2` computed in the frequency domain.
pub fn true_loss_ise(
    sample: &Sample,
    alpha: f64,
    target: &NormalMixture,
    error: &ErrorModel,
    m: u32,
    grid: &FrequencyGrid,
) -> Result<f64> {
    let kernel = PenaltyKernel::new(alpha, m, *error)?;
    let ecf = empirical_char_fn(sample, grid);
    let mut acc = 0.0;
    for ((&t, &w), p) in grid.nodes().iter().zip(grid.weights()).zip(&ecf) {
        let diff = p * kernel.phi(t) - target.char_fn(t);
        acc += w * diff.norm_sqr();
    }
    // Beyond the grid cutoff the estimate vanishes and only ||f||^2 remains.
    let inside: f64 = grid.integrate(|t| target.char_fn(t).norm_sqr());
    Ok((acc - inside) / (2.0 * PI) + target.l2_norm_sq())
}

/// `R^(alpha, n1)` over `alphas`.
pub fn estimated_risk_curve(
    sample: &Sample,
    alphas: &[f64],
    n1: usize,
    m: u32,
    error: &ErrorModel,
    grid: &FrequencyGrid,
) -> Result<RiskCurve> {
    check_n1(n1)?;
    check_alphas(alphas)?;
    let spectrum = SampleSpectrum::new(sample, grid, error, m)?;
    spectrum_curve(&spectrum, alphas, n1)
}

pub(crate) fn spectrum_curve(
    spectrum: &SampleSpectrum,
    alphas: &[f64],
    n1: usize,
) -> Result<RiskCurve> {
    let values = alphas
        .iter()
        .map(|&a| spectrum.estimated_risk(a, n1))
        .collect::<Result<Vec<_>>>()?;
    RiskCurve::new(alphas.to_vec(), values, n1, CurveKind::EstimatedRisk)
}

pub(crate) fn spectrum_cv_curve(spectrum: &SampleSpectrum, alphas: &[f64]) -> Result<RiskCurve> {
    let values = alphas
        .iter()
        .map(|&a| spectrum.cross_validation(a))
        .collect::<Result<Vec<_>>>()?;
    RiskCurve::new(
        alphas.to_vec(),
        values,
        spectrum.n(),
        CurveKind::CrossValidation,
    )
}

/// Cross-validation criterion `L^(alpha)` over `alphas`.
pub fn cv_criterion(
    sample: &Sample,
    alphas: &[f64],
    m: u32,
    error: &ErrorModel,
    grid: &FrequencyGrid,
) -> Result<RiskCurve> {
    check_alphas(alphas)?;
    let spectrum = SampleSpectrum::new(sample, grid, error, m)?;
    spectrum_cv_curve(&spectrum, alphas)
}

/// Split `R^(alpha, n1)` into `B^(alpha, n1)` and `V(alpha)/n1`.
pub fn decompose_risk_estimate(
    sample: &Sample,
    alpha: f64,
    n1: usize,
    m: u32,
    error: &ErrorModel,
    grid: &FrequencyGrid,
) -> Result<RiskDecomposition> {
    SampleSpectrum::new(sample, grid, error, m)?.decompose(alpha, n1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use gauss_quad::GaussLegendre;
    use proptest::prelude::*;

    fn sd_for(p: f64) -> ErrorModel {
        ErrorModel::gaussian(crate::noise::calibrate_noise_sd(1.0, p).unwrap()).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
    }

    #[test]
    fn h_sq_is_one_at_origin() {
        let s = Sample::new(vec![0.3, -1.2, 2.5, 0.0]).unwrap();
        let g = FrequencyGrid::uniform(5.0, 10, 3.0).unwrap();
        let h = h_squared_hat(&s, &g).unwrap();
        assert_eq!(h[0], 1.0);
    }

    #[test]
    fn h_sq_two_points_is_a_cosine() {
        let s = Sample::new(vec![0.0, 1.0]).unwrap();
        let g = FrequencyGrid::uniform(PI, 2, 1.0).unwrap();
        let h = h_squared_hat(&s, &g).unwrap();
        assert!((h[2] + 1.0).abs() < 1e-12);
        assert!((h[1] - (PI / 2.0).cos()).abs() < 1e-12);
    }

    #[test]
    fn h_sq_needs_two_points() {
        let s = Sample::new(vec![1.0]).unwrap();
        let g = FrequencyGrid::uniform(1.0, 2, 1.0).unwrap();
        assert!(matches!(h_squared_hat(&s, &g), Err(SpedError::Domain(_))));
    }

    #[test]
    fn bias_var_matches_risk() {
        let target = crate::targets::marron_wand(1).unwrap();
        let error = sd_for(0.1);
        let g = FrequencyGrid::for_alpha_range(0.05, 0.05, 1, &error, 1e-12, 0.0).unwrap();
        let model = TrueRiskModel::new(&target, &error, 1, &g).unwrap();
        let (b, v) = model.bias_var(0.05, 100).unwrap();
        let via_parts = 2.0 * PI * (b + v - target.l2_norm_sq());
        let direct = model.risk(0.05, 100).unwrap();
        assert!(rel(via_parts, direct) < 1e-8, "{via_parts} vs {direct}");
    }

    #[test]
    fn bias_limits() {
        let target = crate::targets::marron_wand(1).unwrap();
        let error = ErrorModel::gaussian(0.33).unwrap();
        let g = FrequencyGrid::for_alpha_range(1e-8, 1e8, 1, &error, 1e-10, 0.0).unwrap();
        let model = TrueRiskModel::new(&target, &error, 1, &g).unwrap();
        let (b_small, _) = model.bias_var(1e-8, 100).unwrap();
        assert!((0.0..1e-3).contains(&b_small), "{b_small}");
        let (b_big, v_big) = model.bias_var(1e8, 100).unwrap();
        assert!((b_big - target.l2_norm_sq()).abs() < 1e-4);
        assert!(v_big >= 0.0);
        assert!(model.risk(1e8, 100).unwrap().abs() < 1e-3);
    }

    #[test]
    fn int_var_scales_as_one_over_n() {
        let target = crate::targets::marron_wand(2).unwrap();
        let error = ErrorModel::gaussian(0.3).unwrap();
        let g = FrequencyGrid::for_alpha_range(0.01, 0.01, 1, &error, 1e-10, 0.0).unwrap();
        let model = TrueRiskModel::new(&target, &error, 1, &g).unwrap();
        let (_, v100) = model.bias_var(0.01, 100).unwrap();
        let (_, v500) = model.bias_var(0.01, 500).unwrap();
        assert!(rel(v100, 5.0 * v500) < 1e-14);
        let cap = model.variance_integral(0.01).unwrap() / (2.0 * PI * 100.0);
        assert!(v100 > 0.0 && v100 <= cap);
    }

    /// `int_{-inf}^{inf} cos(t d) / (g~^2 + alpha t^2) dt` by Gauss-Legendre
    /// panels to `T` plus a two-term asymptotic tail.
    fn pair_integral(d: f64, alpha: f64, error: &ErrorModel) -> f64 {
        let gl = GaussLegendre::new(20).unwrap();
        let f = |t: f64| (t * d).cos() / (error.char_fn_sq(t) + alpha * t * t);
        let top = 2000.0;
        let panels = 10_000;
        let h = top / panels as f64;
        let body: f64 = (0..panels)
            .map(|i| gl.integrate(i as f64 * h, (i + 1) as f64 * h, f))
            .sum();
        let (s, c) = (d * top).sin_cos();
        let tail = (-s / (d * top * top) + 2.0 * c / (d * d * top.powi(3))) / alpha;
        2.0 * (body + tail)
    }

    #[test]
    fn cross_term_matches_pairwise_quadrature() {
        let error = ErrorModel::gaussian(0.5).unwrap();
        let ys = vec![-0.9, 0.15, 0.4, 1.7];
        let s = Sample::new(ys.clone()).unwrap();
        for &alpha in &[0.01, 0.3, 2.0] {
            let g = FrequencyGrid::for_alpha_range(alpha, alpha, 1, &error, 1e-12, s.max_abs())
                .unwrap();
            let spectrum = SampleSpectrum::new(&s, &g, &error, 1).unwrap();
            let mut want = 0.0;
            for j in 0..4 {
                for k in 0..4 {
                    if j != k {
                        want += pair_integral(ys[j] - ys[k], alpha, &error);
                    }
                }
            }
            want /= 12.0;
            let got = spectrum.cross_term(alpha).unwrap();
            assert!(rel(got, want) < 1e-8, "alpha={alpha}: {got} vs {want}");
        }
    }

    #[test]
    fn estimated_risk_vanishes_for_huge_alpha() {
        let error = ErrorModel::gaussian(0.4).unwrap();
        let s = Sample::new(vec![-1.0, 0.2, 0.5, 2.0, -0.3]).unwrap();
        let g = FrequencyGrid::for_alpha_range(1e4, 1e8, 1, &error, 1e-10, s.max_abs()).unwrap();
        let spectrum = SampleSpectrum::new(&s, &g, &error, 1).unwrap();
        // Every term concentrates near t = 0 where H~_n = 1, giving -1.5 pi / sqrt(alpha).
        for &a in &[1e4, 1e6, 1e8] {
            let r = spectrum.estimated_risk(a, 3).unwrap();
            let l = spectrum.cross_validation(a).unwrap();
            let lead = -1.5 * PI / a.sqrt();
            assert!(
                rel(r, lead) < 0.05 && rel(l, lead) < 0.05,
                "alpha={a}: {r} {l} {lead}"
            );
        }
        assert!(spectrum.estimated_risk(1e8, 3).unwrap().abs() < 1e-3);
    }

    #[test]
    fn decomposition_properties() {
        let error = ErrorModel::gaussian(0.3).unwrap();
        let s = Sample::new(vec![-1.1, -0.2, 0.0, 0.7, 1.9, 0.45, -0.6]).unwrap();
        let alphas = [1e-3, 3e-3, 1e-2, 3e-2, 0.1];
        let g = FrequencyGrid::for_alpha_range(1e-3, 0.1, 1, &error, 1e-10, s.max_abs()).unwrap();
        let spectrum = SampleSpectrum::new(&s, &g, &error, 1).unwrap();
        let mut last_v = f64::INFINITY;
        for &a in &alphas {
            let d = spectrum.decompose(a, 3).unwrap();
            assert!(rel(d.total(), spectrum.estimated_risk(a, 3).unwrap()) < 1e-12);
            let v = spectrum.variance_integral(a).unwrap();
            assert!(v < last_v);
            last_v = v;
            let a_int: f64 = g
                .nodes()
                .iter()
                .zip(g.weights())
                .zip(spectrum.h_sq_hat())
                .map(|((&t, &w), &h)| w * PenaltyKernel::new(a, 1, error).unwrap().phi_sq(t) * h)
                .sum();
            let b10 = spectrum.decompose(a, 10).unwrap().b_hat;
            let b_big = spectrum.decompose(a, 1_000_000).unwrap().b_hat;
            let want = (0.1 - 1e-6) * a_int;
            assert!((b_big - b10 - want).abs() <= 1e-12 * (b10.abs() + a_int.abs()));
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        let error = ErrorModel::gaussian(0.3).unwrap();
        let s = Sample::new(vec![0.0, 1.0, 2.0]).unwrap();
        let g = FrequencyGrid::for_alpha_range(0.1, 1.0, 1, &error, 1e-8, 2.0).unwrap();
        assert!(matches!(
            estimated_risk_curve(&s, &[0.1, 1.0], 1, 1, &error, &g),
            Err(SpedError::Domain(_))
        ));
        assert!(estimated_risk_curve(&s, &[1.0, 0.1], 2, 1, &error, &g).is_err());
        assert!(cv_criterion(&s, &[], 1, &error, &g).is_err());
    }

    #[test]
    fn ise_matches_x_space_riemann_sum() {
        use rand::SeedableRng;
        let target = crate::targets::marron_wand(1).unwrap();
        let error = sd_for(0.1);
        let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(11);
        let x = target.sample(&mut rng, 10);
        let e = error.sample(&mut rng, 10);
        let s = Sample::new(x.iter().zip(&e).map(|(a, b)| a + b).collect()).unwrap();
        let half = 14.0;
        let g = FrequencyGrid::for_alpha_range(0.1, 0.1, 1, &error, 1e-12, half).unwrap();
        let kernel = PenaltyKernel::new(0.1, 1, error).unwrap();
        let h = 2e-3;
        let xs: Vec<f64> = (0..=(2.0 * half / h) as usize)
            .map(|i| -half + i as f64 * h)
            .collect();
        let fhat = crate::estimator::estimate_density(&s, &kernel, &xs, &g).unwrap();
        let riemann: f64 = xs
            .iter()
            .zip(&fhat)
            .map(|(&x, &v)| (v - target.pdf(x)).powi(2) * h)
            .sum();
        let spectral = true_loss_ise(&s, 0.1, &target, &error, 1, &g).unwrap();
        assert!(rel(spectral, riemann) < 1e-4, "{spectral} vs {riemann}");
        let ts = TargetSpectrum::new(&target, &g);
        let spectrum = SampleSpectrum::new(&s, &g, &error, 1).unwrap();
        assert!(rel(spectrum.loss_ise(0.1, &ts).unwrap(), spectral) < 1e-10);
    }

    #[test]
    fn ise_tends_to_norm_for_huge_alpha() {
        let target = crate::targets::marron_wand(3).unwrap();
        let error = ErrorModel::gaussian(0.3).unwrap();
        let s = Sample::new(vec![-0.5, 0.1, 0.9]).unwrap();
        let g = FrequencyGrid::for_alpha_range(1e9, 1e9, 1, &error, 1e-10, 10.0).unwrap();
        let ise = true_loss_ise(&s, 1e9, &target, &error, 1, &g).unwrap();
        assert!((ise - target.l2_norm_sq()).abs() < 1e-3);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn full_size_risk_equals_cv(
            ys in prop::collection::vec(-3.0f64..3.0, 2..25),
            log_alpha in -4.0f64..0.5,
            sd in 0.15f64..0.8,
            m in 1u32..3,
        ) {
            let alpha = 10f64.powf(log_alpha);
            let error = ErrorModel::gaussian(sd).unwrap();
            let s = Sample::new(ys).unwrap();
            let g = FrequencyGrid::for_alpha_range(alpha, alpha, m, &error, 1e-9, s.max_abs()).unwrap();
            let spectrum = SampleSpectrum::new(&s, &g, &error, m).unwrap();
            let r = spectrum.estimated_risk(alpha, s.len()).unwrap();
            let l = spectrum.cross_validation(alpha).unwrap();
            let scale = spectrum.variance_integral(alpha).unwrap() + spectrum.cross_term(alpha).unwrap().abs();
            prop_assert!((r - l).abs() <= 1e-10 * r.abs().max(l.abs()).max(1e-3 * scale), "{} vs {}", r, l);
        }
    }
}
