//! Pairwise (U-statistic) evaluation of the small-n risk criterion.
//!
//! `R^(alpha, n1)` is rewritten as a constant plus `2 pi / n^2` times the sum of
//! `theta_alpha(Y_j - Y_k)` over all ordered pairs, diagonal included, where
//! `theta_alpha` is the inverse Fourier transform of
//! `a1 |phi~_alpha|^2 - a2 / (g~^2 + alpha t^(2m))`. The transform is computed
//! by Gauss-Legendre panels on the Gaussian-decaying part and in closed form on
//! the power tail, independently of the trapezoid path in [`crate::risk`].

use std::f64::consts::PI;

use gauss_quad::GaussLegendre;

use crate::error::{Result, SpedError};
use crate::estimator::Sample;
use crate::grid::tail_bound;
use crate::kernel::PenaltyKernel;
use crate::noise::ErrorModel;
use crate::power_tail::PowerTail;

/// Largest sample accepted by [`estimated_risk_ustat`].
pub const DEFAULT_MAX_N: usize = 200;

const PANEL_POINTS: usize = 20;
const CUTOFF_TOL: f64 = 1e-14;

/// `theta_alpha` for fixed `(alpha, n, n1, m)`, tabulated at quadrature nodes.
#[derive(Debug, Clone)]
pub struct ThetaKernel {
    nodes: Vec<f64>,
    /// Quadrature weight times the Gaussian-decaying part of `theta~`.
    weighted: Vec<f64>,
    tail: PowerTail,
    /// Coefficient of `W_m(x)` in `theta_alpha(x)`.
    tail_coef: f64,
    variance_integral: f64,
    inverse_integral: f64,
    a1: f64,
    a2: f64,
}

impl ThetaKernel {
    pub fn new(alpha: f64, n: usize, n1: usize, m: u32, error: &ErrorModel) -> Result<Self> {
        if n < 2 || n1 < 2 {
            return Err(SpedError::domain("n and n1 must both be >= 2"));
        }
        let kernel = PenaltyKernel::new(alpha, m, *error)?;
        let tail = kernel.power_tail();
        let (nf, n1f) = (n as f64, n1 as f64);
        let a1 = nf * (n1f - 1.0) / (n1f * (nf - 1.0));
        let a2 = 2.0 * nf / (nf - 1.0);

        let mut cutoff = kernel.crossover().max(1.0 / error.sd());
        while tail_bound(&kernel, cutoff) > CUTOFF_TOL {
            cutoff *= 1.05;
        }
        let width = 0.2f64.min(0.25 * alpha.powf(-1.0 / (2.0 * m as f64)));
        let panels = (cutoff / width).ceil() as usize;
        let h = cutoff / panels as f64;
        let rule = GaussLegendre::new(PANEL_POINTS)
            .map_err(|e| SpedError::precondition(format!("quadrature rule: {e}")))?;

        let mut nodes = Vec::with_capacity(panels * PANEL_POINTS);
        let mut weighted = Vec::with_capacity(panels * PANEL_POINTS);
        let (mut v, mut r_int) = (0.0, 0.0);
        for p in 0..panels {
            let (lo, hi) = (p as f64 * h, (p + 1) as f64 * h);
            for (x, w) in rule.nodes().zip(rule.weights()) {
                let t = 0.5 * (hi - lo) * x + 0.5 * (hi + lo);
                let w = 0.5 * (hi - lo) * w;
                let phi_sq = kernel.phi_sq(t);
                let r = kernel.tail_remainder(&tail, t);
                nodes.push(t);
                weighted.push(w * (a1 * phi_sq - a2 * r));
                v += w * phi_sq;
                r_int += w * r;
            }
        }
        Ok(Self {
            nodes,
            weighted,
            tail,
            tail_coef: -a2 / (2.0 * PI * alpha),
            variance_integral: 2.0 * v,
            inverse_integral: 2.0 * r_int + tail.transform(0.0) / alpha,
            a1,
            a2,
        })
    }

    /// `theta_alpha(x) = (1/2 pi) int theta~_alpha(t) exp(itx) dt`.
    pub fn eval(&self, x: f64) -> f64 {
        let body: f64 = self
            .nodes
            .iter()
            .zip(&self.weighted)
            .map(|(&t, &w)| w * (t * x).cos())
            .sum();
        body / PI + self.tail_coef * self.tail.transform(x)
    }

    /// `V(alpha) = int |phi~_alpha|^2`.
    pub fn variance_integral(&self) -> f64 {
        self.variance_integral
    }

    /// `int 1 / (g~^2 + alpha t^(2m))`.
    pub fn inverse_integral(&self) -> f64 {
        self.inverse_integral
    }

    pub fn coefficients(&self) -> (f64, f64) {
        (self.a1, self.a2)
    }
}

/// `R^(alpha, n1)` as a U-statistic in the pairwise differences, refusing
/// samples larger than [`DEFAULT_MAX_N`].
pub fn estimated_risk_ustat(
    sample: &Sample,
    alpha: f64,
    n1: usize,
    m: u32,
    error: &ErrorModel,
) -> Result<f64> {
    estimated_risk_ustat_capped(sample, alpha, n1, m, error, DEFAULT_MAX_N)
}

pub fn estimated_risk_ustat_capped(
    sample: &Sample,
    alpha: f64,
    n1: usize,
    m: u32,
    error: &ErrorModel,
    max_n: usize,
) -> Result<f64> {
    sample.require_len(2, "the pairwise risk estimate")?;
    let n = sample.len();
    if n > max_n {
        return Err(SpedError::precondition(format!(
            "pairwise risk estimate is quadratic in n; n = {n} exceeds the cap {max_n}"
        )));
    }
    let theta = ThetaKernel::new(alpha, n, n1, m, error)?;
    let (nf, n1f) = (n as f64, n1 as f64);
    let v = theta.variance_integral();
    let constant = v / n1f - (n1f - 1.0) / (n1f * (nf - 1.0)) * v
        + 2.0 / (nf - 1.0) * theta.inverse_integral();

    let ys = sample.values();
    let mut off_diagonal = 0.0;
    for j in 0..n {
        for k in j + 1..n {
            off_diagonal += theta.eval(ys[j] - ys[k]);
        }
    }
    let pair_sum = nf * theta.eval(0.0) + 2.0 * off_diagonal;
    Ok(constant + 2.0 * PI / (nf * nf) * pair_sum)
}
