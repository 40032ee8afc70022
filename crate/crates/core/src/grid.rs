//! Uniform trapezoid grids over the frequency axis.
//!
//! Every integrand in this crate is an even real function of `t`, so a grid
//! stores the half line `0 = t_0 < t_1 < ... < t_K = T` with weights that
//! already account for the mirrored half (`t_0` counted once).

use std::f64::consts::PI;

use crate::error::{Result, SpedError};
use crate::kernel::PenaltyKernel;
use crate::noise::ErrorModel;
use crate::power_tail::gaussian_tail;

/// Refuse grids larger than this many nodes.
pub const MAX_NODES: usize = 50_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyGrid {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    step: f64,
    cutoff: f64,
    tail_bound: f64,
    oscillation_scale: f64,
}

impl FrequencyGrid {
    /// Grid for a single kernel. See [`Self::for_alpha_range`].
    pub fn build(kernel: &PenaltyKernel, tolerance: f64, oscillation_scale: f64) -> Result<Self> {
        Self::for_alpha_range(
            kernel.alpha(),
            kernel.alpha(),
            kernel.order(),
            kernel.error(),
            tolerance,
            oscillation_scale,
        )
    }

    /// Grid shared by every penalty in `[alpha_min, alpha_max]`.
    ///
    /// The cutoff `T` is the smallest (on a 2% ladder) for which the analytic
    /// bound on the neglected mass of all filter integrands at `alpha_min` is
    /// below `tolerance`. The spacing resolves `exp(-itx)` for
    /// `|x| <= 2 * oscillation_scale` and keeps the trapezoid aliasing error,
    /// governed by the complex poles of the filter, below the same tolerance.
    pub fn for_alpha_range(
        alpha_min: f64,
        alpha_max: f64,
        m: u32,
        error: &ErrorModel,
        tolerance: f64,
        oscillation_scale: f64,
    ) -> Result<Self> {
        if !(tolerance.is_finite() && tolerance > 0.0) {
            return Err(SpedError::domain(format!(
                "quadrature tolerance must be positive, got {tolerance}"
            )));
        }
        if !(oscillation_scale.is_finite() && oscillation_scale >= 0.0) {
            return Err(SpedError::domain(format!(
                "oscillation scale must be finite and non-negative, got {oscillation_scale}"
            )));
        }
        if !(alpha_min <= alpha_max) {
            return Err(SpedError::domain("alpha_min must not exceed alpha_max"));
        }
        let worst = PenaltyKernel::new(alpha_min, m, *error)?;
        PenaltyKernel::new(alpha_max, m, *error)?;
        let s = error.sd();

        let mut cutoff = worst.crossover().max(1.0 / s);
        while tail_bound(&worst, cutoff) > tolerance {
            cutoff *= 1.02;
        }

        let m_f = m as f64;
        let half_angle = (PI / (2.0 * m_f)).sin();
        let pole_distance = [alpha_min, alpha_max]
            .iter()
            .map(|a| a.powf(-1.0 / (2.0 * m_f)) * half_angle)
            .fold(PI / (2.0 * s * s * cutoff), f64::min)
            * 0.5;
        let decades = (1.0 / tolerance).ln() + 10.0;
        let reach = 2.0 * oscillation_scale;
        let mut step = 2.0 * PI / (reach + decades / pole_distance);
        if oscillation_scale > 0.0 {
            step = step.min(PI / (4.0 * oscillation_scale));
        }

        let count = (cutoff / step).ceil();
        if count > MAX_NODES as f64 {
            return Err(SpedError::precondition(format!(
                "frequency grid would need {count} nodes (cutoff {cutoff}, step {step})"
            )));
        }
        let count = count as usize;
        let mut grid = Self::uniform(cutoff, count, oscillation_scale)?;
        grid.tail_bound = tail_bound(&worst, cutoff);
        Ok(grid)
    }

    /// `count` equal intervals on `[0, cutoff]`; tail bound left at zero.
    pub fn uniform(cutoff: f64, count: usize, oscillation_scale: f64) -> Result<Self> {
        if !(cutoff.is_finite() && cutoff > 0.0) || count == 0 {
            return Err(SpedError::domain(
                "grid needs a positive cutoff and at least one interval",
            ));
        }
        let step = cutoff / count as f64;
        let nodes: Vec<f64> = (0..=count).map(|k| k as f64 * step).collect();
        let mut weights = vec![2.0 * step; count + 1];
        weights[0] = step;
        weights[count] = step;
        Ok(Self {
            nodes,
            weights,
            step,
            cutoff,
            tail_bound: 0.0,
            oscillation_scale,
        })
    }

    /// Same cutoff with the spacing divided by `factor`.
    pub fn refined(&self, factor: usize) -> Self {
        let count = (self.nodes.len() - 1) * factor.max(1);
        let mut g = Self::uniform(self.cutoff, count, self.oscillation_scale)
            .expect("refining a valid grid");
        g.tail_bound = self.tail_bound;
        g
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    pub fn oscillation_scale(&self) -> f64 {
        self.oscillation_scale
    }

    /// `int_{-T}^{T} f(t) dt` for an even `f`.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&t, &w)| w * f(t))
            .sum()
    }
}

/// Bound on the mass beyond `cutoff` (both half lines) of the integrands
/// `|phi~|`, `|phi~|^2` and the tail remainder, weighted by their largest
/// coefficients in the criteria. Valid for `cutoff` past the crossover.
pub fn tail_bound(kernel: &PenaltyKernel, cutoff: f64) -> f64 {
    let s2 = kernel.error().sd().powi(2);
    let alpha = kernel.alpha();
    let pen = alpha * cutoff.powi(2 * kernel.order() as i32);
    // |phi~| <= |g~| / (alpha t^{2m})
    let phi = gaussian_tail(0.5 * s2, cutoff) / pen;
    // |phi~|^2 <= |g~|^2 / (alpha t^{2m})^2
    let phi_sq = gaussian_tail(s2, cutoff) / (pen * pen);
    // |remainder| <= Q(m, s^2 t^2) / (alpha t^{2m}) + |g~|^2 / (alpha t^{2m})^2
    let remainder = kernel.power_tail().deficit_tail_bound(cutoff) / alpha + phi_sq;
    2.0 * (phi + phi_sq + 2.0 * remainder)
}
