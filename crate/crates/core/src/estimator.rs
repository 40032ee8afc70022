//! Observed samples, the empirical characteristic function and the SPeD
//! density estimate `f_n^alpha(x) = (1/2pi) int exp(itx) phi~_alpha(t) P~_n(t) dt`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Result, SpedError};
use crate::grid::FrequencyGrid;
use crate::kernel::PenaltyKernel;

/// Observations `Y_1, ..., Y_n` of `X + E`.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    values: Vec<f64>,
}

impl Sample {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(SpedError::domain("sample is empty"));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(SpedError::Data(format!(
                "sample value {i} is not finite: {}",
                values[i]
            )));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |a, v| a.max(v.abs()))
    }

    /// Fails unless `n >= min`.
    pub fn require_len(&self, min: usize, what: &str) -> Result<()> {
        if self.len() < min {
            return Err(SpedError::domain(format!(
                "{what} needs at least {min} observations, got {}",
                self.len()
            )));
        }
        Ok(())
    }
}

/// `P~_n(t) = (1/n) sum_j exp(-i t Y_j)` at every grid node.
pub fn empirical_char_fn(sample: &Sample, grid: &FrequencyGrid) -> Vec<Complex64> {
    let ys = sample.values();
    let inv_n = 1.0 / ys.len() as f64;
    grid.nodes()
        .par_iter()
        .with_min_len(64)
        .map(|&t| {
            if t == 0.0 {
                return Complex64::new(1.0, 0.0);
            }
            let (mut re, mut im) = (0.0, 0.0);
            for &y in ys {
                let (s, c) = (t * y).sin_cos();
                re += c;
                im -= s;
            }
            Complex64::new(re * inv_n, im * inv_n)
        })
        .collect()
}

/// Evaluate the SPeD estimate at `xs`.
///
/// The grid must have been built with an oscillation scale covering both the
/// sample and the evaluation points.
pub fn estimate_density(
    sample: &Sample,
    kernel: &PenaltyKernel,
    xs: &[f64],
    grid: &FrequencyGrid,
) -> Result<Vec<f64>> {
    let reach = xs.iter().fold(sample.max_abs(), |a, x| a.max(x.abs()));
    if reach > grid.oscillation_scale() {
        return Err(SpedError::precondition(format!(
            "grid resolves |x| <= {} but data/evaluation points reach {reach}",
            grid.oscillation_scale()
        )));
    }
    let ecf = empirical_char_fn(sample, grid);
    let filtered: Vec<(f64, f64, Complex64, Complex64)> = grid
        .nodes()
        .iter()
        .zip(grid.weights())
        .zip(&ecf)
        .map(|((&t, &w), &p)| {
            // Mirror-image nodes are kept separate so the imaginary parts
            // cancel numerically rather than by construction.
            let plus = kernel.phi_tilde(t) * p;
            let minus = kernel.phi_tilde(-t) * p.conj();
            (t, 0.5 * w, plus, minus)
        })
        .collect();
    xs.par_iter()
        .map(|&x| {
            let mut acc = Complex64::new(0.0, 0.0);
            for &(t, hw, plus, minus) in &filtered {
                let e = Complex64::from_polar(1.0, t * x);
                acc += hw * (e * plus + e.conj() * minus);
            }
            let v = acc / (2.0 * PI);
            if v.im.abs() >= 1e-8 * (1.0 + v.re.abs()) {
                return Err(SpedError::Data(format!(
                    "imaginary quadrature residue {} at x = {x}",
                    v.im
                )));
            }
            Ok(v.re)
        })
        .collect()
}
