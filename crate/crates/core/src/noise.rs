//! Known measurement-error densities.
//!
//! Only zero-mean Gaussian noise is supported. The quadrature module relies
//! on the Gaussian form of the characteristic function for its analytic tail
//! bounds, so the model is a closed enum rather than a trait.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Result, SpedError};

/// Distribution family of the measurement error.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Gaussian,
}

/// The known error density `g`, centred at zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorModel {
    kind: ErrorKind,
    sd: f64,
}

impl ErrorModel {
    /// Zero-mean Gaussian noise with standard deviation `sd > 0`.
    pub fn gaussian(sd: f64) -> Result<Self> {
        if !(sd.is_finite() && sd > 0.0) {
            return Err(SpedError::domain(format!(
                "noise sd must be positive and finite, got {sd}"
            )));
        }
        Ok(Self {
            kind: ErrorKind::Gaussian,
            sd,
        })
    }

    pub fn kind(&self) -> ErrorKind {
        self.kind
    }

    pub fn sd(&self) -> f64 {
        self.sd
    }

    /// Characteristic function `E[exp(-itE)]`.
    pub fn char_fn(&self, t: f64) -> Complex64 {
        Complex64::new(self.char_fn_re(t), 0.0)
    }

    /// Real part of the characteristic function; for Gaussian noise this is
    /// the whole value.
    #[inline]
    pub fn char_fn_re(&self, t: f64) -> f64 {
        match self.kind {
            ErrorKind::Gaussian => (-0.5 * self.sd * self.sd * t * t).exp(),
        }
    }

    /// `|g~(t)|^2`, evaluated without squaring an underflowed value.
    #[inline]
    pub fn char_fn_sq(&self, t: f64) -> f64 {
        match self.kind {
            ErrorKind::Gaussian => (-self.sd * self.sd * t * t).exp(),
        }
    }

    /// `count` i.i.d. draws from the error density.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, count: usize) -> Vec<f64> {
        match self.kind {
            ErrorKind::Gaussian => (0..count)
                .map(|_| self.sd * rng.sample::<f64, _>(StandardNormal))
                .collect(),
        }
    }
}

/// Noise standard deviation giving `p = Var(E) / Var(Y)` when `Var(X) = var_x`
/// and `X`, `E` are independent.
pub fn calibrate_noise_sd(var_x: f64, p: f64) -> Result<f64> {
    if !(var_x.is_finite() && var_x > 0.0) {
        return Err(SpedError::domain(format!(
            "signal variance must be positive, got {var_x}"
        )));
    }
    if !(0.0..1.0).contains(&p) {
        return Err(SpedError::domain(format!(
            "noise ratio p must lie in [0, 1), got {p}"
        )));
    }
    Ok((p * var_x / (1.0 - p)).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn char_fn_values() {
        let g = ErrorModel::gaussian(1.0).unwrap();
        assert_eq!(g.char_fn(0.0), Complex64::new(1.0, 0.0));
        assert!((g.char_fn(1.0).re - (-0.5f64).exp()).abs() < 1e-15);
        assert!((g.char_fn(1.0).re - 0.606531).abs() < 1e-6);
        assert_eq!(g.char_fn(1.0).im, 0.0);
        let g2 = ErrorModel::gaussian(2.0).unwrap();
        assert_eq!(g2.char_fn(-1.0), g2.char_fn(1.0));
    }

    #[test]
    fn char_fn_bounded_and_hermitian() {
        let g = ErrorModel::gaussian(0.7).unwrap();
        for i in -200..=200 {
            let t = i as f64 * 0.173;
            let v = g.char_fn(t);
            assert!(v.norm() <= 1.0);
            assert_eq!(g.char_fn(-t), v.conj());
            assert!((g.char_fn_sq(t) - v.norm_sqr()).abs() < 1e-15);
        }
    }

    #[test]
    fn rejects_bad_sd() {
        assert!(ErrorModel::gaussian(0.0).is_err());
        assert!(ErrorModel::gaussian(-1.0).is_err());
        assert!(ErrorModel::gaussian(f64::NAN).is_err());
    }

    #[test]
    fn calibration_examples() {
        let sd = calibrate_noise_sd(2.0, 0.5).unwrap();
        assert!((sd * sd - 2.0).abs() < 1e-12);
        assert_eq!(calibrate_noise_sd(1.0, 0.0).unwrap(), 0.0);
        assert!((calibrate_noise_sd(1.0, 0.1).unwrap() - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn calibration_rejects_out_of_domain() {
        assert!(calibrate_noise_sd(1.0, 1.0).is_err());
        assert!(calibrate_noise_sd(1.0, -0.1).is_err());
        assert!(calibrate_noise_sd(0.0, 0.1).is_err());
    }

    #[test]
    fn calibration_round_trips() {
        for &var_x in &[0.1, 1.0, 2.5, 40.0] {
            for &p in &[0.0, 0.01, 0.1, 0.3, 0.5, 0.9, 0.999] {
                let sd = calibrate_noise_sd(var_x, p).unwrap();
                let back = sd * sd / (var_x + sd * sd);
                assert!((back - p).abs() < 1e-12, "{var_x} {p} {back}");
            }
        }
    }

    #[test]
    fn sampling_moments_and_determinism() {
        let g = ErrorModel::gaussian(1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        assert!(g.sample(&mut rng, 0).is_empty());
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let xs = g.sample(&mut rng, 100_000);
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        assert!(mean.abs() < 4.0 / n.sqrt());
        assert!((var.sqrt() - 1.0).abs() < 0.02);
        let mut rng2 = ChaCha8Rng::seed_from_u64(11);
        assert_eq!(g.sample(&mut rng2, 100_000), xs);
    }
}
