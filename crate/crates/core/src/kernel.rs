//! The SPeD spectral filter.

use num_complex::Complex64;

use crate::error::{Result, SpedError};
use crate::noise::ErrorModel;
use crate::power_tail::PowerTail;

/// Penalty parameter, penalised derivative order and error model: everything
/// needed to evaluate `phi~_alpha(t) = conj(g~) / (|g~|^2 + alpha |t|^{2m})`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PenaltyKernel {
    alpha: f64,
    m: u32,
    error: ErrorModel,
}

impl PenaltyKernel {
    pub fn new(alpha: f64, m: u32, error: ErrorModel) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(SpedError::domain(format!(
                "alpha must be positive and finite, got {alpha}"
            )));
        }
        if m < 1 {
            return Err(SpedError::domain(
                "penalised derivative order m must be >= 1",
            ));
        }
        Ok(Self { alpha, m, error })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn order(&self) -> u32 {
        self.m
    }

    pub fn error(&self) -> &ErrorModel {
        &self.error
    }

    /// The same kernel at another penalty level.
    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        Self::new(alpha, self.m, self.error)
    }

    #[inline]
    fn penalty(&self, t: f64) -> f64 {
        self.alpha * t.abs().powi(2 * self.m as i32)
    }

    /// `|g~(t)|^2 + alpha |t|^{2m}`.
    #[inline]
    pub fn denominator(&self, t: f64) -> f64 {
        self.error.char_fn_sq(t) + self.penalty(t)
    }

    pub fn phi_tilde(&self, t: f64) -> Complex64 {
        self.error.char_fn(t).conj() / self.denominator(t)
    }

    /// `phi~_alpha(t)`; real because the error characteristic function is.
    #[inline]
    pub fn phi(&self, t: f64) -> f64 {
        self.error.char_fn_re(t) / self.denominator(t)
    }

    /// `|phi~_alpha(t)|^2`.
    #[inline]
    pub fn phi_sq(&self, t: f64) -> f64 {
        let d = self.denominator(t);
        self.error.char_fn_sq(t) / (d * d)
    }

    /// `phi~_alpha(t) g~(t) = |g~|^2 / (|g~|^2 + alpha |t|^{2m})`, in `[0, 1]`.
    #[inline]
    pub fn gain(&self, t: f64) -> f64 {
        let g2 = self.error.char_fn_sq(t);
        g2 / (g2 + self.penalty(t))
    }

    /// `phi~_alpha(t) / conj(g~(t)) = 1 / (|g~|^2 + alpha |t|^{2m})`.
    #[inline]
    pub fn inverse_denominator(&self, t: f64) -> f64 {
        1.0 / self.denominator(t)
    }

    /// The power tail split off from [`Self::inverse_denominator`].
    pub fn power_tail(&self) -> PowerTail {
        PowerTail::new(self.m, self.error.sd())
    }

    /// `1/(|g~|^2 + alpha t^{2m}) - q_m(t)/alpha`, which decays like `|g~|^2`.
    #[inline]
    pub fn tail_remainder(&self, tail: &PowerTail, t: f64) -> f64 {
        let g2 = self.error.char_fn_sq(t);
        let pen = self.penalty(t);
        if pen > g2 {
            // Past the crossover both pieces are Gaussian-small; avoid
            // subtracting two nearly equal power laws.
            tail.deficit(t) / self.alpha - g2 / (pen * (g2 + pen))
        } else {
            1.0 / (g2 + pen) - tail.eval(t) / self.alpha
        }
    }

    /// Crossover frequency where `|g~(t)|^2 = alpha t^{2m}`.
    pub fn crossover(&self) -> f64 {
        // Bisection on u = ln t; the balance is increasing in u.
        let s2 = self.error.sd() * self.error.sd();
        let two_m = 2.0 * self.m as f64;
        let ln_alpha = self.alpha.ln();
        let f = |u: f64| s2 * (2.0 * u).exp() + ln_alpha + two_m * u;
        let (mut lo, mut hi) = (-50.0f64, 50.0f64);
        while f(lo) > 0.0 {
            lo *= 2.0;
        }
        while f(hi) < 0.0 {
            hi *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        (0.5 * (lo + hi)).exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn kernel(alpha: f64, m: u32, sd: f64) -> PenaltyKernel {
        PenaltyKernel::new(alpha, m, ErrorModel::gaussian(sd).unwrap()).unwrap()
    }

    #[test]
    fn phi_values() {
        for &a in &[1e-6, 0.1, 1.0, 1e6] {
            assert_eq!(kernel(a, 1, 1.0).phi_tilde(0.0), Complex64::new(1.0, 0.0));
        }
        let want = (-0.5f64).exp() / ((-1.0f64).exp() + 1.0);
        let got = kernel(1.0, 1, 1.0).phi_tilde(1.0);
        assert!((got.re - want).abs() < 1e-15);
        assert!((got.re - 0.443410).abs() < 1e-6);
        assert_eq!(got.im, 0.0);
        assert!(kernel(1e14, 1, 1.0).phi(1.0) < 1e-14);
    }

    #[test]
    fn rejects_invalid() {
        let e = ErrorModel::gaussian(1.0).unwrap();
        assert!(PenaltyKernel::new(0.0, 1, e).is_err());
        assert!(PenaltyKernel::new(-1.0, 1, e).is_err());
        assert!(PenaltyKernel::new(1.0, 0, e).is_err());
    }

    #[test]
    fn crossover_solves_balance() {
        for &(a, m, s) in &[
            (1e-6, 1, 0.33),
            (1e-2, 2, 0.5),
            (10.0, 1, 1.0),
            (1e-9, 3, 0.1),
        ] {
            let k = kernel(a, m, s);
            let t = k.crossover();
            let lhs = k.error().char_fn_sq(t);
            let rhs = a * t.powi(2 * m as i32);
            assert!((lhs / rhs - 1.0).abs() < 1e-10, "{a} {m} {s}: {lhs} {rhs}");
        }
    }

    #[test]
    fn remainder_decays_like_error_char_fn() {
        let k = kernel(1e-5, 1, 0.33);
        let tail = k.power_tail();
        assert!(k.tail_remainder(&tail, 40.0).abs() < 1e-50);
        // both branches agree with the defining difference where it is well conditioned
        for &t in &[0.5, 3.0, 6.0, 9.0, 12.0] {
            let direct = k.inverse_denominator(t) - tail.eval(t) / k.alpha();
            let r = k.tail_remainder(&tail, t);
            assert!(
                (r - direct).abs() < 1e-9 * (1.0 + direct.abs()),
                "t={t}: {r} vs {direct}"
            );
        }
        assert!(k.tail_remainder(&tail, 0.0).is_finite());
    }

    proptest! {
        #[test]
        fn filter_gain_bounded(log_a in -8.0f64..4.0, t in -60.0f64..60.0, sd in 0.05f64..2.0, m in 1u32..4) {
            let k = kernel(10f64.powf(log_a), m, sd);
            let prod = k.phi_tilde(t) * k.error().char_fn(t);
            prop_assert!(prod.norm() <= 1.0 + 1e-15);
            prop_assert!((prod.re - k.gain(t)).abs() <= 1e-12 * (1.0 + prod.re));
            prop_assert!((k.phi_sq(t) - k.phi(t).powi(2)).abs() <= 1e-12 * k.phi_sq(t).max(1e-300));
        }
    }
}
