//! Closed-form handling of the `|t|^{-2m}` tail of `1 / (|g~|^2 + alpha |t|^{2m})`.
//!
//! The cross term of every risk criterion integrates the empirical `H~_n(t)`
//! against `1 / (|g~(t)|^2 + alpha t^{2m})`, which decays only like
//! `1 / (alpha t^{2m})`. A truncated trapezoid rule cannot resolve that tail.
//! We split off the smooth function
//!
//! ```text
//! q_m(t) = P(m, c^2 t^2) / t^{2m}
//!        = (1 / Gamma(m)) * int_0^{c^2} s^{m-1} exp(-s t^2) ds
//! ```
//!
//! (`P` is the regularised lower incomplete gamma function). `q_m` is entire,
//! equals `t^{-2m}` up to a Gaussian-small correction for large `t`, and has
//! the closed-form cosine transform
//!
//! ```text
//! W_m(d) = int q_m(t) cos(t d) dt
//!        = sqrt(pi) / Gamma(m) * c^{2m-1} * G_m(d^2 / (4 c^2)),
//! G_m(x) = x^{m-1/2} Gamma(1/2 - m, x).
//! ```
//!
//! `G_m` is evaluated by the upward recurrence
//! `G_j = (exp(-x) - x G_{j-1}) / (j - 1/2)` starting from
//! `x G_0 = sqrt(pi x) erfc(sqrt x)`, which is free of singularities at `x = 0`.

use std::f64::consts::PI;

use statrs::function::erf::erfc;

/// The regulariser `q_m` with scale `c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerTail {
    m: u32,
    c: f64,
}

impl PowerTail {
    pub fn new(m: u32, c: f64) -> Self {
        debug_assert!(m >= 1 && c > 0.0);
        Self { m, c }
    }

    pub fn order(&self) -> u32 {
        self.m
    }

    pub fn scale(&self) -> f64 {
        self.c
    }

    /// `q_m(t)`.
    pub fn eval(&self, t: f64) -> f64 {
        let m = self.m as i32;
        let u = self.c * self.c * t * t;
        if u < 40.0 {
            // P(m, u) / u^m = exp(-u) * sum_k u^k / (m + k)!
            let mut term = 1.0 / factorial(self.m);
            let mut sum = term;
            let mut k = 1.0;
            loop {
                term *= u / (self.m as f64 + k);
                sum += term;
                if term < 1e-17 * sum {
                    break;
                }
                k += 1.0;
            }
            self.c.powi(2 * m) * (-u).exp() * sum
        } else {
            (1.0 - upper_gamma_reg(self.m, u)) / t.abs().powi(2 * m)
        }
    }

    /// `Q(m, c^2 t^2) / t^{2m}`: the amount by which `q_m` falls short of `t^{-2m}`.
    pub fn deficit(&self, t: f64) -> f64 {
        let u = self.c * self.c * t * t;
        upper_gamma_reg(self.m, u) / t.abs().powi(2 * self.m as i32)
    }

    /// Cosine transform `W_m(d) = int_R q_m(t) cos(t d) dt`.
    pub fn transform(&self, d: f64) -> f64 {
        let a = self.c * self.c;
        let x = d * d / (4.0 * a);
        let e = (-x).exp();
        let sx = x.sqrt();
        let mut g = (PI * x).sqrt() * erfc(sx); // x * G_0
        for j in 1..=self.m {
            let prev = if j == 1 { g } else { x * g };
            g = (e - prev) / (j as f64 - 0.5);
        }
        PI.sqrt() / factorial(self.m - 1) * self.c.powi(2 * self.m as i32 - 1) * g
    }

    /// Distance beyond which `W_m` is below `1e-25` of its peak.
    pub fn transform_cutoff(&self) -> f64 {
        // exp(-x) x^{m} < 1e-25 comfortably once x >= 64 + 2m.
        2.0 * self.c * (64.0 + 2.0 * self.m as f64).sqrt()
    }

    /// Bound on `int_T^inf Q(m, c^2 t^2) / t^{2m} dt`.
    pub fn deficit_tail_bound(&self, cutoff: f64) -> f64 {
        let c2 = self.c * self.c;
        let mut poly = 0.0;
        let mut fact = 1.0;
        for k in 0..self.m {
            if k > 0 {
                fact *= k as f64;
            }
            poly += c2.powi(k as i32) * cutoff.powi(2 * k as i32 - 2 * self.m as i32) / fact;
        }
        poly * gaussian_tail(c2, cutoff)
    }
}

/// `Q(m, u) = exp(-u) sum_{k<m} u^k / k!` for integer `m`.
fn upper_gamma_reg(m: u32, u: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..m {
        term *= u / k as f64;
        sum += term;
    }
    (-u).exp() * sum
}

fn factorial(k: u32) -> f64 {
    (1..=k).map(f64::from).product()
}

/// Bound on `int_T^inf exp(-b t^2) dt` for `T > 0`.
pub(crate) fn gaussian_tail(b: f64, cutoff: f64) -> f64 {
    (-b * cutoff * cutoff).exp() / (2.0 * b * cutoff)
}

#[cfg(test)]
mod tests {
    use super::*;
    use gauss_quad::GaussLegendre;

    fn q_direct(m: u32, c: f64, t: f64) -> f64 {
        // (1/Gamma(m)) int_0^{c^2} s^{m-1} exp(-s t^2) ds, split at the
        // e-folding scale of the integrand so Gauss-Legendre sees smooth pieces.
        let gl = GaussLegendre::new(40).unwrap();
        let f = |s: f64| s.powi(m as i32 - 1) * (-s * t * t).exp();
        let top = c * c;
        let mut edges = vec![0.0];
        let mut e = 1.0 / (t * t).max(1.0 / top);
        while e < top {
            edges.push(e);
            e *= 2.0;
        }
        edges.push(top);
        edges
            .windows(2)
            .map(|w| gl.integrate(w[0], w[1], f))
            .sum::<f64>()
            / factorial(m - 1)
    }

    #[test]
    fn eval_matches_integral_representation() {
        for m in 1..=3 {
            let p = PowerTail::new(m, 0.4);
            for &t in &[0.0, 1e-6, 0.3, 2.0, 9.0, 15.0, 16.0, 30.0, 100.0] {
                let want = q_direct(m, 0.4, t);
                let got = p.eval(t);
                assert!(
                    (got - want).abs() <= 1e-13 * want.abs().max(1e-300),
                    "m={m} t={t}: {got} vs {want}"
                );
            }
        }
    }

    #[test]
    fn deficit_closes_the_gap() {
        let p = PowerTail::new(2, 0.5);
        for &t in &[0.5, 3.0, 20.0] {
            let s = p.eval(t) + p.deficit(t);
            assert!((s * t.powi(4) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn transform_at_zero() {
        // W_m(0) = sqrt(pi) c^{2m-1} / (Gamma(m) (m - 1/2))
        for m in 1..=4 {
            let c = 0.7;
            let p = PowerTail::new(m, c);
            let want = PI.sqrt() * c.powi(2 * m as i32 - 1) / (factorial(m - 1) * (m as f64 - 0.5));
            assert!((p.transform(0.0) - want).abs() < 1e-14 * want);
        }
        let p = PowerTail::new(1, 0.3);
        assert!((p.transform(0.0) - 2.0 * 0.3 * PI.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn transform_matches_quadrature() {
        // Integrate q_m(t) cos(td) on [0, T] with Gauss-Legendre panels and add
        // the t^{-2m} tail beyond T by integration by parts.
        let gl = GaussLegendre::new(24).unwrap();
        for m in 1..=2u32 {
            let c = 0.45;
            let p = PowerTail::new(m, c);
            for &d in &[0.0f64, 0.05, 0.4, 1.0, 2.5] {
                let big_t = 4000.0;
                let panels = 40_000;
                let h = big_t / panels as f64;
                let mut s = 0.0;
                for k in 0..panels {
                    let a = k as f64 * h;
                    s += gl.integrate(a, a + h, |t| p.eval(t) * (t * d).cos());
                }
                let tail = if d == 0.0 {
                    big_t.powi(1 - 2 * m as i32) / (2.0 * m as f64 - 1.0)
                } else {
                    // two terms of the integration-by-parts expansion
                    let p = 2 * m as i32;
                    -(big_t * d).sin() / (d * big_t.powi(p))
                        + p as f64 * (big_t * d).cos() / (d * d * big_t.powi(p + 1))
                };
                let numeric = 2.0 * (s + tail);
                let closed = p.transform(d);
                assert!(
                    (numeric - closed).abs() < 2e-9,
                    "m={m} d={d}: {numeric} vs {closed}"
                );
            }
        }
    }

    #[test]
    fn transform_is_even_and_decays() {
        let p = PowerTail::new(1, 0.33);
        assert_eq!(p.transform(0.7), p.transform(-0.7));
        assert!(p.transform(p.transform_cutoff()).abs() < 1e-25 * p.transform(0.0));
    }
}
