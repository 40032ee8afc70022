//! Normal-mixture target densities, including the Marron–Wand benchmark set.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use statrs::function::erf::erfc;

use crate::error::{Result, SpedError};

/// One component of a normal mixture.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Component {
    pub weight: f64,
    pub mean: f64,
    pub sd: f64,
}

/// A finite normal mixture `sum_j w_j N(mu_j, sd_j^2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalMixture {
    components: Vec<Component>,
}

impl NormalMixture {
    pub fn new(components: Vec<Component>) -> Result<Self> {
        if components.is_empty() {
            return Err(SpedError::domain("mixture needs at least one component"));
        }
        for c in &components {
            if !(c.weight > 0.0 && c.weight <= 1.0) {
                return Err(SpedError::domain(format!(
                    "component weight {} outside (0, 1]",
                    c.weight
                )));
            }
            if !(c.sd.is_finite() && c.sd > 0.0) || !c.mean.is_finite() {
                return Err(SpedError::domain(format!(
                    "invalid component N({}, {}^2)",
                    c.mean, c.sd
                )));
            }
        }
        let total: f64 = components.iter().map(|c| c.weight).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(SpedError::domain(format!(
                "mixture weights sum to {total}, expected 1"
            )));
        }
        Ok(Self { components })
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn pdf(&self, x: f64) -> f64 {
        self.components
            .iter()
            .map(|c| c.weight * normal_pdf(x - c.mean, c.sd))
            .sum()
    }

    pub fn cdf(&self, x: f64) -> f64 {
        self.components
            .iter()
            .map(|c| c.weight * 0.5 * erfc(-(x - c.mean) / (c.sd * std::f64::consts::SQRT_2)))
            .sum()
    }

    /// Fourier transform `E[exp(-itX)]`.
    pub fn char_fn(&self, t: f64) -> Complex64 {
        self.components
            .iter()
            .map(|c| {
                let amp = c.weight * (-0.5 * c.sd * c.sd * t * t).exp();
                Complex64::from_polar(amp, -t * c.mean)
            })
            .sum()
    }

    pub fn mean(&self) -> f64 {
        self.components.iter().map(|c| c.weight * c.mean).sum()
    }

    pub fn variance(&self) -> f64 {
        let second: f64 = self
            .components
            .iter()
            .map(|c| c.weight * (c.sd * c.sd + c.mean * c.mean))
            .sum();
        let mean = self.mean();
        second - mean * mean
    }

    /// Exact squared L2 norm `int f(x)^2 dx`.
    pub fn l2_norm_sq(&self) -> f64 {
        let mut acc = 0.0;
        for a in &self.components {
            for b in &self.components {
                let s = (a.sd * a.sd + b.sd * b.sd).sqrt();
                acc += a.weight * b.weight * normal_pdf(a.mean - b.mean, s);
            }
        }
        acc
    }

    /// Largest `|mu_j| + 8 sd_j`, a half-width containing essentially all mass.
    pub fn support_half_width(&self) -> f64 {
        self.components
            .iter()
            .map(|c| c.mean.abs() + 8.0 * c.sd)
            .fold(0.0, f64::max)
    }

    /// `n` i.i.d. draws: a component is picked by weight, then its normal is sampled.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, n: usize) -> Vec<f64> {
        (0..n)
            .map(|_| {
                let u: f64 = rng.random();
                let c = self.pick(u);
                c.mean + c.sd * rng.sample::<f64, _>(StandardNormal)
            })
            .collect()
    }

    fn pick(&self, u: f64) -> &Component {
        let mut acc = 0.0;
        for c in &self.components {
            acc += c.weight;
            if u < acc {
                return c;
            }
        }
        self.components.last().expect("non-empty mixture")
    }
}

fn normal_pdf(z: f64, sd: f64) -> f64 {
    let u = z / sd;
    (-0.5 * u * u).exp() / (sd * (2.0 * PI).sqrt())
}

/// Names of the first eight Marron–Wand densities, indexed from 1.
pub const MARRON_WAND_NAMES: [&str; 8] = [
    "Gaussian",
    "Skewed unimodal",
    "Strongly skewed",
    "Kurtotic unimodal",
    "Outlier",
    "Bimodal",
    "Separated bimodal",
    "Skewed bimodal",
];

fn comp(weight: f64, mean: f64, sd: f64) -> Component {
    Component { weight, mean, sd }
}

/// Marron–Wand benchmark density `index` (1..=8).
///
/// Parameters transcribed from Marron, J. S. and Wand, M. P. (1992), "Exact
/// mean integrated squared error", Annals of Statistics 20(2), Table 1.
pub fn marron_wand(index: usize) -> Result<NormalMixture> {
    let components = match index {
        1 => vec![comp(1.0, 0.0, 1.0)],
        2 => vec![
            comp(0.2, 0.0, 1.0),
            comp(0.2, 0.5, 2.0 / 3.0),
            comp(0.6, 13.0 / 12.0, 5.0 / 9.0),
        ],
        3 => (0..8)
            .map(|l| {
                let r = (2.0f64 / 3.0).powi(l);
                comp(0.125, 3.0 * (r - 1.0), r)
            })
            .collect(),
        4 => vec![comp(2.0 / 3.0, 0.0, 1.0), comp(1.0 / 3.0, 0.0, 0.1)],
        5 => vec![comp(0.1, 0.0, 1.0), comp(0.9, 0.0, 0.1)],
        6 => vec![comp(0.5, -1.0, 2.0 / 3.0), comp(0.5, 1.0, 2.0 / 3.0)],
        7 => vec![comp(0.5, -1.5, 0.5), comp(0.5, 1.5, 0.5)],
        8 => vec![comp(0.75, 0.0, 1.0), comp(0.25, 1.5, 1.0 / 3.0)],
        _ => {
            return Err(SpedError::domain(format!(
                "Marron-Wand density index must be in 1..=8, got {index}"
            )))
        }
    };
    NormalMixture::new(components)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn trapezoid(f: impl Fn(f64) -> f64, a: f64, b: f64, k: usize) -> f64 {
        let h = (b - a) / k as f64;
        let mut s = 0.5 * (f(a) + f(b));
        for i in 1..k {
            s += f(a + i as f64 * h);
        }
        s * h
    }

    #[test]
    fn registry_basics() {
        let d1 = marron_wand(1).unwrap();
        assert_eq!(d1.components(), &[comp(1.0, 0.0, 1.0)]);
        assert!(marron_wand(0).is_err());
        assert!(marron_wand(9).is_err());
        for i in 1..=8 {
            let d = marron_wand(i).unwrap();
            let w: f64 = d.components().iter().map(|c| c.weight).sum();
            assert!((w - 1.0).abs() < 1e-12);
            assert!(d.variance() > 0.0);
        }
    }

    #[test]
    fn pdf_and_char_fn_values() {
        let d1 = marron_wand(1).unwrap();
        assert!((d1.pdf(0.0) - 0.398942).abs() < 1e-6);
        assert_eq!(d1.char_fn(0.0), Complex64::new(1.0, 0.0));
        assert!((d1.char_fn(1.0).re - (-0.5f64).exp()).abs() < 1e-15);
        assert!((d1.variance() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn two_point_mixture_variance() {
        let s = 0.4;
        let m = NormalMixture::new(vec![comp(0.5, -1.0, s), comp(0.5, 1.0, s)]).unwrap();
        assert!((m.variance() - (s * s + 1.0)).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_mixtures() {
        assert!(NormalMixture::new(vec![]).is_err());
        assert!(NormalMixture::new(vec![comp(0.5, 0.0, 1.0)]).is_err());
        assert!(NormalMixture::new(vec![comp(1.0, 0.0, 0.0)]).is_err());
    }

    #[test]
    fn pdf_integrates_to_one() {
        for i in 1..=8 {
            let d = marron_wand(i).unwrap();
            let total = trapezoid(|x| d.pdf(x), -12.0, 12.0, 200_000);
            assert!((total - 1.0).abs() < 1e-6, "density {i}: {total}");
        }
    }

    #[test]
    fn pdf_nonnegative_and_char_fn_bounded() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for i in 1..=8 {
            let d = marron_wand(i).unwrap();
            for _ in 0..500 {
                let x: f64 = rng.random_range(-10.0..10.0);
                assert!(d.pdf(x) >= 0.0);
                let t: f64 = rng.random_range(-50.0..50.0);
                let c = d.char_fn(t);
                assert!(c.norm() <= 1.0 + 1e-15);
                let cm = d.char_fn(-t);
                assert!((cm - c.conj()).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn plancherel_self_consistency() {
        // (1/2pi) int |f~|^2 dt against int f^2 dx, both by quadrature.
        for i in 1..=8 {
            let d = marron_wand(i).unwrap();
            let freq = trapezoid(|t| d.char_fn(t).norm_sqr(), -250.0, 250.0, 500_000) / (2.0 * PI);
            let space = trapezoid(|x| d.pdf(x).powi(2), -12.0, 12.0, 500_000);
            assert!(
                (freq - space).abs() < 1e-6,
                "density {i}: {freq} vs {space}"
            );
            assert!((space - d.l2_norm_sq()).abs() < 1e-9, "density {i}");
        }
    }

    #[test]
    fn variance_matches_quadrature() {
        for i in 1..=8 {
            let d = marron_wand(i).unwrap();
            let m = trapezoid(|x| x * d.pdf(x), -12.0, 12.0, 200_000);
            let v = trapezoid(|x| (x - m).powi(2) * d.pdf(x), -12.0, 12.0, 200_000);
            assert!((v - d.variance()).abs() < 1e-8, "density {i}");
        }
    }

    #[test]
    fn sampling_moments_and_determinism() {
        let d1 = marron_wand(1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        assert!(d1.sample(&mut rng, 0).is_empty());
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let xs = d1.sample(&mut rng, 100_000);
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        assert!((var - 1.0).abs() < 0.03);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        assert_eq!(d1.sample(&mut rng, 100_000), xs);
    }

    #[test]
    fn sample_ecdf_matches_cdf() {
        for i in 1..=8 {
            let d = marron_wand(i).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(20_240 + i as u64);
            let mut xs = d.sample(&mut rng, 100_000);
            xs.sort_by(f64::total_cmp);
            let n = xs.len() as f64;
            let ks = xs
                .iter()
                .enumerate()
                .map(|(j, &x)| {
                    let c = d.cdf(x);
                    (c - j as f64 / n).abs().max(((j + 1) as f64 / n - c).abs())
                })
                .fold(0.0, f64::max);
            assert!(ks < 0.01, "density {i}: KS = {ks}");
        }
    }
}
