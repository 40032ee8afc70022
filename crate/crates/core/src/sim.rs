//! Seeded, parallel Monte Carlo comparison of penalty selectors.
//!
//! Replicate `i` draws from `ChaCha20Rng::seed_from_u64(seed)` switched to
//! stream `i`, so every replicate owns an independent stream and the output
//! does not depend on scheduling or thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;

use crate::error::{Result, SpedError};
use crate::estimator::Sample;
use crate::noise::{calibrate_noise_sd, ErrorModel};
use crate::risk::{SampleSpectrum, TargetSpectrum};
use crate::selection::{
    cv_on, search_frequency_grid, select_oracle, small_n_on, Method, SelectionConfig,
};
use crate::targets::{marron_wand, NormalMixture};

#[derive(Debug, Clone, PartialEq)]
pub struct SimSetting {
    /// Benchmark density, 1 to 8.
    pub density_index: usize,
    pub n: usize,
    /// Noise share of the observed variance, `Var(E) / Var(Y)`.
    pub p: f64,
    pub n_sim: usize,
    pub seed: u64,
    pub methods: Vec<Method>,
    pub config: SelectionConfig,
}

impl SimSetting {
    pub fn validate(&self) -> Result<()> {
        if !(1..=8).contains(&self.density_index) {
            return Err(SpedError::domain(format!(
                "density index must be in 1..=8, got {}",
                self.density_index
            )));
        }
        if self.n < 4 {
            return Err(SpedError::domain(format!("n must be >= 4, got {}", self.n)));
        }
        if !(self.p > 0.0 && self.p < 1.0) {
            return Err(SpedError::domain(format!(
                "p must lie in (0, 1), got {}",
                self.p
            )));
        }
        if self.n_sim < 1 {
            return Err(SpedError::domain("n_sim must be >= 1"));
        }
        if self.methods.is_empty() {
            return Err(SpedError::domain("at least one method is required"));
        }
        self.config.validate()
    }

    pub fn target(&self) -> Result<NormalMixture> {
        marron_wand(self.density_index)
    }

    /// Gaussian error with variance share `p` of the observations.
    pub fn error(&self) -> Result<ErrorModel> {
        let target = self.target()?;
        ErrorModel::gaussian(calibrate_noise_sd(target.variance(), self.p)?)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimRecord {
    pub replicate: u64,
    pub method: Method,
    pub alpha_hat: f64,
    /// Realised loss at `alpha_hat`.
    pub ise: f64,
    /// Realised loss at the oracle penalty on the same sample.
    pub ise_oracle: f64,
    pub loss_ratio: f64,
}

/// Sample-independent state shared by all replicates of one setting.
#[derive(Debug, Clone)]
pub struct SimPlan {
    setting: SimSetting,
    target: NormalMixture,
    error: ErrorModel,
    alpha_star: f64,
    n1: usize,
    alpha_lo: f64,
    alpha_hi: f64,
}

impl SimPlan {
    pub fn new(setting: &SimSetting) -> Result<Self> {
        setting.validate()?;
        let target = setting.target()?;
        let error = setting.error()?;
        let cfg = &setting.config;
        let alpha_star = select_oracle(&target, &error, setting.n, cfg)?.alpha_hat;
        let n1 = cfg.n1_rule.apply(setting.n);
        let (lo_n, hi_n) = cfg.alpha_range(setting.n)?;
        let (lo_1, hi_1) = cfg.alpha_range(n1)?;
        Ok(Self {
            setting: setting.clone(),
            target,
            error,
            alpha_star,
            n1,
            alpha_lo: lo_n.min(lo_1),
            alpha_hi: hi_n.max(hi_1),
        })
    }

    /// Minimiser of the true risk at the full sample size.
    pub fn alpha_star(&self) -> f64 {
        self.alpha_star
    }

    pub fn error(&self) -> &ErrorModel {
        &self.error
    }

    /// Smaller sample size used by the small-n rule.
    pub fn n1(&self) -> usize {
        self.n1
    }

    /// Penalty range covered by every replicate's frequency grid.
    pub fn alpha_range(&self) -> (f64, f64) {
        (self.alpha_lo, self.alpha_hi)
    }

    pub fn target(&self) -> &NormalMixture {
        &self.target
    }

    /// Observations `Y = X + E` of replicate `index`.
    pub fn draw(&self, index: u64) -> Result<Sample> {
        let mut rng = replicate_rng(self.setting.seed, index);
        let n = self.setting.n;
        let x = self.target.sample(&mut rng, n);
        let e = self.error.sample(&mut rng, n);
        Sample::new(x.iter().zip(&e).map(|(a, b)| a + b).collect())
    }

    pub fn replicate(&self, index: u64) -> Result<Vec<SimRecord>> {
        self.replicate_inner(index)
            .map_err(|e| SpedError::Replicate {
                replicate: index,
                source: Box::new(e),
            })
    }

    fn replicate_inner(&self, index: u64) -> Result<Vec<SimRecord>> {
        let sample = self.draw(index)?;
        let cfg = &self.setting.config;
        let scale = sample.max_abs().max(self.target.support_half_width());
        let grid = search_frequency_grid(self.alpha_lo, self.alpha_hi, &self.error, cfg, scale)?;
        let spectrum = SampleSpectrum::new(&sample, &grid, &self.error, cfg.m)?;
        let target_cf = TargetSpectrum::new(&self.target, &grid);
        let ise_oracle = spectrum.loss_ise(self.alpha_star, &target_cf)?;

        let mut methods = self.setting.methods.clone();
        methods.sort();
        methods.dedup();
        methods
            .into_iter()
            .map(|method| {
                let alpha_hat = match method {
                    Method::SmallN => small_n_on(&spectrum, cfg, self.n1)?.alpha_hat,
                    Method::CrossValidation => cv_on(&spectrum, cfg)?.alpha_hat,
                    Method::Oracle => self.alpha_star,
                };
                let ise = if method == Method::Oracle {
                    ise_oracle
                } else {
                    spectrum.loss_ise(alpha_hat, &target_cf)?
                };
                Ok(SimRecord {
                    replicate: index,
                    method,
                    alpha_hat,
                    ise,
                    ise_oracle,
                    loss_ratio: ise / ise_oracle,
                })
            })
            .collect()
    }
}

/// Generator for replicate `index`: the seed's ChaCha20 stream number `index`.
pub fn replicate_rng(seed: u64, index: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Records of one replicate, one per requested method.
pub fn run_replicate(setting: &SimSetting, replicate_index: u64) -> Result<Vec<SimRecord>> {
    SimPlan::new(setting)?.replicate(replicate_index)
}

/// All replicates on the global thread pool.
pub fn run_simulation(setting: &SimSetting) -> Result<Vec<SimRecord>> {
    run_simulation_with_threads(setting, None)
}

/// All replicates using at most `threads` worker threads (`None` for the
/// default). Output is identical for every thread count.
pub fn run_simulation_with_threads(
    setting: &SimSetting,
    threads: Option<usize>,
) -> Result<Vec<SimRecord>> {
    let plan = SimPlan::new(setting)?;
    let run = || -> Result<Vec<SimRecord>> {
        let per_replicate: Vec<Result<Vec<SimRecord>>> = (0..setting.n_sim as u64)
            .into_par_iter()
            .map(|i| plan.replicate(i))
            .collect();
        let mut records = Vec::with_capacity(setting.n_sim * setting.methods.len());
        for r in per_replicate {
            records.extend(r?);
        }
        records.sort_by_key(|r| (r.replicate, r.method));
        Ok(records)
    };
    match threads {
        None => run(),
        Some(t) => {
            if t == 0 {
                return Err(SpedError::domain("thread count must be >= 1"));
            }
            rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| SpedError::precondition(format!("thread pool: {e}")))?
                .install(run)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setting(n_sim: usize) -> SimSetting {
        SimSetting {
            density_index: 1,
            n: 100,
            p: 0.1,
            n_sim,
            seed: 7,
            methods: vec![Method::Oracle, Method::SmallN, Method::CrossValidation],
            config: SelectionConfig {
                grid_size: 30,
                ..Default::default()
            },
        }
    }

    #[test]
    fn replicate_is_deterministic() {
        let s = setting(1);
        let a = run_replicate(&s, 3).unwrap();
        let b = run_replicate(&s, 3).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 3);
        assert_eq!(a[0].method, Method::SmallN);
        for r in &a {
            assert!(r.loss_ratio >= 0.0 && r.ise >= 0.0);
            assert_eq!(r.loss_ratio, r.ise / r.ise_oracle);
        }
        let oracle = a.iter().find(|r| r.method == Method::Oracle).unwrap();
        assert_eq!(oracle.loss_ratio, 1.0);
        let (lo, hi) = s.config.alpha_range(100).unwrap();
        let small = &a[0];
        assert!(small.alpha_hat.is_finite());
        assert!(small.alpha_hat >= lo * (1.0 - 1e-12) && small.alpha_hat <= hi * (1.0 + 1e-12));
    }

    #[test]
    fn single_run_equals_first_replicate() {
        let s = setting(1);
        assert_eq!(run_simulation(&s).unwrap(), run_replicate(&s, 0).unwrap());
    }

    #[test]
    fn thread_count_does_not_change_output() {
        let s = setting(6);
        let one = run_simulation_with_threads(&s, Some(1)).unwrap();
        let four = run_simulation_with_threads(&s, Some(4)).unwrap();
        assert_eq!(one, four);
        assert!(one
            .windows(2)
            .all(|w| (w[0].replicate, w[0].method) < (w[1].replicate, w[1].method)));
    }

    #[test]
    fn streams_differ_between_replicates() {
        let plan = SimPlan::new(&setting(2)).unwrap();
        assert_ne!(
            plan.draw(0).unwrap().values(),
            plan.draw(1).unwrap().values()
        );
    }

    #[test]
    fn invalid_settings_are_rejected() {
        let mut s = setting(1);
        s.density_index = 9;
        assert!(run_simulation(&s).is_err());
        let mut s = setting(1);
        s.p = 1.0;
        assert!(run_simulation(&s).is_err());
    }
}
