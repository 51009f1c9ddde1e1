//! Seeded sample paths from the truncated causal representation
//! `X_t = Σ_{j=0}^{M} ψ_j^{s(t)} ε_{t-j}`, and the matching truncated
//! AR(∞) filter for residual recovery.
//!
//! The noise law is not fixed by the model beyond "zero-mean white noise with
//! finite variance"; Gaussian noise with variance `σ²_{s(t)}` is the only law
//! implemented. Truncating the MA filter at `M` removes
//! `Σ_{j>M} (ψ_j)² ~ M^{2d-1}` of each season's variance, which for d close
//! to 1/2 is not small (about 9% of the variance at d = 0.4, M = 5000); raise
//! `truncation` when that matters.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::defaults;
use crate::error::{Error, Result};
use crate::exec::{dot, Execution};
use crate::model::{ModelDocument, PtvArfimaModel, SeasonIndex};
use crate::special::psi_coeffs;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseDist {
    #[default]
    Gaussian,
}

/// Sizes of a simulated path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimulationConfig {
    /// Retained observations `X_1..X_n`.
    pub n: usize,
    /// MA truncation `M`: weights `ψ_0..ψ_M` are used.
    pub truncation: usize,
    /// Discarded leading outputs.
    pub burn_in: usize,
    #[serde(default)]
    pub noise: NoiseDist,
}

impl SimulationConfig {
    /// `n` observations with the default truncation and `burn_in = M`.
    pub fn new(n: usize) -> Self {
        Self {
            n,
            truncation: defaults::TRUNCATION,
            burn_in: defaults::TRUNCATION,
            noise: NoiseDist::Gaussian,
        }
    }

    pub fn with_truncation(mut self, truncation: usize) -> Self {
        self.truncation = truncation;
        self
    }

    pub fn with_burn_in(mut self, burn_in: usize) -> Self {
        self.burn_in = burn_in;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Domain("path length n must be at least 1".into()));
        }
        if self.truncation == 0 {
            return Err(Error::Domain("truncation M must be at least 1".into()));
        }
        Ok(())
    }

    /// Noise draws per path: `n + burn_in + M`.
    pub fn noise_len(&self) -> usize {
        self.n + self.burn_in + self.truncation
    }
}

/// One realisation `X_1..X_n` together with the noise that generated it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplePath {
    pub model: PtvArfimaModel,
    /// `values[k]` is `X_{k+1}`.
    pub values: Vec<f64>,
    /// `noise[q]` is `ε_t` for `t = q + 1 - (burn_in + truncation)`.
    pub noise: Vec<f64>,
    pub seed: u64,
    pub truncation: usize,
    pub burn_in: usize,
}

impl SamplePath {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `ε_t`, if it was drawn.
    pub fn noise_at(&self, t: i64) -> Option<f64> {
        let q = t - 1 + (self.burn_in + self.truncation) as i64;
        usize::try_from(q).ok().and_then(|q| self.noise.get(q).copied())
    }

    /// `ε_1..ε_n`, aligned with `values`.
    pub fn aligned_noise(&self) -> &[f64] {
        &self.noise[self.burn_in + self.truncation..]
    }

    /// `t,season,x` (plus `eps` when requested), one row per observation.
    pub fn to_csv(&self, with_noise: bool) -> String {
        let mut out = String::with_capacity(self.values.len() * 48);
        out.push_str(if with_noise { "t,season,x,eps\n" } else { "t,season,x\n" });
        let eps = self.aligned_noise();
        for (k, x) in self.values.iter().enumerate() {
            let t = k as i64 + 1;
            let season = self.model.season_of(t);
            if with_noise {
                out.push_str(&format!("{t},{season},{x:.16e},{:.16e}\n", eps[k]));
            } else {
                out.push_str(&format!("{t},{season},{x:.16e}\n"));
            }
        }
        out
    }
}

/// Per-season filters stored reversed so that each output is a forward dot
/// product over a contiguous window.
fn reversed_filters(model: &PtvArfimaModel, len: usize, kind_pi: bool) -> Result<Vec<Vec<f64>>> {
    model
        .seasons()
        .map(|s| {
            let mut c = if kind_pi { model.pi(s, len)? } else { model.psi(s, len)? }.values;
            c.reverse();
            Ok(c)
        })
        .collect()
}

fn draw_noise(model: &PtvArfimaModel, config: &SimulationConfig, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let offset = (config.burn_in + config.truncation) as i64;
    let scale: Vec<f64> = model.sigma2_values().iter().map(|v| v.sqrt()).collect();
    (0..config.noise_len())
        .map(|q| {
            let t = q as i64 + 1 - offset;
            let z: f64 = match config.noise {
                NoiseDist::Gaussian => StandardNormal.sample(&mut rng),
            };
            scale[model.season_of(t).get() - 1] * z
        })
        .collect()
}

/// Simulates `X_1..X_n`.
pub fn simulate_path(model: &PtvArfimaModel, config: &SimulationConfig, seed: u64) -> Result<SamplePath> {
    config.validate()?;
    let m = config.truncation;
    let filters = reversed_filters(model, m + 1, false)?;
    let noise = draw_noise(model, config, seed);
    let first = config.burn_in + m;
    let values = (0..config.n)
        .map(|k| {
            let q = first + k;
            let season = model.season_of(k as i64 + 1);
            dot(&filters[season.get() - 1], &noise[q - m..=q])
        })
        .collect();
    Ok(SamplePath {
        model: model.clone(),
        values,
        noise,
        seed,
        truncation: m,
        burn_in: config.burn_in,
    })
}

/// Recovered innovations `ε̂_t = Σ_{j=0}^{M} π_j^{s(t)} X_{t-j}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Residuals {
    /// Time of `values[0]`.
    pub first_time: i64,
    pub values: Vec<f64>,
}

/// Residuals over a simulated path, at every time with `M` past observations.
pub fn residuals(model: &PtvArfimaModel, path: &SamplePath, truncation: usize) -> Result<Residuals> {
    residuals_from_values(model, &path.values, 1, truncation)
}

/// Residuals of `values`, where `values[0]` is observed at `first_time`.
pub fn residuals_from_values(
    model: &PtvArfimaModel,
    values: &[f64],
    first_time: i64,
    truncation: usize,
) -> Result<Residuals> {
    if truncation == 0 {
        return Err(Error::Domain("truncation M must be at least 1".into()));
    }
    if values.len() <= truncation {
        return Err(Error::InsufficientHistory {
            needed: truncation,
            available: values.len().saturating_sub(1),
        });
    }
    let filters = reversed_filters(model, truncation + 1, true)?;
    let out = (truncation..values.len())
        .map(|k| {
            let season = model.season_of(first_time + k as i64);
            dot(&filters[season.get() - 1], &values[k - truncation..=k])
        })
        .collect();
    Ok(Residuals {
        first_time: first_time + truncation as i64,
        values: out,
    })
}

/// Covariance of the truncated MA process the simulator actually draws from:
/// `Σ_{j=0}^{M-h} ψ_j^{(d_i)} ψ_{j+h}^{(d_{i+h})} σ²_{s(t-j)}` with `t` in season `i`.
pub fn truncated_acvf(model: &PtvArfimaModel, i: SeasonIndex, h: u64, truncation: usize) -> Result<f64> {
    let h = h as usize;
    if h > truncation {
        return Ok(0.0);
    }
    let first = psi_coeffs(model.d(i), truncation + 1)?.values;
    let later = model.shift(i, h as i64);
    let second = psi_coeffs(model.d(later), truncation + 1)?.values;
    let p = model.period();
    let sigma2 = model.sigma2_values();
    Ok((0..=truncation - h)
        .map(|j| first[j] * second[j + h] * sigma2[(i.get() - 1 + p - j % p) % p])
        .sum())
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of replicate `r`, a pure function of `(master_seed, r)`.
pub fn replicate_seed(master_seed: u64, r: usize) -> u64 {
    splitmix64(master_seed ^ splitmix64(r as u64))
}

/// Independent replicate paths.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    pub master_seed: u64,
    pub config: SimulationConfig,
    pub replicates: Vec<SamplePath>,
}

impl Ensemble {
    pub fn len(&self) -> usize {
        self.replicates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.replicates.is_empty()
    }

    pub fn manifest(&self) -> EnsembleManifest {
        let model = self
            .replicates
            .first()
            .map(|p| p.model.document())
            .expect("ensembles are never empty");
        EnsembleManifest {
            master_seed: self.master_seed,
            seeds: self.replicates.iter().map(|p| p.seed).collect(),
            model,
            n: self.config.n,
            truncation: self.config.truncation,
            burn_in: self.config.burn_in,
            noise: self.config.noise,
            replicates: self.replicates.len(),
        }
    }

    pub fn paths(&self) -> impl Iterator<Item = &[f64]> {
        self.replicates.iter().map(|p| p.values.as_slice())
    }
}

/// Everything needed to replay an ensemble.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleManifest {
    pub master_seed: u64,
    pub seeds: Vec<u64>,
    pub model: ModelDocument,
    pub n: usize,
    pub truncation: usize,
    pub burn_in: usize,
    pub noise: NoiseDist,
    pub replicates: usize,
}

impl EnsembleManifest {
    pub fn config(&self) -> SimulationConfig {
        SimulationConfig {
            n: self.n,
            truncation: self.truncation,
            burn_in: self.burn_in,
            noise: self.noise,
        }
    }
}

pub fn simulate_ensemble(
    model: &PtvArfimaModel,
    config: &SimulationConfig,
    replicates: usize,
    master_seed: u64,
    exec: Execution,
) -> Result<Ensemble> {
    if replicates == 0 {
        return Err(Error::Domain("an ensemble needs at least one replicate".into()));
    }
    config.validate()?;
    let paths = exec.try_map(replicates, |r| {
        simulate_path(model, config, replicate_seed(master_seed, r))
    })?;
    Ok(Ensemble {
        master_seed,
        config: *config,
        replicates: paths,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::acvf::acvf_exact;

    fn fig1() -> PtvArfimaModel {
        PtvArfimaModel::new(2, vec![0.3, 0.4], vec![1.0, 1.0]).unwrap()
    }

    #[test]
    fn white_noise_model_reproduces_its_noise() {
        let m = PtvArfimaModel::new(2, vec![0.0, 0.0], vec![1.0, 4.0]).unwrap();
        let cfg = SimulationConfig::new(200).with_truncation(10).with_burn_in(5);
        let path = simulate_path(&m, &cfg, 7).unwrap();
        assert_eq!(path.values, path.aligned_noise());
        assert_eq!(path.noise.len(), 200 + 5 + 10);
        let r = residuals(&m, &path, 10).unwrap();
        assert_eq!(r.values, path.values[10..]);
        assert_eq!(r.first_time, 11);
    }

    #[test]
    fn white_noise_variances_per_season() {
        let m = PtvArfimaModel::new(2, vec![0.0, 0.0], vec![1.0, 4.0]).unwrap();
        let cfg = SimulationConfig::new(40_000).with_truncation(1).with_burn_in(0);
        let path = simulate_path(&m, &cfg, 3).unwrap();
        for (season, target) in [(0usize, 1.0), (1, 4.0)] {
            let xs: Vec<f64> = path.values.iter().skip(season).step_by(2).copied().collect();
            let var = xs.iter().map(|x| x * x).sum::<f64>() / xs.len() as f64;
            // Var of the sample variance of 20000 normals: 2σ⁴/n.
            let se = target * (2.0 / xs.len() as f64).sqrt();
            assert!((var - target).abs() < 4.0 * se, "season {season}: {var}");
        }
    }

    #[test]
    fn same_seed_same_path() {
        let cfg = SimulationConfig::new(300).with_truncation(200);
        let a = simulate_path(&fig1(), &cfg, 42).unwrap();
        let b = simulate_path(&fig1(), &cfg, 42).unwrap();
        assert_eq!(a, b);
        let c = simulate_path(&fig1(), &cfg, 43).unwrap();
        assert_ne!(a.values, c.values);
    }

    #[test]
    fn path_is_the_truncated_filter_of_its_noise() {
        let m = fig1();
        let cfg = SimulationConfig::new(20).with_truncation(30).with_burn_in(3);
        let path = simulate_path(&m, &cfg, 1).unwrap();
        for t in [1i64, 2, 7, 20] {
            let s = m.season_of(t);
            let psi = m.psi(s, 31).unwrap().values;
            let x: f64 = (0..=30).map(|j| psi[j] * path.noise_at(t - j as i64).unwrap()).sum();
            assert!((x - path.values[t as usize - 1]).abs() < 1e-12);
        }
        assert_eq!(path.noise_at(-32), path.noise.first().copied());
        assert_eq!(path.noise_at(-33), None);
    }

    #[test]
    fn invalid_sizes() {
        assert!(simulate_path(&fig1(), &SimulationConfig::new(0), 1).is_err());
        assert!(simulate_path(&fig1(), &SimulationConfig::new(5).with_truncation(0), 1).is_err());
        let cfg = SimulationConfig::new(10).with_truncation(5);
        assert!(simulate_ensemble(&fig1(), &cfg, 0, 1, Execution::Sequential).is_err());
        let path = simulate_path(&fig1(), &cfg, 1).unwrap();
        assert!(matches!(residuals(&fig1(), &path, 10), Err(Error::InsufficientHistory { .. })));
    }

    #[test]
    fn zero_path_has_zero_residuals() {
        let r = residuals_from_values(&fig1(), &[0.0; 64], 1, 16).unwrap();
        assert!(r.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn equal_memory_round_trip_recovers_noise() {
        // With a common d the AR filter is the exact inverse of the MA filter,
        // up to truncation of both.
        let m = PtvArfimaModel::new(2, vec![0.3, 0.3], vec![1.0, 1.0]).unwrap();
        let cfg = SimulationConfig::new(6000).with_truncation(2000).with_burn_in(0);
        let path = simulate_path(&m, &cfg, 11).unwrap();
        let r = residuals(&m, &path, 2000).unwrap();
        let eps = &path.aligned_noise()[2000..];
        let corr = crate::estimate::correlation(&r.values, eps);
        assert!(corr > 0.999, "corr {corr}");
    }

    #[test]
    fn ensemble_is_reproducible_and_order_free() {
        let cfg = SimulationConfig::new(64).with_truncation(50).with_burn_in(10);
        let a = simulate_ensemble(&fig1(), &cfg, 8, 99, Execution::Parallel).unwrap();
        let b = simulate_ensemble(&fig1(), &cfg, 8, 99, Execution::Sequential).unwrap();
        assert_eq!(a, b);
        let one = simulate_ensemble(&fig1(), &cfg, 1, 99, Execution::Sequential).unwrap();
        assert_eq!(one.replicates[0], simulate_path(&fig1(), &cfg, replicate_seed(99, 0)).unwrap());
        let seeds: std::collections::HashSet<u64> = a.replicates.iter().map(|p| p.seed).collect();
        assert_eq!(seeds.len(), 8);
        let manifest = a.manifest();
        assert_eq!(manifest.seeds.len(), 8);
        assert_eq!(manifest.config(), cfg);
        let json = serde_json::to_string(&manifest).unwrap();
        let back: EnsembleManifest = serde_json::from_str(&json).unwrap();
        assert_eq!(back, manifest);
    }

    #[test]
    fn truncated_acvf_approaches_closed_form() {
        let m = fig1();
        let s1 = m.season(1).unwrap();
        let exact = acvf_exact(&m, s1, 0).unwrap();
        let short = truncated_acvf(&m, s1, 0, 100).unwrap();
        let long = truncated_acvf(&m, s1, 0, 100_000).unwrap();
        assert!(short < long && long < exact);
        assert_eq!(truncated_acvf(&m, s1, 200, 100).unwrap(), 0.0);
    }

    #[test]
    fn csv_columns() {
        let cfg = SimulationConfig::new(3).with_truncation(4).with_burn_in(0);
        let path = simulate_path(&fig1(), &cfg, 5).unwrap();
        let csv = path.to_csv(true);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "t,season,x,eps");
        assert!(lines[2].starts_with("2,2,"));
        assert_eq!(path.to_csv(false).lines().next(), Some("t,season,x"));
    }
}
