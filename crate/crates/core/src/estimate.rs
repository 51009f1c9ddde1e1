//! Periodic sample moments and a periodicity diagnostic.
//!
//! Series are indexed so that `data[k]` is observed at time
//! `first_time + k`; the plain entry points take `first_time = 1`, i.e.
//! `data[0]` belongs to season 1.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal, StudentsT};

use crate::defaults;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::model::season_of;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Centering {
    /// Subtract the sample mean of each season.
    #[default]
    PerSeasonMean,
    /// Use raw products; appropriate when the mean is known to be zero.
    Zero,
}

/// Sample means, ACVF and (optionally) ACF per season.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodicSampleStats {
    pub period: usize,
    pub max_lag: usize,
    pub centering: Centering,
    /// `means[i-1]`: sample mean of season `i` (zero under [`Centering::Zero`]).
    pub means: Vec<f64>,
    /// Observations per season.
    pub cycles: Vec<usize>,
    /// `gamma[i-1][h]`.
    pub gamma: Vec<Vec<f64>>,
    /// `n_pairs[i-1][h]`: pairs behind `gamma[i-1][h]`.
    pub n_pairs: Vec<Vec<usize>>,
    /// Filled by [`sample_periodic_acf`].
    pub rho: Option<Vec<Vec<f64>>>,
}

impl PeriodicSampleStats {
    pub fn gamma(&self, season: usize, lag: usize) -> f64 {
        self.gamma[season - 1][lag]
    }

    pub fn rho(&self, season: usize, lag: usize) -> Option<f64> {
        self.rho.as_ref().map(|r| r[season - 1][lag])
    }

    /// `season,lag,gamma_hat,rho_hat,n_pairs`; `rho_hat` is empty until the ACF is computed.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("season,lag,gamma_hat,rho_hat,n_pairs\n");
        for s in 0..self.period {
            for h in 0..=self.max_lag {
                let rho = self
                    .rho
                    .as_ref()
                    .map(|r| format!("{:.16e}", r[s][h]))
                    .unwrap_or_default();
                out.push_str(&format!(
                    "{},{},{:.16e},{},{}\n",
                    s + 1,
                    h,
                    self.gamma[s][h],
                    rho,
                    self.n_pairs[s][h]
                ));
            }
        }
        out
    }
}

pub fn sample_periodic_acvf(
    data: &[f64],
    period: usize,
    max_lag: usize,
    centering: Centering,
) -> Result<PeriodicSampleStats> {
    sample_periodic_acvf_from(data, 1, period, max_lag, centering, Execution::default())
}

/// `γ̂^i(h) = N_i(h)⁻¹ Σ (X_t − μ̂_i)(X_{t+h} − μ̂_{s(t+h)})` over `t` in season `i`
/// with both indices inside the data; the divisor is the pair count.
pub fn sample_periodic_acvf_from(
    data: &[f64],
    first_time: i64,
    period: usize,
    max_lag: usize,
    centering: Centering,
    exec: Execution,
) -> Result<PeriodicSampleStats> {
    if period == 0 {
        return Err(Error::Domain("period must be at least 1".into()));
    }
    let needed = period * (max_lag + 2);
    if data.len() < needed {
        return Err(Error::InsufficientData(format!(
            "{} observations; period {period} with max lag {max_lag} needs at least {needed}",
            data.len()
        )));
    }
    let phase = |k: usize| season_of(first_time + k as i64, period).get() - 1;

    let mut sums = vec![0.0; period];
    let mut cycles = vec![0usize; period];
    for (k, x) in data.iter().enumerate() {
        sums[phase(k)] += x;
        cycles[phase(k)] += 1;
    }
    let means: Vec<f64> = match centering {
        Centering::PerSeasonMean => sums.iter().zip(&cycles).map(|(s, &c)| s / c as f64).collect(),
        Centering::Zero => vec![0.0; period],
    };
    let centred: Vec<f64> = data.iter().enumerate().map(|(k, x)| x - means[phase(k)]).collect();

    // One work item per lag; accumulation within a lag runs in index order.
    let by_lag = exec.map(max_lag + 1, |h| {
        let mut acc = vec![0.0; period];
        let mut pairs = vec![0usize; period];
        for k in 0..data.len() - h {
            let s = phase(k);
            acc[s] += centred[k] * centred[k + h];
            pairs[s] += 1;
        }
        (acc, pairs)
    });

    let mut gamma = vec![vec![0.0; max_lag + 1]; period];
    let mut n_pairs = vec![vec![0usize; max_lag + 1]; period];
    for (h, (acc, pairs)) in by_lag.into_iter().enumerate() {
        for s in 0..period {
            gamma[s][h] = acc[s] / pairs[s] as f64;
            n_pairs[s][h] = pairs[s];
        }
    }
    Ok(PeriodicSampleStats {
        period,
        max_lag,
        centering,
        means,
        cycles,
        gamma,
        n_pairs,
        rho: None,
    })
}

/// Adds `ρ̂^i(h) = γ̂^i(h) / γ̂^i(0)`.
pub fn sample_periodic_acf(mut stats: PeriodicSampleStats) -> Result<PeriodicSampleStats> {
    let mut rho = Vec::with_capacity(stats.period);
    for (s, g) in stats.gamma.iter().enumerate() {
        let g0 = g[0];
        if !(g0 > 0.0) {
            return Err(Error::ZeroVariance { season: s + 1 });
        }
        let mut row: Vec<f64> = g.iter().map(|x| x / g0).collect();
        row[0] = 1.0;
        rho.push(row);
    }
    stats.rho = Some(rho);
    Ok(stats)
}

/// Pearson correlation of two equally long series.
pub fn correlation(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "correlation needs equal lengths");
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    sab / (saa * sbb).sqrt()
}

/// Mean and standard error of a sample.
fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Ensemble mean and standard error of `γ̂^i(h)` and `ρ̂^i(h)` across replicate paths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleMoments {
    pub period: usize,
    pub max_lag: usize,
    pub replicates: usize,
    pub gamma_mean: Vec<Vec<f64>>,
    pub gamma_se: Vec<Vec<f64>>,
    pub rho_mean: Vec<Vec<f64>>,
    pub rho_se: Vec<Vec<f64>>,
}

pub fn ensemble_moments<'a, I>(
    paths: I,
    period: usize,
    max_lag: usize,
    centering: Centering,
    exec: Execution,
) -> Result<EnsembleMoments>
where
    I: IntoIterator<Item = &'a [f64]>,
{
    let paths: Vec<&[f64]> = paths.into_iter().collect();
    if paths.len() < 2 {
        return Err(Error::InsufficientData("ensemble moments need at least two replicates".into()));
    }
    let stats = exec.try_map(paths.len(), |r| {
        let s = sample_periodic_acvf_from(paths[r], 1, period, max_lag, centering, Execution::Sequential)?;
        sample_periodic_acf(s)
    })?;
    let summarise = |pick: &dyn Fn(&PeriodicSampleStats, usize, usize) -> f64| {
        let mut mean = vec![vec![0.0; max_lag + 1]; period];
        let mut se = vec![vec![0.0; max_lag + 1]; period];
        for s in 0..period {
            for h in 0..=max_lag {
                let xs: Vec<f64> = stats.iter().map(|st| pick(st, s, h)).collect();
                (mean[s][h], se[s][h]) = mean_and_se(&xs);
            }
        }
        (mean, se)
    };
    let (gamma_mean, gamma_se) = summarise(&|st, s, h| st.gamma[s][h]);
    let (rho_mean, rho_se) = summarise(&|st, s, h| st.rho.as_ref().expect("acf computed")[s][h]);
    Ok(EnsembleMoments {
        period,
        max_lag,
        replicates: paths.len(),
        gamma_mean,
        gamma_se,
        rho_mean,
        rho_se,
    })
}

/// Settings of [`periodicity_check`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeriodicityConfig {
    /// Lags `0..=max_lag` are compared.
    pub max_lag: usize,
    /// Significance in standard-normal units: the family-wise level is
    /// `P(|N(0,1)| > threshold)`, shared across all compared moments.
    pub threshold: f64,
    /// Contiguous blocks for a single path.
    pub blocks: usize,
}

impl Default for PeriodicityConfig {
    fn default() -> Self {
        Self {
            max_lag: defaults::PERIODICITY_LAGS,
            threshold: defaults::Z_THRESHOLD,
            blocks: defaults::PERIODICITY_BLOCKS,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Replication {
    Blocks,
    Replicates,
}

/// One compared moment: the difference between phase `phase` and phase
/// `phase + p` of a statistic over period `2p`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodicityEntry {
    /// 1-based phase within the candidate period.
    pub phase: usize,
    /// `None` compares means; `Some(h)` compares lag-`h` product moments.
    pub lag: Option<usize>,
    pub difference: f64,
    pub std_error: f64,
    /// `difference / std_error`, Student-t with `units - 1` degrees of freedom.
    pub z: f64,
    /// Two-sided, unadjusted.
    pub p_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodicityReport {
    pub candidate: usize,
    pub threshold: f64,
    pub replication: Replication,
    /// Independent units behind each standard error.
    pub units: usize,
    /// Family-wise two-sided level implied by `threshold`.
    pub family_alpha: f64,
    /// `|z|` above which an entry is significant after a Bonferroni split of
    /// `family_alpha` over all entries.
    pub critical_z: f64,
    pub entries: Vec<PeriodicityEntry>,
    pub max_abs_z: f64,
    pub consistent: bool,
}

impl PeriodicityReport {
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "candidate period {}: {} (max |z| = {:.3}, critical {:.3} for family level {:.2e} = {} sigma, {} {})\n",
            self.candidate,
            if self.consistent { "consistent" } else { "inconsistent" },
            self.max_abs_z,
            self.critical_z,
            self.family_alpha,
            self.threshold,
            self.units,
            match self.replication {
                Replication::Blocks => "blocks",
                Replication::Replicates => "replicates",
            }
        );
        out.push_str("phase,lag,difference,std_error,z,p_value\n");
        for e in &self.entries {
            let lag = e.lag.map(|h| h.to_string()).unwrap_or_else(|| "mean".into());
            out.push_str(&format!(
                "{},{},{:.6e},{:.6e},{:.3},{:.3e}\n",
                e.phase, lag, e.difference, e.std_error, e.z, e.p_value
            ));
        }
        out
    }
}

/// Per-unit contrasts on period `q = 2p`: for each phase `r < p`, the
/// mean and the lag-`h` product moments (centred on the unit mean) of phase
/// `r` minus those of phase `r + p`. Layout `[r][0]` = mean, `[r][1+h]` = lag `h`.
fn contrasts(unit: &[f64], p: usize, max_lag: usize) -> Vec<Vec<f64>> {
    let q = 2 * p;
    let centre = unit.iter().sum::<f64>() / unit.len() as f64;
    let cycles = (unit.len() - max_lag) / q;
    let mut out = vec![vec![0.0; max_lag + 2]; p];
    for (r, row) in out.iter_mut().enumerate() {
        let moment = |phase: usize, lag: Option<usize>| {
            let mut acc = 0.0;
            for m in 0..cycles {
                let t = phase + q * m;
                acc += match lag {
                    None => unit[t],
                    Some(h) => (unit[t] - centre) * (unit[t + h] - centre),
                };
            }
            acc / cycles as f64
        };
        row[0] = moment(r, None) - moment(r + p, None);
        for h in 0..=max_lag {
            row[1 + h] = moment(r, Some(h)) - moment(r + p, Some(h));
        }
    }
    out
}

fn report(
    candidate: usize,
    config: &PeriodicityConfig,
    replication: Replication,
    per_unit: Vec<Vec<Vec<f64>>>,
) -> PeriodicityReport {
    let units = per_unit.len();
    let t = StudentsT::new(0.0, 1.0, (units - 1) as f64).expect("at least two units");
    let mut entries = Vec::new();
    for r in 0..candidate {
        for k in 0..config.max_lag + 2 {
            let xs: Vec<f64> = per_unit.iter().map(|u| u[r][k]).collect();
            let (difference, std_error) = mean_and_se(&xs);
            let z = if std_error > 0.0 {
                difference / std_error
            } else if difference == 0.0 {
                0.0
            } else {
                f64::INFINITY.copysign(difference)
            };
            entries.push(PeriodicityEntry {
                phase: r + 1,
                lag: k.checked_sub(1),
                difference,
                std_error,
                z,
                p_value: 2.0 * t.sf(z.abs()),
            });
        }
    }
    let normal = Normal::standard();
    let family_alpha = 2.0 * normal.sf(config.threshold);
    let critical_z = t.inverse_cdf(1.0 - family_alpha / (2.0 * entries.len() as f64));
    let max_abs_z = entries.iter().map(|e| e.z.abs()).fold(0.0, f64::max);
    PeriodicityReport {
        candidate,
        threshold: config.threshold,
        replication,
        units,
        family_alpha,
        critical_z,
        entries,
        max_abs_z,
        consistent: max_abs_z <= critical_z,
    }
}

fn check_candidate(candidate: usize, config: &PeriodicityConfig) -> Result<()> {
    if candidate == 0 {
        return Err(Error::Domain("candidate period must be at least 1".into()));
    }
    if !(config.threshold > 0.0) {
        return Err(Error::Domain("threshold must be positive".into()));
    }
    Ok(())
}

/// Tests whether `data` (starting in phase 1 of the candidate) is consistent
/// with period `candidate`: moments of phases `r` and `r + p` on period `2p`
/// should agree. Standard errors come from the spread across contiguous
/// blocks, each holding whole `2p` cycles. Every compared moment gets a
/// Student-t p-value and the family-wise level is split evenly across them,
/// so adding lags does not inflate the false-alarm rate.
pub fn periodicity_check(data: &[f64], candidate: usize, config: &PeriodicityConfig) -> Result<PeriodicityReport> {
    check_candidate(candidate, config)?;
    if config.blocks < 2 {
        return Err(Error::Domain("the block periodicity check needs at least two blocks".into()));
    }
    let q = 2 * candidate;
    let block = (data.len() / config.blocks) / q * q;
    let needed = 2 * q + config.max_lag;
    if block < needed {
        return Err(Error::InsufficientData(format!(
            "{} observations in {} blocks leaves {block} per block; candidate {candidate} with \
             max lag {} needs {needed}",
            data.len(),
            config.blocks,
            config.max_lag
        )));
    }
    let per_unit = (0..config.blocks)
        .map(|b| contrasts(&data[b * block..(b + 1) * block], candidate, config.max_lag))
        .collect();
    Ok(report(candidate, config, Replication::Blocks, per_unit))
}

/// As [`periodicity_check`], with replicate paths as the independent units.
pub fn periodicity_check_ensemble<'a, I>(
    paths: I,
    candidate: usize,
    config: &PeriodicityConfig,
    exec: Execution,
) -> Result<PeriodicityReport>
where
    I: IntoIterator<Item = &'a [f64]>,
{
    check_candidate(candidate, config)?;
    let paths: Vec<&[f64]> = paths.into_iter().collect();
    if paths.len() < 2 {
        return Err(Error::InsufficientData("the ensemble periodicity check needs at least two replicates".into()));
    }
    let q = 2 * candidate;
    let needed = 2 * q + config.max_lag;
    if let Some(short) = paths.iter().find(|p| p.len() < needed) {
        return Err(Error::InsufficientData(format!(
            "replicate of length {} is shorter than the {needed} observations needed",
            short.len()
        )));
    }
    let per_unit = exec.map(paths.len(), |r| contrasts(paths[r], candidate, config.max_lag));
    Ok(report(candidate, config, Replication::Replicates, per_unit))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn white(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
    }

    /// Period-2 white noise with standard deviations 1 and 2.
    fn two_scale(n: usize, seed: u64) -> Vec<f64> {
        white(n, seed)
            .into_iter()
            .enumerate()
            .map(|(k, x)| if k % 2 == 0 { x } else { 2.0 * x })
            .collect()
    }

    #[test]
    fn constant_series_has_zero_acvf() {
        let s = sample_periodic_acvf(&[3.5; 40], 2, 5, Centering::PerSeasonMean).unwrap();
        assert!(s.gamma.iter().flatten().all(|&g| g == 0.0));
        assert_eq!(s.means, vec![3.5, 3.5]);
        assert!(matches!(sample_periodic_acf(s), Err(Error::ZeroVariance { season: 1 })));
    }

    #[test]
    fn pair_counts_and_seasons() {
        let data: Vec<f64> = (1..=10).map(f64::from).collect();
        let s = sample_periodic_acvf(&data, 2, 3, Centering::Zero).unwrap();
        assert_eq!(s.cycles, vec![5, 5]);
        assert_eq!(s.n_pairs[0], vec![5, 5, 4, 4]);
        assert_eq!(s.n_pairs[1], vec![5, 4, 4, 3]);
        // season 1, lag 1: (1·2 + 3·4 + 5·6 + 7·8 + 9·10) / 5
        assert_eq!(s.gamma(1, 1), 190.0 / 5.0);
        // season 2, lag 3: (2·5 + 4·7 + 6·9) / 3
        assert_eq!(s.gamma(2, 3), 92.0 / 3.0);
    }

    #[test]
    fn first_time_sets_the_season() {
        let data: Vec<f64> = (1..=12).map(f64::from).collect();
        let a = sample_periodic_acvf_from(&data, 2, 2, 1, Centering::Zero, Execution::Sequential).unwrap();
        let b = sample_periodic_acvf(&data, 2, 1, Centering::Zero).unwrap();
        assert_eq!(a.gamma[0], b.gamma[1]);
        assert_eq!(a.gamma[1], b.gamma[0]);
    }

    #[test]
    fn insufficient_data_and_bad_period() {
        assert!(matches!(
            sample_periodic_acvf(&[1.0; 13], 2, 5, Centering::Zero),
            Err(Error::InsufficientData(_))
        ));
        assert!(sample_periodic_acvf(&[1.0; 14], 2, 5, Centering::Zero).is_ok());
        assert!(sample_periodic_acvf(&[1.0; 14], 0, 5, Centering::Zero).is_err());
    }

    #[test]
    fn white_noise_has_small_lagged_acvf() {
        let n = 20_000;
        let s = sample_periodic_acvf(&white(n, 1), 2, 5, Centering::PerSeasonMean).unwrap();
        let se = (2.0 / n as f64).sqrt();
        for season in 1..=2 {
            for h in 1..=5 {
                assert!(s.gamma(season, h).abs() < 3.0 * se, "{season} {h}");
            }
        }
    }

    #[test]
    fn period_one_is_the_ordinary_acvf() {
        let x = white(500, 2);
        let s = sample_periodic_acvf(&x, 1, 4, Centering::PerSeasonMean).unwrap();
        let mean = x.iter().sum::<f64>() / 500.0;
        for h in 0..=4 {
            let ordinary = (0..500 - h).map(|k| (x[k] - mean) * (x[k + h] - mean)).sum::<f64>()
                / (500 - h) as f64;
            assert!((s.gamma(1, h) - ordinary).abs() < 1e-14);
        }
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let x = white(3000, 3);
        let a = sample_periodic_acvf_from(&x, 1, 3, 10, Centering::PerSeasonMean, Execution::Sequential).unwrap();
        let b = sample_periodic_acvf_from(&x, 1, 3, 10, Centering::PerSeasonMean, Execution::Parallel).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn csv_layout() {
        let s = sample_periodic_acf(sample_periodic_acvf(&white(100, 4), 2, 2, Centering::Zero).unwrap()).unwrap();
        let csv = s.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "season,lag,gamma_hat,rho_hat,n_pairs");
        assert_eq!(lines.len(), 1 + 2 * 3);
        assert!(lines[1].starts_with("1,0,") && lines[1].contains(",1.0000000000000000e0,"));
        assert!(lines[4].starts_with("2,0,"));
    }

    #[test]
    fn correlation_basics() {
        let a = [1.0, 2.0, 3.0, 4.0];
        assert!((correlation(&a, &[2.0, 4.0, 6.0, 8.0]) - 1.0).abs() < 1e-15);
        assert!((correlation(&a, &[4.0, 3.0, 2.0, 1.0]) + 1.0).abs() < 1e-15);
    }

    #[test]
    fn iid_data_is_consistent_with_any_period() {
        let x = white(64_000, 5);
        for p in 1..=4 {
            let r = periodicity_check(&x, p, &PeriodicityConfig::default()).unwrap();
            assert!(r.consistent, "p={p}: {}", r.to_text());
        }
    }

    #[test]
    fn two_scale_noise_passes_two_and_fails_three() {
        let x = two_scale(64_000, 6);
        let cfg = PeriodicityConfig::default();
        assert!(periodicity_check(&x, 2, &cfg).unwrap().consistent);
        let r3 = periodicity_check(&x, 3, &cfg).unwrap();
        assert!(!r3.consistent);
        assert_eq!(r3.entries.len(), 3 * (cfg.max_lag + 2));
        let lag0 = r3.entries.iter().find(|e| e.phase == 1 && e.lag == Some(0)).unwrap();
        // phase 1 has variance 1, phase 4 has variance 4
        assert!((lag0.difference + 3.0).abs() < 0.3);
    }

    #[test]
    fn ensemble_check_uses_replicates() {
        let paths: Vec<Vec<f64>> = (0..200).map(|r| two_scale(240, 100 + r)).collect();
        let cfg = PeriodicityConfig::default();
        let ok = periodicity_check_ensemble(paths.iter().map(Vec::as_slice), 2, &cfg, Execution::Parallel).unwrap();
        assert!(ok.consistent);
        assert_eq!(ok.units, 200);
        assert_eq!(ok.replication, Replication::Replicates);
        let bad = periodicity_check_ensemble(paths.iter().map(Vec::as_slice), 3, &cfg, Execution::Sequential).unwrap();
        assert!(!bad.consistent);
    }

    #[test]
    fn periodicity_check_needs_data() {
        let cfg = PeriodicityConfig::default();
        assert!(matches!(periodicity_check(&[0.0; 100], 2, &cfg), Err(Error::InsufficientData(_))));
        assert!(periodicity_check(&[0.0; 10_000], 0, &cfg).is_err());
        let one = [vec![0.0; 50]];
        assert!(periodicity_check_ensemble(one.iter().map(Vec::as_slice), 2, &cfg, Execution::Sequential).is_err());
    }

    #[test]
    fn ensemble_moments_shapes() {
        let paths: Vec<Vec<f64>> = (0..50).map(|r| white(200, r)).collect();
        let m = ensemble_moments(paths.iter().map(Vec::as_slice), 2, 3, Centering::Zero, Execution::Parallel).unwrap();
        assert_eq!(m.replicates, 50);
        assert!(m.rho_mean.iter().all(|row| row[0] == 1.0));
        assert!((m.gamma_mean[0][0] - 1.0).abs() < 4.0 * m.gamma_se[0][0]);
    }

    proptest! {
        #[test]
        fn acf_is_scale_invariant(seed in 0u64..1000, c in 0.01f64..100.0) {
            let x = white(200, seed);
            let y: Vec<f64> = x.iter().map(|v| c * v).collect();
            let a = sample_periodic_acf(sample_periodic_acvf(&x, 3, 4, Centering::PerSeasonMean).unwrap()).unwrap();
            let b = sample_periodic_acf(sample_periodic_acvf(&y, 3, 4, Centering::PerSeasonMean).unwrap()).unwrap();
            for (ra, rb) in a.rho.unwrap().iter().flatten().zip(b.rho.unwrap().iter().flatten()) {
                prop_assert!((ra - rb).abs() < 1e-12);
            }
        }

        #[test]
        fn lag_zero_is_nonnegative_and_acf_starts_at_one(seed in 0u64..1000, p in 1usize..5) {
            let s = sample_periodic_acvf(&white(120, seed), p, 3, Centering::PerSeasonMean).unwrap();
            prop_assert!(s.gamma.iter().all(|g| g[0] >= 0.0));
            let s = sample_periodic_acf(s).unwrap();
            prop_assert!(s.rho.unwrap().iter().all(|r| r[0] == 1.0));
        }

        #[test]
        fn rotating_by_a_period_keeps_interior_pairs(seed in 0u64..500, p in 1usize..4) {
            // Dropping the first p observations only removes boundary pairs,
            // so the zero-centred sums change by exactly those pairs.
            let x = white(100, seed);
            let a = sample_periodic_acvf(&x, p, 3, Centering::Zero).unwrap();
            let b = sample_periodic_acvf(&x[p..], p, 3, Centering::Zero).unwrap();
            for s in 0..p {
                for h in 0..=3 {
                    let dropped: f64 = (s..p).step_by(p).map(|k| x[k] * x[k + h]).sum();
                    let lhs = a.gamma[s][h] * a.n_pairs[s][h] as f64;
                    let rhs = b.gamma[s][h] * b.n_pairs[s][h] as f64 + dropped;
                    prop_assert!((lhs - rhs).abs() < 1e-10);
                }
            }
        }
    }
}
