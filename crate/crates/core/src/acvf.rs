//! Periodic autocovariance and autocorrelation functions.
//!
//! Lag convention: `γ^i(h) = Cov(X_t, X_{t+h})` with `t` in season `i`. The
//! second factor therefore carries the memory parameter `d_{i+h}` of the
//! season `h` steps later.
//!
//! Four evaluation routes are provided for `h ≥ 0`:
//!
//! | route | formula | use |
//! |---|---|---|
//! | [`acvf_exact`] | Gamma-ratio closed form | default |
//! | [`acvf_hypergeometric`] | `ψ_h · 2F1(d_i, d_{i+h} + h; 1 + h; 1)` | cross-check through Gauss summation |
//! | [`acvf_series`] | `σ_i² Σ_j ψ_j^{(d_i)} ψ_{j+h}^{(d_{i+h})}` truncated | brute-force oracle |
//! | [`acvf_asymptotic`] | `C_i h^{-α}` | large-lag law, `h ≥ 1` |
//!
//! [`acvf_period_two`] evaluates the odd/even branches of the `p = 2` form
//! directly and exists to cross-check the general expression.

use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{dot, Execution};
use crate::model::{PtvArfimaModel, SeasonIndex};
use crate::special::{gauss_2f1_at_one_with, psi_coeffs, GammaKernel, StandardGamma};

/// Evaluation route for a table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "method")]
pub enum Method {
    Exact,
    Series { n_terms: usize },
    Asymptotic,
    Hypergeometric,
}

impl Method {
    pub fn label(self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::Series { .. } => "series",
            Method::Asymptotic => "asymptotic",
            Method::Hypergeometric => "hypergeometric",
        }
    }
}

/// Which noise variance multiplies each term of the MA product sum.
///
/// The closed forms carry the single factor `σ_i²` of the observation's
/// season; that is the default. `PerNoiseTerm` weights term `j` by the
/// variance of the season of `ε_{t-j}` instead. It only affects the series
/// route and only differs when the variances are not all equal.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseConvention {
    #[default]
    ObservationSeason,
    PerNoiseTerm,
}

/// Large-lag law `γ^i(h) ~ C h^{-α}` on the residue class `h ≡ k (mod p)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayLaw {
    pub season: SeasonIndex,
    pub residue: usize,
    pub c: f64,
    pub alpha: f64,
}

impl DecayLaw {
    pub fn eval(&self, h: f64) -> f64 {
        self.c * h.powf(-self.alpha)
    }
}

/// `γ^i(h)` by the closed form.
pub fn acvf_exact(model: &PtvArfimaModel, i: SeasonIndex, h: u64) -> Result<f64> {
    acvf_exact_with(&StandardGamma, model, i, h)
}

pub fn acvf_exact_with<K: GammaKernel + ?Sized>(
    kernel: &K,
    model: &PtvArfimaModel,
    i: SeasonIndex,
    h: u64,
) -> Result<f64> {
    let a = model.d(i);
    let b = model.d_at_offset(i, h as i64);
    let sigma2 = model.sigma2(i);
    if b == 0.0 {
        // 1/Γ(0) = 0 kills every lag but h = 0, where b = a = 0.
        return Ok(if h == 0 { sigma2 } else { 0.0 });
    }
    let hf = h as f64;
    let log_front = kernel.signed_log_gamma(1.0 - a - b)?.log_abs
        - kernel.signed_log_gamma(b)?.log_abs
        - kernel.signed_log_gamma(1.0 - b)?.log_abs;
    Ok(sigma2 * log_front.exp() * kernel.gamma_ratio_offset(hf, b, 1.0 - a)?)
}

/// `γ^i(h)` for period two through the odd/even branches.
pub fn acvf_period_two(model: &PtvArfimaModel, i: SeasonIndex, h: u64) -> Result<f64> {
    acvf_period_two_with(&StandardGamma, model, i, h)
}

pub fn acvf_period_two_with<K: GammaKernel + ?Sized>(
    kernel: &K,
    model: &PtvArfimaModel,
    i: SeasonIndex,
    h: u64,
) -> Result<f64> {
    if model.period() != 2 {
        return Err(Error::Domain(format!(
            "period-two branches need p = 2, model has p = {}",
            model.period()
        )));
    }
    let d = model.d_values();
    let (own, other) = if i.get() == 1 { (d[0], d[1]) } else { (d[1], d[0]) };
    let sigma2 = model.sigma2(i);
    let hf = h as f64;
    let lg = |x: f64| kernel.signed_log_gamma(x).map(|g| g.log_abs);
    let partner = if h % 2 == 1 { other } else { own };
    if partner == 0.0 {
        return Ok(if h == 0 { sigma2 } else { 0.0 });
    }
    let log_value = if h % 2 == 1 {
        lg(1.0 - own - other)? + lg(other + hf)?
            - lg(other)?
            - lg(1.0 - other)?
            - lg(1.0 + hf - own)?
    } else {
        lg(1.0 - 2.0 * own)? + lg(own + hf)? - lg(own)? - lg(1.0 - own)? - lg(1.0 + hf - own)?
    };
    Ok(sigma2 * log_value.exp())
}

/// `γ^i(h)` through `2F1(d_i, d_{i+h} + h; 1 + h; 1)`.
pub fn acvf_hypergeometric(model: &PtvArfimaModel, i: SeasonIndex, h: u64) -> Result<f64> {
    acvf_hypergeometric_with(&StandardGamma, model, i, h)
}

pub fn acvf_hypergeometric_with<K: GammaKernel + ?Sized>(
    kernel: &K,
    model: &PtvArfimaModel,
    i: SeasonIndex,
    h: u64,
) -> Result<f64> {
    let a = model.d(i);
    let b = model.d_at_offset(i, h as i64);
    let hf = h as f64;
    // ψ_h for memory b.
    let psi_h = if b == 0.0 {
        if h == 0 {
            1.0
        } else {
            0.0
        }
    } else {
        kernel.gamma_ratio_offset(hf, b, 1.0)? * kernel.reciprocal_gamma(b)
    };
    let f = gauss_2f1_at_one_with(kernel, a, b + hf, 1.0 + hf)?;
    Ok(model.sigma2(i) * psi_h * f)
}

/// Truncated MA product sum with `n_terms + 1` terms (`j = 0..=n_terms`).
pub fn acvf_series(model: &PtvArfimaModel, i: SeasonIndex, h: u64, n_terms: usize) -> Result<f64> {
    acvf_series_with(model, i, h, n_terms, NoiseConvention::default())
}

pub fn acvf_series_with(
    model: &PtvArfimaModel,
    i: SeasonIndex,
    h: u64,
    n_terms: usize,
    convention: NoiseConvention,
) -> Result<f64> {
    SeriesOracle::new(model, n_terms, h)?.acvf(i, h, convention)
}

/// Cached ψ weights for repeated series evaluations at one truncation.
#[derive(Debug, Clone)]
pub struct SeriesOracle<'m> {
    model: &'m PtvArfimaModel,
    n_terms: usize,
    max_lag: u64,
    psi: Vec<Vec<f64>>,
}

impl<'m> SeriesOracle<'m> {
    /// Weights long enough for every lag up to `max_lag`.
    pub fn new(model: &'m PtvArfimaModel, n_terms: usize, max_lag: u64) -> Result<Self> {
        if n_terms == 0 {
            return Err(Error::Domain("n_terms must be at least 1".into()));
        }
        let len = n_terms + max_lag as usize + 1;
        let psi = model
            .seasons()
            .map(|s| psi_coeffs(model.d(s), len).map(|c| c.values))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            model,
            n_terms,
            max_lag,
            psi,
        })
    }

    pub fn n_terms(&self) -> usize {
        self.n_terms
    }

    pub fn acvf(&self, i: SeasonIndex, h: u64, convention: NoiseConvention) -> Result<f64> {
        if h > self.max_lag {
            return Err(Error::Domain(format!(
                "lag {h} beyond the oracle's cached range {}",
                self.max_lag
            )));
        }
        let model = self.model;
        let later = model.shift(i, h as i64);
        let first = &self.psi[i.get() - 1][..=self.n_terms];
        let h = h as usize;
        let second = &self.psi[later.get() - 1][h..=h + self.n_terms];
        match convention {
            NoiseConvention::ObservationSeason => Ok(model.sigma2(i) * dot(first, second)),
            NoiseConvention::PerNoiseTerm => {
                let p = model.period();
                let sigma2 = model.sigma2_values();
                // ε_{t-j} with t in season i sits in season i - j.
                let mut acc = vec![0.0; p];
                for (j, (x, y)) in first.iter().zip(second).enumerate() {
                    acc[(i.get() - 1 + p - j % p) % p] += x * y;
                }
                Ok(acc.iter().zip(sigma2).map(|(s, v)| s * v).sum())
            }
        }
    }
}

/// Rough size of the part of the MA product sum beyond `n_terms`:
/// `σ_i² N^{a+b-1} / ((1 - a - b) Γ(a) Γ(b))`, from ψ_j ~ j^{d-1}/Γ(d).
pub fn series_truncation_tail(
    model: &PtvArfimaModel,
    i: SeasonIndex,
    h: u64,
    n_terms: usize,
) -> f64 {
    let a = model.d(i);
    let b = model.d_at_offset(i, h as i64);
    let gamma = StandardGamma;
    let scale = gamma.reciprocal_gamma(a) * gamma.reciprocal_gamma(b);
    let n = n_terms as f64 + 0.5;
    model.sigma2(i) * scale * n.powf(a + b - 1.0) / (1.0 - a - b)
}

/// `ρ^i(h)` by its own closed form.
pub fn acf_exact(model: &PtvArfimaModel, i: SeasonIndex, h: u64) -> Result<f64> {
    acf_exact_with(&StandardGamma, model, i, h)
}

pub fn acf_exact_with<K: GammaKernel + ?Sized>(
    kernel: &K,
    model: &PtvArfimaModel,
    i: SeasonIndex,
    h: u64,
) -> Result<f64> {
    if h == 0 {
        return Ok(1.0);
    }
    let a = model.d(i);
    let b = model.d_at_offset(i, h as i64);
    if b == 0.0 {
        return Ok(0.0);
    }
    let hf = h as f64;
    let lg = |x: f64| kernel.signed_log_gamma(x).map(|g| g.log_abs);
    let log_front = 2.0 * lg(1.0 - a)? + lg(1.0 - a - b)? - lg(1.0 - 2.0 * a)? - lg(b)? - lg(1.0 - b)?;
    Ok(log_front.exp() * kernel.gamma_ratio_offset(hf, b, 1.0 - a)?)
}

/// `(C_i, α_i)` for the residue class `k`.
pub fn decay_law(model: &PtvArfimaModel, i: SeasonIndex, k: usize) -> Result<DecayLaw> {
    if k >= model.period() {
        return Err(Error::Domain(format!(
            "residue {k} outside 0..{}",
            model.period()
        )));
    }
    let a = model.d(i);
    let b = model.d_at_offset(i, k as i64);
    let gamma = StandardGamma;
    let c = if b == 0.0 {
        0.0
    } else {
        let log_c = gamma.signed_log_gamma(1.0 - a - b)?.log_abs
            - gamma.signed_log_gamma(b)?.log_abs
            - gamma.signed_log_gamma(1.0 - b)?.log_abs;
        model.sigma2(i) * log_c.exp()
    };
    Ok(DecayLaw {
        season: i,
        residue: k,
        c,
        alpha: 1.0 - a - b,
    })
}

/// `C_i h^{-α_i}` with the residue class of `h`; defined for `h ≥ 1`.
pub fn acvf_asymptotic(model: &PtvArfimaModel, i: SeasonIndex, h: u64) -> Result<f64> {
    if h == 0 {
        return Err(Error::Domain(
            "asymptotic autocovariance is defined for lags h >= 1".into(),
        ));
    }
    let law = decay_law(model, i, (h % model.period() as u64) as usize)?;
    Ok(law.eval(h as f64))
}

/// `Cov(X_t, X_{t+h})` for any integer `h`, by covariance symmetry.
pub fn acvf_signed(model: &PtvArfimaModel, i: SeasonIndex, h: i64) -> Result<f64> {
    if h >= 0 {
        acvf_exact(model, i, h as u64)
    } else {
        acvf_exact(model, model.shift(i, h), h.unsigned_abs())
    }
}

/// Seasons × lags table of autocovariances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcvfTable {
    pub model: PtvArfimaModel,
    pub min_lag: u64,
    pub max_lag: u64,
    pub method: Method,
    /// `values[i - 1][h - min_lag]`.
    pub values: Vec<Vec<f64>>,
}

impl AcvfTable {
    pub fn get(&self, i: SeasonIndex, h: u64) -> Option<f64> {
        if h < self.min_lag || h > self.max_lag {
            return None;
        }
        self.values
            .get(i.get() - 1)
            .map(|row| row[(h - self.min_lag) as usize])
    }

    pub fn lags(&self) -> RangeInclusive<u64> {
        self.min_lag..=self.max_lag
    }

    /// `season,lag,gamma,rho,method`; `rho` is filled from the ACF closed form
    /// when `with_acf` is set and left empty otherwise.
    pub fn to_csv(&self, with_acf: bool) -> Result<String> {
        let mut out = String::from("season,lag,gamma,rho,method\n");
        for (row, s) in self.values.iter().zip(self.model.seasons()) {
            for (offset, gamma) in row.iter().enumerate() {
                let h = self.min_lag + offset as u64;
                let rho = if with_acf {
                    format_real(acf_exact(&self.model, s, h)?)
                } else {
                    String::new()
                };
                out.push_str(&format!(
                    "{},{},{},{},{}\n",
                    s,
                    h,
                    format_real(*gamma),
                    rho,
                    self.method.label()
                ));
            }
        }
        Ok(out)
    }
}

/// 17 significant digits.
pub fn format_real(x: f64) -> String {
    format!("{x:.16e}")
}

/// Lags `0..=max_lag` with the default execution mode.
pub fn acvf_table(model: &PtvArfimaModel, max_lag: u64, method: Method) -> Result<AcvfTable> {
    acvf_table_with(model, 0..=max_lag, method, Execution::default())
}

pub fn acvf_table_with(
    model: &PtvArfimaModel,
    lags: RangeInclusive<u64>,
    method: Method,
    exec: Execution,
) -> Result<AcvfTable> {
    let (min_lag, max_lag) = (*lags.start(), *lags.end());
    if min_lag > max_lag {
        return Err(Error::Domain(format!("empty lag range {min_lag}..={max_lag}")));
    }
    if method == Method::Asymptotic && min_lag == 0 {
        return Err(Error::Domain(
            "asymptotic method is defined for lags h >= 1; start the table at lag 1".into(),
        ));
    }
    let p = model.period();
    let width = (max_lag - min_lag + 1) as usize;
    let oracle = match method {
        Method::Series { n_terms } => Some(SeriesOracle::new(model, n_terms, max_lag)?),
        _ => None,
    };
    let cells = exec.try_map(p * width, |cell| {
        let i = model.season(cell / width + 1)?;
        let h = min_lag + (cell % width) as u64;
        match method {
            Method::Exact => acvf_exact(model, i, h),
            Method::Hypergeometric => acvf_hypergeometric(model, i, h),
            Method::Asymptotic => acvf_asymptotic(model, i, h),
            Method::Series { .. } => oracle
                .as_ref()
                .expect("oracle built for series")
                .acvf(i, h, NoiseConvention::ObservationSeason),
        }
    })?;
    let values = cells.chunks(width).map(<[f64]>::to_vec).collect();
    Ok(AcvfTable {
        model: model.clone(),
        min_lag,
        max_lag,
        method,
        values,
    })
}
