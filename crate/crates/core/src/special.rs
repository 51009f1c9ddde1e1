//! Gamma-function kernels and fractional-differencing coefficients.
//!
//! Everything downstream (closed-form autocovariances, simulation filters,
//! inversion filters) is built from three primitives defined here:
//!
//! * [`signed_log_gamma`]: `ln|Γ(x)|` together with the sign of `Γ(x)`,
//!   valid on the whole real line except the poles `0, -1, -2, …`;
//! * [`gamma_ratio`]: `Γ(a)/Γ(b)` evaluated in log space, so that arguments
//!   of order `10^6` never overflow;
//! * [`psi_coeffs`] / [`pi_coeffs`]: the binomial expansions of
//!   `(1 - B)^{-d}` and `(1 - B)^{d}`, generated by their one-multiply
//!   recurrences.
//!
//! [`gauss_2f1_at_one`] evaluates `2F1(a, b; c; 1)` through the Gauss
//! summation theorem; only the unit-argument case is needed.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const LN2_HI: f64 = std::f64::consts::LN_2;
const LN2_LO: f64 = 2.319_046_813_846_299_6e-17;
const HALF_LN_2PI_HI: f64 = 0.918_938_533_204_672_8;
const HALF_LN_2PI_LO: f64 = -3.878_294_158_067_241_4e-17;
const LN_PI: f64 = 1.144_729_885_849_400_2;

/// Below this argument the Lanczos sum is used, above it Stirling's series.
const STIRLING_CUTOFF: f64 = 10.0;

// Lanczos coefficients, g = 7, n = 9.
const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// `ln|Γ(x)|` with the sign of `Γ(x)` carried separately.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignedLogGamma {
    pub log_abs: f64,
    pub sign: i8,
}

impl SignedLogGamma {
    /// `sign · exp(log_abs)`; overflows to infinity above x ≈ 171.6.
    pub fn value(self) -> f64 {
        f64::from(self.sign) * self.log_abs.exp()
    }
}

/// Returns `ln|Γ(x)|` and `sign Γ(x)`.
///
/// Negative arguments go through the reflection formula
/// `Γ(x) Γ(1 - x) = π / sin(πx)`.
pub fn signed_log_gamma(x: f64) -> Result<SignedLogGamma> {
    if x.is_nan() {
        return Err(Error::Domain("log-gamma of NaN".into()));
    }
    if x <= 0.0 && x == x.floor() {
        return Err(Error::Pole(x));
    }
    if x > 0.0 {
        return Ok(SignedLogGamma {
            log_abs: ln_gamma_positive(x),
            sign: 1,
        });
    }
    let s = sin_pi(x);
    let log_abs = LN_PI - s.abs().ln() - ln_gamma_positive(1.0 - x);
    Ok(SignedLogGamma {
        log_abs,
        sign: if s < 0.0 { -1 } else { 1 },
    })
}

/// `Γ(x)` for moderate arguments; errors at the poles.
pub fn gamma(x: f64) -> Result<f64> {
    signed_log_gamma(x).map(SignedLogGamma::value)
}

/// `1/Γ(x)`, which is entire: zero at the poles instead of an error.
pub fn reciprocal_gamma(x: f64) -> f64 {
    match signed_log_gamma(x) {
        Ok(lg) => f64::from(lg.sign) * (-lg.log_abs).exp(),
        Err(_) => 0.0,
    }
}

/// `Γ(a) / Γ(b)`.
///
/// Only the difference of the two log-Gammas is exponentiated. When both
/// arguments exceed the Stirling cutoff the difference is formed directly
/// from the asymptotic series, so the large `(x - 1/2) ln x` terms cancel
/// analytically rather than in floating point.
pub fn gamma_ratio(a: f64, b: f64) -> Result<f64> {
    if a == b {
        // Still reject poles.
        signed_log_gamma(a)?;
        return Ok(1.0);
    }
    if a >= STIRLING_CUTOFF && b >= STIRLING_CUTOFF {
        return Ok(ln_gamma_difference_large(a, b).exp());
    }
    let la = signed_log_gamma(a)?;
    let lb = signed_log_gamma(b)?;
    let sign = f64::from(la.sign * lb.sign);
    Ok(sign * (la.log_abs - lb.log_abs).exp())
}

/// `Γ(base + u) / Γ(base + v)` for a large common offset `base`.
///
/// Forming `base + u` in floating point rounds away up to half an ulp of
/// `base`, which the digamma slope amplifies; here the argument difference
/// `u - v` is taken before the offset is added.
pub fn gamma_ratio_offset(base: f64, u: f64, v: f64) -> Result<f64> {
    let (a, b) = (base + u, base + v);
    if a >= STIRLING_CUTOFF && b >= STIRLING_CUTOFF && u != v {
        return Ok(ln_gamma_difference_large_delta(a, b, u - v).exp());
    }
    gamma_ratio(a, b)
}

/// Source of Gamma evaluations for the closed-form autocovariances.
///
/// The closed forms are generic over the kernel so that a deliberately
/// perturbed kernel can be injected as a negative control.
pub trait GammaKernel: Sync {
    fn signed_log_gamma(&self, x: f64) -> Result<SignedLogGamma>;
    fn gamma_ratio(&self, a: f64, b: f64) -> Result<f64>;

    /// `Γ(base + u) / Γ(base + v)`.
    fn gamma_ratio_offset(&self, base: f64, u: f64, v: f64) -> Result<f64> {
        self.gamma_ratio(base + u, base + v)
    }

    fn gamma(&self, x: f64) -> Result<f64> {
        self.signed_log_gamma(x).map(SignedLogGamma::value)
    }

    /// `1/Γ(x)`, zero at poles.
    fn reciprocal_gamma(&self, x: f64) -> f64 {
        match self.signed_log_gamma(x) {
            Ok(lg) => f64::from(lg.sign) * (-lg.log_abs).exp(),
            Err(_) => 0.0,
        }
    }
}

/// The library's own kernel.
#[derive(Debug, Clone, Copy, Default)]
pub struct StandardGamma;

impl GammaKernel for StandardGamma {
    fn signed_log_gamma(&self, x: f64) -> Result<SignedLogGamma> {
        signed_log_gamma(x)
    }

    fn gamma_ratio(&self, a: f64, b: f64) -> Result<f64> {
        gamma_ratio(a, b)
    }

    fn gamma_ratio_offset(&self, base: f64, u: f64, v: f64) -> Result<f64> {
        gamma_ratio_offset(base, u, v)
    }
}

/// `2F1(a, b; c; 1) = Γ(c) Γ(c - a - b) / (Γ(c - a) Γ(c - b))`.
pub fn gauss_2f1_at_one(a: f64, b: f64, c: f64) -> Result<f64> {
    gauss_2f1_at_one_with(&StandardGamma, a, b, c)
}

pub fn gauss_2f1_at_one_with<K: GammaKernel + ?Sized>(
    kernel: &K,
    a: f64,
    b: f64,
    c: f64,
) -> Result<f64> {
    let excess = c - a - b;
    if !(excess > 0.0) {
        return Err(Error::Divergent { a, b, c, excess });
    }
    for arg in [c, c - a, c - b] {
        if arg <= 0.0 && arg == arg.floor() {
            return Err(Error::Pole(arg));
        }
    }
    if a == 0.0 || b == 0.0 {
        return Ok(1.0);
    }
    // Pair the arguments so each ratio is between nearby values.
    Ok(kernel.gamma_ratio(c, c - a)? * kernel.gamma_ratio(excess, c - b)?)
}

/// Which fractional-differencing expansion a [`CoeffVector`] holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoeffKind {
    /// `(1 - B)^{-d}`: the causal MA(∞) weights.
    Psi,
    /// `(1 - B)^{d}`: the invertible AR(∞) weights.
    Pi,
}

/// A truncated ψ or π weight sequence, indices `0..len`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoeffVector {
    /// 1-based season the weights belong to, when attached to a model.
    pub season: Option<usize>,
    pub kind: CoeffKind,
    pub d: f64,
    pub values: Vec<f64>,
}

impl CoeffVector {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn with_season(mut self, season: usize) -> Self {
        self.season = Some(season);
        self
    }

    /// Weight `j` through the Gamma-ratio formula instead of the recurrence.
    pub fn formula_value(&self, j: usize) -> Result<f64> {
        coefficient_by_formula(self.kind, self.d, j)
    }
}

fn check_memory_parameter(d: f64) -> Result<()> {
    if !(0.0..0.5).contains(&d) {
        return Err(Error::Domain(format!(
            "memory parameter d = {d} outside [0, 1/2)"
        )));
    }
    Ok(())
}

fn recurrence(kind: CoeffKind, d: f64, len: usize) -> Result<CoeffVector> {
    check_memory_parameter(d)?;
    if len == 0 {
        return Err(Error::Domain("coefficient count must be positive".into()));
    }
    let shift = match kind {
        CoeffKind::Psi => d,
        CoeffKind::Pi => -d,
    };
    let mut values = Vec::with_capacity(len);
    let mut current = 1.0;
    values.push(current);
    for j in 1..len {
        let jf = j as f64;
        current *= (jf - 1.0 + shift) / jf;
        values.push(current);
    }
    Ok(CoeffVector {
        season: None,
        kind,
        d,
        values,
    })
}

/// ψ_j = Γ(j + d) / (Γ(j + 1) Γ(d)) for `j in 0..len`.
pub fn psi_coeffs(d: f64, len: usize) -> Result<CoeffVector> {
    recurrence(CoeffKind::Psi, d, len)
}

/// π_j = Γ(j - d) / (Γ(j + 1) Γ(-d)) for `j in 0..len`.
pub fn pi_coeffs(d: f64, len: usize) -> Result<CoeffVector> {
    recurrence(CoeffKind::Pi, d, len)
}

/// Single weight from the Gamma-ratio formula; the cross-check path for the
/// recurrences.
pub fn coefficient_by_formula(kind: CoeffKind, d: f64, j: usize) -> Result<f64> {
    check_memory_parameter(d)?;
    if j == 0 {
        return Ok(1.0);
    }
    let jf = j as f64;
    let (shift, denom) = match kind {
        CoeffKind::Psi => (d, d),
        CoeffKind::Pi => (-d, -d),
    };
    if d == 0.0 {
        return Ok(0.0);
    }
    Ok(gamma_ratio(jf + shift, jf + 1.0)? * reciprocal_gamma(denom))
}

/// Constant `v` in ψ_j ~ v j^{d-1}; the Stirling limit `1/Γ(d)`.
pub fn psi_asymptotic_constant(d: f64) -> Result<f64> {
    check_memory_parameter(d)?;
    Ok(reciprocal_gamma(d))
}

/// `sin(πx)` with exact argument reduction.
fn sin_pi(x: f64) -> f64 {
    let n = x.round();
    let r = x - n;
    let s = (PI * r).sin();
    if (n as i64) % 2 == 0 {
        s
    } else {
        -s
    }
}

fn ln_gamma_positive(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    if x >= STIRLING_CUTOFF {
        ln_gamma_stirling(x)
    } else if x < 0.5 {
        // Γ(x) = Γ(x + 1) / x keeps the Lanczos sum away from its pole.
        lanczos_gamma(x + 1.0).ln() - x.ln()
    } else {
        lanczos_gamma(x).ln()
    }
}

fn lanczos_gamma(x: f64) -> f64 {
    let z = x - 1.0;
    let mut sum = LANCZOS[0];
    for (k, c) in LANCZOS.iter().enumerate().skip(1) {
        sum += c / (z + k as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * t.powf(z + 0.5) * (-t).exp() * sum
}

/// Remainder of Stirling's series, ln Γ(x) - [(x - 1/2) ln x - x + ln √(2π)].
fn stirling_correction(x: f64) -> f64 {
    const B: [f64; 8] = [
        1.0 / 12.0,
        -1.0 / 360.0,
        1.0 / 1260.0,
        -1.0 / 1680.0,
        1.0 / 1188.0,
        -691.0 / 360_360.0,
        1.0 / 156.0,
        -3617.0 / 122_400.0,
    ];
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let mut acc = 0.0;
    for b in B.iter().rev() {
        acc = acc * inv2 + b;
    }
    acc * inv
}

/// Double-double `(hi, lo)` natural logarithm.
fn ln_dd(x: f64) -> (f64, f64) {
    let bits = x.to_bits();
    let mut exponent = ((bits >> 52) & 0x7ff) as i64 - 1023;
    let mut mantissa = f64::from_bits((bits & 0x000f_ffff_ffff_ffff) | (1023_u64 << 52));
    if mantissa > std::f64::consts::SQRT_2 {
        mantissa *= 0.5;
        exponent += 1;
    }
    let k = exponent as f64;
    let p = k * LN2_HI;
    let p_err = k.mul_add(LN2_HI, -p);
    let (s, s_err) = two_sum(p, mantissa.ln());
    fast_two_sum(s, s_err + p_err + k * LN2_LO)
}

fn ln_gamma_stirling(x: f64) -> f64 {
    let (l_hi, l_lo) = ln_dd(x);
    let a = x - 0.5;
    let prod = a * l_hi;
    let prod_lo = a.mul_add(l_hi, -prod) + a * l_lo;
    let (s, e1) = two_sum(prod, -x);
    let (s, e2) = two_sum(s, HALF_LN_2PI_HI);
    s + (prod_lo + e1 + e2 + HALF_LN_2PI_LO + stirling_correction(x))
}

/// ln Γ(a) - ln Γ(b) for a, b ≥ the Stirling cutoff.
fn ln_gamma_difference_large(a: f64, b: f64) -> f64 {
    ln_gamma_difference_large_delta(a, b, a - b)
}

fn ln_gamma_difference_large_delta(a: f64, b: f64, delta: f64) -> f64 {
    (a - 0.5) * (delta / b).ln_1p() + delta * (b.ln() - 1.0) + stirling_correction(a)
        - stirling_correction(b)
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn fast_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}
