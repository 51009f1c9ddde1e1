//! The PtvARFIMA(0, d_t, 0) model object and its season arithmetic.
//!
//! Seasons are 1-based everywhere in the public surface: time `t` belongs to
//! the season `i ∈ {1, …, p}` with `t = i + p·m` for some integer `m`.
//! Negative times are allowed.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::{pi_coeffs, psi_coeffs, CoeffVector};

/// A season `i ∈ {1, …, p}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SeasonIndex(usize);

impl SeasonIndex {
    /// Checked constructor for a model of period `period`.
    pub fn new(value: usize, period: usize) -> Result<Self> {
        if value == 0 || value > period {
            return Err(Error::Domain(format!(
                "season {value} outside 1..={period}"
            )));
        }
        Ok(Self(value))
    }

    pub fn get(self) -> usize {
        self.0
    }

    pub(crate) fn zero_based(self) -> usize {
        self.0 - 1
    }
}

impl fmt::Display for SeasonIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// The season of time `t` for period `period` (which must be ≥ 1).
pub fn season_of(t: i64, period: usize) -> SeasonIndex {
    assert!(period >= 1, "period must be positive");
    let p = period as i64;
    SeasonIndex(((t - 1).rem_euclid(p) + 1) as usize)
}

/// Serialized form: `{"period": 2, "d": [0.3, 0.4], "sigma2": [1.0, 1.0]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelDocument {
    pub period: usize,
    pub d: Vec<f64>,
    pub sigma2: Vec<f64>,
}

/// Validated periodic fractional-noise model.
///
/// `d[i] ∈ [0, 1/2)` for every season; `d = 0` gives a white-noise season.
/// With `period = 1` this is the stationary ARFIMA(0, d, 0) process.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ModelDocument", into = "ModelDocument")]
pub struct PtvArfimaModel {
    period: usize,
    d: Vec<f64>,
    sigma2: Vec<f64>,
}

impl PtvArfimaModel {
    pub fn new(period: usize, d: Vec<f64>, sigma2: Vec<f64>) -> Result<Self> {
        if period == 0 {
            return Err(Error::Domain("period must be at least 1".into()));
        }
        if d.len() != period {
            return Err(Error::Dimension {
                what: "d",
                got: d.len(),
                expected: period,
            });
        }
        if sigma2.len() != period {
            return Err(Error::Dimension {
                what: "sigma2",
                got: sigma2.len(),
                expected: period,
            });
        }
        for (k, &di) in d.iter().enumerate() {
            if !(0.0..0.5).contains(&di) {
                return Err(Error::Domain(format!(
                    "d[{}] = {di} outside [0, 1/2) (causality requires d < 1/2)",
                    k + 1
                )));
            }
        }
        for (k, &s) in sigma2.iter().enumerate() {
            if !(s.is_finite() && s > 0.0) {
                return Err(Error::Domain(format!(
                    "sigma2[{}] = {s} must be a positive finite variance",
                    k + 1
                )));
            }
        }
        Ok(Self { period, d, sigma2 })
    }

    /// Stationary ARFIMA(0, d, 0) as the one-season special case.
    pub fn stationary(d: f64, sigma2: f64) -> Result<Self> {
        Self::new(1, vec![d], vec![sigma2])
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Format(format!("model document: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.document()).expect("model document serializes")
    }

    pub fn document(&self) -> ModelDocument {
        ModelDocument {
            period: self.period,
            d: self.d.clone(),
            sigma2: self.sigma2.clone(),
        }
    }

    pub fn period(&self) -> usize {
        self.period
    }

    pub fn d_values(&self) -> &[f64] {
        &self.d
    }

    pub fn sigma2_values(&self) -> &[f64] {
        &self.sigma2
    }

    pub fn seasons(&self) -> impl Iterator<Item = SeasonIndex> {
        (1..=self.period).map(SeasonIndex)
    }

    pub fn season(&self, value: usize) -> Result<SeasonIndex> {
        SeasonIndex::new(value, self.period)
    }

    pub fn season_of(&self, t: i64) -> SeasonIndex {
        season_of(t, self.period)
    }

    pub fn d(&self, i: SeasonIndex) -> f64 {
        self.d[self.checked(i)]
    }

    pub fn sigma2(&self, i: SeasonIndex) -> f64 {
        self.sigma2[self.checked(i)]
    }

    /// `d` of the season `offset` steps after season `i`.
    pub fn d_at_offset(&self, i: SeasonIndex, offset: i64) -> f64 {
        self.d(self.shift(i, offset))
    }

    /// Season reached from `i` after `offset` steps.
    pub fn shift(&self, i: SeasonIndex, offset: i64) -> SeasonIndex {
        self.season_of(i.get() as i64 + offset)
    }

    /// ψ weights `0..len` of season `i`.
    pub fn psi(&self, i: SeasonIndex, len: usize) -> Result<CoeffVector> {
        psi_coeffs(self.d(i), len).map(|c| c.with_season(i.get()))
    }

    /// π weights `0..len` of season `i`.
    pub fn pi(&self, i: SeasonIndex, len: usize) -> Result<CoeffVector> {
        pi_coeffs(self.d(i), len).map(|c| c.with_season(i.get()))
    }

    fn checked(&self, i: SeasonIndex) -> usize {
        assert!(
            i.get() >= 1 && i.get() <= self.period,
            "season {i} does not belong to a model of period {}",
            self.period
        );
        i.zero_based()
    }
}

impl TryFrom<ModelDocument> for PtvArfimaModel {
    type Error = Error;

    fn try_from(doc: ModelDocument) -> Result<Self> {
        Self::new(doc.period, doc.d, doc.sigma2)
    }
}

impl From<PtvArfimaModel> for ModelDocument {
    fn from(model: PtvArfimaModel) -> Self {
        ModelDocument {
            period: model.period,
            d: model.d,
            sigma2: model.sigma2,
        }
    }
}
