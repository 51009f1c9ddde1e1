//! Periodically time-varying ARFIMA(0, d_t, 0): a zero-mean process whose
//! memory parameter `d` and noise variance `σ²` cycle with period `p`.
//!
//! The crate provides closed-form periodic autocovariances and
//! autocorrelations with independent cross-checks ([`acvf`]), seeded
//! simulation and residual recovery ([`simulate`]), periodic sample moments
//! and a periodicity diagnostic ([`estimate`]), the reference figures
//! ([`figures`]) and an end-to-end self-check ([`verify`]).
//!
//! ```
//! use ptvarfima::{acvf::acvf_exact, PtvArfimaModel};
//!
//! let model = PtvArfimaModel::new(2, vec![0.3, 0.4], vec![1.0, 1.0])?;
//! let g = acvf_exact(&model, model.season(1)?, 1)?;
//! assert!((g - 0.8843).abs() < 1e-4);
//! # Ok::<(), ptvarfima::Error>(())
//! ```

// `!(a < b)` is used on purpose so that NaN counts as a failed comparison.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acvf;
pub mod defaults;
pub mod error;
pub mod estimate;
pub mod exec;
pub mod figures;
pub mod model;
pub mod simulate;
pub mod special;
pub mod svg;
pub mod verify;

pub use error::{Error, Result};
pub use exec::Execution;
pub use model::{PtvArfimaModel, SeasonIndex};
