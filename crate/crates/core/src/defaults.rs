//! Every default the library and CLI fall back on.
//!
//! | name                     | value     | used by                                   |
//! |--------------------------|-----------|-------------------------------------------|
//! | `TRUNCATION`             | 5000      | MA truncation `M` for simulation, AR truncation for residuals |
//! | `BURN_IN`                | 5000      | discarded leading outputs (`= M`)         |
//! | `PATH_LENGTH`            | 4096      | `n` for simulate / verify                 |
//! | `REPLICATES`             | 500       | ensemble size `R`                         |
//! | `MASTER_SEED`            | 42        | when `--seed` is not given                |
//! | `SERIES_TERMS`           | 1 000 000 | series oracle truncation                  |
//! | `FIGURE_MAX_LAG`         | 100       | figure tables, lags `0..=100`             |
//! | `MONTE_CARLO_MAX_LAG`    | 5         | ensemble ACVF comparison                  |
//! | `CLOSED_FORM_RTOL`       | 1e-12     | closed form vs closed form                |
//! | `SERIES_RTOL_STRONG`     | 5e-2      | series vs exact, strong memory            |
//! | `SERIES_RTOL_WEAK`       | 1e-4      | series vs exact, weak memory              |
//! | `ASYMPTOTIC_RTOL_NEAR`   | 1e-2      | decay law at `h = 10⁴`                    |
//! | `ASYMPTOTIC_RTOL_FAR`    | 1e-3      | decay law at `h = 10⁶`                    |
//! | `Z_THRESHOLD`            | 3         | standard errors, Monte-Carlo and periodicity checks |
//! | `PERIODICITY_LAGS`       | 5         | lags compared by the periodicity check    |
//! | `PERIODICITY_BLOCKS`     | 32        | blocks for a single-path periodicity check |
//! | `INVERSION_MIN_CORR`     | 0.99      | residual round trip                       |
//! | `INVERSION_PATH_LENGTH`  | 15000     | path length for the round trip            |

pub const TRUNCATION: usize = 5000;
pub const BURN_IN: usize = TRUNCATION;
pub const PATH_LENGTH: usize = 4096;
pub const REPLICATES: usize = 500;
pub const MASTER_SEED: u64 = 42;

pub const SERIES_TERMS: usize = 1_000_000;
pub const FIGURE_MAX_LAG: u64 = 100;
pub const MONTE_CARLO_MAX_LAG: usize = 5;

pub const CLOSED_FORM_RTOL: f64 = 1e-12;
pub const SERIES_RTOL_STRONG: f64 = 5e-2;
pub const SERIES_RTOL_WEAK: f64 = 1e-4;
pub const ASYMPTOTIC_RTOL_NEAR: f64 = 1e-2;
pub const ASYMPTOTIC_RTOL_FAR: f64 = 1e-3;

pub const Z_THRESHOLD: f64 = 3.0;
pub const PERIODICITY_LAGS: usize = 5;
pub const PERIODICITY_BLOCKS: usize = 32;

pub const INVERSION_MIN_CORR: f64 = 0.99;
pub const INVERSION_PATH_LENGTH: usize = 15_000;
