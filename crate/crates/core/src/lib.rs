//! Estimating the distance between a macro base station (MBS) and a macro
//! user (MU) from the power-controlled MBS signal a small-cell base station
//! (SBS) overhears.
//!
//! Closed-loop power control makes the MBS transmit power grow with the MU
//! distance `d0`, so the SNR at the SBS carries `d0`. Fading and shadowing
//! obscure it, but in dB the SBS SNR has median `gamma_T + 37.6 log10(d0/d1)`
//! exactly, and the median-based estimator inverts the sample median.
//!
//! * [`channel`]: path loss, fading and shadowing draws
//! * [`signal`]: power control, SBS SNR and its measurement
//! * [`analysis`]: distribution of the SBS SNR
//! * [`estimator`]: the MB estimator and order-statistic bounds
//! * [`harness`]: Monte Carlo trials, sweeps and CSV output

// `!(x >= floor)` comparisons are deliberate: they reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod channel;
pub mod error;
pub mod estimator;
pub mod harness;
pub mod rng;
pub mod scenario;
pub mod signal;

pub use channel::{ChannelDraw, PathLossModel};
pub use error::{Error, Result};
pub use estimator::{mb_estimate, sample_median_db, theorem2_bounds, DistanceEstimate, SortedSnrSamples};
pub use harness::{run_trial, Harness, SweepResult, SweepValue, SweepVariable, TrialOutcome};
pub use rng::RngStream;
pub use scenario::{Measurement, Scenario, SnrAveraging};
pub use signal::{SnrMatrix, SnrSample};
