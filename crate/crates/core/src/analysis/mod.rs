//! Distribution of the SBS SNR in dB.
//!
//! The SBS SNR decomposes as `gamma_T + 37.6 log10(d0/d1) + Theta_r + Theta_s`
//! where `Theta_r`, the dB ratio of two unit-mean exponential fading powers,
//! is logistic with scale `10 / ln 10`, and `Theta_s`, the difference of two
//! independent shadowing terms, is `Normal(0, 2 sigma_s^2)`. The CDF of the
//! sum has no closed form and is evaluated by adaptive quadrature.

pub mod quadrature;

use std::f64::consts::{LN_10, PI};

use crate::error::{Error, Result};
use crate::scenario::Scenario;
use crate::signal::median_offset_db;

/// Requested absolute accuracy of every convolution integral.
pub const CONVOLUTION_TOLERANCE: f64 = 1e-11;
const MAX_PANELS: usize = 400;
/// Half-width of the integration window, in standard deviations of `Theta_s`.
const TRUNCATION_SDS: f64 = 10.0;

/// CDF of the fading ratio in dB, `1 / (1 + 10^(-theta/10))`.
pub fn theta_r_cdf(theta_db: f64) -> f64 {
    1.0 / (1.0 + 10f64.powf(-theta_db / 10.0))
}

/// Density of the fading ratio in dB.
pub fn theta_r_pdf(theta_db: f64) -> f64 {
    // even in theta; evaluating at -|theta| keeps 10^x bounded
    let t = 10f64.powf(-theta_db.abs() / 10.0);
    LN_10 * t / (10.0 * (1.0 + t) * (1.0 + t))
}

/// Density of the shadowing difference in dB, `Normal(0, 2 sigma_s^2)`.
pub fn theta_s_pdf(theta_db: f64, sigma_s_db: f64) -> Result<f64> {
    if sigma_s_db == 0.0 {
        return Err(Error::DegenerateShadowing);
    }
    Ok(normal_pdf(theta_db, sigma_s_db))
}

fn normal_pdf(theta_db: f64, sigma_s_db: f64) -> f64 {
    let var2 = 4.0 * sigma_s_db * sigma_s_db;
    (-theta_db * theta_db / var2).exp() / (PI * var2).sqrt()
}

/// `int f_s(t) g(m - t) dt` over the truncated support of `Theta_s`.
fn convolve<G: Fn(f64) -> f64>(g: G, m: f64, sigma_s_db: f64) -> Result<f64> {
    let half_width = TRUNCATION_SDS * sigma_s_db * std::f64::consts::SQRT_2;
    quadrature::integrate(
        |t| normal_pdf(t, sigma_s_db) * g(m - t),
        -half_width,
        half_width,
        CONVOLUTION_TOLERANCE,
        MAX_PANELS,
    )
}

/// `P(Theta_r + Theta_s <= m)`.
pub fn sum_cdf(m: f64, sigma_s_db: f64) -> Result<f64> {
    if sigma_s_db == 0.0 {
        return Ok(theta_r_cdf(m));
    }
    if m.is_infinite() {
        return Ok(if m > 0.0 { 1.0 } else { 0.0 });
    }
    Ok(convolve(theta_r_cdf, m, sigma_s_db)?.clamp(0.0, 1.0))
}

/// Density of `Theta_r + Theta_s` at `m`.
pub fn sum_pdf(m: f64, sigma_s_db: f64) -> Result<f64> {
    if sigma_s_db == 0.0 {
        return Ok(theta_r_pdf(m));
    }
    if m.is_infinite() {
        return Ok(0.0);
    }
    convolve(theta_r_pdf, m, sigma_s_db)
}

/// CDF of the SBS SNR in dB under `scenario`.
pub fn gamma1_db_cdf(gamma_db: f64, scenario: &Scenario) -> Result<f64> {
    sum_cdf(gamma_db - scenario.gamma_t_db - median_offset_db(scenario), scenario.sigma_s_db)
}

/// Density of the SBS SNR in dB under `scenario`.
pub fn gamma1_db_pdf(gamma_db: f64, scenario: &Scenario) -> Result<f64> {
    sum_pdf(gamma_db - scenario.gamma_t_db - median_offset_db(scenario), scenario.sigma_s_db)
}

/// `|int f_s(t) F_r(-t) dt - 1/2|`: how far the SBS SNR CDF evaluated at
/// `gamma_T + 37.6 log10(d0/d1)` is from one half.
pub fn verify_median_identity(sigma_s_db: f64) -> Result<f64> {
    if !(sigma_s_db > 0.0) {
        return Err(Error::DegenerateShadowing);
    }
    Ok((convolve(theta_r_cdf, 0.0, sigma_s_db)? - 0.5).abs())
}
