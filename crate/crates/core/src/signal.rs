//! Power control at the MBS and the SNR the SBS observes.

use rand::Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::channel::{self, draw_block, tag, ChannelDraw};
use crate::error::Result;
use crate::rng::RngStream;
use crate::scenario::{Measurement, Scenario};

/// Linear floor applied to an energy-detection estimate before taking dB.
pub const MEASURED_SNR_FLOOR: f64 = 1e-6;

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// Transmit power (mW) that puts the MU exactly at the target SNR.
pub fn clpc_power(
    fading_power_mu: f64,
    shadow_mu: f64,
    g0: f64,
    gamma_t_db: f64,
    noise_dbm: f64,
) -> f64 {
    db_to_linear(gamma_t_db) * db_to_linear(noise_dbm) / (fading_power_mu * g0 * shadow_mu)
}

/// Received SNR (linear) of a link with the given gains at transmit power
/// `power_mw`.
pub fn received_snr(fading_power: f64, path_gain: f64, shadow: f64, power_mw: f64, noise_dbm: f64) -> f64 {
    fading_power * path_gain * shadow * power_mw / db_to_linear(noise_dbm)
}

/// SBS SNR in dB from the closed-form decomposition
/// `gamma_T + 37.6 log10(d0/d1) + Theta_r + Theta_s`.
pub fn true_sbs_snr_db(draw: &ChannelDraw, subblock: usize, scenario: &Scenario) -> f64 {
    let theta_r = linear_to_db(draw.fading_sbs[subblock] / draw.fading_mu[subblock]);
    let theta_s = linear_to_db(draw.shadow_sbs / draw.shadow_mu);
    scenario.gamma_t_db + median_offset_db(scenario) + theta_r + theta_s
}

/// `37.6 log10(d0/d1)`: how far the SBS median sits above the MU target.
pub fn median_offset_db(scenario: &Scenario) -> f64 {
    let model = channel::PathLossModel::default();
    model.exponent_coefficient * (scenario.d0_km / scenario.d1_km).log10()
}

/// Precomputed link constants for the physical power-control chain.
#[derive(Debug, Clone, Copy)]
struct Links {
    g0: f64,
    g1: f64,
    gamma_t_db: f64,
    noise_dbm: f64,
}

impl Links {
    fn new(scenario: &Scenario) -> Result<Self> {
        Ok(Self {
            g0: channel::linear_gain(scenario.d0_km)?,
            g1: channel::linear_gain(scenario.d1_km)?,
            gamma_t_db: scenario.gamma_t_db,
            noise_dbm: scenario.noise_dbm,
        })
    }

    /// SBS SNR in dB through transmit power and received power, plus the
    /// MU SNR the same power produces.
    fn sbs_and_mu_snr(&self, draw: &ChannelDraw, j: usize) -> (f64, f64) {
        let p0 = clpc_power(draw.fading_mu[j], draw.shadow_mu, self.g0, self.gamma_t_db, self.noise_dbm);
        let sbs = received_snr(draw.fading_sbs[j], self.g1, draw.shadow_sbs, p0, self.noise_dbm);
        let mu = received_snr(draw.fading_mu[j], self.g0, draw.shadow_mu, p0, self.noise_dbm);
        (linear_to_db(sbs), linear_to_db(mu))
    }
}

/// SBS SNR in dB computed the long way: power control, then propagation to
/// the SBS. Agrees with [`true_sbs_snr_db`] up to rounding.
pub fn sbs_snr_db_via_power(draw: &ChannelDraw, subblock: usize, scenario: &Scenario) -> Result<f64> {
    Ok(Links::new(scenario)?.sbs_and_mu_snr(draw, subblock).0)
}

/// SNR reading the SBS produces for a subblock whose true SNR is
/// `true_snr_db`.
///
/// With pilots, `M` unit-power symbols pass through AWGN at the true SNR and
/// the reading is `(1/M) sum |y|^2 / sigma^2 - 1`, floored at
/// [`MEASURED_SNR_FLOOR`]. The received energy is drawn from its exact
/// distribution, a scaled non-central chi-square: the component along the
/// pilot direction is `sqrt(M gamma) + N(0, 1/2)` and the remaining `2M - 1`
/// real dimensions carry noise only.
pub fn measure_snr_db<R: Rng + ?Sized>(true_snr_db: f64, measurement: Measurement, rng: &mut R) -> f64 {
    let m = match measurement {
        Measurement::Ideal => return true_snr_db,
        Measurement::Pilots(m) => f64::from(m.get()),
    };
    let gamma = db_to_linear(true_snr_db);
    let z: f64 = rng.sample(StandardNormal);
    let along = (m * gamma).sqrt() + z * std::f64::consts::FRAC_1_SQRT_2;
    let rest = ChiSquared::new(2.0 * m - 1.0)
        .expect("positive degrees of freedom")
        .sample(rng);
    let energy = along * along + 0.5 * rest;
    linear_to_db((energy / m - 1.0).max(MEASURED_SNR_FLOOR))
}

/// One subblock observation at the SBS.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SnrSample {
    pub block: usize,
    pub subblock: usize,
    pub true_snr_db: f64,
    pub measured_snr_db: f64,
}

/// The `I x J` grid of SBS observations for one trial, row-major by block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnrMatrix {
    pub blocks: usize,
    pub subblocks: usize,
    /// Key of the trial stream the matrix was drawn from.
    pub stream_key: u64,
    pub samples: Vec<SnrSample>,
}

impl SnrMatrix {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn get(&self, block: usize, subblock: usize) -> Option<&SnrSample> {
        if block < self.blocks && subblock < self.subblocks {
            self.samples.get(block * self.subblocks + subblock)
        } else {
            None
        }
    }

    pub fn measured_db(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|s| s.measured_snr_db)
    }
}

/// Draws `I` blocks of `J` subblocks from the trial stream and records the
/// true and measured SBS SNR of each.
pub fn generate_snr_matrix(scenario: &Scenario, trial: &RngStream) -> Result<SnrMatrix> {
    let links = Links::new(scenario)?;
    let mut samples = Vec::with_capacity(scenario.samples());
    for i in 0..scenario.blocks {
        let draw = draw_block(scenario, i, trial);
        let block = trial.substream(i as u64);
        for j in 0..scenario.subblocks {
            let (true_snr_db, _) = links.sbs_and_mu_snr(&draw, j);
            let mut meas = block.substream(tag::subblock(j)).substream(tag::MEASUREMENT);
            let measured_snr_db = measure_snr_db(true_snr_db, scenario.pilot_count, &mut meas);
            samples.push(SnrSample {
                block: i,
                subblock: j,
                true_snr_db,
                measured_snr_db,
            });
        }
    }
    Ok(SnrMatrix {
        blocks: scenario.blocks,
        subblocks: scenario.subblocks,
        stream_key: trial.key(),
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimator::sample_median_db;

    fn ideal(d0: f64, d1: f64, i: usize, j: usize) -> Scenario {
        Scenario {
            d0_km: d0,
            d1_km: d1,
            blocks: i,
            subblocks: j,
            pilot_count: Measurement::Ideal,
            ..Scenario::default()
        }
    }

    #[test]
    fn clpc_unity_identity() {
        assert_eq!(clpc_power(1.0, 1.0, 1.0, 0.0, 0.0), 1.0);
    }

    #[test]
    fn clpc_power_scales_with_distance() {
        let g = channel::linear_gain(0.2).unwrap();
        let g2 = channel::linear_gain(0.4).unwrap();
        let ratio = clpc_power(0.7, 1.3, g2, 10.0, -114.0) / clpc_power(0.7, 1.3, g, 10.0, -114.0);
        assert!((ratio / 2f64.powf(3.76) - 1.0).abs() < 1e-12, "{ratio}");
    }

    #[test]
    fn clpc_closes_the_loop_on_every_subblock() {
        let sc = Scenario::default();
        let links = Links::new(&sc).unwrap();
        let trial = RngStream::new(8);
        for i in 0..50 {
            let draw = draw_block(&sc, i, &trial);
            for j in 0..sc.subblocks {
                let (_, mu) = links.sbs_and_mu_snr(&draw, j);
                assert!((mu - sc.gamma_t_db).abs() < 1e-9, "{mu}");
            }
        }
    }

    #[test]
    fn equal_links_give_target_snr() {
        let sc = ideal(0.2, 0.2, 1, 1);
        let draw = ChannelDraw {
            block_index: 0,
            shadow_mu: 1.7,
            shadow_sbs: 1.7,
            fading_mu: vec![0.4],
            fading_sbs: vec![0.4],
        };
        assert_eq!(true_sbs_snr_db(&draw, 0, &sc), sc.gamma_t_db);
    }

    #[test]
    fn shortcut_value_at_reference_geometry() {
        let sc = ideal(0.25, 0.1, 1, 1);
        let draw = ChannelDraw {
            block_index: 0,
            shadow_mu: 1.0,
            shadow_sbs: 1.0,
            fading_mu: vec![1.0],
            fading_sbs: vec![1.0],
        };
        // 10 + 37.6 log10(2.5)
        let expected = 24.962_544_326_068_617;
        assert!((true_sbs_snr_db(&draw, 0, &sc) - expected).abs() < 1e-9);
        assert!((sbs_snr_db_via_power(&draw, 0, &sc).unwrap() - expected).abs() < 1e-9);
    }

    #[test]
    fn shortcut_and_power_chain_agree() {
        for (d0, d1) in [(0.25, 0.1), (0.05, 0.4), (0.5, 0.035)] {
            let sc = Scenario { sigma_s_db: 8.0, ..ideal(d0, d1, 1, 10) };
            let trial = RngStream::new(77);
            for i in 0..200 {
                let draw = draw_block(&sc, i, &trial);
                for j in 0..sc.subblocks {
                    let a = true_sbs_snr_db(&draw, j, &sc);
                    let b = sbs_snr_db_via_power(&draw, j, &sc).unwrap();
                    assert!((a - b).abs() < 1e-9, "{a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn true_snr_median_matches_offset() {
        let sc = ideal(0.25, 0.1, 1, 1);
        let trial = RngStream::new(31);
        let n = 1_000_000;
        let mut xs: Vec<f64> = (0..n)
            .map(|i| true_sbs_snr_db(&draw_block(&sc, i, &trial), 0, &sc))
            .collect();
        xs.sort_by(f64::total_cmp);
        let med = 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
        let target = sc.gamma_t_db + 37.6 * 2.5f64.log10();
        assert!((med - target).abs() < 0.05, "{med} vs {target}");
    }

    #[test]
    fn ideal_measurement_is_identity() {
        let mut rng = RngStream::new(0);
        assert_eq!(measure_snr_db(10.0, Measurement::Ideal, &mut rng), 10.0);
        assert_eq!(measure_snr_db(-37.25, Measurement::Ideal, &mut rng), -37.25);
    }

    fn error_spread(true_db: f64, m: u32, seed: u64) -> f64 {
        let meas = Measurement::pilots(m).unwrap();
        let mut rng = RngStream::new(seed);
        let n = 10_000;
        let errs: Vec<f64> = (0..n)
            .map(|_| measure_snr_db(true_db, meas, &mut rng) - true_db)
            .collect();
        let mean = errs.iter().sum::<f64>() / n as f64;
        (errs.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / n as f64).sqrt()
    }

    #[test]
    fn measurement_error_shrinks_with_pilots() {
        for true_db in [0.0, 10.0] {
            assert!(error_spread(true_db, 1000, 1) < error_spread(true_db, 10, 2));
        }
    }

    #[test]
    fn measurement_error_shrinks_with_snr() {
        let spreads: Vec<f64> = [0.0, 5.0, 10.0, 15.0, 20.0]
            .iter()
            .map(|&s| error_spread(s, 100, 3))
            .collect();
        for w in spreads.windows(2) {
            assert!(w[1] < w[0], "{spreads:?}");
        }
    }

    #[test]
    fn measurement_readings_are_finite_at_very_low_snr() {
        let mut rng = RngStream::new(4);
        let meas = Measurement::pilots(1).unwrap();
        for _ in 0..10_000 {
            let v = measure_snr_db(-80.0, meas, &mut rng);
            assert!(v.is_finite() && v >= linear_to_db(MEASURED_SNR_FLOOR));
        }
    }

    #[test]
    fn sufficient_statistic_matches_symbol_level_simulation() {
        // Oracle: push M pilots through complex AWGN one symbol at a time.
        let m = 10u32;
        let gamma = 2.0f64;
        let n = 100_000;
        let mut rng = RngStream::new(123);
        let symbol_level: Vec<f64> = (0..n)
            .map(|_| {
                let mut energy = 0.0;
                for _ in 0..m {
                    let a: f64 = rng.sample::<f64, _>(StandardNormal) * std::f64::consts::FRAC_1_SQRT_2;
                    let b: f64 = rng.sample::<f64, _>(StandardNormal) * std::f64::consts::FRAC_1_SQRT_2;
                    energy += (gamma.sqrt() + a).powi(2) + b * b;
                }
                energy / f64::from(m) - 1.0
            })
            .collect();
        let mut rng = RngStream::new(456);
        let fast: Vec<f64> = (0..n)
            .map(|_| db_to_linear(measure_snr_db(linear_to_db(gamma), Measurement::pilots(m).unwrap(), &mut rng)))
            .collect();
        let moments = |v: &[f64]| {
            let mean = v.iter().sum::<f64>() / v.len() as f64;
            let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / v.len() as f64;
            (mean, var)
        };
        let (m1, v1) = moments(&symbol_level);
        let (m2, v2) = moments(&fast);
        // unbiased, variance (1 + 2 gamma) / M = 0.5
        assert!((m1 - gamma).abs() < 0.01 && (m2 - gamma).abs() < 0.01, "{m1} {m2}");
        assert!((v1 - 0.5).abs() < 0.01 && (v2 - 0.5).abs() < 0.01, "{v1} {v2}");
    }

    #[test]
    fn matrix_shape_and_determinism() {
        let sc = ideal(0.25, 0.1, 1, 1);
        let trial = RngStream::new(9).substream(0);
        let m = generate_snr_matrix(&sc, &trial).unwrap();
        assert_eq!(m.len(), 1);

        let sc = Scenario { blocks: 7, subblocks: 3, ..Scenario::default() };
        let a = generate_snr_matrix(&sc, &trial).unwrap();
        let b = generate_snr_matrix(&sc, &trial).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 21);
        let s = a.get(4, 2).unwrap();
        assert_eq!((s.block, s.subblock), (4, 2));
        assert!(a.get(7, 0).is_none());
        assert!(a.measured_db().all(f64::is_finite));
    }

    #[test]
    fn ideal_mode_reports_true_snr() {
        let sc = ideal(0.3, 0.1, 10, 5);
        let m = generate_snr_matrix(&sc, &RngStream::new(2)).unwrap();
        assert!(m.samples.iter().all(|s| s.measured_snr_db == s.true_snr_db));
    }

    #[test]
    fn shadowing_component_is_shared_within_a_block() {
        let sc = Scenario { sigma_s_db: 6.0, ..ideal(0.25, 0.1, 30, 8) };
        let trial = RngStream::new(17);
        let m = generate_snr_matrix(&sc, &trial).unwrap();
        for i in 0..sc.blocks {
            let draw = draw_block(&sc, i, &trial);
            let residuals: Vec<f64> = (0..sc.subblocks)
                .map(|j| {
                    let theta_r = linear_to_db(draw.fading_sbs[j] / draw.fading_mu[j]);
                    m.get(i, j).unwrap().measured_snr_db - sc.gamma_t_db - median_offset_db(&sc) - theta_r
                })
                .collect();
            for r in &residuals {
                assert!((r - residuals[0]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn ideal_sample_median_converges() {
        let sc = ideal(0.25, 0.1, 100_000, 1);
        let m = generate_snr_matrix(&sc, &RngStream::new(2024)).unwrap();
        let sorted = crate::estimator::SortedSnrSamples::new(m.measured_db().collect()).unwrap();
        let med = sample_median_db(&sorted);
        let target = sc.gamma_t_db + median_offset_db(&sc);
        assert!((med - target).abs() < 0.05, "{med} vs {target}");
    }
}
