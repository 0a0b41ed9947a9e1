//! Monte-Carlo check of the expected-SINR lower bound.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use super::EvalError;
use crate::channel::ChannelParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FadingModel {
    /// Power gain `|h|^2 ~ Exp(1)`.
    RayleighUnitPower,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonteCarloConfig {
    pub n_samples: usize,
    pub fading: FadingModel,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    /// Mean linear SINR.
    pub estimate: f64,
    pub std_error: f64,
}

fn check(gains: &[f64], loads: &[f64], serving: usize) -> Result<(), EvalError> {
    if gains.len() != loads.len() {
        return Err(EvalError::InvalidInput(format!(
            "{} gains but {} loads",
            gains.len(),
            loads.len()
        )));
    }
    if serving >= gains.len() {
        return Err(EvalError::InvalidInput(format!(
            "serving index {serving} out of range"
        )));
    }
    if gains.iter().any(|g| !g.is_finite() || *g < 0.0) {
        return Err(EvalError::InvalidInput(
            "gains must be finite and non-negative".into(),
        ));
    }
    if loads.iter().any(|l| !(0.0..=1.0).contains(l)) {
        return Err(EvalError::InvalidInput("loads must lie in [0, 1]".into()));
    }
    Ok(())
}

/// Closed-form expected SINR (linear) with `serving` fixed: mean power over
/// mean interference plus noise.
pub fn expected_sinr(
    gains_amp: &[f64],
    loads: &[f64],
    params: &ChannelParams,
    serving: usize,
) -> Result<f64, EvalError> {
    check(gains_amp, loads, serving)?;
    let p = params.tx_power_mw();
    let interference: f64 = gains_amp
        .iter()
        .zip(loads)
        .enumerate()
        .filter(|(m, _)| *m != serving)
        .map(|(_, (h, l))| l * p * h * h)
        .sum();
    Ok(p * gains_amp[serving].powi(2) / (interference + params.noise_power_mw()))
}

/// Averages instantaneous SINR realizations with random occupancy and
/// fading, keeping the serving GBS fixed.
///
/// Per sample and per GBS in index order the generator draws the fading
/// power (when enabled) and then, for interferers, the occupancy.
pub fn mc_expected_sinr(
    gains_amp: &[f64],
    loads: &[f64],
    params: &ChannelParams,
    serving: usize,
    cfg: &MonteCarloConfig,
) -> Result<McEstimate, EvalError> {
    check(gains_amp, loads, serving)?;
    if cfg.n_samples == 0 {
        return Err(EvalError::ZeroSamples);
    }
    let p = params.tx_power_mw();
    let noise = params.noise_power_mw();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for n in 1..=cfg.n_samples {
        let mut signal = 0.0;
        let mut interference = 0.0;
        for (m, (&h, &l)) in gains_amp.iter().zip(loads).enumerate() {
            let fade: f64 = match cfg.fading {
                FadingModel::RayleighUnitPower => Exp1.sample(&mut rng),
                FadingModel::None => 1.0,
            };
            let rx = p * h * h * fade;
            if m == serving {
                signal = rx;
            } else if rng.random_bool(l) {
                interference += rx;
            }
        }
        let x = signal / (interference + noise);
        let delta = x - mean;
        mean += delta / n as f64;
        m2 += delta * (x - mean);
    }
    let n = cfg.n_samples as f64;
    let var = if cfg.n_samples > 1 {
        m2 / (n - 1.0)
    } else {
        0.0
    };
    Ok(McEstimate {
        estimate: mean,
        std_error: (var / n).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::db_to_linear;

    fn params() -> ChannelParams {
        ChannelParams::reference()
    }

    fn cfg(n: usize, fading: FadingModel) -> MonteCarloConfig {
        MonteCarloConfig {
            n_samples: n,
            fading,
            seed: 11,
        }
    }

    #[test]
    fn single_gbs_without_fading_is_snr() {
        let h = db_to_linear(-40.0).sqrt();
        let est =
            mc_expected_sinr(&[h], &[0.5], &params(), 0, &cfg(100, FadingModel::None)).unwrap();
        let p = params();
        let snr = p.tx_power_mw() * h * h / p.noise_power_mw();
        assert_eq!(est.estimate, snr);
        assert_eq!(est.std_error, 0.0);
    }

    #[test]
    fn deterministic_loads_match_closed_form() {
        let g = [1e-3, 4e-4, 2e-4];
        for loads in [[0.0, 0.0, 0.0], [1.0, 1.0, 0.0], [0.0, 1.0, 1.0]] {
            let mc =
                mc_expected_sinr(&g, &loads, &params(), 0, &cfg(50, FadingModel::None)).unwrap();
            let cf = expected_sinr(&g, &loads, &params(), 0).unwrap();
            assert!((mc.estimate - cf).abs() <= 1e-12 * cf, "{loads:?}");
            assert!(mc.std_error <= 1e-12 * cf);
        }
    }

    #[test]
    fn fading_power_has_unit_mean() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 200_000;
        let xs: Vec<f64> = (0..n).map(|_| Exp1.sample(&mut rng)).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        assert!((mean - 1.0).abs() < 3.0 * (var / n as f64).sqrt());
    }

    #[test]
    fn zero_samples_rejected() {
        assert!(matches!(
            mc_expected_sinr(&[1.0], &[0.0], &params(), 0, &cfg(0, FadingModel::None)),
            Err(EvalError::ZeroSamples)
        ));
        assert!(
            mc_expected_sinr(&[1.0], &[0.0], &params(), 1, &cfg(1, FadingModel::None)).is_err()
        );
    }

    #[test]
    fn reproducible_for_seed() {
        let g = [1e-4, 1e-4];
        let c = cfg(1000, FadingModel::RayleighUnitPower);
        let a = mc_expected_sinr(&g, &[0.3, 0.6], &params(), 0, &c).unwrap();
        let b = mc_expected_sinr(&g, &[0.3, 0.6], &params(), 0, &c).unwrap();
        assert_eq!(a, b);
    }
}
