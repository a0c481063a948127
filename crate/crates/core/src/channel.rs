//! Rayleigh fading realizations, AWGN, and SNR bookkeeping.
//!
//! All randomness is counter-based: a [`RngStream`] is a pure function of
//! `(master_seed, stream_id)`, so trial `t` reproduces bit-identically for
//! any worker count or execution order. Noise variance is normalized to
//! `sigma_n^2 = 1`; all power enters through the average SNR `gamma_rd`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChannelError {
    #[error("gamma_rd must be positive and finite, got {0}")]
    InvalidGamma(f64),
    #[error("n_relays must be >= 1")]
    InvalidRelayCount,
    #[error("relay index {index} out of range for {n_relays} relays")]
    RelayIndexOutOfRange { index: usize, n_relays: usize },
    #[error("noise variance must be positive, got {0}")]
    InvalidVariance(f64),
}

/// Average-SNR configuration for the relay -> user broadcast phase.
///
/// `gamma_rd` is the linear average SNR `p_r / sigma_n^2`, identical on all
/// N x 2 links. The noise variance is fixed to 1, so `gamma_rd` carries all
/// power scaling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnrConfig {
    gamma_rd: f64,
    n_relays: usize,
    noise_variance: f64,
}

impl SnrConfig {
    pub fn new(gamma_rd: f64, n_relays: usize) -> Result<Self, ChannelError> {
        if !(gamma_rd > 0.0 && gamma_rd.is_finite()) {
            return Err(ChannelError::InvalidGamma(gamma_rd));
        }
        if n_relays == 0 {
            return Err(ChannelError::InvalidRelayCount);
        }
        Ok(SnrConfig {
            gamma_rd,
            n_relays,
            noise_variance: 1.0,
        })
    }

    /// Builds a config from an SNR in dB: `gamma_rd = 10^(snr_db/10)`.
    pub fn from_snr_db(snr_db: f64, n_relays: usize) -> Result<Self, ChannelError> {
        Self::new(10f64.powf(snr_db / 10.0), n_relays)
    }

    pub fn gamma_rd(&self) -> f64 {
        self.gamma_rd
    }

    pub fn snr_db(&self) -> f64 {
        10.0 * self.gamma_rd.log10()
    }

    pub fn n_relays(&self) -> usize {
        self.n_relays
    }

    pub fn noise_variance(&self) -> f64 {
        self.noise_variance
    }

    /// Total relay transmit power `p_r = gamma_rd * sigma_n^2`.
    pub fn total_relay_power(&self) -> f64 {
        self.gamma_rd * self.noise_variance
    }
}

/// Counter-based RNG stream identity.
///
/// Identical `(master_seed, stream_id)` pairs reproduce identical draws;
/// distinct stream ids give statistically independent streams. The Monte
/// Carlo engine uses `stream_id = trial index`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngStream {
    pub master_seed: u64,
    pub stream_id: u64,
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl RngStream {
    pub fn new(master_seed: u64, stream_id: u64) -> Self {
        RngStream {
            master_seed,
            stream_id,
        }
    }

    /// Derives the stream's generator. The 256-bit ChaCha key comes from a
    /// splitmix64 chain over `(master_seed, stream_id)`, so nearby stream ids
    /// land on unrelated keys.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut state = self
            .master_seed
            .wrapping_add(self.stream_id.wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let mut key = [0u8; 32];
        for chunk in key.chunks_exact_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
        }
        ChaCha8Rng::from_seed(key)
    }
}

/// One coherence interval of the N x 2 downlink channel: complex gains
/// `h[relay][user]` and their squared magnitudes.
///
/// Gains are i.i.d. circularly symmetric complex Gaussian, zero mean, unit
/// variance, so each `|h|^2` is exponential with unit mean. The channel is
/// block-static over an Alamouti two-symbol interval and i.i.d. across
/// trials.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    n_relays: usize,
    gains: Vec<Complex64>,
    power_gains: Vec<f64>,
}

impl ChannelRealization {
    /// Builds a realization from explicit gains (row-major `[relay][user]`,
    /// two users per relay). Power gains are derived.
    pub fn from_gains(gains: Vec<Complex64>) -> Result<Self, ChannelError> {
        if gains.is_empty() || gains.len() % 2 != 0 {
            return Err(ChannelError::InvalidRelayCount);
        }
        let power_gains = gains.iter().map(|h| h.norm_sqr()).collect();
        Ok(ChannelRealization {
            n_relays: gains.len() / 2,
            gains,
            power_gains,
        })
    }

    /// Test/oracle helper: a realization specified by power gains only, with
    /// real nonnegative amplitudes.
    pub fn from_power_gains(power_gains: &[[f64; 2]]) -> Result<Self, ChannelError> {
        let gains = power_gains
            .iter()
            .flat_map(|row| row.iter().map(|&p| Complex64::new(p.sqrt(), 0.0)))
            .collect();
        Self::from_gains(gains)
    }

    pub fn n_relays(&self) -> usize {
        self.n_relays
    }

    pub fn gain(&self, relay: usize, user: usize) -> Complex64 {
        debug_assert!(user < 2);
        self.gains[relay * 2 + user]
    }

    pub fn power_gain(&self, relay: usize, user: usize) -> f64 {
        debug_assert!(user < 2);
        self.power_gains[relay * 2 + user]
    }

    /// `min(|h_{i,u1}|^2, |h_{i,u2}|^2)` for relay `i`.
    pub fn min_power_gain(&self, relay: usize) -> f64 {
        self.power_gain(relay, 0).min(self.power_gain(relay, 1))
    }
}

/// Draws one N x 2 fading realization. Each gain's real and imaginary parts
/// are independent Normal(0, 1/2), so `E[|h|^2] = 1`.
pub fn draw_realization(cfg: &SnrConfig, stream: RngStream) -> ChannelRealization {
    draw_realization_with(&mut stream.rng(), cfg.n_relays())
}

/// Same draw from an already-positioned generator; the Monte Carlo engine
/// uses this so channel, bits, and noise share one per-trial stream.
pub fn draw_realization_with<R: Rng>(rng: &mut R, n_relays: usize) -> ChannelRealization {
    let gains = (0..n_relays * 2)
        .map(|_| draw_complex_gaussian(rng, 1.0))
        .collect();
    ChannelRealization::from_gains(gains).expect("positive relay count implies valid dims")
}

/// Draws `count` i.i.d. complex Gaussian noise samples with total variance
/// `variance` (i.e. `variance/2` per quadrature component).
pub fn draw_noise(
    variance: f64,
    count: usize,
    stream: RngStream,
) -> Result<Vec<Complex64>, ChannelError> {
    if !(variance > 0.0 && variance.is_finite()) {
        return Err(ChannelError::InvalidVariance(variance));
    }
    let mut rng = stream.rng();
    Ok((0..count)
        .map(|_| draw_complex_gaussian(&mut rng, variance))
        .collect())
}

/// Samples CN(0, variance) from an existing generator.
pub fn draw_complex_gaussian<R: Rng>(rng: &mut R, variance: f64) -> Complex64 {
    let s = (variance / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(s * re, s * im)
}

/// Instantaneous minimum link SNR of relay `i` toward the two users,
/// `gamma_rd * min(|h_{i,u1}|^2, |h_{i,u2}|^2)`.
pub fn min_link_snr(
    real: &ChannelRealization,
    cfg: &SnrConfig,
    relay: usize,
) -> Result<f64, ChannelError> {
    if relay >= real.n_relays() {
        return Err(ChannelError::RelayIndexOutOfRange {
            index: relay,
            n_relays: real.n_relays(),
        });
    }
    Ok(cfg.gamma_rd() * real.min_power_gain(relay))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::ks_statistic;

    #[test]
    fn snr_db_round_trip_12_digits() {
        for db in [-10.0, 0.0, 3.0, 10.0, 17.5, 30.0, 40.0] {
            let cfg = SnrConfig::from_snr_db(db, 2).unwrap();
            assert!(
                (cfg.snr_db() - db).abs() <= 1e-12 * db.abs().max(1.0),
                "db={db} -> {}",
                cfg.snr_db()
            );
        }
    }

    #[test]
    fn invalid_configs_rejected() {
        assert!(SnrConfig::new(0.0, 2).is_err());
        assert!(SnrConfig::new(-1.0, 2).is_err());
        assert!(SnrConfig::new(f64::NAN, 2).is_err());
        assert!(SnrConfig::new(1.0, 0).is_err());
    }

    #[test]
    fn realization_deterministic_for_fixed_stream() {
        let cfg = SnrConfig::new(10.0, 4).unwrap();
        let s = RngStream::new(42, 7);
        assert_eq!(draw_realization(&cfg, s), draw_realization(&cfg, s));
        let other = draw_realization(&cfg, RngStream::new(42, 8));
        assert_ne!(draw_realization(&cfg, s), other);
    }

    #[test]
    fn noise_deterministic_and_variance_checks() {
        let s = RngStream::new(1, 2);
        let a = draw_noise(1.0, 1000, s).unwrap();
        let b = draw_noise(1.0, 1000, s).unwrap();
        assert_eq!(a, b);
        assert!(draw_noise(0.0, 10, s).is_err());

        let big = draw_noise(1.0, 1_000_000, RngStream::new(3, 0)).unwrap();
        let var = big.iter().map(|z| z.norm_sqr()).sum::<f64>() / big.len() as f64;
        assert!((var - 1.0).abs() < 0.01, "sample variance {var}");
        let mean = big.iter().sum::<Complex64>() / big.len() as f64;
        assert!(mean.norm() < 0.005);
    }

    #[test]
    fn unit_mean_power_gain() {
        let cfg = SnrConfig::new(1.0, 8).unwrap();
        let mut acc = 0.0;
        let mut count = 0usize;
        for t in 0..62_500u64 {
            let r = draw_realization(&cfg, RngStream::new(9, t));
            for i in 0..8 {
                acc += r.power_gain(i, 0) + r.power_gain(i, 1);
                count += 2;
            }
        }
        let mean = acc / count as f64;
        assert!((mean - 1.0).abs() < 0.005, "mean |h|^2 = {mean}");
    }

    #[test]
    fn power_gain_exponential_ks() {
        let cfg = SnrConfig::new(1.0, 2).unwrap();
        let mut samples = Vec::with_capacity(1_000_000);
        for t in 0..250_000u64 {
            let r = draw_realization(&cfg, RngStream::new(11, t));
            for i in 0..2 {
                samples.push(r.power_gain(i, 0));
                samples.push(r.power_gain(i, 1));
            }
        }
        let d = ks_statistic(&samples, |x| -(-x).exp_m1());
        assert!(d < 0.002, "KS={d}");
    }

    #[test]
    fn min_link_snr_examples() {
        let real = ChannelRealization::from_power_gains(&[[0.4, 0.9]]).unwrap();
        let cfg = SnrConfig::new(10.0, 1).unwrap();
        assert!((min_link_snr(&real, &cfg, 0).unwrap() - 4.0).abs() < 1e-15);

        let sym = ChannelRealization::from_power_gains(&[[0.37, 0.37]]).unwrap();
        assert!((min_link_snr(&sym, &cfg, 0).unwrap() - 3.7).abs() < 1e-15);

        assert!(min_link_snr(&real, &cfg, 1).is_err());
    }

    #[test]
    fn min_link_snr_distribution_ks() {
        // gamma_i_min ~ Exp(rate 2/gamma_rd)
        let gamma = 5.0;
        let cfg = SnrConfig::new(gamma, 3).unwrap();
        let mut samples = Vec::with_capacity(600_000);
        for t in 0..200_000u64 {
            let r = draw_realization(&cfg, RngStream::new(13, t));
            for i in 0..3 {
                samples.push(min_link_snr(&r, &cfg, i).unwrap());
            }
        }
        let d = ks_statistic(&samples, |x| -(-2.0 * x / gamma).exp_m1());
        assert!(d < 0.002, "KS={d}");
    }

    #[test]
    fn streams_differ_by_master_seed() {
        let cfg = SnrConfig::new(1.0, 1).unwrap();
        let a = draw_realization(&cfg, RngStream::new(1, 0));
        let b = draw_realization(&cfg, RngStream::new(2, 0));
        assert_ne!(a, b);
    }
}
