//! BPSK, XOR network coding, Alamouti STBC, MRC, and per-scheme effective
//! SNRs for the relay -> user broadcast phase.

use crate::channel::{ChannelError, ChannelRealization, SnrConfig};
use num_complex::Complex64;

/// One network-coded bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct NcBit(pub u8);

impl NcBit {
    pub const ZERO: NcBit = NcBit(0);
    pub const ONE: NcBit = NcBit(1);

    pub fn new(value: u8) -> Self {
        debug_assert!(value <= 1);
        NcBit(value & 1)
    }

    pub fn from_bool(b: bool) -> Self {
        NcBit(b as u8)
    }

    pub fn xor(self, other: NcBit) -> NcBit {
        NcBit(self.0 ^ other.0)
    }
}

/// BPSK mapping: 0 -> +1, 1 -> -1.
pub fn bpsk_mod(bit: NcBit) -> f64 {
    1.0 - 2.0 * f64::from(bit.0)
}

/// Thresholds the real part at 0. A statistic of exactly 0 decodes to bit 0
/// (probability-zero tie, fixed for determinism).
pub fn bpsk_demod(sample: Complex64) -> NcBit {
    NcBit::from_bool(sample.re < 0.0)
}

/// Relay-side network coding: `b_r = b_1 XOR b_2`.
pub fn nc_encode(b1: NcBit, b2: NcBit) -> NcBit {
    b1.xor(b2)
}

/// User-side recovery of the other user's bit from the estimated relay bit:
/// `b_other = b_r_hat XOR own`.
pub fn nc_decode(br_hat: NcBit, own: NcBit) -> NcBit {
    br_hat.xor(own)
}

/// One Alamouti block: the 2 x 2 symbol matrix (rows = transmit relays,
/// columns = symbol slots) plus the per-relay power shares.
///
/// With symbols `s1 = s_r(k)`, `s2 = s_r(k+1)` and powers `(p1, p2)`:
///
/// ```text
/// [ sqrt(p1) s1      -sqrt(p2) s2* ]
/// [ sqrt(p2) s2       sqrt(p1) s1* ]
/// ```
///
/// Total transmitted energy per symbol slot is `p1 + p2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StbcBlock {
    pub symbols: [[Complex64; 2]; 2],
    pub power_shares: (f64, f64),
}

impl StbcBlock {
    pub fn encode(s1: Complex64, s2: Complex64, power_shares: (f64, f64)) -> Self {
        let (p1, p2) = power_shares;
        debug_assert!(p1 >= 0.0 && p2 >= 0.0);
        let (a1, a2) = (p1.sqrt(), p2.sqrt());
        StbcBlock {
            symbols: [[a1 * s1, -a2 * s2.conj()], [a2 * s2, a1 * s1.conj()]],
            power_shares,
        }
    }

    /// Energy transmitted in slot `t` across both relays.
    pub fn slot_energy(&self, t: usize) -> f64 {
        self.symbols[0][t].norm_sqr() + self.symbols[1][t].norm_sqr()
    }
}

/// Result of receiving one Alamouti block: per-symbol decision statistics
/// and the per-symbol effective SNRs (unit noise variance convention).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlamoutiCombined {
    pub statistics: [Complex64; 2],
    pub effective_snr: [f64; 2],
}

/// Passes a block through a channel static over both slots and applies the
/// standard Alamouti combiner. The combined statistic for each symbol is
/// free of cross-symbol interference; its sign matches the transmitted
/// symbol when noise is zero.
pub fn alamouti_transmit_combine(
    block: &StbcBlock,
    h1: Complex64,
    h2: Complex64,
    noise: [Complex64; 2],
) -> AlamoutiCombined {
    let r1 = h1 * block.symbols[0][0] + h2 * block.symbols[1][0] + noise[0];
    let r2 = h1 * block.symbols[0][1] + h2 * block.symbols[1][1] + noise[1];
    let s1_hat = h1.conj() * r1 + h2 * r2.conj();
    let s2_hat = h2.conj() * r1 - h1 * r2.conj();
    let branch = h1.norm_sqr() + h2.norm_sqr();
    AlamoutiCombined {
        statistics: [s1_hat, s2_hat],
        effective_snr: [block.power_shares.0 * branch, block.power_shares.1 * branch],
    }
}

/// Effective per-user SNRs when relays `s1` and `s2` transmit the network
/// coded symbol.
///
/// Distinct relays split the power and use Alamouti, giving
/// `gamma_rd/2 * (|h_{s1,uj}|^2 + |h_{s2,uj}|^2)` per user; a repeated index
/// means a single relay at full power, `gamma_rd * |h_{s1,uj}|^2`.
pub fn alamouti_effective_snr(
    real: &ChannelRealization,
    cfg: &SnrConfig,
    s1: usize,
    s2: usize,
) -> Result<(f64, f64), ChannelError> {
    let n = real.n_relays();
    for idx in [s1, s2] {
        if idx >= n {
            return Err(ChannelError::RelayIndexOutOfRange {
                index: idx,
                n_relays: n,
            });
        }
    }
    let g = cfg.gamma_rd();
    if s1 == s2 {
        Ok((g * real.power_gain(s1, 0), g * real.power_gain(s1, 1)))
    } else {
        Ok((
            0.5 * g * (real.power_gain(s1, 0) + real.power_gain(s2, 0)),
            0.5 * g * (real.power_gain(s1, 1) + real.power_gain(s2, 1)),
        ))
    }
}

/// Effective per-user SNRs when all N relays transmit on orthogonal channels
/// at power `p_r/N` and the receiver applies MRC:
/// `gamma_sum,j = gamma_rd/N * sum_i |h_{i,uj}|^2`.
pub fn mrc_effective_snr(real: &ChannelRealization, cfg: &SnrConfig) -> (f64, f64) {
    let n = real.n_relays();
    let scale = cfg.gamma_rd() / n as f64;
    let mut sums = [0.0f64; 2];
    for i in 0..n {
        sums[0] += real.power_gain(i, 0);
        sums[1] += real.power_gain(i, 1);
    }
    (scale * sums[0], scale * sums[1])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{draw_complex_gaussian, RngStream};
    use crate::numerics::ks_statistic;
    use rand::Rng;

    #[test]
    fn bpsk_mapping() {
        assert_eq!(bpsk_mod(NcBit::ZERO), 1.0);
        assert_eq!(bpsk_mod(NcBit::ONE), -1.0);
        assert_eq!(bpsk_demod(Complex64::new(0.3, 0.1)), NcBit::ZERO);
        assert_eq!(bpsk_demod(Complex64::new(-0.3, 0.9)), NcBit::ONE);
        // tie breaks to 0
        assert_eq!(bpsk_demod(Complex64::new(0.0, -1.0)), NcBit::ZERO);
    }

    #[test]
    fn phase_compensated_identity() {
        let mut rng = RngStream::new(5, 0).rng();
        for _ in 0..50 {
            let h = draw_complex_gaussian(&mut rng, 1.0);
            for b in [NcBit::ZERO, NcBit::ONE] {
                let rx = h * bpsk_mod(b) * h.conj();
                assert_eq!(bpsk_demod(rx), b);
            }
        }
    }

    #[test]
    fn nc_round_trip_exhaustive() {
        for b1 in [NcBit::ZERO, NcBit::ONE] {
            for b2 in [NcBit::ZERO, NcBit::ONE] {
                assert_eq!(nc_decode(nc_encode(b1, b2), b1), b2);
                assert_eq!(nc_decode(nc_encode(b1, b2), b2), b1);
            }
        }
        assert_eq!(nc_encode(NcBit::ONE, NcBit::ONE), NcBit::ZERO);
        assert_eq!(nc_encode(NcBit::ZERO, NcBit::ONE), NcBit::ONE);
    }

    #[test]
    fn block_energy_per_slot() {
        let b = StbcBlock::encode(
            Complex64::new(-1.0, 0.0),
            Complex64::new(1.0, 0.0),
            (2.5, 2.5),
        );
        assert!((b.slot_energy(0) - 5.0).abs() < 1e-12);
        assert!((b.slot_energy(1) - 5.0).abs() < 1e-12);
    }

    #[test]
    fn combine_zero_noise_sign_and_orthogonality() {
        let mut rng = RngStream::new(6, 0).rng();
        for _ in 0..200 {
            let h1 = draw_complex_gaussian(&mut rng, 1.0);
            let h2 = draw_complex_gaussian(&mut rng, 1.0);
            let bits: (bool, bool) = (rng.random(), rng.random());
            let s1 = Complex64::new(bpsk_mod(NcBit::from_bool(bits.0)), 0.0);
            let s2 = Complex64::new(bpsk_mod(NcBit::from_bool(bits.1)), 0.0);
            let block = StbcBlock::encode(s1, s2, (0.5, 0.5));
            let out = alamouti_transmit_combine(
                &block,
                h1,
                h2,
                [Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)],
            );
            let branch = h1.norm_sqr() + h2.norm_sqr();
            // combined statistic is exactly sqrt(p_i) * branch * s_i: no
            // cross-symbol term survives
            for (stat, s) in out.statistics.iter().zip([s1, s2]) {
                let expect = 0.5f64.sqrt() * branch * s;
                assert!(
                    (stat - expect).norm() <= 1e-12 * expect.norm(),
                    "interference leak: {stat} vs {expect}"
                );
                assert_eq!(bpsk_demod(*stat), bpsk_demod(expect));
            }
        }
    }

    #[test]
    fn combine_single_branch_effective_snr() {
        // h2 = 0 degenerates to one branch at the shared power
        let h1 = Complex64::new(0.6, -0.8);
        let block = StbcBlock::encode(
            Complex64::new(1.0, 0.0),
            Complex64::new(-1.0, 0.0),
            (5.0, 5.0),
        );
        let out = alamouti_transmit_combine(
            &block,
            h1,
            Complex64::new(0.0, 0.0),
            [Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)],
        );
        assert!((out.effective_snr[0] - 5.0 * h1.norm_sqr()).abs() < 1e-12);
    }

    #[test]
    fn combined_noise_scale_matches_effective_snr() {
        // over random blocks the combiner noise power is (|h1|^2+|h2|^2) *
        // sigma^2, which is exactly the effective-SNR formula's claim
        let mut rng = RngStream::new(7, 1).rng();
        let trials = 100_000;
        let mut ratio_sum = 0.0;
        for _ in 0..trials {
            let h1 = draw_complex_gaussian(&mut rng, 1.0);
            let h2 = draw_complex_gaussian(&mut rng, 1.0);
            let block = StbcBlock::encode(
                Complex64::new(1.0, 0.0),
                Complex64::new(1.0, 0.0),
                (0.5, 0.5),
            );
            let noise = [
                draw_complex_gaussian(&mut rng, 1.0),
                draw_complex_gaussian(&mut rng, 1.0),
            ];
            let noiseless = alamouti_transmit_combine(
                &block,
                h1,
                h2,
                [Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)],
            );
            let noisy = alamouti_transmit_combine(&block, h1, h2, noise);
            let branch = h1.norm_sqr() + h2.norm_sqr();
            let n1 = noisy.statistics[0] - noiseless.statistics[0];
            ratio_sum += n1.norm_sqr() / branch;
        }
        let mean_noise = ratio_sum / trials as f64;
        assert!(
            (mean_noise - 1.0).abs() < 0.01,
            "combined noise scale {mean_noise}"
        );
    }

    #[test]
    fn alamouti_effective_snr_examples() {
        let cfg = SnrConfig::new(10.0, 2).unwrap();
        let unit = ChannelRealization::from_power_gains(&[[1.0, 1.0], [1.0, 1.0]]).unwrap();
        let (g1, g2) = alamouti_effective_snr(&unit, &cfg, 0, 1).unwrap();
        assert!((g1 - 10.0).abs() < 1e-12 && (g2 - 10.0).abs() < 1e-12);

        let r = ChannelRealization::from_power_gains(&[[0.5, 0.25], [0.0, 0.0]]).unwrap();
        let (g1, _) = alamouti_effective_snr(&r, &cfg, 0, 0).unwrap();
        assert!((g1 - 5.0).abs() < 1e-12);

        assert!(alamouti_effective_snr(&r, &cfg, 0, 2).is_err());
    }

    #[test]
    fn alamouti_effective_snr_matches_signal_level() {
        // formula route equals the combiner's reported SNR to 1e-12 relative
        let cfg = SnrConfig::new(8.0, 2).unwrap();
        let mut rng = RngStream::new(8, 2).rng();
        for _ in 0..500 {
            let gains = (0..4)
                .map(|_| draw_complex_gaussian(&mut rng, 1.0))
                .collect();
            let real = ChannelRealization::from_gains(gains).unwrap();
            let (g1, g2) = alamouti_effective_snr(&real, &cfg, 0, 1).unwrap();
            let p = cfg.total_relay_power() / 2.0;
            let block =
                StbcBlock::encode(Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0), (p, p));
            for (user, expect) in [(0, g1), (1, g2)] {
                let out = alamouti_transmit_combine(
                    &block,
                    real.gain(0, user),
                    real.gain(1, user),
                    [Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)],
                );
                assert!(
                    (out.effective_snr[0] / expect - 1.0).abs() < 1e-12,
                    "user {user}: {} vs {expect}",
                    out.effective_snr[0]
                );
            }
        }
    }

    #[test]
    fn mrc_effective_snr_examples() {
        let cfg1 = SnrConfig::new(3.0, 1).unwrap();
        let r1 = ChannelRealization::from_power_gains(&[[0.7, 0.2]]).unwrap();
        let (a, b) = mrc_effective_snr(&r1, &cfg1);
        assert!((a - 2.1).abs() < 1e-12 && (b - 0.6).abs() < 1e-12);

        let cfg4 = SnrConfig::new(8.0, 4).unwrap();
        let ones = ChannelRealization::from_power_gains(&[[1.0; 2]; 4]).unwrap();
        let (a, b) = mrc_effective_snr(&ones, &cfg4);
        assert!((a - 8.0).abs() < 1e-12 && (b - 8.0).abs() < 1e-12);
    }

    #[test]
    fn mrc_snr_gamma_cdf_ks() {
        // gamma_sum CDF is the regularized lower incomplete gamma
        // P(N, N x / gamma_rd)
        let gamma = 4.0;
        let n = 3usize;
        let cfg = SnrConfig::new(gamma, n).unwrap();
        let mut samples = Vec::with_capacity(500_000);
        for t in 0..250_000u64 {
            let r = crate::channel::draw_realization(&cfg, RngStream::new(21, t));
            let (a, b) = mrc_effective_snr(&r, &cfg);
            samples.push(a);
            samples.push(b);
        }
        let d = ks_statistic(&samples, |x| {
            crate::numerics::regularized_lower_gamma(n as f64, n as f64 * x / gamma)
        });
        assert!(d < 0.002, "KS={d}");
    }
}
