//! Reproducible Monte Carlo trial engine and SNR-sweep driver.
//!
//! Trial `t` draws everything it needs from the counter-based stream
//! `(master_seed, t)`, so estimates are bit-identical for any worker count.
//! Aggregation uses fixed-size chunks combined with pairwise summation in
//! chunk order, keeping floating-point drift independent of scheduling.
//!
//! Two fidelities: `BitLevel` runs the full baseband chain (modulation,
//! fading, AWGN, combining, demodulation, XOR recovery) and counts bit
//! errors; `SemiAnalytic` averages the conditional error probabilities
//! `Q(sqrt(2 gamma_eff))` over channel draws, which reaches deep BER levels
//! at desk scale.

use crate::analytic::{self, AnalyticError, AnalyticResult};
use crate::channel::{
    draw_complex_gaussian, draw_realization_with, ChannelRealization, RngStream, SnrConfig,
};
use crate::numerics::{ber_bpsk, pairwise_sum};
use crate::phy::{
    alamouti_transmit_combine, bpsk_demod, bpsk_mod, nc_decode, nc_encode, NcBit, StbcBlock,
};
use crate::selection::{
    select_double_max, select_double_max_no_nc, select_min_max, select_optimal_dual,
    select_optimal_single, select_optimal_subset, SelectionDecision, StrategyKind,
    MAX_SUBSET_RELAYS,
};
use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MonteCarloError {
    #[error("trials must be >= 1")]
    NoTrials,
    #[error("{scheme} is limited to {max} relays, got {n}")]
    SchemeRelayLimit {
        scheme: StrategyKind,
        n: usize,
        max: usize,
    },
}

/// Simulation fidelity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fidelity {
    BitLevel,
    SemiAnalytic,
}

impl Fidelity {
    pub fn name(&self) -> &'static str {
        match self {
            Fidelity::BitLevel => "bit",
            Fidelity::SemiAnalytic => "semi",
        }
    }
}

impl std::str::FromStr for Fidelity {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "bit" | "bit-level" | "bit_level" => Ok(Fidelity::BitLevel),
            "semi" | "semi-analytic" | "semi_analytic" => Ok(Fidelity::SemiAnalytic),
            other => Err(format!("unknown fidelity '{other}'")),
        }
    }
}

/// Which per-trial scalar the estimator averages.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Statistic {
    /// The two-user average sum BER, `(P1 + P2) / 2` (the reported metric).
    #[default]
    TwoUserAverage,
    /// The worst-user bound `max(P1, P2) / 2` behind the S-RS-NC closed form.
    WorstUserHalf,
}

/// One Monte Carlo point definition.
#[derive(Debug, Clone)]
pub struct TrialConfig {
    pub scheme: StrategyKind,
    pub snr: SnrConfig,
    pub trials: u64,
    pub fidelity: Fidelity,
    pub master_seed: u64,
    /// Bit-level early-stop floor: stop at the first chunk boundary where
    /// the total bit-error count reaches this. 0 = run all trials (default;
    /// keeps estimates deterministic in the trial count too).
    pub min_errors: u64,
    pub statistic: Statistic,
}

impl TrialConfig {
    pub fn new(scheme: StrategyKind, snr: SnrConfig, trials: u64, master_seed: u64) -> Self {
        TrialConfig {
            scheme,
            snr,
            trials,
            fidelity: Fidelity::SemiAnalytic,
            master_seed,
            min_errors: 0,
            statistic: Statistic::TwoUserAverage,
        }
    }

    pub fn with_fidelity(mut self, fidelity: Fidelity) -> Self {
        self.fidelity = fidelity;
        self
    }

    pub fn validate(&self) -> Result<(), MonteCarloError> {
        if self.trials == 0 {
            return Err(MonteCarloError::NoTrials);
        }
        if self.scheme == StrategyKind::OptimalSubset && self.snr.n_relays() > MAX_SUBSET_RELAYS {
            return Err(MonteCarloError::SchemeRelayLimit {
                scheme: self.scheme,
                n: self.snr.n_relays(),
                max: MAX_SUBSET_RELAYS,
            });
        }
        Ok(())
    }
}

/// Per-trial error statistic: per-user error mass (a count in bit-level
/// mode, a sum of conditional error probabilities in semi-analytic mode)
/// over `bits_per_user` information bits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialStat {
    pub errors: [f64; 2],
    pub bits_per_user: u32,
}

impl TrialStat {
    /// The scalar the estimator averages for this trial.
    pub fn statistic(&self, kind: Statistic) -> f64 {
        let b = self.bits_per_user as f64;
        match kind {
            Statistic::TwoUserAverage => 0.5 * (self.errors[0] + self.errors[1]) / b,
            Statistic::WorstUserHalf => 0.5 * self.errors[0].max(self.errors[1]) / b,
        }
    }
}

/// Aggregated Monte Carlo estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct BerEstimate {
    pub trials: u64,
    pub bits_per_user: u64,
    pub errors_user1: f64,
    pub errors_user2: f64,
    /// Mean of the per-trial statistic (two-user average sum BER by
    /// default).
    pub ber: f64,
    /// Sample standard deviation of the per-trial statistic over
    /// sqrt(trials).
    pub stderr: f64,
}

impl BerEstimate {
    /// Per-user BER diagnostic.
    pub fn ber_user(&self, user: usize) -> f64 {
        let e = if user == 0 {
            self.errors_user1
        } else {
            self.errors_user2
        };
        e / self.bits_per_user as f64
    }
}

fn select(cfg: &TrialConfig, real: &ChannelRealization) -> SelectionDecision {
    match cfg.scheme {
        StrategyKind::MinMaxSingle => select_min_max(real),
        StrategyKind::OptimalSingle => select_optimal_single(real, &cfg.snr),
        StrategyKind::DoubleMax => select_double_max(real),
        StrategyKind::OptimalDual => select_optimal_dual(real, &cfg.snr),
        StrategyKind::OptimalSubset => {
            select_optimal_subset(real, &cfg.snr).expect("validated relay count")
        }
        StrategyKind::AllRelaysNc => SelectionDecision {
            relays: (0..real.n_relays()).collect(),
            power_shares: vec![1.0 / real.n_relays() as f64; real.n_relays()],
            scheme: StrategyKind::AllRelaysNc,
        },
        StrategyKind::DoubleMaxNoNc => select_double_max_no_nc(real),
    }
}

/// Effective per-user SNRs for a resolved decision (unit noise variance).
pub fn effective_snrs(
    scheme: StrategyKind,
    decision: &SelectionDecision,
    real: &ChannelRealization,
    cfg: &SnrConfig,
) -> [f64; 2] {
    let g = cfg.gamma_rd();
    match scheme {
        StrategyKind::MinMaxSingle | StrategyKind::OptimalSingle => {
            let r = decision.relays[0];
            [g * real.power_gain(r, 0), g * real.power_gain(r, 1)]
        }
        StrategyKind::DoubleMax | StrategyKind::OptimalDual => {
            if decision.relays.len() == 1 {
                let r = decision.relays[0];
                [g * real.power_gain(r, 0), g * real.power_gain(r, 1)]
            } else {
                let (a, b) = (decision.relays[0], decision.relays[1]);
                [
                    0.5 * g * (real.power_gain(a, 0) + real.power_gain(b, 0)),
                    0.5 * g * (real.power_gain(a, 1) + real.power_gain(b, 1)),
                ]
            }
        }
        StrategyKind::OptimalSubset | StrategyKind::AllRelaysNc => {
            let m = decision.relays.len() as f64;
            let mut sums = [0.0f64; 2];
            for &r in &decision.relays {
                sums[0] += real.power_gain(r, 0);
                sums[1] += real.power_gain(r, 1);
            }
            [g / m * sums[0], g / m * sums[1]]
        }
        StrategyKind::DoubleMaxNoNc => {
            // relays[j] serves user j; a singleton serves both at half power
            let r0 = decision.relays[0];
            let r1 = *decision.relays.last().unwrap();
            [
                0.5 * g * real.power_gain(r0, 0),
                0.5 * g * real.power_gain(r1, 1),
            ]
        }
    }
}

fn random_bit<R: Rng>(rng: &mut R) -> NcBit {
    NcBit::from_bool(rng.random())
}

/// Full baseband chain for one trial. Relays are error-free (they hold the
/// true XOR bit); only the relay -> user phase is simulated.
fn bit_level_stat<R: Rng>(
    cfg: &TrialConfig,
    decision: &SelectionDecision,
    real: &ChannelRealization,
    rng: &mut R,
) -> TrialStat {
    let p = cfg.snr.total_relay_power();
    let mut errors = [0.0f64; 2];
    match cfg.scheme {
        StrategyKind::DoubleMax | StrategyKind::OptimalDual => {
            // one Alamouti block: two NC bits through two symbol slots
            let user_bits: [[NcBit; 2]; 2] = [
                [random_bit(rng), random_bit(rng)],
                [random_bit(rng), random_bit(rng)],
            ];
            let br = [
                nc_encode(user_bits[0][0], user_bits[1][0]),
                nc_encode(user_bits[0][1], user_bits[1][1]),
            ];
            let symbols = [
                Complex64::new(bpsk_mod(br[0]), 0.0),
                Complex64::new(bpsk_mod(br[1]), 0.0),
            ];
            if decision.relays.len() == 2 {
                let block = StbcBlock::encode(symbols[0], symbols[1], (0.5 * p, 0.5 * p));
                for user in 0..2 {
                    let h1 = real.gain(decision.relays[0], user);
                    let h2 = real.gain(decision.relays[1], user);
                    let noise = [
                        draw_complex_gaussian(rng, 1.0),
                        draw_complex_gaussian(rng, 1.0),
                    ];
                    let out = alamouti_transmit_combine(&block, h1, h2, noise);
                    for k in 0..2 {
                        let br_hat = bpsk_demod(out.statistics[k]);
                        let other_hat = nc_decode(br_hat, user_bits[user][k]);
                        if other_hat != user_bits[1 - user][k] {
                            errors[user] += 1.0;
                        }
                    }
                }
            } else {
                // coincident winners: the single relay repeats both symbols
                // plainly at full power
                let r = decision.relays[0];
                let amp = p.sqrt();
                for user in 0..2 {
                    let h = real.gain(r, user);
                    for k in 0..2 {
                        let y = amp * h * symbols[k] + draw_complex_gaussian(rng, 1.0);
                        let br_hat = bpsk_demod(h.conj() * y);
                        let other_hat = nc_decode(br_hat, user_bits[user][k]);
                        if other_hat != user_bits[1 - user][k] {
                            errors[user] += 1.0;
                        }
                    }
                }
            }
            TrialStat {
                errors,
                bits_per_user: 2,
            }
        }
        StrategyKind::DoubleMaxNoNc => {
            // relays[j] forwards the other user's bit to user j, half power,
            // orthogonal channels, no XOR
            let bits = [random_bit(rng), random_bit(rng)];
            let amp = (0.5 * p).sqrt();
            let r_serving = [decision.relays[0], *decision.relays.last().unwrap()];
            for user in 0..2 {
                let other = bits[1 - user];
                let h = real.gain(r_serving[user], user);
                let s = Complex64::new(bpsk_mod(other), 0.0);
                let y = amp * h * s + draw_complex_gaussian(rng, 1.0);
                if bpsk_demod(h.conj() * y) != other {
                    errors[user] += 1.0;
                }
            }
            TrialStat {
                errors,
                bits_per_user: 1,
            }
        }
        _ => {
            // single relay at full power, or orthogonal branches with MRC at
            // p/m each (NC-No-RS, optimal subset)
            let bits = [random_bit(rng), random_bit(rng)];
            let br = nc_encode(bits[0], bits[1]);
            let s = Complex64::new(bpsk_mod(br), 0.0);
            let amp = (p / decision.relays.len() as f64).sqrt();
            for user in 0..2 {
                let mut combined = Complex64::new(0.0, 0.0);
                for &r in &decision.relays {
                    let h = real.gain(r, user);
                    let y = amp * h * s + draw_complex_gaussian(rng, 1.0);
                    combined += h.conj() * y;
                }
                let br_hat = bpsk_demod(combined);
                let other_hat = nc_decode(br_hat, bits[user]);
                if other_hat != bits[1 - user] {
                    errors[user] += 1.0;
                }
            }
            TrialStat {
                errors,
                bits_per_user: 1,
            }
        }
    }
}

/// Runs trial `trial_index`: draws the realization from stream
/// `(master_seed, trial_index)`, applies the scheme's selection, and either
/// simulates the baseband chain or returns the conditional error
/// probabilities.
pub fn run_trial(cfg: &TrialConfig, trial_index: u64) -> TrialStat {
    let mut rng = RngStream::new(cfg.master_seed, trial_index).rng();
    let real = draw_realization_with(&mut rng, cfg.snr.n_relays());
    let decision = select(cfg, &real);
    match cfg.fidelity {
        Fidelity::SemiAnalytic => {
            let snrs = effective_snrs(cfg.scheme, &decision, &real, &cfg.snr);
            TrialStat {
                errors: [ber_bpsk(snrs[0]), ber_bpsk(snrs[1])],
                bits_per_user: 1,
            }
        }
        Fidelity::BitLevel => bit_level_stat(cfg, &decision, &real, &mut rng),
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct ChunkStat {
    sum_t: f64,
    sum_t2: f64,
    sum_u1: f64,
    sum_u2: f64,
    trials: u64,
    bits: u64,
}

const CHUNK: u64 = 4096;

fn run_chunk(cfg: &TrialConfig, chunk: u64) -> ChunkStat {
    let start = chunk * CHUNK;
    let end = cfg.trials.min(start + CHUNK);
    let n = (end - start) as usize;
    let mut t = Vec::with_capacity(n);
    let mut t2 = Vec::with_capacity(n);
    let mut u1 = Vec::with_capacity(n);
    let mut u2 = Vec::with_capacity(n);
    let mut bits = 0u64;
    for idx in start..end {
        let stat = run_trial(cfg, idx);
        let s = stat.statistic(cfg.statistic);
        t.push(s);
        t2.push(s * s);
        u1.push(stat.errors[0]);
        u2.push(stat.errors[1]);
        bits += stat.bits_per_user as u64;
    }
    ChunkStat {
        sum_t: pairwise_sum(&t),
        sum_t2: pairwise_sum(&t2),
        sum_u1: pairwise_sum(&u1),
        sum_u2: pairwise_sum(&u2),
        trials: end - start,
        bits,
    }
}

fn combine(chunks: &[ChunkStat]) -> BerEstimate {
    let field = |f: fn(&ChunkStat) -> f64| -> f64 {
        pairwise_sum(&chunks.iter().map(f).collect::<Vec<_>>())
    };
    let trials: u64 = chunks.iter().map(|c| c.trials).sum();
    let bits: u64 = chunks.iter().map(|c| c.bits).sum();
    let sum_t = field(|c| c.sum_t);
    let sum_t2 = field(|c| c.sum_t2);
    let n = trials as f64;
    let mean = sum_t / n;
    let stderr = if trials > 1 {
        let var = ((sum_t2 - n * mean * mean) / (n - 1.0)).max(0.0);
        (var / n).sqrt()
    } else {
        0.0
    };
    BerEstimate {
        trials,
        bits_per_user: bits,
        errors_user1: field(|c| c.sum_u1),
        errors_user2: field(|c| c.sum_u2),
        ber: mean,
        stderr,
    }
}

/// Estimates the scheme's BER over `cfg.trials` independent realizations.
/// Deterministic for a fixed `master_seed` regardless of parallelism.
///
/// # Panics
///
/// Panics if `cfg.validate()` fails (documented precondition).
pub fn estimate_ber(cfg: &TrialConfig) -> BerEstimate {
    cfg.validate().expect("invalid TrialConfig");
    let n_chunks = cfg.trials.div_ceil(CHUNK);
    let early_stop = cfg.min_errors > 0 && cfg.fidelity == Fidelity::BitLevel;
    let chunks: Vec<ChunkStat> = if early_stop {
        // sequential chunk order so the stopping point is scheduling-free;
        // the recorded estimator keeps its (errors/bits) stopping bias
        let mut acc = Vec::new();
        let mut errors = 0.0;
        for c in 0..n_chunks {
            let s = run_chunk(cfg, c);
            errors += s.sum_u1 + s.sum_u2;
            acc.push(s);
            if errors >= cfg.min_errors as f64 {
                break;
            }
        }
        acc
    } else {
        (0..n_chunks)
            .into_par_iter()
            .map(|c| run_chunk(cfg, c))
            .collect()
    };
    combine(&chunks)
}

/// An SNR-grid experiment over one relay count and a set of schemes.
#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub schemes: Vec<StrategyKind>,
    pub n_relays: usize,
    pub snr_db: Vec<f64>,
    pub trials: u64,
    pub fidelity: Fidelity,
    pub master_seed: u64,
    pub min_errors: u64,
}

/// One output row: simulated estimate plus the matching exact/asymptotic
/// closed forms where the scheme has them. `None` fields serialize as empty
/// CSV cells (the row-level failure/absence marker).
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub scheme: String,
    pub n_relays: usize,
    pub snr_db: f64,
    pub gamma_rd: f64,
    pub trials: u64,
    pub fidelity: Fidelity,
    pub ber_sim: Option<f64>,
    pub stderr: Option<f64>,
    pub ber_exact: Option<f64>,
    pub ber_asymptotic: Option<f64>,
    pub eval_method: Option<&'static str>,
    pub seed: u64,
}

/// CSV schema version written to every row.
pub const CSV_SCHEMA_VERSION: &str = "1";

impl SweepRow {
    pub const CSV_HEADER: &'static str = "schema_version,scheme,n_relays,snr_db,gamma_rd,trials,\
                                          fidelity,ber_sim,stderr,ber_exact,ber_asymptotic,\
                                          eval_method,seed";

    pub fn to_csv_line(&self) -> String {
        fn opt(v: Option<f64>) -> String {
            v.map(|x| format!("{x:e}")).unwrap_or_default()
        }
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            CSV_SCHEMA_VERSION,
            self.scheme,
            self.n_relays,
            self.snr_db,
            self.gamma_rd,
            self.trials,
            self.fidelity.name(),
            opt(self.ber_sim),
            opt(self.stderr),
            opt(self.ber_exact),
            opt(self.ber_asymptotic),
            self.eval_method.unwrap_or(""),
            self.seed,
        )
    }
}

/// Exact closed form matching a scheme, where one exists.
pub fn scheme_exact(
    scheme: StrategyKind,
    n: u32,
    gamma_rd: f64,
) -> Option<Result<AnalyticResult, AnalyticError>> {
    match scheme {
        StrategyKind::MinMaxSingle => Some(analytic::ber_s_rs_nc_exact(n, gamma_rd)),
        StrategyKind::DoubleMax => Some(analytic::ber_d_rs_nc_exact(n, gamma_rd)),
        StrategyKind::AllRelaysNc => Some(analytic::ber_nc_no_rs_exact(n, gamma_rd)),
        StrategyKind::DoubleMaxNoNc => Some(analytic::ber_rs_no_nc_exact(n, gamma_rd)),
        _ => None,
    }
}

/// Asymptotic leading term matching a scheme, where one exists.
pub fn scheme_asymptotic(scheme: StrategyKind, n: u32, gamma_rd: f64) -> Option<f64> {
    match scheme {
        StrategyKind::MinMaxSingle => Some(analytic::ber_s_rs_nc_asymptotic(n, gamma_rd)),
        StrategyKind::DoubleMax => Some(analytic::ber_d_rs_nc_asymptotic(n, gamma_rd)),
        StrategyKind::AllRelaysNc => Some(analytic::ber_nc_no_rs_asymptotic(n, gamma_rd)),
        StrategyKind::DoubleMaxNoNc => Some(analytic::ber_rs_no_nc_asymptotic(n, gamma_rd)),
        _ => None,
    }
}

/// Runs the grid: one row per (scheme, SNR point), scheme-major, in the
/// given SNR order. Per-row failures (invalid scheme/N combination,
/// quadrature non-convergence) leave the affected fields empty instead of
/// aborting the sweep.
pub fn sweep(spec: &SweepSpec) -> Vec<SweepRow> {
    let mut rows = Vec::with_capacity(spec.schemes.len() * spec.snr_db.len());
    for &scheme in &spec.schemes {
        for &db in &spec.snr_db {
            let gamma = 10f64.powf(db / 10.0);
            let cfg = SnrConfig::new(gamma, spec.n_relays);
            let mut row = SweepRow {
                scheme: scheme.name().to_string(),
                n_relays: spec.n_relays,
                snr_db: db,
                gamma_rd: gamma,
                trials: spec.trials,
                fidelity: spec.fidelity,
                ber_sim: None,
                stderr: None,
                ber_exact: None,
                ber_asymptotic: None,
                eval_method: None,
                seed: spec.master_seed,
            };
            if let Ok(snr) = cfg {
                let trial_cfg = TrialConfig {
                    scheme,
                    snr,
                    trials: spec.trials,
                    fidelity: spec.fidelity,
                    master_seed: spec.master_seed,
                    min_errors: spec.min_errors,
                    statistic: Statistic::TwoUserAverage,
                };
                if trial_cfg.validate().is_ok() {
                    let est = estimate_ber(&trial_cfg);
                    row.trials = est.trials;
                    row.ber_sim = Some(est.ber);
                    row.stderr = Some(est.stderr);
                }
                if let Some(Ok(exact)) = scheme_exact(scheme, spec.n_relays as u32, gamma) {
                    row.ber_exact = Some(exact.value);
                    row.eval_method = Some(exact.method.name());
                }
                row.ber_asymptotic = scheme_asymptotic(scheme, spec.n_relays as u32, gamma);
            }
            rows.push(row);
        }
    }
    rows
}
