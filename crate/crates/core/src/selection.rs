//! Relay selection strategies and the decentralized backoff-timer procedure.
//!
//! The simplified criteria (Min-Max, Double-Max) rank relays by channel power
//! gains alone. The optimal baselines rank candidate transmit sets by the
//! Chernoff surrogate `B(gamma) = exp(-gamma)/2` of the instantaneous sum BER
//! and search exhaustively. All ties break to the lowest relay index, then
//! lexicographically for sets.

use crate::channel::{ChannelRealization, SnrConfig};
use crate::numerics::chernoff_ber_bound;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SelectionError {
    #[error("optimal subset search supports at most {max} relays, got {n}")]
    TooManyRelays { n: usize, max: usize },
}

/// The transmit/combine paths the Monte Carlo engine knows how to drive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StrategyKind {
    /// S-RS-NC: single relay, Min-Max criterion.
    MinMaxSingle,
    /// Single relay minimizing the Chernoff-surrogate sum BER.
    OptimalSingle,
    /// D-RS-NC: one best relay per user, Alamouti when they differ.
    DoubleMax,
    /// Exhaustive search over single relays and Alamouti pairs.
    OptimalDual,
    /// Exhaustive search over all nonempty relay subsets.
    OptimalSubset,
    /// NC-No-RS: all relays transmit orthogonally, MRC receiver.
    AllRelaysNc,
    /// RS-No-NC: per-user best relay, no network coding.
    DoubleMaxNoNc,
}

impl StrategyKind {
    pub const ALL: [StrategyKind; 7] = [
        StrategyKind::MinMaxSingle,
        StrategyKind::OptimalSingle,
        StrategyKind::DoubleMax,
        StrategyKind::OptimalDual,
        StrategyKind::OptimalSubset,
        StrategyKind::AllRelaysNc,
        StrategyKind::DoubleMaxNoNc,
    ];

    /// Canonical scheme name used in CSV output and CLI flags.
    pub fn name(&self) -> &'static str {
        match self {
            StrategyKind::MinMaxSingle => "s-rs-nc",
            StrategyKind::OptimalSingle => "optimal-single",
            StrategyKind::DoubleMax => "d-rs-nc",
            StrategyKind::OptimalDual => "optimal-dual",
            StrategyKind::OptimalSubset => "optimal-subset",
            StrategyKind::AllRelaysNc => "nc-no-rs",
            StrategyKind::DoubleMaxNoNc => "rs-no-nc",
        }
    }
}

impl std::fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for StrategyKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "s-rs-nc" | "min-max" | "min-max-single" => Ok(StrategyKind::MinMaxSingle),
            "optimal-single" => Ok(StrategyKind::OptimalSingle),
            "d-rs-nc" | "double-max" => Ok(StrategyKind::DoubleMax),
            "optimal-dual" => Ok(StrategyKind::OptimalDual),
            "optimal-subset" => Ok(StrategyKind::OptimalSubset),
            "nc-no-rs" | "all-relays-nc" => Ok(StrategyKind::AllRelaysNc),
            "rs-no-nc" | "double-max-no-nc" => Ok(StrategyKind::DoubleMaxNoNc),
            other => Err(format!("unknown scheme '{other}'")),
        }
    }
}

/// A resolved transmit decision for one realization: the relays that will
/// transmit and each one's share of the total relay power.
///
/// Ordering matters for the two-relay schemes: `relays[j]` is the relay
/// serving user `j+1` (the Alamouti role for D-RS-NC, the forwarding relay
/// for RS-No-NC).
#[derive(Debug, Clone, PartialEq)]
pub struct SelectionDecision {
    pub relays: Vec<usize>,
    pub power_shares: Vec<f64>,
    pub scheme: StrategyKind,
}

impl SelectionDecision {
    fn single(relay: usize, scheme: StrategyKind) -> Self {
        SelectionDecision {
            relays: vec![relay],
            power_shares: vec![1.0],
            scheme,
        }
    }

    fn pair(r1: usize, r2: usize, scheme: StrategyKind) -> Self {
        SelectionDecision {
            relays: vec![r1, r2],
            power_shares: vec![0.5, 0.5],
            scheme,
        }
    }
}

/// Outcome of the decentralized backoff-timer contention.
#[derive(Debug, Clone, PartialEq)]
pub struct BackoffOutcome {
    pub winner: usize,
    pub timers: Vec<f64>,
}

/// Which channel quality each relay's timer is inversely proportional to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BackoffMode {
    /// Timer ~ 1 / min(|h_{i,u1}|^2, |h_{i,u2}|^2) (S-RS-NC step).
    MinMax,
    /// Timer ~ 1 / |h_{i,uj}|^2 for user `j` in {0, 1} (D-RS-NC steps).
    PerUser(usize),
}

fn argmax_by<F: Fn(usize) -> f64>(n: usize, quality: F) -> usize {
    let mut best = 0usize;
    let mut best_q = quality(0);
    for i in 1..n {
        let q = quality(i);
        if q > best_q {
            best = i;
            best_q = q;
        }
    }
    best
}

/// Min-Max criterion: the single relay maximizing the minimum of its two
/// downlink power gains. Tie -> lowest index.
pub fn select_min_max(real: &ChannelRealization) -> SelectionDecision {
    let s = argmax_by(real.n_relays(), |i| real.min_power_gain(i));
    SelectionDecision::single(s, StrategyKind::MinMaxSingle)
}

/// Optimal single-relay baseline: minimizes the Chernoff-surrogate sum BER
/// `B(gamma_i^{u1}) + B(gamma_i^{u2})`. Tie -> lowest index.
pub fn select_optimal_single(real: &ChannelRealization, cfg: &SnrConfig) -> SelectionDecision {
    let g = cfg.gamma_rd();
    let s = argmax_by(real.n_relays(), |i| {
        -(chernoff_ber_bound(g * real.power_gain(i, 0))
            + chernoff_ber_bound(g * real.power_gain(i, 1)))
    });
    SelectionDecision::single(s, StrategyKind::OptimalSingle)
}

/// Double-Max criterion: per user, the relay with the strongest link to that
/// user. Coincident winners collapse to a single full-power relay.
pub fn select_double_max(real: &ChannelRealization) -> SelectionDecision {
    let s1 = argmax_by(real.n_relays(), |i| real.power_gain(i, 0));
    let s2 = argmax_by(real.n_relays(), |i| real.power_gain(i, 1));
    if s1 == s2 {
        SelectionDecision::single(s1, StrategyKind::DoubleMax)
    } else {
        SelectionDecision::pair(s1, s2, StrategyKind::DoubleMax)
    }
}

/// Per-user best-relay selection for RS-No-NC. The selection rule is the
/// Double-Max rule, but each selected relay spends `p_r/2` on its own user's
/// link (no collapsing: a coincident winner still splits power between the
/// two directions).
pub fn select_double_max_no_nc(real: &ChannelRealization) -> SelectionDecision {
    let s1 = argmax_by(real.n_relays(), |i| real.power_gain(i, 0));
    let s2 = argmax_by(real.n_relays(), |i| real.power_gain(i, 1));
    if s1 == s2 {
        SelectionDecision::single(s1, StrategyKind::DoubleMaxNoNc)
    } else {
        SelectionDecision::pair(s1, s2, StrategyKind::DoubleMaxNoNc)
    }
}

fn surrogate_sum(g1: f64, g2: f64) -> f64 {
    chernoff_ber_bound(g1) + chernoff_ber_bound(g2)
}

/// Optimal dual baseline: exhaustive search over all single relays (full
/// power) and unordered pairs (half power each, Alamouti), minimizing the
/// Chernoff-surrogate sum BER. Tie -> lexicographically smallest set.
pub fn select_optimal_dual(real: &ChannelRealization, cfg: &SnrConfig) -> SelectionDecision {
    let n = real.n_relays();
    let g = cfg.gamma_rd();
    let mut best = SelectionDecision::single(0, StrategyKind::OptimalDual);
    let mut best_m = surrogate_sum(g * real.power_gain(0, 0), g * real.power_gain(0, 1));
    for i in 1..n {
        let m = surrogate_sum(g * real.power_gain(i, 0), g * real.power_gain(i, 1));
        if m < best_m {
            best_m = m;
            best = SelectionDecision::single(i, StrategyKind::OptimalDual);
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let m = surrogate_sum(
                0.5 * g * (real.power_gain(i, 0) + real.power_gain(j, 0)),
                0.5 * g * (real.power_gain(i, 1) + real.power_gain(j, 1)),
            );
            if m < best_m {
                best_m = m;
                best = SelectionDecision::pair(i, j, StrategyKind::OptimalDual);
            }
        }
    }
    best
}

/// Maximum relay count accepted by [`select_optimal_subset`].
pub const MAX_SUBSET_RELAYS: usize = 12;

/// Optimal subset baseline: all `2^N - 1` nonempty subsets; a subset of size
/// `m` transmits orthogonally at `p_r/m` per relay with effective SNR
/// `gamma_rd/m * sum |h|^2`. Tie -> lexicographically smallest index list.
pub fn select_optimal_subset(
    real: &ChannelRealization,
    cfg: &SnrConfig,
) -> Result<SelectionDecision, SelectionError> {
    let n = real.n_relays();
    if n > MAX_SUBSET_RELAYS {
        return Err(SelectionError::TooManyRelays {
            n,
            max: MAX_SUBSET_RELAYS,
        });
    }
    let g = cfg.gamma_rd();
    let mut best_mask = 1u32;
    let mut best_m = f64::INFINITY;
    for mask in 1u32..(1 << n) {
        let m_sz = mask.count_ones() as f64;
        let mut sums = [0.0f64; 2];
        for i in 0..n {
            if mask & (1 << i) != 0 {
                sums[0] += real.power_gain(i, 0);
                sums[1] += real.power_gain(i, 1);
            }
        }
        let metric = surrogate_sum(g / m_sz * sums[0], g / m_sz * sums[1]);
        if metric < best_m || (metric == best_m && lex_less(mask, best_mask)) {
            best_m = metric;
            best_mask = mask;
        }
    }
    let relays: Vec<usize> = (0..n).filter(|i| best_mask & (1 << i) != 0).collect();
    let share = 1.0 / relays.len() as f64;
    let power_shares = vec![share; relays.len()];
    Ok(SelectionDecision {
        relays,
        power_shares,
        scheme: StrategyKind::OptimalSubset,
    })
}

// lexicographic order on the sorted index lists encoded by two bitmasks
fn lex_less(a: u32, b: u32) -> bool {
    let (mut a, mut b) = (a, b);
    while a != 0 && b != 0 {
        let ia = a.trailing_zeros();
        let ib = b.trailing_zeros();
        if ia != ib {
            return ia < ib;
        }
        a &= a - 1;
        b &= b - 1;
    }
    a == 0 && b != 0
}

/// Simulates the idealized decentralized backoff contention: every relay
/// starts a timer inversely proportional to its channel quality; the relay
/// with the strictly smallest timer wins (no collisions, no propagation
/// delay). The timer scale constant is 1; winners are invariant to it and to
/// the common factor `gamma_rd`.
pub fn run_backoff_selection(real: &ChannelRealization, mode: BackoffMode) -> BackoffOutcome {
    let quality = |i: usize| match mode {
        BackoffMode::MinMax => real.min_power_gain(i),
        BackoffMode::PerUser(j) => real.power_gain(i, j),
    };
    let timers: Vec<f64> = (0..real.n_relays()).map(|i| 1.0 / quality(i)).collect();
    let mut winner = 0usize;
    for (i, &t) in timers.iter().enumerate() {
        if t < timers[winner] {
            winner = i;
        }
    }
    BackoffOutcome { winner, timers }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{draw_realization, RngStream};
    use crate::numerics::ber_bpsk;

    fn real_from(rows: &[[f64; 2]]) -> ChannelRealization {
        ChannelRealization::from_power_gains(rows).unwrap()
    }

    #[test]
    fn min_max_examples() {
        assert_eq!(select_min_max(&real_from(&[[0.3, 0.3]])).relays, vec![0]);
        let d = select_min_max(&real_from(&[[0.9, 0.2], [0.5, 0.6]]));
        assert_eq!(d.relays, vec![1]);
        assert_eq!(d.power_shares, vec![1.0]);
    }

    #[test]
    fn min_max_equals_argmin_of_worst_user_q() {
        // the two selection-rule statements coincide by Q monotonicity
        let cfg = SnrConfig::new(7.0, 4).unwrap();
        for t in 0..10_000u64 {
            let r = draw_realization(&cfg, RngStream::new(31, t));
            let fast = select_min_max(&r).relays[0];
            let mut best = 0usize;
            let mut best_q = f64::INFINITY;
            for i in 0..4 {
                let q = ber_bpsk(cfg.gamma_rd() * r.power_gain(i, 0))
                    .max(ber_bpsk(cfg.gamma_rd() * r.power_gain(i, 1)));
                if q < best_q {
                    best_q = q;
                    best = i;
                }
            }
            assert_eq!(fast, best, "trial {t}");
        }
    }

    #[test]
    fn optimal_single_examples() {
        let cfg = SnrConfig::new(10.0, 1).unwrap();
        assert_eq!(
            select_optimal_single(&real_from(&[[0.3, 0.4]]), &cfg).relays,
            vec![0]
        );
        // dominant relay wins under both criteria
        let cfg2 = SnrConfig::new(10.0, 2).unwrap();
        let r = real_from(&[[2.0, 1.8], [0.3, 0.2]]);
        assert_eq!(
            select_optimal_single(&r, &cfg2).relays,
            select_min_max(&r).relays
        );
    }

    #[test]
    fn optimal_single_rarely_disagrees_with_exact_q() {
        let cfg = SnrConfig::new(10.0, 4).unwrap();
        let mut disagreements = 0usize;
        let trials = 10_000u64;
        for t in 0..trials {
            let r = draw_realization(&cfg, RngStream::new(33, t));
            let fast = select_optimal_single(&r, &cfg).relays[0];
            let mut best = 0usize;
            let mut best_q = f64::INFINITY;
            for i in 0..4 {
                let q = ber_bpsk(cfg.gamma_rd() * r.power_gain(i, 0))
                    + ber_bpsk(cfg.gamma_rd() * r.power_gain(i, 1));
                if q < best_q {
                    best_q = q;
                    best = i;
                }
            }
            if fast != best {
                disagreements += 1;
            }
        }
        let frac = disagreements as f64 / trials as f64;
        assert!(frac < 0.02, "disagreement fraction {frac}");
    }

    #[test]
    fn double_max_examples() {
        let d = select_double_max(&real_from(&[[0.9, 0.2], [0.5, 0.6]]));
        assert_eq!(d.relays, vec![0, 1]);
        assert_eq!(d.power_shares, vec![0.5, 0.5]);

        let single = select_double_max(&real_from(&[[0.9, 0.8], [0.5, 0.6]]));
        assert_eq!(single.relays, vec![0]);
        assert_eq!(single.power_shares, vec![1.0]);

        assert_eq!(select_double_max(&real_from(&[[0.1, 0.2]])).relays, vec![0]);
    }

    #[test]
    fn double_max_no_nc_keeps_half_power_when_coincident() {
        let d = select_double_max_no_nc(&real_from(&[[0.9, 0.8], [0.5, 0.6]]));
        assert_eq!(d.relays, vec![0]);
        assert_eq!(d.scheme, StrategyKind::DoubleMaxNoNc);
    }

    #[test]
    fn optimal_dual_degenerate_cases() {
        let cfg = SnrConfig::new(10.0, 1).unwrap();
        assert_eq!(
            select_optimal_dual(&real_from(&[[0.3, 0.4]]), &cfg).relays,
            vec![0]
        );
        // one relay dominating both links wins alone: halving its power to
        // add a weak partner only hurts
        let cfg2 = SnrConfig::new(10.0, 2).unwrap();
        let d = select_optimal_dual(&real_from(&[[3.0, 3.1], [0.01, 0.02]]), &cfg2);
        assert_eq!(d.relays, vec![0]);
        assert_eq!(d.power_shares, vec![1.0]);
    }

    #[test]
    fn optimal_dual_beats_double_max_on_exact_metric() {
        let cfg = SnrConfig::new(10.0, 3).unwrap();
        let g = cfg.gamma_rd();
        let exact_sum = |r: &ChannelRealization, d: &SelectionDecision| -> f64 {
            let (g1, g2) = match d.relays.len() {
                1 => (
                    g * r.power_gain(d.relays[0], 0),
                    g * r.power_gain(d.relays[0], 1),
                ),
                _ => (
                    0.5 * g * (r.power_gain(d.relays[0], 0) + r.power_gain(d.relays[1], 0)),
                    0.5 * g * (r.power_gain(d.relays[0], 1) + r.power_gain(d.relays[1], 1)),
                ),
            };
            ber_bpsk(g1) + ber_bpsk(g2)
        };
        let trials = 10_000u64;
        let mut wins = 0usize;
        for t in 0..trials {
            let r = draw_realization(&cfg, RngStream::new(35, t));
            let od = select_optimal_dual(&r, &cfg);
            let dm = select_double_max(&r);
            if exact_sum(&r, &od) <= exact_sum(&r, &dm) + 1e-18 {
                wins += 1;
            }
        }
        let frac = wins as f64 / trials as f64;
        assert!(frac >= 0.98, "optimal-dual no worse in only {frac}");
    }

    #[test]
    fn optimal_subset_basics() {
        let cfg = SnrConfig::new(10.0, 1).unwrap();
        assert_eq!(
            select_optimal_subset(&real_from(&[[0.3, 0.4]]), &cfg)
                .unwrap()
                .relays,
            vec![0]
        );

        // N=2 search space coincides with optimal dual
        let cfg2 = SnrConfig::new(5.0, 2).unwrap();
        for t in 0..2_000u64 {
            let r = draw_realization(&cfg2, RngStream::new(37, t));
            let a = select_optimal_subset(&r, &cfg2).unwrap();
            let b = select_optimal_dual(&r, &cfg2);
            assert_eq!(a.relays, b.relays, "trial {t}");
            let total: f64 = a.power_shares.iter().sum();
            assert!((total - 1.0).abs() < 1e-12, "power shares sum to 1");
        }

        let too_big = real_from(&[[1.0, 1.0]; 13]);
        assert!(select_optimal_subset(&too_big, &cfg).is_err());
    }

    #[test]
    fn optimal_subset_is_exhaustively_optimal() {
        let cfg = SnrConfig::new(6.0, 5).unwrap();
        let g = cfg.gamma_rd();
        for t in 0..1_000u64 {
            let r = draw_realization(&cfg, RngStream::new(39, t));
            let chosen = select_optimal_subset(&r, &cfg).unwrap();
            let m = chosen.relays.len() as f64;
            let chosen_metric = surrogate_sum(
                g / m
                    * chosen
                        .relays
                        .iter()
                        .map(|&i| r.power_gain(i, 0))
                        .sum::<f64>(),
                g / m
                    * chosen
                        .relays
                        .iter()
                        .map(|&i| r.power_gain(i, 1))
                        .sum::<f64>(),
            );
            for mask in 1u32..32 {
                let idx: Vec<usize> = (0..5).filter(|i| mask & (1 << i) != 0).collect();
                let m = idx.len() as f64;
                let metric = surrogate_sum(
                    g / m * idx.iter().map(|&i| r.power_gain(i, 0)).sum::<f64>(),
                    g / m * idx.iter().map(|&i| r.power_gain(i, 1)).sum::<f64>(),
                );
                assert!(
                    chosen_metric <= metric + 1e-18,
                    "trial {t}: subset {idx:?} beats chosen {:?}",
                    chosen.relays
                );
            }
        }
    }

    #[test]
    fn backoff_matches_centralized() {
        assert_eq!(
            run_backoff_selection(&real_from(&[[0.2, 0.4]]), BackoffMode::MinMax).winner,
            0
        );
        let cfg = SnrConfig::new(1.0, 6).unwrap();
        for t in 0..5_000u64 {
            let r = draw_realization(&cfg, RngStream::new(41, t));
            let b = run_backoff_selection(&r, BackoffMode::MinMax);
            assert_eq!(b.winner, select_min_max(&r).relays[0]);
            assert!(b
                .timers
                .iter()
                .enumerate()
                .all(|(i, &t)| i == b.winner || t > b.timers[b.winner]));
            for j in 0..2 {
                let bj = run_backoff_selection(&r, BackoffMode::PerUser(j));
                let central = argmax_by(6, |i| r.power_gain(i, j));
                assert_eq!(bj.winner, central);
            }
        }
    }

    #[test]
    fn lex_order_on_masks() {
        // {0} < {0,1} < {1}
        assert!(lex_less(0b01, 0b11));
        assert!(lex_less(0b11, 0b10));
        assert!(!lex_less(0b10, 0b01));
        assert!(!lex_less(0b01, 0b01));
    }
}
