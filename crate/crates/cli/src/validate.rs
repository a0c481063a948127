//! Runtime oracle suite behind `twrc validate`: a condensed version of the
//! repository's acceptance checks that exercises the public library surface
//! in seconds.

use twrc_core::analytic::{self, oracles, psi0};
use twrc_core::channel::{draw_realization, RngStream, SnrConfig};
use twrc_core::montecarlo::{estimate_ber, Fidelity, TrialConfig};
use twrc_core::numerics::{integrate, ks_statistic, regularized_lower_gamma};
use twrc_core::phy::mrc_effective_snr;
use twrc_core::selection::{run_backoff_selection, select_min_max, BackoffMode, StrategyKind};

pub struct Check {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

pub fn run(seed: u64) -> Vec<Check> {
    let mut checks = Vec::new();

    // closed forms against the independent quadrature/MGF oracles
    {
        let mut worst: f64 = 0.0;
        let mut at = String::new();
        for n in 1..=8u32 {
            for &g in &[0.1, 1.0, 10.0, 100.0] {
                for (name, exact, oracle) in [
                    (
                        "s-rs-nc",
                        analytic::ber_s_rs_nc_exact(n, g).unwrap().value,
                        oracles::s_rs_nc(n, g).unwrap(),
                    ),
                    (
                        "d-rs-nc",
                        analytic::ber_d_rs_nc_exact(n, g).unwrap().value,
                        oracles::d_rs_nc(n, g).unwrap(),
                    ),
                    (
                        "nc-no-rs",
                        analytic::ber_nc_no_rs_exact(n, g).unwrap().value,
                        oracles::nc_no_rs(n, g).unwrap(),
                    ),
                    (
                        "rs-no-nc",
                        analytic::ber_rs_no_nc_exact(n, g).unwrap().value,
                        oracles::rs_no_nc(n, g).unwrap(),
                    ),
                ] {
                    let r = rel(exact, oracle);
                    if r > worst {
                        worst = r;
                        at = format!("{name} N={n} gamma={g}");
                    }
                }
            }
        }
        checks.push(Check {
            name: "oracle equivalence (N<=8, gamma<=100, 1e-8)",
            pass: worst < 1e-8,
            detail: format!("max rel deviation {worst:.2e} at {at}"),
        });
    }

    // psi0 closed form against its defining integral
    {
        let mut rng = RngStream::new(seed, 1).rng();
        use rand::Rng;
        let mut worst: f64 = 0.0;
        for _ in 0..20 {
            let c1 = 10f64.powf(rng.random_range(-2.0..2.0));
            let c2 = 10f64.powf(rng.random_range(-2.0..2.0));
            let quad = integrate(
                |t| {
                    let s2 = t.sin().powi(2);
                    s2 * s2 / ((c1 + s2) * (c2 + s2))
                },
                0.0,
                std::f64::consts::FRAC_PI_2,
                1e-300,
                1e-13,
            )
            .unwrap()
                / std::f64::consts::PI;
            worst = worst.max(rel(psi0(c1, c2).unwrap(), quad));
        }
        checks.push(Check {
            name: "psi0 vs quadrature (1e-10)",
            pass: worst < 1e-10,
            detail: format!("max rel deviation {worst:.2e} over 20 random pairs"),
        });
    }

    // MGF product form against the partial-fraction expansion
    {
        let mut rng = RngStream::new(seed, 2).rng();
        use rand::Rng;
        let mut worst: f64 = 0.0;
        for _ in 0..20 {
            let n = rng.random_range(2..=6u32);
            let q = rng.random_range(1..n);
            let g = 10f64.powf(rng.random_range(-1.0..2.0));
            let s = (1.0 / g) * (1.0 - rng.random_range(0.1..4.0));
            worst = worst.max(rel(
                analytic::mgf_z(s, n, q, g).unwrap(),
                analytic::mgf_z_partial_fraction(s, n, q, g).unwrap(),
            ));
        }
        checks.push(Check {
            name: "MGF product vs partial fraction (1e-10)",
            pass: worst < 1e-10,
            detail: format!("max rel deviation {worst:.2e} over 20 random points"),
        });
    }

    // gain identities
    {
        let mut ok = true;
        for n in 1..=16u32 {
            let r = analytic::ber_s_rs_nc_asymptotic(n, 9.0)
                / analytic::ber_rs_no_nc_asymptotic(n, 9.0);
            ok &= (r - 0.5).abs() < 1e-12;
            if n >= 2 {
                ok &= (2.0 - (2f64).powi(1 - n as i32)) / (n as f64) < 1.0;
            }
            let gain = analytic::table1_gain(StrategyKind::MinMaxSingle, n).unwrap();
            ok &= rel(
                analytic::ber_s_rs_nc_asymptotic(n, 9.0)
                    / analytic::ber_nc_no_rs_asymptotic(n, 9.0),
                gain,
            ) < 1e-10;
        }
        checks.push(Check {
            name: "gain identities (coefficient ratios)",
            pass: ok,
            detail: "coefficient ratios over N=1..16".into(),
        });
    }

    // distributional KS checks at 1e6 samples
    {
        let samples = 1_000_000usize;
        let gamma = 5.0;
        let n = 4usize;
        let cfg = SnrConfig::new(gamma, n).unwrap();
        let mut h2 = Vec::with_capacity(samples);
        let mut minsnr = Vec::with_capacity(samples);
        let mut maxmin = Vec::with_capacity(samples);
        let mut w2 = Vec::with_capacity(samples);
        for t in 0..samples as u64 {
            let r = draw_realization(&cfg, RngStream::new(seed ^ 0x5eed, t));
            h2.push(r.power_gain(0, 0));
            minsnr.push(gamma * r.min_power_gain(1));
            let s = select_min_max(&r).relays[0];
            maxmin.push(gamma * r.min_power_gain(s));
            let mut snrs: Vec<f64> = (0..n).map(|i| gamma * r.power_gain(i, 1)).collect();
            snrs.sort_by(|a, b| a.partial_cmp(b).unwrap());
            w2.push(snrs[1] - snrs[0]);
        }
        let d1 = ks_statistic(&h2, |x| -(-x).exp_m1());
        let d2 = ks_statistic(&minsnr, |x| -(-2.0 * x / gamma).exp_m1());
        let d3 = ks_statistic(&maxmin, |x| (-(-2.0 * x / gamma).exp_m1()).powi(n as i32));
        // second spacing rate (N - 2 + 1)/gamma, the corrected law
        let d4 = ks_statistic(&w2, |x| -(-(n as f64 - 1.0) * x / gamma).exp_m1());
        let cfg3 = SnrConfig::new(gamma, 3).unwrap();
        let mut sums = Vec::with_capacity(samples);
        for t in 0..(samples / 2) as u64 {
            let r = draw_realization(&cfg3, RngStream::new(seed ^ 0x50b3, t));
            let (a, b) = mrc_effective_snr(&r, &cfg3);
            sums.push(a);
            sums.push(b);
        }
        let d5 = ks_statistic(&sums, |x| regularized_lower_gamma(3.0, 3.0 * x / gamma));
        let worst = d1.max(d2).max(d3).max(d4).max(d5);
        checks.push(Check {
            name: "distributional KS suite (1e6 samples, 0.002)",
            pass: worst < 0.002,
            detail: format!(
                "|h|^2 {d1:.5}, min {d2:.5}, max-min {d3:.5}, spacing {d4:.5}, sum {d5:.5}"
            ),
        });
    }

    // backoff contention equals centralized selection
    {
        let mut mismatches = 0u32;
        for n in [2usize, 4, 8] {
            let cfg = SnrConfig::new(1.0, n).unwrap();
            for t in 0..10_000u64 {
                let r = draw_realization(&cfg, RngStream::new(seed ^ 0xb0ff, t));
                if run_backoff_selection(&r, BackoffMode::MinMax).winner
                    != select_min_max(&r).relays[0]
                {
                    mismatches += 1;
                }
            }
        }
        checks.push(Check {
            name: "backoff equals centralized argmax",
            pass: mismatches == 0,
            detail: format!("{mismatches} mismatches over 30000 contentions"),
        });
    }

    // Monte Carlo against closed forms, and bit-level against semi-analytic
    {
        let trials = 200_000;
        let cfg = TrialConfig::new(
            StrategyKind::DoubleMax,
            SnrConfig::from_snr_db(10.0, 2).unwrap(),
            trials,
            seed ^ 0xca4e,
        );
        let semi = estimate_ber(&cfg);
        let exact = analytic::ber_d_rs_nc_exact(2, 10f64.powf(1.0))
            .unwrap()
            .value;
        let z = (semi.ber - exact).abs() / semi.stderr;
        let bit = estimate_ber(&cfg.clone().with_fidelity(Fidelity::BitLevel));
        let zf = (semi.ber - bit.ber).abs() / (semi.stderr.powi(2) + bit.stderr.powi(2)).sqrt();
        checks.push(Check {
            name: "simulation vs theory and cross-fidelity (4-sigma)",
            pass: z <= 4.0 && zf <= 4.0,
            detail: format!("d-rs-nc N=2 10dB: sim-vs-exact z={z:.2}, semi-vs-bit z={zf:.2}"),
        });
    }

    checks
}
