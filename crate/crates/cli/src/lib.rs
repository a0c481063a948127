//! Command-line front end: experiment configuration, sweep/figure/table
//! reproduction, CSV emission, and static SVG plots.
//!
//! Exit codes: 0 success, 1 I/O error, 2 usage error, 3 validation-suite
//! failure.

pub mod presets;
pub mod svg;
pub mod validate;

use anyhow::Context;
use clap::{Parser, Subcommand};
use presets::{ExperimentPreset, PresetName};
use std::collections::HashMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use twrc_core::analytic;
use twrc_core::channel::SnrConfig;
use twrc_core::montecarlo::{
    estimate_ber, scheme_asymptotic, scheme_exact, sweep, Fidelity, SweepRow, SweepSpec,
    TrialConfig,
};
use twrc_core::selection::StrategyKind;

#[derive(Parser, Debug)]
#[command(
    name = "twrc",
    version,
    about = "Two-way relay channel BER simulator and analytics"
)]
pub struct Cli {
    /// Optional flat key=value config file; flags override it
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Master seed for the counter-based trial streams
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Monte Carlo trials per (scheme, SNR) point
    #[arg(long, global = true)]
    pub trials: Option<u64>,
    /// Simulation fidelity: bit | semi
    #[arg(long, global = true)]
    pub fidelity: Option<String>,
    /// Output CSV path (stdout when omitted; figures default to <preset>.csv)
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Output SVG path (figures default to <preset>.svg)
    #[arg(long, global = true, value_name = "PATH")]
    pub svg: Option<PathBuf>,
    /// Number of relays N
    #[arg(long, global = true)]
    pub relays: Option<usize>,
    /// SNR grid in dB, inclusive: start:stop:step (or a single value)
    #[arg(long = "snr-db", global = true, value_name = "A:B:C")]
    pub snr_db: Option<String>,
    /// Scheme name, comma list, or "all"
    #[arg(long, global = true)]
    pub scheme: Option<String>,
    /// Bit-level early-stop floor (0 = off)
    #[arg(long = "min-errors", global = true)]
    pub min_errors: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run an SNR sweep and write one CSV row per (scheme, SNR) point
    Sweep,
    /// Reproduce a figure preset: simulation + analytic overlays, CSV + SVG
    Figure {
        #[arg(value_enum)]
        preset: PresetName,
    },
    /// Print the relay-selection gain table and the gain-vs-N dataset
    Table1,
    /// Evaluate the closed-form BER expressions (no simulation)
    Analytic,
    /// Run the oracle/validation suite
    Validate,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(anyhow::Error),
    ValidationFailed(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Io(_) => 1,
            CliError::ValidationFailed(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Io(e) => write!(f, "I/O error: {e:#}"),
            CliError::ValidationFailed(n) => write!(f, "{n} validation check(s) failed"),
        }
    }
}

/// Fully resolved options: defaults < config file < flags.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub seed: u64,
    pub trials: u64,
    pub fidelity: Fidelity,
    pub relays: usize,
    pub relays_explicit: bool,
    pub snr_db: Vec<f64>,
    pub schemes: Vec<StrategyKind>,
    pub out: Option<PathBuf>,
    pub svg: Option<PathBuf>,
    pub min_errors: u64,
}

/// The scheme set behind `--scheme all`.
pub const ALL_SWEEP_SCHEMES: [StrategyKind; 5] = [
    StrategyKind::MinMaxSingle,
    StrategyKind::DoubleMax,
    StrategyKind::AllRelaysNc,
    StrategyKind::DoubleMaxNoNc,
    StrategyKind::OptimalDual,
];

fn load_config(path: &Path) -> Result<HashMap<String, String>, CliError> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config {}", path.display()))
        .map_err(CliError::Io)?;
    let mut map = HashMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(CliError::Usage(format!(
                "{}:{}: expected key=value, got '{line}'",
                path.display(),
                lineno + 1
            )));
        };
        map.insert(k.trim().replace('-', "_"), v.trim().to_string());
    }
    Ok(map)
}

/// Parses "a:b:c" (inclusive) or a single dB value.
pub fn parse_snr_grid(spec: &str) -> Result<Vec<f64>, CliError> {
    let bad = |m: &str| CliError::Usage(format!("--snr-db '{spec}': {m}"));
    let parts: Vec<&str> = spec.split(':').collect();
    let parse = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|_| bad(&format!("'{s}' is not a number")))
    };
    match parts.len() {
        1 => Ok(vec![parse(parts[0])?]),
        3 => {
            let (a, b, c) = (parse(parts[0])?, parse(parts[1])?, parse(parts[2])?);
            if c <= 0.0 {
                return Err(bad("step must be positive"));
            }
            if b < a {
                return Err(bad("stop must be >= start"));
            }
            let n = ((b - a) / c + 1e-9).floor() as i64;
            Ok((0..=n.max(0)).map(|i| a + i as f64 * c).collect())
        }
        _ => Err(bad("expected start:stop:step or a single value")),
    }
}

pub fn parse_schemes(spec: &str) -> Result<Vec<StrategyKind>, CliError> {
    if spec.eq_ignore_ascii_case("all") {
        return Ok(ALL_SWEEP_SCHEMES.to_vec());
    }
    spec.split(',')
        .map(|s| s.trim().parse::<StrategyKind>().map_err(CliError::Usage))
        .collect()
}

impl Cli {
    pub fn resolve(&self) -> Result<Resolved, CliError> {
        let file = match &self.config {
            Some(p) => load_config(p)?,
            None => HashMap::new(),
        };
        let pick = |flag: Option<String>, key: &str| -> Option<String> {
            flag.or_else(|| file.get(key).cloned())
        };
        let seed = match pick(self.seed.map(|v| v.to_string()), "seed") {
            Some(s) => s
                .parse()
                .map_err(|_| CliError::Usage(format!("seed '{s}' is not a u64")))?,
            None => 1,
        };
        let trials = match pick(self.trials.map(|v| v.to_string()), "trials") {
            Some(s) => s
                .parse()
                .map_err(|_| CliError::Usage(format!("trials '{s}' is not a count")))?,
            None => 100_000,
        };
        let min_errors = match pick(self.min_errors.map(|v| v.to_string()), "min_errors") {
            Some(s) => s
                .parse()
                .map_err(|_| CliError::Usage(format!("min-errors '{s}' is not a count")))?,
            None => 0,
        };
        let fidelity = match pick(self.fidelity.clone(), "fidelity") {
            Some(s) => s.parse::<Fidelity>().map_err(CliError::Usage)?,
            None => Fidelity::SemiAnalytic,
        };
        let relays_raw = pick(self.relays.map(|v| v.to_string()), "relays");
        let relays_explicit = relays_raw.is_some();
        let relays = match relays_raw {
            Some(s) => {
                let n: usize = s
                    .parse()
                    .map_err(|_| CliError::Usage(format!("relays '{s}' is not a count")))?;
                if n == 0 {
                    return Err(CliError::Usage("relays must be >= 1".into()));
                }
                n
            }
            None => 2,
        };
        let snr_db = parse_snr_grid(
            &pick(self.snr_db.clone(), "snr_db").unwrap_or_else(|| "0:30:5".into()),
        )?;
        let schemes =
            parse_schemes(&pick(self.scheme.clone(), "scheme").unwrap_or_else(|| "all".into()))?;
        let out = self
            .out
            .clone()
            .or_else(|| file.get("out").map(PathBuf::from));
        let svg = self
            .svg
            .clone()
            .or_else(|| file.get("svg").map(PathBuf::from));
        Ok(Resolved {
            seed,
            trials,
            fidelity,
            relays,
            relays_explicit,
            snr_db,
            schemes,
            out,
            svg,
            min_errors,
        })
    }
}

pub fn rows_to_csv(rows: &[SweepRow]) -> String {
    let mut s = String::from(SweepRow::CSV_HEADER);
    s.push('\n');
    for r in rows {
        s.push_str(&r.to_csv_line());
        s.push('\n');
    }
    s
}

/// Inverse of [`rows_to_csv`]; the SVG path re-reads the CSV so plots stay a
/// pure function of the emitted file.
pub fn parse_csv_rows(text: &str) -> Result<Vec<SweepRow>, CliError> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == SweepRow::CSV_HEADER => {}
        other => return Err(CliError::Usage(format!("unexpected CSV header: {other:?}"))),
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 13 {
            return Err(CliError::Usage(format!(
                "line {}: expected 13 fields, got {}",
                i + 2,
                f.len()
            )));
        }
        let num = |s: &str, what: &str| -> Result<f64, CliError> {
            s.parse::<f64>()
                .map_err(|_| CliError::Usage(format!("line {}: bad {what} '{s}'", i + 2)))
        };
        let opt = |s: &str, what: &str| -> Result<Option<f64>, CliError> {
            if s.is_empty() {
                Ok(None)
            } else {
                num(s, what).map(Some)
            }
        };
        rows.push(SweepRow {
            scheme: f[1].to_string(),
            n_relays: f[2]
                .parse()
                .map_err(|_| CliError::Usage(format!("line {}: bad n_relays", i + 2)))?,
            snr_db: num(f[3], "snr_db")?,
            gamma_rd: num(f[4], "gamma_rd")?,
            trials: f[5]
                .parse()
                .map_err(|_| CliError::Usage(format!("line {}: bad trials", i + 2)))?,
            fidelity: f[6].parse::<Fidelity>().map_err(CliError::Usage)?,
            ber_sim: opt(f[7], "ber_sim")?,
            stderr: opt(f[8], "stderr")?,
            ber_exact: opt(f[9], "ber_exact")?,
            ber_asymptotic: opt(f[10], "ber_asymptotic")?,
            eval_method: match f[11] {
                "alternating_sum" => Some("alternating_sum"),
                "quadrature" => Some("quadrature"),
                "asymptotic" => Some("asymptotic"),
                _ => None,
            },
            seed: f[12]
                .parse()
                .map_err(|_| CliError::Usage(format!("line {}: bad seed", i + 2)))?,
        });
    }
    Ok(rows)
}

/// BER-vs-SNR plot from CSV rows: per scheme, a solid simulated line with
/// markers, a dashed exact overlay, and a dotted asymptotic overlay.
pub fn plot_from_rows(rows: &[SweepRow], title: &str) -> svg::Plot {
    let mut order: Vec<String> = Vec::new();
    for r in rows {
        if !order.contains(&r.scheme) {
            order.push(r.scheme.clone());
        }
    }
    let mut series = Vec::new();
    for (color, scheme) in order.iter().enumerate() {
        let of = |get: fn(&SweepRow) -> Option<f64>| -> Vec<(f64, f64)> {
            rows.iter()
                .filter(|r| &r.scheme == scheme)
                .filter_map(|r| get(r).map(|v| (r.snr_db, v)))
                .collect()
        };
        let sim = of(|r| r.ber_sim);
        if !sim.is_empty() {
            series.push(svg::Series {
                label: format!("{scheme} (sim)"),
                points: sim,
                style: svg::LineStyle::Solid,
                color,
                markers: true,
            });
        }
        let exact = of(|r| r.ber_exact);
        if !exact.is_empty() {
            series.push(svg::Series {
                label: format!("{scheme} (exact)"),
                points: exact,
                style: svg::LineStyle::Dashed,
                color,
                markers: false,
            });
        }
        let asym = of(|r| r.ber_asymptotic);
        if !asym.is_empty() {
            series.push(svg::Series {
                label: format!("{scheme} (asymptotic)"),
                points: asym,
                style: svg::LineStyle::Dotted,
                color,
                markers: false,
            });
        }
    }
    svg::Plot {
        title: title.to_string(),
        x_label: "average SNR (dB)".into(),
        y_label: "average sum BER".into(),
        series,
        y_log: true,
    }
}

fn write_output(path: Option<&Path>, content: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, content)
            .with_context(|| format!("writing {}", p.display()))
            .map_err(CliError::Io),
        None => std::io::stdout()
            .write_all(content.as_bytes())
            .context("writing stdout")
            .map_err(CliError::Io),
    }
}

fn cmd_sweep(r: &Resolved) -> Result<(), CliError> {
    let spec = SweepSpec {
        schemes: r.schemes.clone(),
        n_relays: r.relays,
        snr_db: r.snr_db.clone(),
        trials: r.trials,
        fidelity: r.fidelity,
        master_seed: r.seed,
        min_errors: r.min_errors,
    };
    let rows = sweep(&spec);
    let csv = rows_to_csv(&rows);
    write_output(r.out.as_deref(), &csv)?;
    if let Some(svg_path) = &r.svg {
        let parsed = parse_csv_rows(&csv)?;
        let plot = plot_from_rows(&parsed, &format!("BER sweep, N={}", r.relays));
        write_output(Some(svg_path), &svg::render(&plot))?;
    }
    Ok(())
}

/// Runs one figure series point-by-point (plain sweeps cannot express the
/// worst-user statistic variant or custom labels).
fn figure_rows(preset: &ExperimentPreset, r: &Resolved) -> Vec<SweepRow> {
    let mut rows = Vec::new();
    for s in &preset.series {
        for &db in &r.snr_db {
            let gamma = 10f64.powf(db / 10.0);
            let snr = SnrConfig::new(gamma, preset.n_relays).expect("validated grid");
            let cfg = TrialConfig {
                scheme: s.scheme,
                snr,
                trials: r.trials,
                fidelity: r.fidelity,
                master_seed: r.seed,
                min_errors: r.min_errors,
                statistic: s.statistic,
            };
            let mut row = SweepRow {
                scheme: s.label.clone(),
                n_relays: preset.n_relays,
                snr_db: db,
                gamma_rd: gamma,
                trials: r.trials,
                fidelity: r.fidelity,
                ber_sim: None,
                stderr: None,
                ber_exact: None,
                ber_asymptotic: None,
                eval_method: None,
                seed: r.seed,
            };
            if cfg.validate().is_ok() {
                let est = estimate_ber(&cfg);
                row.trials = est.trials;
                row.ber_sim = Some(est.ber);
                row.stderr = Some(est.stderr);
            }
            if s.overlays {
                if let Some(Ok(exact)) = scheme_exact(s.scheme, preset.n_relays as u32, gamma) {
                    row.ber_exact = Some(exact.value);
                    row.eval_method = Some(exact.method.name());
                }
                row.ber_asymptotic = scheme_asymptotic(s.scheme, preset.n_relays as u32, gamma);
            }
            rows.push(row);
        }
    }
    rows
}

const GAINS_CSV_HEADER: &str = "n_relays,s_rs_nc_gain,d_rs_nc_gain,rs_no_nc_gain";

fn gains_csv(max_n: u32) -> String {
    let mut s = String::from(GAINS_CSV_HEADER);
    s.push('\n');
    for n in 1..=max_n {
        s.push_str(&format!(
            "{},{:e},{:e},{:e}\n",
            n,
            analytic::table1_gain(StrategyKind::MinMaxSingle, n).unwrap(),
            analytic::table1_gain(StrategyKind::DoubleMax, n).unwrap(),
            analytic::table1_gain(StrategyKind::DoubleMaxNoNc, n).unwrap(),
        ));
    }
    s
}

fn gains_plot(max_n: u32, title: &str) -> svg::Plot {
    let mut series = Vec::new();
    for (color, (scheme, label)) in [
        (StrategyKind::MinMaxSingle, "s-rs-nc"),
        (StrategyKind::DoubleMax, "d-rs-nc"),
        (StrategyKind::DoubleMaxNoNc, "rs-no-nc"),
    ]
    .into_iter()
    .enumerate()
    {
        series.push(svg::Series {
            label: label.to_string(),
            points: (1..=max_n)
                .map(|n| (n as f64, analytic::table1_gain(scheme, n).unwrap()))
                .collect(),
            style: svg::LineStyle::Solid,
            color,
            markers: true,
        });
    }
    svg::Plot {
        title: title.to_string(),
        x_label: "number of relays N".into(),
        y_label: "BER reduction vs NC-No-RS".into(),
        series,
        y_log: true,
    }
}

fn cmd_figure(name: PresetName, cli_relays: Option<usize>, r: &Resolved) -> Result<(), CliError> {
    let preset = ExperimentPreset::resolve(name, cli_relays);
    let stem = format!("{name:?}").to_lowercase();
    let out = r
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{stem}.csv")));
    let svg_path = r
        .svg
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{stem}.svg")));
    match name {
        PresetName::Table1 => {
            print_table1(preset.n_relays as u32);
            write_output(Some(&out), &gains_csv(preset.n_relays as u32))?;
            Ok(())
        }
        PresetName::Fig5 => {
            let max_n = preset.n_relays as u32;
            write_output(Some(&out), &gains_csv(max_n))?;
            write_output(
                Some(&svg_path),
                &svg::render(&gains_plot(max_n, &preset.title)),
            )?;
            Ok(())
        }
        _ => {
            let rows = figure_rows(&preset, r);
            let csv = rows_to_csv(&rows);
            write_output(Some(&out), &csv)?;
            let parsed = parse_csv_rows(&csv)?;
            let plot = plot_from_rows(&parsed, &preset.title);
            write_output(Some(&svg_path), &svg::render(&plot))?;
            Ok(())
        }
    }
}

fn print_table1(max_n: u32) {
    let bold = std::env::var_os("NO_COLOR").is_none();
    let (b0, b1) = if bold {
        ("\x1b[1m", "\x1b[0m")
    } else {
        ("", "")
    };
    println!("{b0}BER reduction relative to NC with no relay selection{b1}");
    println!(
        "{b0}{:>3}  {:>12}  {:>12}  {:>12}{b1}",
        "N", "s-rs-nc", "d-rs-nc", "rs-no-nc"
    );
    for n in 1..=max_n {
        println!(
            "{:>3}  {:>12.6}  {:>12.6}  {:>12.6}",
            n,
            analytic::table1_gain(StrategyKind::MinMaxSingle, n).unwrap(),
            analytic::table1_gain(StrategyKind::DoubleMax, n).unwrap(),
            analytic::table1_gain(StrategyKind::DoubleMaxNoNc, n).unwrap(),
        );
    }
}

fn cmd_table1(r: &Resolved) -> Result<(), CliError> {
    let max_n = if r.relays_explicit {
        r.relays as u32
    } else {
        16
    };
    print_table1(max_n);
    if r.out.is_some() {
        write_output(r.out.as_deref(), &gains_csv(max_n))?;
    }
    Ok(())
}

fn cmd_analytic(r: &Resolved) -> Result<(), CliError> {
    let mut out = String::from(
        "scheme,n_relays,snr_db,gamma_rd,ber_exact,ber_asymptotic,eval_method,cancellation_loss_digits\n",
    );
    let schemes: Vec<StrategyKind> = r
        .schemes
        .iter()
        .copied()
        .filter(|s| scheme_exact(*s, 1, 1.0).is_some())
        .collect();
    if schemes.is_empty() {
        return Err(CliError::Usage(
            "no closed-form scheme selected (use s-rs-nc, d-rs-nc, nc-no-rs, rs-no-nc)".into(),
        ));
    }
    for &scheme in &schemes {
        for &db in &r.snr_db {
            let gamma = 10f64.powf(db / 10.0);
            match scheme_exact(scheme, r.relays as u32, gamma).unwrap() {
                Ok(res) => {
                    let asym = scheme_asymptotic(scheme, r.relays as u32, gamma).unwrap();
                    out.push_str(&format!(
                        "{},{},{},{},{:e},{:e},{},{:.2}\n",
                        scheme,
                        r.relays,
                        db,
                        gamma,
                        res.value,
                        asym,
                        res.method.name(),
                        res.est_cancellation_loss
                    ));
                }
                Err(e) => {
                    return Err(CliError::Usage(format!(
                        "{scheme} N={} snr={db} dB: {e}",
                        r.relays
                    )))
                }
            }
        }
    }
    write_output(r.out.as_deref(), &out)
}

fn cmd_validate(r: &Resolved) -> Result<(), CliError> {
    let checks = validate::run(r.seed);
    let mut failed = 0;
    for c in &checks {
        println!(
            "{} {} — {}",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            c.detail
        );
        if !c.pass {
            failed += 1;
        }
    }
    if failed > 0 {
        Err(CliError::ValidationFailed(failed))
    } else {
        println!("all {} checks passed", checks.len());
        Ok(())
    }
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    let resolved = cli.resolve()?;
    // presets keep their own relay-count defaults unless the user (flag or
    // config file) chose one
    let relays_override = resolved.relays_explicit.then_some(resolved.relays);
    match &cli.command {
        Command::Sweep => cmd_sweep(&resolved),
        Command::Figure { preset } => cmd_figure(*preset, relays_override, &resolved),
        Command::Table1 => cmd_table1(&resolved),
        Command::Analytic => cmd_analytic(&resolved),
        Command::Validate => cmd_validate(&resolved),
    }
}
