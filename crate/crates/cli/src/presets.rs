//! Figure reproduction presets: which curves each figure carries and the
//! default simulation parameters, all overridable from the command line.

use clap::ValueEnum;
use twrc_core::montecarlo::Statistic;
use twrc_core::selection::StrategyKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "lower")]
pub enum PresetName {
    Fig2,
    Fig4,
    Fig5,
    Fig6,
    Fig7,
    Fig8,
    Fig9,
    Fig10,
    Table1,
}

/// One simulated curve of a figure.
#[derive(Debug, Clone)]
pub struct SeriesSpec {
    pub scheme: StrategyKind,
    pub statistic: Statistic,
    /// CSV/legend label; the canonical scheme name unless the series is a
    /// statistic variant.
    pub label: String,
    /// Draw the exact/asymptotic overlays for this scheme.
    pub overlays: bool,
}

impl SeriesSpec {
    fn plain(scheme: StrategyKind, overlays: bool) -> Self {
        SeriesSpec {
            scheme,
            statistic: Statistic::TwoUserAverage,
            label: scheme.name().to_string(),
            overlays,
        }
    }
}

/// A fully resolved figure recipe.
#[derive(Debug, Clone)]
pub struct ExperimentPreset {
    pub name: PresetName,
    pub title: String,
    pub n_relays: usize,
    pub series: Vec<SeriesSpec>,
}

impl ExperimentPreset {
    /// Expands a preset. `relays_override` substitutes the relay count where
    /// a figure has no canonical value (figs. 2 and 4 default to 4).
    pub fn resolve(name: PresetName, relays_override: Option<usize>) -> ExperimentPreset {
        use StrategyKind::*;
        let fixed_n = |default: usize| relays_override.unwrap_or(default);
        match name {
            PresetName::Fig2 => {
                let n = fixed_n(4);
                ExperimentPreset {
                    name,
                    title: format!("Min-Max vs optimal single relay selection, N={n}"),
                    n_relays: n,
                    series: vec![
                        SeriesSpec {
                            scheme: MinMaxSingle,
                            statistic: Statistic::WorstUserHalf,
                            label: "s-rs-nc-worst-user".into(),
                            overlays: true,
                        },
                        SeriesSpec::plain(MinMaxSingle, false),
                        SeriesSpec::plain(OptimalSingle, false),
                    ],
                }
            }
            PresetName::Fig4 => {
                let n = fixed_n(4);
                ExperimentPreset {
                    name,
                    title: format!("Double-Max vs optimal dual relay selection, N={n}"),
                    n_relays: n,
                    series: vec![
                        SeriesSpec::plain(DoubleMax, true),
                        SeriesSpec::plain(OptimalDual, false),
                    ],
                }
            }
            PresetName::Fig5 | PresetName::Table1 => ExperimentPreset {
                name,
                title: "BER reduction relative to NC with no relay selection".into(),
                n_relays: fixed_n(16),
                series: vec![],
            },
            PresetName::Fig6 => {
                let n = fixed_n(5);
                ExperimentPreset {
                    name,
                    title: format!("Selecting various numbers of relays, N={n}"),
                    n_relays: n,
                    series: vec![
                        SeriesSpec::plain(MinMaxSingle, true),
                        SeriesSpec::plain(DoubleMax, true),
                        SeriesSpec::plain(OptimalDual, false),
                        SeriesSpec::plain(OptimalSubset, false),
                    ],
                }
            }
            PresetName::Fig7 | PresetName::Fig8 | PresetName::Fig9 | PresetName::Fig10 => {
                let default_n = match name {
                    PresetName::Fig7 => 2,
                    PresetName::Fig8 => 4,
                    PresetName::Fig9 => 8,
                    _ => 16,
                };
                let n = fixed_n(default_n);
                ExperimentPreset {
                    name,
                    title: format!("BER performance comparison, N={n}"),
                    n_relays: n,
                    series: vec![
                        SeriesSpec::plain(MinMaxSingle, true),
                        SeriesSpec::plain(DoubleMax, true),
                        SeriesSpec::plain(DoubleMaxNoNc, true),
                        SeriesSpec::plain(AllRelaysNc, true),
                    ],
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fig7_carries_the_four_schemes_at_n2() {
        let p = ExperimentPreset::resolve(PresetName::Fig7, None);
        assert_eq!(p.n_relays, 2);
        let schemes: Vec<_> = p.series.iter().map(|s| s.scheme).collect();
        assert_eq!(
            schemes,
            vec![
                StrategyKind::MinMaxSingle,
                StrategyKind::DoubleMax,
                StrategyKind::DoubleMaxNoNc,
                StrategyKind::AllRelaysNc
            ]
        );
    }

    #[test]
    fn fig6_defaults_to_five_relays_and_subset_curve() {
        let p = ExperimentPreset::resolve(PresetName::Fig6, None);
        assert_eq!(p.n_relays, 5);
        assert!(p
            .series
            .iter()
            .any(|s| s.scheme == StrategyKind::OptimalSubset));
    }

    #[test]
    fn relay_override_applies() {
        let p = ExperimentPreset::resolve(PresetName::Fig2, Some(6));
        assert_eq!(p.n_relays, 6);
        assert_eq!(p.series.len(), 3);
        assert_eq!(p.series[0].statistic, Statistic::WorstUserHalf);
    }

    #[test]
    fn fig5_is_analytic_only() {
        let p = ExperimentPreset::resolve(PresetName::Fig5, None);
        assert!(p.series.is_empty());
    }
}
