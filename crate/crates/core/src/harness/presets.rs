//! Named experiment grids.
//!
//! Scenario labels follow `(area km², spacing m[, L])`; baselines use `-`
//! (no cooperation) or `inf` (whole network) for the area.

use super::{run_experiment, ExperimentSpec, Job, ReportBundle, RunOptions, ScalingPoint, Scenario};
use crate::analytic::AnalyticMethod;
use crate::error::{Error, Result};
use crate::model::{CsiLimit, NetworkConfig};
use crate::simulator::{ClusterShape, PrecoderMode};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Fig3,
    Fig4,
    Fig5a,
    Fig5b,
    Table2,
    Table3,
    Scaling,
}

impl Preset {
    pub const ALL: [Preset; 7] = [
        Preset::Fig3,
        Preset::Fig4,
        Preset::Fig5a,
        Preset::Fig5b,
        Preset::Table2,
        Preset::Table3,
        Preset::Scaling,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Preset::Fig3 => "fig3",
            Preset::Fig4 => "fig4",
            Preset::Fig5a => "fig5a",
            Preset::Fig5b => "fig5b",
            Preset::Table2 => "table2",
            Preset::Table3 => "table3",
            Preset::Scaling => "scaling",
        }
    }
}

impl std::str::FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL.into_iter().find(|p| p.name() == s).ok_or_else(|| {
            let names: Vec<&str> = Preset::ALL.iter().map(Preset::name).collect();
            Error::Usage(format!("unknown preset `{s}`; expected one of {}", names.join(", ")))
        })
    }
}

fn network(area_km2: f64, spacing_m: f64) -> NetworkConfig {
    NetworkConfig::from_spacing_and_area(spacing_m, area_km2).expect("preset parameters are valid")
}

fn limited(area_km2: f64, spacing_m: f64, l: u32) -> NetworkConfig {
    network(area_km2, spacing_m).with_csi_limit(CsiLimit::Limited(l))
}

fn analytic(config: NetworkConfig, job: Job) -> Scenario {
    Scenario {
        label: None,
        config,
        job,
    }
}

fn labelled(label: String, config: NetworkConfig, job: Job) -> Scenario {
    Scenario {
        label: Some(label),
        config,
        job,
    }
}

fn monte_carlo(config: NetworkConfig, mode: PrecoderMode, shape: ClusterShape) -> Scenario {
    analytic(config, Job::MonteCarlo { mode, shape })
}

fn cooperative(config: &NetworkConfig) -> AnalyticMethod {
    AnalyticMethod::for_config(config)
}

fn empty_spec(preset: Preset) -> ExperimentSpec {
    ExperimentSpec {
        name: preset.name().to_string(),
        scenarios: Vec::new(),
        thresholds_db: super::default_thresholds_db(),
        rate_grid: Vec::new(),
        scaling_config: None,
        scaling: Vec::new(),
    }
}

/// Cell and ideal baselines at spacing `d` for a job kind.
fn baselines(d: f64, job: fn(AnalyticMethod) -> Job) -> [Scenario; 2] {
    let config = network(1.0, d);
    [
        labelled(format!("(-,{d})"), config.clone(), job(AnalyticMethod::NoCloud)),
        labelled(format!("(inf,{d})"), config, job(AnalyticMethod::Ideal)),
    ]
}

/// The scenario grid of a preset.
pub fn preset_spec(preset: Preset) -> ExperimentSpec {
    let mut spec = empty_spec(preset);
    let s = &mut spec.scenarios;
    match preset {
        Preset::Fig3 => {
            s.push(labelled("(-,200)".into(), network(1.0, 200.0), Job::Coverage(AnalyticMethod::NoCloud)));
            for (a, d) in [(0.5, 200.0), (0.5, 400.0), (1.0, 200.0), (1.0, 400.0), (10.0, 200.0)] {
                s.push(analytic(network(a, d), Job::Coverage(AnalyticMethod::FullCsi)));
            }
            // The ideal curve is drawn for one BS per 200 m × 200 m square.
            let dense = NetworkConfig::new(1.0 / (200.0 * 200.0), 500.0).expect("valid density");
            s.push(labelled("(inf,200)".into(), dense, Job::Coverage(AnalyticMethod::Ideal)));
            s.push(monte_carlo(network(1.0, 200.0), PrecoderMode::FullLq, ClusterShape::Disc));
            s.push(monte_carlo(network(0.5, 200.0), PrecoderMode::FullLq, ClusterShape::Square));
        }
        Preset::Fig4 => {
            spec.rate_grid = (0..20).map(f64::from).collect();
            for d in [400.0, 200.0] {
                s.extend(baselines(d, Job::RateCdf));
            }
            for a in [2.0, 4.0, 8.0] {
                s.push(analytic(network(a, 200.0), Job::RateCdf(AnalyticMethod::FullCsi)));
            }
        }
        Preset::Fig5a => {
            for l in [2, 4, 8] {
                let c = limited(0.63, 200.0, l);
                s.push(analytic(c.clone(), Job::Coverage(cooperative(&c))));
            }
            s.push(monte_carlo(limited(0.63, 200.0, 2), PrecoderMode::PcsiExclusion, ClusterShape::Disc));
        }
        Preset::Fig5b => {
            for (a, d, l) in [(1.0, 200.0, 8), (2.0, 200.0, 8), (1.0, 400.0, 4), (2.0, 400.0, 4), (1.0, 200.0, 2), (2.0, 200.0, 2)] {
                let c = limited(a, d, l);
                s.push(analytic(c.clone(), Job::Coverage(cooperative(&c))));
            }
        }
        Preset::Table2 => {
            for (d, areas) in [(400.0, &[0.5, 1.0, 2.0, 10.0][..]), (200.0, &[0.125, 0.25, 0.5, 2.5][..])] {
                s.extend(baselines(d, Job::Profile));
                for &a in areas {
                    s.push(analytic(network(a, d), Job::Profile(AnalyticMethod::FullCsi)));
                }
            }
        }
        Preset::Table3 => {
            for (d, areas) in [(200.0, [0.5, 1.0, 2.0]), (400.0, [2.0, 4.0, 8.0])] {
                s.push(labelled(format!("(-,{d})"), network(1.0, d), Job::Profile(AnalyticMethod::NoCloud)));
                for a in areas {
                    for l in [2, 4, 6, 8] {
                        let c = limited(a, d, l);
                        s.push(analytic(c.clone(), Job::Profile(cooperative(&c))));
                    }
                    s.push(analytic(network(a, d), Job::Profile(AnalyticMethod::FullCsi)));
                }
            }
        }
        Preset::Scaling => {
            spec.scaling_config = Some(network(1.0, 200.0));
            for epsilon in [0.2, 0.1, 0.05, 0.02] {
                for delta in [0.1, 0.5, 1.0] {
                    spec.scaling.push(ScalingPoint {
                        epsilon,
                        delta,
                        threshold_db: 0.0,
                    });
                }
            }
        }
    }
    spec
}

/// Runs a preset with the given options.
pub fn run_preset(preset: Preset, options: &RunOptions) -> Result<ReportBundle> {
    run_experiment(&preset_spec(preset), options)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_preset_is_well_formed() {
        for p in Preset::ALL {
            let spec = preset_spec(p);
            spec.validate().unwrap();
            assert_eq!(p.name().parse::<Preset>().unwrap(), p);
        }
    }

    #[test]
    fn unknown_preset_is_a_usage_error() {
        assert_eq!("fig9".parse::<Preset>().unwrap_err().exit_code(), 2);
    }

    #[test]
    fn grid_sizes() {
        let fig3 = preset_spec(Preset::Fig3);
        let analytic = fig3.scenarios.iter().filter(|s| !s.job.is_monte_carlo()).count();
        assert_eq!((analytic, fig3.scenarios.len() - analytic), (7, 2));
        assert_eq!(fig3.thresholds_db.len(), 9);
        assert_eq!(preset_spec(Preset::Table3).scenarios.len(), 2 + 6 * 5);
        assert_eq!(preset_spec(Preset::Scaling).scaling.len(), 12);
        assert_eq!(preset_spec(Preset::Fig4).rate_grid.len(), 20);
    }

    #[test]
    fn fig3_analytic_run_has_nine_thresholds_per_curve() {
        let opts = RunOptions {
            monte_carlo: false,
            ..RunOptions::default()
        };
        let b = run_preset(Preset::Fig3, &opts).unwrap();
        assert_eq!(b.curves.len(), 7);
        assert!(b.curves.iter().all(|c| c.coverage.len() == 9 && c.is_non_increasing(1e-12)));
        let labels: Vec<&str> = b.curves.iter().map(|c| c.scenario.as_str()).collect();
        assert_eq!(labels, ["(-,200)", "(0.5,200)", "(0.5,400)", "(1,200)", "(1,400)", "(10,200)", "(inf,200)"]);
    }
}
