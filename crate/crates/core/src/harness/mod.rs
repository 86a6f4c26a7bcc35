//! Configuration files, experiment presets and report output.
//!
//! Thresholds are given in dB here and converted to linear values before
//! they reach the analytic or simulation code.

mod config;
mod output;
mod presets;
mod svg;

pub use config::{
    default_thresholds_db, parse_config, parse_config_str, ScenarioFile, DEFAULT_FULL_LQ_REALIZATIONS,
    DEFAULT_REALIZATIONS, DEFAULT_SEED,
};
pub use output::{emit_csv, emit_json, emit_rate_cdf_csv, emit_rates_csv, emit_scaling_csv, read_csv, write_report, CsvRow, Format};
pub use presets::{preset_spec, run_preset, Preset};
pub use svg::emit_svg;

use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::analytic::{rate_cdf, rate_profile, AnalyticMethod, CoverageCurve, CoverageModel, Method, RateProfile};
use crate::error::{Error, Result};
use crate::model::{db_to_linear, NetworkConfig};
use crate::scaling::{mean_cluster_size, optimal_radius, optimal_radius_pre_asymptotic, verify_scaling, ScalingQuery};
use crate::simulator::{simulate, ClusterShape, PrecoderMode, SimulationPlan};

/// What to compute for one scenario.
#[derive(Debug, Clone, PartialEq)]
pub enum Job {
    /// Analytic coverage over the experiment thresholds.
    Coverage(AnalyticMethod),
    /// Simulated coverage over the experiment thresholds.
    MonteCarlo { mode: PrecoderMode, shape: ClusterShape },
    /// Analytic percentile and mean rates.
    Profile(AnalyticMethod),
    /// Analytic rate CDF over the experiment rate grid.
    RateCdf(AnalyticMethod),
}

impl Job {
    pub fn is_monte_carlo(&self) -> bool {
        matches!(self, Job::MonteCarlo { .. })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    /// Report label; defaults to the scenario label of the config or plan.
    pub label: Option<String>,
    pub config: NetworkConfig,
    pub job: Job,
}

/// One point of the scaling-law grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingPoint {
    pub epsilon: f64,
    pub delta: f64,
    pub threshold_db: f64,
}

/// A named grid of scenarios and the axes they are evaluated on.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub name: String,
    pub scenarios: Vec<Scenario>,
    pub thresholds_db: Vec<f64>,
    /// Rates in bits/s/Hz for rate-CDF jobs.
    pub rate_grid: Vec<f64>,
    /// Network the scaling points are evaluated in.
    pub scaling_config: Option<NetworkConfig>,
    pub scaling: Vec<ScalingPoint>,
}

/// Which methods a run executes and how it seeds and budgets simulations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    pub seed: u64,
    pub analytic: bool,
    pub monte_carlo: bool,
    /// Overrides every simulation budget.
    pub realizations: Option<u64>,
    /// Record the wall time in the report metadata. Off by default so that
    /// reruns are byte-identical.
    pub record_wall_time: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            analytic: true,
            monte_carlo: true,
            realizations: None,
            record_wall_time: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileRow {
    pub scenario: String,
    pub method: Method,
    #[serde(flatten)]
    pub profile: RateProfile,
    pub config_digest: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateCdfCurve {
    pub scenario: String,
    pub method: Method,
    pub rates: Vec<f64>,
    pub cdf: Vec<f64>,
    pub config_digest: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub epsilon: f64,
    pub delta: f64,
    pub threshold_db: f64,
    /// Small-ε law, meters.
    pub r_formula: f64,
    /// Law with `ln(1/(1−ε))` in place of `ε`, meters.
    pub r_pre_asymptotic: f64,
    /// Radius where the boundary coverage reaches `(1−ε)` of ideal, meters.
    pub r_numeric: f64,
    pub ratio: f64,
    /// Mean BSs per cluster at the small-ε radius.
    pub mean_cluster_size: f64,
    pub config_digest: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub experiment: String,
    pub seed: u64,
    pub tool_version: String,
    /// Hash over the digests of every scenario in the run.
    pub config_digest: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
}

/// Everything one run produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportBundle {
    pub curves: Vec<CoverageCurve>,
    pub profiles: Vec<ProfileRow>,
    pub rate_cdfs: Vec<RateCdfCurve>,
    pub scaling: Vec<ScalingRow>,
    pub metadata: Metadata,
}

impl ReportBundle {
    pub fn empty(experiment: &str, seed: u64) -> Self {
        Self {
            curves: Vec::new(),
            profiles: Vec::new(),
            rate_cdfs: Vec::new(),
            scaling: Vec::new(),
            metadata: Metadata {
                experiment: experiment.to_string(),
                seed,
                tool_version: env!("CARGO_PKG_VERSION").to_string(),
                config_digest: digest_of(std::iter::empty::<&str>()),
                wall_time_s: None,
            },
        }
    }

    pub fn is_empty(&self) -> bool {
        self.curves.is_empty() && self.profiles.is_empty() && self.rate_cdfs.is_empty() && self.scaling.is_empty()
    }

    /// Recomputes the bundle digest from the digests of its contents.
    pub fn seal(&mut self) {
        let parts = self
            .curves
            .iter()
            .map(|c| format!("c|{}|{}|{}", c.scenario, c.method, c.config_digest))
            .chain(self.profiles.iter().map(|p| format!("p|{}|{}|{}", p.scenario, p.method, p.config_digest)))
            .chain(self.rate_cdfs.iter().map(|r| format!("r|{}|{}|{}", r.scenario, r.method, r.config_digest)))
            .chain(self.scaling.iter().map(|s| format!("s|{}|{}|{}", s.epsilon, s.delta, s.config_digest)))
            .chain([format!("seed|{}", self.metadata.seed), format!("x|{}", self.metadata.experiment)]);
        self.metadata.config_digest = digest_of(parts);
    }
}

fn digest_of<I, S>(parts: I) -> String
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let mut h = Sha256::new();
    for p in parts {
        h.update(p.as_ref().as_bytes());
        h.update([0]);
    }
    h.finalize()[..8].iter().map(|b| format!("{b:02x}")).collect()
}

impl ExperimentSpec {
    /// Labels must be unique per method.
    pub fn validate(&self) -> Result<()> {
        let mut seen = std::collections::BTreeSet::new();
        for s in &self.scenarios {
            s.config.validate()?;
            let key = (self.label_of(s), job_kind(&s.job), method_of(&s.job).tag());
            if !seen.insert(key.clone()) {
                return Err(Error::Usage(format!(
                    "experiment `{}` lists scenario {} ({}) twice",
                    self.name, key.0, key.2
                )));
            }
        }
        Ok(())
    }

    fn label_of(&self, s: &Scenario) -> String {
        match (&s.label, &s.job) {
            (Some(l), _) => l.clone(),
            (None, Job::MonteCarlo { mode, shape }) => {
                let plan = SimulationPlan::new(s.config.clone(), 1, 0, *mode).map(|p| p.with_shape(*shape));
                match plan {
                    Ok(p) => p.scenario(),
                    Err(_) => crate::analytic::scenario_label(&s.config),
                }
            }
            (None, _) => crate::analytic::scenario_label(&s.config),
        }
    }
}

fn job_kind(job: &Job) -> &'static str {
    match job {
        Job::Coverage(_) | Job::MonteCarlo { .. } => "coverage",
        Job::Profile(_) => "profile",
        Job::RateCdf(_) => "rate-cdf",
    }
}

fn method_of(job: &Job) -> Method {
    match job {
        Job::Coverage(m) | Job::Profile(m) | Job::RateCdf(m) => m.curve_method(),
        Job::MonteCarlo { mode, .. } => mode.method(),
    }
}

/// Simulation budget when the run does not override it.
pub fn default_realizations(mode: PrecoderMode) -> u64 {
    match mode {
        PrecoderMode::FullLq => DEFAULT_FULL_LQ_REALIZATIONS,
        _ => DEFAULT_REALIZATIONS,
    }
}

/// Executes every scenario the options enable, in listed order.
pub fn run_experiment(spec: &ExperimentSpec, options: &RunOptions) -> Result<ReportBundle> {
    spec.validate()?;
    let start = Instant::now();
    let mut bundle = ReportBundle::empty(&spec.name, options.seed);
    for s in &spec.scenarios {
        let enabled = if s.job.is_monte_carlo() {
            options.monte_carlo
        } else {
            options.analytic
        };
        if !enabled {
            continue;
        }
        let label = spec.label_of(s);
        match &s.job {
            Job::Coverage(method) => {
                let mut curve = CoverageModel::new(s.config.clone(), *method)?.curve(&spec.thresholds_db)?;
                curve.scenario = label;
                bundle.curves.push(curve);
            }
            Job::MonteCarlo { mode, shape } => {
                let n = options.realizations.unwrap_or_else(|| default_realizations(*mode));
                let plan = SimulationPlan::new(s.config.clone(), n, options.seed, *mode)?.with_shape(*shape);
                let mut curve = simulate(&plan)?.coverage(&spec.thresholds_db)?;
                curve.scenario = label;
                bundle.curves.push(curve);
            }
            Job::Profile(method) => {
                let model = CoverageModel::new(s.config.clone(), *method)?;
                bundle.profiles.push(ProfileRow {
                    scenario: label,
                    method: method.curve_method(),
                    profile: rate_profile(&model)?,
                    config_digest: s.config.digest(),
                });
            }
            Job::RateCdf(method) => {
                let model = CoverageModel::new(s.config.clone(), *method)?;
                let cdf = spec.rate_grid.iter().map(|t| rate_cdf(&model, *t)).collect::<Result<_>>()?;
                bundle.rate_cdfs.push(RateCdfCurve {
                    scenario: label,
                    method: method.curve_method(),
                    rates: spec.rate_grid.clone(),
                    cdf,
                    config_digest: s.config.digest(),
                });
            }
        }
    }
    if options.analytic && !spec.scaling.is_empty() {
        let config = spec
            .scaling_config
            .clone()
            .ok_or_else(|| Error::Usage(format!("experiment `{}` has scaling points but no network", spec.name)))?;
        for p in &spec.scaling {
            bundle.scaling.push(scaling_row(&config, p)?);
        }
    }
    bundle.seal();
    if options.record_wall_time {
        bundle.metadata.wall_time_s = Some(start.elapsed().as_secs_f64());
    }
    Ok(bundle)
}

/// Evaluates one scaling point.
pub fn scaling_row(config: &NetworkConfig, point: &ScalingPoint) -> Result<ScalingRow> {
    let query = ScalingQuery::new(point.epsilon, point.delta, db_to_linear(point.threshold_db), config.clone())?;
    let check = verify_scaling(&query)?;
    Ok(ScalingRow {
        epsilon: point.epsilon,
        delta: point.delta,
        threshold_db: point.threshold_db,
        r_formula: optimal_radius(&query)?,
        r_pre_asymptotic: optimal_radius_pre_asymptotic(&query)?,
        r_numeric: check.r_numeric,
        ratio: check.ratio,
        mean_cluster_size: mean_cluster_size(&query)?,
        config_digest: config.digest(),
    })
}
