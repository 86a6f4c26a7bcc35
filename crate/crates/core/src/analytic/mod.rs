//! Analytic coverage bounds and the rate machinery built on them.
//!
//! All four curves average a conditional success probability over the user
//! position (uniform in the cluster disc) and the serving distance (nearest
//! point of the BS process). Each threshold is evaluated independently, so
//! curves are bit-identical whatever order or thread their points run on.

mod baselines;
mod full_csi;
mod geometry;
mod kernel;
mod pcsi;
mod rate;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use full_csi::{coverage_type1_full, coverage_type2_full};
pub use geometry::{chord_length, published_chord_length, wedge_angle};
pub use pcsi::{coverage_type1_pcsi, coverage_type2_pcsi, coverage_type3_pcsi};
pub use rate::{rate_cdf, rate_profile, RateProfile};


use crate::error::{Error, Result};
use crate::model::{db_to_linear, CsiLimit, NetworkConfig};

/// How a curve was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "analytic-full-csi")]
    AnalyticFullCsi,
    #[serde(rename = "analytic-pcsi")]
    AnalyticPcsi,
    #[serde(rename = "analytic-ideal")]
    AnalyticIdeal,
    #[serde(rename = "analytic-nocloud")]
    AnalyticNoCloud,
    #[serde(rename = "monte-carlo-full-lq")]
    MonteCarloFullLq,
    #[serde(rename = "monte-carlo-diagonal-approx")]
    MonteCarloDiagonal,
    #[serde(rename = "monte-carlo-pcsi-exclusion")]
    MonteCarloPcsi,
}

impl Method {
    pub fn tag(&self) -> &'static str {
        match self {
            Method::AnalyticFullCsi => "analytic-full-csi",
            Method::AnalyticPcsi => "analytic-pcsi",
            Method::AnalyticIdeal => "analytic-ideal",
            Method::AnalyticNoCloud => "analytic-nocloud",
            Method::MonteCarloFullLq => "monte-carlo-full-lq",
            Method::MonteCarloDiagonal => "monte-carlo-diagonal-approx",
            Method::MonteCarloPcsi => "monte-carlo-pcsi-exclusion",
        }
    }

    pub fn is_monte_carlo(&self) -> bool {
        matches!(
            self,
            Method::MonteCarloFullLq | Method::MonteCarloDiagonal | Method::MonteCarloPcsi
        )
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.tag())
    }
}

/// Coverage probabilities over an ascending list of thresholds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageCurve {
    pub scenario: String,
    pub method: Method,
    pub thresholds_db: Vec<f64>,
    pub coverage: Vec<f64>,
    /// 95% binomial half-widths, Monte Carlo curves only.
    pub ci_halfwidth: Option<Vec<f64>>,
    pub config_digest: String,
    /// Probability mass of users the bound or the simulation leaves out.
    pub excluded_mass: f64,
}

impl CoverageCurve {
    pub fn is_non_increasing(&self, slack: f64) -> bool {
        self.coverage.windows(2).all(|w| w[1] <= w[0] + slack)
    }
}

/// Which boundary formula the full-CSI type-I term integrates against.
///
/// `Published` uses `√(r_u² cos²φ + R²) − r_u cos φ` for type-I users (the
/// straddling users always use the exact boundary). This reproduces the
/// reference full-CSI curves. `Exact` uses the true boundary distance for
/// both types, which makes the bound continuous across the type seam.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChordModel {
    #[default]
    Published,
    Exact,
}

/// Discretization controls for the analytic integrals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalyticSettings {
    /// Number of equal angular sectors `M` over the full turn.
    pub angular_segments: usize,
    /// Gauss-Legendre panels per radial dimension.
    pub radial_panels: usize,
    /// Gauss-Legendre order inside each panel.
    pub quadrature_order: usize,
    pub chord_model: ChordModel,
}

impl Default for AnalyticSettings {
    fn default() -> Self {
        Self {
            angular_segments: 128,
            radial_panels: 4,
            quadrature_order: 8,
            chord_model: ChordModel::Published,
        }
    }
}

impl AnalyticSettings {
    pub fn validate(&self) -> Result<()> {
        if self.angular_segments < 8 || self.angular_segments % 2 != 0 {
            return Err(Error::config(
                "angular_segments",
                "angular segments must be even and at least 8",
            ));
        }
        if self.radial_panels == 0 {
            return Err(Error::config("radial_panels", "at least one radial panel is required"));
        }
        if !(2..=512).contains(&self.quadrature_order) {
            return Err(Error::config("quadrature_order", "order must lie in [2, 512]"));
        }
        Ok(())
    }
}

/// A request for one analytic curve.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverageQuery {
    pub config: NetworkConfig,
    pub thresholds_db: Vec<f64>,
    pub settings: AnalyticSettings,
}

impl CoverageQuery {
    pub fn new(config: NetworkConfig, thresholds_db: Vec<f64>) -> Self {
        Self {
            config,
            thresholds_db,
            settings: AnalyticSettings::default(),
        }
    }

    pub fn with_settings(mut self, settings: AnalyticSettings) -> Self {
        self.settings = settings;
        self
    }

    fn validate(&self) -> Result<()> {
        self.config.validate()?;
        self.settings.validate()?;
        if self.thresholds_db.is_empty() {
            return Err(Error::config("thresholds_db", "at least one threshold is required"));
        }
        if self.thresholds_db.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::config("thresholds_db", "thresholds must ascend strictly"));
        }
        Ok(())
    }
}

/// Analytic coverage model selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnalyticMethod {
    FullCsi,
    PartialCsi,
    Ideal,
    NoCloud,
}

impl AnalyticMethod {
    pub fn curve_method(&self) -> Method {
        match self {
            AnalyticMethod::FullCsi => Method::AnalyticFullCsi,
            AnalyticMethod::PartialCsi => Method::AnalyticPcsi,
            AnalyticMethod::Ideal => Method::AnalyticIdeal,
            AnalyticMethod::NoCloud => Method::AnalyticNoCloud,
        }
    }

    /// The cooperative method a configuration's CSI limit calls for.
    pub fn for_config(config: &NetworkConfig) -> Self {
        match config.csi_limit {
            CsiLimit::Full => AnalyticMethod::FullCsi,
            CsiLimit::Limited(_) => AnalyticMethod::PartialCsi,
        }
    }
}

/// A configuration bound to an analytic method; evaluates coverage at any
/// linear threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverageModel {
    config: NetworkConfig,
    method: AnalyticMethod,
    settings: AnalyticSettings,
}

impl CoverageModel {
    pub fn new(config: NetworkConfig, method: AnalyticMethod) -> Result<Self> {
        config.validate()?;
        if method == AnalyticMethod::PartialCsi && config.csi_limit == CsiLimit::Full {
            return Err(Error::config(
                "csi_limit",
                "partial-CSI coverage needs a finite csi_limit",
            ));
        }
        Ok(Self {
            config,
            method,
            settings: AnalyticSettings::default(),
        })
    }

    pub fn with_settings(mut self, settings: AnalyticSettings) -> Result<Self> {
        settings.validate()?;
        self.settings = settings;
        Ok(self)
    }

    pub fn config(&self) -> &NetworkConfig {
        &self.config
    }

    pub fn method(&self) -> AnalyticMethod {
        self.method
    }

    pub fn settings(&self) -> &AnalyticSettings {
        &self.settings
    }

    pub fn coverage_linear(&self, threshold: f64) -> Result<f64> {
        if !(threshold >= 0.0) || !threshold.is_finite() {
            return Err(Error::domain(format!("threshold must be finite and non-negative, got {threshold}")));
        }
        let value = match self.method {
            AnalyticMethod::FullCsi => full_csi::coverage_at(&self.config, &self.settings, threshold)?,
            AnalyticMethod::PartialCsi => {
                let l = match self.config.csi_limit {
                    CsiLimit::Limited(l) => l,
                    CsiLimit::Full => unreachable!("checked at construction"),
                };
                pcsi::coverage_at(&self.config, &self.settings, threshold, l)?
            }
            AnalyticMethod::Ideal => baselines::ideal_at(&self.config, threshold)?,
            AnalyticMethod::NoCloud => baselines::nocloud_at(&self.config, threshold)?,
        };
        Ok(value.clamp(0.0, 1.0))
    }

    pub fn coverage_many(&self, thresholds: &[f64]) -> Result<Vec<f64>> {
        thresholds.par_iter().map(|t| self.coverage_linear(*t)).collect()
    }

    /// Mass of users the bound drops.
    pub fn excluded_mass(&self) -> Result<f64> {
        match self.method {
            AnalyticMethod::FullCsi => full_csi::excluded_mass(&self.config, &self.settings),
            AnalyticMethod::PartialCsi => match self.config.csi_limit {
                CsiLimit::Limited(l) => pcsi::excluded_mass(&self.config, &self.settings, l),
                CsiLimit::Full => unreachable!("checked at construction"),
            },
            AnalyticMethod::Ideal | AnalyticMethod::NoCloud => Ok(0.0),
        }
    }

    pub fn curve(&self, thresholds_db: &[f64]) -> Result<CoverageCurve> {
        let linear: Vec<f64> = thresholds_db.iter().map(|db| db_to_linear(*db)).collect();
        Ok(CoverageCurve {
            scenario: scenario_label(&self.config),
            method: self.method.curve_method(),
            thresholds_db: thresholds_db.to_vec(),
            coverage: self.coverage_many(&linear)?,
            ci_halfwidth: None,
            config_digest: self.config.digest(),
            excluded_mass: self.excluded_mass()?,
        })
    }
}

/// Legend-style label `(area km², spacing m[, L])`.
pub fn scenario_label(config: &NetworkConfig) -> String {
    let area = trim_number(config.cluster_area_km2());
    let spacing = trim_number(config.spacing());
    match config.csi_limit {
        CsiLimit::Full => format!("({area},{spacing})"),
        CsiLimit::Limited(l) => format!("({area},{spacing},{l})"),
    }
}

fn trim_number(x: f64) -> String {
    let s = format!("{:.4}", x);
    let s = s.trim_end_matches('0').trim_end_matches('.');
    s.to_string()
}

fn run(query: &CoverageQuery, method: AnalyticMethod) -> Result<CoverageCurve> {
    query.validate()?;
    CoverageModel::new(query.config.clone(), method)?
        .with_settings(query.settings)?
        .curve(&query.thresholds_db)
}

/// Full-CSI lower bound on coverage.
pub fn coverage_full_csi(query: &CoverageQuery) -> Result<CoverageCurve> {
    run(query, AnalyticMethod::FullCsi)
}

/// Partial-CSI lower bound on coverage; the config must carry a finite CSI limit.
pub fn coverage_pcsi(query: &CoverageQuery) -> Result<CoverageCurve> {
    run(query, AnalyticMethod::PartialCsi)
}

/// Noise-limited coverage of full-network cooperation.
pub fn coverage_ideal(config: &NetworkConfig, thresholds_db: &[f64]) -> Result<CoverageCurve> {
    run(&CoverageQuery::new(config.clone(), thresholds_db.to_vec()), AnalyticMethod::Ideal)
}

/// Coverage of a conventional network: nearest-BS service, everyone else interferes.
pub fn coverage_nocloud(config: &NetworkConfig, thresholds_db: &[f64]) -> Result<CoverageCurve> {
    run(&CoverageQuery::new(config.clone(), thresholds_db.to_vec()), AnalyticMethod::NoCloud)
}
