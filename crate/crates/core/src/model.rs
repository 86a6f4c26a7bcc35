//! Scenario configuration, unit calibration and the distance distributions
//! every coverage expectation integrates against.
//!
//! Units are fixed: meters for distances, BSs per m² for densities, linear
//! power for signal and noise. Transmit power is normalized to 1 and the
//! noise power carries the SNR calibration.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::numerics::erf;

/// Default reference point for the noise calibration: 10 dB mean SNR at 200 m.
pub const DEFAULT_SNR_REF_DB: f64 = 10.0;
pub const DEFAULT_SNR_REF_DISTANCE_M: f64 = 200.0;
pub const DEFAULT_ALPHA: f64 = 4.0;

/// How many intra-cluster channels each user reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CsiLimit {
    /// Every BS in the cluster knows the user's channel.
    Full,
    /// Only the `L` nearest cluster BSs know the user's channel.
    Limited(u32),
}

impl std::fmt::Display for CsiLimit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CsiLimit::Full => f.write_str("full"),
            CsiLimit::Limited(l) => write!(f, "{l}"),
        }
    }
}

/// Everything that defines a network scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkConfig {
    /// BS density λ in BSs per m².
    pub bs_density: f64,
    /// Pathloss exponent α, strictly above 2.
    pub alpha: f64,
    /// Noise power σ² relative to the unit transmit power.
    pub noise_power: f64,
    pub tx_power: f64,
    /// Radius of the disc cluster in meters.
    pub cluster_radius: f64,
    pub csi_limit: CsiLimit,
    /// Users per m². The simulator schedules one user in every BS cell and
    /// never reads this; it is carried through for reporting.
    pub user_density: Option<f64>,
}

impl NetworkConfig {
    /// Scenario with the default pathloss and noise calibration.
    pub fn new(bs_density: f64, cluster_radius: f64) -> Result<Self> {
        let config = Self {
            bs_density,
            alpha: DEFAULT_ALPHA,
            noise_power: calibrate_noise(DEFAULT_SNR_REF_DISTANCE_M, DEFAULT_SNR_REF_DB, 1.0, DEFAULT_ALPHA),
            tx_power: 1.0,
            cluster_radius,
            csi_limit: CsiLimit::Full,
            user_density: None,
        };
        config.validate()?;
        Ok(config)
    }

    /// Scenario from an inter-BS spacing in meters and a cluster area in km².
    pub fn from_spacing_and_area(spacing_m: f64, area_km2: f64) -> Result<Self> {
        if !(spacing_m > 0.0) {
            return Err(Error::config("spacing_m", "spacing must be positive"));
        }
        if !(area_km2 > 0.0) {
            return Err(Error::config("cluster_area_km2", "cluster area must be positive"));
        }
        Self::new(density_from_spacing(spacing_m), radius_from_area_km2(area_km2))
    }

    pub fn with_csi_limit(mut self, csi_limit: CsiLimit) -> Self {
        self.csi_limit = csi_limit;
        self
    }

    pub fn with_noise_power(mut self, noise_power: f64) -> Self {
        self.noise_power = noise_power;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 2.0) || !self.alpha.is_finite() {
            return Err(Error::config("alpha", "alpha must exceed 2"));
        }
        if !(self.bs_density > 0.0) || !self.bs_density.is_finite() {
            return Err(Error::config("density", "BS density must be positive"));
        }
        if !(self.cluster_radius > 0.0) || !self.cluster_radius.is_finite() {
            return Err(Error::config("cluster_radius_m", "cluster radius must be positive"));
        }
        if !(self.noise_power >= 0.0) {
            return Err(Error::config("noise_power", "noise power must be non-negative"));
        }
        if !(self.tx_power > 0.0) || !self.tx_power.is_finite() {
            return Err(Error::config("tx_power", "transmit power must be positive"));
        }
        if self.csi_limit == CsiLimit::Limited(0) {
            return Err(Error::config("csi_limit", "csi_limit must be at least 1"));
        }
        if let Some(u) = self.user_density {
            if !(u > 0.0) {
                return Err(Error::config("user_density", "user density must be positive"));
            }
        }
        Ok(())
    }

    /// Noise power over transmit power, the only combination SINR depends on.
    pub fn normalized_noise(&self) -> f64 {
        self.noise_power / self.tx_power
    }

    /// Inter-BS spacing `D = 2/√(πλ)`.
    pub fn spacing(&self) -> f64 {
        2.0 / (PI * self.bs_density).sqrt()
    }

    pub fn cluster_area_km2(&self) -> f64 {
        PI * self.cluster_radius * self.cluster_radius / 1e6
    }

    /// Mean number of BSs inside the cluster disc.
    pub fn mean_cluster_size(&self) -> f64 {
        self.bs_density * PI * self.cluster_radius * self.cluster_radius
    }

    /// Short stable identifier of the configuration.
    pub fn digest(&self) -> String {
        let mut hasher = Sha256::new();
        for v in [
            self.bs_density,
            self.alpha,
            self.noise_power,
            self.tx_power,
            self.cluster_radius,
            self.user_density.unwrap_or(-1.0),
        ] {
            hasher.update(v.to_bits().to_le_bytes());
        }
        hasher.update(self.csi_limit.to_string().as_bytes());
        let bytes = hasher.finalize();
        bytes[..8].iter().map(|b| format!("{b:02x}")).collect()
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

/// `λ = 4/(πD²)` for an inter-BS spacing `D` in meters.
pub fn density_from_spacing(spacing_m: f64) -> f64 {
    4.0 / (PI * spacing_m * spacing_m)
}

/// Disc radius in meters for an area in km².
pub fn radius_from_area_km2(area_km2: f64) -> f64 {
    (area_km2 * 1e6 / PI).sqrt()
}

/// Noise power giving `reference_snr_db` mean SNR at `reference_distance`.
pub fn calibrate_noise(reference_distance: f64, reference_snr_db: f64, tx_power: f64, alpha: f64) -> f64 {
    tx_power * reference_distance.powf(-alpha) / db_to_linear(reference_snr_db)
}

/// Density of the distance to the nearest point of a PPP.
pub fn pdf_nearest_bs(r: f64, density: f64) -> f64 {
    if r < 0.0 {
        return 0.0;
    }
    2.0 * PI * density * r * (-density * PI * r * r).exp()
}

/// Radius beyond which the nearest-point distance has tail mass below `tail`.
pub fn nearest_distance_cutoff(density: f64, tail: f64) -> f64 {
    ((1.0 / tail).ln() / (PI * density)).sqrt()
}

/// Density of the distance from the center of a disc of radius `R` to a
/// uniformly placed point.
pub fn pdf_user_radius(r: f64, cluster_radius: f64) -> Result<f64> {
    if r < 0.0 || r > cluster_radius {
        return Err(Error::domain(format!(
            "user radius {r} outside [0, {cluster_radius}]"
        )));
    }
    Ok(2.0 * r / (cluster_radius * cluster_radius))
}

/// Density of `r_l` given `r_b`, where `r_l² − r_b²` is Gamma(`L`, 1/(πλ)):
/// the distance to the `L`-th point of the PPP beyond the disc of radius `r_b`.
pub fn pdf_lth_given_rb(r_l: f64, r_b: f64, l: u32, density: f64) -> Result<f64> {
    if l == 0 {
        return Err(Error::domain("neighbor order must be at least 1"));
    }
    if r_l < r_b || r_b < 0.0 {
        return Err(Error::domain(format!(
            "conditional distance {r_l} below the serving distance {r_b}"
        )));
    }
    let excess = r_l * r_l - r_b * r_b;
    let mass = PI * density;
    let k = l as f64;
    let log_shape = if l == 1 { 0.0 } else { (k - 1.0) * excess.ln() };
    if l > 1 && excess == 0.0 {
        return Ok(0.0);
    }
    let log_pdf = std::f64::consts::LN_2 + k * mass.ln() - libm::lgamma(k) + log_shape + r_l.ln() - mass * excess;
    if r_l == 0.0 {
        return Ok(0.0);
    }
    Ok(log_pdf.exp())
}

/// Distances that decide a typical user's geometry relative to its cluster.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceSample {
    /// User to cluster center.
    pub r_u: f64,
    /// User to serving BS.
    pub r_b: f64,
    /// User to the farthest BS whose channel is known; absent with full CSI.
    pub r_l: Option<f64>,
}

impl DistanceSample {
    pub fn full(r_u: f64, r_b: f64) -> Self {
        Self { r_u, r_b, r_l: None }
    }

    pub fn partial(r_u: f64, r_b: f64, r_l: f64) -> Self {
        Self {
            r_u,
            r_b,
            r_l: Some(r_l),
        }
    }
}

/// Geometric class of a typical user.
///
/// With full CSI: `TypeI` when the serving disc lies inside the cluster,
/// `TypeII` when it straddles the boundary, `TypeIII` when it swallows the
/// whole cluster. With partial CSI the classes follow the known-channel disc
/// of radius `r_l` as well; `TypeIV` means fewer than `L` cluster BSs exist and
/// `TypeV` that the serving BS cannot be in the cluster.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum UserType {
    TypeI,
    TypeII,
    TypeIII,
    TypeIV,
    TypeV,
}

impl UserType {
    pub fn label(&self) -> &'static str {
        match self {
            UserType::TypeI => "I",
            UserType::TypeII => "II",
            UserType::TypeIII => "III",
            UserType::TypeIV => "IV",
            UserType::TypeV => "V",
        }
    }

    /// Whether the coverage bounds count this class.
    pub fn is_counted(&self) -> bool {
        !matches!(self, UserType::TypeIII | UserType::TypeIV | UserType::TypeV)
    }
}

impl std::fmt::Display for UserType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// Pure function of the sample distances and the cluster radius.
pub fn classify_user(sample: &DistanceSample, cluster_radius: f64) -> UserType {
    let DistanceSample { r_u, r_b, r_l } = *sample;
    let inner = cluster_radius - r_u;
    let outer = cluster_radius + r_u;
    match r_l {
        None => {
            if r_b <= inner {
                UserType::TypeI
            } else if r_b < outer {
                UserType::TypeII
            } else {
                UserType::TypeIII
            }
        }
        Some(r_l) => {
            if r_b >= outer {
                UserType::TypeV
            } else if r_l > outer {
                UserType::TypeIV
            } else if r_b < inner && r_l <= inner {
                UserType::TypeI
            } else if r_b < inner {
                UserType::TypeII
            } else {
                UserType::TypeIII
            }
        }
    }
}

/// Probabilities that a typical user is type I or type II (full CSI).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TypeProbabilities {
    pub type1: f64,
    pub type2: f64,
}

pub fn type_probabilities(density: f64, cluster_radius: f64) -> TypeProbabilities {
    let s = density.sqrt() * cluster_radius;
    let m = PI * density * cluster_radius * cluster_radius;
    let type1 = 1.0 - erf(PI.sqrt() * s) / s - ((-m).exp() - 1.0) / m;
    let type2 = (PI * s * erf(2.0 * PI.sqrt() * s) + (-4.0 * m).exp() - 1.0) / m;
    TypeProbabilities { type1, type2 }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{gauss_legendre, integrate_1d};

    const LAMBDA_200: f64 = 3.183_098_861_837_907e-5;

    #[test]
    fn density_and_cluster_size() {
        assert!((density_from_spacing(200.0) - 3.183_10e-5).abs() < 1e-9);
        assert!((density_from_spacing(400.0) - 7.957_75e-6).abs() < 1e-10);
        let c = NetworkConfig::from_spacing_and_area(200.0, 0.5).unwrap();
        assert!((c.mean_cluster_size() - 15.915).abs() < 1e-3);
        assert!((c.spacing() - 200.0).abs() < 1e-9);
    }

    #[test]
    fn noise_calibration() {
        assert!((calibrate_noise(200.0, 10.0, 1.0, 4.0) - 6.25e-11).abs() < 1e-24);
        assert!((calibrate_noise(200.0, 10.0, 2.0, 4.0) - 1.25e-10).abs() < 1e-24);
        let d: f64 = 321.0;
        assert!((calibrate_noise(d, 0.0, 1.0, 3.3) - d.powf(-3.3)).abs() < 1e-22);
    }

    #[test]
    fn nearest_pdf_shape() {
        assert_eq!(pdf_nearest_bs(0.0, LAMBDA_200), 0.0);
        let mode = 1.0 / (2.0 * PI * LAMBDA_200).sqrt();
        let h = 1e-3;
        let slope = (pdf_nearest_bs(mode + h, LAMBDA_200) - pdf_nearest_bs(mode - h, LAMBDA_200)) / (2.0 * h);
        assert!(slope.abs() < 1e-12);
        let rule = gauss_legendre(32).unwrap();
        let top = nearest_distance_cutoff(LAMBDA_200, 1e-13);
        let mass = integrate_1d(|r| pdf_nearest_bs(r, LAMBDA_200), 0.0, top, &rule, 16).unwrap();
        assert!((mass - 1.0).abs() < 1e-9);
    }

    #[test]
    fn user_radius_pdf() {
        let r = 564.19;
        assert!((pdf_user_radius(r, r).unwrap() - 2.0 / r).abs() < 1e-15);
        assert!(pdf_user_radius(r + 1.0, r).is_err());
        let rule = gauss_legendre(8).unwrap();
        let mass = integrate_1d(|x| pdf_user_radius(x, r).unwrap(), 0.0, r, &rule, 1).unwrap();
        assert!((mass - 1.0).abs() < 1e-14);
        let half = integrate_1d(|x| pdf_user_radius(x, r).unwrap(), 0.0, r / 2f64.sqrt(), &rule, 1).unwrap();
        assert!((half - 0.5).abs() < 1e-14);
    }

    #[test]
    fn conditional_pdf() {
        let rb = 137.0;
        let v = pdf_lth_given_rb(rb, rb, 1, LAMBDA_200).unwrap();
        assert!((v - 2.0 * PI * LAMBDA_200 * rb).abs() < 1e-15);
        assert!(pdf_lth_given_rb(rb - 1.0, rb, 2, LAMBDA_200).is_err());
        let rule = gauss_legendre(32).unwrap();
        for l in [1, 2, 4, 8] {
            for rb in [0.0, 50.0, 400.0] {
                let top = (rb * rb + 60.0 / (PI * LAMBDA_200)).sqrt();
                let mass = integrate_1d(|r| pdf_lth_given_rb(r, rb, l, LAMBDA_200).unwrap(), rb, top, &rule, 32).unwrap();
                assert!((mass - 1.0).abs() < 1e-9, "L={l} rb={rb} mass={mass}");
            }
        }
        // r_l² − r_b² is Gamma(2, 1/(πλ)); its mean is 2/(πλ).
        let rb: f64 = 120.0;
        let top = (rb * rb + 80.0 / (PI * LAMBDA_200)).sqrt();
        let mean = integrate_1d(
            |r| (r * r - rb * rb) * pdf_lth_given_rb(r, rb, 2, LAMBDA_200).unwrap(),
            rb,
            top,
            &rule,
            64,
        )
        .unwrap();
        let expected = 2.0 / (PI * LAMBDA_200);
        assert!(((mean - expected) / expected).abs() < 1e-6);
    }

    #[test]
    fn single_neighbor_pdf_is_conditioned_nearest_pdf() {
        let rb = 90.0;
        let survival = (-PI * LAMBDA_200 * rb * rb).exp();
        for r in [90.0, 150.0, 300.0, 777.0] {
            let direct = pdf_lth_given_rb(r, rb, 1, LAMBDA_200).unwrap();
            let conditioned = pdf_nearest_bs(r, LAMBDA_200) / survival;
            assert!((direct - conditioned).abs() < 1e-12 * conditioned.max(1e-300));
        }
    }

    #[test]
    fn classification_examples() {
        let r = 1.0;
        assert_eq!(classify_user(&DistanceSample::full(0.2, 0.3), r), UserType::TypeI);
        assert_eq!(classify_user(&DistanceSample::full(0.9, 0.3), r), UserType::TypeII);
        assert_eq!(classify_user(&DistanceSample::full(0.1, 1.2), r), UserType::TypeIII);
        assert_eq!(classify_user(&DistanceSample::partial(0.5, 0.2, 0.4), r), UserType::TypeI);
        assert_eq!(classify_user(&DistanceSample::partial(0.5, 0.2, 0.9), r), UserType::TypeII);
        assert_eq!(classify_user(&DistanceSample::partial(0.5, 0.7, 0.9), r), UserType::TypeIII);
        assert_eq!(classify_user(&DistanceSample::partial(0.5, 0.7, 1.6), r), UserType::TypeIV);
        assert_eq!(classify_user(&DistanceSample::partial(0.5, 1.5, 1.6), r), UserType::TypeV);
    }

    #[test]
    fn type_probabilities_against_double_quadrature() {
        let radius = radius_from_area_km2(1.0);
        let p = type_probabilities(LAMBDA_200, radius);
        let rule = gauss_legendre(48).unwrap();
        let region = |lo: &dyn Fn(f64) -> f64, hi: &dyn Fn(f64) -> f64| {
            integrate_1d(
                |ru| {
                    pdf_user_radius(ru, radius).unwrap()
                        * integrate_1d(|rb| pdf_nearest_bs(rb, LAMBDA_200), lo(ru), hi(ru), &rule, 8).unwrap()
                },
                0.0,
                radius,
                &rule,
                8,
            )
            .unwrap()
        };
        let p1 = region(&|_| 0.0, &|ru| radius - ru);
        let p2 = region(&|ru| radius - ru, &|ru| radius + ru);
        assert!((p.type1 - p1).abs() < 1e-6, "{} vs {p1}", p.type1);
        assert!((p.type2 - p2).abs() < 1e-6, "{} vs {p2}", p.type2);
    }

    #[test]
    fn type_probabilities_limits() {
        // 1 − p1 decays like 1/(√λ R), so p1 → 1 only slowly in the cluster size.
        let mut previous = 0.0;
        for mass in [0.5, 5.0, 50.0, 5e3, 5e7] {
            let radius = (mass / (PI * LAMBDA_200)).sqrt();
            let p = type_probabilities(LAMBDA_200, radius);
            assert!(p.type1 > previous);
            assert!(p.type1 + p.type2 <= 1.0 + 1e-12);
            assert!(p.type1 >= 0.0 && p.type2 >= 0.0);
            previous = p.type1;
        }
        let radius = (5e7 / (PI * LAMBDA_200)).sqrt();
        let p = type_probabilities(LAMBDA_200, radius);
        assert!((1.0 - p.type1) < 1e-3);
        assert!(p.type2 < 1e-3);
    }

    #[test]
    fn config_validation() {
        let c = NetworkConfig::from_spacing_and_area(200.0, 1.0).unwrap();
        assert!((c.cluster_radius - 564.189_583_5).abs() < 1e-6);
        let mut bad = c.clone();
        bad.alpha = 2.0;
        assert!(matches!(bad.validate(), Err(Error::Config { key, .. }) if key == "alpha"));
        assert!(c.clone().with_csi_limit(CsiLimit::Limited(0)).validate().is_err());
        assert_eq!(c.digest(), c.clone().digest());
        assert_ne!(c.digest(), c.clone().with_csi_limit(CsiLimit::Limited(2)).digest());
    }
}
