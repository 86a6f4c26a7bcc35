//! Monte Carlo ground truth: PPP BS fields around a reference cluster,
//! LQ-based zero-forcing dirty paper coding inside it, and empirical
//! coverage and rate statistics of the typical user.
//!
//! Every realization draws from its own counter-addressed ChaCha streams, so
//! results are bit-identical for a given seed whatever the thread count.

mod linalg;
mod ppp;
mod realization;

use std::f64::consts::PI;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub use linalg::{lq_decompose, ChannelMatrix};
pub use ppp::{sample_annulus, sample_ppp, Point};
pub use realization::{build_realization, zf_dpc_sinr, ClusterRealization, Outcome, RealizationStatus, SinrSample};

use crate::analytic::{scenario_label, CoverageCurve, Method, RateProfile};
use crate::error::{Error, Result};
use crate::model::{db_to_linear, CsiLimit, NetworkConfig};

/// Interference beyond the truncation radius, as a fraction of the noise
/// power, used to pick the default radius.
const TAIL_NOISE_FRACTION: f64 = 0.1;
pub const MIN_COVERAGE_REALIZATIONS: u64 = 1_000;
pub const MIN_RATE_REALIZATIONS: u64 = 10_000;
const Z_95: f64 = 1.959963984540054;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClusterShape {
    Disc,
    /// Axis-aligned square with the same area as the disc of the cluster radius.
    Square,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PrecoderMode {
    /// Exact `|l_kk|²` from the LQ factor of the cluster channel.
    FullLq,
    /// Serving-link gain `|h|² r_b^{−α}` in place of `|l_kk|²`.
    DiagonalApprox,
    /// Only the cluster BSs among the user's `L` nearest are nulled.
    PcsiExclusion,
}

impl PrecoderMode {
    pub fn method(&self) -> Method {
        match self {
            PrecoderMode::FullLq => Method::MonteCarloFullLq,
            PrecoderMode::DiagonalApprox => Method::MonteCarloDiagonal,
            PrecoderMode::PcsiExclusion => Method::MonteCarloPcsi,
        }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            PrecoderMode::FullLq => "full-lq",
            PrecoderMode::DiagonalApprox => "diagonal-approx",
            PrecoderMode::PcsiExclusion => "pcsi-exclusion",
        }
    }
}

impl std::str::FromStr for PrecoderMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full-lq" => Ok(PrecoderMode::FullLq),
            "diagonal-approx" => Ok(PrecoderMode::DiagonalApprox),
            "pcsi-exclusion" => Ok(PrecoderMode::PcsiExclusion),
            other => Err(Error::config(
                "precoder_mode",
                format!("expected full-lq, diagonal-approx or pcsi-exclusion, got `{other}`"),
            )),
        }
    }
}

/// Dirty paper coding order of the cluster users in full-LQ mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EncodingOrder {
    /// Ascending distance of each scheduled user from the cluster center.
    CenterOut,
    /// Uniformly random per realization.
    Random,
}

/// What happens to a typical user whose serving BS is outside the
/// reference cluster.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BorderPolicy {
    /// Drop the realization (tallied as excluded).
    Exclude,
    /// Square clusters tile the plane; the user joins the tile of its
    /// serving BS and that tile cooperates instead.
    JoinServingTile,
}

pub(crate) fn square_half_side(radius: f64) -> f64 {
    0.5 * PI.sqrt() * radius
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationPlan {
    pub config: NetworkConfig,
    pub realizations: u64,
    pub seed: u64,
    /// Radius of the sampled BS field about the cluster center, meters.
    pub window_radius: f64,
    /// Interferers farther than this from the user are replaced by their
    /// mean contribution (or dropped without tail correction), meters.
    pub interference_truncation: f64,
    pub cluster_shape: ClusterShape,
    pub precoder_mode: PrecoderMode,
    pub encoding_order: EncodingOrder,
    pub border_policy: BorderPolicy,
    pub tail_correction: bool,
}

impl SimulationPlan {
    /// Plan with the default truncation radius and window.
    pub fn new(config: NetworkConfig, realizations: u64, seed: u64, mode: PrecoderMode) -> Result<Self> {
        config.validate()?;
        let mut plan = Self {
            config,
            realizations,
            seed,
            window_radius: 0.0,
            interference_truncation: 0.0,
            cluster_shape: ClusterShape::Disc,
            precoder_mode: mode,
            encoding_order: EncodingOrder::CenterOut,
            border_policy: BorderPolicy::Exclude,
            tail_correction: true,
        };
        let truncation = plan.default_truncation();
        plan = plan.with_truncation(truncation);
        plan.validate()?;
        Ok(plan)
    }

    /// Farthest cluster point from the cluster center.
    pub fn cluster_extent(&self) -> f64 {
        match self.cluster_shape {
            ClusterShape::Disc => self.config.cluster_radius,
            ClusterShape::Square => square_half_side(self.config.cluster_radius) * 2f64.sqrt(),
        }
    }

    /// Smallest truncation radius that still reaches every cooperating BS.
    fn truncation_floor(&self) -> f64 {
        match self.cluster_shape {
            ClusterShape::Disc => 3.0 * self.cluster_extent(),
            ClusterShape::Square => 4.0 * self.cluster_extent(),
        }
    }

    /// Radius where the mean interference beyond it is a tenth of the noise,
    /// and at least the truncation floor.
    fn default_truncation(&self) -> f64 {
        let c = &self.config;
        if c.noise_power <= 0.0 {
            return self.truncation_floor().max(20.0 * c.spacing());
        }
        let k = c.alpha - 2.0;
        let rho = (2.0 * PI * c.bs_density * c.tx_power / (k * TAIL_NOISE_FRACTION * c.noise_power)).powf(1.0 / k);
        rho.max(self.truncation_floor())
    }

    /// Sets the truncation radius and widens the window to cluster extent
    /// plus truncation plus five BS spacings.
    pub fn with_truncation(mut self, truncation: f64) -> Self {
        self.interference_truncation = truncation;
        self.window_radius = self.cluster_extent() + truncation + 5.0 * self.config.spacing();
        self
    }

    pub fn with_shape(self, shape: ClusterShape) -> Self {
        let plan = Self {
            cluster_shape: shape,
            ..self
        };
        let truncation = plan.interference_truncation.max(plan.truncation_floor());
        plan.with_truncation(truncation)
    }

    pub fn with_border_policy(mut self, policy: BorderPolicy) -> Self {
        self.border_policy = policy;
        self
    }

    pub fn with_encoding_order(mut self, order: EncodingOrder) -> Self {
        self.encoding_order = order;
        self
    }

    pub fn with_tail_correction(mut self, enabled: bool) -> Self {
        self.tail_correction = enabled;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.config.validate()?;
        if self.realizations == 0 {
            return Err(Error::config("realizations", "must be at least 1"));
        }
        if !(self.interference_truncation > 0.0) || !self.interference_truncation.is_finite() {
            return Err(Error::config("interference_truncation", "must be positive and finite"));
        }
        if self.window_radius < self.cluster_extent() + self.interference_truncation {
            return Err(Error::config(
                "window_radius",
                "must cover the cluster plus the truncation radius",
            ));
        }
        if self.border_policy == BorderPolicy::JoinServingTile && self.cluster_shape != ClusterShape::Square {
            return Err(Error::config("border_policy", "joining the serving tile needs square clusters"));
        }
        if self.precoder_mode == PrecoderMode::PcsiExclusion && self.config.csi_limit == CsiLimit::Full {
            return Err(Error::config("csi_limit", "pcsi-exclusion mode needs a finite csi_limit"));
        }
        Ok(())
    }

    /// Mean interference from beyond the truncation radius, per unit power.
    pub(crate) fn tail_interference(&self) -> f64 {
        if !self.tail_correction {
            return 0.0;
        }
        let c = &self.config;
        let k = c.alpha - 2.0;
        2.0 * PI * c.bs_density * self.interference_truncation.powf(-k) / k
    }

    pub fn scenario(&self) -> String {
        let base = scenario_label(&self.config);
        match (self.cluster_shape, self.border_policy) {
            (ClusterShape::Disc, _) => base,
            (ClusterShape::Square, BorderPolicy::Exclude) => format!("{base} square"),
            (ClusterShape::Square, BorderPolicy::JoinServingTile) => format!("{base} tiled"),
        }
    }

    /// Short hash of everything that determines the sample sequence.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.config.digest());
        h.update(format!(
            "{}|{}|{:e}|{:e}|{:?}|{:?}|{:?}|{:?}|{}",
            self.realizations,
            self.seed,
            self.window_radius,
            self.interference_truncation,
            self.cluster_shape,
            self.precoder_mode,
            self.encoding_order,
            self.border_policy,
            self.tail_correction
        ));
        h.finalize()[..8].iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Samples and tallies of one plan execution.
#[derive(Debug, Clone)]
pub struct SimulationRun {
    pub plan: SimulationPlan,
    /// `(realization index, sample)` in realization order.
    pub samples: Vec<(u64, SinrSample)>,
    pub empty_clusters: u64,
    pub excluded: u64,
    pub singular: u64,
}

/// Runs every realization of the plan.
pub fn simulate(plan: &SimulationPlan) -> Result<SimulationRun> {
    plan.validate()?;
    let outcomes: Vec<(u64, Outcome)> = (0..plan.realizations)
        .into_par_iter()
        .map(|i| build_realization(plan, i).map(|r| (i, zf_dpc_sinr(plan, &r, i))))
        .collect::<Result<_>>()?;
    let mut run = SimulationRun {
        plan: plan.clone(),
        samples: Vec::new(),
        empty_clusters: 0,
        excluded: 0,
        singular: 0,
    };
    for (i, outcome) in outcomes {
        match outcome {
            Outcome::Sample(s) => run.samples.push((i, s)),
            Outcome::EmptyCluster => run.empty_clusters += 1,
            Outcome::Excluded(_) => run.excluded += 1,
            Outcome::Singular => run.singular += 1,
        }
    }
    Ok(run)
}

impl SimulationRun {
    fn require_samples(&self) -> Result<usize> {
        match self.samples.len() {
            0 => Err(Error::Statistical(format!(
                "all {} realizations were excluded ({} empty clusters)",
                self.plan.realizations, self.empty_clusters
            ))),
            n => Ok(n),
        }
    }

    /// Fraction of realizations that produced no sample.
    pub fn excluded_fraction(&self) -> f64 {
        1.0 - self.samples.len() as f64 / self.plan.realizations as f64
    }

    /// Fraction of samples above each threshold, with 95% binomial half-widths.
    pub fn coverage(&self, thresholds_db: &[f64]) -> Result<CoverageCurve> {
        let n = self.require_samples()? as f64;
        let mut coverage = Vec::with_capacity(thresholds_db.len());
        let mut halfwidth = Vec::with_capacity(thresholds_db.len());
        for &t_db in thresholds_db {
            let t = db_to_linear(t_db);
            let hits = self.samples.iter().filter(|(_, s)| s.sinr > t).count() as f64;
            let p = hits / n;
            coverage.push(p);
            halfwidth.push(Z_95 * (p * (1.0 - p) / n).sqrt());
        }
        Ok(CoverageCurve {
            scenario: self.plan.scenario(),
            method: self.plan.precoder_mode.method(),
            thresholds_db: thresholds_db.to_vec(),
            coverage,
            ci_halfwidth: Some(halfwidth),
            config_digest: self.plan.config.digest(),
            excluded_mass: self.excluded_fraction(),
        })
    }

    /// Percentiles (linear interpolation between order statistics) and mean
    /// of `log₂(1 + SINR)`.
    pub fn rate_profile(&self) -> Result<RateProfile> {
        let n = self.require_samples()?;
        let mut rates: Vec<f64> = self.samples.iter().map(|(_, s)| s.sinr.ln_1p() / std::f64::consts::LN_2).collect();
        rates.sort_by(f64::total_cmp);
        let quantile = |q: f64| {
            let pos = q * (n - 1) as f64;
            let lo = pos.floor() as usize;
            let hi = (lo + 1).min(n - 1);
            rates[lo] + (pos - lo as f64) * (rates[hi] - rates[lo])
        };
        Ok(RateProfile {
            p5: quantile(0.05),
            p10: quantile(0.10),
            p50: quantile(0.50),
            mean: rates.iter().sum::<f64>() / n as f64,
        })
    }

    /// Raw samples as CSV, headed by comment lines with the seed and plan digest.
    pub fn write_samples<W: Write>(&self, out: W) -> Result<()> {
        let io = |e: std::io::Error| Error::io("<sample dump>", e);
        let mut out = out;
        writeln!(out, "# seed={} plan={}", self.plan.seed, self.plan.digest()).map_err(io)?;
        let mut w = csv::Writer::from_writer(out);
        let csv_err = |e: csv::Error| Error::io("<sample dump>", std::io::Error::other(e));
        w.write_record(["realization", "user_type", "mode", "sinr_linear"]).map_err(csv_err)?;
        for (i, s) in &self.samples {
            w.write_record([i.to_string(), s.user_type.label().to_string(), s.mode.tag().to_string(), format!("{:e}", s.sinr)])
                .map_err(csv_err)?;
        }
        w.flush().map_err(io)
    }
}

/// Empirical coverage curve of the plan.
pub fn empirical_coverage(plan: &SimulationPlan, thresholds_db: &[f64]) -> Result<CoverageCurve> {
    if plan.realizations < MIN_COVERAGE_REALIZATIONS {
        return Err(Error::config(
            "realizations",
            format!("coverage estimates need at least {MIN_COVERAGE_REALIZATIONS}"),
        ));
    }
    simulate(plan)?.coverage(thresholds_db)
}

/// Empirical rate profile of the plan.
pub fn empirical_rate_profile(plan: &SimulationPlan) -> Result<RateProfile> {
    if plan.realizations < MIN_RATE_REALIZATIONS {
        return Err(Error::config(
            "realizations",
            format!("rate profiles need at least {MIN_RATE_REALIZATIONS}"),
        ));
    }
    simulate(plan)?.rate_profile()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{type_probabilities, UserType};
    use num_complex::Complex64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn config(area: f64, spacing: f64) -> NetworkConfig {
        NetworkConfig::from_spacing_and_area(spacing, area).unwrap()
    }

    /// Cheap plan for tests that do not depend on far interference.
    fn local_plan(c: NetworkConfig, n: u64, mode: PrecoderMode) -> SimulationPlan {
        let plan = SimulationPlan::new(c, n, 42, mode).unwrap();
        let t = plan.truncation_floor();
        plan.with_truncation(t)
    }

    fn sinrs(run: &SimulationRun) -> Vec<(u64, f64)> {
        run.samples.iter().map(|(i, s)| (*i, s.sinr)).collect()
    }

    #[test]
    fn identical_across_thread_counts() {
        let plan = local_plan(config(0.5, 200.0), 300, PrecoderMode::FullLq);
        let with_threads = |n: usize| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .unwrap()
                .install(|| simulate(&plan).unwrap())
        };
        let a = with_threads(1);
        let b = with_threads(3);
        assert_eq!(sinrs(&a), sinrs(&b));
        assert_eq!((a.empty_clusters, a.excluded), (b.empty_clusters, b.excluded));
        let other = simulate(&SimulationPlan { seed: 43, ..plan.clone() }).unwrap();
        assert_ne!(sinrs(&a), sinrs(&other));
    }

    #[test]
    fn void_probability_of_tiny_clusters() {
        let c = NetworkConfig::new(density(), (0.01 / (PI * density())).sqrt()).unwrap();
        let plan = local_plan(c, 20_000, PrecoderMode::DiagonalApprox);
        let run = simulate(&plan).unwrap();
        let p = run.empty_clusters as f64 / 20_000.0;
        let expect = (-0.01f64).exp();
        let sd = (expect * (1.0 - expect) / 20_000.0).sqrt();
        assert!((p - expect).abs() < 4.0 * sd, "{p} vs {expect}");
    }

    fn density() -> f64 {
        crate::model::density_from_spacing(200.0)
    }

    #[test]
    fn type_one_frequency_matches_closed_form() {
        let c = config(0.5, 200.0);
        let plan = local_plan(c.clone(), 20_000, PrecoderMode::DiagonalApprox);
        let mut type1 = 0u64;
        for i in 0..plan.realizations {
            let r = build_realization(&plan, i).unwrap();
            if r.status != RealizationStatus::EmptyCluster && r.user_type == UserType::TypeI {
                type1 += 1;
                assert!(r.cluster_members.contains(&r.tagged_bs));
            }
            if r.status == RealizationStatus::Usable {
                assert!(r.cluster_members.contains(&r.tagged_bs));
            }
        }
        let n = plan.realizations as f64;
        let p = type1 as f64 / n;
        let expect = type_probabilities(c.bs_density, c.cluster_radius).type1;
        let sd = (expect * (1.0 - expect) / n).sqrt();
        assert!((p - expect).abs() < 3.0 * sd, "{p} vs {expect} ± {sd}");
    }

    #[test]
    fn tagged_bs_is_globally_nearest_and_users_own_their_cells() {
        let plan = local_plan(config(0.5, 200.0), 50, PrecoderMode::FullLq);
        for i in 0..plan.realizations {
            let r = build_realization(&plan, i).unwrap();
            let nearest = |q: Point| {
                (0..r.bs_points.len())
                    .min_by(|&a, &b| ppp::distance(r.bs_points[a], q).total_cmp(&ppp::distance(r.bs_points[b], q)))
                    .unwrap()
            };
            if r.status == RealizationStatus::EmptyCluster {
                continue;
            }
            assert_eq!(nearest(r.typical_user), r.tagged_bs);
            for (slot, &b) in r.cluster_members.iter().enumerate().filter(|_| !r.scheduled_users.is_empty()) {
                assert_eq!(nearest(r.scheduled_users[slot]), b);
            }
            if let Some(f) = &r.fades {
                assert!((0..f.rows()).all(|i| (0..f.cols()).all(|j| f.get(i, j).norm().is_finite())));
            }
        }
    }

    #[test]
    fn overwhelming_noise_kills_coverage() {
        let c = config(0.5, 200.0).with_noise_power(1e6);
        let plan = local_plan(c, 1_000, PrecoderMode::DiagonalApprox);
        let curve = empirical_coverage(&plan, &[-5.0]).unwrap();
        assert_eq!(curve.coverage[0], 0.0);
    }

    /// Without interferers the normalized SINR `sinr · σ² r_b^α` is Exp(1)
    /// in both modes: a lone cluster BS makes `|l_11| = |h| r_b^{−α/2}`.
    #[test]
    fn isolated_link_is_exponential() {
        let c = NetworkConfig::new(density(), 20.0).unwrap();
        for mode in [PrecoderMode::DiagonalApprox, PrecoderMode::FullLq] {
            let plan = SimulationPlan::new(c.clone(), 20_000, 5, mode)
                .unwrap()
                .with_truncation(1.0)
                .with_tail_correction(false);
            let mut values = Vec::new();
            for i in 0..plan.realizations {
                let r = build_realization(&plan, i).unwrap();
                if r.status != RealizationStatus::Usable || r.cluster_members.len() != 1 {
                    continue;
                }
                let r_b = ppp::distance(r.bs_points[r.tagged_bs], r.typical_user);
                if let Outcome::Sample(s) = zf_dpc_sinr(&plan, &r, i) {
                    values.push(s.sinr * c.noise_power * r_b.powi(4));
                }
            }
            let n = values.len() as f64;
            assert!(n > 50.0);
            let mean = values.iter().sum::<f64>() / n;
            let tail = values.iter().filter(|&&v| v > 1.0).count() as f64 / n;
            assert!((mean - 1.0).abs() < 4.0 / n.sqrt(), "{mode:?}: mean {mean}");
            let e = (-1.0f64).exp();
            assert!((tail - e).abs() < 4.0 * (e * (1.0 - e) / n).sqrt(), "{mode:?}: tail {tail}");
        }
    }

    #[test]
    fn serving_link_dominates_its_row() {
        let plan = local_plan(config(0.25, 200.0), 1, PrecoderMode::FullLq);
        let mut ratios = Vec::new();
        for i in 0..40_000 {
            if ratios.len() == 10_000 {
                break;
            }
            let r = build_realization(&plan, i).unwrap();
            if r.user_type != UserType::TypeI || r.status != RealizationStatus::Usable || r.cluster_members.len() < 2 {
                continue;
            }
            let fades = r.fades.as_ref().unwrap();
            let row = r.cluster_members.iter().position(|&b| b == r.tagged_bs).unwrap();
            let gain = |col: usize| {
                let d = ppp::distance(r.typical_user, r.bs_points[r.cluster_members[col]]);
                fades.get(row, col).norm() * d.powf(-2.0)
            };
            let off = (0..r.cluster_members.len()).filter(|&j| j != row).map(gain).fold(0.0, f64::max);
            ratios.push(gain(row) / off);
        }
        assert!(ratios.len() >= 10_000);
        ratios.sort_by(f64::total_cmp);
        assert!(ratios[ratios.len() / 2] > 1.0);
    }

    /// Two-sample Kolmogorov-Smirnov p-value (asymptotic).
    fn ks_p_value(mut a: Vec<f64>, mut b: Vec<f64>) -> f64 {
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        let (n, m) = (a.len() as f64, b.len() as f64);
        let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
        while i < a.len() && j < b.len() {
            if a[i] <= b[j] {
                i += 1;
            } else {
                j += 1;
            }
            d = d.max((i as f64 / n - j as f64 / m).abs());
        }
        let en = (n * m / (n + m)).sqrt();
        let lambda = (en + 0.12 + 0.11 / en) * d;
        let p: f64 = (1..100)
            .map(|k| {
                let k = k as f64;
                2.0 * (-1f64).powf(k - 1.0) * (-2.0 * k * k * lambda * lambda).exp()
            })
            .sum();
        p.clamp(0.0, 1.0)
    }

    #[test]
    fn interference_is_invariant_to_unitary_precoding() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let m = 6;
        let gains = [1.0, 0.7, 0.4, 0.25, 0.1, 0.05];
        let gaussian = |rng: &mut ChaCha8Rng| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
        };
        let mut plain = Vec::new();
        let mut precoded = Vec::new();
        for _ in 0..10_000 {
            let h: Vec<Complex64> = (0..m).map(|j| gaussian(&mut rng) * gains[j]).collect();
            let s: Vec<Complex64> = (0..m).map(|_| gaussian(&mut rng)).collect();
            plain.push(h.iter().zip(&s).map(|(a, b)| a * b).sum::<Complex64>().norm_sqr());

            let h: Vec<Complex64> = (0..m).map(|j| gaussian(&mut rng) * gains[j]).collect();
            let s: Vec<Complex64> = (0..m).map(|_| gaussian(&mut rng)).collect();
            let g = ChannelMatrix::new(m, m, (0..m * m).map(|_| gaussian(&mut rng)).collect()).unwrap();
            let (_, q) = lq_decompose(&g).unwrap();
            let x: Vec<Complex64> = (0..m).map(|i| (0..m).map(|k| q.get(k, i).conj() * s[k]).sum()).collect();
            precoded.push(h.iter().zip(&x).map(|(a, b)| a * b).sum::<Complex64>().norm_sqr());
        }
        let p = ks_p_value(plain, precoded);
        assert!(p > 0.01, "p = {p}");
    }

    #[test]
    fn doubling_truncation_barely_moves_coverage() {
        let plan = SimulationPlan::new(config(1.0, 200.0), 2_000, 3, PrecoderMode::DiagonalApprox).unwrap();
        let wide = plan.clone().with_truncation(2.0 * plan.interference_truncation);
        let thresholds: Vec<f64> = (-5..=19).step_by(3).map(f64::from).collect();
        let a = empirical_coverage(&plan, &thresholds).unwrap();
        let b = empirical_coverage(&wide, &thresholds).unwrap();
        for (x, y) in a.coverage.iter().zip(&b.coverage) {
            assert!((x - y).abs() < 0.003, "{x} vs {y}");
        }
    }

    #[test]
    fn disc_clusters_beat_squares_of_equal_area() {
        let thresholds: Vec<f64> = (-5..=19).step_by(3).map(f64::from).collect();
        let disc = SimulationPlan::new(config(0.5, 200.0), 10_000, 8, PrecoderMode::DiagonalApprox).unwrap();
        let square = disc.clone().with_shape(ClusterShape::Square);
        let a = empirical_coverage(&disc, &thresholds).unwrap();
        let b = empirical_coverage(&square, &thresholds).unwrap();
        let (ha, hb) = (a.ci_halfwidth.unwrap(), b.ci_halfwidth.unwrap());
        for i in 0..thresholds.len() {
            assert!(a.coverage[i] + ha[i] + hb[i] >= b.coverage[i], "at {} dB", thresholds[i]);
        }
        assert!(b.scenario.ends_with("square"));
    }

    #[test]
    fn more_csi_never_hurts_a_realization() {
        let base = config(0.63, 200.0);
        let run_with = |mode: PrecoderMode, l: u32| {
            let c = base.clone().with_csi_limit(CsiLimit::Limited(l));
            simulate(&local_plan(c, 1_000, mode)).unwrap()
        };
        let full = run_with(PrecoderMode::DiagonalApprox, 1);
        let lookup = |run: &SimulationRun| -> std::collections::HashMap<u64, f64> { sinrs(run).into_iter().collect() };
        let full = lookup(&full);
        let mut previous: Option<std::collections::HashMap<u64, f64>> = None;
        for l in [1, 2, 4, 8] {
            let current = lookup(&run_with(PrecoderMode::PcsiExclusion, l));
            for (i, v) in &current {
                if let Some(f) = full.get(i) {
                    assert!(v <= f);
                }
                if let Some(Some(p)) = previous.as_ref().map(|p| p.get(i)) {
                    assert!(p <= v);
                }
            }
            previous = Some(current);
        }
    }

    #[test]
    fn budgets_and_exclusion_errors() {
        let plan = local_plan(config(0.5, 200.0), 999, PrecoderMode::DiagonalApprox);
        assert!(matches!(empirical_coverage(&plan, &[0.0]), Err(Error::Config { .. })));
        assert!(matches!(empirical_rate_profile(&plan), Err(Error::Config { .. })));
        let c = NetworkConfig::new(density(), 1e-3).unwrap();
        let plan = local_plan(c, 1_000, PrecoderMode::DiagonalApprox);
        assert!(matches!(empirical_coverage(&plan, &[0.0]), Err(Error::Statistical(_))));
        let pcsi = SimulationPlan::new(config(0.5, 200.0), 10, 1, PrecoderMode::PcsiExclusion);
        assert!(matches!(pcsi, Err(Error::Config { .. })));
        let tiled = local_plan(config(0.5, 200.0), 10, PrecoderMode::FullLq).with_border_policy(BorderPolicy::JoinServingTile);
        assert!(tiled.validate().is_err());
    }

    #[test]
    fn rates_are_ordered_and_dumps_are_tagged() {
        let plan = local_plan(config(0.5, 200.0), 10_000, PrecoderMode::DiagonalApprox);
        let run = simulate(&plan).unwrap();
        let profile = run.rate_profile().unwrap();
        assert!(profile.is_ordered());
        let curve = run.coverage(&[-5.0, 0.0, 5.0, 10.0]).unwrap();
        assert!(curve.is_non_increasing(0.0));
        assert!(curve.ci_halfwidth.unwrap().iter().all(|h| *h > 0.0 && *h < 0.02));

        let mut buf = Vec::new();
        run.write_samples(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), format!("# seed=42 plan={}", plan.digest()));
        assert_eq!(lines.next().unwrap(), "realization,user_type,mode,sinr_linear");
        let first: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(first[2], "diagonal-approx");
        let (i, s) = run.samples[0];
        assert_eq!(first[0].parse::<u64>().unwrap(), i);
        assert_eq!(first[3].parse::<f64>().unwrap(), s.sinr);
        assert_eq!(text.lines().count(), run.samples.len() + 2);
    }

    #[test]
    fn tiled_squares_keep_every_user() {
        let plan = local_plan(config(0.5, 200.0), 1_000, PrecoderMode::DiagonalApprox)
            .with_shape(ClusterShape::Square)
            .with_border_policy(BorderPolicy::JoinServingTile);
        let run = simulate(&plan).unwrap();
        assert_eq!(run.excluded, 0);
        assert!(plan.scenario().ends_with("tiled"));
    }

    #[test]
    fn precoder_mode_names_round_trip() {
        for mode in [PrecoderMode::FullLq, PrecoderMode::DiagonalApprox, PrecoderMode::PcsiExclusion] {
            assert_eq!(mode.tag().parse::<PrecoderMode>().unwrap(), mode);
            assert_eq!(mode.method().tag(), format!("monte-carlo-{}", mode.tag()));
        }
        assert!(matches!("lq".parse::<PrecoderMode>(), Err(Error::Config { .. })));
    }
}
