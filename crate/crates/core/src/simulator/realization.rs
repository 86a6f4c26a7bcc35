//! One sampled network around the reference cluster and the typical user's
//! post-precoding SINR in it.

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use serde::Serialize;

use super::linalg::{last_lq_diagonal, ChannelMatrix};
use super::ppp::{distance, distance_sq, sample_annulus, Point};
use super::{BorderPolicy, ClusterShape, EncodingOrder, PrecoderMode, SimulationPlan};
use crate::error::Result;
use crate::model::{classify_user, CsiLimit, DistanceSample, UserType};

const TAG_USER: u64 = 0;
const TAG_SCHEDULE: u64 = 1;
const TAG_FADES: u64 = 2;
const TAG_ORDER: u64 = 3;
const TAG_RING: u64 = 16;
const TAGS_PER_REALIZATION: u64 = 1 << 16;
const SCHEDULE_ATTEMPTS: usize = 4000;
/// Half-width of the rejection square around a BS, in spacings. A cell
/// reaches this far with probability about e^{−16}.
const PROPOSAL_HALF: f64 = 2.0;
/// Largest proposal distance from its BS, in spacings (corner of the square).
const PROPOSAL_REACH: f64 = PROPOSAL_HALF * std::f64::consts::SQRT_2;

/// Independent generator for one purpose within one realization. Streams
/// depend only on `(seed, realization, tag)`, never on execution order.
fn stream(seed: u64, realization: u64, tag: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(realization.wrapping_mul(TAGS_PER_REALIZATION).wrapping_add(tag));
    rng
}

fn complex_gaussian<R: Rng>(rng: &mut R) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Whether the realization can contribute a sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RealizationStatus {
    Usable,
    /// No BS inside the reference cluster.
    EmptyCluster,
    /// The serving BS is outside the cluster, or with partial CSI every
    /// cluster BS is already among the known channels.
    Excluded,
}

#[derive(Debug, Clone)]
pub struct ClusterRealization {
    pub bs_points: Vec<Point>,
    /// Unit-mean power fades toward the typical user, one per BS.
    pub interference_fades: Vec<f64>,
    pub cluster_members: Vec<usize>,
    pub typical_user: Point,
    pub tagged_bs: usize,
    /// One user per cluster member (same order); the typical user occupies
    /// the tagged BS's slot. Only populated in full-LQ mode.
    pub scheduled_users: Vec<Point>,
    /// Small-scale fades, users × cluster members. Full-LQ mode only.
    pub fades: Option<ChannelMatrix>,
    /// Fade between the typical user and its serving BS.
    pub signal_fade: Complex64,
    /// Distance to the `L`-th nearest BS, partial-CSI mode only.
    pub lth_distance: Option<f64>,
    pub user_type: UserType,
    pub status: RealizationStatus,
}

/// Per-user SINR with the class of the user that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SinrSample {
    pub sinr: f64,
    pub user_type: UserType,
    pub mode: PrecoderMode,
}

fn in_cluster(p: Point, shape: ClusterShape, radius: f64) -> bool {
    match shape {
        ClusterShape::Disc => p[0] * p[0] + p[1] * p[1] <= radius * radius,
        ClusterShape::Square => square_tile(p, radius) == (0, 0),
    }
}

/// Index of the square tile containing `p`; tile `(0, 0)` is the reference
/// cluster.
fn square_tile(p: Point, radius: f64) -> (i64, i64) {
    let half = super::square_half_side(radius);
    let side = 2.0 * half;
    let index = |v: f64| ((v + half) / side).floor() as i64;
    (index(p[0]), index(p[1]))
}

/// Largest distance from `u` to a point of the cluster.
fn farthest_cluster_point(u: Point, shape: ClusterShape, radius: f64) -> f64 {
    match shape {
        ClusterShape::Disc => radius + u[0].hypot(u[1]),
        ClusterShape::Square => {
            let half = super::square_half_side(radius);
            (u[0].abs() + half).hypot(u[1].abs() + half)
        }
    }
}

fn drop_user<R: Rng>(shape: ClusterShape, radius: f64, rng: &mut R) -> Point {
    match shape {
        ClusterShape::Disc => {
            let r = radius * rng.random::<f64>().sqrt();
            let theta = std::f64::consts::TAU * rng.random::<f64>();
            [r * theta.cos(), r * theta.sin()]
        }
        ClusterShape::Square => {
            let half = super::square_half_side(radius);
            [rng.random_range(-half..=half), rng.random_range(-half..=half)]
        }
    }
}

/// Samples the BS field, the typical user and, in full-LQ mode, the other
/// scheduled users and the cluster channel fades.
pub fn build_realization(plan: &SimulationPlan, realization: u64) -> Result<ClusterRealization> {
    plan.validate()?;
    let config = &plan.config;
    let radius = config.cluster_radius;
    let spacing = config.spacing();
    let seed = plan.seed;

    let typical_user = drop_user(plan.cluster_shape, radius, &mut stream(seed, realization, TAG_USER));

    // Concentric rings of fixed width, each from its own stream, so a wider
    // window only appends points.
    let ring_width = 2.0 * spacing;
    let mut bs_points = Vec::new();
    let mut interference_fades = Vec::new();
    let mut k = 0u64;
    while (k as f64) * ring_width < plan.window_radius {
        let inner = k as f64 * ring_width;
        let outer = ((k + 1) as f64 * ring_width).min(plan.window_radius);
        let mut rng = stream(seed, realization, TAG_RING + k);
        let ring = sample_annulus(config.bs_density, inner, outer, &mut rng);
        interference_fades.extend(ring.iter().map(|_| -> f64 { Exp1.sample(&mut rng) }));
        bs_points.extend(ring);
        k += 1;
    }

    let mut cluster_members: Vec<usize> = (0..bs_points.len())
        .filter(|&i| in_cluster(bs_points[i], plan.cluster_shape, radius))
        .collect();
    let tagged_bs = bs_points
        .iter()
        .map(|p| distance_sq(*p, typical_user))
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map_or(0, |(i, _)| i);
    let r_u = typical_user[0].hypot(typical_user[1]);
    let joins_tile = plan.border_policy == BorderPolicy::JoinServingTile
        && !bs_points.is_empty()
        && !cluster_members.contains(&tagged_bs);
    if joins_tile {
        let tile = square_tile(bs_points[tagged_bs], radius);
        cluster_members = (0..bs_points.len())
            .filter(|&i| square_tile(bs_points[i], radius) == tile)
            .collect();
    }

    let mut realization_out = ClusterRealization {
        interference_fades,
        cluster_members,
        typical_user,
        tagged_bs,
        scheduled_users: Vec::new(),
        fades: None,
        signal_fade: complex_gaussian(&mut stream(seed, realization, TAG_FADES)),
        lth_distance: None,
        user_type: UserType::TypeIII,
        status: RealizationStatus::EmptyCluster,
        bs_points: Vec::new(),
    };
    if realization_out.cluster_members.is_empty() {
        realization_out.bs_points = bs_points;
        return Ok(realization_out);
    }

    let r_b = distance(bs_points[tagged_bs], typical_user);
    let mut usable = joins_tile || in_cluster(bs_points[tagged_bs], plan.cluster_shape, radius);
    let sample = match (plan.precoder_mode, config.csi_limit) {
        (PrecoderMode::PcsiExclusion, CsiLimit::Limited(l)) => {
            let mut d: Vec<f64> = bs_points.iter().map(|p| distance(*p, typical_user)).collect();
            let index = (l as usize).min(d.len()) - 1;
            let (_, r_l, _) = d.select_nth_unstable_by(index, f64::total_cmp);
            let r_l = *r_l;
            realization_out.lth_distance = Some(r_l);
            if !joins_tile {
                usable &= r_l < farthest_cluster_point(typical_user, plan.cluster_shape, radius);
            }
            DistanceSample::partial(r_u, r_b, r_l)
        }
        _ => DistanceSample::full(r_u, r_b),
    };
    realization_out.user_type = classify_user(&sample, radius);
    realization_out.status = if usable {
        RealizationStatus::Usable
    } else {
        RealizationStatus::Excluded
    };

    if usable && plan.precoder_mode == PrecoderMode::FullLq {
        let (center, half) = bounding_square(&bs_points, &realization_out.cluster_members);
        let reach = half + 2.0 * PROPOSAL_REACH * spacing;
        let local: Vec<usize> = (0..bs_points.len())
            .filter(|&i| {
                let p = bs_points[i];
                (p[0] - center[0]).abs() <= reach && (p[1] - center[1]).abs() <= reach
            })
            .collect();
        let mut rng = stream(seed, realization, TAG_SCHEDULE);
        let scheduled: Vec<Point> = realization_out
            .cluster_members
            .iter()
            .map(|&b| {
                if b == tagged_bs {
                    typical_user
                } else {
                    schedule_user(&bs_points, &local, b, spacing, plan.window_radius, &mut rng)
                }
            })
            .collect();
        let m = scheduled.len();
        let mut rng = stream(seed, realization, TAG_FADES);
        // The first draw is the signal fade of the diagonal modes.
        let _: Complex64 = complex_gaussian(&mut rng);
        let mut fades = ChannelMatrix::zeros(m, m);
        for i in 0..m {
            for j in 0..m {
                fades.set(i, j, complex_gaussian(&mut rng));
            }
        }
        realization_out.scheduled_users = scheduled;
        realization_out.fades = Some(fades);
    }
    realization_out.bs_points = bs_points;
    Ok(realization_out)
}

fn bounding_square(points: &[Point], members: &[usize]) -> (Point, f64) {
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for &i in members {
        for axis in 0..2 {
            lo[axis] = lo[axis].min(points[i][axis]);
            hi[axis] = hi[axis].max(points[i][axis]);
        }
    }
    let center = [0.5 * (lo[0] + hi[0]), 0.5 * (lo[1] + hi[1])];
    (center, 0.5 * (hi[0] - lo[0]).max(hi[1] - lo[1]))
}

/// Uniform point of the Voronoi cell of `owner`, clipped to the window, by
/// rejection from a square around the BS.
fn schedule_user(
    points: &[Point],
    local: &[usize],
    owner: usize,
    spacing: f64,
    window: f64,
    rng: &mut ChaCha8Rng,
) -> Point {
    let center = points[owner];
    let half = PROPOSAL_HALF * spacing;
    // A proposal at distance d from the owner can only be stolen by a BS
    // within 2d of the owner, and d ≤ PROPOSAL_REACH spacings.
    let mut neighbors: Vec<(f64, usize)> = local
        .iter()
        .filter(|&&j| j != owner)
        .map(|&j| (distance_sq(points[j], center), j))
        .filter(|(d2, _)| *d2 <= (2.0 * PROPOSAL_REACH * spacing).powi(2))
        .collect();
    neighbors.sort_by(|a, b| a.0.total_cmp(&b.0));
    for _ in 0..SCHEDULE_ATTEMPTS {
        let p = [
            center[0] + rng.random_range(-half..half),
            center[1] + rng.random_range(-half..half),
        ];
        if p[0] * p[0] + p[1] * p[1] > window * window {
            continue;
        }
        let d2 = distance_sq(p, center);
        let stolen = neighbors
            .iter()
            .take_while(|(n2, _)| *n2 <= 4.0 * d2)
            .any(|&(_, j)| distance_sq(points[j], p) < d2);
        if !stolen {
            return p;
        }
    }
    [center[0] + spacing / 100.0, center[1]]
}

/// `d^{−α}` from the squared distance.
fn path_gain(d2: f64, alpha: f64) -> f64 {
    if alpha == 4.0 {
        1.0 / (d2 * d2)
    } else {
        d2.powf(-0.5 * alpha)
    }
}

/// Outcome of one realization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Outcome {
    Sample(SinrSample),
    EmptyCluster,
    Excluded(UserType),
    /// The cluster channel was singular to working precision.
    Singular,
}

/// Typical-user SINR in the given realization.
pub fn zf_dpc_sinr(plan: &SimulationPlan, realization: &ClusterRealization, index: u64) -> Outcome {
    match realization.status {
        RealizationStatus::EmptyCluster => return Outcome::EmptyCluster,
        RealizationStatus::Excluded => return Outcome::Excluded(realization.user_type),
        RealizationStatus::Usable => {}
    }
    let config = &plan.config;
    let alpha = config.alpha;
    let u = realization.typical_user;
    let members = &realization.cluster_members;
    let r_b = distance(realization.bs_points[realization.tagged_bs], u);

    // Cluster BSs beyond r_l stay interferers under partial CSI.
    let nulled_sq = match (plan.precoder_mode, realization.lth_distance) {
        (PrecoderMode::PcsiExclusion, Some(r_l)) => r_l * r_l,
        _ => f64::INFINITY,
    };
    let truncation_sq = plan.interference_truncation * plan.interference_truncation;
    let mut interference = plan.tail_interference();
    for (j, p) in realization.bs_points.iter().enumerate() {
        let d2 = distance_sq(*p, u);
        if d2 > truncation_sq || (d2 <= nulled_sq && members.binary_search(&j).is_ok()) {
            continue;
        }
        interference += realization.interference_fades[j] * path_gain(d2, alpha);
    }
    interference *= config.tx_power;

    let signal = match plan.precoder_mode {
        PrecoderMode::FullLq => match full_lq_signal(plan, realization, index) {
            Some(s) => s,
            None => return Outcome::Singular,
        },
        _ => realization.signal_fade.norm_sqr() * path_gain(r_b * r_b, alpha),
    };
    let sinr = config.tx_power * signal / (config.noise_power + interference);
    Outcome::Sample(SinrSample {
        sinr,
        user_type: realization.user_type,
        mode: plan.precoder_mode,
    })
}

/// `|l_kk|²` of the typical user's row under the plan's encoding order.
fn full_lq_signal(plan: &SimulationPlan, realization: &ClusterRealization, index: u64) -> Option<f64> {
    let fades = realization.fades.as_ref()?;
    let members = &realization.cluster_members;
    let users = &realization.scheduled_users;
    let m = members.len();
    let mut order: Vec<usize> = (0..m).collect();
    match plan.encoding_order {
        EncodingOrder::CenterOut => {
            order.sort_by(|&a, &b| users[a][0].hypot(users[a][1]).total_cmp(&users[b][0].hypot(users[b][1])))
        }
        EncodingOrder::Random => order.shuffle(&mut stream(plan.seed, index, TAG_ORDER)),
    }
    let typical_slot = members.iter().position(|&b| b == realization.tagged_bs)?;
    let k = order.iter().position(|&i| i == typical_slot)?;

    let half_alpha = plan.config.alpha / 2.0;
    let mut h = ChannelMatrix::zeros(k + 1, m);
    for (row, &i) in order.iter().take(k + 1).enumerate() {
        for (col, &b) in members.iter().enumerate() {
            let d = distance(users[i], realization.bs_points[b]);
            h.set(row, col, fades.get(i, col) * d.powf(-half_alpha));
        }
    }
    let l = last_lq_diagonal(&h, k);
    let signal = l * l;
    (signal.is_finite() && signal > f64::MIN_POSITIVE).then_some(signal)
}
