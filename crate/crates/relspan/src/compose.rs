//! Cover-to-spanner composition.
//!
//! Given a `t`-cover, build a reliable spanner for the whole metric by
//! placing a uniform-metric reliable spanner inside every cluster with the
//! reliability budget split across the cover depth. The damaged set of an
//! attack is assembled constructively: clusters mostly swallowed by the
//! attack fail outright, and the surviving clusters contribute their own
//! damage (constellation center rule or expander shadow closure).
//!
//! Residual guarantees are verified, not assumed: [`verify_residual`] runs
//! hop-bounded relaxations on the residual graph and measures actual
//! stretch and hop counts against the advertised bounds.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::cover::{ramsey_cover, tree_cover, validate_cover, Cover};
use crate::error::{Error, Result};
use crate::hst::hst_from_ultrametric;
use crate::instance::Instance;
use crate::metric::{shortest_path_metric, FiniteMetric};
use crate::uniform::{
    build_g2t, build_g2t_minus_1, constellation_draws, shadow_damage, ConstantsMode, DamageResult,
    UniformSpanner,
};
use crate::util::{derive_seed, le_tol};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Model {
    Oblivious,
    Deterministic,
}

impl std::str::FromStr for Model {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "oblivious" => Ok(Self::Oblivious),
            "deterministic" => Ok(Self::Deterministic),
            other => Err(Error::BadParams(format!("unknown model {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Odd,
    Even,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Uniform,
    Ultrametric,
    Tree,
    Planar,
    General,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Uniform => "uniform",
            Family::Ultrametric => "ultrametric",
            Family::Tree => "tree",
            Family::Planar => "planar",
            Family::General => "general",
        }
    }
}

impl std::str::FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(Self::Uniform),
            "ultrametric" => Ok(Self::Ultrametric),
            "tree" => Ok(Self::Tree),
            "planar" => Ok(Self::Planar),
            "general" => Ok(Self::General),
            other => Err(Error::BadParams(format!("unknown family {other:?}"))),
        }
    }
}

/// Per-cluster sub-spanner. Tiny or odd-sized clusters fall back to
/// complete graphs, which trivially satisfy every bound.
#[derive(Debug, Clone, PartialEq)]
pub enum SubSpanner {
    /// Star union with the given centers (global indices).
    Constellation { centers: Vec<usize> },
    /// Expander spanner over the cluster, in cluster-local indices.
    Expander(Box<UniformSpanner>),
    Complete,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterSpanner {
    /// Sorted global point indices.
    pub members: Vec<usize>,
    /// Reliability budget inside this cluster (`theta / depth`).
    pub theta_inner: f64,
    pub sub: SubSpanner,
}

/// A reliable spanner for a finite metric, with enough provenance to
/// compute constructive damaged sets.
#[derive(Debug, Clone, PartialEq)]
pub struct ReliableSpanner {
    pub n: usize,
    /// Deduplicated edges, weighted by metric distance.
    pub edges: Vec<(usize, usize, f64)>,
    pub clusters: Vec<ClusterSpanner>,
    pub theta: f64,
    /// Quality of the cover this spanner was composed over.
    pub cover_t: f64,
    pub cover_depth: usize,
    /// Generic advertised stretch (`2 t_cov`, `(2t-1) t_cov`, ...).
    pub delta_adv: f64,
    /// Hop bound of the certifying paths.
    pub hop_adv: usize,
    /// Family-specific improved stretch bound that verification runs
    /// against; equals `delta_adv` when no improvement applies.
    pub improved_bound: f64,
    pub model: Model,
    pub family: Option<Family>,
    /// Clusters that fell back to complete graphs.
    pub complete_fallbacks: usize,
}

impl ReliableSpanner {
    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn adjacency(&self) -> Vec<Vec<(usize, f64)>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(u, v, w) in &self.edges {
            adj[u].push((v, w));
            adj[v].push((u, w));
        }
        adj
    }
}

fn check_cover(m: &FiniteMetric, c: &Cover) -> Result<()> {
    let v = validate_cover(m, c, c.advertised_t)?;
    if !v.is_valid() {
        return Err(Error::InvalidCover(v.uncovered_count, c.advertised_t));
    }
    Ok(())
}

/// Oblivious composition: an independent constellation inside every cluster
/// with reliability `theta / depth`. Two-hop paths inside the covering
/// cluster certify stretch `2 t_cov`.
pub fn oblivious_from_cover(
    m: &FiniteMetric,
    c: &Cover,
    theta: f64,
    seed: u64,
) -> Result<ReliableSpanner> {
    check_cover(m, c)?;
    let theta_inner = theta / c.depth.max(1) as f64;
    let draws = constellation_draws(theta_inner);
    let mut edges: HashMap<(usize, usize), f64> = HashMap::new();
    let mut clusters = Vec::with_capacity(c.clusters.len());
    for (ci, cl) in c.clusters.iter().enumerate() {
        let nc = cl.points.len();
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, ci as u64));
        let mut centers: Vec<usize> = Vec::new();
        let mut distinct = vec![false; nc];
        let mut distinct_count = 0usize;
        for _ in 0..draws {
            let pick = rng.gen_range(0..nc);
            if !distinct[pick] {
                distinct[pick] = true;
                distinct_count += 1;
                centers.push(cl.points[pick]);
            }
            if distinct_count == nc {
                break; // every member is a center; more draws change nothing
            }
        }
        centers.sort_unstable();
        for &center in &centers {
            for &v in &cl.points {
                if v != center {
                    let key = (center.min(v), center.max(v));
                    edges.entry(key).or_insert_with(|| m.dist(key.0, key.1));
                }
            }
        }
        clusters.push(ClusterSpanner {
            members: cl.points.clone(),
            theta_inner,
            sub: SubSpanner::Constellation { centers },
        });
    }
    let mut edge_list: Vec<(usize, usize, f64)> =
        edges.into_iter().map(|((u, v), w)| (u, v, w)).collect();
    edge_list.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
    Ok(ReliableSpanner {
        n: m.n(),
        edges: edge_list,
        clusters,
        theta,
        cover_t: c.advertised_t,
        cover_depth: c.depth,
        delta_adv: 2.0 * c.advertised_t,
        hop_adv: 2,
        improved_bound: 2.0 * c.advertised_t,
        model: Model::Oblivious,
        family: None,
        complete_fallbacks: 0,
    })
}

/// Deterministic composition: an expander spanner inside every cluster with
/// reliability `theta / depth`, odd (`2t-1` hops) or even (`2t` hops)
/// variant. Clusters too small, of odd size, or with an infeasible block
/// structure fall back to complete graphs and are counted.
pub fn det_from_cover(
    m: &FiniteMetric,
    c: &Cover,
    theta: f64,
    t: usize,
    parity: Parity,
    constants: ConstantsMode,
    seed: u64,
) -> Result<ReliableSpanner> {
    check_cover(m, c)?;
    assert!(t >= 1);
    let theta_inner = theta / c.depth.max(1) as f64;
    let mut edges: HashMap<(usize, usize), f64> = HashMap::new();
    let mut clusters = Vec::with_capacity(c.clusters.len());
    let mut complete_fallbacks = 0usize;
    for (ci, cl) in c.clusters.iter().enumerate() {
        let nc = cl.points.len();
        let cluster_seed = derive_seed(seed, 0x5000 + ci as u64);
        let built: Option<UniformSpanner> = if nc < 4 {
            None
        } else {
            match parity {
                Parity::Even => build_g2t(nc, theta_inner, t, cluster_seed, constants).ok(),
                Parity::Odd => {
                    if t == 1 {
                        None // a 1-hop spanner is the complete graph
                    } else {
                        build_g2t_minus_1(nc, theta_inner, t, cluster_seed, constants).ok()
                    }
                }
            }
        };
        let sub = match built {
            Some(us) => {
                for &(lu, lv, _) in us.graph.edges() {
                    let (u, v) = (cl.points[lu], cl.points[lv]);
                    let key = (u.min(v), u.max(v));
                    edges.entry(key).or_insert_with(|| m.dist(key.0, key.1));
                }
                SubSpanner::Expander(Box::new(us))
            }
            None => {
                complete_fallbacks += 1;
                for (ai, &u) in cl.points.iter().enumerate() {
                    for &v in &cl.points[ai + 1..] {
                        edges.entry((u, v)).or_insert_with(|| m.dist(u, v));
                    }
                }
                SubSpanner::Complete
            }
        };
        clusters.push(ClusterSpanner {
            members: cl.points.clone(),
            theta_inner,
            sub,
        });
    }
    let mut edge_list: Vec<(usize, usize, f64)> =
        edges.into_iter().map(|((u, v), w)| (u, v, w)).collect();
    edge_list.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
    let hop_adv = match parity {
        Parity::Odd => 2 * t - 1,
        Parity::Even => 2 * t,
    };
    let delta_adv = hop_adv as f64 * c.advertised_t;
    Ok(ReliableSpanner {
        n: m.n(),
        edges: edge_list,
        clusters,
        theta,
        cover_t: c.advertised_t,
        cover_depth: c.depth,
        delta_adv,
        hop_adv,
        improved_bound: delta_adv,
        model: Model::Deterministic,
        family: None,
        complete_fallbacks,
    })
}

/// Constructive damaged set: failed clusters (those with
/// `|C| <= (1 + theta_inner) |C ∩ B|`) are surrendered whole; surviving
/// clusters contribute their own constructive damage.
pub fn constructive_damage(rs: &ReliableSpanner, b: &[usize]) -> Result<DamageResult> {
    let n = rs.n;
    let mut in_b = vec![false; n];
    for &v in b {
        in_b[v] = true;
    }
    let mut b_sorted: Vec<usize> = (0..n).filter(|&v| in_b[v]).collect();
    b_sorted.sort_unstable();
    let mut mask = in_b.clone();
    let mut trace = Vec::new();
    let mut extra = 0usize;
    for cs in &rs.clusters {
        let nc = cs.members.len();
        let hit = cs.members.iter().filter(|&&v| in_b[v]).count();
        let failed = nc as f64 <= (1.0 + cs.theta_inner) * hit as f64;
        if failed {
            for &v in &cs.members {
                if !mask[v] {
                    mask[v] = true;
                    extra += 1;
                }
            }
            trace.push(extra);
            continue;
        }
        match &cs.sub {
            SubSpanner::Complete => {}
            SubSpanner::Constellation { centers } => {
                if !centers.is_empty() && centers.iter().all(|&c| in_b[c]) {
                    for &v in &cs.members {
                        if !mask[v] {
                            mask[v] = true;
                            extra += 1;
                        }
                    }
                }
            }
            SubSpanner::Expander(us) => {
                let local_b: Vec<usize> = cs
                    .members
                    .iter()
                    .enumerate()
                    .filter(|&(_, &g)| in_b[g])
                    .map(|(l, _)| l)
                    .collect();
                if local_b.is_empty() {
                    continue;
                }
                let dmg = shadow_damage(us, &local_b)?;
                for &l in &dmg.b_hat {
                    let g = cs.members[l];
                    if !mask[g] {
                        mask[g] = true;
                        extra += 1;
                    }
                }
            }
        }
        trace.push(extra);
    }
    let b_hat: Vec<usize> = (0..n).filter(|&v| mask[v]).collect();
    let loss = if b_sorted.is_empty() {
        0.0
    } else {
        (b_hat.len() - b_sorted.len()) as f64 / b_sorted.len() as f64
    };
    Ok(DamageResult {
        b: b_sorted,
        b_hat,
        loss,
        trace,
    })
}

/// Residual verification outcome.
#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub pairs_checked: usize,
    pub violation_count: usize,
    /// First violating pairs with their hop-bounded residual length.
    pub violations: Vec<(usize, usize, f64)>,
    /// Worst residual stretch over certified pairs (0 when no pairs).
    pub worst_stretch: f64,
    /// Worst hop count needed to meet the stretch bound.
    pub worst_hops: usize,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.violation_count == 0
    }
}

/// Check that every pair outside `b_hat` has a path in the residual graph
/// (attack vertices removed, damaged-but-alive vertices usable) of length
/// at most `stretch_bound * d(p,q)` using at most `hop_bound` edges.
pub fn verify_residual(
    rs: &ReliableSpanner,
    m: &FiniteMetric,
    b: &[usize],
    b_hat: &[usize],
    stretch_bound: f64,
    hop_bound: usize,
) -> VerificationReport {
    let n = rs.n;
    let adj = rs.adjacency();
    let mut alive = vec![true; n];
    for &v in b {
        alive[v] = false;
    }
    let mut certified = vec![true; n];
    for &v in b_hat {
        certified[v] = false;
    }
    for &v in b {
        certified[v] = false;
    }
    let sources: Vec<usize> = (0..n).filter(|&v| certified[v]).collect();
    let per_source: Vec<(usize, usize, f64, usize, Vec<(usize, usize, f64)>)> = sources
        .par_iter()
        .map(|&p| {
            let mut cur = vec![f64::INFINITY; n];
            cur[p] = 0.0;
            let mut next = cur.clone();
            let mut first_ok = vec![usize::MAX; n];
            first_ok[p] = 0;
            for h in 1..=hop_bound {
                for u in 0..n {
                    let du = cur[u];
                    if du.is_finite() {
                        for &(v, w) in &adj[u] {
                            if alive[v] && du + w < next[v] {
                                next[v] = du + w;
                            }
                        }
                    }
                }
                cur.copy_from_slice(&next);
                for q in 0..n {
                    if certified[q] && first_ok[q] == usize::MAX {
                        let d = m.dist(p, q);
                        if d > 0.0 && le_tol(cur[q], stretch_bound * d) {
                            first_ok[q] = h;
                        }
                    }
                }
            }
            let mut pairs = 0usize;
            let mut vio_count = 0usize;
            let mut worst_stretch: f64 = 0.0;
            let mut worst_hops = 0usize;
            let mut vios = Vec::new();
            for q in (p + 1)..n {
                if !certified[q] {
                    continue;
                }
                pairs += 1;
                let d = m.dist(p, q);
                let stretch = cur[q] / d;
                worst_stretch = worst_stretch.max(stretch);
                if first_ok[q] == usize::MAX {
                    vio_count += 1;
                    if vios.len() < 16 {
                        vios.push((p, q, cur[q]));
                    }
                } else {
                    worst_hops = worst_hops.max(first_ok[q]);
                }
            }
            (pairs, vio_count, worst_stretch, worst_hops, vios)
        })
        .collect();
    let mut report = VerificationReport {
        pairs_checked: 0,
        violation_count: 0,
        violations: Vec::new(),
        worst_stretch: 0.0,
        worst_hops: 0,
    };
    for (pairs, vio_count, ws, wh, vios) in per_source {
        report.pairs_checked += pairs;
        report.violation_count += vio_count;
        report.worst_stretch = report.worst_stretch.max(ws);
        report.worst_hops = report.worst_hops.max(wh);
        if report.violations.len() < 256 {
            report.violations.extend(vios);
        }
    }
    report.violations.truncate(256);
    report
}

/// Parameters for [`build_reliable`].
#[derive(Debug, Clone, Copy)]
pub struct BuildParams {
    pub theta: f64,
    pub eps: f64,
    pub t: usize,
    pub k: usize,
    pub parity: Parity,
    pub constants: ConstantsMode,
    pub seed: u64,
}

impl Default for BuildParams {
    fn default() -> Self {
        Self {
            theta: 0.25,
            eps: 0.5,
            t: 2,
            k: 2,
            parity: Parity::Odd,
            constants: ConstantsMode::Practical,
            seed: 0,
        }
    }
}

/// Everything [`build_reliable`] produces: the spanner, the metric it
/// lives on, and the cover it was composed over.
#[derive(Debug, Clone)]
pub struct BuildOutcome {
    pub spanner: ReliableSpanner,
    pub metric: FiniteMetric,
    pub cover: Cover,
}

fn is_uniform_metric(m: &FiniteMetric) -> bool {
    if m.n() < 2 {
        return true;
    }
    let base = m.dist(0, 1);
    for i in 0..m.n() {
        for j in (i + 1)..m.n() {
            if !crate::util::eq_tol(m.dist(i, j), base) {
                return false;
            }
        }
    }
    true
}

/// Build a reliable spanner for the given instance family, dispatching the
/// right cover construction and composition, and record the improved
/// stretch bound that residual verification runs against.
pub fn build_reliable(
    instance: &Instance,
    family: Family,
    model: Model,
    params: &BuildParams,
) -> Result<BuildOutcome> {
    let eps = params.eps;
    let (metric, cover) = match (family, instance) {
        (Family::Uniform, Instance::Metric(m)) => {
            if !is_uniform_metric(m) {
                return Err(Error::FamilyMismatch("uniform"));
            }
            let cover = Cover::from_sets(m, 1.0, vec![((0..m.n()).collect(), None)])?;
            (m.clone(), cover)
        }
        (Family::Ultrametric, Instance::Metric(m)) => {
            if !m.is_ultrametric() {
                return Err(Error::FamilyMismatch("ultrametric"));
            }
            let hst = hst_from_ultrametric(m, 1.0)?;
            let cover = crate::cover::hst_cover(m, &hst, eps / 2.0)?;
            (m.clone(), cover)
        }
        (Family::Tree, Instance::Graph(g)) => {
            if !g.is_tree() {
                return Err(Error::FamilyMismatch("tree"));
            }
            let m = shortest_path_metric(g)?;
            let cover_eps = match model {
                Model::Oblivious => eps,
                Model::Deterministic => eps / 2.0,
            };
            let cover = tree_cover(g, cover_eps)?;
            (m, cover)
        }
        (Family::Planar, Instance::Plane(pg)) => {
            let m = shortest_path_metric(pg.graph())?;
            let cover_eps = match model {
                Model::Oblivious => eps,
                Model::Deterministic => eps / 2.0,
            };
            let cover = crate::cover::planar_cover(pg, cover_eps)?;
            (m, cover)
        }
        (Family::General, Instance::Metric(m)) => {
            let (cover, _info) = ramsey_cover(m, params.k, derive_seed(params.seed, 0xc0))?;
            (m.clone(), cover)
        }
        _ => return Err(Error::FamilyMismatch(family.name())),
    };
    let mut spanner = match model {
        Model::Oblivious => oblivious_from_cover(&metric, &cover, params.theta, params.seed)?,
        Model::Deterministic => det_from_cover(
            &metric,
            &cover,
            params.theta,
            params.t,
            params.parity,
            params.constants,
            params.seed,
        )?,
    };
    spanner.family = Some(family);
    let t = params.t as f64;
    spanner.improved_bound = match (family, model, params.parity) {
        (Family::Uniform, _, _) => spanner.delta_adv,
        (Family::Ultrametric, Model::Oblivious, _) => 2.0 + eps,
        (Family::Ultrametric, Model::Deterministic, Parity::Odd) => (2.0 + eps) * t - 1.0,
        (Family::Tree, Model::Oblivious, _) => 3.0 + eps,
        (Family::Tree, Model::Deterministic, Parity::Odd) => (4.0 + eps) * t - 3.0,
        (Family::Planar, Model::Oblivious, _) => 3.0 + 2.0 * eps,
        (Family::Planar, Model::Deterministic, Parity::Odd) => (4.0 + eps) * t - 3.0,
        _ => spanner.delta_adv,
    };
    // the improved argument never certifies more than the generic one
    spanner.improved_bound = spanner.improved_bound.min(spanner.delta_adv);
    Ok(BuildOutcome {
        spanner,
        metric,
        cover,
    })
}
