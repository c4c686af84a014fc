//! Deterministic instance generators.
//!
//! Every generator is a pure function of its parameters and seed. The
//! `layered` kind builds the cover lower-bound metric: `h` groups of `n/h`
//! points where all distances within group `i`, and from group `i` to any
//! lower group, equal `(t + eps)^i`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::metric::FiniteMetric;
use crate::plane::PlaneGraph;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenKind {
    Uniform,
    RandomTree,
    Grid,
    RandomPlanar,
    Layered,
}

impl std::str::FromStr for GenKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(Self::Uniform),
            "random_tree" => Ok(Self::RandomTree),
            "grid" => Ok(Self::Grid),
            "random_planar" => Ok(Self::RandomPlanar),
            "layered" => Ok(Self::Layered),
            other => Err(Error::BadParams(format!("unknown kind {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct GenParams {
    pub n: usize,
    /// number of groups for the layered metric
    pub h: usize,
    /// base stretch for the layered metric
    pub t: f64,
    /// gap parameter of the layered metric; distances are (t+eps)^i
    pub eps: f64,
}

impl Default for GenParams {
    fn default() -> Self {
        Self {
            n: 16,
            h: 4,
            t: 2.0,
            eps: 0.01,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Instance {
    Graph(WeightedGraph),
    Plane(PlaneGraph),
    Metric(FiniteMetric),
}

impl Instance {
    pub fn kind_name(&self) -> &'static str {
        match self {
            Instance::Graph(_) => "graph",
            Instance::Plane(_) => "plane",
            Instance::Metric(_) => "metric",
        }
    }
}

pub fn gen_instance(kind: GenKind, params: &GenParams, seed: u64) -> Result<Instance> {
    if params.n == 0 {
        return Err(Error::BadParams("n must be positive".into()));
    }
    match kind {
        GenKind::Uniform => Ok(Instance::Metric(FiniteMetric::uniform(params.n))),
        GenKind::RandomTree => Ok(Instance::Graph(random_tree(params.n, seed))),
        GenKind::Grid => {
            let side = (params.n as f64).sqrt().round() as usize;
            if side * side != params.n || side == 0 {
                return Err(Error::BadParams(format!(
                    "grid needs a perfect square n, got {}",
                    params.n
                )));
            }
            Ok(Instance::Plane(grid(side, side)))
        }
        GenKind::RandomPlanar => {
            if params.n < 3 {
                return Err(Error::BadParams("random_planar needs n >= 3".into()));
            }
            Ok(Instance::Plane(random_planar(params.n, seed)))
        }
        GenKind::Layered => layered(params).map(Instance::Metric),
    }
}

/// Random tree by uniform attachment, weights drawn from {1, .., 10}.
pub fn random_tree(n: usize, seed: u64) -> WeightedGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::with_capacity(n.saturating_sub(1));
    for v in 1..n {
        let u = rng.gen_range(0..v);
        let w = rng.gen_range(1..=10) as f64;
        edges.push((u, v, w));
    }
    WeightedGraph::new(n, &edges).expect("tree edges are valid")
}

/// Axis-aligned unit grid with its standard embedding
/// (counter-clockwise neighbor order: right, up, left, down).
pub fn grid(w: usize, h: usize) -> PlaneGraph {
    let idx = |r: usize, c: usize| r * w + c;
    let mut edges = Vec::new();
    for r in 0..h {
        for c in 0..w {
            if c + 1 < w {
                edges.push((idx(r, c), idx(r, c + 1), 1.0));
            }
            if r + 1 < h {
                edges.push((idx(r, c), idx(r + 1, c), 1.0));
            }
        }
    }
    let g = WeightedGraph::new(w * h, &edges).expect("grid edges are valid");
    let mut rotation = vec![Vec::new(); w * h];
    for r in 0..h {
        for c in 0..w {
            let v = idx(r, c);
            let mut rot = Vec::new();
            if c + 1 < w {
                rot.push(idx(r, c + 1));
            }
            if r > 0 {
                rot.push(idx(r - 1, c));
            }
            if c > 0 {
                rot.push(idx(r, c - 1));
            }
            if r + 1 < h {
                rot.push(idx(r + 1, c));
            }
            rotation[v] = rot;
        }
    }
    PlaneGraph::new(g, rotation).expect("grid embedding is planar")
}

/// Random planar triangulation by repeated vertex insertion into a random
/// face, starting from a triangle. Edge weights are drawn from {1, .., 10}.
pub fn random_planar(n: usize, seed: u64) -> PlaneGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let weight = |rng: &mut ChaCha8Rng| rng.gen_range(1..=10) as f64;
    let mut edges: Vec<(usize, usize, f64)> = vec![
        (0, 1, weight(&mut rng)),
        (1, 2, weight(&mut rng)),
        (0, 2, weight(&mut rng)),
    ];
    let mut rotation: Vec<Vec<usize>> = vec![vec![1, 2], vec![2, 0], vec![0, 1]];
    // faces as directed vertex triples; both sides of the starting triangle
    let mut faces: Vec<[usize; 3]> = vec![[0, 1, 2], [0, 2, 1]];
    for x in 3..n {
        let fi = rng.gen_range(0..faces.len());
        let [a, b, c] = faces[fi];
        edges.push((x, a, weight(&mut rng)));
        edges.push((x, b, weight(&mut rng)));
        edges.push((x, c, weight(&mut rng)));
        // rotation of the new vertex follows the face orientation; each
        // face vertex gets x spliced between its outgoing and incoming
        // face neighbors
        rotation.push(vec![a, b, c]);
        splice(&mut rotation[a], b, c, x);
        splice(&mut rotation[b], c, a, x);
        splice(&mut rotation[c], a, b, x);
        faces.swap_remove(fi);
        faces.push([a, b, x]);
        faces.push([b, c, x]);
        faces.push([c, a, x]);
    }
    let g = WeightedGraph::new(n, &edges).expect("triangulation edges are valid");
    PlaneGraph::new(g, rotation).expect("incremental embedding is planar")
}

/// Insert `item` between the (cyclically adjacent) pair `first`, `second`.
fn splice(rot: &mut Vec<usize>, first: usize, second: usize, item: usize) {
    let i = rot.iter().position(|&v| v == first).expect("first present");
    let j = rot.iter().position(|&v| v == second).expect("second present");
    debug_assert_eq!((i + 1) % rot.len(), j, "face neighbors must be adjacent");
    rot.insert(i + 1, item);
    let _ = j;
}

/// Layered lower-bound metric: `h` groups of `n/h` points, distances
/// within group `i` and from group `i` down to any lower group all equal
/// `(t + eps)^i` (groups indexed from 1).
pub fn layered(params: &GenParams) -> Result<FiniteMetric> {
    let (n, h, t, eps) = (params.n, params.h, params.t, params.eps);
    if h == 0 || n % h != 0 {
        return Err(Error::BadParams(format!("h={h} must divide n={n}")));
    }
    if t <= 1.0 || eps <= 0.0 {
        return Err(Error::BadParams("layered needs t > 1 and eps > 0".into()));
    }
    let per = n / h;
    let group = |p: usize| p / per + 1;
    let mut matrix = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let g = group(i).max(group(j));
                matrix[i][j] = (t + eps).powi(g as i32);
            }
        }
    }
    FiniteMetric::from_matrix(matrix)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::shortest_path_metric;

    #[test]
    fn uniform_instance() {
        let inst = gen_instance(GenKind::Uniform, &GenParams { n: 5, ..Default::default() }, 0)
            .unwrap();
        let Instance::Metric(m) = inst else { panic!() };
        for i in 0..5 {
            for j in 0..5 {
                assert_eq!(m.dist(i, j), if i == j { 0.0 } else { 1.0 });
            }
        }
    }

    #[test]
    fn layered_matches_construction() {
        // 3 groups of 2, t=2, eps=0.1: distance inside group i is 2.1^i
        let params = GenParams {
            n: 6,
            h: 3,
            t: 2.0,
            eps: 0.1,
        };
        let m = layered(&params).unwrap();
        assert!(m.validate().is_valid());
        assert!(m.is_ultrametric());
        assert!((m.dist(0, 1) - 2.1).abs() < 1e-12);
        assert!((m.dist(2, 3) - 2.1f64.powi(2)).abs() < 1e-12);
        assert!((m.dist(4, 5) - 2.1f64.powi(3)).abs() < 1e-12);
        assert!((m.dist(0, 5) - 2.1f64.powi(3)).abs() < 1e-12);
    }

    #[test]
    fn layered_needs_divisor() {
        let params = GenParams {
            n: 7,
            h: 3,
            ..Default::default()
        };
        assert!(matches!(layered(&params), Err(Error::BadParams(_))));
    }

    #[test]
    fn grid_is_planar_with_valid_embedding() {
        let inst = gen_instance(GenKind::Grid, &GenParams { n: 9, ..Default::default() }, 0)
            .unwrap();
        let Instance::Plane(pg) = inst else { panic!() };
        assert_eq!(pg.n(), 9);
        assert_eq!(pg.graph().num_edges(), 12);
        pg.check_euler().unwrap();
    }

    #[test]
    fn random_tree_is_a_tree_and_deterministic() {
        let t1 = random_tree(64, 7);
        let t2 = random_tree(64, 7);
        assert_eq!(t1, t2);
        assert!(t1.is_tree());
        assert!(shortest_path_metric(&t1).is_ok());
    }

    #[test]
    fn random_planar_is_triangulated() {
        let pg = random_planar(24, 3);
        pg.check_euler().unwrap();
        assert!(pg.is_triangulated());
        assert_eq!(pg.graph().num_edges(), 3 * 24 - 6);
        assert_eq!(random_planar(24, 3), pg);
    }
}
