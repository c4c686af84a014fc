//! Finite metric spaces, derived quantities, and nets.

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::util::le_tol;

/// A finite metric given by a dense symmetric distance matrix with zero
/// diagonal. The universe every construction in this crate acts on.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteMetric {
    n: usize,
    dist: Vec<f64>, // row-major n*n
    labels: Option<Vec<String>>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricStats {
    pub diameter: f64,
    pub spread: f64,
}

/// Violations found by [`FiniteMetric::validate`]. Violations are data, not
/// errors: an empty report means the matrix is a metric.
#[derive(Debug, Clone, Default)]
pub struct MetricValidation {
    pub diagonal_violations: Vec<usize>,
    pub symmetry_violations: Vec<(usize, usize)>,
    /// Triples (i, j, k) with d(i,k) > d(i,j) + d(j,k).
    pub triangle_violations: Vec<(usize, usize, usize)>,
}

impl MetricValidation {
    pub fn is_valid(&self) -> bool {
        self.diagonal_violations.is_empty()
            && self.symmetry_violations.is_empty()
            && self.triangle_violations.is_empty()
    }
}

impl FiniteMetric {
    /// Wrap a matrix without validating it; call [`validate`] to inspect.
    ///
    /// [`validate`]: FiniteMetric::validate
    pub fn from_matrix(matrix: Vec<Vec<f64>>) -> Result<Self> {
        let n = matrix.len();
        let mut dist = Vec::with_capacity(n * n);
        for row in &matrix {
            if row.len() != n {
                return Err(Error::BadParams(format!(
                    "matrix row has {} entries, expected {n}",
                    row.len()
                )));
            }
            dist.extend_from_slice(row);
        }
        Ok(Self {
            n,
            dist,
            labels: None,
        })
    }

    /// The uniform metric: every pairwise distance is 1.
    pub fn uniform(n: usize) -> Self {
        let mut dist = vec![1.0; n * n];
        for i in 0..n {
            dist[i * n + i] = 0.0;
        }
        Self {
            n,
            dist,
            labels: None,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.n + j]
    }

    pub fn set_labels(&mut self, labels: Vec<String>) {
        self.labels = Some(labels);
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn matrix(&self) -> Vec<Vec<f64>> {
        (0..self.n)
            .map(|i| self.dist[i * self.n..(i + 1) * self.n].to_vec())
            .collect()
    }

    pub fn diameter(&self) -> f64 {
        let mut d = 0.0f64;
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                d = d.max(self.dist(i, j));
            }
        }
        d
    }

    pub fn min_positive(&self) -> f64 {
        let mut m = f64::INFINITY;
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                let d = self.dist(i, j);
                if d > 0.0 {
                    m = m.min(d);
                }
            }
        }
        m
    }

    /// Diameter and spread (diameter over minimum positive distance).
    pub fn stats(&self) -> Result<MetricStats> {
        if self.n < 2 {
            return Err(Error::TooFewPoints(self.n));
        }
        let diameter = self.diameter();
        let spread = diameter / self.min_positive();
        Ok(MetricStats { diameter, spread })
    }

    /// Diameter of a subset of points.
    pub fn diameter_of(&self, points: &[usize]) -> f64 {
        let mut d = 0.0f64;
        for (a, &i) in points.iter().enumerate() {
            for &j in &points[a + 1..] {
                d = d.max(self.dist(i, j));
            }
        }
        d
    }

    /// Check symmetry, the zero diagonal, and the triangle inequality.
    /// Witness lists are capped at 64 entries each.
    pub fn validate(&self) -> MetricValidation {
        const CAP: usize = 64;
        let mut report = MetricValidation::default();
        for i in 0..self.n {
            if self.dist(i, i) != 0.0 && report.diagonal_violations.len() < CAP {
                report.diagonal_violations.push(i);
            }
            for j in (i + 1)..self.n {
                let dij = self.dist(i, j);
                if (dij != self.dist(j, i) || dij <= 0.0 || !dij.is_finite())
                    && report.symmetry_violations.len() < CAP
                {
                    report.symmetry_violations.push((i, j));
                }
            }
        }
        'outer: for i in 0..self.n {
            for j in 0..self.n {
                if j == i {
                    continue;
                }
                for k in 0..self.n {
                    if k == i || k == j {
                        continue;
                    }
                    if !le_tol(self.dist(i, k), self.dist(i, j) + self.dist(j, k)) {
                        report.triangle_violations.push((i, j, k));
                        if report.triangle_violations.len() >= CAP {
                            break 'outer;
                        }
                    }
                }
            }
        }
        report
    }

    /// Witness for the ultrametric inequality failing, if any.
    pub fn ultrametric_witness(&self) -> Option<(usize, usize, usize)> {
        for i in 0..self.n {
            for j in 0..self.n {
                if j == i {
                    continue;
                }
                for k in 0..self.n {
                    if k == i || k == j {
                        continue;
                    }
                    if !le_tol(self.dist(i, k), self.dist(i, j).max(self.dist(j, k))) {
                        return Some((i, j, k));
                    }
                }
            }
        }
        None
    }

    pub fn is_ultrametric(&self) -> bool {
        self.ultrametric_witness().is_none()
    }
}

/// Shortest path metric of a connected weighted graph.
pub fn shortest_path_metric(g: &WeightedGraph) -> Result<FiniteMetric> {
    let n = g.n();
    let mut dist = vec![0.0; n * n];
    for src in 0..n {
        let d = g.dijkstra(src);
        for (v, &dv) in d.iter().enumerate() {
            if !dv.is_finite() {
                return Err(Error::DisconnectedGraph(v, src));
            }
            dist[src * n + v] = dv;
        }
    }
    Ok(FiniteMetric {
        n,
        dist,
        labels: None,
    })
}

/// An `r`-net over a ground set: pairwise distances exceed `r`, and every
/// ground point is within `r` of some net point.
#[derive(Debug, Clone, PartialEq)]
pub struct Net {
    pub points: Vec<usize>,
    pub radius: f64,
}

/// Farthest-point net construction, deterministic given the seed point.
///
/// Starts from `seed_point` and repeatedly adds the ground point farthest
/// from the current net (ties broken by lowest index) while that distance
/// exceeds `r`.
pub fn greedy_net(m: &FiniteMetric, ground: &[usize], r: f64, seed_point: usize) -> Result<Net> {
    if !ground.contains(&seed_point) {
        return Err(Error::SeedOutsideGround { seed: seed_point });
    }
    for &p in ground {
        if p >= m.n() {
            return Err(Error::IndexOutOfRange { index: p, n: m.n() });
        }
    }
    let mut points = vec![seed_point];
    // distance from each ground point to the current net
    let mut to_net: Vec<f64> = ground.iter().map(|&p| m.dist(p, seed_point)).collect();
    loop {
        let mut best = 0.0f64;
        let mut who = None;
        for (idx, &p) in ground.iter().enumerate() {
            if to_net[idx] > best {
                best = to_net[idx];
                who = Some((idx, p));
            }
        }
        match who {
            Some((idx, p)) if best > r => {
                points.push(p);
                let _ = idx;
                for (j, &q) in ground.iter().enumerate() {
                    to_net[j] = to_net[j].min(m.dist(q, p));
                }
            }
            _ => break,
        }
    }
    Ok(Net { points, radius: r })
}

impl Net {
    /// Exhaustive packing and covering check against a ground set.
    pub fn check(&self, m: &FiniteMetric, ground: &[usize]) -> bool {
        for (a, &p) in self.points.iter().enumerate() {
            for &q in &self.points[a + 1..] {
                if !(m.dist(p, q) > self.radius) {
                    return false;
                }
            }
        }
        ground.iter().all(|&p| {
            self.points
                .iter()
                .any(|&c| le_tol(m.dist(p, c), self.radius))
        })
    }
}

/// All-pairs distances by repeated relaxation (Floyd-Warshall). Used as the
/// independent oracle for [`shortest_path_metric`] in tests; kept here so
/// the CLI validation path can cross-check small instances too.
pub fn floyd_warshall(g: &WeightedGraph) -> Vec<Vec<f64>> {
    let n = g.n();
    let mut d = vec![vec![f64::INFINITY; n]; n];
    for i in 0..n {
        d[i][i] = 0.0;
    }
    for &(u, v, w) in g.edges() {
        d[u][v] = d[u][v].min(w);
        d[v][u] = d[v][u].min(w);
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    d
}

pub use crate::util::REL_TOL;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::util::eq_tol;

    fn path_graph(weights: &[f64]) -> WeightedGraph {
        let edges: Vec<(usize, usize, f64)> = weights
            .iter()
            .enumerate()
            .map(|(i, &w)| (i, i + 1, w))
            .collect();
        WeightedGraph::new(weights.len() + 1, &edges).unwrap()
    }

    #[test]
    fn path_metric_sums_weights() {
        let m = shortest_path_metric(&path_graph(&[1.0, 2.0])).unwrap();
        assert_eq!(m.dist(0, 2), 3.0);
    }

    #[test]
    fn single_edge_diameter() {
        let m = shortest_path_metric(&path_graph(&[5.0])).unwrap();
        assert_eq!(m.dist(0, 1), 5.0);
        assert_eq!(m.stats().unwrap().diameter, 5.0);
    }

    #[test]
    fn grid_corner_to_corner() {
        // 3x3 unit grid; breadth-first search is the oracle
        let mut edges = Vec::new();
        for r in 0..3usize {
            for c in 0..3usize {
                let v = r * 3 + c;
                if c + 1 < 3 {
                    edges.push((v, v + 1, 1.0));
                }
                if r + 1 < 3 {
                    edges.push((v, v + 3, 1.0));
                }
            }
        }
        let g = WeightedGraph::new(9, &edges).unwrap();
        let m = shortest_path_metric(&g).unwrap();
        let hops = g.bfs_hops(0, &vec![true; 9]);
        assert_eq!(hops[8], 4);
        assert_eq!(m.dist(0, 8), 4.0);
        let stats = m.stats().unwrap();
        assert_eq!(stats.diameter, 4.0);
        assert_eq!(stats.spread, 4.0);
        assert!(m.validate().is_valid());
    }

    #[test]
    fn disconnected_graph_is_error() {
        let g = WeightedGraph::new(3, &[(0, 1, 1.0)]).unwrap();
        assert!(matches!(
            shortest_path_metric(&g),
            Err(Error::DisconnectedGraph(..))
        ));
    }

    #[test]
    fn dijkstra_matches_floyd_warshall() {
        // deterministic scrambled graph on 20 vertices
        let mut edges = Vec::new();
        let mut w = 1.0;
        for i in 0..20usize {
            edges.push((i, (i + 1) % 20, w));
            edges.push((i, (i + 7) % 20, 2.5 + w));
            w = (w * 1.37) % 5.0 + 0.5;
        }
        let g = WeightedGraph::new(20, &edges).unwrap();
        let m = shortest_path_metric(&g).unwrap();
        let fw = floyd_warshall(&g);
        for i in 0..20 {
            for j in 0..20 {
                assert!(eq_tol(m.dist(i, j), fw[i][j]), "pair ({i},{j})");
            }
        }
    }

    #[test]
    fn uniform_stats() {
        let m = FiniteMetric::uniform(4);
        let s = m.stats().unwrap();
        assert_eq!(s.diameter, 1.0);
        assert_eq!(s.spread, 1.0);
        assert!(m.validate().is_valid());
    }

    #[test]
    fn line_stats() {
        let m = FiniteMetric::from_matrix(vec![
            vec![0.0, 1.0, 3.0],
            vec![1.0, 0.0, 2.0],
            vec![3.0, 2.0, 0.0],
        ])
        .unwrap();
        let s = m.stats().unwrap();
        assert_eq!(s.diameter, 3.0);
        assert_eq!(s.spread, 3.0);
    }

    #[test]
    fn too_few_points() {
        assert!(matches!(
            FiniteMetric::uniform(1).stats(),
            Err(Error::TooFewPoints(1))
        ));
    }

    #[test]
    fn validator_finds_violations() {
        assert!(FiniteMetric::uniform(4).validate().is_valid());
        // triangle violation: d(a,c)=5 but d(a,b)=d(b,c)=1
        let m = FiniteMetric::from_matrix(vec![
            vec![0.0, 1.0, 5.0],
            vec![1.0, 0.0, 1.0],
            vec![5.0, 1.0, 0.0],
        ])
        .unwrap();
        let rep = m.validate();
        assert!(rep.triangle_violations.contains(&(0, 1, 2)));
        // asymmetric entry
        let m = FiniteMetric::from_matrix(vec![
            vec![0.0, 1.0],
            vec![2.0, 0.0],
        ])
        .unwrap();
        assert_eq!(m.validate().symmetry_violations, vec![(0, 1)]);
    }

    #[test]
    fn greedy_net_collinear() {
        // points 0..4 on a line, unit spacing; hand-simulated farthest-point
        // loop gives {0, 4, 2}
        let g = path_graph(&[1.0; 4]);
        let m = shortest_path_metric(&g).unwrap();
        let ground: Vec<usize> = (0..5).collect();
        let net = greedy_net(&m, &ground, 1.5, 0).unwrap();
        assert_eq!(net.points, vec![0, 4, 2]);
        assert!(net.check(&m, &ground));
    }

    #[test]
    fn net_degenerate_radii() {
        let g = path_graph(&[1.0; 4]);
        let m = shortest_path_metric(&g).unwrap();
        let ground: Vec<usize> = (0..5).collect();
        // r at least the diameter keeps only the seed
        let net = greedy_net(&m, &ground, 4.0, 0).unwrap();
        assert_eq!(net.points, vec![0]);
        // r = 0 with distinct points forces the whole ground set
        let net = greedy_net(&m, &ground, 0.0, 0).unwrap();
        assert_eq!(net.points.len(), 5);
        assert!(net.check(&m, &ground));
    }

    #[test]
    fn net_seed_must_be_in_ground() {
        let m = FiniteMetric::uniform(4);
        assert!(matches!(
            greedy_net(&m, &[0, 1], 0.5, 3),
            Err(Error::SeedOutsideGround { seed: 3 })
        ));
    }
}
