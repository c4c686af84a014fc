//! Hierarchically well-separated trees (HSTs).
//!
//! An HST realizes an ultrametric on the leaves of a rooted tree: every node
//! carries a label `Δ ≥ 0`, zero exactly at leaves and non-increasing toward
//! the leaves, and the distance between two leaves is the label of their
//! lowest common ancestor. In a `k`-HST labels drop by at least a factor `k`
//! per level.

use crate::error::{Error, Result};
use crate::metric::FiniteMetric;
use crate::util::{ceil_tol, le_tol};

#[derive(Debug, Clone)]
pub struct HstNode {
    pub label: f64,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
    /// Metric point index for leaves.
    pub point: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct Hst {
    pub nodes: Vec<HstNode>,
    pub root: usize,
    /// node id of each metric point's leaf
    pub leaf_of_point: Vec<usize>,
}

impl Hst {
    pub fn num_points(&self) -> usize {
        self.leaf_of_point.len()
    }

    pub fn is_leaf(&self, v: usize) -> bool {
        self.nodes[v].point.is_some()
    }

    fn depth(&self, mut v: usize) -> usize {
        let mut d = 0;
        while let Some(p) = self.nodes[v].parent {
            v = p;
            d += 1;
        }
        d
    }

    pub fn lca(&self, x_point: usize, y_point: usize) -> usize {
        let mut a = self.leaf_of_point[x_point];
        let mut b = self.leaf_of_point[y_point];
        let (mut da, mut db) = (self.depth(a), self.depth(b));
        while da > db {
            a = self.nodes[a].parent.unwrap();
            da -= 1;
        }
        while db > da {
            b = self.nodes[b].parent.unwrap();
            db -= 1;
        }
        while a != b {
            a = self.nodes[a].parent.unwrap();
            b = self.nodes[b].parent.unwrap();
        }
        a
    }

    /// Leaf distance: label of the lowest common ancestor.
    pub fn dist(&self, x_point: usize, y_point: usize) -> f64 {
        if x_point == y_point {
            0.0
        } else {
            self.nodes[self.lca(x_point, y_point)].label
        }
    }

    /// Metric point indices under each node, sorted.
    pub fn leaf_sets(&self) -> Vec<Vec<usize>> {
        (0..self.nodes.len())
            .map(|v| {
                let mut s = self.collect_points(v);
                s.sort_unstable();
                s
            })
            .collect()
    }

    fn collect_points(&self, v: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![v];
        while let Some(u) = stack.pop() {
            if let Some(p) = self.nodes[u].point {
                out.push(p);
            }
            stack.extend(self.nodes[u].children.iter().copied());
        }
        out
    }

    fn topo_order(&self) -> Vec<usize> {
        // parents before children
        let mut order = Vec::with_capacity(self.nodes.len());
        let mut stack = vec![self.root];
        while let Some(v) = stack.pop() {
            order.push(v);
            stack.extend(self.nodes[v].children.iter().copied());
        }
        order
    }

    /// Structural invariants: labels zero exactly at leaves, non-increasing
    /// toward leaves, and dropping by a factor `k` when `k > 1`.
    pub fn check_k_hst(&self, k: f64) -> bool {
        for (v, node) in self.nodes.iter().enumerate() {
            match node.point {
                Some(_) => {
                    if node.label != 0.0 || !node.children.is_empty() {
                        return false;
                    }
                }
                None => {
                    if !(node.label > 0.0) || node.children.is_empty() {
                        return false;
                    }
                }
            }
            if let Some(p) = node.parent {
                let bound = if k > 1.0 && !self.is_leaf(v) {
                    self.nodes[p].label / k
                } else {
                    self.nodes[p].label
                };
                if !le_tol(node.label, bound) {
                    return false;
                }
            }
        }
        true
    }

    /// Rebuild with labels rounded up to powers of `k` and equal-label
    /// parent/child chains contracted, yielding a `k`-HST whose leaf
    /// distances dominate the original ones by a factor less than `k`.
    pub fn rounded_to_powers(&self, k: f64) -> Hst {
        assert!(k > 1.0, "rounding needs k > 1");
        let round_up = |x: f64| -> f64 {
            if x <= 0.0 {
                0.0
            } else {
                k.powf(ceil_tol(x.ln() / k.ln()))
            }
        };
        // map old nodes to new ones top-down, merging children whose rounded
        // label equals the parent's
        let mut nodes: Vec<HstNode> = Vec::new();
        let mut map = vec![usize::MAX; self.nodes.len()];
        let order = self.topo_order();
        for &v in &order {
            let label = if self.is_leaf(v) {
                0.0
            } else {
                round_up(self.nodes[v].label)
            };
            let parent_new = self.nodes[v].parent.map(|p| map[p]);
            let merged = match parent_new {
                Some(pn) if !self.is_leaf(v) && nodes[pn].label == label => Some(pn),
                _ => None,
            };
            match merged {
                Some(pn) => map[v] = pn,
                None => {
                    let id = nodes.len();
                    nodes.push(HstNode {
                        label,
                        parent: parent_new,
                        children: Vec::new(),
                        point: self.nodes[v].point,
                    });
                    if let Some(pn) = parent_new {
                        nodes[pn].children.push(id);
                    }
                    map[v] = id;
                }
            }
        }
        let mut leaf_of_point = vec![usize::MAX; self.leaf_of_point.len()];
        for (p, &leaf) in self.leaf_of_point.iter().enumerate() {
            leaf_of_point[p] = map[leaf];
        }
        Hst {
            nodes,
            root: map[self.root],
            leaf_of_point,
        }
    }
}

/// Build an HST realizing an ultrametric, with labels rounded up to powers
/// of `k` when `k > 1` so the `k`-HST invariant holds exactly. The leaf
/// metric approximates the input from above:
/// `d(x,y) <= Δ_lca(x,y) <= k * d(x,y)`.
pub fn hst_from_ultrametric(m: &FiniteMetric, k: f64) -> Result<Hst> {
    if let Some((x, y, z)) = m.ultrametric_witness() {
        return Err(Error::NotUltrametric { x, y, z });
    }
    let n = m.n();
    // single-linkage dendrogram over pairs sorted by distance; for an
    // ultrametric this reconstructs lca distances exactly
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            pairs.push((m.dist(i, j), i, j));
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then((a.1, a.2).cmp(&(b.1, b.2))));

    let mut nodes: Vec<HstNode> = (0..n)
        .map(|p| HstNode {
            label: 0.0,
            parent: None,
            children: Vec::new(),
            point: Some(p),
        })
        .collect();
    let leaf_of_point: Vec<usize> = (0..n).collect();
    // current top node per dsu component
    let mut dsu: Vec<usize> = (0..n).collect();
    let mut top: Vec<usize> = (0..n).collect();
    fn find(dsu: &mut Vec<usize>, x: usize) -> usize {
        if dsu[x] != x {
            let r = find(dsu, dsu[x]);
            dsu[x] = r;
        }
        dsu[x]
    }
    for &(v, i, j) in &pairs {
        let (ri, rj) = (find(&mut dsu, i), find(&mut dsu, j));
        if ri == rj {
            continue;
        }
        let (ti, tj) = (top[ri], top[rj]);
        // attach under a node labeled v, reusing an existing top that
        // already sits at this value
        let target = if nodes[ti].point.is_none() && nodes[ti].label == v {
            ti
        } else if nodes[tj].point.is_none() && nodes[tj].label == v {
            tj
        } else {
            let id = nodes.len();
            nodes.push(HstNode {
                label: v,
                parent: None,
                children: Vec::new(),
                point: None,
            });
            id
        };
        for t in [ti, tj] {
            if t != target {
                nodes[t].parent = Some(target);
                nodes[target].children.push(t);
            }
        }
        dsu[ri] = rj;
        let r = find(&mut dsu, rj);
        top[r] = target;
    }
    let root = top[find(&mut dsu, 0)];
    if n > 1 {
        let r = find(&mut dsu, 0);
        for i in 1..n {
            if find(&mut dsu, i) != r {
                return Err(Error::BadParams(
                    "metric has zero distance between distinct points".into(),
                ));
            }
        }
    }
    let exact = Hst {
        nodes,
        root,
        leaf_of_point,
    };
    if k > 1.0 {
        Ok(exact.rounded_to_powers(k))
    } else {
        Ok(exact)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_three_points() {
        let m = FiniteMetric::uniform(3);
        let h = hst_from_ultrametric(&m, 1.0).unwrap();
        assert_eq!(h.nodes[h.root].label, 1.0);
        assert_eq!(h.nodes[h.root].children.len(), 3);
        assert!(h.check_k_hst(1.0));
    }

    #[test]
    fn two_level_ultrametric_rounds_to_2_hst() {
        // two pairs at distance 1, cross distance 4
        let mut d = vec![vec![4.0; 4]; 4];
        for i in 0..4 {
            d[i][i] = 0.0;
        }
        d[0][1] = 1.0;
        d[1][0] = 1.0;
        d[2][3] = 1.0;
        d[3][2] = 1.0;
        let m = FiniteMetric::from_matrix(d).unwrap();
        let h = hst_from_ultrametric(&m, 2.0).unwrap();
        assert!(h.check_k_hst(2.0));
        assert_eq!(h.nodes[h.root].label, 4.0);
        // direct lca check over all pairs
        for x in 0..4 {
            for y in 0..4 {
                if x == y {
                    continue;
                }
                let lca = h.dist(x, y);
                assert!(m.dist(x, y) <= lca && lca <= 2.0 * m.dist(x, y));
            }
        }
    }

    #[test]
    fn rejects_non_ultrametric() {
        // triangle-valid but ultrametric-invalid: 1, 1, 1.5
        let m = FiniteMetric::from_matrix(vec![
            vec![0.0, 1.0, 1.5],
            vec![1.0, 0.0, 1.0],
            vec![1.5, 1.0, 0.0],
        ])
        .unwrap();
        assert!(m.validate().is_valid());
        assert!(matches!(
            hst_from_ultrametric(&m, 1.0),
            Err(Error::NotUltrametric { .. })
        ));
    }

    #[test]
    fn leaf_sets_cover_subtrees() {
        let m = FiniteMetric::uniform(5);
        let h = hst_from_ultrametric(&m, 1.0).unwrap();
        let sets = h.leaf_sets();
        assert_eq!(sets[h.root], vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn approximation_bound_holds_after_rounding() {
        // three-level ultrametric: 1 / 3 / 9
        let pts = 8usize;
        let mut d = vec![vec![0.0; pts]; pts];
        for i in 0..pts {
            for j in 0..pts {
                if i == j {
                    continue;
                }
                d[i][j] = if i / 2 == j / 2 {
                    1.0
                } else if i / 4 == j / 4 {
                    3.0
                } else {
                    9.0
                };
            }
        }
        let m = FiniteMetric::from_matrix(d).unwrap();
        for k in [1.0, 1.5, 2.0] {
            let h = hst_from_ultrametric(&m, k).unwrap();
            assert!(h.check_k_hst(k), "k = {k}");
            for x in 0..pts {
                for y in (x + 1)..pts {
                    let lca = h.dist(x, y);
                    assert!(m.dist(x, y) <= lca * (1.0 + 1e-12));
                    assert!(lca <= k * m.dist(x, y) * (1.0 + 1e-12));
                }
            }
        }
    }
}
