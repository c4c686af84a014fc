//! Weighted undirected graphs and shortest-path machinery.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

/// An undirected graph with strictly positive edge weights.
///
/// Construction simplifies the edge list: self-loops are dropped, parallel
/// edges collapse to the lightest one, and each edge is stored once with
/// `u < v`. The adjacency index is built eagerly.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    n: usize,
    edges: Vec<(usize, usize, f64)>,
    adj: Vec<Vec<(usize, f64)>>,
}

impl WeightedGraph {
    pub fn new(n: usize, raw_edges: &[(usize, usize, f64)]) -> Result<Self> {
        let mut edges: Vec<(usize, usize, f64)> = Vec::with_capacity(raw_edges.len());
        for &(u, v, w) in raw_edges {
            if u >= n || v >= n {
                return Err(Error::IndexOutOfRange {
                    index: u.max(v),
                    n,
                });
            }
            if !(w > 0.0) || !w.is_finite() {
                return Err(Error::BadParams(format!(
                    "edge ({u},{v}) has non-positive weight {w}"
                )));
            }
            if u == v {
                continue; // drop self-loops
            }
            edges.push((u.min(v), u.max(v), w));
        }
        edges.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)).then(a.2.total_cmp(&b.2)));
        edges.dedup_by(|next, prev| {
            if next.0 == prev.0 && next.1 == prev.1 {
                prev.2 = prev.2.min(next.2);
                true
            } else {
                false
            }
        });
        let mut adj = vec![Vec::new(); n];
        for &(u, v, w) in &edges {
            adj[u].push((v, w));
            adj[v].push((u, w));
        }
        Ok(Self { n, edges, adj })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn neighbors(&self, v: usize) -> &[(usize, f64)] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].iter().any(|&(x, _)| x == v)
    }

    /// Single-source shortest path distances (Dijkstra). Unreachable
    /// vertices get `f64::INFINITY`. Tie-breaking is deterministic.
    pub fn dijkstra(&self, src: usize) -> Vec<f64> {
        self.dijkstra_tree(src).0
    }

    /// Dijkstra distances plus the predecessor of each vertex in a
    /// deterministic shortest-path tree (`usize::MAX` for the root and
    /// unreachable vertices).
    pub fn dijkstra_tree(&self, src: usize) -> (Vec<f64>, Vec<usize>) {
        let mut dist = vec![f64::INFINITY; self.n];
        let mut parent = vec![usize::MAX; self.n];
        let mut done = vec![false; self.n];
        let mut heap: BinaryHeap<Reverse<(OrdF64, usize)>> = BinaryHeap::new();
        dist[src] = 0.0;
        heap.push(Reverse((OrdF64(0.0), src)));
        while let Some(Reverse((OrdF64(d), u))) = heap.pop() {
            if done[u] {
                continue;
            }
            done[u] = true;
            for &(v, w) in &self.adj[u] {
                let nd = d + w;
                // strict improvement, or equal distance through a smaller
                // parent, keeps the tree independent of heap internals
                if nd < dist[v] || (nd == dist[v] && !done[v] && u < parent[v]) {
                    dist[v] = nd;
                    parent[v] = u;
                    heap.push(Reverse((OrdF64(nd), v)));
                }
            }
        }
        (dist, parent)
    }

    /// Hop counts from `src` over the subgraph induced by `alive`
    /// (`u32::MAX` for unreachable).
    pub fn bfs_hops(&self, src: usize, alive: &[bool]) -> Vec<u32> {
        let mut hops = vec![u32::MAX; self.n];
        if !alive[src] {
            return hops;
        }
        let mut queue = std::collections::VecDeque::new();
        hops[src] = 0;
        queue.push_back(src);
        while let Some(u) = queue.pop_front() {
            for &(v, _) in &self.adj[u] {
                if alive[v] && hops[v] == u32::MAX {
                    hops[v] = hops[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        hops
    }

    /// Connected components, each a sorted vertex list.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n];
        let mut comps = Vec::new();
        for start in 0..self.n {
            if seen[start] {
                continue;
            }
            let mut stack = vec![start];
            let mut comp = Vec::new();
            seen[start] = true;
            while let Some(u) = stack.pop() {
                comp.push(u);
                for &(v, _) in &self.adj[u] {
                    if !seen[v] {
                        seen[v] = true;
                        stack.push(v);
                    }
                }
            }
            comp.sort_unstable();
            comps.push(comp);
        }
        comps
    }

    pub fn is_connected(&self) -> bool {
        self.n == 0 || self.components().len() == 1
    }

    pub fn is_tree(&self) -> bool {
        self.is_connected() && self.edges.len() + 1 == self.n
    }

    /// Subgraph induced by `vertices` (deduplicated and sorted). Returns the
    /// subgraph together with the map from new indices to old ones.
    pub fn induced(&self, vertices: &[usize]) -> Result<(WeightedGraph, Vec<usize>)> {
        let mut keep: Vec<usize> = vertices.to_vec();
        keep.sort_unstable();
        keep.dedup();
        let mut back = vec![usize::MAX; self.n];
        for (new, &old) in keep.iter().enumerate() {
            back[old] = new;
        }
        let mut edges = Vec::new();
        for &(u, v, w) in &self.edges {
            if back[u] != usize::MAX && back[v] != usize::MAX {
                edges.push((back[u], back[v], w));
            }
        }
        Ok((WeightedGraph::new(keep.len(), &edges)?, keep))
    }
}

/// Total-order wrapper for finite f64 keys in heaps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrdF64(pub f64);

impl Eq for OrdF64 {}

impl PartialOrd for OrdF64 {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for OrdF64 {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Minimum-length path with at most `max_hops` edges from every vertex to
/// `src`, restricted to `alive` vertices (Bellman-Ford style rounds).
pub fn hop_bounded_dists(
    n: usize,
    adj: &[Vec<(usize, f64)>],
    src: usize,
    max_hops: usize,
    alive: &[bool],
) -> Vec<f64> {
    let mut cur = vec![f64::INFINITY; n];
    if !alive[src] {
        return cur;
    }
    cur[src] = 0.0;
    let mut next = cur.clone();
    for _ in 0..max_hops {
        let mut changed = false;
        for u in 0..n {
            let du = cur[u];
            if du.is_finite() {
                for &(v, w) in &adj[u] {
                    if alive[v] && du + w < next[v] {
                        next[v] = du + w;
                        changed = true;
                    }
                }
            }
        }
        cur.copy_from_slice(&next);
        if !changed {
            break;
        }
    }
    cur
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simplification_drops_loops_and_parallels() {
        let g = WeightedGraph::new(3, &[(0, 1, 2.0), (1, 0, 1.0), (2, 2, 5.0), (1, 2, 3.0)])
            .unwrap();
        assert_eq!(g.num_edges(), 2);
        assert_eq!(g.edges()[0], (0, 1, 1.0));
    }

    #[test]
    fn rejects_nonpositive_weight() {
        assert!(WeightedGraph::new(2, &[(0, 1, 0.0)]).is_err());
        assert!(WeightedGraph::new(2, &[(0, 1, -1.0)]).is_err());
    }

    #[test]
    fn dijkstra_on_path() {
        let g = WeightedGraph::new(3, &[(0, 1, 1.0), (1, 2, 2.0)]).unwrap();
        let d = g.dijkstra(0);
        assert_eq!(d, vec![0.0, 1.0, 3.0]);
    }

    #[test]
    fn hop_bounded_respects_budget() {
        // triangle with a cheap 2-hop detour
        let g = WeightedGraph::new(3, &[(0, 1, 1.0), (1, 2, 1.0), (0, 2, 5.0)]).unwrap();
        let adj: Vec<Vec<(usize, f64)>> = (0..3).map(|v| g.neighbors(v).to_vec()).collect();
        let alive = vec![true; 3];
        let one_hop = hop_bounded_dists(3, &adj, 0, 1, &alive);
        assert_eq!(one_hop[2], 5.0);
        let two_hop = hop_bounded_dists(3, &adj, 0, 2, &alive);
        assert_eq!(two_hop[2], 2.0);
    }

    #[test]
    fn induced_subgraph_remaps() {
        let g = WeightedGraph::new(4, &[(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0)]).unwrap();
        let (h, map) = g.induced(&[1, 3, 2]).unwrap();
        assert_eq!(map, vec![1, 2, 3]);
        assert_eq!(h.num_edges(), 2);
        assert!(h.has_edge(0, 1) && h.has_edge(1, 2));
    }
}
