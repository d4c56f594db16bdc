//! Undirected simple graphs and community assignments.

use std::collections::BTreeSet;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Assignment of each vertex to one of `r` nonempty communities.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionLabels {
    labels: Vec<usize>,
    r: usize,
}

impl PartitionLabels {
    /// Validates that every label lies in `0..r` and that no community is empty.
    pub fn new(labels: Vec<usize>, r: usize) -> Result<Self> {
        if r == 0 {
            return Err(invalid("partition needs at least one community"));
        }
        let mut sizes = vec![0usize; r];
        for (v, &c) in labels.iter().enumerate() {
            if c >= r {
                return Err(invalid(format!("vertex {v} has community {c}, expected < {r}")));
            }
            sizes[c] += 1;
        }
        if let Some(empty) = sizes.iter().position(|&s| s == 0) {
            return Err(invalid(format!("community {empty} is empty")));
        }
        Ok(Self { labels, r })
    }

    /// Contiguous blocks: the first `sizes[0]` vertices form community 0, and so on.
    pub fn from_sizes(sizes: &[usize]) -> Result<Self> {
        let labels = sizes
            .iter()
            .enumerate()
            .flat_map(|(c, &s)| std::iter::repeat_n(c, s))
            .collect();
        Self::new(labels, sizes.len())
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn label(&self, v: usize) -> usize {
        self.labels[v]
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.r];
        for &c in &self.labels {
            sizes[c] += 1;
        }
        sizes
    }

    /// Vertices of community `i` in increasing order.
    pub fn members(&self, i: usize) -> Vec<usize> {
        (0..self.n()).filter(|&v| self.labels[v] == i).collect()
    }

    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut blocks = vec![Vec::new(); self.r];
        for (v, &c) in self.labels.iter().enumerate() {
            blocks[c].push(v);
        }
        blocks
    }

    /// Relabel communities in order of first appearance.
    pub fn canonical(&self) -> Self {
        let mut map = vec![usize::MAX; self.r];
        let mut next = 0;
        let labels = self
            .labels
            .iter()
            .map(|&c| {
                if map[c] == usize::MAX {
                    map[c] = next;
                    next += 1;
                }
                map[c]
            })
            .collect();
        Self { labels, r: self.r }
    }

    /// True when both describe the same partition up to renaming communities.
    pub fn same_partition(&self, other: &Self) -> bool {
        self.r == other.r && self.canonical().labels == other.canonical().labels
    }

    pub fn same_community(&self, u: usize, v: usize) -> bool {
        self.labels[u] == self.labels[v]
    }
}

/// Undirected simple graph on vertices `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<BTreeSet<usize>>,
    m: usize,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Self {
            adj: vec![BTreeSet::new(); n],
            m: 0,
        }
    }

    /// Rejects self-loops, out-of-range endpoints and duplicate edges.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut g = Self::empty(n);
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(invalid(format!("edge ({u}, {v}) out of range for n = {n}")));
            }
            if u == v {
                return Err(invalid(format!("self-loop at vertex {u}")));
            }
            if !g.add_edge(u, v) {
                return Err(invalid(format!("duplicate edge ({u}, {v})")));
            }
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].contains(&v)
    }

    /// Returns false if the edge was already present. Panics on a self-loop.
    pub fn add_edge(&mut self, u: usize, v: usize) -> bool {
        assert_ne!(u, v, "self-loops are not allowed");
        if self.adj[u].insert(v) {
            self.adj[v].insert(u);
            self.m += 1;
            true
        } else {
            false
        }
    }

    /// Returns false if the edge was absent.
    pub fn remove_edge(&mut self, u: usize, v: usize) -> bool {
        if self.adj[u].remove(&v) {
            self.adj[v].remove(&u);
            self.m -= 1;
            true
        } else {
            false
        }
    }

    pub fn neighbors(&self, u: usize) -> impl Iterator<Item = usize> + '_ {
        self.adj[u].iter().copied()
    }

    pub fn degree(&self, u: usize) -> usize {
        self.adj[u].len()
    }

    /// Edges `(u, v)` with `u < v` in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, nb)| nb.range(u + 1..).map(move |&v| (u, v)))
    }

    /// Dense 0/1 adjacency matrix.
    pub fn adjacency(&self) -> DMatrix<f64> {
        let n = self.n();
        let mut a = DMatrix::zeros(n, n);
        for (u, v) in self.edges() {
            a[(u, v)] = 1.0;
            a[(v, u)] = 1.0;
        }
        a
    }

    /// Table `E(v, j)`: number of neighbours of `v` in community `j` (row-major, `n x r`).
    pub fn community_degrees(&self, labels: &PartitionLabels) -> Vec<Vec<usize>> {
        let mut table = vec![vec![0usize; labels.r()]; self.n()];
        for (v, row) in table.iter_mut().enumerate() {
            for u in self.neighbors(v) {
                row[labels.label(u)] += 1;
            }
        }
        table
    }

    /// `E(i, j) = 1_i^T A 1_j`; diagonal entries count intra edges twice.
    pub fn block_edge_counts(&self, labels: &PartitionLabels) -> Vec<Vec<usize>> {
        let r = labels.r();
        let mut counts = vec![vec![0usize; r]; r];
        for (u, v) in self.edges() {
            let (i, j) = (labels.label(u), labels.label(v));
            counts[i][j] += 1;
            counts[j][i] += 1;
        }
        counts
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels_reject_empty_and_out_of_range() {
        assert!(PartitionLabels::new(vec![0, 0, 1], 3).is_err());
        assert!(PartitionLabels::new(vec![0, 2], 2).is_err());
        assert!(PartitionLabels::new(vec![], 1).is_err());
        let p = PartitionLabels::new(vec![1, 0, 1], 2).unwrap();
        assert_eq!(p.sizes(), vec![1, 2]);
        assert_eq!(p.members(1), vec![0, 2]);
    }

    #[test]
    fn same_partition_ignores_names() {
        let a = PartitionLabels::new(vec![1, 1, 0, 2], 3).unwrap();
        let b = PartitionLabels::new(vec![0, 0, 2, 1], 3).unwrap();
        let c = PartitionLabels::new(vec![0, 1, 0, 2], 3).unwrap();
        assert!(a.same_partition(&b));
        assert!(!a.same_partition(&c));
        assert_eq!(a.canonical().labels(), &[0, 0, 1, 2]);
    }

    #[test]
    fn graph_rejects_bad_edges() {
        assert!(Graph::from_edges(3, [(0, 0)]).is_err());
        assert!(Graph::from_edges(3, [(0, 3)]).is_err());
        assert!(Graph::from_edges(3, [(0, 1), (1, 0)]).is_err());
    }

    #[test]
    fn edges_sorted_and_symmetric() {
        let g = Graph::from_edges(4, [(2, 1), (3, 0), (0, 1)]).unwrap();
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1), (0, 3), (1, 2)]);
        let a = g.adjacency();
        assert_eq!(a, a.transpose());
        assert_eq!(a.sum(), 6.0);
    }

    #[test]
    fn block_counts_match_definition() {
        let g = Graph::from_edges(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
        let p = PartitionLabels::from_sizes(&[2, 2]).unwrap();
        assert_eq!(g.block_edge_counts(&p), vec![vec![2, 1], vec![1, 2]]);
        assert_eq!(g.community_degrees(&p)[1], vec![1, 1]);
    }
}
