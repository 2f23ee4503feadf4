use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// A finite multigraph; loops and parallel edges are allowed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopoGraph {
    #[serde(rename = "V")]
    pub vertices: usize,
    #[serde(rename = "E")]
    pub edges: Vec<(usize, usize)>,
}

impl TopoGraph {
    pub fn new(vertices: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        if vertices == 0 {
            return domain("a graph needs at least one vertex");
        }
        if let Some(&(a, b)) = edges.iter().find(|&&(a, b)| a >= vertices || b >= vertices) {
            return domain(format!("edge ({a}, {b}) leaves the {vertices} vertices"));
        }
        Ok(Self { vertices, edges })
    }

    pub fn point() -> Self {
        Self { vertices: 1, edges: Vec::new() }
    }

    pub fn interval() -> Self {
        Self { vertices: 2, edges: vec![(0, 1)] }
    }

    pub fn circle() -> Self {
        Self { vertices: 1, edges: vec![(0, 0)] }
    }

    pub fn figure_eight() -> Self {
        Self { vertices: 1, edges: vec![(0, 0), (0, 0)] }
    }

    /// Incident edge ends; a loop counts twice.
    pub fn valence(&self, v: usize) -> usize {
        self.edges.iter().map(|&(a, b)| (a == v) as usize + (b == v) as usize).sum()
    }

    pub fn endpoints(&self) -> Vec<usize> {
        (0..self.vertices).filter(|&v| self.valence(v) == 1).collect()
    }

    pub fn branch_points(&self) -> Vec<usize> {
        (0..self.vertices).filter(|&v| self.valence(v) >= 3).collect()
    }

    /// Component label of every vertex.
    pub fn components(&self) -> Vec<usize> {
        let mut uf = UnionFind::new(self.vertices);
        for &(a, b) in &self.edges {
            uf.union(a, b);
        }
        (0..self.vertices).map(|v| uf.find(v)).collect()
    }

    pub fn is_connected(&self) -> bool {
        let c = self.components();
        c.iter().all(|&x| x == c[0])
    }
}

/// First Betti number `E - V + 1` of a connected graph.
pub fn betti1(g: &TopoGraph) -> Result<usize> {
    if !g.is_connected() {
        return domain("betti1 needs a connected graph");
    }
    Ok(g.edges.len() + 1 - g.vertices)
}

/// Disjoint sets with path halving and union by size.
#[derive(Clone, Debug)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        Self { parent: (0..n).collect(), size: vec![1; n] }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
        true
    }
}
