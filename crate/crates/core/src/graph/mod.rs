//! Undirected weighted graphs and graph shift operators.

mod io;
mod sensor;

pub use io::{load_graph, parse_graph, save_graph, write_graph};
pub use sensor::{random_sensor_graph, MAX_CONNECT_ATTEMPTS};

use std::collections::{HashSet, VecDeque};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A weighted edge with `i < j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub weight: f64,
}

/// Undirected weighted graph without self-loops or parallel edges.
///
/// Edges are stored with `i < j`, sorted by `(i, j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n_vertices: usize,
    edges: Vec<Edge>,
    coordinates: Option<Vec<[f64; 2]>>,
}

impl Graph {
    /// Validates and canonicalizes an edge list. Endpoints may be given in
    /// either order.
    pub fn new(
        n_vertices: usize,
        edges: impl IntoIterator<Item = (usize, usize, f64)>,
        coordinates: Option<Vec<[f64; 2]>>,
    ) -> Result<Self> {
        if n_vertices == 0 {
            return Err(Error::InvariantViolation("graph must have at least one vertex".into()));
        }
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for (a, b, weight) in edges {
            if a >= n_vertices || b >= n_vertices {
                return Err(Error::InvariantViolation(format!(
                    "edge ({a}, {b}) references a vertex outside 0..{n_vertices}"
                )));
            }
            if a == b {
                return Err(Error::InvariantViolation(format!("self-loop at vertex {a}")));
            }
            if !(weight.is_finite() && weight > 0.0) {
                return Err(Error::InvariantViolation(format!(
                    "edge ({a}, {b}) has weight {weight}; weights must be positive and finite"
                )));
            }
            let (i, j) = if a < b { (a, b) } else { (b, a) };
            if !seen.insert((i, j)) {
                return Err(Error::InvariantViolation(format!("duplicate edge ({i}, {j})")));
            }
            out.push(Edge { i, j, weight });
        }
        out.sort_by_key(|e| (e.i, e.j));

        if let Some(coords) = &coordinates {
            if coords.len() != n_vertices {
                return Err(Error::InvariantViolation(format!(
                    "{} coordinates given for {n_vertices} vertices",
                    coords.len()
                )));
            }
            if coords.iter().flatten().any(|c| !c.is_finite()) {
                return Err(Error::InvariantViolation("non-finite vertex coordinate".into()));
            }
        }

        Ok(Graph { n_vertices, edges: out, coordinates })
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn coordinates(&self) -> Option<&[[f64; 2]]> {
        self.coordinates.as_deref()
    }

    /// Weighted degree of every vertex.
    pub fn degrees(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.n_vertices];
        for e in &self.edges {
            d[e.i] += e.weight;
            d[e.j] += e.weight;
        }
        d
    }

    /// Number of incident edges per vertex.
    pub fn edge_counts(&self) -> Vec<usize> {
        let mut d = vec![0; self.n_vertices];
        for e in &self.edges {
            d[e.i] += 1;
            d[e.j] += 1;
        }
        d
    }

    pub fn is_connected(&self) -> bool {
        let mut adj = vec![Vec::new(); self.n_vertices];
        for e in &self.edges {
            adj[e.i].push(e.j);
            adj[e.j].push(e.i);
        }
        let mut visited = vec![false; self.n_vertices];
        let mut queue = VecDeque::from([0]);
        visited[0] = true;
        let mut count = 1;
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if !visited[w] {
                    visited[w] = true;
                    count += 1;
                    queue.push_back(w);
                }
            }
        }
        count == self.n_vertices
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum ShiftKind {
    #[default]
    Laplacian,
    Adjacency,
}

/// Symmetric matrix sharing the graph's sparsity pattern.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftOperator {
    kind: ShiftKind,
    matrix: DMatrix<f64>,
}

impl ShiftOperator {
    pub fn kind(&self) -> ShiftKind {
        self.kind
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn n(&self) -> usize {
        self.matrix.nrows()
    }
}

/// Weighted adjacency matrix `A`, symmetric with zero diagonal.
pub fn build_adjacency(g: &Graph) -> DMatrix<f64> {
    let n = g.n_vertices();
    let mut a = DMatrix::zeros(n, n);
    for e in g.edges() {
        a[(e.i, e.j)] = e.weight;
        a[(e.j, e.i)] = e.weight;
    }
    a
}

/// Combinatorial Laplacian `L = D - A`.
pub fn build_laplacian(g: &Graph) -> ShiftOperator {
    let n = g.n_vertices();
    let mut l = DMatrix::zeros(n, n);
    for e in g.edges() {
        l[(e.i, e.j)] = -e.weight;
        l[(e.j, e.i)] = -e.weight;
    }
    for (i, d) in g.degrees().into_iter().enumerate() {
        l[(i, i)] = d;
    }
    ShiftOperator { kind: ShiftKind::Laplacian, matrix: l }
}

pub fn build_shift(g: &Graph, kind: ShiftKind) -> ShiftOperator {
    match kind {
        ShiftKind::Laplacian => build_laplacian(g),
        ShiftKind::Adjacency => ShiftOperator { kind, matrix: build_adjacency(g) },
    }
}
