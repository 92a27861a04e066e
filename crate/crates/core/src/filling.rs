//! The uniformized hyperbolic filling of a finite space as a weighted
//! metric graph.
//!
//! Vertices are pairs (net point, level). Two same-level vertices are
//! joined when their tau-dilated balls share an atom; consecutive-level
//! vertices when their undilated balls do. Uniformized edge lengths treat
//! depth as constant along a horizontal edge and linear along a vertical
//! one, which reproduces the closed forms alpha^{-i} and
//! (1 - 1/alpha) alpha^{-k} / eps exactly. Above the truncation level the
//! nets are stationary, so each infinite vertical ray collapses to a single
//! tail edge with closed-form length and mass, and its far endpoint is the
//! boundary copy of the underlying atom.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::{NetHierarchy, PointCloudSpace};

pub type FieldX = Vec<f64>;

/// Construction parameters. `eps` is always ln(alpha); the defaults are
/// alpha = e^{1/4}, tau = 2.
#[derive(Debug, Clone, Copy)]
pub struct FillingParams {
    pub alpha: f64,
    pub tau: f64,
    pub eps: f64,
    pub beta: f64,
    pub depth: usize,
}

impl FillingParams {
    pub fn standard(beta: f64, depth: usize) -> Self {
        Self { alpha: 0.25f64.exp(), tau: 2.0, eps: 0.25, beta, depth }
    }

    pub fn with_alpha(alpha: f64, tau: f64, beta: f64, depth: usize) -> Self {
        Self { alpha, tau, eps: alpha.ln(), beta, depth }
    }

    /// Exponent pairing for the equivalence theorem: beta = eps * p(1 - theta).
    pub fn beta_for(eps: f64, theta: f64, p: f64) -> f64 {
        eps * p * (1.0 - theta)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeKind {
    Horizontal,
    Vertical,
    Tail,
}

#[derive(Debug, Clone)]
pub struct Vertex {
    pub point: usize,
    pub level: usize,
    /// nu(B_Z(point, alpha^{-level})), cached so reweighting needs no space.
    pub ball_mass: f64,
    /// e^{-beta level} * ball_mass.
    pub hat_mu: f64,
}

#[derive(Debug, Clone)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub kind: EdgeKind,
    pub len: f64,
    pub mass: f64,
}

/// Weighted metric graph realizing the truncated filling plus boundary.
/// Node ids: `0..num_vertices()` are interior vertices, followed by one
/// boundary node per point of the space.
#[derive(Debug, Clone)]
pub struct Filling {
    pub params: FillingParams,
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
    /// node -> incident edge indices
    adjacency: Vec<Vec<usize>>,
    /// point id -> boundary node id
    boundary_nodes: Vec<usize>,
    /// point id -> atom mass (kept for tail reweighting)
    atom_mass: Vec<f64>,
    /// vertex (point, level) -> vertex id
    vertex_lookup: Vec<Vec<Option<usize>>>,
    /// cached multi-source distance from the boundary copy of Z
    boundary_dist: Vec<f64>,
}

impl Filling {
    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_points(&self) -> usize {
        self.boundary_nodes.len()
    }

    pub fn num_nodes(&self) -> usize {
        self.vertices.len() + self.boundary_nodes.len()
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn boundary_node(&self, point: usize) -> usize {
        self.boundary_nodes[point]
    }

    pub fn is_boundary(&self, node: usize) -> bool {
        node >= self.vertices.len()
    }

    /// Point id of a boundary node.
    pub fn boundary_point(&self, node: usize) -> usize {
        node - self.vertices.len()
    }

    pub fn vertex_id(&self, point: usize, level: usize) -> Option<usize> {
        self.vertex_lookup[level][point]
    }

    pub fn incident_edges(&self, node: usize) -> &[usize] {
        &self.adjacency[node]
    }

    /// Cached d_eps(node, Z) where Z is the boundary copy.
    pub fn dist_to_boundary(&self) -> &[f64] {
        &self.boundary_dist
    }

    pub fn total_mass(&self) -> f64 {
        self.edges.iter().map(|e| e.mass).sum()
    }

    /// Vertex-lumped node mass: half the mass of each incident edge.
    pub fn node_mass(&self, node: usize) -> f64 {
        self.adjacency[node]
            .iter()
            .map(|&e| self.edges[e].mass)
            .sum::<f64>()
            * 0.5
    }

    /// Multi-source shortest-path distances over the uniformized edge
    /// lengths; exact for node-to-node metric-graph distance.
    pub fn dist_from_set(&self, sources: &[usize]) -> Result<Vec<f64>> {
        if sources.is_empty() {
            return Err(Error::EmptySubset);
        }
        Ok(self.dijkstra(sources))
    }

    fn dijkstra(&self, sources: &[usize]) -> Vec<f64> {
        #[derive(PartialEq)]
        struct State {
            cost: f64,
            node: usize,
        }
        impl Eq for State {}
        impl Ord for State {
            fn cmp(&self, other: &Self) -> Ordering {
                other
                    .cost
                    .partial_cmp(&self.cost)
                    .unwrap_or(Ordering::Equal)
                    .then_with(|| other.node.cmp(&self.node))
            }
        }
        impl PartialOrd for State {
            fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
                Some(self.cmp(other))
            }
        }

        let mut dist = vec![f64::INFINITY; self.num_nodes()];
        let mut heap = BinaryHeap::new();
        for &s in sources {
            dist[s] = 0.0;
            heap.push(State { cost: 0.0, node: s });
        }
        while let Some(State { cost, node }) = heap.pop() {
            if cost > dist[node] {
                continue;
            }
            for &ei in &self.adjacency[node] {
                let e = &self.edges[ei];
                let next = if e.u == node { e.v } else { e.u };
                let c = cost + e.len;
                if c < dist[next] {
                    dist[next] = c;
                    heap.push(State { cost: c, node: next });
                }
            }
        }
        dist
    }

    /// mu_beta measure of the open ball B_eps(center of `node_dist` = 0, r):
    /// full edges inside plus linear fractions of crossing edges (mass is
    /// spread uniformly along d_eps-arclength).
    pub fn ball_measure(&self, node_dist: &[f64], r: f64) -> f64 {
        let mut total = 0.0;
        for e in &self.edges {
            let a = (r - node_dist[e.u]).clamp(0.0, e.len);
            let b = (r - node_dist[e.v]).clamp(0.0, e.len);
            let covered = (a + b).min(e.len);
            if covered > 0.0 {
                total += e.mass * covered / e.len;
            }
        }
        total
    }

    /// d_eps(x, Z) for the midpoint of an edge.
    pub fn edge_midpoint_boundary_dist(&self, edge: usize) -> f64 {
        let e = &self.edges[edge];
        let half = 0.5 * e.len;
        (self.boundary_dist[e.u] + half).min(self.boundary_dist[e.v] + half)
    }

    /// Exact recomputation of every mass with exponent beta' = beta + eps*sigma,
    /// together with the per-edge comparison ratio
    /// m_{beta'}(e) / (d_eps(mid(e), Z)^sigma * m_beta(e)).
    pub fn reweight(&self, sigma: f64) -> Result<(Filling, Vec<f64>)> {
        let beta2 = self.params.beta + self.params.eps * sigma;
        if !(beta2 > 0.0) {
            return Err(Error::BetaNonpositive { beta: beta2 });
        }
        let mut params = self.params;
        params.beta = beta2;
        let mut out = self.clone();
        out.params = params;
        for v in &mut out.vertices {
            v.hat_mu = (-beta2 * v.level as f64).exp() * v.ball_mass;
        }
        let depth = self.params.depth as f64;
        for e in &mut out.edges {
            e.mass = match e.kind {
                EdgeKind::Tail => {
                    let point = self.boundary_point(e.v.max(e.u));
                    tail_mass(self.atom_mass[point], beta2, depth)
                }
                _ => out.vertices[e.u].hat_mu + out.vertices[e.v].hat_mu,
            };
        }
        let ratios = self
            .edges
            .iter()
            .zip(&out.edges)
            .enumerate()
            .map(|(ei, (old, new))| {
                let mid = self.edge_midpoint_boundary_dist(ei);
                new.mass / (mid.powf(sigma) * old.mass)
            })
            .collect();
        Ok((out, ratios))
    }

    pub fn export(&self) -> FillingDocument {
        FillingDocument {
            vertices: self
                .vertices
                .iter()
                .map(|v| VertexRecord { z: v.point, i: v.level, hat_mu: v.hat_mu })
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|e| EdgeRecord { u: e.u, v: e.v, kind: e.kind, len: e.len, mass: e.mass })
                .collect(),
            boundary: (0..self.boundary_nodes.len())
                .map(|z| BoundaryRecord { z, node: self.boundary_nodes[z] })
                .collect(),
        }
    }
}

/// Closed form for the collapsed ray above the truncation level: the sum of
/// (hat_mu(z,k) + hat_mu(z,k+1)) over k >= L, where every ball at those
/// levels holds only the atom itself.
pub fn tail_mass(atom_mass: f64, beta: f64, depth: f64) -> f64 {
    let q = (-beta).exp();
    atom_mass * (1.0 + q) * (-beta * depth).exp() / (1.0 - q)
}

pub fn build_filling(
    space: &PointCloudSpace,
    nets: &NetHierarchy,
    params: FillingParams,
) -> Result<Filling> {
    if (nets.alpha - params.alpha).abs() > 1e-12 {
        return Err(Error::ParameterRange(format!(
            "nets built with alpha = {}, filling requested alpha = {}",
            nets.alpha, params.alpha
        )));
    }
    if !(params.beta > 0.0) {
        return Err(Error::BetaNonpositive { beta: params.beta });
    }
    let required = space.critical_level(params.alpha);
    let depth = params.depth;
    if depth < required || nets.max_level() < depth {
        return Err(Error::DepthTooSmall {
            requested: depth.min(nets.max_level()),
            required: required.max(depth),
        });
    }

    let n = space.len();
    let mut vertices = Vec::new();
    let mut vertex_lookup = vec![vec![None; n]; depth + 1];
    for i in 0..=depth {
        let radius = params.alpha.powi(-(i as i32));
        for &z in nets.level(i) {
            let id = vertices.len();
            let ball_mass = space.ball_mass(z, radius);
            vertices.push(Vertex {
                point: z,
                level: i,
                ball_mass,
                hat_mu: (-params.beta * i as f64).exp() * ball_mass,
            });
            vertex_lookup[i][z] = Some(id);
        }
    }

    let nv = vertices.len();
    let boundary_nodes: Vec<usize> = (0..n).map(|z| nv + z).collect();
    let mut edges: Vec<Edge> = Vec::new();

    // balls intersect iff some atom lies in both
    let balls_meet = |z: usize, rz: f64, y: usize, ry: f64| -> bool {
        (0..n).any(|w| space.dist(z, w) < rz && space.dist(y, w) < ry)
    };

    for i in 0..=depth {
        let level = nets.level(i);
        let r_tau = params.tau * params.alpha.powi(-(i as i32));
        // horizontal edges at level i
        for (ai, &z) in level.iter().enumerate() {
            for &y in &level[ai + 1..] {
                if balls_meet(z, r_tau, y, r_tau) {
                    let u = vertex_lookup[i][z].unwrap();
                    let v = vertex_lookup[i][y].unwrap();
                    let len = params.alpha.powi(-(i as i32));
                    edges.push(Edge {
                        u,
                        v,
                        kind: EdgeKind::Horizontal,
                        len,
                        mass: vertices[u].hat_mu + vertices[v].hat_mu,
                    });
                }
            }
        }
        // vertical edges from level i to i+1
        if i < depth {
            let r_i = params.alpha.powi(-(i as i32));
            let r_j = params.alpha.powi(-(i as i32 + 1));
            for &z in level {
                for &y in nets.level(i + 1) {
                    if balls_meet(z, r_i, y, r_j) {
                        let u = vertex_lookup[i][z].unwrap();
                        let v = vertex_lookup[i + 1][y].unwrap();
                        let len = (1.0 - 1.0 / params.alpha) * r_i / params.eps;
                        edges.push(Edge {
                            u,
                            v,
                            kind: EdgeKind::Vertical,
                            len,
                            mass: vertices[u].hat_mu + vertices[v].hat_mu,
                        });
                    }
                }
            }
        }
    }

    // tails: one edge from (z, depth) to the boundary copy of z
    let tail_len = params.alpha.powi(-(depth as i32)) / params.eps;
    for z in 0..n {
        let u = vertex_lookup[depth][z].ok_or_else(|| {
            Error::InternalConsistency(format!("point {z} missing from the deepest net"))
        })?;
        edges.push(Edge {
            u,
            v: boundary_nodes[z],
            kind: EdgeKind::Tail,
            len: tail_len,
            mass: tail_mass(space.atom_mass(z), params.beta, depth as f64),
        });
    }

    let mut adjacency = vec![Vec::new(); nv + n];
    for (ei, e) in edges.iter().enumerate() {
        adjacency[e.u].push(ei);
        adjacency[e.v].push(ei);
    }

    // every vertex above the root must have a vertical edge downward
    for (id, v) in vertices.iter().enumerate() {
        if v.level == 0 {
            continue;
        }
        let ok = adjacency[id].iter().any(|&ei| {
            let e = &edges[ei];
            e.kind == EdgeKind::Vertical && {
                let other = if e.u == id { e.v } else { e.u };
                vertices[other].level + 1 == v.level
            }
        });
        if !ok {
            return Err(Error::InternalConsistency(format!(
                "vertex ({}, {}) has no vertical edge to the coarser level",
                v.point, v.level
            )));
        }
    }

    let mut filling = Filling {
        params,
        vertices,
        edges,
        adjacency,
        boundary_nodes,
        atom_mass: space.masses().to_vec(),
        vertex_lookup,
        boundary_dist: Vec::new(),
    };
    let sources: Vec<usize> = filling.boundary_nodes.clone();
    filling.boundary_dist = filling.dijkstra(&sources);
    if filling.boundary_dist.iter().any(|d| !d.is_finite()) {
        return Err(Error::InternalConsistency("filling graph is disconnected".into()));
    }
    Ok(filling)
}

/// Measured form of the Whitney-type covering of the filling by the balls
/// B_eps((z,i), alpha^{-i}).
#[derive(Debug, Clone, Serialize)]
pub struct WhitneyFillingReport {
    /// every non-tail edge is covered by its endpoint balls
    pub edges_covered: bool,
    /// max over interior vertices of the number of covering balls
    pub max_multiplicity: usize,
    /// min over interior vertices (cover property makes this >= 1)
    pub min_multiplicity: usize,
}

pub fn verify_whitney_filling(filling: &Filling) -> Result<WhitneyFillingReport> {
    let mut edges_covered = true;
    for e in filling.edges() {
        if e.kind == EdgeKind::Tail {
            continue;
        }
        let ri = filling.params.alpha.powi(-(filling.vertices()[e.u].level as i32));
        let rj = filling.params.alpha.powi(-(filling.vertices()[e.v].level as i32));
        if ri + rj <= e.len {
            edges_covered = false;
        }
    }

    let mut multiplicity = vec![0usize; filling.num_nodes()];
    for (vid, v) in filling.vertices().iter().enumerate() {
        let radius = filling.params.alpha.powi(-(v.level as i32));
        let dist = filling.dijkstra(&[vid]);
        for (node, &d) in dist.iter().enumerate() {
            if d < radius {
                multiplicity[node] += 1;
            }
        }
    }
    let interior = &multiplicity[..filling.num_vertices()];
    let max_multiplicity = interior.iter().copied().max().unwrap_or(0);
    let min_multiplicity = interior.iter().copied().min().unwrap_or(0);
    if min_multiplicity == 0 {
        return Err(Error::InternalConsistency(
            "some interior vertex is not covered by any Whitney ball".into(),
        ));
    }
    Ok(WhitneyFillingReport { edges_covered, max_multiplicity, min_multiplicity })
}

/// Measured two-sided comparison between nu(B_eps(z, r) cap Z) and
/// mu_beta(B_eps(z, r)) / r^{beta/eps} over boundary centers and a geometric
/// radius grid inside (tail scale, 2 diam].
#[derive(Debug, Clone, Serialize)]
pub struct CodimensionRelation {
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub samples: usize,
}

pub fn codimension_relation_check(
    filling: &Filling,
    space: &PointCloudSpace,
) -> CodimensionRelation {
    let exponent = filling.params.beta / filling.params.eps;
    let r_min = 4.0 * filling.params.alpha.powi(-(filling.params.depth as i32));
    let r_max = 2.0 * space.diam();
    let steps = 12usize;
    let mut min_ratio = f64::INFINITY;
    let mut max_ratio: f64 = 0.0;
    let mut samples = 0usize;
    for z in 0..space.len() {
        let dist = filling.dijkstra(&[filling.boundary_node(z)]);
        for k in 0..=steps {
            // geometric grid strictly above the tail scale
            let r = r_min * (r_max / r_min).powf((k as f64 + 0.5) / (steps as f64 + 1.0));
            let mu = filling.ball_measure(&dist, r);
            let nu: f64 = (0..space.len())
                .filter(|&w| dist[filling.boundary_node(w)] < r)
                .map(|w| space.atom_mass(w))
                .sum();
            let ratio = mu / r.powf(exponent) / nu;
            min_ratio = min_ratio.min(ratio);
            max_ratio = max_ratio.max(ratio);
            samples += 1;
        }
    }
    CodimensionRelation { min_ratio, max_ratio, samples }
}

/// Export schema for golden tests and external inspection.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FillingDocument {
    pub vertices: Vec<VertexRecord>,
    pub edges: Vec<EdgeRecord>,
    pub boundary: Vec<BoundaryRecord>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VertexRecord {
    pub z: usize,
    pub i: usize,
    pub hat_mu: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EdgeRecord {
    pub u: usize,
    pub v: usize,
    pub kind: EdgeKind,
    pub len: f64,
    pub mass: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundaryRecord {
    pub z: usize,
    pub node: usize,
}
