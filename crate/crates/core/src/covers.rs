//! Combinatorial scaffolding: Whitney covers with the radius rule
//! r_i = d_Omega(x_i) / 8, tent-function partitions of unity, the
//! boundary-induced cover of the complement of an obstacle, and vertex
//! chains descending to the boundary.

use crate::error::{Error, Result};
use crate::filling::Filling;
use crate::metric::DistMatrix;
use crate::space::{NetHierarchy, PointCloudSpace, SubsetMask};

/// A finite sample split into a domain Omega and its complement, with the
/// full pairwise metric, per-point masses, distances to the complement, and
/// an adjacency used for discrete slope measurements.
#[derive(Debug, Clone)]
pub struct Domain {
    pub dist: DistMatrix,
    pub mass: Vec<f64>,
    pub in_omega: Vec<bool>,
    pub d_omega: Vec<f64>,
    pub adjacency: Vec<(usize, usize)>,
}

impl Domain {
    pub fn len(&self) -> usize {
        self.mass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mass.is_empty()
    }

    pub fn omega_ids(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.in_omega[i]).collect()
    }

    /// Domain over the points of a space with obstacle E; adjacency links
    /// each point to its nearest neighbors.
    pub fn from_space(space: &PointCloudSpace, e: &SubsetMask) -> Result<Self> {
        if e.is_empty() {
            return Err(Error::EmptySubset);
        }
        let n = space.len();
        let d_omega = crate::space::distance_to_set(space, e)?;
        let in_omega: Vec<bool> = (0..n).map(|i| !e.contains(i)).collect();
        if in_omega.iter().all(|&b| !b) {
            return Err(Error::EmptySubset);
        }
        let mut adjacency = Vec::new();
        for i in 0..n {
            let mut near: Vec<usize> = (0..n).filter(|&j| j != i).collect();
            near.sort_by(|&a, &b| space.dist(i, a).partial_cmp(&space.dist(i, b)).unwrap());
            for &j in near.iter().take(4) {
                let pair = (i.min(j), i.max(j));
                adjacency.push(pair);
            }
        }
        adjacency.sort_unstable();
        adjacency.dedup();
        Ok(Self {
            dist: space.dist_matrix().clone(),
            mass: space.masses().to_vec(),
            in_omega,
            d_omega,
            adjacency,
        })
    }

    /// Domain over the filling's nodes with node masses lumped from edges,
    /// the complement being the boundary nodes of `e`. Adjacency is the
    /// graph itself.
    pub fn from_filling(filling: &Filling, e: &SubsetMask) -> Result<Self> {
        if e.is_empty() {
            return Err(Error::EmptySubset);
        }
        let n = filling.num_nodes();
        let sources: Vec<usize> = e.ids().iter().map(|&z| filling.boundary_node(z)).collect();
        let d_omega = filling.dist_from_set(&sources)?;
        let mut in_omega = vec![true; n];
        for &s in &sources {
            in_omega[s] = false;
        }
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|i| filling.dist_from_set(&[i]).unwrap())
            .collect();
        let dist = DistMatrix::from_fn(n, |i, j| rows[i][j]);
        let mass: Vec<f64> = (0..n).map(|v| filling.node_mass(v)).collect();
        let adjacency: Vec<(usize, usize)> = filling
            .edges()
            .iter()
            .map(|e| (e.u.min(e.v), e.u.max(e.v)))
            .collect();
        Ok(Self { dist, mass, in_omega, d_omega, adjacency })
    }

    /// Mass-weighted average of w over the open ball B(center, r).
    pub fn ball_average(&self, w: &[f64], center: usize, r: f64) -> f64 {
        let mut num = 0.0;
        let mut den = 0.0;
        for j in 0..self.len() {
            if self.dist.get(center, j) < r {
                num += w[j] * self.mass[j];
                den += self.mass[j];
            }
        }
        num / den
    }
}

/// One Whitney ball per domain sample point, radius d_Omega / 8 exactly.
#[derive(Debug, Clone)]
pub struct WhitneyCover {
    /// (center sample id, radius)
    pub balls: Vec<(usize, f64)>,
    /// measured max multiplicity of the dilated collection {6 B_i}
    pub overlap6: usize,
}

pub fn whitney_cover(domain: &Domain) -> Result<WhitneyCover> {
    let omega = domain.omega_ids();
    if omega.is_empty() || omega.len() == domain.len() {
        return Err(Error::EmptySubset);
    }
    let balls: Vec<(usize, f64)> = omega
        .iter()
        .map(|&x| (x, domain.d_omega[x] / 8.0))
        .collect();
    let mut overlap6 = 0usize;
    for &x in &omega {
        let count = balls
            .iter()
            .filter(|&&(c, r)| domain.dist.get(x, c) < 6.0 * r)
            .count();
        overlap6 = overlap6.max(count);
    }
    Ok(WhitneyCover { balls, overlap6 })
}

/// Tent-function partition subordinate to a Whitney cover:
/// psi_i(x) = max(0, 1 - d(x, x_i) / (2 r_i)), phi_i = psi_i / sum psi.
#[derive(Debug, Clone)]
pub struct PartitionOfUnity {
    /// phi[i][k] for ball i and domain sample k (zero off Omega)
    pub phi: Vec<Vec<f64>>,
    /// measured lower bound of phi_i on B_i
    pub interior_lower_bound: f64,
    /// measured max over i of (discrete Lipschitz ratio of phi_i) * r_i
    pub lipschitz_scale: f64,
}

pub fn partition_of_unity(domain: &Domain, cover: &WhitneyCover) -> PartitionOfUnity {
    let n = domain.len();
    let nb = cover.balls.len();
    let tent = |i: usize, x: usize| -> f64 {
        let (c, r) = cover.balls[i];
        (1.0 - domain.dist.get(x, c) / (2.0 * r)).max(0.0)
    };
    let mut phi = vec![vec![0.0; n]; nb];
    for x in 0..n {
        if !domain.in_omega[x] {
            continue;
        }
        let psi: Vec<f64> = (0..nb).map(|i| tent(i, x)).collect();
        let total: f64 = psi.iter().sum();
        for i in 0..nb {
            phi[i][x] = psi[i] / total;
        }
    }

    let mut interior_lower_bound = f64::INFINITY;
    for (i, &(c, r)) in cover.balls.iter().enumerate() {
        for x in 0..n {
            if domain.in_omega[x] && domain.dist.get(x, c) < r {
                interior_lower_bound = interior_lower_bound.min(phi[i][x]);
            }
        }
    }

    let mut lipschitz_scale: f64 = 0.0;
    for (i, &(_, r)) in cover.balls.iter().enumerate() {
        for &(a, b) in &domain.adjacency {
            if !domain.in_omega[a] || !domain.in_omega[b] {
                continue;
            }
            let d = domain.dist.get(a, b);
            if d > 0.0 {
                let slope = (phi[i][a] - phi[i][b]).abs() / d;
                lipschitz_scale = lipschitz_scale.max(slope * r);
            }
        }
    }
    PartitionOfUnity { phi, interior_lower_bound, lipschitz_scale }
}

/// Whitney-type cover of the complement of an obstacle, induced by the net
/// hierarchy: U_{i,j} = B_Z(z_{i,j}, alpha^{-i}) with (i, j) selected by the
/// shells 8 alpha^{-i} <= d(z, E) < 8 alpha^{-(i-1)}.
#[derive(Debug, Clone)]
pub struct InducedBoundaryCover {
    /// (level, net point id)
    pub indices: Vec<(usize, usize)>,
    /// per index: member point ids of U_{i,j}
    pub members: Vec<Vec<usize>>,
    /// measured max multiplicity of {3 U_{i,j}}
    pub overlap3: usize,
}

impl InducedBoundaryCover {
    pub fn radius(&self, k: usize, alpha: f64) -> f64 {
        alpha.powi(-(self.indices[k].0 as i32))
    }
}

pub fn induced_cover(
    space: &PointCloudSpace,
    nets: &NetHierarchy,
    e: &SubsetMask,
) -> Result<InducedBoundaryCover> {
    if e.is_empty() {
        return Err(Error::EmptySubset);
    }
    let omega = e.complement("Omega");
    if omega.is_empty() {
        return Err(Error::EmptySubset);
    }
    let alpha = nets.alpha;
    let d_e = crate::space::distance_to_set(space, e)?;

    // shell index: the unique i with 8 alpha^{-i} <= d < 8 alpha^{-(i-1)}
    let shell = |d: f64| -> usize {
        let raw = (8.0 / d).ln() / alpha.ln();
        let snapped = if (raw - raw.round()).abs() < 1e-9 { raw.round() } else { raw.ceil() };
        snapped.max(0.0) as usize
    };

    // nets are stationary above their top level (every point is a member)
    let level_points = |i: usize| -> &[usize] { nets.level(i.min(nets.max_level())) };

    let mut indices = Vec::new();
    let mut members: Vec<Vec<usize>> = Vec::new();
    let mut shells: Vec<(usize, usize)> =
        omega.ids().iter().map(|&z| (shell(d_e[z]), z)).collect();
    shells.sort_unstable();
    let mut k = 0;
    while k < shells.len() {
        let i = shells[k].0;
        let mut in_shell = Vec::new();
        while k < shells.len() && shells[k].0 == i {
            in_shell.push(shells[k].1);
            k += 1;
        }
        let radius = alpha.powi(-(i as i32));
        for &zc in level_points(i) {
            let touches = in_shell.iter().any(|&z| space.dist(zc, z) < radius);
            if touches {
                indices.push((i, zc));
                members.push(
                    (0..space.len())
                        .filter(|&z| space.dist(zc, z) < radius)
                        .collect(),
                );
            }
        }
    }

    // Lemma properties, asserted as internal consistency (test hook).
    let mut covered = vec![false; space.len()];
    for m in &members {
        for &z in m {
            covered[z] = true;
        }
    }
    for &z in &omega.ids() {
        if !covered[z] {
            return Err(Error::InternalConsistency(format!(
                "induced cover misses domain point {z}"
            )));
        }
    }
    for ((i, zc), m) in indices.iter().zip(&members) {
        let radius = alpha.powi(-(*i as i32));
        let d_u_e = m.iter().map(|&z| d_e[z]).fold(f64::INFINITY, f64::min);
        if !(6.0 * radius <= d_u_e * (1.0 + 1e-12)
            && d_u_e <= 8.0 * alpha * radius * (1.0 + 1e-12))
        {
            return Err(Error::InternalConsistency(format!(
                "induced cover distance bound fails at ({i}, {zc}): d(U, E) = {d_u_e}, radius = {radius}"
            )));
        }
    }
    let mut overlap3 = 0usize;
    for &z in &omega.ids() {
        let count = indices
            .iter()
            .filter(|&&(i, zc)| space.dist(zc, z) < 3.0 * alpha.powi(-(i as i32)))
            .count();
        overlap3 = overlap3.max(count);
    }
    Ok(InducedBoundaryCover { indices, members, overlap3 })
}

/// Chain of filling balls descending from a cover index toward a boundary
/// point: at each level the nearest net point within alpha^{-k} of z, ties
/// broken by ascending point id, truncated at the filling depth with the
/// boundary node appended.
#[derive(Debug, Clone)]
pub struct ChainOfBalls {
    /// (level, net point id, vertex node id)
    pub links: Vec<(usize, usize, usize)>,
    /// boundary node of z
    pub tail: usize,
}

pub fn chain_to_boundary(
    filling: &Filling,
    space: &PointCloudSpace,
    nets: &NetHierarchy,
    start: (usize, usize),
    z: usize,
) -> Result<ChainOfBalls> {
    let (i0, j0) = start;
    let alpha = nets.alpha;
    if space.dist(j0, z) >= alpha.powi(-(i0 as i32)) {
        return Err(Error::ParameterRange(format!(
            "boundary point {z} is not in U_({i0},{j0})"
        )));
    }
    let depth = filling.params.depth;
    if i0 > depth {
        return Err(Error::DepthTooSmall { requested: depth, required: i0 });
    }
    let mut links = Vec::with_capacity(depth - i0 + 1);
    for k in i0..=depth {
        let pick = if k == i0 {
            j0
        } else {
            let radius = alpha.powi(-(k as i32));
            *nets
                .level(k)
                .iter()
                .filter(|&&c| space.dist(c, z) < radius)
                .min_by(|&&a, &&b| {
                    space
                        .dist(a, z)
                        .partial_cmp(&space.dist(b, z))
                        .unwrap()
                        .then(a.cmp(&b))
                })
                .ok_or_else(|| {
                    Error::InternalConsistency(format!(
                        "no net point within alpha^-{k} of {z}; maximality violated"
                    ))
                })?
        };
        let vid = filling.vertex_id(pick, k).ok_or_else(|| {
            Error::InternalConsistency(format!("vertex ({pick}, {k}) missing from filling"))
        })?;
        links.push((k, pick, vid));
    }
    let chain = ChainOfBalls { links, tail: filling.boundary_node(z) };

    // nesting B_{k+1} subset 2 B_k and containment in 5 B_(i0,j0)
    let start_vid = chain.links[0].2;
    let d_start = filling.dist_from_set(&[start_vid])?;
    for w in chain.links.windows(2) {
        let (k, _, va) = w[0];
        let (_, _, vb) = w[1];
        let d = filling.dist_from_set(&[va])?;
        let ra = alpha.powi(-(k as i32));
        let rb = alpha.powi(-(k as i32 + 1));
        if d[vb] + rb > 2.0 * ra + 1e-12 {
            return Err(Error::InternalConsistency(format!(
                "chain nesting fails between levels {k} and {}",
                k + 1
            )));
        }
    }
    for &(k, _, vid) in &chain.links {
        let rk = alpha.powi(-(k as i32));
        if d_start[vid] + rk > 5.0 * alpha.powi(-(i0 as i32)) + 1e-12 {
            return Err(Error::InternalConsistency(format!(
                "chain ball at level {k} escapes 5 B_({i0},{j0})"
            )));
        }
    }
    Ok(chain)
}
