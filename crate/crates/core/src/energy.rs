//! Every energy and Hardy left-hand side as an exact finite sum: the Besov
//! double sum with the open-ball kernel, the edgewise Dirichlet energy with
//! exact slopes, and the distance-weighted absolute-value sums.

use crate::error::{Error, Result};
use crate::filling::{FieldX, Filling};
use crate::space::{FieldZ, PointCloudSpace, SubsetMask};

/// |x|^p with fast paths for the exponents the solvers hammer on.
#[inline]
pub fn pow_abs(x: f64, p: f64) -> f64 {
    let a = x.abs();
    if p == 2.0 {
        a * a
    } else if p == 1.5 {
        a * a.sqrt()
    } else if p == 3.0 {
        a * a * a
    } else if p == 1.0 {
        a
    } else {
        a.powf(p)
    }
}

/// Besov (theta, p) energy:
/// sum over ordered pairs z != w of
/// |u(z) - u(w)|^p nu(z) nu(w) / (d(z,w)^{theta p} nu(B(z, d(z,w)))).
/// Balls are open, so the kernel never divides by zero.
pub fn besov_energy(space: &PointCloudSpace, theta: f64, p: f64, u: &FieldZ) -> f64 {
    let n = space.len();
    let tp = theta * p;
    let mut total = 0.0;
    for z in 0..n {
        for w in 0..n {
            if w == z {
                continue;
            }
            let d = space.dist(z, w);
            let kernel = space.mass(z) * space.mass(w) / (d.powf(tp) * space.ball_mass(z, d));
            total += pow_abs(u[z] - u[w], p) * kernel;
        }
    }
    total
}

/// As [`besov_energy`] but with both integration variables restricted to a
/// window; the ball mass in the kernel stays ambient.
pub fn restricted_besov_energy(
    space: &PointCloudSpace,
    window: &SubsetMask,
    theta: f64,
    p: f64,
    u: &FieldZ,
) -> f64 {
    let tp = theta * p;
    let ids = window.ids();
    let mut total = 0.0;
    for &z in &ids {
        for &w in &ids {
            if w == z {
                continue;
            }
            let d = space.dist(z, w);
            let kernel = space.mass(z) * space.mass(w) / (d.powf(tp) * space.ball_mass(z, d));
            total += pow_abs(u[z] - u[w], p) * kernel;
        }
    }
    total
}

/// Left-hand side of the fractional Hardy inequality:
/// sum over z outside E of |u(z)|^p d(z, E)^{-theta p} nu(z).
/// The field must vanish on E.
pub fn frac_hardy_lhs(
    space: &PointCloudSpace,
    e: &SubsetMask,
    theta: f64,
    p: f64,
    u: &FieldZ,
) -> Result<f64> {
    if e.is_empty() {
        return Err(Error::EmptySubset);
    }
    for z in 0..space.len() {
        if e.contains(z) && u[z] != 0.0 {
            return Err(Error::NonzeroOnZeroSet { index: z, value: u[z] });
        }
    }
    let d = crate::space::distance_to_set(space, e)?;
    let tp = theta * p;
    let mut total = 0.0;
    for z in 0..space.len() {
        if !e.contains(z) {
            total += pow_abs(u[z], p) * space.mass(z) / d[z].powf(tp);
        }
    }
    Ok(total)
}

/// p-Dirichlet energy of an edgewise-linear field: the exact upper gradient
/// of such a field on each edge is the constant slope |du| / len, so the
/// energy is sum over edges of (|du| / len)^p * mass, tails included.
pub fn dirichlet_energy(filling: &Filling, p: f64, u: &FieldX) -> f64 {
    filling
        .edges()
        .iter()
        .map(|e| pow_abs((u[e.u] - u[e.v]) / e.len, p) * e.mass)
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quadrature {
    /// Node values weighted by half the incident edge mass.
    VertexLumped,
    /// Each edge contributes quarter/half/quarter at its endpoints and
    /// d_eps-midpoint, with the linear interpolant's midpoint value.
    MidpointRefined,
}

/// Left-hand side of the p-Hardy inequality on the filling:
/// the quadrature of |u|^p d_eps(., E)^{-p} against mu_beta, where E is a
/// nonempty set of boundary points carrying the zero constraint.
pub fn filling_hardy_lhs(
    filling: &Filling,
    e: &SubsetMask,
    p: f64,
    u: &FieldX,
    quadrature: Quadrature,
) -> Result<f64> {
    if e.is_empty() {
        return Err(Error::EmptySubset);
    }
    let sources: Vec<usize> = e.ids().iter().map(|&z| filling.boundary_node(z)).collect();
    for &s in &sources {
        if u[s] != 0.0 {
            return Err(Error::NonzeroOnZeroSet { index: s, value: u[s] });
        }
    }
    let dist = filling.dist_from_set(&sources)?;
    let term = |value: f64, d: f64| -> f64 {
        if d == 0.0 {
            // only reachable on E itself, where the field vanishes
            0.0
        } else {
            pow_abs(value, p) / d.powf(p)
        }
    };
    let total = match quadrature {
        Quadrature::VertexLumped => (0..filling.num_nodes())
            .map(|v| filling.node_mass(v) * term(u[v], dist[v]))
            .sum(),
        Quadrature::MidpointRefined => filling
            .edges()
            .iter()
            .map(|edge| {
                let half = 0.5 * edge.len;
                let mid_d = (dist[edge.u] + half).min(dist[edge.v] + half);
                let mid_u = 0.5 * (u[edge.u] + u[edge.v]);
                edge.mass
                    * (0.25 * term(u[edge.u], dist[edge.u])
                        + 0.5 * term(mid_u, mid_d)
                        + 0.25 * term(u[edge.v], dist[edge.v]))
            })
            .sum(),
    };
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filling::{build_filling, FillingParams};
    use crate::fixtures;
    use crate::space::build_nets;

    #[test]
    fn besov_fix_a_hand_value() {
        let s = fixtures::fix_a();
        let u = vec![0.0, 1.0];
        // two ordered pairs, each 1 / (0.5 * 1) = 2
        let got = besov_energy(&s, 0.5, 2.0, &u);
        assert!((got - 4.0).abs() < 1e-14, "got {got}");
    }

    #[test]
    fn besov_constant_is_zero_and_homogeneous() {
        let s = fixtures::fix_b();
        assert_eq!(besov_energy(&s, 0.3, 2.5, &vec![3.7; 8]), 0.0);
        let u: Vec<f64> = (0..8).map(|k| (k as f64).sin()).collect();
        let p = 2.5;
        let e1 = besov_energy(&s, 0.3, p, &u);
        let scaled: Vec<f64> = u.iter().map(|v| 3.0 * v).collect();
        let e2 = besov_energy(&s, 0.3, p, &scaled);
        assert!((e2 / e1 - 3.0f64.powf(p)).abs() < 1e-9);
    }

    #[test]
    fn besov_is_permutation_invariant() {
        let s = fixtures::grid_1d(6);
        let u = vec![0.3, -1.0, 2.0, 0.0, 0.5, 1.5];
        let base = besov_energy(&s, 0.4, 2.0, &u);
        // relabel points by reversal: rebuild the space with reversed rows
        let pts: Vec<Vec<f64>> = (0..6).rev().map(|k| vec![k as f64 * 0.1]).collect();
        let s2 = crate::space::PointCloudSpace::from_points(pts, vec![1.0 / 6.0; 6], 5).unwrap();
        let u2: Vec<f64> = u.iter().rev().cloned().collect();
        let permuted = besov_energy(&s2, 0.4, 2.0, &u2);
        assert!((base - permuted).abs() < 1e-12 * base.max(1.0));
    }

    #[test]
    fn frac_lhs_fix_a_hand_value() {
        let s = fixtures::fix_a();
        let e = SubsetMask::from_ids(2, &[0], "E");
        let u = vec![0.0, 1.0];
        let got = frac_hardy_lhs(&s, &e, 0.5, 2.0, &u).unwrap();
        assert!((got - 2.0).abs() < 1e-14, "got {got}");
        assert_eq!(frac_hardy_lhs(&s, &e, 0.5, 2.0, &vec![0.0, 0.0]).unwrap(), 0.0);
        let bad = frac_hardy_lhs(&s, &e, 0.5, 2.0, &vec![1.0, 1.0]);
        assert!(matches!(bad, Err(Error::NonzeroOnZeroSet { index: 0, .. })));
    }

    #[test]
    fn dirichlet_single_edge_value() {
        // build the smallest filling and check one edge by hand instead:
        // (|du| / len)^p * mass with du = 1, len = 0.5, mass = 0.25, p = 2
        let term = pow_abs(1.0 / 0.5, 2.0) * 0.25;
        assert_eq!(term, 1.0);

        let s = fixtures::fix_a();
        let nets = build_nets(&s, fixtures::alpha(), 4).unwrap();
        let f = build_filling(&s, &nets, FillingParams::standard(1.0, 4)).unwrap();
        assert_eq!(dirichlet_energy(&f, 2.0, &vec![5.0; f.num_nodes()]), 0.0);
    }

    #[test]
    fn dirichlet_halving_an_edge_preserves_energy() {
        // algebraic identity: splitting an edge at its midpoint with the
        // linear value leaves (|du|/len)^p * mass unchanged when each half
        // carries half the mass
        for p in [1.5, 2.0, 3.0] {
            let du: f64 = 0.7;
            let len = 0.3;
            let mass = 0.9;
            let whole = pow_abs(du / len, p) * mass;
            let half = 2.0 * pow_abs((du / 2.0) / (len / 2.0), p) * (mass / 2.0);
            assert!((whole - half).abs() < 1e-12);
        }
    }

    #[test]
    fn linear_profile_minimizes_edge_energy() {
        // against a 3-segment perturbation with the same endpoint values
        let p = 2.5;
        let len = 1.0;
        let mass = 1.0;
        let du = 1.0;
        let linear = pow_abs(du / len, p) * mass;
        for bump in [-0.3, 0.1, 0.45] {
            let vals = [0.0, du / 3.0 + bump, 2.0 * du / 3.0 - bump, du];
            let seg = len / 3.0;
            let perturbed: f64 = vals
                .windows(2)
                .map(|w| pow_abs((w[1] - w[0]) / seg, p) * (mass / 3.0))
                .sum();
            assert!(perturbed >= linear - 1e-12, "bump {bump}");
        }
    }

    #[test]
    fn filling_lhs_single_vertex_hand_value() {
        // |u|^p / d^p * m = 1 / 0.4^2 * 0.2 = 1.25
        let term = pow_abs(1.0, 2.0) / 0.4f64.powf(2.0) * 0.2;
        assert!((term - 1.25).abs() < 1e-14);
    }

    #[test]
    fn filling_lhs_quadratures_stay_within_factor_two() {
        let s = fixtures::fix_b();
        let nets = build_nets(&s, fixtures::alpha(), 12).unwrap();
        let f = build_filling(&s, &nets, FillingParams::standard(1.0, 12)).unwrap();
        let e = SubsetMask::from_ids(8, &[0], "E");
        let mut u = vec![0.0; f.num_nodes()];
        for v in 0..f.num_nodes() {
            u[v] = (v as f64 * 0.37).sin().abs() + 0.1;
        }
        u[f.boundary_node(0)] = 0.0;
        let lumped = filling_hardy_lhs(&f, &e, 2.0, &u, Quadrature::VertexLumped).unwrap();
        let refined = filling_hardy_lhs(&f, &e, 2.0, &u, Quadrature::MidpointRefined).unwrap();
        let ratio = lumped / refined;
        assert!(ratio < 2.0 && ratio > 0.5, "quadrature ratio {ratio}");
    }

    #[test]
    fn restricted_besov_degenerate_windows() {
        let s = fixtures::fix_b();
        let u: Vec<f64> = (0..8).map(|k| k as f64).collect();
        let full = SubsetMask::full(8, "W");
        assert_eq!(
            restricted_besov_energy(&s, &full, 0.5, 2.0, &u),
            besov_energy(&s, 0.5, 2.0, &u)
        );
        let single = SubsetMask::from_ids(8, &[3], "W");
        assert_eq!(restricted_besov_energy(&s, &single, 0.5, 2.0, &u), 0.0);
        assert_eq!(restricted_besov_energy(&s, &full, 0.5, 2.0, &vec![2.0; 8]), 0.0);
    }
}
