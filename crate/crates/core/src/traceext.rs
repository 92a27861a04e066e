//! Trace and extension operators between fields on the space and fields on
//! the filling, with sampled boundedness reports.
//!
//! The extension averages over the space balls B_Z(z, alpha^{-i}); the trace
//! reads the boundary node value, which for an edgewise-linear field equals
//! the small-ball average limit at the boundary. An explicit averaging
//! variant is kept for cross-checking the limit at a few radii.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::energy::{besov_energy, dirichlet_energy};
use crate::error::{Error, Result};
use crate::filling::{FieldX, Filling};
use crate::space::{FieldZ, PointCloudSpace};

/// Ef at vertex (z, i) is the mass-weighted average of f over the open ball
/// B_Z(z, alpha^{-i}); at a boundary node it is f(z) itself.
pub fn extend(filling: &Filling, space: &PointCloudSpace, f: &FieldZ) -> FieldX {
    let alpha = filling.params.alpha;
    let mut out = vec![0.0; filling.num_nodes()];
    for (vid, v) in filling.vertices().iter().enumerate() {
        let radius = alpha.powi(-(v.level as i32));
        let mut num = 0.0;
        let mut den = 0.0;
        for w in 0..space.len() {
            if space.dist(v.point, w) < radius {
                num += f[w] * space.mass(w);
                den += space.mass(w);
            }
        }
        out[vid] = num / den;
    }
    for z in 0..space.len() {
        out[filling.boundary_node(z)] = f[z];
    }
    out
}

/// Tu(z) = u(b_z): the boundary value, which realizes the vanishing-radius
/// ball average of an edgewise-linear field exactly.
pub fn trace(filling: &Filling, u: &FieldX) -> FieldZ {
    (0..filling.num_points())
        .map(|z| u[filling.boundary_node(z)])
        .collect()
}

/// Averaging form of the trace at explicit radii, for cross-checking:
/// the mu_beta-average of the edgewise-linear field over B_eps(z, r).
pub fn trace_by_averaging(filling: &Filling, u: &FieldX, z: usize, radii: &[f64]) -> Vec<f64> {
    let dist = filling
        .dist_from_set(&[filling.boundary_node(z)])
        .expect("nonempty source");
    radii
        .iter()
        .map(|&r| {
            let mut num = 0.0;
            let mut den = 0.0;
            for e in filling.edges() {
                // covered sub-segments measured from each endpoint
                let a = (r - dist[e.u]).clamp(0.0, e.len);
                let b = (r - dist[e.v]).clamp(0.0, e.len);
                let covered = (a + b).min(e.len);
                if covered <= 0.0 {
                    continue;
                }
                let density = e.mass / e.len;
                // integrate the linear interpolant over the covered pieces
                let du = u[e.v] - u[e.u];
                let mut add = |s0: f64, s1: f64| {
                    let mid = 0.5 * (s0 + s1);
                    let val = u[e.u] + du * (mid / e.len);
                    num += density * (s1 - s0) * val;
                    den += density * (s1 - s0);
                };
                if a + b >= e.len {
                    add(0.0, e.len);
                } else {
                    if a > 0.0 {
                        add(0.0, a);
                    }
                    if b > 0.0 {
                        add(e.len - b, e.len);
                    }
                }
            }
            num / den
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct BoundednessReport {
    /// max over sampled filling fields of besov(Tu) / dirichlet(u)
    pub r_trace: f64,
    /// max over sampled boundary fields of dirichlet(Ef) / besov(f)
    pub r_extension: f64,
    pub trace_maximizer: FieldX,
    pub extension_maximizer: FieldZ,
    pub samples: usize,
}

/// Sampled lower bounds on the operator norms of T and E at the exponent
/// pairing beta = eps * p(1 - theta), which is asserted against the filling.
pub fn boundedness_report(
    filling: &Filling,
    space: &PointCloudSpace,
    theta: f64,
    p: f64,
    n_samples: usize,
    seed: u64,
) -> Result<BoundednessReport> {
    let expected = filling.params.eps * p * (1.0 - theta);
    if (filling.params.beta - expected).abs() > 1e-9 * expected.max(1.0) {
        return Err(Error::ParameterRange(format!(
            "beta = {} violates beta = eps p (1 - theta) = {}",
            filling.params.beta, expected
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut r_trace: f64 = 0.0;
    let mut trace_maximizer = vec![0.0; filling.num_nodes()];
    for _ in 0..n_samples {
        let u: FieldX = (0..filling.num_nodes())
            .map(|_| rng.gen_range(-1.0..1.0))
            .collect();
        let den = dirichlet_energy(filling, p, &u);
        if den <= 1e-300 {
            continue;
        }
        let num = besov_energy(space, theta, p, &trace(filling, &u));
        let ratio = num / den;
        if ratio > r_trace {
            r_trace = ratio;
            trace_maximizer = u;
        }
    }

    let mut r_extension: f64 = 0.0;
    let mut extension_maximizer = vec![0.0; space.len()];
    for k in 0..n_samples {
        // sample 0 is the indicator of the first atom, pinned so the
        // hand-checkable case is always present
        let f: FieldZ = if k == 0 {
            (0..space.len()).map(|z| if z == 0 { 1.0 } else { 0.0 }).collect()
        } else {
            (0..space.len()).map(|_| rng.gen_range(-1.0..1.0)).collect()
        };
        let den = besov_energy(space, theta, p, &f);
        if den <= 1e-300 {
            continue;
        }
        let num = dirichlet_energy(filling, p, &extend(filling, space, &f));
        let ratio = num / den;
        if ratio > r_extension {
            r_extension = ratio;
            extension_maximizer = f;
        }
    }
    Ok(BoundednessReport {
        r_trace,
        r_extension,
        trace_maximizer,
        extension_maximizer,
        samples: n_samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filling::{build_filling, FillingParams};
    use crate::fixtures;
    use crate::space::build_nets;

    fn standard(space: &PointCloudSpace, beta: f64, depth: usize) -> Filling {
        let nets = build_nets(space, fixtures::alpha(), depth).unwrap();
        build_filling(space, &nets, FillingParams::standard(beta, depth)).unwrap()
    }

    #[test]
    fn extension_of_constant_is_constant() {
        let s = fixtures::fix_b();
        let f = standard(&s, 1.0, 12);
        let ext = extend(&f, &s, &vec![2.5; 8]);
        for v in ext {
            assert!((v - 2.5).abs() < 1e-14);
        }
    }

    #[test]
    fn extension_at_root_is_global_average() {
        let s = fixtures::fix_a();
        let f = standard(&s, 1.0, 4);
        let field = vec![0.0, 1.0];
        let ext = extend(&f, &s, &field);
        let root = f.vertex_id(0, 0).unwrap();
        assert!((ext[root] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn extension_fix_a_deep_vertex_sees_only_its_atom() {
        let s = fixtures::fix_a();
        let f = standard(&s, 1.0, 4);
        let ext = extend(&f, &s, &vec![0.0, 1.0]);
        let v = f.vertex_id(1, 3).unwrap();
        assert_eq!(ext[v], 1.0);
    }

    #[test]
    fn trace_of_extension_is_identity() {
        for (s, beta, depth) in [
            (fixtures::fix_a(), 1.0, 4),
            (fixtures::fix_b(), 0.5, 12),
            (fixtures::grid_1d(9), 1.5, 14),
        ] {
            let f = standard(&s, beta, depth);
            let field: FieldZ = (0..s.len()).map(|z| (z as f64 * 1.3).sin()).collect();
            let back = trace(&f, &extend(&f, &s, &field));
            for (a, b) in field.iter().zip(&back) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn trace_depends_only_on_boundary_values() {
        let s = fixtures::fix_a();
        let f = standard(&s, 1.0, 4);
        let mut u = vec![0.7; f.num_nodes()];
        let t1 = trace(&f, &u);
        for v in 0..f.num_vertices() {
            u[v] = -3.0; // interior values must not matter
        }
        let t2 = trace(&f, &u);
        assert_eq!(t1, t2);
    }

    #[test]
    fn operators_are_linear_and_extension_positive() {
        let s = fixtures::fix_b();
        let f = standard(&s, 1.0, 12);
        let a: FieldZ = (0..8).map(|z| z as f64).collect();
        let b: FieldZ = (0..8).map(|z| (z as f64).cos()).collect();
        let sum: FieldZ = a.iter().zip(&b).map(|(x, y)| x + 2.0 * y).collect();
        let ea = extend(&f, &s, &a);
        let eb = extend(&f, &s, &b);
        let esum = extend(&f, &s, &sum);
        for v in 0..f.num_nodes() {
            assert!((esum[v] - (ea[v] + 2.0 * eb[v])).abs() < 1e-12);
        }
        let pos: FieldZ = (0..8).map(|z| 0.1 + z as f64).collect();
        for v in extend(&f, &s, &pos) {
            assert!(v > 0.0);
        }
    }

    #[test]
    fn averaging_trace_converges_to_boundary_value() {
        let s = fixtures::fix_b();
        let f = standard(&s, 1.0, 12);
        let u: FieldX = (0..f.num_nodes()).map(|v| (v as f64 * 0.17).cos()).collect();
        let z = 3;
        // radii below the d_eps separation of boundary points, so each ball
        // sees only the tail edge of z
        let bsep = (0..8)
            .filter(|&w| w != z)
            .map(|w| {
                f.dist_from_set(&[f.boundary_node(z)]).unwrap()[f.boundary_node(w)]
            })
            .fold(f64::INFINITY, f64::min);
        let radii = [bsep / 2.0, bsep / 4.0, bsep / 8.0];
        let avgs = trace_by_averaging(&f, &u, z, &radii);
        let exact = u[f.boundary_node(z)];
        let errs: Vec<f64> = avgs.iter().map(|a| (a - exact).abs()).collect();
        assert!(errs[2] <= errs[1] && errs[1] <= errs[0], "averages do not tighten: {errs:?}");
        // a ball inside the tail edge averages the linear interpolant, so
        // the deviation is exactly |du| r / (2 len)
        let deep = u[f.vertex_id(z, 12).unwrap()];
        let tail_len = 4.0 * fixtures::alpha().powi(-12);
        for (&r, &err) in radii.iter().zip(&errs) {
            if r < tail_len {
                let predicted = (deep - exact).abs() * r / (2.0 * tail_len);
                assert!((err - predicted).abs() < 1e-12, "err {err} vs predicted {predicted}");
            }
        }
    }

    #[test]
    fn boundedness_report_finite_and_param_checked() {
        let s = fixtures::fix_b();
        let theta = 0.5;
        let p = 2.0;
        let beta = FillingParams::beta_for(0.25, theta, p);
        let f = standard(&s, beta, 12);
        let report = boundedness_report(&f, &s, theta, p, 12, 99).unwrap();
        assert!(report.r_trace.is_finite() && report.r_trace > 0.0);
        assert!(report.r_extension.is_finite() && report.r_extension > 0.0);

        // wrong pairing rejected
        assert!(boundedness_report(&f, &s, 0.9, p, 4, 1).is_err());
    }

    #[test]
    fn forced_indicator_sample_bounds_the_estimate() {
        let s = fixtures::fix_a();
        let theta = 0.5;
        let p = 2.0;
        let beta = FillingParams::beta_for(0.25, theta, p);
        let f = standard(&s, beta, 4);
        let indicator = vec![1.0, 0.0];
        let hand =
            dirichlet_energy(&f, p, &extend(&f, &s, &indicator)) / besov_energy(&s, theta, p, &indicator);
        let report = boundedness_report(&f, &s, theta, p, 6, 5).unwrap();
        assert!(report.r_extension >= hand - 1e-12);
    }

    #[test]
    fn norm_estimates_stable_under_depth_refinement() {
        let s = fixtures::fix_b();
        let theta = 0.5;
        let p = 2.0;
        let beta = FillingParams::beta_for(0.25, theta, p);
        let f1 = standard(&s, beta, 12);
        let f2 = standard(&s, beta, 14);
        let r1 = boundedness_report(&f1, &s, theta, p, 16, 123).unwrap();
        let r2 = boundedness_report(&f2, &s, theta, p, 16, 123).unwrap();
        let ratio = r2.r_extension / r1.r_extension;
        assert!(ratio < 2.0 && ratio > 0.5, "extension bound moved by {ratio}");
    }
}
