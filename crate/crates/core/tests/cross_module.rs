//! Invariants that tie the filling, covers, and weight machinery together.

use hyperfill_core::covers::Domain;
use hyperfill_core::filling::{build_filling, FillingParams};
use hyperfill_core::metric;
use hyperfill_core::space::build_nets;
use hyperfill_core::weights;
use hyperfill_core::{fixtures, SubsetMask};

fn standard_filling(
    space: &hyperfill_core::PointCloudSpace,
    beta: f64,
    depth: usize,
) -> hyperfill_core::filling::Filling {
    let nets = build_nets(space, fixtures::alpha(), depth).unwrap();
    build_filling(space, &nets, FillingParams::standard(beta, depth)).unwrap()
}

/// The boundary copy of the space is porous in the filling, with constant at
/// least 1 / (4 alpha (1 + ln alpha)).
#[test]
fn boundary_is_porous_in_filling() {
    let s = fixtures::fix_b();
    let f = standard_filling(&s, 1.0, 12);
    let all_of_z = SubsetMask::full(s.len(), "Z");
    let domain = Domain::from_filling(&f, &all_of_z).unwrap();
    let in_e: Vec<bool> = (0..domain.len()).map(|i| !domain.in_omega[i]).collect();
    // cap = diameter of the boundary copy under d_eps
    let mut cap: f64 = 0.0;
    for z in 0..s.len() {
        for w in 0..s.len() {
            cap = cap.max(domain.dist.get(f.boundary_node(z), f.boundary_node(w)));
        }
    }
    let c = metric::porosity_constant(&domain.dist, &in_e, cap);
    let alpha = fixtures::alpha();
    let predicted = 1.0 / (4.0 * alpha * (1.0 + alpha.ln()));
    assert!(
        c >= predicted - 1e-3,
        "porosity {c} below the predicted constant {predicted}"
    );
}

/// Reweighting by sigma multiplies each vertex weight by exactly
/// d_eps(v, Z)^sigma / 4^sigma, tying the weight module's distance powers to
/// the filling's mass recomputation.
#[test]
fn reweight_agrees_with_distance_power_weights() {
    let s = fixtures::fix_b();
    let f = standard_filling(&s, 1.0, 12);
    let sigma = 0.4;
    let (g, edge_ratios) = f.reweight(sigma).unwrap();
    let d_z = f.dist_to_boundary();
    for (vid, (a, b)) in f.vertices().iter().zip(g.vertices()).enumerate() {
        let mass_ratio = b.hat_mu / a.hat_mu;
        let weight = d_z[vid].powf(sigma);
        let discrepancy = mass_ratio / weight * 4.0f64.powf(sigma);
        assert!(
            (discrepancy - 1.0).abs() < 1e-10,
            "vertex {vid}: mass ratio {mass_ratio} vs weight {weight}"
        );
    }
    // edge-level diagnostics stay in a bounded band
    let lo = edge_ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = edge_ratios.iter().cloned().fold(0.0f64, f64::max);
    assert!(lo > 0.0 && hi / lo < 50.0, "diagnostic band [{lo}, {hi}]");
}

/// The admissible-exponent formulas really do certify delta-regularizability
/// on the fixtures: any |sigma| below sigma_bound(delta, measured kappa,
/// measured C) yields delta_star <= delta.
#[test]
fn sigma_bound_certifies_delta_star() {
    let delta = 0.5;

    // space domain: 1d grid with endpoint obstacle
    let s = fixtures::grid_1d(32);
    let e = SubsetMask::from_ids(32, &[0], "E");
    let domain = Domain::from_space(&s, &e).unwrap();
    let (kappa, c) = weights::porosity_layer_fit(&domain).unwrap();
    let bound = weights::sigma_bound(delta, kappa, c).unwrap();
    assert!(bound.sigma0 > 0.0);
    for frac in [0.5, 0.99] {
        for sign in [1.0, -1.0] {
            let sigma = sign * frac * bound.sigma0;
            let w = weights::distance_power_weight(&domain, sigma).unwrap();
            let star = weights::delta_star(&domain, &w);
            assert!(
                star.delta <= delta,
                "sigma {sigma}: delta_star {} exceeds {delta}",
                star.delta
            );
        }
    }

    // filling domain: boundary obstacle = all of Z
    let f = standard_filling(&fixtures::fix_b(), 1.0, 12);
    let all_of_z = SubsetMask::full(8, "Z");
    let fd = Domain::from_filling(&f, &all_of_z).unwrap();
    let (kappa_f, c_f) = weights::porosity_layer_fit(&fd).unwrap();
    let bound_f = weights::sigma_bound(delta, kappa_f, c_f).unwrap();
    for sign in [1.0, -1.0] {
        let sigma = sign * 0.9 * bound_f.sigma0;
        let w = weights::distance_power_weight(&fd, sigma).unwrap();
        let star = weights::delta_star(&fd, &w);
        assert!(
            star.delta <= delta,
            "filling sigma {sigma}: delta_star {} exceeds {delta}",
            star.delta
        );
    }
}

/// Total mass equals the explicit finite double sum plus the closed-form
/// tails, and survives a reweight round trip.
#[test]
fn total_mass_and_reweight_round_trip() {
    let s = fixtures::cantor(3);
    let depth = s.critical_level(fixtures::alpha()) + 2;
    let f = standard_filling(&s, 0.8, depth);

    let mut explicit = 0.0;
    for e in f.edges() {
        explicit += e.mass;
    }
    assert!((f.total_mass() - explicit).abs() < 1e-14);

    let (g, _) = f.reweight(0.7).unwrap();
    let (h, _) = g.reweight(-0.7).unwrap();
    for (a, b) in f.edges().iter().zip(h.edges()) {
        assert!((a.mass - b.mass).abs() <= 1e-12 * a.mass.max(1e-300));
    }
}

/// Whitney multiplicity stays bounded across fixtures (the Lemma's constant
/// is 7C; the report carries the measured integer).
#[test]
fn whitney_multiplicity_across_fixtures() {
    for (s, depth) in [
        (fixtures::fix_a(), 4),
        (fixtures::fix_b(), 12),
        (fixtures::cantor(3), 16),
    ] {
        let f = standard_filling(&s, 1.0, depth);
        let report = hyperfill_core::filling::verify_whitney_filling(&f).unwrap();
        assert!(report.edges_covered);
        assert!(report.min_multiplicity >= 1);
        assert!(
            report.max_multiplicity <= 40,
            "unexpectedly large overlap {}",
            report.max_multiplicity
        );
    }
}
