//! Finite metric measure spaces and their metric-geometric diagnostics:
//! nested separated nets, doubling ratios, porosity, Assouad codimension
//! estimates, and the doubling-preserving exhaustion.

use crate::error::{Error, Result};
use crate::metric::{self, BallMassIndex, DistMatrix};

pub type FieldZ = Vec<f64>;

/// A finite metric measure space: atoms with pairwise distances, strictly
/// positive masses, and a distinguished base point. Distances are rescaled
/// at load time so the diameter is below 1.
#[derive(Debug, Clone)]
pub struct PointCloudSpace {
    coords: Option<Vec<Vec<f64>>>,
    dist: DistMatrix,
    mass: Vec<f64>,
    base_point: usize,
    diam: f64,
    /// Multiplier applied to raw distances (1.0 when no rescaling was needed).
    normalization: f64,
    ball_index: BallMassIndex,
}

impl PointCloudSpace {
    /// Validates and normalizes a space given directly by a distance matrix.
    /// When the raw diameter is >= 1, every distance is divided by twice the
    /// diameter, so the normalized diameter is exactly 1/2.
    pub fn from_distance_matrix(
        mut dist: DistMatrix,
        mass: Vec<f64>,
        base_point: usize,
        coords: Option<Vec<Vec<f64>>>,
    ) -> Result<Self> {
        let n = dist.len();
        if mass.len() != n {
            return Err(Error::SpaceFormat(format!(
                "{} masses for {} points",
                mass.len(),
                n
            )));
        }
        if n == 0 {
            return Err(Error::SpaceFormat("space has no points".into()));
        }
        if base_point >= n {
            return Err(Error::BasePointOutOfRange { index: base_point, len: n });
        }
        for (i, &m) in mass.iter().enumerate() {
            if !(m > 0.0) || !m.is_finite() {
                return Err(Error::NonpositiveMass { index: i, value: m });
            }
        }
        dist.validate_metric(1e-12)?;

        let raw_diam = dist.diameter();
        let normalization = if raw_diam >= 1.0 { 1.0 / (2.0 * raw_diam) } else { 1.0 };
        if normalization != 1.0 {
            dist.scale(normalization);
        }
        let diam = dist.diameter();
        let ball_index = BallMassIndex::build(&dist, &mass);
        Ok(Self { coords, dist, mass, base_point, diam, normalization, ball_index })
    }

    /// Euclidean point cloud.
    pub fn from_points(
        points: Vec<Vec<f64>>,
        mass: Vec<f64>,
        base_point: usize,
    ) -> Result<Self> {
        let n = points.len();
        let dim = points.first().map_or(0, Vec::len);
        for p in &points {
            if p.len() != dim {
                return Err(Error::SpaceFormat("points of mixed dimension".into()));
            }
        }
        let dist = DistMatrix::from_fn(n, |i, j| {
            points[i]
                .iter()
                .zip(&points[j])
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt()
        });
        Self::from_distance_matrix(dist, mass, base_point, Some(points))
    }

    pub fn len(&self) -> usize {
        self.dist.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dist.is_empty()
    }

    #[inline]
    pub fn dist(&self, a: usize, b: usize) -> f64 {
        self.dist.get(a, b)
    }

    pub fn dist_matrix(&self) -> &DistMatrix {
        &self.dist
    }

    pub fn mass(&self, i: usize) -> f64 {
        self.mass[i]
    }

    pub fn masses(&self) -> &[f64] {
        &self.mass
    }

    pub fn total_mass(&self) -> f64 {
        self.mass.iter().sum()
    }

    pub fn base_point(&self) -> usize {
        self.base_point
    }

    pub fn diam(&self) -> f64 {
        self.diam
    }

    pub fn normalization(&self) -> f64 {
        self.normalization
    }

    pub fn coords(&self) -> Option<&[Vec<f64>]> {
        self.coords.as_deref()
    }

    /// Mass of the open ball B(center, r).
    pub fn ball_mass(&self, center: usize, r: f64) -> f64 {
        self.ball_index.open_ball_mass(center, r)
    }

    /// Atom mass nu({z}).
    pub fn atom_mass(&self, z: usize) -> f64 {
        self.mass[z]
    }

    /// Smallest pairwise separation; infinite for a single point.
    pub fn min_separation(&self) -> f64 {
        self.dist.min_positive().unwrap_or(f64::INFINITY)
    }

    /// Smallest level i with alpha^{-i} <= min pairwise separation, i.e. the
    /// level from which the maximal nets contain every point.
    pub fn critical_level(&self, alpha: f64) -> usize {
        let sep = self.min_separation();
        if sep.is_infinite() {
            return 0;
        }
        let mut i = 0usize;
        while alpha.powi(-(i as i32)) > sep {
            i += 1;
        }
        i
    }

    /// Restriction to a subset of points; indices are re-labelled in
    /// ascending original order. The base point maps to the member closest
    /// to the original base point under the original metric.
    pub fn restrict(&self, keep: &SubsetMask) -> Result<(PointCloudSpace, Vec<usize>)> {
        let ids: Vec<usize> = keep.ids();
        if ids.is_empty() {
            return Err(Error::EmptySubset);
        }
        let dist = DistMatrix::from_fn(ids.len(), |i, j| self.dist(ids[i], ids[j]));
        let mass = ids.iter().map(|&i| self.mass[i]).collect();
        let base = ids
            .iter()
            .enumerate()
            .min_by(|a, b| {
                self.dist(*a.1, self.base_point)
                    .partial_cmp(&self.dist(*b.1, self.base_point))
                    .unwrap()
            })
            .map(|(k, _)| k)
            .unwrap();
        let coords = self
            .coords
            .as_ref()
            .map(|c| ids.iter().map(|&i| c[i].clone()).collect());
        let sub = PointCloudSpace::from_distance_matrix(dist, mass, base, coords)?;
        Ok((sub, ids))
    }
}

/// Membership flags for a subset of a space's points, with a role label.
#[derive(Debug, Clone, PartialEq)]
pub struct SubsetMask {
    flags: Vec<bool>,
    pub label: String,
}

impl SubsetMask {
    pub fn from_ids(n: usize, ids: &[usize], label: &str) -> Self {
        let mut flags = vec![false; n];
        for &i in ids {
            flags[i] = true;
        }
        Self { flags, label: label.to_string() }
    }

    pub fn from_flags(flags: Vec<bool>, label: &str) -> Self {
        Self { flags, label: label.to_string() }
    }

    pub fn full(n: usize, label: &str) -> Self {
        Self { flags: vec![true; n], label: label.to_string() }
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        self.flags[i]
    }

    pub fn len(&self) -> usize {
        self.flags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.count() == 0
    }

    pub fn count(&self) -> usize {
        self.flags.iter().filter(|&&f| f).count()
    }

    pub fn ids(&self) -> Vec<usize> {
        (0..self.flags.len()).filter(|&i| self.flags[i]).collect()
    }

    pub fn complement(&self, label: &str) -> Self {
        Self {
            flags: self.flags.iter().map(|f| !f).collect(),
            label: label.to_string(),
        }
    }
}

/// Nested maximally separated nets A_0 subset A_1 subset ... subset A_L.
#[derive(Debug, Clone)]
pub struct NetHierarchy {
    pub alpha: f64,
    levels: Vec<Vec<usize>>,
}

impl NetHierarchy {
    pub fn max_level(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn level(&self, i: usize) -> &[usize] {
        &self.levels[i]
    }

    pub fn levels(&self) -> &[Vec<usize>] {
        &self.levels
    }

    pub fn separation(&self, i: usize) -> f64 {
        self.alpha.powi(-(i as i32))
    }
}

/// Greedy nested net construction: each level starts from the previous one
/// and scans the remaining points in ascending id order, keeping every point
/// that preserves the alpha^{-i} separation. The scan order makes the result
/// deterministic; maximality holds because every rejected point is within
/// the separation radius of an accepted one.
pub fn build_nets(space: &PointCloudSpace, alpha: f64, depth: usize) -> Result<NetHierarchy> {
    if !(alpha > 1.0) {
        return Err(Error::ParameterRange(format!("alpha must exceed 1, got {alpha}")));
    }
    let required = space.critical_level(alpha);
    if depth < required {
        return Err(Error::DepthTooSmall { requested: depth, required });
    }
    let n = space.len();
    let mut levels: Vec<Vec<usize>> = Vec::with_capacity(depth + 1);
    let mut current = vec![space.base_point()];
    levels.push(current.clone());
    for i in 1..=depth {
        let sep = alpha.powi(-(i as i32));
        let mut member = vec![false; n];
        for &p in &current {
            member[p] = true;
        }
        for q in 0..n {
            if member[q] {
                continue;
            }
            let ok = current.iter().all(|&p| space.dist(p, q) >= sep);
            if ok {
                current.push(q);
                member[q] = true;
            }
        }
        current.sort_unstable();
        levels.push(current.clone());
    }
    Ok(NetHierarchy { alpha, levels })
}

/// Largest measured ratio nu(B(x, 2r)) / nu(B(x, r)) over all centers and
/// critical radii r in {d(x,y)} and just above. Returns 1 for a single atom.
pub fn doubling_estimate(space: &PointCloudSpace) -> f64 {
    let n = space.len();
    let mut worst: f64 = 1.0;
    for x in 0..n {
        for y in 0..n {
            let d = space.dist(x, y);
            if d <= 0.0 {
                continue;
            }
            for r in [d, metric::next_up(d)] {
                let inner = space.ball_mass(x, r);
                let outer = space.ball_mass(x, 2.0 * r);
                worst = worst.max(outer / inner);
            }
        }
    }
    worst
}

/// Pointwise distance to a nonempty obstacle set; zero exactly on the set.
pub fn distance_to_set(space: &PointCloudSpace, e: &SubsetMask) -> Result<FieldZ> {
    if e.is_empty() {
        return Err(Error::EmptySubset);
    }
    let ids = e.ids();
    Ok((0..space.len())
        .map(|z| ids.iter().map(|&w| space.dist(z, w)).fold(f64::INFINITY, f64::min))
        .collect())
}

/// Best porosity constant of E, with radii capped by diam(E). Errors for a
/// zero-diameter obstacle; see [`porosity_constant_capped`] for the
/// single-point convention.
pub fn check_porosity(space: &PointCloudSpace, e: &SubsetMask) -> Result<f64> {
    if e.is_empty() {
        return Err(Error::EmptySubset);
    }
    let ids = e.ids();
    let diam_e = ids
        .iter()
        .flat_map(|&a| ids.iter().map(move |&b| space.dist(a, b)))
        .fold(0.0, f64::max);
    if diam_e == 0.0 {
        return Err(Error::SinglePointObstacle);
    }
    Ok(porosity_constant_capped(space, e, diam_e))
}

/// Porosity scan with an explicit radius cap; callers with a single-point
/// obstacle pass a cap of their choosing (the radius upper bound is omitted
/// in that convention, so typically the space diameter).
pub fn porosity_constant_capped(space: &PointCloudSpace, e: &SubsetMask, cap: f64) -> f64 {
    let in_e: Vec<bool> = (0..space.len()).map(|i| e.contains(i)).collect();
    metric::porosity_constant(space.dist_matrix(), &in_e, cap)
}

/// Slope-fit estimates of the lower and upper Assouad codimension of E.
#[derive(Debug, Clone)]
pub struct CodimensionEstimate {
    /// Fit against the decay of the worst-case (largest) relative
    /// neighborhood measure over centers; estimates the lower codimension.
    pub lower: f64,
    /// Fit against the best-case (smallest) relative measure; estimates the
    /// upper codimension.
    pub upper: f64,
    pub lower_residual: f64,
    pub upper_residual: f64,
    pub pairs: usize,
}

impl CodimensionEstimate {
    /// Max log-scale deviation above which a fit is flagged unreliable.
    pub const RESIDUAL_THRESHOLD: f64 = 1.0;

    pub fn reliable(&self) -> bool {
        self.lower_residual.max(self.upper_residual) <= Self::RESIDUAL_THRESHOLD
    }
}

/// Least-squares fits of log relative neighborhood measure against
/// log(r / R) over a geometric (r, R) grid with centers on E.
///
/// The true codimensions quantify over all scales 0 < r <= R; a finite
/// sample only resolves scales between its minimum separation and its
/// diameter, so the scale window here is a choice, and the residuals are
/// reported to flag unreliable fits.
pub fn estimate_codimension(
    space: &PointCloudSpace,
    e: &SubsetMask,
) -> Result<CodimensionEstimate> {
    if e.is_empty() {
        return Err(Error::EmptySubset);
    }
    let d_e = distance_to_set(space, e)?;
    let centers = e.ids();
    let n = space.len();
    let diam = space.diam();
    let resolution = space.min_separation();

    let mut ts = Vec::new();
    let mut y_max = Vec::new();
    let mut y_min = Vec::new();
    let mut big_r = diam * 0.999;
    while big_r >= 2.0 * resolution.min(diam) && big_r > 0.0 {
        let mut r = big_r / 2.0;
        while r >= resolution * 0.999 {
            let mut worst = f64::NEG_INFINITY;
            let mut best = f64::INFINITY;
            for &x in &centers {
                let mut hit = 0.0;
                let mut total = 0.0;
                for y in 0..n {
                    if space.dist(x, y) < big_r {
                        total += space.mass(y);
                        if d_e[y] < r {
                            hit += space.mass(y);
                        }
                    }
                }
                let ratio = hit / total;
                worst = worst.max(ratio);
                best = best.min(ratio);
            }
            ts.push((r / big_r).ln());
            y_max.push(worst.ln());
            y_min.push(best.ln());
            r /= 2.0;
        }
        big_r /= 2.0;
    }
    if ts.len() < 3 {
        return Err(Error::TooFewScalePairs { found: ts.len(), needed: 3 });
    }
    let (lower, _, lower_residual) = metric::linear_fit(&ts, &y_max);
    let (upper, _, upper_residual) = metric::linear_fit(&ts, &y_min);
    Ok(CodimensionEstimate { lower, upper, lower_residual, upper_residual, pairs: ts.len() })
}

/// Iterated neighborhood exhaustion around a center: starts from the open
/// ball B(z0, R) and adds the closed 4^{-i-1} R neighborhood at step i until
/// the set stabilizes. The result contains B(z0, R), stays inside B(z0, 2R),
/// and satisfies the corkscrew condition with c = 1/48; all three are
/// asserted before returning.
pub fn exhaustion_subset(space: &PointCloudSpace, z0: usize, big_r: f64) -> Result<SubsetMask> {
    if !(big_r > 0.0) {
        return Err(Error::ParameterRange(format!("R must be positive, got {big_r}")));
    }
    let n = space.len();
    let mut inside: Vec<bool> = (0..n).map(|y| space.dist(z0, y) < big_r).collect();
    let mut step = 0usize;
    loop {
        let reach = big_r * 4f64.powi(-(step as i32 + 1));
        let mut next = inside.clone();
        let mut changed = false;
        for y in 0..n {
            if next[y] {
                continue;
            }
            let near = (0..n).any(|p| inside[p] && space.dist(y, p) <= reach);
            if near {
                next[y] = true;
                changed = true;
            }
        }
        inside = next;
        if !changed {
            break;
        }
        step += 1;
    }
    let mask = SubsetMask::from_flags(inside, "Z_R");

    for y in 0..n {
        let d = space.dist(z0, y);
        if d < big_r && !mask.contains(y) {
            return Err(Error::InternalConsistency(format!(
                "exhaustion lost point {y} of B(z0, R)"
            )));
        }
        if mask.contains(y) && d >= 2.0 * big_r {
            return Err(Error::InternalConsistency(format!(
                "exhaustion point {y} escaped B(z0, 2R)"
            )));
        }
    }
    check_corkscrew(space, &mask, big_r)?;
    Ok(mask)
}

/// Corkscrew check with c = 1/48: for every member z and critical radius
/// r < 4R there must be a member z_r within r/3 of z whose open cr-ball
/// contains no sample point outside the subset.
fn check_corkscrew(space: &PointCloudSpace, z_r_set: &SubsetMask, big_r: f64) -> Result<()> {
    const C: f64 = 1.0 / 48.0;
    let n = space.len();
    let outside: Vec<usize> = (0..n).filter(|&i| !z_r_set.contains(i)).collect();
    let d_out: Vec<f64> = (0..n)
        .map(|i| {
            outside
                .iter()
                .map(|&o| space.dist(i, o))
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    let members = z_r_set.ids();
    for &z in &members {
        let mut radii: Vec<f64> = (0..n)
            .map(|y| space.dist(z, y))
            .filter(|&d| d > 0.0)
            .flat_map(|d| [d, metric::next_up(d)])
            .filter(|&r| r < 4.0 * big_r)
            .collect();
        radii.sort_by(|a, b| a.partial_cmp(b).unwrap());
        radii.dedup();
        for &r in &radii {
            let ok = members
                .iter()
                .any(|&c| space.dist(z, c) <= r / 3.0 && d_out[c] >= C * r);
            if !ok {
                return Err(Error::InternalConsistency(format!(
                    "corkscrew fails at point {z}, radius {r}"
                )));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    /// Exhaustive validity check used by unit and property tests: nesting,
    /// separation, and maximality of every level.
    pub(crate) fn assert_valid_hierarchy(space: &PointCloudSpace, nets: &NetHierarchy) {
        for i in 0..=nets.max_level() {
            let level = nets.level(i);
            let sep = nets.separation(i);
            if i > 0 {
                for p in nets.level(i - 1) {
                    assert!(level.contains(p), "nesting broken at level {i}");
                }
            }
            for (ai, &a) in level.iter().enumerate() {
                for &b in &level[ai + 1..] {
                    assert!(space.dist(a, b) >= sep, "separation broken at level {i}");
                }
            }
            for q in 0..space.len() {
                if !level.contains(&q) {
                    let coverable = level.iter().any(|&p| space.dist(p, q) < sep);
                    assert!(coverable, "maximality broken at level {i}: point {q} addable");
                }
            }
        }
    }

    #[test]
    fn load_normalizes_large_diameter() {
        let rows = vec![vec![0.0, 3.0], vec![3.0, 0.0]];
        let s = PointCloudSpace::from_distance_matrix(
            DistMatrix::from_rows(rows).unwrap(),
            vec![1.0, 1.0],
            0,
            None,
        )
        .unwrap();
        assert_eq!(s.dist(0, 1), 0.5);
        assert_eq!(s.diam(), 0.5);
        assert!((s.normalization() - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn load_keeps_small_diameter() {
        let s = fixtures::fix_a();
        assert_eq!(s.dist(0, 1), 0.5);
        assert_eq!(s.normalization(), 1.0);
    }

    #[test]
    fn load_rejects_bad_mass() {
        let rows = vec![vec![0.0, 0.5], vec![0.5, 0.0]];
        let err = PointCloudSpace::from_distance_matrix(
            DistMatrix::from_rows(rows).unwrap(),
            vec![1.0, 0.0],
            0,
            None,
        )
        .unwrap_err();
        assert!(matches!(err, Error::NonpositiveMass { index: 1, .. }));
    }

    #[test]
    fn nets_fix_a() {
        let s = fixtures::fix_a();
        assert_eq!(s.critical_level(fixtures::alpha()), 3);
        let nets = build_nets(&s, fixtures::alpha(), 4).unwrap();
        assert_eq!(nets.level(0), &[0]);
        assert_eq!(nets.level(1), &[0]);
        assert_eq!(nets.level(2), &[0]);
        assert_eq!(nets.level(3), &[0, 1]);
        assert_eq!(nets.level(4), &[0, 1]);
        assert_valid_hierarchy(&s, &nets);
    }

    #[test]
    fn nets_fix_b_saturate_at_eleven() {
        let s = fixtures::fix_b();
        assert_eq!(s.critical_level(fixtures::alpha()), 11);
        let nets = build_nets(&s, fixtures::alpha(), 12).unwrap();
        assert!(nets.level(10).len() < 8);
        assert_eq!(nets.level(11).len(), 8);
        assert_eq!(nets.level(12).len(), 8);
        assert_valid_hierarchy(&s, &nets);
    }

    #[test]
    fn nets_single_point() {
        let s = fixtures::single_point();
        let nets = build_nets(&s, fixtures::alpha(), 5).unwrap();
        for i in 0..=5 {
            assert_eq!(nets.level(i), &[0]);
        }
    }

    #[test]
    fn nets_exhaustive_check_at_sixty_four_points() {
        for s in [fixtures::grid_1d(64), fixtures::grid_2d(8), fixtures::cantor(4)] {
            let depth = s.critical_level(fixtures::alpha()) + 1;
            let nets = build_nets(&s, fixtures::alpha(), depth).unwrap();
            assert_valid_hierarchy(&s, &nets);
        }
    }

    #[test]
    fn nets_error_below_critical_level() {
        let s = fixtures::fix_a();
        let err = build_nets(&s, fixtures::alpha(), 2).unwrap_err();
        assert!(matches!(err, Error::DepthTooSmall { requested: 2, required: 3 }));
    }

    #[test]
    fn doubling_single_point_is_one() {
        assert_eq!(doubling_estimate(&fixtures::single_point()), 1.0);
    }

    #[test]
    fn doubling_fix_a_is_two() {
        assert_eq!(doubling_estimate(&fixtures::fix_a()), 2.0);
    }

    #[test]
    fn doubling_fix_b_brute_force() {
        let s = fixtures::fix_b();
        let reported = doubling_estimate(&s);
        // independent brute force over the same critical radius set
        let mut oracle: f64 = 1.0;
        for x in 0..s.len() {
            for y in 0..s.len() {
                let d = s.dist(x, y);
                if d <= 0.0 {
                    continue;
                }
                for r in [d, metric::next_up(d)] {
                    let inner: f64 = (0..s.len())
                        .filter(|&w| s.dist(x, w) < r)
                        .map(|w| s.mass(w))
                        .sum();
                    let outer: f64 = (0..s.len())
                        .filter(|&w| s.dist(x, w) < 2.0 * r)
                        .map(|w| s.mass(w))
                        .sum();
                    oracle = oracle.max(outer / inner);
                }
            }
        }
        assert_eq!(reported, oracle);
        assert!(reported <= 4.0, "uniform grid doubling exceeded 4: {reported}");
    }

    #[test]
    fn distance_to_set_values() {
        let s = fixtures::fix_a();
        let e = SubsetMask::from_ids(2, &[0], "E");
        let d = distance_to_set(&s, &e).unwrap();
        assert_eq!(d[0], 0.0);
        assert_eq!(d[1], 0.5);

        let g = fixtures::fix_b();
        let ends = SubsetMask::from_ids(8, &[0, 7], "E");
        let d = distance_to_set(&g, &ends).unwrap();
        for z in 0..8 {
            let expect = g.dist(z, 0).min(g.dist(z, 7));
            assert_eq!(d[z], expect);
        }
        assert!(distance_to_set(&s, &SubsetMask::from_ids(2, &[], "E")).is_err());
    }

    #[test]
    fn distance_to_set_is_one_lipschitz() {
        let s = fixtures::grid_1d(16);
        let e = SubsetMask::from_ids(s.len(), &[0, 3], "E");
        let d = distance_to_set(&s, &e).unwrap();
        for a in 0..s.len() {
            for b in 0..s.len() {
                assert!((d[a] - d[b]).abs() <= s.dist(a, b) + 1e-12);
            }
        }
    }

    #[test]
    fn porosity_of_full_space_is_zero() {
        let s = fixtures::fix_b();
        let e = SubsetMask::full(8, "E");
        assert_eq!(check_porosity(&s, &e).unwrap(), 0.0);
    }

    #[test]
    fn porosity_single_point_convention() {
        let s = fixtures::fix_b();
        let e = SubsetMask::from_ids(8, &[0], "E");
        assert!(matches!(check_porosity(&s, &e), Err(Error::SinglePointObstacle)));
        let c = porosity_constant_capped(&s, &e, s.diam());
        assert!(c > 0.999, "endpoint obstacle should be deeply porous, got {c}");
    }

    #[test]
    fn porosity_of_cantor_like_set_positive() {
        // midpoints-removed grid: keep every other atom as obstacle
        let s = fixtures::grid_1d(17);
        let ids: Vec<usize> = (0..17).step_by(2).collect();
        let e = SubsetMask::from_ids(17, &ids, "E");
        let c = check_porosity(&s, &e).unwrap();
        assert!(c > 0.0, "expected positive porosity, got {c}");
    }

    #[test]
    fn codimension_of_full_space_is_zero() {
        let s = fixtures::grid_1d(16);
        let e = SubsetMask::full(16, "E");
        let est = estimate_codimension(&s, &e).unwrap();
        assert_eq!(est.lower, 0.0);
        assert_eq!(est.upper, 0.0);
    }

    #[test]
    fn codimension_of_point_in_1d_grid() {
        let s = fixtures::grid_1d(64);
        let e = SubsetMask::from_ids(64, &[0], "E");
        let est = estimate_codimension(&s, &e).unwrap();
        assert!((est.lower - 1.0).abs() < 0.3, "lower = {}", est.lower);
        assert!((est.upper - 1.0).abs() < 0.3, "upper = {}", est.upper);
    }

    #[test]
    fn codimension_of_point_in_2d_grid() {
        let s = fixtures::grid_2d(16);
        let e = SubsetMask::from_ids(s.len(), &[0], "E");
        let est = estimate_codimension(&s, &e).unwrap();
        assert!((est.lower - 2.0).abs() < 0.4, "lower = {}", est.lower);
        assert!((est.upper - 2.0).abs() < 0.4, "upper = {}", est.upper);
    }

    #[test]
    fn exhaustion_covers_everything_for_large_radius() {
        let s = fixtures::fix_b();
        let z = exhaustion_subset(&s, 0, 2.0 * s.diam()).unwrap();
        assert_eq!(z.count(), 8);
    }

    #[test]
    fn exhaustion_fix_b_small_radius() {
        let s = fixtures::fix_b();
        let z = exhaustion_subset(&s, 0, 0.1).unwrap();
        for y in 0..8 {
            if s.dist(0, y) < 0.1 {
                assert!(z.contains(y));
            }
            if z.contains(y) {
                assert!(s.dist(0, y) < 0.2);
            }
        }
    }

    #[test]
    fn exhaustion_on_grid_is_interval_within_four_thirds_r() {
        let s = fixtures::grid_1d(32);
        let big_r = 0.11;
        let z = exhaustion_subset(&s, 0, big_r).unwrap();
        let ids = z.ids();
        // contiguous prefix of the grid
        assert_eq!(ids, (0..ids.len()).collect::<Vec<_>>());
        let reach = ids.iter().map(|&i| s.dist(0, i)).fold(0.0, f64::max);
        assert!(reach <= 4.0 / 3.0 * big_r + 1e-12, "reach {reach}");
    }
}
