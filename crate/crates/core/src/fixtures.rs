//! Named desk-scale instances used by tests, the oracle runner, and the
//! experiment configs.

use crate::error::{Error, Result};
use crate::space::{PointCloudSpace, SubsetMask};

/// e^{1/4}; separation shrinks by this factor per level.
pub fn alpha() -> f64 {
    (0.25f64).exp()
}

pub fn single_point() -> PointCloudSpace {
    PointCloudSpace::from_points(vec![vec![0.0]], vec![1.0], 0).unwrap()
}

/// Two points at distance 1/2, unit masses.
pub fn fix_a() -> PointCloudSpace {
    PointCloudSpace::from_points(vec![vec![0.0], vec![0.5]], vec![1.0, 1.0], 0).unwrap()
}

/// Eight-point grid with spacing 1/14 (diameter 1/2), unit masses.
pub fn fix_b() -> PointCloudSpace {
    let pts = (0..8).map(|k| vec![k as f64 / 14.0]).collect();
    PointCloudSpace::from_points(pts, vec![1.0; 8], 0).unwrap()
}

/// n points uniformly on [0, 1/2], total mass 1, based at the left end.
pub fn grid_1d(n: usize) -> PointCloudSpace {
    assert!(n >= 2);
    let h = 0.5 / (n - 1) as f64;
    let pts = (0..n).map(|k| vec![k as f64 * h]).collect();
    PointCloudSpace::from_points(pts, vec![1.0 / n as f64; n], 0).unwrap()
}

/// k x k grid on [0, 1/2]^2 (Euclidean), total mass 1, based at a corner.
pub fn grid_2d(k: usize) -> PointCloudSpace {
    assert!(k >= 2);
    let h = 0.5 / (k - 1) as f64;
    let mut pts = Vec::with_capacity(k * k);
    for i in 0..k {
        for j in 0..k {
            pts.push(vec![i as f64 * h, j as f64 * h]);
        }
    }
    let n = pts.len();
    PointCloudSpace::from_points(pts, vec![1.0 / n as f64; n], 0).unwrap()
}

/// Midpoints of the surviving middle-thirds intervals at the given level,
/// scaled to [0, 1/2], each carrying the natural mass 2^{-level}.
pub fn cantor(level: usize) -> PointCloudSpace {
    let mut intervals = vec![(0.0f64, 1.0f64)];
    for _ in 0..level {
        let mut next = Vec::with_capacity(intervals.len() * 2);
        for (a, b) in intervals {
            let third = (b - a) / 3.0;
            next.push((a, a + third));
            next.push((b - third, b));
        }
        intervals = next;
    }
    let mass = 0.5f64.powi(level as i32);
    let pts = intervals
        .iter()
        .map(|(a, b)| vec![0.5 * 0.5 * (a + b)])
        .collect();
    PointCloudSpace::from_points(pts, vec![mass; intervals.len()], 0).unwrap()
}

/// Desk model of the punctured ball in one dimension: n+1 points on
/// [-1/4, 1/4] (n even so the center atom sits exactly at the origin).
pub fn punctured_1d(n: usize) -> PointCloudSpace {
    assert!(n >= 4 && n % 2 == 0, "need an even subdivision count");
    let pts = (0..=n)
        .map(|k| vec![(k as f64 / n as f64 - 0.5) * 0.5])
        .collect();
    let m = 1.0 / (n + 1) as f64;
    PointCloudSpace::from_points(pts, vec![m; n + 1], n / 2).unwrap()
}

/// Obstacle for the punctured instances: the origin atom plus every point at
/// distance >= 1/8 from it (the thick exterior of the half-radius ball).
pub fn punctured_obstacle(space: &PointCloudSpace) -> SubsetMask {
    let center = space.base_point();
    let ids: Vec<usize> = (0..space.len())
        .filter(|&z| z == center || space.dist(center, z) >= 0.125)
        .collect();
    SubsetMask::from_ids(space.len(), &ids, "E")
}

/// Two-dimensional punctured instance on a (k x k) grid, k odd, centered at
/// the middle atom.
pub fn punctured_2d(k: usize) -> PointCloudSpace {
    assert!(k >= 5 && k % 2 == 1, "need an odd grid side");
    let h = 0.5 / (k - 1) as f64;
    let mut pts = Vec::with_capacity(k * k);
    for i in 0..k {
        for j in 0..k {
            pts.push(vec![i as f64 * h - 0.25, j as f64 * h - 0.25]);
        }
    }
    let n = pts.len();
    let center = (k / 2) * k + k / 2;
    PointCloudSpace::from_points(pts, vec![1.0 / n as f64; n], center).unwrap()
}

/// Resolves a fixture name of the form `name` or `name:param`.
pub fn by_name(spec: &str) -> Result<PointCloudSpace> {
    let (name, param) = match spec.split_once(':') {
        Some((n, p)) => (n, Some(p)),
        None => (spec, None),
    };
    let parse = |p: Option<&str>, default: usize| -> Result<usize> {
        match p {
            None => Ok(default),
            Some(s) => s
                .parse()
                .map_err(|_| Error::SpaceFormat(format!("bad fixture parameter {s:?}"))),
        }
    };
    match name {
        "single" => Ok(single_point()),
        "fixa" => Ok(fix_a()),
        "fixb" => Ok(fix_b()),
        "grid1d" => Ok(grid_1d(parse(param, 32)?)),
        "grid2d" => Ok(grid_2d(parse(param, 8)?)),
        "cantor" => Ok(cantor(parse(param, 4)?)),
        "punctured1d" => Ok(punctured_1d(parse(param, 64)?)),
        "punctured2d" => Ok(punctured_2d(parse(param, 9)?)),
        other => Err(Error::SpaceFormat(format!("unknown fixture {other:?}"))),
    }
}

/// Resolves a named obstacle on a space.
pub fn obstacle_by_name(space: &PointCloudSpace, name: &str) -> Result<SubsetMask> {
    let n = space.len();
    match name {
        "base" => Ok(SubsetMask::from_ids(n, &[space.base_point()], "E")),
        "left" => Ok(SubsetMask::from_ids(n, &[0], "E")),
        "endpoints" => {
            // extremal atoms: the two realizing the diameter
            let mut best = (0usize, 0usize, 0.0f64);
            for a in 0..n {
                for b in (a + 1)..n {
                    if space.dist(a, b) > best.2 {
                        best = (a, b, space.dist(a, b));
                    }
                }
            }
            Ok(SubsetMask::from_ids(n, &[best.0, best.1], "E"))
        }
        "puncture" => Ok(punctured_obstacle(space)),
        other => Err(Error::SpaceFormat(format!("unknown obstacle {other:?}"))),
    }
}
