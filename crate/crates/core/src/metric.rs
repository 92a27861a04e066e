//! Shared finite-metric utilities: symmetric distance matrices, ball
//! queries with the open-ball convention, and the porosity scan used on
//! both point clouds and filling node samples.

use crate::error::{Error, Result};

/// One representable step above `x`; used to build radius sets that probe
/// both sides of each open-ball membership jump.
pub fn next_up(x: f64) -> f64 {
    if x.is_nan() || x == f64::INFINITY {
        return x;
    }
    let bits = if x == 0.0 { 1 } else if x > 0.0 { x.to_bits() + 1 } else { x.to_bits() - 1 };
    f64::from_bits(bits)
}

/// Dense symmetric distance matrix over a finite sample.
#[derive(Debug, Clone)]
pub struct DistMatrix {
    n: usize,
    d: Vec<f64>,
}

impl DistMatrix {
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        let mut d = Vec::with_capacity(n * n);
        for row in &rows {
            if row.len() != n {
                return Err(Error::SpaceFormat(format!(
                    "distance matrix is not square: row of length {} in a {}-row matrix",
                    row.len(),
                    n
                )));
            }
            d.extend_from_slice(row);
        }
        Ok(Self { n, d })
    }

    /// Builds from a callable; the callable is invoked once per ordered pair.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut d = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                d[i * n + j] = f(i, j);
            }
        }
        Self { n, d }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.d[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.d[i * self.n..(i + 1) * self.n]
    }

    pub fn scale(&mut self, factor: f64) {
        for v in &mut self.d {
            *v *= factor;
        }
    }

    pub fn diameter(&self) -> f64 {
        self.d.iter().cloned().fold(0.0, f64::max)
    }

    /// Smallest positive entry; `None` when all off-diagonal entries vanish
    /// (single-point sample).
    pub fn min_positive(&self) -> Option<f64> {
        let mut best = f64::INFINITY;
        for &v in &self.d {
            if v > 0.0 && v < best {
                best = v;
            }
        }
        if best.is_finite() { Some(best) } else { None }
    }

    /// Validates metric axioms. Distances must be symmetric with zero
    /// diagonal, positive off the diagonal, and satisfy the triangle
    /// inequality on every ordered triple (up to `tol` absolute slack).
    pub fn validate_metric(&self, tol: f64) -> Result<()> {
        let n = self.n;
        for i in 0..n {
            let dii = self.get(i, i);
            if dii != 0.0 {
                return Err(Error::NonzeroDiagonal { index: i, value: dii });
            }
            for j in (i + 1)..n {
                let dij = self.get(i, j);
                let dji = self.get(j, i);
                if dij != dji {
                    return Err(Error::AsymmetricDistance { a: i, b: j, dab: dij, dba: dji });
                }
                if !(dij > 0.0) {
                    return Err(Error::NonpositiveDistance { a: i, b: j, value: dij });
                }
            }
        }
        for a in 0..n {
            for b in 0..n {
                let dab = self.get(a, b);
                for c in 0..n {
                    let sum = dab + self.get(b, c);
                    if self.get(a, c) > sum + tol {
                        return Err(Error::TriangleInequality {
                            a,
                            b,
                            c,
                            dac: self.get(a, c),
                            sum,
                        });
                    }
                }
            }
        }
        Ok(())
    }
}

/// Per-center sorted distances with cumulative masses, for O(log n) open-ball
/// mass queries inside the Besov kernel.
#[derive(Debug, Clone)]
pub struct BallMassIndex {
    /// For each center: (distance, cumulative mass of points strictly closer).
    sorted: Vec<Vec<(f64, f64)>>,
}

impl BallMassIndex {
    pub fn build(dist: &DistMatrix, mass: &[f64]) -> Self {
        let n = dist.len();
        let mut sorted = Vec::with_capacity(n);
        for i in 0..n {
            let mut pairs: Vec<(f64, f64)> = (0..n).map(|j| (dist.get(i, j), mass[j])).collect();
            pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
            let mut acc = 0.0;
            for p in &mut pairs {
                acc += p.1;
                p.1 = acc;
            }
            sorted.push(pairs);
        }
        Self { sorted }
    }

    /// Mass of the open ball B(center, r) = { y : d(center, y) < r }.
    pub fn open_ball_mass(&self, center: usize, r: f64) -> f64 {
        let row = &self.sorted[center];
        // count of entries with distance < r
        let k = row.partition_point(|&(d, _)| d < r);
        if k == 0 { 0.0 } else { row[k - 1].1 }
    }
}

/// Least-squares line fit; returns (slope, intercept, max |residual|).
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let mut max_resid: f64 = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        max_resid = max_resid.max((y - slope * x - intercept).abs());
    }
    (slope, intercept, max_resid)
}

/// Largest c in (0, 1] such that for every center x and every critical radius
/// 0 < r below the cap, some sample point y with d(x, y) <= r satisfies
/// d(y, E) >= c r, i.e. the open ball B(y, cr) misses E. Returns 0 when no
/// positive c works. The witness y is taken from the closed ball: at a
/// critical radius the open ball drops its boundary witness, which in a
/// finite sample would spuriously report porosity 0 for any obstacle whose
/// atoms sit exactly at grid distances.
///
/// Resolved by binary search on c to tolerance 1e-4.
pub fn porosity_constant(dist: &DistMatrix, in_e: &[bool], radius_cap: f64) -> f64 {
    let n = dist.len();
    let dist_to_e: Vec<f64> = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| in_e[j])
                .map(|j| dist.get(i, j))
                .fold(f64::INFINITY, f64::min)
        })
        .collect();

    let admits = |c: f64| -> bool {
        for x in 0..n {
            let mut radii: Vec<f64> = dist
                .row(x)
                .iter()
                .filter(|&&d| d > 0.0)
                .flat_map(|&d| [d, next_up(d)])
                .filter(|&r| r < radius_cap)
                .collect();
            radii.sort_by(|a, b| a.partial_cmp(b).unwrap());
            radii.dedup();
            for &r in &radii {
                let ok = (0..n).any(|y| dist.get(x, y) <= r && dist_to_e[y] >= c * r);
                if !ok {
                    return false;
                }
            }
        }
        true
    };

    if !admits(1e-9) {
        return 0.0;
    }
    let (mut lo, mut hi) = (1e-9, 1.0);
    if admits(1.0) {
        return 1.0;
    }
    while hi - lo > 1e-4 {
        let mid = 0.5 * (lo + hi);
        if admits(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}
